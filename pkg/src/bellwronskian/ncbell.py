"""Noncommutative complete Bell polynomials.

``B_0 = 1`` and ``B_{m+1} = sum_{j=0}^{m} C(m, j) B_j X_{m+1-j}``, where the
``X_i`` do not commute.  A polynomial is a map from words (tuples of
positive indeterminate indices) to integer coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import groupby
from types import MappingProxyType
from typing import Callable, Mapping, Sequence, TypeVar

import numpy as np

from .errors import (
    DimensionMismatch,
    InsufficientArguments,
    InsufficientJetOrder,
    OrderLimitExceeded,
)
from .jets import MatrixOfJets

MAX_ORDER = 12

Word = tuple[int, ...]
T = TypeVar("T")


@dataclass(frozen=True)
class NCPolynomial:
    terms: Mapping[Word, int]
    order: int

    def __post_init__(self):
        clean = {tuple(w): int(c) for w, c in dict(self.terms).items() if c != 0}
        object.__setattr__(self, "terms", MappingProxyType(clean))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return self.order == other.order and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.order, frozenset(self.terms.items())))

    @property
    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    @property
    def max_index(self) -> int:
        return max((max(w) for w in self.terms if w), default=0)

    def words(self) -> list[Word]:
        """Words in display order (lexicographic on the index tuples)."""
        return sorted(self.terms)

    def __str__(self) -> str:
        return format_polynomial(self)


def binomial_table(mmax: int) -> list[list[int]]:
    """Pascal triangle rows 0..mmax."""
    rows = [[1]]
    for m in range(1, mmax + 1):
        prev = rows[-1]
        rows.append([1] + [prev[j - 1] + prev[j] for j in range(1, m)] + [1])
    return rows


@lru_cache(maxsize=None)
def _bell_table(m: int) -> tuple[NCPolynomial, ...]:
    # memoized triangle B_0..B_m; each row reuses every lower one
    if m == 0:
        return (NCPolynomial({(): 1}, 0),)
    lower = _bell_table(m - 1)
    binom = binomial_table(m - 1)[m - 1]
    acc: dict[Word, int] = {}
    for j in range(m):
        letter = m - j
        for word, c in lower[j].terms.items():
            key = word + (letter,)
            acc[key] = acc.get(key, 0) + binom[j] * c
    return lower + (NCPolynomial(acc, m),)


def bell_expand(m: int, max_order: int = MAX_ORDER) -> NCPolynomial:
    if m < 0:
        raise ValueError("Bell index must be nonnegative")
    if m > max_order:
        raise OrderLimitExceeded(f"B_{m} exceeds the configured maximum order {max_order}")
    return _bell_table(m)[m]


def _evaluate(poly: NCPolynomial, args: Sequence[T], one: T, mul: Callable[[T, T], T]) -> T:
    # shared-prefix products are cached per call; words are evaluated left to right
    prefix: dict[Word, T] = {(): one}
    total = None
    for word in sorted(poly.terms):
        k = len(word)
        while word[:k] not in prefix:
            k -= 1
        val = prefix[word[:k]]
        for i in range(k, len(word)):
            val = mul(val, args[word[i] - 1])
            prefix[word[: i + 1]] = val
        term = val * poly.terms[word]
        total = term if total is None else total + term
    return one * 0 if total is None else total


def bell_eval(poly: NCPolynomial, args: Sequence) -> np.ndarray:
    """Substitute square matrices ``X_i := args[i-1]`` into ``poly``."""
    mats = [np.atleast_2d(np.asarray(a, dtype=float)) for a in args]
    if len(mats) < poly.max_index:
        raise InsufficientArguments(f"{poly.max_index} matrices needed, {len(mats)} given")
    if mats:
        n = mats[0].shape[0]
        if any(a.shape != (n, n) for a in mats):
            raise DimensionMismatch(f"arguments must all be {n}x{n}: {[a.shape for a in mats]}")
    elif poly.max_index == 0:
        n = 1
    return _evaluate(poly, mats, np.eye(n), np.matmul)


def bell_eval_jets(poly: NCPolynomial, X: MatrixOfJets, out_order: int | None = None) -> MatrixOfJets:
    """Evaluate ``B_m(X, X', ..., X^(m-1))`` as a matrix of jets.

    The result has jet order ``out_order`` (default: whatever the jet order of
    ``X`` leaves after taking ``m - 1`` derivatives).
    """
    rows, cols = X.shape
    if rows != cols:
        raise DimensionMismatch(f"Bell evaluation needs a square matrix, got {X.shape}")
    used = max(poly.max_index - 1, 0)
    if out_order is None:
        out_order = X.order - used
    if out_order < 0 or (poly.max_index > 0 and X.order < used + out_order):
        raise InsufficientJetOrder(
            f"B_{poly.order} to output order {out_order} needs jet order "
            f"{used + max(out_order, 0)}, matrix has {X.order}"
        )
    derivs = [X.differentiate(i).truncate(out_order) for i in range(poly.max_index)]
    one = MatrixOfJets.identity(rows, X.t0, out_order)
    return _evaluate(poly, derivs, one, lambda a, b: a @ b)


def commutative_bell(m: int, args: Sequence[float]) -> float:
    """Classical complete Bell polynomial ``Y_m(x_1, ..., x_m)`` by the scalar recursion."""
    if len(args) < m:
        raise InsufficientArguments(f"B_{m} needs {m} arguments, {len(args)} given")
    binom = binomial_table(max(m - 1, 0))
    b = [1.0]
    for k in range(m):
        b.append(sum(binom[k][j] * b[j] * args[k - j] for j in range(k + 1)))
    return b[m]


def _format_word(word: Word) -> str:
    parts = []
    for idx, run in groupby(word):
        r = len(list(run))
        parts.append(f"X{idx}" if r == 1 else f"X{idx}^{r}")
    return " ".join(parts)


def format_polynomial(poly: NCPolynomial, name: str | None = None) -> str:
    """``B_3 = X1^3 + 2 X1 X2 + X2 X1 + X3``."""
    out = []
    for word in poly.words():
        c = poly.terms[word]
        body = _format_word(word)
        if not body:
            mono = str(abs(c))
        elif abs(c) == 1:
            mono = body
        else:
            mono = f"{abs(c)} {body}"
        if not out:
            out.append(mono if c > 0 else f"-{mono}")
        else:
            out.append(("+ " if c > 0 else "- ") + mono)
    rhs = " ".join(out) if out else "0"
    return f"{name or f'B_{poly.order}'} = {rhs}"
