"""Frames, companion matrices, generalized Wronskians and ODE reconstruction.

Conventions
-----------
``f = (f_1, ..., f_n)`` is a column vector of functions.  The frame
``Y_f = (f^(n-1) | ... | f' | f)`` has row ``i`` holding component ``f_i``.
The companion matrix ``X_a = (a | e_1 | ... | e_{n-1})`` has the coefficient
vector of ``y^(n) = a_1 y^(n-1) + ... + a_n y`` in its first column, so that
``Y_f' = Y_f X_a`` whenever the components of ``f`` solve that equation.

Basis vectors and coefficients are 1-based, as in ``e_1..e_n`` and
``a_1..a_n``; :func:`basis_index` is the single place where a 1-based
index turns into an array offset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    NoUsablePoints,
    SmoothnessBudgetExceeded,
    VanishingWronskian,
)
from .exprlang import INF, FunctionSpec, VectorFunctionSpec, eval_jet
from .jets import Jet, MatrixOfJets, det_jets
from .ncbell import MAX_ORDER, bell_eval_jets, bell_expand

DEGENERACY_RTOL = 1e-9


def basis_index(i: int, n: int) -> int:
    """Array offset of the 1-based basis vector ``e_i`` in dimension ``n``."""
    if not 1 <= i <= n:
        raise IndexError(f"e_{i} does not exist in dimension {n}")
    return i - 1


@dataclass(frozen=True)
class MultiIndex:
    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if not self.k or any(x < 0 for x in self.k):
            raise ValueError(f"multi-index entries must be nonnegative: {self.k}")

    @property
    def n(self) -> int:
        return len(self.k)

    @property
    def ell(self) -> tuple[int, ...]:
        """``(k_i - n + 1)^+`` for each entry."""
        n = self.n
        return tuple(max(x - n + 1, 0) for x in self.k)

    def __iter__(self) -> Iterator[int]:
        return iter(self.k)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.k)) + ")"


def _as_multi_index(k) -> MultiIndex:
    return k if isinstance(k, MultiIndex) else MultiIndex(tuple(k))


def standard_index(n: int) -> MultiIndex:
    """``(n-1, n-2, ..., 0)``, the index of the ordinary Wronskian."""
    return MultiIndex(tuple(range(n - 1, -1, -1)))


def phi_index(n: int, j: int) -> MultiIndex:
    """``(n, n-1, ..., j+1, j-1, ..., 0)``."""
    if not 0 <= j < n:
        raise ValueError(f"j must lie in 0..{n - 1}, got {j}")
    return MultiIndex(tuple(r for r in range(n, -1, -1) if r != j))


@dataclass(frozen=True)
class Frame:
    spec: VectorFunctionSpec

    @classmethod
    def of(cls, *sources: str, domain=(-INF, INF)) -> Frame:
        return cls(VectorFunctionSpec.of(sources, domain))

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def domain(self) -> tuple[float, float]:
        return self.spec.domain

    def transformed(self, A) -> Frame:
        """The frame of ``A f`` for a constant matrix ``A``."""
        A = np.asarray(A, dtype=float)
        if A.shape != (self.n, self.n):
            raise DimensionMismatch(f"matrix {A.shape} does not act on dimension {self.n}")
        src = self.spec.sources()
        rows = []
        for i in range(self.n):
            terms = [f"{float(A[i, j])!r}*({src[j]})" for j in range(self.n) if A[i, j] != 0.0]
            rows.append(" + ".join(terms) if terms else "0")
        return Frame(VectorFunctionSpec.of(rows, self.domain))

    def __str__(self) -> str:
        return "(" + ", ".join(self.spec.sources()) + ")"


@dataclass(frozen=True)
class CoefficientVector:
    """``(a_1, ..., a_n)``; ``smoothness`` caps the usable derivative count (None = analytic)."""

    spec: VectorFunctionSpec
    smoothness: int | None = None

    @classmethod
    def of(cls, *sources: str, domain=(-INF, INF), smoothness: int | None = None) -> CoefficientVector:
        return cls(VectorFunctionSpec.of(sources, domain), smoothness)

    @property
    def n(self) -> int:
        return self.spec.n

    def coefficient(self, i: int, t0: float, order: int) -> Jet:
        """``a_i`` as a jet, with ``a_i = 0`` for ``i > n``."""
        if i > self.n:
            return Jet.constant(0.0, t0, order)
        return eval_jet(self.spec.components[basis_index(i, self.n)], t0, order)


@lru_cache(maxsize=4096)
def _derivative_table(spec: FunctionSpec, t0: float, order: int) -> np.ndarray:
    table = eval_jet(spec, t0, order).derivatives()
    table.flags.writeable = False
    return table


def derivative_table(f: Frame, t0: float, order: int) -> np.ndarray:
    """Array ``D`` of shape ``(order+1, n)`` with ``D[r, i] = f_i^(r)(t0)``."""
    return np.stack([_derivative_table(c, float(t0), order) for c in f.spec.components], axis=1)


def frame_matrix(f: Frame, t0: float, order: int) -> MatrixOfJets:
    """``Y_f`` as a matrix of jets of the given order."""
    n = f.n
    jets = f.spec.eval_jets(t0, order + n - 1)
    rows = [[fi.differentiate(n - 1 - c).truncate(order) for c in range(n)] for fi in jets]
    return MatrixOfJets.from_jets(rows)


def companion_from_jets(a: Sequence[Jet]) -> MatrixOfJets:
    n = len(a)
    t0, order = a[0].t0, a[0].order
    data = np.zeros((n, n, order + 1))
    for i, ai in enumerate(a):
        data[i, 0] = ai.coeffs
    for j in range(1, n):
        data[basis_index(j, n), j, 0] = 1.0
    return MatrixOfJets(data, t0)


def companion_matrix(a: CoefficientVector, t0: float, order: int) -> MatrixOfJets:
    """``X_a = (a | e_1 | ... | e_{n-1})`` as a matrix of jets."""
    return companion_from_jets([a.coefficient(i, t0, order) for i in range(1, a.n + 1)])


def generalized_wronskian_matrix(f: Frame, k, t0: float) -> np.ndarray:
    k = _as_multi_index(k)
    if k.n != f.n:
        raise DimensionMismatch(f"multi-index of length {k.n} for a frame of dimension {f.n}")
    table = derivative_table(f, t0, max(k))
    return table[list(k.k), :].T


def wronskian_direct(f: Frame, k, t0: float) -> float:
    """``det(f^(k_1) | ... | f^(k_n))`` at ``t0``."""
    return float(np.linalg.det(generalized_wronskian_matrix(f, k, t0)))


def wronskian(f: Frame, t0: float) -> float:
    return wronskian_direct(f, standard_index(f.n), t0)


def generalized_wronskian_jet(f: Frame, k, t0: float, order: int) -> Jet:
    """``W_f^k`` as a jet, for derivatives of the Wronskian itself."""
    k = _as_multi_index(k)
    if k.n != f.n:
        raise DimensionMismatch(f"multi-index of length {k.n} for a frame of dimension {f.n}")
    jets = f.spec.eval_jets(t0, max(k) + order)
    rows = [[fi.differentiate(kc).truncate(order) for kc in k] for fi in jets]
    return det_jets(MatrixOfJets.from_jets(rows))


def wronskian_threshold(f: Frame, t0: float) -> float:
    """Smallest ``|W_f(t0)|`` still treated as nonvanishing."""
    Y = derivative_table(f, t0, f.n - 1)
    return DEGENERACY_RTOL * (1.0 + float(np.max(np.linalg.norm(Y, axis=1))))


def check_nonvanishing(f: Frame, t0: float) -> float:
    """Return ``W_f(t0)`` or raise :class:`VanishingWronskian`."""
    w = wronskian(f, t0)
    thr = wronskian_threshold(f, t0)
    if not abs(w) > thr:
        raise VanishingWronskian(f"|W_f({t0!r})| = {abs(w):.3e} is below {thr:.3e}")
    return w


def _bell_budget(ell_max: int, a: CoefficientVector | None) -> None:
    if ell_max > MAX_ORDER:
        raise SmoothnessBudgetExceeded(f"B_{ell_max} exceeds the Bell order cap {MAX_ORDER}")
    if a is not None and a.smoothness is not None and ell_max > a.smoothness:
        raise SmoothnessBudgetExceeded(
            f"index needs B_{ell_max}, but a is only {a.smoothness - 1} times differentiable"
        )


def bell_matrices(X: MatrixOfJets, ell_max: int) -> list[np.ndarray]:
    """``B_l(X, ..., X^(l-1))(t0)`` for ``l = 0..ell_max`` as float matrices."""
    return [bell_eval_jets(bell_expand(l), X, out_order=0).value() for l in range(ell_max + 1)]


@lru_cache(maxsize=4096)
def _bell_matrices_for(a: CoefficientVector, t0: float, ell_max: int) -> tuple[np.ndarray, ...]:
    X = companion_matrix(a, t0, max(ell_max - 1, 0))
    return tuple(bell_matrices(X, ell_max))


def _bell_determinant(k: MultiIndex, bells: Sequence[np.ndarray]) -> float:
    n = k.n
    cols = [bells[l][:, basis_index(n + l - kc, n)] for kc, l in zip(k.k, k.ell)]
    return float(np.linalg.det(np.column_stack(cols)))


def wronskian_via_bell(f: Frame, a: CoefficientVector, k, t0: float) -> float:
    """``W_f^k`` from ``W_f`` and Bell polynomials in the companion matrix ``X_a``.

    Valid when the components of ``f`` solve the equation with coefficients
    ``a``; that is the caller's responsibility.
    """
    k = _as_multi_index(k)
    if k.n != f.n or a.n != f.n:
        raise DimensionMismatch(f"dimensions f={f.n}, a={a.n}, k={k.n} differ")
    ell_max = max(k.ell)
    _bell_budget(ell_max, a)
    bells = _bell_matrices_for(a, float(t0), ell_max)
    return wronskian(f, t0) * _bell_determinant(k, bells)


def phi(f: Frame, j: int, t0: float) -> float:
    """``(-1)^(n-j-1) W_f^(n,...,j+1,j-1,...,0) / W_f`` at ``t0``."""
    n = f.n
    w = check_nonvanishing(f, t0)
    return (-1) ** (n - j - 1) * wronskian_direct(f, phi_index(n, j), t0) / w


def phi_jet(f: Frame, j: int, t0: float, order: int) -> Jet:
    n = f.n
    check_nonvanishing(f, t0)
    num = generalized_wronskian_jet(f, phi_index(n, j), t0, order)
    den = generalized_wronskian_jet(f, standard_index(n), t0, order)
    return (-1) ** (n - j - 1) * (num / den)


def reconstruct_coefficients(f: Frame, t0: float) -> np.ndarray:
    """``(a_1, ..., a_n)(t0)`` with ``a_j = Phi^[n-j]``: the monic equation solved by ``f``."""
    n = f.n
    return np.array([phi(f, n - j, t0) for j in range(1, n + 1)])


def reconstruct_coefficient_jets(f: Frame, t0: float, order: int) -> list[Jet]:
    n = f.n
    return [phi_jet(f, n - j, t0, order) for j in range(1, n + 1)]


@lru_cache(maxsize=1024)
def _auto_bell_matrices(f: Frame, t0: float, ell_max: int) -> tuple[np.ndarray, ...]:
    X = companion_from_jets(reconstruct_coefficient_jets(f, t0, max(ell_max - 1, 0)))
    return tuple(bell_matrices(X, ell_max))


def wronskian_via_bell_auto(f: Frame, k, t0: float) -> float:
    """As :func:`wronskian_via_bell`, with ``a`` reconstructed from ``f`` itself."""
    k = _as_multi_index(k)
    if k.n != f.n:
        raise DimensionMismatch(f"multi-index of length {k.n} for a frame of dimension {f.n}")
    ell_max = max(k.ell)
    _bell_budget(ell_max, None)
    return wronskian(f, t0) * _bell_determinant(k, _auto_bell_matrices(f, float(t0), ell_max))


def admissible_indices(n: int, k_max: int, distinct: bool = True) -> list[MultiIndex]:
    """All ``k`` in ``{0..k_max}^n``, optionally only those with distinct entries."""
    pool = range(k_max + 1)
    it = permutations(pool, n) if distinct else product(pool, repeat=n)
    return [MultiIndex(k) for k in it]


def finite_window(domain: tuple[float, float]) -> tuple[float, float]:
    """Replace infinite ends of a domain by a unit-scale window."""
    lo, hi = domain
    if math.isinf(lo) and math.isinf(hi):
        return -1.0, 1.0
    if math.isinf(lo):
        return hi - 2.0, hi
    if math.isinf(hi):
        return lo, lo + 2.0
    return lo, hi


def sample_points(domain: tuple[float, float], count: int = 11, shrink: float = 0.05) -> list[float]:
    """Uniform grid over the domain window, pulled in by ``shrink`` of its width at each end."""
    lo, hi = finite_window(domain)
    pad = shrink * (hi - lo)
    if count == 1:
        return [0.5 * (lo + hi)]
    return [float(x) for x in np.linspace(lo + pad, hi - pad, count)]


def usable_points(f: Frame, points: Sequence[float]) -> tuple[list[float], list[tuple[float, str]]]:
    """Split points into those with a nonvanishing Wronskian and the rest, with reasons."""
    good, skipped = [], []
    for t in points:
        try:
            check_nonvanishing(f, t)
        except (VanishingWronskian, DomainViolation) as exc:
            skipped.append((float(t), str(exc)))
        else:
            good.append(float(t))
    return good, skipped


def require_usable(f: Frame, points: Sequence[float]) -> tuple[list[float], list[tuple[float, str]]]:
    good, skipped = usable_points(f, points)
    if not good:
        raise NoUsablePoints(f"W_f vanishes (or is undefined) at every sample point of {f}")
    return good, skipped
