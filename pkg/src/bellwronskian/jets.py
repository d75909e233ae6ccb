"""Truncated Taylor series ("jets") and matrices of jets.

A jet of order ``p`` at ``t0`` stores the normalized Taylor coefficients
``c[i] = f^(i)(t0) / i!`` for ``i = 0..p``.  All arithmetic is exact up to
the truncation order, so derivatives of analytic closed forms come out to
floating point accuracy instead of finite-difference accuracy.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BasepointMismatch,
    DimensionMismatch,
    DomainViolation,
    InsufficientJetOrder,
    NonSquare,
    OrderMismatch,
    ZeroOrderJet,
)


# Coefficient-array kernels.  They act on the last axis and broadcast over
# the leading ones, so the same code serves scalar jets and matrices of jets.

def _cmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    p = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for s in range(p):
        out[..., s:] += a[..., s:s + 1] * b[..., : p - s]
    return out


def _cdiv(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if np.any(v[..., 0] == 0.0):
        raise DomainViolation("division by a jet with zero constant term")
    p = u.shape[-1]
    y = np.zeros(np.broadcast_shapes(u.shape, v.shape))
    for k in range(p):
        acc = u[..., k].copy()
        for j in range(1, k + 1):
            acc = acc - v[..., j] * y[..., k - j]
        y[..., k] = acc / v[..., 0]
    return y


def _differentiate(c: np.ndarray, times: int = 1) -> np.ndarray:
    p = c.shape[-1] - 1
    if times > p:
        raise ZeroOrderJet(f"cannot take {times} derivative(s) of an order-{p} jet")
    if times == 0:
        return c.copy()
    i = np.arange(p + 1 - times)
    # (i+times)! / i!
    factor = np.array([math.perm(int(k) + times, times) for k in i], dtype=float)
    return c[..., times:] * factor


def _raw_to_taylor(derivs: np.ndarray) -> np.ndarray:
    fact = np.array([math.factorial(i) for i in range(derivs.shape[-1])], dtype=float)
    return derivs / fact


def _taylor_to_raw(c: np.ndarray) -> np.ndarray:
    fact = np.array([math.factorial(i) for i in range(c.shape[-1])], dtype=float)
    return c * fact


class Jet:
    """Truncated Taylor expansion of a scalar function at ``t0``."""

    __slots__ = ("coeffs", "t0")

    def __init__(self, coeffs: Iterable[float], t0: float = 0.0):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("jet coefficients must be a nonempty 1-d sequence")
        c.flags.writeable = False
        self.coeffs = c
        self.t0 = float(t0)

    @classmethod
    def constant(cls, value: float, t0: float = 0.0, order: int = 0) -> Jet:
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c, t0)

    @classmethod
    def variable(cls, t0: float = 0.0, order: int = 1) -> Jet:
        """The identity function ``t`` expanded at ``t0``."""
        c = np.zeros(order + 1)
        c[0] = t0
        if order >= 1:
            c[1] = 1.0
        return cls(c, t0)

    @classmethod
    def from_derivatives(cls, derivs: Sequence[float], t0: float = 0.0) -> Jet:
        return cls(_raw_to_taylor(np.asarray(derivs, dtype=float)), t0)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self, i: int) -> float:
        """``f^(i)(t0)``."""
        if i > self.order:
            raise InsufficientJetOrder(f"derivative {i} requested from an order-{self.order} jet")
        return float(self.coeffs[i] * math.factorial(i))

    def derivatives(self) -> np.ndarray:
        return _taylor_to_raw(self.coeffs)

    def truncate(self, order: int) -> Jet:
        if order > self.order:
            raise InsufficientJetOrder(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1], self.t0)

    def differentiate(self, times: int = 1) -> Jet:
        return Jet(_differentiate(self.coeffs, times), self.t0)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Jet):
            if other.t0 != self.t0:
                raise BasepointMismatch(f"jets at t0={self.t0} and t0={other.t0}")
            if other.order != self.order:
                raise OrderMismatch(f"jets of order {self.order} and {other.order}")
            return other.coeffs
        c = np.zeros_like(self.coeffs)
        c[0] = float(other)
        return c

    def __add__(self, other) -> Jet:
        return Jet(self.coeffs + self._coerce(other), self.t0)

    __radd__ = __add__

    def __sub__(self, other) -> Jet:
        return Jet(self.coeffs - self._coerce(other), self.t0)

    def __rsub__(self, other) -> Jet:
        return Jet(self._coerce(other) - self.coeffs, self.t0)

    def __neg__(self) -> Jet:
        return Jet(-self.coeffs, self.t0)

    def __mul__(self, other) -> Jet:
        if isinstance(other, Jet):
            return Jet(_cmul(self.coeffs, self._coerce(other)), self.t0)
        return Jet(self.coeffs * float(other), self.t0)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Jet:
        if isinstance(other, Jet):
            return Jet(_cdiv(self.coeffs, self._coerce(other)), self.t0)
        if float(other) == 0.0:
            raise DomainViolation("division by zero")
        return Jet(self.coeffs / float(other), self.t0)

    def __rtruediv__(self, other) -> Jet:
        return Jet(_cdiv(self._coerce(other), self.coeffs), self.t0)

    def __pow__(self, exponent: int) -> Jet:
        return jet_pow(self, exponent)

    def allclose(self, other: Jet, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        return (
            self.t0 == other.t0
            and self.order == other.order
            and bool(np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol))
        )

    def __repr__(self) -> str:
        return f"Jet({self.coeffs.tolist()}, t0={self.t0})"


def jet_add(x: Jet, y: Jet | float) -> Jet:
    return x + y


def jet_mul(x: Jet, y: Jet | float) -> Jet:
    return x * y


def jet_scale(x: Jet, s: float) -> Jet:
    return Jet(x.coeffs * float(s), x.t0)


def jet_differentiate(x: Jet) -> Jet:
    if x.order < 1:
        raise ZeroOrderJet("an order-0 jet has no derivative information")
    return x.differentiate()


def jet_exp(u: Jet) -> Jet:
    a = u.coeffs
    y = np.zeros_like(a)
    y[0] = math.exp(a[0])
    for k in range(1, a.size):
        y[k] = sum(j * a[j] * y[k - j] for j in range(1, k + 1)) / k
    return Jet(y, u.t0)


def _sincos(u: Jet) -> tuple[np.ndarray, np.ndarray]:
    a = u.coeffs
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0], c[0] = math.sin(a[0]), math.cos(a[0])
    for k in range(1, a.size):
        s[k] = sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k
    return s, c


def jet_sin(u: Jet) -> Jet:
    return Jet(_sincos(u)[0], u.t0)


def jet_cos(u: Jet) -> Jet:
    return Jet(_sincos(u)[1], u.t0)


def jet_log(u: Jet) -> Jet:
    a = u.coeffs
    if a[0] <= 0.0:
        raise DomainViolation(f"log of nonpositive value {a[0]!r} at t0={u.t0}")
    y = np.zeros_like(a)
    y[0] = math.log(a[0])
    for k in range(1, a.size):
        acc = k * a[k] - sum(j * y[j] * a[k - j] for j in range(1, k))
        y[k] = acc / (k * a[0])
    return Jet(y, u.t0)


def jet_pow(u: Jet, r: float) -> Jet:
    """``u**r``.  Integer ``r`` works for any base value; other ``r`` need a positive base."""
    if float(r).is_integer():
        r = int(r)
        if r < 0:
            return 1.0 / jet_pow(u, -r)
        result = Jet.constant(1.0, u.t0, u.order)
        base = u
        while r:
            if r & 1:
                result = result * base
            r >>= 1
            if r:
                base = base * base
        return result
    a = u.coeffs
    if a[0] <= 0.0:
        raise DomainViolation(f"non-integer power of nonpositive value {a[0]!r}")
    y = np.zeros_like(a)
    y[0] = a[0] ** r
    for k in range(1, a.size):
        acc = sum((r * j - (k - j)) * a[j] * y[k - j] for j in range(1, k + 1))
        y[k] = acc / (k * a[0])
    return Jet(y, u.t0)


_ELEMENTARY = {"exp": jet_exp, "sin": jet_sin, "cos": jet_cos, "log": jet_log}


def jet_elementary(kind: str, inner: Jet, exponent: float | None = None) -> Jet:
    if kind == "pow":
        if exponent is None:
            raise ValueError("pow needs an exponent")
        return jet_pow(inner, exponent)
    try:
        return _ELEMENTARY[kind](inner)
    except KeyError:
        raise ValueError(f"unknown elementary function {kind!r}") from None


class MatrixOfJets:
    """Rectangular array of jets sharing basepoint and order.

    Stored as one float array of shape ``(rows, cols, order + 1)``.
    """

    __slots__ = ("data", "t0")

    def __init__(self, data: np.ndarray, t0: float = 0.0):
        d = np.array(data, dtype=float)
        if d.ndim != 3 or d.shape[0] < 1 or d.shape[1] < 1 or d.shape[2] < 1:
            raise ValueError("matrix of jets needs shape (rows, cols, order+1)")
        d.flags.writeable = False
        self.data = d
        self.t0 = float(t0)

    @classmethod
    def from_jets(cls, rows: Sequence[Sequence[Jet]]) -> MatrixOfJets:
        flat = [j for row in rows for j in row]
        t0s = {j.t0 for j in flat}
        orders = {j.order for j in flat}
        if len(t0s) != 1:
            raise BasepointMismatch(f"entries at several basepoints {sorted(t0s)}")
        if len(orders) != 1:
            raise OrderMismatch(f"entries of several orders {sorted(orders)}")
        data = np.array([[j.coeffs for j in row] for row in rows])
        return cls(data, t0s.pop())

    @classmethod
    def constant(cls, values, t0: float = 0.0, order: int = 0) -> MatrixOfJets:
        v = np.atleast_2d(np.asarray(values, dtype=float))
        data = np.zeros(v.shape + (order + 1,))
        data[..., 0] = v
        return cls(data, t0)

    @classmethod
    def identity(cls, n: int, t0: float = 0.0, order: int = 0) -> MatrixOfJets:
        return cls.constant(np.eye(n), t0, order)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def order(self) -> int:
        return self.data.shape[2] - 1

    def value(self) -> np.ndarray:
        """Matrix of constant terms, i.e. M(t0)."""
        return self.data[..., 0].copy()

    def derivative_value(self, i: int) -> np.ndarray:
        """M^(i)(t0) as a plain float matrix."""
        if i > self.order:
            raise InsufficientJetOrder(f"derivative {i} requested from order {self.order}")
        return self.data[..., i] * math.factorial(i)

    def entry(self, i: int, j: int) -> Jet:
        return Jet(self.data[i, j], self.t0)

    def truncate(self, order: int) -> MatrixOfJets:
        if order > self.order:
            raise InsufficientJetOrder(f"cannot raise matrix jet order {self.order} to {order}")
        return MatrixOfJets(self.data[..., : order + 1], self.t0)

    def differentiate(self, times: int = 1) -> MatrixOfJets:
        return MatrixOfJets(_differentiate(self.data, times), self.t0)

    def _check(self, other: MatrixOfJets) -> None:
        if other.t0 != self.t0:
            raise BasepointMismatch(f"matrices at t0={self.t0} and t0={other.t0}")
        if other.order != self.order:
            raise OrderMismatch(f"matrices of jet order {self.order} and {other.order}")

    def __add__(self, other: MatrixOfJets) -> MatrixOfJets:
        self._check(other)
        return MatrixOfJets(self.data + other.data, self.t0)

    def __sub__(self, other: MatrixOfJets) -> MatrixOfJets:
        self._check(other)
        return MatrixOfJets(self.data - other.data, self.t0)

    def __neg__(self) -> MatrixOfJets:
        return MatrixOfJets(-self.data, self.t0)

    def __mul__(self, s: float) -> MatrixOfJets:
        return MatrixOfJets(self.data * float(s), self.t0)

    __rmul__ = __mul__

    def __matmul__(self, other: MatrixOfJets) -> MatrixOfJets:
        self._check(other)
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        p = self.order + 1
        out = np.zeros((self.shape[0], other.shape[1], p))
        for s in range(p):
            out[..., s:] += np.einsum("ik,kjq->ijq", self.data[..., s], other.data[..., : p - s])
        return MatrixOfJets(out, self.t0)

    def allclose(self, other: MatrixOfJets, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        return (
            self.t0 == other.t0
            and self.data.shape == other.data.shape
            and bool(np.allclose(self.data, other.data, rtol=rtol, atol=atol))
        )

    def __repr__(self) -> str:
        return f"MatrixOfJets(shape={self.shape}, order={self.order}, t0={self.t0})"


def matrix_jet_derivative(m: MatrixOfJets) -> MatrixOfJets:
    if m.order < 1:
        raise ZeroOrderJet("an order-0 matrix of jets has no derivative information")
    return m.differentiate()


def _det_cofactor(d: np.ndarray) -> np.ndarray:
    n = d.shape[0]
    if n == 1:
        return d[0, 0].copy()
    if n == 2:
        return _cmul(d[0, 0], d[1, 1]) - _cmul(d[0, 1], d[1, 0])
    total = np.zeros(d.shape[2])
    rest = d[1:]
    for j in range(n):
        minor = np.delete(rest, j, axis=1)
        term = _cmul(d[0, j], _det_cofactor(minor))
        total = total + term if j % 2 == 0 else total - term
    return total


def _det_bareiss(d: np.ndarray) -> np.ndarray:
    m = d.copy()
    n = m.shape[0]
    sign = 1.0
    prev = np.zeros(m.shape[2])
    prev[0] = 1.0
    for k in range(n - 1):
        piv = k + int(np.argmax(np.abs(m[k:, k, 0])))
        if m[piv, k, 0] == 0.0:
            if not np.any(m[k:, k]):
                return np.zeros(m.shape[2])
            raise DomainViolation("elimination pivot has zero constant term")
        if piv != k:
            m[[k, piv]] = m[[piv, k]]
            sign = -sign
        num = _cmul(m[k + 1:, k + 1:], m[k, k]) - _cmul(m[k + 1:, k:k + 1], m[k:k + 1, k + 1:])
        m[k + 1:, k + 1:] = _cdiv(num, prev)
        prev = m[k, k].copy()
    return sign * m[n - 1, n - 1]


def det_jets(m: MatrixOfJets) -> Jet:
    """Determinant in the jet ring.

    Cofactor expansion up to 4x4, fraction-free elimination above that.
    """
    rows, cols = m.shape
    if rows != cols:
        raise NonSquare(f"determinant of a {rows}x{cols} matrix")
    if rows <= 4:
        return Jet(_det_cofactor(m.data), m.t0)
    return Jet(_det_bareiss(m.data), m.t0)
