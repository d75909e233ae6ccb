"""Identity checks with residual reports, and the range-equivalence decision.

Every residual is reported twice: absolute, and relative as
``abs / (1 + scale)`` where ``scale`` is the magnitude of the reference side
(the largest entry, for matrix comparisons).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainViolation,
    IllConditionedSample,
    NoUsablePoints,
    ValidationFailure,
    VanishingWronskian,
)
from .exprlang import MatrixFunctionSpec
from .ncbell import bell_eval_jets, bell_expand
from .wronskian import (
    CoefficientVector,
    Frame,
    MultiIndex,
    admissible_indices,
    check_nonvanishing,
    companion_matrix,
    derivative_table,
    generalized_wronskian_jet,
    phi,
    reconstruct_coefficients,
    sample_points,
    standard_index,
    usable_points,
    wronskian,
    wronskian_direct,
    wronskian_via_bell,
    wronskian_via_bell_auto,
)

DEFAULT_TOL = 1e-8
DEFAULT_ABS_FLOOR = 1e-10
MAX_CONDITION = 1e8


@dataclass
class Residual:
    point: float
    label: str
    abs: float
    rel: float


@dataclass
class VerificationReport:
    identity: str
    tolerance: float
    records: list[Residual] = field(default_factory=list)
    skipped: list[tuple[float, str]] = field(default_factory=list)

    def add(self, point: float, label: str, lhs, rhs) -> None:
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        err = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
        scale = float(np.max(np.abs(rhs))) if rhs.size else 0.0
        self.records.append(Residual(float(point), label, err, err / (1.0 + scale)))

    def skip(self, point: float, reason: str) -> None:
        self.skipped.append((float(point), reason))

    @property
    def points(self) -> list[float]:
        return sorted({r.point for r in self.records})

    @property
    def max_residual(self) -> float:
        return max((r.rel for r in self.records), default=float("nan"))

    @property
    def max_abs_residual(self) -> float:
        return max((r.abs for r in self.records), default=float("nan"))

    @property
    def worst(self) -> Residual | None:
        return max(self.records, key=lambda r: r.rel, default=None)

    @property
    def passed(self) -> bool:
        return bool(self.records) and self.max_residual <= self.tolerance

    def to_dict(self) -> dict:
        worst = self.worst
        return {
            "identity": self.identity,
            "verdict": "pass" if self.passed else "fail",
            "tolerance": self.tolerance,
            "max_residual": self.max_residual if self.records else None,
            "max_abs_residual": self.max_abs_residual if self.records else None,
            "worst_point": worst.point if worst else None,
            "worst_label": worst.label if worst else None,
            "points": [r.point for r in self.records],
            "labels": [r.label for r in self.records],
            "abs": [r.abs for r in self.records],
            "rel": [r.rel for r in self.records],
            "skipped": [{"point": p, "reason": why} for p, why in self.skipped],
        }

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        if not self.records:
            return f"{verdict} {self.identity}: no points evaluated ({len(self.skipped)} skipped)"
        w = self.worst
        return (
            f"{verdict} {self.identity}: max rel residual {self.max_residual:.3e} "
            f"(tol {self.tolerance:.1e}) worst at t={w.point:.6g} [{w.label}], "
            f"{len(self.records)} checks, {len(self.skipped)} skipped"
        )


def _points_for(f: Frame, points: Sequence[float] | None) -> list[float]:
    return list(points) if points is not None else sample_points(f.domain)


def verify_lemma0(
    X: MatrixFunctionSpec,
    j_max: int,
    points: Sequence[float],
    tol: float = DEFAULT_TOL,
    jet_order: int | None = None,
) -> VerificationReport:
    """``B_{j+1}(X, ..., X^(j)) = X B_j(X, ..., X^(j-1)) + (B_j(X, ..., X^(j-1)))'`` as jets."""
    order = j_max + 1 if jet_order is None else jet_order
    report = VerificationReport("lemma0", tol)
    for t in points:
        try:
            Xj = X.eval_jets(t, order)
        except DomainViolation as exc:
            report.skip(t, str(exc))
            continue
        for j in range(j_max + 1):
            lhs = bell_eval_jets(bell_expand(j + 1), Xj)
            out = lhs.order
            bj = bell_eval_jets(bell_expand(j), Xj, out_order=out + 1)
            rhs = Xj.truncate(out) @ bj.truncate(out) + bj.differentiate()
            report.add(t, f"j={j}", lhs.data, rhs.data)
    return report


def verify_corollary0(
    f: Frame,
    a: CoefficientVector,
    j_max: int,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """``Y_f^(j) = Y_f B_j(X_a, ..., X_a^(j-1))`` at each point, entrywise."""
    report = VerificationReport("corollary0", tol)
    n = f.n
    for t in _points_for(f, points):
        try:
            table = derivative_table(f, t, n - 1 + j_max)
            X = companion_matrix(a, t, max(j_max - 1, 0))
        except DomainViolation as exc:
            report.skip(t, str(exc))
            continue
        Y = table[n - 1::-1].T
        for j in range(j_max + 1):
            Yj = table[n - 1 + j::-1][:n].T
            B = bell_eval_jets(bell_expand(j), X, out_order=0).value()
            report.add(t, f"j={j}", Y @ B, Yj)
    return report


def verify_theorem1(
    f: Frame,
    a: CoefficientVector | None,
    ks: Sequence[MultiIndex] | None = None,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Generalized Wronskians by direct determinant versus the Bell formula.

    With ``a=None`` the coefficients are first reconstructed from ``f``.
    """
    auto = a is None
    report = VerificationReport("theorem1_auto" if auto else "theorem1", tol)
    if ks is None:
        ks = admissible_indices(f.n, f.n + 3)
    ks = [k if isinstance(k, MultiIndex) else MultiIndex(tuple(k)) for k in ks]
    for t in _points_for(f, points):
        try:
            if auto:
                check_nonvanishing(f, t)
            for k in ks:
                direct = wronskian_direct(f, k, t)
                via = wronskian_via_bell_auto(f, k, t) if auto else wronskian_via_bell(f, a, k, t)
                report.add(t, f"k={k}", via, direct)
        except (DomainViolation, VanishingWronskian) as exc:
            report.skip(t, str(exc))
    return report


def corollary1_rhs(a: CoefficientVector, n: int, d: int, j: int, t: float, w: float) -> float:
    """Closed forms for ``W_f^(n+d, n-1, ..., j+1, j-1, ..., 0)``, ``d`` in 0, 1, 2."""
    if d not in (0, 1, 2):
        raise ValueError("closed forms exist for d = 0, 1, 2 only")
    r = n - j

    def c(i: int, deriv: int = 0) -> float:
        return a.coefficient(i, t, 2).derivative(deriv)

    if d == 0:
        inner = c(r)
    elif d == 1:
        inner = c(1) * c(r) + c(r + 1) + c(r, 1)
    else:
        inner = (
            c(1) ** 2 * c(r)
            + c(1) * c(r + 1)
            + c(2) * c(r)
            + c(r + 2)
            + c(1) * c(r, 1)
            + 2 * c(1, 1) * c(r)
            + 2 * c(r + 1, 1)
            + c(r, 2)
        )
    return (-1) ** (n - j - 1) * w * inner


def corollary1_index(n: int, d: int, j: int) -> MultiIndex:
    return MultiIndex((n + d,) + tuple(r for r in range(n - 1, -1, -1) if r != j))


def verify_corollary1(
    f: Frame,
    a: CoefficientVector,
    d: int,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    report = VerificationReport(f"corollary1_d{d}", tol)
    n = f.n
    for t in _points_for(f, points):
        try:
            w = wronskian(f, t)
            for j in range(n):
                direct = wronskian_direct(f, corollary1_index(n, d, j), t)
                report.add(t, f"j={j}", corollary1_rhs(a, n, d, j, t, w), direct)
        except DomainViolation as exc:
            report.skip(t, str(exc))
    return report


def verify_abel_liouville(
    f: Frame,
    a: CoefficientVector,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    jet_order: int = 1,
) -> VerificationReport:
    """``W_f' = a_1 W_f`` with ``W_f'`` taken by jet differentiation of the determinant."""
    report = VerificationReport("abel_liouville", tol)
    for t in _points_for(f, points):
        try:
            W = generalized_wronskian_jet(f, standard_index(f.n), t, max(jet_order, 1))
            a1 = a.coefficient(1, t, 0).value
        except DomainViolation as exc:
            report.skip(t, str(exc))
            continue
        report.add(t, "W'", a1 * W.value, W.derivative(1))
    return report


def verify_lemma2(
    f: Frame,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
) -> VerificationReport:
    """Each component solves ``y^(n) = sum_j Phi^[j] y^(j)``."""
    report = VerificationReport("lemma2", tol)
    n = f.n
    good, skipped = usable_points(f, _points_for(f, points))
    report.skipped.extend(skipped)
    for t in good:
        coeffs = np.array([phi(f, j, t) for j in range(n)])
        table = derivative_table(f, t, n)
        for i in range(n):
            report.add(t, f"f_{i + 1}", coeffs @ table[:n, i], table[n, i])
    return report


@dataclass
class EquivalenceResult:
    equivalent: bool
    matrix: np.ndarray | None
    max_phi_mismatch: float
    max_residual: float | None
    points: list[float]
    selected_points: list[float] = field(default_factory=list)
    witness: dict | None = None
    skipped: list[tuple[float, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "matrix": None if self.matrix is None else self.matrix.tolist(),
            "max_phi_mismatch": self.max_phi_mismatch,
            "max_residual": self.max_residual,
            "points": self.points,
            "selected_points": self.selected_points,
            "witness": self.witness,
            "skipped": [{"point": p, "reason": why} for p, why in self.skipped],
        }

    def summary(self) -> str:
        if self.equivalent:
            rows = "; ".join(" ".join(f"{x:.10g}" for x in row) for row in self.matrix)
            return (
                f"EQUIVALENT f = A g with A = [{rows}], max Phi mismatch "
                f"{self.max_phi_mismatch:.3e}, max residual {self.max_residual:.3e}"
            )
        w = self.witness or {}
        return (
            f"NOT EQUIVALENT: Phi^[{w.get('j')}] differs at t={w.get('point'):.6g}: "
            f"{w.get('phi_f'):.10g} vs {w.get('phi_g'):.10g}"
        )


def select_points(G: np.ndarray, n: int) -> list[int]:
    """Greedily pick ``n`` columns of ``G`` maximizing the smallest singular value."""
    chosen: list[int] = []
    for _ in range(n):
        best, best_val = None, -1.0
        for c in range(G.shape[1]):
            if c in chosen:
                continue
            s = np.linalg.svd(G[:, chosen + [c]], compute_uv=False)
            if s[-1] > best_val:
                best, best_val = c, s[-1]
        chosen.append(best)
    return chosen


def range_equivalent(
    f: Frame,
    g: Frame,
    points: Sequence[float] | None = None,
    tol: float = DEFAULT_TOL,
    abs_floor: float = DEFAULT_ABS_FLOOR,
) -> EquivalenceResult:
    """Decide whether ``f = A g`` for a constant nonsingular ``A``.

    Stage 1 compares the Phi functions at every usable point.  If they agree,
    stage 2 solves ``f(t_i) = A g(t_i)`` on a well-conditioned subset of the
    points, and stage 3 checks ``Y_f = A Y_g`` at all points.
    """
    n = f.n
    if g.n != n:
        raise DimensionMismatch(f"f has {n} components, g has {g.n}")
    if points is None:
        lo = max(f.domain[0], g.domain[0])
        hi = min(f.domain[1], g.domain[1])
        points = sample_points((lo, hi))
    good_f, skip_f = usable_points(f, points)
    good_g, skip_g = usable_points(g, points)
    good = [t for t in good_f if t in set(good_g)]
    skipped = sorted(set(skip_f) | set(skip_g))
    if not good:
        raise NoUsablePoints("no sample point has nonvanishing Wronskians for both f and g")

    worst = 0.0
    for t in good:
        for j in range(n - 1, -1, -1):
            pf, pg = phi(f, j, t), phi(g, j, t)
            gap = abs(pf - pg)
            worst = max(worst, gap / (1.0 + abs(pg)))
            if gap > max(tol * (1.0 + abs(pg)), abs_floor):
                witness = {"j": j, "point": t, "phi_f": pf, "phi_g": pg}
                return EquivalenceResult(False, None, worst, None, good, [], witness, skipped)

    F = np.column_stack([derivative_table(f, t, 0)[0] for t in good])
    G = np.column_stack([derivative_table(g, t, 0)[0] for t in good])
    if len(good) < n:
        raise IllConditionedSample(f"{len(good)} usable points, {n} needed to determine A")
    sel = select_points(G, n)
    Gs, Fs = G[:, sel], F[:, sel]
    cond = np.linalg.cond(Gs)
    if not cond <= MAX_CONDITION:
        raise IllConditionedSample(f"best {n}-point sample has condition number {cond:.3e}")
    A = np.linalg.solve(Gs.T, Fs.T).T

    detA = np.linalg.det(A)
    if not abs(detA) > 1e-9 * max(1.0, float(np.max(np.abs(A)))) ** n:
        raise ValidationFailure(f"recovered matrix is singular (det = {detA:.3e})")

    rest = [t for i, t in enumerate(good) if i not in sel] or good
    max_res = 0.0
    for t in rest:
        Yf = derivative_table(f, t, n - 1).T
        Yg = derivative_table(g, t, n - 1).T
        res = float(np.max(np.abs(Yf - A @ Yg))) / (1.0 + float(np.max(np.abs(Yf))))
        max_res = max(max_res, res)
    if max_res > tol:
        raise ValidationFailure(
            f"Phi functions agree but Y_f - A Y_g reaches relative residual {max_res:.3e}"
        )
    return EquivalenceResult(True, A, worst, max_res, good, [good[i] for i in sel], None, skipped)


def reconstruction_report(f: Frame, points: Sequence[float] | None = None) -> list[tuple[float, np.ndarray]]:
    """Reconstructed coefficient vectors at every usable point."""
    good, _ = usable_points(f, _points_for(f, points))
    return [(t, reconstruct_coefficients(f, t)) for t in good]

