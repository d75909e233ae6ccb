"""Closed-form fundamental systems with known coefficients, shared by tests and scripts."""
from __future__ import annotations

from dataclasses import dataclass

from .exprlang import INF
from .wronskian import CoefficientVector, Frame


@dataclass(frozen=True)
class Fixture:
    name: str
    frame: Frame
    coefficients: CoefficientVector


def _fixture(name, sources, coeffs, domain) -> Fixture:
    return Fixture(name, Frame.of(*sources, domain=domain), CoefficientVector.of(*coeffs, domain=domain))


# y'' = 3y' - 2y
EXP12 = _fixture("exp12", ("exp(t)", "exp(2*t)"), ("3", "-2"), (-1.0, 1.0))
# y''' = y'
SHIFT3 = _fixture("shift3", ("1", "exp(t)", "exp(-t)"), ("0", "1", "0"), (-1.0, 1.0))
# y'' = (2/t) y' - (2/t^2) y on (0, inf)
EULER2 = _fixture("euler2", ("t", "t^2"), ("2/t", "-2/t^2"), (0.0, INF))
# (r^2 - 1)(r^2 - 4) = r^4 - 5 r^2 + 4
QUARTIC4 = _fixture(
    "quartic4", ("exp(t)", "exp(-t)", "exp(2*t)", "exp(-2*t)"), ("0", "5", "0", "-4"), (-1.0, 1.0)
)

FIXTURES = (EXP12, SHIFT3, EULER2, QUARTIC4)

# frames without a hand-supplied equation, for the reconstruction checks
SIN_TEXP = Frame.of("sin(t)", "t*exp(t)", domain=(0.0, 3.0))
POLY_EXP = Frame.of("1", "t", "t^2", "exp(t)", domain=(-1.0, 1.0))
