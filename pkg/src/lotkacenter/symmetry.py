"""Time-reversal structure behind the two reversible center families.

A field F is reversible under the swap R(x, y) = (y, x) when
F(R(p)) = -R(F(p)); orbits are then mirror images of their own time
reversals and an elliptic equilibrium on the symmetry axis is a center.
One family has this property in the original variables.  The other
acquires it after the change u = x**K, v = 1/y together with an orbital
rescaling, which is what ``r2_transform`` encodes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CaseMismatch, DegenerateK, DomainError
from .model import CanonicalParams, Point, vector_field

__all__ = [
    "TransformedField",
    "r1_residual",
    "r2_residual",
    "r2_transform",
    "reflection",
    "transformed_field_value",
]

_TOL = 1e-9


def reflection(pt: Point | tuple[float, float]) -> tuple[float, float]:
    x, y = (pt.x, pt.y) if isinstance(pt, Point) else pt
    return y, x


def _close(u: float, v: float) -> bool:
    return abs(u - v) <= _TOL * (1.0 + abs(u) + abs(v))


def _residual_at(
    f1: float, f2: float, g1: float, g2: float, scale: float
) -> float:
    """Scaled sup-norm of F(R p) + R(F p) given F(R p) = (f1, f2) and
    F(p) = (g1, g2)."""
    return max(abs(f1 + g2), abs(f2 + g1)) / scale


def r1_residual(
    c: CanonicalParams, pts: list[Point] | list[tuple[float, float]]
) -> float:
    """Largest scaled reversibility defect of the canonical field itself."""
    worst = 0.0
    for pt in pts:
        x, y = (pt.x, pt.y) if isinstance(pt, Point) else pt
        g1, g2 = vector_field(c, (x, y))
        f1, f2 = vector_field(c, (y, x))
        scale = max(1.0, abs(g1), abs(g2))
        worst = max(worst, _residual_at(f1, f2, g1, g2, scale))
    return worst


@dataclass(frozen=True)
class TransformedField:
    """Exponent data of the rescaled field in u = x**K, v = 1/y.

    du/dtau = u**e_u1 - u**e_u2 * v**b1
    dv/dtau = -v**e_v1 + u**b1 * v**e_v2

    with e_u1 = 1 - 1/K + b3, e_u2 = 1 - 1/K, e_v1 = 2 + b1 and
    e_v2 = 2 + b1 - b3.  The identity 1 - 1/K = 2 + b1 - b3 pins the
    time-scale ratio and makes the field reversible under (u, v) swap.
    """

    e_u1: float
    e_u2: float
    e_v1: float
    e_v2: float
    b1: float
    source: CanonicalParams

    def __post_init__(self) -> None:
        gap = abs(self.e_u2 - self.e_v2)
        if gap > 1e-12 * (1.0 + abs(self.e_u2) + abs(self.e_v2)):
            raise DegenerateK(
                f"exponent identity 1 - 1/K = 2 + b1 - b3 violated by {gap}"
            )


def r2_transform(c: CanonicalParams) -> TransformedField:
    """Build the reversible form for the second reversible family.

    Requires a1 = K*b3, a3 = K*b1 and K = 1/(b3 - b1 - 1) within
    tolerance; raises CaseMismatch otherwise and DegenerateK when the
    defining denominator b3 - b1 - 1 is not positive.
    """
    denom = c.b3 - c.b1 - 1.0
    if denom <= _TOL:
        raise DegenerateK(
            f"b3 - b1 - 1 = {denom} must be positive for the transform"
        )
    if not (
        _close(c.a1, c.K * c.b3)
        and _close(c.a3, c.K * c.b1)
        and _close(c.K, 1.0 / denom)
    ):
        raise CaseMismatch(f"{c} does not satisfy the second reversible family")
    return TransformedField(
        e_u1=1.0 - 1.0 / c.K + c.b3,
        e_u2=1.0 - 1.0 / c.K,
        e_v1=2.0 + c.b1,
        e_v2=2.0 + c.b1 - c.b3,
        b1=c.b1,
        source=c,
    )


def transformed_field_value(
    tfield: TransformedField, pt: Point | tuple[float, float]
) -> tuple[float, float]:
    u, v = (pt.x, pt.y) if isinstance(pt, Point) else pt
    if not (u > 0.0 and v > 0.0):
        raise DomainError(f"point ({u}, {v}) is not strictly positive")
    du = u**tfield.e_u1 - u**tfield.e_u2 * v**tfield.b1
    dv = -(v**tfield.e_v1) + u**tfield.b1 * v**tfield.e_v2
    return du, dv


def r2_residual(
    c: CanonicalParams, pts: list[Point] | list[tuple[float, float]]
) -> float:
    """Largest scaled reversibility defect of the transformed field."""
    tfield = r2_transform(c)
    worst = 0.0
    for pt in pts:
        u, v = (pt.x, pt.y) if isinstance(pt, Point) else pt
        g1, g2 = transformed_field_value(tfield, (u, v))
        f1, f2 = transformed_field_value(tfield, (v, u))
        scale = max(1.0, abs(g1), abs(g2))
        worst = max(worst, _residual_at(f1, f2, g1, g2, scale))
    return worst
