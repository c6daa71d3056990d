"""Parameter forms and basic local data for planar power-law kinetics.

The canonical system studied throughout the package is

    dx/dt = x**a1 * y**b1 - 1
    dy/dt = K * (1 - x**a3 * y**b3)

on the open positive quadrant, with K > 0 and equilibrium (1, 1).
Powers of positive reals are principal-branch throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, NonIsolatedEquilibrium, NoPositiveEquilibrium

__all__ = [
    "CanonicalParams",
    "EigenvalueKind",
    "JacobianSummary",
    "OffsetParams",
    "Point",
    "RawLotkaParams",
    "canonicalize",
    "from_offset_form",
    "from_record",
    "jacobian",
    "to_offset_form",
    "to_record",
    "trace_tolerance",
    "vector_field",
]


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Point:
    """A point in the open positive quadrant."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (self.x > 0.0 and self.y > 0.0):
            raise DomainError(f"point ({self.x}, {self.y}) is not strictly positive")
        _require_finite("x", self.x)
        _require_finite("y", self.y)


@dataclass(frozen=True)
class RawLotkaParams:
    """Rate constants and exponents of the four-term kinetic form.

    dx/dt = k1 x**alpha1 y**beta1 - k2 x**alpha2 y**beta2
    dy/dt = k3 x**alpha2 y**beta2 - k4 x**alpha3 y**beta3
    """

    k1: float
    k2: float
    k3: float
    k4: float
    alpha1: float
    beta1: float
    alpha2: float
    beta2: float
    alpha3: float
    beta3: float

    def __post_init__(self) -> None:
        for name in ("k1", "k2", "k3", "k4"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value <= 0.0:
                raise ValueError(f"rate {name} must be positive, got {value}")
        for name in ("alpha1", "beta1", "alpha2", "beta2", "alpha3", "beta3"):
            _require_finite(name, getattr(self, name))

    def exponent_differences(self) -> tuple[float, float, float, float]:
        """(a1, b1, a3, b3) of the orbitally equivalent reduced form."""
        return (
            self.alpha1 - self.alpha2,
            self.beta1 - self.beta2,
            self.alpha3 - self.alpha2,
            self.beta3 - self.beta2,
        )


@dataclass(frozen=True)
class CanonicalParams:
    """Exponents and time-scale ratio of the canonical system."""

    a1: float
    b1: float
    a3: float
    b3: float
    K: float

    def __post_init__(self) -> None:
        for name in ("a1", "b1", "a3", "b3", "K"):
            _require_finite(name, getattr(self, name))
        if self.K <= 0.0:
            raise ValueError(f"K must be positive, got {self.K}")


@dataclass(frozen=True)
class OffsetParams:
    """Equivalent parameter labels used by an older normal form:
    p_hat = a1 - a3, q_hat = b3 - b1, p = -a3, q = -b1, C = K."""

    p_hat: float
    q_hat: float
    p: float
    q: float
    C: float


class EigenvalueKind(Enum):
    PURELY_IMAGINARY = "PurelyImaginary"
    REAL_DISTINCT = "RealDistinct"
    REAL_REPEATED = "RealRepeated"
    COMPLEX_WITH_REAL_PART = "ComplexWithRealPart"
    ZERO_EIGENVALUE = "ZeroEigenvalue"


@dataclass(frozen=True)
class JacobianSummary:
    """Linearization data at the equilibrium (1, 1)."""

    trace: float
    determinant: float
    omega: float
    eigenvalue_kind: EigenvalueKind


def trace_tolerance(c: CanonicalParams) -> float:
    """Scale-aware threshold below which the trace counts as zero."""
    return 1e-12 * (1.0 + abs(c.a1) + c.K * abs(c.b3))


def _det_tolerance(c: CanonicalParams) -> float:
    return 1e-12 * max(1.0, abs(c.a1 * c.K * c.b3) + abs(c.b1 * c.K * c.a3))


def vector_field(c: CanonicalParams, pt: Point | tuple[float, float]) -> tuple[float, float]:
    """Evaluate the canonical field at a strictly positive point."""
    x, y = (pt.x, pt.y) if isinstance(pt, Point) else pt
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"point ({x}, {y}) is not strictly positive")
    fx = x**c.a1 * y**c.b1 - 1.0
    fy = c.K * (1.0 - x**c.a3 * y**c.b3)
    return fx, fy


def jacobian(c: CanonicalParams) -> JacobianSummary:
    """Linearization summary at (1, 1).

    The Jacobian there is [[a1, b1], [-K*a3, -K*b3]], so
    trace = a1 - K*b3 and det = K*(a3*b1 - a1*b3).
    """
    tr = c.a1 - c.K * c.b3
    det = c.K * (c.a3 * c.b1 - c.a1 * c.b3)
    omega = math.sqrt(det) if det > 0.0 else 0.0

    if abs(det) <= _det_tolerance(c):
        kind = EigenvalueKind.ZERO_EIGENVALUE
    else:
        disc = tr * tr - 4.0 * det
        disc_tol = 1e-12 * max(1.0, tr * tr + 4.0 * abs(det))
        if abs(tr) <= trace_tolerance(c):
            kind = (
                EigenvalueKind.PURELY_IMAGINARY
                if det > 0.0
                else EigenvalueKind.REAL_DISTINCT
            )
        elif abs(disc) <= disc_tol:
            kind = EigenvalueKind.REAL_REPEATED
        elif disc > 0.0:
            kind = EigenvalueKind.REAL_DISTINCT
        else:
            kind = EigenvalueKind.COMPLEX_WITH_REAL_PART
    return JacobianSummary(trace=tr, determinant=det, omega=omega, eigenvalue_kind=kind)


def canonicalize(raw: RawLotkaParams) -> tuple[CanonicalParams, Point]:
    """Reduce raw kinetics to the canonical form.

    The positive equilibrium solves two equations that are linear in
    (ln x, ln y):

        a1*ln x + b1*ln y = ln(k2/k1)
        a3*ln x + b3*ln y = ln(k3/k4)

    Scaling coordinates by the equilibrium and time by k2/x* yields the
    canonical system with the same exponents and K = (k3/k2)*(x*/y*).

    Raises NoPositiveEquilibrium when the log-linear system is singular
    and inconsistent, NonIsolatedEquilibrium when singular but consistent.
    """
    a1, b1, a3, b3 = raw.exponent_differences()
    r1 = math.log(raw.k2 / raw.k1)
    r2 = math.log(raw.k3 / raw.k4)
    det = a1 * b3 - b1 * a3
    scale = max(1.0, abs(a1 * b3) + abs(b1 * a3))
    if abs(det) <= 1e-12 * scale:
        mat = np.array([[a1, b1], [a3, b3]])
        rhs = np.array([r1, r2])
        sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        if np.linalg.norm(mat @ sol - rhs) <= 1e-9 * (1.0 + np.linalg.norm(rhs)):
            raise NonIsolatedEquilibrium(
                "balance equations are degenerate but consistent; "
                "equilibria form a continuum"
            )
        raise NoPositiveEquilibrium("balance equations have no positive solution")
    lx = (r1 * b3 - b1 * r2) / det
    ly = (a1 * r2 - r1 * a3) / det
    # iterative refinement; one pass brings the balance residual to eps-level
    for _ in range(2):
        d1 = r1 - (a1 * lx + b1 * ly)
        d2 = r2 - (a3 * lx + b3 * ly)
        lx += (d1 * b3 - b1 * d2) / det
        ly += (a1 * d2 - d1 * a3) / det
    x_star = math.exp(lx)
    y_star = math.exp(ly)
    K = (raw.k3 / raw.k2) * (x_star / y_star)
    return CanonicalParams(a1=a1, b1=b1, a3=a3, b3=b3, K=K), Point(x_star, y_star)


def to_offset_form(c: CanonicalParams) -> OffsetParams:
    return OffsetParams(
        p_hat=c.a1 - c.a3,
        q_hat=c.b3 - c.b1,
        p=-c.a3,
        q=-c.b1,
        C=c.K,
    )


def from_offset_form(d: OffsetParams) -> CanonicalParams:
    a3 = -d.p
    b1 = -d.q
    return CanonicalParams(
        a1=d.p_hat + a3,
        b1=b1,
        a3=a3,
        b3=d.q_hat + b1,
        K=d.C,
    )


_RECORD_KEYS = ("a1", "b1", "a3", "b3", "K")


def to_record(c: CanonicalParams) -> str:
    """Flat key=value text record, round-trip exact."""
    return "\n".join(f"{k}={getattr(c, k)!r}" for k in _RECORD_KEYS)


def from_record(text: str) -> CanonicalParams:
    values: dict[str, float] = {}
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _RECORD_KEYS:
            raise ValueError(f"unknown key {key!r} in parameter record")
        values[key] = float(val)
    missing = [k for k in _RECORD_KEYS if k not in values]
    if missing:
        raise ValueError(f"parameter record is missing {missing}")
    return CanonicalParams(**values)
