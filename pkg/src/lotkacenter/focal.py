"""Focal quantities of the canonical system at its equilibrium.

Two independent routes are provided.  ``closed_form_focal`` evaluates the
exact expressions for the first two focal values L1, L2 of the
trace-free linearization.  ``lyapunov_numeric`` knows nothing about
those expressions: it builds a formal Lyapunov function degree by degree
from a Taylor expansion of the field and reads off the obstruction
coefficients.  Agreement of the two routes, and of either with the
return map, is what the test suite leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InsufficientDegree, InternalInconsistency, PreconditionViolated
from .model import CanonicalParams, jacobian, trace_tolerance

__all__ = [
    "FocalBranch",
    "FocalValues",
    "LyapunovQuantities",
    "SignProbe",
    "TaylorField",
    "closed_form_focal",
    "focal_record",
    "lyapunov_numeric",
    "return_map_sign_probe",
    "taylor_expand",
]

L1_ZERO_TOL = 1e-10
#: relative tolerance for the algebraic branch tests below
_BRANCH_TOL = 1e-9


class FocalBranch(Enum):
    """Which algebraic branch supplied L2 (or made it unnecessary)."""

    CASE_A_B3_ZERO = "CaseA_b3Zero"
    CASE_B_D_NONZERO = "CaseB_DNonzero"
    CASE_C1 = "CaseC1"
    CASE_C2 = "CaseC2"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class FocalValues:
    """Closed-form focal values at the equilibrium.

    ``L2`` is None when L1 does not vanish, in which case it carries no
    stability information anyway.  ``d_value`` is the recurring
    combination D = 1 + a3 - a3*K - b3*K that organizes the case split.
    """

    L1: float
    L2: float | None
    d_value: float
    branch: FocalBranch


def _close(u: float, v: float, tol: float = _BRANCH_TOL) -> bool:
    return abs(u - v) <= tol * (1.0 + abs(u) + abs(v))


def closed_form_focal(
    c: CanonicalParams, *, l1_zero_tol: float = L1_ZERO_TOL
) -> FocalValues:
    """Exact first and second focal values for a trace-free elliptic point.

    Requires trace = 0 (within ``trace_tolerance``) and det > 0; both are
    checked.  When L1 vanishes the branch for L2 is decided on the
    algebra: b3 = 0 and the (b3 = 1, a3 = -1) corner force L2 = 0, the
    (b3 = 1, K = 1) corner has its own quartic product formula, and the
    generic branch (D != 0, b3 not in {0, 1}) has the six-factor formula.
    """
    a1, b1, a3, b3, K = c.a1, c.b1, c.a3, c.b3, c.K
    summary = jacobian(c)
    if abs(summary.trace) > trace_tolerance(c):
        raise PreconditionViolated(
            f"trace {summary.trace} is not zero within tolerance"
        )
    det = summary.determinant
    if det <= 0.0:
        raise PreconditionViolated(f"determinant {det} is not positive")
    root = math.sqrt(det)

    d_value = 1.0 + a3 - a3 * K - b3 * K
    bracket = b1 * d_value - a3 * (1.0 - b3) * K
    l1 = (math.pi / 8.0) * K * b3 * bracket / (root * b1)

    # magnitude of the two bracket contributions, for a scale-aware zero test
    l1_scale = (
        (math.pi / 8.0)
        * K
        * abs(b3)
        * (abs(b1) * (1.0 + abs(a3) * (1.0 + K) + abs(b3) * K) + abs(a3) * (1.0 + abs(b3)) * K)
        / (root * abs(b1))
    )
    if abs(l1) > l1_zero_tol * max(1.0, l1_scale):
        return FocalValues(L1=l1, L2=None, d_value=d_value, branch=FocalBranch.NOT_APPLICABLE)

    if _close(b3, 0.0):
        # a1 = K*b3 = 0 as well; every focal value vanishes
        return FocalValues(L1=l1, L2=0.0, d_value=d_value, branch=FocalBranch.CASE_A_B3_ZERO)

    if _close(b3, 1.0):
        # here D = (1 + a3)(1 - K), and L1 = 0 forces D = 0
        if _close(K, 1.0) and (not _close(a3, -1.0) or abs(K - 1.0) <= abs(a3 + 1.0)):
            l2 = (
                (math.pi / 288.0)
                * a3
                * (1.0 + a3)
                * (1.0 + b1)
                * (a3 - b1)
                / (root * b1)
            )
            return FocalValues(L1=l1, L2=l2, d_value=d_value, branch=FocalBranch.CASE_C2)
        if _close(a3, -1.0):
            return FocalValues(L1=l1, L2=0.0, d_value=d_value, branch=FocalBranch.CASE_C1)
        raise InternalInconsistency(
            f"L1 = {l1} is below tolerance with b3 = 1 but neither K = 1 nor a3 = -1"
        )

    # generic branch: b3 not in {0, 1}; D = 0 here would force L1 away from 0
    if abs(d_value) <= _BRANCH_TOL * (1.0 + abs(a3) * (1.0 + K) + abs(b3) * K):
        raise InternalInconsistency(
            f"L1 = {l1} is below tolerance with D = {d_value} ~ 0 but b3 = {b3} not 1"
        )
    l2 = (
        (math.pi / 288.0)
        * (a3 + b3) ** 2
        * b3
        * (1.0 + a3 - b3 * K)
        * (1.0 - b3 * K)
        * (1.0 - K)
        * (1.0 + a3 + K - b3 * K)
        / (root * d_value * (1.0 - b3))
    )
    return FocalValues(L1=l1, L2=l2, d_value=d_value, branch=FocalBranch.CASE_B_D_NONZERO)


def focal_record(fv: FocalValues) -> str:
    l2 = "none" if fv.L2 is None else repr(fv.L2)
    return f"L1={fv.L1!r}\nL2={l2}\nD={fv.d_value!r}\nbranch={fv.branch.value}"


# ---------------------------------------------------------------------------
# Taylor expansion of the shifted field


@dataclass(frozen=True)
class TaylorField:
    """Polynomial truncation of the field around (1, 1).

    With u = x - 1 and v = y - 1, the coefficient of u**i v**j is
    ``fx[i, j]`` in the first component and ``fy[i, j]`` in the second.
    Entries with i + j > degree are zero.
    """

    degree: int
    fx: np.ndarray
    fy: np.ndarray

    def __post_init__(self) -> None:
        self.fx.setflags(write=False)
        self.fy.setflags(write=False)


def _binom_coeffs(a: float, n: int) -> np.ndarray:
    """Generalized binomial coefficients C(a, 0..n) for real a."""
    out = np.empty(n + 1)
    out[0] = 1.0
    for k in range(1, n + 1):
        out[k] = out[k - 1] * (a - (k - 1)) / k
    return out


def taylor_expand(c: CanonicalParams, degree: int) -> TaylorField:
    """Expand the canonical field about the equilibrium to total degree."""
    if degree < 1:
        raise ValueError(f"degree must be at least 1, got {degree}")
    n = degree
    fx = np.outer(_binom_coeffs(c.a1, n), _binom_coeffs(c.b1, n))
    fy = -c.K * np.outer(_binom_coeffs(c.a3, n), _binom_coeffs(c.b3, n))
    fx[0, 0] = 0.0
    fy[0, 0] = 0.0
    ii, jj = np.indices(fx.shape)
    over = ii + jj > n
    fx[over] = 0.0
    fy[over] = 0.0
    return TaylorField(degree=n, fx=fx, fy=fy)


# ---------------------------------------------------------------------------
# Numerical Lyapunov quantities


@dataclass(frozen=True)
class LyapunovQuantities:
    """Obstruction coefficients of a formal Lyapunov function.

    ``ell[k-1]`` is the k-th quantity, reported per unit angular
    frequency.  Entries after the first one that fails the vanish test
    are NaN, because they are not invariant once an earlier quantity is
    nonzero.
    """

    ell: tuple[float, ...]
    omega: float


def _poly_mul(A: np.ndarray, B: np.ndarray, cap: int) -> np.ndarray:
    """Product of two bivariate coefficient arrays, truncated to total
    degree <= cap.  Arrays are (cap+1, cap+1)."""
    out = np.zeros((cap + 1, cap + 1), dtype=np.result_type(A, B, np.float64))
    for i, j in zip(*np.nonzero(A)):
        ni = cap + 1 - i
        nj = cap + 1 - j
        out[i:, j:] += A[i, j] * B[:ni, :nj]
    ii, jj = np.indices(out.shape)
    out[ii + jj > cap] = 0.0
    return out


def _poly_pow(P: np.ndarray, k: int, cap: int) -> np.ndarray:
    out = np.zeros((cap + 1, cap + 1), dtype=P.dtype)
    out[0, 0] = 1.0
    for _ in range(k):
        out = _poly_mul(out, P, cap)
    return out


def _complexified_field(tf: TaylorField, cap: int) -> tuple[float, np.ndarray]:
    """Rewrite the shifted field in a complex eigencoordinate.

    The linear part [[a, b], [c, d]] with a + d = 0 and det > 0 is
    brought to a rotation by the substitution p = (a*u + b*v)/omega,
    q = u, and the complex variable z = p + i*q then satisfies
    dz/dt = i*omega*z + f(z, conj z).  Returns (omega, coefficients of f)
    where f has no constant or linear part.
    """
    a = float(tf.fx[1, 0])
    b = float(tf.fx[0, 1])
    cc = float(tf.fy[1, 0])
    d = float(tf.fy[0, 1])
    tr = a + d
    det = a * d - b * cc
    if det <= 0.0:
        raise PreconditionViolated(f"determinant {det} is not positive")
    if abs(tr) > 1e-9 * (1.0 + abs(a) + abs(d)):
        raise PreconditionViolated(f"trace {tr} is not zero within tolerance")
    if b == 0.0:
        raise PreconditionViolated("fx[0,1] = 0 makes the eigenbasis singular")
    omega = math.sqrt(det)

    # u, v as polynomials in (p, q): u = q, v = (omega*p - a*q)/b
    U = np.zeros((cap + 1, cap + 1))
    U[0, 1] = 1.0
    V = np.zeros((cap + 1, cap + 1))
    V[1, 0] = omega / b
    V[0, 1] = -a / b

    v_pows = [np.zeros((cap + 1, cap + 1)) for _ in range(cap + 1)]
    v_pows[0][0, 0] = 1.0
    for j in range(1, cap + 1):
        v_pows[j] = _poly_mul(v_pows[j - 1], V, cap)

    def substitute(coeffs: np.ndarray) -> np.ndarray:
        # u**i is a shift by i in the q index
        out = np.zeros((cap + 1, cap + 1))
        n = coeffs.shape[0]
        for i in range(min(n, cap + 1)):
            for j in range(min(n, cap + 1 - i)):
                w = coeffs[i, j]
                if w == 0.0:
                    continue
                block = v_pows[j]
                out[:, i:] += w * block[:, : cap + 1 - i]
        ii, jj = np.indices(out.shape)
        out[ii + jj > cap] = 0.0
        return out

    G1 = substitute(np.asarray(tf.fx))
    G2 = substitute(np.asarray(tf.fy))
    P_dot = (a * G1 + b * G2) / omega
    Q_dot = G1

    # p = (z + w)/2, q = -i(z - w)/2 with w standing for conj z
    Zp = np.zeros((cap + 1, cap + 1), dtype=complex)
    Zp[1, 0] = 0.5
    Zp[0, 1] = 0.5
    Zq = np.zeros((cap + 1, cap + 1), dtype=complex)
    Zq[1, 0] = -0.5j
    Zq[0, 1] = 0.5j
    zp_pows = [_poly_pow(Zp, m, cap) for m in range(cap + 1)]
    zq_pows = [_poly_pow(Zq, n, cap) for n in range(cap + 1)]

    W = P_dot + 1j * Q_dot
    H = np.zeros((cap + 1, cap + 1), dtype=complex)
    for m, n in zip(*np.nonzero(W)):
        H += W[m, n] * _poly_mul(zp_pows[m], zq_pows[n], cap)

    lin_err = max(abs(H[1, 0] - 1j * omega), abs(H[0, 1]))
    if lin_err > 1e-9 * omega:
        raise InternalInconsistency(
            f"complexified linear part off by {lin_err}, omega = {omega}"
        )
    H[0, 0] = 0.0
    H[1, 0] = 0.0
    H[0, 1] = 0.0
    return omega, H


def lyapunov_numeric(
    tf: TaylorField, order: int, *, vanish_tol: float = 1e-8
) -> LyapunovQuantities:
    """Numerical Lyapunov quantities from the Taylor field alone.

    Builds V = z*conj(z) + higher terms so that dV/dt along the flow is
    eta_2 r**4 + eta_3 r**6 + ... with r**2 = z*conj(z); the homological
    equations are diagonal in the monomial basis and the resonant
    coefficients eta cannot be removed.  The k-th reported quantity is
    eta_{k+1} / omega, the per-unit-frequency normalization that makes
    values comparable across parameter sets.

    Needs tf.degree >= 2*order + 1.
    """
    if order < 1:
        raise ValueError(f"order must be at least 1, got {order}")
    if tf.degree < 2 * order + 1:
        raise InsufficientDegree(
            f"degree {tf.degree} cannot support order {order}; need {2 * order + 1}"
        )
    cap = 2 * order + 2
    omega, f = _complexified_field(tf, cap)

    fbar = np.conj(f.T)
    v = np.zeros((cap + 1, cap + 1), dtype=complex)
    v[1, 1] = 1.0
    etas: list[float] = []

    for d in range(3, cap + 1):
        vz = np.zeros_like(v)
        vz[:-1, :] = v[1:, :] * np.arange(1, cap + 1)[:, None]
        vzb = np.zeros_like(v)
        vzb[:, :-1] = v[:, 1:] * np.arange(1, cap + 1)[None, :]
        rhs = _poly_mul(vz, f, cap) + _poly_mul(vzb, fbar, cap)
        for j in range(d + 1):
            k = d - j
            g = rhs[j, k]
            if j == k:
                if abs(g.imag) > 1e-9 * (1.0 + abs(g)):
                    raise InternalInconsistency(
                        f"resonant coefficient at degree {d} is not real: {g}"
                    )
                etas.append(g.real)
            else:
                v[j, k] = -g / (1j * omega * (j - k))

    ell = [eta / omega for eta in etas[:order]]
    for k in range(1, order):
        if any(abs(e) > vanish_tol for e in ell[:k] if math.isfinite(e)):
            ell[k] = math.nan
    return LyapunovQuantities(ell=tuple(ell), omega=omega)


# ---------------------------------------------------------------------------
# Return-map sign probe


@dataclass(frozen=True)
class SignProbe:
    """Sign of the return-map displacement at a small radius.

    ``sign`` is 0 when both measured displacements sit inside the noise
    band, so a center is indistinguishable from focal values below the
    integration accuracy.
    """

    sign: int
    displacement: float
    displacement_half: float
    threshold: float


def return_map_sign_probe(
    c: CanonicalParams,
    radius: float,
    *,
    rel_tol: float = 1e-10,
    threshold: float = 1e-9,
) -> SignProbe:
    """Integrate one return at ``radius`` and ``radius/2`` and report the
    displacement sign, 0 if below the noise threshold."""
    if not 0.0 < radius <= 0.2:
        raise ValueError(f"radius must lie in (0, 0.2], got {radius}")
    from .dynamics import section_displacement  # deferred: dynamics imports this module

    d_full = section_displacement(c, radius, rel_tol=rel_tol)
    d_half = section_displacement(c, radius / 2.0, rel_tol=rel_tol)
    if abs(d_full) <= threshold and abs(d_half) <= threshold:
        sign = 0
    else:
        lead = d_full if abs(d_full) >= abs(d_half) else d_half
        sign = 1 if lead > 0.0 else -1
    return SignProbe(
        sign=sign,
        displacement=d_full,
        displacement_half=d_half,
        threshold=threshold,
    )
