"""Six-case center classification of the canonical system.

A trace-free elliptic equilibrium is a center exactly when the
parameters land on one of six algebraic families, listed in
``CASE_CONSTRAINTS`` below.  The classifier cross-checks the focal-value
route (L1, L2) against direct membership testing and refuses to emit an
answer when the two disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InternalInconsistency
from .focal import FocalBranch, FocalValues, closed_form_focal
from .model import CanonicalParams, EigenvalueKind, jacobian

__all__ = [
    "CenterCase",
    "CenterClassification",
    "LinearType",
    "Verdict",
    "classify",
    "classification_record",
    "linear_type",
    "match_table_cases",
    "witness_factor_value",
]

MATCH_TOL = 1e-9


class CenterCase(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    R1 = "R1"
    R2 = "R2"


class LinearType(Enum):
    ELLIPTIC_CANDIDATE = "EllipticCandidate"
    SADDLE = "Saddle"
    NODE_OR_SPIRAL = "NodeOrSpiral"
    DEGENERATE = "Degenerate"


class Verdict(Enum):
    CENTER = "Center"
    FOCUS_STABLE = "FocusStable"
    FOCUS_UNSTABLE = "FocusUnstable"
    WEAK_FOCUS_ORDER2_PLUS = "WeakFocusOrder2Plus"
    NOT_ELLIPTIC = "NotElliptic"
    DEGENERATE_DET_ZERO = "DegenerateDetZero"


@dataclass(frozen=True)
class CenterClassification:
    verdict: Verdict
    cases: frozenset[CenterCase]
    witness: str
    focal: FocalValues | None


def _eq(u: float, v: float, tol: float = MATCH_TOL) -> bool:
    return abs(u - v) <= tol * (1.0 + abs(u) + abs(v))


def linear_type(c: CanonicalParams) -> LinearType:
    summary = jacobian(c)
    kind = summary.eigenvalue_kind
    if kind is EigenvalueKind.ZERO_EIGENVALUE:
        return LinearType.DEGENERATE
    if kind is EigenvalueKind.PURELY_IMAGINARY:
        return LinearType.ELLIPTIC_CANDIDATE
    if summary.determinant < 0.0:
        return LinearType.SADDLE
    return LinearType.NODE_OR_SPIRAL


def match_table_cases(c: CanonicalParams, *, tol: float = MATCH_TOL) -> frozenset[CenterCase]:
    """All center families whose equalities hold within ``tol`` and whose
    strict inequalities hold strictly.  Families overlap, so the result
    may contain several members."""
    a1, b1, a3, b3, K = c.a1, c.b1, c.a3, c.b3, c.K
    out = set()
    if _eq(a1, 0.0, tol) and _eq(b3, 0.0, tol) and a3 * b1 > 0.0:
        out.add(CenterCase.I)
    if (
        abs(b3) > tol
        and _eq(a1, a3 + 1.0, tol)
        and _eq(b3, b1 + 1.0, tol)
        and a1 / b3 > 0.0
        and _eq(K, a1 / b3, tol)
        and a1 + b3 < 1.0
    ):
        out.add(CenterCase.II)
    if (
        _eq(a3, -1.0, tol)
        and _eq(b3, 1.0, tol)
        and a1 > 0.0
        and _eq(K, a1, tol)
        and a1 + b1 < 0.0
    ):
        out.add(CenterCase.III)
    if (
        _eq(a1, 1.0, tol)
        and _eq(b1, -1.0, tol)
        and b3 > 0.0
        and _eq(K, 1.0 / b3, tol)
        and a3 + b3 < 0.0
    ):
        out.add(CenterCase.IV)
    if (
        _eq(a1, b3, tol)
        and _eq(a3, b1, tol)
        and _eq(K, 1.0, tol)
        and abs(a1) < abs(b1)
    ):
        out.add(CenterCase.R1)
    denom = b3 - b1 - 1.0
    if (
        denom > 0.0
        and _eq(a1, K * b3, tol)
        and _eq(a3, K * b1, tol)
        and _eq(K, 1.0 / denom, tol)
        and abs(b3) < abs(b1)
    ):
        out.add(CenterCase.R2)
    return frozenset(out)


#: witness token -> the algebraic factor it claims vanishes
WITNESS_FACTORS = {
    "b3 = 0": lambda c: c.b3,
    "1+a3-b3*K = 0": lambda c: 1.0 + c.a3 - c.b3 * c.K,
    "1-b3*K = 0": lambda c: 1.0 - c.b3 * c.K,
    "1-K = 0": lambda c: 1.0 - c.K,
    "1+a3+K-b3*K = 0": lambda c: 1.0 + c.a3 + c.K - c.b3 * c.K,
    "a3 = -1": lambda c: c.a3 + 1.0,
    "b1 = -1": lambda c: c.b1 + 1.0,
    "a3 = b1": lambda c: c.a3 - c.b1,
}


def witness_factor_value(c: CanonicalParams, token: str) -> float:
    return WITNESS_FACTORS[token](c)


def _center_witness(c: CanonicalParams, fv: FocalValues) -> str:
    if fv.branch is FocalBranch.CASE_A_B3_ZERO:
        return "b3 = 0"
    if fv.branch is FocalBranch.CASE_C1:
        return "b3 = 1, a3 = -1"
    if fv.branch is FocalBranch.CASE_C2:
        tokens = [
            t
            for t in ("a3 = -1", "b1 = -1", "a3 = b1")
            if abs(WITNESS_FACTORS[t](c)) <= MATCH_TOL * (1.0 + abs(c.a3) + abs(c.b1))
        ]
        return "b3 = 1, K = 1; " + "; ".join(tokens) if tokens else "b3 = 1, K = 1"
    scale = 1.0 + abs(c.a3) + abs(c.b3) * c.K + c.K
    tokens = [
        t
        for t in ("1+a3-b3*K = 0", "1-b3*K = 0", "1-K = 0", "1+a3+K-b3*K = 0")
        if abs(WITNESS_FACTORS[t](c)) <= MATCH_TOL * scale
    ]
    return "; ".join(tokens) if tokens else "no quartic factor vanished"


def classify(
    c: CanonicalParams,
    *,
    l1_zero_tol: float = 1e-10,
    l2_zero_tol: float = 1e-10,
    match_tol: float = MATCH_TOL,
) -> CenterClassification:
    """Full verdict for one parameter set.

    Degenerate or non-elliptic linearizations short-circuit; otherwise
    the closed-form focal values decide focus versus center, and the
    center verdict must be corroborated by at least one family match or
    an ``InternalInconsistency`` is raised.
    """
    summary = jacobian(c)
    if summary.eigenvalue_kind is EigenvalueKind.ZERO_EIGENVALUE:
        return CenterClassification(
            verdict=Verdict.DEGENERATE_DET_ZERO,
            cases=frozenset(),
            witness="det = 0",
            focal=None,
        )
    if summary.eigenvalue_kind is not EigenvalueKind.PURELY_IMAGINARY:
        return CenterClassification(
            verdict=Verdict.NOT_ELLIPTIC,
            cases=frozenset(),
            witness="trace != 0 or det < 0",
            focal=None,
        )

    fv = closed_form_focal(c, l1_zero_tol=l1_zero_tol)
    if fv.L2 is None:
        verdict = Verdict.FOCUS_STABLE if fv.L1 < 0.0 else Verdict.FOCUS_UNSTABLE
        return CenterClassification(
            verdict=verdict, cases=frozenset(), witness="L1 != 0", focal=fv
        )
    if abs(fv.L2) > l2_zero_tol:
        verdict = Verdict.FOCUS_STABLE if fv.L2 < 0.0 else Verdict.FOCUS_UNSTABLE
        if fv.branch is FocalBranch.CASE_C2:
            witness = "b3 = 1, K = 1: none of the factors a3, 1+a3, 1+b1, a3-b1 vanishes"
        else:
            witness = "L1 = 0: none of the factors 1+a3-b3*K, 1-b3*K, 1-K, 1+a3+K-b3*K vanishes"
        return CenterClassification(
            verdict=verdict, cases=frozenset(), witness=witness, focal=fv
        )

    cases = match_table_cases(c, tol=match_tol)
    if not cases:
        raise InternalInconsistency(
            f"L1 and L2 vanish for {c} but no center family matches"
        )
    return CenterClassification(
        verdict=Verdict.CENTER,
        cases=cases,
        witness=_center_witness(c, fv),
        focal=fv,
    )


def classification_record(result: CenterClassification) -> str:
    cases = ",".join(sorted(case.value for case in result.cases))
    lines = [
        f"verdict={result.verdict.value}",
        f"cases={cases or 'none'}",
        f"witness={result.witness}",
    ]
    if result.focal is not None:
        l2 = "none" if result.focal.L2 is None else repr(result.focal.L2)
        lines.append(f"L1={result.focal.L1!r}")
        lines.append(f"L2={l2}")
    return "\n".join(lines)
