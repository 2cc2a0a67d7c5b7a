"""Iteration engine: intertwiners, Hermiticity gates, map series, symmetry ops.

From two seed maps eta and eta~ the intertwiner A = eta~ eta^{-1} generates
the two families A^n eta and A^n eta~.  Each step is licensed by a gate:
the adjoint action of A (or its inverse, going down) on the current
Hermitian invariant must stay Hermitian.  A refused gate truncates the
series and the offending anti-Hermitian component is kept for inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import algebra as la
from .algebra import GroupElement, compose, group_power, simplify_group
from .paths import ElementPath, require_same_grid
from .profiles import DrivingProfile
from .seeds import Seed, hamiltonian_path, tdde_rhs

__all__ = [
    "ForgePair",
    "LedgerEntry",
    "IterationLedger",
    "SymmetryOps",
    "make_pair",
    "gate_s1",
    "gate_s2",
    "iterate",
    "gauge_step",
    "combine_indices",
    "combined_group",
    "predicted_group",
    "symmetry_ops",
    "a_tilde_symmetry_check",
    "metric_fingerprint",
    "fingerprint_distance",
]

TOL_GATE = 1e-6


@dataclass(frozen=True)
class ForgePair:
    eta: Seed
    eta_tilde: Seed
    A: GroupElement
    A_tilde: GroupElement
    profile: DrivingProfile
    grid: np.ndarray

    @property
    def H_path(self) -> ElementPath:
        return hamiltonian_path(self.profile, self.grid)


def make_pair(eta: Seed, eta_tilde: Seed, profile: DrivingProfile) -> ForgePair:
    """Build the intertwiners of two seeds living on the same grid.

    A is stored factored; exact cancellations (commuting exponents only)
    are applied, so a unitary single-factor A stays a single factor.
    """
    grid = require_same_grid(eta.f_plus, eta_tilde.f_plus)
    A = simplify_group(compose(eta_tilde.group, eta.group.inverse()))
    A_tilde = simplify_group(compose(eta.group.inverse(), eta_tilde.group))
    return ForgePair(eta, eta_tilde, A, A_tilde, profile, grid)


def _conjugate_coeffs(ad, coeffs):
    return np.einsum("tij,tj->ti", ad, coeffs)


def gate_s1(A: GroupElement, invariant: ElementPath, tol: float = TOL_GATE):
    """Hermiticity gate on the adjoint action of A on an invariant.

    Returns (passed, residual_per_t, conjugated_path).
    """
    n = len(invariant.grid)
    ad = la.ad_path(A, n)
    conj = ElementPath(invariant.grid, _conjugate_coeffs(ad, invariant.coeffs))
    res = conj.hermiticity_residuals()
    return bool(np.max(res) <= tol), res, conj


def gate_s2(A: GroupElement, invariant: ElementPath, tol: float = TOL_GATE):
    """Same gate with the inverse adjoint action of A."""
    return gate_s1(A.inverse(), invariant, tol)


@dataclass
class LedgerEntry:
    kind: str
    n: int
    admitted: bool
    gate_residual: float
    group: Optional[GroupElement] = None
    h: Optional[ElementPath] = None
    anti_hermitian: Optional[ElementPath] = None
    fingerprint: Optional[np.ndarray] = None


@dataclass
class IterationLedger:
    pair: ForgePair
    n_max: int
    tol_gate: float
    entries: dict = field(default_factory=dict)
    refused_at: dict = field(default_factory=dict)

    def get(self, kind: str, n: int) -> Optional[LedgerEntry]:
        return self.entries.get((kind, n))

    def admitted(self, kind: Optional[str] = None):
        out = [e for e in self.entries.values() if e.admitted]
        if kind is not None:
            out = [e for e in out if e.kind == kind]
        return sorted(out, key=lambda e: (e.kind, e.n))

    def refused(self):
        return sorted((e for e in self.entries.values() if not e.admitted),
                      key=lambda e: (e.kind, e.n))

    @property
    def any_refused(self) -> bool:
        return len(self.refused_at) > 0


def iterate(pair: ForgePair, n_max: int, invariant_eta: ElementPath,
            invariant_tilde: ElementPath, tol_gate: float = TOL_GATE) -> IterationLedger:
    """Run the gated iteration to n in [-n_max, n_max] for both families.

    Step +1 conjugates the running invariant by A, step -1 by A^{-1}; the
    first gate failure in a direction truncates that direction and records
    the anti-Hermitian component of the conjugated invariant.
    """
    grid = pair.grid
    n_t = len(grid)
    H = pair.H_path
    ad_A = la.ad_path(pair.A, n_t)
    ad_Ainv = la.ad_path(pair.A.inverse(), n_t)
    ledger = IterationLedger(pair, n_max, tol_gate)

    for kind, seed, inv0 in (("eta", pair.eta, invariant_eta),
                             ("eta_tilde", pair.eta_tilde, invariant_tilde)):
        h0 = tdde_rhs(seed.group, H)
        ledger.entries[(kind, 0)] = LedgerEntry(
            kind, 0, True, float(inv0.max_hermiticity_residual()),
            seed.group, h0)
        for direction, ad_step in ((1, ad_A), (-1, ad_Ainv)):
            coeffs = inv0.coeffs
            for step in range(1, n_max + 1):
                n = direction * step
                coeffs = _conjugate_coeffs(ad_step, coeffs)
                conj = ElementPath(grid, coeffs)
                res = conj.max_hermiticity_residual()
                if res > tol_gate:
                    anti = ElementPath(grid, 1j * coeffs.imag)
                    ledger.entries[(kind, n)] = LedgerEntry(
                        kind, n, False, res, anti_hermitian=anti)
                    ledger.refused_at[(kind, direction)] = n
                    break
                group_n = compose(group_power(pair.A, n), seed.group)
                h_n = tdde_rhs(group_n, H)
                ledger.entries[(kind, n)] = LedgerEntry(
                    kind, n, True, res, group_n, h_n)
    return ledger


def gauge_step(pair: ForgePair, h: ElementPath, direction: int = 1) -> ElementPath:
    """Map a Hermitian image one step along the series via the gauge relation.

    h -> A h A^{-1} + i (d_t A) A^{-1} for direction +1, and the inverse
    relation for direction -1.
    """
    n = len(h.grid)
    A = pair.A if direction == 1 else pair.A.inverse()
    ad = la.ad_path(A, n)
    lld = la.left_log_derivative(A, n=n)
    return ElementPath(h.grid, _conjugate_coeffs(ad, h.coeffs) + 1j * lld)


# ---------------------------------------------------------------------------
# Combination arithmetic
# ---------------------------------------------------------------------------

def combine_indices(kind_first: str, n: int, kind_second: str, m: int):
    """Predicted (kind, index) pair for the two combinations of two maps.

    The "up" combination is second * first^{-1} * second, the "down" one
    is first * second^{-1} * first; both stay inside the two families.
    """
    key = (kind_first, kind_second)
    if key == ("eta_tilde", "eta_tilde"):
        return ("eta_tilde", 2 * m - n), ("eta_tilde", 2 * n - m)
    if key == ("eta_tilde", "eta"):
        return ("eta", 2 * m - n - 1), ("eta_tilde", 2 * n - m + 1)
    if key == ("eta", "eta_tilde"):
        return ("eta_tilde", 2 * m - n + 1), ("eta", 2 * n - m - 1)
    if key == ("eta", "eta"):
        return ("eta", 2 * m - n), ("eta", 2 * n - m)
    raise ValueError("kinds must be 'eta' or 'eta_tilde'")


def _series_group(pair: ForgePair, kind: str, n: int) -> GroupElement:
    base = pair.eta.group if kind == "eta" else pair.eta_tilde.group
    return compose(group_power(pair.A, n), base)


def combined_group(pair: ForgePair, kind_first: str, n: int,
                   kind_second: str, m: int, which: str) -> GroupElement:
    """The raw factored product of one combination, no index arithmetic."""
    first = _series_group(pair, kind_first, n)
    second = _series_group(pair, kind_second, m)
    if which == "up":
        return compose(second, first.inverse(), second)
    if which == "down":
        return compose(first, second.inverse(), first)
    raise ValueError("which must be 'up' or 'down'")


def predicted_group(pair: ForgePair, kind: str, n: int) -> GroupElement:
    return _series_group(pair, kind, n)


# ---------------------------------------------------------------------------
# Symmetry operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymmetryOps:
    S: GroupElement
    S_tilde: GroupElement
    fixed_point_residual_S: np.ndarray
    fixed_point_residual_S_tilde: np.ndarray


def symmetry_ops(pair: ForgePair, invariant_eta: ElementPath,
                 invariant_tilde: ElementPath) -> SymmetryOps:
    """S = A^dag A and S~ = A A^dag with their invariant fixed-point residuals.

    The commutation statement is tested in its adjoint form: conjugating
    the invariant of the eta family by S (of the eta~ family by S~) must
    reproduce it.
    """
    S = compose(pair.A.dagger(), pair.A)
    S_tilde = compose(pair.A, pair.A.dagger())
    n = len(invariant_eta.grid)
    res_S = np.max(np.abs(
        _conjugate_coeffs(la.ad_path(S, n), invariant_eta.coeffs)
        - invariant_eta.coeffs), axis=1)
    res_St = np.max(np.abs(
        _conjugate_coeffs(la.ad_path(S_tilde, n), invariant_tilde.coeffs)
        - invariant_tilde.coeffs), axis=1)
    return SymmetryOps(S, S_tilde, res_S, res_St)


def a_tilde_symmetry_check(pair: ForgePair, I_H: ElementPath, tol: float = TOL_GATE):
    """Fixed point of Ad(A~) on I_H versus equality of the mapped invariants.

    Returns both residuals and whether the two statements agree: either
    both hold within tolerance or both fail.
    """
    n = len(I_H.grid)
    fixed = np.max(np.abs(
        _conjugate_coeffs(la.ad_path(pair.A_tilde, n), I_H.coeffs) - I_H.coeffs))
    via_eta = _conjugate_coeffs(la.ad_path(pair.eta.group, n), I_H.coeffs)
    via_tilde = _conjugate_coeffs(la.ad_path(pair.eta_tilde.group, n), I_H.coeffs)
    equal = np.max(np.abs(via_eta - via_tilde))
    scale = float(np.max(np.abs(I_H.coeffs)))
    holds_fixed = fixed <= tol * max(1.0, scale)
    holds_equal = equal <= tol * max(1.0, scale)
    return {
        "fixed_point_residual": float(fixed),
        "equality_residual": float(equal),
        "holds": bool(holds_fixed),
        "consistent": bool(holds_fixed == holds_equal),
    }


# ---------------------------------------------------------------------------
# Metric fingerprints (delegated to a Fock representation)
# ---------------------------------------------------------------------------

def metric_fingerprint(group: GroupElement, rep, idx) -> np.ndarray:
    """Sorted interior spectrum of the metric of one map at one grid index."""
    from .fock import metric_eigenvalues
    return metric_eigenvalues(group, rep, idx)


def fingerprint_distance(fp_a: np.ndarray, fp_b: np.ndarray) -> float:
    """Distance between metric fingerprints, relative to the spectral scale.

    Metrics of strongly squeezed maps have spectra spanning many decades;
    eigensolver accuracy is absolute at the scale of the largest
    eigenvalue, so equality is certified relative to that scale.
    """
    scale = max(float(np.max(np.abs(fp_a))), float(np.max(np.abs(fp_b))), 1.0)
    return float(np.max(np.abs(fp_a - fp_b)) / scale)
