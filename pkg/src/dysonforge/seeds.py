"""The six seed similarity maps, their Hermitian images and invariants.

Each seed is a two-factor product exp(g1(t) q1) exp(g2(t) q2) whose scalar
functions are parametrized by one auxiliary function x(t) obeying the
first-order constrained flow (index 1 is free and ships with an
integral-of-lambda preset).  The Hermitian image h(t) = f+ K1 + f- K2 is
attached through closed-form coefficient functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import algebra as la
from .algebra import AlgebraElement, GroupElement, element, exp_factor, compose
from .auxode import cumulative_integral
from .paths import ElementPath, ScalarPath, require_same_grid
from .profiles import DomainError, DrivingProfile

__all__ = [
    "SeedSpec",
    "Seed",
    "SEED_OPERATORS",
    "DEFAULT_CONSTANTS",
    "hamiltonian_path",
    "build_seed",
    "build_seed2_from_chi",
    "f_pm",
    "tdde_rhs",
    "solve_gamma_dot_by_hermiticity",
    "invariant_inv1",
    "invariant_inv3",
    "invariant_IH",
]

# Exponent operators (q1, q2) for each seed index.
SEED_OPERATORS = {
    1: (element({"K4": 1}), element({"K3": 1})),
    2: (element({"K3": 1}), element({"K4": 1})),
    3: (element({"K4": 1}), element({"K1": 1j})),
    4: (element({"K4": 1}), element({"K2": 1j})),
    5: (element({"K3": 1}), element({"K1": 1j})),
    6: (element({"K3": 1}), element({"K2": 1j})),
}

DEFAULT_CONSTANTS = (1.0, 1.0, 0.5, 0.0)


@dataclass(frozen=True)
class SeedSpec:
    """Which seed to build and with what constants.

    sign = -1 swaps the two Hermitian coefficient functions; the upper
    assignment is the default.
    """

    index: int
    k: float = 1.0
    sign: int = 1

    def __post_init__(self):
        if self.index not in SEED_OPERATORS:
            raise ValueError("seed index must be 1..6")
        if self.index >= 2 and self.k == 0:
            raise DomainError("k must be nonzero for seeds 2..6")
        if self.sign not in (1, -1):
            raise ValueError("sign selector must be +1 or -1")


@dataclass(frozen=True)
class Seed:
    spec: SeedSpec
    group: GroupElement
    f_plus: ScalarPath
    f_minus: ScalarPath
    grid: np.ndarray
    x_path: Optional[ScalarPath] = None

    @property
    def h_path(self) -> ElementPath:
        n = len(self.grid)
        coeffs = np.zeros((n, la.DIM), dtype=complex)
        coeffs[:, la.ALIASES["K1"]] = self.f_plus.values
        coeffs[:, la.ALIASES["K2"]] = self.f_minus.values
        return ElementPath(self.grid, coeffs)

    @property
    def f_diff(self) -> ScalarPath:
        return self.f_plus + (-self.f_minus)


def hamiltonian_path(profile: DrivingProfile, grid) -> ElementPath:
    """Non-Hermitian Hamiltonian a (K1 + K2) + i lambda K3 on the grid."""
    grid = np.asarray(grid, dtype=float)
    n = len(grid)
    coeffs = np.zeros((n, la.DIM), dtype=complex)
    a = np.atleast_1d(profile.a_value(grid)) * np.ones(n)
    lam = np.atleast_1d(profile.lam_value(grid)) * np.ones(n)
    coeffs[:, la.ALIASES["K1"]] = a
    coeffs[:, la.ALIASES["K2"]] = a
    coeffs[:, la.ALIASES["K3"]] = 1j * lam
    return ElementPath(grid, coeffs)


def _gamma_paths(spec: SeedSpec, x_path: ScalarPath):
    """Scalar factor functions for seeds 2..6 via chain rule on x(t)."""
    g = x_path.grid
    x = x_path.values.real
    v = x_path.derivs.real
    k = spec.k
    chi = np.sqrt(1.0 + x ** 2)
    delta = np.sqrt(1.0 + k ** 2 * (1.0 + x ** 2))
    i = spec.index
    if i == 2:
        if np.min(k * x) <= 0.0:
            bad = g[int(np.argmin(k * x))]
            raise DomainError(
                f"seed 2 parametrization needs k*x > 0; violated at t = {bad:.6g}")
        g1 = ScalarPath(g, np.arccosh(chi), np.sign(x) * v / chi)
        u = -1.0 / (k * chi)
        du = x * v / (k * chi ** 3)
        g2 = ScalarPath(g, np.arcsinh(u), du / np.sqrt(1.0 + u ** 2))
        return g1, g2
    g1 = ScalarPath(g, np.arcsinh(k * chi), k * x * v / (chi * delta))
    datan = v / (1.0 + x ** 2)
    if i == 3:
        g2 = ScalarPath(g, -np.arctan(x), -datan)
    elif i == 4:
        g2 = ScalarPath(g, np.arctan(x), datan)
    elif i == 5:
        # arccot valued in (0, pi)
        g2 = ScalarPath(g, -(np.pi / 2 - np.arctan(x)), datan)
    elif i == 6:
        g2 = ScalarPath(g, np.pi / 2 - np.arctan(x), -datan)
    else:
        raise DomainError("seed 1 has free factor functions; supply them")
    return g1, g2


def f_pm(spec: SeedSpec, profile: DrivingProfile, x_path: Optional[ScalarPath],
         grid=None):
    """Closed-form Hermitian coefficient functions (f+, f-) of one seed.

    Two derivative orders are attached when the auxiliary path carries
    them, so downstream flows get septic interpolants.
    """
    if spec.index == 1:
        grid = np.asarray(grid if grid is not None else x_path.grid, dtype=float)
        n = len(grid)
        a = np.atleast_1d(profile.a_value(grid)) * np.ones(n)
        da = np.atleast_1d(profile.a.deriv(grid)) * np.ones(n)
        d2a = np.atleast_1d(profile.a.deriv2(grid)) * np.ones(n)
        f = ScalarPath(grid, a, da, d2a)
        return f, f
    g = x_path.grid
    n = len(g)
    x = x_path.values.real
    v = x_path.derivs.real
    acc = None if x_path.accel is None else x_path.accel.real
    k = spec.k
    a = np.atleast_1d(profile.a_value(g)) * np.ones(n)
    da = np.atleast_1d(profile.a.deriv(g)) * np.ones(n)
    d2a = np.atleast_1d(profile.a.deriv2(g)) * np.ones(n)
    lam = profile.lam_value(g)
    dlam = profile.lam_deriv(g)
    d2lam = profile.lam.deriv2(g)
    chi2 = 1.0 + x ** 2
    delta = np.sqrt(1.0 + k ** 2 * chi2)
    ddelta = k ** 2 * x * v / delta
    d2delta = None if acc is None else (
        k ** 2 * (v ** 2 + x * acc) / delta - ddelta ** 2 / delta)
    den = 2.0 * k * chi2
    dden = 4.0 * k * x * v
    d2den = None if acc is None else 4.0 * k * (v ** 2 + x * acc)
    one, zero = np.ones(n), np.zeros(n)

    def ratio(num, dnum, d2num, outer):
        val = outer * lam * num / den
        dval = (outer * (dlam * num + lam * dnum) - val * dden) / den
        if acc is None:
            return val, dval, None
        d2val = (outer * (d2lam * num + 2 * dlam * dnum + lam * d2num)
                 - 2 * dval * dden - val * d2den) / den
        return val, dval, d2val

    i = spec.index
    args = {
        2: ((one, zero, zero, -1.0), None),
        3: ((1.0 + delta, ddelta, d2delta, -1.0),
            (-1.0 + delta, ddelta, d2delta, -1.0)),
        4: ((-1.0 + delta, ddelta, d2delta, 1.0),
            (1.0 + delta, ddelta, d2delta, 1.0)),
        5: ((1.0 + delta, ddelta, d2delta, 1.0),
            (-1.0 + delta, ddelta, d2delta, 1.0)),
        6: ((-1.0 + delta, ddelta, d2delta, -1.0),
            (1.0 + delta, ddelta, d2delta, -1.0)),
    }[i]
    up = ratio(*args[0])
    lo = tuple(None if u is None else -u for u in up) if i == 2 else ratio(*args[1])

    def assemble(part):
        val, dval, d2val = part
        return ScalarPath(g, a + val, da + dval,
                          None if d2val is None else d2a + d2val)

    f_plus, f_minus = assemble(up), assemble(lo)
    if spec.sign == -1:
        f_plus, f_minus = f_minus, f_plus
    return f_plus, f_minus


def build_seed(spec: SeedSpec, profile: DrivingProfile,
               x_path: Optional[ScalarPath] = None, grid=None,
               gamma1: Optional[ScalarPath] = None,
               gamma2: Optional[ScalarPath] = None,
               eta1_preset: Optional[str] = None) -> Seed:
    """Assemble one seed map as a factored group element path.

    Seeds 2..6 take the constrained auxiliary path x(t); seed 1 takes
    explicit factor functions or the preset "lambda-integral", which uses
    exp(-int lambda dt K3) alone.
    """
    q1, q2 = SEED_OPERATORS[spec.index]
    if spec.index == 1:
        if eta1_preset == "lambda-integral":
            grid = np.asarray(grid, dtype=float)
            gpath = cumulative_integral(lambda t: float(profile.lam_value(t)), grid)
            group = exp_factor(q2, -gpath)
        elif gamma1 is not None and gamma2 is not None:
            grid = require_same_grid(gamma1, gamma2)
            group = compose(exp_factor(q1, gamma1), exp_factor(q2, gamma2))
        else:
            raise DomainError("seed 1 needs factor functions or a preset")
        f_plus, f_minus = f_pm(spec, profile, None, grid)
        return Seed(spec, group, f_plus, f_minus, grid)
    if x_path is None:
        raise DomainError("seeds 2..6 need the constrained auxiliary path")
    g1, g2 = _gamma_paths(spec, x_path)
    group = compose(exp_factor(q1, g1), exp_factor(q2, g2))
    f_plus, f_minus = f_pm(spec, profile, x_path)
    return Seed(spec, group, f_plus, f_minus, x_path.grid, x_path)


def build_seed2_from_chi(k2: float, chi_path: ScalarPath, profile: DrivingProfile,
                         k_ep: float) -> GroupElement:
    """Seed 2 in the Ermakov-Pinney parametrization (arccosh chi branch)."""
    g = chi_path.grid
    chi = chi_path.values.real
    chid = chi_path.derivs.real
    if np.min(chi) <= 1.0:
        bad = g[int(np.argmin(chi))]
        raise DomainError(f"chi must exceed 1; violated at t = {bad:.6g}")
    g1 = ScalarPath(g, np.arccosh(chi), chid / np.sqrt(chi ** 2 - 1.0))
    u = k_ep / chi
    du = -k_ep * chid / chi ** 2
    g2 = ScalarPath(g, np.arcsinh(u), du / np.sqrt(1.0 + u ** 2))
    q1, q2 = SEED_OPERATORS[2]
    return compose(exp_factor(q1, g1), exp_factor(q2, g2))


def tdde_rhs(G: GroupElement, H_path: ElementPath) -> ElementPath:
    """Right-hand side of the time-dependent similarity equation.

    Returns the coefficient path of G H G^{-1} + i (d_t G) G^{-1}; the
    caller decides what Hermiticity residual to tolerate.
    """
    n = len(H_path.grid)
    ad = la.ad_path(G, n)
    conj = np.einsum("tij,tj->ti", ad, H_path.coeffs)
    lld = la.left_log_derivative(G, n=n)
    return ElementPath(H_path.grid, conj + 1j * lld)


def solve_gamma_dot_by_hermiticity(exponents, gamma_values, H: AlgebraElement):
    """Recover factor-function derivatives from the Hermiticity demand.

    Given an ansatz prod_j exp(g_j q_j) with known values g_j at one
    instant, solve the linear least-squares system that makes the
    anti-Hermitian part of the similarity image of H vanish.  Returns
    (gamma_dots, solve_residual, rank); a rank-deficient system is
    resolved by the minimum-norm solution and flagged through the rank.
    """
    if len(exponents) > 3:
        raise ValueError("ansatz limited to at most three factors")
    if len(exponents) != len(gamma_values):
        raise ValueError("one value per factor required")
    G = compose(*[exp_factor(q, complex(gv)) for q, gv in zip(exponents, gamma_values)])
    conj = la.conjugate(G, H)
    cols = []
    prefix = la.identity_group()
    for q, gv in zip(exponents, gamma_values):
        cols.append(la.conjugate(prefix, q).coeffs.real)
        prefix = compose(prefix, exp_factor(q, complex(gv)))
    A = np.column_stack(cols)
    b = -conj.coeffs.imag
    sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ sol - b))
    return sol, residual, int(rank)


def invariant_inv1(seed: Seed, c=DEFAULT_CONSTANTS) -> ElementPath:
    """Rotating-phase invariant of a Hermitian image, for seeds 2..6.

    c1 K1 + c2 K2 + c3 cos(c4 - F) K3 - c3 sin(c4 - F) K4 with F the
    antiderivative of f+ - f-.  For seed 1 the phase freezes, so the
    family degenerates and is rejected.
    """
    if seed.spec.index == 1:
        raise DomainError("seed 1 has a frozen phase; use the quadratic family")
    c1, c2, c3, c4 = c
    fd = seed.f_diff
    ip = fd.interpolant()
    F = cumulative_integral(lambda t: float(np.real(ip(t))), seed.grid)
    n = len(seed.grid)
    coeffs = np.zeros((n, la.DIM), dtype=complex)
    phase = c4 - F.values.real
    coeffs[:, la.ALIASES["K1"]] = c1
    coeffs[:, la.ALIASES["K2"]] = c2
    coeffs[:, la.ALIASES["K3"]] = c3 * np.cos(phase)
    coeffs[:, la.ALIASES["K4"]] = -c3 * np.sin(phase)
    return ElementPath(seed.grid, coeffs)


def invariant_inv3(seed: Seed, rho_plus: ScalarPath, rho_minus: ScalarPath) -> ElementPath:
    """Quadratic-form invariant valid for every seed, from two rho flows."""
    require_same_grid(rho_plus, rho_minus, seed.f_plus)
    n = len(seed.grid)
    coeffs = np.zeros((n, la.DIM), dtype=complex)
    for tag, rho, f in (("x", rho_plus, seed.f_plus), ("y", rho_minus, seed.f_minus)):
        r = rho.values.real
        rd = rho.derivs.real
        fv = f.values.real
        if np.min(np.abs(fv)) == 0.0:
            raise DomainError("Hermitian coefficient vanishes on the window")
        alpha = r ** 2
        beta = 1.0 / r ** 2 + rd ** 2 / fv ** 2
        delta = -2.0 * r * rd / fv
        coeffs[:, la._INDEX[f"K+{tag}"]] = alpha + beta
        coeffs[:, la._INDEX[f"K-{tag}"]] = alpha - beta
        coeffs[:, la._INDEX[f"K0{tag}"]] = delta
    return ElementPath(seed.grid, coeffs)


def invariant_IH(profile: DrivingProfile, grid, c=DEFAULT_CONSTANTS) -> ElementPath:
    """Closed-form non-Hermitian invariant of the driving Hamiltonian."""
    grid = np.asarray(grid, dtype=float)
    c1, c2, c3, c4 = c
    gint = cumulative_integral(lambda t: float(profile.lam_value(t)), grid)
    arg = c4 - gint.values.real
    n = len(grid)
    coeffs = np.zeros((n, la.DIM), dtype=complex)
    coeffs[:, la.ALIASES["K1"]] = c1 / 2.0 + c3 * np.cosh(arg)
    coeffs[:, la.ALIASES["K2"]] = c1 / 2.0 - c3 * np.cosh(arg)
    coeffs[:, la.ALIASES["K3"]] = c2
    coeffs[:, la.ALIASES["K4"]] = 2j * c3 * np.sinh(arg)
    return ElementPath(grid, coeffs)
