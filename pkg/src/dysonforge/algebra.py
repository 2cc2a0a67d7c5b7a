"""Exact realization of the ten-generator quadratic two-mode algebra.

The generators are the Hermitian quadratics in (x, y, p_x, p_y):

    K+z = (p_z^2 + z^2)/2     K-z = (p_z^2 - z^2)/2     K0z = {z, p_z}/2
    J+  = (x p_y + y p_x)/2   J-  = (x p_y - y p_x)/2
    I+  = (x y + p_x p_y)/2   I-  = (x y - p_x p_y)/2

with z = x, y and hbar = 1.  The structure constants are derived once at
import time by exact rational arithmetic: every generator is a quadratic
form Q_M = xi^T M xi / 2 over xi = (x, y, p_x, p_y) with M symmetric, and

    [Q_M, Q_N] = i Q_{M O N - N O M},

where O is the symplectic form of the canonical commutators.  Expanding
the right-hand side back in the generator basis yields the bracket tensor
with entries that are i times half-integers, so the floating point table
is exact.

Algebra elements are complex coefficient vectors over this ordered basis;
an element is Hermitian iff all its coefficients are real.  Group elements
are kept as ordered products of exponential factors exp(c * X) and are
never collapsed through matrix logarithms or BCH truncations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
import scipy.linalg

from .paths import ScalarPath

__all__ = [
    "DIM",
    "LABELS",
    "ALIASES",
    "STRUCTURE",
    "AlgebraElement",
    "GroupFactor",
    "GroupElement",
    "basis_element",
    "element",
    "zero_element",
    "bracket",
    "ad_matrix",
    "structure_constants_exact",
    "jacobi_defect_exact",
    "is_hermitian",
    "hermiticity_residual",
    "pt_transform",
    "conjugate",
    "dagger",
    "inverse",
    "identity_group",
    "exp_factor",
    "compose",
    "group_power",
    "simplify_group",
    "left_log_derivative",
    "ad_exp_matrix",
]

DIM = 10

LABELS = ("K+x", "K-x", "K0x", "K+y", "K-y", "K0y", "J+", "J-", "I+", "I-")

# Short names used by the oscillator model: K1..K4 are the generators that
# close among themselves and carry the non-Hermitian Hamiltonian.
ALIASES = {"K1": 0, "K2": 3, "K3": 8, "K4": 7}

INDEX = {lab: i for i, lab in enumerate(LABELS)}
_INDEX = INDEX

# PT acts antilinearly: conjugate coefficients, then flip the sign of the
# generators that are odd under the combined parity/time-reversal.
PT_ODD = (_INDEX["K0x"], _INDEX["K0y"], _INDEX["I+"], _INDEX["I-"])


# ---------------------------------------------------------------------------
# Structure constants from exact quadratic-form arithmetic
# ---------------------------------------------------------------------------

def _symplectic_form():
    # xi = (x, y, p_x, p_y); [xi_a, xi_b] = i * Omega_ab
    O = [[Fraction(0)] * 4 for _ in range(4)]
    O[0][2] = Fraction(1)
    O[1][3] = Fraction(1)
    O[2][0] = Fraction(-1)
    O[3][1] = Fraction(-1)
    return O


def _generator_forms():
    """Symmetric 4x4 coefficient matrices of the ten quadratic generators."""
    h = Fraction(1, 2)
    forms = []

    def sym(entries):
        M = [[Fraction(0)] * 4 for _ in range(4)]
        for (i, j), v in entries.items():
            M[i][j] += v
            if i != j:
                M[j][i] += v
        return M

    forms.append(sym({(0, 0): Fraction(1), (2, 2): Fraction(1)}))    # K+x
    forms.append(sym({(0, 0): Fraction(-1), (2, 2): Fraction(1)}))   # K-x
    forms.append(sym({(0, 2): Fraction(1)}))                         # K0x
    forms.append(sym({(1, 1): Fraction(1), (3, 3): Fraction(1)}))    # K+y
    forms.append(sym({(1, 1): Fraction(-1), (3, 3): Fraction(1)}))   # K-y
    forms.append(sym({(1, 3): Fraction(1)}))                         # K0y
    forms.append(sym({(0, 3): h, (1, 2): h}))                        # J+
    forms.append(sym({(0, 3): h, (1, 2): -h}))                       # J-
    forms.append(sym({(0, 1): h, (2, 3): h}))                        # I+
    forms.append(sym({(0, 1): h, (2, 3): -h}))                       # I-
    return forms


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)]
            for i in range(4)]


def _matsub(A, B):
    return [[A[i][j] - B[i][j] for j in range(4)] for i in range(4)]


def _decompose_form(S):
    """Expand a symmetric quadratic form exactly in the generator basis."""
    h = Fraction(1, 2)
    v = [Fraction(0)] * DIM
    v[0] = (S[0][0] + S[2][2]) * h
    v[1] = (S[2][2] - S[0][0]) * h
    v[2] = S[0][2]
    v[3] = (S[1][1] + S[3][3]) * h
    v[4] = (S[3][3] - S[1][1]) * h
    v[5] = S[1][3]
    v[6] = S[0][3] + S[1][2]
    v[7] = S[0][3] - S[1][2]
    v[8] = S[0][1] + S[2][3]
    v[9] = S[0][1] - S[2][3]
    return v


def _derive_structure():
    forms = _generator_forms()
    O = _symplectic_form()
    exact = [[[Fraction(0)] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for a in range(DIM):
        for b in range(DIM):
            S = _matsub(_matmul(_matmul(forms[a], O), forms[b]),
                        _matmul(_matmul(forms[b], O), forms[a]))
            exact[a][b] = _decompose_form(S)
            # consistency: the expansion must reproduce S exactly
            R = [[sum(exact[a][b][k] * forms[k][i][j] for k in range(DIM))
                  for j in range(4)] for i in range(4)]
            if R != S:
                raise AssertionError("generator forms do not span the bracket")
    return exact


_EXACT_STRUCTURE = _derive_structure()

# STRUCTURE[a, b, k] is the coefficient of generator k in [G_a, G_b];
# every entry is i times a half-integer, hence exact in binary floats.
STRUCTURE = np.zeros((DIM, DIM, DIM), dtype=complex)
for _a in range(DIM):
    for _b in range(DIM):
        for _k in range(DIM):
            STRUCTURE[_a, _b, _k] = 1j * float(_EXACT_STRUCTURE[_a][_b][_k])


def structure_constants_exact():
    """Bracket tensor as nested Fractions f with [G_a,G_b] = sum_k i f G_k."""
    return _EXACT_STRUCTURE


def jacobi_defect_exact():
    """Maximum Jacobi defect over all generator triples, in exact arithmetic."""
    c = _EXACT_STRUCTURE
    worst = Fraction(0)
    for a in range(DIM):
        for b in range(DIM):
            for d in range(DIM):
                for k in range(DIM):
                    # i^2 = -1 in the double bracket turns the cyclic sum of
                    # c.c products into a plain rational combination.
                    s = sum(c[a][b][m] * c[m][d][k]
                            + c[b][d][m] * c[m][a][k]
                            + c[d][a][m] * c[m][b][k] for m in range(DIM))
                    worst = max(worst, abs(s))
    return worst


# ---------------------------------------------------------------------------
# Algebra elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlgebraElement:
    """Complex coefficient vector over the ordered Hermitian generator basis."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (DIM,):
            raise ValueError(f"expected {DIM} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)
        c.setflags(write=False)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.coeffs - other.coeffs)

    def __mul__(self, s) -> "AlgebraElement":
        return AlgebraElement(self.coeffs * complex(s))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(-self.coeffs)

    def dagger(self) -> "AlgebraElement":
        return AlgebraElement(np.conj(self.coeffs))

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def __repr__(self):
        terms = [f"{c:+.4g}*{LABELS[k]}"
                 for k, c in enumerate(self.coeffs) if c != 0]
        return "AlgebraElement(" + (" ".join(terms) if terms else "0") + ")"


def zero_element() -> AlgebraElement:
    return AlgebraElement(np.zeros(DIM, dtype=complex))


def basis_element(label: str) -> AlgebraElement:
    idx = ALIASES.get(label, _INDEX.get(label))
    if idx is None:
        raise KeyError(f"unknown generator label {label!r}")
    c = np.zeros(DIM, dtype=complex)
    c[idx] = 1.0
    return AlgebraElement(c)


def element(terms: dict) -> AlgebraElement:
    """Build an element from a {label: coefficient} mapping."""
    c = np.zeros(DIM, dtype=complex)
    for lab, v in terms.items():
        idx = ALIASES.get(lab, _INDEX.get(lab))
        if idx is None:
            raise KeyError(f"unknown generator label {lab!r}")
        c[idx] += complex(v)
    return AlgebraElement(c)


def bracket(X: AlgebraElement, Y: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(np.einsum("a,b,abk->k", X.coeffs, Y.coeffs, STRUCTURE))


def ad_matrix(X: AlgebraElement) -> np.ndarray:
    """Matrix of ad(X) acting on coefficient vectors: ad(X) @ y = [X, Y]."""
    return np.einsum("a,abk->kb", X.coeffs, STRUCTURE)


def hermiticity_residual(X: AlgebraElement) -> float:
    return float(np.max(np.abs(X.coeffs.imag)))


def is_hermitian(X: AlgebraElement, tol: float = 1e-9):
    """Return (hermitian?, residual) with residual = max |Im coefficient|."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    r = hermiticity_residual(X)
    return r <= tol, r


def pt_transform(X: AlgebraElement) -> AlgebraElement:
    c = np.conj(X.coeffs).copy()
    for k in PT_ODD:
        c[k] = -c[k]
    return AlgebraElement(c)


# ---------------------------------------------------------------------------
# Group elements: ordered products of exponentials
# ---------------------------------------------------------------------------

Scale = Union[complex, float, ScalarPath]


@dataclass(frozen=True)
class GroupFactor:
    """One factor exp(scale * exponent); the exponent is time independent."""

    exponent: AlgebraElement
    scale: Scale

    def scale_at(self, idx) -> complex:
        if isinstance(self.scale, ScalarPath):
            return self.scale.values[idx]
        return complex(self.scale)

    def scale_dot_at(self, idx) -> complex:
        if isinstance(self.scale, ScalarPath):
            if self.scale.derivs is None:
                raise ValueError("factor scale has no derivative samples")
            return self.scale.derivs[idx]
        return 0.0

    def scale_values(self, n: int) -> np.ndarray:
        if isinstance(self.scale, ScalarPath):
            return self.scale.values
        return np.full(n, complex(self.scale))

    def scale_derivs(self, n: int) -> np.ndarray:
        if isinstance(self.scale, ScalarPath):
            if self.scale.derivs is None:
                raise ValueError("factor scale has no derivative samples")
            return self.scale.derivs
        return np.zeros(n, dtype=complex)

    def dagger(self) -> "GroupFactor":
        if isinstance(self.scale, ScalarPath):
            return GroupFactor(self.exponent.dagger(), self.scale.conj())
        return GroupFactor(self.exponent.dagger(), np.conj(complex(self.scale)))

    def negated(self) -> "GroupFactor":
        if isinstance(self.scale, ScalarPath):
            return GroupFactor(self.exponent, -self.scale)
        return GroupFactor(self.exponent, -complex(self.scale))

    def is_constant(self) -> bool:
        return not isinstance(self.scale, ScalarPath)


@dataclass(frozen=True)
class GroupElement:
    """Ordered product of exponential factors, leftmost factor first.

    The product is never collapsed to a single matrix logarithm; inverses
    and adjoints act factorwise, which keeps every operation exact up to
    the quality of the scalar paths.
    """

    factors: tuple = ()

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.factors + other.factors)

    def dagger(self) -> "GroupElement":
        return GroupElement(tuple(f.dagger() for f in reversed(self.factors)))

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(f.negated() for f in reversed(self.factors)))

    def is_identity(self) -> bool:
        return len(self.factors) == 0

    def is_unitary(self, tol: float = 0.0) -> bool:
        """True if every factor is exp(i * real * Hermitian)."""
        for f in self.factors:
            anti = np.max(np.abs((f.exponent.coeffs + np.conj(f.exponent.coeffs))))
            n = 1 if f.is_constant() else len(f.scale_values(0))
            sc = f.scale_values(n)
            if anti > tol or np.max(np.abs(sc.imag)) > tol:
                return False
        return True

    def n_points(self):
        for f in self.factors:
            if isinstance(f.scale, ScalarPath):
                return len(f.scale.values)
        return None


def identity_group() -> GroupElement:
    return GroupElement(())


def exp_factor(exponent: AlgebraElement, scale: Scale) -> GroupElement:
    return GroupElement((GroupFactor(exponent, scale),))


def compose(*elements: GroupElement) -> GroupElement:
    factors = ()
    for g in elements:
        factors = factors + g.factors
    return GroupElement(factors)


def dagger(G: GroupElement) -> GroupElement:
    return G.dagger()


def inverse(G: GroupElement) -> GroupElement:
    return G.inverse()


def group_power(G: GroupElement, n: int) -> GroupElement:
    """G**n by factor repetition; single factors compact into one factor."""
    if n == 0:
        return identity_group()
    base = G if n > 0 else G.inverse()
    m = abs(n)
    if len(base.factors) == 1:
        f = base.factors[0]
        if isinstance(f.scale, ScalarPath):
            return exp_factor(f.exponent, f.scale * m)
        return exp_factor(f.exponent, complex(f.scale) * m)
    return GroupElement(base.factors * m)


# -- exponential of the adjoint -------------------------------------------

@lru_cache(maxsize=256)
def _ad_eig(coeff_bytes: bytes):
    """Cached eigendecomposition of ad(X) with a reliability check."""
    x = np.frombuffer(coeff_bytes, dtype=complex)
    ad = np.einsum("a,abk->kb", x, STRUCTURE)
    lam, V = np.linalg.eig(ad)
    try:
        Vinv = np.linalg.inv(V)
    except np.linalg.LinAlgError:
        return None
    if np.linalg.norm(V @ np.diag(lam) @ Vinv - ad) > 1e-12 * max(1.0, np.linalg.norm(ad)):
        return None
    return lam, V, Vinv


def ad_exp_matrix(exponent: AlgebraElement, scale: complex) -> np.ndarray:
    """Matrix of Ad(exp(scale * exponent)) = exp(scale * ad(exponent))."""
    eig = _ad_eig(exponent.coeffs.tobytes())
    if eig is None:
        return scipy.linalg.expm(complex(scale) * ad_matrix(exponent))
    lam, V, Vinv = eig
    return (V * np.exp(complex(scale) * lam)) @ Vinv


def _ad_exp_batch(exponent: AlgebraElement, scales: np.ndarray) -> np.ndarray:
    """Ad(exp(c_t X)) for an array of scales, shape (n, DIM, DIM)."""
    eig = _ad_eig(exponent.coeffs.tobytes())
    if eig is None:
        ad = ad_matrix(exponent)
        return np.stack([scipy.linalg.expm(c * ad) for c in scales])
    lam, V, Vinv = eig
    return np.einsum("ij,tj,jk->tik", V, np.exp(np.outer(scales, lam)), Vinv)


def conjugate(G: GroupElement, X: AlgebraElement, idx=None) -> AlgebraElement:
    """Adjoint action G X G^{-1}, applied factorwise.

    For factors with path-valued scales the grid index must be supplied.
    """
    c = X.coeffs
    for f in reversed(G.factors):
        if isinstance(f.scale, ScalarPath) and idx is None:
            raise ValueError("grid index required for path-valued factors")
        s = f.scale_at(idx) if not f.is_constant() else complex(f.scale)
        if not np.isfinite(s):
            raise FloatingPointError(
                f"non-finite scale {s!r} in factor exp(c*{f.exponent!r})")
        c = ad_exp_matrix(f.exponent, s) @ c
    return AlgebraElement(c)


def ad_path(G: GroupElement, n: int) -> np.ndarray:
    """Ad(G(t)) over an n-point grid as an (n, DIM, DIM) array."""
    out = np.broadcast_to(np.eye(DIM, dtype=complex), (n, DIM, DIM)).copy()
    for f in G.factors:
        block = _ad_exp_batch(f.exponent, f.scale_values(n))
        out = np.einsum("tij,tjk->tik", out, block)
    return out


def left_log_derivative(G: GroupElement, idx=None, n=None) -> np.ndarray:
    """Coefficients of (d_t G) G^{-1} over the grid, shape (n, DIM).

    For G = F_1 ... F_m with F_j = exp(c_j(t) q_j) this is
    sum_j cdot_j(t) Ad(F_1 ... F_{j-1}) q_j.
    """
    if n is None:
        n = G.n_points()
        if n is None:
            raise ValueError("group element has no path-valued factors")
    out = np.zeros((n, DIM), dtype=complex)
    prefix = np.broadcast_to(np.eye(DIM, dtype=complex), (n, DIM, DIM)).copy()
    for f in G.factors:
        dots = f.scale_derivs(n)
        if np.any(dots != 0):
            out += dots[:, None] * np.einsum("tij,j->ti", prefix, f.exponent.coeffs)
        prefix = np.einsum("tij,tjk->tik", prefix, _ad_exp_batch(f.exponent, f.scale_values(n)))
    if idx is not None:
        return out[idx]
    return out


# -- conservative exact simplification -------------------------------------

def _scales_equal(a: Scale, b: Scale) -> bool:
    pa, pb = isinstance(a, ScalarPath), isinstance(b, ScalarPath)
    if pa != pb:
        return False
    if pa:
        return (np.array_equal(a.values, b.values)
                and np.array_equal(a.grid, b.grid))
    return complex(a) == complex(b)


def _scales_opposite(a: Scale, b: Scale) -> bool:
    pa, pb = isinstance(a, ScalarPath), isinstance(b, ScalarPath)
    if pa != pb:
        return False
    if pa:
        return (np.array_equal(a.values, -b.values)
                and np.array_equal(a.grid, b.grid))
    return complex(a) == -complex(b)


def _scale_is_zero(a: Scale) -> bool:
    if isinstance(a, ScalarPath):
        return bool(np.all(a.values == 0))
    return complex(a) == 0


def _add_scales(a: Scale, b: Scale) -> Scale:
    if isinstance(a, ScalarPath) and isinstance(b, ScalarPath):
        return a + b
    return complex(a) + complex(b)


def simplify_group(G: GroupElement) -> GroupElement:
    """Merge and cancel factors using exactly vanishing brackets only.

    Rules: drop zero-scale factors; merge adjacent factors with identical
    exponents; merge adjacent commuting factors with identical scales into
    one factor with the summed exponent; cancel an exp(c X) ... exp(-c X)
    sandwich when X commutes exactly with everything in between.
    """
    factors = list(G.factors)
    changed = True
    while changed:
        changed = False
        factors = [f for f in factors
                   if not (_scale_is_zero(f.scale) or f.exponent.is_zero())]
        for i in range(len(factors) - 1):
            a, b = factors[i], factors[i + 1]
            if np.array_equal(a.exponent.coeffs, b.exponent.coeffs):
                factors[i:i + 2] = [GroupFactor(a.exponent, _add_scales(a.scale, b.scale))]
                changed = True
                break
            if (_scales_equal(a.scale, b.scale)
                    and bracket(a.exponent, b.exponent).is_zero()):
                factors[i:i + 2] = [GroupFactor(a.exponent + b.exponent, a.scale)]
                changed = True
                break
        if changed:
            continue
        for i in range(len(factors) - 1):
            for j in range(i + 1, len(factors)):
                a, b = factors[i], factors[j]
                if not (np.array_equal(a.exponent.coeffs, b.exponent.coeffs)
                        and _scales_opposite(a.scale, b.scale)):
                    continue
                if all(bracket(a.exponent, m.exponent).is_zero()
                       for m in factors[i + 1:j]):
                    del factors[j]
                    del factors[i]
                    changed = True
                    break
            if changed:
                break
    return GroupElement(tuple(factors))
