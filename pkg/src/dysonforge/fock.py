"""Truncated two-mode number-basis oracle for operator-level checks.

Generators are realized as sparse matrices built from ladder operators;
group elements become products of matrix exponentials.  Every reported
quantity is projected onto the interior block (both occupation numbers
below N - N_guard), where the truncation of quadratic operators is either
exact (total-quanta preserving combinations) or exponentially suppressed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from . import algebra as la
from .algebra import AlgebraElement, GroupElement
from .paths import ElementPath

__all__ = [
    "FockRep",
    "build_rep",
    "element_matrix",
    "realize",
    "realize_shells",
    "is_shell_preserving",
    "interior_shell_qmax",
    "commutator_table_check",
    "metric_check",
    "metric_eigenvalues",
    "metric_positivity",
    "hamiltonian_shell_blocks",
    "lr_residual",
    "lr_residual_shells",
    "invariant_spectrum_drift",
    "tdse_fidelity",
    "coherent_like_state",
]


@dataclass
class FockRep:
    """Generator matrices on a truncated two-mode number basis."""

    N: int
    n_guard: int
    generators: list
    interior: np.ndarray
    _dense: dict = field(default_factory=dict)
    _factor_cache: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.N * self.N

    def dense_generator(self, k: int) -> np.ndarray:
        if k not in self._dense:
            self._dense[k] = self.generators[k].toarray()
        return self._dense[k]

    def restrict(self, M: np.ndarray) -> np.ndarray:
        return M[np.ix_(self.interior, self.interior)]

    @property
    def shell_interior(self) -> np.ndarray:
        """Interior states on complete total-quanta shells.

        Quanta-preserving factors (the exponents used by every map here)
        are represented exactly on shells n1 + n2 <= N - 1; the corner-cut
        shells above are excluded from similarity-transform checks.
        """
        occ1 = np.repeat(np.arange(self.N), self.N)
        occ2 = np.tile(np.arange(self.N), self.N)
        return self.interior & (occ1 + occ2 <= self.N - 1 - self.n_guard)

    def restrict_shell(self, M: np.ndarray) -> np.ndarray:
        m = self.shell_interior
        return M[np.ix_(m, m)]

    def shell_states(self, q: int) -> np.ndarray:
        """Basis indices of the complete total-quanta shell q."""
        if not 0 <= q <= self.N - 1:
            raise ValueError("complete shells have 0 <= q <= N-1")
        n1 = np.arange(q + 1)
        return n1 * self.N + (q - n1)

    def shell_block(self, k: int, q: int) -> np.ndarray:
        key = ("shellgen", k, q)
        blk = self._factor_cache.get(key)
        if blk is None:
            s = self.shell_states(q)
            blk = self.generators[k][np.ix_(s, s)].toarray()
            self._factor_cache[key] = blk
        return blk


def build_rep(N: int, n_guard: int = 6) -> FockRep:
    """Assemble the ten generators at per-mode truncation N."""
    if N < 8:
        raise ValueError("truncation N must be at least 8")
    if not (1 <= n_guard <= N // 4):
        raise ValueError("need 1 <= n_guard <= N/4")
    a = sp.diags(np.sqrt(np.arange(1, N)), 1, format="csr")
    x1 = ((a + a.T) / np.sqrt(2)).astype(complex)
    p1 = (1j * (a.T - a) / np.sqrt(2)).astype(complex)
    eye = sp.identity(N, format="csr", dtype=complex)
    x = sp.kron(x1, eye, format="csr")
    y = sp.kron(eye, x1, format="csr")
    px = sp.kron(p1, eye, format="csr")
    py = sp.kron(eye, p1, format="csr")

    gens = [None] * la.DIM
    gens[la.INDEX["K+x"]] = (px @ px + x @ x) / 2
    gens[la.INDEX["K-x"]] = (px @ px - x @ x) / 2
    gens[la.INDEX["K0x"]] = (x @ px + px @ x) / 2
    gens[la.INDEX["K+y"]] = (py @ py + y @ y) / 2
    gens[la.INDEX["K-y"]] = (py @ py - y @ y) / 2
    gens[la.INDEX["K0y"]] = (y @ py + py @ y) / 2
    gens[la.INDEX["J+"]] = (x @ py + y @ px) / 2
    gens[la.INDEX["J-"]] = (x @ py - y @ px) / 2
    gens[la.INDEX["I+"]] = (x @ y + px @ py) / 2
    gens[la.INDEX["I-"]] = (x @ y - px @ py) / 2

    occ1 = np.repeat(np.arange(N), N)
    occ2 = np.tile(np.arange(N), N)
    interior = (occ1 < N - n_guard) & (occ2 < N - n_guard)
    return FockRep(N, n_guard, [g.tocsr() for g in gens], interior)


def element_matrix(rep: FockRep, X, dense: bool = True):
    """Matrix of an algebra element (or raw coefficient vector)."""
    coeffs = X.coeffs if isinstance(X, AlgebraElement) else np.asarray(X, dtype=complex)
    M = None
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = c * rep.generators[k]
        M = term if M is None else M + term
    if M is None:
        M = sp.csr_matrix((rep.dim, rep.dim), dtype=complex)
    return M.toarray() if dense else M


def _factor_matrix(rep: FockRep, exponent: AlgebraElement, scale: complex) -> np.ndarray:
    """exp(scale * M(exponent)) with a cached Hermitian eigenbasis.

    Exponents with purely real (or purely imaginary) coefficients reduce to
    a Hermitian matrix H with exp(c M) = V exp(c' w) V^dag; anything else
    falls back to a dense Pade exponential.
    """
    key = exponent.coeffs.tobytes()
    cached = rep._factor_cache.get(key)
    if cached is None:
        c = exponent.coeffs
        if np.all(c.imag == 0):
            herm = element_matrix(rep, c.real.astype(complex))
            mult = 1.0
        elif np.all(c.real == 0):
            herm = element_matrix(rep, c.imag.astype(complex))
            mult = 1j
        else:
            rep._factor_cache[key] = ("dense", element_matrix(rep, c))
            cached = rep._factor_cache[key]
        if cached is None:
            w, V = np.linalg.eigh(herm)
            rep._factor_cache[key] = ("eig", w, V, mult)
            cached = rep._factor_cache[key]
    if cached[0] == "dense":
        if np.isinf(np.abs(complex(scale))):
            raise OverflowError("factor scale overflow")
        return scipy.linalg.expm(complex(scale) * cached[1])
    _, w, V, mult = cached
    with np.errstate(over="ignore"):
        phase = np.exp(complex(scale) * mult * w)
    if np.any(~np.isfinite(phase)):
        raise OverflowError("factor exponential overflow")
    return (V * phase) @ V.conj().T


def realize(G: GroupElement, rep: FockRep, idx=None) -> np.ndarray:
    """Matrix of a factored group element at one grid index."""
    M = np.eye(rep.dim, dtype=complex)
    for j, f in enumerate(G.factors):
        s = f.scale_at(idx) if not f.is_constant() else complex(f.scale)
        try:
            M = M @ _factor_matrix(rep, f.exponent, s)
        except OverflowError as exc:
            raise OverflowError(f"factor {j} overflows: {exc}") from exc
    return M


# -- total-quanta shell realization ----------------------------------------

# Generators that commute with the total number operator; every map built
# here has its exponents in their span, so the matrix of a group element is
# block-diagonal over complete shells and can be assembled exactly per
# shell.  This avoids the cross-shell rounding leakage that a dense
# realization suffers when scales are large.
_SHELL_SAFE = (la.INDEX["K+x"], la.INDEX["K+y"], la.INDEX["J-"], la.INDEX["I+"])


def is_shell_preserving(X: AlgebraElement) -> bool:
    others = [k for k in range(la.DIM) if k not in _SHELL_SAFE]
    return bool(np.all(X.coeffs[others] == 0))


def _shell_factor_block(rep: FockRep, exponent: AlgebraElement, scale: complex,
                        q: int) -> np.ndarray:
    key = ("shellfac", exponent.coeffs.tobytes(), q)
    cached = rep._factor_cache.get(key)
    if cached is None:
        c = exponent.coeffs
        if np.all(c.imag == 0):
            herm = sum(c.real[k] * rep.shell_block(k, q) for k in _SHELL_SAFE
                       if c.real[k] != 0)
            mult = 1.0
        elif np.all(c.real == 0):
            herm = sum(c.imag[k] * rep.shell_block(k, q) for k in _SHELL_SAFE
                       if c.imag[k] != 0)
            mult = 1j
        else:
            raise ValueError("shell factors need real or imaginary exponents")
        if np.isscalar(herm):
            herm = np.zeros((q + 1, q + 1), dtype=complex)
        w, V = np.linalg.eigh(herm)
        cached = (w, V, mult)
        rep._factor_cache[key] = cached
    w, V, mult = cached
    with np.errstate(over="ignore"):
        phase = np.exp(complex(scale) * mult * w)
    if np.any(~np.isfinite(phase)):
        raise OverflowError(f"shell factor overflow at q={q}")
    return (V * phase) @ V.conj().T


def realize_shells(G: GroupElement, rep: FockRep, idx=None, q_max=None) -> dict:
    """Shell-blocks {q: matrix} of a quanta-preserving group element."""
    for f in G.factors:
        if not is_shell_preserving(f.exponent):
            raise ValueError("group element mixes total-quanta shells")
    if q_max is None:
        q_max = rep.N - 1
    blocks = {}
    for q in range(q_max + 1):
        M = np.eye(q + 1, dtype=complex)
        for f in G.factors:
            s = f.scale_at(idx) if not f.is_constant() else complex(f.scale)
            M = M @ _shell_factor_block(rep, f.exponent, s, q)
        if not np.all(np.isfinite(M)):
            raise OverflowError(f"shell q={q} product overflows")
        blocks[q] = M
    return blocks


def interior_shell_qmax(rep: FockRep) -> int:
    return rep.N - 1 - rep.n_guard


def commutator_table_check(rep: FockRep, tol: float = 1e-10):
    """Verify all pairwise generator commutators against the bracket tensor.

    Returns (max deviation on the interior block, first failing pair or None).
    """
    worst = 0.0
    first_bad = None
    P = rep.interior
    for a in range(la.DIM):
        for b in range(a + 1, la.DIM):
            comm = (rep.generators[a] @ rep.generators[b]
                    - rep.generators[b] @ rep.generators[a])
            expect = None
            for k in range(la.DIM):
                c = la.STRUCTURE[a, b, k]
                if c != 0:
                    term = c * rep.generators[k]
                    expect = term if expect is None else expect + term
            diff = comm if expect is None else comm - expect
            diff = diff.toarray()[np.ix_(P, P)]
            dev = float(np.max(np.abs(diff)))
            if dev > worst:
                worst = dev
            if dev > tol and first_bad is None:
                first_bad = (la.LABELS[a], la.LABELS[b])
    return worst, first_bad


def metric_eigenvalues(G: GroupElement, rep: FockRep, idx=None) -> np.ndarray:
    """Sorted interior spectrum of the metric rho = G^dag G.

    Quanta-preserving maps are diagonalized shell by shell over the
    complete interior shells; anything else goes through the dense route
    on the box interior.
    """
    try:
        blocks = realize_shells(G, rep, idx, q_max=interior_shell_qmax(rep))
    except ValueError:
        R = realize(G, rep, idx)
        return np.sort(np.linalg.eigvalsh(rep.restrict(R.conj().T @ R)))
    lams = [np.linalg.eigvalsh(B.conj().T @ B) for B in blocks.values()]
    return np.sort(np.concatenate(lams))


def metric_check(G: GroupElement, rep: FockRep, idx=None):
    """Interior minimum eigenvalue and Hermiticity deviation of the metric."""
    try:
        blocks = realize_shells(G, rep, idx, q_max=interior_shell_qmax(rep))
        rhos = [B.conj().T @ B for B in blocks.values()]
        herm_dev = max(float(np.max(np.abs(r - r.conj().T))) for r in rhos)
        lam_min = min(float(np.min(np.linalg.eigvalsh((r + r.conj().T) / 2)))
                      for r in rhos)
        return lam_min, herm_dev
    except ValueError:
        R = realize(G, rep, idx)
        rho = rep.restrict(R.conj().T @ R)
        herm_dev = float(np.max(np.abs(rho - rho.conj().T)))
        lam_min = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
        return lam_min, herm_dev


def metric_positivity(G: GroupElement, rep: FockRep, idx=None) -> dict:
    """Certified interior positivity check of the metric of one map.

    The metric eigenvalues per shell are the squared singular values of
    the realized block, and positivity is claimed only where the smallest
    singular value clears the backward-error scale dim * eps * sigma_max;
    strongly squeezed spectra that fall below it are reported as
    "indeterminate" rather than trusted to eigensolver noise.  Returns the
    smallest metric eigenvalue, its certification bound and the status.
    """
    eps = np.finfo(float).eps
    status = "positive"
    worst_min, worst_bound = np.inf, 0.0
    try:
        blocks = realize_shells(G, rep, idx, q_max=interior_shell_qmax(rep))
    except OverflowError:
        return {"min_eigenvalue": float("nan"), "bound": float("inf"),
                "status": "indeterminate"}
    for q, B in blocks.items():
        sigma = np.linalg.svd(B, compute_uv=False)
        bound = len(sigma) * eps * float(sigma[0])
        with np.errstate(over="ignore"):
            lam_min = float(sigma[-1]) ** 2
        if lam_min < worst_min:
            worst_min, worst_bound = lam_min, float(bound) ** 2
        if sigma[-1] <= bound:
            status = "indeterminate"
    return {"min_eigenvalue": worst_min, "bound": worst_bound, "status": status}


def hamiltonian_shell_blocks(rep: FockRep, f_plus: float, f_minus: float,
                             q_max: int) -> dict:
    """Blocks of f+ K1 + f- K2 over complete shells."""
    k1, k2 = la.INDEX["K+x"], la.INDEX["K+y"]
    return {q: f_plus * rep.shell_block(k1, q) + f_minus * rep.shell_block(k2, q)
            for q in range(q_max + 1)}


def lr_residual_shells(O_blocks_path, h_blocks_path, dt: float) -> float:
    """Invariance residual of a shell-blocked operator path.

    Same stencil as lr_residual, evaluated per shell with per-shell
    relative Frobenius norms; returns the worst value over interior times
    and shells.  Per-shell normalization keeps the answer meaningful when
    the spectrum spans many decades across shells.
    """
    n = len(O_blocks_path)
    if n < 5:
        raise ValueError("need at least five samples for the time stencil")
    worst = 0.0
    for i in range(2, n - 2):
        for q in O_blocks_path[i]:
            O = [O_blocks_path[j][q] for j in range(i - 2, i + 3)]
            dO = (O[0] - 8 * O[1] + 8 * O[3] - O[4]) / (12 * dt)
            h = h_blocks_path[i][q]
            res = 1j * dO + O[2] @ h - h @ O[2]
            scale = max(1.0, float(np.linalg.norm(O[2])))
            worst = max(worst, float(np.linalg.norm(res)) / scale)
    return worst


def lr_residual(O_mats, h_mats, dt: float, rep: FockRep, mask=None) -> np.ndarray:
    """Invariance-equation residual of a matrix path against a Hamiltonian path.

    Computes || i dO/dt + [O, h] || / max(1, ||O||) on the interior block
    with fourth-order finite differences in time, so the first two and
    last two samples carry no residual.  Frobenius norms.  Pass
    rep.shell_interior as the mask when O is a product of exponentials of
    quanta-preserving generators.
    """
    n = len(O_mats)
    if n < 5:
        raise ValueError("need at least five samples for the time stencil")
    out = np.full(n, np.nan)
    P = rep.interior if mask is None else mask
    for i in range(2, n - 2):
        dO = (O_mats[i - 2] - 8 * O_mats[i - 1] + 8 * O_mats[i + 1] - O_mats[i + 2]) / (12 * dt)
        comm = O_mats[i] @ h_mats[i] - h_mats[i] @ O_mats[i]
        res = (1j * dO + comm)[np.ix_(P, P)]
        scale = max(1.0, float(np.linalg.norm(O_mats[i][np.ix_(P, P)])))
        out[i] = float(np.linalg.norm(res)) / scale
    return out


def invariant_spectrum_drift(I_path: ElementPath, rep: FockRep,
                             indices=None, n_eigs: int = 10) -> float:
    """Maximum wandering of the lowest interior eigenvalues over time."""
    if indices is None:
        indices = range(len(I_path.grid))
    ref = None
    drift = 0.0
    for i in indices:
        M = element_matrix(rep, I_path.coeffs[i])
        lam = np.sort(np.linalg.eigvalsh(rep.restrict((M + M.conj().T) / 2)))[:n_eigs]
        if ref is None:
            ref = lam
        else:
            drift = max(drift, float(np.max(np.abs(lam - ref))))
    return drift


def coherent_like_state(rep: FockRep, alpha: complex = 0.4, beta: complex = 0.3) -> np.ndarray:
    """Normalized truncated two-mode coherent state, a Gaussian-like probe."""
    def single(z):
        n = np.arange(rep.N)
        amps = np.exp(-abs(z) ** 2 / 2) * z ** n / np.sqrt(
            np.array([float(math.factorial(int(m))) for m in n]))
        return amps
    psi = np.kron(single(alpha), single(beta))
    return psi / np.linalg.norm(psi)


def _evolve(mat_of_t: Callable, psi0: np.ndarray, t0: float, t1: float,
            t_eval) -> np.ndarray:
    dim = len(psi0)

    def rhs(t, y):
        psi = y[:dim] + 1j * y[dim:]
        dpsi = -1j * (mat_of_t(t) @ psi)
        return np.concatenate([dpsi.real, dpsi.imag])

    sol = solve_ivp(rhs, (t0, t1), np.concatenate([psi0.real, psi0.imag]),
                    t_eval=t_eval, method="RK45", rtol=1e-10, atol=1e-12)
    if not sol.success:
        raise RuntimeError(f"state evolution failed: {sol.message}")
    return (sol.y[:dim] + 1j * sol.y[dim:]).T


def tdse_fidelity(pair_H: Callable, pair_h: Callable, eta: GroupElement,
                  rep: FockRep, grid, indices, psi0: np.ndarray) -> float:
    """Minimum phase-free overlap between the two evolved pictures.

    Evolves psi under the non-Hermitian generator and phi = eta psi under
    its Hermitian image, then compares eta(t) psi(t) with phi(t) at the
    requested grid indices.
    """
    grid = np.asarray(grid, dtype=float)
    t_eval = grid[indices]
    psi_t = _evolve(pair_H, psi0, grid[0], t_eval[-1], t_eval)
    phi0 = realize(eta, rep, 0) @ psi0
    phi_t = _evolve(pair_h, phi0, grid[0], t_eval[-1], t_eval)
    worst = 1.0
    for j, i in enumerate(indices):
        mapped = realize(eta, rep, i) @ psi_t[j]
        f = abs(np.vdot(phi_t[j], mapped)) / (np.linalg.norm(phi_t[j]) * np.linalg.norm(mapped))
        worst = min(worst, float(f))
    return worst
