import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from dysonforge import algebra as la, auxode, fock, forge
from dysonforge import seeds as sd
from dysonforge.paths import ScalarPath
from tests.conftest import quadratic_invariant


def test_build_rep_validation():
    with pytest.raises(ValueError):
        fock.build_rep(6, 1)
    with pytest.raises(ValueError):
        fock.build_rep(16, 5)
    with pytest.raises(ValueError):
        fock.build_rep(16, 0)


def test_generators_hermitian(rep24):
    for k in range(la.DIM):
        M = rep24.dense_generator(k)
        assert np.max(np.abs(M - M.conj().T)) < 1e-13


def test_commuting_pair_small_rep():
    rep = fock.build_rep(8, 2)
    a, b = la.INDEX["K+x"], la.INDEX["K+y"]
    comm = rep.generators[a] @ rep.generators[b] - rep.generators[b] @ rep.generators[a]
    assert np.max(np.abs(rep.restrict(comm.toarray()))) == 0.0


def test_mixing_bracket_on_interior(rep24):
    a, b = la.ALIASES["K3"], la.ALIASES["K4"]
    comm = (rep24.generators[a] @ rep24.generators[b]
            - rep24.generators[b] @ rep24.generators[a]).toarray()
    want = 0.5j * (rep24.dense_generator(la.ALIASES["K1"])
                   - rep24.dense_generator(la.ALIASES["K2"]))
    assert np.max(np.abs(rep24.restrict(comm - want))) < 1e-10


def test_full_commutator_table_on_interior(rep24):
    worst, bad = fock.commutator_table_check(rep24, tol=1e-10)
    assert bad is None
    assert worst < 1e-10


def test_realize_identity(rep12):
    M = fock.realize(la.identity_group(), rep12)
    assert np.array_equal(M, np.eye(rep12.dim))


def test_realize_conjugation_consistency(rep24, seeds34):
    _, s4 = seeds34
    idx = 64
    R = fock.realize(s4.group, rep24, idx)
    X = la.element({"K3": 1.0, "K1": 0.5})
    lhs = R @ fock.element_matrix(rep24, X) @ np.linalg.inv(R)
    rhs = fock.element_matrix(rep24, la.conjugate(s4.group, X, idx))
    m = rep24.shell_interior
    assert np.max(np.abs((lhs - rhs)[np.ix_(m, m)])) < 1e-8


def test_realize_unitary_intertwiner(pair34, rep24):
    U = fock.realize(pair34.A, rep24, 32)
    m = rep24.shell_interior
    dev = (U.conj().T @ U - np.eye(rep24.dim))[np.ix_(m, m)]
    assert np.max(np.abs(dev)) < 1e-8


def test_realize_dagger_antihomomorphism(rep12, seeds34):
    s3, _ = seeds34
    idx = 40
    M = fock.realize(s3.group, rep12, idx)
    Md = fock.realize(s3.group.dagger(), rep12, idx)
    m = rep12.shell_interior
    num = np.max(np.abs((Md - M.conj().T)[np.ix_(m, m)]))
    assert num / max(1.0, np.max(np.abs(M))) < 1e-10


def test_realize_shells_matches_dense(rep12, seeds23):
    s2, _ = seeds23
    blocks = fock.realize_shells(s2.group, rep12, 16)
    dense = fock.realize(s2.group, rep12, 16)
    for q in range(rep12.N - 1 - rep12.n_guard + 1):
        s = rep12.shell_states(q)
        num = np.max(np.abs(blocks[q] - dense[np.ix_(s, s)]))
        assert num / max(1.0, np.max(np.abs(blocks[q]))) < 1e-10


def test_realize_shells_rejects_mixing_exponent(rep12):
    G = la.exp_factor(la.basis_element("K0x"), 0.1)
    with pytest.raises(ValueError):
        fock.realize_shells(G, rep12, None)


def test_factor_overflow_reported(rep12):
    G = la.exp_factor(la.basis_element("K1"), 1e6)
    with pytest.raises(OverflowError, match="factor 0"):
        fock.realize(G, rep12)


def test_metric_identity_map(rep12):
    lam_min, herm = fock.metric_check(la.identity_group(), rep12)
    assert abs(lam_min - 1.0) < 1e-14 and herm == 0.0


def test_metric_positive_along_seed(rep24, seeds34):
    _, s4 = seeds34
    for idx in (0, 32, 64, 96, 128):
        lam_min, herm = fock.metric_check(s4.group, rep24, idx)
        assert lam_min > 0
        assert herm < 1e-10
        check = fock.metric_positivity(s4.group, rep24, idx)
        assert check["status"] == "positive"
        assert check["min_eigenvalue"] > check["bound"]


def test_metric_positivity_reports_indeterminate(ledger23, rep24):
    # far out along the nonunitary series the spectrum leaves double
    # precision; the check must say so instead of reporting noise
    entry = ledger23.get("eta", 3)
    check = fock.metric_positivity(entry.group, rep24, len(ledger23.pair.grid) - 1)
    assert check["status"] == "indeterminate"


def test_metric_series_spectra_match(ledger34, rep24):
    fps = {e.n: fock.metric_eigenvalues(e.group, rep24, 64)
           for e in ledger34.admitted("eta_tilde")}
    scale = np.max(fps[0])
    for n, fp in fps.items():
        assert np.max(np.abs(fp - fps[0])) / scale < 1e-6


def test_lr_residual_commuting_constant(rep12):
    M = fock.element_matrix(rep12, la.element({"K1": 1.0}))
    h = fock.element_matrix(rep12, la.element({"K1": 0.5}))
    res = fock.lr_residual([M] * 7, [h] * 7, 0.1, rep12)
    assert np.nanmax(res) < 1e-14


def test_lr_residual_rotating_invariant(rep24, seeds23, invariants23):
    s2, _ = seeds23
    I = invariants23[0]
    idxs = list(range(0, 65, 4))
    dt = (s2.grid[1] - s2.grid[0]) * 4
    O = [fock.element_matrix(rep24, I.coeffs[i]) for i in idxs]
    G1 = fock.element_matrix(rep24, la.element({"K1": 1}))
    G2 = fock.element_matrix(rep24, la.element({"K2": 1}))
    h = [s2.f_plus.values.real[i] * G1 + s2.f_minus.values.real[i] * G2
         for i in idxs]
    res = fock.lr_residual(O, h, dt, rep24)
    assert np.nanmax(res) < 1e-5


def test_symmetry_operator_satisfies_invariance(prof_a, rep24):
    grid = np.linspace(0, 0.5, 51)
    x = auxode.constrained_x2(prof_a, 1.0, 3.0, grid)
    s2 = sd.build_seed(sd.SeedSpec(2, 1.0), prof_a, x_path=x)
    s3 = sd.build_seed(sd.SeedSpec(3, 1.0), prof_a, x_path=x)
    pair = forge.make_pair(s2, s3, prof_a)
    qmax = fock.interior_shell_qmax(rep24)
    S_path, St_path, h2_path, h3_path = [], [], [], []
    for i in range(len(grid)):
        A = fock.realize_shells(pair.A, rep24, i, q_max=qmax)
        S_path.append({q: A[q].conj().T @ A[q] for q in A})
        St_path.append({q: A[q] @ A[q].conj().T for q in A})
        h2_path.append(fock.hamiltonian_shell_blocks(
            rep24, s2.f_plus.values.real[i], s2.f_minus.values.real[i], qmax))
        h3_path.append(fock.hamiltonian_shell_blocks(
            rep24, s3.f_plus.values.real[i], s3.f_minus.values.real[i], qmax))
    dt = grid[1] - grid[0]
    assert fock.lr_residual_shells(S_path, h2_path, dt) < 1e-4
    assert fock.lr_residual_shells(St_path, h3_path, dt) < 1e-4


def test_spectrum_drift_constant_invariant(rep12):
    grid = np.linspace(0, 1, 8)
    coeffs = np.tile(la.element({"K1": 1.0, "K2": 2.0}).coeffs, (8, 1))
    from dysonforge.paths import ElementPath
    I = ElementPath(grid, coeffs)
    assert fock.invariant_spectrum_drift(I, rep12) == 0.0


def test_spectrum_drift_small_and_converging(seeds23, rep24, rep16):
    s2, _ = seeds23
    idxs = range(0, 257, 16)
    I1 = sd.invariant_inv1(s2, sd.DEFAULT_CONSTANTS)
    assert fock.invariant_spectrum_drift(I1, rep24, idxs) < 1e-4
    I3 = quadratic_invariant(s2)
    d24 = fock.invariant_spectrum_drift(I3, rep24, idxs)
    d16 = fock.invariant_spectrum_drift(I3, rep16, idxs)
    assert d24 < 1e-4
    assert d16 / d24 >= 2.0


def test_guard_doubling_changes_little(seeds23):
    s2, _ = seeds23
    idxs = range(0, 257, 32)
    I3 = quadratic_invariant(s2)
    d_small = fock.invariant_spectrum_drift(I3, fock.build_rep(24, 3), idxs)
    d_big = fock.invariant_spectrum_drift(I3, fock.build_rep(24, 6), idxs)
    assert abs(d_small - d_big) < 1e-6


def test_tdse_pictures_agree(tdse_fid):
    assert tdse_fid >= 1 - 1e-5
