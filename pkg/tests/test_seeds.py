import numpy as np
import pytest

from dysonforge import algebra as la, auxode, fock
from dysonforge import seeds as sd
from dysonforge.paths import ElementPath, ScalarPath
from dysonforge.profiles import DomainError, Drive, DrivingProfile, profile_a


def test_seed_operator_table():
    want = {
        1: ("K4", 1.0, "K3", 1.0),
        2: ("K3", 1.0, "K4", 1.0),
        3: ("K4", 1.0, "K1", 1.0j),
        4: ("K4", 1.0, "K2", 1.0j),
        5: ("K3", 1.0, "K1", 1.0j),
        6: ("K3", 1.0, "K2", 1.0j),
    }
    for i, (l1, c1, l2, c2) in want.items():
        q1, q2 = sd.SEED_OPERATORS[i]
        assert np.array_equal(q1.coeffs, (c1 * la.basis_element(l1)).coeffs)
        assert np.array_equal(q2.coeffs, (c2 * la.basis_element(l2)).coeffs)


def test_seed_spec_validation():
    with pytest.raises(ValueError):
        sd.SeedSpec(7)
    with pytest.raises(DomainError):
        sd.SeedSpec(2, 0.0)
    with pytest.raises(ValueError):
        sd.SeedSpec(3, 1.0, sign=2)


def test_f_pm_point_values():
    # at x = 0, lam = 0.4, k = 1 and no static drive the second seed gives
    # exactly -/+ 0.2
    prof = DrivingProfile(Drive.constant(0.0), Drive.constant(0.4))
    grid = np.linspace(0, 1, 16)
    x = ScalarPath(grid, np.zeros(16), np.full(16, -0.4 * np.sqrt(2.0)))
    fp, fm = sd.f_pm(sd.SeedSpec(2, 1.0), prof, x)
    assert np.max(np.abs(fp.values.real + 0.2)) < 1e-15
    assert np.max(np.abs(fm.values.real - 0.2)) < 1e-15


def test_f_pm_seed1_is_static_drive(prof_a, grid4):
    fp, fm = sd.f_pm(sd.SeedSpec(1), prof_a, None, grid4)
    assert np.all(fp.values.real == 1.0)
    assert np.array_equal(fp.values, fm.values)


def test_f_pm_sign_selector(prof_a, x_small):
    up = sd.f_pm(sd.SeedSpec(3, 1.0), prof_a, x_small)
    swapped = sd.f_pm(sd.SeedSpec(3, 1.0, sign=-1), prof_a, x_small)
    assert np.array_equal(up[0].values, swapped[1].values)
    assert np.array_equal(up[1].values, swapped[0].values)


def test_f_difference_identity(prof_a, x_small):
    xv = x_small.values.real
    lam = prof_a.lam_value(x_small.grid)
    want = -lam / (1.0 * (1.0 + xv ** 2))
    for i in (2, 3, 4):
        fp, fm = sd.f_pm(sd.SeedSpec(i, 1.0), prof_a, x_small)
        assert np.max(np.abs((fp.values - fm.values).real - want)) < 1e-10
    for i in (5, 6):
        fp, fm = sd.f_pm(sd.SeedSpec(i, 1.0), prof_a, x_small)
        assert np.max(np.abs((fp.values - fm.values).real + want)) < 1e-10


def test_build_seed_domain_checks(prof_a, grid4):
    x_bad = auxode.constrained_x2(prof_a, 1.0, 0.5, grid4)  # crosses zero
    with pytest.raises(DomainError, match="t ="):
        sd.build_seed(sd.SeedSpec(2, 1.0), prof_a, x_path=x_bad)
    with pytest.raises(DomainError):
        sd.build_seed(sd.SeedSpec(1, 1.0), prof_a, grid=grid4)
    with pytest.raises(DomainError):
        sd.build_seed(sd.SeedSpec(3, 1.0), prof_a)


def test_seed1_user_paths(prof_a, grid4):
    """Any constant first factor with a drive-integral second factor works."""
    g = auxode.cumulative_integral(lambda t: float(prof_a.lam_value(t)), grid4)
    gamma1 = ScalarPath(grid4, np.full(len(grid4), 0.35), np.zeros(len(grid4)))
    seed = sd.build_seed(sd.SeedSpec(1, 1.0), prof_a, gamma1=gamma1,
                         gamma2=(-1.0) * g + ScalarPath(
                             grid4, np.full(len(grid4), 0.2), np.zeros(len(grid4))))
    H = sd.hamiltonian_path(prof_a, grid4)
    h = sd.tdde_rhs(seed.group, H)
    assert h.max_hermiticity_residual() < 1e-9
    assert np.max(np.abs(h.coeffs.real - seed.h_path.coeffs.real)) < 1e-9


def test_seed1_preset_equals_explicit_paths(prof_a, grid4, seed1):
    g = auxode.cumulative_integral(lambda t: float(prof_a.lam_value(t)), grid4)
    zero = ScalarPath(grid4, np.zeros(len(grid4)), np.zeros(len(grid4)))
    explicit = sd.build_seed(sd.SeedSpec(1, 1.0), prof_a,
                             gamma1=zero, gamma2=-1.0 * g)
    pruned = la.simplify_group(explicit.group)
    assert len(pruned.factors) == len(seed1.group.factors) == 1
    assert np.max(np.abs(pruned.factors[0].scale.values
                         - seed1.group.factors[0].scale.values)) < 1e-14


def test_every_seed_yields_hermitian_image(prof_a, grid10, x_small, seed1,
                                           seeds23):
    H10 = sd.hamiltonian_path(prof_a, grid10)
    for i in (3, 4, 5, 6):
        seed = sd.build_seed(sd.SeedSpec(i, 1.0), prof_a, x_path=x_small)
        h = sd.tdde_rhs(seed.group, H10)
        assert h.max_hermiticity_residual() < 1e-6
        assert np.max(np.abs(h.coeffs.real - seed.h_path.coeffs.real)) < 1e-9
    s2, _ = seeds23
    H4 = sd.hamiltonian_path(prof_a, s2.grid)
    h2 = sd.tdde_rhs(s2.group, H4)
    assert h2.max_hermiticity_residual() < 1e-6
    assert np.max(np.abs(h2.coeffs.real - s2.h_path.coeffs.real)) < 1e-9
    h1 = sd.tdde_rhs(seed1.group, H4)
    assert h1.max_hermiticity_residual() < 1e-12
    assert np.max(np.abs(h1.coeffs.real - seed1.h_path.coeffs.real)) < 1e-12


def test_identity_map_returns_nonhermitian_driver(prof_a, grid4):
    H = sd.hamiltonian_path(prof_a, grid4)
    h = sd.tdde_rhs(la.identity_group(), H)
    assert np.array_equal(h.coeffs, H.coeffs)
    assert h.max_hermiticity_residual() > 0.1


def test_seed2_chi_parametrization_equivalence(prof_a, x_large, seeds23, rep12):
    """The inverse-cube-equation build of seed 2 matches the direct build."""
    s2, _ = seeds23
    grid = x_large.grid
    k2 = 1.0
    x0 = float(x_large.values.real[0])
    chi0 = np.sqrt(1 + x0 ** 2)
    chid0 = float(x_large.values.real[0] * x_large.derivs.real[0] / chi0)
    chi = auxode.solve_aux2(prof_a, -1.0 / k2, chi0, chid0, grid)
    other = sd.build_seed2_from_chi(k2, chi, prof_a, -1.0 / k2)
    for f_a, f_b in zip(s2.group.factors, other.factors):
        assert np.max(np.abs(f_a.scale.values - f_b.scale.values)) < 1e-8
    for idx in (0, len(grid) // 2, len(grid) - 1):
        blocks_a = fock.realize_shells(s2.group, rep12, idx)
        blocks_b = fock.realize_shells(other, rep12, idx)
        for q in blocks_a:
            num = np.max(np.abs(blocks_a[q] - blocks_b[q]))
            den = max(1.0, np.max(np.abs(blocks_a[q])))
            assert num / den < 1e-8


def test_gamma_dot_recovery_closed_form(prof_b):
    from scipy.integrate import solve_ivp
    grid = np.linspace(0, 10, 101)

    def rhs(t, y):
        lam = float(prof_b.lam_value(t))
        return [-lam * np.cosh(y[1]), lam * np.tanh(y[0]) * np.sinh(y[1])]

    sol = solve_ivp(rhs, (0, 10), [3.0, -0.8], t_eval=grid,
                    rtol=1e-12, atol=1e-12)
    q1, q2 = sd.SEED_OPERATORS[2]
    worst = 0.0
    for j, t in enumerate(grid):
        g1, g2 = sol.y[0][j], sol.y[1][j]
        lam = float(prof_b.lam_value(t))
        H = la.element({"K1": float(prof_b.a_value(t)),
                        "K2": float(prof_b.a_value(t)), "K3": 1j * lam})
        dots, res, rank = sd.solve_gamma_dot_by_hermiticity([q1, q2], [g1, g2], H)
        assert rank == 2
        want = np.array([-lam * np.cosh(g2), lam * np.tanh(g1) * np.sinh(g2)])
        worst = max(worst, float(np.max(np.abs(dots - want) / np.abs(want))))
    assert worst < 1e-6


def test_gamma_dot_zero_drive():
    H = la.element({"K1": 1.0, "K2": 1.0})
    q1, q2 = sd.SEED_OPERATORS[2]
    dots, res, rank = sd.solve_gamma_dot_by_hermiticity([q1, q2], [0.9, -0.3], H)
    assert np.max(np.abs(dots)) < 1e-14 and rank == 2


def test_gamma_dot_seed3_matches_chain_rule(prof_a, seeds34):
    s3, _ = seeds34
    H = sd.hamiltonian_path(prof_a, s3.grid)
    q1, q2 = sd.SEED_OPERATORS[3]
    worst = 0.0
    for idx in range(0, len(s3.grid), 64):
        gammas = [float(f.scale.values[idx].real) for f in s3.group.factors]
        dots, _, rank = sd.solve_gamma_dot_by_hermiticity([q1, q2], gammas,
                                                          H.at(idx))
        assert rank == 2
        stored = np.array([f.scale.derivs[idx].real for f in s3.group.factors])
        worst = max(worst, float(np.max(np.abs(dots - stored))))
    assert worst < 1e-6


def test_gamma_dot_rank_deficiency_flagged():
    H = la.element({"K1": 1.0, "K2": 1.0, "K3": 0.4j})
    K3 = la.basis_element("K3")
    dots, res, rank = sd.solve_gamma_dot_by_hermiticity([K3, K3], [0.4, 0.4], H)
    assert rank == 1


def test_gamma_dot_rejects_large_ansatz():
    K3 = la.basis_element("K3")
    with pytest.raises(ValueError):
        sd.solve_gamma_dot_by_hermiticity([K3] * 4, [0.1] * 4,
                                          la.element({"K1": 1.0}))


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

def test_inv1_constant_when_phase_frozen(seeds34):
    s3, _ = seeds34
    I = sd.invariant_inv1(s3, (1.0, 1.0, 0.0, 0.3))
    assert np.max(np.abs(I.coeffs - I.coeffs[0])) == 0.0


def test_inv1_identical_across_shared_seeds(seeds23):
    s2, s3 = seeds23
    a = sd.invariant_inv1(s2, sd.DEFAULT_CONSTANTS)
    b = sd.invariant_inv1(s3, sd.DEFAULT_CONSTANTS)
    assert a.sup_distance(b) < 1e-12


def test_inv1_rejects_seed1(seed1):
    with pytest.raises(DomainError):
        sd.invariant_inv1(seed1, sd.DEFAULT_CONSTANTS)


def test_inv3_fixed_point_coefficients():
    grid = np.linspace(0, 1, 16)
    z = np.zeros(16)
    one = np.ones(16)
    f = ScalarPath(grid, one, z, z)
    seed = sd.Seed(sd.SeedSpec(1), la.identity_group(), f, f, grid)
    rho = ScalarPath(grid, one, z)
    I = sd.invariant_inv3(seed, rho, rho)
    want = 2.0 * (la.basis_element("K+x") + la.basis_element("K+y"))
    for i in range(16):
        assert np.array_equal(I.coeffs[i], want.coeffs)


def test_inv3_seed1_sectors_match(seed1):
    rho_p = auxode.solve_rho_ep(seed1.f_plus, 2.0, 0.0)
    rho_m = auxode.solve_rho_ep(seed1.f_minus, 2.0, 0.0)
    assert np.max(np.abs(rho_p.values - rho_m.values)) < 1e-12
    I = sd.invariant_inv3(seed1, rho_p, rho_m)
    x_block = I.coeffs[:, [la.INDEX["K+x"], la.INDEX["K-x"], la.INDEX["K0x"]]]
    y_block = I.coeffs[:, [la.INDEX["K+y"], la.INDEX["K-y"], la.INDEX["K0y"]]]
    assert np.max(np.abs(x_block - y_block)) < 1e-12


def test_inv3_hermitian_by_construction(seeds23):
    s2, _ = seeds23
    I = sd.invariant_inv3(s2, auxode.solve_rho_ep(s2.f_plus, 2.0, 0.0),
                          auxode.solve_rho_ep(s2.f_minus, 2.0, 0.0))
    assert I.max_hermiticity_residual() == 0.0


def test_invariant_IH_frozen_case(prof_a, grid4):
    I = sd.invariant_IH(prof_a, grid4, (2.0, 0.7, 0.0, 1.0))
    want = la.element({"K1": 1.0, "K2": 1.0, "K3": 0.7})
    assert np.max(np.abs(I.coeffs - want.coeffs)) < 1e-14
