import numpy as np
import pytest

from dysonforge import auxode, fock, forge, seeds as sd
from dysonforge.profiles import profile_a, profile_b


@pytest.fixture(scope="session")
def prof_a():
    return profile_a()


@pytest.fixture(scope="session")
def prof_b():
    return profile_b()


@pytest.fixture(scope="session")
def grid10():
    return np.linspace(0.0, 10.0, 641)


@pytest.fixture(scope="session")
def x_small(prof_a, grid10):
    """Constrained auxiliary path with k = 1 from x0 = 0.6."""
    return auxode.constrained_x2(prof_a, 1.0, 0.6, grid10)


@pytest.fixture(scope="session")
def seeds34(prof_a, x_small):
    s3 = sd.build_seed(sd.SeedSpec(3, 1.0), prof_a, x_path=x_small)
    s4 = sd.build_seed(sd.SeedSpec(4, 1.0), prof_a, x_path=x_small)
    return s3, s4


@pytest.fixture(scope="session")
def pair34(seeds34, prof_a):
    return forge.make_pair(seeds34[0], seeds34[1], prof_a)


@pytest.fixture(scope="session")
def ledger34(pair34, seeds34):
    inv3 = sd.invariant_inv1(seeds34[0], sd.DEFAULT_CONSTANTS)
    inv4 = sd.invariant_inv1(seeds34[1], sd.DEFAULT_CONSTANTS)
    return forge.iterate(pair34, 5, inv3, inv4, 1e-6)


@pytest.fixture(scope="session")
def grid4():
    return np.linspace(0.0, 4.0, 513)


@pytest.fixture(scope="session")
def x_large(prof_a, grid4):
    """Constrained path staying positive on [0, 4], for the arccosh branch."""
    return auxode.constrained_x2(prof_a, 1.0, 12.0, grid4)


@pytest.fixture(scope="session")
def seeds23(prof_a, x_large):
    s2 = sd.build_seed(sd.SeedSpec(2, 1.0), prof_a, x_path=x_large)
    s3 = sd.build_seed(sd.SeedSpec(3, 1.0), prof_a, x_path=x_large)
    return s2, s3


@pytest.fixture(scope="session")
def pair23(seeds23, prof_a):
    return forge.make_pair(seeds23[0], seeds23[1], prof_a)


@pytest.fixture(scope="session")
def aligned_c4():
    """Phase constant that locks the rotating invariant to the shared ray."""
    x0 = 12.0
    return float(np.arctan2(np.sqrt(1.0 + 1.0 * (1.0 + x0 ** 2)), x0))


@pytest.fixture(scope="session")
def invariants23(seeds23, aligned_c4):
    c = (1.0, 1.0, 0.5, aligned_c4)
    return (sd.invariant_inv1(seeds23[0], c), sd.invariant_inv1(seeds23[1], c))


@pytest.fixture(scope="session")
def ledger23(pair23, invariants23):
    return forge.iterate(pair23, 3, invariants23[0], invariants23[1], 1e-6)


@pytest.fixture(scope="session")
def seed1(prof_a, grid4):
    return sd.build_seed(sd.SeedSpec(1, 1.0), prof_a, grid=grid4,
                         eta1_preset="lambda-integral")


def quadratic_invariant(seed, rho0=2.0):
    rp = auxode.solve_rho_ep(seed.f_plus, rho0, 0.0)
    rm = auxode.solve_rho_ep(seed.f_minus, rho0, 0.0)
    return sd.invariant_inv3(seed, rp, rm)


@pytest.fixture(scope="session")
def rep24():
    return fock.build_rep(24, 6)


@pytest.fixture(scope="session")
def tdse_fid(prof_a, rep24, seeds34):
    """Phase-free overlap of the two evolved pictures on t in [0, 2]."""
    import dysonforge.algebra as la
    from scipy.interpolate import CubicSpline
    _, s4 = seeds34
    grid = s4.grid
    G1 = fock.element_matrix(rep24, la.element({"K1": 1}))
    G2 = fock.element_matrix(rep24, la.element({"K2": 1}))
    G3 = fock.element_matrix(rep24, la.element({"K3": 1}))

    def H_of(t):
        return float(prof_a.a_value(t)) * (G1 + G2) \
            + 1j * float(prof_a.lam_value(t)) * G3

    fp = CubicSpline(grid, s4.f_plus.values.real)
    fm = CubicSpline(grid, s4.f_minus.values.real)

    def h_of(t):
        return float(fp(t)) * G1 + float(fm(t)) * G2

    psi0 = fock.coherent_like_state(rep24)
    return fock.tdse_fidelity(H_of, h_of, s4.group, rep24, grid,
                              [0, 32, 64, 96, 128], psi0)


@pytest.fixture(scope="session")
def rep16():
    return fock.build_rep(16, 4)


@pytest.fixture(scope="session")
def rep12():
    return fock.build_rep(12, 3)
