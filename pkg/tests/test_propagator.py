import numpy as np
import pytest
from scipy.integrate import quad_vec

from twoband.model import (
    Hamiltonian, ModelParams, PureState, build_hamiltonian, default_params, initial_state,
)
from twoband.observables import sector_probabilities
from twoband.propagator import (
    SpectralPropagator, build_u1, dyson_step, dyson_terms, evolve_exact,
)

from conftest import random_state


@pytest.fixture(scope="module")
def small():
    p = ModelParams(40, 20, 0.05, 0.1, 0.05, seed=3)
    return p, build_hamiltonian(p)


def test_zero_coupling_freezes_populations(rng):
    p = default_params(30, coupling_scale=0.0)
    h = build_hamiltonian(p)
    psi = random_state(rng, 30, 15)
    traj = evolve_exact(h, psi, np.linspace(0, 50, 20))
    p_ex0, _ = sector_probabilities(psi)
    np.testing.assert_allclose(traj.column("p_ex"), p_ex0, atol=1e-12)


def test_t0_returns_initial_state(small, rng):
    _, h = small
    psi = random_state(rng, 40, 20)
    traj = evolve_exact(h, psi, [0.0, 1.0])
    assert traj.states[0].amplitudes.tobytes() == psi.amplitudes.tobytes()


def test_rabi_two_level():
    v = 0.37
    p = ModelParams(1, 1, 1.0, 1.0, v, seed=5)
    h = build_hamiltonian(p)
    assert abs(h.coupling[0, 0]) == pytest.approx(v, rel=1e-12)
    t = np.linspace(0, 20, 101)
    traj = evolve_exact(h, PureState(np.array([1.0, 0.0]), 1), t)
    np.testing.assert_allclose(traj.column("p_ex"), np.sin(v * t) ** 2, atol=1e-12)


def test_conservation_laws(small, rng):
    _, h = small
    psi = random_state(rng, 40, 20)
    traj = evolve_exact(h, psi, np.linspace(0, 200, 300), store_every=50)
    assert traj.column("norm_err").max() < 1e-9
    e = traj.energies
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-9
    assert np.max(np.abs(traj.column("p_ex") + traj.column("p_gr") - 1)) < 1e-12
    assert traj.state_index == [0, 50, 100, 150, 200, 250]


def test_times_must_increase(small, rng):
    _, h = small
    with pytest.raises(ValueError):
        evolve_exact(h, random_state(rng, 40, 20), [0.0, 2.0, 1.0])


def test_non_hermitian_input_rejected():
    h = Hamiltonian(diag=np.array([0.0, 1j]), coupling=np.array([[0.1]]),
                    n_upper=1, n_lower=1)
    with pytest.raises(np.linalg.LinAlgError):
        SpectralPropagator(h)


def test_energy_expectation_matches_dense(small, rng):
    _, h = small
    psi = random_state(rng, 40, 20)
    traj = evolve_exact(h, psi, [0.0])
    dense = np.vdot(psi.amplitudes, h.matrix() @ psi.amplitudes).real
    assert traj.energies[0] == pytest.approx(dense, rel=1e-12)


# --- first Dyson integral -------------------------------------------------

def test_u1_zero_tau(small):
    _, h = small
    assert np.all(build_u1(h, 0.0).u1 == 0)


def test_u1_degenerate_pair():
    p = ModelParams(1, 1, 1.0, 1.0, 0.2, seed=0)
    h = build_hamiltonian(p)
    ops = build_u1(h, 3.0)
    assert ops.u1[0, 1] == pytest.approx(h.coupling[0, 0] * 3.0, rel=1e-15)


def test_u1_against_quadrature(small):
    # oracle: integrate exp(i H0 t) V exp(-i H0 t) numerically
    _, h = small
    tau = 7.3
    e = h.diag
    v = h.matrix() - h.free()

    def v_int(t):
        ph = np.exp(1j * e * t)
        return ph[:, None] * v * ph.conj()[None, :]

    ref, _ = quad_vec(v_int, 0.0, tau, epsabs=1e-13, epsrel=1e-12)
    np.testing.assert_allclose(build_u1(h, tau).u1, ref, atol=1e-11)


def test_u1_hermitian_block_structure(small):
    _, h = small
    u1 = build_u1(h, 4.0).u1
    nu = h.n_upper
    assert np.max(np.abs(u1 - u1.conj().T)) < 1e-15
    assert np.all(u1[:nu, :nu] == 0) and np.all(u1[nu:, nu:] == 0)


def test_u1_column_norms_golden_rule_form(small):
    _, h = small
    tau = 11.0
    u1 = build_u1(h, tau).u1
    nu = h.n_upper
    e_gr, e_ex = h.diag[:nu], h.diag[nu:]
    for j in range(h.n_lower):
        w = e_ex[j] - e_gr
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.where(w == 0, tau**2, 4 * np.sin(0.5 * w * tau) ** 2 / w**2)
        expected = np.sum(np.abs(h.coupling[:, j]) ** 2 * weight)
        assert np.linalg.norm(u1[:, nu + j]) ** 2 == pytest.approx(expected, rel=1e-10)


# --- truncated Dyson step -------------------------------------------------

def test_dyson_step_tau_zero(small, rng):
    _, h = small
    psi = random_state(rng, 40, 20)
    assert dyson_step(h, psi, 0.0) == pytest.approx(sector_probabilities(psi), abs=1e-15)


@pytest.mark.parametrize("tau", [0.01, 0.5, 3.0, 40.0])
def test_dyson_step_conserves_probability(small, rng, tau):
    _, h = small
    psi = random_state(rng, 40, 20)
    p_ex, p_gr = dyson_step(h, psi, tau)
    assert abs(p_ex + p_gr - 1.0) < 1e-14


def test_first_order_terms_are_real(small, rng):
    _, h = small
    for _ in range(10):
        terms = dyson_terms(build_u1(h, 2.5), random_state(rng, 40, 20))
        assert abs(terms["first"].imag) < 1e-14


def test_dyson_local_error_order(small, rng):
    _, h = small
    psi = random_state(rng, 40, 20)
    prop = SpectralPropagator(h)
    taus = 0.4 * 2.0 ** -np.arange(8)
    errs = []
    for tau in taus:
        p_ex, _ = dyson_step(h, psi, tau)
        exact, _ = sector_probabilities(prop.evolve(psi, tau))
        errs.append(abs(p_ex - exact))
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert 2.5 <= slope <= 3.5


def test_dyson_step_from_initial_state_gains_only():
    # empty excited sector: no first-order or loss term
    p = default_params(40, seed=2)
    h = build_hamiltonian(p)
    psi = initial_state(p)
    terms = dyson_terms(build_u1(h, 5.0), psi)
    assert terms["first"] == 0 and terms["loss"] == 0
    assert dyson_step(h, psi, 5.0)[0] == pytest.approx(terms["gain"])
