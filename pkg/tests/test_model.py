import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twoband.model import (
    ModelParams, PureState, build_hamiltonian, default_params, empirical_coupling_sq,
    initial_state, sample_coupling,
)
from twoband.observables import correlation_measures, sector_probabilities


def test_ladder_energies():
    p = ModelParams(n_upper=2, n_lower=1, spacing_upper=0.5, spacing_lower=1.0,
                    coupling_scale=0.1)
    h = build_hamiltonian(p)
    np.testing.assert_array_equal(h.diag, [0.0, 0.5, 0.0])
    assert h.dim == 3
    assert h.coupling.shape == (2, 1)


def test_zero_coupling_gives_free_hamiltonian():
    p = default_params(20, coupling_scale=0.0)
    h = build_hamiltonian(p)
    np.testing.assert_array_equal(h.matrix(), h.free())


def test_reference_size():
    p = default_params(800)
    assert (p.n_upper, p.n_lower) == (800, 400)
    assert build_hamiltonian(p).dim == 1200
    assert p.n_upper * p.spacing_upper == pytest.approx(p.n_lower * p.spacing_lower, rel=1e-12)
    assert p.band_width == pytest.approx(4.0)


@pytest.mark.parametrize("kw", [
    dict(n_upper=0, n_lower=1, spacing_upper=1.0, spacing_lower=1.0),
    dict(n_upper=1, n_lower=0, spacing_upper=1.0, spacing_lower=1.0),
    dict(n_upper=4, n_lower=2, spacing_upper=0.1, spacing_lower=0.1),
])
def test_invalid_params_rejected(kw):
    with pytest.raises(ValueError):
        ModelParams(coupling_scale=0.1, **kw)


def test_negative_coupling_rejected():
    with pytest.raises(ValueError):
        default_params(10, coupling_scale=-1.0)


def test_coupling_deterministic():
    a = sample_coupling(30, 15, 0.2, seed=7)
    b = sample_coupling(30, 15, 0.2, seed=7)
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, sample_coupling(30, 15, 0.2, seed=8))


def test_coupling_trace_convention():
    # independent route: full off-diagonal matrix, trace of its square
    v = sample_coupling(50, 25, 1.0, seed=3)
    full = np.zeros((75, 75))
    full[:50, 50:] = v
    full[50:, :50] = v.T
    assert np.trace(full @ full) / (2 * 50 * 25) == pytest.approx(1.0, rel=1e-12)


def test_complex_coupling_option():
    v = sample_coupling(10, 5, 0.3, seed=1, complex_entries=True)
    assert np.iscomplexobj(v) and np.any(v.imag != 0)
    assert empirical_coupling_sq(v) == pytest.approx(0.09, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(n_upper=st.integers(1, 40), n_lower=st.integers(1, 40),
       lam=st.floats(1e-4, 10.0), seed=st.integers(0, 2**63 - 1),
       cplx=st.booleans())
def test_coupling_rms_exact(n_upper, n_lower, lam, seed, cplx):
    v = sample_coupling(n_upper, n_lower, lam, seed, complex_entries=cplx)
    assert empirical_coupling_sq(v) == pytest.approx(lam**2, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(half=st.integers(1, 40), seed=st.integers(0, 2**32), cplx=st.booleans())
def test_hamiltonian_structure(half, seed, cplx):
    p = default_params(2 * half, seed=seed, complex_coupling=cplx)
    h = build_hamiltonian(p)
    mat = h.matrix()
    assert np.max(np.abs(mat - mat.conj().T)) < 1e-14
    inter = mat - h.free()
    nu = p.n_upper
    assert np.all(inter[:nu, :nu] == 0)
    assert np.all(inter[nu:, nu:] == 0)


@settings(max_examples=25, deadline=None)
@given(half=st.integers(1, 60), seed=st.integers(0, 2**63 - 1))
def test_initial_state_is_ground_product(half, seed):
    p = default_params(2 * half, seed=seed)
    psi = initial_state(p)
    assert abs(psi.norm - 1.0) < 1e-12
    assert sector_probabilities(psi) == (0.0, pytest.approx(1.0, abs=1e-12))
    p_c, eta, _ = correlation_measures(psi)
    assert eta == pytest.approx(0.0, abs=1e-7)


def test_initial_state_seed_argument():
    p = default_params(20, seed=1)
    assert np.array_equal(initial_state(p).amplitudes, initial_state(p, 1).amplitudes)
    assert not np.array_equal(initial_state(p, 1).amplitudes, initial_state(p, 2).amplitudes)


def test_purestate_rejects_unnormalized():
    with pytest.raises(ValueError):
        PureState(np.ones(4), 2)
