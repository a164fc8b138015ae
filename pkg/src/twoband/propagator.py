"""Pure-state propagation: exact unitary evolution and the truncated Dyson step."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .model import Hamiltonian, PureState
from .observables import ObservableRecord, observe

__all__ = [
    "Trajectory",
    "SpectralPropagator",
    "evolve_exact",
    "DysonOperators",
    "build_u1",
    "dyson_terms",
    "dyson_step",
]


@dataclass
class Trajectory:
    """Sample times with per-sample observables and (optionally thinned) states.

    ``states[k]`` belongs to ``times[state_index[k]]``.
    """

    times: NDArray[np.float64]
    records: list[ObservableRecord]
    energies: NDArray[np.float64]
    states: list[PureState] = field(default_factory=list)
    state_index: list[int] = field(default_factory=list)

    def column(self, name: str) -> NDArray[np.float64]:
        """One observable as an array over the time grid."""
        return np.array([getattr(r, name) for r in self.records])

    def __len__(self):
        return len(self.times)


class SpectralPropagator:
    """``exp(-i H t)`` from a single Hermitian eigendecomposition."""

    def __init__(self, h: Hamiltonian):
        mat = h.matrix()
        if not np.allclose(mat, mat.conj().T, rtol=0, atol=1e-12):
            raise np.linalg.LinAlgError("Hamiltonian is not Hermitian")
        self.n_upper = h.n_upper
        self.energies, self.vectors = np.linalg.eigh(mat)

    def coefficients(self, psi: PureState) -> NDArray[np.complex128]:
        return self.vectors.conj().T @ psi.amplitudes

    def evolve(self, psi: PureState, t: float) -> PureState:
        coeffs = self.coefficients(psi)
        return self._state(coeffs, t)

    def _state(self, coeffs, t) -> PureState:
        amps = self.vectors @ (np.exp(-1j * self.energies * t) * coeffs)
        return PureState(amps, self.n_upper)

    def energy(self, coeffs) -> float:
        return float(np.sum(self.energies * np.abs(coeffs) ** 2))


def evolve_exact(h: Hamiltonian, psi0: PureState, times, store_states: bool = True,
                 store_every: int = 1, propagator: SpectralPropagator | None = None
                 ) -> Trajectory:
    """Solve the Schroedinger equation on a time grid.

    Parameters
    ----------
    h : Hamiltonian
    psi0 : PureState
        State at ``t = 0``.
    times : array_like
        Strictly increasing, non-negative sample times.
    store_states : bool
        Keep the full state vector at sampled times. Observables are always
        recorded for every time.
    store_every : int
        Keep only every ``store_every``-th state.
    propagator : SpectralPropagator, optional
        Reuse an existing eigendecomposition of `h`.

    Returns
    -------
    Trajectory
    """
    times = np.asarray(times, dtype=np.float64)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1D array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    prop = propagator if propagator is not None else SpectralPropagator(h)
    coeffs = prop.coefficients(psi0)

    records, energies, states, index = [], [], [], []
    for k, t in enumerate(times):
        # the propagator is exact at t = 0 up to rounding; return psi0 itself
        psi = psi0 if t == 0 else prop._state(coeffs, t)
        records.append(observe(psi, t))
        amps = psi.amplitudes
        energies.append(_expectation(h, amps))
        if store_states and k % store_every == 0:
            states.append(psi)
            index.append(k)
    return Trajectory(times=times, records=records, energies=np.array(energies),
                      states=states, state_index=index)


def _expectation(h: Hamiltonian, amps) -> float:
    nu = h.n_upper
    gr, ex = amps[:nu], amps[nu:]
    e = np.sum(h.diag * np.abs(amps) ** 2)
    e += 2.0 * np.real(np.vdot(gr, h.coupling @ ex))
    return float(e)


@dataclass(frozen=True)
class DysonOperators:
    """First time-ordered integral of the interaction-picture coupling.

    ``u1`` is the full ``d x d`` Hermitian matrix with the same off-diagonal
    block structure as the coupling.
    """

    u1: NDArray[np.complex128]
    tau: float
    n_upper: int

    @property
    def block(self) -> NDArray[np.complex128]:
        """Excited-row / ground-column block, shape ``(n_lower, n_upper)``."""
        return self.u1[self.n_upper:, : self.n_upper]


def build_u1(h: Hamiltonian, tau: float) -> DysonOperators:
    """Integrate ``V_I(t) = exp(i H0 t) V exp(-i H0 t)`` over ``[0, tau]``.

    Element-wise ``V_ab (exp(i w tau) - 1) / (i w)`` with ``w = E_a - E_b``,
    evaluated as ``tau exp(i w tau / 2) sinc(w tau / 2 pi)`` so that the
    degenerate limit ``V_ab tau`` needs no special case.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    nu = h.n_upper
    e_gr, e_ex = h.diag[:nu], h.diag[nu:]
    # ground-row block: w = E_i - E_j
    w = e_gr[:, None] - e_ex[None, :]
    upper = h.coupling * (tau * np.exp(0.5j * w * tau) * np.sinc(w * tau / (2 * np.pi)))
    u1 = np.zeros((h.dim, h.dim), dtype=np.complex128)
    u1[:nu, nu:] = upper
    u1[nu:, :nu] = upper.conj().T
    return DysonOperators(u1=u1, tau=float(tau), n_upper=nu)


def dyson_terms(ops: DysonOperators, psi: PureState) -> dict:
    """Individual contributions to the second-order excited-state probability.

    Keys: ``zeroth`` (``<ex|ex>``), ``first`` (complex sum of the two
    first-order terms; its imaginary part is rounding only), ``gain``
    (``<gr|U1^2|gr>``) and ``loss`` (``<ex|U1^2|ex>``). The ``U2`` terms are
    already replaced by ``U1^2`` through probability conservation.
    """
    gr, ex = psi.ground, psi.excited
    b = ops.block
    b_gr = b @ gr                  # U1 |gr>, lives in the excited sector
    bh_ex = b.conj().T @ ex        # U1 |ex>, lives in the ground sector
    gr_u1_ex = np.vdot(gr, bh_ex)
    ex_u1_gr = np.vdot(ex, b_gr)
    return {
        "zeroth": float(np.vdot(ex, ex).real),
        "first": 1j * gr_u1_ex - 1j * ex_u1_gr,
        "gain": float(np.vdot(b_gr, b_gr).real),
        "loss": float(np.vdot(bh_ex, bh_ex).real),
    }


def dyson_step(h: Hamiltonian, psi: PureState, tau: float,
               ops: DysonOperators | None = None) -> tuple[float, float]:
    """Sector probabilities after one truncated second-order step of length `tau`.

    Returns ``(p_ex, p_gr)``; they sum to one by construction.
    """
    ops = build_u1(h, tau) if ops is None else ops
    terms = dyson_terms(ops, psi)
    delta = terms["first"].real + terms["gain"] - terms["loss"]
    p_ex0 = terms["zeroth"]
    p_gr0 = float(np.vdot(psi.ground, psi.ground).real)
    return p_ex0 + delta, p_gr0 - delta
