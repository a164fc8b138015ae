"""Reduced states, purities and the correlation coefficient eta.

The resonant-subspace state embeds into the full ``2 x (n_upper + n_lower)``
product space of gas and container with zeros on the off-resonant sectors.
Reshaped that way it is a ``2 x D`` matrix ``M`` with ``M[g, c]`` the
amplitude of ``|g> (x) |c>``; container levels are ordered upper band first.
All quantities below are contractions of ``M``; the full density matrix is
never formed except in :func:`correlation_part_direct`, which exists as a
brute-force cross-check for small dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from numpy.typing import NDArray

from .model import PureState

__all__ = [
    "ObservableRecord",
    "sector_probabilities",
    "embed",
    "reduced_states",
    "purities",
    "correlation_measures",
    "product_overlap",
    "correlation_part_direct",
    "observe",
]


@dataclass(frozen=True)
class ObservableRecord:
    """One row of trajectory output."""

    t: float
    p_ex: float
    p_gr: float
    purity_s: float
    purity_r: float
    p_c: float
    eta: float
    norm_err: float

    def as_dict(self) -> dict:
        return asdict(self)


def _amplitudes(psi) -> tuple[NDArray, int]:
    if isinstance(psi, PureState):
        return psi.amplitudes, psi.n_upper
    raise TypeError(f"expected PureState, got {type(psi).__name__}")


def sector_probabilities(psi: PureState) -> tuple[float, float]:
    """Return ``(p_ex, p_gr)``, the squared norms of the two sectors."""
    p_ex = float(np.vdot(psi.excited, psi.excited).real)
    p_gr = float(np.vdot(psi.ground, psi.ground).real)
    return p_ex, p_gr


def embed(psi: PureState) -> NDArray[np.complex128]:
    """The state as a ``(2, n_upper + n_lower)`` gas-by-container matrix."""
    amps, nu = _amplitudes(psi)
    m = np.zeros((2, amps.size), dtype=np.complex128)
    m[0, :nu] = amps[:nu]
    m[1, nu:] = amps[nu:]
    return m


def reduced_states(psi: PureState) -> tuple[NDArray, NDArray]:
    """Partial traces of ``|psi><psi|``.

    Returns
    -------
    rho_s : ndarray (2, 2)
        Gas state, basis ``(|0>, |1>)``; equals ``diag(p_gr, p_ex)``.
    rho_r : ndarray (D, D)
        Container state, upper-band block first.
    """
    m = embed(psi)
    rho_s = m @ m.conj().T
    rho_r = m.T @ m.conj()
    return rho_s, rho_r


def purities(psi: PureState) -> tuple[float, float]:
    """``(P_s, P_r)`` with ``P_x = sqrt(Tr rho_x**2)``.

    ``Tr rho_r**2 = Tr (M^T M*)^2 = Tr (M M^dag)^2`` so both come from the
    2x2 Gram matrix; they coincide for a pure global state.
    """
    m = embed(psi)
    gram = m @ m.conj().T
    p_s = np.sqrt(np.sum(np.abs(gram) ** 2))
    # Tr (M^T M*)^2 = Tr (M* M^T)^2 by cyclicity
    p_r = np.sqrt(np.real(np.trace(gram.T @ gram.T)))
    return float(p_s), float(p_r)


def _overlap_with_product(m: NDArray, rho_s: NDArray) -> float:
    # rows of rho_r_m are rho_r applied to each gas component M[h]
    rho_r_m = (m.conj() @ m.T).T @ m
    return float(np.real(np.einsum("gc,gh,hc->", m.conj(), rho_s, rho_r_m)))


def product_overlap(psi: PureState) -> float:
    """``Tr{rho (rho_s (x) rho_r)} = <psi| rho_s (x) rho_r |psi>``."""
    m = embed(psi)
    return _overlap_with_product(m, m @ m.conj().T)


def correlation_measures(psi: PureState) -> tuple[float, float, float]:
    """Size of the correlation part and the correlations/product ratio.

    Returns
    -------
    p_c : float
        ``sqrt(P**2 - 2 Tr{rho rho_s rho_r} + P_s**2 P_r**2)`` with ``P = 1``.
    eta : float
        ``p_c / (P_s P_r)``.
    bound : float
        ``max(0, 1 / (P_s P_r) - 1)``, the purity lower bound on `eta`.
    """
    m = embed(psi)
    rho_s = m @ m.conj().T
    p_s, p_r = purities(psi)
    p_full = np.vdot(m, m).real
    cross = _overlap_with_product(m, rho_s)
    p_c_sq = p_full**2 - 2.0 * cross + (p_s * p_r) ** 2
    p_c = float(np.sqrt(max(p_c_sq, 0.0)))
    prod = p_s * p_r
    return p_c, p_c / prod, max(0.0, p_full / prod - 1.0)


def correlation_part_direct(psi: PureState) -> float:
    """Frobenius norm of ``rho - rho_s (x) rho_r`` from dense matrices.

    Cost grows as ``D**4``; intended for checking small instances only.
    """
    m = embed(psi)
    vec = m.reshape(-1)
    rho = np.outer(vec, vec.conj())
    rho_s, rho_r = reduced_states(psi)
    return float(np.linalg.norm(rho - np.kron(rho_s, rho_r)))


def observe(psi: PureState, t: float = 0.0) -> ObservableRecord:
    """Compute every per-sample observable for `psi` at time `t`."""
    p_ex, p_gr = sector_probabilities(psi)
    p_s, p_r = purities(psi)
    p_c, eta, _ = correlation_measures(psi)
    return ObservableRecord(
        t=float(t), p_ex=p_ex, p_gr=p_gr, purity_s=p_s, purity_r=p_r,
        p_c=p_c, eta=eta, norm_err=abs(psi.norm - 1.0),
    )
