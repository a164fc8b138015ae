"""Two-band system/environment model on the resonant subspace.

A two-level "gas" couples to a "container" whose relevant spectrum is two
equally wide bands. Only the energy-conserving subspace is kept:

* ground sector: gas in ``|0>``, container in the upper band (``n_upper`` levels)
* excited sector: gas in ``|1>``, container in the lower band (``n_lower`` levels)

State vectors always list the ground sector first, then the excited sector.
Units: hbar = 1 and the gas gap = 1, so times are in units of hbar / gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "ModelParams",
    "Hamiltonian",
    "PureState",
    "build_hamiltonian",
    "sample_coupling",
    "initial_state",
    "empirical_coupling_sq",
    "default_params",
]

_BAND_RTOL = 1e-12

# Stream tags keep the coupling draw and the initial-state draw independent
# for one seed.
_COUPLING_STREAM = 0
_STATE_STREAM = 1


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, stream])


@dataclass(frozen=True)
class ModelParams:
    """Scalar knobs of the model.

    Parameters
    ----------
    n_upper, n_lower : int
        Number of container levels in the upper / lower band.
    spacing_upper, spacing_lower : float
        Level spacing inside each band. Both bands must have the same width,
        ``n_upper * spacing_upper == n_lower * spacing_lower``.
    coupling_scale : float
        RMS interaction matrix element lambda. Zero switches the coupling off.
    seed : int
        Seed for the coupling matrix and the initial container superposition.
    complex_coupling : bool
        Draw complex instead of real Gaussian coupling entries.
    """

    n_upper: int
    n_lower: int
    spacing_upper: float
    spacing_lower: float
    coupling_scale: float
    seed: int = 0
    complex_coupling: bool = False

    def __post_init__(self):
        if int(self.n_upper) != self.n_upper or int(self.n_lower) != self.n_lower:
            raise ValueError("band sizes must be integers")
        if self.n_upper < 1 or self.n_lower < 1:
            raise ValueError(
                f"band sizes must be >= 1, got n_upper={self.n_upper}, n_lower={self.n_lower}"
            )
        if self.spacing_upper <= 0 or self.spacing_lower <= 0:
            raise ValueError("level spacings must be positive")
        if self.coupling_scale < 0:
            raise ValueError("coupling_scale must be non-negative")
        w_up = self.n_upper * self.spacing_upper
        w_lo = self.n_lower * self.spacing_lower
        if abs(w_up - w_lo) > _BAND_RTOL * max(abs(w_up), abs(w_lo)):
            raise ValueError(
                f"band widths differ: n_upper*spacing_upper={w_up!r}, "
                f"n_lower*spacing_lower={w_lo!r}"
            )

    @property
    def band_width(self) -> float:
        """Common width of both bands."""
        return self.n_upper * self.spacing_upper

    @property
    def dim(self) -> int:
        return self.n_upper + self.n_lower


def default_params(n_upper: int = 800, seed: int = 0, spacing_upper: float = 0.005,
                   **overrides) -> ModelParams:
    """Reference parameter set for the container-size sweep.

    ``n_lower = n_upper / 2``, ``spacing_lower = 2 * spacing_upper`` and
    ``coupling_scale = spacing_upper``; spacings stay fixed as ``n_upper``
    changes so the rate-equation curve is identical for every size.
    """
    if n_upper % 2:
        raise ValueError("n_upper must be even for the default parameterization")
    kw = dict(
        n_upper=n_upper,
        n_lower=n_upper // 2,
        spacing_upper=spacing_upper,
        spacing_lower=2.0 * spacing_upper,
        coupling_scale=spacing_upper,
        seed=seed,
    )
    kw.update(overrides)
    return ModelParams(**kw)


@dataclass(frozen=True)
class Hamiltonian:
    """Free ladder energies plus the off-diagonal coupling block.

    ``coupling[i, j]`` connects ground-sector level ``i`` (upper band) to
    excited-sector level ``j`` (lower band).
    """

    diag: NDArray[np.float64]
    coupling: NDArray
    n_upper: int
    n_lower: int

    @property
    def dim(self) -> int:
        return self.n_upper + self.n_lower

    def free(self) -> NDArray[np.float64]:
        return np.diag(self.diag)

    def matrix(self) -> NDArray:
        """Dense full Hamiltonian (ground sector first)."""
        nu = self.n_upper
        dtype = np.result_type(self.coupling.dtype, np.asarray(self.diag).dtype, np.float64)
        h = np.zeros((self.dim, self.dim), dtype=dtype)
        h[np.diag_indices(self.dim)] = self.diag
        h[:nu, nu:] = self.coupling
        h[nu:, :nu] = self.coupling.conj().T
        return h


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector on the resonant subspace."""

    amplitudes: NDArray[np.complex128]
    n_upper: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size <= self.n_upper:
            raise ValueError("amplitudes must be 1D with a non-empty excited sector")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm={np.linalg.norm(amps)!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def ground(self) -> NDArray[np.complex128]:
        """Ground-sector slice, gas ``|0>`` times upper-band levels."""
        return self.amplitudes[: self.n_upper]

    @property
    def excited(self) -> NDArray[np.complex128]:
        """Excited-sector slice, gas ``|1>`` times lower-band levels."""
        return self.amplitudes[self.n_upper :]

    @property
    def n_lower(self) -> int:
        return self.amplitudes.size - self.n_upper

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_sectors(cls, ground, excited) -> "PureState":
        ground = np.asarray(ground, dtype=np.complex128)
        excited = np.asarray(excited, dtype=np.complex128)
        return cls(np.concatenate([ground, excited]), ground.size)


def empirical_coupling_sq(coupling: NDArray) -> float:
    """Mean squared interaction matrix element over all ground/excited pairs."""
    return float(np.mean(np.abs(coupling) ** 2))


def sample_coupling(n_upper: int, n_lower: int, coupling_scale: float, seed: int,
                    complex_entries: bool = False) -> NDArray:
    """Random Gaussian coupling block rescaled to an exact RMS element.

    Entries are i.i.d. zero-mean Gaussians (real by default). The matrix is
    then scaled so that ``mean(|V_ij|**2) == coupling_scale**2`` holds for this
    draw, not only in expectation.

    Returns
    -------
    ndarray, shape (n_upper, n_lower)
        float64, or complex128 if `complex_entries`.
    """
    if n_upper < 1 or n_lower < 1:
        raise ValueError("coupling block dimensions must be >= 1")
    if coupling_scale < 0:
        raise ValueError("coupling_scale must be non-negative")
    rng = _rng(seed, _COUPLING_STREAM)
    v = rng.standard_normal((n_upper, n_lower))
    if complex_entries:
        v = v + 1j * rng.standard_normal((n_upper, n_lower))
    if coupling_scale == 0:
        return np.zeros_like(v)
    return v * (coupling_scale / np.sqrt(empirical_coupling_sq(v)))


def build_hamiltonian(params: ModelParams) -> Hamiltonian:
    """Assemble ladder energies and the random coupling block for `params`."""
    diag = np.concatenate([
        np.arange(params.n_upper) * params.spacing_upper,
        np.arange(params.n_lower) * params.spacing_lower,
    ])
    coupling = sample_coupling(params.n_upper, params.n_lower, params.coupling_scale,
                               params.seed, complex_entries=params.complex_coupling)
    return Hamiltonian(diag=diag, coupling=coupling,
                       n_upper=params.n_upper, n_lower=params.n_lower)


def initial_state(params: ModelParams, seed: int | None = None) -> PureState:
    """Gas in its ground state, container in a random upper-band superposition.

    The ground-sector amplitudes are standard complex Gaussians, normalized,
    i.e. Haar-uniform on that sector's unit sphere. The excited sector is empty,
    so the state is a product state with the gas.
    """
    seed = params.seed if seed is None else seed
    rng = _rng(seed, _STATE_STREAM)
    z = rng.standard_normal(params.n_upper) + 1j * rng.standard_normal(params.n_upper)
    z /= np.linalg.norm(z)
    return PureState.from_sectors(z, np.zeros(params.n_lower, dtype=np.complex128))
