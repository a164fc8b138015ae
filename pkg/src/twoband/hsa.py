"""Rate theory from Hilbert-space averages.

Closed-form predictions (rate constant, linear-regime window, rate-equation
solution, equilibrium), the parameter-validity numbers, and Monte-Carlo
checks of the averages the theory relies on. hbar = 1 throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, asdict

import numpy as np
from numpy.typing import NDArray

from .model import Hamiltonian, ModelParams
from .propagator import DysonOperators, build_u1

__all__ = [
    "RateTheory",
    "RegimeReport",
    "HilbertAverageStats",
    "rate_constant",
    "regime_report",
    "rate_solution",
    "equilibrium",
    "peak_function",
    "u1_trace_prediction",
    "u1_traces",
    "hilbert_average_check",
    "sample_constrained_states",
    "short_step_prediction",
    "iterate_short_steps",
    "fit_decay_rate",
    "MUCH_LESS",
]

#: Threshold used for "much less than one" in the regime report.
MUCH_LESS = 0.25


@dataclass(frozen=True)
class RateTheory:
    """Rate constant and linear-regime window for one parameter set."""

    c: float
    n_upper: int
    n_lower: int
    tau1: float
    tau2: float

    @property
    def relaxation_rate(self) -> float:
        """Decay rate ``C (n_lower + n_upper)`` of the exponential solution."""
        return self.c * (self.n_upper + self.n_lower)

    @property
    def relaxation_time(self) -> float:
        rate = self.relaxation_rate
        return np.inf if rate == 0 else 1.0 / rate


def rate_constant(params: ModelParams) -> RateTheory:
    """``C = 2 pi lambda^2 / band_width`` together with ``tau1`` and ``tau2``."""
    width = params.band_width
    tau1 = 4.0 * np.pi / width
    return RateTheory(
        c=2.0 * np.pi * params.coupling_scale**2 / width,
        n_upper=params.n_upper,
        n_lower=params.n_lower,
        tau1=tau1,
        tau2=params.n_upper * tau1,
    )


@dataclass(frozen=True)
class RegimeReport:
    """Second-order terms ``C tau N`` at ``tau1`` and ``tau2`` for both bands.

    The two ``tau1`` numbers must be much less than one (truncation still
    valid once the linear regime starts), the two ``tau2`` numbers at least
    one (the linear regime lasts long enough to iterate).
    """

    cond_330: float
    cond_301: float
    cond_302: float
    cond_320: float
    tau1: float
    tau2: float
    c: float
    much_less: float = MUCH_LESS

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "cond_330": self.cond_330 <= self.much_less,
            "cond_301": self.cond_301 <= self.much_less,
            "cond_302": self.cond_302 >= 1.0,
            "cond_320": self.cond_320 >= 1.0,
        }

    @property
    def all_pass(self) -> bool:
        return all(self.flags.values())

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.flags
        d["all_pass"] = self.all_pass
        return d


def regime_report(params: ModelParams, much_less: float = MUCH_LESS) -> RegimeReport:
    theory = rate_constant(params)
    lam2 = params.coupling_scale**2
    big_lower = 8.0 * np.pi**2 * lam2 / params.spacing_lower**2
    big_upper = 8.0 * np.pi**2 * lam2 / params.spacing_upper**2
    return RegimeReport(
        cond_330=big_lower / params.n_lower,
        cond_301=big_upper / params.n_upper,
        cond_302=big_lower,
        cond_320=big_upper,
        tau1=theory.tau1,
        tau2=theory.tau2,
        c=theory.c,
        much_less=much_less,
    )


def equilibrium(n_upper: int, n_lower: int) -> tuple[float, float]:
    """Long-time ``(p_ex, p_gr)``: the band-size ratios."""
    if n_upper < 1 or n_lower < 1:
        raise ValueError("band sizes must be >= 1")
    total = n_upper + n_lower
    p_ex = n_lower / total
    return p_ex, 1.0 - p_ex


def rate_solution(theory: RateTheory, p_ex0: float, t):
    """Solution of the two-level rate equation from an arbitrary start.

    ``p_ex(t) = p_inf + (p_ex0 - p_inf) exp(-C (N0 + N1) t)``.
    Accepts scalar or array `t`; returns ``(p_ex, p_gr)`` of matching shape.
    """
    if not 0.0 <= p_ex0 <= 1.0:
        raise ValueError("p_ex0 must lie in [0, 1]")
    p_inf, _ = equilibrium(theory.n_upper, theory.n_lower)
    t = np.asarray(t, dtype=np.float64)
    p_ex = p_inf + (p_ex0 - p_inf) * np.exp(-theory.relaxation_rate * t)
    p_gr = 1.0 - p_ex
    if p_ex.ndim == 0:
        return float(p_ex), float(p_gr)
    return p_ex, p_gr


def peak_function(omega, tau: float):
    """``sin(omega tau / 2)**2 / omega**2``, equal to ``tau**2 / 4`` at zero."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    omega = np.asarray(omega, dtype=np.float64)
    # sin(x)/x form through sinc removes the singularity at omega = 0
    val = (0.5 * tau * np.sinc(omega * tau / (2.0 * np.pi))) ** 2
    return float(val) if val.ndim == 0 else val


def u1_trace_prediction(params: ModelParams, tau: float, warn: bool = True) -> float:
    """Linear-regime value of ``tr_ex{U1^2}`` (and of ``tr_gr{U1^2}``).

    ``2 pi lambda^2 N1 N0 tau / band_width``, i.e. ``C N1 N0 tau``. Only
    meaningful for ``tau1 < tau < tau2``; a warning is issued outside.
    """
    theory = rate_constant(params)
    if warn and not theory.tau1 < tau < theory.tau2:
        warnings.warn(
            f"tau={tau:g} outside the linear regime ({theory.tau1:g}, {theory.tau2:g})",
            RuntimeWarning, stacklevel=2,
        )
    return theory.c * params.n_upper * params.n_lower * tau


def u1_traces(h: Hamiltonian, tau: float, ops: DysonOperators | None = None
              ) -> tuple[float, float]:
    """``(tr_ex{U1^2}, tr_gr{U1^2})`` by direct summation of ``|U1|j>|^2``."""
    ops = build_u1(h, tau) if ops is None else ops
    u1 = ops.u1
    nu = h.n_upper
    col_norms = np.sum(np.abs(u1) ** 2, axis=0)
    return float(col_norms[nu:].sum()), float(col_norms[:nu].sum())


@dataclass(frozen=True)
class HilbertAverageStats:
    """Sample means of the three averaged quantities against their predictions.

    ``first`` is ``<gr|U1|ex>`` (complex, predicted 0); ``ex`` and ``gr`` are
    ``<ex|U1^2|ex>`` and ``<gr|U1^2|gr>``. Standard errors are
    ``std / sqrt(n_samples)``; the complex entries carry real and imaginary
    parts separately.
    """

    n_samples: int
    p_ex: float
    first_mean: complex
    first_sem: complex
    first_std: complex
    ex_mean: float
    ex_sem: float
    ex_std: float
    ex_pred: float
    gr_mean: float
    gr_sem: float
    gr_std: float
    gr_pred: float
    trace_ex: float
    trace_gr: float

    def z_scores(self) -> dict[str, float]:
        """Deviation from prediction in units of the standard error."""

        def z(dev, sem):
            if sem == 0:
                return 0.0 if dev == 0 else np.inf
            return abs(dev) / sem

        return {
            "first_re": z(self.first_mean.real, self.first_sem.real),
            "first_im": z(self.first_mean.imag, self.first_sem.imag),
            "ex": z(self.ex_mean - self.ex_pred, self.ex_sem),
            "gr": z(self.gr_mean - self.gr_pred, self.gr_sem),
        }

    def as_dict(self) -> dict:
        d = {}
        for k, v in asdict(self).items():
            if isinstance(v, complex):
                d[k] = {"re": v.real, "im": v.imag}
            else:
                d[k] = v
        d["z_scores"] = self.z_scores()
        return d


def _sector_sample(rng: np.random.Generator, n: int, norm_sq: float):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z * (np.sqrt(norm_sq) / np.linalg.norm(z))


def sample_constrained_states(n_upper: int, n_lower: int, p_ex: float, n_samples: int,
                              seed: int) -> tuple[NDArray, NDArray]:
    """Uniform samples of states with sector norms ``(p_ex, 1 - p_ex)``.

    Each sector is a normalized complex Gaussian vector scaled to its norm.
    Sample ``k`` uses its own RNG stream spawned from `seed`, so a run with
    fewer samples reproduces a prefix of a longer one.

    Returns
    -------
    ground : ndarray (n_samples, n_upper)
    excited : ndarray (n_samples, n_lower)
    """
    children = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF).spawn(n_samples)
    gr = np.empty((n_samples, n_upper), dtype=np.complex128)
    ex = np.empty((n_samples, n_lower), dtype=np.complex128)
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        gr[k] = _sector_sample(rng, n_upper, 1.0 - p_ex)
        ex[k] = _sector_sample(rng, n_lower, p_ex)
    return gr, ex


def hilbert_average_check(h: Hamiltonian, tau: float, p_ex_fixed: float,
                          n_samples: int, seed: int) -> HilbertAverageStats:
    """Monte-Carlo estimate of the Hilbert-space averages entering the rate step.

    States come from :func:`sample_constrained_states` with excitation
    probability `p_ex_fixed`.
    """
    if not 0.0 <= p_ex_fixed <= 1.0:
        raise ValueError("p_ex_fixed must lie in [0, 1]")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    ops = build_u1(h, tau)
    b = ops.block
    trace_ex, trace_gr = u1_traces(h, tau, ops)
    nu, nl = h.n_upper, h.n_lower

    gr, ex = sample_constrained_states(nu, nl, p_ex_fixed, n_samples, seed)
    bh_ex = ex @ b.conj()            # rows: U1|ex> in the ground sector
    b_gr = gr @ b.T                  # rows: U1|gr> in the excited sector
    first = np.einsum("ki,ki->k", gr.conj(), bh_ex)
    ex_q = np.sum(np.abs(bh_ex) ** 2, axis=1)
    gr_q = np.sum(np.abs(b_gr) ** 2, axis=1)

    root_n = np.sqrt(n_samples)
    first_std = complex(first.real.std(ddof=1), first.imag.std(ddof=1))
    return HilbertAverageStats(
        n_samples=n_samples,
        p_ex=p_ex_fixed,
        first_mean=complex(first.mean()),
        first_sem=first_std / root_n,
        first_std=first_std,
        ex_mean=float(ex_q.mean()),
        ex_sem=float(ex_q.std(ddof=1) / root_n),
        ex_std=float(ex_q.std(ddof=1)),
        ex_pred=p_ex_fixed / nl * trace_ex,
        gr_mean=float(gr_q.mean()),
        gr_sem=float(gr_q.std(ddof=1) / root_n),
        gr_std=float(gr_q.std(ddof=1)),
        gr_pred=(1.0 - p_ex_fixed) / nu * trace_gr,
        trace_ex=trace_ex,
        trace_gr=trace_gr,
    )


def short_step_prediction(theory: RateTheory, p_ex0: float, p_gr0: float, tau: float
                          ) -> tuple[float, float]:
    """One step of the discrete rate map.

    ``p_ex -> p_ex + C tau (N0 p_gr - N1 p_ex)``; the same increment leaves
    ``p_gr``, so the sum is preserved.
    """
    n1, n0 = theory.n_upper, theory.n_lower
    if theory.c * tau * max(n0, n1) > 1.0:
        warnings.warn(
            "C*tau*max(N0, N1) > 1: the step can leave [0, 1]",
            RuntimeWarning, stacklevel=2,
        )
    flow = theory.c * tau * (n0 * p_gr0 - n1 * p_ex0)
    return p_ex0 + flow, p_gr0 - flow


def iterate_short_steps(theory: RateTheory, p_ex0: float, tau: float, n_steps: int
                        ) -> NDArray[np.float64]:
    """``p_ex`` after ``0 .. n_steps`` applications of :func:`short_step_prediction`."""
    out = np.empty(n_steps + 1)
    p_ex, p_gr = p_ex0, 1.0 - p_ex0
    out[0] = p_ex
    for k in range(1, n_steps + 1):
        p_ex, p_gr = short_step_prediction(theory, p_ex, p_gr, tau)
        out[k] = p_ex
    return out


def fit_decay_rate(times, p_gr, p_gr_inf: float, t_fit: float | None = None) -> float:
    """Least-squares slope of ``log|p_gr - p_gr_inf|`` against time.

    Only samples with ``t <= t_fit`` and a non-zero offset from `p_gr_inf`
    on the initial side are used. Returns the decay rate (positive for decay),
    ``0.0`` if the curve never leaves equilibrium and ``nan`` if fewer than two
    usable points remain.
    """
    times = np.asarray(times, dtype=np.float64)
    offset = np.asarray(p_gr, dtype=np.float64) - p_gr_inf
    if np.allclose(offset, offset[0], rtol=0, atol=1e-12):
        return 0.0
    sign = np.sign(offset[0]) or 1.0
    mask = sign * offset > 0
    if t_fit is not None:
        mask &= times <= t_fit
    if mask.sum() < 2:
        return float("nan")
    slope = np.polyfit(times[mask], np.log(sign * offset[mask]), 1)[0]
    return float(-slope)
