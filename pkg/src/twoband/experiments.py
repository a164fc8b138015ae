"""Experiment orchestration: single relaxation runs, size sweeps, regime and
Hilbert-average checks, with deterministic seeding and CSV/JSON output.

Per-run seeds are ``master ^ splitmix64(i)`` for run index ``i``; see
:func:`derive_seed`.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict, replace, fields
from pathlib import Path

import numpy as np

from . import hsa
from .model import ModelParams, build_hamiltonian, initial_state
from .observables import sector_probabilities
from .propagator import Trajectory, evolve_exact

__all__ = [
    "CSV_COLUMNS",
    "RunConfig",
    "RunResult",
    "derive_seed",
    "time_grid",
    "simulate",
    "summarize",
    "write_csv",
    "run_single",
    "run_sweep",
    "run_regime",
    "run_hsa_check",
    "DEFAULT_SIZES",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("t", "p_ex", "p_gr", "p_ex_theory", "p_gr_theory",
               "purity_s", "purity_r", "p_c", "eta", "norm_err")
DEFAULT_SIZES = (50, 100, 200, 400, 800)
KINDS = ("run", "sweep", "regime", "hsa-check")

_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, index: int) -> int:
    """Seed of run `index`: ``master XOR splitmix64(index)`` (64-bit)."""
    return (int(master) & _MASK64) ^ _splitmix64(index)


@dataclass
class RunConfig:
    """Everything needed to reproduce one experiment.

    Unset ``n_lower`` / ``spacing_lower`` / ``coupling`` are filled from the
    reference parameterization: ``n_lower = n_upper / 2``, equal band widths
    and ``coupling = spacing_upper``. ``t_max = None`` means five relaxation
    times of the rate theory.
    """

    kind: str = "run"
    n_upper: int = 800
    n_lower: int | None = None
    spacing_upper: float = 0.005
    spacing_lower: float | None = None
    coupling: float | None = None
    seed: int = 0
    n_seeds: int = 1
    t_max: float | None = None
    n_samples: int = 500
    out: str = "output"
    sizes: tuple[int, ...] = DEFAULT_SIZES
    complex_coupling: bool = False
    tau: float | None = None
    p_ex: float = 0.5
    hsa_samples: int = 1000
    workers: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.n_samples < 2:
            raise ValueError("n_samples must be >= 2")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if self.t_max is not None and self.t_max <= 0:
            raise ValueError("t_max must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.sizes = tuple(int(s) for s in self.sizes)
        if not self.sizes:
            raise ValueError("size list must be non-empty")
        # resolve and validate model parameters eagerly
        self.model_params()

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        return d

    def _lower_ratio(self) -> float:
        # spacing_lower / spacing_upper, equal to n_upper / n_lower
        if self.spacing_lower is not None:
            return self.spacing_lower / self.spacing_upper
        if self.n_lower is not None:
            return self.n_upper / self.n_lower
        return 2.0

    def model_params(self, n_upper: int | None = None, seed: int | None = None) -> ModelParams:
        """Model parameters, optionally at another upper-band size.

        For other sizes the spacings are held fixed, so ``n_lower`` follows
        from the band-width constraint and must come out integral.
        """
        nu = self.n_upper if n_upper is None else int(n_upper)
        if nu < 1 or (self.n_lower is not None and self.n_lower < 1):
            raise ValueError("band sizes must be >= 1")
        if n_upper is None and self.n_lower is not None:
            nl = self.n_lower
        else:
            nl_f = nu / self._lower_ratio()
            nl = int(round(nl_f))
            if abs(nl - nl_f) > 1e-9 * max(1.0, nl_f):
                raise ValueError(f"n_upper={nu} gives a non-integral lower band size {nl_f:g}")
        s_lo = self.spacing_lower
        if s_lo is None:
            s_lo = nu * self.spacing_upper / nl
        lam = self.spacing_upper if self.coupling is None else self.coupling
        return ModelParams(
            n_upper=nu, n_lower=nl,
            spacing_upper=self.spacing_upper, spacing_lower=s_lo,
            coupling_scale=lam,
            seed=self.seed if seed is None else seed,
            complex_coupling=self.complex_coupling,
        )


def time_grid(theory: hsa.RateTheory, n_samples: int = 500, t_max: float | None = None):
    """Uniform grid on ``[0, t_max]``; default ``t_max`` is five relaxation times."""
    if t_max is None:
        if theory.relaxation_rate == 0:
            raise ValueError("t_max is required when the coupling vanishes")
        t_max = 5.0 * theory.relaxation_time
    return np.linspace(0.0, t_max, n_samples)


@dataclass
class RunResult:
    params: ModelParams
    theory: hsa.RateTheory
    trajectory: Trajectory
    p_ex_theory: np.ndarray
    p_gr_theory: np.ndarray
    summary: dict = field(default_factory=dict)


def simulate(params: ModelParams, t_max: float | None = None, n_samples: int = 500,
             store_states: bool = False) -> RunResult:
    """Exact relaxation run from the random product initial state."""
    theory = hsa.rate_constant(params)
    times = time_grid(theory, n_samples, t_max)
    h = build_hamiltonian(params)
    psi0 = initial_state(params)
    traj = evolve_exact(h, psi0, times, store_states=store_states)
    p_ex0, _ = sector_probabilities(psi0)
    p_ex_th, p_gr_th = hsa.rate_solution(theory, p_ex0, times)
    result = RunResult(params, theory, traj, p_ex_th, p_gr_th)
    result.summary = summarize(result)
    return result


def summarize(result: RunResult) -> dict:
    """Fitted rate, equilibrium comparison, conservation and correlation bounds."""
    params, theory, traj = result.params, result.theory, result.trajectory
    t = traj.times
    p_ex, p_gr = traj.column("p_ex"), traj.column("p_gr")
    p_s, p_r = traj.column("purity_s"), traj.column("purity_r")
    eta = traj.column("eta")
    p_ex_inf, p_gr_inf = hsa.equilibrium(params.n_upper, params.n_lower)
    T = theory.relaxation_time

    if np.isfinite(T):
        early = t <= 3.0 * T
        late = (t >= 3.0 * T) & (t <= 5.0 * T)
        fit = hsa.fit_decay_rate(t, p_gr, p_gr_inf, t_fit=2.0 * T)
    else:
        early = np.ones_like(t, dtype=bool)
        late = np.zeros_like(t, dtype=bool)
        fit = hsa.fit_decay_rate(t, p_gr, p_gr_inf)
    late_mean = float(p_gr[late].mean()) if late.any() else None

    e0 = traj.energies[0]
    scale = max(abs(e0), 1e-300)
    eq7_bound = 1.0 / (p_s * p_r) - 1.0
    eq8_bound = p_s[0] / p_s - 1.0
    return {
        "theory": {
            "c": theory.c,
            "relaxation_rate": theory.relaxation_rate,
            "relaxation_time": T if np.isfinite(T) else None,
            "tau1": theory.tau1,
            "tau2": theory.tau2,
            "p_ex_inf": p_ex_inf,
            "p_gr_inf": p_gr_inf,
        },
        "fitted_rate": fit,
        "rate_ratio": (fit / theory.relaxation_rate) if theory.relaxation_rate else None,
        "late_mean_p_gr": late_mean,
        "late_mean_error": None if late_mean is None else late_mean - p_gr_inf,
        "max_dev_p_gr": float(np.max(np.abs(p_gr - result.p_gr_theory)[early])),
        "conservation": {
            "max_norm_err": float(traj.column("norm_err").max()),
            "max_energy_drift_rel": float(np.max(np.abs(traj.energies - e0)) / scale),
            "max_prob_sum_err": float(np.max(np.abs(p_ex + p_gr - 1.0))),
        },
        "correlations": {
            "final_eta": float(eta[-1]),
            "final_purity_s": float(p_s[-1]),
            "final_purity_bound": float(eq7_bound[-1]),
            "min_eta_minus_purity_bound": float(np.min(eta - eq7_bound)),
            "min_eta_minus_initial_purity_bound": float(np.min(eta - eq8_bound)),
            "purity_r_drift": float(np.max(np.abs(p_r - p_r[0]))),
        },
    }


def write_csv(path, result: RunResult) -> Path:
    """Trajectory rows with theory columns, 12 significant digits."""
    path = Path(path)
    traj = result.trajectory
    lines = [",".join(CSV_COLUMNS)]
    for k, rec in enumerate(traj.records):
        row = (rec.t, rec.p_ex, rec.p_gr, result.p_ex_theory[k], result.p_gr_theory[k],
               rec.purity_s, rec.purity_r, rec.p_c, rec.eta, rec.norm_err)
        lines.append(",".join(f"{float(v):.12g}" for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def _run_one(config: RunConfig, n_upper: int, index: int):
    seed = derive_seed(config.seed, index)
    params = config.model_params(n_upper=n_upper, seed=seed)
    result = simulate(params, t_max=config.t_max, n_samples=config.n_samples)
    out = Path(config.out)
    stem = f"run_n1-{params.n_upper}_seed-{index}"
    csv_path = write_csv(out / f"{stem}.csv", result)
    sidecar = {
        "params": asdict(params),
        "seed": seed,
        "seed_index": index,
        "master_seed": config.seed,
        "regime": hsa.regime_report(params).as_dict(),
        **result.summary,
    }
    json_path = _write_json(out / f"{stem}.json", sidecar)
    return params.n_upper, index, result.summary, [csv_path, json_path]


def _print_regime(report: hsa.RegimeReport, params: ModelParams):
    for name, ok in report.flags.items():
        if not ok:
            log.warning("regime condition %s fails for n_upper=%d (value %.4g)",
                        name, params.n_upper, getattr(report, name))


def run_single(config: RunConfig) -> list[Path]:
    """One trajectory per seed at ``config.n_upper``; CSV plus JSON sidecar each."""
    Path(config.out).mkdir(parents=True, exist_ok=True)
    params = config.model_params()
    _print_regime(hsa.regime_report(params), params)
    paths = []
    for i in range(config.n_seeds):
        *_, files = _run_one(config, None, i)
        paths.extend(files)
    return paths


def run_sweep(config: RunConfig) -> dict:
    """Relaxation runs for every size and seed plus a ``summary.json``.

    Spacings stay fixed across sizes, so the theory curve is the same for all
    of them. Entries may run in parallel (``config.workers``); the summary is
    assembled after sorting by ``(size, seed)``.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(size, i) for size in config.sizes for i in range(config.n_seeds)]
    for size in config.sizes:
        params = config.model_params(n_upper=size)
        _print_regime(hsa.regime_report(params), params)

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_one, [config] * len(jobs),
                                    [j[0] for j in jobs], [j[1] for j in jobs]))
    else:
        results = [_run_one(config, size, i) for size, i in jobs]
    results.sort(key=lambda r: (r[0], r[1]))

    per_size = {}
    for size in sorted(config.sizes):
        rows = [r[2] for r in results if r[0] == size]
        devs = [row["max_dev_p_gr"] for row in rows]
        rates = [row["fitted_rate"] for row in rows]
        per_size[str(size)] = {
            "max_dev_p_gr": devs,
            "mean_max_dev_p_gr": float(np.mean(devs)),
            "fitted_rate": rates,
            "mean_fitted_rate": float(np.nanmean(rates)),
            "late_mean_p_gr": [row["late_mean_p_gr"] for row in rows],
            "theory_rate": rows[0]["theory"]["relaxation_rate"],
        }
    summary = {
        "config": config.as_dict(),
        "sizes": sorted(config.sizes),
        "per_size": per_size,
        "deviation_inversions": _count_inversions(
            [per_size[str(s)]["mean_max_dev_p_gr"] for s in sorted(config.sizes)]),
    }
    _write_json(out / "summary.json", summary)
    return summary


def _count_inversions(values) -> int:
    """Adjacent pairs where the sequence increases."""
    return int(sum(b > a for a, b in zip(values, values[1:])))


def run_regime(config: RunConfig) -> dict:
    """Validity numbers for the configured parameters (informational only)."""
    params = config.model_params()
    report = hsa.regime_report(params).as_dict()
    report["n_upper"] = params.n_upper
    report["n_lower"] = params.n_lower
    return report


def run_hsa_check(config: RunConfig) -> dict:
    """Monte-Carlo check of the Hilbert-space averages at step length ``tau``.

    ``tau`` defaults to twice the linear-regime onset.
    """
    params = config.model_params(seed=config.seed)
    theory = hsa.rate_constant(params)
    tau = 2.0 * theory.tau1 if config.tau is None else config.tau
    h = build_hamiltonian(params)
    stats = hsa.hilbert_average_check(h, tau, config.p_ex, config.hsa_samples, config.seed)
    return {
        "n_upper": params.n_upper,
        "n_lower": params.n_lower,
        "tau": tau,
        **stats.as_dict(),
        "trace_prediction": hsa.u1_trace_prediction(params, tau, warn=False),
    }


def with_overrides(config: RunConfig, **kw) -> RunConfig:
    """Copy of `config` with non-None keyword overrides applied."""
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
