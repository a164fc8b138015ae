"""Relaxation of the gas from its ground state into a large container.

The gas starts in |0> with the container in a random superposition of
upper-band levels. With N1 = 800 upper-band and N0 = 400 lower-band levels the
exact Schroedinger dynamics should follow the rate-equation curve

    p_gr(t) = 2/3 + 1/3 exp(-C (N0 + N1) t)

and settle at the band-size ratio 2/3.
"""
import numpy as np

from twoband import default_params, rate_constant, regime_report
from twoband.experiments import simulate

params = default_params(800, seed=1)
theory = rate_constant(params)
print(f"C = {theory.c:.4e},  C(N0+N1) = {theory.relaxation_rate:.4f},  "
      f"T = {theory.relaxation_time:.2f}")
print("regime:", {k: round(v, 3) for k, v in regime_report(params).as_dict().items()
                  if k.startswith("cond")})

# %% exact evolution on 500 samples over five relaxation times
result = simulate(params)
traj = result.trajectory
p_gr = traj.column("p_gr")

print("\n     t      p_gr   theory")
for k in np.linspace(0, len(traj) - 1, 11).astype(int):
    print(f"{traj.times[k]:7.1f}  {p_gr[k]:.4f}  {result.p_gr_theory[k]:.4f}")

# %% summary numbers
s = result.summary
print(f"\nfitted rate / theory rate   {s['rate_ratio']:.3f}")
print(f"late-time mean of p_gr      {s['late_mean_p_gr']:.4f}  (theory {2/3:.4f})")
print(f"max |p_gr - theory| on [0,3T] {s['max_dev_p_gr']:.4f}")
print(f"conservation                {s['conservation']}")
