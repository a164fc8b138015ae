"""Relaxation generates system-environment correlations.

The product initial state has eta = 0. As the gas purity drops towards
sqrt(1/9 + 4/9) ~ 0.745, the purity bound 1/(P_s P_r) - 1 forces eta up,
regardless of how weak the coupling is.
"""
import numpy as np

from twoband import default_params
from twoband.experiments import simulate

result = simulate(default_params(800, seed=3), n_samples=200)
traj = result.trajectory
p_s, p_r, eta = traj.column("purity_s"), traj.column("purity_r"), traj.column("eta")
bound = 1 / (p_s * p_r) - 1
initial_bound = p_s[0] / p_s - 1

print("     t     P_s     P_r     eta   1/(PsPr)-1   Ps(0)/Ps-1")
for k in range(0, len(traj), 20):
    print(f"{traj.times[k]:6.1f}  {p_s[k]:.4f}  {p_r[k]:.4f}  {eta[k]:.4f}  "
          f"{bound[k]:10.4f}  {initial_bound[k]:10.4f}")

print(f"\nmin(eta - purity bound) = {np.min(eta - bound):.3e}")
print(f"container purity drift  = {np.max(np.abs(p_r - p_r[0])):.3f}")
