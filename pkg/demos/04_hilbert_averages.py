"""Monte-Carlo check of the Hilbert-space averages behind the rate step.

Over states with fixed excitation probability p_ex, the first-order matrix
element averages to zero and <ex|U1^2|ex> averages to (p_ex / N0) tr_ex{U1^2}.
The spread around these means shrinks as the container grows.
"""
from twoband import build_hamiltonian, default_params, hilbert_average_check, rate_constant

tau = 2 * rate_constant(default_params(100)).tau1
for n1 in (100, 200, 400):
    h = build_hamiltonian(default_params(n1, seed=17))
    stats = hilbert_average_check(h, tau, p_ex_fixed=0.5, n_samples=1000, seed=99)
    z = stats.z_scores()
    print(f"N1={n1:4d}  <gr|U1|ex> = {stats.first_mean:.2e}   "
          f"<ex|U1^2|ex> = {stats.ex_mean:.4f} vs {stats.ex_pred:.4f}   "
          f"std {stats.ex_std:.4f}   max z {max(z.values()):.2f}")
