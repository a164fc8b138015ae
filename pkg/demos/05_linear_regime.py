"""Square and linear regimes of tr{U1^2}, and the truncated Dyson step.

For tau << tau1 every transition sits under the peak of sin^2(w tau/2)/w^2
and the trace grows like tau^2; between tau1 and tau2 it grows linearly as
C N1 N0 tau. The second-order Dyson step matches exact propagation with a
local error of order tau^3.
"""
import numpy as np

from twoband import (
    ModelParams, PureState, build_hamiltonian, default_params, dyson_step, rate_constant,
    sector_probabilities, u1_trace_prediction, u1_traces,
)
from twoband.propagator import SpectralPropagator

params = default_params(400, seed=23)
h = build_hamiltonian(params)
tau1 = rate_constant(params).tau1

print("tau/tau1   actual/prediction")
for mult in (0.05, 0.2, 0.5, 1, 2, 4, 16, 64):
    tau = mult * tau1
    ratio = u1_traces(h, tau)[0] / u1_trace_prediction(params, tau, warn=False)
    print(f"{mult:8.2f}   {ratio:.4f}")

# %% Dyson step against exact evolution
small = ModelParams(40, 20, 0.05, 0.1, 0.05, seed=3)
hs = build_hamiltonian(small)
rng = np.random.default_rng(1)
z = rng.standard_normal(60) + 1j * rng.standard_normal(60)
psi = PureState(z / np.linalg.norm(z), 40)
prop = SpectralPropagator(hs)
print("\n   tau     |p_ex(dyson) - p_ex(exact)|")
for tau in 0.4 * 2.0 ** -np.arange(6):
    err = abs(dyson_step(hs, psi, tau)[0] - sector_probabilities(prop.evolve(psi, tau))[0])
    print(f"{tau:7.4f}   {err:.3e}")
