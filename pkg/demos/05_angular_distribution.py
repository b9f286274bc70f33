"""Angular distribution of an evolving aligned ensemble.

For an axially symmetric ensemble the emission pattern is
W(theta) = sum_L r_L rho_L0 P_L(cos theta): only the M = 0 multipoles
enter.  A transverse magnetic field rotates orientation and alignment, so
the M = 0 components oscillate and the pattern breathes at the Larmor
frequency (rank 1) and twice it (rank 2).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from spinmultipoles import (
    AngularDistributionSpec,
    MagneticSpec,
    basis_for,
    build_generator,
    decompose,
    evolve,
    angular_distribution,
    omega_from_magnetic,
)

j = 1
basis = basis_for(j)

# start from the pure m = +1 state: oriented and aligned along z
rho0 = np.zeros((3, 3), dtype=complex)
rho0[2, 2] = 1.0
initial = decompose(rho0, basis)

gamma, bx = 1.0, 1.0
gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, (bx, 0, 0)), j), basis)

period = 2 * np.pi / (gamma * bx)
theta = np.linspace(0.0, np.pi, 181)
spec = AngularDistributionSpec(theta)

fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(6, 6))
snapshots = np.linspace(0.0, period / 2.0, 5)
traj = evolve(gen, initial, snapshots[1:])
states = [initial] + list(traj.states)
for t, state in zip(snapshots, states):
    dist = angular_distribution(state, spec)
    label = f"t = {t / period:.3g} T"
    ax.plot(theta, dist.values, label=label, lw=1.2)
    ax.plot(-theta, dist.values, lw=1.2, color=ax.lines[-1].get_color())
    print(f"t = {t:6.3f}: W(0) = {dist.values[0]:+.4f}, W(pi/2) = {dist.values[90]:+.4f}")

ax.set_title("W($\\theta$) of a spin-1 ensemble precessing about x")
ax.legend(fontsize=8, loc="lower left")
fig.tight_layout()
fig.savefig("05_angular_distribution.png", dpi=120)
print("wrote 05_angular_distribution.png")
