"""Larmor precession of the polarization vector, any spin.

For a pure magnetic field the rank-1 multipole block decouples from all
other ranks and the polarization vector P = <J>/j obeys the classical
precession equation dP/dt = P x (gamma B), whatever j is.  This script
evolves a tilted spin-3/2 polarization, plots the components, and compares
the fitted precession frequency with gamma |B|.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from spinmultipoles import (
    MagneticSpec,
    basis_for,
    build_generator,
    evolve,
    fit_frequency,
    omega_from_magnetic,
    oriented_state,
    polarization_vector,
)

j = 1.5
gamma = 1.0
B = np.array([0.2, 0.1, 0.9])
omega_larmor = gamma * np.linalg.norm(B)

basis = basis_for(j)
gen = build_generator(omega_from_magnetic(MagneticSpec(gamma, tuple(B)), j), basis)
initial = oriented_state(j, (0.8, 0.0, 0.2))

times = np.linspace(0.0, 8 * 2 * np.pi / omega_larmor, 3000)
traj = evolve(gen, initial, times)
pvecs = np.array([polarization_vector(s) for s in traj.states])

b_hat = B / np.linalg.norm(B)
e1 = np.cross(b_hat, [0.0, 0.0, 1.0])
e1 /= np.linalg.norm(e1)
fitted = fit_frequency(times, pvecs @ e1)
print(f"gamma |B|          = {omega_larmor:.9f} rad/s")
print(f"fitted frequency   = {fitted:.9f} rad/s")
print(f"relative error     = {abs(fitted - omega_larmor) / omega_larmor:.2e}")
norms = np.linalg.norm(pvecs, axis=1)
print(f"|P| drift          = {np.max(np.abs(norms - norms[0])):.2e}")

fig, ax = plt.subplots(figsize=(7, 4))
for idx, label in enumerate(("$P_x$", "$P_y$", "$P_z$")):
    ax.plot(times, pvecs[:, idx], label=label, lw=1)
ax.plot(times, norms, "k--", label="$|P|$", lw=1)
ax.set_xlabel("time (s)")
ax.set_ylabel("polarization")
ax.set_title(f"spin-{j} Larmor precession, tilted field")
ax.legend(loc="upper right", ncol=4, fontsize=8)
fig.tight_layout()
fig.savefig("02_larmor_precession.png", dpi=120)
print("wrote 02_larmor_precession.png")
