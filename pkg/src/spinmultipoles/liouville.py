"""Independent reference evolutions for validating the precession engine.

Three oracles live here:

* :func:`evolve_liouville` integrates d/dt rho = i [rho, H] exactly through
  the eigendecomposition of H, entirely in density-matrix space.  It never
  touches multipoles or structure constants, which is what makes it a
  genuine cross-check of the generator construction.
* :func:`interaction_picture_transform` applies the unitary frame change
  rho_hat = exp(+i H_S t) rho exp(-i H_S t) and its inverse.
* :func:`stochastic_evolve` propagates an ensemble of density matrices
  under a classical fluctuating magnetic field with exponential
  autocorrelation (an Ornstein-Uhlenbeck process per cartesian component),
  giving a non-perturbative ground truth for relaxation rates.

The fluctuating coupling is H(t) = H_S + sum_q q_q(t) J_q with
<q_a(t) q_b(t')> = delta_ab omega_f^2 exp(-|t-t'|/tau_c) and zero mean.
Each trajectory's noise stream is seeded deterministically from
(seed, trajectory index), so runs are bit-reproducible regardless of
chunking or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .interactions import InteractionTensor, hamiltonian_matrix
from .multipoles import StateMultipoles
from .tensors import TensorBasis, angular_momentum_matrices
from .trajectory import Trajectory

__all__ = [
    "FluctuationModel",
    "evolve_liouville",
    "interaction_picture_transform",
    "stochastic_evolve",
]

# Trajectories are processed in fixed-size blocks so that partial sums are
# combined in the same order no matter how many workers run them.
_TRAJ_BLOCK = 256
_STEP_CHUNK = 512


def _check_hermitian(mat: np.ndarray, name: str, tol: float = 1e-10) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if np.max(np.abs(mat - mat.conj().T)) > tol * scale:
        raise ValueError(f"{name} is not hermitian within {tol}")
    return mat


def evolve_liouville(H: np.ndarray, rho0: np.ndarray, times) -> Trajectory:
    """Exact density-matrix evolution rho(t) = e^(-iHt) rho0 e^(+iHt).

    The sign is the one solving d/dt rho = i [rho, H].  Trace, hermiticity
    and the spectrum of rho are preserved exactly (unitary similarity).
    Returns a trajectory of dense matrices.
    """
    H = _check_hermitian(H, "H")
    rho0 = np.asarray(rho0, dtype=complex)
    _check_hermitian(rho0, "rho0")
    if abs(np.trace(rho0) - 1.0) > 1e-9:
        raise ValueError("rho0 must have unit trace")
    if rho0.shape != H.shape:
        raise ValueError("H and rho0 must have equal dimension")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or (times.size > 1 and not np.all(np.diff(times) > 0)):
        raise ValueError("times must be strictly increasing")

    w, V = np.linalg.eigh(H)
    R = V.conj().T @ rho0 @ V
    gaps = w[:, None] - w[None, :]
    states = []
    for t in times:
        phases = np.exp(-1j * gaps * t)
        states.append(V @ (R * phases) @ V.conj().T)
    return Trajectory(times=times, states=states, metadata={"method": "liouville_eig"})


def interaction_picture_transform(
    X: np.ndarray, H_S: np.ndarray, t: float, direction: str = "to_interaction"
) -> np.ndarray:
    """Similarity transform by exp(+-i H_S t).

    "to_interaction" maps a lab operator X to exp(+iH_S t) X exp(-iH_S t);
    "to_lab" inverts it.  Unitary, so the spectrum of X is untouched and a
    round trip is the identity.
    """
    H_S = _check_hermitian(H_S, "H_S")
    X = np.asarray(X, dtype=complex)
    if X.shape != H_S.shape:
        raise ValueError("X and H_S must have equal dimension")
    if direction not in ("to_interaction", "to_lab"):
        raise ValueError("direction must be 'to_interaction' or 'to_lab'")
    w, V = np.linalg.eigh(H_S)
    sign = 1.0 if direction == "to_interaction" else -1.0
    phases = np.exp(sign * 1j * w * t)
    U = (V * phases) @ V.conj().T
    return U @ X @ U.conj().T


@dataclass(frozen=True)
class FluctuationModel:
    """A static Hamiltonian plus an isotropic fluctuating magnetic field.

    ``fluctuation_amplitude`` is the root-mean-square angular frequency
    omega_f of each cartesian coupling component gamma*B_fluct;
    ``correlation_time`` is the exponential decay time tau_c of the bath
    autocorrelation.  Only the exponential (Ornstein-Uhlenbeck) shape is
    implemented.
    """

    static_tensor: InteractionTensor
    fluctuation_amplitude: float
    correlation_time: float
    shape: str = "exponential"

    def __post_init__(self):
        if self.fluctuation_amplitude < 0:
            raise ValueError("fluctuation amplitude omega_f must be >= 0")
        if not self.correlation_time > 0:
            raise ValueError("correlation time tau_c must be > 0")
        if self.shape != "exponential":
            raise ValueError("only the exponential correlation shape is supported")

    def static_hamiltonian(self, basis: TensorBasis) -> np.ndarray:
        return hamiltonian_matrix(self.static_tensor, basis)


def _pauli_step_unitaries(H: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i dt H) for a batch of 2x2 hermitian H, closed form."""
    a = (H[:, 0, 0] + H[:, 1, 1]).real / 2.0
    w = (H[:, 0, 0] - H[:, 1, 1]).real / 2.0
    c = H[:, 0, 1]
    lam = np.sqrt(w * w + np.abs(c) ** 2)
    theta = dt * lam
    sinc = np.where(lam > 0, np.sin(theta) / np.where(lam > 0, lam, 1.0), dt)
    U = np.zeros_like(H)
    cos = np.cos(theta)
    U[:, 0, 0] = cos - 1j * sinc * w
    U[:, 1, 1] = cos + 1j * sinc * w
    U[:, 0, 1] = -1j * sinc * c
    U[:, 1, 0] = -1j * sinc * np.conj(c)
    return U * np.exp(-1j * dt * a)[:, None, None]


def _spin1_rotation_unitaries(q: np.ndarray, dt: float, jmats: np.ndarray) -> np.ndarray:
    """exp(-i dt q.J) for spin 1, where (n.J)^3 = n.J.

    U = I - i sin(theta) A - (1 - cos(theta)) A^2 with A = n.J, theta = dt|q|.
    """
    n_traj = q.shape[0]
    norms = np.linalg.norm(q, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    nhat = q / safe[:, None]
    A = np.einsum("kq,qab->kab", nhat, jmats)
    A2 = A @ A
    theta = dt * norms
    eye = np.broadcast_to(np.eye(3, dtype=complex), (n_traj, 3, 3))
    U = (
        eye
        - 1j * np.sin(theta)[:, None, None] * A
        - (1.0 - np.cos(theta))[:, None, None] * A2
    )
    U[norms == 0] = np.eye(3, dtype=complex)
    return U


def _eigh_step_unitaries(H: np.ndarray, dt: float) -> np.ndarray:
    w, V = np.linalg.eigh(H)
    phases = np.exp(-1j * dt * w)
    return (V * phases[:, None, :]) @ V.conj().transpose(0, 2, 1)


def stochastic_evolve(
    model: FluctuationModel,
    rho0: np.ndarray,
    times,
    n_traj: int,
    seed: int,
    basis: TensorBasis,
    workers: int = 1,
) -> Trajectory:
    """Ensemble-averaged multipole evolution under the fluctuating field.

    Each of the ``n_traj`` realizations propagates rho0 exactly under the
    piecewise-constant Hamiltonian H_S + q(t).J, with q refreshed at every
    grid point by the exact discrete-time Ornstein-Uhlenbeck update

        q_{n+1} = q_n e^(-h/tau_c) + omega_f sqrt(1 - e^(-2h/tau_c)) xi_n.

    ``times`` must be a uniform grid starting at 0 whose step h satisfies
    h <= tau_c/20 and h (||H_S|| + omega_f) <= 0.05, so that the
    piecewise-constant field resolves both the bath and the precession.
    Returns ensemble means as StateMultipoles together with per-component
    standard errors; ``workers`` only changes the execution schedule, never
    the result.
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("times must contain at least two points")
    if abs(times[0]) > 0:
        raise ValueError("the stochastic oracle requires times[0] = 0")
    steps = np.diff(times)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("times must be a uniform grid")

    H_S = model.static_hamiltonian(basis)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (basis.dim, basis.dim):
        raise ValueError("rho0 has the wrong dimension for the basis")

    omega_f = model.fluctuation_amplitude
    tau_c = model.correlation_time
    hs_norm = float(np.linalg.norm(H_S, 2))
    if h > tau_c / 20.0 + 1e-15:
        raise ValueError(
            f"step h = {h:.3g} exceeds tau_c/20 = {tau_c / 20.0:.3g}: "
            "the grid cannot resolve the bath correlation"
        )
    bound = 0.05 / (hs_norm + omega_f) if (hs_norm + omega_f) > 0 else math.inf
    if h > bound + 1e-15:
        raise ValueError(
            f"step h = {h:.3g} exceeds 0.05/(||H_S|| + omega_f) = {bound:.3g}"
        )

    n_times = times.size
    size = basis.size
    blocks = [
        (start, min(start + _TRAJ_BLOCK, n_traj))
        for start in range(0, n_traj, _TRAJ_BLOCK)
    ]

    def run_block(bounds: tuple[int, int]):
        return _propagate_block(
            bounds, model, H_S, rho0, basis, h, n_times, seed
        )

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_block, blocks))
    else:
        results = [run_block(b) for b in blocks]

    # Combine block sums in fixed block order: bitwise deterministic.
    total = np.zeros((n_times, size), dtype=complex)
    total_sq = np.zeros((n_times, size), dtype=float)  # re^2 + 1j-slot handled below
    total_sq_im = np.zeros((n_times, size), dtype=float)
    for s, sq_re, sq_im in results:
        total += s
        total_sq += sq_re
        total_sq_im += sq_im

    mean = total / n_traj
    if n_traj > 1:
        var_re = np.maximum(total_sq / n_traj - mean.real**2, 0.0)
        var_im = np.maximum(total_sq_im / n_traj - mean.imag**2, 0.0)
        scale = n_traj / (n_traj - 1.0)
        se = np.sqrt(scale * var_re / n_traj) + 1j * np.sqrt(scale * var_im / n_traj)
    else:
        se = np.zeros((n_times, size), dtype=complex)

    states = [StateMultipoles(basis.spin, mean[i]) for i in range(n_times)]
    return Trajectory(
        times=times,
        states=states,
        metadata={
            "method": "stochastic",
            "n_traj": n_traj,
            "seed": seed,
            "step": h,
            "omega_f": omega_f,
            "tau_c": tau_c,
        },
        standard_errors=se,
    )


def _propagate_block(bounds, model, H_S, rho0, basis, h, n_times, seed):
    start, stop = bounds
    n_block = stop - start
    dim = basis.dim
    size = basis.size
    omega_f = model.fluctuation_amplitude
    tau_c = model.correlation_time
    stack = basis.stack()
    jmats = np.array(angular_momentum_matrices(basis.spin))

    alpha = math.exp(-h / tau_c)
    kick = omega_f * math.sqrt(1.0 - alpha * alpha)
    hs_is_zero = not np.any(H_S)

    rngs = [np.random.default_rng((seed, k)) for k in range(start, stop)]
    q = omega_f * np.vstack([r.standard_normal(3) for r in rngs])

    rho = np.broadcast_to(rho0, (n_block, dim, dim)).copy()

    sum_c = np.zeros((n_times, size), dtype=complex)
    sum_sq_re = np.zeros((n_times, size), dtype=float)
    sum_sq_im = np.zeros((n_times, size), dtype=float)

    def record(i, rho_batch):
        coeffs = np.einsum("kab,lba->kl", rho_batch, stack)
        sum_c[i] = coeffs.sum(axis=0)
        sum_sq_re[i] = (coeffs.real**2).sum(axis=0)
        sum_sq_im[i] = (coeffs.imag**2).sum(axis=0)

    record(0, rho)
    n_steps = n_times - 1
    step = 0
    while step < n_steps:
        chunk = min(_STEP_CHUNK, n_steps - step)
        xi = np.stack([r.standard_normal((chunk, 3)) for r in rngs], axis=1)
        for s in range(chunk):
            if hs_is_zero and dim == 3:
                U = _spin1_rotation_unitaries(q, h, jmats)
            else:
                H = H_S[None, :, :] + np.einsum("kq,qab->kab", q, jmats)
                if dim == 2:
                    U = _pauli_step_unitaries(H, h)
                else:
                    U = _eigh_step_unitaries(H, h)
            rho = U @ rho @ U.conj().transpose(0, 2, 1)
            step += 1
            record(step, rho)
            q = q * alpha + kick * xi[s]
    return sum_c, sum_sq_re, sum_sq_im
