"""Time-series container shared by the precession engine and the oracles."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Trajectory"]


@dataclass
class Trajectory:
    """States sampled on a strictly increasing time grid.

    ``states`` holds either StateMultipoles (multipole trajectories) or
    dense density matrices (raw Liouville oracle).  ``standard_errors`` is
    only populated by the stochastic oracle: per-component standard errors
    of the ensemble mean, stored as se_re + 1j*se_im.
    """

    times: np.ndarray
    states: list
    metadata: dict = field(default_factory=dict)
    standard_errors: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if len(self.states) != self.times.size:
            raise ValueError("states and times must have equal length")
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size

    def coefficients(self) -> np.ndarray:
        """Multipole coefficients as an (n_times, (2j+1)^2) complex array."""
        return np.array([s.coeffs for s in self.states])

    def matrices(self) -> np.ndarray:
        """Density matrices as an (n_times, dim, dim) complex array."""
        return np.array([np.asarray(s) for s in self.states])
