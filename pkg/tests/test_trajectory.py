"""Trajectory container validation."""

import numpy as np
import pytest

from spinmultipoles.multipoles import StateMultipoles
from spinmultipoles.trajectory import Trajectory


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 1.0]), states=[np.eye(2)])


def test_non_monotone_times_rejected():
    with pytest.raises(ValueError):
        Trajectory(times=np.array([0.0, 2.0, 1.0]), states=[np.eye(2)] * 3)


def test_coefficients_and_matrices_accessors():
    states = [StateMultipoles.from_components(0.5, {(1, 0): 0.1 * k}) for k in range(3)]
    traj = Trajectory(times=np.array([0.0, 1.0, 2.0]), states=states)
    coeffs = traj.coefficients()
    assert coeffs.shape == (3, 4)
    assert coeffs[2, 2] == pytest.approx(0.2)

    raw = Trajectory(times=np.array([0.0, 1.0]), states=[np.eye(2), np.eye(2) * 2])
    assert raw.matrices().shape == (2, 2, 2)
    assert len(raw) == 2
