"""Spin precession and relaxation of state multipoles.

A spin-j density matrix is carried as its (2j+1)^2 state multipoles
rho_LM, and static magnetic-dipole / electric-quadrupole interactions
drive them through a generalized precession equation built from exact
angular-momentum algebra.  Every evolution can be cross-checked against
an independent density-matrix oracle, and per-component relaxation rates
against a stochastic Monte Carlo bath simulation.
"""

from .errors import NumericError, PhysicsWarning, RankError
from .fitting import fit_decay_rate, fit_frequency
from .interactions import (
    EfgSpec,
    InteractionTensor,
    MagneticSpec,
    hamiltonian_matrix,
    omega_from_efg,
    omega_from_magnetic,
)
from .liouville import (
    FluctuationModel,
    evolve_liouville,
    interaction_picture_transform,
    stochastic_evolve,
)
from .multipoles import (
    AngularDistribution,
    AngularDistributionSpec,
    StateMultipoles,
    angular_distribution,
    clebsch_equivalence_check,
    decompose,
    multipole_norm,
    oriented_state,
    polarization_vector,
    reconstruct,
    tensor_product,
)
from .precession import (
    MultipoleGenerator,
    RelaxationSpec,
    StructureConstants,
    apply_relaxation,
    build_generator,
    evolve,
    reduced_matrix_element,
    reduced_matrix_element_exact,
    structure_constant,
    structure_constant_exact,
)
from .relaxation import RateReport, rate_report, relaxation_rate
from .tensors import (
    SpinSystem,
    TensorBasis,
    angular_momentum_matrices,
    basis_for,
    flat_index,
    lm_pairs,
    norm_constants,
    tensor_matrix_element,
    tensor_operator,
    tensor_operator_closed_form,
    tensor_product_element,
)
from .trajectory import Trajectory
from .wigner import ExactCoeff, HalfInt, SurdSum, clebsch_gordan, six_j, triangle_ok

__version__ = "0.1.0"

__all__ = [
    "EfgSpec",
    "ExactCoeff",
    "FluctuationModel",
    "HalfInt",
    "InteractionTensor",
    "MagneticSpec",
    "MultipoleGenerator",
    "NumericError",
    "PhysicsWarning",
    "RankError",
    "RateReport",
    "RelaxationSpec",
    "SpinSystem",
    "StateMultipoles",
    "StructureConstants",
    "SurdSum",
    "TensorBasis",
    "Trajectory",
    "AngularDistribution",
    "AngularDistributionSpec",
    "angular_distribution",
    "angular_momentum_matrices",
    "apply_relaxation",
    "basis_for",
    "build_generator",
    "clebsch_equivalence_check",
    "clebsch_gordan",
    "decompose",
    "evolve",
    "evolve_liouville",
    "fit_decay_rate",
    "fit_frequency",
    "flat_index",
    "hamiltonian_matrix",
    "interaction_picture_transform",
    "lm_pairs",
    "multipole_norm",
    "norm_constants",
    "omega_from_efg",
    "omega_from_magnetic",
    "oriented_state",
    "polarization_vector",
    "rate_report",
    "reconstruct",
    "reduced_matrix_element",
    "reduced_matrix_element_exact",
    "relaxation_rate",
    "six_j",
    "stochastic_evolve",
    "structure_constant",
    "structure_constant_exact",
    "tensor_matrix_element",
    "tensor_operator",
    "tensor_operator_closed_form",
    "tensor_product",
    "tensor_product_element",
    "triangle_ok",
    "__version__",
]
