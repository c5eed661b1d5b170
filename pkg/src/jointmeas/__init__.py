"""Joint measurability of unsharp observables built from mutually unbiased bases."""
__version__ = "0.1.0"

from ._config import DEFAULT, Tolerances
from .errors import JointMeasError
from .mub import MubFamily, build_mubs, prime_power_decompose, unbiasedness_report
from .operator_basis import (OperatorBasis, basis_for_dimension, from_mubs, gell_mann_basis,
                             pauli_basis, qutrit_builtin, validate)
from .states import bloch_from_density, density_from_bloch, random_state
from .povm import critical_eta, global_povm, joint_distribution, marginalize
from .charfun import bochner_check, bochner_search, classical_charfun, mh_charfun
from .geometry import enumerate_vertices, h_polytope, mub_vertices
from .sampler import goodness_of_fit, sample

__all__ = [
    "DEFAULT", "Tolerances", "JointMeasError",
    "MubFamily", "build_mubs", "prime_power_decompose", "unbiasedness_report",
    "OperatorBasis", "basis_for_dimension", "from_mubs", "gell_mann_basis",
    "pauli_basis", "qutrit_builtin", "validate",
    "bloch_from_density", "density_from_bloch", "random_state",
    "critical_eta", "global_povm", "joint_distribution", "marginalize",
    "bochner_check", "bochner_search", "classical_charfun", "mh_charfun",
    "enumerate_vertices", "h_polytope", "mub_vertices",
    "goodness_of_fit", "sample",
]
