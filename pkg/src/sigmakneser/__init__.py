"""Kneser-type sumset theorems in truncated σ-finite abelian groups."""

from .density import density_profile, folner_profile, lower_upper_estimates, periodic_density
from .errors import KneserError
from .group import FiniteAbelianGroup, GroupSet, make_group
from .kneser import kneser_check, kneser_exhaustive
from .lattice import (
    Subgroup,
    build_path,
    descend_subgroup,
    enumerate_subgroups,
    generate_subgroup,
    limit_subgroup,
    subgroups_of_index,
)
from .sets import SigmaSet, band_set, explicit_set, periodic_set, random_set, shifted_coset_set
from .sigma import SigmaGroupModel, folner_coset_sequence, make_family
from .sumset import cosets_met, project_to_quotient, quotient, saturate, stabilizer, sumset, sumset_fast
from .verify import (
    small_doubling_levels,
    stabilizer_trace,
    verify_band_counterexample,
    verify_shifted_counterexample,
    verify_theorem,
)

__version__ = "0.1.0"
