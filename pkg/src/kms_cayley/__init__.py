"""KMS-state structure of generalized gauge actions on Cayley-graph algebras.

Core entry points: group specs (:mod:`kms_cayley.groups`), the partition
solvers (:mod:`kms_cayley.solvers`), state evaluation
(:mod:`kms_cayley.states`), the direction fan (:mod:`kms_cayley.cones`) and
the zero-temperature limit map with its ray oracle
(:mod:`kms_cayley.limits`).
"""

from .config import DEFAULT_CONFIG, SolverConfig
from .cones import Fan, build_fan, boundary_decompose, membership, sphere_grid
from .errors import (ConvergenceError, DomainError, EndpointMismatchError,
                     KmsCayleyError, NoSphereError, OracleUnavailableError,
                     RankZeroError, TabulatedDomainError, UsageError)
from .groups import (Ball, GroupSpec, Word, abelianized, ball, builtin_spec,
                     endpoint, free_abelian_spec, load_group, parse_word,
                     same_endpoint, spec_from_json, spec_to_json,
                     validate_spec)
from .limits import (HMapCache, LimitPoint, associated_ray, h_center, h_eval,
                     kms_infinity_eval, n_infinity_sample, ray_limit,
                     ray_limit_iterates)
from .solvers import (PartitionData, beta_of_u, critical_beta,
                      min_log_partition, power_sum_root, radial_root,
                      u_of_beta)
from .states import (DihedralHarmonic, ExponentialHarmonic, HarmonicVector,
                     KmsState, QBetaPoint, TabulatedHarmonic, critical_state,
                     cylinder_mass, harmonic_residual, kms_condition_check,
                     psi_eval, sample_q_beta, state_eval)

__version__ = "0.1.0"
