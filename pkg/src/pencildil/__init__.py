"""Minimal isometric and unitary dilations of contractive linear pencils."""

from .errors import (CapExceeded, ContainmentViolation, DimensionMismatch,
                     FactorMismatch, NoConvergence, NotADilation,
                     NotContractive, NotHermitian, NotIsometric, NotPSD,
                     PencilError, ShapeMismatch)
from .factorization import (FejerRieszFactor, GramCoefficients,
                            bauer_factorize, gram_coefficients, outer_roots,
                            outer_surrogate_check, verify_factorization)
from .isodil import (BuiltinExample, KPlusVector, StructuredIsometricPencil,
                     apply, apply_adjoint, build_canonical, builtin_example,
                     check_dilation, check_minimality, check_uniform,
                     coefficient_norms, core_isometry_defect)
from .linalg import (DEFAULT_TOLERANCES, SubspaceBasis, ToleranceProfile,
                     numerical_rank, orthocomplement_within,
                     orthonormal_range, projector, psd_sqrt)
from .pencil import (LinearPencil, PencilClass, PencilKind, classify,
                     evaluate, symmetrized_multipower, unit_circle_grid,
                     word_apply)
from .reporting import Report
from .unidil import (CoreSubspaces, KVector, QPencil, UnitaryDilation,
                     apply_u, apply_u_adjoint, assemble_theta, build_q,
                     build_unitary, check_biinner, check_minimality_unitary,
                     check_uniform_unitary, coefficient_norms_unitary,
                     compression_tower, core_subspaces, verify_q_identities)
from .verify import (CanonicalChain, DemoName, canonical_chain,
                     classical_slice, demo, equivalence_falsifier,
                     run_pipeline, seeded_corpus, unitarity_report)

__version__ = "0.1.0"
