"""Optimal H2 decentralized control of cone-causal spatially invariant systems.

Core objects: truncated bivariate series (series), rational transfer
functions (rational), delay/outer factorization (factorization), the
synthesis pipeline (synthesis), l-causal state-space realizations
(statespace), and a ring-lattice simulator (lattice).  `coneh2.example`
holds the built-in reference problem with frozen expected values; the CLI
entry point is `coneh2.cli:main`.
"""

from .errors import (AlgebraicLoop, ConeH2Error, DimensionMismatch,
                     IllPosedFeedback, IndexOutOfBox, InvalidInputError,
                     NonScalarLeadingTerm, NotCone, NotRealizableAsLCausal,
                     ProblemValidationError, SingularD, SingularLeadingTerm,
                     UnsupportedInnerStructure, WraparoundRisk)
from .factorization import InnerOuter, apply_inner_adjoint, inner_outer
from .lattice import (LatticeSignal, LatticeSystem, impulse_energy, simulate,
                      verify_cone_support)
from .rational import (RationalTransfer, expand, is_outer,
                       lambda_roots_on_circle, rat_add, rat_mul, rat_sub,
                       rational)
from .series import (BiSeries, LambdaSeries, SupportBox, add, anticausal_part,
                     causal_part, h2_norm_sq, invert_causal, is_cone_causal,
                     mul, shift_temporal, spatial_slice, torus_eval)
from .statespace import (LRealization, ZMatrix, expand_realization,
                         feedback_realize_K, realize_cone_polynomial,
                         realize_rational, ss_add, ss_inverse, ss_mul,
                         stability_probe)
from .synthesis import (ModelMatchingFamily, NormReport, Problem,
                        SynthesisResult, assemble_G1, centralized_cost,
                        closed_loop_norm, controller_K, decompose,
                        optimal_cost, solve_model_matching, sweep, synthesize,
                        validate_problem, youla_Q)

__version__ = "0.1.0"
