"""jetphase: exact symbolic stationary-phase and star-product calculus.

Everything is computed over Gaussian rationals, truncated at a caller-chosen
graded order, with no floating point anywhere.
"""

from .errors import (ConvergenceError, DegenerateCriticalPointError,
                     InputShapeError, JetPhaseError, NondegeneracyError,
                     NotCriticalError, NotNuRegularError, PreconditionError,
                     SingularJacobianError, SplitOrderingError)
from .scalars import Scalar, as_scalar, format_scalar, mat_det, mat_inv, parse_scalar
from .jets import (AUX, NU, STANDARD, GradingContext, Jet, TruncationSpec,
                   graded_component, jet_derive, jet_exp, jet_log, jet_mul,
                   jet_ring_op, jet_substitute, truncate)
from .operators import (ANTI, NORMAL, FormalOperator, OperatorClassReport,
                        classify, constant_part, full_symbol, op_apply,
                        op_compose, op_transpose, reorder, truncate_operator)
from .filtered import (DELTAKER_VS_CONST, DIV_VS_MULT, MULT_VS_ANNIH,
                       FiltrationSpec, SplitSpec, conjugate, factorize,
                       op_exp, op_log)
from .distributions import (BetaForm, PointDistribution, apply_distribution,
                            beta_form, distribution_from_operator,
                            is_nondegenerate, is_oscillatory,
                            pushforward_diffeo)
from .foi import (HessianData, PhaseDensityPair, VectorField, check_foi_axiom,
                  check_strong, divergence, foi_distribution, hessian_data,
                  phase_remainder, recover_phase)
from .star import (StarProduct, is_natural_star, left_mult_symbol, moyal_star,
                   star_exponential, star_multiply, star_multiply_full,
                   two_point_distribution)

__version__ = "0.1.0"
