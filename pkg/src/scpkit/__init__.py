"""Exact subnormal completion for one- and two-variable weighted shifts."""
from .errors import (ConsistencyError, NoCompletion, NotSingular, OrderError, ParseError,
                     PositivityError, RangeError, ScpError, UnsupportedDegree, ValidationError)
from .exactla import Mat, QuadExt, Rat, det, flat_complete, is_psd, kernel_basis, rank, solve_in_range
from .moments2d import (Monomial, MomentMat, MomentSeq2, PolyRelation, column_relations,
                        hyponormality_matrix, localizing_matrix, moment_matrix, riesz_eval,
                        translate)
from .scp1d import WeightSeq1, scc_check, scc_complete
from .scp2d import (CompletionResult, ObstructionReport, QuadraticData, build_flat_m2,
                    flat_obstruction_check, measure_from_flat, quadratic_scp, singular_m2,
                    verify_completion)
from .shifts import (AtomicMeasure1, AtomicMeasure2, RecursiveMeasure1, WeightFamily2,
                     abc_measure, marginals, moments_from_weights, moments_of_measure,
                     recursive_moments, restricted_measure, weights_from_measure,
                     weights_from_moments)

__version__ = "0.1.0"
