"""Mirror-Langevin sampling on constrained domains."""

from .exceptions import (AlphaError, BudgetError, ConvergenceError, DomainError, EmptyError,
                         MirrorLangevinError, ParseError, ShapeError, SizeError, ValidationError,
                         WeightError)
from .mirror import (BoxLogBarrier, Euclidean, HessianFactor, MirrorMap, SimplexBarrier,
                     WeightedSimplexBarrier, bregman_divergence, check_self_concordance,
                     hessian_factor, local_dual_norm, local_norm, make_mirror_map, mirror_dual_grad,
                     mirror_grad, mirror_value)
from .potentials import (ConvexityProfile, DirichletPotential, LogisticDataset, LogisticPotential,
                         Potential, QuadraticPotential, ZeroPotential, logistic_lipschitz_bound,
                         logistic_smoothness_bound, potential_grad, potential_value, profile_blr,
                         profile_dirichlet, profile_simplex_quadratic)
from .samplers import (ChainState, SamplerConfig, Trajectory, iterations_strong, iterations_weak,
                       mla_diffusion_step, mla_half_step, mla_step, pla_step, project_box,
                       project_simplex, run_chain, sample_from_mixture, step_size_strong,
                       step_size_weak, ula_step)
from .transport import (EmpiricalMeasure, empirical_bregman_cost, empirical_w2_sq,
                        min_cost_assignment, per_coordinate_moments, posterior_mean_error)
from .oracle import (RejectionSpec, rejection_sample, sample_dirichlet_gamma, sample_uniform_box,
                     sample_uniform_l1_ball)

from .estimators import BayesianLogisticRegressionMLA, MirrorLangevinSampler

__version__ = "0.1.0"
