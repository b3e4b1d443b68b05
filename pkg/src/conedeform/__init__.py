"""Deformation invariants of affine cone singularities, two-chart Cech
obstruction calculus on P^1, Calabi-ansatz cone metrics, and a weighted
dbar/Beltrami solver on the punctured disk."""

from .rational import GaussianRational, gaussian_sqrt
from .poly import Polynomial
from .graded import (ConeSingularity, Perturbation, GradedBasis, T1Report,
                     RateInput, RateResult, FirstOrderVanishes, WeightResult,
                     quotient_basis, jacobian_matrix, t1_graded, reduce_in_t1,
                     deformation_weight, predicted_rate, cubic_cone,
                     ordinary_double_point, two_quadric_cone)

__version__ = "0.1.0"
