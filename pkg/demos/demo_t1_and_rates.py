# Graded first-order deformations of cone singularities, and the decay
# rates they predict for the asymptotically conical Calabi-Yau metrics on
# their smoothings.
#
# Everything below is exact rational arithmetic.

import random
from fractions import Fraction

from conedeform import (Perturbation, RateInput, cubic_cone,
                        deformation_weight, ordinary_double_point,
                        predicted_rate, t1_graded, two_quadric_cone)
from conedeform.poly import Polynomial

# ---------------------------------------------------------------------------
# The cubic cone {z1^3 + z2^3 + z3^3 + z4^3 = 0} in C^4.
#
# Its graded deformation module is C[z]/<z1^2, .., z4^2>, so the dimensions
# at weights -3..1 are the squarefree-monomial counts 1, 4, 6, 4, 1.

cubic = cubic_cone()
report = t1_graded(cubic, -6, 4)
print("cubic cone T1 table:")
for j in range(-6, 5):
    bar = "#" * report.dimension(j)
    print(f"  weight {j:+d}: dim {report.dimension(j)}  {bar}")
print(f"  detected window: {report.window}")
print()

# Perturb the cubic by a generic inhomogeneous polynomial of degree <= 2.
# The weight of the deformation is the top weight with nonvanishing class:
# quadratic part -> -1, linear part -> -2, constant -> -3.

rng = random.Random(0)
z = [Polynomial.variable(4, i) for i in range(4)]


def generic(parts):
    g = Polynomial.zero(4)
    if "quadratic" in parts:
        for i in range(4):
            for j in range(i + 1, 4):
                g = g + Fraction(rng.randint(1, 9), rng.randint(1, 3)) * z[i] * z[j]
    if "linear" in parts:
        for i in range(4):
            g = g + Fraction(rng.randint(1, 9), rng.randint(1, 3)) * z[i]
    if "constant" in parts:
        g = g + Fraction(rng.randint(1, 9), rng.randint(1, 3))
    return Perturbation([g], [max(g.degree(), 0)])


print("cubic smoothing regimes (n = 3, alpha = 2):")
for parts in (("quadratic", "linear", "constant"),
              ("linear", "constant"),
              ("constant",)):
    res = deformation_weight(cubic, generic(parts))
    rate = predicted_rate(RateInput(3, Fraction(2), abs(res.weight)))
    print(f"  parts {'+'.join(parts):28s} weight {res.weight}   "
          f"lambda = {rate.lambda1}")
print()

# ---------------------------------------------------------------------------
# The ordinary double point: only the constant survives; a pure coordinate
# perturbation like G = z3 has vanishing first-order class, and the tool
# flags it instead of guessing the (higher-order) weight.

odp = ordinary_double_point(3)
flagged = deformation_weight(odp, Perturbation([Polynomial.variable(4, 2)], [1]))
print("ODP with G = z3:", flagged.weight)
for note in flagged.notes:
    print("  note:", note)
print()

# ---------------------------------------------------------------------------
# The two-quadric cone in C^5: the (-eps, -eps) smoothing sits at weight -2
# and gives lambda = 6.  (The full graded table also has pieces at weights
# -1 and 0; see the README for why that matters.)

tq = two_quadric_cone()
print("two-quadric cone T1 dims:", t1_graded(tq, -3, 1).dims())
eps = Polynomial.constant(5, -1)
res = deformation_weight(tq, Perturbation([eps, eps], [0, 0]))
rate = predicted_rate(RateInput(3, Fraction(2), abs(res.weight)))
print(f"(-eps,-eps) weight {res.weight}, lambda = {rate.lambda1}")
