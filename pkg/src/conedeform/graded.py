"""Graded deformation algebra of complete-intersection cone singularities.

For a cone C = {F_1 = ... = F_m = 0} in C^N with F_i homogeneous of degree
d_i, the weight-j piece of the first-order deformation space is the
cokernel

    R(j+1)^N --Jac--> R(d_1+j) (+) ... (+) R(d_m+j) --> T1(j) --> 0,

where R is the coordinate ring of C and Jac multiplies by the partial
derivatives of the F_i.  Everything here is exact rational linear algebra;
quotient bases are monomial, chosen degrevlex with the echelon complement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .poly import Polynomial, monomials_of_degree


class InhomogeneousGeneratorError(ValueError):
    pass


class DegreeMismatchError(ValueError):
    pass


class ConeSingularity:
    """Defining data {F_i, d_i} of a complete-intersection affine cone.

    Smoothness and projective normality of the projectivized base are
    assumed, not verified; reports downstream carry that caveat.
    """

    def __init__(self, ambient_dim, defining):
        if ambient_dim <= 0:
            raise ValueError("ambient dimension must be positive")
        defining = [(f, int(d)) for f, d in defining]
        if not 1 <= len(defining) < ambient_dim:
            raise ValueError("codimension must satisfy 1 <= m < N")
        for f, d in defining:
            if f.nvars != ambient_dim:
                raise ValueError("generator has wrong variable count")
            if f.is_zero() or not f.is_homogeneous(d):
                raise InhomogeneousGeneratorError(
                    f"generator {f} is not homogeneous of degree {d}")
        self.ambient_dim = ambient_dim
        self.defining = tuple(defining)
        self._degree_cache = {}
        self._jac_cache = {}

    @property
    def codim(self):
        return len(self.defining)

    def degrees(self):
        return [d for _, d in self.defining]

    def __repr__(self):
        gens = ", ".join(str(f) for f, _ in self.defining)
        return f"ConeSingularity(C^{self.ambient_dim}; {gens})"


@dataclass
class GradedBasis:
    degree: int
    representatives: list        # monomial Polynomials spanning R(j)
    ambient_dim: int             # dim C[Z]_j
    quotient_dim: int


@dataclass
class T1Report:
    j_range: tuple
    weights: dict                # j -> (dim, cokernel basis of m-tuples)
    window: tuple | None         # (min j, max j) with nonzero dim

    def dimension(self, j):
        return self.weights[j][0]

    def dims(self):
        return {j: dw[0] for j, dw in self.weights.items()}


class _DegreeData:
    """Monomial bookkeeping for one graded piece of the quotient ring."""

    def __init__(self, cone, j):
        self.degree = j
        self.monomials = monomials_of_degree(cone.ambient_dim, j)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        gens = []
        for f, d in cone.defining:
            for m in monomials_of_degree(cone.ambient_dim, j - d):
                prod = Polynomial.monomial(cone.ambient_dim, m) * f
                gens.append(self._vector(prod))
        self.echelon, self.pivots = linalg.row_echelon(gens)
        pivset = set(self.pivots)
        self.free = [i for i in range(len(self.monomials)) if i not in pivset]

    def _vector(self, p):
        v = [Fraction(0)] * len(self.monomials)
        for e, c in p.terms.items():
            v[self.index[e]] = v[self.index[e]] + c
        return v

    def reduce(self, p):
        """Coordinates of p mod the ideal, over the free monomial basis."""
        if p.is_zero():
            return [Fraction(0)] * len(self.free)
        if not p.is_homogeneous(self.degree):
            raise DegreeMismatchError(
                f"expected a homogeneous polynomial of degree {self.degree}")
        res = linalg.reduce_against(self._vector(p), self.echelon, self.pivots)
        return [res[i] for i in self.free]


def _degree_data(cone, j) -> _DegreeData:
    if j not in cone._degree_cache:
        cone._degree_cache[j] = _DegreeData(cone, j)
    return cone._degree_cache[j]


def quotient_basis(cone: ConeSingularity, j: int) -> GradedBasis:
    """Monomial basis of the degree-j piece of the coordinate ring."""
    if j < 0:
        return GradedBasis(j, [], 0, 0)
    data = _degree_data(cone, j)
    reps = [Polynomial.monomial(cone.ambient_dim, data.monomials[i])
            for i in data.free]
    return GradedBasis(j, reps, len(data.monomials), len(data.free))


class _JacobianData:
    def __init__(self, cone, j):
        n = cone.ambient_dim
        src = _degree_data(cone, j + 1) if j + 1 >= 0 else None
        self.targets = [_degree_data(cone, d + j) if d + j >= 0 else None
                        for _, d in cone.defining]
        self.target_dims = [len(t.free) if t else 0 for t in self.targets]
        self.total = sum(self.target_dims)
        self.columns = []
        if src is not None and self.total > 0:
            partials = [[f.derivative(l) for l in range(n)]
                        for f, _ in cone.defining]
            for l in range(n):
                for mi in src.free:
                    mono = Polynomial.monomial(n, src.monomials[mi])
                    col = []
                    for i, t in enumerate(self.targets):
                        if t is None:
                            continue
                        col.extend(t.reduce(mono * partials[i][l]))
                    self.columns.append(col)
        if self.columns:
            img = [list(col) for col in self.columns]
            self.img_echelon, self.img_pivots = linalg.row_echelon(img)
        else:
            self.img_echelon, self.img_pivots = [], []
        self.rank = len(self.img_pivots)
        pivset = set(self.img_pivots)
        self.coker_coords = [i for i in range(self.total) if i not in pivset]


def _jacobian_data(cone, j) -> _JacobianData:
    if j not in cone._jac_cache:
        cone._jac_cache[j] = _JacobianData(cone, j)
    return cone._jac_cache[j]


def jacobian_matrix(cone: ConeSingularity, j: int):
    """Matrix of R(j+1)^N -> (+)_i R(d_i+j) over the monomial quotient bases.

    Rows are the concatenated target coordinates; columns run over N copies
    of the degree-(j+1) basis, variable-major.
    """
    data = _jacobian_data(cone, j)
    return [[col[i] for col in data.columns] for i in range(data.total)]


def _target_vector(cone, element, j):
    """Concatenated quotient-basis coordinates of an m-tuple at weight j."""
    if len(element) != cone.codim:
        raise DegreeMismatchError(
            f"expected a {cone.codim}-tuple, got {len(element)} entries")
    data = _jacobian_data(cone, j)
    vec = []
    any_part = False
    all_zero = True
    for (g, (f, d)), tgt in zip(zip(element, cone.defining), data.targets):
        if not g.is_zero():
            all_zero = False
        part = g.homogeneous_part(d + j) if d + j >= 0 else Polynomial.zero(cone.ambient_dim)
        if not part.is_zero():
            any_part = True
        if tgt is not None:
            vec.extend(tgt.reduce(part))
    if not all_zero and not any_part:
        raise DegreeMismatchError(
            f"no component has a degree part at weight {j}")
    return vec, data


@dataclass
class ReducedClass:
    weight: int
    is_zero: bool
    coordinates: list            # over the cokernel basis at this weight


def reduce_in_t1(cone: ConeSingularity, element, j: int) -> ReducedClass:
    """Class of an m-tuple in T1(j); zero-flag iff it lies in the Jacobian image.

    Inhomogeneous components are first projected to degree d_i + j.  The
    zero tuple reduces to zero; a nonzero tuple with no degree part at this
    weight raises DegreeMismatchError.
    """
    vec, data = _target_vector(cone, element, j)
    if not vec:
        return ReducedClass(j, True, [])
    res = linalg.reduce_against(vec, data.img_echelon, data.img_pivots)
    coords = [res[i] for i in data.coker_coords]
    return ReducedClass(j, all(c == 0 for c in coords), coords)


def t1_graded(cone: ConeSingularity, j_min: int, j_max: int) -> T1Report:
    """Dimensions and explicit cokernel bases of T1(j) for j in [j_min, j_max]."""
    if j_min > j_max:
        raise ValueError("j_min must not exceed j_max")
    weights = {}
    for j in range(j_min, j_max + 1):
        data = _jacobian_data(cone, j)
        dim = data.total - data.rank
        basis = []
        offsets = []
        acc = 0
        for td in data.target_dims:
            offsets.append(acc)
            acc += td
        for coord in data.coker_coords:
            for i, (off, td) in enumerate(zip(offsets, data.target_dims)):
                if off <= coord < off + td:
                    tgt = data.targets[i]
                    mono = Polynomial.monomial(
                        cone.ambient_dim, tgt.monomials[tgt.free[coord - off]])
                    tup = [Polynomial.zero(cone.ambient_dim)
                           for _ in range(cone.codim)]
                    tup[i] = mono
                    basis.append(tuple(tup))
                    break
        weights[j] = (dim, basis)
    nz = [j for j, (d, _) in weights.items() if d > 0]
    window = (min(nz), max(nz)) if nz else None
    return T1Report((j_min, j_max), weights, window)


# ---------------------------------------------------------------------------
# deformation weights


class Perturbation:
    """Tuple {G_i} deforming the cone equations, with declared degrees e_i."""

    def __init__(self, components, declared_degrees, cone=None):
        self.components = tuple(components)
        self.declared_degrees = tuple(int(e) for e in declared_degrees)
        if len(self.components) != len(self.declared_degrees):
            raise ValueError("component/degree count mismatch")
        for g, e in zip(self.components, self.declared_degrees):
            if e < 0:
                raise ValueError("declared degree must be nonnegative")
            if g.degree() > e:
                raise ValueError(f"deg {g} exceeds declared degree {e}")
        if cone is not None:
            self.validate_against(cone)

    def validate_against(self, cone: ConeSingularity):
        if len(self.components) != cone.codim:
            raise ValueError("perturbation length differs from codimension")
        for e, (_, d) in zip(self.declared_degrees, cone.defining):
            if e >= d:
                raise ValueError(f"declared degree {e} not below {d}")


class FirstOrderVanishes:
    """Terminal verdict: every weight's first-order class reduces to zero.

    Detecting the true weight would need higher-order (reduced) classes,
    e.g. after completing the square in the defining equations; this tool
    flags the situation and declines to guess.
    """

    note = ("first-order class vanishes at every weight; the actual "
            "deformation weight is of higher order (completing-the-square "
            "phenomenon) and is not computed")

    def __repr__(self):
        return "FirstOrderVanishes"

    def __eq__(self, other):
        return isinstance(other, FirstOrderVanishes)

    def __hash__(self):
        return hash("FirstOrderVanishes")


@dataclass
class WeightResult:
    weight: object               # int or FirstOrderVanishes
    samples: list                # per-instantiation verdicts
    genericity_warning: bool
    notes: list = field(default_factory=list)

    @property
    def first_order_vanishes(self):
        return isinstance(self.weight, FirstOrderVanishes)


def _random_fraction(rng):
    num = rng.randrange(1, 40)
    den = rng.randrange(1, 12)
    sign = -1 if rng.random() < 0.5 else 1
    return Fraction(sign * num, den)


def _resample(pert: Perturbation, rng) -> Perturbation:
    comps = []
    for g in pert.components:
        comps.append(Polynomial(g.nvars,
                                {e: _random_fraction(rng)
                                 for e in g.terms}))
    return Perturbation(comps, pert.declared_degrees)


def _weight_once(cone, pert):
    """First nonvanishing class, scanning t-orders upward (weights downward)."""
    degrees = cone.degrees()
    tops = [g.degree() - d for g, (_, d) in zip(pert.components, cone.defining)
            if not g.is_zero()]
    if not tops:
        return FirstOrderVanishes()
    w_top = max(tops)
    w_bottom = -max(degrees)
    for w in range(w_top, w_bottom - 1, -1):
        parts = [g.homogeneous_part(d + w) if d + w >= 0
                 else Polynomial.zero(cone.ambient_dim)
                 for g, d in zip(pert.components, degrees)]
        if all(p.is_zero() for p in parts):
            continue
        cls = reduce_in_t1(cone, parts, w)
        if not cls.is_zero:
            return w
    return FirstOrderVanishes()


def deformation_weight(cone: ConeSingularity, pert: Perturbation, *,
                       seed: int = 0, samples: int = 3) -> WeightResult:
    """Weight of the first nonvanishing class of a perturbation family.

    Genericity of coefficients is modelled by re-instantiating every stored
    coefficient with fresh random rationals on the same monomial support;
    the given instance is reported, with a GenericityWarning attached when
    the instantiations disagree.
    """
    pert.validate_against(cone)
    rng = random.Random(seed)
    verdicts = [_weight_once(cone, pert)]
    for _ in range(max(0, samples - 1)):
        verdicts.append(_weight_once(cone, _resample(pert, rng)))
    warn = any(v != verdicts[0] for v in verdicts[1:])
    notes = []
    if isinstance(verdicts[0], FirstOrderVanishes):
        notes.append(FirstOrderVanishes.note)
    if warn:
        notes.append("GenericityWarning: random re-instantiations of the "
                     "perturbation disagree on the weight")
    notes.append("hypothesis (unchecked): the projectivized base is smooth "
                 "and projectively normal")
    return WeightResult(verdicts[0], verdicts, warn, notes)


# ---------------------------------------------------------------------------
# predicted asymptotic rates


@dataclass
class RateInput:
    n: int                       # complex dimension of the smoothing
    alpha: Fraction              # -K_X = alpha * D
    weight_abs: int              # |w|
    compactly_supported: bool = False

    def __post_init__(self):
        self.alpha = Fraction(self.alpha)
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1")
        if self.weight_abs < 1:
            raise ValueError("|w| must be positive")


@dataclass
class RateResult:
    lambda1: Fraction
    metric_rate: Fraction
    notes: list


def predicted_rate(r: RateInput) -> RateResult:
    """lambda_1 = n|w|/(alpha-1) and the induced metric decay rate."""
    lam = Fraction(r.n * r.weight_abs, 1) / (r.alpha - 1)
    cap = Fraction(2 * r.n) if r.compactly_supported else Fraction(2)
    notes = []
    if r.n == 2:
        notes.append("hypothesis note: weight = embedding order is proven "
                     "for n >= 3 only; for n = 2 the identity is expected "
                     "but not established")
    return RateResult(lam, min(cap, lam), notes)


# ---------------------------------------------------------------------------
# stock examples


def cubic_cone() -> ConeSingularity:
    """z1^3 + z2^3 + z3^3 + z4^3 = 0 in C^4."""
    f = Polynomial(4, {tuple(3 if j == i else 0 for j in range(4)): 1
                       for i in range(4)})
    return ConeSingularity(4, [(f, 3)])


def ordinary_double_point(n: int) -> ConeSingularity:
    """Sum of squares in C^(n+1); n is the dimension of the singularity."""
    nv = n + 1
    f = Polynomial(nv, {tuple(2 if j == i else 0 for j in range(nv)): 1
                        for i in range(nv)})
    return ConeSingularity(nv, [(f, 2)])


def two_quadric_cone(lams=None) -> ConeSingularity:
    """{sum z_i^2 = 0, sum lam_i z_i^2 = 0} in C^5, lam_i distinct."""
    if lams is None:
        lams = [Fraction(k + 1) for k in range(5)]
    lams = [Fraction(l) for l in lams]
    if len(set(lams)) != 5:
        raise ValueError("the five weights must be distinct")
    sq = lambda i: tuple(2 if j == i else 0 for j in range(5))
    f1 = Polynomial(5, {sq(i): 1 for i in range(5)})
    f2 = Polynomial(5, {sq(i): lams[i] for i in range(5)})
    return ConeSingularity(5, [(f1, 2), (f2, 2)])
