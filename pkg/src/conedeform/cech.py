"""Two-chart Cech obstruction calculus on P^1.

A neighborhood of a curve in a surface is described by its transition on
the standard two-chart cover: with chart-1 coordinates (z, y), y cutting
the curve,

    y2 = c1(z) y + c2(z) y^2 + ...        c1 = gamma * z^(-d), d = deg N,
    z2 = phi0(z) + phi1(z) y + ...        phi0 = gamma0 / z.

Obstruction classes live in H^1 of twisted line bundles on P^1, computed
on this cover: a cochain is a Laurent polynomial f(z), the coboundaries
for twist m are a(z) + z^m b(1/z), so the class of f is its coefficient
vector over the forbidden exponent window (m, 0).

Normalization kills the offending series coefficients order by order with
chart-polynomial coordinate changes.  The kernels of those solves carry
the lifting parameters; they are tracked symbolically as polynomials over
Q(i) in up to PARAM_BUDGET parameters, and vanishing loci of later
obstructions are solved exactly (affine systems, univariate quadratics).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .laurent import LaurentPoly, YSeries, invert_chart_map
from .poly import Polynomial
from .rational import GaussianRational, gaussian_sqrt

PARAM_BUDGET = 8
PARAM_NAMES = [f"a{i + 1}" for i in range(PARAM_BUDGET)]


class NotNormalizedError(RuntimeError):
    pass


class TruncationExhaustedError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# windows and classes


@dataclass(frozen=True)
class CoboundaryWindow:
    """Exponent window of H^1(P^1, O(m)) on the two-chart cover.

    Coboundaries are a(z) + z^m b(1/z); the exponents in (m, 0) are not
    reachable, and dim H^1 = max(0, -m-1).
    """

    twist: int

    @property
    def forbidden_exponents(self):
        if self.twist >= -1:
            return []
        return list(range(-1, self.twist, -1))

    def dimension(self):
        return max(0, -self.twist - 1)


def h1_class(f: LaurentPoly, window: CoboundaryWindow):
    """Class of f in the twisted two-chart H^1: coefficients over the
    forbidden window, ordered -1, -2, ..., m+1."""
    return [f.coefficient(e) for e in window.forbidden_exponents]


# ---------------------------------------------------------------------------
# transitions


def _is_param_poly(c):
    return isinstance(c, Polynomial)


def _const_of(c):
    """Scalar value of a constant coefficient (plain or parameter-poly)."""
    if _is_param_poly(c):
        if c.degree() > 0:
            raise ValueError("coefficient depends on lifting parameters")
        return GaussianRational.coerce(c.constant_term() if not c.is_zero() else 0)
    return GaussianRational.coerce(c)


class TruncatedTransition:
    """Two-chart transition germ, truncated at a fixed order in y."""

    def __init__(self, series_y: YSeries, series_z: YSeries):
        if series_y.order != series_z.order:
            raise ValueError("series orders differ")
        if not series_y.coeffs[0].is_zero():
            raise ValueError("transition must preserve the curve (c0 = 0)")
        if not series_y.coeffs[1].is_monomial():
            raise ValueError("c1 must be a unit Laurent monomial")
        if not series_z.coeffs[0].is_monomial():
            raise ValueError("phi0 must be a unit Laurent monomial")
        e0, _ = series_z.coeffs[0].monomial_data()
        if e0 != -1:
            raise ValueError("base transition must be phi0 = gamma0/z")
        self.series_y = series_y
        self.series_z = series_z

    @property
    def order(self):
        return self.series_y.order

    def c(self, a):
        return self.series_y.coeffs[a]

    def phi(self, a):
        return self.series_z.coeffs[a]

    @property
    def normal_degree(self):
        e, _ = self.c(1).monomial_data()
        return -e

    @property
    def gamma(self):
        return _const_of(self.c(1).monomial_data()[1])

    @property
    def gamma0(self):
        return _const_of(self.phi(0).monomial_data()[1])

    def map_coeffs(self, fn):
        return TruncatedTransition(self.series_y.map_coeffs(fn),
                                   self.series_z.map_coeffs(fn))

    def __eq__(self, other):
        return (isinstance(other, TruncatedTransition)
                and self.series_y == other.series_y
                and self.series_z == other.series_z)

    def __repr__(self):
        return (f"TruncatedTransition(order={self.order}, "
                f"d={self.normal_degree})")


def _lift_coeff(c):
    if _is_param_poly(c):
        if c.nvars != PARAM_BUDGET:
            raise ValueError("parameter polynomials must use the shared budget")
        return c
    return Polynomial.constant(PARAM_BUDGET, GaussianRational.coerce(c))


def lift_params(t: TruncatedTransition) -> TruncatedTransition:
    return t.map_coeffs(_lift_coeff)


def unlift_params(t: TruncatedTransition) -> TruncatedTransition:
    """Strip constant parameter polynomials back to Q(i) scalars."""
    def down(c):
        if _is_param_poly(c):
            if c.degree() > 0:
                raise ValueError("free parameters remain")
            return GaussianRational.coerce(c.constant_term() if not c.is_zero() else 0)
        return c
    return t.map_coeffs(down)


def _poly_str(p) -> str:
    from .poly import format_poly
    if _is_param_poly(p):
        return format_poly(p, names=PARAM_NAMES)
    return str(p)


# ---------------------------------------------------------------------------
# obstruction extraction


@dataclass
class ObstructionClass:
    kind: str                    # "splitting" | "comfortable"
    order: int
    window: CoboundaryWindow
    vector: list                 # coefficients over the forbidden window
    cocycle: str                 # mixed-frame representative, for reports

    def vanishes(self):
        return all(c == 0 for c in self.vector)

    def vector_strings(self):
        return [_poly_str(c) for c in self.vector]


def _check_normalized(t, k, need_comfortable_through):
    for a in range(1, k):
        if not t.phi(a).is_zero():
            raise NotNormalizedError(
                f"base series has a nonzero order-{a} term")
    for a in range(2, need_comfortable_through + 2):
        if a <= t.order and not t.c(a).is_zero():
            raise NotNormalizedError(
                f"normal series has a nonzero order-{a} term")


def splitting_obstruction(t: TruncatedTransition, k: int) -> ObstructionClass:
    """Obstruction to k-splitting: the class of the order-k base term.

    Requires the base series clean through order k-1.  The window is the
    twist of Theta_P1 (x) N^(-k); the representative is normalized to the
    chart-1 frame [y^k] d/dz via d/dz2 = -(z^2/gamma0) d/dz.
    """
    if k < 1:
        raise ValueError("order must be positive")
    if k > t.order:
        raise TruncationExhaustedError(
            f"series truncated at order {t.order}, cannot see order {k}")
    for a in range(1, k):
        if not t.phi(a).is_zero():
            raise NotNormalizedError(
                f"base series has a nonzero order-{a} term below {k}")
    d = t.normal_degree
    phi_k = t.phi(k)
    inv_g0 = GaussianRational(1) / t.gamma0
    f = -(phi_k.shift(2) * _embed_scalar(inv_g0, phi_k))
    window = CoboundaryWindow(2 - k * d)
    cocycle = f"({phi_k.to_string(coeff_str=_poly_str)})*[y^{k}] d/dz2"
    return ObstructionClass("splitting", k, window, h1_class(f, window), cocycle)


def comfortable_obstruction(t: TruncatedTransition, k: int) -> ObstructionClass:
    """Obstruction to k-comfortable embedding: class of the order-(k+1)
    normal term, relative to the lifting the transition is adapted to.

    Requires the base series clean through order k and the normal series
    clean through order k.  The window is the twist of N^(-k)."""
    if k < 1:
        raise ValueError("order must be positive")
    if k + 1 > t.order:
        raise TruncationExhaustedError(
            f"series truncated at order {t.order}, cannot see order {k + 1}")
    _check_normalized(t, k + 1, k - 1)
    d = t.normal_degree
    g = t.c(k + 1).shift(d) * _embed_scalar(GaussianRational(1) / t.gamma, t.c(k + 1))
    f = -g
    window = CoboundaryWindow(-k * d)
    cocycle = f"({t.c(k + 1).to_string(coeff_str=_poly_str)})*[y^{k + 1}] d/dy2"
    return ObstructionClass("comfortable", k, window, h1_class(f, window), cocycle)


def _embed_scalar(s: GaussianRational, like: LaurentPoly):
    """Scalar as a degree-0 Laurent factor matching the coefficient type."""
    sample = next(iter(like.coeffs.values()), None)
    if sample is not None and _is_param_poly(sample):
        return LaurentPoly.monomial(0, Polynomial.constant(PARAM_BUDGET, s))
    return LaurentPoly.monomial(0, s)


# ---------------------------------------------------------------------------
# coordinate-change solves


def _gamma_pow(t, k):
    return t.gamma ** k


def _solve_z_step(t, k, f: LaurentPoly):
    """Chart polynomials (p, u) with phi_k killed; f = -(z^2/gamma0) phi_k.

    The coboundary equation is p(z) + (gamma^k/gamma0) z^m u(gamma0/z) = f
    with m = 2 - k*d; the forbidden window of f must already vanish."""
    d = t.normal_degree
    m = 2 - k * d
    g0, gk = t.gamma0, _gamma_pow(t, k)
    p = {}
    u = {}
    for e, c in f.coeffs.items():
        if e >= 0:
            p[e] = c
        elif e <= m:
            j = m - e
            scale = g0 ** (1 - j) / gk
            u[j] = c * _as_same_type(scale, c)
        else:
            raise ValueError("forbidden window not cleared before solving")
    return LaurentPoly(p), LaurentPoly(u)


def _solve_y_step(t, k, g: LaurentPoly):
    """Chart polynomials (q, v) with c_{k+1} killed; g = c_{k+1}/c1.

    The equation is q(z) - gamma^k z^m v(gamma0/z) = g with m = -k*d."""
    d = t.normal_degree
    m = -k * d
    g0, gk = t.gamma0, _gamma_pow(t, k)
    q = {}
    v = {}
    for e, c in g.coeffs.items():
        if e >= 0:
            q[e] = c
        elif e <= m:
            j = m - e
            scale = GaussianRational(-1) / (gk * g0 ** j)
            v[j] = c * _as_same_type(scale, c)
        else:
            raise ValueError("forbidden window not cleared before solving")
    return LaurentPoly(q), LaurentPoly(v)


def _as_same_type(s: GaussianRational, like):
    if _is_param_poly(like):
        return Polynomial.constant(PARAM_BUDGET, s)
    return s


def _kernel_basis_z(t, k):
    """Kernel of the order-k base solve: pairs (p, u) leaving phi_k = 0.

    Nontrivial only when m = 2 - k*d >= 0; dimension m + 1 matches
    H^0(Theta_P1 (x) N^(-k))."""
    d = t.normal_degree
    m = 2 - k * d
    if m < 0:
        return []
    g0, gk = t.gamma0, _gamma_pow(t, k)
    out = []
    for e in range(m + 1):
        coeff = -(g0 ** (1 - m + e)) / gk
        out.append((LaurentPoly.monomial(e, GaussianRational(1)),
                    LaurentPoly.monomial(m - e, coeff)))
    return out


def apply_z_step(t: TruncatedTransition, p: LaurentPoly, u: LaurentPoly,
                 k: int) -> TruncatedTransition:
    """New transition after z1 -> z1 + p(z1) y1^k and z2 -> z2 + u(z2) y2^k."""
    K = t.order
    Z, Y = invert_chart_map(p, LaurentPoly.zero(), k, K)
    y2 = t.series_y.substitute(Z, Y)
    z2 = t.series_z.substitute(Z, Y)
    if not u.is_zero():
        z2 = z2 + z2.compose_laurent(u) * (y2 ** k)
    return TruncatedTransition(y2, z2)


def apply_y_step(t: TruncatedTransition, q: LaurentPoly, v: LaurentPoly,
                 k: int) -> TruncatedTransition:
    """New transition after y1 -> y1 + q(z1) y1^(k+1), y2 -> y2 + v(z2) y2^(k+1)."""
    K = t.order
    Z, Y = invert_chart_map(LaurentPoly.zero(), q, k, K)
    y2 = t.series_y.substitute(Z, Y)
    z2 = t.series_z.substitute(Z, Y)
    if not v.is_zero():
        y2 = y2 + z2.compose_laurent(v) * (y2 ** (k + 1))
    return TruncatedTransition(y2, z2)


def invert_transition(t: TruncatedTransition) -> TruncatedTransition:
    """The chart-swapped germ: (z1, y1) as series in (z2, y2).

    Solved by fixed-point iteration from the leading terms z1 = gamma0/z2,
    y1 = y2/c1(z1); exact through the truncation order.  Composing back
    (substituting the inverse into the original series) returns the
    identity pair, which is the two-chart form of the cocycle identity."""
    K = t.order
    g0 = t.gamma0
    # leading inverses
    Z = YSeries(K, [LaurentPoly.monomial(-1, _as_same_type(
        g0, t.phi(0).monomial_data()[1]))])
    e1, c1coef = t.c(1).monomial_data()
    Y = YSeries(K, [LaurentPoly.zero(),
                    LaurentPoly.monomial(-e1, _inv_like(c1coef))])
    for _ in range(K + 1):
        # y1 = (y2 - sum_{a>=2} c_a(z1) y1^a) / c1(z1)
        tail = YSeries.zero(K)
        ypow = Y * Y
        for a in range(2, K + 1):
            ca = t.c(a)
            if not ca.is_zero():
                tail = tail + Z.compose_laurent(ca) * ypow
            if a < K:
                ypow = ypow * Y
        c1_at = Z.compose_laurent(t.c(1))
        Yn = (YSeries.identity_y(K) - tail) * c1_at.inverse()
        # z1 = gamma0 / (z2 - sum_{a>=1} phi_a(z1) y1^a)
        ztail = YSeries.zero(K)
        ypow = Yn
        for a in range(1, K + 1):
            pa = t.phi(a)
            if not pa.is_zero():
                ztail = ztail + Z.compose_laurent(pa) * ypow
            if a < K:
                ypow = ypow * Yn
        base = YSeries.identity_z(K) - ztail
        Zn = base.inverse() * LaurentPoly.monomial(
            0, _as_same_type(g0, t.phi(0).monomial_data()[1]))
        if Zn == Z and Yn == Y:
            Z, Y = Zn, Yn
            break
        Z, Y = Zn, Yn
    return TruncatedTransition(Y, Z)


def _inv_like(c):
    from .laurent import _inv_coeff
    return _inv_coeff(c)


def roundtrip_defect(t: TruncatedTransition):
    """Series defect of composing the germ with its inverse; exactly zero
    when the truncated inversion is consistent (cocycle identity on the
    two-chart cover)."""
    inv = invert_transition(t)
    Z1 = t.series_z.substitute(inv.series_z, inv.series_y)
    Y1 = t.series_y.substitute(inv.series_z, inv.series_y)
    K = t.order
    return (Z1 - YSeries.identity_z(K), Y1 - YSeries.identity_y(K))


def with_lifting_family(t: TruncatedTransition, k: int, first_param: int = 0):
    """Adjoin the symbolic order-k lifting family to a transition whose
    order-k splitting obstruction vanishes identically.

    Returns (family transition, parameter indices used)."""
    lifted = lift_params(t)
    obs = splitting_obstruction(lifted, k)
    if not obs.vanishes():
        raise NotNormalizedError("order-k splitting obstruction is nonzero")
    f = -(lifted.phi(k).shift(2) * _embed_scalar(
        GaussianRational(1) / lifted.gamma0, lifted.phi(k)))
    p, u = _solve_z_step(lifted, k, f)
    params = []
    for i, (pk, uk) in enumerate(_kernel_basis_z(lifted, k)):
        idx = first_param + i
        if idx >= PARAM_BUDGET:
            raise RuntimeError("lifting-parameter budget exhausted")
        a = Polynomial.variable(PARAM_BUDGET, idx)
        p = p + pk.map_coeffs(lambda c: a * _lift_coeff(c))
        u = u + uk.map_coeffs(lambda c: a * _lift_coeff(c))
        params.append(idx)
    return apply_z_step(lifted, p, u, k), params


# ---------------------------------------------------------------------------
# vanishing loci over the parameter ring


@dataclass
class Locus:
    kind: str                    # all | points | affine | empty | unknown
    points: list = field(default_factory=list)     # for kind == points
    substitution: dict = field(default_factory=dict)  # for kind == affine
    description: str = ""


def _linear_data(p: Polynomial, used):
    """(constant, coefficient list) of an affine parameter polynomial."""
    const = GaussianRational.coerce(p.constant_term() if not p.is_zero() else 0)
    coeffs = []
    for i in used:
        e = [0] * PARAM_BUDGET
        e[i] = 1
        coeffs.append(GaussianRational.coerce(p.coefficient(tuple(e))))
    return const, coeffs


def _univariate_roots(p: Polynomial, var: int):
    """Q(i)-roots of a parameter polynomial of degree <= 2 in one variable."""
    deg = p.degree()
    c0 = GaussianRational.coerce(p.constant_term() if not p.is_zero() else 0)
    e1 = [0] * PARAM_BUDGET
    e1[var] = 1
    c1 = GaussianRational.coerce(p.coefficient(tuple(e1)))
    e2 = list(e1)
    e2[var] = 2
    c2 = GaussianRational.coerce(p.coefficient(tuple(e2)))
    if deg <= 0:
        return None if c0 != 0 else "all"
    if c2 == 0:
        return [(-c0) / c1]
    disc = c1 * c1 - 4 * c2 * c0
    root = gaussian_sqrt(disc)
    if root is None:
        return []
    r1 = (-c1 + root) / (2 * c2)
    r2 = (-c1 - root) / (2 * c2)
    return [r1] if r1 == r2 else [r1, r2]


def vanishing_locus(vector, active) -> Locus:
    """Common zero locus of parameter polynomials over the active params.

    Handles: identically zero, affine systems (exactly), and univariate
    systems of degree <= 2 (exact Q(i) roots).  Anything else is reported
    as 'unknown' and treated as nonvanishing by the caller."""
    polys = [c if _is_param_poly(c)
             else Polynomial.constant(PARAM_BUDGET, GaussianRational.coerce(c))
             for c in vector]
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return Locus("all", description="identically zero")
    used = sorted(active)
    if all(p.degree() <= 1 for p in polys):
        rows = []
        rhs = []
        for p in polys:
            const, coeffs = _linear_data(p, used)
            rows.append(coeffs)
            rhs.append(-const)
        cols = [[rows[r][j] for r in range(len(rows))] for j in range(len(used))]
        part = linalg.solve(cols, rhs)
        if part is None:
            return Locus("empty", description="no common zero")
        null = linalg.nullspace(cols) if used else []
        if not used or not any(any(x != 0 for x in b) for b in null):
            # isolated point
            point = {used[j]: part[j] for j in range(len(used))}
            return Locus("points", points=[point],
                         description=_point_str(point))
        # affine subspace: express pivot params through the free ones
        aug = [row + [r] for row, r in zip(rows, rhs)]
        ech, pivots = linalg.row_echelon(aug)
        sub = {}
        for row, pv in zip(ech, pivots):
            if pv == len(used):
                return Locus("empty", description="no common zero")
            expr = Polynomial.constant(PARAM_BUDGET, row[len(used)])
            for j in range(len(used)):
                if j != pv and row[j] != 0:
                    expr = expr - Polynomial.variable(PARAM_BUDGET, used[j]) * row[j]
            sub[used[pv]] = expr
        desc = ", ".join(f"{PARAM_NAMES[i]} = {_poly_str(e)}"
                         for i, e in sorted(sub.items()))
        return Locus("affine", substitution=sub, description=desc)
    vars_in_play = set()
    for p in polys:
        for e in p.terms:
            for i, k in enumerate(e):
                if k:
                    vars_in_play.add(i)
    if len(vars_in_play) == 1 and all(p.degree() <= 2 for p in polys):
        var = vars_in_play.pop()
        roots = None
        for p in polys:
            r = _univariate_roots(p, var)
            if r == "all":
                continue
            if r is None:
                return Locus("empty", description="no common zero")
            rset = r if roots is None else [x for x in roots if any(x == y for y in r)]
            roots = rset
        if not roots:
            return Locus("empty", description="no Q(i) zero")
        pts = [{var: r} for r in roots]
        return Locus("points", points=pts,
                     description=" or ".join(_point_str(p) for p in pts))
    # nonlinear in several parameters: no exact solve; fall back to the
    # natural chain (all parameters zero) when it lies on the locus
    zero = {i: Polynomial.zero(PARAM_BUDGET) for i in range(PARAM_BUDGET)}
    full = [Polynomial.variable(PARAM_BUDGET, i) for i in range(PARAM_BUDGET)]
    for i in used:
        full[i] = Polynomial.zero(PARAM_BUDGET)
    if all(p.substitute(full).is_zero() for p in polys):
        pt = {i: GaussianRational(0) for i in used}
        return Locus("points", points=[pt],
                     description="natural chain (all parameters 0); "
                                 "nonlinear locus only partially enumerated")
    return Locus("unknown",
                 description="vanishing locus not solvable exactly "
                             "(nonlinear in several parameters)")


def _point_str(point: dict) -> str:
    return ", ".join(f"{PARAM_NAMES[i]} = {v}" for i, v in sorted(point.items()))


def _substitute_state(t: TruncatedTransition, sub: dict) -> TruncatedTransition:
    full = [Polynomial.variable(PARAM_BUDGET, i) for i in range(PARAM_BUDGET)]
    for i, val in sub.items():
        full[i] = val if _is_param_poly(val) else Polynomial.constant(
            PARAM_BUDGET, GaussianRational.coerce(val))
    return t.map_coeffs(lambda c: c.substitute(full))


# ---------------------------------------------------------------------------
# the normalization driver


@dataclass
class LedgerEntry:
    order: int
    kind: str
    chain: str
    window: int
    class_vector: list
    locus: Locus
    cocycle: str

    def nonzero_at_base(self):
        for c in self.class_vector:
            p = c if _is_param_poly(c) else Polynomial.constant(
                PARAM_BUDGET, GaussianRational.coerce(c))
            base = p.constant_term() if not p.is_zero() else 0
            if base != 0:
                return True
        return False


@dataclass
class ObstructionLedger:
    entries: list = field(default_factory=list)
    families: dict = field(default_factory=dict)   # order -> param count
    notes: list = field(default_factory=list)

    def add(self, entry):
        self.entries.append(entry)

    def nontrivial(self):
        return [e for e in self.entries if e.nonzero_at_base()]

    def by_order(self, order, kind):
        return [e for e in self.entries if e.order == order and e.kind == kind]


@dataclass
class NormalizeResult:
    transition: TruncatedTransition
    ledger: ObstructionLedger
    m_comfortable: int           # m(X, D)
    m_linearizable: int
    truncation_limited: bool
    verdict: str
    best_chain: str

    @property
    def m_XD(self):
        return self.m_comfortable


class _Explorer:
    def __init__(self, target_order, ledger):
        self.target = target_order
        self.ledger = ledger
        self.best_m = 1
        self.best_lin = 0
        self.best_state = None
        self.best_chain = ""
        self.hit_truncation = False

    def _branches(self, locus):
        if locus.kind == "all":
            return [({}, "")]
        if locus.kind == "affine":
            return [(locus.substitution, locus.description)]
        if locus.kind == "points":
            return [(pt, _point_str(pt)) for pt in locus.points]
        return []

    def record(self, m, lin, state, chain):
        if m > self.best_m or (m == self.best_m and self.best_state is None):
            self.best_m = m
            self.best_state = state
            self.best_chain = chain
        self.best_lin = max(self.best_lin, lin)

    def explore(self, state, active, next_param, k, chain):
        if k > self.target:
            self.record(self.target + 1, self.target, state, chain)
            self.hit_truncation = True
            return
        # ---- base (splitting) step -------------------------------------
        obs = splitting_obstruction(state, k)
        locus = vanishing_locus(obs.vector, active)
        self.ledger.add(LedgerEntry(k, "splitting", chain, obs.window.twist,
                                    obs.vector, locus, obs.cocycle))
        if locus.kind == "unknown":
            self.ledger.notes.append(
                f"order {k}: splitting locus not solvable exactly; "
                "treating as nonvanishing")
        branches = self._branches(locus)
        if not branches:
            self.record(k, k - 1, state, chain)
            return
        for sub, desc in branches:
            st = _substitute_state(state, sub) if sub else state
            act = [i for i in active if i not in sub]
            f = -(st.phi(k).shift(2) * _embed_scalar(
                GaussianRational(1) / st.gamma0, st.phi(k)))
            p, u = _solve_z_step(st, k, f)
            kernel = _kernel_basis_z(st, k)
            params = []
            np_ = next_param
            for pk, uk in kernel:
                if np_ >= PARAM_BUDGET:
                    raise RuntimeError("lifting-parameter budget exhausted")
                a = Polynomial.variable(PARAM_BUDGET, np_)
                p = p + pk.map_coeffs(lambda c, a=a: a * _lift_coeff(c))
                u = u + uk.map_coeffs(lambda c, a=a: a * _lift_coeff(c))
                params.append(np_)
                np_ += 1
            if params:
                self.ledger.families.setdefault(k, len(params))
            st = apply_z_step(st, p, u, k)
            assert st.phi(k).is_zero(), "base step failed to normalize"
            chain2 = chain + (f" [{desc}]" if desc else "")
            act2 = act + params
            # ---- normal (comfortable) step ------------------------------
            self._comfortable_step(st, act2, np_, k, chain2)

    def _comfortable_step(self, state, active, next_param, k, chain):
        lin_here = k
        obs = comfortable_obstruction(state, k)
        locus = vanishing_locus(obs.vector, active)
        self.ledger.add(LedgerEntry(k, "comfortable", chain, obs.window.twist,
                                    obs.vector, locus, obs.cocycle))
        if locus.kind == "unknown":
            self.ledger.notes.append(
                f"order {k}: comfortable locus not solvable exactly; "
                "treating as nonvanishing")
        branches = self._branches(locus)
        if not branches:
            self.record(k, lin_here, state, chain)
            return
        for sub, desc in branches:
            st = _substitute_state(state, sub) if sub else state
            act = [i for i in active if i not in sub]
            g = st.c(k + 1).shift(st.normal_degree) * _embed_scalar(
                GaussianRational(1) / st.gamma, st.c(k + 1))
            q, v = _solve_y_step(st, k, g)
            st = apply_y_step(st, q, v, k)
            assert st.c(k + 1).is_zero(), "normal step failed to normalize"
            chain2 = chain + (f" [{desc}]" if desc else "")
            self.record(k + 1, lin_here, st, chain2)
            self.explore(st, act, next_param, k + 1, chain2)


def splitting_tower(t: TruncatedTransition, target_order: int,
                    ledger: ObstructionLedger | None = None):
    """Base-series-only normalization: records the relative splitting
    obstructions g_k and their vanishing loci over the lifting families,
    without requiring comfortable structure.  Returns the ledger."""
    if ledger is None:
        ledger = ObstructionLedger()
    state = lift_params(t)

    def go(state, active, next_param, k, chain):
        if k > target_order:
            return
        obs = splitting_obstruction(state, k)
        locus = vanishing_locus(obs.vector, active)
        ledger.add(LedgerEntry(k, "splitting-tower", chain, obs.window.twist,
                               obs.vector, locus, obs.cocycle))
        branches = []
        if locus.kind == "all":
            branches = [({}, "")]
        elif locus.kind == "affine":
            branches = [(locus.substitution, locus.description)]
        elif locus.kind == "points":
            branches = [(pt, _point_str(pt)) for pt in locus.points]
        for sub, desc in branches:
            st = _substitute_state(state, sub) if sub else state
            act = [i for i in active if i not in sub]
            f = -(st.phi(k).shift(2) * _embed_scalar(
                GaussianRational(1) / st.gamma0, st.phi(k)))
            p, u = _solve_z_step(st, k, f)
            np_ = next_param
            params = []
            for pk, uk in _kernel_basis_z(st, k):
                if np_ >= PARAM_BUDGET:
                    raise RuntimeError("lifting-parameter budget exhausted")
                a = Polynomial.variable(PARAM_BUDGET, np_)
                p = p + pk.map_coeffs(lambda c, a=a: a * _lift_coeff(c))
                u = u + uk.map_coeffs(lambda c, a=a: a * _lift_coeff(c))
                params.append(np_)
                np_ += 1
            if params:
                ledger.families.setdefault(k, len(params))
            st = apply_z_step(st, p, u, k)
            go(st, act + params, np_, k + 1, chain + (f" [{desc}]" if desc else ""))

    go(state, [], 0, 1, "tower")
    return ledger


def normalize(t: TruncatedTransition, target_order: int) -> NormalizeResult:
    """Order-by-order normalization of a transition germ.

    Produces the maximal comfortable-embedding order m(X, D) reachable
    within the truncation, the maximal linearizable order, the per-order
    obstruction ledger (both for the interleaved comfortable chains and
    for the splitting-only tower), and the transition written in the best
    chain's coordinates (free lifting parameters pinned to 0).
    """
    if target_order < 1:
        raise ValueError("target order must be >= 1")
    if target_order > t.order - 1:
        raise TruncationExhaustedError(
            f"target order {target_order} needs series data beyond the "
            f"truncation order {t.order}")
    ledger = ObstructionLedger()
    explorer = _Explorer(target_order, ledger)
    explorer.explore(lift_params(t), [], 0, 1, "chain")
    splitting_tower(t, target_order, ledger)

    m = explorer.best_m
    lin = explorer.best_lin
    truncated = False
    if m > target_order:
        m = target_order
        truncated = True
        ledger.notes.append(
            f"no obstruction found through order {target_order}; "
            "m(X,D) is truncation-limited")
    best = explorer.best_state if explorer.best_state is not None else lift_params(t)
    best = _substitute_state(best, {i: GaussianRational(0)
                                    for i in range(PARAM_BUDGET)})
    normalized = unlift_params(best)
    if truncated:
        verdict = (f"{lin}-linearizable; no obstruction within the "
                   f"truncation order")
    else:
        verdict = f"{lin}-linearizable but not {lin + 1}-linearizable"
    return NormalizeResult(normalized, ledger, m, lin, truncated, verdict,
                           explorer.best_chain)


def weight_from_order(m_XD: int, dim_D: int | None = None):
    """Deformation weight predicted by the comfortable-embedding order.

    Returns (weight, notes); the identity is proven for ambient dimension
    at least 3, so dim_D = 1 attaches a hypothesis note."""
    if m_XD < 1:
        raise ValueError("embedding order must be >= 1")
    notes = []
    if dim_D == 1:
        notes.append("hypothesis note: weight = embedding order is proven "
                     "for dim D >= 2; for curves it is expected but not "
                     "established")
    return -m_XD, notes


# ---------------------------------------------------------------------------
# stock transitions


def p1p1_diagonal(order: int = 4) -> TruncatedTransition:
    """Diagonal P^1 in P^1 x P^1: y2 = -y1/(z1(z1-y1)), z2 = 1/z1."""
    one = GaussianRational(1)
    ys = YSeries(order, [LaurentPoly.zero()] +
                 [LaurentPoly.monomial(-(a + 1), -one) for a in range(1, order + 1)])
    zs = YSeries(order, [LaurentPoly.monomial(-1, one)])
    return TruncatedTransition(ys, zs)


def p2_conic(order: int = 4) -> TruncatedTransition:
    """Conic in P^2: y2 = y1/(z1^2-y1)^2, z2 = z1/(z1^2-y1)."""
    ys = YSeries(order, [LaurentPoly.zero()] +
                 [LaurentPoly.monomial(-(2 * a + 2), GaussianRational(a))
                  for a in range(1, order + 1)])
    zs = YSeries(order, [LaurentPoly.monomial(-(2 * a + 1), GaussianRational(1))
                         for a in range(0, order + 1)])
    return TruncatedTransition(ys, zs)


def linear_transition(c, d: int, order: int = 4) -> TruncatedTransition:
    """Product-type germ y2 = c z^(-d) y1, z2 = 1/z1 (no obstructions)."""
    ys = YSeries(order, [LaurentPoly.zero(),
                         LaurentPoly.monomial(-d, GaussianRational.coerce(c))])
    zs = YSeries(order, [LaurentPoly.monomial(-1, GaussianRational(1))])
    return TruncatedTransition(ys, zs)


BUILTIN_TRANSITIONS = {
    "p1p1-diagonal": p1p1_diagonal,
    "p2-conic": p2_conic,
}
