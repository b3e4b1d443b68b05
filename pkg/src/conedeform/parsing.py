"""Text-input parsing: polynomial decks, transition decks, potential
expressions.  All errors carry 1-based line/column positions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graded import ConeSingularity, Perturbation
from .laurent import LaurentPoly, YSeries
from .cech import TruncatedTransition
from .poly import Polynomial
from .rational import GaussianRational


class ParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" at line {line}" + (f", column {column}"
                                          if column is not None else "")
        super().__init__(message + where)


class _Scanner:
    def __init__(self, text, line=1):
        self.text = text
        self.pos = 0
        self.line = line

    def error(self, msg):
        raise ParseError(msg, self.line, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect_int(self, what="integer"):
        self.skip_ws()
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            self.error(f"expected {what}")
        return int(self.text[start:self.pos])

    def at_end(self):
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_coeff(sc: _Scanner):
    """int('/'int)? -- returns Fraction, or None if no digits here."""
    sc.skip_ws()
    if not sc.peek().isdigit():
        return None
    start = sc.pos
    while sc.peek().isdigit():
        sc.pos += 1
    num = int(sc.text[start:sc.pos])
    if sc.take("/"):
        if not sc.peek().isdigit():
            sc.error("expected denominator")
        start = sc.pos
        while sc.peek().isdigit():
            sc.pos += 1
        den = int(sc.text[start:sc.pos])
        if den == 0:
            sc.error("zero denominator")
        return Fraction(num, den)
    return Fraction(num)


def _parse_var(sc: _Scanner):
    """'z' int ('^' int)? -> (index, exponent), or None."""
    sc.skip_ws()
    if sc.peek() != "z":
        return None
    sc.pos += 1
    if not sc.peek().isdigit():
        sc.error("expected variable index after 'z'")
    start = sc.pos
    while sc.peek().isdigit():
        sc.pos += 1
    idx = int(sc.text[start:sc.pos])
    if idx == 0:
        sc.error("variable indices start at 1")
    exp = 1
    if sc.take("^"):
        if not sc.peek().isdigit():
            sc.error("expected exponent")
        exp = sc.expect_int("exponent")
        if exp < 0:
            sc.error("negative exponents are not allowed here")
    return idx, exp


def parse_polynomial_terms(text, line=1):
    """poly := term (('+'|'-') term)*; returns [(Fraction, {idx: exp})]."""
    sc = _Scanner(text, line)
    terms = []
    sign = 1
    sc.skip_ws()
    if sc.take("-"):
        sign = -1
    elif sc.take("+"):
        pass
    while True:
        coeff = _parse_coeff(sc)
        sc.skip_ws()
        if coeff is not None:
            sc.take("*")
        mono = {}
        v = _parse_var(sc)
        while v is not None:
            idx, exp = v
            mono[idx] = mono.get(idx, 0) + exp
            sc.skip_ws()
            if not sc.take("*"):
                break
            v = _parse_var(sc)
            if v is None:
                sc.error("expected variable after '*'")
        if coeff is None and not mono:
            sc.error("expected a term")
        terms.append((sign * (coeff if coeff is not None else Fraction(1)),
                      mono))
        sc.skip_ws()
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        else:
            break
    if not sc.at_end():
        sc.error(f"unexpected character {sc.peek()!r}")
    return terms


def realize_polynomial(terms, nvars) -> Polynomial:
    out = {}
    for c, mono in terms:
        e = [0] * nvars
        for idx, exp in mono.items():
            e[idx - 1] += exp
        key = tuple(e)
        out[key] = out.get(key, Fraction(0)) + c
    return Polynomial(nvars, out)


def parse_polynomial(text, nvars=None, line=1) -> Polynomial:
    terms = parse_polynomial_terms(text, line)
    if nvars is None:
        nvars = max((max(m) for _, m in terms if m), default=0)
    return realize_polynomial(terms, nvars)


@dataclass
class ConeDeck:
    cone: ConeSingularity
    perturbation: Perturbation | None
    n: int | None = None
    alpha: Fraction | None = None
    compact: bool = False


def parse_cone_deck(text) -> ConeDeck:
    """Cone/perturbation input: [defining], [perturbation], [params] sections.

    One polynomial per line; optional trailing 'd=<int>' (defining) or
    'e=<int>' (perturbation) degree declarations, checked against the
    parsed polynomial."""
    sections = {"defining": [], "perturbation": []}
    params = {}
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            end = line.find("]")
            if end < 0:
                raise ParseError("unterminated section header", ln, 1)
            name = line[1:end].strip().lower()
            rest = line[end + 1:].strip()
            if name == "params":
                current = "params"
                if rest:
                    _parse_params(rest, params, ln)
                continue
            if name not in sections:
                raise ParseError(f"unknown section [{name}]", ln, 1)
            current = name
            continue
        if current == "params":
            _parse_params(line, params, ln)
            continue
        if current is None:
            raise ParseError("content before any section header", ln, 1)
        decl = None
        body = line
        pos = line.rfind(";")
        if pos >= 0:
            tail = line[pos + 1:].strip()
            if not tail.startswith(("d=", "e=")):
                raise ParseError("expected 'd=<int>' or 'e=<int>' after ';'",
                                 ln, pos + 2)
            try:
                decl = int(tail[2:])
            except ValueError:
                raise ParseError("expected an integer degree declaration",
                                 ln, pos + 2)
            body = line[:pos]
        sections[current].append((ln, body, decl))
    if not sections["defining"]:
        raise ParseError("no [defining] section")
    parsed = {}
    nvars = 0
    for name in ("defining", "perturbation"):
        parsed[name] = [(ln, parse_polynomial_terms(body, ln), decl)
                        for ln, body, decl in sections[name]]
        for _, terms, _ in parsed[name]:
            for _, mono in terms:
                if mono:
                    nvars = max(nvars, max(mono))
    defining = []
    for ln, terms, decl in parsed["defining"]:
        f = realize_polynomial(terms, nvars)
        d = f.degree()
        if not f.is_homogeneous():
            raise ParseError("defining polynomial is not homogeneous", ln, 1)
        if decl is not None and decl != d:
            raise ParseError(
                f"declared degree {decl} does not match degree {d}", ln, 1)
        defining.append((f, d))
    cone = ConeSingularity(nvars, defining)
    pert = None
    if parsed["perturbation"]:
        comps = []
        degs = []
        for ln, terms, decl in parsed["perturbation"]:
            g = realize_polynomial(terms, nvars)
            e = decl if decl is not None else max(g.degree(), 0)
            if g.degree() > e:
                raise ParseError(
                    f"declared degree {e} below actual degree {g.degree()}",
                    ln, 1)
            comps.append(g)
            degs.append(e)
        pert = Perturbation(comps, degs)
    deck = ConeDeck(cone, pert)
    if "n" in params:
        deck.n = int(params["n"])
    if "alpha" in params:
        deck.alpha = params["alpha"]
    deck.compact = bool(params.get("compact", False))
    return deck


def _parse_params(text, params, ln):
    for chunk in text.replace(",", " ").split():
        if "=" not in chunk:
            raise ParseError(f"expected key=value, got {chunk!r}", ln, 1)
        key, val = chunk.split("=", 1)
        key = key.strip().lower()
        val = val.strip()
        if key == "n":
            params["n"] = int(val)
        elif key == "alpha":
            params["alpha"] = Fraction(val)
        elif key == "compact":
            params["compact"] = val.lower() in ("1", "true", "yes")
        else:
            raise ParseError(f"unknown parameter {key!r}", ln, 1)


# ---------------------------------------------------------------------------
# transition decks


def parse_laurent(text, line=1) -> LaurentPoly:
    """laurent := lterm (('+'|'-') lterm)*; lterm := coeff? 'z^'int?"""
    sc = _Scanner(text, line)
    coeffs = {}
    sign = 1
    sc.skip_ws()
    if sc.take("-"):
        sign = -1
    elif sc.take("+"):
        pass
    while True:
        coeff = _parse_coeff(sc)
        sc.skip_ws()
        if coeff is not None:
            sc.take("*")
            sc.skip_ws()
        exp = 0
        if sc.peek() == "z":
            sc.pos += 1
            if sc.take("^"):
                exp = sc.expect_int("exponent")
            else:
                exp = 1
        elif coeff is None:
            sc.error("expected a Laurent term")
        c = sign * (coeff if coeff is not None else Fraction(1))
        key = exp
        prev = coeffs.get(key, GaussianRational(0))
        coeffs[key] = prev + GaussianRational(c)
        sc.skip_ws()
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        else:
            break
    if not sc.at_end():
        sc.error(f"unexpected character {sc.peek()!r}")
    return LaurentPoly(coeffs)


def parse_transition_deck(text) -> TruncatedTransition:
    """Transition input: [y-series], [z-series], [normal-degree] sections,
    with 'a<k>: <laurent>' lines giving the order-k coefficients."""
    y_terms = {}
    z_terms = {}
    declared_d = None
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            end = line.find("]")
            if end < 0:
                raise ParseError("unterminated section header", ln, 1)
            name = line[1:end].strip().lower()
            rest = line[end + 1:].strip()
            if name == "normal-degree":
                current = "normal-degree"
                if rest:
                    declared_d = _parse_normal_degree(rest, ln)
                continue
            if name not in ("y-series", "z-series"):
                raise ParseError(f"unknown section [{name}]", ln, 1)
            current = name
            continue
        if current == "normal-degree":
            declared_d = _parse_normal_degree(line, ln)
            continue
        if current is None:
            raise ParseError("content before any section header", ln, 1)
        if ":" not in line:
            raise ParseError("expected 'a<k>: <laurent>'", ln, 1)
        head, body = line.split(":", 1)
        head = head.strip()
        if not head.startswith("a") or not head[1:].isdigit():
            raise ParseError("expected coefficient label a<k>", ln, 1)
        k = int(head[1:])
        target = y_terms if current == "y-series" else z_terms
        if k in target:
            raise ParseError(f"duplicate coefficient a{k}", ln, 1)
        target[k] = parse_laurent(body, ln)
    if not y_terms:
        raise ParseError("no [y-series] section")
    order = max(list(y_terms) + list(z_terms) + [1])
    ys = YSeries(order, [y_terms.get(a, LaurentPoly.zero())
                         for a in range(order + 1)])
    zcoeffs = [z_terms.get(a, LaurentPoly.zero()) for a in range(order + 1)]
    if zcoeffs[0].is_zero():
        zcoeffs[0] = LaurentPoly.monomial(-1, GaussianRational(1))
    zs = YSeries(order, zcoeffs)
    t = TruncatedTransition(ys, zs)
    if declared_d is not None and t.normal_degree != declared_d:
        raise ParseError(
            f"declared normal degree {declared_d} does not match the "
            f"order-1 coefficient (degree {t.normal_degree})")
    return t


def _parse_normal_degree(text, ln):
    chunk = text.strip()
    if not chunk.startswith("d="):
        raise ParseError("expected d=<int>", ln, 1)
    try:
        return int(chunk[2:])
    except ValueError:
        raise ParseError("expected an integer normal degree", ln, 1)


# ---------------------------------------------------------------------------
# potential expressions


def parse_potential(text, dimD=None):
    """Polynomials in |z|^2, z_i and zbar_i with rational coefficients,
    e.g. '1 + |z|^2' or '2 - 1/3*z1*zbar1 + |z2|^2'."""
    from .cone_metric import Potential
    sc = _Scanner(text)
    terms = []
    sign = 1
    sc.skip_ws()
    if sc.take("-"):
        sign = -1
    elif sc.take("+"):
        pass
    while True:
        coeff = _parse_coeff(sc)
        sc.skip_ws()
        if coeff is not None:
            sc.take("*")
            sc.skip_ws()
        factors = {}

        def add(idx, bar, exp=1):
            factors[(idx, bar)] = factors.get((idx, bar), 0) + exp

        found = True
        while found:
            found = False
            sc.skip_ws()
            if sc.peek() == "|":
                sc.pos += 1
                if sc.peek() != "z":
                    sc.error("expected z inside |.|")
                sc.pos += 1
                idx = 1
                if sc.peek().isdigit():
                    idx = sc.expect_int("variable index")
                if not sc.take("|"):
                    sc.error("expected closing '|'")
                exp = 2
                if sc.take("^"):
                    exp = sc.expect_int("exponent")
                    if exp % 2:
                        sc.error("|z| powers must be even")
                add(idx, False, exp // 2)
                add(idx, True, exp // 2)
                found = True
            elif sc.text.startswith("zbar", sc.pos):
                sc.pos += 4
                idx = 1
                if sc.peek().isdigit():
                    idx = sc.expect_int("variable index")
                exp = 1
                if sc.take("^"):
                    exp = sc.expect_int("exponent")
                add(idx, True, exp)
                found = True
            elif sc.peek() == "z":
                sc.pos += 1
                idx = 1
                if sc.peek().isdigit():
                    idx = sc.expect_int("variable index")
                exp = 1
                if sc.take("^"):
                    exp = sc.expect_int("exponent")
                add(idx, False, exp)
                found = True
            if found:
                sc.skip_ws()
                if not sc.take("*"):
                    break
        if coeff is None and not factors:
            sc.error("expected a term")
        terms.append((sign * (coeff if coeff is not None else Fraction(1)),
                      dict(factors)))
        sc.skip_ws()
        if sc.take("+"):
            sign = 1
        elif sc.take("-"):
            sign = -1
        else:
            break
    if not sc.at_end():
        sc.error(f"unexpected character {sc.peek()!r}")
    n = dimD or max((idx for _, f in terms for idx, _ in f), default=1)
    poly_terms = {}
    for c, f in terms:
        e = [0] * (2 * n)
        for (idx, bar), exp in f.items():
            e[(n + idx - 1) if bar else (idx - 1)] += exp
        key = tuple(e)
        poly_terms[key] = poly_terms.get(key, Fraction(0)) + c
    return Potential.from_terms(n, poly_terms)
