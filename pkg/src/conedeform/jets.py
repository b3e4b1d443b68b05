"""Truncated Taylor (Wirtinger-jet) arithmetic with complex coefficients.

A Jet stores the Taylor coefficients of a smooth function in the shift
variables around a point, truncated at a total order.  Variables come in
holomorphic/antiholomorphic pairs but the arithmetic does not care; mixed
partial derivatives are coefficients times factorials.  Used to evaluate
Calabi-ansatz metric data exactly (up to float rounding) at a point.
"""

from __future__ import annotations

import math


class Jet:
    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars, order, coeffs=None):
        self.nvars = nvars
        self.order = order
        self.coeffs = {}
        for e, c in (coeffs or {}).items():
            if c != 0 and sum(e) <= order:
                self.coeffs[tuple(e)] = self.coeffs.get(tuple(e), 0.0) + c

    @staticmethod
    def constant(nvars, order, c):
        return Jet(nvars, order, {(0,) * nvars: complex(c)})

    @staticmethod
    def variable(nvars, order, i, base=0.0):
        e = [0] * nvars
        e[i] = 1
        return Jet(nvars, order, {(0,) * nvars: complex(base), tuple(e): 1.0})

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.nvars, self.order, other)
        t = dict(self.coeffs)
        for e, c in other.coeffs.items():
            t[e] = t.get(e, 0.0) + c
        return Jet(self.nvars, self.order, t)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.nvars, self.order, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.nvars, self.order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.nvars, self.order,
                       {e: c * other for e, c in self.coeffs.items()})
        t = {}
        for e1, c1 in self.coeffs.items():
            d1 = sum(e1)
            for e2, c2 in other.coeffs.items():
                if d1 + sum(e2) > self.order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0.0) + c1 * c2
        return Jet(self.nvars, self.order, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Jet.constant(self.nvars, self.order, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def value(self):
        return self.coeffs.get((0,) * self.nvars, 0.0)

    def _split_lead(self):
        c0 = self.value()
        rest = Jet(self.nvars, self.order,
                   {e: c for e, c in self.coeffs.items() if sum(e) > 0})
        return c0, rest

    def power_real(self, alpha: float):
        """(c0 + u)^alpha via the binomial series; c0 must be nonzero."""
        c0, u = self._split_lead()
        if c0 == 0:
            raise ZeroDivisionError("jet has vanishing leading term")
        w = u * (1.0 / c0)
        out = Jet.constant(self.nvars, self.order, 1.0)
        term = Jet.constant(self.nvars, self.order, 1.0)
        for k in range(1, self.order + 1):
            term = term * w * ((alpha - k + 1) / k)
            out = out + term
        lead = complex(c0)
        if lead.imag == 0 and lead.real > 0:
            lead_pow = lead.real ** alpha
        else:
            import cmath
            lead_pow = cmath.exp(alpha * cmath.log(lead))
        return out * lead_pow

    def log(self):
        c0, u = self._split_lead()
        w = u * (1.0 / c0)
        lead = complex(c0)
        if lead.imag == 0 and lead.real > 0:
            base = math.log(lead.real)
        else:
            import cmath
            base = cmath.log(lead)
        out = Jet.constant(self.nvars, self.order, base)
        term = Jet.constant(self.nvars, self.order, 1.0)
        for k in range(1, self.order + 1):
            term = term * w
            out = out + term * ((-1.0) ** (k + 1) / k)
        return out

    def inverse(self):
        return self.power_real(-1.0)

    def partial(self, exponents):
        """Mixed partial derivative value at the base point."""
        e = tuple(exponents)
        c = self.coeffs.get(e, 0.0)
        scale = 1.0
        for k in e:
            scale *= math.factorial(k)
        return c * scale

    def subst(self, mapping):
        """Substitute variable i by the jet mapping[i] (zero constant term
        not required, but orders must match)."""
        out = Jet.constant(self.nvars, self.order, 0.0)
        pows = {}
        for i, m in mapping.items():
            p = [Jet.constant(self.nvars, self.order, 1.0)]
            for _ in range(self.order):
                p.append(p[-1] * m)
            pows[i] = p
        for e, c in self.coeffs.items():
            term = Jet.constant(self.nvars, self.order, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pows[i][k]
            out = out + term
        return out

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, nterms={len(self.coeffs)})"


def multi_indices(nvars, max_order):
    for total in range(max_order + 1):
        for e in _compositions(total, nvars):
            yield e


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest
