"""Small multivariate polynomial ring over exact rationals.

Symbols are plain strings.  This ring does double duty: it carries the
one free scalar-curvature symbol while the vertical connection forms are
still being solved, and it is the coefficient ring of the symbolic
graded algebra, where derivative symbols are generated by priming
(``f`` -> ``f'`` -> ``f''``).
"""

from __future__ import annotations

from fractions import Fraction

# A monomial is a tuple of (symbol, exponent) pairs, sorted by symbol,
# exponents positive.  The empty tuple is the constant monomial.
_ONE = ()


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    merged = dict(m1)
    for sym, e in m2:
        merged[sym] = merged.get(sym, 0) + e
    return tuple(sorted((s, e) for s, e in merged.items() if e != 0))


def _mono_degree(m):
    return sum(e for _, e in m)


def _mono_str(m):
    if not m:
        return "1"
    parts = []
    for sym, e in m:
        parts.append(sym if e == 1 else f"{sym}^{e}")
    return "*".join(parts)


class Poly:
    """Polynomial with Fraction coefficients, immutable by convention."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    self.terms[m] = c

    @classmethod
    def const(cls, value) -> "Poly":
        return cls({_ONE: Fraction(value)})

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        return cls({((name, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == _ONE for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return self.terms[_ONE]

    def symbols(self) -> set:
        out = set()
        for m in self.terms:
            for sym, _ in m:
                out.add(sym)
        return out

    # -- ring structure ----------------------------------------------------

    def __add__(self, other):
        o = _as_poly(other)
        if o is NotImplemented:
            return NotImplemented
        res = dict(self.terms)
        for m, c in o.terms.items():
            s = res.get(m, Fraction(0)) + c
            if s == 0:
                res.pop(m, None)
            else:
                res[m] = s
        out = Poly.__new__(Poly)
        out.terms = res
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly.__new__(Poly)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __sub__(self, other):
        o = _as_poly(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_poly(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_poly(other)
        if o is NotImplemented:
            return NotImplemented
        res = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = _mono_mul(m1, m2)
                s = res.get(m, Fraction(0)) + c1 * c2
                if s == 0:
                    res.pop(m, None)
                else:
                    res[m] = s
        out = Poly.__new__(Poly)
        out.terms = res
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        o = _as_poly(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution ------------------------------------------

    def derive(self, prime) -> "Poly":
        """Formal derivative; ``prime(symbol)`` gives d(symbol) as a Poly
        (or None for symbols treated as constants)."""
        total = Poly()
        for m, c in self.terms.items():
            for i, (sym, e) in enumerate(m):
                d = prime(sym)
                if d is None or (isinstance(d, Poly) and d.is_zero()):
                    continue
                rest = list(m)
                if e == 1:
                    rest.pop(i)
                else:
                    rest[i] = (sym, e - 1)
                piece = Poly({tuple(rest): c * e}) * d
                total = total + piece
        return total

    def subs(self, mapping) -> "Poly":
        """Substitute Poly/Fraction values for symbols."""
        total = Poly()
        for m, c in self.terms.items():
            piece = Poly.const(c)
            for sym, e in m:
                val = mapping.get(sym)
                base = Poly.symbol(sym) if val is None else _as_poly(val)
                piece = piece * base**e
            total = total + piece
        return total

    def coefficients_in(self, sym: str) -> dict:
        """Split into {degree: Poly-in-the-other-symbols}."""
        out: dict[int, Poly] = {}
        for m, c in self.terms.items():
            deg = 0
            rest = []
            for s, e in m:
                if s == sym:
                    deg = e
                else:
                    rest.append((s, e))
            bucket = out.setdefault(deg, Poly())
            out[deg] = bucket + Poly({tuple(rest): c})
        return {d: p for d, p in out.items() if not p.is_zero()}

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: (_mono_degree(kv[0]), kv[0]))
        parts = []
        for m, c in items:
            ms = _mono_str(m)
            if ms == "1":
                chunk = str(c)
            elif c == 1:
                chunk = ms
            elif c == -1:
                chunk = f"-{ms}"
            else:
                chunk = f"{c}*{ms}"
            parts.append(chunk)
        out = parts[0]
        for chunk in parts[1:]:
            out += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
        return out

    def __repr__(self):
        return f"Poly({self})"


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    return NotImplemented


def solve_affine(poly: Poly, sym: str) -> Fraction:
    """Solve ``poly == 0`` for ``sym``, requiring the equation to be affine
    in ``sym`` with rational coefficients."""
    coeffs = poly.coefficients_in(sym)
    if any(d > 1 for d in coeffs):
        raise ValueError(f"equation is not affine in {sym}: {poly}")
    c0 = coeffs.get(0, Poly()).constant_value()
    c1 = coeffs.get(1, Poly()).constant_value()
    if c1 == 0:
        raise ValueError(f"equation does not determine {sym}: {poly}")
    return -c0 / c1
