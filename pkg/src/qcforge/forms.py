"""Exterior algebra over an indexed coframe.

A :class:`KForm` is a sparse sum of basis monomials ``e^{i1...ik}`` with
strictly increasing 1-based index tuples and scalar coefficients from any
commutative ring (rationals, jets, polynomials).  Evaluation follows the
determinant convention: ``(e^a ^ e^b)(e_c, e_d) = d^a_c d^b_d - d^a_d d^b_c``
with no 1/k! factor, so a structure equation like ``d eta = 2 omega`` can be
read off coefficients literally.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .scalars import parse_rational


class FrameMismatch(ValueError):
    """Operands live over coframes of different dimensions."""


class ArityMismatch(ValueError):
    """A k-form was fed the wrong number of vectors."""


class BadOrientation(ValueError):
    """Orientation tuple is not a permutation of the frame indices."""


def is_zero_scalar(c) -> bool:
    probe = getattr(c, "is_zero", None)
    if probe is not None:
        return probe() if callable(probe) else bool(probe)
    return c == 0


def _sort_indices(indices):
    """Sort an index tuple, returning (sorted tuple, sign); sign 0 on repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort; monomials are tiny
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for i in range(1, len(idx)):
        if idx[i - 1] == idx[i]:
            return tuple(idx), 0
    return tuple(idx), sign


def _merge_sorted(a, b):
    """Concatenate two strictly increasing tuples, counting transpositions.

    Returns (merged tuple, sign), sign 0 when they share an index.
    """
    out = []
    i = j = 0
    sign = 1
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return (), 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining len(a) - i entries of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


class KForm:
    """Graded exterior form over an ``n``-dimensional coframe."""

    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim: int, degree: int, terms=None):
        if degree < 0:
            raise ValueError("negative form degree")
        self.dim = dim
        self.degree = degree
        self.terms = {}
        if terms:
            for idx, coeff in terms.items():
                idx = tuple(idx)
                if len(idx) != degree:
                    raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
                if any(not (1 <= a <= dim) for a in idx):
                    raise ValueError(f"index out of range in {idx} (dim {dim})")
                if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                    raise ValueError(f"index tuple {idx} is not strictly increasing")
                if not is_zero_scalar(coeff):
                    self.terms[idx] = coeff

    @classmethod
    def zero(cls, dim: int, degree: int) -> "KForm":
        return cls(dim, degree)

    @classmethod
    def basis(cls, dim: int, *indices) -> "KForm":
        """Basis monomial e^{i1...ik}; indices may come in any order."""
        idx, sign = _sort_indices(indices)
        if sign == 0:
            return cls(dim, len(indices))
        return cls(dim, len(indices), {idx: Fraction(sign)})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "KForm"):
        if self.dim != other.dim:
            raise FrameMismatch(f"frame dimensions differ: {self.dim} vs {other.dim}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        res = dict(self.terms)
        for idx, c in other.terms.items():
            s = res.get(idx, 0) + c
            if is_zero_scalar(s):
                res.pop(idx, None)
            else:
                res[idx] = s
        out = KForm(self.dim, self.degree)
        out.terms = res
        return out

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-1) * other

    def __neg__(self) -> "KForm":
        return (-1) * self

    def __mul__(self, scalar) -> "KForm":
        if isinstance(scalar, KForm):
            raise TypeError("use wedge() for form products")
        if is_zero_scalar(scalar):
            return KForm(self.dim, self.degree)
        out = KForm(self.dim, self.degree)
        out.terms = {idx: scalar * c for idx, c in self.terms.items()}
        out.terms = {idx: c for idx, c in out.terms.items() if not is_zero_scalar(c)}
        return out

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.terms)))

    def wedge(self, other: "KForm") -> "KForm":
        self._check(other)
        degree = self.degree + other.degree
        out = KForm(self.dim, degree)
        res = {}
        for ia, ca in self.terms.items():
            for ib, cb in other.terms.items():
                idx, sign = _merge_sorted(ia, ib)
                if sign == 0:
                    continue
                c = ca * cb if sign > 0 else -(ca * cb)
                s = res.get(idx, 0) + c
                if is_zero_scalar(s):
                    res.pop(idx, None)
                else:
                    res[idx] = s
        out.terms = res
        return out

    def evaluate(self, vectors) -> object:
        """Pair with ``degree`` frame vectors (multilinear, alternating)."""
        vectors = list(vectors)
        if len(vectors) != self.degree:
            raise ArityMismatch(f"degree-{self.degree} form applied to {len(vectors)} vectors")
        for v in vectors:
            if v.dim != self.dim:
                raise FrameMismatch("vector frame dimension mismatch")
        total = 0
        k = self.degree
        for idx, coeff in self.terms.items():
            # determinant of the k x k pairing matrix <e^{idx[i]}, v_j>
            det = 0
            for perm in itertools.permutations(range(k)):
                prod = 1
                for i, j in enumerate(perm):
                    prod = prod * vectors[j].components[idx[i] - 1]
                    if is_zero_scalar(prod):
                        break
                else:
                    det = det + (prod if _permutation_sign(perm) > 0 else -prod)
            total = total + coeff * det
        return total

    def interior(self, vector: "FrameVector") -> "KForm":
        """Interior product ``v . a``, contracting in the first slot."""
        if self.degree < 1:
            raise ValueError("interior product needs degree >= 1")
        if vector.dim != self.dim:
            raise FrameMismatch("vector frame dimension mismatch")
        out = KForm(self.dim, self.degree - 1)
        res = {}
        for idx, coeff in self.terms.items():
            for pos, a in enumerate(idx):
                comp = vector.components[a - 1]
                if is_zero_scalar(comp):
                    continue
                rest = idx[:pos] + idx[pos + 1:]
                c = comp * coeff
                if pos % 2:
                    c = -c
                s = res.get(rest, 0) + c
                if is_zero_scalar(s):
                    res.pop(rest, None)
                else:
                    res[rest] = s
        out.terms = res
        return out

    def restrict(self, indices) -> "KForm":
        """Keep only the monomials supported on the given index set."""
        allowed = set(indices)
        out = KForm(self.dim, self.degree)
        out.terms = {idx: c for idx, c in self.terms.items() if set(idx) <= allowed}
        return out

    def hodge_star(self, orientation) -> "KForm":
        """Hodge dual for the identity frame metric.

        ``orientation`` is a permutation of 1..dim fixing the volume form;
        the defining property is a ^ (*b) = <a, b> vol.
        """
        orientation = tuple(orientation)
        if sorted(orientation) != list(range(1, self.dim + 1)):
            raise BadOrientation(f"orientation {orientation} is not a permutation of 1..{self.dim}")
        _, orient_sign = _sort_indices(orientation)
        out = KForm(self.dim, self.dim - self.degree)
        res = {}
        full = set(range(1, self.dim + 1))
        for idx, coeff in self.terms.items():
            comp = tuple(sorted(full - set(idx)))
            _, sign = _sort_indices(idx + comp)
            sign *= orient_sign
            c = coeff if sign > 0 else -coeff
            s = res.get(comp, 0) + c
            if is_zero_scalar(s):
                res.pop(comp, None)
            else:
                res[comp] = s
        out.terms = res
        return out

    def map_coefficients(self, fn) -> "KForm":
        out = KForm(self.dim, self.degree)
        out.terms = {}
        for idx, c in self.terms.items():
            v = fn(c)
            if not is_zero_scalar(v):
                out.terms[idx] = v
        return out

    def max_abs(self) -> float:
        """Largest |value| over coefficients (floats/jets), for residuals."""
        worst = 0.0
        for c in self.terms.values():
            v = getattr(c, "value", c)
            worst = max(worst, abs(float(v)))
        return worst

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"KForm({self.dim}, {self.degree}, {format_form(self)!r})"


def _permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class FrameVector:
    """Vector expressed over the frame dual to the coframe, <e^a, e_b> = delta."""

    __slots__ = ("dim", "components")

    def __init__(self, components):
        self.components = tuple(components)
        self.dim = len(self.components)

    @classmethod
    def basis(cls, dim: int, index: int) -> "FrameVector":
        if not (1 <= index <= dim):
            raise ValueError(f"basis index {index} out of range for dim {dim}")
        return cls(tuple(Fraction(1) if a == index else Fraction(0) for a in range(1, dim + 1)))

    def __add__(self, other):
        if self.dim != other.dim:
            raise FrameMismatch("vector frame dimension mismatch")
        return FrameVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __mul__(self, scalar):
        return FrameVector(tuple(scalar * a for a in self.components))

    __rmul__ = __mul__

    def __neg__(self):
        return (-1) * self

    def __eq__(self, other):
        return isinstance(other, FrameVector) and self.components == other.components

    def __repr__(self):
        return f"FrameVector{self.components!r}"


def wedge(a: KForm, b: KForm) -> KForm:
    return a.wedge(b)


def evaluate(a: KForm, vectors) -> object:
    return a.evaluate(vectors)


def interior(v: FrameVector, a: KForm) -> KForm:
    return a.interior(v)


def hodge_star(a: KForm, orientation) -> KForm:
    return a.hodge_star(orientation)


# ---------------------------------------------------------------------------
# Form literal syntax: "2 e1^e2 + 1/2 e3^e7", coefficients rational
# ---------------------------------------------------------------------------

_FORM_TOKEN = re.compile(r"\s*(?:(-?\d+(?:/\d+)?)|(e\d+)|([+^\-]))")


def parse_form(text: str, dim: int, degree: int | None = None) -> KForm:
    """Parse a form literal over an ``n``-dimensional coframe.

    Monomial factors may appear in any order ("e4^e2" is -e2^e4); "0" is
    the zero form (of the stated degree when given).
    """
    text = text.strip()
    tokens = []
    pos = 0
    while pos < len(text):
        m = _FORM_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad form literal near {text[pos:pos + 10]!r}")
        tokens.append([g for g in m.groups() if g is not None][0])
        pos = m.end()
    if tokens == ["0"]:
        if degree is None:
            raise ValueError("cannot infer the degree of the zero form")
        return KForm(dim, degree)

    terms = []
    i = 0
    sign = 1
    while i < len(tokens):
        tok = tokens[i]
        if tok == "+":
            i += 1
            continue
        if tok == "-":
            sign = -sign
            i += 1
            continue
        coeff = Fraction(1)
        if re.fullmatch(r"-?\d+(/\d+)?", tok):
            coeff = parse_rational(tok)
            i += 1
        indices = []
        while i < len(tokens) and tokens[i].startswith("e"):
            indices.append(int(tokens[i][1:]))
            i += 1
            if i < len(tokens) and tokens[i] == "^":
                i += 1
                if i >= len(tokens) or not tokens[i].startswith("e"):
                    raise ValueError("dangling '^' in form literal")
        if not indices:
            raise ValueError(f"term without coframe indices near token {tok!r}")
        for a in indices:
            if not (1 <= a <= dim):
                raise ValueError(f"index e{a} out of range for dim {dim}")
        terms.append((sign * coeff, indices))
        sign = 1

    deg = len(terms[0][1])
    if degree is not None and deg != degree:
        raise ValueError(f"form has degree {deg}, expected {degree}")
    out = KForm(dim, deg)
    for coeff, indices in terms:
        if len(indices) != deg:
            raise ValueError("mixed-degree form literal")
        out = out + coeff * KForm.basis(dim, *indices)
    return out


def format_form(form: KForm) -> str:
    if not form.terms:
        return "0"
    chunks = []
    for idx in sorted(form.terms):
        c = form.terms[idx]
        mono = "^".join(f"e{a}" for a in idx) if idx else "1"
        if isinstance(c, Fraction):
            if c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{c} {mono}"
        else:
            body = f"({c}) {mono}"
        chunks.append(body)
    out = chunks[0]
    for body in chunks[1:]:
        out += f" - {body[1:]}" if body.startswith("-") else f" + {body}"
    return out
