"""Metric connections and curvature in frames.

Two computation paths share this module.  The exact path works over an
invariant coframe with the identity frame metric: Koszul's formula gives
the Levi-Civita connection from brackets, a torsion adjustment produces
any prescribed-torsion metric connection, and curvature follows from the
constant-coefficient commutator formula, all in exact rationals.

The jet path handles orthonormal coframes rescaled by functions of one
evolution parameter: the first structure equation is solved for the
connection 1-forms with :class:`~qcforge.scalars.Jet` coefficients, both
defining conditions are re-verified after solving, and curvature 2-forms
give Ricci and the rank of the curvature span (an Ambrose-Singer lower
bound for the holonomy algebra).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import FrameAlgebra
from .forms import KForm
from .scalars import Jet


class NonAntisymmetricTorsion(ValueError):
    pass


class SingularCoframe(ValueError):
    pass


# ---------------------------------------------------------------------------
# Exact path: invariant coframes, identity metric
# ---------------------------------------------------------------------------


class ConnectionTable:
    """Frame connection coefficients Gamma^c_{ab} = <e^c, nabla_{e_a} e_b>."""

    __slots__ = ("dim", "gamma")

    def __init__(self, dim: int, gamma):
        self.dim = dim
        self.gamma = gamma  # gamma[a][b][c], 0-based

    def coeff(self, c: int, a: int, b: int) -> Fraction:
        """Gamma^c_{ab}, 1-based indices."""
        return self.gamma[a - 1][b - 1][c - 1]

    def is_metric(self) -> bool:
        n = self.dim
        g = self.gamma
        return all(
            g[a][b][c] == -g[a][c][b]
            for a in range(n) for b in range(n) for c in range(n)
        )

    def torsion(self, alg: FrameAlgebra):
        """T(e_a, e_b) components: T^c_{ab} = Gamma^c_{ab} - Gamma^c_{ba} - <e^c,[e_a,e_b]>."""
        n = self.dim
        out = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    out[a][b][c] = (
                        self.gamma[a][b][c]
                        - self.gamma[b][a][c]
                        - alg.bracket_coeff(c + 1, a + 1, b + 1)
                    )
        return out


class CurvatureTensor:
    """Fully covariant curvature table R_{abcd} = g(R(e_a,e_b)e_c, e_d)."""

    __slots__ = ("dim", "r")

    def __init__(self, dim: int, r):
        self.dim = dim
        self.r = r

    def entry(self, a: int, b: int, c: int, d: int) -> Fraction:
        return self.r[a - 1][b - 1][c - 1][d - 1]

    def is_zero(self) -> bool:
        n = self.dim
        return all(
            self.r[a][b][c][d] == 0
            for a in range(n) for b in range(n) for c in range(n) for d in range(n)
        )

    def check_pair_antisymmetry(self) -> bool:
        n = self.dim
        r = self.r
        return all(
            r[a][b][c][d] == -r[b][a][c][d] and r[a][b][c][d] == -r[a][b][d][c]
            for a in range(n) for b in range(n) for c in range(n) for d in range(n)
        )

    def first_bianchi_residual(self) -> Fraction:
        """max |R_{[abc]d}| over all index choices (zero for torsion-free)."""
        n = self.dim
        worst = Fraction(0)
        r = self.r
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    for d in range(n):
                        v = r[a][b][c][d] + r[b][c][a][d] + r[c][a][b][d]
                        worst = max(worst, abs(v))
        return worst


def koszul_levi_civita(alg: FrameAlgebra) -> ConnectionTable:
    """Levi-Civita connection of the identity frame metric from brackets:
    2 g(nabla_A B, C) = g([A,B],C) - g([B,C],A) + g([C,A],B)."""
    n = alg.dim
    half = Fraction(1, 2)
    gamma = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for c in range(1, n + 1):
                val = half * (
                    alg.bracket_coeff(c, a, b)
                    - alg.bracket_coeff(a, b, c)
                    + alg.bracket_coeff(b, c, a)
                )
                gamma[a - 1][b - 1][c - 1] = val
    return ConnectionTable(n, gamma)


def adjust_by_torsion(lc: ConnectionTable, torsion) -> ConnectionTable:
    """Metric connection with prescribed torsion:
    g(nabla_A B, C) = g(nabla^g_A B, C)
                      + (1/2)[g(T(A,B),C) - g(T(B,C),A) + g(T(C,A),B)].

    ``torsion[a][b]`` holds the components of T(e_a, e_b) (0-based).
    """
    n = lc.dim
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if torsion[a][b][c] != -torsion[b][a][c]:
                    raise NonAntisymmetricTorsion(
                        f"T(e{a + 1}, e{b + 1}) != -T(e{b + 1}, e{a + 1})")
    half = Fraction(1, 2)
    gamma = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                gamma[a][b][c] = lc.gamma[a][b][c] + half * (
                    torsion[a][b][c] - torsion[b][c][a] + torsion[c][a][b]
                )
    return ConnectionTable(n, gamma)


def frame_curvature(conn: ConnectionTable, alg: FrameAlgebra) -> CurvatureTensor:
    """R(e_a,e_b)e_c = nabla_a nabla_b e_c - nabla_b nabla_a e_c - nabla_{[e_a,e_b]} e_c
    for constant frame connection coefficients."""
    n = conn.dim
    g = conn.gamma
    r = [[[[Fraction(0)] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    val = Fraction(0)
                    for m in range(n):
                        val += g[b][c][m] * g[a][m][d]
                        val -= g[a][c][m] * g[b][m][d]
                        val -= alg.bracket_coeff(m + 1, a + 1, b + 1) * g[m][c][d]
                    r[a][b][c][d] = val
    return CurvatureTensor(n, r)


# ---------------------------------------------------------------------------
# Jet path: orthonormal coframes depending on one parameter
# ---------------------------------------------------------------------------


class CoframeWithJets:
    """Orthonormal coframe p_a(x) e^a on algebra x R, plus w(x) dx.

    ``scalings`` holds the jets of the p_a at the sample point (all values
    strictly positive), ``w`` the jet of the dx coefficient.  The extended
    frame has dimension base.dim + 1 with the dx direction last.
    """

    __slots__ = ("base", "scalings", "w")

    def __init__(self, base: FrameAlgebra, scalings, w: Jet):
        self.base = base
        self.scalings = [s if isinstance(s, Jet) else Jet.const(s) for s in scalings]
        self.w = w if isinstance(w, Jet) else Jet.const(w)
        if len(self.scalings) != base.dim:
            raise ValueError("one scaling jet per base coframe element")
        for a, s in enumerate(self.scalings, start=1):
            if not s.value > 0.0:
                raise SingularCoframe(f"scaling of e{a} is not positive: {s.value}")
        if self.w.value == 0.0:
            raise SingularCoframe("dx coefficient vanishes")

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    def coframe_differentials(self) -> list:
        """d of each orthonormal coframe element, as jet-coefficient 2-forms
        over the extended frame."""
        n = self.dim
        m = self.base.dim
        out = []
        for a in range(1, m + 1):
            p = self.scalings[a - 1]
            terms = {}
            # p'(x) dx ^ e^a = -(p'/(w p)) hat-e^{a, n}
            dp = p.derivative()
            if not dp.is_zero():
                terms[(a, n)] = -(dp / (self.w * p))
            for (b, c), coeff in self.base.diff[a - 1].terms.items():
                scale = (p * float(coeff)) / (self.scalings[b - 1] * self.scalings[c - 1])
                if (b, c) in terms:
                    terms[(b, c)] = terms[(b, c)] + scale
                else:
                    terms[(b, c)] = scale
            out.append(KForm(n, 2, terms))
        out.append(KForm(n, 2))  # d(w dx) = w' dx ^ dx = 0
        return out

    def ext_d(self, form: KForm, dhats=None) -> KForm:
        """Exterior derivative on the extended frame of a jet-coefficient
        form: base structure terms plus coefficient derivatives times dx."""
        n = self.dim
        if form.dim != n:
            raise ValueError("form does not live on the extended frame")
        if dhats is None:
            dhats = self.coframe_differentials()
        out = KForm(n, form.degree + 1)
        dx_row = KForm.basis(n, n)
        for idx, coeff in form.terms.items():
            cj = coeff if isinstance(coeff, Jet) else Jet.const(coeff)
            dc = cj.derivative()
            if not dc.is_zero():
                out = out + (dc / self.w) * dx_row.wedge(KForm.basis(n, *idx))
            for pos, a in enumerate(idx):
                front = idx[:pos]
                back = idx[pos + 1:]
                piece = dhats[a - 1]
                if front:
                    piece = KForm.basis(n, *front).wedge(piece)
                if back:
                    piece = piece.wedge(KForm.basis(n, *back))
                sign = -1.0 if pos % 2 else 1.0
                out = out + (cj * sign) * piece
        return out


@dataclass
class CartanConnection:
    """Connection 1-forms omega_{ab} solving the first structure equation."""

    dim: int
    forms: list  # forms[a][b] 0-based, KForm degree 1, omega^a_b
    structure_residual: float
    antisymmetry_residual: float


def cartan_connection(cof: CoframeWithJets) -> CartanConnection:
    """Solve d hat-e^a + omega^a_b ^ hat-e^b = 0 with omega_{ab} = -omega_{ba}.

    The coefficients come from the antisymmetrized structure-function
    formula; both defining conditions are then re-verified numerically and
    their residuals reported.
    """
    n = cof.dim
    dhats = cof.coframe_differentials()
    zero = Jet.const(0.0)

    # structure functions: d hat-e^a = -(1/2) C^a_{bc} hat-e^b ^ hat-e^c
    def cfun(a, b, c):
        if b == c:
            return zero
        if b < c:
            coeff = dhats[a - 1].terms.get((b, c))
            sign = -1.0
        else:
            coeff = dhats[a - 1].terms.get((c, b))
            sign = 1.0
        if coeff is None:
            return zero
        return coeff * sign

    gamma = [[[zero] * n for _ in range(n)] for _ in range(n)]  # gamma[c][a][b] = Gamma^a_{cb}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for c in range(1, n + 1):
                val = (cfun(a, c, b) + cfun(b, a, c) - cfun(c, b, a)) * 0.5
                gamma[c - 1][a - 1][b - 1] = val

    forms = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            terms = {}
            for c in range(n):
                coeff = gamma[c][a][b]
                if not coeff.is_zero():
                    terms[(c + 1,)] = coeff
            forms[a][b] = KForm(n, 1, terms)

    # verification: first structure equation and antisymmetry
    anti = 0.0
    for a in range(n):
        for b in range(n):
            diffform = forms[a][b] + forms[b][a]
            anti = max(anti, diffform.max_abs())
    struct = 0.0
    for a in range(n):
        resid = dhats[a]
        for b in range(n):
            resid = resid + forms[a][b].wedge(KForm.basis(n, b + 1))
        struct = max(struct, resid.max_abs())
    return CartanConnection(n, forms, struct, anti)


def curvature_forms(cof: CoframeWithJets, conn: CartanConnection) -> list:
    """Curvature 2-forms Omega^a_b = d omega^a_b + omega^a_c ^ omega^c_b."""
    n = cof.dim
    dhats = cof.coframe_differentials()
    out = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            omega = cof.ext_d(conn.forms[a][b], dhats)
            for c in range(n):
                omega = omega + conn.forms[a][c].wedge(conn.forms[c][b])
            out[a][b] = omega
    return out


def _pair_index(n):
    pairs = [(c, d) for c in range(1, n + 1) for d in range(c + 1, n + 1)]
    return {p: i for i, p in enumerate(pairs)}, pairs


@dataclass
class CurvatureSummary:
    ricci: np.ndarray
    scalar: float
    curvature_rank: int
    structure_residual: float
    antisymmetry_residual: float
    curvature_matrix: np.ndarray = field(repr=False, default=None)


def ricci_and_rank(cof: CoframeWithJets, svd_threshold: float = 1e-8) -> CurvatureSummary:
    """Ricci tensor, scalar curvature, and the dimension of the span of
    the curvature 2-forms at the sample point.

    The rank uses a singular-value cutoff relative to the largest singular
    value; with the coframe orthonormal the Ricci comparison metric is the
    identity.
    """
    conn = cartan_connection(cof)
    omegas = curvature_forms(cof, conn)
    n = cof.dim

    # Ricci_{bd} = sum_a Omega^a_b(e_a, e_d); sphere-positive convention.
    ric = np.zeros((n, n))
    for b in range(n):
        for d in range(n):
            total = 0.0
            for a in range(n):
                if a + 1 == d + 1:
                    pass
                lo, hi = min(a + 1, d + 1), max(a + 1, d + 1)
                if lo == hi:
                    continue
                coeff = omegas[a][b].terms.get((lo, hi))
                if coeff is None:
                    continue
                v = coeff.value
                total += v if a + 1 < d + 1 else -v
            ric[b, d] = total

    index, pairs = _pair_index(n)
    rows = []
    for a in range(n):
        for b in range(a + 1, n):
            row = np.zeros(len(pairs))
            for idx, coeff in omegas[a][b].terms.items():
                row[index[idx]] = coeff.value
            rows.append(row)
    mat = np.array(rows)
    if np.allclose(mat, 0.0):
        rank = 0
    else:
        svals = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(svals > svd_threshold * svals[0]))

    return CurvatureSummary(
        ricci=ric,
        scalar=float(np.trace(ric)),
        curvature_rank=rank,
        structure_residual=conn.structure_residual,
        antisymmetry_residual=conn.antisymmetry_residual,
        curvature_matrix=mat,
    )
