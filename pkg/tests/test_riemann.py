import math
from fractions import Fraction

import numpy as np
import pytest

from qcforge.algebra import catalog, parse_algebra
from qcforge.riemann import (CoframeWithJets, NonAntisymmetricTorsion,
                             SingularCoframe, adjust_by_torsion,
                             cartan_connection, frame_curvature,
                             koszul_levi_civita, ricci_and_rank)
from qcforge.scalars import Jet

SU2 = "algebra su2 dim 3\nd e1 = -1 e2^e3\nd e2 = -1 e3^e1\nd e3 = -1 e1^e2\n"


def zero_torsion(n):
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


class TestExactConnection:
    def test_abelian_levi_civita_vanishes(self):
        alg, _ = parse_algebra("algebra ab dim 4\n" +
                               "\n".join(f"d e{a} = 0" for a in range(1, 5)))
        lc = koszul_levi_civita(alg)
        assert all(x == 0 for a in lc.gamma for b in a for x in b)

    def test_heisenberg_levi_civita_structure(self):
        alg = catalog("heis(1)").algebra
        lc = koszul_levi_civita(alg)
        assert lc.is_metric()
        # nonzero coefficients always touch a vertical index
        for a in range(1, 8):
            for b in range(1, 8):
                for c in range(1, 8):
                    if lc.coeff(c, a, b) != 0:
                        assert max(a, b, c) >= 5
        # torsion-free: antisymmetric part reproduces the brackets
        t = lc.torsion(alg)
        assert all(x == 0 for p in t for q in p for x in q)

    def test_su2_sectional_curvature(self):
        alg, _ = parse_algebra(SU2)
        curv = frame_curvature(koszul_levi_civita(alg), alg)
        assert curv.entry(1, 2, 2, 1) == Fraction(1, 4)
        assert curv.check_pair_antisymmetry()
        assert curv.first_bianchi_residual() == 0

    def test_zero_torsion_adjustment_is_identity(self):
        alg = catalog("l1").algebra
        lc = koszul_levi_civita(alg)
        adjusted = adjust_by_torsion(lc, zero_torsion(7))
        assert adjusted.gamma == lc.gamma

    def test_prescribed_torsion_reproduced(self):
        alg = catalog("heis(1)").algebra
        lc = koszul_levi_civita(alg)
        t = zero_torsion(7)
        # horizontal torsion along the vertical directions
        spec = catalog("heis(1)")
        for s in (1, 2, 3):
            for (a, b), coeff in spec.omega[s - 1].terms.items():
                t[a - 1][b - 1][4 + s - 1] = 2 * coeff
                t[b - 1][a - 1][4 + s - 1] = -2 * coeff
        conn = adjust_by_torsion(lc, t)
        assert conn.is_metric()
        assert conn.torsion(alg) == t
        # this is the flat canonical connection of the Heisenberg frame
        assert frame_curvature(conn, alg).is_zero()

    def test_non_antisymmetric_torsion_rejected(self):
        alg = catalog("heis(1)").algebra
        t = zero_torsion(7)
        t[0][1][4] = Fraction(1)
        with pytest.raises(NonAntisymmetricTorsion):
            adjust_by_torsion(koszul_levi_civita(alg), t)


class TestCartan:
    def test_flat_product(self):
        alg, _ = parse_algebra("algebra ab dim 7\n" +
                               "\n".join(f"d e{a} = 0" for a in range(1, 8)))
        cof = CoframeWithJets(alg, [Jet.const(1.0)] * 7, Jet.const(1.0))
        conn = cartan_connection(cof)
        assert conn.structure_residual == 0.0
        assert all(conn.forms[a][b].is_zero() for a in range(8) for b in range(8))
        summary = ricci_and_rank(cof)
        assert summary.curvature_rank == 0
        assert np.abs(summary.ricci).max() == 0.0

    def test_round_sphere_times_line(self):
        alg, _ = parse_algebra(SU2)
        cof = CoframeWithJets(alg, [Jet.const(1.0)] * 3, Jet.const(1.0))
        summary = ricci_and_rank(cof)
        assert np.allclose(summary.ricci, np.diag([0.5, 0.5, 0.5, 0.0]))
        assert summary.curvature_rank == 3

    def test_structure_equation_residuals_at_samples(self):
        alg = catalog("l1").algebra
        for x in (0.4, 0.9, 1.7, 2.3, 2.9):
            t = Jet.variable(x)
            f = (1 + t.cosh()) * 0.5
            h = t.sinh() * 0.25
            cof = CoframeWithJets(alg, [f.sqrt()] * 4 + [h] * 3, Jet.const(1.0))
            conn = cartan_connection(cof)
            assert conn.structure_residual < 1e-12
            assert conn.antisymmetry_residual < 1e-12

    def test_singular_coframe_rejected(self):
        alg = catalog("heis(1)").algebra
        with pytest.raises(SingularCoframe):
            CoframeWithJets(alg, [Jet.const(0.0)] + [Jet.const(1.0)] * 6,
                            Jet.const(1.0))
        with pytest.raises(SingularCoframe):
            CoframeWithJets(alg, [Jet.const(1.0)] * 7, Jet.const(0.0))

    def test_jet_curvature_matches_finite_differences(self):
        # rebuild the scalings from second-order finite differences of the
        # coefficient functions and compare the resulting Ricci tensor
        alg = catalog("heis(1)").algebra
        b = 1.0
        x0 = 0.4
        step = 1e-4

        def scals(x, exact):
            if exact:
                t = Jet.variable(x)
                f = (t * (2 * b)).exp()
                h = f * b
            else:
                fv = lambda y: math.exp(2 * b * y)
                f = Jet((fv(x),
                         (fv(x + step) - fv(x - step)) / (2 * step),
                         (fv(x + step) - 2 * fv(x) + fv(x - step)) / step**2,
                         0.0))
                h = f * b
            return [f.sqrt()] * 4 + [h] * 3

        exact = ricci_and_rank(CoframeWithJets(alg, scals(x0, True), Jet.const(1.0)))
        approx = ricci_and_rank(CoframeWithJets(alg, scals(x0, False), Jet.const(1.0)))
        rel = np.abs(exact.ricci - approx.ricci).max() / np.abs(exact.ricci).max()
        assert rel < 1e-4

    def test_rank_invariant_under_global_rescaling(self):
        alg = catalog("l1").algebra
        t = Jet.variable(1.2)
        f = (1 + t.cosh()) * 0.5
        h = t.sinh() * 0.25
        base = [f.sqrt()] * 4 + [h] * 3
        r1 = ricci_and_rank(CoframeWithJets(alg, base, Jet.const(1.0)))
        scaled = [s * 3.0 for s in base]
        r2 = ricci_and_rank(CoframeWithJets(alg, scaled, Jet.const(3.0)))
        assert r1.curvature_rank == r2.curvature_rank
        assert r1.curvature_rank <= 28
