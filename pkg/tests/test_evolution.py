import math
import random
from fractions import Fraction

import pytest

from qcforge.algebra import catalog
from qcforge.evolution import (FAMILIES, NotEinsteinBase, build_family,
                               extended_d, ode_residual, require_einstein_base)
from qcforge.forms import KForm
from qcforge.scalars import DomainError, Jet

TOL = 1e-10


class TestExtendedDifferential:
    def test_d_squared_zero_with_jets(self):
        rng = random.Random(42)
        alg = catalog("l2").algebra
        for _ in range(5):
            x = Jet.variable(rng.uniform(0.5, 2.0))
            form = KForm(8, 2)
            for _ in range(6):
                pick = tuple(rng.sample(range(1, 9), 2))
                coeff = (x * rng.uniform(-0.8, 0.8)).exp() * rng.uniform(-2, 2)
                form = form + coeff * KForm.basis(8, *pick)
            dd = extended_d(alg, extended_d(alg, form))
            assert dd.max_abs() < 1e-12

    def test_reduces_to_base_differential_for_constant_coefficients(self):
        alg = catalog("heis(1)").algebra
        form = KForm(8, 1, {(5,): Jet.const(1.0)})
        d = extended_d(alg, form)
        assert abs(d.terms[(1, 2)].value - 2.0) < 1e-15
        assert abs(d.terms[(3, 4)].value - 2.0) < 1e-15
        assert (8,) not in {idx[-1:] for idx in d.terms}


class TestDiagonalBuilds:
    def test_qk_families_einstein(self):
        for name, const in (("qk-heis", -16.0), ("qk-l1", -4.0), ("qk-l2", -2.0)):
            r = build_family(name)
            assert r["dform_residual"] < TOL
            assert abs(r["einstein_const"] - const) < 1e-8 * abs(const)
            assert r["einstein_deviation"] < 1e-8 * abs(const)
            assert r["curvature_rank"] == 13
            assert r["ideal_residual"] < 1e-8

    def test_qk_heis2_dimension_dependence(self):
        r = build_family("qk-heis2")
        assert r["dform_residual"] < TOL
        assert abs(r["einstein_const"] + 20.0) < 2e-7
        assert r["curvature_rank"] == 24

    def test_qk_parameter_scaling(self):
        r = build_family("qk-l2", params={"b": 2})
        assert abs(r["einstein_const"] + 8.0) < 1e-7

    def test_spin7_families(self):
        for name in ("spin7-heis", "spin7-l1", "spin7-l2"):
            r = build_family(name)
            assert r["dform_residual"] < TOL
            assert r["ricci_max_abs"] < 1e-8
            assert r["cocalibration_residual"] < TOL
            assert r["hitchin_residual"] < TOL
            assert r["psi_consistency"] < TOL

    def test_spin7_rank_bounds(self):
        assert build_family("spin7-l1")["curvature_rank"] >= 16
        assert build_family("spin7-l2")["curvature_rank"] == 21

    def test_static_product_trivially_closed(self):
        # constant f with the vertical coefficient shut off: the triple is
        # just f omega_i, so the 4-form is constant horizontal and closed
        # (no metric is built: the product degenerates)
        from qcforge.evolution import build_qk
        from qcforge.scalars import Const
        spec = catalog("heis(1)")
        r = build_qk(spec, Fraction(0), Const(1), Const(0), Const(1),
                     [0.0, 0.5])
        assert r["dform_residual"] < TOL
        assert r["einstein_const"] is None


class TestTriaxial:
    def test_distinct_constants_not_einstein_not_ideal(self):
        r = build_family("qk-triaxial")
        assert r["dform_residual"] < TOL
        assert r["ideal_residual"] > 1e-3
        assert r["einstein_deviation"] > 1e-3

    def test_equal_constants_reduce_to_einstein_family(self):
        r = build_family("qk-triaxial", params={"a1": 1, "a2": 1, "a3": 1})
        assert r["dform_residual"] < TOL
        assert r["ideal_residual"] < 1e-8
        assert r["einstein_deviation"] < 1e-8

    def test_spin7_triaxial(self):
        r = build_family("spin7-triaxial")
        assert r["dform_residual"] < TOL
        assert r["ricci_max_abs"] < 1e-8
        assert r["curvature_rank"] == 21

    def test_spin7_triaxial_reduction_matches_single_parameter_family(self):
        # a2 = a1, a3 = -a1 collapses the three vertical coefficients to a
        # common value; the metric coefficients then match the one-parameter
        # family under v = -(u + a1) with its constant fixed by a^2 = 32/C
        funcs = FAMILIES["spin7-triaxial"].functions({"a1": 1, "a2": 1, "a3": -1})
        a_val = math.sqrt(32.0)
        for u in (-2.5, -2.0, -1.6):
            v = -(u + 1.0)
            f3 = [funcs[k].jet(u).value for k in ("f1", "f2", "f3")]
            assert max(f3) - min(f3) < 1e-12
            assert abs(funcs["f"].jet(u).value - v**3) < 1e-12
            assert abs(abs(f3[0]) - a_val / 4 / v) < 1e-12
            assert abs(funcs["w"].jet(u).value - (2 / a_val) * v**3) < 1e-12

    def test_ideal_family(self):
        r = build_family("ideal-family", samples=[0.0, 0.5])
        assert r["ideal_residual"] < TOL
        assert r["dform_residual"] > 1e-3

    def test_ideal_family_equal_constants_still_ideal(self):
        r = build_family("ideal-family",
                         params={"a1": 2, "a2": 2, "a3": 2},
                         samples=[0.0, 0.5, 1.0])
        assert r["ideal_residual"] < TOL


class TestDomainGuards:
    def test_spin7_sample_beyond_coefficient_zero(self):
        with pytest.raises(DomainError):
            build_family("spin7-l1", samples=[0.5, 3.0])  # b=2: zero at u ~ 1.516

    def test_triaxial_straddling_a_root(self):
        with pytest.raises(DomainError):
            build_family("spin7-triaxial", samples=[-1.5, -0.5])

    def test_ideal_family_outside_domain(self):
        with pytest.raises(DomainError):
            build_family("ideal-family", samples=[2.5])

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError):
            build_family("qk-l1", params={"zz": 1})

    def test_non_einstein_base_rejected(self):
        with pytest.raises(NotEinsteinBase):
            require_einstein_base("l3", Fraction(-1))
        with pytest.raises(NotEinsteinBase):
            require_einstein_base("l1", Fraction(0))


class TestOdeSystems:
    def test_every_family_satisfies_its_systems(self):
        for name, fam in FAMILIES.items():
            funcs = fam.functions()
            pts = fam.default_samples()
            for system in fam.systems:
                assert ode_residual(system, funcs, fam.S, pts) < TOL, \
                    f"{name}/{system}"

    def test_positive_scalar_families(self):
        fam = FAMILIES["qk-3sas"]
        assert ode_residual("solqk7", fam.functions(), Fraction(2),
                            fam.default_samples()) < TOL
        fam = FAMILIES["spin7-3sas"]
        assert ode_residual("sol7", fam.functions(), Fraction(2),
                            fam.default_samples()) < TOL

    def test_wrong_system_fails(self):
        # the quaternion-type profile does not satisfy the self-dual system
        fam = FAMILIES["qk-l1"]
        res = ode_residual("sol7", fam.functions(), fam.S, fam.default_samples())
        assert res > 1e-3

    def test_unknown_system_rejected(self):
        with pytest.raises(ValueError):
            ode_residual("nope", FAMILIES["qk-l1"].functions(), Fraction(0), [1.0])


class TestParameterizationBridges:
    def test_flat_family_matches_u_parameterization(self):
        # with vanishing scalar the x-parameterization is u = exp(2 b x):
        # horizontal coefficient u, vertical b^2 u^2, and unit dx^2
        funcs = FAMILIES["qk-heis"].functions({"b": Fraction(1)})
        for x in (-0.3, 0.0, 0.4):
            u = math.exp(2 * x)
            assert abs(funcs["f"].jet(x).value - u) < 1e-12
            assert abs(funcs["h"].jet(x).value ** 2 - u * u) < 1e-12
            assert funcs["w"].jet(x).value == 1.0

    def test_l1_family_matches_u_parameterization(self):
        # u(x) = (1 + cosh x)/(2 b^2) turns the closed forms into the
        # u-parameterized family: h^2 = S u/2 + a u^2 with a = b^2/4,
        # w^2 = 1/(2(S u + 2 a u^2)) pulled back through du = u'(x) dx
        b = 1.0
        s = -0.5
        a = b * b / 4
        funcs = FAMILIES["qk-l1"].functions({"b": Fraction(1)})
        for x in (0.5, 1.1, 2.2):
            u = (1 + math.cosh(x)) / (2 * b * b)
            du = math.sinh(x) / (2 * b * b)
            h2 = s * u / 2 + a * u * u
            w2_u = 1.0 / (2 * (s * u + 2 * a * u * u))
            assert abs(funcs["f"].jet(x).value - u) < 1e-12
            assert abs(funcs["h"].jet(x).value ** 2 - h2) < 1e-12
            assert abs(funcs["w"].jet(x).value ** 2 - w2_u * du * du) < 1e-12

    def test_spin7_l2_matches_closed_form(self):
        b = 2.0
        funcs = FAMILIES["spin7-l2"].functions()
        for u in (0.4, 0.9, 1.3):
            h2 = (b - u ** (5.0 / 3.0)) / (40 * u ** (2.0 / 3.0))
            w2 = 10 * u ** (2.0 / 3.0) / (9 * (b - u ** (5.0 / 3.0)))
            assert abs(funcs["h"].jet(u).value ** 2 - h2) < 1e-12
            assert abs(funcs["w"].jet(u).value ** 2 - w2) < 1e-12


class TestOrientationConvention:
    def test_dual_form_pair_matches_hodge_star(self):
        # the 3-form / 4-form pair of the frozen structure is a Hodge dual
        # pair for the reversed orientation of e^{1234} eta_1 eta_2 eta_3
        from qcforge.forms import hodge_star
        spec = catalog("heis(1)")
        omega = spec.omega
        eta = [KForm.basis(7, 4 + s) for s in (1, 2, 3)]
        g2 = KForm(7, 3)
        cyc = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
        for i, j, k in cyc:
            g2 = g2 + omega[i - 1].wedge(eta[i - 1])
        g2 = g2 - eta[0].wedge(eta[1]).wedge(eta[2])
        star = Fraction(1, 2) * omega[0].wedge(omega[0])
        for i, j, k in cyc:
            star = star - omega[i - 1].wedge(eta[j - 1]).wedge(eta[k - 1])
        assert hodge_star(g2, (2, 1, 3, 4, 5, 6, 7)) == star
        assert hodge_star(g2, (1, 2, 3, 4, 5, 6, 7)) == -1 * star
