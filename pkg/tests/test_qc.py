from fractions import Fraction

from qcforge import qc
from qcforge.algebra import catalog, parse_algebra
from qcforge.forms import KForm


def e(*idx):
    return KForm.basis(7, *idx)


REPORTS = {}


def report(name):
    if name not in REPORTS:
        REPORTS[name] = qc.analyze(catalog(name), name)
    return REPORTS[name]


class TestReeb:
    def test_catalog_entries_pass(self):
        for name in ("heis(1)", "heis(2)", "l0(1)", "l1", "l2", "l3"):
            assert qc.reeb_check(catalog(name)).ok

    def test_broken_transversality_detected(self):
        # d eta_1 gains a e1^e5 term: xi_1 hooked into it no longer vanishes
        # horizontally
        src = """algebra broken dim 7
d e5 = 2 e1^e2 + 2 e3^e4 + e1^e5
d e6 = 2 e1^e3 + 2 e4^e2
d e7 = 2 e1^e4 + 2 e2^e3
qc horizontal = e1..e4 ; vertical = e5,e6,e7
omega1 = e1^e2 + e3^e4
omega2 = e1^e3 + e4^e2
omega3 = e1^e4 + e2^e3
"""
        _, spec = parse_algebra(src)
        rep = qc.reeb_check(spec)
        assert not rep.ok
        assert any("xi_1" in v for v in rep.violations)

    def test_mixed_condition_detected(self):
        src = """algebra broken2 dim 7
d e5 = 2 e1^e2 + 2 e3^e4
d e6 = 2 e1^e3 + 2 e4^e2 + e1^e7
d e7 = 2 e1^e4 + 2 e2^e3
qc horizontal = e1..e4 ; vertical = e5,e6,e7
omega1 = e1^e2 + e3^e4
omega2 = e1^e3 + e4^e2
omega3 = e1^e4 + e2^e3
"""
        _, spec = parse_algebra(src)
        assert not qc.reeb_check(spec).ok


class TestScalarInvariant:
    def test_published_values(self):
        assert report("heis(1)").S == 0
        assert report("heis(2)").S == 0
        assert report("l0(1)").S == 0
        assert report("l1").S == Fraction(-1, 2)
        assert report("l2").S == Fraction(-1, 4)
        assert report("l3").S == Fraction(-1)

    def test_trace_crosscheck(self):
        for name in ("heis(1)", "heis(2)", "l0(1)", "l1", "l2", "l3"):
            assert report(name).scalar_crosscheck_ok


class TestConnectionForms:
    def test_l1(self):
        alphas = report("l1").sp1.alphas
        assert alphas == (Fraction(1, 2) * e(5), Fraction(1, 2) * e(6),
                          Fraction(1, 2) * e(7))

    def test_l2(self):
        alphas = report("l2").sp1.alphas
        assert alphas == (Fraction(-1, 2) * e(2), -1 * e(3), -1 * e(4))

    def test_l3(self):
        alphas = report("l3").sp1.alphas
        assert alphas[0] == Fraction(3, 4) * e(5)
        assert alphas[1] == -1 * e(1) + Fraction(1, 4) * e(6)
        assert alphas[2] == -1 * e(2) + Fraction(1, 4) * e(7)

    def test_l0_scales_with_parameter(self):
        for c in (Fraction(1), Fraction(-2, 3)):
            rep = qc.analyze(catalog(f"l0({c})"), "l0")
            assert rep.sp1.alphas[0].is_zero()
            assert rep.sp1.alphas[1].is_zero()
            assert rep.sp1.alphas[2] == c * e(4)

    def test_ricci_forms_einstein_multiple(self):
        # zero-torsion entries have rho_s = -S omega_s horizontally
        for name in ("heis(1)", "l0(1)", "l1", "l2"):
            rep = report(name)
            spec = catalog(name)
            for s in (1, 2, 3):
                assert rep.sp1.rho_h[s - 1] == (-rep.S) * spec.omega[s - 1]

    def test_l3_ricci_forms(self):
        rep = report("l3")
        s = rep.S
        half = Fraction(1, 2)
        quarter = Fraction(1, 4)
        spec = catalog("l3")
        assert rep.sp1.rho_h[0] == quarter * (e(1, 2) - e(3, 4)) \
            + half * (1 - s) * spec.omega[0]
        assert rep.sp1.rho_h[1] == half * (1 - s) * spec.omega[1]
        assert rep.sp1.rho_h[2] == half * (1 - s) * spec.omega[2]


class TestTorsion:
    def test_einstein_entries_have_no_torsion(self):
        for name in ("heis(1)", "heis(2)", "l0(1)", "l1", "l2"):
            rep = report(name)
            assert rep.torsion.is_einstein()
            assert rep.einstein

    def test_l3_symmetric_part(self):
        rep = report("l3")
        spec = catalog("l3")
        psi = Fraction(-1, 4) * (e(1, 2) - e(3, 4))
        psi_m = qc._form_matrix(psi, spec.horizontal)
        m1 = spec.complex_structure(1)
        want = [[sum(psi_m[x][c] * m1[c][y] for c in range(4)) for y in range(4)]
                for x in range(4)]
        assert rep.torsion.T0 == want
        assert all(v == 0 for row in rep.torsion.U for v in row)
        assert not rep.einstein

    def test_vertical_torsion(self):
        # T(xi_1, xi_2) = -S xi_3 - [xi_1, xi_2]_H; for l1 the bracket is
        # vertical so only the scalar part remains
        rep = report("l1")
        vec = rep.torsion.Tvv[(1, 2)]
        assert vec.components[6] == Fraction(1, 2)
        assert all(vec.components[i] == 0 for i in range(6))

    def test_txi_trace_free(self):
        for name in ("l1", "l2", "l3"):
            rep = report(name)
            spec = catalog(name)
            for s in (1, 2, 3):
                endo = rep.torsion.Txi[s - 1]
                assert sum(endo[i][i] for i in range(4)) == 0
                m = spec.complex_structure(s)
                comp = [[sum(endo[r][c] * m[c][q] for c in range(4))
                         for q in range(4)] for r in range(4)]
                assert sum(comp[i][i] for i in range(4)) == 0


class TestCurvature:
    def test_flat_entries(self):
        for name in ("heis(1)", "heis(2)", "l0(1)"):
            assert report(name).curvature.is_zero()

    def test_l1_sectional_entries(self):
        curv = report("l1").curvature
        for a in range(1, 5):
            for b in range(1, 5):
                if a != b:
                    assert curv.entry(a, b, a, b) == 1
                    assert curv.entry(a, b, b, a) == -1

    def test_l2_l3_mixed_entry(self):
        assert report("l2").curvature.entry(1, 2, 3, 4) == Fraction(-1, 2)
        assert report("l3").curvature.entry(1, 2, 3, 4) == Fraction(-1, 2)

    def test_metric_pair_antisymmetry(self):
        for name in ("l1", "l2", "l3"):
            assert report(name).curvature.check_pair_antisymmetry()

    def test_sp1_part_identity(self):
        for name in ("l1", "l2", "l3", "heis(1)"):
            assert report(name).sp1curv_ok

    def test_rho_contraction_matches_connection_route(self):
        for name in ("l1", "l2", "l3", "heis(2)"):
            assert report(name).rho_crosscheck_ok


class TestConformalCurvature:
    def test_l1_flat(self):
        assert report("l1").wqc_zero

    def test_l2_l3_nonflat_value(self):
        for name in ("l2", "l3"):
            rep = report(name)
            assert not rep.wqc_zero
            assert rep.wqc_sample == Fraction(-1, 2)

    def test_pair_antisymmetry(self):
        for name in ("l2", "l3"):
            rep = report(name)
            spec = catalog(name)
            w = qc.wqc_tensor(spec, rep.torsion, rep.curvature)
            k = len(spec.horizontal)
            for x in range(k):
                for y in range(k):
                    for z in range(k):
                        for v in range(k):
                            assert w[x][y][z][v] == -w[y][x][z][v]
                            assert w[x][y][z][v] == -w[x][y][v][z]

    def test_flat_model_has_zero_wqc(self):
        assert report("heis(1)").wqc_zero
        assert report("heis(2)").wqc_zero


class TestFundamentalForms:
    def test_closedness_verdicts(self):
        for name in ("heis(1)", "heis(2)", "l0(1)", "l1", "l2"):
            rep = report(name)
            assert rep.omega4_closed and rep.omegaQ_closed
        rep = report("l3")
        assert not rep.omega4_closed
        assert not rep.omegaQ_closed

    def test_lemma_combination_closed_everywhere(self):
        for name in ("heis(1)", "heis(2)", "l0(1)", "l1", "l2", "l3"):
            assert report(name).lemma_closed

    def test_dim7_vertical_integrability_equivalence(self):
        for name in ("heis(1)", "l0(1)", "l1", "l2"):
            assert report(name).vertical_integrability is True
        assert report("l3").vertical_integrability is False


class TestReportSerialization:
    def test_fixed_field_names(self):
        d = report("l1").to_dict()
        for key in ("s", "einstein", "wqc_zero", "omega4_closed",
                    "torsion_t0", "torsion_u"):
            assert key in d
        assert d["s"] == "-1/2"
        assert d["einstein"] is True

    def test_heis2_report(self):
        d = report("heis(2)").to_dict()
        assert d["s"] == "0"
        assert d["wqc_zero"] is True
