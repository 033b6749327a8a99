"""The acceptance suite: every headline claim the engine is expected to
certify, with its tolerance pinned.

Each criterion function returns (ok, detail).  The pytest module and the
``sweep`` CLI command both drive :func:`run_all`, so the release gate and
the command-line regression run are the same code.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import dga, qc
from .algebra import catalog, jacobi_check
from .evolution import FAMILIES, build_family, extended_d, ode_residual
from .forms import KForm
from .poly import Poly
from .riemann import CoframeWithJets, adjust_by_torsion, cartan_connection, koszul_levi_civita
from .scalars import Jet, jet_eval, parse_scalar_function

TOL_RESIDUAL = 1e-10
TOL_RICCI = 1e-8
TOL_STRUCTURE = 1e-12
TOL_JET_FD = 1e-4

EINSTEIN_ENTRIES = ("heis(1)", "heis(2)", "l0(1)", "l1", "l2")
ALL_ENTRIES = EINSTEIN_ENTRIES + ("l3",)

_REPORTS: dict[str, qc.QcReport] = {}


def _report(name: str) -> qc.QcReport:
    if name not in _REPORTS:
        _REPORTS[name] = qc.analyze(catalog(name), name)
    return _REPORTS[name]


_BUILDS: dict[str, dict] = {}


def _build(name: str, **kw) -> dict:
    key = name + repr(sorted((kw.get("params") or {}).items()))
    if key not in _BUILDS:
        _BUILDS[key] = build_family(name, **kw)
    return _BUILDS[key]


def criterion_1():
    """Exact integrability of every catalog coframe."""
    bad = [n for n in ALL_ENTRIES if not jacobi_check(catalog(n).algebra).ok]
    return not bad, f"jacobi violations: {bad}" if bad else "d.d = 0 on all six catalog coframes"


def criterion_2():
    """Normalized scalar invariant, exact, plus the curvature-trace cross-check."""
    want = {"heis(1)": Fraction(0), "heis(2)": Fraction(0), "l0(1)": Fraction(0),
            "l1": Fraction(-1, 2), "l2": Fraction(-1, 4), "l3": Fraction(-1)}
    problems = []
    for name, expected in want.items():
        rep = _report(name)
        if rep.S != expected:
            problems.append(f"{name}: S={rep.S} != {expected}")
        if not rep.scalar_crosscheck_ok:
            problems.append(f"{name}: curvature trace check failed")
    return not problems, "; ".join(problems) or "S exact and trace-checked on all entries"


def _expected_alphas(name: str, dim: int = 7):
    e = lambda *idx: KForm.basis(dim, *idx)
    if name.startswith("heis"):
        z = KForm(dim, 1)
        return (z, z, z)
    if name == "l0(1)":
        return (KForm(7, 1), KForm(7, 1), e(4))
    if name == "l1":
        return (Fraction(1, 2) * e(5), Fraction(1, 2) * e(6), Fraction(1, 2) * e(7))
    if name == "l2":
        return (Fraction(-1, 2) * e(2), -1 * e(3), -1 * e(4))
    if name == "l3":
        return (Fraction(3, 4) * e(5), -1 * e(1) + Fraction(1, 4) * e(6),
                -1 * e(2) + Fraction(1, 4) * e(7))
    raise KeyError(name)


def criterion_3():
    """sp(1) connection 1-forms match their published closed forms."""
    problems = []
    for name in ("heis(1)", "l0(1)", "l1", "l2", "l3"):
        rep = _report(name)
        want = _expected_alphas(name, rep.sp1.alphas[0].dim)
        for s in (1, 2, 3):
            if rep.sp1.alphas[s - 1] != want[s - 1]:
                problems.append(f"{name}: alpha_{s} = {rep.sp1.alphas[s - 1]} != {want[s - 1]}")
    # parametrized flat rotation: third form scales with the parameter
    rep = qc.analyze(catalog("l0(-2/3)"), "l0(-2/3)")
    if rep.sp1.alphas[2] != Fraction(-2, 3) * KForm.basis(7, 4):
        problems.append("l0(c): alpha_3 does not scale with c")
    return not problems, "; ".join(problems) or "connection forms exact on all entries"


def criterion_4():
    """Torsion parts: zero except the stated symmetric tensor of l3."""
    problems = []
    for name in EINSTEIN_ENTRIES:
        rep = _report(name)
        if not rep.torsion.is_einstein():
            problems.append(f"{name}: torsion endomorphism should vanish")
    rep = _report("l3")
    spec = catalog("l3")
    psi = Fraction(-1, 4) * (KForm.basis(7, 1, 2) - KForm.basis(7, 3, 4))
    psi_m = qc._form_matrix(psi, spec.horizontal)
    m1 = spec.complex_structure(1)
    want = [[sum(psi_m[x][c] * m1[c][y] for c in range(4)) for y in range(4)]
            for x in range(4)]
    if rep.torsion.T0 != want:
        problems.append("l3: T0 != psi(. , I_1 .)")
    if any(v != 0 for row in rep.torsion.U for v in row):
        problems.append("l3: U != 0")
    return not problems, "; ".join(problems) or "torsion decomposition exact on all entries"


def criterion_5():
    """Curvature of the canonical connection at the published entries."""
    problems = []
    for name in ("heis(1)", "heis(2)", "l0(1)"):
        if not _report(name).curvature.is_zero():
            problems.append(f"{name}: connection should be flat")
    r1 = _report("l1").curvature
    for a in range(1, 5):
        for b in range(1, 5):
            if a != b and r1.entry(a, b, a, b) != 1:
                problems.append(f"l1: R({a},{b},{a},{b}) != 1")
    for name in ("l2", "l3"):
        if _report(name).curvature.entry(1, 2, 3, 4) != Fraction(-1, 2):
            problems.append(f"{name}: R(1,2,3,4) != -1/2")
    return not problems, "; ".join(problems) or "curvature entries exact"


def criterion_6():
    """Conformal curvature: flat for l1, the stated nonzero entry for l2, l3."""
    problems = []
    if not _report("l1").wqc_zero:
        problems.append("l1: W != 0")
    for name in ("l2", "l3"):
        rep = _report(name)
        if rep.wqc_zero or rep.wqc_sample != Fraction(-1, 2):
            problems.append(f"{name}: W(1,2,3,4) = {rep.wqc_sample} != -1/2")
    return not problems, "; ".join(problems) or "conformal curvature verdicts exact"


def criterion_7():
    """Fundamental 4-forms closed on Einstein entries; the mixed
    combination closed on every entry including l3."""
    problems = []
    for name in EINSTEIN_ENTRIES:
        rep = _report(name)
        if not (rep.omega4_closed and rep.omegaQ_closed):
            problems.append(f"{name}: fundamental forms not closed")
    for name in ALL_ENTRIES:
        if not _report(name).lemma_closed:
            problems.append(f"{name}: mixed combination not closed")
    if _report("l3").omega4_closed:
        problems.append("l3: fundamental form unexpectedly closed")
    return not problems, "; ".join(problems) or "closedness verdicts exact"


def criterion_8():
    """Quaternion-type builds: closed 4-form and the stated Einstein
    constants to relative tolerance."""
    cases = ("qk-heis", "qk-heis2", "qk-l1", "qk-l2")
    problems = []
    for name in cases:
        r = _build(name)
        if r["dform_residual"] >= TOL_RESIDUAL:
            problems.append(f"{name}: |dPhi| = {r['dform_residual']:.2e}")
        lam = r["einstein_const"]
        want = r["einstein_expected"]
        rel = abs(lam - want) / abs(want)
        dev = r["einstein_deviation"] / abs(want)
        if rel >= TOL_RICCI or dev >= TOL_RICCI:
            problems.append(f"{name}: Ricci off ({lam} vs {want}, dev {dev:.2e})")
    return not problems, "; ".join(problems) or "all four builds Einstein at the stated constants"


def criterion_9():
    """Self-dual builds: closed, Ricci-flat, with the curvature-span bounds."""
    problems = []
    for name in ("spin7-heis", "spin7-l1", "spin7-l2", "spin7-triaxial"):
        r = _build(name)
        if r["dform_residual"] >= TOL_RESIDUAL:
            problems.append(f"{name}: |dPsi| = {r['dform_residual']:.2e}")
        if r["ricci_max_abs"] >= TOL_RICCI:
            problems.append(f"{name}: |Ricci| = {r['ricci_max_abs']:.2e}")
    if _build("spin7-l1")["curvature_rank"] < 16:
        problems.append("spin7-l1: curvature span below 16")
    if _build("spin7-l2")["curvature_rank"] != 21:
        problems.append("spin7-l2: curvature span != 21")
    return not problems, "; ".join(problems) or "all builds closed, Ricci-flat, span bounds met"


def criterion_10():
    """Triaxial family: always closed; Einstein and ideal exactly when the
    three constants coincide."""
    problems = []
    distinct = _build("qk-triaxial")
    equal = _build("qk-triaxial", params={"a1": 1, "a2": 1, "a3": 1})
    skew = _build("qk-triaxial", params={"a1": Fraction(1, 2), "a2": 1, "a3": 3})
    for tag, r in (("(0,1,2)", distinct), ("(1,1,1)", equal), ("(1/2,1,3)", skew)):
        if r["dform_residual"] >= TOL_RESIDUAL:
            problems.append(f"a={tag}: |dPhi| = {r['dform_residual']:.2e}")
    if distinct["einstein_deviation"] <= 1e-3 or distinct["ideal_residual"] <= 1e-3:
        problems.append("a=(0,1,2): should be neither Einstein nor an ideal")
    if equal["einstein_deviation"] >= 1e-8 or equal["ideal_residual"] >= 1e-8:
        problems.append("a=(1,1,1): should reduce to the Einstein family")
    return not problems, "; ".join(problems) or "triaxial closed always; Einstein/ideal iff equal constants"


def criterion_11():
    """Differential-ideal family: an ideal, but never closed."""
    r = _build("ideal-family", samples=[0.0, 0.5])
    ok = r["ideal_residual"] < TOL_RESIDUAL and r["dform_residual"] > 1e-3
    return ok, (f"ideal remainder {r['ideal_residual']:.2e}, "
                f"|dPhi| {r['dform_residual']:.2e}")


def criterion_12():
    """Governing ODE systems: every catalog family, including the positive-
    scalar pair, satisfies its systems on the default samples."""
    problems = []
    for name, fam in FAMILIES.items():
        funcs = fam.functions()
        pts = fam.default_samples()
        for system in fam.systems:
            res = ode_residual(system, funcs, fam.S, pts)
            if res >= TOL_RESIDUAL:
                problems.append(f"{name}/{system}: {res:.2e}")
    return not problems, "; ".join(problems) or "all governing systems satisfied"


def criterion_13():
    """Symbolic suite with the scalar left free."""
    problems = []
    if not dga.verify_closedqc().is_zero():
        problems.append("mixed combination not closed symbolically")
    f, h = Poly.symbol("f"), Poly.symbol("h")
    fp, fpp = Poly.symbol("f'"), Poly.symbol("f''")
    hp, s = Poly.symbol("h'"), Poly.symbol("S")
    qk_res = dga.verify_qk_closure()
    if qk_res["omega_omega_dt"] != 2 * f * fp - 4 * f * h:
        problems.append("first closedness coefficient wrong")
    if qk_res["mixed"] != 2 * (fp * h * h + 2 * f * h * hp) + 2 * s * f * h - 12 * h**3:
        problems.append("second closedness coefficient wrong")
    if not qk_res["omega_omega_dt_sub"].is_zero() or qk_res["factored"] != fp * (f * fpp - fp * fp + s * f):
        problems.append("substituted closedness does not factor through the governing equation")
    s7 = dga.verify_spin7_closure()
    if s7["omega_omega_dt"] != 2 * f * fp - 12 * f * h:
        problems.append("self-dual first coefficient wrong")
    if s7["mixed"] != -(2 * (fp * h * h + 2 * f * h * hp) - 2 * s * f * h - 4 * h**3):
        problems.append("self-dual second coefficient wrong")
    if not s7["omega_omega_dt_sub"].is_zero() or \
            (-27) * s7["factored"] != fp * (3 * f * fpp + fp * fp - 9 * s * f):
        problems.append("self-dual reduction does not match the governing equation")
    t = dga.verify_triaxial_systems()
    fs = t["fs"]
    prod, fsum = t["prod"], t["fsum"]
    if t["qk_first"] != 2 * f * (3 * fp - 2 * fsum):
        problems.append("triaxial first equation wrong")
    cyc = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
    for i, j, k in cyc:
        fi, fj, fk = fs[i - 1], fs[j - 1], fs[k - 1]
        fjp, fkp = Poly.symbol(f"f{j}'"), Poly.symbol(f"f{k}'")
        dffjfk = fp * fj * fk + f * fjp * fk + f * fj * fkp
        if t["qk_rows"][i - 1] != 2 * (dffjfk - s * f * (fi - fj - fk) - 6 * prod):
            problems.append(f"triaxial row {i} wrong")
        if t["spin7_rows"][i - 1] != -2 * (dffjfk - 2 * prod):
            problems.append(f"self-dual triaxial row {i} wrong")
        rel = (f * (fjp * fk + fj * fkp) - fp * fj * fk + 2 * prod
               - 2 * fj * fk * (fj + fk) + s * f * (fj + fk) - s * f * fi)
        if t["ideal_rows"][i - 1] != f * rel:
            problems.append(f"ideal relation {i} wrong")
    if t["spin7_first"] != 2 * f * (fp - 2 * fsum):
        problems.append("self-dual triaxial first equation wrong")
    hypo = dga.verify_hypo_evolution()
    qkc = dga.verify_qk_closure()
    if hypo["v_coeff"] != 3 * qkc["omega_omega_dt"] or \
            any(m != qkc["mixed"] for m in hypo["mixed"]):
        problems.append("evolution residual does not match the closedness system")
    return not problems, "; ".join(problems) or "symbolic systems reproduce all published coefficients"


def _random_rational_form(rng, dim, degree, density=4):
    form = KForm(dim, degree)
    idxs = list(range(1, dim + 1))
    for _ in range(density):
        pick = tuple(rng.sample(idxs, degree))
        coeff = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        form = form + coeff * KForm.basis(dim, *pick)
    return form


def criterion_14():
    """Property battery: nilpotency of d, the Hodge sign law, prescribed
    torsion, the structure-equation residuals, and jets against finite
    differences."""
    rng = random.Random(20240)
    problems = []

    # d.d = 0: exact on catalog coframes
    for name in ("l1", "l2", "l3", "heis(2)"):
        alg = catalog(name).algebra
        for degree in (1, 2, 3):
            form = _random_rational_form(rng, alg.dim, degree)
            if not alg.mc_differential(alg.mc_differential(form)).is_zero():
                problems.append(f"d.d != 0 on {name} (degree {degree})")

    # d.d = 0 with jet coefficients on the extended frame
    alg = catalog("l1").algebra
    for _ in range(3):
        x = Jet.variable(rng.uniform(0.5, 1.5))
        form = KForm(8, 2)
        for _ in range(5):
            pick = tuple(rng.sample(range(1, 9), 2))
            coeff = (x * rng.uniform(-1, 1)).exp() * rng.uniform(-2, 2)
            form = form + coeff * KForm.basis(8, *pick)
        dd = extended_d(alg, extended_d(alg, form))
        if dd.max_abs() >= 1e-12:
            problems.append(f"extended d.d = {dd.max_abs():.1e}")

    # Hodge star involution sign (-1)^{k(n-k)}
    for dim in (5, 7):
        orient = tuple(range(1, dim + 1))
        for degree in (1, 2, 3):
            form = _random_rational_form(rng, dim, degree)
            twice = form.hodge_star(orient).hodge_star(orient)
            sign = (-1) ** (degree * (dim - degree))
            if twice != sign * form:
                problems.append(f"star.star sign law fails (dim {dim}, degree {degree})")

    # prescribed torsion reproduced exactly
    spec = catalog("l2")
    rep = _report("l2")
    want = qc.assemble_torsion_tensor(spec, rep.torsion)
    have = rep.connection.torsion(spec.algebra)
    if want != have:
        problems.append("adjusted connection torsion mismatch")
    lc = koszul_levi_civita(spec.algebra)
    n = spec.algebra.dim
    zero_t = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    if adjust_by_torsion(lc, zero_t).gamma != lc.gamma:
        problems.append("zero-torsion adjustment is not the identity")

    # structure-equation residuals of the connection solver
    fam = FAMILIES["spin7-l1"]
    funcs = fam.functions()
    for x in fam.default_samples():
        fj = funcs["f"].jet(x)
        hj = funcs["h"].jet(x)
        scal = [fj.sqrt()] * 4 + [hj] * 3
        cof = CoframeWithJets(catalog("l1").algebra, scal, funcs["w"].jet(x))
        conn = cartan_connection(cof)
        if conn.structure_residual >= TOL_STRUCTURE or conn.antisymmetry_residual >= TOL_STRUCTURE:
            problems.append(f"connection solver residual at x={x}")

    # jets against central finite differences
    exprs = ("u^2 * exp(u)", "cosh(u) / (1 + u^2)", "u^(5/3) - ln(u)",
             "sinh(u) * u^(-1/2)")
    step = 1e-5
    for text in exprs:
        fn = parse_scalar_function(text)
        for x in (0.7, 1.3, 2.1):
            base = jet_eval(fn, x)
            plus = jet_eval(fn, x + step)
            minus = jet_eval(fn, x - step)
            for k in (1, 2, 3):
                fd = (plus.c[k - 1] - minus.c[k - 1]) / (2 * step)
                if abs(fd - base.c[k]) / max(abs(base.c[k]), 1e-12) >= TOL_JET_FD:
                    problems.append(f"jet/fd mismatch for {text} at {x} order {k}")
    return not problems, "; ".join(problems) or "all property checks hold"


CRITERIA = [
    (1, "exact integrability of the catalog coframes", criterion_1),
    (2, "normalized scalar invariant with trace cross-check", criterion_2),
    (3, "sp(1) connection forms", criterion_3),
    (4, "torsion decomposition", criterion_4),
    (5, "canonical-connection curvature entries", criterion_5),
    (6, "conformal curvature verdicts", criterion_6),
    (7, "fundamental 4-form closedness", criterion_7),
    (8, "quaternion-type builds and Einstein constants", criterion_8),
    (9, "self-dual builds, Ricci-flatness, curvature span", criterion_9),
    (10, "triaxial family dichotomy", criterion_10),
    (11, "differential-ideal family", criterion_11),
    (12, "governing ODE systems", criterion_12),
    (13, "symbolic coefficient systems", criterion_13),
    (14, "property battery", criterion_14),
]


def run_all(verbose: bool = True):
    results = []
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        results.append((number, title, ok, detail))
        if verbose:
            print(f"criterion {number:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
    return results
