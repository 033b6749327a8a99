"""Evolved structures on the product of a qc coframe with a line.

Families of 2-form triples F_i built from coefficient functions of one
evolution parameter are assembled with jet coefficients over the extended
frame, differentiated exactly in the jets, and tested for: closedness of
the fundamental 4-form, membership of the dF_i in the differential ideal
of the triple, Ricci behaviour of the associated metric, the rank of the
curvature span, and the residuals of each family's governing ODE system.

Each catalog family stores closed-form coefficient functions in its own
coordinate x together with the factor w = dt/dx relating x to the
arc-length parameter t in which the ansatz
``F_i = f omega_i + h_j h_k eta_j ^ eta_k - h_i eta_i ^ dt`` is written.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import qc
from .algebra import QcFrameSpec, catalog
from .forms import KForm
from .riemann import CoframeWithJets, ricci_and_rank
from .scalars import (Const, DomainError, Jet, Pow, ScalarFunction, U, cosh,
                      exp, sinh, sqrt)

_CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


class NotEinsteinBase(ValueError):
    """The base coframe is not qc Einstein with the family's scalar."""


_BASE_CACHE: dict[str, qc.QcReport] = {}


def _base_report(name: str) -> qc.QcReport:
    if name not in _BASE_CACHE:
        _BASE_CACHE[name] = qc.analyze(catalog(name), name)
    return _BASE_CACHE[name]


def require_einstein_base(name: str, S: Fraction) -> QcFrameSpec:
    rep = _base_report(name)
    if not rep.einstein:
        raise NotEinsteinBase(f"base {name} has non-vanishing torsion endomorphism")
    if rep.S != S:
        raise NotEinsteinBase(f"base {name} has scalar {rep.S}, family expects {S}")
    return catalog(name)


# ---------------------------------------------------------------------------
# Forms over the extended frame
# ---------------------------------------------------------------------------


def _extend(form: KForm, dim_ext: int) -> KForm:
    return KForm(dim_ext, form.degree, dict(form.terms))


def extended_d(base, form: KForm) -> KForm:
    """d on the product of the base coframe with a line: Maurer-Cartan
    structure terms plus jet derivatives of the coefficients times dx.
    The dx direction is the last index of the extended frame."""
    dim_ext = base.dim + 1
    if form.dim != dim_ext:
        raise ValueError("form must live on the extended frame")
    out = KForm(dim_ext, form.degree + 1)
    dx = KForm.basis(dim_ext, dim_ext)
    for idx, coeff in form.terms.items():
        cj = coeff if isinstance(coeff, Jet) else Jet.const(coeff)
        dc = cj.derivative()
        if not dc.is_zero():
            out = out + dc * dx.wedge(KForm.basis(dim_ext, *idx))
        for pos, a in enumerate(idx):
            if a == dim_ext:
                continue  # d(dx) = 0
            piece = _extend(base.diff[a - 1], dim_ext)
            front = idx[:pos]
            back = idx[pos + 1:]
            if front:
                piece = KForm.basis(dim_ext, *front).wedge(piece)
            if back:
                piece = piece.wedge(KForm.basis(dim_ext, *back))
            out = out + (cj * (-1.0 if pos % 2 else 1.0)) * piece
    return out


def _jet_or_raise(fn: ScalarFunction, x: float) -> Jet:
    try:
        return fn.jet(x)
    except DomainError:
        raise
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot evaluate {fn} at {x}: {exc}") from exc


def _form_triple(spec: QcFrameSpec, fj: Jet, hs: list, w: Jet, kind: str) -> list:
    """The three 2-forms of the evolved structure at one sample.

    ``hs`` holds the jets of the three vertical coefficient functions;
    for ``kind=='qk'`` the triple is
    F_i = f w_i + h_j h_k eta_j^eta_k - h_i w eta_i^dx, while
    ``kind=='spin7'`` flips the pattern on the third member.
    """
    dim_ext = spec.dim + 1
    v = spec.vertical
    out = []
    for i, j, k in _CYCLIC:
        omega = fj * _extend(spec.omega[i - 1], dim_ext)
        etas = KForm.basis(dim_ext, v[j - 1], v[k - 1])
        etadx = KForm.basis(dim_ext, v[i - 1], dim_ext)
        if kind == "qk":
            form = omega + (hs[j - 1] * hs[k - 1]) * etas - (hs[i - 1] * w) * etadx
        elif kind == "spin7":
            sign = 1.0 if i == 3 else -1.0
            form = omega + (hs[j - 1] * hs[k - 1] * sign) * etas \
                + (hs[i - 1] * w * sign) * etadx
        else:
            raise ValueError(f"unknown form pattern {kind!r}")
        out.append(form)
    return out


def _check_positive(fj: Jet, hs, w: Jet, x: float) -> bool:
    """Guard the sample; returns False when a vertical coefficient vanishes
    (the forms still make sense but the metric degenerates there)."""
    if not fj.value > 0.0:
        raise DomainError(f"horizontal coefficient not positive at x={x}: {fj.value}")
    if w.value == 0.0:
        raise DomainError(f"dt/dx vanishes at x={x}")
    return all(h.value != 0.0 for h in hs)


def _abs_jet(j: Jet) -> Jet:
    return j if j.value >= 0 else -j


def _coframe(spec: QcFrameSpec, fj: Jet, hs, w: Jet) -> CoframeWithJets:
    scalings = [None] * spec.dim
    root_f = fj.sqrt()
    for a in spec.horizontal:
        scalings[a - 1] = root_f
    for s, a in enumerate(spec.vertical, start=1):
        scalings[a - 1] = _abs_jet(hs[s - 1])
    return CoframeWithJets(spec.algebra, scalings, _abs_jet(w))


def _ideal_residual(forms: list, dforms: list, dim_ext: int) -> float:
    """Least-squares remainder of dF_i = sum_j beta_j ^ F_j over 1-form
    multipliers beta_j, maximized over i."""
    triples = [(a, b, c)
               for a in range(1, dim_ext + 1)
               for b in range(a + 1, dim_ext + 1)
               for c in range(b + 1, dim_ext + 1)]
    row_of = {t: r for r, t in enumerate(triples)}
    cols = []
    for j in range(3):
        for m in range(1, dim_ext + 1):
            col = np.zeros(len(triples))
            prod = KForm.basis(dim_ext, m).wedge(forms[j])
            for idx, coeff in prod.terms.items():
                col[row_of[idx]] = float(getattr(coeff, "value", coeff))
            cols.append(col)
    a_mat = np.column_stack(cols)
    worst = 0.0
    for i in range(3):
        b_vec = np.zeros(len(triples))
        for idx, coeff in dforms[i].terms.items():
            b_vec[row_of[idx]] = float(getattr(coeff, "value", coeff))
        sol, *_ = np.linalg.lstsq(a_mat, b_vec, rcond=None)
        resid = a_mat @ sol - b_vec
        worst = max(worst, float(np.abs(resid).max()))
    return worst


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def build_diagonal(spec: QcFrameSpec, S: Fraction, f: ScalarFunction,
                   h: ScalarFunction, w: ScalarFunction, samples,
                   kind: str) -> dict:
    """Evolve the structure diagonally (one vertical coefficient) and
    collect residuals, Ricci data, and the curvature-span rank."""
    dim_ext = spec.dim + 1
    base = spec.algebra
    dform_worst = 0.0
    ideal_worst = 0.0
    struct_worst = 0.0
    psi_consistency = 0.0
    cocal_worst = 0.0
    hitchin_worst = 0.0
    rank_max = 0
    ricci_list = []
    for x in samples:
        fj = _jet_or_raise(f, x)
        hj = _jet_or_raise(h, x)
        wj = _jet_or_raise(w, x)
        hs = [hj, hj, hj]
        nondegenerate = _check_positive(fj, hs, wj, x)
        forms = _form_triple(spec, fj, hs, wj, kind)
        dforms = [extended_d(base, fo) for fo in forms]
        if kind == "qk":
            phi = KForm(dim_ext, 4)
            for fo in forms:
                phi = phi + fo.wedge(fo)
        else:
            phi = forms[0].wedge(forms[0]) + forms[1].wedge(forms[1]) \
                - forms[2].wedge(forms[2])
        dphi = extended_d(base, phi)
        dform_worst = max(dform_worst, dphi.max_abs())
        ideal_worst = max(ideal_worst, _ideal_residual(forms, dforms, dim_ext))

        if kind == "spin7":
            g2, star_g2 = _g2_pair(spec, fj, hj, dim_ext)
            two_star = 2.0 * star_g2 - (2.0 * wj) * g2.wedge(KForm.basis(dim_ext, dim_ext))
            psi_consistency = max(psi_consistency, (phi - two_star).max_abs())
            cocal = extended_d(base, star_g2)
            # cocalibration: the base part of d(*phi) at the frozen sample
            cocal_base = cocal.restrict(range(1, spec.dim + 1))
            cocal_worst = max(cocal_worst, cocal_base.max_abs())
            # evolution equation forced by d(Psi) = 0 together with the
            # cocalibration: the t-derivative of the dual 4-form matches the
            # base differential of the 3-form (sign fixed by our dx
            # orientation; reversing the parameter flips it)
            flow = star_g2.map_coefficients(
                lambda c: (c if isinstance(c, Jet) else Jet.const(c)).derivative() / wj)
            dphi_base = extended_d(base, g2).restrict(range(1, spec.dim + 1))
            hitchin_worst = max(hitchin_worst, (flow - dphi_base).max_abs())

        if nondegenerate:
            summary = ricci_and_rank(_coframe(spec, fj, hs, wj))
            struct_worst = max(struct_worst, summary.structure_residual,
                               summary.antisymmetry_residual)
            rank_max = max(rank_max, summary.curvature_rank)
            ricci_list.append(summary.ricci)

    dim_total = spec.dim + 1
    ricci_dev = 0.0
    const_list = []
    ricci_abs = 0.0
    for ric in ricci_list:
        lam = float(np.trace(ric)) / dim_total
        const_list.append(lam)
        ricci_dev = max(ricci_dev, float(np.abs(ric - lam * np.eye(dim_total)).max()))
        ricci_abs = max(ricci_abs, float(np.abs(ric).max()))
    out = {
        "kind": kind,
        "samples": list(samples),
        "dform_residual": dform_worst,
        "ideal_residual": ideal_worst,
        "einstein_const": const_list[len(const_list) // 2] if const_list else None,
        "einstein_deviation": ricci_dev if const_list else None,
        "ricci_max_abs": ricci_abs if const_list else None,
        "curvature_rank": rank_max if const_list else None,
        "structure_residual": struct_worst,
    }
    if kind == "spin7":
        out["psi_consistency"] = psi_consistency
        out["cocalibration_residual"] = cocal_worst
        out["hitchin_residual"] = hitchin_worst
    return out


def _g2_pair(spec: QcFrameSpec, fj: Jet, hj: Jet, dim_ext: int):
    """The 3-form and its dual 4-form of the evolved structure."""
    v = spec.vertical
    g2 = KForm(dim_ext, 3)
    star = (0.5 * fj * fj) * _extend(spec.omega[0].wedge(spec.omega[0]), dim_ext)
    for i, j, k in _CYCLIC:
        g2 = g2 + (fj * hj) * _extend(spec.omega[i - 1], dim_ext).wedge(
            KForm.basis(dim_ext, v[i - 1]))
        star = star - (fj * hj * hj) * _extend(spec.omega[i - 1], dim_ext).wedge(
            KForm.basis(dim_ext, v[j - 1], v[k - 1]))
    g2 = g2 - (hj * hj * hj) * KForm.basis(dim_ext, v[0], v[1], v[2])
    return g2, star


def build_qk(spec: QcFrameSpec, S: Fraction, f, h, w, samples) -> dict:
    return build_diagonal(spec, S, f, h, w, samples, "qk")


def build_spin7(spec: QcFrameSpec, S: Fraction, f, h, w, samples) -> dict:
    return build_diagonal(spec, S, f, h, w, samples, "spin7")


def build_triaxial(spec: QcFrameSpec, f, fs, w, samples, kind: str,
                   with_ricci: bool = True) -> dict:
    """Triaxial evolution: independent vertical coefficients f1, f2, f3."""
    dim_ext = spec.dim + 1
    base = spec.algebra
    dform_worst = 0.0
    ideal_worst = 0.0
    rank_max = 0
    einstein_dev = 0.0
    ricci_abs = 0.0
    struct_worst = 0.0
    for x in samples:
        fj = _jet_or_raise(f, x)
        hs = [_jet_or_raise(fn, x) for fn in fs]
        wj = _jet_or_raise(w, x)
        if not _check_positive(fj, hs, wj, x):
            raise DomainError(f"vertical coefficient vanishes at x={x}")
        forms = _form_triple(spec, fj, hs, wj, kind)
        dforms = [extended_d(base, fo) for fo in forms]
        if kind == "qk":
            phi = KForm(dim_ext, 4)
            for fo in forms:
                phi = phi + fo.wedge(fo)
        else:
            phi = forms[0].wedge(forms[0]) + forms[1].wedge(forms[1]) \
                - forms[2].wedge(forms[2])
        dform_worst = max(dform_worst, extended_d(base, phi).max_abs())
        ideal_worst = max(ideal_worst, _ideal_residual(forms, dforms, dim_ext))
        if with_ricci:
            summary = ricci_and_rank(_coframe(spec, fj, hs, wj))
            struct_worst = max(struct_worst, summary.structure_residual,
                               summary.antisymmetry_residual)
            rank_max = max(rank_max, summary.curvature_rank)
            ric = summary.ricci
            lam = float(np.trace(ric)) / (spec.dim + 1)
            einstein_dev = max(einstein_dev,
                               float(np.abs(ric - lam * np.eye(spec.dim + 1)).max()))
            ricci_abs = max(ricci_abs, float(np.abs(ric).max()))
    out = {
        "kind": f"{kind}_triaxial",
        "samples": list(samples),
        "dform_residual": dform_worst,
        "ideal_residual": ideal_worst,
        "structure_residual": struct_worst,
    }
    if with_ricci:
        out["einstein_deviation"] = einstein_dev
        out["ricci_max_abs"] = ricci_abs
        out["curvature_rank"] = rank_max
    return out


# ---------------------------------------------------------------------------
# ODE residuals
# ---------------------------------------------------------------------------


def _dt(j: Jet, w: Jet) -> Jet:
    """Derivative with respect to the arc parameter t, given dt/dx = w."""
    return j.derivative() / w


ODE_SYSTEMS = ("solqk7", "sol7", "erealqk", "ereal7", "clideal", "ideal_sys")


def ode_residual(kind: str, funcs: dict, S: Fraction, samples) -> float:
    """Max absolute residual of the named governing system on the samples.

    ``funcs`` maps names to ScalarFunctions: diagonal systems need f, h, w;
    triaxial and ideal systems need f, f1, f2, f3, w.  Derivatives are in
    the arc parameter t with dt/dx = w.
    """
    if kind not in ODE_SYSTEMS:
        raise ValueError(f"unknown system {kind!r}")
    s_val = float(S)
    worst = 0.0
    for x in samples:
        w = _jet_or_raise(funcs["w"], x)
        if kind in ("solqk7", "sol7"):
            f = _jet_or_raise(funcs["f"], x)
            h = _jet_or_raise(funcs["h"], x)
            df = _dt(f, w)
            ddf = _dt(df, w)
            if kind == "solqk7":
                res = [f * ddf - df * df + s_val * f, h - 0.5 * df]
            else:
                res = [3.0 * f * ddf + df * df - 9.0 * s_val * f, h - df * (1.0 / 6.0)]
            worst = max(worst, *(abs(r.value) for r in res))
            continue
        f = _jet_or_raise(funcs["f"], x)
        # diagonal families satisfy the triaxial systems with f1 = f2 = f3 = h
        fs = [_jet_or_raise(funcs.get(k) or funcs["h"], x) for k in ("f1", "f2", "f3")]
        df = _dt(f, w)
        prod = fs[0] * fs[1] * fs[2]
        res = []
        if kind == "erealqk":
            res.append(3.0 * df - 2.0 * (fs[0] + fs[1] + fs[2]))
            for i, j, k in _CYCLIC:
                lhs = _dt(f * fs[j - 1] * fs[k - 1], w)
                lhs = lhs - s_val * f * (fs[i - 1] - fs[j - 1] - fs[k - 1])
                res.append(lhs - 6.0 * prod)
        elif kind == "ereal7":
            res.append(df - 2.0 * (fs[0] + fs[1] + fs[2]))
            for i, j, k in _CYCLIC:
                res.append(_dt(f * fs[j - 1] * fs[k - 1], w) - 2.0 * prod)
        elif kind == "clideal":
            # differential-ideal condition for the triaxial ansatz
            for i, j, k in _CYCLIC:
                fj_, fk_ = fs[j - 1], fs[k - 1]
                term = f * _dt(fj_ * fk_, w) - df * fj_ * fk_ + 2.0 * prod \
                    - 2.0 * fj_ * fk_ * (fj_ + fk_) \
                    + s_val * f * (fj_ + fk_) - s_val * f * fs[i - 1]
                res.append(term)
        elif kind == "ideal_sys":
            # f_i = exp((u_j + u_k - u_i)/2) and f_i = (Du_j + Du_k)/4
            # with u_i = ln(f_j f_k)
            us = []
            for i, j, k in _CYCLIC:
                us.append((fs[j - 1] * fs[k - 1]).log())
            dus = [_dt(u, w) for u in us]
            for i, j, k in _CYCLIC:
                res.append(fs[i - 1]
                           - ((us[j - 1] + us[k - 1] - us[i - 1]) * 0.5).exp())
                res.append(fs[i - 1] - 0.25 * (dus[j - 1] + dus[k - 1]))
        worst = max(worst, *(abs(r.value) for r in res))
    return worst


# ---------------------------------------------------------------------------
# Family catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricFamily:
    """A named metric family: closed-form coefficient functions on a stated
    coordinate window, the governing ODE systems, and expectations used by
    the verification reports."""

    name: str
    kind: str                     # qk | spin7 | qk_triaxial | spin7_triaxial | ideal
    base: str | None
    S: Fraction | None
    defaults: dict
    make: callable = field(repr=False)   # params -> dict of ScalarFunction
    domain: callable = field(repr=False)  # params -> (lo, hi)
    systems: tuple = ()
    einstein_const: callable | None = field(repr=False, default=None)
    rank_min: int | None = None
    rank_exact: int | None = None

    def params_with_defaults(self, params=None) -> dict:
        merged = dict(self.defaults)
        if params:
            unknown = set(params) - set(self.defaults)
            if unknown:
                raise ValueError(f"unknown parameters for {self.name}: {sorted(unknown)}")
            merged.update({k: Fraction(v) for k, v in params.items()})
        return merged

    def functions(self, params=None) -> dict:
        return self.make(self.params_with_defaults(params))

    def default_samples(self, params=None, count: int = 5) -> list:
        lo, hi = self.domain(self.params_with_defaults(params))
        width = hi - lo
        lo2, hi2 = lo + 0.1 * width, hi - 0.1 * width
        if count == 1:
            return [0.5 * (lo2 + hi2)]
        return [lo2 + (hi2 - lo2) * i / (count - 1) for i in range(count)]


def _fam_qk_heis(params):
    b = Const(params["b"])
    f = exp(2 * b * U)
    return {"f": f, "h": b * f, "w": Const(1)}


def _fam_qk_l1(params):
    b = Const(params["b"])
    return {
        "f": (1 + cosh(U)) / (2 * b * b),
        "h": sinh(U) / (4 * b),
        "w": 1 / b,
    }


def _fam_qk_l2(params):
    b = Const(params["b"])
    root2 = Pow(Const(2), Fraction(1, 2))
    return {
        "f": (1 + cosh(U)) / (2 * b * b),
        "h": sinh(U) / (4 * b * root2),
        "w": root2 / b,
    }


def _fam_qk_3sas(params):
    a = Const(params["a"])
    h = sqrt(U + a * U**2)
    return {"f": U, "h": h, "w": 1 / (2 * h)}


def _fam_spin7_heis(params):
    a = Const(params["a"])
    return {"f": U**3, "h": (a / 4) / U, "w": (2 / a) * U**3}


def _spin7_h(S: Fraction, params):
    b = Const(params["b"])
    num = (b - U ** Fraction(5, 3)) if S < 0 else (U ** Fraction(5, 3) - Const(params["a"]))
    if S == Fraction(-1, 2):
        return sqrt(num / (20 * U ** Fraction(2, 3)))
    if S == Fraction(-1, 4):
        return sqrt(num / (40 * U ** Fraction(2, 3)))
    raise ValueError("unsupported scalar for this family shape")


def _fam_spin7_l1(params):
    h = _spin7_h(Fraction(-1, 2), params)
    return {"f": U, "h": h, "w": 1 / (6 * h)}


def _fam_spin7_l2(params):
    h = _spin7_h(Fraction(-1, 4), params)
    return {"f": U, "h": h, "w": 1 / (6 * h)}


def _fam_spin7_3sas(params):
    a = Const(params["a"])
    h = sqrt((U ** Fraction(5, 3) - a) / (5 * U ** Fraction(2, 3)))
    return {"f": U, "h": h, "w": 1 / (6 * h)}


def _fam_qk_triaxial(params):
    a = [Const(params[k]) for k in ("a1", "a2", "a3")]
    c = params["C"]
    prod = (U + a[0]) * (U + a[1]) * (U + a[2])
    f = Const(c) * Pow(prod, Fraction(1, 9))
    fs = {}
    for i, j, k in _CYCLIC:
        expr = ((U + a[j - 1]) ** 4 * (U + a[k - 1]) ** 4) / (U + a[i - 1]) ** 5
        fs[f"f{i}"] = Pow(Const(Fraction(6) / c), Fraction(1, 2)) * Pow(expr, Fraction(1, 9))
    w = Pow(Const(c / 6), Fraction(3, 2)) * Pow(prod, Fraction(-1, 3))
    return {"f": f, **fs, "w": w}


def _fam_spin7_triaxial(params):
    a1, a2, a3 = (Const(params[k]) for k in ("a1", "a2", "a3"))
    c = params["C"]
    prod = (U + a1) * (U + a2) * (a3 - U)
    root = Pow(Const(Fraction(2) / c), Fraction(1, 2))
    return {
        "f": Const(c) * prod,
        "f1": root / (U + a1),
        "f2": root / (U + a2),
        "f3": -1 * (root / (a3 - U)),
        "w": Pow(Const(c**3 / 8), Fraction(1, 2)) * prod,
    }


def _fam_ideal(params):
    a = [Const(params[k]) for k in ("a1", "a2", "a3")]
    fs = {}
    for i, j, k in _CYCLIC:
        fs[f"f{i}"] = (Pow(a[j - 1] - U, Fraction(1, 4)) * Pow(a[k - 1] - U, Fraction(1, 4))
                       / Pow(a[i - 1] - U, Fraction(3, 4)))
    w = Fraction(1, 4) * Pow((a[0] - U) * (a[1] - U) * (a[2] - U), Fraction(-1, 4))
    return {"f": Const(1), **fs, "w": w}


def _triaxial_window(params) -> tuple:
    """Connected window where all metric coefficients of the triaxial
    Spin(7) family stay positive: scan the intervals cut by the roots.

    Windows keep half a unit away from every root; the coefficient
    functions blow up there and the curvature cancellations that make the
    metric Ricci-flat would drown in floating error.
    """
    roots = sorted({float(-params["a1"]), float(-params["a2"]), float(params["a3"])})
    c = float(params["C"])

    def fval(u):
        return c * (u + float(params["a1"])) * (u + float(params["a2"])) * (float(params["a3"]) - u)

    pad = 0.5
    candidates = []
    pts = [roots[0] - 2.0 - pad] + roots + [roots[-1] + 2.0 + pad]
    for lo, hi in zip(pts, pts[1:]):
        if hi - lo < 1e-12:
            continue
        mid = 0.5 * (lo + hi)
        if fval(mid) <= 0:
            continue
        bounded = lo in roots and hi in roots
        if bounded:
            width = hi - lo
            shrink = min(pad, 0.25 * width)
            candidates.append((True, (lo + shrink, hi - shrink)))
        elif hi in roots:
            candidates.append((False, (hi - 2.0 - pad, hi - pad)))
        else:
            candidates.append((False, (lo + pad, lo + 2.0 + pad)))
    if not candidates:
        raise DomainError("no window with positive coefficients for these parameters")
    for bounded, window in candidates:
        if bounded:
            return window
    return candidates[0][1]


FAMILIES: dict[str, MetricFamily] = {}


def _register(fam: MetricFamily):
    FAMILIES[fam.name] = fam


_register(MetricFamily(
    name="qk-heis", kind="qk", base="heis(1)", S=Fraction(0),
    defaults={"b": Fraction(1)}, make=_fam_qk_heis,
    domain=lambda p: (-0.5, 0.75), systems=("solqk7", "clideal"),
    einstein_const=lambda p: -16.0 * float(p["b"]) ** 2))

_register(MetricFamily(
    name="qk-heis2", kind="qk", base="heis(2)", S=Fraction(0),
    defaults={"b": Fraction(1)}, make=_fam_qk_heis,
    domain=lambda p: (-0.5, 0.75), systems=("solqk7",),
    einstein_const=lambda p: -20.0 * float(p["b"]) ** 2))

_register(MetricFamily(
    name="qk-l1", kind="qk", base="l1", S=Fraction(-1, 2),
    defaults={"b": Fraction(1)}, make=_fam_qk_l1,
    domain=lambda p: (0.0, 3.0), systems=("solqk7", "clideal"),
    einstein_const=lambda p: -4.0 * float(p["b"]) ** 2))

_register(MetricFamily(
    name="qk-l2", kind="qk", base="l2", S=Fraction(-1, 4),
    defaults={"b": Fraction(1)}, make=_fam_qk_l2,
    domain=lambda p: (0.0, 3.0), systems=("solqk7", "clideal"),
    einstein_const=lambda p: -2.0 * float(p["b"]) ** 2))

_register(MetricFamily(
    name="qk-3sas", kind="qk", base=None, S=Fraction(2),
    defaults={"a": Fraction(1)}, make=_fam_qk_3sas,
    domain=lambda p: (0.0, 2.0), systems=("solqk7", "clideal")))

_register(MetricFamily(
    name="qk-triaxial", kind="qk_triaxial", base="heis(1)", S=Fraction(0),
    defaults={"a1": Fraction(0), "a2": Fraction(1), "a3": Fraction(2), "C": Fraction(1)},
    make=_fam_qk_triaxial,
    domain=lambda p: (float(-min(p["a1"], p["a2"], p["a3"])),
                      float(-min(p["a1"], p["a2"], p["a3"])) + 3.0),
    systems=("erealqk",)))

_register(MetricFamily(
    name="ideal-family", kind="ideal", base="heis(1)", S=Fraction(0),
    defaults={"a1": Fraction(1), "a2": Fraction(2), "a3": Fraction(3)},
    make=_fam_ideal,
    domain=lambda p: (float(min(p["a1"], p["a2"], p["a3"])) - 2.0,
                      float(min(p["a1"], p["a2"], p["a3"]))),
    systems=("ideal_sys", "clideal")))

_register(MetricFamily(
    name="spin7-heis", kind="spin7", base="heis(1)", S=Fraction(0),
    defaults={"a": Fraction(1)}, make=_fam_spin7_heis,
    domain=lambda p: (0.5, 3.0), systems=("sol7",)))

_register(MetricFamily(
    name="spin7-l1", kind="spin7", base="l1", S=Fraction(-1, 2),
    defaults={"b": Fraction(2)}, make=_fam_spin7_l1,
    domain=lambda p: (0.0, float(p["b"]) ** 0.6), systems=("sol7",),
    rank_min=16))

_register(MetricFamily(
    name="spin7-l2", kind="spin7", base="l2", S=Fraction(-1, 4),
    defaults={"b": Fraction(2)}, make=_fam_spin7_l2,
    domain=lambda p: (0.0, float(p["b"]) ** 0.6), systems=("sol7",),
    rank_min=16, rank_exact=21))

_register(MetricFamily(
    name="spin7-3sas", kind="spin7", base=None, S=Fraction(2),
    defaults={"a": Fraction(1)}, make=_fam_spin7_3sas,
    domain=lambda p: (float(p["a"]) ** 0.6, float(p["a"]) ** 0.6 + 2.0),
    systems=("sol7",)))

_register(MetricFamily(
    name="spin7-triaxial", kind="spin7_triaxial", base="heis(1)", S=Fraction(0),
    defaults={"a1": Fraction(1), "a2": Fraction(11, 10), "a3": Fraction(-1), "C": Fraction(1)},
    make=_fam_spin7_triaxial, domain=_triaxial_window, systems=("ereal7",)))


def build_family(name: str, params=None, samples=None) -> dict:
    """Build and verify a catalog family; families without a shipped base
    frame are checked through their governing systems only."""
    fam = FAMILIES.get(name)
    if fam is None:
        raise KeyError(f"unknown family {name!r}")
    p = fam.params_with_defaults(params)
    funcs = fam.functions(params)
    pts = list(samples) if samples else fam.default_samples(params)

    result = {
        "family": fam.name,
        "params": {k: str(v) for k, v in p.items()},
        "samples": pts,
        "ode_residuals": {},
    }
    for system in fam.systems:
        result["ode_residuals"][system] = ode_residual(system, funcs, fam.S, pts)

    if fam.base is None:
        result["kind"] = "ode-only"
        return result

    spec = require_einstein_base(fam.base, fam.S)
    if fam.kind == "qk":
        built = build_qk(spec, fam.S, funcs["f"], funcs["h"], funcs["w"], pts)
    elif fam.kind == "spin7":
        built = build_spin7(spec, fam.S, funcs["f"], funcs["h"], funcs["w"], pts)
    elif fam.kind in ("qk_triaxial", "ideal"):
        built = build_triaxial(spec, funcs["f"],
                               [funcs["f1"], funcs["f2"], funcs["f3"]],
                               funcs["w"], pts, "qk")
    elif fam.kind == "spin7_triaxial":
        built = build_triaxial(spec, funcs["f"],
                               [funcs["f1"], funcs["f2"], funcs["f3"]],
                               funcs["w"], pts, "spin7")
    else:
        raise ValueError(f"unhandled family kind {fam.kind}")
    result.update(built)
    if fam.einstein_const is not None:
        result["einstein_expected"] = fam.einstein_const(p)
    if fam.rank_min is not None:
        result["rank_min_expected"] = fam.rank_min
    if fam.rank_exact is not None:
        result["rank_exact_expected"] = fam.rank_exact
    return result
