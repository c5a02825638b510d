"""Registry of seeded invariant checks run by ``admissible verify``.

Each property takes a :class:`Context` and returns ``(passed, detail)``.  The
context carries the seed and an optional frame factory so tests can inject a
broken frame as a negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as ex
from .chains import Polydisc, RescaledFn, build_chain
from .cplx import INF, chordal_distance
from .derivatives import cauchy_estimate_check, directional_components, growth_fit, spherical_gradient
from .geometry import BoundaryFrame, Ellipsoid, GraphDomain, UnitBall, boundary_frame, householder_frames
from .limits import classify, criterion_t1_check
from .regions import FAMILIES, inclusion_report, law_of_cosines_check, paper_parabola

__all__ = ["PROPERTIES", "Context", "run_properties"]


@dataclass
class Context:
    seed: int = 42
    frame_factory: Callable = boundary_frame

    def rng(self, salt: int):
        return np.random.default_rng([self.seed, salt])


PROPERTIES: dict[str, Callable] = {}


def prop(name):
    def register(fn):
        PROPERTIES[name] = fn
        return fn

    return register


def _random_ball_points(rng, m, n, rmin=0.5, rmax=0.999):
    v = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(rmin, rmax, m)[:, None]


_SAMPLE_FUNCTIONS = ("paper_counterexample", "tangential_cubed", "inv_normal", "coordinate",
                     "disc_linear", "constant(1 + 2*i)")
_EXTRA = ("exp(z1)*z2", "sin(z1 - z2)/(2 - z1)", "cos(z2)^2 + z1^3")


def _sample_functions():
    fs = [ex.catalog(name, 2) for name in _SAMPLE_FUNCTIONS]
    fs += [ex.function(src, 2) for src in _EXTRA]
    return fs


# ---------------------------------------------------------------------- core


@prop("core.chordal_metric")
def _chordal(ctx):
    rng = ctx.rng(1)
    vals = list(rng.normal(size=60) * 10 ** rng.uniform(-3, 3, 60) + 1j * rng.normal(size=60)) + [INF, 0j]
    worst = 0.0
    for a in vals[:30]:
        for b in vals[30:]:
            dab = chordal_distance(a, b)
            if abs(dab - chordal_distance(b, a)) > 1e-15 or not 0 <= dab <= 1 + 1e-15:
                return False, {"pair": [str(a), str(b)]}
            for c in vals[::7]:
                worst = max(worst, dab - chordal_distance(a, c) - chordal_distance(c, b))
    return worst <= 1e-12, {"max_triangle_excess": worst}


@prop("core.jet_vs_finite_difference")
def _jet_fd(ctx):
    rng = ctx.rng(2)
    fs = _sample_functions()
    worst = 0.0
    for _ in range(100):
        f = fs[int(rng.integers(len(fs)))]
        z = _random_ball_points(rng, 1, 2, 0.1, 0.9)[0]
        g = ex.eval_jet(f, z).grad
        h = 1e-6
        fd = np.array([(ex.evaluate(f, z + h * e) - ex.evaluate(f, z - h * e)) / (2 * h) for e in np.eye(2)])
        scale = max(1.0, float(np.max(np.abs(g))))
        worst = max(worst, float(np.max(np.abs(g - fd))) / scale)
    return worst < 1e-6, {"max_relative_error": worst}


# ---------------------------------------------------------------------- expr


def _random_expr(rng, depth):
    k = int(rng.integers(0, 7 if depth > 0 else 3))
    if k == 0:
        return ex.Num(float(rng.choice([0.5, 2.0, 3.0, 1.25])))
    if k == 1:
        return ex.Var(int(rng.integers(1, 3)))
    if k == 2:
        return ex.Imag()
    if k == 3:
        return ex.BinOp(str(rng.choice(list("+-*/"))), _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if k == 4:
        return ex.Pow(_random_expr(rng, depth - 1), int(rng.integers(-3, 4)))
    if k == 5:
        return ex.Neg(_random_expr(rng, depth - 1))
    return ex.Call(str(rng.choice(["exp", "sin", "cos"])), _random_expr(rng, depth - 1))


@prop("expr.print_parse_roundtrip")
def _roundtrip(ctx):
    rng = ctx.rng(3)
    for _ in range(500):
        e = _random_expr(rng, 4)
        text = ex.to_text(e)
        if ex.parse(text, 2) != e:
            return False, {"text": text}
    return True, {"trials": 500}


@prop("expr.reciprocal_invariance")
def _recip(ctx):
    rng = ctx.rng(4)
    worst = 0.0
    for f in _sample_functions():
        z = _random_ball_points(rng, 50, 2, 0.1, 0.9)
        a = np.abs(spherical_gradient(f, z))
        b = np.abs(spherical_gradient(ex.reciprocal(f), z))
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(a, 1e-300))))
    return worst < 1e-9, {"max_relative_difference": worst}


# ------------------------------------------------------------------ geometry


def _boundary_samples(rng, m):
    out = []
    for D in (UnitBall(2), Ellipsoid([1.0, 2.0]), UnitBall(3)):
        v = rng.normal(size=(m, D.dim)) + 1j * rng.normal(size=(m, D.dim))
        v /= np.sqrt(np.sum(np.abs(v) ** 2 / D.axes**2, axis=1))[:, None]
        out += [(D, p) for p in v]
    P = GraphDomain.paraboloid(2)
    out += [(P, np.array([0j, 0j]))]
    return out


@prop("geometry.frame_unitary")
def _frames(ctx):
    rng = ctx.rng(5)
    worst = 0.0
    for D, xi in _boundary_samples(rng, 20):
        fr = ctx.frame_factory(D, xi)
        U = fr.matrix
        worst = max(worst, float(np.max(np.abs(U.conj().T @ U - np.eye(D.dim)))),
                    float(np.max(np.abs(U[:, 0] - fr.normal))))
    return worst < 1e-12, {"max_defect": worst}


@prop("geometry.nearest_point")
def _nearest(ctx):
    rng = ctx.rng(6)
    worst = 0.0
    for D in (UnitBall(2), Ellipsoid([1.0, 2.0]), GraphDomain.paraboloid(2)):
        z = _random_ball_points(rng, 50, 2, 0.0, 0.3) * 0.5
        if isinstance(D, GraphDomain):
            z[:, 0] = np.abs(z[:, 0].real) + 0.2 + 1j * z[:, 0].imag
        else:
            z = z + 0.6 * D.axes[None, :] * np.array([1, 0])
        z = z[D.contains(z)]
        xi, dist = D.nearest_boundary_point(z)
        g = D.outward_gradient(xi)
        g /= np.linalg.norm(g, axis=1)[:, None]
        resid = np.abs(D.defining(xi))
        # z - xi must be parallel to the real normal
        r = z - xi
        par = np.linalg.norm(r - np.real(np.sum(r * np.conj(g), axis=1))[:, None] * g, axis=1)
        worst = max(worst, float(resid.max()), float(par.max()))
    return worst < 1e-9, {"max_defect": worst}


@prop("geometry.directional_phase_invariance")
def _phase(ctx):
    rng = ctx.rng(7)
    B = UnitBall(3)
    f = ex.function("z2^2/(1 - z1) + z3*z1", 3)
    worst = 0.0
    for _ in range(100):
        z = _random_ball_points(rng, 1, 3, 0.5, 0.99)[0]
        xi = z / np.linalg.norm(z)
        fr = ctx.frame_factory(B, xi)
        G = spherical_gradient(f, z)
        a = directional_components(G, fr.matrix)
        b = directional_components(G, fr.rephased(np.exp(2j * np.pi * rng.uniform(size=2))).matrix)
        worst = max(worst, abs(a[0] - b[0]), abs(a[1] - b[1]))
        # the tangential part must not depend on the frame beyond the normal line
        ref = directional_components(G, householder_frames(xi))
        worst = max(worst, abs(a[0] - ref[0]), abs(a[1] - ref[1]))
    return worst < 1e-12, {"max_difference": worst}


# ------------------------------------------------------------------- regions


@prop("regions.aperture_monotonicity")
def _mono(ctx):
    bad = {f: inclusion_report((f, f), None, 2000, ctx.seed).violations for f in FAMILIES}
    return sum(bad.values()) == 0, {"violations": bad}


@prop("regions.stolz_in_angular")
def _stolz(ctx):
    bad = {a: inclusion_report(("disc_stolz", "disc_angular"), a, 2000, ctx.seed).violations
           for a in (1.1, 2.0, 10.0)}
    return sum(bad.values()) == 0, {"violations": bad}


@prop("regions.angular_in_stolz_local")
def _angular(ctx):
    bad = {t: inclusion_report(("disc_angular", "disc_stolz"), t, 2000, ctx.seed).violations
           for t in (0.3, 0.8, 1.3)}
    return sum(bad.values()) == 0, {"violations": bad}


@prop("regions.law_of_cosines_local")
def _cosines(ctx):
    rep = law_of_cosines_check(5000, ctx.seed)
    ok = rep["lower_violations"] == 0 and rep["local_upper_violations"] == 0
    return ok, {k: rep[k] for k in ("lower_violations", "local_upper_violations", "local_trials")}


@prop("regions.normal_ray_threshold")
def _ray(ctx):
    rep = inclusion_report(("normal_ray", "ball_koranyi"), None, 5000, ctx.seed)
    return rep.violations == 0, {"violations": rep.violations}


# --------------------------------------------------------------- derivatives


@prop("derivatives.cauchy_estimates")
def _cauchy(ctx):
    rng = ctx.rng(8)
    fs = _sample_functions()
    fails, tried = 0, 0
    while tried < 40:
        f = fs[int(rng.integers(len(fs)))]
        c = float(rng.choice([0.05, 0.1, 0.2]))
        z = _random_ball_points(rng, 1, 2, 0.3, 0.95)[0]
        r = np.linalg.norm(z)
        if (r + c * (1 - r)) ** 2 + c**2 * (1 - r) >= 1:
            continue
        tried += 1
        fails += not cauchy_estimate_check(f, z, c, points_per_angle=32).holds
    return fails == 0, {"trials": tried, "violations": fails}


@prop("derivatives.growth_recovery")
def _growth(ctx):
    rng = ctx.rng(9)
    d = np.logspace(-8, -2, 12)
    worst = 0.0
    for p in (-1.0, -0.5, 0.0):
        v = d**p * np.exp(0.01 * rng.normal(size=d.size))
        worst = max(worst, abs(growth_fit(d, v).exponent - p))
    sep = growth_fit(d, d**-0.5 / np.log(1 / d)).label(0.5) == "o" and growth_fit(d, d**-0.5).label(0.5) == "O"
    return worst < 0.02 and sep, {"max_exponent_error": worst, "o_vs_O_separated": sep}


# -------------------------------------------------------------------- chains


@prop("chains.rescale_roundtrip")
def _rescale(ctx):
    rng = ctx.rng(10)
    B = UnitBall(2)
    fr = ctx.frame_factory(B, np.array([1, 0j]))
    P = Polydisc.at(B, fr, np.array([0.9, 0.1]), 0.3)
    w = rng.normal(size=(1000, 2)) + 1j * rng.normal(size=(1000, 2))
    z = P.inverse(w)
    err = max(float(np.max(np.abs(P.forward(z) - w))), float(np.max(np.abs(P.inverse(P.forward(z)) - z))))
    return err < 1e-12, {"max_error": err}


@prop("chains.chain_rule_scaling")
def _chainrule(ctx):
    rng = ctx.rng(11)
    B = UnitBall(2)
    fr = boundary_frame(B, np.array([1, 0j]))
    worst = 0.0
    for f in _sample_functions():
        b = np.array([1 - 10 ** rng.uniform(-4, -1), 0.01 * rng.normal()])
        P = Polydisc.at(B, fr, b, 0.25)
        g = ex.eval_jet(RescaledFn(f, P), np.zeros(2)).grad
        ref = (ex.eval_jet(f, b).grad @ fr.matrix) * P.radii
        worst = max(worst, float(np.max(np.abs(g - ref)) / max(1.0, float(np.max(np.abs(ref))))))
    return worst < 1e-12, {"max_relative_error": worst}


@prop("chains.chain_bounds")
def _chains(ctx):
    B = UnitBall(2)
    out = {}
    for j in (10, 100, 10_000):
        ch = build_chain(B, np.array([1, 0j]), paper_parabola(j), 0.25, 3.0)
        out[j] = {"length": ch.length, "ok": ch.within_bound and all(ch.overlaps) and all(ch.anchors_in_region)}
    return all(v["ok"] for v in out.values()), out


# -------------------------------------------------------------------- limits


@prop("limits.verdict_consistency")
def _consistency(ctx):
    B = UnitBall(2)
    xi = np.array([1, 0j])
    flags = {}
    for name in ("paper_counterexample", "tangential_cubed", "inv_normal", "constant(3)"):
        v = classify(ex.catalog(name), B, xi, [1.5, 3.0], seed=ctx.seed, theorems=False)
        flags[name] = v.theorem_flags["limit_excludes_criterion_violation"] and v.theorem_flags["criterion_violation_excludes_limit"]
    return all(flags.values()), flags


@prop("limits.reciprocal_flags")
def _recip_flags(ctx):
    B = UnitBall(2)
    xi = np.array([1, 0j])
    out = {}
    for name in ("paper_counterexample", "tangential_cubed", "inv_normal"):
        f = ex.catalog(name)
        a = criterion_t1_check(f, B, xi, 3.0, seed=ctx.seed)
        b = criterion_t1_check(ex.reciprocal(f), B, xi, 3.0, seed=ctx.seed)
        out[name] = a["status"] == b["status"] and a["liminf"] == b["liminf"]
    return all(out.values()), out


def run_properties(filter: str | None = None, seed: int = 42, frame_factory: Callable | None = None):
    """Run registered properties whose name contains ``filter``; returns a summary dict."""
    ctx = Context(seed, frame_factory or boundary_frame)
    results = []
    for name, fn in PROPERTIES.items():
        if filter and filter not in name:
            continue
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crash is a failure, recorded with its message
            ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append({"name": name, "passed": bool(ok), "detail": detail})
    passed = sum(r["passed"] for r in results)
    return {"seed": seed, "filter": filter, "total": len(results), "passed": passed,
            "failed": len(results) - passed, "results": results}


def broken_frame(D, xi):
    """Negative control: a frame whose tangential column is not unit length."""
    fr = boundary_frame(D, xi)
    U = fr.matrix.copy()
    U[:, -1] *= 1.5
    return BoundaryFrame(fr.vertex, fr.normal, U)

