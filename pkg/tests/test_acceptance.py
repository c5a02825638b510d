"""Acceptance criteria 1-8, each checked at its stated tolerance.

Every test records a single PASS/FAIL line, collected in the terminal summary.
"""

import math

import mpmath
import numpy as np
import pytest

from admissible import expr as ex
from admissible.chains import Polydisc, RescaledFn, build_chain
from admissible.cli import main
from admissible.cplx import INF, chordal_distance
from admissible.derivatives import cauchy_estimate_check, growth_fit, nabla_functional, spherical_gradient
from admissible.errors import GeometryError
from admissible.geometry import UnitBall, boundary_frame, graph_d, project_complex_normal
from admissible.limits import (
    admissible_verdict,
    criterion_t1_check,
    estimate_limit,
    growth_verdict,
    lindelof_refined_verdict,
)
from admissible.regions import (
    FAMILIES,
    RegionSpec,
    inclusion_report,
    law_of_cosines_check,
    normal_path,
    paper_parabola,
    sample_region,
)

B2 = UnitBall(2)
XI = np.array([1.0 + 0j, 0j])
F = ex.catalog("paper_counterexample")
CUBED = ex.catalog("tangential_cubed")
INV = ex.catalog("inv_normal")
TRIALS = 10_000


# ------------------------------------------------------------- 1 counterexample


def test_1a_counterexample_bounded(criterion):
    pts = []
    regions = [RegionSpec("ball_koranyi", a, (1, 0), B2) for a in (1.5, 3, 6)]
    depths = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
    per = 100_000 // (len(regions) * len(depths)) + 1
    for i, r in enumerate(regions):
        for k, t in enumerate(depths):
            pts.append(sample_region(r, t, per, seed=10 * i + k).points)
    z = np.concatenate(pts)[:100_000]
    sup = float(np.max(np.abs(F(z))))
    criterion("1a", len(z) == 100_000 and sup < 2, f"sup |f| = {sup:.6f} on {len(z)} region samples")


def test_1b_normal_limit_zero(criterion):
    est = estimate_limit(F, normal_path(B2, XI))
    err = chordal_distance(est.value, 0)
    criterion("1b", est.converged and err < 1e-8, f"normal limit {est.value}, chordal error {err:.3g}")


def test_1c_parabola_values_exact(criterion):
    js = np.unique(np.round(np.logspace(math.log10(4), 6, 60)).astype(int))
    worst = mpmath.mpf(0)
    for j in js:
        z1, z2 = paper_parabola(int(j), exact=True)
        worst = max(worst, abs(z2**2 / (1 - z1) - 1))
    criterion("1c", worst < 1e-12, f"max |f(z^j) - 1| = {mpmath.nstr(worst, 3)} over {len(js)} values of j")


def test_1d_admissible_fails_with_parabola(criterion):
    kinds = {}
    for a in (1.5, 3, 6):
        out = admissible_verdict(F, B2, XI, [a])
        kinds[a] = (out.status, out.witness["path"]["kind"] if out.witness else None)
    ok = all(v == ("fails", "paper_parabola") for v in kinds.values())
    criterion("1d", ok, f"verdicts {kinds}")


def test_1e_criterion_violated(criterion):
    crit = criterion_t1_check(F, B2, XI, 3)
    js = np.unique(np.round(np.logspace(2, 7, 30)).astype(int))
    along = np.array([nabla_functional(F, B2, XI, paper_parabola(int(j))) for j in js])
    tail = along[-len(along) // 3:]
    ok = crit["status"] == "violated" and 0.4 <= crit["liminf"] <= 1.2 and 0.4 <= tail.min() <= tail.max() <= 1.2
    criterion("1e", ok, f"status {crit['status']}, liminf {crit['liminf']:.4f}, "
                        f"along z^j trailing range [{tail.min():.4f}, {tail.max():.4f}]")


# ----------------------------------------------------------- 2 positive criterion


def test_2_tangential_cubed(criterion):
    out = admissible_verdict(CUBED, B2, XI, [1, 2, 4, 8])
    maxima = {}
    satisfied = True
    for a in (1, 2, 4, 8):
        c = criterion_t1_check(CUBED, B2, XI, a)
        satisfied &= c["status"] == "satisfied"
        maxima[a] = max(p["trailing_max"] for p in c["paths"])
    ok = out.status == "holds" and chordal_distance(out.value, 0) < 1e-3 and satisfied and max(maxima.values()) < 0.05
    criterion("2", ok, f"admissible {out.status}({out.value}), criterion trailing max {max(maxima.values()):.4g}")


# ------------------------------------------------------------ 3 infinite limit


def test_3_infinite_limit_and_caps(criterion):
    out = admissible_verdict(INV, B2, XI, [1, 2, 4, 8])
    lind = lindelof_refined_verdict(INV, B2, XI, K=2.0, samples=100_000)
    same = True
    for f in (F, CUBED, INV):
        a = criterion_t1_check(f, B2, XI, 3)
        b = criterion_t1_check(ex.reciprocal(f), B2, XI, 3)
        same &= a["status"] == b["status"] and a["liminf"] == b["liminf"]
    ok = out.status == "holds" and out.value is INF and lind["caps"]["hold"] and \
        lind["status"] == "predicts_admissible" and same
    criterion("3", ok, f"admissible {out.status}({out.value}), caps hold {lind['caps']['hold']}, "
                       f"refined verdict {lind['status']}, reciprocal flags identical {same}")


# ------------------------------------------------------------- 4 region geometry


def test_4a_monotonicity(criterion):
    counts = {fam: inclusion_report((fam, fam), trials=TRIALS, seed=1).violations for fam in FAMILIES}
    criterion("4a", sum(counts.values()) == 0, f"violations {counts}")


def test_4b_stolz_in_angular(criterion):
    counts = {a: inclusion_report(("disc_stolz", "disc_angular"), a, trials=TRIALS, seed=2).violations
              for a in (1.1, 2, 10)}
    criterion("4b", sum(counts.values()) == 0, f"violations {counts}")


def test_4c_law_of_cosines_double_bound(criterion):
    rep = law_of_cosines_check(trials=TRIALS, seed=3)
    ok = rep["lower_violations"] == 0 and rep["upper_violations"] == 0
    criterion("4c", ok, f"lower bound violations {rep['lower_violations']}, "
                        f"upper bound 2/cos(phi) violations {rep['upper_violations']} "
                        f"(worst ratio*cos(phi) = {rep['upper_worst_ratio_times_cos']:.3f})")


def test_4d_normal_ray_in_koranyi(criterion):
    rep = inclusion_report(("normal_ray", "ball_koranyi"), trials=TRIALS, seed=4)
    criterion("4d", rep.violations == 0, f"violations {rep.violations}")


# ------------------------------------------------------------- 5 differentiation


def _ball_points(rng, m, rmin, rmax):
    v = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v * rng.uniform(rmin, rmax, m)[:, None]


def test_5_differentiation(criterion):
    rng = np.random.default_rng(5)
    names = ["paper_counterexample", "tangential_cubed", "inv_normal", "coordinate", "disc_linear",
             "constant(1 + 2*i)"]
    fs = [ex.catalog(n) for n in names] + [ex.function(s, 2) for s in ("exp(z1)*z2", "sin(z1 - z2)/(2 - z1)")]
    worst_fd = 0.0
    for z in _ball_points(rng, 100, 0.1, 0.9):
        f = fs[int(rng.integers(len(fs)))]
        g = ex.eval_jet(f, z).grad
        h = 1e-6
        fd = np.array([(ex.evaluate(f, z + h * e) - ex.evaluate(f, z - h * e)) / (2 * h) for e in np.eye(2)])
        worst_fd = max(worst_fd, float(np.linalg.norm(g - fd)) / max(1.0, float(np.linalg.norm(g))))

    worst_chain = 0.0
    adapted = RegionSpec("real_adapted", 2, (1, 0), B2)
    bases = np.concatenate([sample_region(adapted, t, 10, seed=50 + k).points
                            for k, t in enumerate((1e-1, 1e-2, 1e-3, 1e-4, 1e-6))])
    for b in bases:
        f = fs[int(rng.integers(len(fs)))]
        c = float(rng.choice([0.05, 0.1, 0.2]))
        P = Polydisc.at(B2, XI, b, c)
        dg = ex.eval_jet(RescaledFn(f, P), np.zeros(2)).grad
        df = ex.eval_jet(f, b).grad
        expect = np.array([c * P.d_b * df[0], c * math.sqrt(P.d_b) * df[1]])
        worst_chain = max(worst_chain, float(np.max(np.abs(dg - expect))) / max(1.0, float(np.max(np.abs(expect)))))

    violations, done = 0, 0
    while done < 100:
        z = _ball_points(rng, 1, 0.3, 0.99)[0]
        c = float(rng.choice([0.05, 0.1, 0.2]))
        f = fs[int(rng.integers(len(fs)))]
        try:
            rep = cauchy_estimate_check(f, z, c, tol=1e-6)
        except GeometryError:
            continue
        done += 1
        violations += not rep.holds
    ok = worst_fd < 1e-6 and worst_chain < 1e-12 and violations == 0
    criterion("5", ok, f"jet vs FD {worst_fd:.2e}, chain rule {worst_chain:.2e}, Cauchy violations {violations}/100")


# ------------------------------------------------------------------- 6 chains


def test_6_chains(criterion):
    frame = boundary_frame(B2, XI)
    rows = {}
    ok = True
    for j in (10, 100, 10_000):
        z = paper_parabola(j)
        ch = build_chain(B2, frame, z, 0.25, 3)
        first = bool(ch.polydiscs[0].contains(project_complex_normal(frame, z)))
        good = ch.bound == 25 and ch.within_bound and all(ch.overlaps) and first and all(ch.anchors_in_region)
        ok &= good
        rows[j] = ch.length
    criterion("6", ok, f"chain lengths {rows} (bound 25)")


# ------------------------------------------------------------------- 7 growth


def test_7_growth(criterion):
    rng = np.random.default_rng(7)
    d = np.logspace(-8, -2, 12)
    worst = 0.0
    for p in (-1.0, -0.5, 0.0):
        for _ in range(20):
            v = d**p * (1 + 0.01 * rng.standard_normal(len(d)))
            worst = max(worst, abs(growth_fit(d, v).exponent - p))
    g = growth_verdict(F, B2, XI, 3)
    tan = g["tangential"]["fit"]["exponent"]
    separates = growth_fit(d, d**-0.5).label(0.5) == "O" and \
        growth_fit(d, d**-0.5 / np.log(1 / d)).label(0.5) == "o"
    ok = worst <= 0.02 and abs(tan + 0.5) <= 0.05 and separates
    criterion("7", ok, f"planted exponent error {worst:.4f}, counterexample tangential exponent {tan:.4f}, "
                       f"o/O separation {separates}")


# --------------------------------------------------------------- 8 determinism


def test_8_determinism(criterion, tmp_path):
    argv = ["classify", "--catalog", "paper_counterexample", "--domain", "ball:2", "--vertex", "(1,0)",
            "--alphas", "1.5,3,6", "--seed", "42"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = (main(argv + ["--out", str(a)]), main(argv + ["--out", str(b)]))
    same = a.read_bytes() == b.read_bytes()
    criterion("8", codes == (0, 0) and same, f"exit codes {codes}, byte-identical {same}, {a.stat().st_size} bytes")
