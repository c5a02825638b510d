"""Boundary limits along paths and empirical verdicts for admissible convergence.

All values are compared on the Riemann sphere, so an infinite limit is an
ordinary outcome.  Every verdict is empirical: it summarises finitely many
probes under explicit, configurable decision rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cplx import INF, chordal_distance, chordal_distance_projective
from .derivatives import (
    GrowthFit,
    directional_components,
    growth_fit,
    spherical_gradient,
    worst_label,
)
from .errors import FitError, SamplingError
from .geometry import BoundaryFrame, Domain, boundary_frame, graph_d
from .regions import (
    ApproachPath,
    RegionSpec,
    _random_members,
    fitted_parabola_path,
    halving_depths,
    log_depths,
    normal_path,
    random_region_path,
    sample_region,
)

__all__ = [
    "DEFAULTS",
    "AdmissibleOutcome",
    "LimitEstimate",
    "Verdict",
    "admissible_bounded_check",
    "admissible_verdict",
    "classify",
    "criterion_t1_check",
    "estimate_limit",
    "ext_to_json",
    "growth_verdict",
    "lindelof_refined_verdict",
    "probe_paths",
    "single_region_verdict",
]

DEFAULTS = {
    "tol": 1e-3,
    "eps_crit": 0.05,
    "min_probes": 16,
    "max_probes": 32,
    "cauchy_window": 4,
    "window": [1e-8, 1e-2],
    "window_probes": 12,
    "random_paths": 3,
    "trend_ratio": 0.7,
    "decay_ratio": 0.5,
    "K": 2.0,
    "family": "real_adapted",
}


def ext_to_json(v):
    """Extended complex value as JSON data: ``"inf"`` or ``[re, im]``."""
    if v is INF:
        return "inf"
    v = complex(v)
    return [v.real, v.imag]


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonable(x.item())
    return x


def _as_ext(n, d):
    n, d = complex(n), complex(d)
    if d == 0:
        return INF
    return n / d


@dataclass(frozen=True)
class LimitEstimate:
    value: object
    converged: bool
    last_delta: float
    probes: int
    path: dict = field(default_factory=dict)

    def to_dict(self):
        return {"value": ext_to_json(self.value), "converged": self.converged,
                "last_delta": self.last_delta, "probes": self.probes, "path": self.path}


def estimate_limit(f, path: ApproachPath, tol: float = DEFAULTS["tol"],
                   min_probes: int = DEFAULTS["min_probes"], max_probes: int = DEFAULTS["max_probes"],
                   window: int = DEFAULTS["cauchy_window"], t0: float = 1e-2) -> LimitEstimate:
    """Chordal Cauchy test at depths ``t0 2^-k``; stops at the first probe count
    ``>= min_probes`` whose last ``window`` increments are all below ``tol``."""
    if min_probes < window + 1:
        raise ValueError("min_probes must exceed the Cauchy window")
    t = halving_depths(t0, max_probes)
    # overflow near essential singularities yields NaN increments, which never pass the test
    with np.errstate(over="ignore", invalid="ignore"):
        N, Dn = f.projective(path.points(t))
        nv, dv = N.value, Dn.value
        inc = chordal_distance_projective(nv[:-1], dv[:-1], nv[1:], dv[1:])
    for k in range(min_probes, max_probes + 1):
        tail = inc[k - 1 - window:k - 1]
        if np.all(tail < tol):
            value = _as_ext(nv[k - 1], dv[k - 1])
            # still running off to infinity at the rate of the increments
            if value is not INF and chordal_distance(value, INF) < min(tol, 4 * float(tail[-1])):
                value = INF
            return LimitEstimate(value, True, float(tail[-1]), k, path.describe())
    return LimitEstimate(_as_ext(nv[-1], dv[-1]), False, float(inc[-1]), max_probes, path.describe())


# -------------------------------------------------------------- probe paths


def _all_depths():
    return np.concatenate([halving_depths(1e-2, DEFAULTS["max_probes"]),
                           log_depths(tuple(DEFAULTS["window"]), DEFAULTS["window_probes"])])


def probe_paths(r: RegionSpec, seed: int, random_paths: int = DEFAULTS["random_paths"]):
    """Normal ray, the widest parabola (1 - t, kappa sqrt t) inside ``r``, and seeded random paths."""
    depths = _all_depths()
    paths = [normal_path(r.domain, r.frame)]
    if r.domain.dim > 1:
        par = fitted_parabola_path(r, depths)
        if par is not None:
            paths.append(par)
    for k in range(random_paths):
        paths.append(random_region_path(r, seed * 1009 + k, depths))
    return paths


def _frame(D, xi):
    return xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)


def _region(D, xi, alpha, family=DEFAULTS["family"]):
    frame = _frame(D, xi)
    r = RegionSpec(family, float(alpha), tuple(frame.vertex), D)
    r.__dict__["frame"] = frame
    return r


# ---------------------------------------------------------- admissible limits


@dataclass
class AdmissibleOutcome:
    status: str  # holds | fails | inconclusive
    value: object = None
    witness: dict | None = None
    per_alpha: list = field(default_factory=list)

    def to_dict(self):
        out = {"status": self.status, "per_alpha": self.per_alpha}
        if self.status == "holds":
            out["value"] = ext_to_json(self.value)
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def admissible_verdict(f, D: Domain, xi, apertures, tol: float = DEFAULTS["tol"], seed: int = 0,
                       family: str = DEFAULTS["family"]) -> AdmissibleOutcome:
    """Limits along every probe path of every aperture must agree (chordal spread < tol)."""
    apertures = list(apertures)
    if not apertures:
        raise ValueError("need at least one aperture")
    frame = _frame(D, xi)
    reference = estimate_limit(f, normal_path(D, frame), tol)
    per_alpha, converged, witness, open_paths = [], [], None, False
    for i, a in enumerate(apertures):
        r = _region(D, frame, a, family)
        rows = []
        for path in probe_paths(r, seed + 7919 * i):
            est = estimate_limit(f, path, tol)
            rows.append(est.to_dict())
            if not est.converged:
                open_paths = True
                continue
            base = reference.value if reference.converged else (converged[0] if converged else est.value)
            if witness is None and chordal_distance(est.value, base) >= tol:
                witness = {"alpha": a, "path": path.describe(), "value": ext_to_json(est.value),
                           "reference": ext_to_json(base),
                           "chordal_gap": chordal_distance(est.value, base)}
            converged.append(est.value)
        per_alpha.append({"alpha": a, "paths": rows})
    if witness is not None:
        return AdmissibleOutcome("fails", witness=witness, per_alpha=per_alpha)
    if open_paths or not converged:
        return AdmissibleOutcome("inconclusive", per_alpha=per_alpha)
    value = reference.value if reference.converged else converged[-1]
    return AdmissibleOutcome("holds", value=value, per_alpha=per_alpha)


# --------------------------------------------------------- criterion and growth


def _path_probes(f, D, frame, path, window, count):
    t = log_depths(tuple(window), count)
    z = path.points(t)
    d = graph_d(D, frame, z)
    G = spherical_gradient(f, z)
    normal, tangential = directional_components(G, frame.matrix)
    return d, normal, tangential


def criterion_t1_check(f, D: Domain, xi, alpha: float, window=tuple(DEFAULTS["window"]),
                       eps: float = DEFAULTS["eps_crit"], seed: int = 0,
                       count: int = DEFAULTS["window_probes"], family: str = DEFAULTS["family"]):
    """Decide whether ``sqrt(d^2|grad_1|^2 + d|grad_2..n|^2)/(1+|f|^2)`` tends to 0 in ``A_alpha``."""
    lo, hi = window
    if math.log10(hi / lo) < 2:
        raise FitError("criterion window must span at least two decades")
    frame = _frame(D, xi)
    r = _region(D, frame, alpha, family)
    rows, satisfied, violating = [], True, None
    k = max(1, count // 3)
    for path in probe_paths(r, seed):
        d, nrm, tan = _path_probes(f, D, frame, path, window, count)
        q = np.sqrt(d**2 * nrm**2 + d * tan**2)
        head, tail = q[:k], q[-k:]
        row = {"path": path.describe(), "trailing_max": float(tail.max()), "trailing_min": float(tail.min()),
               "leading_median": float(np.median(head)), "trailing_median": float(np.median(tail))}
        rows.append(row)
        if tail.max() >= eps:
            satisfied = False
        decaying = np.median(tail) < DEFAULTS["decay_ratio"] * np.median(head)
        if violating is None and tail.min() > eps and not decaying:
            violating = row
    liminf = min(row["trailing_min"] for row in rows)
    if satisfied:
        status = "satisfied"
    elif violating is not None:
        status, liminf = "violated", violating["trailing_min"]
    else:
        status = "inconclusive"
    return {"status": status, "liminf": liminf, "alpha": alpha, "eps": eps,
            "window": list(window), "paths": rows, "empirical": True}


def _fit_or_vanish(d, v, powers):
    try:
        return growth_fit(d, v, powers=powers)
    except FitError:
        # some zero samples: too little data for a slope, but the trend is still meaningful
        from .derivatives import trend_label

        return GrowthFit(0.0, 0.0, 0.0, (float(d.min()), float(d.max())), int(np.sum(v > 0)),
                         {p: trend_label(d, v, p) for p in powers}, vanishing=bool(np.all(v == 0)))


def growth_verdict(f, D: Domain, xi, alpha: float, window=tuple(DEFAULTS["window"]), seed: int = 0,
                   count: int = DEFAULTS["window_probes"], normal_limit: LimitEstimate | None = None,
                   family: str = DEFAULTS["family"]):
    """Normal spherical derivative against ``1/d``, tangential against ``1/sqrt(d)``."""
    frame = _frame(D, xi)
    r = _region(D, frame, alpha, family)
    if normal_limit is None:
        normal_limit = estimate_limit(f, normal_path(D, frame))
    normal_fits, tangential_fits = [], []
    for path in probe_paths(r, seed):
        d, nrm, tan = _path_probes(f, D, frame, path, window, count)
        normal_fits.append((path, _fit_or_vanish(d, nrm, (1.0, 0.5))))
        tangential_fits.append((path, _fit_or_vanish(d, tan, (1.0, 0.5))))

    def pick(fits, p):
        label = worst_label([fit.label(p) for _, fit in fits])
        path, fit = min(((pa, fi) for pa, fi in fits if fi.label(p) == label), key=lambda x: x[1].exponent)
        return label, path, fit

    n_label, n_path, n_fit = pick(normal_fits, 1.0)
    t_label, t_path, t_fit = pick(tangential_fits, 0.5)
    if not normal_limit.converged:
        prediction = "inconclusive"
    elif n_label == "o" and t_label == "o":
        prediction = "admissible"
    else:
        prediction = "not_admissible"
    return {
        "alpha": alpha,
        "normal": {"label": n_label, "power": 1.0, "fit": n_fit.to_dict(), "path": n_path.describe()},
        "tangential": {"label": t_label, "power": 0.5, "fit": t_fit.to_dict(), "path": t_path.describe()},
        "normal_limit_converged": normal_limit.converged,
        "prediction": prediction,
        "empirical": True,
    }


# ------------------------------------------------------------ Lindelof-type


def _caps(f, D, frame, apertures, K, seed, window, count, family):
    worst_n, worst_t = 0.0, 0.0
    for i, a in enumerate(apertures):
        r = _region(D, frame, a, family)
        for path in probe_paths(r, seed + 7919 * i):
            d, nrm, tan = _path_probes(f, D, frame, path, window, count)
            worst_n = max(worst_n, float(np.max(nrm * d)))
            worst_t = max(worst_t, float(np.max(tan * np.sqrt(d))))
    return {"K": K, "normal_max": worst_n, "tangential_max": worst_t,
            "hold": bool(worst_n <= K and worst_t <= K)}


def _attainment_search(f, D, starts, L, max_iter=60):
    """Minimum-norm Newton on ``N - L D`` (or ``D`` when ``L`` is infinite); returns a root in D or None."""
    for z in starts:
        z = z.copy()
        for _ in range(max_iter):
            N, Dn = f.projective(z)
            h = Dn if L is INF else N - complex(L) * Dn
            hv, hg = complex(h.value), np.asarray(h.grad)
            scale = abs(complex(N.value)) + abs(complex(Dn.value))
            if abs(hv) <= 1e-13 * max(scale, 1e-300):
                if bool(D.contains(z)):
                    return z
                break
            gn = float(np.sum(np.abs(hg) ** 2))
            if gn == 0:
                break
            z = z - hv * np.conj(hg) / gn
            if not np.all(np.isfinite(z)) or np.linalg.norm(z) > 1e6:
                break
    return None


def _omitted_value(f, D, frame, L, apertures, samples, seed, family):
    rng = np.random.default_rng(seed)
    alpha = max(apertures)
    pts, _, _ = _random_members(family, alpha, D, frame, samples, rng)
    N, Dn = f.projective(pts)
    if L is INF:
        dist = np.abs(Dn.value) / np.sqrt(np.abs(N.value) ** 2 + np.abs(Dn.value) ** 2)
    else:
        Lc = complex(L)
        dist = chordal_distance_projective(N.value, Dn.value, Lc, 1.0)
    order = np.argsort(dist)
    witness = _attainment_search(f, D, pts[order[:8]], L)
    return {
        "samples": samples,
        "min_chordal_distance": float(dist.min()),
        "attained": witness is not None,
        "witness": None if witness is None else [[float(c.real), float(c.imag)] for c in witness],
        "empirical": witness is None,
    }


def _is_constant(f, D, frame, seed):
    r = _region(D, frame, 2.0)
    pts = sample_region(r, 1e-2 * min(1.0, D.chart_radius), 64, seed).points
    pts = np.concatenate([pts, frame.vertex - np.outer([0.1, 0.01, 0.001], frame.normal) *
                          min(1.0, D.chart_radius)])
    return bool(np.all(np.abs(spherical_gradient(f, pts)) == 0))


def lindelof_refined_verdict(f, D: Domain, xi, K: float = DEFAULTS["K"], apertures=(1.0, 2.0, 4.0),
                             samples: int = 100_000, seed: int = 0, tol: float = DEFAULTS["tol"],
                             window=tuple(DEFAULTS["window"]), count: int = DEFAULTS["window_probes"],
                             family: str = DEFAULTS["family"], crosscheck: bool = True):
    """Normal limit ``L`` omitted by ``f`` plus ``K``-growth caps predicts the admissible limit ``L``."""
    frame = _frame(D, xi)
    normal = estimate_limit(f, normal_path(D, frame), tol)
    out = {"K": K, "normal_limit": normal.to_dict(), "apertures": list(apertures), "empirical": True,
           "note": "evaluation restricted to in-region probes"}
    if not normal.converged:
        out.update(status="inconclusive", reason="no normal limit")
        return out
    caps = _caps(f, D, frame, apertures, K, seed, window, count, family)
    out["caps"] = caps
    if _is_constant(f, D, frame, seed):
        out.update(status="trivial", reason="constant function: the conclusion holds without the hypotheses")
        if crosscheck:
            out["admissible_agrees"] = admissible_verdict(f, D, frame, apertures, tol, seed, family).status == "holds"
        return out
    omit = _omitted_value(f, D, frame, normal.value, apertures, samples, seed, family)
    out["omitted_value"] = omit
    if omit["attained"]:
        out.update(status="not_applicable", reason="the normal limit is attained")
    elif not caps["hold"]:
        out.update(status="not_applicable", reason="growth caps fail")
    else:
        out.update(status="predicts_admissible", prediction=ext_to_json(normal.value))
        if crosscheck:
            adm = admissible_verdict(f, D, frame, apertures, tol, seed, family)
            out["admissible_agrees"] = bool(adm.status == "holds" and chordal_distance(adm.value, normal.value) < tol)
    return out


def single_region_verdict(f, D: Domain, xi, beta: float = 1.0, K: float = DEFAULTS["K"], seed: int = 0,
                          tol: float = DEFAULTS["tol"], window=tuple(DEFAULTS["window"]),
                          count: int = DEFAULTS["window_probes"], family: str = DEFAULTS["family"]):
    """A limit inside the single region ``A_beta`` plus ``K``-caps predicts an admissible limit."""
    frame = _frame(D, xi)
    inner = admissible_verdict(f, D, frame, [beta], tol, seed, family)
    caps = _caps(f, D, frame, [beta, 2 * beta, 4 * beta], K, seed, window, count, family)
    out = {"beta": beta, "K": K, "limit_in_region": inner.status, "caps": caps, "empirical": True}
    if inner.status != "holds":
        out.update(status="not_applicable", reason=f"limit in A_beta {inner.status}")
        if inner.witness is not None:
            out["witness"] = inner.witness
        return out
    out["limit"] = ext_to_json(inner.value)
    if not caps["hold"]:
        out.update(status="not_applicable", reason="growth caps fail")
        return out
    check = admissible_verdict(f, D, frame, [2 * beta, 4 * beta], tol, seed, family)
    agrees = check.status == "holds" and chordal_distance(check.value, inner.value) < tol
    out.update(status="predicts_admissible", crosscheck_alphas=[2 * beta, 4 * beta], confirmed=bool(agrees))
    return out


def admissible_bounded_check(f, D: Domain, xi, apertures, samples: int = 2000, seed: int = 0,
                             depths=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6), family: str = DEFAULTS["family"]):
    """Sampled ``sup |f|`` over ``A_alpha`` for each aperture (``inf`` at poles)."""
    frame = _frame(D, xi)
    depths = [t for t in depths if t < D.chart_radius]
    rows = []
    for i, a in enumerate(apertures):
        r = _region(D, frame, a, family)
        per = max(1, samples // len(depths))
        sups = []
        for k, t in enumerate(depths):
            try:
                pts = sample_region(r, t, per, seed + 101 * i + k).points
            except SamplingError:
                continue
            N, Dn = f.projective(pts)
            with np.errstate(divide="ignore", invalid="ignore"):
                mod = np.where(Dn.value == 0, np.inf, np.abs(N.value) / np.abs(np.where(Dn.value == 0, 1, Dn.value)))
            sups.append(float(mod.max()))
        rows.append({"alpha": a, "sup": max(sups) if sups else float("nan"),
                     "sup_by_depth": sups, "depths": depths[:len(sups)]})
    return rows


# ------------------------------------------------------------------ verdicts


@dataclass
class Verdict:
    normal_limit: LimitEstimate
    admissible: AdmissibleOutcome
    criterion_t1: dict
    growth: dict
    boundedness: list
    theorem_flags: dict
    lindelof: dict | None = None
    single_region: dict | None = None

    def to_dict(self):
        out = {
            "normal_limit": self.normal_limit.to_dict(),
            "admissible": self.admissible.to_dict(),
            "criterion_t1": self.criterion_t1,
            "growth": self.growth,
            "boundedness": self.boundedness,
            "theorem_flags": self.theorem_flags,
        }
        if self.lindelof is not None:
            out["lindelof"] = self.lindelof
        if self.single_region is not None:
            out["single_region"] = self.single_region
        return _jsonable(out)


def classify(f, D: Domain, xi, apertures, tol: float = DEFAULTS["tol"], seed: int = 0,
             K: float = DEFAULTS["K"], eps: float = DEFAULTS["eps_crit"], omit_samples: int = 100_000,
             bounded_samples: int = 2000, theorems: bool = True) -> Verdict:
    """Run every check and cross-check their consistency."""
    frame = _frame(D, xi)
    apertures = list(apertures)
    normal = estimate_limit(f, normal_path(D, frame), tol)
    adm = admissible_verdict(f, D, frame, apertures, tol, seed)
    crit_alpha = max(apertures)
    crit = criterion_t1_check(f, D, frame, crit_alpha, eps=eps, seed=seed)
    growth = growth_verdict(f, D, frame, crit_alpha, seed=seed, normal_limit=normal)
    bounded = admissible_bounded_check(f, D, frame, apertures, bounded_samples, seed)
    flags = {
        "limit_excludes_criterion_violation": not (adm.status == "holds" and crit["status"] == "violated"),
        "criterion_violation_excludes_limit": not (crit["status"] == "violated" and normal.converged
                                              and adm.status == "holds"),
        "growth_prediction_agrees": (growth["prediction"] == "inconclusive" or adm.status == "inconclusive"
                         or (growth["prediction"] == "admissible") == (adm.status == "holds")),
    }
    lind = single = None
    if theorems:
        lind = lindelof_refined_verdict(f, D, frame, K, apertures, omit_samples, seed, tol, crosscheck=False)
        if lind["status"] == "predicts_admissible":
            lind["admissible_agrees"] = bool(adm.status == "holds"
                                             and chordal_distance(adm.value, normal.value) < tol)
            flags["omitted_value_prediction_agrees"] = lind["admissible_agrees"]
        single = single_region_verdict(f, D, frame, min(apertures), K, seed, tol)
        if single["status"] == "predicts_admissible":
            flags["single_region_prediction_agrees"] = bool(single["confirmed"]) == (adm.status == "holds")
    return Verdict(normal, adm, crit, growth, bounded, flags, lind, single)
