"""Approach regions at a boundary vertex, approach paths, samplers and inclusion checks.

Five region families are supported:

``disc_stolz``    ``|1 - z conj(xi)| < (alpha/2)(1 - |z|^2)`` in the unit disc, alpha > 1
``disc_angular``  ``|arg((z - xi)/(-xi))| < theta`` in the unit disc, 0 < theta < pi/2
``ball_koranyi``  ``|1 - (z, xi)| < (alpha/2)(1 - |z|^2)`` in the unit ball, alpha > 1
``stein``         ``|(z - xi, nu)| < (1 + alpha) delta_xi(z)`` and ``|z - xi|^2 < alpha delta_xi(z)``
``real_adapted``  ``|u|^2 < alpha d(z)`` and ``|y1| < alpha x1`` in vertex coordinates u
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .cplx import as_cvec, hermitian_inner
from .errors import GeometryError, SamplingError
from .geometry import BoundaryFrame, Domain, UnitBall, boundary_frame, graph_d, split_vertex, to_real

__all__ = [
    "FAMILIES",
    "ApproachPath",
    "InclusionReport",
    "RegionSample",
    "RegionSpec",
    "contains",
    "equivalence_constants",
    "fitted_parabola_path",
    "format_region",
    "halving_depths",
    "inclusion_report",
    "law_of_cosines_check",
    "log_depths",
    "normal_path",
    "normal_ray",
    "paper_parabola",
    "parabola_path",
    "parabola_threshold",
    "parse_region",
    "random_region_path",
    "sample_region",
]

FAMILIES = ("disc_stolz", "disc_angular", "ball_koranyi", "stein", "real_adapted")
_ALIASES = {
    "stolz": "disc_stolz",
    "angular": "disc_angular",
    "koranyi": "ball_koranyi",
    "stein": "stein",
    "adapted": "real_adapted",
}
_SHORT = {v: k for k, v in _ALIASES.items()}
_PARAM = {"disc_angular": "theta"}


def _valid_aperture(family, a):
    if family in ("disc_stolz", "ball_koranyi"):
        return a > 1
    if family == "disc_angular":
        return 0 < a < math.pi / 2
    return a > 0


@dataclass(frozen=True)
class RegionSpec:
    family: str
    aperture: float
    vertex: tuple
    domain: Domain = field(compare=False)

    def __post_init__(self):
        family = _ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "vertex", tuple(complex(v) for v in np.atleast_1d(self.vertex)))
        if family not in FAMILIES:
            raise ValueError(f"unknown region family {self.family!r}")
        if not _valid_aperture(family, self.aperture):
            raise ValueError(f"aperture {self.aperture!r} is invalid for {family}")
        if family.startswith("disc_") and not (isinstance(self.domain, UnitBall) and self.domain.dim == 1):
            raise GeometryError(f"{family} is defined on the unit disc only")
        if family == "ball_koranyi" and not isinstance(self.domain, UnitBall):
            raise GeometryError("ball_koranyi is defined on the unit ball only")

    @cached_property
    def frame(self) -> BoundaryFrame:
        return boundary_frame(self.domain, np.array(self.vertex))

    def with_aperture(self, a):
        return RegionSpec(self.family, a, self.vertex, self.domain)

    def contains(self, z):
        return contains(self, z)


def _member(family, aperture, domain, frame, z):
    """Vectorised membership; ``aperture`` broadcasts against the batch shape."""
    z = as_cvec(z)
    a = np.asarray(aperture, dtype=float)
    inside = domain.contains(z)
    xi = frame.vertex
    with np.errstate(invalid="ignore", divide="ignore"):
        if family in ("disc_stolz", "ball_koranyi"):
            lhs = np.abs(1.0 - hermitian_inner(z, xi))
            rhs = 0.5 * a * (1.0 - np.sum(np.abs(z) ** 2, axis=-1))
            ok = lhs < rhs
        elif family == "disc_angular":
            phi = np.abs(np.angle((z[..., 0] - xi[0]) / (-xi[0])))
            ok = (phi < a) & (z[..., 0] != xi[0])
        elif family == "stein":
            dz = z - xi
            dxi = np.minimum(domain.boundary_distance(z),
                             np.abs(np.real(hermitian_inner(dz, frame.normal))))
            ok = (np.abs(hermitian_inner(dz, frame.normal)) < (1 + a) * dxi) & \
                 (np.sum(np.abs(dz) ** 2, axis=-1) < a * dxi)
        elif family == "real_adapted":
            u = frame.to_vertex(z)
            x1, zeta = split_vertex(u)
            d = graph_d(domain, frame, z, strict=False)
            ok = (np.sum(np.abs(u) ** 2, axis=-1) < a * d) & (np.abs(zeta[..., 0]) < a * x1)
            ok = ok & np.isfinite(d)
        else:
            raise ValueError(family)
    return ok & inside


def contains(r: RegionSpec, z):
    """Exact evaluation of the region's defining inequalities."""
    out = _member(r.family, r.aperture, r.domain, r.frame, z)
    return bool(out) if np.ndim(out) == 0 else out


_REGION_RE = re.compile(
    r"^\s*(?P<family>[a-z_]+)\s*:\s*(?P<param>[a-z]+)\s*=\s*(?P<value>[^@]+?)\s*@\s*xi\s*=\s*(?P<xi>\(.*\))\s*$"
)


def parse_vertex(text):
    """``"(1,0)"`` or ``"(0.6, 0.8j)"``; ``i`` is accepted for the imaginary unit."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"vertex must be parenthesised: {text!r}")
    parts = [p.strip() for p in text[1:-1].split(",")]
    try:
        return np.array([complex(p.replace(" ", "").replace("i", "j")) for p in parts])
    except ValueError:
        raise ValueError(f"cannot parse vertex {text!r}") from None


def parse_region(text: str, domain: Domain | None = None) -> RegionSpec:
    """Parse ``family:param=value@xi=(...)``, e.g. ``koranyi:alpha=2@xi=(1,0)``."""
    m = _REGION_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse region spec {text!r}")
    family = _ALIASES.get(m.group("family"), m.group("family"))
    expected = _PARAM.get(family, "alpha")
    if m.group("param") != expected:
        raise ValueError(f"{family} takes parameter {expected!r}")
    xi = parse_vertex(m.group("xi"))
    if domain is None:
        domain = UnitBall(len(xi))
    return RegionSpec(family, float(m.group("value")), tuple(xi), domain)


def _num(x: float):
    x = float(x)
    return repr(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def _fmt(c: complex):
    c = complex(c)
    if c.imag == 0:
        return _num(c.real)
    sign = "-" if c.imag < 0 or (c.imag == 0 and math.copysign(1, c.imag) < 0) else "+"
    return f"{_num(c.real)}{sign}{_num(abs(c.imag))}j"


def format_region(r: RegionSpec) -> str:
    xi = ",".join(_fmt(c) for c in r.vertex)
    return f"{_SHORT[r.family]}:{_PARAM.get(r.family, 'alpha')}={_num(r.aperture)}@xi=({xi})"


# ------------------------------------------------------------------------ paths


def halving_depths(t0=1e-2, count=24):
    return t0 * 0.5 ** np.arange(count)


def log_depths(window=(1e-8, 1e-2), count=12):
    lo, hi = window
    return np.logspace(math.log10(hi), math.log10(lo), count)


def normal_ray(D: Domain, xi, t: float):
    """The point ``xi - t nu`` on the inner normal."""
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    if not 0 < t < D.chart_radius:
        raise GeometryError(f"normal-ray parameter {t!r} outside (0, {D.chart_radius})")
    z = frame.vertex - t * frame.normal
    if not D.contains(z):
        raise GeometryError("normal-ray point left the domain")
    return z


def paper_parabola(j: int, exact: bool = False, dps: int = 50):
    """``(1 - 1/j, 1/sqrt(j))`` in B^2, ``j >= 4``.

    With ``exact=True`` the coordinates are mpmath numbers at ``dps`` digits.
    """
    if int(j) != j or j < 4:
        raise ValueError("paper_parabola needs an integer j >= 4")
    j = int(j)
    if exact:
        import mpmath

        ctx = mpmath.mp.clone()
        ctx.dps = dps
        return [ctx.mpc(1) - ctx.mpf(1) / j, ctx.mpc(1) / ctx.sqrt(j)]
    return np.array([1.0 - 1.0 / j, 1.0 / math.sqrt(j)], dtype=complex)


def parabola_threshold(alpha: float):
    """Smallest ``j >= 4`` from which ``paper_parabola(j)`` lies in ``D_alpha((1,0))``.

    Membership is equivalent to ``j/(j-1) < alpha/2``, i.e. ``j > alpha/(alpha-2)``;
    returns ``None`` when ``alpha <= 2`` (never inside).
    """
    if alpha <= 2:
        return None
    return max(4, math.floor(alpha / (alpha - 2)) + 1)


@dataclass(frozen=True)
class ApproachPath:
    """Curve ``u(t) = (a1 t, a' sqrt(t))`` in vertex coordinates, ``t -> 0``.

    Normal rays have ``a = (1, 0, ...)``; the sequence (1 - 1/j, 1/sqrt j) is ``a = (1, 1)``.
    """

    kind: str
    frame: BoundaryFrame = field(repr=False, compare=False)
    shape: tuple
    seed: int | None = None

    def vertex_points(self, depths):
        t = np.asarray(depths, dtype=float)[:, None]
        a = np.asarray(self.shape, dtype=complex)
        u = np.empty((t.shape[0], len(a)), dtype=complex)
        u[:, :1] = a[:1] * t
        u[:, 1:] = a[1:] * np.sqrt(t)
        return u

    def points(self, depths):
        return self.frame.from_vertex(self.vertex_points(depths))

    def describe(self):
        out = {"kind": self.kind, "shape": [[c.real, c.imag] for c in map(complex, self.shape)]}
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def normal_path(D: Domain, xi) -> ApproachPath:
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    shape = (1.0,) + (0.0,) * (D.dim - 1)
    return ApproachPath("normal_ray", frame, tuple(complex(s) for s in shape))


def parabola_path(D: Domain, xi, kappa: float = 1.0) -> ApproachPath:
    if D.dim < 2:
        raise GeometryError("parabolic paths need at least two variables")
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    shape = (1.0, kappa) + (0.0,) * (D.dim - 2)
    return ApproachPath("paper_parabola", frame, tuple(complex(s) for s in shape))


_KAPPAS = (1.0, 0.75, 0.5, 0.35, 0.25, 0.15, 0.1)


def fitted_parabola_path(r: RegionSpec, depths):
    """Parabola ``(1 - t, kappa sqrt t)`` with the largest ``kappa`` keeping every point inside ``r``."""
    for kappa in _KAPPAS:
        path = parabola_path(r.domain, r.frame, kappa)
        if np.all(contains(r, path.points(depths))):
            return path
    return None


def random_region_path(r: RegionSpec, seed: int, depths, tries: int = 64):
    """Parabolic ray through a seeded random point of ``r``; every emitted point is in ``r``."""
    rng = np.random.default_rng(seed)
    t0 = float(np.max(depths))
    for _ in range(tries):
        sample = sample_region(r, t0, 1, int(rng.integers(2**63 - 1)))
        u = r.frame.to_vertex(sample.points[0])
        x1 = u[0].real
        shape = np.concatenate([[u[0] / x1], u[1:] / math.sqrt(x1)])
        path = ApproachPath("region_random", r.frame, tuple(complex(s) for s in shape), seed)
        if np.all(contains(r, path.points(depths))):
            return path
    raise SamplingError(f"no random path of {format_region(r)} stays inside over the depth window")


# -------------------------------------------------------------------- sampling


@dataclass
class RegionSample:
    points: np.ndarray
    acceptance_rate: float
    proposals: int


def _effective_aperture(family, a):
    if family == "disc_angular":
        return 1.0, math.tan(a)
    if family == "stein":
        return a + 1.0, a + 1.0
    return a, a


def _propose(family, aperture, domain, frame, d, rng, m):
    """Proposals in a vertex-centred box scaled to boundary distance ``d`` (array of m)."""
    a, slope = _effective_aperture(family, aperture)
    n = domain.dim
    H = 2.0 * (2.0 + a) * d
    yhalf = slope * H
    if isinstance(domain, UnitBall):
        yhalf = np.minimum(yhalf, np.sqrt(2.0 * H))
    T = np.sqrt(max(a, 2.0) * H)
    if family == "ball_koranyi":
        # exact bounds: 1 - |z|^2 <= 2 delta <= 4d gives |u1| < 2ad and |z'|^2 <= 2|u1|
        H = 2.0 * a * d
        yhalf = H
        T = np.sqrt(2.0 * H)
    u = np.empty((m, n), dtype=complex)
    u[:, 0] = rng.uniform(0, 1, m) * H + 1j * rng.uniform(-1, 1, m) * yhalf
    if n > 1:
        u[:, 1:] = (rng.uniform(-1, 1, (m, n - 1)) + 1j * rng.uniform(-1, 1, (m, n - 1))) * T[:, None]
    return frame.from_vertex(u), u


def sample_region(r: RegionSpec, d_target: float, count: int, seed: int,
                  min_rate: float = 1e-4, batch: int = 8192) -> RegionSample:
    """Rejection sample ``count`` points of ``r`` with ``delta(z)`` in ``[0.5, 2] d_target``."""
    if not 0 < d_target < r.domain.chart_radius:
        raise SamplingError(f"d_target={d_target!r} outside (0, {r.domain.chart_radius})")
    rng = np.random.default_rng(seed)
    D, frame = r.domain, r.frame
    found, proposals = [], 0
    have = 0
    while have < count:
        m = batch
        z, u = _propose(r.family, r.aperture, D, frame, np.full(m, d_target), rng, m)
        proposals += m
        _, zeta = split_vertex(u)
        ok = np.linalg.norm(zeta, axis=-1) < D.chart_radius
        ok &= D.contains(z)
        idx = np.nonzero(ok)[0]
        if len(idx):
            # the vertical drop bounds delta from above
            x1, zt = split_vertex(u[idx])
            with np.errstate(invalid="ignore"):
                idx = idx[~(x1 - D.chart_psi(frame, zt) < 0.5 * d_target)]
        if len(idx):
            idx = idx[np.asarray(_member(r.family, r.aperture, D, frame, z[idx]), dtype=bool)]
        if len(idx):
            delta = np.asarray(D.boundary_distance(z[idx]))
            idx = idx[(delta >= 0.5 * d_target) & (delta <= 2.0 * d_target)]
        found.append(z[idx])
        have += len(idx)
        rate = have / proposals
        if proposals >= 100_000 and rate < min_rate:
            raise SamplingError(
                f"acceptance rate {rate:.2e} below {min_rate:g} for {format_region(r)} at d={d_target:g}"
            )
        if proposals >= 50_000_000:
            raise SamplingError("proposal budget exhausted")
    pts = np.concatenate(found)[:count]
    return RegionSample(pts, have / proposals, proposals)


# ------------------------------------------------------------------- inclusions


@dataclass
class InclusionReport:
    pair: tuple
    aperture: float
    target_aperture: float | None
    trials: int
    violations: int
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "pair": list(self.pair),
            "aperture": self.aperture,
            "target_aperture": self.target_aperture,
            "trials": self.trials,
            "violations": self.violations,
            "details": self.details,
        }


def _random_members(family, aperture, domain, frame, trials, rng, dmin=1e-6, dmax=None, batch=8192):
    """Points of the family with per-point apertures; returns ``(points, apertures, proposals)``."""
    if dmax is None:
        dmax = min(0.1, 0.4 * domain.chart_radius)
    pts, aps, proposals = [], [], 0
    have = 0
    ap_fn = aperture if callable(aperture) else (lambda m: np.full(m, float(aperture)))
    while have < trials:
        d = np.exp(rng.uniform(math.log(dmin), math.log(dmax), batch))
        a = ap_fn(batch)
        z = np.empty((batch, domain.dim), dtype=complex)
        # proposals coarsely grouped by aperture so the box matches the region shape
        z, u = _propose(family, float(np.max(a)), domain, frame, d, rng, batch)
        proposals += batch
        ok = np.asarray(_member(family, a, domain, frame, z), dtype=bool)
        pts.append(z[ok])
        aps.append(a[ok])
        have += int(ok.sum())
        if proposals > 50_000_000:
            raise SamplingError("proposal budget exhausted")
    return np.concatenate(pts)[:trials], np.concatenate(aps)[:trials], proposals


def law_of_cosines_check(trials: int = 10_000, seed: int = 0, xi: complex = 1.0):
    """Check the disc bounds relating ``|1 - z conj(xi)|/(1-|z|^2)`` and ``phi = angle at xi``.

    Uniform samples of ``U`` (lower bound) and of ``U`` intersected with the unit
    disc about ``xi`` (upper bounds).  Reports violations of

    * ``1/(2 cos phi) <= ratio`` on U,
    * ``ratio <= 2/cos phi`` on U with ``|z - xi| < 1`` (as commonly quoted),
    * ``ratio <= 1/cos phi`` on U with ``|z - xi| <= cos phi`` (sharp local form).
    """
    rng = np.random.default_rng(seed)
    xi = complex(xi)

    def uniform(cond, m):
        out = []
        have = 0
        while have < m:
            w = rng.uniform(-1, 1, (4 * m, 2))
            w = w[:, 0] + 1j * w[:, 1]
            w = w[cond(w)]
            out.append(w)
            have += len(w)
        return np.concatenate(out)[:m]

    def stats(z):
        dist = np.abs(1 - z * np.conj(xi))
        ratio = dist / (1 - np.abs(z) ** 2)
        cphi = np.cos(np.angle((z - xi) / (-xi)))
        return dist, ratio, cphi

    z_all = uniform(lambda w: np.abs(w) < 1, trials)
    dist, ratio, cphi = stats(z_all)
    lower = int(np.sum(ratio < 1 / (2 * cphi) * (1 - 1e-12)))

    z_loc = uniform(lambda w: (np.abs(w) < 1) & (np.abs(w - xi) < 1), trials)
    dist, ratio, cphi = stats(z_loc)
    upper = int(np.sum(ratio > 2 / cphi * (1 + 1e-12)))
    worst = int(np.argmax(ratio * cphi))
    local = dist <= cphi
    sharp = int(np.sum(local & (ratio > 1 / cphi * (1 + 1e-12))))
    return {
        "trials": trials,
        "lower_violations": lower,
        "upper_violations": upper,
        "upper_worst_ratio_times_cos": float(ratio[worst] * cphi[worst]),
        "upper_worst_point": [float(z_loc[worst].real), float(z_loc[worst].imag)],
        "local_trials": int(local.sum()),
        "local_upper_violations": sharp,
    }


def _aperture_range(family):
    if family in ("disc_stolz", "ball_koranyi"):
        return 1.0, 10.0
    if family == "disc_angular":
        return 0.0, math.pi / 2
    return 0.0, 10.0


def inclusion_report(pair, aperture=None, trials: int = 10_000, seed: int = 0,
                     domain: Domain | None = None, vertex=None) -> InclusionReport:
    """Monte-Carlo verification of a region inclusion.

    Supported pairs:

    * ``("disc_stolz", "disc_angular")``: Gamma_alpha inside A_theta, theta = arccos(1/alpha)
    * ``("disc_angular", "disc_stolz")``: A_theta near xi inside Gamma_alpha, alpha = 2/cos(theta),
      on ``|z - xi| < cos(theta)``
    * ``(family, family)``: aperture monotonicity over random pairs ``a < a'``
    * ``("normal_ray", "ball_koranyi")``: normal-ray points with ``t < 2(1 - 1/alpha)``
    * ``("real_adapted", "stein")``: empirical equivalence constants (no violations counted)
    """
    rng = np.random.default_rng(seed)
    src, dst = pair
    if src.startswith("disc") or dst.startswith("disc"):
        domain = domain or UnitBall(1)
        vertex = np.array([1.0 + 0j]) if vertex is None else as_cvec(vertex)
    else:
        domain = domain or UnitBall(2)
        vertex = np.eye(domain.dim, dtype=complex)[0] if vertex is None else as_cvec(vertex)
    frame = boundary_frame(domain, vertex)

    if (src, dst) == ("disc_stolz", "disc_angular"):
        theta = math.acos(1.0 / aperture)
        z, _, _ = _random_members(src, aperture, domain, frame, trials, rng)
        bad = ~np.asarray(_member(dst, theta, domain, frame, z), dtype=bool)
        return InclusionReport(pair, aperture, theta, trials, int(bad.sum()))

    if (src, dst) == ("disc_angular", "disc_stolz"):
        theta = aperture
        alpha = 2.0 / math.cos(theta)
        radius = math.cos(theta)
        z, _, _ = _random_members(src, theta, domain, frame, trials, rng,
                                  dmax=min(0.1, 0.4 * radius))
        near = np.abs(z[:, 0] - vertex[0]) < radius
        bad = near & ~np.asarray(_member(dst, alpha, domain, frame, z), dtype=bool)
        return InclusionReport(pair, theta, alpha, trials, int(bad.sum()),
                               {"disc_radius": radius, "in_disc": int(near.sum())})

    if src == dst and src in FAMILIES:
        lo, hi = _aperture_range(src)

        def draw(m):
            return rng.uniform(lo, hi, m) if src != "disc_angular" else rng.uniform(0.02, hi - 0.02, m)

        z, a, _ = _random_members(src, draw, domain, frame, trials, rng)
        if src == "disc_angular":
            a2 = a + rng.uniform(0, 1, len(a)) * (hi - a)
        else:
            a2 = a + rng.uniform(0, 1, len(a)) * (hi - a) + 1e-12
        bad = ~np.asarray(_member(src, a2, domain, frame, z), dtype=bool)
        return InclusionReport(pair, None, None, trials, int(bad.sum()))

    if (src, dst) == ("normal_ray", "ball_koranyi"):
        lo, hi = 1.0, 10.0
        a = rng.uniform(lo, hi, trials) + 1e-9
        thr = 2.0 * (1.0 - 1.0 / a)
        t = rng.uniform(0, 1, trials) * np.minimum(thr, domain.chart_radius)
        t = np.where(t > 0, t, 0.5 * thr)
        z = frame.vertex - t[:, None] * frame.normal
        bad = ~np.asarray(_member(dst, a, domain, frame, z), dtype=bool)
        return InclusionReport(pair, None, None, trials, int(bad.sum()),
                               {"threshold": "t < 2(1 - 1/alpha)"})

    if (src, dst) == ("real_adapted", "stein"):
        beta, gamma = equivalence_constants(domain, vertex, aperture, trials, seed)
        return InclusionReport(pair, aperture, gamma, trials, 0,
                               {"beta": beta, "gamma": gamma,
                                "meaning": "stein(beta) inside real_adapted(alpha) inside stein(gamma), empirical"})

    raise ValueError(f"unsupported inclusion pair {pair!r}")


def equivalence_constants(domain: Domain, vertex, alpha: float, trials: int = 2000, seed: int = 0,
                          iters: int = 30):
    """Empirical ``beta, gamma`` with ``stein(beta) <= real_adapted(alpha) <= stein(gamma)``.

    ``gamma``: bisection for the smallest aperture containing all sampled points
    of ``real_adapted(alpha)``.  ``beta``: bisection for the largest aperture whose
    samples all fall in ``real_adapted(alpha)``.
    """
    frame = boundary_frame(domain, vertex)
    rng = np.random.default_rng(seed)
    z, _, _ = _random_members("real_adapted", alpha, domain, frame, trials, rng)

    lo, hi = 0.0, 1.0
    while not np.all(_member("stein", hi, domain, frame, z)):
        hi *= 2
        if hi > 1e6:
            break
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.all(_member("stein", mid, domain, frame, z)):
            hi = mid
        else:
            lo = mid
    gamma = hi

    def inside(b, s):
        pts, _, _ = _random_members("stein", b, domain, frame, trials, np.random.default_rng(s))
        return bool(np.all(_member("real_adapted", alpha, domain, frame, pts)))

    lo, hi = 0.0, alpha
    s = int(rng.integers(2**63 - 1))
    while inside(hi, s) and hi < 1e3:
        lo, hi = hi, 2 * hi
    for _ in range(iters // 2):
        mid = 0.5 * (lo + hi)
        if mid <= 0:
            break
        if inside(mid, s):
            lo = mid
        else:
            hi = mid
    return lo, gamma
