"""Anisotropic polydiscs, rescaling to the unit polydisc, chains and the Marty functional.

A polydisc ``P(b, c)`` is taken in the boundary frame at the vertex ``xi``: its
radius is ``c d(b)`` along the normal and ``c sqrt(d(b))`` in each complex
tangential direction.  Rescaled coordinates are ``w = U^H (z - b) / radii``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cplx import as_cvec
from .derivatives import spherical_gradient
from .errors import ChainError, GeometryError
from .expr import AffinePullback
from .geometry import BoundaryFrame, Domain, boundary_frame, graph_d
from .regions import RegionSpec, sample_region

__all__ = [
    "C_LADDER",
    "Chain",
    "Polydisc",
    "RescaledFn",
    "build_chain",
    "default_c",
    "marty_functional",
    "normality_score",
    "rescale_forward",
    "rescale_inverse",
]

C_LADDER = (0.4, 0.2, 0.1, 0.05)


@dataclass(frozen=True)
class Polydisc:
    center: np.ndarray
    c: float
    d_b: float
    frame: BoundaryFrame = field(repr=False)

    def __post_init__(self):
        if not self.d_b > 0:
            raise GeometryError(f"polydisc centre has d(b) = {self.d_b!r} <= 0")
        if not self.c > 0:
            raise GeometryError("polydisc scale c must be positive")

    @classmethod
    def at(cls, D: Domain, xi, b, c: float) -> "Polydisc":
        frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
        b = D._check(b)
        return cls(b, float(c), float(graph_d(D, frame, b)), frame)

    @property
    def radii(self):
        n = self.center.shape[-1]
        return np.array([self.c * self.d_b] + [self.c * math.sqrt(self.d_b)] * (n - 1))

    def scaled(self, factor):
        return Polydisc(self.center, self.c * factor, self.d_b, self.frame)

    def forward(self, z):
        return ((as_cvec(z) - self.center) @ np.conj(self.frame.matrix)) / self.radii

    def inverse(self, w):
        return self.center + (as_cvec(w) * self.radii) @ self.frame.matrix.T

    def contains(self, z):
        out = np.all(np.abs(self.forward(z)) < 1.0, axis=-1)
        return bool(out) if np.ndim(out) == 0 else out

    def random_points(self, m, rng):
        """Uniform points of the polydisc (uniform in each coordinate disc)."""
        n = self.center.shape[-1]
        r = np.sqrt(rng.uniform(0, 1, (m, n)))
        w = r * np.exp(2j * np.pi * rng.uniform(0, 1, (m, n)))
        return self.inverse(w)


def rescale_forward(D: Domain, xi, b, c, z):
    return Polydisc.at(D, xi, b, c).forward(z)


def rescale_inverse(D: Domain, xi, b, c, w):
    return Polydisc.at(D, xi, b, c).inverse(w)


class RescaledFn(AffinePullback):
    """``g(w) = f(b + U (radii * w))``, holomorphic on the unit polydisc."""

    def __init__(self, f, polydisc: Polydisc):
        self.polydisc = polydisc
        super().__init__(f, polydisc.center, polydisc.frame.matrix * polydisc.radii[None, :])


def marty_functional(g, p, v) -> float:
    """``|dg_p(v)|^2 / (1 + |g(p)|^2)^2`` for a unit vector ``v``."""
    v = as_cvec(v)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    G = spherical_gradient(g, as_cvec(p))
    return float(abs(np.dot(G, v)) ** 2)


def normality_score(g, grid_resolution: int = 8, radius: float = 0.5) -> float:
    """Max of the Marty functional over a polar grid of the closed polydisc of radius ``radius``.

    With ``v`` the normalised gradient the functional equals ``|spherical grad|^2``.
    """
    if not 0 < radius < 1:
        raise ValueError("radius must lie in (0, 1)")
    k = grid_resolution
    rs = radius * np.arange(k) / max(k - 1, 1)
    th = np.exp(2j * np.pi * np.arange(k) / k)
    disc = np.unique(np.round((rs[:, None] * th[None, :]).ravel(), 15))
    grid = np.array(list(itertools.product(disc, repeat=g.arity)))
    G = spherical_gradient(g, grid)
    return float(np.max(np.sum(np.abs(G) ** 2, axis=-1)))


@dataclass
class Chain:
    polydiscs: list
    anchors: np.ndarray
    c: float
    alpha: float
    bound: int
    overlaps: list
    anchors_in_region: list
    d_ratios: tuple

    @property
    def length(self):
        return len(self.polydiscs)

    @property
    def within_bound(self):
        return self.length <= self.bound

    def to_dict(self):
        return {
            "length": self.length,
            "bound": self.bound,
            "c": self.c,
            "alpha": self.alpha,
            "overlaps": self.overlaps,
            "anchors_in_region": self.anchors_in_region,
            "d_ratio_range": list(self.d_ratios),
        }


def _midpoint_witness(P: Polydisc, Q: Polydisc):
    m = 0.5 * (P.center + Q.center)
    return bool(P.scaled(0.5).contains(m) and Q.scaled(0.5).contains(m))


def build_chain(D: Domain, xi, z, c: float, alpha: float, fine_steps: int | None = None) -> Chain:
    """Polydiscs covering ``[pi(z), z]`` with overlapping half-size neighbours.

    Anchors move only in the tangential coordinates (the normal coordinate of
    ``pi(z)`` and ``z`` agree).  A uniform fine subdivision with tangential step
    below ``(c/2) sqrt(d_min)`` is thinned greedily while the next anchor stays
    in the half-size polydisc of the current one.
    """
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    z = D._check(z)
    u = frame.to_vertex(z)
    s_probe = np.linspace(0, 1, 65)
    probe_u = np.concatenate([np.full((65, 1), u[0]), s_probe[:, None] * u[None, 1:]], axis=1)
    d_probe = graph_d(D, frame, frame.from_vertex(probe_u), strict=False)
    if not np.all(np.isfinite(d_probe)) or np.any(d_probe <= 0):
        raise ChainError("segment [pi(z), z] leaves the vertex chart")
    d_min = float(d_probe.min())
    # coordinates of the tangential displacement in the polydisc frame
    dz = frame.from_vertex(np.concatenate([[0], u[1:]])) - frame.vertex
    disp = np.abs(dz @ np.conj(frame.matrix))
    span = float(disp[1:].max(initial=0.0))
    step = 0.5 * c * math.sqrt(d_min) * (1 - 1e-9)
    m = fine_steps or math.ceil(span / step)
    if span == 0:
        m = 0
    s = np.linspace(0, 1, m + 1)
    fine_u = np.concatenate([np.full((m + 1, 1), u[0]), s[:, None] * u[None, 1:]], axis=1)
    fine = frame.from_vertex(fine_u)
    discs = [Polydisc.at(D, frame, b, c) for b in fine]

    keep = [0]
    i = 0
    while i < m:
        if not _midpoint_witness(discs[i], discs[i + 1]):
            raise ChainError(f"fine polydiscs {i} and {i + 1} do not overlap")
        j = i + 1
        while j < m and discs[i].scaled(0.5).contains(fine[j + 1]) and _midpoint_witness(discs[i], discs[j + 1]):
            j += 1
        keep.append(j)
        i = j
    anchors = fine[keep]
    chain = [discs[k] for k in keep]
    overlaps = [_midpoint_witness(a, b) for a, b in zip(chain, chain[1:])]
    region = RegionSpec("real_adapted", 2 * alpha, tuple(frame.vertex), D)
    inside = [bool(x) for x in np.atleast_1d(region.contains(anchors))]
    ds = np.array([P.d_b for P in chain])
    ratios = ds[1:] / ds[:-1] if len(ds) > 1 else np.array([1.0])
    return Chain(chain, anchors, c, alpha, math.ceil(2 * alpha / c) + 1, overlaps, inside,
                 (float(ratios.min()), float(ratios.max())))


def default_c(D: Domain, xi, alpha: float, probes: int = 1000, seed: int = 0,
              depths=(1e-2, 1e-4, 1e-6), cap: float = 0.2) -> float:
    """``min(cap, c(alpha))`` with ``c(alpha)`` the largest ladder value whose sampled
    polydiscs around points of ``A_alpha`` stay inside ``A_{2 alpha}``."""
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    src = RegionSpec("real_adapted", alpha, tuple(frame.vertex), D)
    dst = src.with_aperture(2 * alpha)
    rng = np.random.default_rng(seed)
    depths = [t for t in depths if t < 0.5 * D.chart_radius]
    centres_per_depth = 4
    per_centre = max(1, probes // (len(depths) * centres_per_depth))
    centres = np.concatenate([sample_region(src, t, centres_per_depth, seed + k).points
                              for k, t in enumerate(depths)])
    for c in C_LADDER:
        ok = True
        for b in centres:
            P = Polydisc.at(D, frame, b, c)
            pts = P.random_points(per_centre, rng)
            if not np.all(dst.contains(pts)):
                ok = False
                break
        if ok:
            return min(cap, c)
    raise ChainError(f"no ladder value of c keeps polydiscs inside A_{2 * alpha}")
