"""Spherical derivatives, the anisotropic nabla functional, growth fits and Cauchy checks.

Everything is computed from homogeneous jet pairs ``(N, D)``, so poles need no
special treatment: the spherical gradient ``(D dN - N dD)/(|N|^2 + |D|^2)`` is
the gradient of ``f`` divided by ``1 + |f|^2`` and is symmetric under ``N <-> D``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cplx import as_cvec
from .errors import EvaluationError, FitError, GeometryError
from .geometry import (
    BoundaryFrame,
    Domain,
    UnitBall,
    boundary_frame,
    graph_d,
    householder_frames,
)

__all__ = [
    "CauchyReport",
    "DirectionalSpherical",
    "GrowthFit",
    "SplittingReport",
    "cauchy_estimate_check",
    "directional_components",
    "directional_spherical",
    "growth_fit",
    "nabla_functional",
    "spherical_derivative_1d",
    "spherical_gradient",
    "splitting_equivalence_check",
    "trend_label",
]


def spherical_gradient(f, z):
    """``grad f / (1 + |f|^2)`` (batched), finite at poles of ``f``."""
    N, D = f.projective(as_cvec(z))
    den = np.abs(N.value) ** 2 + np.abs(D.value) ** 2
    if np.any(den == 0):
        raise EvaluationError("indeterminate 0/0")
    return (D.value[..., None] * N.grad - N.value[..., None] * D.grad) / den[..., None]


def spherical_derivative_1d(f, z) -> float:
    """``|f'(z)|/(1 + |f(z)|^2)`` for a function of one variable."""
    if f.arity != 1:
        raise ValueError("spherical_derivative_1d needs a function of one variable")
    g = spherical_gradient(f, np.array([complex(z)]))
    return float(abs(g[0]))


@dataclass(frozen=True)
class DirectionalSpherical:
    normal: float
    tangential: float
    at: np.ndarray = field(repr=False)
    frame: BoundaryFrame = field(repr=False)


def directional_components(G, U):
    """Moduli of the normal and tangential parts of row gradients ``G`` in frames ``U``."""
    rot = np.einsum("...j,...jk->...k", G, U)
    normal = np.abs(rot[..., 0])
    tangential = np.sqrt(np.sum(np.abs(rot[..., 1:]) ** 2, axis=-1))
    return normal, tangential


def _nearest_frames(D: Domain, z):
    xi, _ = D.nearest_boundary_point(z)
    g = D.outward_gradient(xi)
    nu = g / np.sqrt(np.sum(np.abs(g) ** 2, axis=-1))[..., None]
    return xi, nu, householder_frames(nu)


def directional_spherical(f, D: Domain, z, frame: BoundaryFrame | None = None) -> DirectionalSpherical:
    """Normal and complex-tangential spherical derivatives of ``f`` at ``z``.

    The frame defaults to the one at the nearest boundary point of ``z``.
    """
    z = D._check(z)
    if z.ndim != 1:
        raise ValueError("directional_spherical takes a single point; use directional_components")
    if frame is None:
        xi, nu, U = _nearest_frames(D, z)
        frame = BoundaryFrame(xi, nu, U)
    G = spherical_gradient(f, z)
    normal, tangential = directional_components(G, frame.matrix)
    return DirectionalSpherical(float(normal), float(tangential), z, frame)


def nabla_functional(f, D: Domain, xi, z, spherical: bool = True):
    """``sqrt(d^2 |grad_1|^2 + d |grad_{2..n}|^2)`` in the frame at the vertex ``xi``.

    With ``spherical=True`` the gradient is divided by ``1 + |f|^2``.  Batched over ``z``.
    """
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    z = D._check(z)
    d = graph_d(D, frame, z)
    if spherical:
        G = spherical_gradient(f, z)
    else:
        from .expr import eval_jet

        G = eval_jet(f, z).grad
    normal, tangential = directional_components(G, frame.matrix)
    out = np.sqrt(d**2 * normal**2 + d * tangential**2)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class SplittingReport:
    min_ratio: float
    max_ratio: float
    C: float
    n_samples: int
    skipped: int

    def to_dict(self):
        return dict(min_ratio=self.min_ratio, max_ratio=self.max_ratio, C=self.C,
                    n_samples=self.n_samples, skipped=self.skipped)


def splitting_equivalence_check(f, D: Domain, xi, samples) -> SplittingReport:
    """Compare the functional split at the fixed vertex with the one split at the nearest boundary point."""
    frame = xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)
    z = D._check(samples).reshape(-1, D.dim)
    d = graph_d(D, frame, z)
    G = spherical_gradient(f, z)
    n0, t0 = directional_components(G, frame.matrix)
    _, _, U = _nearest_frames(D, z)
    n1, t1 = directional_components(G, U)
    fixed = np.sqrt(d**2 * n0**2 + d * t0**2)
    adapted = np.sqrt(d**2 * n1**2 + d * t1**2)
    ok = adapted > 0
    ratio = fixed[ok] / adapted[ok]
    if ratio.size == 0:
        return SplittingReport(1.0, 1.0, 1.0, len(z), int((~ok).sum()))
    lo, hi = float(ratio.min()), float(ratio.max())
    return SplittingReport(lo, hi, max(hi, 1.0 / lo), len(z), int((~ok).sum()))


# ------------------------------------------------------------------- growth fits

TREND_RATIO = 0.7
_ORDER = {"o": 0, "O": 1, "diverges": 2}


def trend_label(d, v, p, ratio=TREND_RATIO):
    """Empirical o/O/diverges label for ``v d^p`` as ``d -> 0``: median of the
    smallest-d third against the largest-d third."""
    order = np.argsort(-np.asarray(d, dtype=float))
    w = (np.asarray(v, dtype=float) * np.asarray(d, dtype=float) ** p)[order]
    k = max(1, len(w) // 3)
    first, last = float(np.median(w[:k])), float(np.median(w[-k:]))
    if first == 0:
        return "o" if last == 0 else "diverges"
    r = last / first
    if r < ratio:
        return "o"
    if r > 1.0 / ratio:
        return "diverges"
    return "O"


def worst_label(labels):
    return max(labels, key=_ORDER.__getitem__)


@dataclass(frozen=True)
class GrowthFit:
    """Power-law fit ``value ~ exp(intercept) d^exponent``.

    ``trends`` maps each ``p`` to the empirical label of ``value d^p``.
    """

    exponent: float
    intercept: float
    residual: float
    window: tuple
    n_points: int
    trends: dict
    vanishing: bool = False

    def label(self, p):
        return self.trends[p]

    def to_dict(self):
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residual": self.residual,
            "window": list(self.window),
            "n_points": self.n_points,
            "trends": {str(k): v for k, v in sorted(self.trends.items())},
            "vanishing": self.vanishing,
            "empirical": True,
        }


def growth_fit(d, value, powers=(1.0, 0.5), min_points=8, min_decades=2.0) -> GrowthFit:
    """Least-squares slope of ``log(value)`` against ``log(d)`` plus o/O trend tests."""
    d = np.asarray(d, dtype=float).ravel()
    v = np.asarray(value, dtype=float).ravel()
    if d.shape != v.shape:
        raise FitError("d and value have different lengths")
    if len(d) < min_points:
        raise FitError(f"need at least {min_points} samples, got {len(d)}")
    if np.any(d <= 0) or not np.all(np.isfinite(d)) or not np.all(np.isfinite(v)) or np.any(v < 0):
        raise FitError("samples must have d > 0 and finite, non-negative values")
    span = math.log10(d.max() / d.min())
    if span < min_decades:
        raise FitError(f"samples span {span:.2f} decades, need {min_decades}")
    window = (float(d.min()), float(d.max()))
    trends = {p: trend_label(d, v, p) for p in powers}
    if np.all(v == 0):
        return GrowthFit(0.0, 0.0, 0.0, window, len(d), trends, vanishing=True)
    pos = v > 0
    if pos.sum() < min_points or math.log10(d[pos].max() / d[pos].min()) < min_decades:
        raise FitError("too few non-zero samples for a log-log fit")
    x, y = np.log(d[pos]), np.log(v[pos])
    A = np.stack([x, np.ones_like(x)], axis=1)
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.sqrt(np.mean((A @ np.array([slope, icpt]) - y) ** 2)))
    return GrowthFit(float(slope), float(icpt), res, window, int(pos.sum()), trends)


# ------------------------------------------------------------------ Cauchy check


@dataclass
class CauchyReport:
    c: float
    delta: float
    sup: float
    normal_lhs: float
    normal_rhs: float
    tangential_lhs: float
    tangential_rhs: float
    holds: bool

    @property
    def slack(self):
        return min(self.normal_rhs - self.normal_lhs, self.tangential_rhs - self.tangential_lhs)

    def to_dict(self):
        out = {k: getattr(self, k) for k in ("c", "delta", "sup", "normal_lhs", "normal_rhs",
                                             "tangential_lhs", "tangential_rhs", "holds")}
        out["slack"] = self.slack
        return out


def cauchy_estimate_check(f, z, c: float, D: Domain | None = None, points_per_angle: int = 64,
                          tol: float = 1e-6) -> CauchyReport:
    """Check the one-variable Cauchy estimates on ``P_c(z)`` in the unit ball.

    ``P_c(z)`` has radius ``c delta`` along ``z/|z|`` and ``c sqrt(delta)`` in the
    complex tangent directions, ``delta = 1 - |z|``.  ``sup |f|`` is sampled on
    the distinguished boundary torus.
    """
    z = as_cvec(z)
    n = z.shape[-1]
    D = D or UnitBall(n)
    if not isinstance(D, UnitBall):
        raise GeometryError("Cauchy estimates are implemented on the unit ball")
    r = float(np.linalg.norm(z))
    if not 0 < r < 1:
        raise GeometryError("point must lie in the punctured unit ball")
    delta = 1.0 - r
    if (r + c * delta) ** 2 + (n - 1) * c**2 * delta >= 1.0:
        raise GeometryError(f"polydisc P_c(z) with c={c!r} leaves the ball")
    U = householder_frames(z / r)
    radii = np.array([c * delta] + [c * math.sqrt(delta)] * (n - 1))
    theta = np.exp(2j * np.pi * np.arange(points_per_angle) / points_per_angle)
    grid = np.array(list(itertools.product(theta, repeat=n))) * radii
    pts = z + grid @ U.T
    from .expr import eval_jet

    sup = float(np.max(np.abs(eval_jet(f, pts).value)))
    rot = eval_jet(f, z).grad @ U
    normal_lhs = float(abs(rot[0]))
    tangential_lhs = float(np.max(np.abs(rot[1:]))) if n > 1 else 0.0
    normal_rhs = sup / (c * delta)
    tangential_rhs = sup / (c * math.sqrt(delta)) if n > 1 else math.inf
    holds = (normal_lhs - normal_rhs <= tol * max(1.0, normal_rhs)) and \
            (n == 1 or tangential_lhs - tangential_rhs <= tol * max(1.0, tangential_rhs))
    return CauchyReport(c, delta, sup, normal_lhs, normal_rhs, tangential_lhs, tangential_rhs, bool(holds))
