"""Domains with C^2 boundary, adapted frames, and boundary distance surrogates.

Conventions
-----------
A boundary frame at ``xi`` is a unitary matrix ``U`` whose first column is the
outward unit normal ``nu``; the remaining columns span the complex tangent
space.  *Vertex coordinates* of a point ``z`` are ``u = V^H (z - xi)`` where
``V`` is ``U`` with its first column negated, so that the inner normal is the
positive ``x1`` axis and ``D`` is locally ``{x1 > psi(zeta)}`` with
``zeta = (y1, x2, y2, ..., xn, yn)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import optimize

from .cplx import as_cvec, hermitian_inner
from .errors import DimensionError, GeometryError

__all__ = [
    "BoundaryFrame",
    "Domain",
    "Ellipsoid",
    "GraphDomain",
    "RealCoords",
    "UnitBall",
    "boundary_frame",
    "delta_xi",
    "from_real",
    "graph_d",
    "householder_frames",
    "nearest_boundary_point",
    "project_complex_normal",
    "real_coords",
    "to_real",
]


def to_real(z):
    """Interleave real and imaginary parts: ``(x1, y1, x2, y2, ...)``."""
    z = as_cvec(z)
    return np.stack([z.real, z.imag], axis=-1).reshape(z.shape[:-1] + (2 * z.shape[-1],))


def from_real(r):
    r = np.asarray(r, dtype=float)
    pairs = r.reshape(r.shape[:-1] + (r.shape[-1] // 2, 2))
    return pairs[..., 0] + 1j * pairs[..., 1]


@dataclass(frozen=True)
class RealCoords:
    """A point of C^n as ``(x1, zeta)`` with ``zeta`` in R^(2n-1)."""

    x1: float
    zeta: np.ndarray

    @classmethod
    def from_cvec(cls, z):
        r = to_real(z)
        return cls(float(r[0]), r[1:].copy())

    def to_cvec(self):
        return from_real(np.concatenate([[self.x1], self.zeta]))


def _unit_phase(x):
    ax = np.abs(x)
    return np.where(ax > 0, x / np.where(ax > 0, ax, 1.0), 1.0)


def householder_frames(nu):
    """Unitary frames with first column ``nu`` (batched over leading axes).

    The tangential columns come from the Householder reflection sending ``e1``
    to ``nu`` with its first entry rotated real; each tangential column is then
    re-phased so its diagonal entry is real and non-negative.
    """
    nu = as_cvec(nu)
    n = nu.shape[-1]
    phase = _unit_phase(nu[..., 0])
    nup = nu * np.conj(phase)[..., None]
    # w = e1 - nup with 1 - |nu_1| written as |nu_tan|^2 / (1 + |nu_1|) to avoid cancellation
    tan2 = np.sum(np.abs(nup[..., 1:]) ** 2, axis=-1)
    w = -nup.copy()
    w[..., 0] = tan2 / (1.0 + nup[..., 0].real)
    ww = np.sum(np.abs(w) ** 2, axis=-1)
    eye = np.broadcast_to(np.eye(n, dtype=complex), nu.shape[:-1] + (n, n))
    safe = np.where(ww > 1e-300, ww, 1.0)
    H = eye - 2.0 * w[..., :, None] * np.conj(w)[..., None, :] / safe[..., None, None]
    H = np.where((ww > 1e-300)[..., None, None], H, eye)
    U = H.copy()
    U[..., :, 0] = nu
    if n > 1:
        diag = np.diagonal(U, axis1=-2, axis2=-1)[..., 1:]
        U[..., :, 1:] = U[..., :, 1:] * np.conj(_unit_phase(diag))[..., None, :]
    return U


@dataclass(frozen=True)
class BoundaryFrame:
    vertex: np.ndarray
    normal: np.ndarray
    matrix: np.ndarray

    @cached_property
    def inner_basis(self):
        V = self.matrix.copy()
        V[:, 0] = -V[:, 0]
        return V

    @property
    def dim(self):
        return self.vertex.shape[-1]

    def to_vertex(self, z):
        """Vertex coordinates ``V^H (z - xi)``."""
        return (as_cvec(z) - self.vertex) @ np.conj(self.inner_basis)

    def from_vertex(self, u):
        return self.vertex + as_cvec(u) @ self.inner_basis.T

    def rephased(self, phases):
        """Same frame with tangential columns multiplied by unit phases."""
        U = self.matrix.copy()
        U[:, 1:] = U[:, 1:] * np.asarray(phases)[None, :]
        return BoundaryFrame(self.vertex, self.normal, U)


def split_vertex(u):
    """``(x1, zeta)`` arrays from vertex coordinates."""
    r = to_real(u)
    return r[..., 0], r[..., 1:]


def _zeta_to_u(zeta, x1=0.0):
    n = (zeta.shape[-1] + 1) // 2
    r = np.concatenate([np.broadcast_to(np.asarray(x1, float), zeta.shape[:-1])[..., None], zeta], axis=-1)
    return from_real(r).reshape(zeta.shape[:-1] + (n,))


class Domain:
    """Base class; subclasses provide the defining function and its gradient."""

    dim: int
    curvature_bound: float
    label: str

    @property
    def chart_radius(self) -> float:
        if self.curvature_bound <= 0:
            return float("inf")
        return 0.5 / self.curvature_bound

    def _check(self, z):
        z = as_cvec(z)
        if z.shape[-1] != self.dim:
            raise DimensionError(f"point has {z.shape[-1]} coordinates, domain dimension is {self.dim}")
        return z

    def defining(self, z):
        raise NotImplementedError

    def outward_gradient(self, z):
        """Real gradient of the defining function packed as ``d/dx_j + i d/dy_j``."""
        raise NotImplementedError

    def real_hessian(self, r, h=1e-6):
        """Hessian of the defining function by central differences; batched over ``r``."""
        r = np.asarray(r, dtype=float)
        n2 = r.shape[-1]
        H = np.empty(r.shape + (n2,))
        for k in range(n2):
            e = np.zeros(n2)
            e[k] = h
            gp = to_real(self.outward_gradient(from_real(r + e)))
            gm = to_real(self.outward_gradient(from_real(r - e)))
            H[..., :, k] = (gp - gm) / (2 * h)
        return 0.5 * (H + np.swapaxes(H, -1, -2))

    def contains(self, z):
        return self.defining(self._check(z)) < 0

    def initial_projection(self, z):
        raise NotImplementedError

    def nearest_boundary_point(self, z):
        z = self._check(z)
        single = z.ndim == 1
        zb = z.reshape(-1, self.dim)
        p = to_real(zb)
        x0 = to_real(self.initial_projection(zb))
        x, ok, info = self._lagrange_newton(p, x0)
        bound = np.linalg.norm(p - x0, axis=-1)
        redo = ~ok | (np.linalg.norm(p - x, axis=-1) > bound * (1 + 1e-9) + 1e-15)
        for k in np.nonzero(redo)[0]:
            xk, okk, info2 = self._fallback_projection(p[k], x0[k])
            if not okk:
                raise GeometryError(f"boundary projection did not converge at z={zb[k]!r} ({info}; fallback: {info2})")
            x[k] = xk
        xi = from_real(x)
        dist = np.linalg.norm(p - x, axis=-1)
        if single:
            return xi[0], float(dist[0])
        return xi.reshape(z.shape), dist.reshape(z.shape[:-1])

    def _lagrange_newton(self, p, x0, max_iter=50):
        """Damped Newton on the Lagrange system, vectorised over rows of ``p``."""

        def residual(x, lam, q):
            g = to_real(self.outward_gradient(from_real(x)))
            rho = np.asarray(self.defining(from_real(x)), dtype=float)
            return np.concatenate([x - q - lam[:, None] * g, rho[:, None]], axis=-1), g

        m, n2 = p.shape
        x = x0.copy()
        g = to_real(self.outward_gradient(from_real(x)))
        lam = np.sum((x - p) * g, axis=-1) / np.maximum(np.sum(g * g, axis=-1), 1e-300)
        F, g = residual(x, lam, p)
        scale = 1.0 + np.linalg.norm(p, axis=-1)
        active = np.ones(m, dtype=bool)
        for it in range(max_iter):
            norm_f = np.linalg.norm(F, axis=-1)
            active &= ~(norm_f < 1e-14 * scale)
            if not active.any():
                break
            a = np.nonzero(active)[0]
            H = np.broadcast_to(self.real_hessian(x[a]), (len(a), n2, n2))
            J = np.zeros((len(a), n2 + 1, n2 + 1))
            J[:, :n2, :n2] = np.eye(n2) - lam[a, None, None] * H
            J[:, :n2, n2] = -g[a]
            J[:, n2, :n2] = g[a]
            try:
                step = np.linalg.solve(J, -F[a][..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.stack([np.linalg.lstsq(Jk, -Fk, rcond=None)[0] for Jk, Fk in zip(J, F[a])])
            t = np.ones(len(a))
            pending = np.ones(len(a), dtype=bool)
            xn, ln = x[a].copy(), lam[a].copy()
            Fn, gn = F[a].copy(), g[a].copy()
            while pending.any():
                xt = x[a] + t[:, None] * step[:, :n2]
                lt = lam[a] + t * step[:, n2]
                Ft, gt = residual(xt, lt, p[a])
                accept = pending & ((np.linalg.norm(Ft, axis=-1) < norm_f[a]) | (t < 1e-8))
                xn[accept], ln[accept], Fn[accept], gn[accept] = xt[accept], lt[accept], Ft[accept], gt[accept]
                pending &= ~accept
                t = np.where(pending, 0.5 * t, t)
            x[a], lam[a], F[a], g[a] = xn, ln, Fn, gn
            stalled = np.linalg.norm(t[:, None] * step, axis=-1) < 1e-16 * scale[a]
            active[a[stalled]] = False
        res = np.linalg.norm(F, axis=-1)
        ok = res < 1e-11 * scale
        return x, ok, f"newton residual up to {res.max():.3e}"

    def _fallback_projection(self, p, x0):
        return x0, False, "no fallback for this domain"

    def boundary_distance(self, z):
        return self.nearest_boundary_point(z)[1]

    def chart_psi(self, frame, zeta):
        """Boundary height ``psi(zeta)`` in the vertex chart; NaN outside the chart."""
        zeta = np.asarray(zeta, dtype=float)
        flat_z = zeta.reshape(-1, zeta.shape[-1])
        flat_o = np.full(len(flat_z), np.nan)
        R = self.chart_radius
        for k, zt in enumerate(flat_z):
            if np.linalg.norm(zt) >= R:
                continue
            q = frame.from_vertex(_zeta_to_u(zt))

            def rho(x):
                return float(self.defining(q + x * frame.inner_basis[:, 0]))

            span = max(1e-3, 2 * np.linalg.norm(zt))
            try:
                lo, hi = -span, span
                while rho(lo) * rho(hi) > 0 and span < 4 * min(R, 10.0):
                    span *= 2
                    lo, hi = -span, span
                flat_o[k] = optimize.brentq(rho, lo, hi, xtol=1e-16, rtol=1e-15)
            except ValueError:
                continue
        return flat_o.reshape(zeta.shape[:-1])


class Ellipsoid(Domain):
    """Axis-aligned complex ellipsoid ``sum |z_j|^2 / a_j^2 < 1``."""

    def __init__(self, semi_axes):
        self.axes = np.asarray(semi_axes, dtype=float)
        if self.axes.ndim != 1 or np.any(self.axes <= 0):
            raise GeometryError("semi-axes must be positive")
        self.dim = len(self.axes)
        self.curvature_bound = float(self.axes.max() / self.axes.min() ** 2)
        self.label = "ellipsoid:" + ",".join(repr(float(a)) for a in self.axes)
        self._w = 1.0 / self.axes**2

    def defining(self, z):
        z = as_cvec(z)
        return np.sum(np.abs(z) ** 2 * self._w, axis=-1) - 1.0

    def outward_gradient(self, z):
        return 2.0 * as_cvec(z) * self._w

    def real_hessian(self, r, h=None):
        H = np.diag(np.repeat(2.0 * self._w, 2))
        return np.broadcast_to(H, np.shape(r)[:-1] + H.shape)

    def initial_projection(self, z):
        s = np.sqrt(self.defining(z) + 1.0)
        if np.any(s == 0):
            raise GeometryError("nearest boundary point is not unique at the centre")
        return z / np.asarray(s)[..., None]

    def nearest_boundary_point(self, z):
        """Global minimiser via the monotone secular equation in the multiplier."""
        z = self._check(z)
        single = z.ndim == 1
        p = to_real(z.reshape(-1, self.dim))
        w = np.repeat(self._w, 2)
        wmax = w.max()
        pole = 0.5 / wmax

        def g(lam):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.sum(w * p**2 / (1 - 2 * lam[:, None] * w) ** 2, axis=-1) - 1.0

        # bracket: g(lo) <= 0 <= g(hi) on (-inf, pole)
        lo = np.full(len(p), -1.0)
        while np.any(g(lo) > 0):
            lo = np.where(g(lo) > 0, 2 * lo, lo)
        hi = np.full(len(p), pole)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            up = g(mid) >= 0
            hi = np.where(up, mid, hi)
            lo = np.where(up, lo, mid)
        lam = 0.5 * (lo + hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = p / (1 - 2 * lam[:, None] * w)
        # medial-axis case: the root sits at the pole and the widest directions are free
        top = np.isclose(w, wmax, rtol=1e-14)
        degenerate = (pole - lam < 1e-12 * pole) & (g(np.minimum(lam, pole * (1 - 1e-15))) < -1e-9)
        for k in np.nonzero(degenerate | ~np.all(np.isfinite(x), axis=-1))[0]:
            with np.errstate(divide="ignore", invalid="ignore"):
                xk = np.where(top, 0.0, p[k] / (1 - w / wmax))
            rest = 1.0 - np.sum(w * xk**2)
            dirn = np.where(top, p[k], 0.0)
            if np.linalg.norm(dirn) == 0:
                dirn = top / np.linalg.norm(top.astype(float))
            dirn = dirn / np.linalg.norm(dirn)
            xk = xk + np.sqrt(max(rest, 0.0) / wmax) * dirn
            x[k] = xk
        dist = np.linalg.norm(p - x, axis=-1)
        xi = from_real(x)
        if single:
            return xi[0], float(dist[0])
        return xi.reshape(z.shape), dist.reshape(z.shape[:-1])

    def chart_psi(self, frame, zeta):
        zeta = np.asarray(zeta, dtype=float)
        q = frame.from_vertex(_zeta_to_u(zeta))
        w = frame.inner_basis[:, 0]
        A = np.sum(np.abs(w) ** 2 * self._w)
        B = 2.0 * np.real(np.sum(np.conj(q) * w * self._w, axis=-1))
        C = np.sum(np.abs(q) ** 2 * self._w, axis=-1) - 1.0
        disc = B * B - 4 * A * C
        with np.errstate(invalid="ignore", divide="ignore"):
            qq = -0.5 * (B + np.where(B >= 0, 1.0, -1.0) * np.sqrt(disc))
            x = np.where(qq != 0, C / np.where(qq != 0, qq, 1.0), 0.0)
        bad = (disc < 0) | (np.linalg.norm(zeta, axis=-1) >= self.chart_radius)
        return np.where(bad, np.nan, x)

    def __repr__(self):
        return f"Ellipsoid({self.axes.tolist()})"


class UnitBall(Ellipsoid):
    def __init__(self, n: int):
        if n < 1:
            raise DimensionError("ball dimension must be >= 1")
        super().__init__(np.ones(n))
        self.label = f"ball:{n}"

    def nearest_boundary_point(self, z):
        z = self._check(z)
        r = np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))
        if np.any(r == 0):
            raise GeometryError("nearest boundary point is not unique at the centre")
        xi = z / r[..., None]
        delta = 1.0 - r
        if z.ndim == 1:
            return xi, float(delta)
        return xi, delta

    def boundary_distance(self, z):
        z = self._check(z)
        return 1.0 - np.sqrt(np.sum(np.abs(z) ** 2, axis=-1))

    def __repr__(self):
        return f"UnitBall({self.dim})"


class GraphDomain(Domain):
    """Local graph domain ``{x1 > psi(zeta)}`` with ``psi(0) = 0``, ``grad psi(0) = 0``.

    ``psi`` and ``psi_grad`` act on arrays of shape ``(..., 2n-1)``.
    """

    def __init__(self, n, psi, psi_grad, curvature_bound=None, label="graph"):
        self.dim = int(n)
        self.psi = psi
        self.psi_grad = psi_grad
        self.label = label
        z0 = np.zeros(2 * self.dim - 1)
        if abs(float(psi(z0))) > 1e-12 or np.max(np.abs(psi_grad(z0))) > 1e-12:
            raise GeometryError("graph function must satisfy psi(0) = 0 and grad psi(0) = 0")
        if curvature_bound is None:
            curvature_bound = self._estimate_curvature()
        self.curvature_bound = float(curvature_bound)

    def _estimate_curvature(self, radius=0.25, count=64, h=1e-5):
        rng = np.random.default_rng(0)
        m = 2 * self.dim - 1
        pts = rng.normal(size=(count, m))
        pts *= radius * rng.uniform(size=(count, 1)) / np.linalg.norm(pts, axis=1, keepdims=True)
        pts = np.vstack([np.zeros(m), pts])
        K = 0.0
        for p in pts:
            Hm = np.empty((m, m))
            for k in range(m):
                e = np.zeros(m)
                e[k] = h
                Hm[:, k] = (self.psi_grad(p + e) - self.psi_grad(p - e)) / (2 * h)
            K = max(K, float(np.linalg.norm(0.5 * (Hm + Hm.T), 2)))
        return K

    def defining(self, z):
        r = to_real(as_cvec(z))
        return self.psi(r[..., 1:]) - r[..., 0]

    def outward_gradient(self, z):
        r = to_real(as_cvec(z))
        g = np.concatenate([-np.ones(r.shape[:-1] + (1,)), self.psi_grad(r[..., 1:])], axis=-1)
        return from_real(g)

    def initial_projection(self, z):
        r0 = to_real(z).copy()
        r0[..., 0] = self.psi(r0[..., 1:])
        return from_real(r0)

    def _fallback_projection(self, p, x0, max_iter=500):
        x1, zeta = p[0], p[1:]

        def F(eta):
            return (x1 - self.psi(eta)) ** 2 + np.sum((eta - zeta) ** 2)

        def gradF(eta):
            return -2 * (x1 - self.psi(eta)) * self.psi_grad(eta) + 2 * (eta - zeta)

        eta = x0[1:].copy()
        for it in range(max_iter):
            g = gradF(eta)
            gn = np.linalg.norm(g)
            if gn < 1e-13:
                break
            d = -g / gn
            res = optimize.minimize_scalar(lambda s: F(eta + s * d), bracket=(0.0, 1e-3 * (1 + gn)),
                                           method="golden", tol=1e-12)
            eta = eta + res.x * d
        ok = np.linalg.norm(gradF(eta)) < 1e-9
        x = np.concatenate([[float(self.psi(eta))], eta])
        return x, ok, f"golden-section descent, |grad|={np.linalg.norm(gradF(eta)):.2e}"

    def chart_psi(self, frame, zeta):
        if np.allclose(frame.vertex, 0, atol=1e-14) and np.allclose(frame.inner_basis, np.eye(self.dim), atol=1e-14):
            zeta = np.asarray(zeta, dtype=float)
            out = np.asarray(self.psi(zeta), dtype=float)
            return np.where(np.linalg.norm(zeta, axis=-1) >= self.chart_radius, np.nan, out)
        return super().chart_psi(frame, zeta)

    def __repr__(self):
        return f"GraphDomain({self.dim}, {self.label})"

    @classmethod
    def paraboloid(cls, n=2, a=0.25):
        """``psi(zeta) = a |zeta|^2``."""
        return cls(n, lambda s: a * np.sum(np.asarray(s) ** 2, axis=-1),
                   lambda s: 2 * a * np.asarray(s, dtype=float), curvature_bound=2 * a,
                   label=f"paraboloid({a!r})")

    @classmethod
    def flat(cls, n=2):
        return cls(n, lambda s: np.zeros(np.shape(s)[:-1]), lambda s: np.zeros(np.shape(s)),
                   curvature_bound=0.0, label="flat")

    @classmethod
    def from_text(cls, src, n=2):
        """Graph function from real polynomial text in ``z1..z{2n-1}`` (the entries of zeta)."""
        from .expr import BinOp, Call, FnHandle, Imag, Pow, eval_jet, max_variable, parse

        m = 2 * n - 1
        expr = parse(src, m)

        def check(node):
            divides_by_variable = isinstance(node, BinOp) and node.op == "/" and max_variable(node.right) > 0
            if isinstance(node, (Imag, Call)) or divides_by_variable:
                raise GeometryError("graph function must be a real polynomial")
            if isinstance(node, Pow) and node.exponent < 0:
                raise GeometryError("graph function must be a real polynomial")
            for child in ("arg", "base", "left", "right"):
                if hasattr(node, child):
                    check(getattr(node, child))

        check(expr)
        f = FnHandle(expr, m)

        def psi(s):
            return eval_jet(f, np.asarray(s, dtype=complex)).value.real

        def grad(s):
            return eval_jet(f, np.asarray(s, dtype=complex)).grad.real

        return cls(n, psi, grad, label=f"graph:{src}")


# ------------------------------------------------------------------ operations


def nearest_boundary_point(D: Domain, z):
    """Closest boundary point and the distance ``delta(z)``."""
    return D.nearest_boundary_point(z)


def boundary_frame(D: Domain, xi, tol=1e-9) -> BoundaryFrame:
    xi = D._check(xi)
    if abs(float(D.defining(xi))) > tol:
        raise GeometryError(f"vertex {xi!r} is not on the boundary of {D!r}")
    g = D.outward_gradient(xi)
    gn = np.sqrt(np.sum(np.abs(g) ** 2))
    if gn == 0 or not np.isfinite(gn):
        raise GeometryError("degenerate normal: defining function has zero gradient")
    nu = g / gn
    return BoundaryFrame(xi, nu, householder_frames(nu))


def _frame(D, xi):
    return xi if isinstance(xi, BoundaryFrame) else boundary_frame(D, xi)


def delta_xi(D: Domain, xi, z):
    """``min(delta(z), distance to the real tangent plane at xi)``."""
    frame = _frame(D, xi)
    z = D._check(z)
    p = np.abs(np.real(hermitian_inner(z - frame.vertex, frame.normal)))
    delta = D.boundary_distance(z)
    out = np.minimum(delta, p)
    return float(out) if np.ndim(out) == 0 else out


def real_coords(frame: BoundaryFrame, z) -> RealCoords:
    return RealCoords.from_cvec(frame.to_vertex(z))


def graph_d(D: Domain, xi, z, strict=True):
    """``d(z) = min(x1, x1 - psi(zeta))`` in the vertex chart.

    Outside the chart a :class:`GeometryError` is raised, or NaN is returned
    when ``strict`` is false.
    """
    frame = _frame(D, xi)
    u = frame.to_vertex(D._check(z))
    x1, zeta = split_vertex(u)
    psi = D.chart_psi(frame, zeta)
    d = np.minimum(x1, x1 - psi)
    if strict and np.any(~np.isfinite(d)):
        raise GeometryError("point lies outside the chart at the vertex")
    return float(d) if np.ndim(d) == 0 else d


def project_complex_normal(frame: BoundaryFrame, z):
    """``xi + (z - xi, nu) nu``: projection onto the complex normal line through xi."""
    z = as_cvec(z)
    c = hermitian_inner(z - frame.vertex, frame.normal)
    return frame.vertex + np.asarray(c)[..., None] * frame.normal
