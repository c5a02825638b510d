"""Complex scalars, Hermitian geometry, the Riemann sphere, and first-order jets.

Points of C^n are 1-D ``complex128`` numpy arrays; batches of points are arrays
of shape ``(m, n)``.  Extended complex values are Python ``complex`` numbers or
the singleton :data:`INF`.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, PoleError

__all__ = [
    "INF",
    "Jet",
    "as_cvec",
    "chordal_distance",
    "chordal_distance_projective",
    "hermitian_inner",
    "is_inf",
    "norm",
]


class _ComplexInfinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_ComplexInfinity, ())


INF = _ComplexInfinity()


def is_inf(a) -> bool:
    return a is INF


def as_cvec(z) -> np.ndarray:
    """Coerce to a complex array whose last axis indexes coordinates."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    return z


def hermitian_inner(u, v):
    """Return ``sum_j u_j * conj(v_j)`` over the last axis."""
    u = as_cvec(u)
    v = as_cvec(v)
    if u.shape[-1] != v.shape[-1]:
        raise DimensionError(f"length mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return np.sum(u * np.conj(v), axis=-1)


def norm(z):
    z = as_cvec(z)
    return np.sqrt(np.sum(z.real**2 + z.imag**2, axis=-1))


def chordal_distance(a, b) -> float:
    """Chordal distance on the Riemann sphere, normalised so antipodes are at 1."""
    if a is INF and b is INF:
        return 0.0
    if a is INF:
        a, b = b, a
    if b is INF:
        return float(1.0 / np.sqrt(1.0 + abs(a) ** 2))
    a = complex(a)
    b = complex(b)
    return float(abs(a - b) / np.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2)))


def chordal_distance_projective(na, da, nb, db):
    """Chordal distance between ``na/da`` and ``nb/db`` given as homogeneous pairs.

    Vectorised; a vanishing denominator encodes infinity.
    """
    na, da, nb, db = (np.asarray(x, dtype=complex) for x in (na, da, nb, db))
    # rescale each pair to unit size so huge or tiny representatives do not overflow
    sa = np.hypot(np.abs(na), np.abs(da))
    sb = np.hypot(np.abs(nb), np.abs(db))
    na, da, nb, db = na / sa, da / sa, nb / sb, db / sb
    return np.abs(na * db - nb * da)


class Jet:
    """Value of a function together with its complex gradient.

    ``value`` has some batch shape ``S`` and ``grad`` has shape ``S + (n,)``.
    Arithmetic follows the exact first-order calculus rules.
    """

    __slots__ = ("value", "grad")
    __array_priority__ = 100

    def __init__(self, value, grad):
        self.value = np.asarray(value, dtype=complex)
        self.grad = np.asarray(grad, dtype=complex)

    @classmethod
    def constant(cls, c, n, shape=()):
        value = np.full(shape, complex(c))
        return cls(value, np.zeros(tuple(shape) + (n,), dtype=complex))

    @classmethod
    def variables(cls, z):
        """One jet per coordinate of ``z`` (shape ``S + (n,)``)."""
        z = as_cvec(z)
        n = z.shape[-1]
        eye = np.eye(n, dtype=complex)
        out = []
        for j in range(n):
            grad = np.broadcast_to(eye[j], z.shape).copy()
            out.append(cls(z[..., j], grad))
        return out

    @property
    def n(self):
        return self.grad.shape[-1]

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet(np.broadcast_to(np.asarray(other, dtype=complex), self.value.shape),
                   np.zeros_like(self.grad))

    def __add__(self, other):
        other = self._lift(other)
        return Jet(self.value + other.value, self.grad + other.grad)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return Jet(self.value - other.value, self.grad - other.grad)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet(-self.value, -self.grad)

    def __mul__(self, other):
        other = self._lift(other)
        return Jet(self.value * other.value,
                   self.value[..., None] * other.grad + other.value[..., None] * self.grad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if np.any(other.value == 0):
            raise PoleError("division by a jet with zero value")
        q = self.value / other.value
        grad = (self.grad - q[..., None] * other.grad) / other.value[..., None]
        return Jet(q, grad)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        k = int(k)
        if k == 0:
            return Jet(np.ones_like(self.value), np.zeros_like(self.grad))
        if k < 0:
            return 1.0 / (self ** (-k))
        value = self.value ** k
        grad = (k * self.value ** (k - 1))[..., None] * self.grad
        return Jet(value, grad)

    def exp(self):
        e = np.exp(self.value)
        return Jet(e, e[..., None] * self.grad)

    def sin(self):
        return Jet(np.sin(self.value), np.cos(self.value)[..., None] * self.grad)

    def cos(self):
        return Jet(np.cos(self.value), -np.sin(self.value)[..., None] * self.grad)

    def scaled(self, s):
        """Multiply value and gradient by a (broadcastable) scalar ``s``."""
        s = np.asarray(s)
        return Jet(self.value * s, self.grad * s[..., None])

    def __repr__(self):
        return f"Jet(value={self.value!r}, grad={self.grad!r})"
