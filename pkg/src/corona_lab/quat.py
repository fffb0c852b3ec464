"""Quaternion arithmetic, imaginary units and slice coordinates.

Quaternions are stored as four doubles ``(x0, x1, x2, x3)`` meaning
``x0 + x1 e1 + x2 e2 + x3 e3`` with ``e1 e2 = e3``, ``e2 e3 = e1``,
``e3 e1 = e2``.  Array helpers at the bottom work on ``(..., 4)`` float
arrays and are what the series code uses internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Quaternion:
    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def real(cls, x: float) -> "Quaternion":
        return cls(float(x))

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def __iter__(self):
        return iter((self.x0, self.x1, self.x2, self.x3))

    def __add__(self, other):
        o = _coerce(other)
        return Quaternion(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return Quaternion(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.x0 * other, self.x1 * other, self.x2 * other, self.x3 * other)
        return q_mul(self, _coerce(other))

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return q_mul(_coerce(other), self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.x0 / other, self.x1 / other, self.x2 / other, self.x3 / other)
        inv = q_conj_norm_inv(_coerce(other))[2]
        if inv is None:
            raise ZeroDivisionError("quaternion division by zero")
        return self * inv

    def __rtruediv__(self, other):
        inv = q_conj_norm_inv(self)[2]
        if inv is None:
            raise ZeroDivisionError("quaternion division by zero")
        return _coerce(other) * inv

    def conj(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def norm(self) -> float:
        return math.sqrt(self.x0 ** 2 + self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2)

    def re(self) -> float:
        return self.x0

    def im(self) -> "Quaternion":
        return Quaternion(0.0, self.x1, self.x2, self.x3)

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return (self - _coerce(other)).norm() <= tol

    def __repr__(self):
        return f"Quaternion({self.x0!r}, {self.x1!r}, {self.x2!r}, {self.x3!r})"


def _coerce(x) -> Quaternion:
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float)):
        return Quaternion(float(x))
    raise TypeError(f"cannot use {type(x).__name__} as a quaternion")


E0 = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0)
E2 = Quaternion(0.0, 0.0, 1.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


def q_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a b``."""
    a0, a1, a2, a3 = a.x0, a.x1, a.x2, a.x3
    b0, b1, b2, b3 = b.x0, b.x1, b.x2, b.x3
    return Quaternion(
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def q_conj_norm_inv(q: Quaternion):
    """Return ``(conj, |q|, inverse)``; the inverse is ``None`` for ``q == 0``."""
    conj = q.conj()
    n2 = q.x0 ** 2 + q.x1 ** 2 + q.x2 ** 2 + q.x3 ** 2
    inv = None if n2 == 0.0 else conj / n2
    return conj, math.sqrt(n2), inv


@dataclass(frozen=True)
class ImUnit:
    """A purely imaginary unit quaternion (so ``u*u == -1``)."""

    u: Quaternion

    def __post_init__(self):
        if abs(self.u.x0) > 1e-12 or abs(self.u.norm() - 1.0) > 1e-12:
            raise ValueError(f"{self.u!r} is not an imaginary unit")

    def vec(self) -> np.ndarray:
        return np.array([self.u.x1, self.u.x2, self.u.x3])


def im_unit_of(q: Quaternion) -> ImUnit:
    """Normalised imaginary part of ``q``."""
    im = q.im()
    n = im.norm()
    if n == 0.0:
        raise ValueError("real input has no canonical imaginary unit")
    return ImUnit(im / n)


# seed vectors tried in order for Gram-Schmidt; first one not nearly parallel wins
_FRAME_SEEDS = (np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))


def orthonormal_frame(I: ImUnit) -> tuple[ImUnit, ImUnit]:
    """Deterministic ``(J, K)`` with ``J`` orthogonal to ``I`` and ``K = I J``."""
    v = I.vec()
    for seed in _FRAME_SEEDS:
        w = seed - np.dot(seed, v) * v
        if np.linalg.norm(w) > 0.5:
            break
    w = w / np.linalg.norm(w)
    J = ImUnit(Quaternion(0.0, *w))
    K = q_mul(I.u, J.u)
    # renormalise away roundoff so ImUnit validation never trips
    K = Quaternion(0.0, K.x1, K.x2, K.x3)
    return J, ImUnit(K / K.norm())


@dataclass(frozen=True)
class SlicePoint:
    """The point ``x + y I`` of the slice ``C_I``."""

    x: float
    y: float
    I: ImUnit

    def __post_init__(self):
        if self.y < 0:
            raise ValueError("slice coordinate y must be non-negative")

    def to_quaternion(self) -> Quaternion:
        return Quaternion(self.x) + self.I.u * self.y

    @classmethod
    def from_quaternion(cls, q: Quaternion, default: ImUnit | None = None) -> "SlicePoint":
        im = q.im()
        if im.norm() == 0.0:
            return cls(q.x0, 0.0, default if default is not None else ImUnit(E1))
        return cls(q.x0, im.norm(), im_unit_of(q))


# --- array helpers: quaternions as (..., 4) float arrays -----------------------

def qarr_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product of ``(..., 4)`` arrays."""
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qarr_conj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qarr_norm(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


def qarr_inv(a: np.ndarray) -> np.ndarray:
    n2 = np.sum(np.asarray(a, dtype=float) ** 2, axis=-1, keepdims=True)
    return qarr_conj(a) / n2


def random_quaternions(rng: np.random.Generator, size: int, max_norm: float = 1.0) -> np.ndarray:
    """Uniform samples from the ball ``|q| <= max_norm`` as an ``(size, 4)`` array."""
    v = rng.normal(size=(size, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = max_norm * rng.random(size) ** 0.25
    return v * r[:, None]
