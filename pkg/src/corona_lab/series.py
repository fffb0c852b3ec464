"""Truncated power series with complex (``CSeries``) or quaternion (``QSeries``) coefficients.

Products keep every coefficient (degree grows exactly) up to ``MAX_DEGREE``;
exceeding the cap is an error rather than a silent truncation.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .quat import Quaternion, qarr_mul

MAX_DEGREE = 512
DEFAULT_DEGREE = 8


class DegreeCapError(ValueError):
    pass


def _check_cap(deg: int, cap: int = MAX_DEGREE):
    if deg > cap:
        raise DegreeCapError(f"series degree {deg} exceeds cap {cap}")


class CSeries:
    """``sum_n a_n z^n`` with complex ``a_n`` (ascending order)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        _check_cap(c.size - 1)
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def const(cls, c) -> "CSeries":
        return cls([c])

    @classmethod
    def z(cls) -> "CSeries":
        return cls([0.0, 1.0])

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return c_eval(self, z)

    def __add__(self, other):
        return c_arith(self, _as_cseries(other), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return c_arith(self, _as_cseries(other), "sub")

    def __rsub__(self, other):
        return c_arith(_as_cseries(other), self, "sub")

    def __mul__(self, other):
        return c_arith(self, _as_cseries(other), "mul")

    __rmul__ = __mul__

    def __neg__(self):
        return CSeries(-self.coeffs)

    def hat(self) -> "CSeries":
        return c_hat(self)

    def derivative(self) -> "CSeries":
        return c_derivative(self)

    def trimmed(self, tol: float = 0.0) -> "CSeries":
        c = self.coeffs
        nz = np.nonzero(np.abs(c) > tol)[0]
        return CSeries(c[: nz[-1] + 1] if nz.size else c[:1] * 0)

    def allclose(self, other, tol: float = 1e-12) -> bool:
        a, b = _pad(self.coeffs, _as_cseries(other).coeffs)
        return bool(np.max(np.abs(a - b)) <= tol)

    def __repr__(self):
        return f"CSeries({np.array2string(self.coeffs, precision=6)})"


def _as_cseries(x) -> CSeries:
    if isinstance(x, CSeries):
        return x
    if np.isscalar(x):
        return CSeries.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a CSeries")


def _pad(a: np.ndarray, b: np.ndarray):
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def c_eval(p: CSeries, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z) + p.coeffs[-1]
    for a in p.coeffs[-2::-1]:
        acc = acc * z + a
    return acc[()] if acc.ndim == 0 else acc


def c_hat(p: CSeries) -> CSeries:
    """``p^(z) = conj(p(conj z))``, i.e. conjugated coefficients."""
    return CSeries(np.conj(p.coeffs))


def c_arith(p: CSeries, q: CSeries, op: str) -> CSeries:
    if op == "add":
        a, b = _pad(p.coeffs, q.coeffs)
        return CSeries(a + b)
    if op == "sub":
        a, b = _pad(p.coeffs, q.coeffs)
        return CSeries(a - b)
    if op == "mul":
        _check_cap(p.degree + q.degree)
        return CSeries(np.convolve(p.coeffs, q.coeffs))
    raise ValueError(f"unknown op {op!r}")


def c_derivative(p: CSeries) -> CSeries:
    if p.degree == 0:
        return CSeries([0.0])
    n = np.arange(1, p.coeffs.size)
    return CSeries(p.coeffs[1:] * n)


def series_fit_from_circle(samples, r0: float, M: int) -> CSeries:
    """Taylor coefficients ``c_0..c_M`` from values on ``|z| = r0``.

    Samples must sit at the equally spaced angles ``theta_k = 2 pi k / N``.
    ``c_m`` is the discrete mean of ``samples * exp(-i m theta)`` divided by
    ``r0**m``.
    """
    samples = np.asarray(samples, dtype=complex)
    N = samples.size
    if not 0.0 < r0 < 1.0:
        raise ValueError(f"fit radius must lie in (0, 1), got {r0}")
    if M < 0 or N < 4 * max(M, 1):
        raise ValueError(f"need at least 4*M = {4 * M} samples, got {N}")
    means = np.fft.fft(samples) / N
    m = np.arange(M + 1)
    return CSeries(means[: M + 1] / r0 ** m)


def circle_angles(N: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(N) / N


def sup_norm_estimate(p, ring: Sequence[float], n_samples: int) -> float:
    """Max of ``|p|`` over ``n_samples`` equally spaced points on each circle.

    ``p`` is a ``CSeries`` or any vectorised callable of a complex array.
    """
    f: Callable = p if callable(p) else (lambda z: c_eval(p, z))
    theta = circle_angles(n_samples)
    best = 0.0
    for r in ring:
        if not r < 1.0:
            raise ValueError("radii must be < 1")
        vals = np.asarray(f(r * np.exp(1j * theta)))
        best = max(best, float(np.max(np.abs(vals))))
    return best


def default_ring(r_max: float = 0.999, count: int = 24) -> list[float]:
    """Radii clustered toward ``r_max`` (where bounded data peaks)."""
    t = np.linspace(0.0, 1.0, count)
    return list(r_max * (1.0 - (1.0 - t) ** 2))


class QSeries:
    """``f(q) = sum_n q^n a_n`` with quaternion coefficients on the right."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        if isinstance(coeffs, QSeries):
            coeffs = coeffs.coeffs
        items = list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs
        arr = np.array([c.as_array() if isinstance(c, Quaternion) else c for c in items], dtype=float)
        if arr.ndim == 1 and arr.size == 0:
            arr = np.zeros((1, 4))
        if arr.ndim == 1:
            arr = np.array([[float(x), 0.0, 0.0, 0.0] for x in arr])
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValueError("QSeries coefficients must have shape (N+1, 4)")
        _check_cap(arr.shape[0] - 1)
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def const(cls, q) -> "QSeries":
        return cls([q if isinstance(q, Quaternion) else Quaternion(float(q))])

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def coeff(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.coeffs[n])

    def __call__(self, q):
        return q_eval(self, q)

    def __add__(self, other):
        a, b = _qpad(self.coeffs, _as_qseries(other).coeffs)
        return QSeries(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = _qpad(self.coeffs, _as_qseries(other).coeffs)
        return QSeries(a - b)

    def __rsub__(self, other):
        return _as_qseries(other) - self

    def __neg__(self):
        return QSeries(-self.coeffs)

    def right_mul(self, c: Quaternion) -> "QSeries":
        """Coefficientwise ``a_n c`` (the series ``f(q) c``)."""
        return QSeries(qarr_mul(self.coeffs, c.as_array()))

    def left_const_mul(self, c: Quaternion) -> "QSeries":
        """Coefficientwise ``c a_n``; equals ``c * f`` in the star sense."""
        return QSeries(qarr_mul(c.as_array(), self.coeffs))

    def allclose(self, other, tol: float = 1e-12) -> bool:
        a, b = _qpad(self.coeffs, _as_qseries(other).coeffs)
        return bool(np.max(np.abs(a - b)) <= tol)

    def __repr__(self):
        return f"QSeries(degree={self.degree}, coeffs={self.coeffs.tolist()})"


def _as_qseries(x) -> QSeries:
    if isinstance(x, QSeries):
        return x
    if isinstance(x, Quaternion) or np.isscalar(x):
        return QSeries.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a QSeries")


def _qpad(a: np.ndarray, b: np.ndarray):
    n = max(a.shape[0], b.shape[0])
    return (np.pad(a, ((0, n - a.shape[0]), (0, 0))), np.pad(b, ((0, n - b.shape[0]), (0, 0))))


def q_eval(f: QSeries, q):
    """Evaluate ``sum q^n a_n`` at a ``Quaternion`` or an ``(..., 4)`` array."""
    scalar = isinstance(q, Quaternion)
    qa = q.as_array() if scalar else np.asarray(q, dtype=float)
    acc = np.broadcast_to(f.coeffs[-1], qa.shape).copy()
    for a in f.coeffs[-2::-1]:
        acc = qarr_mul(qa, acc) + a
    return Quaternion.from_array(acc) if scalar else acc
