"""Calculus of slice-regular power series ``f(q) = sum q^n a_n``.

Star product, regular conjugate, symmetrization, star inverse, and the
splitting of a series on a slice ``C_I`` into two complex series
(``f_I = F + G J``) together with the representation formula that extends
slice values to the whole ball.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .quat import ImUnit, Quaternion, qarr_conj, qarr_inv, qarr_mul, qarr_norm
from .series import MAX_DEGREE, CSeries, DegreeCapError, QSeries, q_eval
from .wirtinger import DiskGrid, grid_minimum

POINTWISE_ZERO = 1e-14
SYM_IMAG_TOL = 1e-9
INVERSE_THRESHOLD = 1e-6


class VanishingSymmetrization(ArithmeticError):
    pass


def star_product(f: QSeries, g: QSeries) -> QSeries:
    """Cauchy product ``c_n = sum_k a_k b_{n-k}`` (quaternion order kept)."""
    a, b = f.coeffs, g.coeffs
    deg = a.shape[0] + b.shape[0] - 2
    if deg > MAX_DEGREE:
        raise DegreeCapError(f"series degree {deg} exceeds cap {MAX_DEGREE}")
    prod = qarr_mul(a[:, None, :], b[None, :, :])
    out = np.zeros((deg + 1, 4))
    for k in range(a.shape[0]):
        out[k : k + b.shape[0]] += prod[k]
    return QSeries(out)


def star_product_pointwise(f: QSeries, g: QSeries, q):
    """``f(q) g(f(q)^{-1} q f(q))``, and ``0`` where ``f(q) = 0``.

    ``q`` is a ``Quaternion`` or an ``(..., 4)`` array.
    """
    scalar = isinstance(q, Quaternion)
    qa = q.as_array() if scalar else np.asarray(q, dtype=float)
    fq = q_eval(f, qa)
    nz = qarr_norm(fq) >= POINTWISE_ZERO
    safe = np.where(nz[..., None], fq, np.array([1.0, 0.0, 0.0, 0.0]))
    moved = qarr_mul(qarr_mul(qarr_inv(safe), qa), safe)
    out = np.where(nz[..., None], qarr_mul(safe, q_eval(g, moved)), 0.0)
    return Quaternion.from_array(out) if scalar else out


def regular_conjugate(f: QSeries) -> QSeries:
    return QSeries(qarr_conj(f.coeffs))


def symmetrization(f: QSeries) -> CSeries:
    """``f * f^c`` as a real-coefficient series."""
    s = star_product(f, regular_conjugate(f)).coeffs
    resid = float(np.max(np.abs(s[:, 1:]))) if s.size else 0.0
    if resid > SYM_IMAG_TOL:
        raise ArithmeticError(f"symmetrization has imaginary residue {resid:.2e}")
    return CSeries(s[:, 0].astype(complex))


def real_series_reciprocal(c: np.ndarray, M: int) -> np.ndarray:
    """First ``M + 1`` coefficients of ``1 / sum c_n x^n`` (``c_0 != 0``)."""
    c = np.asarray(c, dtype=float)
    if c[0] == 0.0:
        raise ZeroDivisionError("reciprocal of a series vanishing at 0")
    b = np.zeros(M + 1)
    b[0] = 1.0 / c[0]
    for m in range(1, M + 1):
        k = np.arange(1, min(m, c.size - 1) + 1)
        b[m] = -np.dot(c[k], b[m - k]) / c[0]
    return b


def symmetrization_min(fs: CSeries, grid: DiskGrid | None = None) -> float:
    """``min |f^s|`` over a polar grid of the unit disk (plus the centre, refined locally)."""
    g = grid or DiskGrid(64, 256, 0.995)
    return grid_minimum(lambda z: np.abs(fs(z)), g)


def star_inverse(f: QSeries, M: int, grid: DiskGrid | None = None, threshold: float = INVERSE_THRESHOLD) -> QSeries:
    """Truncation to degree ``M`` of ``f^{-*} = (f^s)^{-1} f^c``.

    ``f^s`` has real coefficients, so on every slice ``|f^s(q)| = |f^s(z)|``
    and scanning a complex grid detects zeros of ``f`` anywhere in the ball.
    """
    fs = symmetrization(f)
    m = symmetrization_min(fs, grid)
    if m < threshold:
        raise VanishingSymmetrization(f"vanishing symmetrization: min |f^s| = {m:.3e} < {threshold:g}")
    inv = real_series_reciprocal(fs.coeffs.real, M)
    fc = regular_conjugate(f).coeffs
    out = np.zeros((M + 1, 4))
    for k in range(min(fc.shape[0], M + 1)):
        out[k:] += fc[k][None, :] * inv[: M + 1 - k, None]
    return QSeries(out)


# --- splitting -----------------------------------------------------------------------

ORTHO_TOL = 1e-12


def _frame(I: ImUnit, J: ImUnit) -> np.ndarray:
    if abs(float(np.dot(I.vec(), J.vec()))) > ORTHO_TOL:
        raise ValueError("split needs J orthogonal to I")
    K = qarr_mul(I.u.as_array(), J.u.as_array())
    return np.array([[1.0, 0.0, 0.0, 0.0], I.u.as_array(), J.u.as_array(), K])


def split(f: QSeries, I: ImUnit, J: ImUnit) -> tuple[CSeries, CSeries]:
    """``a_n = alpha_n + beta_n J`` with ``alpha_n, beta_n`` in ``C_I``.

    Complex numbers represent ``C_I`` via ``x + i y <-> x + y I``.
    """
    B = _frame(I, J)
    c = f.coeffs @ B.T  # components in the basis 1, I, J, IJ
    return CSeries(c[:, 0] + 1j * c[:, 1]), CSeries(c[:, 2] + 1j * c[:, 3])


def reassemble(F: CSeries, G: CSeries, I: ImUnit, J: ImUnit) -> QSeries:
    """Inverse of ``split``: coefficients ``alpha + beta J``."""
    B = _frame(I, J)
    n = max(F.coeffs.size, G.coeffs.size)
    a = np.pad(F.coeffs, (0, n - F.coeffs.size))
    b = np.pad(G.coeffs, (0, n - G.coeffs.size))
    comps = np.stack([a.real, a.imag, b.real, b.imag], axis=1)
    return QSeries(comps @ B)


def slice_value(F: CSeries, G: CSeries, I: ImUnit, J: ImUnit, z) -> np.ndarray:
    """``F(z) + G(z) J`` as quaternion arrays, ``z = x + i y`` read as ``x + y I``."""
    B = _frame(I, J)
    z = np.asarray(z, dtype=complex)
    a, b = F(z), G(z)
    comps = np.stack([np.real(a), np.imag(a), np.real(b), np.imag(b)], axis=-1)
    return comps @ B


def extend_representation(f_I: Callable, I: ImUnit, L: ImUnit, x: float, y: float) -> Quaternion:
    """Value at ``x + y L`` from the slice function ``f_I``.

    ``f_I(z)`` returns the quaternion value at ``Re z + Im z * I``.
    """
    fp = Quaternion.from_array(np.asarray(f_I(complex(x, y)), dtype=float))
    fm = Quaternion.from_array(np.asarray(f_I(complex(x, -y)), dtype=float))
    return (fp + fm) * 0.5 + L.u * (I.u * ((fm - fp) * 0.5))


def split_star_law(F1: CSeries, G1: CSeries, F2: CSeries, G2: CSeries) -> tuple[CSeries, CSeries]:
    """Split of ``(F1 + G1 J) * (F2 + G2 J)``: ``(F1 F2 - G1 G2^, F1 G2 + G1 F2^)``."""
    return F1 * F2 - G1 * G2.hat(), F1 * G2 + G1 * F2.hat()


# --- norms ----------------------------------------------------------------------------

def sphere_points(radius: float, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic ``(count, 4)`` points on the sphere ``|q| = radius``."""
    v = np.random.default_rng(seed).normal(size=(count, 4))
    return radius * v / np.linalg.norm(v, axis=1, keepdims=True)


def slice_sphere_max(f: QSeries, z) -> np.ndarray:
    """``max_{I} |f(x + y I)|`` for each ``z = x + i y``.

    Writing ``q^n = u_n + I v_n`` gives ``f(x + yI) = A + I B`` with
    quaternions ``A = sum u_n a_n``, ``B = sum v_n a_n`` independent of ``I``;
    then ``|A + I B|^2 = |A|^2 + |B|^2 + 2 Re(I B conj(A))`` and the maximum
    over unit ``I`` replaces the last term by ``2 |Im(B conj(A))|``.
    """
    z = np.asarray(z, dtype=complex)
    pw = z[..., None] ** np.arange(f.coeffs.shape[0])
    A = np.real(pw) @ f.coeffs
    B = np.imag(pw) @ f.coeffs
    w = qarr_mul(B, qarr_conj(A))
    tot = np.sum(A**2, axis=-1) + np.sum(B**2, axis=-1) + 2 * np.linalg.norm(w[..., 1:], axis=-1)
    return np.sqrt(np.maximum(tot, 0.0))


def q_sup_norm(f: QSeries, ring: Sequence[float] = (0.9, 0.99, 0.999), count: int = 2048) -> float:
    """Max ``|f(q)|`` over the spheres ``|q| = r`` for ``r`` in ``ring``.

    Each sphere is covered exactly in the slice direction (``slice_sphere_max``)
    and sampled at ``count`` angles ``0..pi`` in the ``(x, y)`` half-plane.
    """
    t = np.linspace(0.0, np.pi, count)
    best = 0.0
    for r in ring:
        if not r < 1.0:
            raise ValueError("radii must be < 1")
        best = max(best, float(np.max(slice_sphere_max(f, r * np.exp(1j * t)))))
    return best
