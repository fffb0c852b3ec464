"""Grid proxies for the data of a bounded ``dbar``-solution theorem.

For ``G`` on the disk the relevant quantities are the Carleson norms of
``|G|^2 log(1/|z|) dA`` (``B1``) and ``|dG| log(1/|z|) dA`` (``B2``), and
``B3 = sup (1 - |z|^2)^2 |dG|``.  Carleson norms are approximated by the
maximum of ``mu(Q_I) / |I|`` over dyadic boundary boxes
``Q_I = {r e^{it}: t in I, 1 - r <= |I| / (2 pi)}`` down to the grid scale.
"""
from __future__ import annotations

import numpy as np

from .wirtinger import DiskGrid, GridFn, WExpr, grid_sample_many


def dyadic_carleson_proxy(density: np.ndarray, g: DiskGrid) -> float:
    """``max_I mu(Q_I)/|I|`` for ``mu = density dA`` sampled on ``g``."""
    mass = np.asarray(density, dtype=float) * g.areas
    depth = 1.0 - g.radii
    best = 0.0
    m = 1
    while m <= g.n_theta:
        h = 1.0 / m
        if h < g.dr:
            break
        rows = mass[depth <= h]
        if rows.size:
            # columns are angular cells; arcs of width n_theta/m cells
            per_col = rows.sum(axis=0)
            width = g.n_theta // m
            boxes = per_col[: width * m].reshape(m, width).sum(axis=1)
            best = max(best, float(boxes.max()) / (2 * np.pi / m))
        m *= 2
    return best


def wolff_proxies(v: GridFn) -> tuple[float, float, float]:
    """``(B1p, B2p, B3p)`` for sampled ``G`` with its ``d`` derivative."""
    if v.d is None:
        raise ValueError("need the d-derivative of G on the grid")
    g = v.grid
    r = np.abs(g.nodes)
    logw = np.log(1.0 / r)
    b1 = dyadic_carleson_proxy(np.abs(v.values) ** 2 * logw, g)
    b2 = dyadic_carleson_proxy(np.abs(v.d) * logw, g)
    b3 = float(np.max((1.0 - r**2) ** 2 * np.abs(v.d)))
    return b1, b2, b3


def wolff_data_estimates(G: WExpr, g: DiskGrid) -> tuple[float, float, float]:
    return wolff_proxies(grid_sample_many([G], g, derivs=True)[0])


def wolff_data_estimates_from_samples(sources, data, g: DiskGrid) -> dict:
    """Largest proxies over all correction data (sampled here if needed)."""
    if sources is None or any(s.d is None for s in sources):
        sources = grid_sample_many([e for _, _, e in data.items()], g, derivs=True)
    if not sources:
        return {"B1p": 0.0, "B2p": 0.0, "B3p": 0.0}
    vals = np.array([wolff_proxies(s) for s in sources])
    return {"B1p": float(vals[:, 0].max()), "B2p": float(vals[:, 1].max()), "B3p": float(vals[:, 2].max())}
