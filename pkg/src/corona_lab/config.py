"""Run configuration shared by the solvers and the command line."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .wirtinger import DiskGrid


@dataclass(frozen=True)
class GridConfig:
    n_r: int = 64
    n_theta: int = 256
    r_max: float = 0.995

    def __post_init__(self):
        if not 0.0 < self.r_max < 1.0:
            raise ValueError("r_max must lie in (0, 1)")
        if self.n_r < 1 or self.n_theta < 2:
            raise ValueError("grid needs n_r >= 1 and n_theta >= 2")

    def grid(self) -> DiskGrid:
        return DiskGrid(self.n_r, self.n_theta, self.r_max)


@dataclass(frozen=True)
class FitConfig:
    """Taylor fit of holomorphic solutions from samples on ``|z| = radius``."""

    radius: float = 0.8
    degree: int = 64
    samples: int = 512

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise ValueError("fit radius must lie in (0, 1)")
        if self.degree < 1:
            raise ValueError("fit degree must be >= 1")
        if self.samples < 4 * self.degree:
            raise ValueError("need at least 4 * degree fit samples")


@dataclass(frozen=True)
class Tolerances:
    smooth_bezout: float = 1e-10
    holo_bezout: float = 1e-8
    dbar_identity: float = 1e-9
    magic_identity: float = 1e-8
    tsum: float = 1e-10
    holo_proxy: float = 5e-2
    fit_bezout: float = 1e-3  # truncated Taylor fits of H, K (what solution files store)
    ball_bezout: float = 1e-3


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    tol: Tolerances = field(default_factory=Tolerances)
    cauchy_method: str = "cell"
    seed: int = 0
    threads: int = 1
    n_test_points: int = 200
    out: str | None = None

    def __post_init__(self):
        if self.fit.radius >= self.grid.r_max:
            raise ValueError("fit radius must be below the grid radius")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d
