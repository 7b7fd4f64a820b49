"""Shock-tube verification against the exact solution.

Grids are initialised with a Riemann step at ``x = 0``, evolved, and the L1
distance to the sampled exact solution is measured on a fixed interval for
a sequence of resolutions.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import EosParams
from .exact import RiemannSolution, RiemannState, sample_profile, solve
from .fv import Grid, SchemeConfig, evolve

#: Reference L1 errors (rho, vx, vt) of the shock tube for 100..1600 zones per unit.
REFERENCE_TABLE = {
    100: (3.1e-1, 1.6e-2, 1.8e-2),
    200: (1.7e-1, 9.1e-3, 1.0e-2),
    400: (9.2e-2, 6.2e-3, 6.6e-3),
    800: (4.7e-2, 2.8e-3, 4.1e-3),
    1600: (2.5e-2, 1.7e-3, 2.5e-3),
}

FIELDS = ("rho", "vx", "vt")


class EvolutionFailure(RuntimeError):
    """Evolution aborted at one resolution of a sweep."""

    def __init__(self, resolution, cause):
        super().__init__(f"evolution failed at {resolution} zones per unit length: {cause}")
        self.resolution = resolution
        self.cause = cause


@dataclass(frozen=True)
class TestSpec:
    left: RiemannState
    right: RiemannState
    eos: EosParams
    t_end: float = 1.0
    error_interval: tuple = (-1.0, 1.0)
    resolutions: tuple = (100, 200, 400, 800, 1600)
    courant_factor: float = 0.1
    dims: int = 1
    domain: tuple = (-2.0, 2.0)
    transverse_cells: int = 4
    reconstruction: str = "minmod"

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        lo, hi = self.error_interval
        if not lo < hi:
            raise ValueError("error interval must satisfy x_lo < x_hi")
        res = tuple(int(r) for r in self.resolutions)
        if not res or any(b <= a for a, b in zip(res, res[1:])) or res[0] < 1:
            raise ValueError("resolutions must be positive and strictly increasing")
        object.__setattr__(self, "resolutions", res)
        if self.dims not in (1, 2):
            raise ValueError("dims must be 1 or 2")
        if not self.domain[0] < self.domain[1]:
            raise ValueError("domain bounds must be increasing")

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(self.eos, self.courant_factor, self.reconstruction,
                            ("outflow",) * self.dims)

    def mirror(self) -> "TestSpec":
        from dataclasses import replace

        lo, hi = self.error_interval
        return replace(self, left=self.right.mirror(), right=self.left.mirror(),
                       error_interval=(-hi, -lo), domain=(-self.domain[1], -self.domain[0]))


def shock_tube_spec(**overrides) -> TestSpec:
    """Shock-tube data with tangential motion on both sides, ``k = 1/3``."""
    base = dict(
        left=RiemannState(1.0, 0.5, 1.0 / 3.0),
        right=RiemannState(20.0, 0.5, 0.5),
        eos=EosParams(1.0 / 3.0),
    )
    base.update(overrides)
    return TestSpec(**base)


@dataclass(frozen=True)
class ErrorRow:
    resolution: int
    l1_rho: float
    l1_vx: float
    l1_vt: float

    def as_tuple(self) -> tuple:
        return self.resolution, self.l1_rho, self.l1_vx, self.l1_vt


def _state_prim(s: RiemannState) -> np.ndarray:
    return np.array([s.rho, s.vx, s.vy, s.vz])


def init_riemann_grid(spec: TestSpec, resolution: int) -> Grid:
    """Riemann step at ``x = 0`` on ``resolution`` zones per unit length.

    Cells centred at ``x <= 0`` take the left state.  The tangential velocity
    is carried by ``(vy, vz)`` according to each state's direction.
    """
    lo, hi = spec.domain
    nx = int(round((hi - lo) * resolution))
    if spec.dims == 1:
        grid = Grid.uniform((nx,), (lo,), (hi,))
    else:
        ny = spec.transverse_cells
        h = (hi - lo) / nx
        grid = Grid.uniform((nx, ny), (lo, 0.0), (hi, ny * h))
    x = grid.mesh()[0]
    left = x <= 0.0
    prim = np.where(left[None], _state_prim(spec.left).reshape((4,) + (1,) * grid.dims),
                    _state_prim(spec.right).reshape((4,) + (1,) * grid.dims))
    grid.set_primitive(prim, spec.eos.k)
    return grid


def _field(prim: np.ndarray, name: str) -> np.ndarray:
    if name == "rho":
        return prim[0]
    if name == "vx":
        return prim[1]
    if name in ("vt", "vy"):
        return np.hypot(prim[2], prim[3]) if name == "vt" else prim[2]
    if name == "vz":
        return prim[3]
    if name == "p":
        raise ValueError("use rho; pressure is k * rho")
    raise ValueError(f"unknown field {name!r}")


def _exact_cache(exact: RiemannSolution, x: np.ndarray, t: float) -> dict:
    return sample_profile(exact, x, t)


def l1_error(numerical: Grid, exact: RiemannSolution, t: float, interval: Sequence[float],
             field: str = "rho", _profile: Optional[dict] = None) -> float:
    """``sum |q_num - q_exact| dx`` over cells centred inside ``interval``.

    Multi-dimensional grids use the first transverse row (any ``y = const``
    slice of an x-aligned problem).
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    prim = numerical.primitive(exact.eos.k)
    while prim.ndim > 2:
        prim = prim[..., 0]
    x = numerical.centers(0)
    lo, hi = interval
    sel = (x >= lo) & (x <= hi)
    profile = _profile if _profile is not None else _exact_cache(exact, x[sel], t)
    num = _field(prim[:, sel], field)
    ref = profile[field]
    return float(np.sum(np.abs(num - ref)) * numerical.spacing[0])


def run_resolution(spec: TestSpec, resolution: int, exact: Optional[RiemannSolution] = None,
                   workers: int = 1, dt: Optional[float] = None) -> tuple:
    """Evolve one resolution; returns ``(ErrorRow, final grid)``."""
    exact = solve(spec.left, spec.right, spec.eos) if exact is None else exact
    grid = init_riemann_grid(spec, resolution)
    try:
        final = evolve(grid, spec.scheme(), spec.t_end, workers=workers, dt=dt)
    except Exception as exc:  # tag and re-raise
        raise EvolutionFailure(resolution, exc) from exc
    x = final.centers(0)
    lo, hi = spec.error_interval
    profile = _exact_cache(exact, x[(x >= lo) & (x <= hi)], spec.t_end)
    errs = [l1_error(final, exact, spec.t_end, spec.error_interval, f, profile) for f in FIELDS]
    return ErrorRow(resolution, *errs), final


def convergence_sweep(spec: TestSpec, workers: int = 1) -> list:
    """One :class:`ErrorRow` per resolution of ``spec``."""
    exact = solve(spec.left, spec.right, spec.eos)
    return [run_resolution(spec, r, exact, workers)[0] for r in spec.resolutions]


def error_ratios(rows: Sequence[ErrorRow]) -> list:
    """Per-doubling error ratios ``(res_coarse, res_fine, r_rho, r_vx, r_vt)``."""
    out = []
    for a, b in zip(rows, rows[1:]):
        out.append((a.resolution, b.resolution) + tuple(
            (x / y) if y > 0 else math.inf for x, y in zip(a.as_tuple()[1:], b.as_tuple()[1:])))
    return out


def format_table(rows: Sequence[ErrorRow], ratios: bool = True) -> str:
    """CSV ``resolution,L1_rho,L1_vx,L1_vt`` with ratios as ``#`` comments."""
    buf = io.StringIO()
    buf.write("resolution,L1_rho,L1_vx,L1_vt\n")
    for r in rows:
        buf.write(f"{r.resolution}," + ",".join(f"{v:.17g}" for v in r.as_tuple()[1:]) + "\n")
    if ratios:
        for lo, hi, *q in error_ratios(rows):
            buf.write(f"# ratio {lo}->{hi}: " + ",".join(f"{v:.17g}" for v in q) + "\n")
    return buf.getvalue()
