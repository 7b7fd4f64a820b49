"""State representations and conversions for the ultra-relativistic fluid.

The equation of state is ``p = k * rho`` with ``rho`` the energy density.
Conserved variables are the grid-frame energy density ``E`` and momentum
density ``S``::

    E   = (rho + p) W^2 - p
    S^i = (rho + p) W^2 v^i

Array-level helpers operate on stacks of shape ``(4, ...)`` ordered
``(E, Sx, Sy, Sz)`` or ``(rho, vx, vy, vz)`` and are what the finite-volume
solver uses.  The dataclass wrappers validate single states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Largest admissible speed, keeps the Lorentz factor finite.
V_MAX = 1.0 - 1.0e-12

#: Relative tolerance used to call two states equal.
STATE_RTOL = 1.0e-12

AXES = {"x": 0, "y": 1, "z": 2}


class UnphysicalStateError(ValueError):
    """Raised when a state violates rho > 0 or |v| < 1.

    ``index`` optionally carries the offending cell location.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


def _axis_index(axis) -> int:
    if isinstance(axis, str):
        try:
            return AXES[axis]
        except KeyError:
            raise ValueError(f"unknown axis {axis!r}") from None
    axis = int(axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"unknown axis {axis!r}")
    return axis


@dataclass(frozen=True)
class EosParams:
    """Ultra-relativistic equation of state ``p = k rho``, ``0 < k < 1``."""

    k: float
    kappa: float = field(init=False, repr=False)

    def __post_init__(self):
        k = float(self.k)
        if not (0.0 < k < 1.0):
            raise ValueError(f"EOS constant k must lie in (0, 1), got {k!r}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "kappa", k / (1.0 + k))

    @property
    def sqrt_k(self) -> float:
        return math.sqrt(self.k)


def sound_speed(eos: EosParams) -> float:
    """Sound speed ``sqrt(k)``."""
    return math.sqrt(eos.k)


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0

    def __post_init__(self):
        for name in ("rho", "vx", "vy", "vz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.rho > 0.0 or not math.isfinite(self.rho):
            raise UnphysicalStateError(f"energy density must be positive, got {self.rho!r}")
        if not math.sqrt(self.v2) <= V_MAX:
            raise UnphysicalStateError(f"speed must be below 1, got |v| = {math.sqrt(self.v2)!r}")

    @property
    def v2(self) -> float:
        return self.vx * self.vx + self.vy * self.vy + self.vz * self.vz

    @property
    def lorentz(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.v2)

    def pressure(self, eos: EosParams) -> float:
        return eos.k * self.rho

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.vx, self.vy, self.vz])


@dataclass(frozen=True)
class ConservedState:
    e: float
    sx: float = 0.0
    sy: float = 0.0
    sz: float = 0.0

    def __post_init__(self):
        for name in ("e", "sx", "sy", "sz"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.e, self.sx, self.sy, self.sz])


# ---------------------------------------------------------------------------
# array kernels


def prim_to_cons_array(prim: np.ndarray, k: float) -> np.ndarray:
    """Map primitive stacks ``(rho, vx, vy, vz)`` to ``(E, Sx, Sy, Sz)``."""
    rho, vx, vy, vz = prim
    w2 = 1.0 / (1.0 - (vx * vx + vy * vy + vz * vz))
    h = (1.0 + k) * rho * w2
    return np.stack([h - k * rho, h * vx, h * vy, h * vz])


def physical_mask(u: np.ndarray) -> np.ndarray:
    """True where a conserved stack maps to rho > 0 and |v| < 1.

    With ``m = |S|`` this is equivalent to ``0 <= m < E``; the recovery
    discriminant is then automatically positive.
    """
    e, sx, sy, sz = u
    m = np.sqrt(sx * sx + sy * sy + sz * sz)
    return (e > 0.0) & (m < e) & np.isfinite(e) & np.isfinite(m)


def cons_to_prim_array(u: np.ndarray, k: float, check: bool = True) -> np.ndarray:
    """Closed-form recovery of ``(rho, vx, vy, vz)`` from conserved stacks.

    ``X = (rho + p) W^2`` solves ``X^2 - (1 + k) E X + k m^2 = 0``; the root
    reducing to ``X = (1 + k) E`` for vanishing momentum is taken.  The
    relative rounding error of ``rho`` grows like ``W^2``, which is the
    conditioning of the map itself.
    """
    e, sx, sy, sz = u
    m2 = sx * sx + sy * sy + sz * sz
    b = (1.0 + k) * e
    disc = b * b - 4.0 * k * m2
    if check:
        bad = ~(physical_mask(u) & (disc >= 0.0))
        if np.any(bad):
            idx = tuple(int(i[0]) for i in np.nonzero(bad)) if np.ndim(bad) else None
            raise UnphysicalStateError("conserved state has no physical primitive", index=idx)
    x = 0.5 * (b + np.sqrt(np.maximum(disc, 0.0)))
    # rho = X (1 - v^2) / (1 + k) avoids the 1/k cancellation of (X - E) / k
    m = np.sqrt(m2)
    rho = (x - m) * (x + m) / (x * (1.0 + k))
    prim = np.stack([rho, sx / x, sy / x, sz / x])
    if check:
        v = np.sqrt(prim[1] ** 2 + prim[2] ** 2 + prim[3] ** 2)
        bad = ~((rho > 0.0) & (v <= V_MAX))
        if np.any(bad):
            idx = tuple(int(i[0]) for i in np.nonzero(bad)) if np.ndim(bad) else None
            raise UnphysicalStateError("recovered state is unphysical", index=idx)
    return prim


def flux_array(u: np.ndarray, prim: np.ndarray, axis: int, k: float) -> np.ndarray:
    """Physical flux along ``axis`` for conserved/primitive stacks."""
    vn = prim[1 + axis]
    p = k * prim[0]
    f = np.stack([u[1 + axis], u[1] * vn, u[2] * vn, u[3] * vn])
    f[1 + axis] += p
    return f


def eigenvalues_array(prim: np.ndarray, axis: int, k: float):
    """Characteristic speeds ``(xi_minus, xi_0, xi_plus)`` normal to ``axis``."""
    vn = prim[1 + axis]
    v2 = prim[1] ** 2 + prim[2] ** 2 + prim[3] ** 2
    denom = 1.0 - v2 * k
    root = np.sqrt(k) * np.sqrt((1.0 - v2) * (1.0 - v2 * k - vn * vn * (1.0 - k)))
    base = vn * (1.0 - k)
    return (base - root) / denom, vn, (base + root) / denom


# ---------------------------------------------------------------------------
# single-state API


def prim_to_cons(p: PrimitiveState, eos: EosParams) -> ConservedState:
    """Conserved variables of a validated primitive state."""
    e, sx, sy, sz = prim_to_cons_array(p.as_array(), eos.k)
    return ConservedState(e, sx, sy, sz)


def cons_to_prim(u: ConservedState, eos: EosParams) -> PrimitiveState:
    """Exact inverse of :func:`prim_to_cons`.

    Raises
    ------
    UnphysicalStateError
        If ``E <= 0``, ``|S| >= E`` or the recovered speed reaches 1.
    """
    rho, vx, vy, vz = cons_to_prim_array(u.as_array(), eos.k)
    return PrimitiveState(rho, vx, vy, vz)


def flux(u: ConservedState, p: PrimitiveState, axis, eos: EosParams) -> np.ndarray:
    """Flux vector ``F^axis(U)`` as a length-4 array."""
    return flux_array(u.as_array(), p.as_array(), _axis_index(axis), eos.k)


def eigenvalues(p: PrimitiveState, eos: EosParams, axis="x"):
    """Characteristic speeds of ``dF^axis/dU`` at ``p``."""
    lm, l0, lp = eigenvalues_array(p.as_array(), _axis_index(axis), eos.k)
    return float(lm), float(l0), float(lp)
