"""Exact solution of the planar Riemann problem for ``p = k rho``.

The initial discontinuity sits at ``x = 0`` and is normal to ``x``.  The
solution decays into a left-facing wave, a contact and a right-facing wave::

    L  W<-  L*  C  R*  W->  R

Each wave is a shock or a rarefaction.  Both are described by the energy
density behind the wave as a function of the normal velocity behind it
(the "wave curve"); the star states sit at the crossing of the left and
right curves.  Tangential velocities couple in through the Lorentz factor,
so they change the curves but only jump at the contact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .core import V_MAX, EosParams, PrimitiveState, UnphysicalStateError, eigenvalues_array

RHO_FLOOR = 1.0e-300
DEGENERATE_JUMP = 1.0e-12
_Y_MAX = math.atanh(V_MAX)
_LOG_CLIP = 1.0e3


class RiemannError(RuntimeError):
    """Base class for failures of the exact solver."""


class VacuumError(RiemannError):
    """The wave curves do not intersect for |vx| < 1 (vacuum would form)."""


class ConvergenceError(RiemannError):
    """A scalar root could not be bracketed."""


class NoPhysicalRootError(RiemannError):
    """No admissible shock speed among the roots of the shock cubic."""

    def __init__(self, message, roots=()):
        super().__init__(f"{message}; cubic roots: {list(roots)}")
        self.roots = tuple(roots)


class DomainError(ValueError):
    """Velocity outside the branch on which a wave function is defined."""


class Direction(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        return 1 if self is Direction.RIGHT else -1


class WaveKind(str, enum.Enum):
    RAREFACTION = "R"
    SHOCK = "S"
    NONE = "-"


def _direction(direction) -> Direction:
    return direction if isinstance(direction, Direction) else Direction(direction)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class RiemannState:
    """Fluid state reduced to the frame of the discontinuity.

    ``vt`` is the magnitude of the velocity parallel to the discontinuity and
    ``tangent_dir`` its unit direction in the (y, z) plane.
    """

    rho: float
    vx: float
    vt: float = 0.0
    tangent_dir: tuple = (1.0, 0.0)

    def __post_init__(self):
        rho, vx, vt = float(self.rho), float(self.vx), float(self.vt)
        if not (rho > 0.0 and math.isfinite(rho)):
            raise UnphysicalStateError(f"energy density must be positive, got {rho!r}")
        if vt < 0.0:
            raise ValueError("tangential speed is a magnitude and must be >= 0")
        if not math.sqrt(vx * vx + vt * vt) <= V_MAX:
            raise UnphysicalStateError(f"speed must be below 1, got vx={vx!r}, vt={vt!r}")
        ty, tz = (float(c) for c in self.tangent_dir)
        norm = math.hypot(ty, tz)
        if norm == 0.0:
            if vt > 0.0:
                raise ValueError("tangent_dir must be nonzero when vt > 0")
            ty, tz, norm = 1.0, 0.0, 1.0
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "vx", vx)
        object.__setattr__(self, "vt", vt)
        object.__setattr__(self, "tangent_dir", (ty / norm, tz / norm))

    @property
    def vy(self) -> float:
        return self.vt * self.tangent_dir[0]

    @property
    def vz(self) -> float:
        return self.vt * self.tangent_dir[1]

    @property
    def lorentz(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.vx * self.vx - self.vt * self.vt)

    def pressure(self, eos: EosParams) -> float:
        return eos.k * self.rho

    def mirror(self) -> "RiemannState":
        """Reflect through the plane ``x = 0``."""
        return replace(self, vx=-self.vx)

    def to_primitive(self) -> PrimitiveState:
        return PrimitiveState(self.rho, self.vx, self.vy, self.vz)

    @classmethod
    def from_primitive(cls, p: PrimitiveState) -> "RiemannState":
        vt = math.hypot(p.vy, p.vz)
        direction = (p.vy / vt, p.vz / vt) if vt > 0.0 else (1.0, 0.0)
        return cls(p.rho, p.vx, vt, direction)

    def _prim(self) -> np.ndarray:
        return np.array([self.rho, self.vx, self.vt, 0.0])


def eigenvalues(s: RiemannState, eos: EosParams):
    """Characteristic speeds ``(xi_minus, xi_0, xi_plus)`` normal to the front."""
    lm, l0, lp = eigenvalues_array(s._prim(), 0, eos.k)
    return float(lm), float(l0), float(lp)


def _xi(s: RiemannState, eos: EosParams, direction: Direction) -> float:
    lm, _, lp = eigenvalues(s, eos)
    return lp if direction is Direction.RIGHT else lm


# ---------------------------------------------------------------------------
# rarefaction


def _tangential_log_g(rho: float, a: float, eos: EosParams) -> float:
    """``ln G(rho)`` of the integrated rarefaction relation for ``a != 0``.

    ``G = ((s + 1)/(s - 1))^(1/sqrt k) (s - sqrt k)/(s + sqrt k)`` with
    ``s = sqrt(1 + (1 - k) a^2 rho^(-2 kappa))``.  Increases monotonically
    from 0 (rho -> 0) to infinity (rho -> infinity).
    """
    sk = eos.sqrt_k
    log_x = math.log1p(-eos.k) + 2.0 * math.log(a) - 2.0 * eos.kappa * math.log(rho)
    x = math.exp(min(log_x, 700.0))
    root = math.sqrt(1.0 + x)
    if x > 1.0:
        first = math.log1p(2.0 * (root + 1.0) / x)
    else:
        # (s + 1)/(s - 1) = (root + 1)^2 / x, kept in log space against underflow
        first = 2.0 * math.log1p(root) - log_x
    return first / sk + math.log1p(-2.0 * sk / (root + sk))


@dataclass(frozen=True)
class RarefactionCurve:
    """Rarefaction states reachable from ``ahead`` through a simple wave.

    Along the curve ``rho^kappa W v^y`` and ``rho^kappa W v^z`` are constant,
    so ``vt = a / (W rho^kappa)`` with ``a`` fixed by the ahead state.  The
    normal velocity is an explicit function of ``rho``; its inverse needs a
    scalar root.
    """

    ahead: RiemannState
    direction: Direction
    eos: EosParams
    a: float = field(init=False)
    log_c: float = field(init=False)

    def __post_init__(self):
        d = _direction(self.direction)
        object.__setattr__(self, "direction", d)
        s, eos = self.ahead, self.eos
        a = s.vt * s.lorentz * s.rho ** eos.kappa
        object.__setattr__(self, "a", a)
        rapidity = math.atanh(s.vx)
        if a == 0.0:
            log_c = d.sign * rapidity - eos.kappa / eos.sqrt_k * math.log(s.rho)
        else:
            log_c = 2.0 * d.sign * rapidity - _tangential_log_g(s.rho, a, eos)
        object.__setattr__(self, "log_c", log_c)

    @property
    def c_integration(self) -> float:
        """The integration constant (``C1`` if ``a == 0`` else ``C2``)."""
        return math.exp(self.log_c)

    @property
    def vx_vacuum(self) -> float:
        """Normal velocity approached as ``rho -> 0`` along the curve."""
        if self.a == 0.0:
            return -float(self.direction.sign)
        return math.tanh(0.5 * self.direction.sign * self.log_c)

    def _on_branch(self, vx: float) -> bool:
        if self.direction is Direction.RIGHT:
            return vx <= self.ahead.vx
        return vx >= self.ahead.vx

    def vx_of_rho(self, rho: float) -> float:
        sign, eos = self.direction.sign, self.eos
        if self.a == 0.0:
            y = sign * (self.log_c + eos.kappa / eos.sqrt_k * math.log(rho))
        else:
            y = 0.5 * sign * (self.log_c + _tangential_log_g(rho, self.a, eos))
        return math.tanh(y)

    def vt_of(self, rho: float, vx: float) -> float:
        if self.a == 0.0:
            return 0.0
        root_a = self.a * math.exp(-self.eos.kappa * math.log(rho))
        return root_a * math.sqrt((1.0 - vx * vx) / (1.0 + root_a * root_a))

    def state_at_rho(self, rho: float) -> RiemannState:
        vx = self.vx_of_rho(rho)
        return RiemannState(rho, vx, self.vt_of(rho, vx), self.ahead.tangent_dir)

    def rho_of_vx(self, vx: float) -> float:
        """Energy density behind the wave for normal velocity ``vx``."""
        s, eos = self.ahead, self.eos
        if not self._on_branch(vx):
            raise DomainError(f"vx={vx!r} is on the compression side of the {self.direction.value} wave")
        if vx == s.vx:
            return s.rho
        if not abs(vx) < 1.0:
            raise DomainError(f"|vx| must be below 1, got {vx!r}")
        sign = self.direction.sign
        if self.a == 0.0:
            log_rho = (sign * math.atanh(vx) - self.log_c) * eos.sqrt_k / eos.kappa
            rho = math.exp(log_rho) if log_rho > -745.0 else 0.0
        else:
            target = 2.0 * sign * math.atanh(vx) - self.log_c
            if target <= 0.0:
                raise VacuumError(f"vx={vx!r} lies beyond the vacuum limit {self.vx_vacuum!r}")
            rho = self._solve_log_g(target)
        if rho < RHO_FLOOR:
            raise VacuumError(f"rarefaction reaches vacuum at vx={vx!r}")
        return rho

    def _solve_log_g(self, target: float) -> float:
        a, eos = self.a, self.eos
        hi = math.log(self.ahead.rho)
        lo = hi - 1.0
        floor = math.log(RHO_FLOOR)

        def f(u):
            return _tangential_log_g(math.exp(u), a, eos) - target

        f_hi = f(hi)
        if f_hi < 0.0:
            # target above the ahead value: only reachable by rounding
            return self.ahead.rho
        step = 1.0
        while f(lo) > 0.0:
            hi = lo
            step *= 2.0
            lo = max(lo - step, floor)
            if lo == floor and f(lo) > 0.0:
                raise VacuumError("rarefaction reaches vacuum")
        return math.exp(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))

    def state_at_vx(self, vx: float) -> RiemannState:
        rho = self.rho_of_vx(vx)
        return RiemannState(rho, vx, self.vt_of(rho, vx), self.ahead.tangent_dir)

    def xi_of_rho(self, rho: float) -> float:
        return _xi(self.state_at_rho(rho), self.eos, self.direction)


def rarefaction_rho_from_vx(curve: RarefactionCurve, vx_behind: float) -> float:
    return curve.rho_of_vx(vx_behind)


def rarefaction_state_at_xi(curve: RarefactionCurve, xi: float, rho_tail: float) -> RiemannState:
    """State inside the fan where the fan's characteristic speed equals ``xi``.

    ``rho_tail`` is the energy density at the tail (the star value).
    """
    head_rho = curve.ahead.rho
    head = _xi(curve.ahead, curve.eos, curve.direction)
    tail = curve.xi_of_rho(rho_tail)
    lo_xi, hi_xi = min(head, tail), max(head, tail)
    slack = 1e-12 * max(1.0, abs(xi))
    if not (lo_xi - slack <= xi <= hi_xi + slack):
        raise DomainError(f"xi={xi!r} outside the fan [{lo_xi!r}, {hi_xi!r}]")
    # fan edges recomputed from the curve may differ from stored speeds by rounding
    xi = min(max(xi, lo_xi), hi_xi)
    if xi == head:
        return curve.ahead
    if xi == tail:
        return curve.state_at_rho(rho_tail)
    u_tail, u_head = math.log(rho_tail), math.log(head_rho)

    def f(u):
        return curve.xi_of_rho(math.exp(u)) - xi

    u = brentq(f, u_tail, u_head, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return curve.state_at_rho(math.exp(u))


# ---------------------------------------------------------------------------
# shocks


def _shock_cubic(ahead: RiemannState, vx_behind: float, k: float) -> np.ndarray:
    """Coefficients (ascending powers) of the cubic for the shock speed."""
    a, b, t2 = ahead.vx, vx_behind, ahead.vt * ahead.vt
    inner = P.polysub(P.polymul([1.0, -b], [1.0, -a]), P.polymul([b, -1.0], [a, -1.0]) / k)
    cubic = P.polymul([1.0, -a], inner)
    return P.polysub(cubic, t2 * P.polymul([1.0, -b], [1.0, 0.0, -1.0]))


def shock_speed(ahead: RiemannState, vx_behind: float, eos: EosParams, direction) -> float:
    """Speed of the shock connecting ``ahead`` to normal velocity ``vx_behind``.

    All roots of the cubic are computed, the admissible one is picked (inside
    the light cone and outside the ahead state's characteristic cone on the
    side the wave faces) and polished by Newton iteration.
    """
    d = _direction(direction)
    if (vx_behind - ahead.vx) * d.sign < 0.0:
        raise DomainError(f"vx={vx_behind!r} is on the rarefaction side of the {d.value} wave")
    coef = _shock_cubic(ahead, vx_behind, eos.k)
    # negligible leading terms only add spurious roots far outside (-1, 1)
    desc = coef[::-1]
    scale = np.max(np.abs(desc))
    while len(desc) > 2 and abs(desc[0]) <= 1e-14 * scale:
        desc = desc[1:]
    roots = np.roots(desc)
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-10 * max(1.0, abs(r)))
    inside = [r for r in real if -1.0 < r < 1.0]
    if not inside:
        raise NoPhysicalRootError("no shock speed inside the light cone", roots)
    vs = inside[-1] if d is Direction.RIGHT else inside[0]
    dcoef = P.polyder(coef)
    for _ in range(4):
        dp = P.polyval(vs, dcoef)
        if dp == 0.0:
            break
        step = P.polyval(vs, coef) / dp
        if not abs(step) < 1e-6:
            break
        vs -= step
        if abs(step) <= 1e-17:
            break
    xi_ahead = _xi(ahead, eos, d)
    if not abs(vs) < 1.0 or (vs - xi_ahead) * d.sign < -1e-9:
        raise NoPhysicalRootError(
            f"shock speed {vs!r} violates admissibility (ahead characteristic {xi_ahead!r})", roots)
    return float(vs)


def _tangential_behind(ahead: RiemannState, rho: float, vx: float, vs: float) -> float:
    rb, wb2 = ahead.rho, ahead.lorentz ** 2
    if ahead.vt == 0.0:
        return 0.0
    q = ((vs - ahead.vx) * rb * wb2 * ahead.vt / (rho * (vs - vx))) ** 2
    c = 1.0 - vx * vx
    # smaller root of q (c - y)^2 = y, y = vt^2
    y = 2.0 * q * c * c / ((2.0 * q * c + 1.0) + math.sqrt(4.0 * q * c + 1.0))
    return math.sqrt(y)


def shock_density(ahead: RiemannState, vx_behind: float, vs: float) -> float:
    """Post-shock energy density for a given shock speed."""
    a, b, t2 = ahead.vx, vx_behind, ahead.vt * ahead.vt
    wb2 = ahead.lorentz ** 2
    num = ahead.rho * wb2 * (a - vs) * ((1.0 - b * b) * (1.0 - a * vs) ** 2 - t2 * (1.0 - b * vs) ** 2)
    return num / ((b - vs) * (1.0 - b * vs) * (1.0 - a * vs))


def theta_density(ahead: RiemannState, vx_behind: float, eos: EosParams) -> float:
    """Post-shock energy density for a shock without tangential motion."""
    theta = _theta(ahead, vx_behind, eos)
    return ahead.rho * (1.0 + theta + math.sqrt(theta * (2.0 + theta)))


def _theta(ahead: RiemannState, vx_behind: float, eos: EosParams) -> float:
    kap = eos.kappa
    w2 = 1.0 / (1.0 - vx_behind * vx_behind)
    wb2 = 1.0 / (1.0 - ahead.vx * ahead.vx)
    return w2 * wb2 * (vx_behind - ahead.vx) ** 2 / (2.0 * kap * (1.0 - kap))


def closed_form_shock_speed(ahead: RiemannState, behind: RiemannState, eos: EosParams) -> float:
    """``[[rho W^2 vx]] / [[rho W^2 - kappa rho]]`` between two states."""
    w2, wb2 = behind.lorentz ** 2, ahead.lorentz ** 2
    num = behind.rho * w2 * behind.vx - ahead.rho * wb2 * ahead.vx
    den = (behind.rho * w2 - eos.kappa * behind.rho) - (ahead.rho * wb2 - eos.kappa * ahead.rho)
    return num / den


def shock_state_behind(ahead: RiemannState, vx_behind: float, vs: float, eos: EosParams) -> RiemannState:
    """State behind a shock of speed ``vs`` moving into ``ahead``."""
    if vs == vx_behind:
        raise ValueError("vs equals the flow velocity: that is a contact, not a shock")
    if vx_behind == ahead.vx:
        return ahead
    rho = shock_density(ahead, vx_behind, vs)
    if not (rho > 0.0 and math.isfinite(rho)):
        raise UnphysicalStateError(f"post-shock energy density {rho!r} is not positive")
    vt = _tangential_behind(ahead, rho, vx_behind, vs)
    return RiemannState(rho, vx_behind, vt, ahead.tangent_dir)


@dataclass(frozen=True)
class ShockJump:
    """A shock moving into ``ahead`` that leaves normal velocity ``behind.vx``."""

    ahead: RiemannState
    direction: Direction
    vs: float
    behind: RiemannState
    theta: Optional[float] = None

    @property
    def ws(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.vs * self.vs)

    @classmethod
    def build(cls, ahead: RiemannState, vx_behind: float, eos: EosParams, direction) -> "ShockJump":
        d = _direction(direction)
        vs = shock_speed(ahead, vx_behind, eos, d)
        behind = shock_state_behind(ahead, vx_behind, vs, eos)
        theta = _theta(ahead, vx_behind, eos) if ahead.vt == 0.0 else None
        return cls(ahead, d, vs, behind, theta)


# ---------------------------------------------------------------------------
# wave curves and the solver


def wave_curve(ahead: RiemannState, direction, vx: float, eos: EosParams) -> float:
    """Energy density behind a wave as a function of the normal velocity.

    Right-facing waves are rarefactions for ``vx < ahead.vx`` and shocks
    otherwise; left-facing waves the reverse.  The right curve increases
    with ``vx``, the left one decreases.
    """
    d = _direction(direction)
    if vx == ahead.vx:
        return ahead.rho
    if (vx - ahead.vx) * d.sign < 0.0:
        return RarefactionCurve(ahead, d, eos).rho_of_vx(vx)
    vs = shock_speed(ahead, vx, eos, d)
    return shock_density(ahead, vx, vs)


class _Side:
    """Cached wave curve for one side of the problem."""

    def __init__(self, ahead: RiemannState, direction: Direction, eos: EosParams):
        self.ahead, self.direction, self.eos = ahead, direction, eos
        self.fan = RarefactionCurve(ahead, direction, eos)

    def log_rho(self, vx: float) -> float:
        s, d = self.ahead, self.direction
        if vx == s.vx:
            return math.log(s.rho)
        if (vx - s.vx) * d.sign < 0.0:
            return math.log(self.fan.rho_of_vx(vx))
        return math.log(shock_density(s, vx, shock_speed(s, vx, self.eos, d)))

    def y_vacuum(self) -> float:
        """Rapidity bound beyond which the rarefaction branch hits vacuum."""
        v = self.fan.vx_vacuum
        y = math.atanh(v) if abs(v) < 1.0 else math.copysign(math.inf, v)
        return max(-_Y_MAX, min(_Y_MAX, y))


@dataclass(frozen=True)
class RiemannSolution:
    """Resolved wave pattern; immutable and samplable at any ``xi = x / t``."""

    left: RiemannState
    right: RiemannState
    eos: EosParams
    left_kind: WaveKind
    right_kind: WaveKind
    vx_star: float
    rho_star: float
    vt_left_star: float
    vt_right_star: float
    left_wave_speeds: tuple
    right_wave_speeds: tuple
    left_wave: Union[RarefactionCurve, ShockJump, None] = field(default=None, repr=False)
    right_wave: Union[RarefactionCurve, ShockJump, None] = field(default=None, repr=False)

    @property
    def pattern(self) -> str:
        return self.left_kind.value + self.right_kind.value

    @property
    def contact_speed(self) -> float:
        return self.vx_star

    @property
    def left_star(self) -> RiemannState:
        return RiemannState(self.rho_star, self.vx_star, self.vt_left_star, self.left.tangent_dir)

    @property
    def right_star(self) -> RiemannState:
        return RiemannState(self.rho_star, self.vx_star, self.vt_right_star, self.right.tangent_dir)

    def wave_speeds(self) -> tuple:
        """``(left head, left tail, contact, right tail, right head)``."""
        lh, lt = self.left_wave_speeds
        rt, rh = self.right_wave_speeds
        return lh, lt, self.vx_star, rt, rh

    def sample(self, xi: float) -> RiemannState:
        return sample(self, xi)


def _wave(ahead, star_vx, rho_star, direction, eos):
    """Kind, speeds (head, tail), star vt and wave object for one side."""
    d = direction
    if abs(star_vx - ahead.vx) <= DEGENERATE_JUMP and abs(rho_star - ahead.rho) <= DEGENERATE_JUMP * ahead.rho:
        xi = _xi(ahead, eos, d)
        return WaveKind.NONE, (xi, xi), ahead.vt, None
    if (star_vx - ahead.vx) * d.sign < 0.0:
        fan = RarefactionCurve(ahead, d, eos)
        vt = fan.vt_of(rho_star, star_vx)
        star = RiemannState(rho_star, star_vx, vt, ahead.tangent_dir)
        return WaveKind.RAREFACTION, (_xi(ahead, eos, d), _xi(star, eos, d)), vt, fan
    jump = ShockJump.build(ahead, star_vx, eos, d)
    vt = _tangential_behind(ahead, rho_star, star_vx, jump.vs)
    return WaveKind.SHOCK, (jump.vs, jump.vs), vt, jump


def _trivial(left, right, eos) -> RiemannSolution:
    xm, _, xp = eigenvalues(left, eos)
    return RiemannSolution(left, right, eos, WaveKind.NONE, WaveKind.NONE, left.vx, left.rho,
                           left.vt, right.vt, (xm, xm), (xp, xp))


def solve(left: RiemannState, right: RiemannState, eos: EosParams) -> RiemannSolution:
    """Resolve the wave pattern of the Riemann problem ``(left, right)``.

    Raises
    ------
    VacuumError
        If the left and right wave curves do not cross for |vx| < 1.
    """
    jump = max(abs(left.rho - right.rho) / max(left.rho, right.rho), abs(left.vx - right.vx),
               abs(left.vy - right.vy), abs(left.vz - right.vz))
    if jump <= DEGENERATE_JUMP:
        return _trivial(left, right, eos)

    lside = _Side(left, Direction.LEFT, eos)
    rside = _Side(right, Direction.RIGHT, eos)
    y_lo, y_hi = rside.y_vacuum(), lside.y_vacuum()
    if not y_lo < y_hi:
        raise VacuumError("wave curves do not intersect: the initial states separate into vacuum")

    def g(y):
        vx = math.tanh(y)
        try:
            lr = rside.log_rho(vx)
        except VacuumError:
            lr = -_LOG_CLIP
        try:
            ll = lside.log_rho(vx)
        except VacuumError:
            ll = -_LOG_CLIP
        return max(-_LOG_CLIP, min(_LOG_CLIP, lr - ll))

    # tight bracket first, widening toward the admissible limits
    y_left, y_right = math.atanh(left.vx), math.atanh(right.vx)
    lo, hi = max(min(y_left, y_right), y_lo), min(max(y_left, y_right), y_hi)
    if not lo < hi:
        mid = min(max(0.5 * (y_left + y_right), y_lo), y_hi)
        lo, hi = max(mid - 1e-3, y_lo), min(mid + 1e-3, y_hi)
    g_lo, g_hi = g(lo), g(hi)
    while g_lo > 0.0 and lo > y_lo:
        lo = max(y_lo, lo - 2.0 * (hi - lo) - 0.1)
        g_lo = g(lo)
    while g_hi < 0.0 and hi < y_hi:
        hi = min(y_hi, hi + 2.0 * (hi - lo) + 0.1)
        g_hi = g(hi)
    if g_lo == 0.0:
        y_star = lo
    elif g_hi == 0.0:
        y_star = hi
    elif g_lo < 0.0 < g_hi:
        y_star = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=300)
    else:
        raise VacuumError("wave curves do not intersect for |vx| < 1")

    vx_star = math.tanh(y_star)
    rho_star = 0.5 * (math.exp(rside.log_rho(vx_star)) + math.exp(lside.log_rho(vx_star)))
    if not rho_star > RHO_FLOOR:
        raise VacuumError("star-state energy density vanishes")

    lkind, (lhead, ltail), vt_l, lwave = _wave(left, vx_star, rho_star, Direction.LEFT, eos)
    rkind, (rhead, rtail), vt_r, rwave = _wave(right, vx_star, rho_star, Direction.RIGHT, eos)
    return RiemannSolution(left, right, eos, lkind, rkind, vx_star, rho_star, vt_l, vt_r,
                           (lhead, ltail), (rtail, rhead), lwave, rwave)


def mirror_solution_inputs(left: RiemannState, right: RiemannState):
    """Inputs of the parity-reflected problem."""
    return right.mirror(), left.mirror()


def sample(sol: RiemannSolution, xi: float) -> RiemannState:
    """State of the self-similar solution at ``xi = x / t``."""
    lh, lt, c, rt, rh = sol.wave_speeds()
    if xi <= c:
        if sol.left_kind is WaveKind.RAREFACTION:
            if xi < lh:
                return sol.left
            if xi <= lt:
                return rarefaction_state_at_xi(sol.left_wave, xi, sol.rho_star)
            return sol.left_star
        return sol.left if xi < lh else sol.left_star
    if sol.right_kind is WaveKind.RAREFACTION:
        if xi > rh:
            return sol.right
        if xi >= rt:
            return rarefaction_state_at_xi(sol.right_wave, xi, sol.rho_star)
        return sol.right_star
    return sol.right if xi > rh else sol.right_star


def sample_profile(sol: RiemannSolution, x, t: float) -> dict:
    """Columns ``rho, p, vx, vt, vy, vz`` of the solution at positions ``x``.

    At ``t == 0`` the initial step is returned (``x <= 0`` is the left state).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cols = {name: np.empty_like(x) for name in ("rho", "vx", "vt", "vy", "vz")}
    for i, xv in enumerate(x):
        if t > 0.0:
            s = sample(sol, xv / t)
        else:
            s = sol.left if xv <= 0.0 else sol.right
        cols["rho"][i], cols["vx"][i], cols["vt"][i] = s.rho, s.vx, s.vt
        cols["vy"][i], cols["vz"][i] = s.vy, s.vz
    cols["p"] = sol.eos.k * cols["rho"]
    return cols
