"""Brownian path ensembles with absorbing boundaries and their estimators.

Generator convention: the diffusion generator is the full Laplacian, so a
path increment over a step dt is Normal(0, 2 dt) per coordinate.  Every
closed form here (erfc hitting laws, interval escape series, cone exit law)
is written in that convention; the finite-difference module solves the
matching equation u_t = Laplace(u).

Reproducibility: increments for step k of an ensemble come from a
counter-based generator keyed by (seed, purpose tag, k), so results are
pure functions of (inputs, config) regardless of how the ensemble is
scheduled.  Two estimators called with the same config see bitwise
identical paths, which makes shared-path identities exact.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidParameterError, ResolutionWarning
from .nodal import DomainMask, interpolate_with_gradient

__all__ = [
    "PathEnsembleConfig",
    "McEstimate",
    "ConeSpec",
    "SupHittingResult",
    "estimate_hitting_probability",
    "feynman_kac_dirichlet",
    "xi_evolution",
    "sup_hitting_check",
    "halfplane_hitting_exact",
    "interval_escape_exact",
    "escape_interval_mc",
    "cone_exit_exact",
    "cone_exit_mc",
]

_TAG_GRID = 1
_TAG_LINE = 2
_TAG_INTERVAL = 3
_TAG_CONE = 4
_TAG_SCATTER = 5

CONE_DEFAULT_DT = 2e-4
_TINY_GRAD = 1e-300
_MAX_DIST = 1e100


def _level_set_distance(f, gx, gy):
    """First-order distance to the zero set of the interpolant, capped."""
    return np.minimum(np.abs(f) / np.maximum(np.hypot(gx, gy), _TINY_GRAD), _MAX_DIST)


@dataclass(frozen=True)
class PathEnsembleConfig:
    """Ensemble size, step, seed and bridge flag; dt=None means t/1000."""

    n_paths: int = 100_000
    dt: float | None = None
    seed: int = 20260808
    bridge_correction: bool = True

    def __post_init__(self):
        if self.n_paths < 100:
            raise InvalidParameterError("n_paths must be at least 100")
        if self.dt is not None and self.dt <= 0:
            raise InvalidParameterError("dt must be positive")


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    std_error: float
    n_paths: int

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "McEstimate":
        n = samples.size
        se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean=float(samples.mean()), std_error=se, n_paths=n)


@dataclass(frozen=True)
class ConeSpec:
    """Planar cone W(alpha) around the positive x-axis with stop radius r."""

    alpha: float
    r: float

    def __post_init__(self):
        if not (0 < self.alpha <= 2 * np.pi):
            raise InvalidParameterError("opening angle must be in (0, 2 pi]")
        if self.r <= 1:
            raise InvalidParameterError("stopping radius must exceed the start radius 1")


@dataclass(frozen=True)
class SupHittingResult:
    mc: McEstimate
    exact: float


def _step_rng(seed: int, tag: int, step: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64((tag << 56) | step)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _steps_for(t: float, cfg: PathEnsembleConfig):
    if t <= 0:
        raise InvalidParameterError("horizon t must be positive")
    dt_req = cfg.dt if cfg.dt is not None else t / 1000.0
    if dt_req > t / 100.0 * (1 + 1e-9):
        raise InvalidParameterError(
            f"dt={dt_req:.3g} violates dt <= t/100 for horizon t={t:.3g}")
    n_steps = max(1, math.ceil(t / dt_req - 1e-9))
    return n_steps, t / n_steps


# ---------------------------------------------------------------------------
# grid-domain walks
# ---------------------------------------------------------------------------

def _wrap(pos: np.ndarray, grid):
    if grid.periodic_x:
        pos[:, 0] = grid.x0 + np.mod(pos[:, 0] - grid.x0, grid.extent_x)
    if grid.periodic_y:
        pos[:, 1] = grid.y0 + np.mod(pos[:, 1] - grid.y0, grid.extent_y)


def _walk_in_domain(values: np.ndarray, grid, sign: int, starts: np.ndarray,
                    t: float, cfg: PathEnsembleConfig):
    """Absorbing walk of one path per start row; returns (absorbed, end).

    Absorption tests the sign of the bilinear interpolant at each step
    endpoint; with bridge_correction on, a Brownian-bridge crossing draw
    against the local linearization of the zero set is added per step.
    """
    n_steps, dt = _steps_for(t, cfg)
    sigma = math.sqrt(2 * dt)
    pos = np.array(starts, dtype=float)
    n = pos.shape[0]

    f, gx, gy, inside = interpolate_with_gradient(values, grid, pos)
    w = sign * f
    absorbed = (~inside) | (w <= 0)
    dist = _level_set_distance(f, gx, gy)
    alive = np.flatnonzero(~absorbed)

    for k in range(n_steps):
        if alive.size == 0:
            break
        rng = _step_rng(cfg.seed, _TAG_GRID, k)
        m = alive.size
        inc = rng.standard_normal((m, 2)) * sigma
        new = pos[alive] + inc
        _wrap(new, grid)
        f, gx, gy, inside = interpolate_with_gradient(values, grid, new)
        w = sign * f
        dead = (~inside) | (w <= 0)
        d1 = _level_set_distance(f, gx, gy)
        if cfg.bridge_correction:
            u = rng.random(m)
            dead |= u < np.exp(-np.minimum(dist[alive] * d1 / dt, 700.0))
        dist[alive] = d1
        pos[alive] = new
        absorbed[alive[dead]] = True
        alive = alive[~dead]

    return absorbed, pos


def _validate_start(mask: DomainMask, label: int, x, warn_near_boundary=True):
    sel = mask.cells(label)
    grid = mask.grid
    pt = np.asarray(x, dtype=float).reshape(1, 2)
    f, _, _, inside = interpolate_with_gradient(mask.field_values, grid, pt)
    sgn = mask.sign(label)
    if not inside[0] or sgn * f[0] <= 0:
        raise InvalidParameterError(f"start point {tuple(pt[0])} is not inside the domain")
    ix = int(np.clip(np.floor((pt[0, 0] - grid.x0) / grid.h), 0, grid.nx - 1))
    iy = int(np.clip(np.floor((pt[0, 1] - grid.y0) / grid.h), 0, grid.ny - 1))
    if not sel[iy, ix]:
        raise InvalidParameterError(
            f"start point {tuple(pt[0])} lies in a cell outside domain label {label}")
    if warn_near_boundary:
        ny, nx = sel.shape
        neighbors = []
        for dy, dx in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            jy, jx = iy + dy, ix + dx
            if grid.periodic_y:
                jy %= ny
            if grid.periodic_x:
                jx %= nx
            if 0 <= jy < ny and 0 <= jx < nx:
                neighbors.append(sel[jy, jx])
            else:
                neighbors.append(False)
        if not all(neighbors):
            warnings.warn(
                "start point within one cell of the boundary; the estimate is "
                "discretization dominated", ResolutionWarning)
    return pt[0]


def estimate_hitting_probability(mask: DomainMask, label: int, x, t: float,
                                 cfg: PathEnsembleConfig) -> McEstimate:
    """p_t(x): probability of hitting the domain boundary within time t."""
    pt = _validate_start(mask, label, x)
    starts = np.tile(pt, (cfg.n_paths, 1))
    absorbed, _ = _walk_in_domain(mask.field_values, mask.grid, mask.sign(label),
                                  starts, t, cfg)
    return McEstimate.from_samples(absorbed.astype(float))


def feynman_kac_dirichlet(model, mask: DomainMask, label: int, x, t: float,
                          cfg: PathEnsembleConfig) -> McEstimate:
    """E_x[u(path(t)) * survival]; equals exp(-lambda t) u(x) for eigenmodes."""
    pt = _validate_start(mask, label, x)
    if t == 0:
        return McEstimate(mean=float(model.evaluate(pt[0], pt[1])), std_error=0.0,
                          n_paths=cfg.n_paths)
    starts = np.tile(pt, (cfg.n_paths, 1))
    absorbed, end = _walk_in_domain(mask.field_values, mask.grid, mask.sign(label),
                                    starts, t, cfg)
    vals = np.where(absorbed, 0.0, np.asarray(model.evaluate(end[:, 0], end[:, 1])))
    return McEstimate.from_samples(vals)


def xi_evolution(model, mask: DomainMask, label: int, x, t: float,
                 cfg: PathEnsembleConfig) -> McEstimate:
    """Mass-conserving evolution: killed flow plus absorbed mass frozen at x.

    The mean is assembled as fk_mean + p_hat * u(x) from one shared path
    ensemble, so the gap identity (xi - dirichlet) = p_t * u(x) holds
    exactly for equal configs.  The standard error comes from the per-path
    values u(end) * psi + (1 - psi) * u(x).
    """
    pt = _validate_start(mask, label, x)
    u0 = float(model.evaluate(pt[0], pt[1]))
    if t == 0:
        return McEstimate(mean=u0, std_error=0.0, n_paths=cfg.n_paths)
    starts = np.tile(pt, (cfg.n_paths, 1))
    absorbed, end = _walk_in_domain(mask.field_values, mask.grid, mask.sign(label),
                                    starts, t, cfg)
    fk_vals = np.where(absorbed, 0.0, np.asarray(model.evaluate(end[:, 0], end[:, 1])))
    fk_mean = float(fk_vals.mean())
    p_hat = float(absorbed.astype(float).mean())
    xi_vals = np.where(absorbed, u0, fk_vals)
    se = float(xi_vals.std(ddof=1) / math.sqrt(xi_vals.size)) if xi_vals.size > 1 else 0.0
    return McEstimate(mean=fk_mean + p_hat * u0, std_error=se, n_paths=cfg.n_paths)


# ---------------------------------------------------------------------------
# one-dimensional closed-form checks
# ---------------------------------------------------------------------------

def halfplane_hitting_exact(d: float, t: float) -> float:
    """P(hit a wall at distance d within t) = erfc(d / (2 sqrt(t)))."""
    return float(special.erfc(d / (2 * math.sqrt(t))))


def sup_hitting_check(a: float, t: float, cfg: PathEnsembleConfig) -> SupHittingResult:
    """Reflection-principle check: P(sup_{s<=t} B(s) > a) = erfc(a / (2 sqrt(t)))."""
    if a <= 0 or t <= 0:
        raise InvalidParameterError("need a > 0 and t > 0")
    n_steps, dt = _steps_for(t, cfg)
    sigma = math.sqrt(2 * dt)
    pos = np.zeros(cfg.n_paths)
    hit = np.zeros(cfg.n_paths, dtype=bool)
    alive = np.flatnonzero(~hit)
    for k in range(n_steps):
        if alive.size == 0:
            break
        rng = _step_rng(cfg.seed, _TAG_LINE, k)
        m = alive.size
        new = pos[alive] + rng.standard_normal(m) * sigma
        dead = new >= a
        if cfg.bridge_correction:
            u = rng.random(m)
            d0 = a - pos[alive]
            d1 = np.maximum(a - new, 0.0)
            dead |= u < np.exp(-d0 * d1 / dt)
        pos[alive] = new
        hit[alive[dead]] = True
        alive = alive[~dead]
    return SupHittingResult(mc=McEstimate.from_samples(hit.astype(float)),
                            exact=halfplane_hitting_exact(a, t))


def interval_escape_exact(a: float, t: float) -> float:
    """P(sup_{s<=t} |B(s)| > a), image-series closed form (variance 2t)."""
    if a <= 0 or t <= 0:
        raise InvalidParameterError("need a > 0 and t > 0")
    sigma = math.sqrt(2 * t)
    k_max = int(np.ceil((10 * sigma / a + 1) / 2)) + 2
    k = np.arange(-k_max, k_max + 1)
    upper = (2 * k + 1) * a / sigma
    lower = (2 * k - 1) * a / sigma
    survive = np.sum((-1.0) ** k * (special.ndtr(upper) - special.ndtr(lower)))
    return float(np.clip(1.0 - survive, 0.0, 1.0))


def escape_interval_mc(a: float, t: float, cfg: PathEnsembleConfig) -> McEstimate:
    """Monte Carlo P(sup_{s<=t} |B(s)| > a) from 0, absorbing at both walls."""
    if a <= 0 or t <= 0:
        raise InvalidParameterError("need a > 0 and t > 0")
    n_steps, dt = _steps_for(t, cfg)
    sigma = math.sqrt(2 * dt)
    pos = np.zeros(cfg.n_paths)
    out = np.zeros(cfg.n_paths, dtype=bool)
    alive = np.flatnonzero(~out)
    for k in range(n_steps):
        if alive.size == 0:
            break
        rng = _step_rng(cfg.seed, _TAG_INTERVAL, k)
        m = alive.size
        new = pos[alive] + rng.standard_normal(m) * sigma
        dead = np.abs(new) >= a
        if cfg.bridge_correction:
            u = rng.random(m)
            p_up = np.exp(-np.maximum(a - pos[alive], 0.0) * np.maximum(a - new, 0.0) / dt)
            p_dn = np.exp(-np.maximum(a + pos[alive], 0.0) * np.maximum(a + new, 0.0) / dt)
            dead |= u < (p_up + p_dn - p_up * p_dn)
        pos[alive] = new
        out[alive[dead]] = True
        alive = alive[~dead]
    return McEstimate.from_samples(out.astype(float))


# ---------------------------------------------------------------------------
# cone exit
# ---------------------------------------------------------------------------

def cone_exit_exact(spec: ConeSpec) -> float:
    """P(B[0, T(r)] stays in W(alpha)) = (2/pi) arctan(2 r^p / (r^{2p} - 1)), p = pi/alpha."""
    p = np.pi / spec.alpha
    log_x = p * math.log(spec.r)
    if log_x > 300:
        return float((2 / np.pi) * 2 * math.exp(-log_x))
    x = math.exp(log_x)
    return float((2 / np.pi) * math.atan2(2 * x, x * x - 1))


def _ray_distance(px: np.ndarray, py: np.ndarray, ux: float, uy: float):
    proj = np.maximum(px * ux + py * uy, 0.0)
    return np.hypot(px - proj * ux, py - proj * uy)


def _wedge_distances(x, y_abs, rad, ux, uy):
    """Distances to the two wall half-lines of the folded wedge (y >= 0 side).

    Inside the wedge the point-to-line distance |cross(p, u)| applies when
    the projection onto the wall direction is positive; otherwise the
    nearest wall point is the apex.
    """
    d_near = np.where(x * ux + y_abs * uy > 0, np.abs(y_abs * ux - x * uy), rad)
    d_far = np.where(x * ux - y_abs * uy > 0, np.abs(y_abs * ux + x * uy), rad)
    return d_near, d_far


def _cone_events(prev, new, rad_prev, u_wall, u_radius, ux, uy,
                 r: float, dt: float, bridge: bool):
    """Wall-death and radius-success flags per step; wall events take precedence.

    Returns (dead, reached, rad_new).  The sign test y_abs*ux - x*uy > 0 is
    sin(theta - beta) > 0, i.e. the folded angle exceeds the half opening.
    """
    ax = new[..., 0]
    ay = np.abs(new[..., 1])
    rad_new = np.sqrt(ax * ax + ay * ay)
    dead = ay * ux - ax * uy > 0
    if bridge:
        px = prev[..., 0]
        py = np.abs(prev[..., 1])
        d0n, d0f = _wedge_distances(px, py, rad_prev, ux, uy)
        d1n, d1f = _wedge_distances(ax, ay, rad_new, ux, uy)
        p_n = np.exp(-d0n * d1n / dt)
        p_f = np.exp(-d0f * d1f / dt)
        dead |= u_wall < (p_n + p_f - p_n * p_f)
        p_reach = np.exp(-np.maximum(r - rad_prev, 0) * np.maximum(r - rad_new, 0) / dt)
        reached = (~dead) & ((rad_new >= r) | (u_radius < p_reach))
    else:
        reached = (~dead) & (rad_new >= r)
    return dead, reached, rad_new


def cone_exit_mc(spec: ConeSpec, cfg: PathEnsembleConfig) -> McEstimate:
    """Simulated cone exit law from (1, 0): absorb on the walls, stop at |B| = r.

    Scale invariance of the event makes the variance convention irrelevant
    here; dt only controls the discretization bias, which the wall and
    radius bridge corrections reduce from O(sqrt(dt)) to O(dt).  Straggler
    paths are finished in vectorized multi-step blocks.
    """
    dt = cfg.dt if cfg.dt is not None else CONE_DEFAULT_DT
    sigma = math.sqrt(2 * dt)
    beta = spec.alpha / 2
    ux, uy = math.cos(beta), math.sin(beta)

    pos = np.zeros((cfg.n_paths, 2))
    pos[:, 0] = 1.0
    rad = np.ones(cfg.n_paths)
    success = np.zeros(cfg.n_paths, dtype=bool)
    alive = np.arange(cfg.n_paths)

    max_steps = int(math.ceil(60 * spec.r ** 2 / dt))
    tail_block = 256
    k = 0
    while k < max_steps and alive.size:
        rng = _step_rng(cfg.seed, _TAG_CONE, k)
        m = alive.size
        if m > 2048:
            new = pos[alive] + rng.standard_normal((m, 2)) * sigma
            u = rng.random((m, 2))
            dead, reached, rad_new = _cone_events(
                pos[alive], new, rad[alive], u[:, 0], u[:, 1],
                ux, uy, spec.r, dt, cfg.bridge_correction)
            pos[alive] = new
            rad[alive] = rad_new
            success[alive[reached]] = True
            alive = alive[~(dead | reached)]
            k += 1
            continue
        # tail: advance a whole block of steps per draw
        kb = min(tail_block, max_steps - k)
        inc = rng.standard_normal((m, kb, 2)) * sigma
        u = rng.random((m, kb, 2))
        traj = pos[alive][:, None, :] + np.cumsum(inc, axis=1)
        prev = np.concatenate([pos[alive][:, None, :], traj[:, :-1]], axis=1)
        rad_prev = np.concatenate(
            [rad[alive][:, None], np.hypot(traj[:, :-1, 0], traj[:, :-1, 1])], axis=1)
        dead, reached, rad_new = _cone_events(
            prev, traj, rad_prev, u[..., 0], u[..., 1],
            ux, uy, spec.r, dt, cfg.bridge_correction)
        event = dead | reached
        has_event = event.any(axis=1)
        first = np.argmax(event, axis=1)
        hit_idx = alive[has_event]
        success[hit_idx] = reached[has_event, first[has_event]]
        pos[alive] = traj[:, -1]
        rad[alive] = rad_new[..., -1]
        alive = alive[~has_event]
        k += kb
    return McEstimate.from_samples(success.astype(float))


def scatter_uniform(rng_seed: int, n: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Deterministic uniform start points in a box, for ensemble experiments."""
    rng = _step_rng(rng_seed, _TAG_SCATTER, 0)
    return lo + rng.random((n, lo.size)) * (hi - lo)
