"""Outward integration of the radial Schrodinger equation and bound states.

The reduced radial function u(r) = r R(r) satisfies

    u''(r) = Q(r) u(r),      Q = 2 (V_eff - E),   V_eff = V + l(l+1)/(2 r^2)

integrated outward with the three-term Numerov recurrence

    f_{i+1} u_{i+1} = (12 - 10 f_i) u_i - f_{i-1} u_{i-1},
    f_i = 1 - (h^2 / 12) Q_i,

which is O(h^4) globally for smooth Q.  Two grid schemes are supported:

* Uniform: constant step from the first node to r_max.
* LogThenUniform: a geometric segment from r_switch * 1e-3 up to r_switch
  (default 0.1 bohr) resolving the r^(l+1) region and any near-origin
  divergence of V, then a uniform segment to r_max.  On the geometric
  segment the substitution x = ln r, w = u / sqrt(r) turns the equation
  into w'' = (r^2 Q + 1/4) w with a *constant* step in x, so the same
  Numerov recurrence applies; the segments are joined by a Taylor step.

Integration starts from a power-series seed u ~ r^(l+1) (1 + a1 r + ...)
built from the Laurent coefficients of V at the origin, so the leading
behaviour is exact and no irregular component is injected at the seed.
Overflow is guarded by a power-of-two renormalization, which keeps the
shooting objective's sign pattern exactly invariant under positive
rescaling of the start values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import GridResolutionError, PartialWaveError
from .potential import PotentialSpec, Yukawa, eval_potential

UNIFORM = "uniform"
LOG_THEN_UNIFORM = "log_then_uniform"

_OVERFLOW_GUARD = 1e100
_RESCALE = 2.0 ** -332  # exact power of two, ~1.1e-100


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radii with scheme metadata.

    For LOG_THEN_UNIFORM, `n_log` leading nodes are geometrically spaced
    on [r_switch * 1e-3, r_switch); the remainder is uniform on
    [r_switch, r_max].
    """

    r: np.ndarray
    scheme: str
    r_switch: Optional[float] = None
    n_log: int = 0

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size < 64:
            raise ValueError("radial grid needs at least 64 points")
        if r[0] <= 0.0:
            raise ValueError("first grid radius must be positive")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("grid radii must be strictly increasing")
        object.__setattr__(self, "r", r)

    @property
    def n_points(self) -> int:
        return int(self.r.size)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    @cached_property
    def uniform_step(self) -> float:
        tail = self.r[self.n_log:]
        return float(tail[1] - tail[0])

    @classmethod
    def uniform(cls, r_max: float, n_points: int, r_min: Optional[float] = None) -> "RadialGrid":
        if r_max <= 0.0:
            raise ValueError("r_max must be positive")
        if r_min is None:
            r_min = r_max / n_points
        return cls(r=np.linspace(r_min, r_max, n_points), scheme=UNIFORM)

    @classmethod
    def uniform_aligned(cls, r_max: float, h_target: float, align_radius: float) -> "RadialGrid":
        """Uniform grid r_i = i h whose nodes hit align_radius exactly.

        Used to park a node on a potential discontinuity so the sampling
        mean-value convention applies (see sample_potential).
        """
        if align_radius <= 0.0 or r_max <= align_radius:
            raise ValueError("need 0 < align_radius < r_max")
        m = max(1, math.ceil(align_radius / h_target))
        h = align_radius / m
        n = max(64, math.ceil(r_max / h))
        return cls(r=h * np.arange(1, n + 1), scheme=UNIFORM)

    @classmethod
    def log_then_uniform(
        cls,
        r_max: float,
        n_points: int,
        r_switch: float = 0.1,
        n_log: Optional[int] = None,
        r_min_factor: float = 1e-3,
    ) -> "RadialGrid":
        if not 0.0 < r_switch < r_max:
            raise ValueError("need 0 < r_switch < r_max")
        if n_log is None:
            n_log = max(64, n_points // 8)
        if n_log >= n_points - 64:
            raise ValueError("n_log leaves too few uniform points")
        r_min = r_switch * r_min_factor
        log_part = np.geomspace(r_min, r_switch, n_log, endpoint=False)
        uni_part = np.linspace(r_switch, r_max, n_points - n_log)
        return cls(
            r=np.concatenate([log_part, uni_part]),
            scheme=LOG_THEN_UNIFORM,
            r_switch=r_switch,
            n_log=int(n_log),
        )

    def index_at_or_after(self, radius: float) -> int:
        i = int(np.searchsorted(self.r, radius - 1e-15))
        if i >= self.n_points:
            raise ValueError(f"radius {radius:g} beyond grid r_max {self.r_max:g}")
        return i


@dataclass(frozen=True)
class RadialSolution:
    """Regular solution u(r) on a grid; overall scale arbitrary but finite."""

    spec: PotentialSpec
    ell: int
    energy: float
    grid: RadialGrid
    u: np.ndarray
    node_count: int


@dataclass(frozen=True)
class BoundState:
    """Normalized bound level: node count, l, E < 0 and u with int u^2 dr = 1."""

    n_radial: int
    ell: int
    energy: float
    grid: RadialGrid
    u: np.ndarray

    @property
    def kappa(self) -> float:
        return math.sqrt(-2.0 * self.energy)


# ---------------------------------------------------------------------------
# potential sampling
# ---------------------------------------------------------------------------

def sample_potential(spec: PotentialSpec, r: np.ndarray) -> np.ndarray:
    """V on the grid, with the jump-node mean convention.

    If a finite discontinuity of V falls exactly on a node (within 1e-9 of
    the local step), that node takes the mean of the one-sided limits.
    This restores the Numerov error order across the jump; grids that do
    not align a node with the jump simply lose accuracy there.
    """
    v = np.asarray(eval_potential(spec, r), dtype=float)
    for d in spec.discontinuities():
        i = int(np.argmin(np.abs(r - d)))
        step = r[min(i + 1, len(r) - 1)] - r[max(i - 1, 0)]
        if abs(r[i] - d) < 1e-9 * max(step, 1e-30):
            below = eval_potential(spec, d * (1.0 - 1e-12))
            above = eval_potential(spec, d * (1.0 + 1e-12))
            v[i] = 0.5 * (below + above)
    return v


def _veff(spec: PotentialSpec, ell: int, r: np.ndarray) -> np.ndarray:
    return sample_potential(spec, r) + ell * (ell + 1) / (2.0 * r * r)


def _series_coeffs(spec: PotentialSpec, ell: int):
    """Laurent data (w_-1, w_0 offset, w_1, w_2) of 2V(r) near r = 0."""
    if isinstance(spec, Yukawa):
        z, d = spec.Z, spec.d
        return (-2.0 * z, 2.0 * z / d, -z / d ** 2, z / (3.0 * d ** 3))
    # Kinds finite at the origin: constant term from V just inside.
    probe = 1e-6
    if spec.wall_radius is not None:
        return (0.0, 0.0, 0.0, 0.0)
    v0 = float(eval_potential(spec, probe))
    return (0.0, 2.0 * v0, 0.0, 0.0)


def _series_seed(spec: PotentialSpec, ell: int, energies: np.ndarray, r0: float, r1: float):
    """Seed values (u0, u1) per energy from u = r^(l+1)(1 + a1 r + ... + a4 r^4).

    The recursion n (n + 2l + 1) a_n = sum_m w_m a_{n-2-m} follows from
    u'' = [l(l+1)/r^2 + w(r)] u with w = 2(V - E) = sum w_m r^m.
    """
    wm1, w0_pot, w1, w2 = _series_coeffs(spec, ell)
    e = np.asarray(energies, dtype=float)
    w0 = w0_pot - 2.0 * e
    a1 = wm1 / (2.0 * (ell + 1.0)) * np.ones_like(e)
    a2 = (wm1 * a1 + w0) / (2.0 * (2.0 * ell + 3.0))
    a3 = (wm1 * a2 + w0 * a1 + w1) / (3.0 * (2.0 * ell + 4.0))
    a4 = (wm1 * a3 + w0 * a2 + w1 * a1 + w2) / (4.0 * (2.0 * ell + 5.0))

    def val(r):
        poly = 1.0 + r * (a1 + r * (a2 + r * (a3 + r * a4)))
        return poly  # the common r^(l+1) power is applied as a ratio below

    # Work with the ratio (r0/r1)^(l+1) to avoid under/overflow of r^(l+1).
    u1 = val(r1)
    u0 = val(r0) * (r0 / r1) ** (ell + 1)
    return u0, u1


# ---------------------------------------------------------------------------
# Numerov propagation
# ---------------------------------------------------------------------------

def _numerov_scalar(q: np.ndarray, h: float, u0: float, u1: float):
    """Propagate u'' = q u on a uniform grid; returns the u array.

    Where |h^2 q / 12| is no longer small the classic three-term form is
    used.  In the small-coefficient (oscillatory tail) region the
    recurrence is rewritten in summed form on y = f u,

        s_i = s_{i-1} + g_i y_i,   y_{i+1} = y_i + s_i,
        g_i = h^2 q_i / f_i,       f_i = 1 - h^2 q_i / 12,

    with compensated accumulation of both s and y.  This avoids the
    coherent phase drift caused by rounding f toward 1, which otherwise
    grows with step count.  Renormalization uses an exact power of two so
    sign patterns are invariant under positive rescaling of the seed.
    """
    n = q.size
    u = np.empty(n, dtype=float)
    u[0], u[1] = u0, u1
    c = h * h / 12.0
    cq = c * q
    f = 1.0 - cq
    small = np.abs(cq) <= 1e-3
    not_small = np.nonzero(~small)[0]
    j0 = 1 if not_small.size == 0 else min(int(not_small[-1]) + 1, n - 1)

    fl = f.tolist()
    if j0 >= 2:
        ull, ul = u0, u1
        for i in range(2, j0 + 1):
            ui = ((12.0 - 10.0 * fl[i - 1]) * ul - fl[i - 2] * ull) / fl[i]
            if abs(ui) > _OVERFLOW_GUARD:
                u[:i] *= _RESCALE
                ui *= _RESCALE
                ul *= _RESCALE
            u[i] = ui
            ull = ul
            ul = ui
    if j0 >= n - 1:
        return u

    g = ((12.0 * cq) / f).tolist()
    y_prev = fl[j0 - 1] * u[j0 - 1]
    y = fl[j0] * u[j0]
    s = y - y_prev
    comp_y = 0.0
    comp_s = 0.0
    for i in range(j0, n - 1):
        ds = g[i] * y
        ts = s + (ds + comp_s)
        comp_s = (ds + comp_s) - (ts - s)
        s = ts
        t = y + (s + comp_y)
        comp_y = (s + comp_y) - (t - y)
        y = t
        ui = y / fl[i + 1]
        if abs(ui) > _OVERFLOW_GUARD:
            u[: i + 1] *= _RESCALE
            y *= _RESCALE
            s *= _RESCALE
            comp_y *= _RESCALE
            comp_s *= _RESCALE
            ui *= _RESCALE
        u[i + 1] = ui
    return u


def _numerov_batch(q: np.ndarray, h: float, u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    """Vectorized counterpart of _numerov_scalar; q has shape (nE, nr)."""
    n_e, n_r = q.shape
    u = np.empty((n_e, n_r), dtype=float)
    c = h * h / 12.0
    cq = c * q
    f = 1.0 - cq
    u[:, 0] = u0
    u[:, 1] = u1

    small = np.all(np.abs(cq) <= 1e-3, axis=0)
    not_small = np.nonzero(~small)[0]
    j0 = 1 if not_small.size == 0 else min(int(not_small[-1]) + 1, n_r - 1)

    if j0 >= 2:
        ull = u[:, 0].copy()
        ul = u[:, 1].copy()
        for i in range(2, j0 + 1):
            ui = ((12.0 - 10.0 * f[:, i - 1]) * ul - f[:, i - 2] * ull) / f[:, i]
            if i % 64 == 0 and np.any(np.abs(ui) > 1e80):
                scale = np.where(np.abs(ui) > 1e80, _RESCALE, 1.0)
                u[:, :i] *= scale[:, None]
                ui = ui * scale
                ul = ul * scale
            u[:, i] = ui
            ull = ul
            ul = ui
    if j0 >= n_r - 1:
        return u

    g = (12.0 * cq) / f
    y_prev = f[:, j0 - 1] * u[:, j0 - 1]
    y = f[:, j0] * u[:, j0]
    s = y - y_prev
    comp_y = np.zeros(n_e)
    comp_s = np.zeros(n_e)
    for i in range(j0, n_r - 1):
        ds = g[:, i] * y
        ts = s + (ds + comp_s)
        comp_s = (ds + comp_s) - (ts - s)
        s = ts
        t = y + (s + comp_y)
        comp_y = (s + comp_y) - (t - y)
        y = t
        ui = y / f[:, i + 1]
        if i % 64 == 0 and np.any(np.abs(ui) > 1e80):
            scale = np.where(np.abs(ui) > 1e80, _RESCALE, 1.0)
            u[:, : i + 1] *= scale[:, None]
            y = y * scale
            s = s * scale
            comp_y = comp_y * scale
            comp_s = comp_s * scale
            ui = ui * scale
        u[:, i + 1] = ui
    return u


def _check_step_resolution(q: np.ndarray, steps: np.ndarray):
    """Reject grids where an allowed-region wavelength spans < 6 steps."""
    allowed = q < 0.0
    if not np.any(allowed):
        return
    lam = 2.0 * math.pi / np.sqrt(-q[allowed])
    ratio = lam / steps[allowed]
    worst = ratio.min()
    if worst < 6.0:
        raise GridResolutionError(
            f"local wavelength spans only {worst:.2f} grid steps in the "
            "classically allowed region; refine the grid"
        )


def _count_nodes(u: np.ndarray, upto: Optional[int] = None) -> int:
    x = u[:upto] if upto is not None else u
    x = x[x != 0.0]
    if x.size < 2:
        return 0
    return int(np.count_nonzero(np.signbit(x[:-1]) != np.signbit(x[1:])))


def integrate_regular(spec: PotentialSpec, ell: int, energy: float, grid: RadialGrid) -> RadialSolution:
    """Regular solution by outward Numerov integration.

    For a hard wall the grid must start exactly at the wall radius, where
    u = 0 is imposed; otherwise the power-series seed fixes u ~ r^(l+1).
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    r = grid.r
    wall = spec.wall_radius
    if wall is not None:
        if abs(r[0] - wall) > 1e-12 * max(1.0, wall):
            raise ValueError("hard-wall integration requires the grid to start at r = a")
        if grid.scheme != UNIFORM:
            raise ValueError("hard-wall integration uses a uniform grid from the wall")

    if grid.scheme == UNIFORM:
        u = _integrate_uniform(spec, ell, energy, grid)
    else:
        u = _integrate_log_then_uniform(spec, ell, energy, grid)
    return RadialSolution(
        spec=spec, ell=ell, energy=float(energy), grid=grid, u=u, node_count=_count_nodes(u)
    )


def _integrate_uniform(spec: PotentialSpec, ell: int, energy: float, grid: RadialGrid) -> np.ndarray:
    r = grid.r
    h = grid.uniform_step
    if spec.wall_radius is not None:
        veff = np.empty_like(r)
        veff[0] = 0.0  # u(a) = 0; the wall node value of V is never used
        veff[1:] = _veff(spec, ell, r[1:])
        q = 2.0 * (veff - energy)
        q[0] = q[1]
        _check_step_resolution(q[1:], np.full(r.size - 1, h))
        u0, u1 = 0.0, h
    else:
        q = 2.0 * (_veff(spec, ell, r) - energy)
        _check_step_resolution(q, np.full(r.size, h))
        u0, u1 = _series_seed(spec, ell, energy, r[0], r[1])
        u0, u1 = float(u0), float(u1)
    u = _numerov_scalar(q, h, u0, u1)
    return u


def _integrate_log_then_uniform(spec: PotentialSpec, ell: int, energy: float, grid: RadialGrid) -> np.ndarray:
    r = grid.r
    nl = grid.n_log
    r_log = r[:nl]
    # include the switch node (first uniform node) as the end of the log leg
    x = np.log(np.append(r_log, r[nl]))
    hx = x[1] - x[0]
    if np.ptp(np.diff(x)) > 1e-9 * hx:
        raise ValueError("log segment is not geometric")
    rr = np.exp(x)
    q_r = 2.0 * (_veff(spec, ell, rr) - energy)
    q_x = rr * rr * q_r + 0.25
    _check_step_resolution(q_x, np.full(q_x.size, hx))

    # w = u / sqrt(r); seed from the series at the two innermost radii.
    u0, u1 = _series_seed(spec, ell, energy, rr[0], rr[1])
    w0 = float(u0) / math.sqrt(rr[0])
    w1 = float(u1) / math.sqrt(rr[1])
    w = _numerov_scalar(q_x, hx, w0, w1)
    u_log_full = w * np.sqrt(rr)

    # Join: values and derivative at the switch radius from the log leg.
    i_end = len(rr) - 1
    w_prime = _numerov_derivative(w, q_x, hx, i_end)
    r_s = rr[i_end]
    u_s = u_log_full[i_end]
    up_s = (0.5 * w[i_end] + w_prime) / math.sqrt(r_s)

    # Uniform leg seeded by a 4th-order Taylor step from (u_s, u'_s).
    r_uni = r[nl:]
    h = r_uni[1] - r_uni[0]
    q_uni = 2.0 * (_veff(spec, ell, r_uni) - energy)
    _check_step_resolution(q_uni, np.full(r_uni.size, h))
    q0 = q_uni[0]
    q1 = (-3.0 * q_uni[0] + 4.0 * q_uni[1] - q_uni[2]) / (2.0 * h)
    q2 = (q_uni[0] - 2.0 * q_uni[1] + q_uni[2]) / (h * h)
    u_next = (
        u_s
        + h * up_s
        + (h * h / 2.0) * q0 * u_s
        + (h ** 3 / 6.0) * (q1 * u_s + q0 * up_s)
        + (h ** 4 / 24.0) * (q2 * u_s + 2.0 * q1 * up_s + q0 * q0 * u_s)
    )
    u_uni = _numerov_scalar(q_uni, h, u_s, u_next)

    # Stitch, keeping a consistent overall scale (both legs own arbitrary
    # but finite scales; the log leg already matches u_uni[0] exactly).
    return np.concatenate([u_log_full[:-1], u_uni])


def _numerov_derivative(u: np.ndarray, q: np.ndarray, h: float, i: int) -> float:
    """du/dx at node i, consistent with u'' = q u to O(h^4).

    Interior nodes use the symmetric form
        u'_i = [u_{i+1} - u_{i-1} - (h^3/3) q'_i u_i] / (2h + (h^3/3) q_i h... )
    with q' from a central difference; the end node falls back to a
    one-sided 5-point stencil.
    """
    n = u.size
    if 1 <= i <= n - 2:
        qp = (q[i + 1] - q[i - 1]) / (2.0 * h)
        num = (u[i + 1] - u[i - 1]) - (h ** 3 / 3.0) * qp * u[i]
        den = 2.0 * h + (h ** 3 / 3.0) * q[i]
        return float(num / den)
    if i == n - 1:
        c = np.array([25.0, -48.0, 36.0, -16.0, 3.0]) / (12.0 * h)
        return float(np.dot(c, u[n - 1: n - 6: -1]))
    c = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h)
    return float(np.dot(c, u[i: i + 5]))


def solution_derivative(sol: RadialSolution, index: int) -> float:
    """u'(r) at a uniform-segment node of an integrated solution."""
    grid = sol.grid
    if index < grid.n_log + 1:
        raise ValueError("derivative requested inside the geometric segment")
    r_uni = grid.r[grid.n_log:]
    h = grid.uniform_step
    q = 2.0 * (_veff(sol.spec, sol.ell, r_uni) - sol.energy)
    if sol.spec.wall_radius is not None and grid.n_log == 0:
        q[0] = q[1] if r_uni[0] <= sol.spec.wall_radius else q[0]
    return _numerov_derivative(sol.u[grid.n_log:], q, h, index - grid.n_log)


def integrate_regular_batch(
    spec: PotentialSpec, ell: int, energies: np.ndarray, grid: RadialGrid
) -> np.ndarray:
    """Regular solutions for many energies on one uniform grid: (nE, nr)."""
    if grid.scheme != UNIFORM:
        raise ValueError("batch integration supports uniform grids only")
    e = np.asarray(energies, dtype=float)
    r = grid.r
    h = grid.uniform_step
    wall = spec.wall_radius
    if wall is not None:
        if abs(r[0] - wall) > 1e-12 * max(1.0, wall):
            raise ValueError("hard-wall integration requires the grid to start at r = a")
        veff = np.empty_like(r)
        veff[0] = 0.0
        veff[1:] = _veff(spec, ell, r[1:])
        q = 2.0 * (veff[None, :] - e[:, None])
        q[:, 0] = q[:, 1]
        u0 = np.zeros_like(e)
        u1 = np.full_like(e, h)
    else:
        veff = _veff(spec, ell, r)
        q = 2.0 * (veff[None, :] - e[:, None])
        u0, u1 = _series_seed(spec, ell, e, r[0], r[1])
    _check_step_resolution(q.min(axis=0), np.full(r.size, h))
    _check_step_resolution(q.max(axis=0), np.full(r.size, h))
    return _numerov_batch(q, h, u0, u1)


def batch_derivative(
    spec: PotentialSpec, ell: int, energies: np.ndarray, grid: RadialGrid, u: np.ndarray, index: int
) -> np.ndarray:
    """u'(r) per batch row at a node of a uniform grid."""
    r = grid.r
    h = grid.uniform_step
    e = np.asarray(energies, dtype=float)
    i = index
    veff_local = _veff(spec, ell, r[i - 1: i + 2])
    q_local = 2.0 * (veff_local[None, :] - e[:, None])
    qp = (q_local[:, 2] - q_local[:, 0]) / (2.0 * h)
    num = (u[:, i + 1] - u[:, i - 1]) - (h ** 3 / 3.0) * qp * u[:, i]
    den = 2.0 * h + (h ** 3 / 3.0) * q_local[:, 1]
    return num / den


# ---------------------------------------------------------------------------
# bound states
# ---------------------------------------------------------------------------

def default_bound_grid(spec: PotentialSpec, ell: int, e_window) -> RadialGrid:
    """Grid sized for shooting over the energy window."""
    e_lo, e_hi = e_window
    kappa_min = math.sqrt(-2.0 * e_hi)
    r_match = max(spec.range_radius + 2.0, 10.0 / kappa_min)
    r_max = 1.15 * r_match + 2.0
    # Resolve the fastest interior oscillation: kinetic scale is depth + |E|.
    e_kin = abs(e_lo) + max(spec.depth_scale(), 0.5)
    h = 2.0 * math.pi / math.sqrt(2.0 * e_kin) / 40.0
    wall = spec.wall_radius
    if wall is not None:
        n = max(96, int((r_max - wall) / h) + 1)
        return RadialGrid.uniform(r_max, n, r_min=wall)
    if isinstance(spec, Yukawa):
        n_uni = max(512, int((r_max - 0.1) / h) + 1)
        n_log = max(256, int(40.0 * math.sqrt(2.0 * spec.Z * 0.1)))
        return RadialGrid.log_then_uniform(r_max, n_uni + n_log, r_switch=0.1, n_log=n_log)
    n = max(96, int(r_max / h) + 1)
    return RadialGrid.uniform(r_max, n)


def _match_index(grid: RadialGrid, spec: PotentialSpec, kappa: float) -> int:
    r_match = max(spec.range_radius + 1.0, 10.0 / kappa)
    r_match = min(r_match, grid.r_max - 2.0 * grid.uniform_step)
    return grid.index_at_or_after(r_match)


def find_bound_states(
    spec: PotentialSpec,
    ell: int,
    e_window,
    n_max: int,
    grid: Optional[RadialGrid] = None,
) -> list:
    """Bound levels in (E_lo, E_hi) by node-counted shooting.

    The shooting objective is the logarithmic-derivative mismatch between
    the outward solution and the decaying tail exp(-kappa r), evaluated in
    the Wronskian-like form  u'(r_m) + kappa u(r_m)  which is sign-exact
    under rescaling of u.  Roots are bracketed by node-count jumps and
    refined by bisection to |dE| < 1e-10 hartree.
    """
    e_lo, e_hi = float(e_window[0]), float(e_window[1])
    if not e_lo < e_hi:
        raise ValueError("energy window must satisfy E_lo < E_hi")
    if e_hi >= 0.0:
        if e_hi == 0.0:
            raise ValueError(
                "E_hi = 0 is rejected: kappa = sqrt(-2E) needs a strictly negative endpoint"
            )
        raise ValueError("bound-state window must lie at negative energies")
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if grid is None:
        grid = default_bound_grid(spec, ell, (e_lo, e_hi))

    def shoot(energy: float):
        sol = integrate_regular(spec, ell, energy, grid)
        kappa = math.sqrt(-2.0 * energy)
        i_m = _match_index(grid, spec, kappa)
        u_m = sol.u[i_m]
        du_m = solution_derivative(sol, i_m) if grid.n_log else _numerov_derivative(
            sol.u, 2.0 * (_veff(spec, ell, grid.r) - energy), grid.uniform_step, i_m
        )
        nodes = _count_nodes(sol.u, upto=i_m + 1)
        scale = float(np.max(np.abs(sol.u[: i_m + 1]))) or 1.0
        return (du_m + kappa * u_m) / scale, nodes

    # Scan node counts across the window.
    n_scan = max(8, 4 * n_max)
    scan_e = np.linspace(e_lo, e_hi, n_scan)
    scan = [shoot(e) for e in scan_e]

    # Energies bounding intervals of constant node count.
    boundaries = [e_lo]
    for i in range(len(scan_e) - 1):
        lo_e, hi_e = scan_e[i], scan_e[i + 1]
        n_lo, n_hi = scan[i][1], scan[i + 1][1]
        while n_hi > n_lo:
            # locate one transition inside (lo_e, hi_e) by integer bisection
            a, b = lo_e, hi_e
            na = n_lo
            for _ in range(60):
                m = 0.5 * (a + b)
                nm = shoot(m)[1]
                if nm > na:
                    b = m
                else:
                    a = m
                if b - a < 1e-9 * max(abs(b), 1.0):
                    break
            boundaries.append(0.5 * (a + b))
            lo_e = b
            n_lo = shoot(b)[1] if b != hi_e else n_hi
            if n_lo == na:
                break
    boundaries.append(e_hi)
    boundaries = sorted(set(boundaries))

    states = []
    for a, b in zip(boundaries, boundaries[1:]):
        fa, _ = shoot(a)
        fb, _ = shoot(b)
        if fa == 0.0:
            root = a
        elif fb == 0.0:
            root = b
        elif (fa > 0.0) != (fb > 0.0):
            lo, hi = a, b
            flo = fa
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                fm, _ = shoot(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (fm > 0.0) == (flo > 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            root = 0.5 * (lo + hi)
        else:
            continue
        states.append(_build_bound_state(spec, ell, root, grid))
        if len(states) > n_max:
            raise PartialWaveError(
                f"found more than n_max={n_max} bound states in the window"
            )

    states.sort(key=lambda s: s.energy)
    return states


def _build_bound_state(spec: PotentialSpec, ell: int, energy: float, grid: RadialGrid) -> BoundState:
    sol = integrate_regular(spec, ell, energy, grid)
    kappa = math.sqrt(-2.0 * energy)
    i_m = _match_index(grid, spec, kappa)
    u = sol.u.copy()
    # Beyond the matching radius the residual growing component is a
    # finite-precision artifact; replace it with the analytic decay.
    u[i_m:] = u[i_m] * np.exp(-kappa * (grid.r[i_m:] - grid.r[i_m]))
    nodes = _count_nodes(u, upto=i_m + 1)
    # Normalize: quadrature over the grid plus the analytic tail integral.
    norm_sq = _integral(u * u, grid.r) + (u[-1] ** 2) / (2.0 * kappa)
    u /= math.sqrt(norm_sq)
    # Positive-near-origin convention.
    first = np.nonzero(np.abs(u) > 1e-14 * np.max(np.abs(u)))[0]
    if first.size and u[first[0]] < 0.0:
        u = -u
    return BoundState(n_radial=nodes, ell=ell, energy=float(energy), grid=grid, u=u)


def _integral(y: np.ndarray, x: np.ndarray) -> float:
    from scipy.integrate import simpson

    return float(simpson(y, x=x))
