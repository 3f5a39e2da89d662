"""Central model potentials and their l-dependent effective curves.

All potentials are short range by contract: |V(r)| * r^2 must fall below
RANGE_EPSILON at the certified range radius.  That certificate is what
makes free (Riccati-Bessel) asymptotics legitimate for matching, so it is
enforced at construction time.

The effective radial potential for angular momentum l is

    V_eff(r) = V(r) + l(l+1) / (2 r^2)

whose well / barrier / outer-well structure ("two-valley" shape) drives
shape resonances and threshold suppression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import GridResolutionError

# Certifies the short-range contract |V(R)| * R^2 < RANGE_EPSILON.
# A truncated tail of this size perturbs matched phases far below the
# 1e-6 rad tolerances used downstream.
RANGE_EPSILON = 1e-10


class PotentialSpec:
    """Base class for central model potentials.

    Subclasses provide `evaluate` (vectorized), `range_radius`,
    `wall_radius` (hard-wall domain edge, or None) and `discontinuities`
    (finite jump radii, used by integrators to apply a mean-value
    convention at an aligned grid node).
    """

    @property
    def kind(self) -> str:
        return type(self).__name__

    @property
    def wall_radius(self) -> Optional[float]:
        return None

    def discontinuities(self) -> tuple[float, ...]:
        return ()

    @property
    def range_radius(self) -> float:
        raise NotImplementedError

    def evaluate(self, r):
        raise NotImplementedError

    def depth_scale(self) -> float:
        """Magnitude of the deepest attraction, for grid sizing heuristics."""
        return 0.0


@dataclass(frozen=True)
class Zero(PotentialSpec):
    """No interaction; the free-particle reference."""

    @property
    def range_radius(self) -> float:
        return 0.0

    def evaluate(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))


@dataclass(frozen=True)
class HardSphere(PotentialSpec):
    """Impenetrable sphere of radius a.

    Inside the wall the potential is reported as the sentinel value
    math.inf; integrators must instead start the domain at r = a with
    u(a) = 0, never doing arithmetic with the sentinel.
    """

    a: float

    def __post_init__(self):
        if self.a <= 0.0:
            raise ValueError("hard-sphere radius must be positive")

    @property
    def wall_radius(self) -> Optional[float]:
        return self.a

    @property
    def range_radius(self) -> float:
        return self.a

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.a, math.inf, 0.0)


@dataclass(frozen=True)
class SquareWell(PotentialSpec):
    """Attractive square well: V = -V0 for r < a, 0 beyond (V0 > 0)."""

    V0: float
    a: float

    def __post_init__(self):
        if self.V0 <= 0.0:
            raise ValueError("well depth V0 must be positive")
        if self.a <= 0.0:
            raise ValueError("well radius must be positive")

    @property
    def range_radius(self) -> float:
        return self.a

    def discontinuities(self) -> tuple[float, ...]:
        return (self.a,)

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.a, -self.V0, 0.0)

    def depth_scale(self) -> float:
        return self.V0


@dataclass(frozen=True)
class Yukawa(PotentialSpec):
    """Screened Coulomb attraction V(r) = -(Z/r) exp(-r/d).

    Fully screened (no -1/r tail), so the short-range contract holds; the
    parametric stand-in for a negative-ion-like effective interaction.
    """

    Z: float
    d: float

    def __post_init__(self):
        if self.Z <= 0.0:
            raise ValueError("Yukawa strength Z must be positive")
        if self.d <= 0.0:
            raise ValueError("Yukawa screening length d must be positive")

    @cached_property
    def _range(self) -> float:
        # Solve Z * R * exp(-R/d) = RANGE_EPSILON for the certificate radius.
        # g(R) = ln Z + ln R - R/d - ln eps is decreasing where R > d.
        target = math.log(RANGE_EPSILON)

        def g(R):
            return math.log(self.Z) + math.log(R) - R / self.d - target

        lo = self.d
        hi = self.d * 2.0
        while g(hi) > 0.0:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return hi

    @property
    def range_radius(self) -> float:
        return self._range

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            v = -(self.Z / r) * np.exp(-r / self.d)
        return v

    def depth_scale(self) -> float:
        # |V| at the screening length; the r -> 0 divergence is handled by
        # log-spaced grids, not by this heuristic.
        return self.Z / self.d


@dataclass(frozen=True)
class Tabulated(PotentialSpec):
    """Potential given on an ascending radial table, monotone-cubic inside.

    Monotone (PCHIP) interpolation avoids overshoot wells that plain cubic
    splines can fabricate between samples.  Queries beyond the last point
    return 0; queries below the first point are an error.
    """

    r_table: tuple
    v_table: tuple

    def __post_init__(self):
        r = np.asarray(self.r_table, dtype=float)
        v = np.asarray(self.v_table, dtype=float)
        if r.ndim != 1 or r.size < 4:
            raise ValueError("tabulated potential needs at least 4 points")
        if r.size != v.size:
            raise ValueError("r and V tables must have equal length")
        if r[0] <= 0.0:
            raise ValueError("first tabulated radius must be positive")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("tabulated radii must be strictly increasing")
        tail = np.abs(v[-3:]) * r[-3:] ** 2
        if np.any(tail >= RANGE_EPSILON):
            raise ValueError(
                "tabulated potential violates the short-range contract: "
                f"|V| r^2 = {tail.max():.3e} >= {RANGE_EPSILON:g} at the tail"
            )
        object.__setattr__(self, "r_table", tuple(float(x) for x in r))
        object.__setattr__(self, "v_table", tuple(float(x) for x in v))

    @cached_property
    def _interp(self) -> PchipInterpolator:
        return PchipInterpolator(np.asarray(self.r_table), np.asarray(self.v_table))

    @property
    def range_radius(self) -> float:
        return self.r_table[-1]

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r_table[0]):
            raise ValueError(
                f"tabulated potential queried below first grid point {self.r_table[0]:g}"
            )
        out = np.where(r > self.r_table[-1], 0.0, self._interp(np.clip(r, None, self.r_table[-1])))
        return out

    def depth_scale(self) -> float:
        return float(max(0.0, -min(self.v_table)))

    @classmethod
    def from_file(cls, path) -> "Tabulated":
        """Two-column whitespace-separated (r, V) text with '#' comments."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError("tabulated potential file must have two columns (r, V)")
        return cls(r_table=tuple(data[:, 0]), v_table=tuple(data[:, 1]))


def eval_potential(spec: PotentialSpec, r):
    """V(r) in hartree; r in bohr, scalar or array, all entries > 0.

    HardSphere reports the sentinel math.inf inside the wall.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0.0):
        raise ValueError("potential evaluation requires r > 0")
    out = spec.evaluate(r_arr)
    if np.isscalar(r) or r_arr.ndim == 0:
        return float(out)
    return out


def centrifugal(ell: int, r):
    r = np.asarray(r, dtype=float)
    return ell * (ell + 1) / (2.0 * r * r)


def effective_potential(spec: PotentialSpec, ell: int, r):
    """V(r) + l(l+1)/(2 r^2); sentinel-inf inside a hard wall."""
    return eval_potential(spec, r) + centrifugal(ell, np.asarray(r, dtype=float))


@dataclass(frozen=True)
class EffectiveCurve:
    """Sampled effective potential for one l, with detected features.

    Features are (radius, value) pairs refined parabolically from the
    sample triple around a discrete-derivative sign change; an absent
    feature is None, never fabricated.
    """

    spec: PotentialSpec
    ell: int
    r: np.ndarray
    v_eff: np.ndarray
    inner_minimum: Optional[tuple] = None
    barrier_maximum: Optional[tuple] = None
    outer_minimum: Optional[tuple] = None


def _parabolic_vertex(x0, x1, x2, y0, y1, y2):
    # Vertex of the parabola through three (x, y) samples (nonuniform OK).
    d1 = (y1 - y0) / (x1 - x0)
    d2 = (y2 - y1) / (x2 - x1)
    curv = (d2 - d1) / (x2 - x0)
    if curv == 0.0:
        return x1, y1
    xv = 0.5 * (x0 + x1 - d1 / curv)
    # Evaluate the same parabola at its vertex (Newton form).
    yv = y0 + d1 * (xv - x0) + curv * (xv - x0) * (xv - x1)
    return xv, yv


def effective_curve(spec: PotentialSpec, ell: int, grid) -> EffectiveCurve:
    """Sample V_eff on `grid` and locate inner-min / barrier / outer-min.

    `grid` is a RadialGrid (only its radii are used).  For a hard wall the
    samples start at the first grid point at or beyond the wall.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    r = np.asarray(grid.r, dtype=float)
    wall = spec.wall_radius
    if wall is not None:
        r = r[r >= wall * (1.0 - 1e-15)]
        if r.size < 8:
            raise GridResolutionError("grid has too few points beyond the hard wall")
    v = effective_potential(spec, ell, r)

    dv = np.diff(v)
    sign = np.sign(dv)
    extrema = []  # (index, 'min'|'max') at sample i+1 of the sign change
    for i in range(len(sign) - 1):
        if sign[i] < 0.0 and sign[i + 1] > 0.0:
            extrema.append((i + 1, "min"))
        elif sign[i] > 0.0 and sign[i + 1] < 0.0:
            extrema.append((i + 1, "max"))

    for (ia, _), (ib, _) in zip(extrema, extrema[1:]):
        if ib - ia < 3:
            raise GridResolutionError(
                f"effective-curve features separated by {ib - ia} grid points; refine the grid"
            )

    refined = []
    for idx, kind in extrema:
        lo, hi = idx - 1, idx + 1
        xv, yv = _parabolic_vertex(r[lo], r[idx], r[hi], v[lo], v[idx], v[hi])
        if not (r[lo] <= xv <= r[hi]):
            xv, yv = r[idx], v[idx]
        # A refined maximum must not undercut its bracketing samples.
        if kind == "max":
            yv = max(yv, v[lo], v[idx], v[hi])
        refined.append((kind, float(xv), float(yv)))

    inner_min = barrier = outer_min = None
    maxima = [f for f in refined if f[0] == "max"]
    if maxima:
        barrier = max(maxima, key=lambda f: f[2])
        mins_before = [f for f in refined if f[0] == "min" and f[1] < barrier[1]]
        mins_after = [f for f in refined if f[0] == "min" and f[1] > barrier[1]]
        if mins_before:
            inner_min = min(mins_before, key=lambda f: f[2])
        if mins_after:
            outer_min = min(mins_after, key=lambda f: f[2])
    else:
        mins = [f for f in refined if f[0] == "min"]
        if mins:
            inner_min = min(mins, key=lambda f: f[2])

    def strip(f):
        return None if f is None else (f[1], f[2])

    return EffectiveCurve(
        spec=spec,
        ell=ell,
        r=r,
        v_eff=v,
        inner_minimum=strip(inner_min),
        barrier_maximum=strip(barrier),
        outer_minimum=strip(outer_min),
    )


def classical_turning_point(ell: int, energy: float) -> float:
    """r_cl = (l + 1/2) / sqrt(2E) for the centrifugal barrier (a.u.)."""
    if energy <= 0.0:
        raise ValueError("classical turning point defined for E > 0")
    return (ell + 0.5) / math.sqrt(2.0 * energy)
