"""Phase shifts, S-matrix elements and partial-wave cross sections.

The regular solution is matched at r_m (beyond the certified potential
range) to the free pair (f, g) whose asymptotics are sin(kr - l pi/2) and
-cos(kr - l pi/2), realized as Riccati-Bessel functions

    f(r) = rho j_l(rho),   g(r) = rho y_l(rho),   rho = k r.

Writing L = u'(r_m)/u(r_m),

    tan(delta) = [k f'(rho) - L f(rho)] / [k g'(rho) - L g(rho)]

evaluated in the Wronskian form (multiplied through by u) so a node of u
at the match radius cannot blow up the ratio.  All interaction content of
the artifact funnels through the resulting delta_l(E) curves: the cross
section is sigma = (4 pi / k^2) sum_l (2l+1) sin^2(delta_l) and the single
channel S-matrix is exp(2 i delta).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .errors import GridResolutionError, MatchingError
from .potential import PotentialSpec
from .radial import (
    RadialGrid,
    batch_derivative,
    integrate_regular,
    integrate_regular_batch,
    solution_derivative,
)

_ILL_CONDITIONED = 1e-14


def riccati_bessel(ell: int, rho):
    """(f, f', g, g') with f = rho j_l, g = rho y_l; primes w.r.t. rho."""
    rho = np.asarray(rho, dtype=float)
    j = spherical_jn(ell, rho)
    jp = spherical_jn(ell, rho, derivative=True)
    y = spherical_yn(ell, rho)
    yp = spherical_yn(ell, rho, derivative=True)
    return rho * j, j + rho * jp, rho * y, y + rho * yp


@dataclass(frozen=True)
class PhaseShiftCurve:
    """Continuity-unwrapped delta_l on an ascending positive energy grid.

    The unwrapping is anchored at the lowest energy's principal value in
    (-pi/2, pi/2]; absolute (Levinson) normalization is a diagnostic for
    callers, not silently imposed here.
    """

    ell: int
    energies: np.ndarray
    deltas: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        d = np.asarray(self.deltas, dtype=float)
        if e.ndim != 1 or e.size != d.size:
            raise ValueError("energies and deltas must be 1-d arrays of equal length")
        if np.any(e <= 0.0):
            raise ValueError("phase-shift curve energies must be positive")
        if np.any(np.diff(e) <= 0.0):
            raise ValueError("phase-shift curve energies must be strictly increasing")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "deltas", d)

    @property
    def k(self) -> np.ndarray:
        return np.sqrt(2.0 * self.energies)

    def contains(self, energy: float) -> bool:
        return self.energies[0] <= energy <= self.energies[-1]

    def delta_at(self, energy: float) -> float:
        if not self.contains(energy):
            raise ValueError(
                f"E = {energy:g} outside curve range "
                f"[{self.energies[0]:g}, {self.energies[-1]:g}]"
            )
        return float(np.interp(energy, self.energies, self.deltas))


@dataclass(frozen=True)
class SMatrixPoint:
    ell: int
    energy: float
    s_value: complex
    amplitude_factor: complex


@dataclass(frozen=True)
class CrossSection:
    energy: float
    k: float
    sigma_partial: dict
    sigma_total: float


def _principal(value: float) -> float:
    """Fold into (-pi/2, pi/2]."""
    v = math.fmod(value, math.pi)
    if v > math.pi / 2.0:
        v -= math.pi
    elif v <= -math.pi / 2.0:
        v += math.pi
    return v


def _delta_from_match(ell, k, r_m, u_m, du_m) -> tuple:
    """(num, den) of tan(delta) in Wronskian form at one match point."""
    f, fp, g, gp = riccati_bessel(ell, k * r_m)
    num = k * fp * u_m - du_m * f
    den = k * gp * u_m - du_m * g
    return num, den


def default_match_radius(spec: PotentialSpec, k: float) -> float:
    """One asymptotic wavelength beyond the certified range."""
    return spec.range_radius + 2.0 * math.pi / k


def required_r_max(spec: PotentialSpec, k: float) -> float:
    """Caller precondition: two wavelengths of margin beyond the range."""
    return spec.range_radius + 4.0 * math.pi / k


def default_grid(
    spec: PotentialSpec,
    ell: int,
    k_lo: float,
    k_hi: Optional[float] = None,
    phase_tol: float = 1e-8,
) -> RadialGrid:
    """Uniform grid sized so the Numerov truncation stays under phase_tol.

    The per-step phase error for a wave of local wavenumber q is
    (qh)^5/480, accumulating to ~ q L (qh)^4 / 480 over a stretch L; the
    step is chosen against both the free tail (q = k to r_max) and the
    interior (q boosted by the well depth over the potential range).  A
    node is parked on any finite potential jump so the sampler's
    mean-value convention applies there.
    """
    if k_hi is None:
        k_hi = k_lo
    r_max = required_r_max(spec, k_lo) * 1.02 + 0.3 * math.pi / k_lo
    kr_tail = k_hi * r_max
    h = (phase_tol * 480.0 / max(kr_tail, 1.0)) ** 0.25 / k_hi / 1.4
    depth = spec.depth_scale()
    if depth > 0.0 and spec.range_radius > 0.0:
        k_in = math.sqrt(k_hi ** 2 + 2.0 * depth)
        kr_in = k_in * min(spec.range_radius, r_max)
        h_in = (phase_tol * 480.0 / max(kr_in, 1.0)) ** 0.25 / k_in / 1.4
        h = min(h, h_in)
    if spec.range_radius > 0.0:
        h = min(h, spec.range_radius / 64.0)
    wall = spec.wall_radius
    discs = spec.discontinuities()
    if discs:
        return RadialGrid.uniform_aligned(r_max, h, discs[0])
    r_min = wall if wall is not None else None
    span = r_max - (wall or 0.0)
    n = max(96, int(span / h) + 1)
    return RadialGrid.uniform(r_max, n, r_min=r_min)


def phase_shift(
    spec: PotentialSpec,
    ell: int,
    energy: float,
    grid: Optional[RadialGrid] = None,
    r_match: Optional[float] = None,
    phase_tol: float = 1e-8,
) -> float:
    """Principal-value phase shift in (-pi/2, pi/2] at one energy."""
    if energy <= 0.0:
        raise ValueError("phase shift defined for E > 0")
    k = math.sqrt(2.0 * energy)
    if grid is None:
        grid = default_grid(spec, ell, k, phase_tol=phase_tol)
    if grid.r_max < required_r_max(spec, k) * (1.0 - 1e-12):
        raise ValueError(
            f"grid.r_max = {grid.r_max:g} below required range + 4 pi / k = "
            f"{required_r_max(spec, k):g}"
        )
    if r_match is not None and r_match < spec.range_radius:
        raise MatchingError("matching radius lies inside the potential range")

    sol = integrate_regular(spec, ell, energy, grid)
    r_m_target = r_match if r_match is not None else default_match_radius(spec, k)
    quarter = math.pi / (2.0 * k)
    i_min = grid.n_log + 1
    i_max = grid.n_points - 3
    for attempt in range(4):
        i_m = min(max(grid.index_at_or_after(r_m_target), i_min), i_max)
        r_m = grid.r[i_m]
        u_m = float(sol.u[i_m])
        du_m = solution_derivative(sol, i_m)
        num, den = _delta_from_match(ell, k, r_m, u_m, du_m)
        scale = max(abs(k * u_m), abs(du_m), 1e-300)
        if abs(num) < _ILL_CONDITIONED * scale and abs(den) < _ILL_CONDITIONED * scale:
            r_m_target = r_m + quarter  # ill-conditioned match: retry shifted
            continue
        return _principal(math.atan2(num, den))
    raise MatchingError(
        "phase matching ill-conditioned after retries (numerator and "
        "denominator both vanish)"
    )


def _scan_group(spec, ell, energies, phase_tol):
    """Principal values for one octave of energies on a shared grid."""
    e = np.asarray(energies, dtype=float)
    k = np.sqrt(2.0 * e)
    k_lo, k_hi = float(k.min()), float(k.max())
    grid = default_grid(spec, ell, k_lo, k_hi, phase_tol=phase_tol)
    u = integrate_regular_batch(spec, ell, e, grid)
    out = np.empty_like(e)
    i_max = grid.n_points - 3
    for j in range(e.size):
        i_m = min(grid.index_at_or_after(default_match_radius(spec, k[j])), i_max)
        du = batch_derivative(spec, ell, e[j: j + 1], grid, u[j: j + 1], i_m)[0]
        num, den = _delta_from_match(ell, k[j], grid.r[i_m], u[j, i_m], du)
        scale = max(abs(k[j] * u[j, i_m]), abs(du), 1e-300)
        if abs(num) < _ILL_CONDITIONED * scale and abs(den) < _ILL_CONDITIONED * scale:
            out[j] = phase_shift(spec, ell, e[j], phase_tol=phase_tol)
        else:
            out[j] = _principal(math.atan2(num, den))
    return out


def _unwrap_step(prev: float, principal: float) -> float:
    m = round((prev - principal) / math.pi)
    return principal + m * math.pi


def phase_scan(
    spec: PotentialSpec,
    ell: int,
    energies: Sequence[float],
    phase_tol: float = 1e-8,
    max_refine_depth: int = 8,
) -> PhaseShiftCurve:
    """Unwrapped delta_l(E) over an ascending energy grid.

    Energies are batched per octave of k onto shared uniform grids.  The
    unwrapped curve adds integer multiples of pi for continuity; intervals
    whose unwrapped jump still exceeds pi/4 are bisected (up to
    max_refine_depth levels, the refined points joining the curve).  A
    jump that stays ambiguous (> 0.45 pi) at full depth flags a resonance
    narrower than the resolvable width.  A full pi rise hiding strictly
    inside one interval is invisible to point sampling; supply a grid
    dense enough for the structures sought.
    """
    e = np.asarray(list(energies), dtype=float)
    if e.ndim != 1 or e.size < 2:
        raise ValueError("phase_scan needs at least two energies")
    if np.any(e <= 0.0) or np.any(np.diff(e) <= 0.0):
        raise ValueError("energies must be positive and strictly increasing")

    principal = np.empty_like(e)
    k = np.sqrt(2.0 * e)
    group_start = 0
    while group_start < e.size:
        k0 = k[group_start]
        group_end = group_start
        while group_end < e.size and k[group_end] <= 2.0 * k0:
            group_end += 1
        principal[group_start:group_end] = _scan_group(
            spec, ell, e[group_start:group_end], phase_tol
        )
        group_start = group_end

    pts = list(zip(e.tolist(), principal.tolist()))
    out_e = [pts[0][0]]
    out_d = [_principal(pts[0][1])]

    def refine(e_lo, d_lo, e_hi, p_hi, depth):
        d_hi = _unwrap_step(d_lo, p_hi)
        if abs(d_hi - d_lo) <= math.pi / 4.0 or depth >= max_refine_depth:
            if abs(d_hi - d_lo) > 0.45 * math.pi:
                raise GridResolutionError(
                    f"unresolvable phase jump near E = {0.5 * (e_lo + e_hi):.6g}: "
                    "resonance narrower than the resolvable width"
                )
            out_e.append(e_hi)
            out_d.append(d_hi)
            return d_hi
        e_mid = 0.5 * (e_lo + e_hi)
        p_mid = phase_shift(spec, ell, e_mid, phase_tol=phase_tol)
        d_mid = refine(e_lo, d_lo, e_mid, p_mid, depth + 1)
        return refine(e_mid, d_mid, e_hi, p_hi, depth + 1)

    for i in range(1, len(pts)):
        refine(out_e[-1], out_d[-1], pts[i][0], pts[i][1], 0)

    return PhaseShiftCurve(ell=ell, energies=np.array(out_e), deltas=np.array(out_d))


def cross_section(curves: Sequence[PhaseShiftCurve], energy: float) -> CrossSection:
    """Partial and total cross sections at one energy (Eq. form 4pi/k^2 ...).

    delta is interpolated linearly between curve grid points; the adaptive
    scan's jump bound keeps that interpolation error small.
    """
    if energy <= 0.0:
        raise ValueError("cross section defined for E > 0")
    k = math.sqrt(2.0 * energy)
    partial = {}
    for curve in curves:
        d = curve.delta_at(energy)
        partial[curve.ell] = (4.0 * math.pi / k ** 2) * (2 * curve.ell + 1) * math.sin(d) ** 2
    return CrossSection(
        energy=float(energy),
        k=k,
        sigma_partial=partial,
        sigma_total=float(sum(partial.values())),
    )


def s_matrix(curve: PhaseShiftCurve, energy: float) -> SMatrixPoint:
    """S = exp(2 i delta) and the amplitude factor exp(i delta) sin(delta)."""
    d = curve.delta_at(energy)
    s = cmath.exp(2j * d)
    amp = cmath.exp(1j * d) * math.sin(d)
    return SMatrixPoint(ell=curve.ell, energy=float(energy), s_value=s, amplitude_factor=amp)


def suggest_ell_max(
    spec: PotentialSpec, e_max: float, tol: float = 1e-6, hard_cap: int = 40
) -> int:
    """Smallest l whose |delta| at e_max drops below tol, minus one.

    Centrifugal suppression guarantees termination for short-range
    potentials; hard_cap bounds the search regardless.
    """
    for ell in range(hard_cap + 1):
        d = phase_shift(spec, ell, e_max, phase_tol=min(tol * 1e-2, 1e-8))
        if abs(d) < tol:
            return max(ell - 1, 0)
    return hard_cap
