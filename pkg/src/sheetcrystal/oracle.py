"""Independent bound-state solver for delta potentials with constant offsets.

Nothing here reuses the exponential-map construction: for a trial energy
E = -hbar^2*kappa^2/(2m) the solution decaying toward -inf is propagated
across every region and delta site, and the coefficient of the growing tail
at +inf is scanned for sign changes in kappa.  Each bracket is bisected to
the requested tolerance and the state is rebuilt segment by segment, so the
result is an exact piecewise closed form whose only approximation is the
location of the root.

The propagated pair is rescaled between sites (and exponentials are factored
as exp(-rate*width) forms), so scans cannot overflow no matter how wide or
deep the regions are.  The scan is a fixed grid with a deterministic 8x
refinement pass; identical inputs give identical output, bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .duality import DeltaPotentialProblem
from .errors import BreakpointMismatchError, NoBoundStatesError
from .units import UnitSystem
from .wavefunction import PiecewiseExpWavefunction, Segment, _square_integral_finite

REGIME_SWITCH_RTOL = 1e-12
DEFAULT_SCAN_POINTS = 2048
DEFAULT_BISECTION_TOL = 1e-13
REFINEMENT_FACTOR = 8


@dataclass(frozen=True)
class BoundState:
    """One bound state: energy, its decay rate at infinity, and the state."""

    energy: float
    kappa: float
    wavefunction: PiecewiseExpWavefunction


@dataclass(frozen=True, eq=False)
class ScanMetadata:
    """How the roots were found; kept for reproducibility and audits."""

    kappa_max: float
    scan_points: int
    refinement_factor: int
    kappa_grid: np.ndarray
    brackets: tuple[tuple[float, float], ...]
    root_residuals: tuple[float, ...]
    scan_too_coarse: bool


@dataclass(frozen=True, eq=False)
class BoundStateList:
    """Bound states in ascending energy order plus the scan metadata."""

    states: tuple[BoundState, ...]
    metadata: ScanMetadata

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @property
    def energies(self) -> tuple[float, ...]:
        return tuple(s.energy for s in self.states)


def _regime_split(d, scale):
    """Masks for the exponential / linear / oscillatory regimes of U - E."""
    switch = REGIME_SWITCH_RTOL * scale
    exp_mask = d > switch
    osc_mask = d < -switch
    return exp_mask, osc_mask


def _growing_tail_coefficient(problem: DeltaPotentialProblem, kappas: np.ndarray) -> np.ndarray:
    """Scaled coefficient of the +inf growing tail; roots are bound states.

    The returned values share the sign (but not the magnitude) of the true
    coefficient: the propagated pair is renormalized by a positive factor
    after every region to keep everything in range.
    """
    units = problem.units
    half_h2_over_m = 0.5 * units.hbar**2 / units.mass
    jump_scale = 2.0 * units.mass / units.hbar**2
    positions = problem.positions
    strengths = problem.strengths
    offsets = problem.region_offsets

    kappas = np.asarray(kappas, dtype=float)
    energies = -half_h2_over_m * kappas**2
    psi = np.ones_like(kappas)
    dpsi = kappas.copy()

    for i, (z, g) in enumerate(zip(positions, strengths)):
        dpsi = dpsi + jump_scale * g * psi
        if i == len(positions) - 1:
            break
        width = positions[i + 1] - z
        offset = offsets[i + 1]
        d = offset - energies
        curvature = d / half_h2_over_m  # rate^2 = 2m(U - E)/hbar^2
        scale = np.maximum(1.0, np.maximum(np.abs(energies), abs(offset)))
        exp_mask, osc_mask = _regime_split(d, scale)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            rate = np.sqrt(np.where(exp_mask, curvature, 1.0))
            damp = np.exp(-2.0 * rate * width)
            ch = 0.5 * (1.0 + damp)
            sh = 0.5 * (1.0 - damp)
            psi_exp = psi * ch + dpsi * sh / rate
            dpsi_exp = psi * rate * sh + dpsi * ch

            wave = np.sqrt(np.where(osc_mask, -curvature, 1.0))
            cos_w = np.cos(wave * width)
            sin_w = np.sin(wave * width)
            psi_osc = psi * cos_w + dpsi * sin_w / wave
            dpsi_osc = -psi * wave * sin_w + dpsi * cos_w

            psi_lin = psi + dpsi * width
        psi_new = np.where(exp_mask, psi_exp, np.where(osc_mask, psi_osc, psi_lin))
        dpsi_new = np.where(exp_mask, dpsi_exp, np.where(osc_mask, dpsi_osc, dpsi))
        norm = np.maximum(np.abs(psi_new), np.abs(dpsi_new))
        norm = np.where(norm > 0.0, norm, 1.0)
        psi = psi_new / norm
        dpsi = dpsi_new / norm

    return dpsi + kappas * psi


def _mismatch_scalar(problem: DeltaPotentialProblem, kappa: float) -> float:
    return float(_growing_tail_coefficient(problem, np.array([kappa]))[0])


def _bisect_root(problem: DeltaPotentialProblem, lo: float, hi: float, f_lo: float, tol: float) -> float:
    sign_lo = math.copysign(1.0, f_lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = _mismatch_scalar(problem, mid)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == sign_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _reconstruct_state(problem: DeltaPotentialProblem, kappa: float) -> BoundState:
    """Rebuild the normalized piecewise state at a located root.

    Coefficients are carried with a running log scale so deep tails cannot
    underflow the bookkeeping; the residual growing-tail coefficient is
    dropped (it is below the bisection tolerance by construction).
    """
    units = problem.units
    half_h2_over_m = 0.5 * units.hbar**2 / units.mass
    jump_scale = 2.0 * units.mass / units.hbar**2
    positions = problem.positions
    strengths = problem.strengths
    offsets = problem.region_offsets
    energy = -half_h2_over_m * kappa**2

    segments = [Segment("exp", kappa, positions[0], 0.0, 1.0)]
    scale_logs = [0.0]
    psi, dpsi, log_scale = 1.0, kappa, 0.0

    for i, (z, g) in enumerate(zip(positions, strengths)):
        dpsi = dpsi + jump_scale * g * psi
        if i == len(positions) - 1:
            decay = (kappa * psi - dpsi) / (2.0 * kappa)
            segments.append(Segment("exp", kappa, z, decay, 0.0))
            scale_logs.append(log_scale)
            break
        width = positions[i + 1] - z
        offset = offsets[i + 1]
        d = offset - energy
        switch = REGIME_SWITCH_RTOL * max(1.0, abs(energy), abs(offset))
        if d > switch:
            rate = math.sqrt(d / half_h2_over_m)
            decay = (rate * psi - dpsi) / (2.0 * rate)
            grow = (rate * psi + dpsi) / (2.0 * rate)
            segments.append(Segment("exp", rate, z, decay, grow))
            scale_logs.append(log_scale)
            damp = math.exp(-2.0 * rate * width)
            ch = 0.5 * (1.0 + damp)
            sh = 0.5 * (1.0 - damp)
            psi, dpsi = psi * ch + dpsi * sh / rate, psi * rate * sh + dpsi * ch
            log_scale += rate * width
        elif d < -switch:
            wave = math.sqrt(-d / half_h2_over_m)
            segments.append(Segment("osc", wave, z, psi, dpsi / wave))
            scale_logs.append(log_scale)
            cos_w, sin_w = math.cos(wave * width), math.sin(wave * width)
            psi, dpsi = psi * cos_w + dpsi * sin_w / wave, -psi * wave * sin_w + dpsi * cos_w
        else:
            segments.append(Segment("lin", 0.0, z, psi, dpsi))
            scale_logs.append(log_scale)
            psi, dpsi = psi + dpsi * width, dpsi
        renorm = max(abs(psi), abs(dpsi))
        if renorm > 0.0:
            psi /= renorm
            dpsi /= renorm
            log_scale += math.log(renorm)

    # Norm accumulated with the per-segment scales factored back in.
    raw_parts = [segments[0].c2 ** 2 / (2.0 * segments[0].rate)]
    for idx in range(1, len(segments) - 1):
        width = positions[idx] - positions[idx - 1]
        raw_parts.append(_square_integral_finite(segments[idx], 0.0, width))
    raw_parts.append(segments[-1].c1 ** 2 / (2.0 * segments[-1].rate))

    top = max(scale_logs)
    shifted = math.fsum(p * math.exp(2.0 * (s - top)) for p, s in zip(raw_parts, scale_logs))
    log_norm = top + 0.5 * math.log(shifted)

    final_segments = []
    for seg, s in zip(segments, scale_logs):
        factor = math.exp(s - log_norm)
        final_segments.append(
            Segment(seg.kind, seg.rate, seg.x0, factor * seg.c1, factor * seg.c2)
        )
    state = PiecewiseExpWavefunction(positions, tuple(final_segments), normalized=True)
    return BoundState(energy=energy, kappa=kappa, wavefunction=state)


def _default_kappa_max(problem: DeltaPotentialProblem) -> float:
    units = problem.units
    strongest = max(
        (2.0 * units.mass * abs(g) / units.hbar**2 for g in problem.strengths), default=0.0
    )
    deepest = max(
        (math.sqrt(2.0 * units.mass * abs(u)) / units.hbar for u in problem.region_offsets),
        default=0.0,
    )
    return 4.0 * max(strongest, deepest)


def find_bound_states(
    problem: DeltaPotentialProblem,
    kappa_max: float | None = None,
    scan_points: int = DEFAULT_SCAN_POINTS,
    tol: float = DEFAULT_BISECTION_TOL,
) -> BoundStateList:
    """Locate every bound state with decay rate in (0, kappa_max].

    A fixed kappa grid of ``scan_points`` cells is refined 8x, sign changes
    are bisected to ``tol`` in kappa, and the states come back sorted by
    ascending energy.  ``scan_too_coarse`` is flagged in the metadata when
    two roots land in one coarse cell.  Finding no states is an empty list,
    not an error; kappa = 0 itself (a threshold state) is never scanned.
    """
    if scan_points < 64:
        raise ValueError(f"scan_points must be >= 64, got {scan_points!r}")
    if not tol > 0.0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    if kappa_max is None:
        kappa_max = _default_kappa_max(problem)
    kappa_max = float(kappa_max)

    coarse_grid = np.linspace(0.0, kappa_max, scan_points + 1)[1:]
    if kappa_max <= 0.0:
        metadata = ScanMetadata(
            kappa_max=kappa_max,
            scan_points=scan_points,
            refinement_factor=REFINEMENT_FACTOR,
            kappa_grid=coarse_grid,
            brackets=(),
            root_residuals=(),
            scan_too_coarse=False,
        )
        return BoundStateList(states=(), metadata=metadata)

    fine_count = REFINEMENT_FACTOR * scan_points
    fine_grid = np.linspace(0.0, kappa_max, fine_count + 1)[1:]
    values = _growing_tail_coefficient(problem, fine_grid)

    brackets: list[tuple[float, float]] = []
    roots: list[float] = []
    residuals: list[float] = []
    for i in range(fine_count - 1):
        lo, hi = fine_grid[i], fine_grid[i + 1]
        f_lo, f_hi = values[i], values[i + 1]
        if f_lo == 0.0:
            if not roots or abs(roots[-1] - lo) > max(2.0 * tol, 1e-12 * kappa_max):
                brackets.append((lo, lo))
                roots.append(float(lo))
                residuals.append(0.0)
            continue
        if f_lo * f_hi < 0.0:
            root = _bisect_root(problem, float(lo), float(hi), float(f_lo), tol)
            if roots and abs(roots[-1] - root) <= max(2.0 * tol, 1e-12 * kappa_max):
                continue
            brackets.append((float(lo), float(hi)))
            roots.append(root)
            residuals.append(abs(_mismatch_scalar(problem, root)))
    if values[-1] == 0.0:
        root = float(fine_grid[-1])
        if not roots or abs(roots[-1] - root) > max(2.0 * tol, 1e-12 * kappa_max):
            brackets.append((root, root))
            roots.append(root)
            residuals.append(0.0)

    cell = kappa_max / scan_points
    per_coarse_cell = np.floor_divide(np.asarray(roots), cell).astype(int) if roots else np.array([])
    scan_too_coarse = bool(
        len(per_coarse_cell) and np.any(np.bincount(per_coarse_cell) >= 2)
    )

    states = tuple(_reconstruct_state(problem, k) for k in sorted(roots, reverse=True))
    metadata = ScanMetadata(
        kappa_max=kappa_max,
        scan_points=scan_points,
        refinement_factor=REFINEMENT_FACTOR,
        kappa_grid=coarse_grid,
        brackets=tuple(brackets),
        root_residuals=tuple(residuals),
        scan_too_coarse=scan_too_coarse,
    )
    return BoundStateList(states=states, metadata=metadata)


def ground_state(problem: DeltaPotentialProblem, **scan_options) -> BoundState:
    """Lowest-energy bound state; raises NoBoundStatesError if none exist."""
    found = find_bound_states(problem, **scan_options)
    if not found.states:
        raise NoBoundStatesError("the potential binds no state in the scanned range")
    return found.states[0]


def norm_squared(psi: PiecewiseExpWavefunction) -> float:
    """Exact integral of psi^2; DivergentTailError if an end grows."""
    return psi.norm_squared()


def expectation_potential_numeric(
    psi: PiecewiseExpWavefunction, problem: DeltaPotentialProblem
) -> float:
    """<U> from delta sampling plus exact per-region overlap integrals."""
    if not psi.normalized:
        raise ValueError("expectation values need a normalized wavefunction")
    if psi.breakpoints != problem.positions:
        raise BreakpointMismatchError(
            f"wavefunction breakpoints {psi.breakpoints!r} do not match "
            f"delta positions {problem.positions!r}"
        )
    site_part = math.fsum(g * psi.value(z) ** 2 for z, g in problem.deltas)
    region_part = math.fsum(
        u * part for u, part in zip(problem.region_offsets, psi.segment_probability_integrals())
    )
    return site_part + region_part


def expectation_kinetic_numeric(psi: PiecewiseExpWavefunction, units: UnitSystem) -> float:
    """<T> = (hbar^2/2m) * integral of psi'^2, evaluated exactly.

    This form needs no delta-site bookkeeping: integrating by parts moves
    the cusp contributions into psi'^2, and the boundary terms vanish for
    decaying tails.
    """
    if not psi.normalized:
        raise ValueError("expectation values need a normalized wavefunction")
    return 0.5 * units.hbar**2 / units.mass * psi.derivative_squared_integral()
