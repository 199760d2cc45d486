"""Exact fields, potentials, and energy densities of parallel charged sheets.

These are the only charge configurations whose field magnitude is piecewise
constant, which is what the exponential map onto bound states requires.
Everything here is closed form: the field is constant per region, the
potential is piecewise linear and continuous, and the gauge is fixed to

    V(z) = -(1/(2*eps0)) * sum_n sigma_n * |z - z_n|

so that downstream wavefunction formulas come out without stray constants.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .units import UnitSystem

UNIFORM_FIELD_RTOL = 1e-12


@dataclass(frozen=True)
class SheetArray:
    """Finite stack of infinite charged sheets at strictly increasing positions.

    ``sheets`` is a sequence of ``(position, surface_density)`` pairs.
    Coincident positions are rejected; merge densities upstream if needed.
    """

    sheets: tuple[tuple[float, float], ...]

    def __init__(self, sheets: Sequence[tuple[float, float]]) -> None:
        cleaned = tuple((float(z), float(s)) for z, s in sheets)
        if not cleaned:
            raise ValueError("a SheetArray needs at least one sheet")
        for z, s in cleaned:
            if not (math.isfinite(z) and math.isfinite(s)):
                raise ValueError(f"positions and densities must be finite, got ({z!r}, {s!r})")
        for (z0, _), (z1, _) in zip(cleaned, cleaned[1:]):
            if not z1 > z0:
                raise ValueError(
                    "sheet positions must be strictly increasing; "
                    f"got {z0!r} followed by {z1!r} (merge coincident sheets upstream)"
                )
        object.__setattr__(self, "sheets", cleaned)

    @property
    def positions(self) -> tuple[float, ...]:
        return tuple(z for z, _ in self.sheets)

    @property
    def densities(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.sheets)

    @property
    def total_density(self) -> float:
        return math.fsum(s for _, s in self.sheets)


@dataclass(frozen=True)
class CanonicalCrystal:
    """Evenly spaced alternating stack with positive sheets at both ends.

    Expands to 2N+1 sheets at z = n*a for n in [-N, N] with densities
    sigma * (-1)**(n + N), so the outermost (and, for even N, the central)
    sheets are positive.  That end-positivity is what keeps the dual
    wavefunction normalizable.
    """

    N: int
    sigma: float
    a: float

    def __post_init__(self) -> None:
        if isinstance(self.N, bool) or not isinstance(self.N, int):
            raise ValueError(f"N must be an integer, got {self.N!r}")
        if self.N < 0:
            raise ValueError(f"N must be >= 0, got {self.N!r}")
        for name in ("sigma", "a"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    def to_sheet_array(self) -> SheetArray:
        return SheetArray(
            [(n * self.a, self.sigma * (-1.0) ** (n + self.N)) for n in range(-self.N, self.N + 1)]
        )


class BoundaryField(NamedTuple):
    """Two one-sided field values at a sheet position (the field jumps there)."""

    left: float
    right: float


@dataclass(frozen=True)
class ElectrostaticSolution:
    """Piecewise description of the field and potential of a sheet array.

    Regions are indexed 0..len(breakpoints): region 0 is the unbounded left
    end, region k (k >= 1) lies between breakpoints k-1 and k.  The caller
    is responsible for pairing a solution with the same UnitSystem it was
    solved under.
    """

    breakpoints: tuple[float, ...]
    densities: tuple[float, ...]
    region_fields: tuple[float, ...]
    potential_values: tuple[float, ...]
    region_slopes: tuple[float, ...]
    E_inf: float
    region_energy_density: tuple[float, ...]


def solve_sheets(array: SheetArray, units: UnitSystem) -> ElectrostaticSolution:
    """Solve a sheet array for its field, potential, and energy density.

    The field in each region is the superposition of sigma/(2*eps0) half-space
    contributions; the potential is evaluated in the fixed gauge at every
    breakpoint and is linear in between with slope -field.
    """
    eps0 = units.eps0
    positions = array.positions
    densities = array.densities
    n = len(positions)

    fields = []
    for k in range(n + 1):
        left = math.fsum(densities[:k])
        right = math.fsum(densities[k:])
        fields.append((left - right) / (2.0 * eps0))

    potential = tuple(
        -0.5 / eps0 * math.fsum(s * abs(z - zn) for zn, s in array.sheets) for z in positions
    )

    return ElectrostaticSolution(
        breakpoints=positions,
        densities=densities,
        region_fields=tuple(fields),
        potential_values=potential,
        region_slopes=tuple(-f for f in fields),
        E_inf=abs(fields[-1]),
        region_energy_density=tuple(0.5 * eps0 * f * f for f in fields),
    )


def field_at(sol: ElectrostaticSolution, z: float) -> Union[float, BoundaryField]:
    """Field at ``z``; at a sheet position, both one-sided values.

    The field is discontinuous exactly at the sheets, so querying a
    breakpoint returns a :class:`BoundaryField` instead of silently picking
    (or averaging) a side.
    """
    z = float(z)
    idx = bisect_right(sol.breakpoints, z)
    if idx > 0 and sol.breakpoints[idx - 1] == z:
        return BoundaryField(left=sol.region_fields[idx - 1], right=sol.region_fields[idx])
    return sol.region_fields[idx]


def potential_at(sol: ElectrostaticSolution, z: float) -> float:
    """Evaluate the continuous piecewise-linear potential at ``z``."""
    z = float(z)
    idx = bisect_right(sol.breakpoints, z)
    anchor = idx - 1 if idx > 0 else 0
    return sol.potential_values[anchor] + sol.region_slopes[idx] * (z - sol.breakpoints[anchor])


def uniform_field_magnitude(sol: ElectrostaticSolution) -> Union[float, None]:
    """The common |field| if every region shares one, else ``None``.

    Magnitudes are compared with a relative tolerance of 1e-12.
    """
    mags = [abs(f) for f in sol.region_fields]
    top = max(mags)
    if top - min(mags) <= UNIFORM_FIELD_RTOL * top:
        return sol.E_inf
    return None
