"""Norms, synchronization metrics, rate fits, and ultimate-bound checks.

All reductions accumulate in a fixed index order with exact compensated
summation (``math.fsum``), so every quantity here is bit-identical across
runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InsufficientDataError
from .grids import FieldGrid, NetworkState

if TYPE_CHECKING:  # pragma: no cover
    from .solver import Trajectory


def _csum(arr: np.ndarray) -> float:
    """Exact fixed-order sum of a float array."""
    return math.fsum(arr.ravel().tolist())


def l2_norm(field: FieldGrid) -> float:
    """Discrete L2 norm sqrt(sum(values^2) dx^2) with cell-area weighting.

    Saturates to inf (without warning) when the squares overflow float64.
    """
    with np.errstate(over="ignore"):
        return math.sqrt(_csum(field.values * field.values) * field.dx * field.dx)


def l4_norm4(field: FieldGrid) -> float:
    """Fourth power of the discrete L4 norm: sum(values^4) dx^2."""
    with np.errstate(over="ignore"):
        sq = field.values * field.values
        return _csum(sq * sq) * field.dx * field.dx


def energy_norm_sq(state: NetworkState) -> float:
    """Sum over neurons and components of the squared L2 norms."""
    parts = []
    for n in state.neurons:
        parts.append(l2_norm(n.u) ** 2)
        parts.extend(l2_norm(g) ** 2 for g in n.z)
        parts.append(l2_norm(n.rho) ** 2)
    return math.fsum(parts)


@dataclass(frozen=True)
class DiffRecord:
    """L2 difference norms between neurons i and j (0-based indices, i < j).

    ``total`` is the combined energy-norm difference, so
    total^2 = U_norm^2 + Z_norm^2 + R_norm^2.
    """

    t: float
    i: int
    j: int
    U_norm: float
    Z_norm: float
    R_norm: float
    total: float


def _l2_raw(arr: np.ndarray, dx: float) -> float:
    with np.errstate(over="ignore"):
        return math.sqrt(_csum(arr * arr) * dx * dx)


def _diff_record(state: NetworkState, i: int, j: int) -> DiffRecord:
    a, b = state.neurons[i], state.neurons[j]
    dx = a.u.dx
    with np.errstate(over="ignore"):
        u = _l2_raw(a.u.values - b.u.values, dx)
        z_sq = math.fsum(
            _l2_raw(ga.values - gb.values, dx) ** 2 for ga, gb in zip(a.z, b.z)
        )
        rho = _l2_raw(a.rho.values - b.rho.values, dx)
    total = math.sqrt(u * u + z_sq + rho * rho)
    return DiffRecord(state.t, i, j, u, math.sqrt(z_sq), rho, total)


def pairwise_diff_norms(state: NetworkState) -> list[DiffRecord]:
    """Difference norms for every pair i < j (m(m-1)/2 records)."""
    m = state.m
    return [_diff_record(state, i, j) for i in range(m) for j in range(i + 1, m)]


def sup_potential_sum(state: NetworkState) -> float:
    """Max over grid cells of sum_i |u_i(x)|."""
    acc = np.abs(state.neurons[0].u.values).copy()
    for n in state.neurons[1:]:
        acc += np.abs(n.u.values)
    return float(acc.max())


class RateFit(NamedTuple):
    rate: float
    r_squared: float


def fit_exponential_rate(
    times: Sequence[float],
    values: Sequence[float],
    burn_in_fraction: float = 0.1,
) -> RateFit:
    """Exponential decay rate from a log-linear least-squares fit.

    Fits ln(value) = c - rate * t and returns (rate, r^2). The first
    ``burn_in_fraction`` of samples is dropped to ignore leading transients;
    a nonpositive value truncates the series from that point on (the decay
    has hit the floor). Fewer than 3 usable samples raise
    :class:`InsufficientDataError`.
    """
    if len(times) != len(values):
        raise ValueError("times and values must have equal length")
    if not 0.0 <= burn_in_fraction < 1.0:
        raise ValueError(f"burn_in_fraction must be in [0, 1), got {burn_in_fraction}")
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    nonpos = np.nonzero(v <= 0)[0]
    if nonpos.size:
        t, v = t[: nonpos[0]], v[: nonpos[0]]
    skip = int(len(v) * burn_in_fraction)
    t, v = t[skip:], v[skip:]
    if len(v) < 3:
        raise InsufficientDataError(
            f"need at least 3 positive samples after trimming, have {len(v)}"
        )
    y = np.log(v)
    tbar, ybar = t.mean(), y.mean()
    dt_ = t - tbar
    denom = float(dt_ @ dt_)
    if denom == 0.0:
        raise InsufficientDataError("all samples share one time instant")
    slope = float(dt_ @ (y - ybar)) / denom
    resid = y - (ybar + slope * dt_)
    ss_res = float(resid @ resid)
    ss_tot = float((y - ybar) @ (y - ybar))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res <= 1e-28 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return RateFit(-slope, r2)


def asynchronous_degree_estimate(traj: "Trajectory", tail_fraction: float = 0.1) -> float:
    """Max over pairs of the max total difference norm on the trailing window.

    A finite-horizon surrogate for the sup/limsup asynchronous degree: the
    trailing ``tail_fraction`` of recorded instants stands in for t -> inf.
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    records = traj.records
    if not records:
        raise InsufficientDataError("trajectory has no records")
    n_tail = max(1, math.ceil(tail_fraction * len(records)))
    worst = 0.0
    for rec in records[-n_tail:]:
        for d in rec.diffs:
            worst = max(worst, d.total)
    return worst


@dataclass(frozen=True)
class BoundCheck:
    """Outcome of comparing a time series against an ultimate bound."""

    mode: str
    bound: float
    passed: bool
    entry_time: float | None
    max_value: float
    max_time: float

    def describe(self) -> str:
        if self.mode == "eventually":
            status = (
                f"enters below bound at t={self.entry_time:g} and stays"
                if self.passed
                else "never settles below bound"
            )
        else:
            status = "stays below bound" if self.passed else "exceeds bound"
        return (
            f"{status}; bound={self.bound:g}, series max={self.max_value:g} "
            f"at t={self.max_time:g}"
        )


def check_bound(
    series: Iterable[tuple[float, float]],
    bound: float,
    mode: str = "eventually",
) -> BoundCheck:
    """Check a (t, value) series against ``bound``.

    mode "always": every value must be strictly below the bound.
    mode "eventually": find the first instant after which every value stays
    strictly below the bound through the end of the series (a finite-horizon
    surrogate for a limsup bound); fails when no such instant exists.
    """
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    if mode not in ("eventually", "always"):
        raise ValueError(f"mode must be 'eventually' or 'always', got {mode!r}")
    pts = list(series)
    if not pts:
        raise InsufficientDataError("empty series")
    times = [p[0] for p in pts]
    vals = [p[1] for p in pts]
    k_max = max(range(len(vals)), key=lambda k: vals[k])
    max_value, max_time = vals[k_max], times[k_max]
    if mode == "always":
        passed = max_value < bound
        return BoundCheck("always", bound, passed, times[0] if passed else None, max_value, max_time)
    last_violation = None
    for k in range(len(vals) - 1, -1, -1):
        if vals[k] >= bound:
            last_violation = k
            break
    if last_violation is None:
        return BoundCheck("eventually", bound, True, times[0], max_value, max_time)
    if last_violation == len(vals) - 1:
        return BoundCheck("eventually", bound, False, None, max_value, max_time)
    return BoundCheck("eventually", bound, True, times[last_violation + 1], max_value, max_time)
