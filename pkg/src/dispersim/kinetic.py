"""Kinetic order-book simulator with per-bin matching.

Buy orders and sell offers wait in per-bin stocks on a price grid and
transact at rate ``eta * x_i * z_i`` within each bin, while inflows
replenish both sides. The integrator is an explicit scheme on the rate
equations; a step is only accurate while the per-bin depletion fraction
``eta * stock * dt`` stays small, which is enforced as a hard stability
bound at the start of a run. Within a step the transacted units are capped
at the available stock so bin populations can never turn negative.

The price shapes of the inflows are a closure choice, not a law of the
model. The ``monotone`` closure feeds buy orders mostly toward the floor
and sell offers increasingly with price, using the two-branch exponential
weights of a reference law; the stationary stocks then mirror the inflows
and per-bin matching reproduces the overlap-shaped sales law of the
quasi-static regime. The ``matched`` closure feeds both sides with the
same two-sided exponential profile so every bin receives balanced inflows
and the stocks admit an exactly stationary state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import StabilityViolation, ZeroSalesVolume
from .grids import GriddedDistribution, trapezoid
from .laws import LaplaceParams, laplace_cdf, laplace_density

#: Largest admissible per-bin depletion fraction per step.
STABILITY_BOUND = 0.1

INFLOW_SHAPES = ("monotone", "matched")


@dataclass(frozen=True)
class MarketState:
    """Waiting stocks, matching rate, clock, and accumulated sales tallies.

    Totals are always the sums of the bins; they are exposed as properties
    rather than stored so they cannot drift out of sync.
    """

    grid: np.ndarray
    x_bins: np.ndarray
    z_bins: np.ndarray
    eta: float
    clock: float = 0.0
    cumulative_sales: np.ndarray | None = None
    cap_hits: int = 0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        x_bins = np.asarray(self.x_bins, dtype=float)
        z_bins = np.asarray(self.z_bins, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "x_bins", x_bins)
        object.__setattr__(self, "z_bins", z_bins)
        if grid.ndim != 1 or grid.size < 1 or not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be 1-D and strictly increasing")
        if x_bins.shape != grid.shape or z_bins.shape != grid.shape:
            raise ValueError("stock arrays must match the grid shape")
        if np.any(x_bins < 0.0) or np.any(z_bins < 0.0):
            raise ValueError("stocks must be nonnegative")
        if self.eta < 0.0:
            raise ValueError("eta must be nonnegative")
        if self.cumulative_sales is None:
            object.__setattr__(self, "cumulative_sales", np.zeros_like(grid))
        else:
            sales = np.asarray(self.cumulative_sales, dtype=float)
            if sales.shape != grid.shape:
                raise ValueError("cumulative_sales must match the grid shape")
            if np.any(sales < 0.0):
                raise ValueError("cumulative_sales must be nonnegative")
            object.__setattr__(self, "cumulative_sales", sales)

    @property
    def x_total(self) -> float:
        return float(self.x_bins.sum())

    @property
    def z_total(self) -> float:
        return float(self.z_bins.sum())

    @property
    def event_count(self) -> float:
        return float(self.cumulative_sales.sum())


@dataclass(frozen=True)
class InflowSpec:
    """Total inflow rates and the price shapes distributing them over bins.

    Shapes come from a two-parameter reference law centered at ``mu_ref``
    with scale ``sigma_ref``. ``jitter`` adds an optional multiplicative
    lognormal factor of that amplitude to both rates each step, drawn from
    the run's seeded generator; at the default 0 a run is noise-free.
    """

    demand_rate: float
    supply_rate: float
    mu_ref: float
    sigma_ref: float
    shape: str = "monotone"
    jitter: float = 0.0

    def __post_init__(self):
        if self.demand_rate < 0.0 or self.supply_rate < 0.0:
            raise ValueError("inflow rates must be nonnegative")
        if self.sigma_ref <= 0.0:
            raise ValueError("sigma_ref must be positive")
        if self.shape not in INFLOW_SHAPES:
            raise ValueError(f"shape must be one of {INFLOW_SHAPES}, got {self.shape!r}")
        if self.jitter < 0.0:
            raise ValueError("jitter must be nonnegative")

    def reference(self) -> LaplaceParams:
        return LaplaceParams(mu=self.mu_ref, sigma=self.sigma_ref)

    def shape_densities(self, grid) -> tuple[np.ndarray, np.ndarray]:
        """Demand and supply inflow shapes as unit-integral densities."""
        grid = np.asarray(grid, dtype=float)
        ref = self.reference()
        if self.shape == "monotone":
            demand = 1.0 - laplace_cdf(grid, ref)
            supply = laplace_cdf(grid, ref)
        else:
            demand = laplace_density(grid, ref)
            supply = demand.copy()
        d_norm = trapezoid(demand, grid)
        s_norm = trapezoid(supply, grid)
        if d_norm <= 0.0 or s_norm <= 0.0:
            raise ValueError("inflow shape vanishes on the whole grid")
        return demand / d_norm, supply / s_norm

    def bin_weights(self, grid) -> tuple[np.ndarray, np.ndarray]:
        """Per-bin inflow weights, each summing to exactly 1.

        Unit sums (rather than unit integrals) keep the discrete totals
        exactly conserved: a step deposits exactly ``rate * dt`` units.
        """
        demand, supply = self.shape_densities(grid)
        return demand / demand.sum(), supply / supply.sum()


@dataclass(frozen=True)
class SimResult:
    """Sales law, per-step totals series, and the final market state.

    ``times``, ``x_series``, ``z_series``, ``sales_rate_series`` and
    ``mean_price_series`` are aligned per step; the mean price entry is the
    sales-weighted mean of that step's transactions (nan on steps with no
    sales). ``event_count`` is the total of transacted units.
    """

    sales_histogram: GriddedDistribution
    times: np.ndarray
    x_series: np.ndarray
    z_series: np.ndarray
    sales_rate_series: np.ndarray
    mean_price_series: np.ndarray
    event_count: float
    cap_hits: int
    final_state: MarketState


def step(
    state: MarketState,
    inflow: InflowSpec,
    dt: float,
    demand_factor: float = 1.0,
    supply_factor: float = 1.0,
) -> MarketState:
    """Advance the market by one step of length ``dt``.

    Transacts ``min(eta * x_i * z_i * dt, x_i, z_i)`` units per bin,
    removes them from both sides, tallies them as sales at the bin price,
    then deposits the inflows (scaled by the optional per-step factors the
    run loop uses for jitter) and advances the clock.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    uncapped = state.eta * state.x_bins * state.z_bins * dt
    available = np.minimum(state.x_bins, state.z_bins)
    transacted = np.minimum(uncapped, available)
    newly_capped = int(np.count_nonzero(uncapped > available))
    x_new = state.x_bins - transacted
    z_new = state.z_bins - transacted
    if inflow.demand_rate > 0.0 or inflow.supply_rate > 0.0:
        d_weights, s_weights = inflow.bin_weights(state.grid)
        x_new = x_new + demand_factor * inflow.demand_rate * dt * d_weights
        z_new = z_new + supply_factor * inflow.supply_rate * dt * s_weights
    return replace(
        state,
        x_bins=x_new,
        z_bins=z_new,
        clock=state.clock + dt,
        cumulative_sales=state.cumulative_sales + transacted,
        cap_hits=state.cap_hits + newly_capped,
    )


def run(
    initial: MarketState,
    inflow: InflowSpec,
    dt: float,
    horizon: float,
    seed: int = 0,
) -> SimResult:
    """Integrate the market from ``initial`` until the horizon.

    The number of steps is ``round(horizon / dt)``. The result is
    deterministic given ``(initial, inflow, dt, seed)``; the seed only
    feeds the optional inflow jitter.

    Raises
    ------
    StabilityViolation
        If the initial stocks already violate ``eta * stock * dt < 0.1``
        in some bin.
    ZeroSalesVolume
        If the whole run transacts nothing, leaving no sales law to
        normalize.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if horizon < dt:
        raise ValueError("horizon must be at least dt")
    worst = initial.eta * dt * max(
        float(np.max(initial.x_bins)), float(np.max(initial.z_bins)), 0.0
    )
    if worst >= STABILITY_BOUND:
        raise StabilityViolation(
            f"eta * stock * dt = {worst:.3g} violates the stability bound "
            f"{STABILITY_BOUND}; shrink dt or eta"
        )
    n_steps = max(int(round(horizon / dt)), 1)
    rng = np.random.default_rng(seed)

    # Precompute what step() would rebuild every call.
    d_weights, s_weights = inflow.bin_weights(initial.grid)
    demand_in = inflow.demand_rate * dt * d_weights
    supply_in = inflow.supply_rate * dt * s_weights
    eta_dt = initial.eta * dt

    grid = initial.grid
    x = initial.x_bins.copy()
    z = initial.z_bins.copy()
    sales = initial.cumulative_sales.copy()
    cap_hits = initial.cap_hits
    times = initial.clock + dt * np.arange(1, n_steps + 1)
    x_series = np.empty(n_steps)
    z_series = np.empty(n_steps)
    sales_rate = np.empty(n_steps)
    mean_price = np.empty(n_steps)

    for k in range(n_steps):
        uncapped = eta_dt * x * z
        available = np.minimum(x, z)
        transacted = np.minimum(uncapped, available)
        cap_hits += int(np.count_nonzero(uncapped > available))
        if inflow.jitter > 0.0:
            xi_d, xi_s = rng.standard_normal(2)
            half_var = 0.5 * inflow.jitter**2
            d_factor = np.exp(inflow.jitter * xi_d - half_var)
            s_factor = np.exp(inflow.jitter * xi_s - half_var)
        else:
            d_factor = s_factor = 1.0
        x = x - transacted + d_factor * demand_in
        z = z - transacted + s_factor * supply_in
        sales += transacted
        step_total = float(transacted.sum())
        x_series[k] = x.sum()
        z_series[k] = z.sum()
        sales_rate[k] = step_total / dt
        mean_price[k] = (
            float(np.dot(transacted, grid)) / step_total if step_total > 0.0 else np.nan
        )

    event_count = float(sales.sum()) - initial.event_count
    if event_count <= 0.0:
        raise ZeroSalesVolume("no units transacted over the whole run")
    final_state = MarketState(
        grid=grid, x_bins=x, z_bins=z, eta=initial.eta,
        clock=initial.clock + n_steps * dt, cumulative_sales=sales,
        cap_hits=cap_hits,
    )
    return SimResult(
        sales_histogram=GriddedDistribution.from_density(grid, sales),
        times=times,
        x_series=x_series,
        z_series=z_series,
        sales_rate_series=sales_rate,
        mean_price_series=mean_price,
        event_count=event_count,
        cap_hits=cap_hits,
        final_state=final_state,
    )


def initial_state(
    grid,
    eta: float,
    inflow: InflowSpec,
    x_total: float = 0.0,
    z_total: float = 0.0,
) -> MarketState:
    """Market state with initial stocks spread like the inflow shapes."""
    d_weights, s_weights = inflow.bin_weights(grid)
    return MarketState(
        grid=np.asarray(grid, dtype=float),
        x_bins=x_total * d_weights,
        z_bins=z_total * s_weights,
        eta=eta,
    )


def stationary_state(grid, eta: float, inflow: InflowSpec) -> MarketState:
    """Exactly stationary stocks for the ``matched`` closure.

    With identical per-bin inflow rates ``r_i`` on both sides, stocks
    ``x_i = z_i = sqrt(r_i / eta)`` balance depletion against inflow:
    ``eta * x_i * z_i = r_i`` in every bin. Only defined for the matched
    closure with equal rates.
    """
    if inflow.shape != "matched":
        raise ValueError("stationary stocks are only defined for the matched closure")
    if inflow.demand_rate != inflow.supply_rate:
        raise ValueError("stationary stocks need equal demand and supply rates")
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    d_weights, _ = inflow.bin_weights(grid)
    stock = np.sqrt(inflow.demand_rate * d_weights / eta)
    return MarketState(
        grid=np.asarray(grid, dtype=float),
        x_bins=stock,
        z_bins=stock.copy(),
        eta=eta,
    )
