"""Recession shock propagation and recovery on the directed export
network.

Dynamics per step (time indices t-1, t, t+1):
  X_ij(t)   = X_ij(t-1) * Y_j(t) / Y_j(t-1)
  Y_i(t+1)  = Y_i(t) * (1 + P_i * (X_i(t)/X_i(t-1) - 1))   [multiplicative]
  Y_i(t+1)  = Y_i(t) +      P_i * (X_i(t)/X_i(t-1) - 1)    [literal-additive]
with X_i = sum_j X_ij and P_i frozen at its initial value X_i(0)/Y_i(0).
Countries with X_i(t-1) = 0 keep their GDP unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from .errors import (
    EmptyFlows,
    InsufficientPoints,
    MissingGdp,
    NoConvergence,
    NonFinite,
    NonPositiveResiduals,
    NotConverged,
    SingleCountryWorld,
    UnknownEpicenter,
    ZeroEpicenterChange,
)

log = logging.getLogger(__name__)

UPDATE_RULES = ("multiplicative", "literal-additive")


@dataclass(frozen=True)
class EconomyState:
    countries: tuple[str, ...]
    y: np.ndarray  # GDP per country, USD
    x: np.ndarray  # directed exports, x[i, j] = exports i -> j
    p: np.ndarray  # export/GDP ratios, frozen at initialization

    def index(self, country) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise UnknownEpicenter(f"{country!r} not in state") from None

    @property
    def world_gdp(self) -> float:
        return float(self.y.sum())


@dataclass(frozen=True)
class ShockConfig:
    epicenter: str
    shock_fraction: float = 0.054
    tolerance: float = 1e-10
    max_steps: int = 100_000
    update_rule: str = "multiplicative"

    def __post_init__(self):
        if not 0 < self.shock_fraction < 1:
            raise ValueError(
                f"shock_fraction must be in (0, 1), got {self.shock_fraction}"
            )
        if self.update_rule not in UPDATE_RULES:
            raise ValueError(f"update_rule must be one of {UPDATE_RULES}")


@dataclass
class SimulationTrace:
    countries: tuple[str, ...]
    steps: list[np.ndarray]  # GDP vector per time step, t = 0, 1, ...
    converged: bool
    final_state: EconomyState | None = field(default=None, repr=False)

    @property
    def world_gdp(self) -> np.ndarray:
        return np.array([y.sum() for y in self.steps])


@dataclass(frozen=True)
class RecoveryFit:
    lam: float  # decay rate per simulation step
    a: float
    y_inf: float


def init_state(flows, gdp: dict) -> EconomyState:
    """State from one year of directed flow records plus the GDP table.

    Exports stay directional (no symmetrization); P_i is computed once
    and never updated.
    """
    flows = list(flows)
    if not flows:
        raise EmptyFlows("no flow records supplied")
    years = {r.year for r in flows}
    if len(years) > 1:
        raise ValueError(f"flows span several years: {sorted(years)}")
    year = years.pop()
    countries = tuple(sorted({r.reporter for r in flows} | {r.partner for r in flows}))
    missing = [c for c in countries if (year, c) not in gdp]
    if missing:
        raise MissingGdp(missing)
    index = {c: i for i, c in enumerate(countries)}
    x = np.zeros((len(countries), len(countries)))
    for r in flows:
        x[index[r.reporter], index[r.partner]] += r.export_value
    y = np.array([gdp[(year, c)] for c in countries])
    p = x.sum(axis=1) / y
    high = [c for c, pi in zip(countries, p) if pi >= 1]
    if high:
        log.warning("export/GDP ratio >= 1 for: %s", ", ".join(high))
    return EconomyState(countries=countries, y=y, x=x, p=p)


def apply_shock(state: EconomyState, config: ShockConfig) -> EconomyState:
    """Scale the epicenter's GDP down by the shock fraction."""
    i = state.index(config.epicenter)
    y = state.y.copy()
    y[i] *= 1.0 - config.shock_fraction
    return replace(state, y=y)


def step(prev: EconomyState, cur: EconomyState, update_rule="multiplicative") -> EconomyState:
    """Advance one step: prev holds (Y(t-1), X(t-1)), cur holds Y(t);
    the result holds Y(t+1) together with the X(t) used to produce it."""
    x_t = prev.x * (cur.y / prev.y)[None, :]
    ex_prev = prev.x.sum(axis=1)
    ex_t = x_t.sum(axis=1)
    ratio = np.divide(ex_t, ex_prev, out=np.ones_like(ex_t), where=ex_prev > 0)
    if update_rule == "multiplicative":
        y_next = cur.y * (1.0 + prev.p * (ratio - 1.0))
    else:
        y_next = cur.y + prev.p * (ratio - 1.0)
    if not (np.all(np.isfinite(y_next)) and np.all(y_next > 0) and np.all(np.isfinite(x_t))):
        raise NonFinite("state left the finite positive domain")
    return EconomyState(countries=cur.countries, y=y_next, x=x_t, p=prev.p)


def _iterate(prev: EconomyState, cur: EconomyState, config: ShockConfig,
             steps: list[np.ndarray]) -> SimulationTrace:
    for _ in range(config.max_steps):
        nxt = step(prev, cur, config.update_rule)
        steps.append(nxt.y)
        delta = float(np.max(np.abs(nxt.y - cur.y) / cur.y))
        prev = EconomyState(countries=cur.countries, y=cur.y, x=nxt.x, p=prev.p)
        cur = nxt
        if delta < config.tolerance:
            return SimulationTrace(
                countries=cur.countries, steps=steps, converged=True,
                final_state=cur,
            )
    partial = SimulationTrace(
        countries=cur.countries, steps=steps, converged=False, final_state=cur
    )
    raise NoConvergence(
        f"no steady state after {config.max_steps} steps", trace=partial
    )


def run_to_steady(initial: EconomyState, config: ShockConfig) -> SimulationTrace:
    """Shock the epicenter, then iterate the dynamics until the maximum
    relative per-step GDP change drops below the tolerance.

    The trace records every step, including t=0 (pre-shock) and t=1
    (post-shock, before any propagation).
    """
    shocked = apply_shock(initial, config)
    steps = [initial.y.copy(), shocked.y.copy()]
    return _iterate(initial, shocked, config, steps)


def run_recovery(steady: EconomyState, initial_y_epicenter: float,
                 config: ShockConfig) -> SimulationTrace:
    """Restore the epicenter's GDP to its pre-shock value and iterate the
    same dynamics until the world recovers to a steady state."""
    i = steady.index(config.epicenter)
    y = steady.y.copy()
    y[i] = initial_y_epicenter
    restored = replace(steady, y=y)
    steps = [steady.y.copy(), restored.y.copy()]
    return _iterate(steady, restored, config, steps)


def world_gdp_change(trace: SimulationTrace) -> float:
    """Relative change of total world GDP between the first and last step."""
    if not trace.converged:
        raise NotConverged("trace did not reach steady state")
    w = trace.world_gdp
    return float((w[-1] - w[0]) / w[0])


def impact_ratio(trace: SimulationTrace, epicenter: str) -> float:
    """F = (% change of world GDP excluding the epicenter) / (% change of
    the epicenter's GDP), measured first-to-last step."""
    if not trace.converged:
        raise NotConverged("trace did not reach steady state")
    if len(trace.countries) < 2:
        raise SingleCountryWorld("impact ratio needs at least 2 countries")
    i = trace.countries.index(epicenter)
    first, last = trace.steps[0], trace.steps[-1]
    epi_change = (last[i] - first[i]) / first[i]
    if epi_change == 0:
        raise ZeroEpicenterChange("epicenter GDP did not change")
    mask = np.arange(first.size) != i
    rest_first = first[mask].sum()
    rest_last = last[mask].sum()
    rest_change = (rest_last - rest_first) / rest_first
    return float(rest_change / epi_change)


def fit_recovery(trace: SimulationTrace, eps: float = 1e-12) -> RecoveryFit:
    """Fit W(t) ~ y_inf - a * exp(-lam * t) to the world GDP series.

    A log-linear regression of ln(y_inf - W) on t seeds a nonlinear
    least-squares refinement in which y_inf is free; the refinement is
    what lets an exactly exponential series be recovered to machine
    precision despite the truncated tail.
    """
    if not trace.converged:
        raise NotConverged("trace did not reach steady state")
    w = trace.world_gdp
    y_end = float(w[-1])
    resid = y_end - w
    if np.any(resid < -eps * abs(y_end)):
        raise NonPositiveResiduals("series overshoots its final value")
    mask = resid > eps * abs(y_end)
    if mask.sum() < 3:
        raise InsufficientPoints(
            f"only {int(mask.sum())} points below the final value"
        )
    t = np.arange(len(w), dtype=float)
    slope, intercept = np.polyfit(t[mask], np.log(resid[mask]), 1)
    lam0, a0 = -slope, float(np.exp(intercept))

    def model(tt, y_inf, a, lam):
        return y_inf - a * np.exp(-lam * tt)

    try:
        popt, _ = curve_fit(
            model, t, w, p0=(y_end, a0, max(lam0, 1e-12)), maxfev=10_000
        )
        y_inf, a, lam = (float(v) for v in popt)
    except RuntimeError:
        y_inf, a, lam = y_end, a0, lam0
    return RecoveryFit(lam=lam, a=a, y_inf=y_inf)
