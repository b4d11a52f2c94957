"""Reference forecasts: rolling return quantiles, raw ensembles and EMOS.

The pre-registered benchmark per target is

* DAX: empirical quantiles of a rolling sample of the 1000 most recent
  overlapping k-step accumulated log-returns,
* temperature / wind: empirical quantiles of the 40-member raw NWP
  ensemble (wind floored at zero).

On top of the raw ensemble, an EMOS-style distributional regression maps
ensemble mean and variance to the parameters of a normal (temperature) or
zero-truncated normal (wind) predictive distribution. Parameters are
fitted by minimizing the mean closed-form CRPS over a training set with a
derivative-free simplex search, which keeps the whole pipeline free of
gradient code and bit-reproducible for a fixed iteration budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import optimize
from scipy.special import ndtr, ndtri

from .core import (
    DAX_TARGET,
    DEFAULT_LEVELS,
    QuantileForecast,
    QuantileLevels,
    RoundSpec,
    Target,
    TargetKind,
)
from .ingestion import (
    EnsembleNwpForecast,
    InsufficientHistoryError,
    NWP_VARIABLE_FOR_TARGET,
    PriceSeries,
)

_SQRT_PI = math.sqrt(math.pi)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_MIN_VARIANCE = 1e-12  # floor for the softplus variance link


def _phi(z):
    """Standard normal density (raw ufunc math keeps the optimizer fast)."""
    return np.exp(-0.5 * np.square(z)) / _SQRT_TWO_PI


class DistributionFamily(str, Enum):
    NORMAL = "normal"
    TRUNCATED_NORMAL = "truncated_normal_at_zero"


FAMILY_FOR_TARGET = {
    TargetKind.TEMPERATURE: DistributionFamily.NORMAL,
    TargetKind.WIND: DistributionFamily.TRUNCATED_NORMAL,
}


class FitError(RuntimeError):
    """EMOS fitting failed (non-convergence or degenerate training data)."""


@dataclass(frozen=True)
class RollingWindowConfig:
    """Length of the rolling return sample behind the DAX benchmark."""

    window_length: int = 1000

    def __post_init__(self):
        if self.window_length < len(DEFAULT_LEVELS):
            raise ValueError("window must hold at least as many points as quantile levels")


def empirical_quantiles(sample, levels: QuantileLevels = DEFAULT_LEVELS) -> np.ndarray:
    """Sample quantiles with linear interpolation at position 1+(n-1)*alpha.

    Parameters
    ----------
    sample : array_like
        Nonempty, finite observations (any order).
    levels : QuantileLevels
        Probabilities to evaluate.

    Returns
    -------
    ndarray
        One quantile per level, non-decreasing across levels.
    """
    arr = np.asarray(sample, dtype=float)
    if arr.size == 0:
        raise ValueError("sample must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample must be finite")
    return np.quantile(arr, list(levels), method="linear")


def rolling_returns(prices: PriceSeries, trading_steps: int, end_date: date) -> np.ndarray:
    """All overlapping ``trading_steps``-day log-returns ending at or before a date."""
    closes = np.asarray(prices.closes)
    log_closes = np.log(closes)
    end_pos = prices.position(prices.last_trading_date_on_or_before(end_date))
    if end_pos - trading_steps + 1 <= 0:
        return np.empty(0)
    r = 100.0 * (log_closes[trading_steps : end_pos + 1] - log_closes[: end_pos + 1 - trading_steps])
    return r


def dax_benchmark(
    prices: PriceSeries,
    round_spec: RoundSpec,
    cfg: RollingWindowConfig = RollingWindowConfig(),
) -> list[QuantileForecast]:
    """Rolling empirical-quantile forecasts for all five DAX horizons.

    For each horizon with k trading steps, the forecast is the empirical
    quantiles of the ``cfg.window_length`` most recent overlapping k-step
    returns ending at or before the round's price anchor.
    """
    forecasts = []
    for horizon in DAX_TARGET.horizons:
        k = horizon.trading_steps
        returns = rolling_returns(prices, k, round_spec.round_date)
        if returns.size < cfg.window_length:
            raise InsufficientHistoryError(
                f"horizon {horizon.label}: need {cfg.window_length} returns, "
                f"have {returns.size}"
            )
        window = returns[-cfg.window_length :]
        q = empirical_quantiles(window)
        forecasts.append(
            QuantileForecast(DAX_TARGET, horizon, round_spec.round_date, tuple(q))
        )
    return forecasts


def raw_ensemble_benchmark(
    nwp: EnsembleNwpForecast, target: Target, round_date: date
) -> QuantileForecast:
    """Empirical quantiles of the 40 raw ensemble members for one cell."""
    expected_var = NWP_VARIABLE_FOR_TARGET.get(target.kind)
    if expected_var is None or nwp.variable != expected_var:
        raise ValueError(
            f"ensemble variable {nwp.variable!r} does not match target {target.kind.value}"
        )
    horizon = target.horizon_for_label(f"{nwp.lead_hours} hour")
    q = empirical_quantiles(nwp.members)
    fc = QuantileForecast(target, horizon, round_date, tuple(q))
    if target.kind is TargetKind.WIND:
        fc = fc.floor_at_zero()
    return fc


# ---------------------------------------------------------------------------
# Closed-form CRPS
# ---------------------------------------------------------------------------


def crps_normal(mu, sigma, y):
    """CRPS of a normal predictive distribution, exact closed form.

    Accepts scalars or broadcastable arrays; ``sigma`` must be positive.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    z = (y - mu) / sigma
    out = sigma * (z * (2.0 * ndtr(z) - 1.0) + 2.0 * _phi(z) - 1.0 / _SQRT_PI)
    return out if out.ndim else float(out)


def crps_truncated_normal(mu, sigma, y):
    """CRPS of a normal truncated below at zero, exact closed form.

    For observations below the truncation point the score decomposes into
    the distance to zero plus the score at zero.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    y_eff = np.maximum(y, 0.0)
    s = mu / sigma
    p = np.maximum(ndtr(s), 1e-300)  # mass above the truncation point
    z = (y_eff - mu) / sigma
    core = (
        z * p * (2.0 * ndtr(z) + p - 2.0)
        + 2.0 * _phi(z) * p
        - ndtr(math.sqrt(2.0) * s) / _SQRT_PI
    )
    out = sigma / p**2 * core + (y_eff - y)
    return out if out.ndim else float(out)


def crps_closed_form(family: DistributionFamily, mu, sigma, y):
    """Dispatch the exact CRPS for the supported predictive families."""
    if family is DistributionFamily.NORMAL:
        return crps_normal(mu, sigma, y)
    if family is DistributionFamily.TRUNCATED_NORMAL:
        return crps_truncated_normal(mu, sigma, y)
    raise ValueError(f"unsupported family {family!r}")


# ---------------------------------------------------------------------------
# EMOS
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmosParams:
    """Fitted distributional-regression coefficients.

    Location is ``a + b * ensemble_mean``; the variance link is
    ``softplus(c + d * ensemble_variance)`` which keeps the predictive
    scale strictly positive for any coefficients.
    """

    family: DistributionFamily
    a: float
    b: float
    c: float
    d: float
    n_train: int = 0
    fitted_at: date | None = None
    training_window_days: int | None = None  # None = all available history

    def location_scale(self, ens_mean, ens_var) -> tuple[np.ndarray, np.ndarray]:
        mu = self.a + self.b * np.asarray(ens_mean, dtype=float)
        var = softplus(self.c + self.d * np.asarray(ens_var, dtype=float))
        return mu, np.sqrt(np.maximum(var, _MIN_VARIANCE))


def softplus(x):
    """Numerically safe ``log(1 + exp(x))``."""
    return np.logaddexp(0.0, np.asarray(x, dtype=float))


def inverse_softplus(y: float) -> float:
    """Solve ``softplus(x) = y`` for y > 0."""
    if y <= 0:
        raise ValueError("softplus is positive")
    return y + math.log(-math.expm1(-y))


def _emos_objective(params_vec, ens_mean, ens_var, y, family):
    a, b, c, d = params_vec
    mu = a + b * ens_mean
    var = softplus(c + d * ens_var)
    sigma = np.sqrt(np.maximum(var, _MIN_VARIANCE))
    return float(np.mean(crps_closed_form(family, mu, sigma, y)))


_N_RESTARTS = 3  # simplex polish: restart from the incumbent until stable


def emos_fit(
    ens_mean,
    ens_var,
    y,
    family: DistributionFamily,
    max_iter: int = 10_000,
    tol: float = 1e-8,
    fitted_at: date | None = None,
) -> EmosParams:
    """Fit EMOS coefficients by minimizing mean closed-form CRPS.

    Uses Nelder-Mead from the fixed starting point (a,b,c,d) = (0,1,1,0),
    so repeated fits on identical data are bit-identical.

    Parameters
    ----------
    ens_mean, ens_var, y : array_like
        Training triples (ensemble mean, ensemble variance, observed value),
        at least 30 of them, all finite.
    family : DistributionFamily
        Normal for temperature, zero-truncated normal for wind.

    Raises
    ------
    FitError
        If the optimizer fails to converge within ``max_iter`` iterations
        (the final objective value is reported) or the training features
        are degenerate (zero variance).
    """
    ens_mean = np.asarray(ens_mean, dtype=float)
    ens_var = np.asarray(ens_var, dtype=float)
    y = np.asarray(y, dtype=float)
    n = ens_mean.size
    if not (ens_var.size == n and y.size == n):
        raise ValueError("training arrays must have equal length")
    if n < 30:
        raise ValueError(f"need at least 30 training pairs, got {n}")
    if not (np.all(np.isfinite(ens_mean)) and np.all(np.isfinite(ens_var)) and np.all(np.isfinite(y))):
        raise ValueError("training data must be finite")
    if np.ptp(ens_mean) == 0 or np.ptp(ens_var) == 0:
        raise FitError("degenerate training data: a feature has zero variance")

    # Center the covariates: in raw coordinates the intercepts trade off
    # against the slopes along a long flat valley, which stalls the simplex
    # well before the coefficients are pinned down.
    m_center = float(ens_mean.mean())
    v_center = float(ens_var.mean())
    args = (ens_mean - m_center, ens_var - v_center, y, family)

    # the (a,b,c,d) = (0,1,1,0) starting model, in centered coordinates
    x0 = np.array([m_center, 1.0, 1.0, 0.0])
    options = {"maxiter": max_iter, "maxfev": 2 * max_iter, "xatol": tol, "fatol": tol}
    result = optimize.minimize(
        _emos_objective, x0=x0, args=args, method="Nelder-Mead", options=options
    )
    for _ in range(_N_RESTARTS):
        if not result.success:
            break
        polished = optimize.minimize(
            _emos_objective, x0=result.x, args=args, method="Nelder-Mead", options=options
        )
        stable = polished.fun >= result.fun - tol
        if polished.fun <= result.fun:
            result = polished
        if stable:
            break
    if not result.success:
        raise FitError(
            f"no convergence after {result.nit} iterations, objective {result.fun:.6g}"
        )
    a_centered, b, c_centered, d = (float(v) for v in result.x)
    return EmosParams(
        family,
        a_centered - b * m_center,
        b,
        c_centered - d * v_center,
        d,
        n_train=n,
        fitted_at=fitted_at,
    )


def emos_predict(
    params: EmosParams,
    ens_mean: float,
    ens_var: float,
    levels: QuantileLevels = DEFAULT_LEVELS,
) -> np.ndarray:
    """Predictive quantiles of the fitted distribution via the inverse CDF.

    The zero-truncated normal quantile solves
    ``Phi((x-mu)/sigma) = Phi(-mu/sigma) + alpha * Phi(mu/sigma)`` exactly.
    """
    if not (math.isfinite(ens_mean) and math.isfinite(ens_var)):
        raise ValueError("ensemble summary statistics must be finite")
    mu, sigma = params.location_scale(ens_mean, ens_var)
    mu = float(mu)
    sigma = float(sigma)
    alphas = np.asarray(list(levels))
    if params.family is DistributionFamily.NORMAL:
        return mu + sigma * ndtri(alphas)
    lower_mass = ndtr(-mu / sigma)
    upper_mass = ndtr(mu / sigma)
    return mu + sigma * ndtri(lower_mass + alphas * upper_mass)


def serialize_emos_params(params: EmosParams) -> str:
    """Render fitted parameters as the small key-value audit format."""
    lines = [
        f"family = {params.family.value}",
        f"a = {params.a!r}",
        f"b = {params.b!r}",
        f"c = {params.c!r}",
        f"d = {params.d!r}",
        f"fitted_at = {params.fitted_at.isoformat() if params.fitted_at else ''}",
        f"n_train = {params.n_train}",
    ]
    return "\n".join(lines) + "\n"


def parse_emos_params(text: str) -> EmosParams:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    return EmosParams(
        family=DistributionFamily(fields["family"]),
        a=float(fields["a"]),
        b=float(fields["b"]),
        c=float(fields["c"]),
        d=float(fields["d"]),
        n_train=int(fields.get("n_train", "0")),
        fitted_at=date.fromisoformat(fields["fitted_at"]) if fields.get("fitted_at") else None,
    )


def write_emos_params(params: EmosParams, path: str | Path) -> None:
    Path(path).write_text(serialize_emos_params(params), encoding="utf-8")
