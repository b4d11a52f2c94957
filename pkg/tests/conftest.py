from datetime import date
from pathlib import Path

import pytest

from quantile_hub import QuantileForecast, RoundSpec, target_for_name

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURE_SEASON = REPO_ROOT / "fixtures" / "season"

ROUND_DATE = date(2021, 11, 3)  # a Wednesday


@pytest.fixture
def round_spec() -> RoundSpec:
    return RoundSpec(ROUND_DATE)


def make_forecast(
    quantiles,
    target_name: str = "DAX",
    horizon_label: str | None = None,
    round_date: date = ROUND_DATE,
) -> QuantileForecast:
    target = target_for_name(target_name)
    label = horizon_label or target.horizons[0].label
    return QuantileForecast(
        target=target,
        horizon=target.horizon_for_label(label),
        round_date=round_date,
        quantiles=tuple(quantiles),
    )


# The correctly specified example file: all 15 rows for 2021-11-03.
GOLDEN_SUBMISSION = """\
forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975
2021-11-03,DAX,1 day,-1.8,-0.3,0.1,0.6,1.7
2021-11-03,DAX,2 day,-3.0,-0.5,0.2,0.9,2.0
2021-11-03,DAX,5 day,-3.0,-0.7,0.2,1.2,2.4
2021-11-03,DAX,6 day,-3.6,-0.9,0.3,1.2,2.7
2021-11-03,DAX,7 day,-3.6,-0.9,0.5,1.4,3.2
2021-11-03,temperature,36 hour,6.5,8.0,8.6,9.2,10.4
2021-11-03,temperature,48 hour,6.2,7.9,8.7,9.2,10.6
2021-11-03,temperature,60 hour,7.9,9.8,10.9,11.7,13.4
2021-11-03,temperature,72 hour,4.3,6.8,7.6,8.3,9.7
2021-11-03,temperature,84 hour,8.5,10.4,11.3,12.0,14.2
2021-11-03,wind,36 hour,8.7,13.8,16.5,19.4,26.2
2021-11-03,wind,48 hour,5.8,15.5,18.9,23.1,30.8
2021-11-03,wind,60 hour,9.7,14.2,16.7,19.0,23.8
2021-11-03,wind,72 hour,6.9,11.9,14.2,17.1,24.3
2021-11-03,wind,84 hour,8.9,14.4,17.7,20.8,26.3
"""
