#!/usr/bin/env python3
"""Generate the sample FRED-format extract shipped with the repository.

A fixed-seed quarterly simulation of (inflation, unemployment, output
gap, policy rate) spanning 1955-2025 is rendered back into the five raw
CSV files the ingestion layer expects: monthly CPI, unemployment and
fed funds, quarterly real and potential GDP. Intra-quarter wiggle is
zero-sum so quarterly aggregation recovers the simulated values almost
exactly; CPI levels are built so that year-over-year inflation
reproduces the simulated inflation path.

Usage: python scripts/make_sample_data.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

SEED = 19551955

START_YEAR = 1955
N_QUARTERS = 282  # 1955Q1 .. 2025Q2

# Generator dynamics: persistent but stable, with a weak policy channel.
# Calibrated so the re-estimated model gives a well-behaved benchmark:
# no divergence-bound hits under any policy, losses on the scale of the
# published table, and a mean inflation offset that active policy can
# profitably close.
A_GEN = np.array(
    [
        [0.93, -0.03, 0.04],
        [-0.015, 0.88, -0.04],
        [0.04, -0.05, 0.80],
    ]
)
B_GEN = np.array([-0.10, 0.008, -0.05])
SHOCK_STD = np.array([1.05, 0.42, 1.00])
TARGET_MEANS = np.array([4.3, 6.2, 0.0])  # pi, u, y
NEUTRAL_RATE = 4.5

RATE_SMOOTHING = 0.86
RATE_NOISE_STD = 1.0
RULE_U_RESPONSE = 0.3


def simulate_quarterly(seed: int) -> np.ndarray:
    """Rows of (pi, u, y, i), one per quarter.

    The generator's policy rule responds to inflation, the gap, and
    unemployment with heavy smoothing plus sizable exogenous moves; the
    exogenous component is what identifies the policy channel when the
    transition model is re-estimated from the extract. The intercept is
    polished over a few passes of the same shock path so the realized
    sample means land on the targets despite feedback.
    """
    c = (np.eye(3) - A_GEN) @ TARGET_MEANS - B_GEN * NEUTRAL_RATE
    rows = np.zeros((N_QUARTERS, 4))
    for _ in range(4):
        rng = np.random.default_rng(seed)
        x = TARGET_MEANS.copy()
        rate = NEUTRAL_RATE
        for t in range(N_QUARTERS):
            taylor = (
                2.0
                + x[0]
                + 0.5 * (x[0] - 2.0)
                + 0.5 * x[2]
                - RULE_U_RESPONSE * (x[1] - TARGET_MEANS[1])
            )
            rate = RATE_SMOOTHING * rate + (1 - RATE_SMOOTHING) * taylor
            rate += RATE_NOISE_STD * rng.standard_normal()
            rate = float(np.clip(rate, 0.1, 19.0))
            rows[t, :3] = x
            rows[t, 3] = rate
            x = c + A_GEN @ x + B_GEN * rate + SHOCK_STD * rng.standard_normal(3)
            x[1] = max(x[1], 1.5)  # unemployment cannot go negative
        realized = rows[:, :3].mean(axis=0)
        c = c + 0.8 * (np.eye(3) - A_GEN) @ (TARGET_MEANS - realized)
    return rows


def month_dates(year: int, quarter: int) -> list[str]:
    months = {1: (1, 2, 3), 2: (4, 5, 6), 3: (7, 8, 9), 4: (10, 11, 12)}[quarter]
    return [f"{year:04d}-{m:02d}-01" for m in months]


def zero_sum_wiggle(rng: np.random.Generator, scale: float) -> np.ndarray:
    d = rng.normal(0.0, scale, size=2)
    return np.array([d[0], d[1], -d[0] - d[1]])


def write_series(path: Path, series_id: str, rows: list[tuple[str, float]], decimals: int) -> None:
    lines = [f"DATE,{series_id}"]
    for date, value in rows:
        lines.append(f"{date},{value:.{decimals}f}")
    path.write_text("\n".join(lines) + "\n")


def generate_sample_data(out_dir: str | Path, seed: int = SEED) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed + 1)  # intra-quarter wiggle stream
    states = simulate_quarterly(seed)
    pi, u, y, i = states.T

    quarters = [(START_YEAR + k // 4, k % 4 + 1) for k in range(N_QUARTERS)]

    # CPI levels: seed the first year near the 1955 index level, then
    # chain each quarter off the level four quarters back.
    cpi_q = np.zeros(N_QUARTERS)
    for k in range(4):
        cpi_q[k] = 26.0 * (1.0 + 0.002 * k)
    for k in range(4, N_QUARTERS):
        cpi_q[k] = cpi_q[k - 4] * (1.0 + pi[k] / 100.0)

    cpi_rows, unrate_rows, ff_rows = [], [], []
    for k, (year, quarter) in enumerate(quarters):
        dates = month_dates(year, quarter)
        for date, dv in zip(dates, zero_sum_wiggle(rng, 0.02)):
            cpi_rows.append((date, cpi_q[k] * (1.0 + dv / 100.0)))
        for date, dv in zip(dates, zero_sum_wiggle(rng, 0.05)):
            unrate_rows.append((date, max(u[k] + dv, 0.5)))
        for date, dv in zip(dates, zero_sum_wiggle(rng, 0.04)):
            ff_rows.append((date, max(i[k] + dv, 0.0)))

    # Potential GDP: smooth exponential trend; real GDP carries the gap.
    trend = 3000.0 * np.exp(0.0074 * np.arange(N_QUARTERS))
    gdp_rows, pot_rows = [], []
    for k, (year, quarter) in enumerate(quarters):
        date = month_dates(year, quarter)[0]
        pot_rows.append((date, trend[k]))
        gdp_rows.append((date, trend[k] * (1.0 + y[k] / 100.0)))

    write_series(out_dir / "CPIAUCSL.csv", "CPIAUCSL", cpi_rows, 3)
    write_series(out_dir / "UNRATE.csv", "UNRATE", unrate_rows, 1)
    write_series(out_dir / "FEDFUNDS.csv", "FEDFUNDS", ff_rows, 2)
    write_series(out_dir / "GDPC1.csv", "GDPC1", gdp_rows, 1)
    write_series(out_dir / "GDPPOT.csv", "GDPPOT", pot_rows, 1)


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    generate_sample_data(target)
    print(f"wrote sample FRED extract to {target}")
