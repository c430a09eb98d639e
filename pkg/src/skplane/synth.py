"""Synthetic panels with known ground truth, plus brute-force test oracles.

Randomness is pinned to NumPy's PCG64 bit generator.  Asset i draws from its
own stream seeded with ``seed XOR i``, so generation is reproducible under
any parallelisation scheme.  The oracles deliberately share no computation
with the package's estimators: plain multi-pass Python loops for the moments,
explicit Gaussian elimination for least squares.
"""

from __future__ import annotations

import datetime as dt
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, Singular, ZeroVariance
from .ingest import CsvSchema, iso_week_id
from .econometrics import DesignMatrix
from .moments import MomentPanel, MomentRecord

__all__ = [
    "SynthConfig",
    "load_config",
    "generate_moment_panel",
    "generate_raw_csv",
    "moment_oracle",
    "ols_oracle",
]

# Beta(3.25, 3.25) scaled to [-2, 2] has sd 2/sqrt(7.5) ~ 0.73, mimicking the
# observed weekly-skewness dispersion while respecting the length-7 bound.
_S_BETA_SHAPE = 3.25

_DAILY_LOG_RETURN_SCALE = 0.04
_T_TAIL_DF = 3.0
_LN_DELTA_MEAN = 1.0
_LN_DELTA_SD = 1.5


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings; `a`/`b` are the quadratic truth K = a*S^2 + b."""

    n_assets: int
    n_weeks: int
    dgp: str  # "quadratic_sk" | "raw_returns"
    a: float = 0.88
    b: float = 2.0
    interaction: float = 0.0
    sigma_u2: float = 0.02
    sigma_e2: float = 0.05
    covid_week: int = 40
    seed: int = 0
    start: dt.date = dt.date(2019, 4, 1)

    def __post_init__(self):
        if self.n_assets < 1 or self.n_weeks < 1:
            raise InvalidConfig(f"n_assets and n_weeks must be >= 1, got {self.n_assets}, {self.n_weeks}")
        if self.dgp not in ("quadratic_sk", "raw_returns"):
            raise InvalidConfig(f"unknown dgp {self.dgp!r}")
        if self.sigma_u2 < 0.0 or self.sigma_e2 < 0.0:
            raise InvalidConfig("variance components must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.start.isoweekday() != 1:
            raise InvalidConfig(f"start must be a Monday, got {self.start.isoformat()}")


_CONFIG_FIELDS = {
    "n_assets", "n_weeks", "dgp", "a", "b", "interaction",
    "sigma_u2", "sigma_e2", "covid_week", "seed", "start",
}


def load_config(source: str | Path | dict) -> SynthConfig:
    """Build a SynthConfig from a JSON file path or an already-parsed dict."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    else:
        payload = dict(source)
    unknown = set(payload) - _CONFIG_FIELDS
    if unknown:
        raise InvalidConfig(f"unknown config field(s): {sorted(unknown)}")
    if "start" in payload and isinstance(payload["start"], str):
        payload["start"] = dt.date.fromisoformat(payload["start"])
    try:
        return SynthConfig(**payload)
    except TypeError as exc:
        raise InvalidConfig(str(exc)) from None


def _asset_rng(config: SynthConfig, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(config.seed ^ index))


def _symbol(index: int) -> str:
    return f"A{index:04d}"


def generate_moment_panel(config: SynthConfig) -> tuple[MomentPanel, int]:
    """Draw a moment panel with quadratic truth; returns (panel, clip_count).

    Per record: S from the bounded symmetric draw, then
    K = a*S^2 + b + interaction*S^2*D + u_asset + e, with K clipped up to the
    S^2 + 1 floor (clips counted).  The era dummy flips at covid_week.
    """
    if config.dgp != "quadratic_sk":
        raise InvalidConfig(f"generate_moment_panel needs dgp='quadratic_sk', got {config.dgp!r}")
    records = []
    clip_count = 0
    for i in range(config.n_assets):
        rng = _asset_rng(config, i)
        u = rng.normal(0.0, math.sqrt(config.sigma_u2))
        s_draws = 4.0 * rng.beta(_S_BETA_SHAPE, _S_BETA_SHAPE, config.n_weeks) - 2.0
        e_draws = rng.normal(0.0, math.sqrt(config.sigma_e2), config.n_weeks)
        ln_deltas = rng.normal(_LN_DELTA_MEAN, _LN_DELTA_SD, config.n_weeks)
        symbol = _symbol(i)
        for j in range(config.n_weeks):
            s = float(s_draws[j])
            dummy = 1 if j >= config.covid_week else 0
            k = (
                config.a * s * s
                + config.b
                + config.interaction * s * s * dummy
                + u
                + float(e_draws[j])
            )
            floor = s * s + 1.0
            if k < floor:
                k = floor
                clip_count += 1
            week_start = config.start + dt.timedelta(weeks=j)
            ln_d = float(ln_deltas[j])
            records.append(
                MomentRecord(
                    symbol=symbol,
                    week_id=iso_week_id(week_start),
                    week_start=week_start,
                    n_days=7,
                    skewness=s,
                    kurtosis=k,
                    delta=math.exp(ln_d),
                    ln_delta=ln_d,
                    covid=dummy,
                )
            )
    return MomentPanel(tuple(records)), clip_count


def generate_raw_csv(config: SynthConfig, schema: CsvSchema | None = None) -> bytes:
    """Daily value CSV from heavy-tailed log-return draws (t with 3 df).

    Emits n_assets * 7*n_weeks rows in the exact schema the ingest parser
    reads; identical config+seed gives byte-identical output.
    """
    if config.dgp != "raw_returns":
        raise InvalidConfig(f"generate_raw_csv needs dgp='raw_returns', got {config.dgp!r}")
    schema = schema or CsvSchema()
    n_days = 7 * config.n_weeks
    buf = io.StringIO()
    buf.write(f"{schema.date_col},{schema.symbol_col},{schema.value_col}\n")
    for i in range(config.n_assets):
        rng = _asset_rng(config, i)
        log_returns = _DAILY_LOG_RETURN_SCALE * rng.standard_t(_T_TAIL_DF, n_days - 1)
        values = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(log_returns)]))
        symbol = _symbol(i)
        for t in range(n_days):
            day = config.start + dt.timedelta(days=t)
            buf.write(f"{day.isoformat()},{symbol},{format(values[t], '.17g')}\n")
    return buf.getvalue().encode("utf-8")


def moment_oracle(window) -> tuple[float, float, float]:
    """Brute-force (S, K, delta) via separate passes and an explicit sort.

    Cross-checks the batched kernels without sharing any code with them.
    """
    vals = [float(v) for v in window]
    n = len(vals)
    if n < 3:
        raise ValueError(f"oracle needs >= 3 values, got {n}")
    first = vals[0]
    if all(v == first for v in vals):
        raise ZeroVariance("all window values are equal")

    total = 0.0
    for v in vals:
        total += v
    mean = total / n

    m2 = 0.0
    for v in vals:
        m2 += (v - mean) ** 2
    m2 /= n
    sigma = math.sqrt(m2)

    m3 = 0.0
    for v in vals:
        m3 += (v - mean) ** 3
    m3 /= n

    m4 = 0.0
    for v in vals:
        m4 += (v - mean) ** 4
    m4 /= n

    deviations = sorted((abs(v - mean) for v in vals), reverse=True)
    return (
        m3 / sigma**3,
        m4 / sigma**4,
        (deviations[0] - deviations[1]) / sigma,
    )


def ols_oracle(design: DesignMatrix) -> list[float]:
    """Normal equations solved by Gaussian elimination with partial pivoting.

    Independent of fit_pooled_ols: the Gram system is accumulated with plain
    loops and eliminated by hand.  Raises Singular on a vanishing pivot.
    """
    X = design.X
    y = design.y
    n, k = X.shape

    aug = [[0.0] * (k + 1) for _ in range(k)]
    for i in range(k):
        for j in range(k):
            acc = 0.0
            for r in range(n):
                acc += float(X[r, i]) * float(X[r, j])
            aug[i][j] = acc
        acc = 0.0
        for r in range(n):
            acc += float(X[r, i]) * float(y[r])
        aug[i][k] = acc

    scale = max(abs(aug[i][j]) for i in range(k) for j in range(k))
    tol = 1e-12 * max(scale, 1.0)

    for col in range(k):
        pivot_row = max(range(col, k), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot_row][col]) <= tol:
            raise Singular(f"pivot ~ 0 at column {design.term_names[col]!r}")
        if pivot_row != col:
            aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        for r in range(col + 1, k):
            factor = aug[r][col] / aug[col][col]
            for c in range(col, k + 1):
                aug[r][c] -= factor * aug[col][c]

    beta = [0.0] * k
    for row in range(k - 1, -1, -1):
        acc = aug[row][k]
        for c in range(row + 1, k):
            acc -= aug[row][c] * beta[c]
        beta[row] = acc / aug[row][row]
    return beta
