"""Quadratic-model panel estimators and joint hypothesis tests.

Four nested specifications regress kurtosis on transforms of skewness and the
era dummy D (an intercept is always included, matching the reported tables):

    M7   K ~ S^2
    M8   K ~ S^2 + S
    M9   K ~ S^2 + S + S^2*D
    M11  K ~ S^2 + S + S^2*D + D

Estimators: pooled OLS with conventional standard errors, and one-way
Swamy-Arora random effects on the unbalanced panel (variance components from
the within and between regressions, per-group quasi-demeaning).  Joint
restrictions are tested with Wald chi-square and F statistics whose p-values
come from the in-package incomplete gamma/beta tails.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyPanel,
    NonFiniteValue,
    RankDeficient,
    SingularSubcovariance,
    TooFewGroups,
    TooFewRows,
    UnknownTerm,
    WrongEstimator,
)
from .moments import MomentPanel
from .special import chi2_sf, f_sf, student_t_sf_twosided

__all__ = [
    "Model",
    "ModelSpec",
    "DesignMatrix",
    "FitResult",
    "TestResult",
    "build_design",
    "fit_pooled_ols",
    "fit_random_effects",
    "wald_joint_test",
    "f_joint_test",
    "slope_terms",
    "significance_stars",
]

CONST = "const"


class Model(enum.Enum):
    """The four table columns; numbering keeps the gap (no model 10)."""

    M7 = "M7"
    M8 = "M8"
    M9 = "M9"
    M11 = "M11"


MODEL_REGRESSORS: dict[Model, tuple[str, ...]] = {
    Model.M7: ("skew_sq",),
    Model.M8: ("skew_sq", "skew"),
    Model.M9: ("skew_sq", "skew", "skew_sq_covid"),
    Model.M11: ("skew_sq", "skew", "skew_sq_covid", "covid"),
}


@dataclass(frozen=True)
class ModelSpec:
    model: Model
    include_intercept: bool = True

    @property
    def regressors(self) -> tuple[str, ...]:
        return MODEL_REGRESSORS[self.model]


@dataclass(frozen=True)
class DesignMatrix:
    """Stacked regression data: y, named columns of X, and the group index."""

    y: np.ndarray
    X: np.ndarray
    groups: np.ndarray
    term_names: tuple[str, ...]

    @property
    def n_groups(self) -> int:
        return int(self.groups.max()) + 1 if self.groups.size else 0


@dataclass(frozen=True)
class TestResult:
    """Joint-restriction test: statistic, reference df, tail probability."""

    kind: str  # "wald_chi2" | "f"
    statistic: float
    df: int | tuple[int, int]
    p_value: float
    perfect_fit: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "statistic": self.statistic,
            "df": list(self.df) if isinstance(self.df, tuple) else self.df,
            "p_value": self.p_value,
            "stars": significance_stars(self.p_value),
            "perfect_fit": self.perfect_fit,
        }


@dataclass(frozen=True)
class FitResult:
    estimator: str  # "pooled_ols" | "random_effects"
    term_names: tuple[str, ...]
    params: np.ndarray
    std_errors: np.ndarray
    vcov: np.ndarray
    nobs: int
    df_resid: int
    sigma2: float
    r2_overall: float
    r2_within: float | None = None
    r2_between: float | None = None
    sigma_e2: float | None = None
    sigma_u2: float | None = None
    clamped: bool = False
    degenerate_within: tuple[str, ...] = field(default=())
    perfect_fit: bool = False

    @property
    def coefficients(self) -> dict[str, tuple[float, float]]:
        return {
            name: (float(est), float(se))
            for name, est, se in zip(self.term_names, self.params, self.std_errors)
        }

    def p_value(self, term: str) -> float:
        """Coefficient two-sided p: t(df_resid) for OLS, normal for RE."""
        i = self._index(term)
        se = float(self.std_errors[i])
        if se == 0.0:
            return 0.0 if self.params[i] != 0.0 else 1.0
        stat = float(self.params[i]) / se
        if self.estimator == "pooled_ols":
            return student_t_sf_twosided(stat, self.df_resid)
        return math.erfc(abs(stat) / math.sqrt(2.0))

    def _index(self, term: str) -> int:
        try:
            return self.term_names.index(term)
        except ValueError:
            raise UnknownTerm(f"term {term!r} not in fit ({', '.join(self.term_names)})") from None

    def to_dict(self) -> dict:
        out = {
            "estimator": self.estimator,
            "nobs": self.nobs,
            "terms": [
                {
                    "name": name,
                    "estimate": float(self.params[i]),
                    "std_error": float(self.std_errors[i]),
                    "p_value": self.p_value(name),
                    "stars": significance_stars(self.p_value(name)),
                }
                for i, name in enumerate(self.term_names)
            ],
            "r2": {
                "overall": self.r2_overall,
                "within": self.r2_within,
                "between": self.r2_between,
            },
            "perfect_fit": self.perfect_fit,
        }
        if self.estimator == "random_effects":
            out["variance_components"] = {
                "sigma_u2": self.sigma_u2,
                "sigma_e2": self.sigma_e2,
                "clamped": self.clamped,
                "degenerate_within": list(self.degenerate_within),
            }
        return out


def significance_stars(p: float) -> str:
    """Table convention: *** p<0.01, ** p<0.05, * p<0.1."""
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.1:
        return "*"
    return ""


def build_design(panel: MomentPanel, spec: ModelSpec) -> DesignMatrix:
    """Design matrix for one model: kurtosis on the spec's regressors + const."""
    if len(panel.records) == 0:
        raise EmptyPanel("cannot build a design from an empty panel")
    s = np.array([r.skewness for r in panel.records])
    k = np.array([r.kurtosis for r in panel.records])
    d = np.array([float(r.covid) for r in panel.records])
    for name, arr in (("skewness", s), ("kurtosis", k), ("covid", d)):
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue(f"non-finite {name} in panel")

    columns = {
        "skew_sq": s * s,
        "skew": s,
        "skew_sq_covid": s * s * d,
        "covid": d,
    }
    names = list(spec.regressors)
    cols = [columns[name] for name in names]
    if spec.include_intercept:
        names.append(CONST)
        cols.append(np.ones_like(k))

    sym_index: dict[str, int] = {}
    groups = np.empty(len(panel.records), dtype=np.int64)
    for i, r in enumerate(panel.records):
        groups[i] = sym_index.setdefault(r.symbol, len(sym_index))

    return DesignMatrix(
        y=k, X=np.column_stack(cols), groups=groups, term_names=tuple(names)
    )


# -- shared linear-algebra helpers -------------------------------------------
# Gram products go through einsum so results do not depend on the BLAS thread
# count; outputs must be byte-stable across runs.

def _gram(X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ik->jk", X, X)


def _xty(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("ij,i->j", X, y)


def _check_rank(X: np.ndarray, names: tuple[str, ...]) -> None:
    gram = _gram(X)
    prev = 0
    offending = []
    for j in range(1, X.shape[1] + 1):
        r = int(np.linalg.matrix_rank(gram[:j, :j]))
        if r == prev:
            offending.append(names[j - 1])
        prev = r
    if offending:
        raise RankDeficient(offending)


def _solve_ls(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.linalg.solve(_gram(X), _xty(X, y))


def _sq_corr(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    va = float((a * a).sum())
    vb = float((b * b).sum())
    if va <= 0.0 or vb <= 0.0:
        return float("nan")
    c = float((a * b).sum())
    return (c * c) / (va * vb)


def _is_perfect_fit(rss: float, tss: float) -> bool:
    # RSS of an exactly-linear dataset lands near eps^2 * TSS, not at 0.
    return rss <= 1e-24 * tss if tss > 0.0 else rss == 0.0


def _group_means(values: np.ndarray, groups: np.ndarray, counts: np.ndarray) -> np.ndarray:
    if values.ndim == 1:
        return np.bincount(groups, weights=values, minlength=len(counts)) / counts
    return np.column_stack(
        [np.bincount(groups, weights=values[:, j], minlength=len(counts)) / counts
         for j in range(values.shape[1])]
    )


def fit_pooled_ols(design: DesignMatrix) -> FitResult:
    """Least squares on the stacked panel with conventional standard errors."""
    y, X, names = design.y, design.X, design.term_names
    n, k = X.shape
    if n <= k:
        raise TooFewRows(f"need more rows ({n}) than columns ({k})")
    _check_rank(X, names)

    beta = _solve_ls(X, y)
    resid = y - X @ beta
    rss = float((resid * resid).sum())
    df = n - k
    sigma2 = rss / df
    vcov = sigma2 * np.linalg.inv(_gram(X))
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0.0 else float("nan")
    return FitResult(
        estimator="pooled_ols",
        term_names=names,
        params=beta,
        std_errors=np.sqrt(np.diag(vcov)),
        vcov=vcov,
        nobs=n,
        df_resid=df,
        sigma2=sigma2,
        r2_overall=r2,
        perfect_fit=_is_perfect_fit(rss, tss),
    )


def fit_random_effects(design: DesignMatrix) -> FitResult:
    """One-way Swamy-Arora random effects via per-group quasi-demeaning.

    sigma_e^2 comes from the within (fixed-effects) residuals; sigma_u^2 from
    the between regression, corrected by sigma_e^2 over the harmonic mean
    group size and clamped at zero.  Each row is transformed with
    theta_g = 1 - sqrt(sigma_e^2 / (T_g sigma_u^2 + sigma_e^2)) and the
    transformed system is solved by OLS.  Group-constant regressors are
    reported and excluded from the variance-component step only.
    """
    y, X, groups, names = design.y, design.X, design.groups, design.term_names
    n, k = X.shape
    if n <= k:
        raise TooFewRows(f"need more rows ({n}) than columns ({k})")
    n_groups = design.n_groups
    if n_groups < 2:
        raise TooFewGroups(f"random effects needs >= 2 groups, got {n_groups}")
    _check_rank(X, names)

    counts = np.bincount(groups, minlength=n_groups).astype(np.float64)
    ybar = _group_means(y, groups, counts)
    Xbar = _group_means(X, groups, counts)

    # Within step: demeaning removes group-constant columns (incl. the
    # intercept); surviving near-zero columns are regressors to report.
    yw = y - ybar[groups]
    Xw = X - Xbar[groups]
    scale = np.abs(X).max(axis=0)
    within_zero = np.abs(Xw).max(axis=0) <= 1e-12 * (1.0 + scale)
    degenerate = tuple(
        names[j] for j in range(k) if within_zero[j] and names[j] != CONST
    )
    keep = ~within_zero
    k_w = int(keep.sum())

    sigma_e2 = None
    if k_w > 0:
        Xw_kept = Xw[:, keep]
        beta_w, rss_w_arr, rank_w, _ = np.linalg.lstsq(Xw_kept, yw, rcond=None)
        resid_w = yw - Xw_kept @ beta_w
        rss_w = float((resid_w * resid_w).sum())
        df_w = n - n_groups - int(rank_w)
        if df_w > 0:
            sigma_e2 = rss_w / df_w

    clamped = False
    sigma_u2 = 0.0
    if sigma_e2 is None:
        # No usable within variation (e.g. all groups of size one): the
        # error variance falls back to pooled residuals and u is clamped out.
        beta0 = _solve_ls(X, y)
        resid0 = y - X @ beta0
        sigma_e2 = float((resid0 * resid0).sum()) / (n - k)
        clamped = True
    else:
        beta_b, _, rank_b, _ = np.linalg.lstsq(Xbar, ybar, rcond=None)
        resid_b = ybar - Xbar @ beta_b
        rss_b = float((resid_b * resid_b).sum())
        df_b = n_groups - int(rank_b)
        if df_b > 0:
            t_harm = n_groups / float((1.0 / counts).sum())
            raw = rss_b / df_b - sigma_e2 / t_harm
            sigma_u2 = max(0.0, raw)
            clamped = raw <= 0.0
        else:
            clamped = True

    if sigma_e2 > 0.0:
        theta = 1.0 - np.sqrt(sigma_e2 / (counts * sigma_u2 + sigma_e2))
    else:
        # Noiseless panel: theta = 1 would erase the constant, and with no
        # idiosyncratic error GLS weighting is irrelevant; fall back to OLS.
        theta = np.zeros(n_groups) if sigma_u2 == 0.0 else np.ones(n_groups)
        if sigma_u2 == 0.0:
            clamped = True

    ystar = y - theta[groups] * ybar[groups]
    Xstar = X - theta[groups][:, None] * Xbar[groups]
    _check_rank(Xstar, names)

    beta = _solve_ls(Xstar, ystar)
    resid = ystar - Xstar @ beta
    rss = float((resid * resid).sum())
    df = n - k
    sigma2 = rss / df
    vcov = sigma2 * np.linalg.inv(_gram(Xstar))

    yhat = X @ beta
    r2_overall = _sq_corr(yhat, y)
    r2_within = _sq_corr(yhat - _group_means(yhat, groups, counts)[groups], yw)
    r2_between = _sq_corr(_group_means(yhat, groups, counts), ybar)
    tss = float(((ystar - ystar.mean()) ** 2).sum())

    return FitResult(
        estimator="random_effects",
        term_names=names,
        params=beta,
        std_errors=np.sqrt(np.diag(vcov)),
        vcov=vcov,
        nobs=n,
        df_resid=df,
        sigma2=sigma2,
        r2_overall=r2_overall,
        r2_within=r2_within,
        r2_between=r2_between,
        sigma_e2=float(sigma_e2),
        sigma_u2=float(sigma_u2),
        clamped=clamped,
        degenerate_within=degenerate,
        perfect_fit=_is_perfect_fit(rss, tss),
    )


def _subvector(fit: FitResult, terms: tuple[str, ...] | list[str]):
    if not terms:
        raise ValueError("terms must be non-empty")
    idx = [fit._index(t) for t in terms]
    return fit.params[idx], fit.vcov[np.ix_(idx, idx)]


def _wald_form(beta_q: np.ndarray, v_q: np.ndarray) -> float:
    q = len(beta_q)
    if np.linalg.matrix_rank(v_q) < q:
        raise SingularSubcovariance(
            f"sub-covariance of {q} term(s) is singular"
        )
    w = float(beta_q @ np.linalg.solve(v_q, beta_q))
    return max(w, 0.0)


def wald_joint_test(fit: FitResult, terms) -> TestResult:
    """Wald chi-square test that the named coefficients are jointly zero."""
    beta_q, v_q = _subvector(fit, terms)
    q = len(beta_q)
    if np.all(beta_q == 0.0):
        return TestResult("wald_chi2", 0.0, q, 1.0)
    if fit.perfect_fit:
        # Vanishing residual variance makes the statistic blow up.
        return TestResult("wald_chi2", math.inf, q, 0.0, perfect_fit=True)
    w = _wald_form(beta_q, v_q)
    return TestResult("wald_chi2", w, q, chi2_sf(w, q))


def f_joint_test(fit: FitResult, terms) -> TestResult:
    """F test (Wald form over q) of joint zero restrictions on a pooled OLS fit."""
    if fit.estimator != "pooled_ols":
        raise WrongEstimator(f"f_joint_test needs a pooled OLS fit, got {fit.estimator}")
    beta_q, v_q = _subvector(fit, terms)
    q = len(beta_q)
    df = (q, fit.df_resid)
    if np.all(beta_q == 0.0):
        return TestResult("f", 0.0, df, 1.0)
    if fit.perfect_fit:
        return TestResult("f", math.inf, df, 0.0, perfect_fit=True)
    f = _wald_form(beta_q, v_q) / q
    return TestResult("f", f, df, f_sf(f, q, fit.df_resid))


def slope_terms(fit: FitResult) -> list[str]:
    """All coefficient names except the intercept (the zero-total-effect set)."""
    return [t for t in fit.term_names if t != CONST]
