"""Deterministic time-series feature extraction.

Implements the 21-feature catalogue as pure functions of a value vector.
Every feature that is mathematically undefined on its input yields NaN with
a machine-readable reason rather than raising. Conventions used throughout:

* population (biased) variance wherever sigma^2 normalizes an
  autocorrelation; the bias-adjusted estimator only inside kurtosis;
* entropy tolerances are ``r_factor * population std`` with Chebyshev
  template distance; approximate entropy includes self-matches, sample
  entropy excludes them and counts only templates that have an (m+1)
  extension;
* the DFT is the plain unnormalized sum X_k = sum_t x_t e^{-2*pi*i*k*t/n}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import betainc

from .core import SignalSeries
from .errors import EmptySeries, UnknownFeature

__all__ = [
    "FeatureSpec",
    "FeatureEntry",
    "FeatureVector",
    "extract",
    "extract_values",
    "default_specs",
    "features_csv",
    "features_json_payload",
    "FEATURE_NAMES",
    "approximate_entropy_counts",
    "sample_entropy_counts",
]

Result = tuple[float, Optional[str]]

_AGGREGATORS: dict[str, Callable[[np.ndarray], float]] = {
    "mean": lambda a: float(np.mean(a)),
    "median": lambda a: float(np.median(a)),
    "var": lambda a: float(np.var(a)),
    "std": lambda a: float(np.std(a)),
}


def _ok(value: float) -> Result:
    return float(value), None


def _undefined(reason: str) -> Result:
    return float("nan"), reason


# ── elementary statistics ────────────────────────────────────────────


def abs_energy(x: np.ndarray) -> Result:
    """Sum of squared values."""
    return _ok(np.dot(x, x))


def absolute_sum_of_changes(x: np.ndarray) -> Result:
    """Sum of |x_{i+1} - x_i|."""
    if len(x) < 2:
        return _undefined("series too short")
    return _ok(np.abs(np.diff(x)).sum())


def mean_abs_change(x: np.ndarray) -> Result:
    if len(x) < 2:
        return _undefined("series too short")
    return _ok(np.abs(np.diff(x)).mean())


def root_mean_square(x: np.ndarray) -> Result:
    return _ok(math.sqrt(float(np.mean(x * x))))


def variance(x: np.ndarray) -> Result:
    return _ok(np.var(x))


def variation_coefficient(x: np.ndarray) -> Result:
    """Population std divided by the mean."""
    m = float(np.mean(x))
    if m == 0.0:
        return _undefined("zero mean")
    return _ok(float(np.std(x)) / m)


def kurtosis(x: np.ndarray) -> Result:
    """Fisher excess kurtosis, bias-adjusted (G2)."""
    n = len(x)
    if n < 4:
        return _undefined("series too short")
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        return _undefined("zero variance")
    m4 = float(np.mean(d ** 4))
    g2 = m4 / (m2 * m2) - 3.0
    return _ok(((n + 1) * g2 + 6.0) * (n - 1) / ((n - 2) * (n - 3)))


def quantile(x: np.ndarray, q: float) -> Result:
    """Linear-interpolation quantile."""
    return _ok(np.quantile(x, q))


# ── autocorrelation family ───────────────────────────────────────────


def _acf(x: np.ndarray, lag: int) -> Result:
    """R(lag) = sum (x_t - mu)(x_{t+lag} - mu) / ((n - lag) * sigma^2)."""
    n = len(x)
    if lag == 0:
        return _ok(1.0)
    if n <= lag:
        return _undefined("series shorter than lag")
    var = float(np.var(x))
    if var == 0.0:
        return _undefined("zero variance")
    d = x - x.mean()
    return _ok(float(np.dot(d[:-lag], d[lag:])) / ((n - lag) * var))


def autocorrelation(x: np.ndarray, lag: int) -> Result:
    return _acf(x, lag)


def agg_autocorrelation(x: np.ndarray, f_agg: str, maxlag: int) -> Result:
    """f_agg over [R(1) .. R(maxlag)], maxlag capped at n - 1."""
    n = len(x)
    if n < 2:
        return _undefined("series too short")
    if float(np.var(x)) == 0.0:
        return _undefined("zero variance")
    top = min(maxlag, n - 1)
    vals = np.array([_acf(x, lag)[0] for lag in range(1, top + 1)])
    return _ok(_AGGREGATORS[f_agg](vals))


def _durbin_levinson(rho: np.ndarray) -> Optional[np.ndarray]:
    """Solve the Yule-Walker system; returns phi[k, j] = phi_{k+1, j+1} or None."""
    p = len(rho)
    phi = np.zeros((p, p))
    phi[0, 0] = rho[0]
    for k in range(1, p):
        prev = phi[k - 1, :k]
        den = 1.0 - float(prev @ rho[:k])
        if abs(den) < 1e-14:
            return None
        phi[k, k] = (rho[k] - float(prev @ rho[k - 1 :: -1])) / den
        phi[k, :k] = prev - phi[k, k] * prev[::-1]
    return phi


def partial_autocorrelation(x: np.ndarray, lag: int) -> Result:
    """PACF at the given lag via the Durbin-Levinson recursion."""
    n = len(x)
    if lag == 0:
        return _ok(1.0)
    if n <= lag:
        return _undefined("series shorter than lag")
    if float(np.var(x)) == 0.0:
        return _undefined("zero variance")
    rho = np.array([_acf(x, k)[0] for k in range(1, lag + 1)])
    phi = _durbin_levinson(rho)
    if phi is None:
        return _undefined("rank deficient")
    return _ok(phi[lag - 1, lag - 1])


# ── entropies ────────────────────────────────────────────────────────


def _chebyshev_matrix(templates: np.ndarray) -> np.ndarray:
    return np.max(np.abs(templates[:, None, :] - templates[None, :, :]), axis=2)


def approximate_entropy_counts(x: np.ndarray, m: int, r: float) -> np.ndarray:
    """Per-template neighbour counts C_i (self-matches included)."""
    x = np.asarray(x, dtype=float)
    t = sliding_window_view(x, m)
    dist = _chebyshev_matrix(t)
    return np.count_nonzero(dist <= r, axis=1)


def _apen_phi(x: np.ndarray, m: int, r: float) -> float:
    counts = approximate_entropy_counts(x, m, r)
    return float(np.mean(np.log(counts / len(counts))))


def approximate_entropy(x: np.ndarray, m: int, r_factor: float) -> Result:
    """ApEn = Phi_m(r) - Phi_{m+1}(r), r = r_factor * population std."""
    if len(x) < m + 2:
        return _undefined("series too short")
    sd = float(np.std(x))
    if sd == 0.0:
        return _undefined("zero std")
    r = r_factor * sd
    return _ok(_apen_phi(x, m, r) - _apen_phi(x, m + 1, r))


def sample_entropy_counts(x: np.ndarray, m: int, r: float) -> tuple[int, int]:
    """(A, B): matched template pairs at length m+1 and m.

    Only the first n - m templates of length m are considered, so each has
    an (m+1) extension; self-matches are excluded (pairs i < j).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    tm = sliding_window_view(x, m)[: n - m]
    tm1 = sliding_window_view(x, m + 1)
    iu = np.triu_indices(n - m, k=1)
    b = int(np.count_nonzero(_chebyshev_matrix(tm)[iu] <= r))
    a = int(np.count_nonzero(_chebyshev_matrix(tm1)[iu] <= r))
    return a, b


def sample_entropy(x: np.ndarray, m: int, r_factor: float) -> Result:
    """SampEn = -ln(A / B) with self-matches excluded."""
    if len(x) < m + 2:
        return _undefined("series too short")
    sd = float(np.std(x))
    if sd == 0.0:
        return _undefined("zero std")
    a, b = sample_entropy_counts(x, m, r_factor * sd)
    if b == 0 or a == 0:
        return _undefined("no matches")
    return _ok(-math.log(a / b))


# ── spectral family ──────────────────────────────────────────────────

_FFT_COEFF_ATTRS = ("real", "imag", "abs", "angle")
_FFT_AGG_ATTRS = ("centroid", "variance", "skew", "kurtosis")


def fft_coefficient(x: np.ndarray, coeff: int, attr: str) -> Result:
    if len(x) < 2:
        return _undefined("series too short")
    if coeff >= len(x):
        return _undefined("coeff out of range")
    xk = np.fft.fft(x)[coeff]
    if attr == "real":
        return _ok(xk.real)
    if attr == "imag":
        return _ok(xk.imag)
    if attr == "abs":
        return _ok(abs(xk))
    return _ok(math.degrees(math.atan2(xk.imag, xk.real)))


def fft_aggregated(x: np.ndarray, attr: str) -> Result:
    """Moments of the one-sided magnitude spectrum over bin index."""
    if len(x) < 2:
        return _undefined("series too short")
    mag = np.abs(np.fft.rfft(x))
    total = float(mag.sum())
    if total == 0.0:
        return _undefined("zero spectrum")
    p = mag / total
    bins = np.arange(len(mag), dtype=float)
    centroid = float(np.dot(bins, p))
    if attr == "centroid":
        return _ok(centroid)
    dev = bins - centroid
    var = float(np.dot(dev * dev, p))
    if attr == "variance":
        return _ok(var)
    if var == 0.0:
        return _undefined("zero spectral variance")
    if attr == "skew":
        return _ok(float(np.dot(dev ** 3, p)) / var ** 1.5)
    return _ok(float(np.dot(dev ** 4, p)) / var ** 2)


# ── model-based family ───────────────────────────────────────────────


def ar_coefficient(x: np.ndarray, k: int, p: int) -> Result:
    """phi_k of an AR(p) fit by Yule-Walker, solved via Durbin-Levinson."""
    if len(x) <= p:
        return _undefined("series too short")
    if float(np.var(x)) == 0.0:
        return _undefined("zero variance")
    rho = np.array([_acf(x, lag)[0] for lag in range(1, p + 1)])
    phi = _durbin_levinson(rho)
    if phi is None:
        return _undefined("rank deficient")
    return _ok(phi[p - 1, k - 1])


def _ols_qr(X: np.ndarray, y: np.ndarray):
    """(beta, se, ok_reason): stable OLS with coefficient standard errors."""
    nrows, ncols = X.shape
    if nrows <= ncols:
        return None, None, "series too short"
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0):
        return None, None, "rank deficient"
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    sigma2 = float(resid @ resid) / (nrows - ncols)
    rinv = np.linalg.solve(r, np.eye(ncols))
    se = np.sqrt(np.maximum(sigma2 * np.sum(rinv * rinv, axis=1), 0.0))
    return beta, se, None


_ADF_ATTRS = ("teststat", "usedlag", "pvalue")


def augmented_dickey_fuller(x: np.ndarray, attr: str, lag: int = 1) -> Result:
    """t-statistic of the level coefficient in the ADF regression.

    dx_t = alpha + beta * x_{t-1} + sum_{i=1..lag} gamma_i * dx_{t-i} + eps.
    p-values need response-surface tables and are not supported.
    """
    if attr == "pvalue":
        return _undefined("unsupported attr")
    if attr == "usedlag":
        return _ok(float(lag))
    n = len(x)
    dx = np.diff(x)
    nrows = n - 1 - lag
    if nrows <= 2 + lag:
        return _undefined("series too short")
    y = dx[lag:]
    cols = [np.ones(nrows), x[lag : n - 1]]
    for i in range(1, lag + 1):
        cols.append(dx[lag - i : len(dx) - i])
    X = np.column_stack(cols)
    beta, se, reason = _ols_qr(X, y)
    if reason is not None:
        return _undefined(reason)
    if se[1] == 0.0:
        return _undefined("zero residual variance")
    return _ok(float(beta[1] / se[1]))


_TREND_ATTRS = ("slope", "intercept", "rvalue", "pvalue", "stderr")


def linear_trend(x: np.ndarray, attr: str) -> Result:
    """OLS of the values against the sample index.

    The two-sided p-value comes from the regularized incomplete beta
    function: p = I_{df/(df+t^2)}(df/2, 1/2) with df = n - 2.
    """
    n = len(x)
    if n < 2:
        return _undefined("series too short")
    t = np.arange(n, dtype=float)
    tc = t - t.mean()
    xc = x - x.mean()
    sst = float(tc @ tc)
    ssx = float(xc @ xc)
    cross = float(tc @ xc)
    slope = cross / sst
    if attr == "slope":
        return _ok(slope)
    if attr == "intercept":
        return _ok(float(x.mean()) - slope * float(t.mean()))
    den = math.sqrt(sst * ssx)
    r = 0.0 if den == 0.0 else max(-1.0, min(1.0, cross / den))
    if attr == "rvalue":
        return _ok(r)
    if n < 3:
        return _undefined("series too short")
    df = n - 2
    if attr == "pvalue":
        if 1.0 - r * r <= 0.0:
            return _ok(0.0)
        tstat = r * math.sqrt(df / (1.0 - r * r))
        return _ok(float(betainc(df / 2.0, 0.5, df / (df + tstat * tstat))))
    # stderr of the slope
    resid = max(ssx - slope * slope * sst, 0.0)
    return _ok(math.sqrt(resid / (df * sst)))


# ── miscellaneous ────────────────────────────────────────────────────

_BENFORD_MASS = np.log10(1.0 + 1.0 / np.arange(1, 10))


def _first_digit(value: float) -> int:
    mantissa = np.format_float_scientific(abs(value))
    return int(mantissa[0])


def benford_correlation(x: np.ndarray) -> Result:
    """Pearson correlation of the first-digit histogram with Benford's law."""
    nonzero = x[np.isfinite(x) & (x != 0.0)]
    if len(nonzero) == 0:
        return _undefined("no nonzero values")
    digits = np.array([_first_digit(v) for v in nonzero])
    freq = np.bincount(digits, minlength=10)[1:10] / len(nonzero)
    if np.std(freq) == 0.0:
        return _undefined("zero variance")
    return _ok(float(np.corrcoef(freq, _BENFORD_MASS)[0, 1]))


def change_quantiles(x: np.ndarray, ql: float, qh: float, isabs: bool, f_agg: str) -> Result:
    """Aggregate of consecutive changes whose endpoints both sit inside the
    [quantile(ql), quantile(qh)] corridor; 0 when no step qualifies."""
    if len(x) < 2:
        return _undefined("series too short")
    lo = np.quantile(x, ql)
    hi = np.quantile(x, qh)
    inside = (x >= lo) & (x <= hi)
    sel = inside[:-1] & inside[1:]
    if not sel.any():
        return _ok(0.0)
    d = np.diff(x)[sel]
    if isabs:
        d = np.abs(d)
    return _ok(_AGGREGATORS[f_agg](d))


def cid_ce(x: np.ndarray, normalize: bool) -> Result:
    """Complexity estimate sqrt(sum of squared consecutive differences)."""
    if len(x) < 2:
        return _undefined("series too short")
    if normalize:
        sd = float(np.std(x))
        if sd == 0.0:
            return _undefined("zero std")
        x = (x - x.mean()) / sd
    d = np.diff(x)
    return _ok(math.sqrt(float(d @ d)))


# ── registry, specs, extraction ──────────────────────────────────────


def _cast_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str):
        if v.lower() in ("true", "1"):
            return True
        if v.lower() in ("false", "0"):
            return False
    raise ValueError(f"not a boolean: {v!r}")


def _cast_choice(options: Sequence[str]):
    def cast(v) -> str:
        if v not in options:
            raise ValueError(f"expected one of {options}, got {v!r}")
        return v

    return cast


def _cast_unit(v) -> float:
    f = float(v)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"expected a fraction in [0, 1], got {v!r}")
    return f


def _cast_nonneg_int(v) -> int:
    i = int(v)
    if i < 0:
        raise ValueError(f"expected a non-negative integer, got {v!r}")
    return i


def _cast_pos_int(v) -> int:
    i = int(v)
    if i < 1:
        raise ValueError(f"expected a positive integer, got {v!r}")
    return i


# name -> (callable, ordered (param, caster, default) triples); the order
# fixes the canonical feature_id grammar `name__k=v__k=v`.
_REGISTRY: dict[str, tuple[Callable, tuple[tuple[str, Callable, object], ...]]] = {
    "abs_energy": (abs_energy, ()),
    "absolute_sum_of_changes": (absolute_sum_of_changes, ()),
    "mean_abs_change": (mean_abs_change, ()),
    "root_mean_square": (root_mean_square, ()),
    "variance": (variance, ()),
    "variation_coefficient": (variation_coefficient, ()),
    "kurtosis": (kurtosis, ()),
    "quantile": (quantile, (("q", _cast_unit, 0.5),)),
    "autocorrelation": (autocorrelation, (("lag", _cast_nonneg_int, 1),)),
    "agg_autocorrelation": (
        agg_autocorrelation,
        (("f_agg", _cast_choice(tuple(_AGGREGATORS)), "mean"), ("maxlag", _cast_pos_int, 2)),
    ),
    "partial_autocorrelation": (partial_autocorrelation, (("lag", _cast_nonneg_int, 1),)),
    "approximate_entropy": (
        approximate_entropy,
        (("m", _cast_pos_int, 2), ("r_factor", float, 0.2)),
    ),
    "sample_entropy": (sample_entropy, (("m", _cast_pos_int, 2), ("r_factor", float, 0.2))),
    "fft_coefficient": (
        fft_coefficient,
        (("coeff", _cast_nonneg_int, 5), ("attr", _cast_choice(_FFT_COEFF_ATTRS), "abs")),
    ),
    "fft_aggregated": (fft_aggregated, (("attr", _cast_choice(_FFT_AGG_ATTRS), "centroid"),)),
    "ar_coefficient": (ar_coefficient, (("k", _cast_pos_int, 1), ("p", _cast_pos_int, 4))),
    "augmented_dickey_fuller": (
        augmented_dickey_fuller,
        (("attr", _cast_choice(_ADF_ATTRS), "teststat"), ("lag", _cast_pos_int, 1)),
    ),
    "linear_trend": (linear_trend, (("attr", _cast_choice(_TREND_ATTRS), "slope"),)),
    "benford_correlation": (benford_correlation, ()),
    "change_quantiles": (
        change_quantiles,
        (
            ("ql", _cast_unit, 0.1),
            ("qh", _cast_unit, 0.9),
            ("isabs", _cast_bool, True),
            ("f_agg", _cast_choice(tuple(_AGGREGATORS)), "mean"),
        ),
    ),
    "cid_ce": (cid_ce, (("normalize", _cast_bool, True),)),
}

FEATURE_NAMES = tuple(sorted(_REGISTRY))


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


@dataclass(frozen=True)
class FeatureSpec:
    """One feature request: canonical name plus fully resolved parameters."""

    name: str
    params: tuple[tuple[str, object], ...] = ()

    @classmethod
    def make(cls, name: str, **params) -> "FeatureSpec":
        """Build a spec, applying defaults and validating parameter values."""
        if name not in _REGISTRY:
            raise UnknownFeature(f"unknown feature {name!r}")
        _, schema = _REGISTRY[name]
        known = {p for p, _, _ in schema}
        extra = set(params) - known
        if extra:
            raise UnknownFeature(f"{name}: unknown parameter(s) {sorted(extra)}")
        resolved = []
        for pname, caster, default in schema:
            raw = params.get(pname, default)
            try:
                resolved.append((pname, caster(raw)))
            except (TypeError, ValueError) as exc:
                raise UnknownFeature(f"{name}: bad {pname}: {exc}") from exc
        spec = cls(name, tuple(resolved))
        if name == "ar_coefficient":
            kv = dict(spec.params)
            if kv["k"] > kv["p"]:
                raise UnknownFeature("ar_coefficient: k must not exceed p")
        return spec

    @property
    def feature_id(self) -> str:
        parts = [self.name] + [f"{k}={_format_value(v)}" for k, v in self.params]
        return "__".join(parts)

    def compute(self, x: np.ndarray) -> Result:
        func, _ = _REGISTRY[self.name]
        return func(x, **dict(self.params))


@dataclass(frozen=True)
class FeatureEntry:
    feature_id: str
    value: float
    reason: Optional[str] = None

    def __post_init__(self):
        if (self.reason is not None) != math.isnan(self.value):
            raise ValueError("NaN values and reasons must come in pairs")


@dataclass(frozen=True)
class FeatureVector:
    """Deterministically ordered feature values for one series."""

    entries: tuple[FeatureEntry, ...]

    def as_dict(self) -> dict[str, float]:
        return {e.feature_id: e.value for e in self.entries}

    def __len__(self) -> int:
        return len(self.entries)


def default_specs() -> list[FeatureSpec]:
    """The documented default extraction set (one spec list fits all signals)."""
    specs: list[FeatureSpec] = []
    for name in (
        "abs_energy",
        "absolute_sum_of_changes",
        "mean_abs_change",
        "root_mean_square",
        "variance",
        "variation_coefficient",
        "kurtosis",
        "benford_correlation",
    ):
        specs.append(FeatureSpec.make(name))
    specs += [FeatureSpec.make("quantile", q=q) for q in (0.1, 0.5, 0.9)]
    specs += [FeatureSpec.make("autocorrelation", lag=lag) for lag in range(1, 6)]
    specs.append(FeatureSpec.make("agg_autocorrelation", f_agg="mean", maxlag=2))
    specs += [FeatureSpec.make("partial_autocorrelation", lag=lag) for lag in range(1, 6)]
    specs.append(FeatureSpec.make("approximate_entropy", m=2, r_factor=0.2))
    specs.append(FeatureSpec.make("sample_entropy", m=2, r_factor=0.2))
    specs.append(FeatureSpec.make("fft_coefficient", coeff=5, attr="abs"))
    specs += [FeatureSpec.make("fft_aggregated", attr=a) for a in _FFT_AGG_ATTRS]
    specs += [FeatureSpec.make("ar_coefficient", k=k, p=4) for k in range(1, 5)]
    specs += [
        FeatureSpec.make("augmented_dickey_fuller", attr=a, lag=1)
        for a in ("teststat", "usedlag")
    ]
    specs += [FeatureSpec.make("linear_trend", attr=a) for a in _TREND_ATTRS]
    specs.append(
        FeatureSpec.make("change_quantiles", ql=0.1, qh=0.9, isabs=True, f_agg="mean")
    )
    specs += [FeatureSpec.make("cid_ce", normalize=flag) for flag in (False, True)]
    return specs


def extract_values(x, specs: Sequence[FeatureSpec]) -> FeatureVector:
    """Run the given specs against a raw value vector."""
    x = np.asarray(x, dtype=float).ravel()
    if len(x) == 0:
        raise EmptySeries("cannot extract features from an empty series")
    ids = [s.feature_id for s in specs]
    if len(set(ids)) != len(ids):
        raise UnknownFeature("duplicate feature specs requested")
    entries = []
    for spec in specs:
        value, reason = spec.compute(x)
        entries.append(FeatureEntry(spec.feature_id, value, reason))
    entries.sort(key=lambda e: e.feature_id)
    return FeatureVector(tuple(entries))


def extract(series: SignalSeries, specs: Optional[Sequence[FeatureSpec]] = None) -> FeatureVector:
    """Extract features from a signal series (default set when specs is None)."""
    return extract_values(series.values, default_specs() if specs is None else specs)


def features_csv(vector: FeatureVector) -> str:
    """CSV export: feature_id,value,reason (reason empty for defined values)."""
    lines = ["feature_id,value,reason"]
    for e in vector.entries:
        value = "" if e.reason is not None else repr(e.value)
        lines.append(f"{e.feature_id},{value},{e.reason or ''}")
    return "\n".join(lines) + "\n"


def features_json_payload(vector: FeatureVector) -> dict:
    """JSON-safe map: values (NaN -> null) plus a reasons side map."""
    values: dict[str, Optional[float]] = {}
    reasons: dict[str, str] = {}
    for e in vector.entries:
        values[e.feature_id] = None if e.reason is not None else e.value
        if e.reason is not None:
            reasons[e.feature_id] = e.reason
    return {"values": values, "reasons": reasons}
