"""RMSD benchmark statistics.

Summary statistics, relative improvement, paired one-tailed t-tests with
Cohen's d_z and a confidence interval, the Wilcoxon signed-rank test
and score/RMSD correlation.  One-tailed tests use the alternative
"baseline RMSD is greater than hybrid RMSD".
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from .errors import DegenerateTestError, DomainError, EmptyInputError, ShapeError, ValidationError

WILCOXON_EXACT_MAX_N = 25


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    median: float
    std: float
    min: float
    max: float


@dataclass(frozen=True)
class PairedTestResult:
    n: int
    mean_diff: float
    ci95_low: float
    ci95_high: float
    t_statistic: float
    p_one_tailed: float
    cohens_dz: float
    wilcoxon_p_one_tailed: float | None = None


@dataclass(frozen=True)
class Correlation:
    pearson_r: float
    r_squared: float
    slope: float
    intercept: float


def summary_stats(rmsds):
    """Mean, median, sample standard deviation (n - 1), min and max."""
    x = np.asarray(rmsds, dtype=float)
    if x.size == 0:
        raise EmptyInputError("no values")
    std = float(np.std(x, ddof=1)) if x.size > 1 else math.nan
    return SummaryStats(
        n=int(x.size),
        mean=float(np.mean(x)),
        median=float(np.median(x)),
        std=std,
        min=float(np.min(x)),
        max=float(np.max(x)),
    )


def improvement(baseline_mean, hybrid_mean):
    """Percent reduction of the hybrid mean relative to a baseline mean."""
    if not baseline_mean > 0:
        raise DomainError("baseline mean must be positive")
    return 100.0 * (baseline_mean - hybrid_mean) / baseline_mean


def student_t_sf(t, df):
    """Upper tail P(T >= t) of Student's t via the regularized incomplete beta."""
    if df <= 0:
        raise DomainError("degrees of freedom must be positive")
    if t == 0:
        return 0.5
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5 * float(special.betainc(0.5 * df, 0.5, df / (df + t * t)))
    return tail if t > 0 else 1.0 - tail


def cohens_dz_from_t(t, n):
    return t / math.sqrt(n)


def paired_t_test(baseline, hybrid):
    """Paired one-tailed t-test on ``baseline - hybrid``.

    Identical inputs give the null result (t = 0, p = 0.5, d_z = 0).

    Raises
    ------
    ShapeError
        Unequal lengths or fewer than two pairs.
    DegenerateTestError
        Differences are constant but not all zero.
    """
    a = np.asarray(baseline, dtype=float)
    b = np.asarray(hybrid, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ShapeError("baseline and hybrid must be aligned 1-D sequences")
    n = a.size
    if n < 2:
        raise ShapeError("need at least two pairs")
    d = a - b
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        if np.all(d == 0):
            return PairedTestResult(n, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, None)
        raise DegenerateTestError("differences have zero variance")
    se = sd / math.sqrt(n)
    t = mean / se
    half = float(stats.t.ppf(0.975, n - 1)) * se
    try:
        w = wilcoxon_signed_rank(a, b)
    except (DegenerateTestError, ShapeError):
        w = None
    return PairedTestResult(
        n=n,
        mean_diff=mean,
        ci95_low=mean - half,
        ci95_high=mean + half,
        t_statistic=t,
        p_one_tailed=student_t_sf(t, n - 1),
        cohens_dz=mean / sd,
        wilcoxon_p_one_tailed=w,
    )


def _signed_ranks(d):
    """Doubled average ranks of |d| (integers, so ties stay exact)."""
    ranks = stats.rankdata(np.abs(d))
    return np.rint(2 * ranks).astype(int)


def wilcoxon_exact_sf(ranks2, w2):
    """P(W+ >= w2) under the null, for doubled integer ranks.

    Counts sign assignments with a subset-sum table.
    """
    total = int(sum(ranks2))
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in ranks2:
        for s in range(total, r - 1, -1):
            counts[s] += counts[s - r]
    tail = sum(counts[w2:])
    return tail / 2 ** len(ranks2)


def wilcoxon_signed_rank(baseline, hybrid):
    """One-tailed Wilcoxon signed-rank p-value for ``baseline > hybrid``.

    Zero differences are dropped.  Exact null distribution for up to 25
    remaining pairs, otherwise a normal approximation with tie and
    continuity corrections.
    """
    a = np.asarray(baseline, dtype=float)
    b = np.asarray(hybrid, dtype=float)
    if a.shape != b.shape:
        raise ShapeError("baseline and hybrid must be aligned")
    d = a - b
    d = d[d != 0]
    if d.size == 0:
        raise DegenerateTestError("all differences are zero")
    if d.size < 5:
        raise ShapeError("need at least five non-zero differences")
    r2 = _signed_ranks(d)
    w2 = int(r2[d > 0].sum())
    n = d.size
    if n <= WILCOXON_EXACT_MAX_N:
        return wilcoxon_exact_sf(r2.tolist(), w2)
    w = w2 / 2.0
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(r2, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - np.sum(tie_counts**3 - tie_counts) / 48.0
    z = (w - mean - 0.5) / math.sqrt(var)
    return float(special.ndtr(-z))


def score_rmsd_correlation(scores, rmsds):
    """Pearson r, coefficient of determination and least-squares line.

    ``r_squared`` is computed from the fitted residuals and checked
    against ``r**2`` to 1e-12.
    """
    x = np.asarray(scores, dtype=float)
    y = np.asarray(rmsds, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError("scores and rmsds must be aligned 1-D sequences")
    if x.size < 3:
        raise ShapeError("need at least three points")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0 or syy == 0:
        raise DegenerateTestError("zero variance in scores or rmsds")
    sxy = float(xc @ yc)
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    r2 = 1.0 - float(resid @ resid) / syy
    if abs(r2 - r * r) > 1e-12:
        raise ArithmeticError(f"R^2={r2} disagrees with r^2={r * r}")
    return Correlation(pearson_r=r, r_squared=r2, slope=slope, intercept=intercept)


class AlignmentError(ValidationError):
    def __init__(self, missing):
        self.missing = missing
        parts = [f"{m}: {', '.join(ids)}" for m, ids in sorted(missing.items())]
        super().__init__("fragment ids missing per method -> " + "; ".join(parts))


@dataclass(frozen=True)
class MethodRmsdTable:
    """Per-method RMSD vectors aligned on ``fragment_ids``.

    ``scores`` holds (fragment, method, score, rmsd) rows that carried a
    score, for the correlation block.
    """

    fragment_ids: tuple
    rmsd: dict = field(repr=False)
    scores: tuple = ()

    @classmethod
    def from_rows(cls, rows):
        """Build from dicts with keys ``fragment_id``, ``method``, ``rmsd_angstrom`` and optional ``score``."""
        per = {}
        scored = []
        for k, row in enumerate(rows, start=1):
            try:
                frag = str(row["fragment_id"]).strip()
                method = str(row["method"]).strip()
                value = float(row["rmsd_angstrom"])
            except (KeyError, ValueError, TypeError) as exc:
                raise ValidationError(f"row {k}: {exc}") from None
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"row {k}: RMSD must be finite and non-negative")
            if frag in per.setdefault(method, {}):
                raise ValidationError(f"row {k}: duplicate entry for {method}/{frag}")
            per[method][frag] = value
            raw_score = "" if row.get("score") is None else str(row["score"]).strip()
            if raw_score and raw_score.upper() != "NA":
                try:
                    scored.append((frag, method, float(raw_score), value))
                except ValueError:
                    raise ValidationError(f"row {k}: score {raw_score!r} is not numeric") from None
        if not per:
            raise EmptyInputError("no RMSD rows")
        all_ids = sorted(set().union(*[set(v) for v in per.values()]))
        missing = {m: sorted(set(all_ids) - set(v)) for m, v in per.items()}
        missing = {m: ids for m, ids in missing.items() if ids}
        if missing:
            raise AlignmentError(missing)
        if len(all_ids) < 2:
            raise ValidationError("need at least two fragments per method")
        rmsd = {m: np.array([v[f] for f in all_ids]) for m, v in per.items()}
        return cls(tuple(all_ids), rmsd, tuple(sorted(scored)))

    @property
    def methods(self):
        return sorted(self.rmsd)


@dataclass(frozen=True)
class EvaluationReport:
    hybrid: str
    summaries: dict
    improvements: dict
    tests: dict
    correlation: Correlation | None = None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "method", "statistic", "value"])
        for m, s in self.summaries.items():
            for key in ("n", "mean", "median", "std", "min", "max"):
                w.writerow(["summary", m, key, _num(getattr(s, key))])
        for m, pct in self.improvements.items():
            w.writerow(["improvement", m, "percent", _num(pct)])
        for m, t in self.tests.items():
            for key in (
                "n", "mean_diff", "ci95_low", "ci95_high", "t_statistic",
                "p_one_tailed", "cohens_dz", "wilcoxon_p_one_tailed",
            ):
                w.writerow(["paired_test", m, key, _num(getattr(t, key))])
        if self.correlation is not None:
            for key in ("pearson_r", "r_squared", "slope", "intercept"):
                w.writerow(["correlation", "all", key, _num(getattr(self.correlation, key))])
        return buf.getvalue()

    def to_text(self):
        lines = ["RMSD summary (angstrom)"]
        lines.append(f"{'method':<16}{'n':>5}{'mean':>9}{'median':>9}{'std':>9}{'min':>9}{'max':>9}{'improv%':>10}")
        for m, s in self.summaries.items():
            imp = self.improvements.get(m)
            imp_txt = "--" if imp is None else f"{imp:.1f}"
            lines.append(
                f"{m:<16}{s.n:>5}{s.mean:>9.2f}{s.median:>9.2f}{s.std:>9.2f}"
                f"{s.min:>9.2f}{s.max:>9.2f}{imp_txt:>10}"
            )
        lines.append("")
        lines.append(f"Paired one-tailed tests (baseline - {self.hybrid})")
        for m, t in self.tests.items():
            wp = "n/a" if t.wilcoxon_p_one_tailed is None else f"{t.wilcoxon_p_one_tailed:.3g}"
            lines.append(
                f"{m} vs {self.hybrid}: n={t.n} mean diff={t.mean_diff:.2f} "
                f"95% CI=[{t.ci95_low:.2f}, {t.ci95_high:.2f}] t({t.n - 1})={t.t_statistic:.2f} "
                f"p={t.p_one_tailed:.3g} dz={t.cohens_dz:.2f} wilcoxon p={wp}"
            )
        if self.correlation is not None:
            c = self.correlation
            lines.append("")
            lines.append(
                f"Score vs RMSD: r={c.pearson_r:.3f} R^2={c.r_squared:.3f} "
                f"slope={c.slope:.4f} intercept={c.intercept:.4f}"
            )
        return "\n".join(lines) + "\n"


def _num(x):
    if x is None:
        return "NA"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def evaluate_methods(table, baselines, hybrid):
    """Summaries for every method and paired comparisons of each baseline against ``hybrid``."""
    for m in [*baselines, hybrid]:
        if m not in table.rmsd:
            raise ValidationError(f"method {m!r} not present; have {', '.join(table.methods)}")
    summaries = {m: summary_stats(table.rmsd[m]) for m in [*baselines, hybrid]}
    hyb = summaries[hybrid].mean
    improvements = {m: improvement(summaries[m].mean, hyb) for m in baselines}
    tests = {m: paired_t_test(table.rmsd[m], table.rmsd[hybrid]) for m in baselines}
    corr = None
    if len(table.scores) >= 3:
        s = np.array([r[2] for r in table.scores])
        y = np.array([r[3] for r in table.scores])
        corr = score_rmsd_correlation(s, y)
    return EvaluationReport(hybrid, summaries, improvements, tests, corr)
