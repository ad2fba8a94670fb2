"""Seeded trial runner and parameter sweeps.

Trial ``i`` draws its signal from ``default_rng([seed, i])`` so reports do not
depend on execution order. The scheme itself is built once per config from
``seed``.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

import numpy as np

from .core import FLOAT_TOL, SparseSignal
from .foreach import build_ee
from .universal import build_aa, build_ae

SCHEMES = ("aa", "ae", "ee")
SIGNALS = ("gaussian", "unit", "adversarial")
CSV_COLUMNS = ["scheme", "n", "k", "param", "m", "mean_column_reads", "success_rate",
               "mean_decode_time", "error"]


@dataclass(frozen=True)
class TrialConfig:
    scheme: str
    n: int
    k: int
    eps: Optional[float] = None
    alpha: Optional[float] = None
    signal: str = "gaussian"
    trials: int = 100
    seed: int = 0
    verify: Optional[bool] = None
    C: int = 16
    exact_k: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.signal not in SIGNALS:
            raise ValueError(f"signal must be one of {SIGNALS}")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")
        if not 1 <= self.k < self.n:
            raise ValueError("need 1 <= k < n")
        if self.scheme == "aa" and self.eps is None:
            raise ValueError("aa needs eps")
        if self.scheme == "ee" and self.alpha is None:
            raise ValueError("ee needs alpha")

    @property
    def param(self):
        return {"aa": self.eps, "ae": None, "ee": self.alpha}[self.scheme]


@dataclass
class TrialReport:
    config: TrialConfig
    m: int = 0
    successes: int = 0
    failures: int = 0
    column_reads: list = field(default_factory=list)
    decode_times: list = field(default_factory=list)
    fp_margins: list = field(default_factory=list)
    fn_margins: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return self.successes + self.failures

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def mean_column_reads(self) -> float:
        return float(np.mean(self.column_reads)) if self.column_reads else float("nan")

    @property
    def mean_decode_time(self) -> float:
        return float(np.mean(self.decode_times)) if self.decode_times else float("nan")

    def summary(self) -> dict:
        out = {"config": asdict(self.config), "m": self.m, "successes": self.successes,
               "failures": self.failures, "success_rate": self.success_rate,
               "mean_column_reads": self.mean_column_reads,
               "max_column_reads": max(self.column_reads, default=0),
               "mean_decode_time": self.mean_decode_time}
        if self.fp_margins:
            out["min_fp_margin"] = min(self.fp_margins)
            out["min_fn_margin"] = min(self.fn_margins)
        return out


def build_scheme(cfg: TrialConfig):
    if cfg.scheme == "aa":
        return build_aa(cfg.n, cfg.k, cfg.eps, cfg.seed, verify=cfg.verify)
    if cfg.scheme == "ae":
        return build_ae(cfg.n, cfg.k, cfg.seed, verify=cfg.verify)
    return build_ee(cfg.n, cfg.k, cfg.alpha, cfg.C, cfg.seed)


def draw_signal(n: int, k: int, model: str, rng: np.random.Generator, exact_k: bool = False) -> SparseSignal:
    """Support uniform among subsets of size k' (k' uniform in [1, k] unless exact_k).

    ``adversarial`` uses paired values +v, -v so a row containing exactly one
    pair cancels to zero.
    """
    size = k if exact_k else int(rng.integers(1, k + 1))
    support = rng.choice(n, size=size, replace=False)
    if model == "gaussian":
        values = rng.standard_normal(size)
        values[values == 0] = 1.0
    elif model == "unit":
        values = np.ones(size)
    else:
        mags = np.abs(rng.standard_normal((size + 1) // 2)) + 0.5
        values = np.repeat(mags, 2)[:size] * np.tile([1.0, -1.0], (size + 1) // 2)[:size]
    return SparseSignal(n, dict(zip(support.tolist(), values.tolist())))


def run_trials(cfg: TrialConfig, scheme=None, timing: bool = True) -> TrialReport:
    report = TrialReport(cfg)
    if cfg.trials == 0:
        return report
    if scheme is None:
        scheme = build_scheme(cfg)
    report.m = scheme.m
    for i in range(cfg.trials):
        rng = np.random.default_rng([cfg.seed, i])
        x = draw_signal(cfg.n, cfg.k, cfg.signal, rng, cfg.exact_k)
        y = scheme.measure(x, tol=FLOAT_TOL)
        t0 = time.perf_counter()
        res = scheme.decode(y)
        dt = time.perf_counter() - t0
        if timing:
            report.decode_times.append(dt)
        truth = x.support
        if cfg.scheme == "ee":
            report.column_reads.append(res.visits)
            ok = not res.failed and res.positives == truth
        else:
            report.column_reads.append(res.column_reads)
            got = res.indices
            if cfg.scheme == "aa":
                budget = cfg.eps * len(truth)
                fp = budget - len(got - truth)
                fn = budget - len(truth - got)
                report.fp_margins.append(fp)
                report.fn_margins.append(fn)
                ok = fp >= 0 and fn >= 0
            else:
                ok = got == truth
        if ok:
            report.successes += 1
        else:
            report.failures += 1
    return report


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "" if v != v else repr(v)
    return str(v)


def run_sweep(grid: Iterable[TrialConfig], timing: bool = True) -> list:
    """One CSV row (dict) per config; a config that raises is recorded with its error."""
    rows = []
    for cfg in grid:
        row = {"scheme": cfg.scheme, "n": cfg.n, "k": cfg.k, "param": cfg.param}
        try:
            rep = run_trials(cfg, timing=timing)
            row.update(m=rep.m, mean_column_reads=rep.mean_column_reads,
                       success_rate=rep.success_rate,
                       mean_decode_time=rep.mean_decode_time if timing else None, error="")
        except Exception as exc:  # recorded in-row, sweep continues
            row.update(m=None, mean_column_reads=None, success_rate=None,
                       mean_decode_time=None, error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def rows_to_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()
