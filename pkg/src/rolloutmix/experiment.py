"""Experiment orchestration and report files.

Every mode produces a :class:`Report`: a fixed column list, rows of
strings, and an optional summary.  Rationals appear as ``"num/den"``
strings next to decimal renderings.  Reports are written with a stable row
order so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError
from .mixsim import (
    default_mix,
    enumerate_class,
    first_position_fraction,
    run_chain,
    uniform_average_fraction,
)
from .population import Problem, inflate, is_homologous, total_states
from .predictor import (
    build_class_chain,
    default_height_cap,
    estimate_payoff_mc,
    expected_payoff_exact,
)
from .predictor import limiting_frequency as _limiting_frequency
from .schema import UNIVERSAL, build_order_table

MODES = ("validate", "predict", "simulate", "enumerate", "payoff")
SIMULATE_COLUMNS = ("m", "t", "replica", "schema", "phi_hat", "predicted", "abs_error", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    inflation_levels: tuple = (1,)
    steps: int = 10_000
    replicas: int = 1
    seed: int = 0
    height_cap: int | None = None
    class_size_bound: int = 10**6
    p_identity: Fraction = Fraction(1, 2)
    burn_in: int = 0
    batches: int = 0
    samples: int = 100_000
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "inflation_levels", tuple(self.inflation_levels))
        object.__setattr__(self, "p_identity", Fraction(self.p_identity))
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.steps < 1:
            raise ConfigError("steps (t) must be >= 1")
        if not self.inflation_levels or any(m < 1 for m in self.inflation_levels):
            raise ConfigError("inflation levels must be >= 1")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if not 0 < self.p_identity < 1:
            raise ConfigError("p_identity must lie strictly between 0 and 1")
        if self.height_cap is not None and self.height_cap < 1:
            raise ConfigError("height cap must be >= 1")
        if self.samples < 1 or self.class_size_bound < 1 or self.workers < 1:
            raise ConfigError("samples, class bound and workers must be >= 1")
        if self.burn_in < 0 or self.batches < 0:
            raise ConfigError("burn-in and batches must be nonnegative")

    def to_json(self) -> dict:
        d = asdict(self)
        d["inflation_levels"] = list(self.inflation_levels)
        d["p_identity"] = fmt_rational(self.p_identity)
        d.pop("workers")  # does not affect results
        return d


def derive_seed(seed: int, replica: int, m: int) -> int:
    """Per-run seed: first 8 bytes (big-endian) of sha256("seed/replica/m")."""
    digest = hashlib.sha256(f"{seed}/{replica}/{m}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_float(x: float) -> str:
    return repr(float(x))


@dataclass
class Report:
    kind: str
    columns: tuple
    rows: list
    summary: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "summary": self.summary,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(data["kind"], tuple(data["columns"]), [tuple(r) for r in data["rows"]],
                   data.get("summary", []), data.get("meta", {}))

    def __eq__(self, other):
        return isinstance(other, Report) and self.to_json() == other.to_json()


# The simulate-mode report carries the convergence rows.
ConvergenceReport = Report


def write_report(report: Report, path, fmt: str = "csv") -> None:
    Path(path).write_bytes(render_report(report, fmt).encode())


def render_report(report: Report, fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    writer.writerows(report.rows)
    return buf.getvalue()


def read_report(path) -> Report:
    return Report.from_json(json.loads(Path(path).read_text()))


def _predicted(problem: Problem, schemata) -> dict:
    root = problem.root
    table = build_order_table(root.population, root.cover, root.partition)
    return {h: _limiting_frequency(table, h, root.cover, root.partition) for h in schemata}


def _simulate_one(args):
    problem, t, schemata, seed, m, p_identity, burn_in, batches = args
    work = inflate(problem, m) if m > 1 else problem
    mu = default_mix(work, p_identity)
    return run_chain(problem, t, schemata, seed, m=m, mu=mu, burn_in=burn_in, batches=batches)


def run_experiment(problem: Problem, config: ExperimentConfig, schemata=()) -> Report:
    schemata = list(schemata) or [UNIVERSAL]
    meta = {"config": config.to_json()}
    mode = config.mode

    if mode == "validate":
        root = problem.root
        row = (str(root.b), str(len(root.cover.states)), str(len(root.cover.sets)),
               str(len(root.partition.classes)),
               str(is_homologous(root.population, root.cover)).lower(),
               str(total_states(root.population)))
        return Report("validate", ("b", "states", "cover_sets", "classes", "homologous",
                                   "total_states"), [row], meta=meta)

    if mode == "predict":
        pred = _predicted(problem, schemata)
        rows = [(str(h), fmt_rational(pred[h]), fmt_float(pred[h])) for h in schemata]
        return Report("predict", ("schema", "predicted", "predicted_decimal"), rows, meta=meta)

    if mode == "simulate":
        pred = _predicted(problem, schemata)
        jobs = []
        for m in config.inflation_levels:
            for r in range(config.replicas):
                seed = derive_seed(config.seed, r, m)
                jobs.append(((m, r, seed), (problem.root, config.steps, schemata, seed, m,
                                            config.p_identity, config.burn_in, config.batches)))
        if config.workers > 1:
            with ProcessPoolExecutor(config.workers) as pool:
                results = list(pool.map(_simulate_one, [a for _, a in jobs]))
        else:
            results = [_simulate_one(a) for _, a in jobs]
        by_key = {key: res for (key, _), res in zip(jobs, results)}

        rows, summary = [], []
        for m in config.inflation_levels:
            for k, h in enumerate(schemata):
                phis, batch_se = [], []
                for r in range(config.replicas):
                    seed = derive_seed(config.seed, r, m)
                    est = by_key[(m, r, seed)][k]
                    phis.append(est.phi_hat)
                    batch_se.append(est.stderr)
                    rows.append((str(m), str(config.steps), str(r), str(h),
                                 fmt_float(est.phi_hat), fmt_rational(pred[h]),
                                 fmt_float(abs(est.phi_hat - float(pred[h]))), str(seed)))
                mean = statistics.fmean(phis)
                se = statistics.stdev(phis) / math.sqrt(len(phis)) if len(phis) > 1 else math.nan
                summary.append({
                    "m": str(m), "schema": str(h), "mean_phi_hat": fmt_float(mean),
                    "stderr": fmt_float(se), "mean_batch_stderr": fmt_float(statistics.fmean(batch_se)),
                    "predicted": fmt_rational(pred[h]),
                    "predicted_decimal": fmt_float(pred[h]),
                    "abs_error": fmt_float(abs(mean - float(pred[h]))),
                })
        return Report("simulate", SIMULATE_COLUMNS, rows, summary, meta)

    if mode == "enumerate":
        pred = _predicted(problem, schemata)
        rows = []
        for m in config.inflation_levels:
            work = inflate(problem.root, m) if m > 1 else problem.root
            members = enumerate_class(work.population, work.cover, config.class_size_bound)
            for h in schemata:
                ua = uniform_average_fraction(members, h, work.cover, work.partition)
                fp = first_position_fraction(members, h, work.cover, work.partition)
                rows.append((str(m), str(h), str(len(members)), fmt_rational(ua),
                             fmt_rational(fp), fmt_rational(pred[h])))
        return Report("enumerate", ("m", "schema", "class_size", "uniform_average",
                                    "first_position", "predicted"), rows, meta=meta)

    if mode == "payoff":
        root = problem.root
        if root.payoff is None:
            raise ConfigError("payoff mode needs terminal payoffs in the input document")
        table = build_order_table(root.population, root.cover, root.partition)
        chain = build_class_chain(table)
        cap = config.height_cap or default_height_cap(root.population)
        rows = []
        for action in sorted(chain.start, key=str):
            exact = expected_payoff_exact(chain, root.payoff, action)
            seed = derive_seed(config.seed, 0, 1) ^ int.from_bytes(
                hashlib.sha256(str(action).encode()).digest()[:4], "big")
            est = estimate_payoff_mc(chain, root.payoff, action, config.samples,
                                     random.Random(seed), cap)
            rows.append((str(action), fmt_rational(exact), fmt_float(exact),
                         fmt_float(est.mean), fmt_float(est.stderr), str(est.n_used),
                         str(est.truncated), str(seed)))
        return Report("payoff", ("action", "exact", "exact_decimal", "mc_mean", "mc_stderr",
                                 "n_used", "truncated", "seed"), rows, meta=meta)

    raise ConfigError(f"unknown mode {mode!r}")
