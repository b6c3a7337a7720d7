"""Monte Carlo experiments over (n, p(n), lambda) grids.

An :class:`ExperimentSpec` fully determines its output: trial ``i`` at size
``n`` uses the seed :func:`stretchlab.rng.trial_seed` ``(master_seed, n, i)``,
so records do not depend on execution order or on the number of worker
processes, and a larger run extends a smaller one.

Disconnected trials have an undefined stretch factor.  They are kept in the
records; in unconditional tail frequencies ``P(F > s)`` they count as
exceeding every ``s`` (some pair has ``d_G = inf``), in ``P(F < s)`` they
never count, and every ``| CON`` statistic ignores them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import bounds as _bounds
from .bounds import PExpression
from .constructs import resolve_c, three_phase_generate
from .errors import ConfigError, InvalidInputError, StretchLabError
from .model import ModelParams, generate
from .rng import trial_seed
from .stretch import stretch_factor

GENERATORS = ("direct", "three_phase")
Z95 = 1.959963984540054


# ------------------------------------------------------------------ specs


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    n_grid: tuple
    p_expr: PExpression
    trials: int
    master_seed: int = 0
    lambda_grid: tuple = (1.0,)
    w_choice: str | float = "log"
    generator: str = "direct"
    c_override: float | None = None
    output_path: str | None = None
    nice_lambda: float | None = None
    workers: int = 1
    record_timing: bool = False

    def __post_init__(self):
        if isinstance(self.p_expr, str) or isinstance(self.p_expr, (int, float)):
            object.__setattr__(self, "p_expr", PExpression.parse(str(self.p_expr)))
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "lambda_grid", tuple(float(x) for x in self.lambda_grid))
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not self.n_grid or not self.lambda_grid:
            raise ConfigError("n_grid and lambda_grid must be non-empty")
        if any(n < 2 for n in self.n_grid):
            raise ConfigError("every n must be at least 2")
        if any(not lam > 0 for lam in self.lambda_grid):
            raise ConfigError("lambda values must be positive")
        if self.generator not in GENERATORS:
            raise ConfigError(f"generator must be one of {GENERATORS}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not (isinstance(self.w_choice, (int, float)) and self.w_choice > 0) and self.w_choice not in ("log", "sqrt_log"):
            raise ConfigError("w_choice must be 'log', 'sqrt_log' or a positive constant")
        for n in self.n_grid:
            try:
                self.p_expr(n)
            except InvalidInputError as exc:
                raise ConfigError(str(exc)) from exc

    def w(self, n: int) -> float:
        if self.w_choice == "log":
            return math.log(n)
        if self.w_choice == "sqrt_log":
            return math.sqrt(math.log(n))
        return float(self.w_choice)

    @property
    def lam_nice(self) -> float:
        return self.nice_lambda if self.nice_lambda is not None else self.lambda_grid[0]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_expr"] = str(self.p_expr)
        d["n_grid"] = list(self.n_grid)
        d["lambda_grid"] = list(self.lambda_grid)
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**doc)
        except (TypeError, InvalidInputError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(doc)


# ------------------------------------------------------------------ trials

RECORD_COLUMNS = (
    "n",
    "p",
    "seed",
    "connected",
    "stretch",
    "pair_i",
    "pair_j",
    "runtime_ms",
    "generator",
    "conditioning_ok",
    "nice_disc_count",
)


@dataclass(frozen=True)
class TrialRecord:
    n: int
    p: float
    seed: int
    connected: bool
    stretch: float | None
    pair_i: int | None
    pair_j: int | None
    runtime_ms: float | None
    generator: str
    conditioning_ok: bool | None = None
    nice_disc_count: int | None = None

    @property
    def failed(self) -> bool:
        return ":failed" in self.generator

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in RECORD_COLUMNS}


def run_trial(spec: ExperimentSpec, n: int, trial_index: int) -> TrialRecord:
    p = spec.p_expr(n)
    seed = trial_seed(spec.master_seed, n, trial_index)
    params = ModelParams(n, p, seed)
    start = time.perf_counter()
    cond = nice = None
    try:
        if spec.generator == "direct":
            g = generate(params)
        else:
            c, _ = resolve_c(n, spec.c_override)
            g, trace = three_phase_generate(params, c, spec.lam_nice)
            cond = trace.conditioning_ok
            nice = len(trace.nice_discs)
        rep = stretch_factor(g)
    except StretchLabError as exc:
        return TrialRecord(n, p, seed, False, None, None, None, None, f"{spec.generator}:failed:{type(exc).__name__}")
    elapsed = (time.perf_counter() - start) * 1e3 if spec.record_timing else None
    return TrialRecord(
        n=n,
        p=p,
        seed=seed,
        connected=rep.defined,
        stretch=rep.value,
        pair_i=rep.pair[0] if rep.defined else None,
        pair_j=rep.pair[1] if rep.defined else None,
        runtime_ms=elapsed,
        generator=spec.generator,
        conditioning_ok=cond,
        nice_disc_count=nice,
    )


def _run_task(args):
    spec, n, i = args
    return run_trial(spec, n, i)


# ------------------------------------------------------------------ statistics


def quantile(sorted_vals: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile (numpy's default method)."""
    return float(np.quantile(sorted_vals, q))


def quantile_se(sorted_vals: np.ndarray, q: float) -> float:
    """Standard error of the ``q`` quantile from its distribution-free 95% order-statistic interval.

    The interval runs between order statistics ``N q -/+ 1.96 sqrt(N q (1-q))``
    (clipped to the sample); its length divided by ``2 * 1.96`` is reported.
    """
    x = np.asarray(sorted_vals)
    size = len(x)
    if size < 2:
        return float("nan")
    half = Z95 * math.sqrt(size * q * (1 - q))
    lo = max(int(math.floor(size * q - half)), 0)
    hi = min(int(math.ceil(size * q + half)), size - 1)
    return float((x[hi] - x[lo]) / (2 * Z95))


def proportion_se(phat: float, count: int) -> float:
    return math.sqrt(phat * (1 - phat) / count) if count else float("nan")


@dataclass
class SummaryRow:
    n: int
    p: float
    lam: float
    count: int
    connected_count: int
    p_gt_lambda: float
    se_gt_lambda: float
    p_gt_lambda_con: float | None
    se_gt_lambda_con: float | None
    p_lt_lambda: float
    p_gt_2lambda1: float
    q10: float | None
    q50: float | None
    q90: float | None
    se_q10: float | None
    se_q50: float | None
    se_q90: float | None
    mean_con: float | None
    se_mean_con: float | None
    w: float
    thm1_threshold: float
    p_gt_thm1: float
    thm2_aas_bound: float | None
    p_le_thm2: float | None
    failed_count: int = 0
    conditioning_ok_count: int | None = None
    nice_run_count: int | None = None

    def to_dict(self) -> dict:
        return {k: _jsonable(v) for k, v in asdict(self).items()}


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def summarize(records, spec: ExperimentSpec) -> list[SummaryRow]:
    rows = []
    for n in spec.n_grid:
        recs = [r for r in records if r.n == n]
        if not recs:
            continue
        p = recs[0].p
        count = len(recs)
        f_all = np.array([r.stretch if r.connected else np.inf for r in recs])
        f_con = np.sort(np.array([r.stretch for r in recs if r.connected], dtype=float))
        ncon = len(f_con)
        w = spec.w(n)
        thr1 = _bounds.thm1_threshold(n, p, w)
        thm2 = _bounds.thm2_aas_bound(n, p, w).value if p > 0 else None
        if ncon:
            qs = [quantile(f_con, q) for q in (0.1, 0.5, 0.9)]
            ses = [quantile_se(f_con, q) for q in (0.1, 0.5, 0.9)]
            mean = float(f_con.mean())
            se_mean = float(f_con.std(ddof=1) / math.sqrt(ncon)) if ncon > 1 else float("nan")
        else:
            qs = ses = [None] * 3
            mean = se_mean = None
        three = spec.generator == "three_phase"
        cond_ok = sum(1 for r in recs if r.conditioning_ok) if three else None
        nice_runs = sum(1 for r in recs if r.nice_disc_count) if three else None
        for lam in spec.lambda_grid:
            gt = float(np.mean(f_all > lam))
            gt_con = float(np.mean(f_con > lam)) if ncon else None
            rows.append(
                SummaryRow(
                    n=n,
                    p=p,
                    lam=lam,
                    count=count,
                    connected_count=ncon,
                    p_gt_lambda=gt,
                    se_gt_lambda=proportion_se(gt, count),
                    p_gt_lambda_con=gt_con,
                    se_gt_lambda_con=proportion_se(gt_con, ncon) if ncon else None,
                    p_lt_lambda=float(np.mean(f_all < lam)),
                    p_gt_2lambda1=float(np.mean(f_all > 2 * lam + 1)),
                    q10=qs[0],
                    q50=qs[1],
                    q90=qs[2],
                    se_q10=ses[0],
                    se_q50=ses[1],
                    se_q90=ses[2],
                    mean_con=mean,
                    se_mean_con=se_mean,
                    w=w,
                    thm1_threshold=thr1,
                    p_gt_thm1=float(np.mean(f_all > thr1)),
                    thm2_aas_bound=thm2,
                    p_le_thm2=float(np.mean(f_all <= thm2)) if thm2 is not None else None,
                    failed_count=sum(1 for r in recs if r.failed),
                    conditioning_ok_count=cond_ok,
                    nice_run_count=nice_runs,
                )
            )
    return rows


# ------------------------------------------------------------------ experiments


def _probe_output(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output path {out} is not writable: {exc}") from exc
    return out


def run_records(spec: ExperimentSpec, workers: int | None = None) -> list[TrialRecord]:
    tasks = [(spec, n, i) for n in spec.n_grid for i in range(spec.trials)]
    workers = spec.workers if workers is None else workers
    if workers <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))


def run_experiment(spec: ExperimentSpec, workers: int | None = None):
    """Run every trial, summarise, and write outputs if ``spec.output_path`` is set.

    Returns ``(records, summary_rows)``.  Records are in ``(n_grid order,
    trial index)`` order whatever the degree of parallelism.
    """
    out = _probe_output(spec.output_path) if spec.output_path else None
    records = run_records(spec, workers)
    summary = summarize(records, spec)
    if out is not None:
        write_outputs(spec, records, summary, out)
    return records, summary


def write_outputs(spec, records, summary, out: Path, report=None) -> dict:
    paths = {
        "records_csv": out / f"{spec.name}_records.csv",
        "records_json": out / f"{spec.name}_records.json",
        "summary_json": out / f"{spec.name}_summary.json",
    }
    emit(records, "csv", paths["records_csv"])
    emit(records, "json", paths["records_json"])
    emit(summary, "json", paths["summary_json"])
    if report is not None:
        paths["report_json"] = out / f"{spec.name}_report.json"
        emit(report, "json", paths["report_json"])
    return paths


# ------------------------------------------------------------------ bound comparison


def compare_to_bounds(summary, spec: ExperimentSpec) -> dict:
    """Set every empirical frequency beside the bound it is meant to respect.

    Only the Lemma-5-style tail bound is checked pass/fail: a row is a
    violation when ``P(F > 2 lam + 1)`` exceeds the bound by more than three
    binomial standard errors (rows with a bound above 1 are vacuous).  The
    other comparisons carry an unquantified ``o(1)`` or are asymptotic, so
    only the gap is reported.
    """
    rows, violations = [], []
    for s in summary:
        n, p, lam, trials = s.n, s.p, s.lam, s.count
        row = {"n": n, "p": p, "lambda": lam, "trials": trials}
        if p > 0:
            b = _bounds.lemma5_bound(n, p, lam)
            checked = b <= 1.0
            tol = 3.0 * math.sqrt(b * (1.0 - b) / trials) if checked else None
            violated = checked and s.p_gt_2lambda1 > b + tol
            row["lemma5"] = {
                "event": f"F > {2 * lam + 1!r}",
                "empirical": s.p_gt_2lambda1,
                "bound": b,
                "checked": checked,
                "tolerance": tol,
                "violated": violated,
            }
            if violated:
                violations.append({"n": n, "lambda": lam, "check": "lemma5"})
            a = _bounds.thm2_aas_bound(n, p, s.w)
            row["thm2_aas"] = {"bound": a.value, "precondition": a.precondition, "empirical_le": s.p_le_thm2}
            e = _bounds.thm2_expectation_bound(n, p)
            row["thm2_expectation"] = {
                "bound": e.value,
                "precondition": e.precondition,
                "mean_con": s.mean_con,
                "gap": None if s.mean_con is None else e.value - s.mean_con,
                "asymptotic_slack": True,
            }
        row["thm1"] = {"threshold": s.thm1_threshold, "w": s.w, "empirical_gt": s.p_gt_thm1}
        c = _c_for(n, spec)
        if c is not None:
            l4 = _bounds.lemma4_bound(n, p, lam, c)
            row["lemma4"] = {
                "c": c,
                "empirical_lt": s.p_lt_lambda,
                "bound": l4.value,
                "gap": l4.value - s.p_lt_lambda,
                "asymptotic_slack": True,
            }
        rows.append(row)
    return {"name": spec.name, "rows": rows, "violations": violations, "ok": not violations}


def _c_for(n, spec):
    try:
        c, in_window = resolve_c(n, spec.c_override)
    except InvalidInputError:
        return None
    return c if in_window else None


# ------------------------------------------------------------------ persistence


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _rows_of(obj):
    if isinstance(obj, dict):
        return None
    return [r.to_dict() if hasattr(r, "to_dict") else dict(r) for r in obj]


def dumps(obj, fmt: str) -> str:
    if fmt == "json":
        rows = _rows_of(obj)
        return json.dumps(obj if rows is None else rows, indent=1, allow_nan=False) + "\n"
    if fmt == "csv":
        rows = _rows_of(obj)
        if rows is None:
            rows = obj.get("rows", [])
            rows = [_flatten(r) for r in rows]
        if rows:
            columns = list(rows[0])
        elif isinstance(obj, list) and not obj:
            columns = list(RECORD_COLUMNS)
        else:
            columns = []
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
        return buf.getvalue()
    raise InvalidInputError(f"unknown format {fmt!r}")


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(_flatten(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


def emit(obj, fmt: str, path) -> Path:
    """Write records, summary rows or a report to ``path`` as CSV or JSON."""
    path = Path(path)
    text = dumps(obj, fmt)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def _parse_cell(col, text):
    if text == "":
        return None
    if col in ("connected", "conditioning_ok"):
        return text == "true"
    if col in ("n", "seed", "pair_i", "pair_j", "nice_disc_count"):
        return int(text)
    if col in ("p", "stretch", "runtime_ms"):
        return float(text)
    return text


def load_records(path) -> list[TrialRecord]:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return [TrialRecord(**d) for d in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    return [TrialRecord(**{c: _parse_cell(c, row[c]) for c in RECORD_COLUMNS}) for row in reader]


def default_workers() -> int:
    return max(1, (os.cpu_count() or 1))
