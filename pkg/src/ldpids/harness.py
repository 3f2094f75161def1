"""Config-driven experiment matrix: run, audit, and serialize every run; replay a run from its metadata.

Config files are flat ``key = value`` lines. ``#`` starts a comment. A key may be
repeated and values may be comma-separated; both forms append to the list. Keys:

=================  ==========================================================
mechanism          LBU, LSP, LBD, LBA, LPU, LPD, LPA (at least one)
dataset            LNS, Sin, Log, or ``csv:<path>`` (exactly one)
labels             domain labels for a CSV dataset (list), or ``d`` below
d                  domain size for a CSV dataset whose labels are 0..d-1
T, N               stream length and population for synthetic datasets
epsilon, w, seed   lists; the run matrix is mechanism x epsilon x w x seed
u_min              smallest publication cohort for LPD (default 1)
monitor            mean, max, or a cell index for event ROC (default mean)
delta_fraction     event threshold position in the true range (default 0.75)
gamma              MRE denominator floor (default 0.001)
workers            parallel processes (default 1)
out                output directory (overridden by ``--out``)
p0, sqrt_q, A, b, h  generator parameters
=================  ==========================================================
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .audit import audit_once_per_window, audit_window_budget
from .datagen import DEFAULT_PARAMS, GeneratorSpec, generate, load_stream_csv
from .errors import ConfigError, DatasetLoadError, DegenerateSeries, MissingMetadata
from .mechanisms import MECHANISMS, POPULATION_DIVISION, make_mechanism
from .metrics import DEFAULT_GAMMA, cfpu, event_roc, mre
from .runner import simulate
from .seeding import mechanism_rng
from .stream import MechanismConfig

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_DATASET = 3

_LIST_KEYS = {"mechanism", "epsilon", "w", "seed", "labels"}
_SCALAR_KEYS = {"dataset", "d", "T", "N", "u_min", "monitor", "delta_fraction", "gamma", "workers", "out"}
_GEN_KEYS = {k for params in DEFAULT_PARAMS.values() for k in params}

SUMMARY_FIELDS = ["run_id", "mechanism", "dataset", "epsilon", "w", "seed", "mre", "cfpu", "auc",
                  "audit_status", "gamma"]
VIOLATION_FIELDS = ["run_id", "check", "user", "window_start", "window_end", "amount", "limit"]


@dataclass(frozen=True)
class DatasetSpec:
    kind: str  # LNS / SIN / LOG / CSV
    T: int = 0
    N: int = 0
    params: tuple = ()
    path: str = ""
    labels: tuple = ()

    def load(self, seed: int):
        try:
            if self.kind == "CSV":
                return load_stream_csv(self.path, list(self.labels))
        except OSError as exc:
            raise DatasetLoadError(f"cannot read {self.path}: {exc}") from exc
        return generate(GeneratorSpec(self.kind, self.T, self.N, dict(self.params), seed))

    @property
    def name(self) -> str:
        return "csv" if self.kind == "CSV" else self.kind


@dataclass(frozen=True)
class RunSpec:
    mechanism: str
    epsilon: float
    w: int
    seed: int
    dataset: DatasetSpec
    u_min: int = 1
    monitor: object = "mean"
    delta_fraction: float = 0.75
    gamma: float = DEFAULT_GAMMA

    @property
    def run_id(self) -> str:
        return f"{self.mechanism}_{self.dataset.name}_eps{self.epsilon:g}_w{self.w}_seed{self.seed}"

    def to_json(self) -> dict:
        out = asdict(self)
        out["dataset"]["params"] = dict(self.dataset.params)
        out["dataset"]["labels"] = list(self.dataset.labels)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RunSpec":
        ds = dict(obj["dataset"])
        ds["params"] = tuple(sorted(ds.get("params", {}).items()))
        ds["labels"] = tuple(ds.get("labels", ()))
        return cls(**{**obj, "dataset": DatasetSpec(**ds)})


@dataclass
class ExperimentConfig:
    runs: list
    out: Optional[str] = None
    workers: int = 1


def _parse_number(key, text, kind):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None


def parse_config(text: str, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """Parse config text into the full run matrix."""
    lists: dict = {k: [] for k in _LIST_KEYS}
    scalars: dict = {}
    gen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _LIST_KEYS:
            lists[key].extend(v.strip() for v in value.split(",") if v.strip())
        elif key in _SCALAR_KEYS:
            if key in scalars:
                raise ConfigError(f"line {lineno}: {key} given twice")
            scalars[key] = value
        elif key in _GEN_KEYS:
            gen[key] = _parse_number(key, value, float)
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    mechs = [m.upper() for m in lists["mechanism"]]
    if not mechs:
        raise ConfigError("no mechanism given")
    bad = [m for m in mechs if m not in MECHANISMS]
    if bad:
        raise ConfigError(f"unknown mechanisms {bad}")
    for key in ("epsilon", "w", "seed"):
        if not lists[key]:
            raise ConfigError(f"no {key} given")
    if "dataset" not in scalars:
        raise ConfigError("no dataset given")
    dataset = _parse_dataset(scalars, lists["labels"], gen, base_dir)

    eps = [_parse_number("epsilon", v, float) for v in lists["epsilon"]]
    ws = [_parse_number("w", v, int) for v in lists["w"]]
    seeds = [_parse_number("seed", v, int) for v in lists["seed"]]
    monitor = scalars.get("monitor", "mean")
    if monitor not in ("mean", "max"):
        monitor = _parse_number("monitor", monitor, int)
    common = dict(
        u_min=_parse_number("u_min", scalars.get("u_min", "1"), int),
        monitor=monitor,
        delta_fraction=_parse_number("delta_fraction", scalars.get("delta_fraction", "0.75"), float),
        gamma=_parse_number("gamma", scalars.get("gamma", str(DEFAULT_GAMMA)), float),
    )
    if any(e <= 0 for e in eps) or any(w < 1 for w in ws):
        raise ConfigError("epsilon must be positive and w >= 1")
    runs = [RunSpec(m, e, w, s, dataset, **common) for s in seeds for m in mechs for e in eps for w in ws]
    workers = _parse_number("workers", scalars.get("workers", "1"), int)
    return ExperimentConfig(runs, scalars.get("out"), max(1, workers))


def _parse_dataset(scalars, labels, gen, base_dir) -> DatasetSpec:
    value = scalars["dataset"]
    if value.lower().startswith("csv:"):
        path = Path(value[4:].strip())
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if labels:
            labs = tuple(labels)
        elif "d" in scalars:
            labs = tuple(str(i) for i in range(_parse_number("d", scalars["d"], int)))
        else:
            raise ConfigError("csv dataset needs labels or d")
        return DatasetSpec("CSV", path=str(path.resolve()), labels=labs)
    kind = value.upper()
    if kind not in DEFAULT_PARAMS:
        raise ConfigError(f"unknown dataset {value!r}")
    for key in ("T", "N"):
        if key not in scalars:
            raise ConfigError(f"synthetic dataset needs {key}")
    unknown = set(gen) - set(DEFAULT_PARAMS[kind])
    if unknown:
        raise ConfigError(f"parameters {sorted(unknown)} do not apply to {kind}")
    return DatasetSpec(kind, _parse_number("T", scalars["T"], int), _parse_number("N", scalars["N"], int),
                       tuple(sorted(gen.items())))


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


# ---- serialization -------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def write_atomic(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class RunOutput:
    spec: RunSpec
    summary: dict
    files: dict  # file name -> bytes
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def execute_run(spec: RunSpec, stream=None, truths=None) -> RunOutput:
    """Simulate, audit and render one run to in-memory file contents."""
    if stream is None:
        stream = spec.dataset.load(spec.seed)
    config = MechanismConfig(spec.epsilon, spec.w, stream.d, stream.N, u_min=spec.u_min, seed=spec.seed)
    mech = make_mechanism(spec.mechanism, config, mechanism_rng(spec.seed, spec.mechanism, spec.epsilon, spec.w))
    result = simulate(mech, stream, truths)
    trace = result.trace

    audits = [audit_window_budget(result.ledger, spec.w, spec.epsilon)]
    if spec.mechanism in POPULATION_DIVISION:
        audits.append(audit_once_per_window(result.ledger, spec.w))
    violations = [a.violation for a in audits if not a.passed]

    try:
        roc = event_roc(trace, spec.monitor, spec.delta_fraction)
        roc_rows = [[_fmt(f), _fmt(t), _fmt(th)] for f, t, th in zip(roc.fpr, roc.tpr, roc.thresholds)]
        auc = _fmt(roc.auc())
    except DegenerateSeries:
        roc_rows, auc = [], ""

    d = stream.d
    # presentation only; metrics use the unclipped estimates
    clipped = np.clip(trace.releases, 0.0, 1.0)
    trace_rows = [
        [t + 1, trace.strategies[t].value, *map(_fmt, trace.releases[t]), *map(_fmt, clipped[t]),
         *map(_fmt, trace.truths[t]), int(trace.comm_events[t])]
        for t in range(trace.T)
    ]
    trace_header = ["t", "strategy", *[f"release_{k}" for k in range(d)],
                    *[f"release_clipped_{k}" for k in range(d)], *[f"truth_{k}" for k in range(d)], "comm_events"]
    summary = {
        "run_id": spec.run_id, "mechanism": spec.mechanism, "dataset": spec.dataset.name,
        "epsilon": _fmt(spec.epsilon), "w": spec.w, "seed": spec.seed,
        "mre": _fmt(mre(trace, spec.gamma)), "cfpu": _fmt(cfpu(trace, stream.N)), "auc": auc,
        "audit_status": "violation" if violations else "pass", "gamma": _fmt(spec.gamma),
    }
    rid = spec.run_id
    files = {
        f"trace_{rid}.csv": _csv_bytes(trace_header, trace_rows),
        f"summary_{rid}.csv": _csv_bytes(SUMMARY_FIELDS, [[summary[k] for k in SUMMARY_FIELDS]]),
        f"roc_{rid}.csv": _csv_bytes(["fpr", "tpr", "threshold"], roc_rows),
    }
    vrows = [[rid, v.check, v.user, v.window_start, v.window_end, _fmt(v.amount), _fmt(v.limit)]
             for v in violations]
    return RunOutput(spec, summary, files, vrows)


def persist_run(out: RunOutput, out_dir: Path) -> None:
    for name, data in out.files.items():
        write_atomic(out_dir / name, data)
    meta = {
        "run_id": out.spec.run_id,
        "version": __version__,
        "spec": out.spec.to_json(),
        "sha256": {name: hashlib.sha256(data).hexdigest() for name, data in sorted(out.files.items())},
    }
    write_atomic(out_dir / f"run_{out.spec.run_id}.json", (json.dumps(meta, indent=2, sort_keys=True) + "\n").encode())


def _run_group(specs: list, fail_fast: bool) -> list:
    """Run specs sharing one dataset and seed, generating the stream once."""
    stream = specs[0].dataset.load(specs[0].seed)
    truths = stream.true_histograms()
    outs = []
    for spec in specs:
        out = execute_run(spec, stream, truths)
        outs.append(out)
        if fail_fast and not out.passed:
            break
    return outs


@dataclass
class ExperimentResult:
    exit_code: int
    outputs: list
    out_dir: Path
    message: str = ""


def run_experiment(config: ExperimentConfig, out_dir=None, fail_fast: bool = True) -> ExperimentResult:
    out_path = Path(out_dir or config.out or "results")
    out_path.mkdir(parents=True, exist_ok=True)
    groups: dict = {}
    for spec in config.runs:
        groups.setdefault((spec.dataset, spec.seed), []).append(spec)
    outputs: list = []

    def absorb(batch) -> bool:
        for out in batch:
            persist_run(out, out_path)
            outputs.append(out)
        return fail_fast and any(not o.passed for o in batch)

    try:
        if config.workers > 1 and len(groups) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                futures = [pool.submit(_run_group, g, fail_fast) for g in groups.values()]
                for fut in futures:
                    if absorb(fut.result()):
                        for f in futures:
                            f.cancel()
                        break
        else:
            for g in groups.values():
                if absorb(_run_group(g, fail_fast)):
                    break
    except DatasetLoadError as exc:
        return ExperimentResult(EXIT_DATASET, outputs, out_path, str(exc))

    order = {spec.run_id: i for i, spec in enumerate(config.runs)}
    outputs.sort(key=lambda o: order[o.spec.run_id])
    write_atomic(out_path / "summary.csv",
                 _csv_bytes(SUMMARY_FIELDS, [[o.summary[k] for k in SUMMARY_FIELDS] for o in outputs]))
    write_atomic(out_path / "violations.csv",
                 _csv_bytes(VIOLATION_FIELDS, [row for o in outputs for row in o.violations]))
    failed = [o.spec.run_id for o in outputs if not o.passed]
    if failed:
        return ExperimentResult(EXIT_VIOLATION, outputs, out_path, f"audit violation in {', '.join(failed)}")
    return ExperimentResult(EXIT_OK, outputs, out_path)


@dataclass
class ReplayResult:
    run_id: str
    out_dir: Path
    identical: bool
    mismatched: list


def replay(run_id: str, run_dir, out_dir=None, seed: Optional[int] = None) -> ReplayResult:
    """Re-execute a run from its metadata and compare checksums with the original files."""
    run_dir = Path(run_dir)
    meta_path = run_dir / f"run_{run_id}.json"
    if not meta_path.is_file():
        raise MissingMetadata(f"no metadata for run {run_id!r} in {run_dir}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        spec = RunSpec.from_json(meta["spec"])
        expected = meta["sha256"]
    except (ValueError, KeyError, TypeError) as exc:
        raise MissingMetadata(f"unreadable metadata for run {run_id!r}: {exc}") from exc
    if seed is not None:
        spec = replace(spec, seed=seed)
    out_path = Path(out_dir) if out_dir else run_dir / "replay"
    out_path.mkdir(parents=True, exist_ok=True)
    out = execute_run(spec)
    # keep the original file names so outputs line up one to one
    renamed = {name.replace(spec.run_id, run_id): data for name, data in out.files.items()}
    for name, data in renamed.items():
        write_atomic(out_path / name, data)
    mismatched = sorted(name for name, digest in expected.items()
                        if hashlib.sha256(renamed.get(name, b"")).hexdigest() != digest)
    return ReplayResult(run_id, out_path, not mismatched, mismatched)
