"""
Seeded Monte Carlo experiments over whole sessions.

Trial ``i`` of an experiment with master seed ``s`` runs a session seeded with
``derive_seed(s, "trial", i)``; its eavesdropper (if any) uses
``derive_seed(trial_seed, "eve")``. Aggregation runs in trial order, so the
numbers depend on nothing but the ``ExperimentSpec``.

Config files are YAML documents (schema version 1)::

    version: 1
    seed: 7
    trials: 200
    session: {n: 3, groups: 40, check_count: 20, abort_threshold: 0.0,
              reveal_fraction: 0.1, initial_index: null}
    adversary: {kind: intercept-resend, targets: [1, 2], fakes: {1: "0", 2: "1"}}
    metrics: [check-error-rate, detection-probability]
    messages: ["01", "0", "1"]          # optional fixed plan for `run`
    sweep: {parameter: M, values: [1, 2, 4, 8]}
    output: {trials: trials.jsonl, table: table.csv, transcript: transcript.jsonl}

Adversary kinds: ``none``; ``intercept-resend`` (``targets``, ``fakes``);
``disturbance`` (``mode``, ``p``, ``targets``).
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import yaml

from .adversary import (
    Channel,
    DisturbanceConfig,
    InterceptResendConfig,
    disturbance,
    eve_information,
    intercept_resend,
)
from .protocol import COMPLETED, MessagePlan, SessionConfig, SessionResult, run_session
from .quantum import MeasBasis
from .rng import derive_seed
from .transcript import party_name

SCHEMA_VERSION = 1
CONFIG_DIR_ENV = "GHZ_QSDC_CONFIG_DIR"

METRICS = (
    "check-error-rate",
    "check-error-rate-z",
    "check-error-rate-x",
    "detection-probability",
    "message-fidelity",
    "eve-information",
)
ADVERSARIES = ("none", "intercept-resend", "disturbance")
SWEEP_PARAMETERS = {
    "M": "check_count",
    "check_count": "check_count",
    "p": "p",
    "rho": "reveal_fraction",
    "reveal_fraction": "reveal_fraction",
    "trials": "trials",
}

_TOP_KEYS = {"version", "seed", "trials", "session", "adversary", "metrics", "messages", "sweep", "output"}
_SESSION_KEYS = {f.name for f in dataclasses.fields(SessionConfig)} - {"seed"}
_ADVERSARY_KEYS = {"kind", "targets", "fakes", "mode", "p"}


class ConfigError(ValueError):
    """Malformed experiment spec or config file."""


@dataclass
class ExperimentSpec:
    session: SessionConfig = field(default_factory=SessionConfig)
    adversary: dict[str, Any] = field(default_factory=lambda: {"kind": "none"})
    trials: int = 100
    metrics: tuple[str, ...] = ("check-error-rate", "detection-probability", "message-fidelity")
    messages: tuple[str, ...] | None = None
    sweep: dict[str, Any] | None = None
    output: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ConfigError(f"unknown metrics {sorted(unknown)}; choose from {list(METRICS)}")
        kind = self.adversary.get("kind", "none")
        if kind not in ADVERSARIES:
            raise ConfigError(f"unknown adversary {kind!r}; choose from {list(ADVERSARIES)}")
        extra = set(self.adversary) - _ADVERSARY_KEYS
        if extra:
            raise ConfigError(f"unknown adversary keys {sorted(extra)}")
        try:
            build_channel(self.adversary, 0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def seed(self) -> int:
        return self.session.seed

    def to_dict(self) -> dict[str, Any]:
        session = dataclasses.asdict(self.session)
        seed = session.pop("seed")
        return {
            "version": SCHEMA_VERSION,
            "seed": seed,
            "trials": self.trials,
            "session": session,
            "adversary": _jsonable(self.adversary),
            "metrics": list(self.metrics),
            "messages": list(self.messages) if self.messages is not None else None,
            "sweep": _jsonable(self.sweep),
            "output": dict(self.output),
        }

    def digest(self) -> str:
        """Stable hash of everything that affects results (output paths excluded)."""
        d = self.to_dict()
        d.pop("output")
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def replace(self, **changes) -> "ExperimentSpec":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentSpec":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        extra = set(raw) - _TOP_KEYS
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        version = raw.get("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {version!r} (expected {SCHEMA_VERSION})")
        session_raw = dict(raw.get("session") or {})
        extra = set(session_raw) - _SESSION_KEYS
        if extra:
            raise ConfigError(f"unknown session keys {sorted(extra)}")
        if session_raw.get("initial_index") is not None:
            session_raw["initial_index"] = str(session_raw["initial_index"])
        try:
            session = SessionConfig(seed=int(raw.get("seed", 0)), **session_raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad session config: {exc}") from exc
        adversary = dict(raw.get("adversary") or {"kind": "none"})
        messages = raw.get("messages")
        if messages is not None:
            messages = tuple(str(m) for m in messages)
        sweep = raw.get("sweep")
        if sweep is not None:
            if not isinstance(sweep, dict) or set(sweep) != {"parameter", "values"}:
                raise ConfigError("sweep needs exactly 'parameter' and 'values'")
            if str(sweep["parameter"]) not in SWEEP_PARAMETERS:
                raise ConfigError(f"unknown sweep parameter {sweep['parameter']!r}")
        metrics = raw.get("metrics")
        return cls(
            session=session,
            adversary=adversary,
            trials=int(raw.get("trials", 100)),
            metrics=tuple(metrics) if metrics is not None else cls.metrics,
            messages=messages,
            sweep=sweep,
            output={str(k): str(v) for k, v in (raw.get("output") or {}).items()},
        )


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def resolve_config_path(path: str | Path) -> Path:
    """``path`` as given, else relative to ``$GHZ_QSDC_CONFIG_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    base = os.environ.get(CONFIG_DIR_ENV)
    if base and (Path(base) / p).exists():
        return Path(base) / p
    return p


def load_spec(path: str | Path) -> ExperimentSpec:
    p = resolve_config_path(path)
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {p} is not valid YAML: {exc}") from exc
    return ExperimentSpec.from_dict(raw or {})


def build_channel(adversary: dict[str, Any], seed: int) -> Channel:
    kind = adversary.get("kind", "none")
    targets = adversary.get("targets")
    targets = tuple(int(t) for t in targets) if targets is not None else None
    if kind == "none":
        return Channel()
    if kind == "intercept-resend":
        fakes = adversary.get("fakes", "random")
        if isinstance(fakes, dict):
            fakes = {int(k): str(v) for k, v in fakes.items()}
        return intercept_resend(InterceptResendConfig(targets=targets, fakes=fakes), seed)
    if kind == "disturbance":
        cfg = DisturbanceConfig(
            mode=str(adversary.get("mode", "apply-random-op")), p=float(adversary.get("p", 1.0)), targets=targets
        )
        return disturbance(cfg, seed)
    raise ConfigError(f"unknown adversary {kind!r}")


# ---------------------------------------------------------------------------
# Trials and aggregation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StatsRecord:
    """One aggregated metric. ``trials`` counts the samples behind the estimate."""

    metric: str
    estimate: float
    stderr: float
    trials: int
    digest: str
    seed: int
    parameter: str | None = None
    value: float | int | None = None

    def as_row(self) -> dict[str, Any]:
        return {
            "parameter": self.parameter if self.parameter is not None else "",
            "value": "" if self.value is None else self.value,
            "metric": self.metric,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "trials": self.trials,
            "digest": self.digest,
            "seed": self.seed,
        }


TABLE_FIELDS = ("parameter", "value", "metric", "estimate", "stderr", "trials", "digest", "seed")


def summarize(samples: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error (sample std with ddof=1, over sqrt(count))."""
    a = np.asarray(samples, dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    if a.size == 1:
        return float(a[0]), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(a.size))


def session_for_trial(spec: ExperimentSpec, trial: int) -> tuple[SessionConfig, Channel, MessagePlan | None]:
    seed = derive_seed(spec.seed, "trial", trial)
    cfg = dataclasses.replace(spec.session, seed=seed)
    channel = build_channel(spec.adversary, derive_seed(seed, "eve"))
    plan = MessagePlan(spec.messages) if spec.messages is not None else None
    return cfg, channel, plan


def run_trial(spec: ExperimentSpec, trial: int) -> SessionResult:
    cfg, channel, plan = session_for_trial(spec, trial)
    return run_session(cfg, plan, channel)


def trial_record(spec: ExperimentSpec, trial: int, result: SessionResult, digest: str) -> dict[str, Any]:
    check = result.check
    zf, zt = check.errors_in(MeasBasis.Z) if check else (0, 0)
    xf, xt = check.errors_in(MeasBasis.X) if check else (0, 0)
    eve = eve_information(result.eve_report, result.plan.messages, result.message_groups)
    return {
        "trial": trial,
        "seed": result.config.seed,
        "status": result.status,
        "check_error_rate": result.check_error_rate,
        "check_z": [zf, zt],
        "check_x": [xf, xt],
        "fidelity": result.fidelity(),
        "reveal_mismatches": result.reveal.mismatches if result.reveal else None,
        "eve": {party_name(p): f for p, f in eve.items()},
        "digest": digest,
        "master_seed": spec.seed,
    }


def _metric_samples(metric: str, results: Sequence[SessionResult]) -> list[float]:
    out: list[float] = []
    for res in results:
        if metric == "check-error-rate":
            if res.check is not None and res.check.records:
                out.append(res.check_error_rate)
        elif metric in ("check-error-rate-z", "check-error-rate-x"):
            basis = MeasBasis.Z if metric.endswith("z") else MeasBasis.X
            if res.check is not None:
                out.extend(float(not r.consistent) for r in res.check.records if r.basis is basis)
        elif metric == "detection-probability":
            out.append(float(res.status != COMPLETED))
        elif metric == "message-fidelity":
            f = res.fidelity()
            if f is not None:
                out.append(f)
        elif metric == "eve-information":
            out.extend(_eve_bit_hits(res))
    return out


def _eve_bit_hits(res: SessionResult) -> list[float]:
    """One 0/1 sample per message bit Eve claims, in (party, group) order."""
    rep = res.eve_report
    if rep is None:
        return []
    position = {g: k for k, g in enumerate(res.message_groups)}
    hits = []
    for party, groups in sorted(rep.recovered.items()):
        for g, bits in sorted(groups.items()):
            if g in position:
                truth = res.plan.symbol(party, position[g])
                hits.extend(float(a == b) for a, b in zip(bits, truth))
    return hits


def aggregate(spec: ExperimentSpec, results: Sequence[SessionResult], parameter=None, value=None) -> list[StatsRecord]:
    digest = spec.digest()
    records = []
    for metric in spec.metrics:
        samples = _metric_samples(metric, results)
        est, se = summarize(samples)
        records.append(StatsRecord(metric, est, se, len(samples), digest, spec.seed, parameter, value))
    return records


def run_experiment(spec: ExperimentSpec, write: bool = True) -> list[StatsRecord]:
    """Run ``spec.trials`` independent sessions and aggregate the requested metrics.

    With ``write`` set, per-trial records go to ``output.trials`` (JSON lines)
    and the aggregate table to ``output.table`` (CSV), when those are given.
    """
    digest = spec.digest()
    results = [run_trial(spec, i) for i in range(spec.trials)]
    records = aggregate(spec, results)
    if write:
        if spec.output.get("trials"):
            lines = [json.dumps(trial_record(spec, i, r, digest)) for i, r in enumerate(results)]
            _write_text(spec.output["trials"], "".join(line + "\n" for line in lines))
        if spec.output.get("table"):
            _write_text(spec.output["table"], format_table(records))
    return records


def _sweep_spec(spec: ExperimentSpec, parameter: str, value) -> ExperimentSpec:
    target = SWEEP_PARAMETERS[parameter]
    try:
        if target == "trials":
            return spec.replace(trials=int(value))
        if target == "p":
            if spec.adversary.get("kind") != "disturbance":
                raise ConfigError("sweeping p needs a disturbance adversary")
            return spec.replace(adversary={**spec.adversary, "p": float(value)})
        if target == "check_count":
            value = int(value)
        else:
            value = float(value)
        return spec.replace(session=dataclasses.replace(spec.session, **{target: value}))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot set {parameter}={value!r}: {exc}") from exc


def detection_curve(spec: ExperimentSpec, parameter: str, values: Iterable, write: bool = True) -> list[StatsRecord]:
    """One aggregate per sweep value; every value reuses the same master seed."""
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}; choose from {sorted(SWEEP_PARAMETERS)}")
    table: list[StatsRecord] = []
    for v in map(_number, values):
        sub = _sweep_spec(spec, parameter, v)
        results = [run_trial(sub, i) for i in range(sub.trials)]
        table.extend(aggregate(sub, results, parameter, v))
    if write and spec.output.get("table"):
        _write_text(spec.output["table"], format_table(table))
    return table


def _number(v):
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            try:
                return float(v)
            except ValueError:
                raise ConfigError(f"sweep value {v!r} is not a number") from None
    return v


def format_table(records: Sequence[StatsRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=TABLE_FIELDS, lineterminator="\n")
    w.writeheader()
    for rec in records:
        w.writerow(rec.as_row())
    return buf.getvalue()


def _write_text(path: str | Path, text: str) -> None:
    p = Path(path)
    try:
        if p.parent and not p.parent.exists():
            p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {p}: {exc}") from exc
