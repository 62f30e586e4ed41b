"""Scenario configuration: YAML file <-> validated dataclasses."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import yaml

from ..errors import BrokerError, InvalidConfig
from ..grv import GrvParams, grv_bounds
from ..qos import AttributeSet, AttributeSpec
from ..selection import ALGORITHMS, UserClassTable


@dataclass(frozen=True)
class RosterConfig:
    synthetic_count: int = 0
    grv_low: float = 0.0
    grv_high: float = 0.0
    dataset: Optional[str] = None
    keyword: Optional[str] = None
    providers: Tuple[Tuple[str, Tuple[float, ...]], ...] = ()
    drift: Tuple[float, ...] = ()
    load_penalty: Tuple[float, ...] = ()
    sample_contents: Optional[int] = None


@dataclass(frozen=True)
class WorkloadSpec:
    clients: int = 0
    interarrival: Tuple[float, float] = (0.01, 1.0)
    user_class: Optional[int] = 1
    requirement: Optional[Tuple[float, ...]] = None
    popularity: str = "uniform"
    zipf_s: float = 1.0
    contents: int = 100
    internal_fraction: float = 0.0
    exclusion_prob: float = 0.0
    service_time: float = 1.0
    duration: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    params: GrvParams
    attributes: AttributeSet
    roster: RosterConfig
    workload: WorkloadSpec
    classes: Optional[UserClassTable]
    algorithms: Tuple[str, ...] = ALGORITHMS
    seed: int = 0
    name: str = "scenario"
    base_dir: Path = field(default=Path("."), compare=False)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=int(seed))


def _section(doc: Dict[str, Any], key: str) -> Dict[str, Any]:
    value = doc.get(key) or {}
    if not isinstance(value, dict):
        raise InvalidConfig(f"section {key!r} must be a mapping")
    return value


def _per_attribute(value, m: int, what: str) -> Tuple[float, ...]:
    if value is None:
        return (0.0,) * m
    if isinstance(value, (int, float)):
        return (float(value),) * m
    values = tuple(float(v) for v in value)
    if len(values) != m:
        raise InvalidConfig(f"{what} needs {m} values, got {len(values)}")
    return values


def parse_attributes(doc: Dict[str, Any]) -> AttributeSet:
    sec = doc.get("attributes")
    if isinstance(sec, list):
        sec = {"specs": sec}
    if not isinstance(sec, dict) or not sec.get("specs"):
        raise InvalidConfig("attributes: a nonempty 'specs' list is required")
    try:
        specs = tuple(
            AttributeSpec(
                str(s["name"]), s["polarity"], float(s["lower"]), float(s["upper"]),
                float(s.get("weight", 1.0)),
            )
            for s in sec["specs"]
        )
        return AttributeSet(specs, float(sec.get("omega", 1.0)))
    except (KeyError, TypeError) as exc:
        raise InvalidConfig(f"attributes: malformed entry ({exc})") from exc
    except (BrokerError, ValueError) as exc:
        raise InvalidConfig(f"attributes: {exc}") from exc


def parse_params(doc: Dict[str, Any], aset: AttributeSet) -> GrvParams:
    sec = _section(doc, "grv")
    try:
        return GrvParams(
            m=aset.m,
            c_bp=int(sec.get("c_bp", 5)),
            c=float(sec.get("c", 1.0)),
            x_max=float(sec.get("x_max", 2.0)),
            omega=aset.omega,
            t_rerank=float(sec.get("t_rerank", 10.0)),
            t_res=float(sec.get("t_res", 0.5)),
        )
    except (BrokerError, ValueError, TypeError) as exc:
        raise InvalidConfig(f"grv: {exc}") from exc


def parse_config(doc: Dict[str, Any], base_dir: Path = Path(".")) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise InvalidConfig("config must be a mapping")
    known = {"name", "seed", "grv", "attributes", "roster", "workload", "classes", "algorithms"}
    extra = set(doc) - known
    if extra:
        raise InvalidConfig(f"unknown config sections: {sorted(extra)}")
    aset = parse_attributes(doc)
    params = parse_params(doc, aset)
    m = aset.m

    r = _section(doc, "roster")
    sources = [k for k in ("synthetic", "dataset", "providers") if r.get(k)]
    if len(sources) != 1:
        raise InvalidConfig("roster: exactly one of 'synthetic', 'dataset', 'providers' is required")
    roster_kw: Dict[str, Any] = {
        "drift": _per_attribute(r.get("drift"), m, "roster.drift"),
        "load_penalty": _per_attribute(r.get("load_penalty"), m, "roster.load_penalty"),
        "sample_contents": int(r["sample_contents"]) if r.get("sample_contents") else None,
    }
    if any(v < 0 for v in roster_kw["drift"] + roster_kw["load_penalty"]):
        raise InvalidConfig("roster: drift and load_penalty must be nonnegative")
    if roster_kw["sample_contents"] is not None and roster_kw["sample_contents"] < 1:
        raise InvalidConfig("roster.sample_contents must be >= 1")
    if "synthetic" in sources:
        s = r["synthetic"]
        try:
            count, low, high = int(s["count"]), float(s["grv_low"]), float(s["grv_high"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"roster.synthetic: {exc}") from exc
        top = grv_bounds(params)[1]
        if count < 1 or not (0 <= low <= high <= top):
            raise InvalidConfig(
                f"roster.synthetic: need count >= 1 and 0 <= grv_low <= grv_high <= {top:.6f}"
            )
        roster = RosterConfig(synthetic_count=count, grv_low=low, grv_high=high, **roster_kw)
    elif "dataset" in sources:
        d = r["dataset"]
        if isinstance(d, str):
            d = {"path": d}
        path = Path(d["path"])
        if not path.is_absolute():
            path = base_dir / path
        roster = RosterConfig(dataset=str(path), keyword=d.get("keyword"), **roster_kw)
    else:
        try:
            providers = tuple((str(p["id"]), tuple(float(v) for v in p["base"])) for p in r["providers"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidConfig(f"roster.providers: {exc}") from exc
        if any(len(b) != m for _, b in providers):
            raise InvalidConfig(f"roster.providers: every base vector needs {m} values")
        if len({pid for pid, _ in providers}) != len(providers):
            raise InvalidConfig("roster.providers: duplicate ids")
        roster = RosterConfig(providers=providers, **roster_kw)

    w = _section(doc, "workload")
    try:
        pop = w.get("popularity", "uniform")
        zipf_s = 1.0
        if isinstance(pop, dict):
            zipf_s = float(pop.get("zipf", 1.0))
            pop = "zipf"
        requirement = tuple(float(v) for v in w["requirement"]) if w.get("requirement") else None
        workload = WorkloadSpec(
            clients=int(w.get("clients", 0)),
            interarrival=tuple(float(v) for v in w.get("interarrival", (0.01, 1.0))),
            user_class=None if requirement else int(w.get("user_class", 1)),
            requirement=requirement,
            popularity=str(pop),
            zipf_s=zipf_s,
            contents=int(w.get("contents", 100)),
            internal_fraction=float(w.get("internal_fraction", 0.0)),
            exclusion_prob=float(w.get("exclusion_prob", 0.0)),
            service_time=float(w.get("service_time", 1.0)),
            duration=float(w.get("duration", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"workload: {exc}") from exc
    lo, hi = workload.interarrival if len(workload.interarrival) == 2 else (-1, -1)
    if workload.clients < 0 or not (0 < lo <= hi):
        raise InvalidConfig("workload: clients >= 0 and 0 < interarrival[0] <= interarrival[1] required")
    if workload.popularity not in ("uniform", "zipf") or workload.zipf_s <= 0:
        raise InvalidConfig(f"workload.popularity: unsupported {workload.popularity!r}")
    if workload.contents < 1 or workload.service_time <= 0 or workload.duration < 0:
        raise InvalidConfig("workload: contents >= 1, service_time > 0, duration >= 0 required")
    if not (0 <= workload.internal_fraction < 1 and 0 <= workload.exclusion_prob < 1):
        raise InvalidConfig("workload: internal_fraction and exclusion_prob must be in [0, 1)")
    if workload.requirement is not None and len(workload.requirement) != m:
        raise InvalidConfig(f"workload.requirement needs {m} values")

    classes = None
    raw_classes = doc.get("classes")
    try:
        if isinstance(raw_classes, dict) and "requirements" in raw_classes:
            classes = UserClassTable.from_requirements(raw_classes["requirements"], aset, params)
        elif raw_classes is not None:
            classes = UserClassTable(tuple(float(g) for g in raw_classes))
    except (BrokerError, ValueError, TypeError) as exc:
        raise InvalidConfig(f"classes: {exc}") from exc
    if workload.user_class is not None:
        if classes is None:
            raise InvalidConfig("workload.user_class requires a 'classes' section")
        if not 1 <= workload.user_class <= classes.k:
            raise InvalidConfig(f"workload.user_class must be in 1..{classes.k}")

    algorithms = tuple(doc.get("algorithms") or ALGORITHMS)
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad or len(set(algorithms)) != len(algorithms):
        raise InvalidConfig(f"algorithms: unknown or repeated entries {bad or list(algorithms)}")

    try:
        seed = int(doc.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(f"seed: {exc}") from exc
    return ScenarioConfig(
        params, aset, roster, workload, classes, algorithms, seed,
        str(doc.get("name", "scenario")), base_dir,
    )


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read config {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"{path}: invalid YAML ({exc})") from exc
    return parse_config(doc, path.parent)


def load_attribute_config(path) -> AttributeSet:
    """Attribute-only config (used by rank-init); accepts a full scenario file too."""
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise InvalidConfig(f"cannot read attribute config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidConfig(f"{path}: config must be a mapping")
    return parse_attributes(doc)


def load_grv_section(path, aset: AttributeSet) -> GrvParams:
    doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    return parse_params(doc, aset)
