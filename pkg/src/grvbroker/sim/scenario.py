"""Discrete-event replay of the broker: heartbeats, reranks and client requests.

Every configured selection algorithm runs as its own lane over the same
request stream and the same published rank tables.  Provider load seen by the
heartbeat measurements is the in-flight count averaged over the lanes, which
is the exact count when a single algorithm is configured.
"""
from __future__ import annotations

import bisect
import itertools
import json
import math
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence

from ..broker import Broker, Outcome, read_trace_csv, write_trace_csv
from ..errors import InvalidConfig, NotFound
from ..grv import EpochMeasures, GrvParams, grv_bounds
from ..index import ContentIndex
from ..qos import AttributeSet, Polarity, merit
from ..ranking import RankTable, initialize_ranks, rerank, write_rank_csv
from ..selection import RequestSpec, estimated_reliability
from .clock import COMPLETION, MEASURE, REQUEST, RERANK, SimClock
from .config import ScenarioConfig
from .dataset import ingest_dataset
from .models import ProviderModel, provider_sample


def _stream(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}/{name}")


def schedule_measurements(
    clock: SimClock,
    roster: Sequence[str],
    p: GrvParams,
    epochs: int,
    on_measure: Callable[[str, int], None],
    on_rerank: Callable[[int], None],
) -> None:
    """Queue one heartbeat per provider every ``t_measure`` and a rerank every ``t_rerank``.

    Tick ``n`` fires at ``t_rerank * n / c_bp`` so the last tick of an epoch
    lands exactly on its rerank time.
    """
    for n in range(1, epochs * p.c_bp + 1):
        t = p.t_rerank * (n / p.c_bp)
        for pid in sorted(roster):
            clock.schedule(t, MEASURE, on_measure, pid, n)
    for e in range(1, epochs + 1):
        clock.schedule(p.t_rerank * e, RERANK, on_rerank, e)


def synthetic_base(target_grv: float, aset: AttributeSet, p: GrvParams):
    """Raw vector whose constant series yields exactly ``target_grv``."""
    frac = target_grv / grv_bounds(p)[1]
    out = []
    for s in aset.specs:
        span = s.upper - s.lower
        out.append(s.lower + frac * span if s.polarity is Polarity.BIG_POSITIVE else s.upper - frac * span)
    return tuple(out)


def build_models(cfg: ScenarioConfig) -> List[ProviderModel]:
    aset, p, r = cfg.attributes, cfg.params, cfg.roster
    if r.synthetic_count:
        rng = _stream(cfg.seed, "roster")
        width = len(str(r.synthetic_count))
        bases = [
            (f"P{i:0{width}d}", synthetic_base(rng.uniform(r.grv_low, r.grv_high), aset, p))
            for i in range(1, r.synthetic_count + 1)
        ]
    elif r.dataset:
        bases = ingest_dataset(r.dataset, r.keyword, aset).providers
    else:
        bases = list(r.providers)
    return [
        ProviderModel(
            pid, aset, base, r.drift, r.load_penalty,
            noise_seed=_stream(cfg.seed, f"provider/{pid}").getrandbits(32),
        )
        for pid, base in sorted(bases)
    ]


def build_index(cfg: ScenarioConfig, roster: Sequence[str]) -> ContentIndex:
    rng = _stream(cfg.seed, "contents")
    w = cfg.workload
    index = ContentIndex()
    width = len(str(w.contents))
    for i in range(1, w.contents + 1):
        internal = rng.random() < w.internal_fraction
        excluded = [pid for pid in roster if rng.random() < w.exclusion_prob]
        index.upsert(f"content-{i:0{width}d}", internal, excluded, roster)
    return index


@dataclass
class RunReport:
    name: str
    seed: int
    algorithms: Sequence[str]
    traces: Dict[str, List[Outcome]]
    tables: List[RankTable]
    lane_tables: Dict[str, List[RankTable]]
    events: Dict[str, int]
    notifications: Dict[str, int] = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "scenario": self.name,
            "seed": self.seed,
            "events": dict(sorted(self.events.items())),
            "algorithms": summarize_traces(self.traces),
        }

    def write(self, out_dir) -> List[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for alg in self.algorithms:
            path = out / f"trace_{alg}.csv"
            with path.open("w", encoding="utf-8", newline="") as fh:
                write_trace_csv(self.traces[alg], fh)
            written.append(path)
            path = out / f"fairness_{alg}.csv"
            with path.open("w", encoding="utf-8", newline="") as fh:
                fh.write("request_seq,jain_index\n")
                for o in self.traces[alg]:
                    fh.write(f"{o.request_seq},{o.jain:.6f}\n")
            written.append(path)
            path = out / f"ranks_{alg}.csv"
            with path.open("w", encoding="utf-8", newline="") as fh:
                write_rank_csv(self.lane_tables[alg], fh)
            written.append(path)
        path = out / "summary.json"
        path.write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(path)
        return written


def _r6(x: float) -> float:
    return float(f"{x:.6f}")


def summarize_traces(traces: Mapping[str, Sequence[Outcome]]) -> Dict[str, dict]:
    """Per-algorithm statistics computed from the 6-decimal values a trace file holds.

    Working from the serialized precision makes the summary reproducible from
    the trace files alone.
    """
    out = {}
    for alg, rows in traces.items():
        grvs = [_r6(o.selected_grv) for o in rows]
        entry = {
            "requests": len(rows),
            "fallbacks": sum(1 for o in rows if o.fallback),
            "distinct_providers": len({o.selected_provider for o in rows}),
        }
        if rows:
            grv_u = statistics.fmean(_r6(o.req_grv) for o in rows)
            entry.update(
                mean_grv=_r6(statistics.fmean(grvs)),
                stdev_grv=_r6(statistics.stdev(grvs)) if len(grvs) > 1 else 0.0,
                user_grv=_r6(grv_u),
                estimated_reliability=_r6(estimated_reliability(grvs, grv_u)) if grv_u > 0 else None,
                final_jain=_r6(rows[-1].jain),
            )
        out[alg] = entry
    return out


def summarize_directory(run_dir) -> Dict[str, dict]:
    traces = {}
    for path in sorted(Path(run_dir).glob("trace_*.csv")):
        with path.open(encoding="utf-8", newline="") as fh:
            traces[path.stem[len("trace_"):]] = read_trace_csv(fh)
    if not traces:
        raise FileNotFoundError(f"no trace_*.csv files in {run_dir}")
    return summarize_traces(traces)


def _arrivals(cfg: ScenarioConfig, content_keys: Sequence[str]) -> List[RequestSpec]:
    w = cfg.workload
    rng = _stream(cfg.seed, "workload")
    lo, hi = w.interarrival
    if w.popularity == "zipf":
        cum = list(itertools.accumulate(1.0 / (i ** w.zipf_s) for i in range(1, len(content_keys) + 1)))
    reqs, t = [], 0.0
    for _ in range(w.clients):
        t += rng.uniform(lo, hi)
        if w.popularity == "zipf":
            key = content_keys[bisect.bisect_left(cum, rng.random() * cum[-1])]
        else:
            key = content_keys[rng.randrange(len(content_keys))]
        reqs.append(RequestSpec(key, w.requirement, w.user_class, t))
    return reqs


def run_scenario(cfg: ScenarioConfig) -> RunReport:
    p, aset, w = cfg.params, cfg.attributes, cfg.workload
    models = build_models(cfg)
    by_id = {m.id: m for m in models}
    roster = [m.id for m in models]
    index = build_index(cfg, roster)
    names = [e.name for e in index]
    d = cfg.roster.sample_contents or p.c_bp
    if d > len(names):
        raise InvalidConfig(f"sample_contents={d} exceeds the {len(names)} catalog contents")

    table = initialize_ranks(roster, names[:d], lambda pid, _c: by_id[pid].base_qos, aset, p)
    broker = Broker(aset, p, table, index, cfg.classes, cfg.algorithms, cfg.seed)
    requests = _arrivals(cfg, [e.key for e in index])

    horizon = max(requests[-1].arrival_time if requests else 0.0, w.duration)
    epochs = max(1, math.ceil(horizon / p.t_rerank))

    clock = SimClock()
    lanes = cfg.algorithms
    in_flight = {a: dict.fromkeys(roster, 0) for a in lanes}
    buffers: Dict[str, List[float]] = {pid: [] for pid in roster}
    traces: Dict[str, List[Outcome]] = {a: [] for a in lanes}
    tables = [table]
    lane_tables: Dict[str, List[RankTable]] = {a: [] for a in lanes}
    events = dict.fromkeys(("measure", "rerank", "request", "internal", "not_found"), 0)

    def on_measure(pid: str, _tick: int) -> None:
        load = sum(in_flight[a][pid] for a in lanes) / len(lanes)
        buffers[pid].append(merit(provider_sample(by_id[pid], clock.now, load), aset))
        events["measure"] += 1

    def close_epoch_counts() -> None:
        current = broker.table
        for a in lanes:
            st = broker.states[a]
            counts = st.prov_counts if st.epoch == current.epoch else {}
            lane_tables[a].append(current.with_counts(counts))

    def on_rerank(_epoch: int) -> None:
        close_epoch_counts()
        measures = [EpochMeasures(pid, buffers[pid]) for pid in roster]
        new = rerank(measures, broker.table, p, created_at=clock.now)
        broker.publish(new)
        tables.append(new)
        for pid in roster:
            buffers[pid] = []
        events["rerank"] += 1

    def on_complete(alg: str, pid: str) -> None:
        in_flight[alg][pid] -= 1

    def on_request(seq: int, req: RequestSpec) -> None:
        events["request"] += 1
        try:
            outcomes = broker.route(req, seq, clock.now)
        except NotFound:
            events["not_found"] += 1
            return
        if not outcomes:
            events["internal"] += 1
            return
        for alg, o in outcomes.items():
            traces[alg].append(o)
            in_flight[alg][o.selected_provider] += 1
            clock.schedule(clock.now + w.service_time, COMPLETION, on_complete, alg, o.selected_provider)

    schedule_measurements(clock, roster, p, epochs, on_measure, on_rerank)
    for seq, req in enumerate(requests, start=1):
        clock.schedule(req.arrival_time, REQUEST, on_request, seq, req)
    clock.run()

    return RunReport(
        cfg.name, cfg.seed, lanes, traces, tables, lane_tables, events,
        {a: broker.states[a].notifications for a in lanes},
    )
