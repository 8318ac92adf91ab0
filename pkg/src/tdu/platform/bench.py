"""Trust enforcement time (TET) benchmark, cold and warm."""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Sequence

from scipy import stats as st

from .. import scenario
from ..enforcement import ConsumerRequest, Enforcer
from ..tduo.codec import parse_usage_policy, serialize_usage_policy
from ..tduo.scopes import Actor

SCHEMA = "tdu-tet/1"
TABLE_COLUMNS = ("mode", "iterations", "mean_ms", "ci95_low_ms", "ci95_high_ms", "min_ms", "max_ms")

# the municipal grant, the commercial refusal and the commercial grant
WORKLOAD = (
    ConsumerRequest("m", Actor.MUNICIPAL_AUTHORITY, "street", "hourly", "aggregation"),
    ConsumerRequest("c", Actor.COMMERCIAL_OPERATOR, "street", "hourly", "detail"),
    ConsumerRequest("c", Actor.COMMERCIAL_OPERATOR, "zone", "weekly", "statistic"),
)


@dataclass(frozen=True)
class BenchStats:
    mode: str
    iterations: int
    mean_ms: float
    ci95_low_ms: float
    ci95_high_ms: float
    min_ms: float
    max_ms: float
    samples_ms: tuple

    def row(self) -> Dict:
        return {k: getattr(self, k) for k in TABLE_COLUMNS}


def summarize(mode: str, samples_ms: Sequence[float]) -> BenchStats:
    """Mean with a two-sided 95% Student-t interval."""
    n = len(samples_ms)
    if n < 2:
        raise ValueError("need at least 2 samples")
    mean = statistics.fmean(samples_ms)
    sem = statistics.stdev(samples_ms) / math.sqrt(n)
    half = float(st.t.ppf(0.975, n - 1)) * sem
    return BenchStats(mode, n, mean, mean - half, mean + half, min(samples_ms), max(samples_ms),
                      tuple(samples_ms))


def bench_tet(iterations: int = 50, mode: str = "warm", policies=scenario.POLICIES,
              requests=WORKLOAD) -> BenchStats:
    """Time ``iterations`` enforcement decisions.

    Cold rebuilds everything per request: the policy documents are parsed,
    compiled, merged and grounded afresh. Warm reuses one enforcer that has
    already answered each workload request once.
    """
    if iterations < 2:
        raise ValueError("iterations must be >= 2")
    if mode not in ("cold", "warm"):
        raise ValueError(f"mode must be 'cold' or 'warm', got {mode!r}")
    documents = [serialize_usage_policy(p) for p in policies]
    facts = scenario.subject_facts()
    warm = None
    if mode == "warm":
        warm = Enforcer([parse_usage_policy(d) for d in documents])
        for r in requests:
            warm.evaluate(r, facts)
    samples = []
    for i in range(iterations):
        request = requests[i % len(requests)]
        t0 = time.perf_counter()
        enforcer = warm or Enforcer([parse_usage_policy(d) for d in documents])
        enforcer.evaluate(request, facts)
        samples.append((time.perf_counter() - t0) * 1000.0)
    return summarize(mode, samples)


def write_results(results: List[BenchStats], out_dir) -> Dict[str, Path]:
    """A JSON stats file and a CSV table with one row per mode."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats_path = out / "tet_stats.json"
    table_path = out / "tet_table.csv"
    doc = {"schema": SCHEMA, "unit": "ms", "confidence": 0.95,
           "results": [dict(asdict(r), samples_ms=list(r.samples_ms)) for r in results]}
    stats_path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    with open(table_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in results:
            writer.writerow(r.row())
    return {"stats": stats_path, "table": table_path}
