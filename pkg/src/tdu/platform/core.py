"""The platform: policy, data and application managers over one home directory.

Layout of a home directory::

    policies/<slug>.xml   registered usage policies
    subjects.json         subject constant -> actor class
    readings.ndjson       ingested sensor readings
    ledger.log            usage ledger (unless placed elsewhere)
"""

from __future__ import annotations

import fnmatch
import json
import os
import threading
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from ..compiler.dsl import is_constant
from ..compiler.policy import (ConflictReport, compile_policies, compile_policy,
                               detect_conflicts, policy_slug)
from ..dataplane import Dataset, Reading, ReadingStore, TransformSpec, annotate, transform
from ..dataplane.readings import parse_readings_csv
from ..enforcement import ConsumerRequest, Decision, Enforcer
from ..ledger import Ledger, UsageRecord
from ..tduo.codec import parse_usage_policy, serialize_usage_policy
from ..tduo.model import DataItem, UsagePolicy
from ..tduo.scopes import ACTOR_PREDICATES, CHAINS, Actor, Dimension
from .. import scenario


class PlatformError(ValueError):
    pass


def default_subject(actor: Actor) -> str:
    """Subject constant used when a request names only its actor class."""
    return actor.predicate.lower()


def vocabulary() -> Dict:
    """The trust vocabulary: scope lattices, actor classes and rule syntax."""
    return {
        "dimensions": {d.value: {"predicate": d.predicate, "levels": list(CHAINS[d]),
                                 "ordered": d.ordered, "wildcard": "any"} for d in Dimension},
        "actors": {a.value: p for a, p in ACTOR_PREDICATES.items()},
        "modalities": {"Fact": "", "Obl": "[O]", "Perm": "[P]"},
        "arrows": {"strict": "->", "defeasible": "=>", "defeater": "~>"},
    }


@dataclass(frozen=True)
class QueryResult:
    decision: Decision
    items: Tuple[DataItem, ...]
    record_id: int


class Platform:
    """Registry of policies and subjects, the dataset, the enforcer and the ledger.

    Registry changes take an exclusive lock and swap in a fresh enforcer;
    evaluations work on the snapshot they started with.
    """

    def __init__(self, home, *, modal_conversion: bool = True, ledger_path=None,
                 clock: Callable[[], float] = time.time):
        self.home = Path(home)
        self.home.mkdir(parents=True, exist_ok=True)
        if not os.access(self.home, os.R_OK | os.W_OK | os.X_OK):
            raise PlatformError(f"data dir {self.home} is not readable and writable")
        self.modal_conversion = modal_conversion
        self._lock = threading.RLock()
        self.policy_dir = self.home / "policies"
        self.subjects_path = self.home / "subjects.json"
        self.store = ReadingStore(self.home / "readings.ndjson")
        self.ledger = Ledger(Path(ledger_path) if ledger_path else self.home / "ledger.log", clock)
        self._policies: Dict[str, UsagePolicy] = {}
        for path in sorted(self.policy_dir.glob("*.xml")):
            p = parse_usage_policy(path.read_bytes())
            self._policies[p.name] = p
        self._subjects: Dict[str, Actor] = {}
        if self.subjects_path.exists():
            raw = json.loads(self.subjects_path.read_text(encoding="utf-8"))
            self._subjects = {k: Actor.parse(v) for k, v in raw.items()}
        self._enforcer: Optional[Enforcer] = None

    # -- policy manager -----------------------------------------------------------

    def policies(self) -> List[UsagePolicy]:
        with self._lock:
            return [self._policies[k] for k in sorted(self._policies)]

    def add_policy(self, policy: UsagePolicy) -> None:
        """Register (or replace) a policy; it must compile on its own."""
        compile_policy(policy, modal_conversion=self.modal_conversion)
        with self._lock:
            self.policy_dir.mkdir(parents=True, exist_ok=True)
            path = self.policy_dir / f"{policy_slug(policy.name)}.xml"
            for name, existing in self._policies.items():
                if name != policy.name and policy_slug(name) == policy_slug(policy.name):
                    raise PlatformError(f"policy {policy.name!r} collides with {name!r}")
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(serialize_usage_policy(policy))
            os.replace(tmp, path)
            self._policies[policy.name] = policy
            self._enforcer = None

    def check_policies(self) -> ConflictReport:
        return detect_conflicts(compile_policies(self.policies(),
                                                 modal_conversion=self.modal_conversion))

    def enforcer(self) -> Enforcer:
        with self._lock:
            if self._enforcer is None:
                self._enforcer = Enforcer(self.policies(), modal_conversion=self.modal_conversion)
            return self._enforcer

    # -- subjects ---------------------------------------------------------------

    def subjects(self) -> Dict[str, Actor]:
        with self._lock:
            return dict(sorted(self._subjects.items()))

    def add_subject(self, name: str, actor) -> None:
        if not is_constant(name):
            raise PlatformError(f"subject {name!r} must match [a-z0-9][A-Za-z0-9_]*")
        actor = actor if isinstance(actor, Actor) else Actor.parse(actor)
        with self._lock:
            self._subjects[name] = actor
            tmp = self.subjects_path.with_suffix(".tmp")
            tmp.write_text(json.dumps({k: v.value for k, v in sorted(self._subjects.items())},
                                      indent=2) + "\n", encoding="utf-8")
            os.replace(tmp, self.subjects_path)

    def facts(self, request: Optional[ConsumerRequest] = None) -> frozenset:
        """Actor facts for registered subjects, plus the class-level subject of ``request``."""
        subjects = self.subjects()
        if (request is not None and request.subject not in subjects
                and request.subject == default_subject(request.actor_class)):
            subjects[request.subject] = request.actor_class
        return scenario.subject_facts(subjects)

    def load_scenario(self) -> None:
        for p in scenario.POLICIES:
            self.add_policy(p)
        for name, actor in scenario.SUBJECTS.items():
            self.add_subject(name, actor)

    # -- data manager -----------------------------------------------------------

    @property
    def dataset(self) -> Dataset:
        return self.store.dataset

    def ingest(self, readings: Iterable[Reading]) -> Tuple[int, int]:
        """Returns (readings added, duplicates skipped)."""
        before = len(self.store.dataset)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            after = self.store.add(readings)
        return len(after) - before, len(after.rejected)

    def ingest_csv(self, text: str) -> Tuple[int, int]:
        return self.ingest(parse_readings_csv(text))

    # -- application manager ----------------------------------------------------

    def evaluate(self, request: ConsumerRequest) -> Decision:
        return self.enforcer().evaluate(request, self.facts(request))

    def consulted(self, request: ConsumerRequest) -> Tuple[str, ...]:
        """Names of the policies with a rule that applies to the request's actor class."""
        return tuple(p.name for p in self.policies()
                     if any(not r.condition.actor or request.actor_class in r.condition.actor
                            for r in p.rules))

    def release(self, request: ConsumerRequest, window=None) -> List[DataItem]:
        """Data items at the granted levels, annotated with the consulted policies."""
        target = request.target
        dataset = self.dataset
        if target.entity_type or target.entity_id:
            dataset = Dataset([r for r in dataset.readings
                               if (not target.entity_type or r.entity.type == target.entity_type)
                               and (not target.entity_id
                                    or fnmatch.fnmatchcase(r.entity.id, target.entity_id))])
        spec = TransformSpec(request.spatial, request.temporal, request.abstraction)
        items = transform(dataset, spec, window)
        policies = [p for p in self.policies() if p.name in self.consulted(request)]
        out = []
        for item in items:
            for p in policies:
                item = annotate(item, p)
            out.append(item)
        return out

    def query(self, request: ConsumerRequest, window=None) -> QueryResult:
        """Decide, release data if granted, and record the transaction."""
        decision = self.evaluate(request)
        items = self.release(request, window) if decision.granted else []
        record = UsageRecord(
            subject=request.subject, actor_class=request.actor_class.value,
            spatial=request.spatial, temporal=request.temporal, abstraction=request.abstraction,
            purpose=request.purpose, outcome=decision.outcome, policies=self.consulted(request),
            items_released=len(items), trace_digest=decision.trace.digest())
        record_id = self.ledger.append(record)
        return QueryResult(decision, tuple(items), record_id)

    def history(self, **filters) -> List[UsageRecord]:
        return self.ledger.history(**filters)

    def close(self) -> None:
        """Nothing is buffered (appends are synced), so closing only drops caches."""
        with self._lock:
            self._enforcer = None

