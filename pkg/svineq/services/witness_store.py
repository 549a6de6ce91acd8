"""
Append-only JSON-lines witness store.

Writes go through one ``WitnessStore`` owned by the aggregating thread.
``compact`` rewrites the file without duplicate payloads; ``replay``
re-runs every stored payload and measures drift against the stored report.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Tuple

from svineq.models.schemas import CompactionReport, ReplayReport, Witness
from svineq.services.checks import parse_payload, run_check

logger = logging.getLogger(__name__)


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def payload_digest(witness: Witness) -> str:
    """sha256 over kind, check and payload; the report is derived data and is excluded."""
    key = {"kind": witness.kind.value, "check": witness.check, "payload": witness.payload}
    return hashlib.sha256(canonical_json(key).encode("utf-8")).hexdigest()


def _numeric_leaves(value: Any, prefix: str = "") -> Iterator[Tuple[str, float]]:
    if isinstance(value, bool) or value is None:
        return
    if isinstance(value, (int, float)):
        yield prefix, float(value)
    elif isinstance(value, dict):
        for key, item in value.items():
            yield from _numeric_leaves(item, f"{prefix}.{key}")
    elif isinstance(value, list):
        for pos, item in enumerate(value):
            yield from _numeric_leaves(item, f"{prefix}[{pos}]")


def report_drift(stored: dict, fresh: dict) -> float:
    """Largest absolute difference over numeric fields present in both reports."""
    old = dict(_numeric_leaves(stored))
    drift = 0.0
    for key, value in _numeric_leaves(fresh):
        if key in old:
            drift = max(drift, abs(value - old[key]))
    return drift


class WitnessStore:
    """A witness file on disk."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)

    def append(self, witnesses: Iterable[Witness]) -> int:
        lines = [canonical_json(w.model_dump(mode="json")) for w in witnesses]
        if not lines:
            return 0
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")
        logger.debug("Appended %d witnesses to %s", len(lines), self.path)
        return len(lines)

    def load(self) -> List[Witness]:
        if not self.path.exists():
            return []
        with open(self.path, "r", encoding="utf-8") as fh:
            return [Witness.model_validate_json(line) for line in fh if line.strip()]

    def compact(self) -> CompactionReport:
        """Drop repeated payloads, keeping first occurrences in file order."""
        witnesses = self.load()
        seen: set[str] = set()
        kept: List[Witness] = []
        for w in witnesses:
            digest = payload_digest(w)
            if digest not in seen:
                seen.add(digest)
                kept.append(w)
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            for w in kept:
                fh.write(canonical_json(w.model_dump(mode="json")) + "\n")
        tmp.replace(self.path)
        logger.info("Compacted %s: %d -> %d witnesses", self.path, len(witnesses), len(kept))
        return CompactionReport(path=str(self.path), before=len(witnesses), after=len(kept))

    def replay(self, drift_tol: float = 1e-12) -> ReplayReport:
        """Re-evaluate every witness from its payload alone."""
        report = ReplayReport(drift_tol=drift_tol)
        for pos, w in enumerate(self.load()):
            fresh = run_check(parse_payload(w.payload)).model_dump(mode="json")
            drift = report_drift(w.report, fresh)
            report.replayed += 1
            report.max_drift = max(report.max_drift, drift)
            if drift > drift_tol:
                report.mismatched.append(pos)
                logger.warning("witness %d drifted by %.3e on replay", pos, drift)
        return report
