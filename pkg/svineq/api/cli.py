"""
Command handlers for the ``svineq`` command line.

Exposes:
  check      evaluate one check payload             -> GapReport / BoundResult
  trace      walk a proof on one instance            -> TraceReport
  fuzz       run a campaign from a config file       -> CampaignSummary
  oracle     exhaustive small-n enumeration          -> OracleReport
  bound      perturbation bounds on given matrices   -> BoundResult(s)
  decompose  hook measure of a concave function      -> HookMeasure
  search     f-version counterexamples (Hermitian)   -> FVersionWitness list
  replay     re-evaluate a witness file              -> ReplayReport
  compact    deduplicate a witness file              -> CompactionReport

Each handler returns ``(result, exit_code)``; ``svineq.main`` renders the
result and maps errors to exit code 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel

from svineq.config import get_settings
from svineq.core.bounds import bound_profile, truncation_deviation
from svineq.core.concave import hook_decompose, pwl_approximate
from svineq.core.errors import NotPiecewiseLinear
from svineq.models.linalg import ComplexMatrix
from svineq.models.schemas import (
    CONCAVE_FN_ADAPTER,
    BoundCheck,
    CampaignConfig,
    Convention,
    Ensemble,
    EnsembleKind,
    HookFn,
    PiecewiseLinearFn,
)
from svineq.services.campaign import exhaustive_oracle, run_campaign
from svineq.services.checks import parse_payload, result_holds, run_check
from svineq.services.ensembles import sample
from svineq.services.search import as_witness, hermitian_fversion_search
from svineq.services.witness_store import WitnessStore

logger = logging.getLogger(__name__)

Outcome = Tuple[Any, int]

_ORACLE_KINDS = [
    EnsembleKind.GINIBRE_COMPLEX,
    EnsembleKind.HERMITIAN_GAUSSIAN,
    EnsembleKind.DIAGONAL_NON_NEGATIVE,
    EnsembleKind.LOW_RANK_PLUS_NOISE,
]


# ── Input helpers ────────────────────────────────────────────────────────

def load_json(source: str) -> Any:
    """Read JSON from a file path, or parse ``source`` itself as a JSON literal."""
    if source.lstrip().startswith(("{", "[")):
        return json.loads(source)
    return json.loads(Path(source).read_text(encoding="utf-8"))


def _exit(holds: bool) -> int:
    return 0 if holds else 1


# ── Handlers ─────────────────────────────────────────────────────────────

def cmd_check(args: argparse.Namespace) -> Outcome:
    """Evaluate a single ``{"check": ..., ...}`` payload."""
    result = run_check(parse_payload(load_json(args.payload)), args.tol_rel)
    return result, _exit(result_holds(result))


def cmd_trace(args: argparse.Namespace) -> Outcome:
    document: Dict[str, Any] = load_json(args.payload)
    document.setdefault("check", f"trace_{args.theorem}")
    payload = parse_payload(document)
    if payload.check != f"trace_{args.theorem}":
        raise ValueError(f"payload is a {payload.check!r} check, not trace_{args.theorem}")
    report = run_check(payload, args.tol_rel)
    return report, _exit(report.all_hold)


def cmd_fuzz(args: argparse.Namespace) -> Outcome:
    cfg = CampaignConfig.model_validate(load_json(args.config))
    updates: Dict[str, Any] = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.tol_rel is not None:
        updates["tol_rel"] = args.tol_rel
    if cfg.witness_path is None:
        updates["witness_path"] = get_settings().witness_path
    cfg = cfg.model_copy(update=updates)
    summary = run_campaign(cfg)
    return summary, summary.exit_code


def cmd_oracle(args: argparse.Namespace) -> Outcome:
    seed = get_settings().default_seed if args.seed is None else args.seed
    kinds = [EnsembleKind(k) for k in args.ensemble] if args.ensemble else _ORACLE_KINDS
    matrices = []
    for index in range(args.instances):
        e = Ensemble(kind=kinds[index % len(kinds)], n=args.n, seed=seed, rank=1, noise_scale=0.01)
        matrices.append((sample(e, index, 0), sample(e, index, 1)))
    report = exhaustive_oracle(args.n, matrices, tol_rel=args.tol_rel)
    return report, report.exit_code


def cmd_bound(args: argparse.Namespace) -> Outcome:
    document: Dict[str, Any] = load_json(args.payload)
    document.setdefault("check", "bound")
    payload = parse_payload(document)
    if args.profile or args.truncate is not None:
        if not isinstance(payload, BoundCheck):
            raise ValueError("--profile and --truncate need a 'bound' payload with a concave f")
        x = ComplexMatrix.from_payload(payload.x)
        tol = payload.tol_rel if args.tol_rel is None else args.tol_rel
        if args.truncate is not None:
            result = truncation_deviation(x, args.truncate, payload.f, tol)
            return result, _exit(result.holds)
        profile = bound_profile(x, ComplexMatrix.from_payload(payload.y), payload.f, tol)
        return profile, _exit(all(r.holds for r in profile))
    result = run_check(payload, args.tol_rel)
    return result, _exit(result_holds(result))


def cmd_decompose(args: argparse.Namespace) -> Outcome:
    f = CONCAVE_FN_ADAPTER.validate_python(load_json(args.fn))
    if not isinstance(f, PiecewiseLinearFn):
        if args.x_max is None:
            raise NotPiecewiseLinear(f"{f.form} needs --x-max to be approximated first")
        approx = pwl_approximate(f, args.x_max, args.nodes)
        logger.info("approximated %s on [0, %g], error bound %.3e", f.form, args.x_max, approx.error_bound)
        f = approx.fn
    return hook_decompose(f), 0


def cmd_search(args: argparse.Namespace) -> Outcome:
    f = CONCAVE_FN_ADAPTER.validate_python(load_json(args.fn)) if args.fn else HookFn(t=1.0)
    seed = get_settings().default_seed if args.seed is None else args.seed
    witnesses = hermitian_fversion_search(
        args.budget,
        f,
        Convention(args.convention),
        seed=seed,
        n_range=(args.n_min, args.n_max),
        kind=EnsembleKind(args.ensemble),
        tol_rel=args.tol_rel,
    )
    if args.save is not None:
        written = WitnessStore(args.save or get_settings().witness_path).append(as_witness(w) for w in witnesses)
        logger.info("search: %d witnesses appended", written)
    return witnesses, 0


def cmd_replay(args: argparse.Namespace) -> Outcome:
    report = WitnessStore(args.path or get_settings().witness_path).replay()
    return report, report.exit_code


def cmd_compact(args: argparse.Namespace) -> Outcome:
    return WitnessStore(args.path or get_settings().witness_path).compact(), 0


# ── Registration ─────────────────────────────────────────────────────────

def common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the random seed")
    common.add_argument("--tol-rel", type=float, default=None, help="override the relative tolerance")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    return common


def add_commands(subparsers: argparse._SubParsersAction) -> None:
    common = common_options()

    s = subparsers.add_parser("check", parents=[common], help="Evaluate one check payload")
    s.add_argument("payload", help="JSON file or literal with a 'check' field")
    s.set_defaults(main=cmd_check)

    s = subparsers.add_parser("trace", parents=[common], help="Walk a proof as checked steps")
    s.add_argument("theorem", choices=("theorem1", "theorem2", "theorem3"))
    s.add_argument("payload")
    s.set_defaults(main=cmd_trace)

    s = subparsers.add_parser("fuzz", parents=[common], help="Run a fuzz campaign")
    s.add_argument("config", help="CampaignConfig JSON")
    s.set_defaults(main=cmd_fuzz)

    s = subparsers.add_parser("oracle", parents=[common], help="Exhaustive small-n enumeration")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--instances", type=int, default=50)
    s.add_argument("--ensemble", action="append", choices=[k.value for k in EnsembleKind])
    s.set_defaults(main=cmd_oracle)

    s = subparsers.add_parser("bound", parents=[common], help="Perturbation bounds")
    s.add_argument("payload", help="'bound' or 'schatten' payload")
    s.add_argument("--profile", action="store_true", help="bounds for idx = (1..m), m = 1..n")
    s.add_argument("--truncate", type=int, default=None, metavar="RANK",
                   help="compare x with its best rank-RANK approximation")
    s.set_defaults(main=cmd_bound)

    s = subparsers.add_parser("decompose", parents=[common], help="Hook measure of a concave function")
    s.add_argument("fn", help="ConcaveFn JSON")
    s.add_argument("--x-max", type=float, default=None, help="approximate closed forms on [0, X_MAX]")
    s.add_argument("--nodes", type=int, default=None)
    s.set_defaults(main=cmd_decompose)

    s = subparsers.add_parser("search", parents=[common], help="f-version counterexamples on eigenvalues")
    s.add_argument("--budget", type=int, default=100)
    s.add_argument("--fn", default=None, help="ConcaveFn JSON (default hook t=1)")
    s.add_argument("--convention", choices=[c.value for c in Convention], required=True)
    s.add_argument("--ensemble", default=EnsembleKind.HERMITIAN_GAUSSIAN.value,
                   choices=[k.value for k in EnsembleKind])
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=4)
    s.add_argument("--save", nargs="?", const="", default=None, metavar="PATH",
                   help="append witnesses to PATH (default: the configured witness file)")
    s.set_defaults(main=cmd_search)

    s = subparsers.add_parser("replay", parents=[common], help="Re-evaluate stored witnesses")
    s.add_argument("path", nargs="?", default=None)
    s.set_defaults(main=cmd_replay)

    s = subparsers.add_parser("compact", parents=[common], help="Deduplicate a witness file")
    s.add_argument("path", nargs="?", default=None)
    s.set_defaults(main=cmd_compact)


# ── Rendering ────────────────────────────────────────────────────────────

def _dump(result: Any) -> Any:
    if isinstance(result, BaseModel):
        return result.model_dump(mode="json")
    if isinstance(result, list):
        return [_dump(item) for item in result]
    return result


def _flat(prefix: str, value: Any, row: Dict[str, Any]) -> None:
    if isinstance(value, dict):
        for key, item in value.items():
            _flat(f"{prefix}{key}.", item, row)
    elif isinstance(value, list):
        row[prefix[:-1]] = json.dumps(value)
    else:
        row[prefix[:-1]] = value


def _rows(data: Any) -> List[Dict[str, Any]]:
    """One flat row per natural record of a report."""
    if isinstance(data, list):
        rows = []
        for item in data:
            rows.extend(_rows(item))
        return rows
    if "steps" in data:
        return [{"theorem": data["theorem"], "step": s["name"], **_rows(s["report"])[0]} for s in data["steps"]]
    if "counts" in data:
        return [{"check": name, **counts} for name, counts in sorted(data["counts"].items())]
    if "atoms" in data:
        rows = [{"t": a["t"], "weight": a["weight"]} for a in data["atoms"]]
        return rows + [{"t": "tail", "weight": data["linear_tail"]}]
    data = {k: v for k, v in data.items() if k not in ("inputs", "payload")}
    row: Dict[str, Any] = {}
    _flat("", data, row)
    return [row]


def render(result: Any, fmt: str) -> str:
    data = _dump(result)
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"
    rows = _rows(data)
    fields: List[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()
