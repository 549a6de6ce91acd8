"""
Tests for the command line: exit codes, rendering and the file-based commands.

Run with:
    pytest tests/test_cli.py -v
"""

from __future__ import annotations

import json

import pytest

from svineq.main import main
from svineq.models.linalg import ComplexMatrix


CONVEX = {"form": "pwl", "breakpoints": [1.0], "slopes": [0.0, 1.0]}


def _matrix(values) -> dict:
    return ComplexMatrix.diag(values).to_payload().model_dump(mode="json")


def _pair(n, i, j) -> dict:
    return {"i_seq": {"n": n, "indices": list(i)}, "j_seq": {"n": n, "indices": list(j)}}


@pytest.fixture
def tf_payload(tmp_path):
    path = tmp_path / "tf.json"
    path.write_text(json.dumps({
        "check": "tf",
        "a": _matrix([2, 1]),
        "b": _matrix([1, 1]),
        "pair": _pair(2, (1,), (1,)),
    }))
    return path


@pytest.fixture
def broken_premise(tmp_path):
    path = tmp_path / "premise.json"
    path.write_text(json.dumps({
        "alpha": {"kind": "singular", "values": [0.6, 0.0]},
        "beta": {"kind": "singular", "values": [0.6, 0.0]},
        "gamma": {"kind": "singular", "values": [1.0, 1.0]},
        "pair": _pair(2, (1, 2), (1, 2)),
        "t": 1.0,
    }))
    return path


def _stdout_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


# ═══════════════════════════════════════════════════════════════════════════
# check / trace
# ═══════════════════════════════════════════════════════════════════════════

class TestCheckCommand:
    def test_holding_instance_exits_zero(self, tf_payload, capsys):
        assert main(["check", str(tf_payload)]) == 0
        report = _stdout_json(capsys)
        assert (report["lhs"], report["rhs"], report["slack"]) == (3.0, 3.0, 0.0)
        assert report["holds"] is True

    def test_inline_json(self, capsys):
        document = json.dumps({
            "check": "mirsky",
            "x": _matrix([3, 1]),
            "y": _matrix([1, 0]),
            "idx": {"n": 2, "indices": [2]},
            "f": {"form": "power", "p": 1.0},
        })
        assert main(["check", document]) == 0
        assert _stdout_json(capsys)["slack"] == 1.0

    def test_csv_output(self, tf_payload, capsys):
        assert main(["check", str(tf_payload), "--format", "csv"]) == 0
        header, row = capsys.readouterr().out.strip().splitlines()
        assert header.split(",")[:3] == ["name", "lhs", "rhs"]
        assert row.startswith("tf,3.0,3.0")

    def test_out_file(self, tf_payload, tmp_path, capsys):
        out = tmp_path / "reports" / "tf.json"
        assert main(["check", str(tf_payload), "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["name"] == "tf"

    def test_invalid_payload_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"check": "tf", "a": _matrix([1])}))
        assert main(["check", str(path)]) == 2
        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert error["error"] == "validation_error"

    def test_convex_function_exits_two(self, capsys):
        document = json.dumps({
            "check": "mirsky",
            "x": _matrix([2]),
            "y": _matrix([1]),
            "idx": {"n": 1, "indices": [1]},
            "f": CONVEX,
        })
        assert main(["check", document]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "InadmissibleFunction"

    def test_report_echoes_its_payload(self, tf_payload, tmp_path, capsys):
        out = tmp_path / "tf.json"
        assert main(["check", str(tf_payload), "--out", str(out)]) == 0
        inputs = json.loads(out.read_text())["inputs"]
        assert inputs["check"] == "tf"
        assert main(["check", json.dumps(inputs)]) == 0
        assert _stdout_json(capsys)["slack"] == 0.0

    def test_missing_file_exits_two(self, tmp_path):
        assert main(["check", str(tmp_path / "absent.json")]) == 2

    def test_dimension_mismatch_exits_two(self, tmp_path, capsys):
        path = tmp_path / "mismatch.json"
        path.write_text(json.dumps({
            "check": "theorem3",
            "a": _matrix([1, 1]),
            "b": _matrix([1, 1, 1]),
            "partition": {"n": 2, "indices": [1], "b": 1, "flags": ["C"]},
        }))
        assert main(["check", str(path)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "DimMismatch"


class TestTraceCommand:
    def test_theorem1(self, tmp_path, capsys):
        path = tmp_path / "t1.json"
        path.write_text(json.dumps({
            "x": _matrix([3, 1]),
            "y": _matrix([1, 0]),
            "idx": {"n": 2, "indices": [1, 2]},
            "t": 1.0,
        }))
        assert main(["trace", "theorem1", str(path)]) == 0
        report = _stdout_json(capsys)
        assert report["theorem"] == "theorem1" and report["all_hold"] is True

    def test_premise_violation_exits_one(self, broken_premise, capsys):
        assert main(["trace", "theorem2", str(broken_premise)]) == 1
        assert "premise_violation" in _stdout_json(capsys)["context"]

    def test_csv_has_one_row_per_step(self, broken_premise, capsys):
        main(["trace", "theorem2", str(broken_premise), "--format", "csv"])
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("theorem,step,")
        assert len(lines) == 1 + 7

    def test_wrong_check_kind(self, tf_payload):
        assert main(["trace", "theorem3", str(tf_payload)]) == 2


# ═══════════════════════════════════════════════════════════════════════════
# bound / decompose
# ═══════════════════════════════════════════════════════════════════════════

class TestBoundCommand:
    PAYLOAD = {
        "x": _matrix([4, 1]),
        "y": _matrix([4, 0]),
        "f": {"form": "power", "p": 0.5},
    }

    def test_single_bound(self, capsys):
        assert main(["bound", json.dumps(self.PAYLOAD)]) == 0
        result = _stdout_json(capsys)
        assert (result["actual"], result["bound"], result["tightness"]) == (1.0, 1.0, 1.0)

    def test_profile(self, capsys):
        assert main(["bound", json.dumps(self.PAYLOAD), "--profile"]) == 0
        assert [r["idx"]["indices"] for r in _stdout_json(capsys)] == [[1], [1, 2]]

    def test_truncate(self, capsys):
        assert main(["bound", json.dumps(self.PAYLOAD), "--truncate", "1"]) == 0
        assert _stdout_json(capsys)["inputs"]["rank"] == 1

    def test_schatten(self, capsys):
        payload = {"check": "schatten", "x": _matrix([3, 1]), "y": _matrix([1, 0]), "p": 1.0}
        assert main(["bound", json.dumps(payload)]) == 0
        assert _stdout_json(capsys)["schatten_norm"] == pytest.approx(3.0)

    def test_invalid_exponent(self, capsys):
        payload = {"check": "schatten", "x": _matrix([1]), "y": _matrix([0]), "p": 2.0}
        assert main(["bound", json.dumps(payload)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "InvalidP"


class TestDecomposeCommand:
    def test_piecewise_linear(self, capsys):
        fn = {"form": "pwl", "breakpoints": [1.0, 2.0], "slopes": [1.0, 0.5, 0.0]}
        assert main(["decompose", json.dumps(fn)]) == 0
        measure = _stdout_json(capsys)
        assert measure["atoms"] == [{"t": 1.0, "weight": 0.5}, {"t": 2.0, "weight": 0.5}]
        assert measure["linear_tail"] == 0.0

    def test_closed_form_needs_range(self):
        assert main(["decompose", json.dumps({"form": "power", "p": 0.5})]) == 2

    def test_closed_form_with_range(self, capsys):
        assert main(["decompose", json.dumps({"form": "power", "p": 0.5}), "--x-max", "4", "--nodes", "20"]) == 0
        assert len(_stdout_json(capsys)["atoms"]) > 0

    def test_inadmissible(self):
        fn = {"form": "pwl", "breakpoints": [1.0], "slopes": [1.0, 2.0]}
        assert main(["decompose", json.dumps(fn)]) == 2


# ═══════════════════════════════════════════════════════════════════════════
# fuzz / oracle / search / replay / compact
# ═══════════════════════════════════════════════════════════════════════════

class TestHarnessCommands:
    def test_fuzz_replay_compact(self, tmp_path, capsys):
        witnesses = tmp_path / "w.jsonl"
        config = tmp_path / "campaign.json"
        config.write_text(json.dumps({
            "ensembles": ["diagonal_non_negative"],
            "n_range": [2, 2],
            "instance_count": 3,
            "f_family": [{"form": "power", "p": 1.0}],
            "checks": ["mirsky"],
            "witness_path": str(witnesses),
        }))
        assert main(["fuzz", str(config), "--seed", "4"]) == 0
        summary = _stdout_json(capsys)
        assert summary["seed"] == 4 and summary["counts"]["mirsky"]["violated"] == 0

        assert main(["replay", str(witnesses)]) == 0
        assert _stdout_json(capsys)["mismatched"] == []

        assert main(["fuzz", str(config), "--seed", "4"]) == 0
        capsys.readouterr()
        assert main(["compact", str(witnesses)]) == 0
        compaction = _stdout_json(capsys)
        assert compaction["after"] * 2 == compaction["before"]

    def test_fuzz_self_test_exits_one(self, tmp_path):
        config = tmp_path / "campaign.json"
        config.write_text(json.dumps({
            "ensembles": ["ginibre_complex"],
            "n_range": [2, 2],
            "instance_count": 2,
            "checks": ["tf"],
            "self_test_negate_rhs": True,
            "witness_path": str(tmp_path / "w.jsonl"),
        }))
        assert main(["fuzz", str(config)]) == 1

    def test_oracle(self, capsys):
        assert main(["oracle", "--n", "2", "--instances", "4"]) == 0
        report = _stdout_json(capsys)
        assert (report["n"], report["instances"], report["failures"]) == (2, 4, [])

    def test_oracle_budget(self):
        assert main(["oracle", "--n", "7", "--instances", "1"]) == 2

    def test_search_psd(self, capsys):
        assert main(["search", "--budget", "5", "--convention", "odd_extension",
                     "--ensemble", "wishart_psd"]) == 0
        assert _stdout_json(capsys) == []

    def test_search_needs_convention(self):
        assert main(["search", "--budget", "1"]) == 2

    def test_search_bad_size_range(self, capsys):
        assert main(["search", "--budget", "3", "--convention", "skip_negative",
                     "--n-min", "3", "--n-max", "2"]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "InvalidDims"

    def test_search_save_then_replay(self, tmp_path, capsys):
        store = tmp_path / "search.jsonl"
        assert main(["search", "--budget", "20", "--convention", "odd_extension",
                     "--fn", json.dumps({"form": "hook", "t": 0.5}), "--seed", "1", "--save", str(store)]) == 0
        found = _stdout_json(capsys)
        assert main(["replay", str(store)]) == 0
        report = _stdout_json(capsys)
        assert report["replayed"] == len(found)
        assert report["mismatched"] == []

    def test_fuzz_rejects_inadmissible_family(self, tmp_path, capsys):
        config = tmp_path / "campaign.json"
        config.write_text(json.dumps({
            "n_range": [2, 2],
            "instance_count": 1,
            "f_family": [CONVEX],
            "witness_path": str(tmp_path / "w.jsonl"),
        }))
        assert main(["fuzz", str(config)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "InadmissibleFunction"
        assert not (tmp_path / "w.jsonl").exists()


class TestParser:
    def test_version(self):
        assert main(["--version"]) == 0

    def test_unknown_command(self):
        assert main(["plot"]) == 2

    def test_no_command(self):
        assert main([]) == 2
