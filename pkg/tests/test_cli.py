import json
import subprocess
import sys

import pytest

from ididiv import (
    load_candidate_set,
    load_manifest,
    make_candidate_set,
    save_candidate_set,
    serialize_domain,
    builtin_tiger,
)
from ididiv.cli import main
from ididiv.trees import canonical_parse


GRID = {
    "horizons": [2],
    "model_counts": [2],
    "expansions": [1],
    "algorithms": ["IDID"],
    "rounds": 3,
    "seeds": [0],
}


def _run(argv):
    return main([str(a) for a in argv])


class TestSolve:
    def test_level0_policy_written(self, tmp_path, capsys):
        rc = _run(["--out-dir", tmp_path, "solve", "--agent", "j", "--horizon", "2"])
        assert rc == 0
        obj = json.loads((tmp_path / "policy_j.json").read_text())
        assert obj["agent"] == "j"
        assert obj["horizon"] == 2
        tree = canonical_parse(obj["tree"])
        assert tree.depth == 2
        m = load_manifest(tmp_path / "manifest.json")
        assert m.command == "solve"
        assert m.outputs == {"policy": "policy_j.json"}
        assert "solved" in capsys.readouterr().out

    def test_json_domain_file(self, tmp_path):
        dom_path = tmp_path / "dom.json"
        dom_path.write_text(serialize_domain(builtin_tiger(2)))
        rc = _run(
            ["--out-dir", tmp_path / "out", "--domain", dom_path, "solve", "--horizon", "2"]
        )
        assert rc == 0
        m = load_manifest(tmp_path / "out" / "manifest.json")
        assert "domain" in m.input_hashes


class TestTopkFeaturesChain:
    def test_pipeline_files(self, tmp_path, capsys):
        rc = _run(
            [
                "--out-dir",
                tmp_path,
                "--seed",
                "1",
                "topk",
                "--horizon",
                "2",
                "--known",
                "2",
                "--k-max",
                "4",
            ]
        )
        assert rc == 0
        cs = load_candidate_set(tmp_path / "candidates.json")
        assert len(cs.trees) >= 2
        assert (tmp_path / "diversity.csv").read_text().startswith("depth,")
        m = load_manifest(tmp_path / "manifest.json")
        assert m.command == "topk"
        assert m.timings["m"] == 2
        assert m.timings["measure"] == "MDF"
        assert "generate_seconds" in m.timings

        rc = _run(
            [
                "--out-dir",
                tmp_path / "feat",
                "features",
                "--trees",
                tmp_path / "candidates.json",
            ]
        )
        assert rc == 0
        feats = json.loads((tmp_path / "feat" / "features.json").read_text())
        assert feats["trees"] == len(cs.trees)
        assert feats["rank"] >= 1
        assert len(feats["pivot_sequences"]) == feats["rank"]
        matrix_text = (tmp_path / "feat" / "behavior_matrix.csv").read_text()
        assert matrix_text.startswith("tree,")
        fm = load_manifest(tmp_path / "feat" / "manifest.json")
        assert "trees" in fm.input_hashes

    def test_solve_idid_and_simulate(self, tmp_path):
        _run(
            [
                "--out-dir",
                tmp_path,
                "topk",
                "--horizon",
                "2",
                "--known",
                "2",
                "--k-max",
                "3",
            ]
        )
        rc = _run(
            [
                "--out-dir",
                tmp_path / "plan",
                "solve-idid",
                "--horizon",
                "2",
                "--candidates",
                tmp_path / "candidates.json",
            ]
        )
        assert rc == 0
        pol = json.loads((tmp_path / "plan" / "policy_idid.json").read_text())
        assert pol["augmented_states"] > 0
        assert canonical_parse(pol["tree"]).depth == 2

        rc = _run(
            [
                "--out-dir",
                tmp_path / "sim",
                "simulate",
                "--horizon",
                "2",
                "--candidates",
                tmp_path / "candidates.json",
                "--rounds",
                "4",
            ]
        )
        assert rc == 0
        stats = json.loads((tmp_path / "sim" / "stats.json").read_text())
        assert stats["rounds"] == 4
        lines = (tmp_path / "sim" / "episodes.csv").read_text().strip().split("\n")
        assert len(lines) == 1 + 4 * 2


class TestExperiment:
    def test_grid_and_replay(self, tmp_path):
        cfg = tmp_path / "grid.json"
        cfg.write_text(json.dumps(GRID))
        rc = _run(
            ["--out-dir", tmp_path / "a", "experiment", "--config", cfg]
        )
        assert rc == 0
        m = load_manifest(tmp_path / "a" / "manifest.json")
        assert "config" in m.input_hashes

        rc = _run(
            [
                "--out-dir",
                tmp_path / "b",
                "experiment",
                "--from-manifest",
                tmp_path / "a" / "manifest.json",
            ]
        )
        assert rc == 0
        assert (tmp_path / "a" / "results.csv").read_text() == (
            tmp_path / "b" / "results.csv"
        ).read_text()

    def test_failures_exit_nonzero(self, tmp_path, capsys):
        cfg = tmp_path / "grid.json"
        bad = dict(GRID)
        bad["model_counts"] = [400]
        cfg.write_text(json.dumps(bad))
        rc = _run(["--out-dir", tmp_path / "out", "experiment", "--config", cfg])
        assert rc == 1
        captured = capsys.readouterr()
        assert "failed" in captured.err


class TestParsing:
    def test_missing_subcommand(self):
        with pytest.raises(SystemExit):
            main([])

    def test_unknown_domain_errors(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            _run(["--out-dir", tmp_path, "--domain", "no-such", "solve"])

    def test_module_entrypoint(self, tmp_path):
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "ididiv",
                "--out-dir",
                str(tmp_path),
                "solve",
                "--horizon",
                "2",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert (tmp_path / "policy_j.json").exists()


class TestFeaturesOnHandSet(object):
    def test_rank_of_saved_set(self, tmp_path, fig_trees):
        cs = make_candidate_set(fig_trees, 2)
        save_candidate_set(cs, tmp_path / "set.json")
        rc = _run(
            ["--out-dir", tmp_path / "out", "features", "--trees", tmp_path / "set.json"]
        )
        assert rc == 0
        feats = json.loads((tmp_path / "out" / "features.json").read_text())
        assert feats["rank"] == 4
        assert feats["sequences"] == 12
