#!/usr/bin/env python3
"""
End-to-end tests for the amr-rematch command line
"""

import json
import os

import pytest

from amr_rematch.main import EXIT_DATA, EXIT_OK, EXIT_USAGE, run


@pytest.fixture
def synth_file(tmp_path):
    path = str(tmp_path / "synth.amr")
    assert run(["synth", "--quiet", "--count", "12", "--min-size", "6", "--max-size", "30",
                "--seed", "4", "--out", path]) == EXIT_OK
    return path


@pytest.fixture
def rare_dir(tmp_path, synth_file):
    out_dir = str(tmp_path / "rare")
    assert run(["rare", synth_file, "--quiet", "--levels", "0,0.5,1", "--max-attempts", "20",
                "--out", out_dir]) == EXIT_OK
    return out_dir


def test_score_identical_corpora(corpus_file, capsys):
    assert run(["score", "labels", corpus_file, corpus_file, "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out == "cut\t1.0000\ntalk\t1.0000\n"


def test_score_jsonl(corpus_file, capsys):
    assert run(["score", "rematch", corpus_file, corpus_file, "--quiet", "--format", "jsonl"]) == EXIT_OK
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert records == [{"id": "cut", "score": 1.0}, {"id": "talk", "score": 1.0}]


def test_score_length_mismatch(tmp_path, corpus_file):
    single = tmp_path / "single.amr"
    single.write_text("(a / amr-empty)\n", encoding="utf-8")
    assert run(["score", "rematch", corpus_file, str(single), "--quiet"]) == EXIT_DATA


def test_usage_errors(corpus_file):
    assert run(["frobnicate"]) == EXIT_USAGE
    assert run(["score", "bleu", corpus_file, corpus_file]) == EXIT_USAGE
    assert run(["motifs", corpus_file, "--kinds", "a,z"]) == EXIT_USAGE
    assert run(["score", "labels", corpus_file, corpus_file, "--jobs", "0"]) == EXIT_USAGE


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "eval-structural" in capsys.readouterr().out


def test_missing_input_is_a_data_error(tmp_path):
    assert run(["parse", str(tmp_path / "absent.amr"), "--quiet"]) == EXIT_DATA


def test_parse_error_policy(tmp_path, capsys):
    path = tmp_path / "bad.amr"
    path.write_text("# ::id ok\n(a / fine)\n\n# ::id bad\n(b / broken\n", encoding="utf-8")
    assert run(["parse", str(path), "--quiet"]) == EXIT_DATA
    capsys.readouterr()
    assert run(["parse", str(path), "--quiet", "--on-error", "skip", "--format", "jsonl"]) == EXIT_OK
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert records == [{"id": "ok", "size": 1, "instances": 1, "relations": 0, "attributes": 0}]


def test_inverse_roles_are_normalized_before_scoring(tmp_path, capsys):
    inverse = tmp_path / "inverse.amr"
    inverse.write_text("# ::id x\n(b / boy :ARG0-of (w / want-01))\n", encoding="utf-8")
    forward = tmp_path / "forward.amr"
    forward.write_text("# ::id x\n(w / want-01 :ARG0 (b / boy))\n", encoding="utf-8")
    assert run(["score", "rematch", str(inverse), str(forward), "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out == "x\t1.0000\n"
    assert run(["score", "rematch", str(inverse), str(forward), "--quiet", "--no-invert-normalize"]) == EXIT_OK
    assert capsys.readouterr().out == "x\t0.5000\n"


def test_motifs_output(tmp_path, corpus_file, capsys):
    assert run(["motifs", corpus_file, "--quiet"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# ::id cut"
    assert "# ::id talk" in lines
    assert "A(op1,s:Helen)" in lines

    single = tmp_path / "single.amr"
    single.write_text("(c / cut-01 :polarity -)\n", encoding="utf-8")
    assert run(["motifs", str(single), "--quiet"]) == EXIT_OK
    assert capsys.readouterr().out == "A(polarity,y:-)\nI(cut-01,A(polarity,y:-))\n"


def test_rare_is_deterministic(tmp_path, synth_file, rare_dir):
    again = str(tmp_path / "again")
    assert run(["rare", synth_file, "--quiet", "--levels", "0,0.5,1", "--max-attempts", "20",
                "--out", again]) == EXIT_OK
    for name in ("train.jsonl", "dev.jsonl", "test.jsonl", "stats.json"):
        with open(os.path.join(rare_dir, name), encoding="utf-8") as f1, \
                open(os.path.join(again, name), encoding="utf-8") as f2:
            assert f1.read() == f2.read()


def test_rare_rejects_bad_levels(synth_file, tmp_path):
    assert run(["rare", synth_file, "--quiet", "--levels", "0.5,0.2", "--out", str(tmp_path / "x")]) == EXIT_USAGE


def test_eval_structural(rare_dir, tmp_path, capsys):
    dataset = os.path.join(rare_dir, "train.jsonl")
    scores = str(tmp_path / "scores.tsv")
    assert run(["eval-structural", dataset, "--metric", "rematch", "--quiet", "--out", scores]) == EXIT_OK
    assert "Spearman" in capsys.readouterr().out
    with open(scores, encoding="utf-8") as f:
        assert all(len(line.split("\t")) == 3 for line in f.read().splitlines())


def test_eval_structural_labels_is_undefined(rare_dir):
    dataset = os.path.join(rare_dir, "train.jsonl")
    assert run(["eval-structural", dataset, "--metric", "labels", "--quiet"]) == EXIT_DATA


def test_ablation_table(rare_dir, capsys):
    assert run(["ablation", os.path.join(rare_dir, "train.jsonl"), "--quiet"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "a+i+r" in out
    assert "undefined" in out


def test_bench_csv(synth_file, capsys):
    assert run(["bench", synth_file, "--quiet", "--pairs", "3", "--metrics", "rematch,labels"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id,metric,N,search_space,runtime_ns"
    assert len(lines) == 7


@pytest.mark.parametrize("gold", ["high", "NaN"])
def test_bad_gold_is_a_data_error(tmp_path, gold):
    path = tmp_path / "rated.jsonl"
    record = {"id": "x", "gold": gold, "amr_a": "(a / amr-empty)", "amr_b": "(a / amr-empty)"}
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    assert run(["eval-semantic", str(path), "--metric", "rematch", "--quiet"]) == EXIT_DATA


def test_bad_rare_record_is_a_data_error(tmp_path, rare_dir):
    with open(os.path.join(rare_dir, "train.jsonl"), encoding="utf-8") as f:
        record = json.loads(f.readline())
    record["swapped_edges"] = "some"
    path = tmp_path / "broken.jsonl"
    path.write_text(json.dumps(record) + "\n", encoding="utf-8")
    assert run(["eval-structural", str(path), "--metric", "rematch", "--quiet"]) == EXIT_DATA


def test_smatch_evaluation_logs_its_seed(rare_dir, capsys):
    dataset = os.path.join(rare_dir, "dev.jsonl")
    run(["eval-structural", dataset, "--metric", "smatch", "--seed", "17", "--verbose"])
    assert "Using seed 17 for smatch restarts" in capsys.readouterr().err
