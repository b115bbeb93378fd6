import json
import subprocess
import sys

import pytest

from mtvolatility import pipeline
from mtvolatility.cli import main

from conftest import write_parallel


def read_jsonl(path):
    return pipeline.read_jsonl(path)


@pytest.fixture
def number_fixture(tmp_path):
    """One pair with a single aligned number."""
    return write_parallel(
        tmp_path,
        "numfix",
        ["Ich bin vor 30 Jahren hier gelandet."],
        ["I landed here 30 years ago."],
    )


@pytest.fixture
def small_corpus(tmp_path):
    sources = [f"Das ist Satz {i} mit der Nummer {i + 10} darin." for i in range(10)]
    targets = [f"This is sentence {i} with the number {i + 10} in it." for i in range(10)]
    return write_parallel(tmp_path, "small", sources, targets)


class TestGenerate:
    def test_subnum_fixture_yields_five(self, tmp_path, number_fixture):
        src, tgt = number_fixture
        out = tmp_path / "run"
        code = main([
            "generate", "--pairs", str(src), str(tgt),
            "--kinds", "subnum", "--out", str(out),
        ])
        assert code == 0
        rows = read_jsonl(out / "variations.jsonl")
        assert len(rows) == 5
        assert {r["kind"] for r in rows} == {"subnum"}
        meta = json.loads((out / "generate.meta.json").read_text())
        assert meta["stage"] == "generate"
        assert meta["params"]["k_max"] == 5

    def test_unknown_kind_fails_with_diagnostic(self, tmp_path, number_fixture, capsys):
        src, tgt = number_fixture
        code = main([
            "generate", "--pairs", str(src), str(tgt),
            "--kinds", "negation", "--out", str(tmp_path / "run"),
        ])
        assert code == 1
        diagnostic = json.loads(capsys.readouterr().err)
        assert "negation" in diagnostic["error"]["message"]

    def test_bad_langs_flag(self, tmp_path, number_fixture):
        src, tgt = number_fixture
        code = main([
            "generate", "--pairs", str(src), str(tgt),
            "--langs", "german", "--out", str(tmp_path / "run"),
        ])
        assert code == 1


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self):
        result = subprocess.run(
            [sys.executable, "-m", "mtvolatility.cli", "frobnicate"],
            capture_output=True,
        )
        assert result.returncode == 2

    def test_missing_required_flag_exits_2(self):
        result = subprocess.run(
            [sys.executable, "-m", "mtvolatility.cli", "report"],
            capture_output=True,
        )
        assert result.returncode == 2

    def test_console_entry_point_help(self):
        result = subprocess.run(
            [sys.executable, "-m", "mtvolatility.cli", "--help"], capture_output=True
        )
        assert result.returncode == 0
        assert b"generate" in result.stdout


class TestCounts:
    def test_counts_and_dump(self, tmp_path, example_corpus):
        out = tmp_path / "run"
        code = main(["counts", "--corpus", str(example_corpus), "--out", str(out), "--dump"])
        assert code == 0
        assert (out / "counts.bin").exists()
        assert "a b c d e\t2" in (out / "counts.tsv").read_text(encoding="utf-8")

    def test_ins_without_counts_warns(self, tmp_path, number_fixture):
        src, tgt = number_fixture
        with pytest.warns(UserWarning, match="ins requested"):
            code = main([
                "generate", "--pairs", str(src), str(tgt),
                "--kinds", "ins", "--out", str(tmp_path / "run"),
            ])
        assert code == 0


class TestFullPipeline:
    def run_pipeline(self, out, src, tgt, adapter="mock:identity", kinds="subnum"):
        assert main(["generate", "--pairs", str(src), str(tgt),
                     "--kinds", kinds, "--out", str(out)]) == 0
        assert main(["translate", "--adapter", adapter, "--out", str(out)]) == 0
        assert main(["measure", "--out", str(out)]) == 0
        assert main(["score", "--out", str(out)]) == 0
        assert main(["oscillate", "--out", str(out)]) == 0
        assert main(["report", "--out", str(out)]) == 0

    def test_identity_adapter_gives_all_minor(self, tmp_path, small_corpus):
        src, tgt = small_corpus
        out = tmp_path / "run"
        self.run_pipeline(out, src, tgt)
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        assert report["class_shares"]["Minor"] == 1.0
        assert (out / "scatter.csv").exists()
        assert (out / "oscillations.csv").exists()
        assert report["run_metadata"]["stages"]["generate"]["adverbs_hash"]

    def test_report_fractions_reproducible_one_pass(self, tmp_path, small_corpus):
        # every reported share must be recomputable from the raw JSONL
        src, tgt = small_corpus
        out = tmp_path / "run"
        self.run_pipeline(out, src, tgt, adapter="mock:perturb:3:0.4")
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        counts = {"Minor": 0, "Major": 0, "Borderline": 0}
        for row in read_jsonl(out / "measures.jsonl"):
            counts[row["class"]] += 1
        total = sum(counts.values())
        for name, share in report["class_shares"].items():
            assert share == counts[name] / total

    def test_subprocess_cat_adapter(self, tmp_path, small_corpus):
        src, tgt = small_corpus
        out = tmp_path / "run"
        self.run_pipeline(out, src, tgt, adapter="cmd:cat")
        measures = read_jsonl(out / "measures.jsonl")
        assert measures
        assert all(row["class"] == "Minor" for row in measures)

    def test_stage_rerun_is_byte_identical(self, tmp_path, small_corpus):
        src, tgt = small_corpus
        out = tmp_path / "run"
        self.run_pipeline(out, src, tgt, adapter="mock:perturb:5:0.2")
        first = {
            name: (out / name).read_bytes()
            for name in ("measures.jsonl", "scores.jsonl", "oscillations.jsonl", "report.json")
        }
        assert main(["measure", "--out", str(out)]) == 0
        assert main(["score", "--out", str(out)]) == 0
        assert main(["oscillate", "--out", str(out)]) == 0
        assert main(["report", "--out", str(out)]) == 0
        for name, blob in first.items():
            assert (out / name).read_bytes() == blob, name

    def test_measure_with_bpe_scheme(self, tmp_path, small_corpus):
        src, tgt = small_corpus
        out = tmp_path / "run"
        merges = tmp_path / "merges.txt"
        merges.write_text("t h\nth e\ne r\ni s\n", encoding="utf-8")
        assert main(["generate", "--pairs", str(src), str(tgt),
                     "--kinds", "subnum", "--out", str(out)]) == 0
        assert main(["translate", "--adapter", "mock:identity", "--out", str(out)]) == 0
        assert main(["measure", "--bpe", str(merges), "--out", str(out)]) == 0
        meta = json.loads((out / "measure.meta.json").read_text())
        assert meta["params"]["bpe"] == "merges.txt"

    def test_translate_requires_generate_first(self, tmp_path):
        code = main(["translate", "--adapter", "mock:identity", "--out", str(tmp_path / "fresh")])
        assert code == 1

    def test_ins_pipeline_with_counts(self, tmp_path):
        corpus_file = tmp_path / "train.txt"
        corpus_file.write_text(
            "".join(["sie ist auch die einzige Person\n"] * 4), encoding="utf-8"
        )
        src, tgt = write_parallel(
            tmp_path, "inspairs",
            ["sie ist die einzige Person"],
            ["she is the only person"],
        )
        out = tmp_path / "run"
        assert main(["counts", "--corpus", str(corpus_file), "--out", str(out)]) == 0
        assert main([
            "generate", "--pairs", str(src), str(tgt), "--kinds", "ins",
            "--counts", str(out / "counts.bin"), "--out", str(out),
        ]) == 0
        rows = read_jsonl(out / "variations.jsonl")
        assert len(rows) == 1
        assert rows[0]["edit"]["word"] == "auch"
        assert rows[0]["reference_modified"] is False
