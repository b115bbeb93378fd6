import pytest

from mtvolatility.corpus import SentencePair, tokenize


def pytest_runtest_logreport(report):
    # One visible PASS/FAIL line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[{outcome}] {report.nodeid.split('::')[-1]}")

# Insertion-of-"sehr" fixture: four source variants and the system outputs
# observed for them, used as scripted-adapter data.
SEHR_OUTPUTS = {
    "Ich bin erleichtert und bescheiden .": "I am easier and modest .",
    "Ich bin erleichtert und sehr bescheiden .": "I am relieved and very modest .",
    "Ich bin sehr erleichtert und bescheiden .": "I am very much easier and modest .",
    "Ich bin sehr erleichtert und sehr bescheiden .": "I am very easy and very modest .",
}

# The two-translation pair used throughout the distance tests.
FIXTURE_ORIGINAL = "I am easier and modest .".split()
FIXTURE_VARIANT = "I am relieved and very modest .".split()

# 4-line corpus backing the insertion-probability examples.
EXAMPLE_CORPUS_LINES = ["a b c d e", "a b c d e", "a b x d e", "a b c d f"]


def make_pair(pair_id, source, target, langs=("de", "en")):
    return SentencePair(
        id=pair_id,
        source_tokens=tuple(tokenize(source)),
        target_tokens=tuple(tokenize(target)),
        source_raw=source,
        target_raw=target,
        language_pair=langs,
    )


@pytest.fixture
def scripted_table():
    return dict(SEHR_OUTPUTS)


@pytest.fixture
def example_corpus(tmp_path):
    path = tmp_path / "example.txt"
    path.write_text("".join(line + "\n" for line in EXAMPLE_CORPUS_LINES), encoding="utf-8")
    return path


def write_parallel(tmp_path, name, sources, targets):
    src = tmp_path / f"{name}.de"
    tgt = tmp_path / f"{name}.en"
    src.write_text("".join(s + "\n" for s in sources), encoding="utf-8")
    tgt.write_text("".join(t + "\n" for t in targets), encoding="utf-8")
    return src, tgt
