"""Serving the built annotator UI through the annotation service.

These tests exercise the `annotate serve` wiring end to end and skip when
frontend/dist has not been built; the rest of the suite never needs it.
"""

import json
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from mtvolatility.annotation import AnnotationLog, build_items
from mtvolatility.service import AnnotationService, serve_in_thread

from conftest import write_parallel
from test_annotation import quadruplet

REPO_ROOT = Path(__file__).resolve().parents[1]
UI_DIST = REPO_ROOT / "frontend" / "dist"

pytestmark = pytest.mark.skipif(
    not (UI_DIST / "index.html").exists(), reason="frontend not built"
)


def test_service_serves_built_ui(tmp_path):
    items = build_items("v0", quadruplet())
    log = AnnotationLog(tmp_path / "log.jsonl")
    server, base = serve_in_thread(AnnotationService(items, log, ui_dir=UI_DIST))
    try:
        with urllib.request.urlopen(f"{base}/") as response:
            page = response.read().decode("utf-8")
        assert "app.js" in page
        with urllib.request.urlopen(f"{base}/app.js") as response:
            assert response.headers["Content-Type"].startswith("text/javascript") or \
                response.headers["Content-Type"].startswith("application/javascript")
    finally:
        server.shutdown()


def test_cli_annotate_serve_end_to_end(tmp_path):
    sources = [f"Der Wert {i + 30} steht hier ." for i in range(3)]
    targets = [f"The value {i + 30} stands here ." for i in range(3)]
    src, tgt = write_parallel(tmp_path, "annfix", sources, targets)
    out = tmp_path / "run"
    for argv in (
        ["generate", "--pairs", str(src), str(tgt), "--kinds", "subnum", "--out", str(out)],
        ["translate", "--adapter", "mock:identity", "--out", str(out)],
        ["measure", "--out", str(out)],
    ):
        assert subprocess.run(
            [sys.executable, "-m", "mtvolatility.cli", *argv], capture_output=True
        ).returncode == 0

    proc = subprocess.Popen(
        [
            sys.executable, "-u", "-m", "mtvolatility.cli", "annotate", "serve",
            "--listen", "127.0.0.1:0", "--sample", "5", "--seed", "3",
            "--ui", str(UI_DIST), "--out", str(out),
        ],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )
    try:
        banner = proc.stdout.readline()
        assert "serving 10 annotation tasks" in banner
        base = banner.strip().rsplit(" ", 1)[-1]
        with urllib.request.urlopen(f"{base}/api/tasks/next?annotator=a1", timeout=5) as r:
            item = json.loads(r.read())
        assert item["phase"] == "DifferenceOnly"
        with urllib.request.urlopen(f"{base}/", timeout=5) as r:
            assert b"app.js" in r.read()
    finally:
        proc.terminate()
        try:
            proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            proc.kill()
    time.sleep(0.05)
