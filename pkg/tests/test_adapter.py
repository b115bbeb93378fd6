import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from mtvolatility.adapter import (
    AdapterContractError,
    AdapterProcessError,
    AdapterTransportError,
    FileAdapter,
    HttpAdapter,
    ScriptedLookupError,
    SubprocessAdapter,
    from_spec,
    mock_identity,
    mock_perturbing,
    mock_scripted,
    translate_batch,
)

from conftest import SEHR_OUTPUTS


class TestMocks:
    def test_identity(self):
        assert mock_identity().translate(["x y z"]) == ["x y z"]

    def test_scripted_reproduces_fixture_outputs(self, scripted_table):
        adapter = mock_scripted(scripted_table)
        inputs = list(SEHR_OUTPUTS)
        assert adapter.translate(inputs) == [SEHR_OUTPUTS[i] for i in inputs]

    def test_scripted_miss_names_input(self, scripted_table):
        adapter = mock_scripted(scripted_table)
        with pytest.raises(ScriptedLookupError) as err:
            adapter.translate(["unbekannter Satz"])
        assert "unbekannter Satz" in str(err.value)

    def test_perturbing_zero_rate_is_identity(self):
        adapter = mock_perturbing(seed=7, rate=0.0)
        texts = ["Ich bin sehr erleichtert .", "a b c d e f g"]
        assert adapter.translate(texts) == texts

    def test_perturbing_deterministic_across_runs(self):
        text = "the quick brown fox jumps over the lazy dog"
        outputs = {mock_perturbing(seed=7, rate=0.3).translate([text])[0] for _ in range(100)}
        assert len(outputs) == 1

    def test_perturbing_independent_of_batching(self):
        adapter = mock_perturbing(seed=3, rate=0.5)
        texts = [f"sentence number {i} with words" for i in range(10)]
        whole = adapter.translate(texts)
        one_by_one = [adapter.translate([t])[0] for t in texts]
        assert whole == one_by_one

    def test_perturbing_rate_validated(self):
        with pytest.raises(ValueError):
            mock_perturbing(seed=1, rate=1.5)

    def test_perturbing_actually_perturbs(self):
        adapter = mock_perturbing(seed=11, rate=1.0)
        text = "aaa bbb ccc ddd eee fff ggg hhh"
        assert adapter.translate([text])[0] != text


class TestSubprocessAdapter:
    def test_cat_is_identity(self):
        adapter = SubprocessAdapter("cat")
        texts = ["erste Zeile", "zweite Zeile", "dritte Zeile"]
        assert adapter.translate(texts) == texts

    def test_nonzero_exit_propagates_diagnostics(self):
        adapter = SubprocessAdapter("ls /nonexistent-directory-for-test")
        with pytest.raises(AdapterProcessError) as err:
            adapter.translate(["x"])
        assert err.value.returncode != 0
        assert err.value.stderr

    def test_line_count_mismatch(self):
        adapter = SubprocessAdapter("head -n 1")
        with pytest.raises(AdapterContractError) as err:
            adapter.translate(["eins", "zwei", "drei"])
        assert err.value.index == 1

    def test_batching_preserves_order(self):
        adapter = SubprocessAdapter("cat", batch_size=2)
        texts = [f"line {i}" for i in range(7)]
        assert adapter.translate(texts) == texts


class TestFileAdapter:
    def test_serves_lines_in_order(self, tmp_path):
        path = tmp_path / "hyps.txt"
        path.write_text("one\ntwo\nthree\n", encoding="utf-8")
        adapter = FileAdapter(path)
        assert adapter.translate(["a", "b"]) == ["one", "two"]
        assert adapter.translate(["c"]) == ["three"]

    def test_mismatch_reports_index(self, tmp_path):
        path = tmp_path / "hyps.txt"
        path.write_text("one\ntwo\n", encoding="utf-8")
        adapter = FileAdapter(path)
        with pytest.raises(AdapterContractError) as err:
            adapter.translate(["a", "b", "c"])
        assert err.value.index == 2


class _StubHandler(BaseHTTPRequestHandler):
    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length).decode("utf-8"))
        if self.path == "/translate":
            body = json.dumps(
                {"translations": [t.upper() for t in payload["texts"]]}
            ).encode("utf-8")
            self.send_response(200)
        elif self.path == "/short":
            body = json.dumps({"translations": []}).encode("utf-8")
            self.send_response(200)
        else:
            body = b"{}"
            self.send_response(500)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture(scope="module")
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


class TestHttpAdapter:
    def test_round_trip(self, stub_server):
        adapter = HttpAdapter(f"{stub_server}/translate")
        assert adapter.translate(["hallo", "welt"]) == ["HALLO", "WELT"]

    def test_non_200_is_transport_error(self, stub_server):
        adapter = HttpAdapter(f"{stub_server}/broken")
        with pytest.raises(AdapterTransportError):
            adapter.translate(["x"])

    def test_count_mismatch_is_contract_error(self, stub_server):
        adapter = HttpAdapter(f"{stub_server}/short")
        with pytest.raises(AdapterContractError):
            adapter.translate(["x", "y"])

    def test_unreachable_host(self):
        adapter = HttpAdapter("http://127.0.0.1:9/nothing", timeout=0.5)
        with pytest.raises(AdapterTransportError):
            adapter.translate(["x"])


class TestTranslateBatch:
    def test_one_record_per_item_in_order(self):
        records = translate_batch(
            [("id1", "I am relieved ."), ("id2", "x y")], mock_identity()
        )
        assert [r.item_id for r in records] == ["id1", "id2"]
        assert records[0].output_raw == "I am relieved ."
        assert records[0].adapter_name == "mock:identity"
        assert records[0].latency_ms == 0

    def test_empty_batch(self):
        assert translate_batch([], mock_identity()) == []


class TestFromSpec:
    def test_cmd(self):
        assert isinstance(from_spec("cmd:cat"), SubprocessAdapter)

    def test_file(self, tmp_path):
        path = tmp_path / "t.txt"
        path.write_text("x\n", encoding="utf-8")
        assert isinstance(from_spec(f"file:{path}"), FileAdapter)

    def test_http(self):
        adapter = from_spec("http://host:1/translate")
        assert isinstance(adapter, HttpAdapter)
        assert adapter.url == "http://host:1/translate"

    def test_mocks(self, tmp_path):
        assert from_spec("mock:identity").name == "mock:identity"
        perturb = from_spec("mock:perturb:7:0.25")
        assert perturb.seed == 7 and perturb.rate == 0.25
        scripted_path = tmp_path / "table.tsv"
        scripted_path.write_text("in\tout\n", encoding="utf-8")
        assert from_spec(f"mock:scripted:{scripted_path}").translate(["in"]) == ["out"]

    def test_unknown_spec(self):
        with pytest.raises(ValueError):
            from_spec("carrier-pigeon:coop")
