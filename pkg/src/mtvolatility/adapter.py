"""Adapters for external translation systems, plus deterministic mocks.

The harness never hosts a model. Three production adapter forms exist:

  subprocess - a command reading source lines on stdin and writing exactly
               one translation line per input on stdout
  file       - pre-computed translations, line-aligned with the submitted
               items
  http       - a JSON endpoint: POST {"texts": [...]} -> {"translations": [...]}

Mock adapters (identity, scripted, perturbing) make the pipeline fully
desk-testable; the perturbing mock derives its randomness from the seed and
the input text alone, so outputs are reproducible regardless of batching or
submission order.
"""

from __future__ import annotations

import json
import random
import shlex
import subprocess
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

DEFAULT_BATCH_SIZE = 64

_PERTURB_VOCABULARY = ("alpha", "beta", "gamma", "delta", "omega")


class AdapterContractError(Exception):
    """The adapter broke the one-line-per-input contract."""

    def __init__(self, adapter_name: str, index: int, detail: str):
        super().__init__(f"{adapter_name}: contract violation at item {index}: {detail}")
        self.adapter_name = adapter_name
        self.index = index


class AdapterProcessError(Exception):
    """The subprocess adapter exited with a nonzero status."""

    def __init__(self, command: str, returncode: int, stderr: str):
        super().__init__(
            f"adapter command {command!r} exited with {returncode}; stderr: {stderr.strip()}"
        )
        self.command = command
        self.returncode = returncode
        self.stderr = stderr


class AdapterTransportError(Exception):
    """The HTTP adapter returned a non-200 response or was unreachable."""


class ScriptedLookupError(KeyError):
    """The scripted mock has no translation for an input."""

    def __init__(self, text: str):
        super().__init__(f"no scripted translation for input: {text!r}")
        self.text = text


@dataclass(frozen=True)
class TranslationRecord:
    item_id: str
    output_raw: str
    adapter_name: str
    latency_ms: int


class Adapter:
    """Base adapter: translate a list of raw texts, order-preserving."""

    name = "adapter"

    def translate(self, texts: list[str]) -> list[str]:
        raise NotImplementedError


class IdentityAdapter(Adapter):
    name = "mock:identity"

    def translate(self, texts: list[str]) -> list[str]:
        return list(texts)


class ScriptedAdapter(Adapter):
    """Fixed lookup table; errors on any input it has no line for."""

    name = "mock:scripted"

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def translate(self, texts: list[str]) -> list[str]:
        missing = [t for t in texts if t not in self.table]
        if missing:
            raise ScriptedLookupError(missing[0])
        return [self.table[t] for t in texts]


class PerturbingAdapter(Adapter):
    """Seeded pseudo-random token drops/substitutions at a fixed rate.

    The per-sentence RNG is seeded from (seed, text), so a given input
    always produces the same output across runs, batches, and orderings.
    """

    def __init__(self, seed: int, rate: float):
        if not 0 <= rate <= 1:
            raise ValueError(f"rate must be in [0, 1], got {rate}")
        self.seed = seed
        self.rate = rate
        self.name = f"mock:perturb:{seed}:{rate}"

    def _perturb(self, text: str) -> str:
        rng = random.Random(f"{self.seed}:{text}")
        out = []
        for token in text.split():
            if rng.random() < self.rate:
                if rng.random() < 0.5:
                    continue  # drop
                out.append(rng.choice(_PERTURB_VOCABULARY))
            else:
                out.append(token)
        return " ".join(out)

    def translate(self, texts: list[str]) -> list[str]:
        return [self._perturb(t) for t in texts]


class SubprocessAdapter(Adapter):
    """Batches items through a line-oriented command."""

    def __init__(self, command: str, batch_size: int = DEFAULT_BATCH_SIZE):
        self.command = command
        self.batch_size = batch_size
        self.name = f"cmd:{command}"

    def translate(self, texts: list[str]) -> list[str]:
        outputs: list[str] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            payload = "".join(line + "\n" for line in batch)
            proc = subprocess.run(
                shlex.split(self.command),
                input=payload.encode("utf-8"),
                capture_output=True,
            )
            if proc.returncode != 0:
                raise AdapterProcessError(
                    self.command, proc.returncode, proc.stderr.decode("utf-8", "replace")
                )
            lines = proc.stdout.decode("utf-8").splitlines()
            if len(lines) != len(batch):
                raise AdapterContractError(
                    self.name,
                    start + min(len(lines), len(batch)),
                    f"sent {len(batch)} lines, received {len(lines)}",
                )
            outputs.extend(lines)
        return outputs


class FileAdapter(Adapter):
    """Serves pre-computed translations line-aligned with submitted items."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.lines = self.path.read_text(encoding="utf-8").splitlines()
        self.cursor = 0
        self.name = f"file:{self.path.name}"

    def translate(self, texts: list[str]) -> list[str]:
        end = self.cursor + len(texts)
        if end > len(self.lines):
            raise AdapterContractError(
                self.name,
                len(self.lines) - self.cursor,
                f"file has {len(self.lines)} lines, {end} needed",
            )
        batch = self.lines[self.cursor : end]
        self.cursor = end
        return batch


class HttpAdapter(Adapter):
    """POSTs {"texts": [...]} and expects {"translations": [...]} back."""

    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url
        self.timeout = timeout
        self.name = f"http:{url}"

    def translate(self, texts: list[str]) -> list[str]:
        body = json.dumps({"texts": texts}).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                if response.status != 200:
                    raise AdapterTransportError(
                        f"{self.url} returned HTTP {response.status}"
                    )
                payload = json.loads(response.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            raise AdapterTransportError(f"{self.url} returned HTTP {exc.code}") from exc
        except urllib.error.URLError as exc:
            raise AdapterTransportError(f"{self.url} unreachable: {exc.reason}") from exc
        translations = payload.get("translations")
        if not isinstance(translations, list) or len(translations) != len(texts):
            got = len(translations) if isinstance(translations, list) else "none"
            raise AdapterContractError(
                self.name, 0, f"sent {len(texts)} texts, received {got} translations"
            )
        return translations


def mock_identity() -> Adapter:
    return IdentityAdapter()


def mock_scripted(table: dict[str, str]) -> Adapter:
    return ScriptedAdapter(table)


def mock_perturbing(seed: int, rate: float) -> Adapter:
    return PerturbingAdapter(seed, rate)


def from_spec(spec: str, batch_size: int = DEFAULT_BATCH_SIZE) -> Adapter:
    """Build an adapter from a CLI spec string.

    Production forms: ``cmd:<command>``, ``file:<path>``, ``http:<url>``.
    Mock forms for desk testing: ``mock:identity``,
    ``mock:perturb:<seed>:<rate>``, ``mock:scripted:<tsv path>`` (tab-separated
    input/output lines).
    """
    kind, _, rest = spec.partition(":")
    if kind == "cmd" and rest:
        return SubprocessAdapter(rest, batch_size=batch_size)
    if kind == "file" and rest:
        return FileAdapter(rest)
    if kind in ("http", "https") and rest:
        # Accept both a bare URL (http://host/x) and a prefixed one
        # (http:https://host/x).
        return HttpAdapter(f"{kind}:{rest}" if rest.startswith("//") else rest)
    if kind == "mock":
        mock_kind, _, args = rest.partition(":")
        if mock_kind == "identity":
            return IdentityAdapter()
        if mock_kind == "perturb":
            seed, _, rate = args.partition(":")
            return PerturbingAdapter(int(seed), float(rate))
        if mock_kind == "scripted":
            table = {}
            for line in Path(args).read_text(encoding="utf-8").splitlines():
                if line.strip():
                    source, _, output = line.partition("\t")
                    table[source] = output
            return ScriptedAdapter(table)
    raise ValueError(f"unrecognized adapter spec: {spec!r}")


def translate_batch(
    items: list[tuple[str, str]], adapter: Adapter
) -> list[TranslationRecord]:
    """Translate (id, source_raw) items, one record per item, order preserved.

    Latency is wall time for the adapter call, attributed to each record of
    the call; mock and file adapters report 0 so that reruns are
    byte-identical.
    """
    if not items:
        return []
    texts = [text for _, text in items]
    instant = isinstance(adapter, (IdentityAdapter, ScriptedAdapter, PerturbingAdapter, FileAdapter))
    started = time.perf_counter()
    outputs = adapter.translate(texts)
    elapsed_ms = 0 if instant else int((time.perf_counter() - started) * 1000)
    if len(outputs) != len(items):
        raise AdapterContractError(
            adapter.name, min(len(outputs), len(items)), "output/input count mismatch"
        )
    return [
        TranslationRecord(
            item_id=item_id,
            output_raw=output,
            adapter_name=adapter.name,
            latency_ms=elapsed_ms,
        )
        for (item_id, _), output in zip(items, outputs)
    ]
