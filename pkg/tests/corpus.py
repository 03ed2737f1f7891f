"""The golden ontologies and automata with their expected verdicts."""

import re
from dataclasses import dataclass
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "corpus"


@dataclass
class Entry:
    path: Path
    expect: str
    expect_una: str | None
    logic: str

    @property
    def name(self):
        return self.path.stem

    def text(self):
        return self.path.read_text()


def _header(text, key):
    m = re.search(rf"^; {key}: (.+)$", text, re.M)
    return m.group(1).strip() if m else None


def ontologies():
    out = []
    for p in sorted((ROOT / "ontologies").glob("*.onto")):
        t = p.read_text()
        out.append(Entry(p, _header(t, "expect"), _header(t, "expect-una"), _header(t, "logic") or "alco"))
    return out


def automata():
    return [Entry(p, _header(p.read_text(), "expect"), None, "") for p in sorted((ROOT / "automata").glob("*.tgca"))]


def consistent_ontologies():
    return [e for e in ontologies() if e.expect == "consistent"]
