"""Reader for ``.hjm`` model files.

    # comment
    model frw_lambda {
        coords: N, a;
        consts: Lambda;
        lagrangian: "-3*a*da^2/N - N*Lambda*a^3";
    }

Identifier lists may be separated by commas or whitespace.  ``consts`` is
optional; ``coords`` and ``lagrangian`` are required.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from hjq.canonical import ModelDefinition, make_model

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CLAUSES = ("coords", "consts", "lagrangian")


class DslError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ModelSource:
    """A model as written, before any symbol resolution."""

    name: str
    coordinates: tuple[str, ...]
    constants: tuple[str, ...]
    lagrangian: str

    def build(self) -> ModelDefinition:
        return make_model(self.name, self.coordinates, self.constants, self.lagrangian)


def _strip_comments(text: str) -> str:
    out = []
    for line in text.splitlines():
        in_str = False
        for i, ch in enumerate(line):
            if ch == '"':
                in_str = not in_str
            elif ch == "#" and not in_str:
                line = line[:i]
                break
        out.append(line)
    return "\n".join(out)


class _Reader:
    def __init__(self, text: str):
        self.text = _strip_comments(text)
        self.pos = 0

    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message: str, pos: int | None = None):
        raise DslError(message, *self.where(pos))

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def ident(self, what: str) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if m is None:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def punct(self, ch: str):
        self.skip_ws()
        if not self.text.startswith(ch, self.pos):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of file"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def string(self) -> str:
        self.punct('"')
        end = self.text.find('"', self.pos)
        if end < 0 or "\n" in self.text[self.pos:end]:
            self.fail("unterminated string")
        value = self.text[self.pos:end]
        self.pos = end + 1
        return value

    def ident_list(self) -> list[str]:
        names = []
        while self.peek() not in (";", ""):
            names.append(self.ident("identifier"))
            if self.peek() == ",":
                self.pos += 1
        return names


def parse_model(text: str) -> ModelSource:
    r = _Reader(text)
    kw = r.ident("'model'")
    if kw != "model":
        r.fail(f"expected 'model', found {kw!r}", r.pos - len(kw))
    name = r.ident("model name")
    r.punct("{")
    seen: dict = {}
    while r.peek() != "}":
        if r.peek() == "":
            r.fail("missing '}'")
        start = r.pos
        key = r.ident("clause name")
        if key not in _CLAUSES:
            r.fail(f"unknown clause {key!r}", start)
        if key in seen:
            r.fail(f"duplicate clause {key!r}", start)
        r.punct(":")
        seen[key] = r.string() if key == "lagrangian" else r.ident_list()
        r.punct(";")
    r.punct("}")
    if not r.at_end():
        r.fail("trailing text after model")
    for key in ("coords", "lagrangian"):
        if key not in seen:
            r.fail(f"missing clause {key!r}")
    return ModelSource(name, tuple(seen["coords"]), tuple(seen.get("consts", ())), seen["lagrangian"])


def load_model_file(path) -> ModelSource:
    return parse_model(Path(path).read_text(encoding="utf-8"))


def to_dsl(src: ModelSource) -> str:
    lines = [f"model {src.name} {{", f"    coords: {', '.join(src.coordinates)};"]
    if src.constants:
        lines.append(f"    consts: {', '.join(src.constants)};")
    lines += [f'    lagrangian: "{src.lagrangian}";', "}"]
    return "\n".join(lines) + "\n"
