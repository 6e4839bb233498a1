"""Tokenizer and reader for the s-expression surface syntax, with source positions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


class ParseError(ValueError):
    """Malformed input. ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        self.message = message
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Sym:
    text: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple["Node", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def __iter__(self):
        return iter(self.items)


Node = Union[Sym, SList]


def read_all(text: str) -> list[Node]:
    """Parse every top-level form in ``text``. ``;`` starts a comment to end of line."""
    stack: list[tuple[list[Node], int, int]] = []
    top: list[Node] = []
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line, col = line + 1, 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append(([], line, col))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unexpected ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        node = Sym(text[i:j], line, col)
        (stack[-1][0] if stack else top).append(node)
        col += j - i
        i = j
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unclosed '('", l0, c0)
    return top


def read_one(text: str) -> Node:
    forms = read_all(text)
    if len(forms) != 1:
        if not forms:
            raise ParseError("empty input", 1, 1)
        extra = forms[1]
        raise ParseError("expected a single top-level form", extra.line, extra.column)
    return forms[0]
