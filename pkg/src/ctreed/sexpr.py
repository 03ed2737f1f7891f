"""Minimal S-expression reader shared by all text formats.

Comments start with ``;`` and run to the end of the line.
"""

from .errors import ParseError


class Sym(str):
    """An atom token that remembers where it was read."""

    line = 0
    col = 0


class SList(list):
    line = 0
    col = 0


def _tokens(text):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
        elif ch.isspace():
            i += 1
            col += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, line, col
            i += 1
            col += 1
        else:
            start, scol = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
                col += 1
            yield text[start:i], line, scol


def read_all(text):
    """Parse every top-level form of ``text`` into nested SList/Sym values."""
    stack = [SList()]
    for tok, line, col in _tokens(text):
        if tok == "(":
            lst = SList()
            lst.line, lst.col = line, col
            stack.append(lst)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            sym = Sym(tok)
            sym.line, sym.col = line, col
            stack[-1].append(sym)
    if len(stack) != 1:
        opened = stack[-1]
        raise ParseError("unclosed '('", opened.line, opened.col)
    return list(stack[0])


def read_one(text):
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}", 1, 1)
    return forms[0]


def where(form):
    return getattr(form, "line", None), getattr(form, "col", None)


def fail(form, message):
    line, col = where(form)
    raise ParseError(message, line, col)
