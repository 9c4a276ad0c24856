"""Human-writable s-expression syntax for diagram terms.

Grammar (words are bare symbols for length one, or parenthesized lists;
``()`` is the empty word)::

    term := (empty) | (id LAYER WORD) | (gen LAYER NAME)
          | (cup LAYER) | (cap LAYER)
          | (pants LAYER WORD WORD) | (copants LAYER WORD WORD)
          | (refine SOURCE TARGET WORD) | (coarsen SOURCE TARGET WORD)
          | (sym LAYER WORD LAYER WORD)
          | (seq term term+) | (par term term+) | (fuse LAYER term term)
"""

from __future__ import annotations

from . import terms
from .errors import MalformedInput
from .internal import Word


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    atom = ""
    for ch in text:
        if ch in "()":
            if atom:
                out.append(atom)
                atom = ""
            out.append(ch)
        elif ch.isspace():
            if atom:
                out.append(atom)
                atom = ""
        else:
            atom += ch
    if atom:
        out.append(atom)
    return out


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise MalformedInput("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise MalformedInput("unbalanced parenthesis")
        return items, pos + 1
    if tok == ")":
        raise MalformedInput("unexpected ')'")
    return tok, pos + 1


def _word(node) -> Word:
    if isinstance(node, str):
        return (node,)
    if isinstance(node, list):
        if not all(isinstance(x, str) for x in node):
            raise MalformedInput(f"not an object word: {node!r}")
        return tuple(node)
    raise MalformedInput(f"not an object word: {node!r}")


def _atom(node) -> str:
    if not isinstance(node, str):
        raise MalformedInput(f"expected a symbol, found {node!r}")
    return node


def _term(node) -> terms.Term:
    if not isinstance(node, list) or not node:
        raise MalformedInput(f"expected a term form, found {node!r}")
    head = _atom(node[0])
    args = node[1:]

    def need(n: int) -> None:
        if len(args) != n:
            raise MalformedInput(f"({head} ...) takes {n} arguments, "
                                 f"got {len(args)}")

    if head == "empty":
        need(0)
        return terms.Empty()
    if head == "id":
        need(2)
        return terms.Id(_atom(args[0]), _word(args[1]))
    if head == "gen":
        need(2)
        return terms.Gen(_atom(args[0]), _atom(args[1]))
    if head == "cup":
        need(1)
        return terms.CupT(_atom(args[0]))
    if head == "cap":
        need(1)
        return terms.CapT(_atom(args[0]))
    if head == "pants":
        need(3)
        return terms.PantsT(_atom(args[0]), _word(args[1]), _word(args[2]))
    if head == "copants":
        need(3)
        return terms.CopantsT(_atom(args[0]), _word(args[1]), _word(args[2]))
    if head == "refine":
        need(3)
        return terms.RefineT(_atom(args[0]), _atom(args[1]), _word(args[2]))
    if head == "coarsen":
        need(3)
        return terms.CoarsenT(_atom(args[0]), _atom(args[1]), _word(args[2]))
    if head == "sym":
        need(4)
        return terms.SymT(_atom(args[0]), _word(args[1]), _atom(args[2]),
                          _word(args[3]))
    if head == "seq":
        if len(args) < 2:
            raise MalformedInput("(seq ...) needs at least two terms")
        out = _term(args[0])
        for a in args[1:]:
            out = terms.Seq(out, _term(a))
        return out
    if head == "par":
        if len(args) < 2:
            raise MalformedInput("(par ...) needs at least two terms")
        out = _term(args[0])
        for a in args[1:]:
            out = terms.Par(out, _term(a))
        return out
    if head == "fuse":
        need(3)
        return terms.Fuse(_atom(args[0]), _term(args[1]), _term(args[2]))
    raise MalformedInput(f"unknown term form {head!r}")


def parse_term(text: str) -> terms.Term:
    tokens = tokenize(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise MalformedInput("trailing input after term")
    return _term(node)
