"""Line-based text formats for matrices, complexes, codes, graphs and twists.

Every format is whitespace separated, 0-indexed, and treats ``#`` as the start
of a comment.  Lines beginning with ``#!`` are comments too, but they can carry
an embedded payload (see :func:`embedded_blocks`).

Matrix blocks::

    f2 R C          int R C
    r c             r c v

Complexes hold ``k`` matrix blocks, the boundary out of degree 1 first::

    complex2 k      (or: complexz k; with k == 0 an optional dimension follows)
"""

from __future__ import annotations

from typing import Iterator

from .core import BinMatrix, ChainComplex2, ChainComplexZ, IntMatrix
from .errors import ChainliftError, FormatError

_MATRIX_HEADERS = ("f2", "int")


def _lines(text: str) -> list[tuple[int, list[str]]]:
    """Tokenized non-empty lines paired with their 1-based line numbers."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((lineno, body.split()))
    return out


def _int(tok: str, lineno: int, what: str = "integer") -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected {what}, got {tok!r}", lineno) from None


def _count(tok: str, lineno: int) -> int:
    n = _int(tok, lineno, "count")
    if n < 0:
        raise FormatError(f"negative count {n}", lineno)
    return n


def _expect_header(toks: list[str], lineno: int, names, arity: int) -> None:
    if toks[0] not in names:
        raise FormatError(f"expected header {'/'.join(names)}, got {toks[0]!r}", lineno)
    if len(toks) != arity:
        raise FormatError(f"header {toks[0]!r} takes {arity - 1} fields", lineno)


# ---------------------------------------------------------------- matrices

def _parse_matrix_block(lines, start: int):
    """Parse one matrix block starting at ``lines[start]``; return (matrix, next index)."""
    lineno, toks = lines[start]
    _expect_header(toks, lineno, _MATRIX_HEADERS, 3)
    kind = toks[0]
    rows, cols = _count(toks[1], lineno), _count(toks[2], lineno)
    width = 2 if kind == "f2" else 3
    seen = set()
    ents = []
    i = start + 1
    while i < len(lines) and lines[i][1][0] not in _MATRIX_HEADERS:
        ln, t = lines[i]
        if len(t) != width:
            raise FormatError(f"{kind} entry needs {width} fields, got {len(t)}", ln)
        r, c = _int(t[0], ln), _int(t[1], ln)
        if not (0 <= r < rows and 0 <= c < cols):
            raise FormatError(f"position ({r}, {c}) outside {rows}x{cols}", ln)
        if (r, c) in seen:
            raise FormatError(f"duplicate position ({r}, {c})", ln)
        seen.add((r, c))
        if kind == "f2":
            ents.append((r, c))
        else:
            v = _int(t[2], ln)
            if v == 0:
                raise FormatError(f"explicit zero at ({r}, {c})", ln)
            ents.append((r, c, v))
        i += 1
    mat = BinMatrix(rows, cols, tuple(ents)) if kind == "f2" else IntMatrix(rows, cols, tuple(ents))
    return mat, i


def parse_matrix(text: str):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty matrix file", 1)
    mat, i = _parse_matrix_block(lines, 0)
    if i != len(lines):
        raise FormatError("trailing content after matrix", lines[i][0])
    return mat


def format_matrix(m) -> str:
    if isinstance(m, BinMatrix):
        body = [f"f2 {m.rows} {m.cols}"] + [f"{r} {c}" for r, c in m.entries]
    else:
        body = [f"int {m.rows} {m.cols}"] + [f"{r} {c} {v}" for r, c, v in m.entries]
    return "\n".join(body) + "\n"


# ---------------------------------------------------------------- complexes

def parse_complex(text: str):
    lines = _lines(text)
    if not lines:
        raise FormatError("empty complex file", 1)
    lineno, toks = lines[0]
    if toks[0] not in ("complex2", "complexz"):
        raise FormatError(f"expected complex2/complexz header, got {toks[0]!r}", lineno)
    if len(toks) not in (2, 3):
        raise FormatError("complex header is 'complex2 k' or 'complex2 0 dim'", lineno)
    k = _count(toks[1], lineno)
    want = "f2" if toks[0] == "complex2" else "int"
    cls = ChainComplex2 if toks[0] == "complex2" else ChainComplexZ
    if k == 0:
        dim = _count(toks[2], lineno) if len(toks) == 3 else 0
        if len(lines) > 1:
            raise FormatError("complex with no boundaries has no blocks", lines[1][0])
        return cls((dim,), ())
    if len(toks) == 3:
        raise FormatError("dimension token only allowed when k == 0", lineno)
    mats = []
    i = 1
    for _ in range(k):
        if i >= len(lines):
            raise FormatError(f"expected {k} matrix blocks, found {len(mats)}", lines[-1][0])
        if lines[i][1][0] != want:
            raise FormatError(f"expected {want} block in {toks[0]}", lines[i][0])
        head = lines[i][0]
        m, i = _parse_matrix_block(lines, i)
        if mats and mats[-1].cols != m.rows:
            raise FormatError(
                f"block rows {m.rows} do not match previous block cols {mats[-1].cols}", head
            )
        mats.append(m)
    if i != len(lines):
        raise FormatError("trailing content after complex", lines[i][0])
    return cls.from_boundaries(mats)


def format_complex(c, comments: list[str] | None = None) -> str:
    head = "complex2" if isinstance(c, ChainComplex2) else "complexz"
    out = [f"# {line}" for line in comments or []]
    if not c.boundaries:
        out.append(f"{head} 0 {c.dims[0] if c.dims else 0}")
        return "\n".join(out) + "\n"
    out.append(f"{head} {len(c.boundaries)}")
    text = "\n".join(out) + "\n"
    return text + "".join(format_matrix(b) for b in c.boundaries)


def embed(text: str, tag: str) -> str:
    """Turn ``text`` into ``#!`` comment lines labelled ``tag``."""
    body = [f"#! begin {tag}"] + [f"#! {line}" for line in text.splitlines()] + [f"#! end {tag}"]
    return "\n".join(body) + "\n"


def embedded_blocks(text: str) -> dict[str, str]:
    """Recover the payloads written by :func:`embed`, keyed by tag."""
    blocks: dict[str, str] = {}
    current = None
    buf: list[str] = []
    for raw in text.splitlines():
        if not raw.startswith("#!"):
            continue
        payload = raw[3:] if raw.startswith("#! ") else raw[2:]
        parts = payload.split()
        if len(parts) == 2 and parts[0] == "begin":
            current, buf = parts[1], []
        elif len(parts) == 2 and parts[0] == "end" and parts[1] == current:
            blocks[current] = "\n".join(buf) + "\n"
            current = None
        elif current is not None:
            buf.append(payload)
    return blocks


# ---------------------------------------------------------------- codes

def parse_code(text: str):
    from .codes import CssCode

    lines = _lines(text)
    if not lines:
        raise FormatError("empty code file", 1)
    lineno, toks = lines[0]
    _expect_header(toks, lineno, ("css",), 2)
    q = _count(toks[1], lineno)
    xs, zs = [], []
    for ln, t in lines[1:]:
        if t[0] not in ("X", "Z"):
            raise FormatError(f"expected X or Z line, got {t[0]!r}", ln)
        supp = [_int(tok, ln, "qubit index") for tok in t[1:]]
        for i in supp:
            if not 0 <= i < q:
                raise FormatError(f"qubit {i} outside 0..{q - 1}", ln)
        if len(set(supp)) != len(supp):
            raise FormatError("repeated qubit in stabilizer", ln)
        (xs if t[0] == "X" else zs).append(supp)
    try:
        return CssCode(q, xs, zs)
    except ChainliftError as exc:
        raise FormatError(str(exc)) from exc


def format_code(code) -> str:
    out = [f"css {code.q}"]
    out += ["X " + " ".join(map(str, s)) if s else "X" for s in code.x_stabs]
    out += ["Z " + " ".join(map(str, s)) if s else "Z" for s in code.z_stabs]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- graphs

def parse_graph(text: str):
    from .decongestion import Multigraph

    lines = _lines(text)
    if not lines:
        raise FormatError("empty graph file", 1)
    lineno, toks = lines[0]
    _expect_header(toks, lineno, ("graph",), 3)
    v, e = _count(toks[1], lineno), _count(toks[2], lineno)
    edges = []
    for ln, t in lines[1:]:
        if len(t) not in (2, 3):
            raise FormatError("edge line is 'u v [w]'", ln)
        a, b = _int(t[0], ln), _int(t[1], ln)
        for x in (a, b):
            if not 0 <= x < v:
                raise FormatError(f"vertex {x} outside 0..{v - 1}", ln)
        if len(t) == 3:
            try:
                w = float(t[2])
            except ValueError:
                raise FormatError(f"bad weight {t[2]!r}", ln) from None
            if w < 0:
                raise FormatError(f"negative weight {w}", ln)
            w = int(w) if w == int(w) else w
            edges.append((a, b, w))
        else:
            edges.append((a, b))
    if len(edges) != e:
        raise FormatError(f"header declares {e} edges, found {len(edges)}", lineno)
    return Multigraph(v, edges)


def format_graph(g) -> str:
    out = [f"graph {g.v} {len(g.edges)}"]
    for u, w in g.edges:
        out.append(f"{u} {w}")
    if g.weights is not None:
        out = [out[0]] + [f"{u} {w} {x}" for (u, w), x in zip(g.edges, g.weights)]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- twists

def parse_twists(text: str) -> dict:
    """Twist file: lines ``b1 a0 shift`` keyed by (base 1-cell, base 0-cell)."""
    out = {}
    for ln, t in _lines(text):
        if len(t) != 3:
            raise FormatError("twist line is 'b1 a0 shift'", ln)
        key = (_int(t[0], ln), _int(t[1], ln))
        if key in out:
            raise FormatError(f"duplicate twist for {key}", ln)
        out[key] = _int(t[2], ln)
    return out


def format_twists(twists: dict) -> str:
    return "".join(f"{b} {a} {s}\n" for (b, a), s in sorted(twists.items()))


def iter_tokens(text: str) -> Iterator[tuple[int, list[str]]]:
    yield from _lines(text)
