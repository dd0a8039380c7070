"""JSON algebra documents: positioned parsing, checks and serialization.

Format::

    {"format": "dgformal-algebra/1", "domain": "QQ" | "QQ[t]" | "QQ(t)",
     "basis": [{"name": ..., "degree": ...}, ...], "unit": name,
     "mult": [[left, right, target, "coeff"], ...],
     "diff": [[source, target, "coeff"], ...],
     "metadata": {...}}

Products with the unit are implicit; omitted products and differentials are 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from json.decoder import scanstring
from pathlib import Path

from .dga import DGAlgebra
from .errors import DGFormalError, InputError
from .scalars import domain_from_tag

FORMAT = "dgformal-algebra/1"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.message}"

    def to_json(self) -> dict:
        return {"line": self.line, "column": self.column, "message": self.message}


class DocumentError(InputError):
    def __init__(self, diagnostics, source: str = ""):
        self.diagnostics = list(diagnostics)
        head = f"{source}: " if source else ""
        super().__init__(head + "; ".join(str(d) for d in self.diagnostics))


# -- a JSON reader that remembers where every value starts ---------------------


class _Node:
    __slots__ = ("value", "pos")

    def __init__(self, value, pos):
        self.value = value
        self.pos = pos


class _JSONSyntax(Exception):
    def __init__(self, pos, msg):
        self.pos, self.msg = pos, msg


_WS = " \t\n\r"
_NUMBER_CHARS = "+-0123456789.eE"


class _Reader:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def ws(self):
        s, i = self.s, self.i
        while i < len(s) and s[i] in _WS:
            i += 1
        self.i = i

    def expect(self, ch):
        self.ws()
        if self.i >= len(self.s) or self.s[self.i] != ch:
            raise _JSONSyntax(self.i, f"expected {ch!r}")
        self.i += 1

    def value(self) -> _Node:
        self.ws()
        s, i = self.s, self.i
        if i >= len(s):
            raise _JSONSyntax(i, "unexpected end of input")
        ch = s[i]
        if ch == "{":
            return self.obj()
        if ch == "[":
            return self.arr()
        if ch == '"':
            try:
                text, end = scanstring(s, i + 1)
            except json.JSONDecodeError as exc:
                raise _JSONSyntax(exc.pos, exc.msg) from None
            self.i = end
            return _Node(text, i)
        for lit, val in (("true", True), ("false", False), ("null", None)):
            if s.startswith(lit, i):
                self.i = i + len(lit)
                return _Node(val, i)
        j = i
        while j < len(s) and s[j] in _NUMBER_CHARS:
            j += 1
        if j == i:
            raise _JSONSyntax(i, f"unexpected character {ch!r}")
        try:
            num = json.loads(s[i:j])
        except json.JSONDecodeError:
            raise _JSONSyntax(i, f"malformed number {s[i:j]!r}") from None
        self.i = j
        return _Node(num, i)

    def obj(self) -> _Node:
        start = self.i
        self.i += 1
        out = {}
        self.ws()
        if self.s.startswith("}", self.i):
            self.i += 1
            return _Node(out, start)
        while True:
            self.ws()
            key = self.value()
            if not isinstance(key.value, str):
                raise _JSONSyntax(key.pos, "object keys must be strings")
            self.expect(":")
            out[key.value] = (key, self.value())
            self.ws()
            if self.s.startswith(",", self.i):
                self.i += 1
                continue
            self.expect("}")
            return _Node(out, start)

    def arr(self) -> _Node:
        start = self.i
        self.i += 1
        out = []
        self.ws()
        if self.s.startswith("]", self.i):
            self.i += 1
            return _Node(out, start)
        while True:
            out.append(self.value())
            self.ws()
            if self.s.startswith(",", self.i):
                self.i += 1
                continue
            self.expect("]")
            return _Node(out, start)


def _plain(node: _Node):
    v = node.value
    if isinstance(v, dict):
        return {k: _plain(val) for k, (_, val) in v.items()}
    if isinstance(v, list):
        return [_plain(x) for x in v]
    return v


# -- documents ------------------------------------------------------------------


@dataclass
class AlgebraDocument:
    domain: str
    basis: list                 # [(name, degree)]
    unit: str
    mult: list                  # [(left, right, target, coeff string)]
    diff: list                  # [(source, target, coeff string)]
    metadata: dict = field(default_factory=dict)
    format: str = FORMAT

    def to_algebra(self) -> DGAlgebra:
        dom = domain_from_tag(self.domain)
        mult: dict = {}
        for l, r, t, c in self.mult:
            vec = mult.setdefault((l, r), {})
            vec[t] = vec.get(t, dom.zero) + dom.parse(c)
        diff: dict = {}
        for s, t, c in self.diff:
            vec = diff.setdefault(s, {})
            vec[t] = vec.get(t, dom.zero) + dom.parse(c)
        label = str(self.metadata.get("name", ""))
        return DGAlgebra.build([n for n, _ in self.basis], [d for _, d in self.basis], self.unit,
                               mult, diff, dom, label=label)

    def to_json(self) -> dict:
        out = {"format": self.format, "domain": self.domain,
               "basis": [{"name": n, "degree": d} for n, d in self.basis],
               "unit": self.unit,
               "mult": [list(e) for e in self.mult],
               "diff": [list(e) for e in self.diff]}
        if self.metadata:
            out["metadata"] = self.metadata
        return out


@dataclass
class ParseResult:
    document: AlgebraDocument | None
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.document is not None and not self.diagnostics


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def parse(text) -> ParseResult:
    """Parse and check a document; never raises on bad input."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            return ParseResult(None, [Diagnostic(1, exc.start + 1, "input is not valid UTF-8")])
    diags: list = []

    def diag(pos, msg):
        line, col = _line_col(text, pos)
        diags.append(Diagnostic(line, col, msg))

    reader = _Reader(text)
    try:
        root = reader.value()
        reader.ws()
        if reader.i != len(text):
            raise _JSONSyntax(reader.i, "trailing characters after the document")
    except _JSONSyntax as exc:
        diag(exc.pos, f"JSON syntax error: {exc.msg}")
        return ParseResult(None, diags)
    except RecursionError:
        diag(0, "document nests too deeply")
        return ParseResult(None, diags)
    if not isinstance(root.value, dict):
        diag(root.pos, "document must be a JSON object")
        return ParseResult(None, diags)
    fields = root.value

    def get(key, kind, required=True):
        if key not in fields:
            if required:
                diag(root.pos, f"missing field {key!r}")
            return None
        node = fields[key][1]
        if not isinstance(node.value, kind) or isinstance(node.value, bool) and kind is not bool:
            diag(node.pos, f"field {key!r} has the wrong type")
            return None
        return node

    for key, (knode, _) in fields.items():
        if key not in ("format", "domain", "basis", "unit", "mult", "diff", "metadata"):
            diag(knode.pos, f"unknown field {key!r}")
    fmt = get("format", str, required=False)
    if fmt is not None and fmt.value != FORMAT:
        diag(fmt.pos, f"unsupported format {fmt.value!r} (expected {FORMAT!r})")
    dnode = get("domain", str)
    dom = None
    if dnode is not None:
        try:
            dom = domain_from_tag(dnode.value)
        except DGFormalError as exc:
            diag(dnode.pos, str(exc))
    basis_node = get("basis", list)
    names: dict = {}
    basis = []
    if basis_node is not None:
        for item in basis_node.value:
            if not isinstance(item.value, dict):
                diag(item.pos, "basis entries must be objects {name, degree}")
                continue
            f = item.value
            nm = f.get("name", (None, None))[1]
            dg = f.get("degree", (None, None))[1]
            if nm is None or not isinstance(nm.value, str) or not nm.value:
                diag(item.pos, "basis entry needs a nonempty string 'name'")
                continue
            if dg is None or not isinstance(dg.value, int) or isinstance(dg.value, bool):
                diag(item.pos, f"basis entry {nm.value!r} needs an integer 'degree'")
                continue
            if dg.value < 0:
                diag(dg.pos, f"degree of {nm.value!r} must be nonnegative")
            if nm.value in names:
                l1, c1 = _line_col(text, names[nm.value][1])
                l2, c2 = _line_col(text, nm.pos)
                diag(nm.pos, f"duplicate basis name {nm.value!r}: declared at {l1}:{c1} and again at {l2}:{c2}")
                continue
            names[nm.value] = (dg.value, nm.pos)
            basis.append((nm.value, dg.value))
        if not basis:
            diag(basis_node.pos, "basis must not be empty")
    unode = get("unit", str)
    if unode is not None and names and unode.value not in names:
        diag(unode.pos, f"unit {unode.value!r} is not a basis element")
    elif unode is not None and names and names[unode.value][0] != 0:
        diag(unode.pos, "the unit must have degree 0")

    def ref(node):
        if not isinstance(node.value, str):
            diag(node.pos, "basis references must be strings")
            return None
        if node.value not in names:
            diag(node.pos, f"unknown basis element {node.value!r}")
            return None
        return node.value

    def coeff(node):
        if isinstance(node.value, bool) or not isinstance(node.value, (str, int)):
            diag(node.pos, "coefficients must be strings (or integers)")
            return None
        text_c = str(node.value)
        if dom is None:
            return text_c
        try:
            dom.parse(text_c)
        except DGFormalError as exc:
            msg = str(exc)
            diag(node.pos, f"malformed coefficient {text_c!r}: {msg.split(': ', 1)[-1]}")
            return None
        return text_c

    mult = []
    seen_mult = {}
    mnode = get("mult", list, required=False)
    for row in (mnode.value if mnode is not None else []):
        if not isinstance(row.value, list) or len(row.value) != 4:
            diag(row.pos, "mult entries are [left, right, target, coefficient]")
            continue
        l, r, t = (ref(x) for x in row.value[:3])
        c = coeff(row.value[3])
        if None in (l, r, t, c):
            continue
        if names[t][0] != names[l][0] + names[r][0]:
            diag(row.pos, f"degree violation: {l}*{r} has degree {names[l][0] + names[r][0]}, "
                          f"target {t} has degree {names[t][0]}")
            continue
        if unode is not None and unode.value in (l, r) and dom is not None:
            other = r if l == unode.value else l
            if t != other or dom.parse(c) != dom.one:
                diag(row.pos, f"product with the unit must be the identity ({l}*{r})")
                continue
            continue
        key = (l, r, t)
        if key in seen_mult:
            diag(row.pos, f"repeated product entry {l}*{r} -> {t}")
            continue
        seen_mult[key] = row.pos
        mult.append((l, r, t, c))
    diff = []
    seen_diff = {}
    dfnode = get("diff", list, required=False)
    for row in (dfnode.value if dfnode is not None else []):
        if not isinstance(row.value, list) or len(row.value) != 3:
            diag(row.pos, "diff entries are [source, target, coefficient]")
            continue
        s, t = (ref(x) for x in row.value[:2])
        c = coeff(row.value[2])
        if None in (s, t, c):
            continue
        if names[t][0] != names[s][0] + 1:
            diag(row.pos, f"degree violation: d({s}) must have degree {names[s][0] + 1}, "
                          f"target {t} has degree {names[t][0]}")
            continue
        if (s, t) in seen_diff:
            diag(row.pos, f"repeated differential entry {s} -> {t}")
            continue
        seen_diff[(s, t)] = row.pos
        diff.append((s, t, c))
    meta = get("metadata", dict, required=False)
    if diags or dnode is None or unode is None or basis_node is None:
        return ParseResult(None, diags)
    doc = AlgebraDocument(dnode.value, basis, unode.value, mult, diff,
                          _plain(meta) if meta is not None else {},
                          fmt.value if fmt is not None else FORMAT)
    return ParseResult(doc, [])


def from_algebra(A: DGAlgebra, metadata: dict | None = None) -> AlgebraDocument:
    dom = A.domain
    mult = []
    for (i, j) in sorted(A.mult):
        if A.unit in (i, j):
            other = j if i == A.unit else i
            if A.mult[(i, j)] == {other: dom.one}:
                continue
        for k, c in sorted(A.mult[(i, j)].items()):
            mult.append((A.names[i], A.names[j], A.names[k], dom.format(c)))
    diff = [(A.names[i], A.names[k], dom.format(c))
            for i in sorted(A.diff) for k, c in sorted(A.diff[i].items())]
    meta = dict(metadata or {})
    if A.label and "name" not in meta:
        meta["name"] = A.label
    return AlgebraDocument(dom.tag, list(zip(A.names, A.degrees)), A.names[A.unit], mult, diff, meta)


def serialize(A, metadata: dict | None = None) -> str:
    doc = A if isinstance(A, AlgebraDocument) else from_algebra(A, metadata)
    data = doc.to_json()
    # one table row per line keeps fixture diffs readable
    lines = ["{"]
    keys = list(data)
    for n, key in enumerate(keys):
        comma = "," if n < len(keys) - 1 else ""
        val = data[key]
        if key in ("basis", "mult", "diff") and val:
            lines.append(f"  {json.dumps(key)}: [")
            for m, row in enumerate(val):
                sep = "," if m < len(val) - 1 else ""
                lines.append(f"    {json.dumps(row, ensure_ascii=False)}{sep}")
            lines.append(f"  ]{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val, ensure_ascii=False, sort_keys=True)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load(source) -> DGAlgebra:
    """Algebra from a path, a fixture name or document text; raises DocumentError."""
    text, name = read_source(source)
    result = parse(text)
    if not result.ok:
        raise DocumentError(result.diagnostics, name)
    return result.document.to_algebra()


def fixture_names() -> list:
    base = resources.files("dgformal") / "fixtures"
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def fixture_text(name: str) -> str:
    stem = name[:-5] if name.endswith(".json") else name
    path = resources.files("dgformal") / "fixtures" / f"{stem}.json"
    if not path.is_file():
        raise InputError(f"no such file or fixture: {name!r}")
    return path.read_text(encoding="utf-8")


def read_source(source) -> tuple[str, str]:
    """(text, display name) for a file path or a shipped fixture name."""
    p = Path(source)
    if p.is_file():
        try:
            return p.read_bytes().decode("utf-8"), str(p)
        except UnicodeDecodeError:
            raise InputError(f"{p}: input is not valid UTF-8") from None
    return fixture_text(str(source)), str(source)
