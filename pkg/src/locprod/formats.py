"""Line-oriented text formats for spaces, subsets, 2-space models and 2-maps.

Space files::

    # comments run to end of line
    space X
    points 2
    rel 0 1          # declares leq(0, 1): 0 lies in the closure of 1
    space Y
    points 2
    subset C         # pairs over the first two spaces of the file
    pair 0 1
    pair 1 1

Model files wrap space blocks in ``base``/``uspace``/``vspace`` ... ``end``::

    2space
    base
      space W
      points 2
      rel 0 1
    end
    chart
      domain 0 1
      uspace
        space U
        points 1
      end
      vspace
        space V
        points 2
        rel 0 1
      end
      map 0 0 0      # base point, u coordinate, v coordinate
      map 1 0 1
    end

2-map files name their source and target model files (relative to the
2-map file) and list ``map <w> <w'>`` lines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .product import SubsetC, product
from .space import FiniteSpace, InputError, PointSet
from .twospace import ChartRec, TwoMapRec, TwoSpaceModel


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None) -> None:
        where = f"{source}:" if source else ""
        where += f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass
class SpaceDocument:
    spaces: list[tuple[str, FiniteSpace]] = field(default_factory=list)
    subsets: list[tuple[str, list[tuple[int, int]]]] = field(default_factory=list)

    def subset(self, name: str | None = None) -> SubsetC:
        """Resolve a subset against the first two spaces of the document."""
        if len(self.spaces) < 2:
            raise ParseError("a subset needs two spaces X and Y declared before it")
        if not self.subsets:
            raise ParseError("no subset declared")
        if name is None:
            _, pairs = self.subsets[0]
        else:
            found = [p for n, p in self.subsets if n == name]
            if not found:
                raise ParseError(f"no subset named {name!r}")
            pairs = found[0]
        return SubsetC.of(product(self.spaces[0][1], self.spaces[1][1]), pairs)


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if words:
            out.append((no, words))
    return out


def _ints(words: list[str], count: int, line: int) -> list[int]:
    if len(words) - 1 != count:
        raise ParseError(f"'{words[0]}' takes {count} integer argument(s)", line)
    try:
        vals = [int(w) for w in words[1:]]
    except ValueError:
        raise ParseError(f"non-integer argument to '{words[0]}'", line) from None
    if any(v < 0 for v in vals):
        raise ParseError(f"negative argument to '{words[0]}'", line)
    return vals


class _SpaceBuilder:
    def __init__(self, name: str, line: int) -> None:
        self.name, self.line = name, line
        self.n: int | None = None
        self.rels: list[tuple[int, int, int]] = []

    def feed(self, words: list[str], line: int) -> bool:
        if words[0] == "points":
            if self.n is not None:
                raise ParseError("duplicate 'points'", line)
            (self.n,) = _ints(words, 1, line)
        elif words[0] == "rel":
            if self.n is None:
                raise ParseError("'rel' before 'points'", line)
            i, j = _ints(words, 2, line)
            if i >= self.n or j >= self.n:
                raise ParseError(f"point index out of range for {self.n} points", line)
            self.rels.append((i, j, line))
        else:
            return False
        return True

    def build(self, strict: bool) -> FiniteSpace:
        if self.n is None:
            raise ParseError(f"space {self.name!r} has no 'points' line", self.line)
        try:
            return FiniteSpace.from_relation(self.n, [(i, j) for i, j, _ in self.rels], strict)
        except InputError as exc:
            raise ParseError(f"space {self.name!r}: {exc}", self.line) from None


def parse_space_text(text: str, strict: bool = False) -> SpaceDocument:
    doc = SpaceDocument()
    cur: _SpaceBuilder | None = None
    subset: list[tuple[int, int]] | None = None
    for line, words in _lines(text):
        head = words[0]
        if head == "space":
            if len(words) != 2:
                raise ParseError("'space' takes a name", line)
            if cur:
                doc.spaces.append((cur.name, cur.build(strict)))
            cur, subset = _SpaceBuilder(words[1], line), None
        elif head == "subset":
            if len(words) != 2:
                raise ParseError("'subset' takes a name", line)
            if cur:
                doc.spaces.append((cur.name, cur.build(strict)))
                cur = None
            if len(doc.spaces) < 2:
                raise ParseError("'subset' needs two spaces declared before it", line)
            subset = []
            doc.subsets.append((words[1], subset))
        elif head == "pair":
            if subset is None:
                raise ParseError("'pair' outside a subset block", line)
            a, b = _ints(words, 2, line)
            nx, ny = doc.spaces[0][1].n, doc.spaces[1][1].n
            if a >= nx or b >= ny:
                raise ParseError(f"pair ({a}, {b}) out of range for {nx} x {ny}", line)
            subset.append((a, b))
        elif cur is not None and cur.feed(words, line):
            pass
        else:
            raise ParseError(f"unexpected directive '{head}'", line)
    if cur:
        doc.spaces.append((cur.name, cur.build(strict)))
    return doc


def format_space(name: str, space: FiniteSpace, indent: str = "") -> str:
    lines = [f"space {name}", f"points {space.n}"]
    lines += [f"rel {i} {j}" for i, j in space.relation()]
    return "".join(f"{indent}{ln}\n" for ln in lines)


def format_subset(name: str, pairs) -> str:
    return f"subset {name}\n" + "".join(f"pair {a} {b}\n" for a, b in sorted(pairs))


def format_space_document(doc: SpaceDocument) -> str:
    out = "".join(format_space(n, s) for n, s in doc.spaces)
    return out + "".join(format_subset(n, p) for n, p in doc.subsets)


# --- models ---------------------------------------------------------------


def _space_block(lines, pos: int, opener: int, strict: bool) -> tuple[FiniteSpace, int]:
    builder: _SpaceBuilder | None = None
    while pos < len(lines):
        line, words = lines[pos]
        pos += 1
        if words[0] == "end":
            if builder is None:
                raise ParseError("empty space block", line)
            return builder.build(strict), pos
        if words[0] == "space":
            if builder is not None or len(words) != 2:
                raise ParseError("one 'space <name>' per block", line)
            builder = _SpaceBuilder(words[1], line)
        elif builder is None or not builder.feed(words, line):
            raise ParseError(f"unexpected directive '{words[0]}' in space block", line)
    raise ParseError("unterminated space block", opener)


def _chart_block(lines, pos: int, opener: int, base: FiniteSpace, strict: bool):
    domain = None
    u = v = None
    forward: dict[int, tuple[int, int]] = {}
    while pos < len(lines):
        line, words = lines[pos]
        pos += 1
        head = words[0]
        if head == "end":
            if domain is None or u is None or v is None:
                raise ParseError("chart needs 'domain', 'uspace' and 'vspace'", opener)
            return ChartRec.from_forward(domain, u, v, forward), pos
        if head == "domain":
            pts = _ints(words, len(words) - 1, line)
            if any(p >= base.n for p in pts):
                raise ParseError("domain point out of range", line)
            domain = PointSet.of(base.n, pts)
        elif head == "uspace":
            u, pos = _space_block(lines, pos, line, strict)
        elif head == "vspace":
            v, pos = _space_block(lines, pos, line, strict)
        elif head == "map":
            w, a, b = _ints(words, 3, line)
            if u is None or v is None:
                raise ParseError("'map' before 'uspace'/'vspace'", line)
            if w >= base.n or a >= u.n or b >= v.n:
                raise ParseError("map entry out of range", line)
            if w in forward:
                raise ParseError(f"base point {w} mapped twice", line)
            forward[w] = (a, b)
        else:
            raise ParseError(f"unexpected directive '{head}' in chart block", line)
    raise ParseError("unterminated chart block", opener)


def parse_model_text(text: str, strict: bool = False) -> TwoSpaceModel:
    lines = _lines(text)
    if not lines or lines[0][1] != ["2space"]:
        raise ParseError("model file must start with '2space'", lines[0][0] if lines else 1)
    pos = 1
    base = None
    charts = []
    while pos < len(lines):
        line, words = lines[pos]
        pos += 1
        if words == ["base"]:
            if base is not None:
                raise ParseError("duplicate base block", line)
            base, pos = _space_block(lines, pos, line, strict)
        elif words == ["chart"]:
            if base is None:
                raise ParseError("'chart' before 'base'", line)
            chart, pos = _chart_block(lines, pos, line, base, strict)
            charts.append(chart)
        else:
            raise ParseError(f"unexpected directive '{words[0]}'", line)
    if base is None:
        raise ParseError("model has no base block")
    return TwoSpaceModel(base, tuple(charts))


def format_model(w: TwoSpaceModel) -> str:
    out = ["2space\n", "base\n", format_space("W", w.base, "  "), "end\n"]
    for chart in w.charts:
        out.append("chart\n")
        out.append("  domain" + "".join(f" {p}" for p in chart.domain) + "\n")
        out += ["  uspace\n", format_space("U", chart.u_space, "    "), "  end\n"]
        out += ["  vspace\n", format_space("V", chart.v_space, "    "), "  end\n"]
        out += [f"  map {p} {a} {b}\n" for p, (a, b) in sorted(chart.forward.items())]
        out.append("end\n")
    return "".join(out)


def parse_two_map_text(text: str, relative_to: Path | None = None, strict: bool = False) -> TwoMapRec:
    lines = _lines(text)
    if not lines or lines[0][1] != ["2map"]:
        raise ParseError("2-map file must start with '2map'", lines[0][0] if lines else 1)
    paths: dict[str, Path] = {}
    entries: dict[int, int] = {}
    for line, words in lines[1:]:
        if words[0] in ("source", "target"):
            if len(words) != 2:
                raise ParseError(f"'{words[0]}' takes a file name", line)
            p = Path(words[1])
            paths[words[0]] = p if p.is_absolute() or relative_to is None else relative_to / p
        elif words[0] == "map":
            w, w2 = _ints(words, 2, line)
            if w in entries:
                raise ParseError(f"point {w} mapped twice", line)
            entries[w] = w2
        else:
            raise ParseError(f"unexpected directive '{words[0]}'", line)
    for key in ("source", "target"):
        if key not in paths:
            raise ParseError(f"missing '{key}' line")
    models = {}
    for key, p in paths.items():
        try:
            models[key] = parse_model_text(p.read_text(), strict)
        except OSError as exc:
            raise ParseError(f"cannot read {key} model {p}: {exc.strerror}") from None
    src, dst = models["source"], models["target"]
    if sorted(entries) != list(range(src.base.n)):
        raise ParseError(f"map must list every source point 0..{src.base.n - 1} exactly once")
    if any(x >= dst.base.n for x in entries.values()):
        raise ParseError("map sends a point outside the target base")
    return TwoMapRec(src, dst, tuple(entries[k] for k in range(src.base.n)))


def format_two_map(m: TwoMapRec, source: str, target: str) -> str:
    body = "".join(f"map {w} {x}\n" for w, x in enumerate(m.h))
    return f"2map\nsource {source}\ntarget {target}\n{body}"
