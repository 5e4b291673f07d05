"""Line-oriented project file: parse, render, and matrix-CSV conversion.

Format by example::

    [activities]
    # id  "name"  duration  fixed=  rate=
    A0 "start"  point(0)           fixed=0   rate=0
    A1 "design" triangular(1,2,3)  fixed=100 rate=20

    [risks]
    # id  "name"  p=  kind=duration|cost  target=  impact=
    A5 "review slip" p=0.3 kind=duration target=A1 impact=uniform(1,2)

    [precedence]
    A1 <- A0

A [precedence-matrix] section may replace [precedence]: a `cols` header
naming every activity in declaration order, then one `id: 0 1 0 ...` row
per activity where a 1 marks that the row activity has the column
activity as predecessor. Comments run from `#` to end of line; quoted
names may contain escaped quotes. Rendering is canonical (pairs form) and
round-trips the spec exactly.
"""

from __future__ import annotations

import csv
import io
import re

from .distributions import Distribution
from .errors import (
    DuplicateId,
    ProjectSyntaxError,
    SpecError,
    UnknownField,
    UnknownPredecessor,
)
from .network import Activity, ProjectSpec, RiskEvent

_SECTIONS = ("activities", "risks", "precedence", "precedence-matrix")
_ID = r"[A-Za-z0-9_.\-]+"
_ID_RE = re.compile(rf"^{_ID}$")
_NAME_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')
_DIST_RE = re.compile(rf"({'|'.join(('point', 'discrete', 'uniform', 'triangular', 'normal', 'pert'))})\(([^)]*)\)")
_PAIR_RE = re.compile(rf"^({_ID})\s*<-\s*((?:{_ID})(?:\s+{_ID})*)$")


def parse_project(path) -> ProjectSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_project_text(fh.read(), source=str(path))


def parse_project_text(text: str, source: str = "<string>") -> ProjectSpec:
    activities = []
    risks = []
    pairs = []          # (line_no, successor, predecessor)
    matrix_cols = None
    matrix_rows = {}    # id -> (line_no, bits)
    seen_sections = set()
    section = None
    seen_ids = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ProjectSyntaxError("unterminated section header", source, line_no)
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise UnknownField(f"unknown section [{section}]", source, line_no)
            if section in seen_sections:
                raise ProjectSyntaxError(f"section [{section}] appears twice", source, line_no)
            if section == "precedence" and "precedence-matrix" in seen_sections:
                raise ProjectSyntaxError("cannot mix [precedence] and [precedence-matrix]",
                                         source, line_no)
            if section == "precedence-matrix" and "precedence" in seen_sections:
                raise ProjectSyntaxError("cannot mix [precedence] and [precedence-matrix]",
                                         source, line_no)
            seen_sections.add(section)
            continue
        if section is None:
            raise ProjectSyntaxError("content before the first section header", source, line_no)
        if section == "activities":
            act = _parse_activity(line, source, line_no)
            _claim_id(seen_ids, act.id, source, line_no)
            activities.append(act)
        elif section == "risks":
            risk = _parse_risk(line, source, line_no)
            _claim_id(seen_ids, risk.id, source, line_no)
            risks.append(risk)
        elif section == "precedence":
            m = _PAIR_RE.match(line)
            if not m:
                raise ProjectSyntaxError(f"expected 'SUCC <- PRED [PRED ...]', got {line!r}",
                                         source, line_no)
            for pred in m.group(2).split():
                pairs.append((line_no, m.group(1), pred))
        else:  # precedence-matrix
            if matrix_cols is None:
                head = line.split()
                if head[0] != "cols":
                    raise ProjectSyntaxError("matrix section must start with a 'cols' header",
                                             source, line_no)
                matrix_cols = (line_no, head[1:])
            else:
                if ":" not in line:
                    raise ProjectSyntaxError("matrix row must look like 'ID: 0 1 ...'",
                                             source, line_no)
                row_id, _, bits = line.partition(":")
                row_id = row_id.strip()
                if row_id in matrix_rows:
                    raise DuplicateId(f"{source}:{line_no}: duplicate matrix row {row_id!r}")
                matrix_rows[row_id] = (line_no, bits.split())

    index = {a.id: i for i, a in enumerate(activities)}
    n = len(activities)
    matrix = [[0] * n for _ in range(n)]
    if matrix_cols is not None:
        matrix = _assemble_matrix(activities, matrix_cols, matrix_rows, source)
    else:
        for line_no, succ, pred in pairs:
            if succ not in index:
                raise UnknownPredecessor(f"{source}:{line_no}: unknown activity {succ!r}")
            if pred not in index:
                raise UnknownPredecessor(f"{source}:{line_no}: unknown predecessor {pred!r}")
            matrix[index[succ]][index[pred]] = 1

    return ProjectSpec(activities=tuple(activities), precedence=tuple(map(tuple, matrix)),
                       risks=tuple(risks))


def _assemble_matrix(activities, matrix_cols, matrix_rows, source):
    head_line, cols = matrix_cols
    ids = [a.id for a in activities]
    if cols != ids:
        raise ProjectSyntaxError(
            f"matrix cols must list all activities in declaration order {ids}, got {cols}",
            source, head_line)
    missing = [i for i in ids if i not in matrix_rows]
    if missing:
        raise ProjectSyntaxError(f"matrix row missing for {missing[0]!r}", source, head_line)
    extra = [r for r in matrix_rows if r not in ids]
    if extra:
        line_no, _ = matrix_rows[extra[0]]
        raise UnknownPredecessor(f"{source}:{line_no}: matrix row for unknown activity {extra[0]!r}")
    n = len(ids)
    matrix = []
    for row_id in ids:
        line_no, bits = matrix_rows[row_id]
        if len(bits) != n:
            raise ProjectSyntaxError(
                f"matrix row {row_id!r} has {len(bits)} entries, expected {n}",
                source, line_no)
        row = []
        for b in bits:
            if b not in ("0", "1"):
                raise ProjectSyntaxError(f"matrix row {row_id!r} has non-binary entry {b!r}",
                                         source, line_no)
            row.append(int(b))
        matrix.append(row)
    return matrix


def _strip_comment(line):
    out = []
    in_quotes = False
    escaped = False
    for ch in line:
        if escaped:
            out.append(ch)
            escaped = False
            continue
        if ch == "\\" and in_quotes:
            out.append(ch)
            escaped = True
            continue
        if ch == '"':
            in_quotes = not in_quotes
        elif ch == "#" and not in_quotes:
            break
        out.append(ch)
    return "".join(out)


def _claim_id(seen, entity_id, source, line_no):
    if entity_id in seen:
        raise DuplicateId(f"{source}:{line_no}: duplicate id {entity_id!r} "
                          f"(first defined on line {seen[entity_id]})")
    seen[entity_id] = line_no


def _take_id(line, source, line_no):
    parts = re.split(r"\s+", line, maxsplit=1)
    token, rest = parts[0], parts[1] if len(parts) > 1 else ""
    if not _ID_RE.match(token):
        raise ProjectSyntaxError(f"invalid id token {token!r}", source, line_no)
    return token, rest.strip()


def _take_name(rest, source, line_no):
    m = _NAME_RE.match(rest)
    if not m:
        raise ProjectSyntaxError('expected a quoted "name"', source, line_no)
    name = re.sub(r"\\(.)", r"\1", m.group(1))
    return name, rest[m.end():].strip()


def _parse_fields(rest, source, line_no):
    """Split `key=value ...` where a value is a dist spec or a bare token."""
    fields = {}
    pos = 0
    while pos < len(rest):
        m = re.match(rf"\s*([A-Za-z_]+)=", rest[pos:])
        if not m:
            raise ProjectSyntaxError(f"expected key=value, got {rest[pos:].strip()!r}",
                                     source, line_no)
        key = m.group(1)
        pos += m.end()
        dist_m = _DIST_RE.match(rest[pos:])
        if dist_m:
            value = dist_m.group(0)
            pos += dist_m.end()
        else:
            val_m = re.match(r"\S+", rest[pos:])
            if not val_m:
                raise ProjectSyntaxError(f"missing value for {key}=", source, line_no)
            value = val_m.group(0)
            pos += val_m.end()
        if key in fields:
            raise ProjectSyntaxError(f"field {key}= given twice", source, line_no)
        fields[key] = value
    return fields


def _require_fields(fields, required, source, line_no):
    for key in fields:
        if key not in required:
            raise UnknownField(f"unknown field {key}=", source, line_no)
    for key in required:
        if key not in fields:
            raise ProjectSyntaxError(f"missing field {key}=", source, line_no)


def _with_location(source, line_no, build):
    """Re-raise field/parameter violations with the offending location."""
    try:
        return build()
    except SpecError as exc:
        raise type(exc)(f"{source}:{line_no}: {exc}") from None


def _parse_activity(line, source, line_no):
    token, rest = _take_id(line, source, line_no)
    name, rest = _take_name(rest, source, line_no)
    dist_m = _DIST_RE.match(rest)
    if not dist_m:
        raise ProjectSyntaxError("expected a duration distribution like uniform(4,6)",
                                 source, line_no)
    duration = _parse_distribution(dist_m, source, line_no)
    fields = _parse_fields(rest[dist_m.end():].strip(), source, line_no)
    _require_fields(fields, ("fixed", "rate"), source, line_no)
    return _with_location(source, line_no, lambda: Activity(
        id=token, name=name, duration=duration,
        fixed_cost=_num(fields["fixed"], "fixed", source, line_no),
        variable_cost_rate=_num(fields["rate"], "rate", source, line_no)))


def _parse_risk(line, source, line_no):
    token, rest = _take_id(line, source, line_no)
    name, rest = _take_name(rest, source, line_no)
    fields = _parse_fields(rest, source, line_no)
    _require_fields(fields, ("p", "kind", "target", "impact"), source, line_no)
    impact_m = _DIST_RE.fullmatch(fields["impact"])
    if not impact_m:
        raise ProjectSyntaxError(f"impact= must be a distribution, got {fields['impact']!r}",
                                 source, line_no)
    if fields["kind"] not in ("duration", "cost"):
        raise ProjectSyntaxError(f"kind= must be duration or cost, got {fields['kind']!r}",
                                 source, line_no)
    return _with_location(source, line_no, lambda: RiskEvent(
        id=token, name=name,
        probability=_num(fields["p"], "p", source, line_no),
        kind=fields["kind"], target=fields["target"],
        impact=_parse_distribution(impact_m, source, line_no)))


def _parse_distribution(match, source, line_no):
    kind, args = match.group(1), match.group(2)
    if kind == "discrete":
        atoms = []
        for part in args.split(","):
            v, sep, q = part.partition(":")
            if not sep:
                raise ProjectSyntaxError("discrete atoms look like value:prob", source, line_no)
            atoms.append((_num(v, "value", source, line_no), _num(q, "prob", source, line_no)))
        return _with_location(source, line_no, lambda: Distribution.discrete(atoms))
    params = [_num(a, kind, source, line_no) for a in args.split(",")] if args.strip() else []
    expected = {"point": 1, "uniform": 2, "normal": 2, "triangular": 3, "pert": 3}[kind]
    if len(params) != expected:
        raise ProjectSyntaxError(f"{kind} takes {expected} parameters, got {len(params)}",
                                 source, line_no)
    return _with_location(source, line_no, lambda: Distribution(kind, tuple(params)))


def _num(token, what, source, line_no):
    try:
        return float(token)
    except ValueError:
        raise ProjectSyntaxError(f"{what}: expected a number, got {token.strip()!r}",
                                 source, line_no) from None


# ---------------------------------------------------------------------------
# rendering

def render_project(spec: ProjectSpec) -> str:
    """Canonical text form; parse(render(spec)) == spec."""
    lines = ["[activities]"]
    for a in spec.activities:
        lines.append(f"{a.id} {_quote(a.name)} {format_distribution(a.duration)} "
                     f"fixed={_fmt_num(a.fixed_cost)} rate={_fmt_num(a.variable_cost_rate)}")
    if spec.risks:
        lines.append("")
        lines.append("[risks]")
        for r in spec.risks:
            lines.append(f"{r.id} {_quote(r.name)} p={_fmt_num(r.probability)} kind={r.kind} "
                         f"target={r.target} impact={format_distribution(r.impact)}")
    lines.append("")
    lines.append("[precedence]")
    ids = [a.id for a in spec.activities]
    for i, row in enumerate(spec.precedence):
        preds = [ids[j] for j, cell in enumerate(row) if cell]
        if preds:
            lines.append(f"{ids[i]} <- {' '.join(preds)}")
    return "\n".join(lines) + "\n"


def format_distribution(dist: Distribution) -> str:
    if dist.kind == "discrete":
        inner = ",".join(f"{_fmt_num(v)}:{_fmt_num(q)}" for v, q in dist.params)
        return f"discrete({inner})"
    return f"{dist.kind}({','.join(_fmt_num(p) for p in dist.params)})"


def _fmt_num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x == int(x) and abs(x) < 1e16 else repr(x)


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


# ---------------------------------------------------------------------------
# Figure-3-style matrix CSV conversion

def convert_matrix_csv(text: str, source: str = "<csv>") -> str:
    """Turn a precedence-matrix CSV export into a project file skeleton.

    First row: header whose cells (after the corner label) name the columns.
    Each following row: a label plus 0/1 cells. A label like "R1 A5" keeps
    the last token as the id and the full label as the name. Durations and
    costs come out as editable point(0) stubs.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise ProjectSyntaxError("matrix CSV needs a header row and one row per activity",
                                 source)
    cols = [c.strip() for c in rows[0][1:]]
    activities = []
    preds = {}
    for line_no, row in enumerate(rows[1:], start=2):
        label = row[0].strip()
        if not label:
            raise ProjectSyntaxError("matrix row without a label", source, line_no)
        entity_id = label.split()[-1]
        bits = [c.strip() or "0" for c in row[1:]]
        if len(bits) != len(cols):
            raise ProjectSyntaxError(f"matrix row {label!r} has {len(bits)} cells, "
                                     f"expected {len(cols)}", source, line_no)
        marked = []
        for col_id, bit in zip(cols, bits):
            if bit not in ("0", "1"):
                raise ProjectSyntaxError(f"matrix row {label!r} has non-binary cell {bit!r}",
                                         source, line_no)
            if bit == "1":
                marked.append(col_id.split()[-1])
        if entity_id in preds:
            raise DuplicateId(f"{source}:{line_no}: duplicate matrix row {entity_id!r}")
        preds[entity_id] = marked
        activities.append((entity_id, label))

    lines = ["# Generated from a precedence-matrix CSV; edit distributions and costs.",
             "[activities]"]
    for entity_id, label in activities:
        lines.append(f"{entity_id} {_quote(label)} point(0) fixed=0 rate=0")
    lines.append("")
    lines.append("[precedence]")
    for entity_id, _ in activities:
        if preds[entity_id]:
            lines.append(f"{entity_id} <- {' '.join(preds[entity_id])}")
    return "\n".join(lines) + "\n"
