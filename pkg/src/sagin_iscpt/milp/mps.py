"""Fixed-field MPS export/import.

Names occupy the classic columns (2-3, 5-12, 15-22, 40-47). Numbers are
written with ``repr`` so they round-trip exactly; long values overflow their
12-character field, which is why the reader splits on whitespace.
"""

from __future__ import annotations

import re

from .model import BINARY, CONTINUOUS, MilpModel

OBJ_ROW = "OBJ"
_REL_CODE = {"<=": "L", ">=": "G", "=": "E"}
_CODE_REL = {v: k for k, v in _REL_CODE.items()}


class NameCollision(ValueError):
    pass


class MpsFormatError(ValueError):
    pass


def mangle(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.]", "_", name)[:8]


def _mangled(names, kind):
    out = [mangle(n) for n in names]
    seen = {}
    for orig, m in zip(names, out):
        if m in seen and seen[m] != orig:
            raise NameCollision(f"{kind} {orig!r} and {seen[m]!r} both mangle to {m!r}")
        if m == OBJ_ROW and kind == "row":
            raise NameCollision(f"row {orig!r} collides with objective row name")
        seen[m] = orig
    return out


def _num(x: float) -> str:
    if x == 0:
        x = 0.0  # never print -0
    return repr(float(x))


def _line(f1="", f2="", f3="", f4="", f5="", f6=""):
    s = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        s += f"   {f5:<8}  {f6:>12}"
    return s.rstrip()


def export_mps(model: MilpModel) -> str:
    model.validate()
    vnames = _mangled([v.name for v in model.variables], "column")
    rnames = _mangled([c.name for c in model.constraints], "row")
    out = [f"NAME          {model.name}"]
    if model.sense == "max":
        out += ["OBJSENSE", "    MAX"]
    out.append("ROWS")
    out.append(_line("N", OBJ_ROW))
    for c, rn in zip(model.constraints, rnames):
        out.append(_line(_REL_CODE[c.relation], rn))

    # column-major entries, objective first
    entries = [[] for _ in model.variables]
    for j, a in sorted(model.objective.items()):
        entries[j].append((OBJ_ROW, a))
    for c, rn in zip(model.constraints, rnames):
        for j, a in sorted(c.coeffs.items()):
            entries[j].append((rn, a))

    out.append("COLUMNS")
    in_int = False
    marker = 0
    for j, v in enumerate(model.variables):
        is_int = v.kind == BINARY
        if is_int != in_int:
            tag = "'INTORG'" if is_int else "'INTEND'"
            out.append(f"    MARKER{marker:04d}  'MARKER'                 {tag}")
            marker += 1
            in_int = is_int
        ents = entries[j]
        if not ents:
            # keep empty columns declared
            out.append(_line("", vnames[j], OBJ_ROW, _num(0.0)))
        for i in range(0, len(ents), 2):
            r1, a1 = ents[i]
            if i + 1 < len(ents):
                r2, a2 = ents[i + 1]
                out.append(_line("", vnames[j], r1, _num(a1), r2, _num(a2)))
            else:
                out.append(_line("", vnames[j], r1, _num(a1)))
    if in_int:
        out.append(f"    MARKER{marker:04d}  'MARKER'                 'INTEND'")

    out.append("RHS")
    rhs = [(rn, c.rhs) for c, rn in zip(model.constraints, rnames) if c.rhs != 0.0]
    for i in range(0, len(rhs), 2):
        pair = rhs[i:i + 2]
        if len(pair) == 2:
            out.append(_line("", "RHS", pair[0][0], _num(pair[0][1]), pair[1][0], _num(pair[1][1])))
        else:
            out.append(_line("", "RHS", pair[0][0], _num(pair[0][1])))

    out.append("BOUNDS")
    for v, vn in zip(model.variables, vnames):
        if v.kind == BINARY and v.lower == 0.0 and v.upper == 1.0:
            out.append(_line("BV", "BND", vn))
            continue
        if v.lower == v.upper:
            out.append(_line("FX", "BND", vn, _num(v.lower)))
            continue
        if v.lower == float("-inf") and v.upper == float("inf"):
            out.append(_line("FR", "BND", vn))
            continue
        if v.lower == float("-inf"):
            out.append(_line("MI", "BND", vn))
        elif v.lower != 0.0:
            out.append(_line("LO", "BND", vn, _num(v.lower)))
        if v.upper != float("inf"):
            out.append(_line("UP", "BND", vn, _num(v.upper)))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def import_mps(text: str) -> MilpModel:
    section = None
    name = "model"
    sense = "min"
    rows = {}      # row name -> relation code
    row_order = []
    obj_row = None
    cols = {}      # col name -> dict(row -> coef)
    col_order = []
    col_int = {}
    rhs = {}
    bounds = {}    # col -> [lo, up, kind-override]
    in_int = False

    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            head = raw.split()
            section = head[0]
            if section == "NAME":
                name = head[1] if len(head) > 1 else "model"
            elif section == "OBJSENSE" and len(head) > 1:
                sense = head[1].lower()[:3]
            elif section not in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES",
                                 "OBJSENSE", "ENDATA"):
                raise MpsFormatError(f"unknown section {section!r}")
            continue
        tok = raw.split()
        if section == "OBJSENSE":
            sense = tok[0].lower()[:3]
        elif section == "ROWS":
            code, rn = tok
            if code == "N":
                if obj_row is None:
                    obj_row = rn
            else:
                rows[rn] = code
                row_order.append(rn)
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1] == "'MARKER'":
                in_int = tok[2] == "'INTORG'"
                continue
            cn = tok[0]
            if cn not in cols:
                cols[cn] = {}
                col_order.append(cn)
                col_int[cn] = in_int
            for i in range(1, len(tok) - 1, 2):
                cols[cn][tok[i]] = float(tok[i + 1])
        elif section == "RHS":
            for i in range(1, len(tok) - 1, 2):
                rhs[tok[i]] = float(tok[i + 1])
        elif section == "BOUNDS":
            code, _, cn = tok[:3]
            val = float(tok[3]) if len(tok) > 3 else None
            b = bounds.setdefault(cn, [0.0, float("inf"), None])
            if code == "BV":
                b[:] = [0.0, 1.0, BINARY]
            elif code == "UP":
                b[1] = val
            elif code == "LO":
                b[0] = val
            elif code == "FX":
                b[0] = b[1] = val
            elif code == "FR":
                b[0], b[1] = float("-inf"), float("inf")
            elif code == "MI":
                b[0] = float("-inf")
            elif code == "PL":
                b[1] = float("inf")
            else:
                raise MpsFormatError(f"unsupported bound type {code!r}")
        elif section == "RANGES":
            raise MpsFormatError("RANGES section not supported")

    if sense not in ("max", "min"):
        raise MpsFormatError(f"bad objective sense {sense!r}")
    model = MilpModel(name=name)
    for cn in col_order:
        lo, up, kind = bounds.get(cn, [0.0, float("inf"), None])
        if kind is None:
            kind = BINARY if col_int[cn] else CONTINUOUS
        model.add_variable(cn, kind, lo, up)
    obj = {}
    per_row = {rn: {} for rn in row_order}
    for j, cn in enumerate(col_order):
        for rn, a in cols[cn].items():
            if rn == obj_row:
                obj[j] = a
            elif rn in per_row:
                per_row[rn][j] = a
            else:
                raise MpsFormatError(f"column {cn!r} references unknown row {rn!r}")
    model.set_objective(obj, sense)
    for rn in row_order:
        model.add_constraint(rn, per_row[rn], _CODE_REL[rows[rn]], rhs.get(rn, 0.0))
    return model
