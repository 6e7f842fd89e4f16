"""Canonical text for a ``SpecModel``; ``parse_spec(print_spec(m)) == m``."""

from __future__ import annotations

from . import ast

INDENT = "  "


def print_expr(e: ast.Expr, top: bool = True) -> str:
    if isinstance(e, ast.Lit):
        return e.text
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Null):
        return "null"
    if isinstance(e, ast.Call):
        return f"{e.fn}({print_expr(e.args[0])}, {print_expr(e.args[1])})"
    if isinstance(e, ast.Compare):
        s = f"{print_expr(e.left, False)} {e.op} {print_expr(e.right, False)}"
    elif isinstance(e, ast.InDomain):
        s = f"{print_expr(e.expr, False)} in {e.domain}"
    elif isinstance(e, ast.Not):
        s = f"not {print_expr(e.expr, False)}"
    else:
        s = f"{print_expr(e.left, False)} {e.op} {print_expr(e.right, False)}"
    return s if top else f"({s})"


def _stmts(body, depth) -> list:
    pad = INDENT * depth
    out = []
    for st in body:
        if isinstance(st, ast.Input):
            out.append(f"{pad}input {st.var} : {st.domain}")
        elif isinstance(st, ast.Output):
            out.append(f"{pad}output {st.channel} = {print_expr(st.expr)}")
        elif isinstance(st, ast.Signal):
            out.append(f"{pad}signal {st.name}")
        elif isinstance(st, ast.Assign):
            out.append(f"{pad}assign {st.var} := {print_expr(st.expr)}")
        elif isinstance(st, ast.Dump):
            out.append(f"{pad}dump")
        else:
            out.append(f"{pad}if {print_expr(st.cond)} {{")
            out.extend(_stmts(st.then, depth + 1))
            if st.orelse:
                out.append(f"{pad}}} else {{")
                out.extend(_stmts(st.orelse, depth + 1))
            out.append(f"{pad}}}")
    return out


def print_obs(o: ast.Obs) -> str:
    if o.kind in ("all", "none"):
        return o.kind
    if o.kind == "compose":
        return f"compose({', '.join(print_obs(a) for a in o.args)})"
    return f"{o.kind}({', '.join(o.args)})"


def print_classifier(c: ast.Classifier) -> str:
    if not c.args:
        return c.kind
    return f"{c.kind}({', '.join(print_classifier(a) if isinstance(a, ast.Classifier) else str(a) for a in c.args)})"


def print_er(er: ast.Er) -> str:
    if er.kind in ("all", "id"):
        return er.kind
    if er.kind == "by":
        return f"by {print_classifier(er.args[0])}"
    return f"meet({', '.join(print_er(a) for a in er.args)})"


def _arm_head(arm: ast.Arm) -> str:
    return f"{arm.label} as {arm.alias}" if arm.alias else arm.label


def _type1(t: ast.Type1Def, depth: int) -> list:
    pad = INDENT * depth
    out = [f"type1 cond {print_classifier(t.cond)} {{"]
    out.extend(f"{pad}{INDENT}{_arm_head(a)} -> {print_er(a.body)}" for a in t.arms)
    out.append(f"{pad}}}")
    return out


def _policy(p: ast.PolicyDef) -> list:
    b = p.body
    if isinstance(b, ast.Type0Def):
        return [f"policy {p.name} = type0 {print_er(b.er)}"]
    if isinstance(b, ast.Type1Def):
        lines = _type1(b, 0)
        return [f"policy {p.name} = {lines[0]}"] + lines[1:]
    out = [f"policy {p.name} = type2 cases {print_classifier(b.cases)} {{"]
    for a in b.arms:
        if isinstance(a.body, ast.Er):
            out.append(f"{INDENT}{_arm_head(a)} -> {print_er(a.body)}")
        else:
            lines = _type1(a.body, 1)
            out.append(f"{INDENT}{_arm_head(a)} -> {lines[0]}")
            out.extend(lines[1:])
    out.append("}")
    return out


def _selector(s: ast.Selector) -> str:
    if s.kind == "first_input":
        return "first_input"
    if s.kind == "input":
        return f"input({s.channel}, {s.k})" if s.k is not None else f"input({s.channel})"
    if s.kind == "input_k":
        return f"input_k({s.k})"
    return f"const({s.value})"


def print_spec(model: ast.SpecModel) -> str:
    out = []
    for d in model.domains:
        if d.lo is not None:
            out.append(f"domain {d.name} = {d.lo}..{d.hi}")
        else:
            out.append(f"domain {d.name} = {{{', '.join(d.items)}}}")
    for s in model.systems:
        out.append("")
        if s.traces is not None:
            out.append(f"system {s.name} traces {{")
            out.extend(f"{INDENT}{t}" for t in s.traces)
        else:
            out.append(f"system {s.name} {{")
            out.extend(_stmts(s.body, 1))
        out.append("}")
    for u in model.universes:
        out.append("")
        out.append(f"universe {u.system} {{")
        out.extend(f"{INDENT}{t}" for t in u.traces)
        out.append("}")
    if model.subjects:
        out.append("")
    for s in model.subjects:
        out.append(f"subject {s.system} = {_selector(s.selector)}")
    if model.attackers:
        out.append("")
    for a in model.attackers:
        out.append(f"attacker {a.name} = {print_obs(a.obs)}")
    for p in model.policies:
        out.append("")
        out.extend(_policy(p))
    return "\n".join(out).lstrip("\n") + "\n"
