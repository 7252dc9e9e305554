"""CPLEX-LP text export, a small reader for round-trips, and a structural check."""

from __future__ import annotations

import re

from ..errors import ParseError
from .model import RELATIONS, Constraint, IlpModel

TERMS_PER_LINE = 8
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")


def _fmt_terms(terms) -> list[str]:
    parts = []
    for idx, (var, coef) in enumerate(terms):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else f"{mag} {var}"
        if idx == 0:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    return parts


def emit_lp(model: IlpModel) -> str:
    out = [f"\\ fifostack {model.kind} model" + (f" for {model.instance_id}" if model.instance_id else "")]
    out.append("Minimize")
    out.append(f" obj: {model.objective}")
    out.append("Subject To")
    for con in model.constraints:
        parts = _fmt_terms(con.terms) or ["0 " + model.objective]
        chunks = [parts[i : i + TERMS_PER_LINE] for i in range(0, len(parts), TERMS_PER_LINE)]
        lines = [" ".join(ch) for ch in chunks]
        lines[-1] += f" {con.sense} {con.rhs}"
        out.append(f" {con.name}: {lines[0]}")
        out.extend(f"   {ln}" for ln in lines[1:])
    if model.binaries:
        out.append("Binary")
        out.extend(f" {v}" for v in model.binaries)
    if model.integers:
        out.append("General")
        out.extend(f" {v}" for v in model.integers)
    out.append("End")
    return "\n".join(out) + "\n"


def _parse_body(name: str, tokens: list[str]) -> Constraint:
    rel_at = [i for i, tok in enumerate(tokens) if tok in RELATIONS]
    if len(rel_at) != 1 or rel_at[0] != len(tokens) - 2:
        raise ParseError(f"constraint {name!r}: expected '<terms> <rel> <rhs>'")
    try:
        rhs = int(tokens[-1])
    except ValueError:
        raise ParseError(f"constraint {name!r}: non-integer right-hand side {tokens[-1]!r}") from None
    terms: list[tuple[str, int]] = []
    sign, coef = 1, None
    for tok in tokens[: rel_at[0]]:
        if tok in ("+", "-"):
            sign = -1 if tok == "-" else 1
        elif re.fullmatch(r"\d+", tok):
            coef = int(tok)
        elif _NAME.match(tok):
            terms.append((tok, sign * (1 if coef is None else coef)))
            sign, coef = 1, None
        else:
            raise ParseError(f"constraint {name!r}: unexpected token {tok!r}")
    terms = [(v, c) for v, c in terms if c != 0]
    return Constraint(name, tuple(terms), tokens[-2], rhs)


def read_lp(text: str, kind: str = "") -> IlpModel:
    """Read the subset of LP syntax that :func:`emit_lp` writes."""
    sections: dict[str, list[str]] = {}
    current = None
    headers = {"minimize": "min", "subject to": "st", "binary": "bin", "general": "gen", "end": "end"}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = headers.get(line.lower())
        if key:
            current = key
            sections.setdefault(key, [])
            continue
        if current is None or current == "end":
            raise ParseError(f"text outside any LP section: {line!r}")
        sections[current].append(line)
    for need in ("min", "st", "end"):
        if need not in sections:
            raise ParseError(f"missing LP section {need!r}")
    obj = " ".join(sections["min"]).split()
    if len(obj) != 2 or not obj[0].endswith(":"):
        raise ParseError("objective must be a single named variable")

    constraints = []
    name, body = None, []
    for tok in " ".join(sections["st"]).split():
        if tok.endswith(":"):
            if name is not None:
                constraints.append(_parse_body(name, body))
            name, body = tok[:-1], []
        elif name is None:
            raise ParseError("constraint without a name")
        else:
            body.append(tok)
    if name is not None:
        constraints.append(_parse_body(name, body))
    binaries = " ".join(sections.get("bin", [])).split()
    integers = " ".join(sections.get("gen", [])).split()
    return IlpModel(kind, binaries, integers, constraints, obj[1])


def validate_model(model: IlpModel) -> list[str]:
    """Structural problems: undeclared or doubly declared variables, duplicate names."""
    problems = []
    declared = set(model.binaries) | set(model.integers)
    if len(declared) != len(model.binaries) + len(model.integers):
        problems.append("a variable is declared more than once")
    if model.objective not in declared:
        problems.append(f"objective variable {model.objective!r} is not declared")
    seen = set()
    for con in model.constraints:
        if con.name in seen:
            problems.append(f"duplicate constraint name {con.name!r}")
        seen.add(con.name)
        for var, _ in con.terms:
            if var not in declared:
                problems.append(f"constraint {con.name!r} uses undeclared {var!r}")
    return problems
