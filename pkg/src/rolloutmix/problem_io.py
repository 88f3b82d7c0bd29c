"""JSON problem documents.

Layout::

    {
      "states":     ["1a", "1b", ...],
      "aliases":    {"3a": "1a", ...},             # optional alternative names
      "cover":      {"1": ["1a", "1b", "1c"], ...},
      "actions":    ["alpha", "beta", ...],
      "terminals":  {"f1": "1/1", "f2": null, ...}, # payoff as "p/q" or null
      "population": [{"action": "alpha", "states": [...], "terminal": "f1"}, ...],
      "schemata":   ["#", {"action": "beta", "path": ["4", "7", "5"], "tail": "f2"}]
    }

Schemata may also be given as strings such as ``"beta,4,7,5,f2"``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .cover import validate_cover
from .errors import ParseError, ValidationError
from .population import Problem, Rollout, make_problem
from .schema import WILDCARD, Schema, resolve_symbol


def _require(doc, key, kind, where):
    if key not in doc:
        raise ParseError(f"{where}.{key}" if where else key, "missing field")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{where}.{key}" if where else key,
                         f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _rational(value, where):
    if value is None:
        return None
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(where, f"not a rational: {value!r}") from None


def read_document(source) -> dict:
    """Accept a dict, a JSON string, or a path."""
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(str(path), str(exc)) from None
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise ParseError("<root>", "document must be a JSON object")
    return doc


def load_problem(source) -> Problem:
    doc = read_document(source)
    states = _require(doc, "states", list, "")
    aliases = doc.get("aliases", {}) or {}
    if not isinstance(aliases, dict):
        raise ParseError("aliases", "expected object")

    def canon(s):
        return aliases.get(s, s)

    cover_doc = _require(doc, "cover", dict, "")
    sets = {}
    for set_id, members in cover_doc.items():
        if not isinstance(members, list):
            raise ParseError(f"cover.{set_id}", "expected list of states")
        sets[set_id] = [canon(s) for s in members]
    cover = validate_cover(states, sets)

    actions = _require(doc, "actions", list, "")
    terminals_doc = _require(doc, "terminals", (dict, list), "")
    if isinstance(terminals_doc, list):
        terminals_doc = {f: None for f in terminals_doc}
    payoff = {f: _rational(v, f"terminals.{f}") for f, v in terminals_doc.items()}
    if all(v is None for v in payoff.values()):
        payoff = None
    elif any(v is None for v in payoff.values()):
        missing = [f for f, v in payoff.items() if v is None]
        raise ParseError("terminals", f"payoff missing for {missing}")

    rollouts = []
    for i, r in enumerate(_require(doc, "population", list, "")):
        where = f"population[{i}]"
        if not isinstance(r, dict):
            raise ParseError(where, "expected object")
        action = _require(r, "action", str, where)
        seq = _require(r, "states", list, where)
        terminal = _require(r, "terminal", str, where)
        rollouts.append(Rollout(action, tuple(canon(s) for s in seq), terminal))
    return make_problem(cover, rollouts, actions, terminals_doc.keys(), payoff)


def parse_schema(item, where="schema") -> Schema:
    if isinstance(item, str):
        try:
            return Schema.parse(item)
        except ValueError as exc:
            raise ParseError(where, str(exc)) from None
    if isinstance(item, dict):
        action = _require(item, "action", str, where)
        path = _require(item, "path", list, where)
        tail = item.get("tail", WILDCARD)
        return Schema(action, tuple(str(p) for p in path), tail)
    raise ParseError(where, "schema must be a string or an object")


def check_schema(schema: Schema, problem: Problem) -> Schema:
    """Raise UnknownCoverSet/UnknownSchemaSymbol for unresolvable entries."""
    root = problem.root
    for o in schema.path:
        resolve_symbol(o, root.cover, root.partition)
    if not schema.is_universal and schema.tail != WILDCARD:
        if str(schema.tail) not in {str(f) for f in root.terminals}:
            raise ValidationError(f"schema {schema} names unknown terminal {schema.tail!r}")
    return schema


def load_schemata(source, problem: Problem | None = None) -> list:
    """Schemata from a document (its "schemata" field) or from a bare JSON list."""
    if isinstance(source, (list, tuple)):
        items = source
    else:
        if isinstance(source, (str, Path)) and not str(source).lstrip().startswith(("{", "[")):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ParseError(str(source), str(exc)) from None
        else:
            text = source if isinstance(source, str) else json.dumps(source)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
        items = data.get("schemata", []) if isinstance(data, dict) else data
    out = [parse_schema(item, f"schemata[{i}]") for i, item in enumerate(items)]
    if problem is not None:
        for h in out:
            check_schema(h, problem)
    return out


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture, e.g. ``fixture_path("fig2")``."""
    return Path(str(resources.files("rolloutmix") / "data" / f"{name}.json"))


def load_fixture(name: str) -> Problem:
    return load_problem(fixture_path(name))
