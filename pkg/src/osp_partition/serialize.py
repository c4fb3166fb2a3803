"""JSON encodings of partitions, preferences, committees, tables and arenas."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .committee import Committee, ScfTable, antichain
from .core import OrderedPartition, Partition, Preference, from_mask, to_mask
from .errors import InvalidPartition, ParseError
from .game import Arena, InfoSet, Label, Node


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_json(path: str | Path, data: Any) -> None:
    Path(path).write_text(dumps(data) + "\n", encoding="utf-8")


def dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def _int_list(value: Any, what: str) -> list[int]:
    _expect(isinstance(value, list) and all(isinstance(a, int) and not isinstance(a, bool) for a in value),
            f"{what} must be an array of integers")  # fmt: skip
    return value


# partitions


def partition_to_json(s: Partition | OrderedPartition) -> list[list[int]]:
    return s.as_lists()


def partition_from_json(data: Any, n: int | None = None) -> Partition:
    _expect(isinstance(data, list) and data, "partition must be a non-empty array of arrays")
    try:
        return Partition([_int_list(b, "partition block") for b in data], n)
    except InvalidPartition as exc:
        raise ParseError(str(exc)) from None


def ordered_partition_from_json(data: Any, n: int | None = None) -> OrderedPartition:
    _expect(isinstance(data, list) and data, "ordered partition must be a non-empty array of arrays")
    try:
        return OrderedPartition([_int_list(b, "partition block") for b in data], n)
    except InvalidPartition as exc:
        raise ParseError(str(exc)) from None


# preferences


def preference_to_json(p: Preference) -> list[list[str]]:
    return [sorted(t) for t in p.tiers]


def preference_from_json(data: Any) -> Preference:
    _expect(isinstance(data, list) and data, "preference must be a non-empty array of tiers")
    for tier in data:
        _expect(isinstance(tier, list) and tier and all(isinstance(a, str) for a in tier),
                "each tier must be a non-empty array of labels")  # fmt: skip
    try:
        return Preference(tuple(frozenset(t) for t in data))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


# committees and tables


def committee_to_json(c: Committee) -> dict:
    return {"n": c.n, "minimal": [list(m) for m in c.coalitions()]}


def committee_from_json(data: Any) -> Committee:
    _expect(isinstance(data, dict) and "n" in data and "minimal" in data,
            "committee must be an object with 'n' and 'minimal'")  # fmt: skip
    n = data["n"]
    _expect(isinstance(n, int) and 1 <= n <= 64, "'n' must be an integer in 1..64")
    _expect(isinstance(data["minimal"], list), "'minimal' must be an array")
    masks = []
    for coalition in data["minimal"]:
        members = _int_list(coalition, "coalition")
        _expect(all(1 <= a <= n for a in members), f"coalition {members} outside 1..{n}")
        masks.append(to_mask(members))
    return Committee(n, antichain(masks))


def _bits(mask: int, n: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def scf_to_json(f: ScfTable) -> dict[str, str]:
    return {_bits(m, f.n): f.outcomes[m] for m in range(1 << f.n)}


def scf_from_json(data: Any) -> ScfTable:
    _expect(isinstance(data, dict) and data, "table must be a non-empty object")
    n = len(next(iter(data)))
    _expect(1 <= n <= 20, "table keys must be bit strings of length 1..20")
    outcomes: list[str | None] = [None] * (1 << n)
    for key, value in data.items():
        _expect(len(key) == n and set(key) <= {"0", "1"}, f"bad profile key {key!r}")
        _expect(value in ("x", "y"), f"outcome for {key} must be 'x' or 'y'")
        mask = sum(1 << i for i, ch in enumerate(key) if ch == "1")
        outcomes[mask] = value
    missing = [_bits(m, n) for m, v in enumerate(outcomes) if v is None]
    _expect(not missing, f"table misses profiles {missing[:3]}")
    return ScfTable(n, tuple(outcomes))


def rule_from_json(data: Any) -> Committee | ScfTable:
    """A committee object or a table, whichever ``data`` encodes."""
    if isinstance(data, dict) and "minimal" in data:
        return committee_from_json(data)
    return scf_from_json(data)


# arenas


def _label_to_json(label: Label | None) -> Any:
    if label is None or isinstance(label, str):
        return label
    return [preference_to_json(p) for p in sorted(label, key=Preference.sort_key)]


def _label_from_json(data: Any) -> Label | None:
    if data is None or isinstance(data, str):
        return data
    _expect(isinstance(data, list) and data, "choice label must be a string or a non-empty array of preferences")
    return frozenset(preference_from_json(p) for p in data)


def arena_to_json(a: Arena) -> dict:
    nodes = []
    for z in a.nodes:
        row = {
            "id": z.id,
            "owner": "terminal" if z.terminal else z.owner,
            "parent": z.parent,
            "choice": _label_to_json(z.choice),
            "infoSet": z.info_set,
        }
        if z.terminal:
            row["outcome"] = z.outcome
        nodes.append(row)
    infos = [
        {
            "id": I.id,
            "owner": I.owner,
            "nodes": list(I.nodes),
            "choices": [_label_to_json(c) for c in I.choices],
        }
        for _, I in sorted(a.info_sets.items())
    ]
    return {"n": a.n, "alternatives": list(a.alternatives), "nodes": nodes, "infoSets": infos}


def arena_from_json(data: Any) -> Arena:
    _expect(isinstance(data, dict), "arena must be an object")
    for key in ("n", "alternatives", "nodes", "infoSets"):
        _expect(key in data, f"arena lacks {key!r}")
    try:
        nodes = []
        for row in data["nodes"]:
            owner = None if row["owner"] == "terminal" else int(row["owner"])
            nodes.append(
                Node(
                    int(row["id"]),
                    owner,
                    row["parent"],
                    _label_from_json(row.get("choice")),
                    row.get("infoSet"),
                    row.get("outcome"),
                )
            )
        infos = [
            InfoSet(
                int(r["id"]),
                int(r["owner"]),
                tuple(int(z) for z in r["nodes"]),
                tuple(_label_from_json(c) for c in r["choices"]),
            )
            for r in data["infoSets"]
        ]
        return Arena(int(data["n"]), data["alternatives"], nodes, infos)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed arena: {exc}") from None


def coalition_to_json(mask: int) -> list[int]:
    return sorted(from_mask(mask))
