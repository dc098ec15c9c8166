"""
cosettree — Tree and profile files

Design patterns:
  - Adapter: TreeDocument (wire shape) <-> LevelTree (engine shape)

Readers report the JSON path of the first offending value; writers emit
levels and nodes in canonical order.
"""

from __future__ import annotations

import json
from typing import List, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from cosettree.errors import ParseError, StructureMismatch
from cosettree.models import NodeCoords, ProfileDocument, TreeDocument
from cosettree.trees.engine import LevelStructure, LevelTree, Node

D = TypeVar("D", bound=BaseModel)


def _validated(model: Type[D], text: str) -> D:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", position=exc.pos, text=text) from exc
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first["loc"]) or "<root>"
        raise ParseError(first["msg"], position=path, text=text) from exc


# ── Trees ────────────────────────────────────────────────


def node_coords(structure: LevelStructure, node: Node, n: int) -> NodeCoords:
    """Flat node -> per-level coordinates (bare ints on single-factor levels)."""
    out: NodeCoords = []
    for level, coord in zip(structure.levels, structure.split(node, n)):
        out.append(coord[0] if level.rank == 1 else coord)
    return out


def tree_to_document(s: LevelTree) -> TreeDocument:
    ls = s.structure
    return TreeDocument(
        levels=[list(level.orders) for level in ls.levels],
        nodes={str(n): [node_coords(ls, node, n) for node in s.nodes(n)] for n in range(1, s.depth + 1)},
    )


def tree_from_document(doc: TreeDocument, *, cap: Optional[int] = None) -> LevelTree:
    try:
        ls = LevelStructure.of(*doc.levels)
    except ValidationError as exc:
        raise ParseError(exc.errors()[0]["msg"], position="levels") from exc
    levels: List[List[Node]] = [[] for _ in range(ls.depth)]
    for key, nodes in doc.nodes.items():
        if not key.isdigit() or not 1 <= int(key) <= ls.depth:
            raise ParseError(f"node length must be 1..{ls.depth}", position=f"nodes.{key}")
        n = int(key)
        for i, coords in enumerate(nodes):
            if len(coords) != n:
                raise ParseError(f"node of length {len(coords)} listed under {n}", position=f"nodes.{key}[{i}]")
            try:
                levels[n - 1].append(ls.flatten(coords))
            except StructureMismatch as exc:
                raise ParseError(str(exc), position=f"nodes.{key}[{i}]") from exc
    for n in range(2, ls.depth + 1):
        parents = set(levels[n - 2])
        for i, node in enumerate(levels[n - 1]):
            if ls.restrict(node, n - 1) not in parents:
                raise ParseError("tree is not prefix-closed: parent missing", position=f"nodes.{n}[{i}]")
    try:
        return LevelTree(ls, levels, cap=cap)
    except StructureMismatch as exc:
        raise ParseError(str(exc), position="nodes") from exc


def load_tree(text: str, *, cap: Optional[int] = None) -> LevelTree:
    return tree_from_document(_validated(TreeDocument, text), cap=cap)


# ── Witness profiles ─────────────────────────────────────


def load_profile(text: str) -> List[List[int]]:
    return _validated(ProfileDocument, text).profile
