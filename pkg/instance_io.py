# instance_io.py
"""
Text formats: the YAML instance file and the plain graph file used by reduce-mis.
"""
import logging
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from instance_gen import SimpleGraph
from tree_core import (
    UNBOUNDED,
    Capacity,
    Instance,
    InstanceFormatError,
    MSTBLError,
    build_tree,
    make_capacities,
    make_subtree,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
UNBOUNDED_TOKEN = "unbounded"

CapacityEntry = Union[int, Literal["unbounded"]]


class TreeSection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    root: int
    # parents[v] is the parent of v; the root lists itself
    parents: List[int]


class CapacitySection(BaseModel):
    model_config = ConfigDict(extra="forbid")
    vertices: List[CapacityEntry]
    # edges[v] is the capacity of the edge above v; null at the root
    edges: List[Optional[CapacityEntry]]


class SubtreeEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")
    vertices: List[int]
    demand: int = Field(1, ge=1)


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")
    format_version: int
    tree: TreeSection
    capacities: CapacitySection
    subtrees: List[SubtreeEntry]


def _to_entry(cap: Capacity) -> CapacityEntry:
    return UNBOUNDED_TOKEN if cap is UNBOUNDED else cap


def _from_entry(entry: CapacityEntry) -> Capacity:
    return UNBOUNDED if entry == UNBOUNDED_TOKEN else entry


def serialize_instance(instance: Instance) -> str:
    tree = instance.tree
    caps = instance.capacities
    document = InstanceFile(
        format_version=FORMAT_VERSION,
        tree=TreeSection(root=tree.root, parents=list(tree.parent)),
        capacities=CapacitySection(
            vertices=[_to_entry(c) for c in caps.vertex_cap],
            edges=[None if c is None else _to_entry(c) for c in caps.edge_cap],
        ),
        subtrees=[SubtreeEntry(vertices=sorted(s.vertices), demand=s.demand) for s in instance.subtrees],
    )
    return yaml.safe_dump(document.model_dump(), sort_keys=False, default_flow_style=None)


def _describe_validation_error(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"field {location}: {first['msg']}"


def parse_instance(text: str) -> Instance:
    try:
        raw: Any = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        location = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else None
        raise InstanceFormatError(f"malformed YAML: {getattr(e, 'problem', e)}", location) from e
    if not isinstance(raw, dict):
        raise InstanceFormatError("instance file must be a mapping")

    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise InstanceFormatError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION})", "field format_version"
        )
    try:
        document = InstanceFile.model_validate(raw)
    except ValidationError as e:
        raise InstanceFormatError(_describe_validation_error(e)) from e

    try:
        tree = build_tree(dict(enumerate(document.tree.parents)), document.tree.root)
    except MSTBLError as e:
        raise InstanceFormatError(str(e), "field tree") from e

    caps = document.capacities
    if len(caps.vertices) != tree.vertex_count or len(caps.edges) != tree.vertex_count:
        raise InstanceFormatError(
            f"expected {tree.vertex_count} vertex and edge capacity entries, "
            f"got {len(caps.vertices)} and {len(caps.edges)}",
            "field capacities",
        )
    if caps.edges[tree.root] is not None:
        raise InstanceFormatError("the root has no parent edge; its entry must be null", "field capacities.edges")
    missing = [v for v in tree.edges if caps.edges[v] is None]
    if missing:
        raise InstanceFormatError(f"edges above vertices {missing} have no capacity", "field capacities.edges")
    try:
        capacities = make_capacities(
            tree,
            {v: _from_entry(c) for v, c in enumerate(caps.vertices)},
            {v: _from_entry(caps.edges[v]) for v in tree.edges},
        )
    except MSTBLError as e:
        raise InstanceFormatError(str(e), "field capacities") from e

    subtrees = []
    for i, entry in enumerate(document.subtrees):
        try:
            subtrees.append(make_subtree(tree, entry.vertices, entry.demand))
        except MSTBLError as e:
            raise InstanceFormatError(str(e), f"subtree {i}") from e
    return Instance(tree, tuple(subtrees), capacities)


def parse_graph(text: str) -> SimpleGraph:
    """First non-blank line: vertex count. Then one `u v` pair per line."""
    lines = [(number, line.split()) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise InstanceFormatError("empty graph file")
    first_number, first = lines[0]
    if len(first) != 1 or not first[0].isdigit():
        raise InstanceFormatError("first line must be the vertex count", f"line {first_number}")
    vertex_count = int(first[0])
    edges = []
    for number, tokens in lines[1:]:
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise InstanceFormatError(f"expected 'u v', got {' '.join(tokens)!r}", f"line {number}")
        edges.append((int(tokens[0]), int(tokens[1])))
    try:
        return SimpleGraph.from_edges(vertex_count, edges)
    except MSTBLError as e:
        raise InstanceFormatError(str(e)) from e


def serialize_graph(graph: SimpleGraph) -> str:
    lines = [str(graph.vertex_count)] + [f"{u} {v}" for u, v in sorted(graph.edges)]
    return "\n".join(lines) + "\n"


def summarize_instance(instance: Instance) -> Dict[str, Any]:
    return {
        "vertices": instance.tree.vertex_count,
        "subtrees": instance.n,
        "M": instance.M,
        "total_demand": sum(s.demand for s in instance.subtrees),
    }
