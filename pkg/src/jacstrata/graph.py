"""Vertex-weighted multigraphs with legs: the dual graphs of nodal curves.

A graph here is a finite multigraph (loops and parallel edges allowed) whose
vertices carry a nonnegative integer weight and a nonnegative leg count.
Edge ids are stable: deleting edges never renumbers the survivors, so
orientations on different spanning subgraphs of the same graph can be
compared edge by edge.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

EdgeSubset = frozenset  # sets of edge ids of a fixed ambient graph


class GraphError(ValueError):
    """Unknown ids, violated preconditions, or malformed graph data."""


class GraphFormatError(GraphError):
    """Malformed graph document (bad fields, types, or references)."""


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable multigraph with per-vertex weight and leg count.

    ``vertex_rows`` holds (id, weight, legs) triples sorted by id;
    ``edge_rows`` holds (edge id, u, v) triples sorted by edge id, with
    endpoint pairs normalized so u <= v.  Loops repeat the vertex.
    """

    vertex_rows: tuple[tuple[str, int, int], ...]
    edge_rows: tuple[tuple[str, str, str], ...]

    @classmethod
    def build(
        cls,
        vertices: Iterable[tuple[str, int, int]],
        edges: Iterable[tuple[str, str, str]] = (),
    ) -> "WeightedGraph":
        vrows = []
        seen = set()
        for vid, weight, legs in vertices:
            vid = str(vid)
            if vid in seen:
                raise GraphError(f"duplicate vertex id {vid!r}")
            if weight < 0 or legs < 0:
                raise GraphError(f"vertex {vid!r}: weight and legs must be >= 0")
            seen.add(vid)
            vrows.append((vid, int(weight), int(legs)))
        erows = []
        eseen = set()
        for eid, u, v in edges:
            eid, u, v = str(eid), str(u), str(v)
            if eid in eseen:
                raise GraphError(f"duplicate edge id {eid!r}")
            if u not in seen or v not in seen:
                raise GraphError(f"edge {eid!r}: endpoint not a declared vertex")
            eseen.add(eid)
            erows.append((eid, min(u, v), max(u, v)))
        return cls(tuple(sorted(vrows)), tuple(sorted(erows)))

    @classmethod
    def from_edges(
        cls,
        pairs: Sequence[tuple[str, str]],
        weights: Mapping[str, int] | None = None,
        legs: Mapping[str, int] | None = None,
        extra_vertices: Iterable[str] = (),
    ) -> "WeightedGraph":
        """Build from endpoint pairs; edge ids are e0, e1, ... in input order."""
        weights = dict(weights or {})
        legs = dict(legs or {})
        vids = sorted(
            {str(x) for pair in pairs for x in pair}
            | {str(x) for x in extra_vertices}
            | set(map(str, weights))
            | set(map(str, legs))
        )
        vertices = [(v, weights.get(v, 0), legs.get(v, 0)) for v in vids]
        edges = [(f"e{k}", str(u), str(v)) for k, (u, v) in enumerate(pairs)]
        return cls.build(vertices, edges)

    # -- basic views ------------------------------------------------------

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        return tuple(row[0] for row in self.vertex_rows)

    @cached_property
    def weight(self) -> dict[str, int]:
        return {vid: w for vid, w, _ in self.vertex_rows}

    @cached_property
    def legs(self) -> dict[str, int]:
        return {vid: l for vid, _, l in self.vertex_rows}

    @cached_property
    def edges(self) -> dict[str, tuple[str, str]]:
        return {eid: (u, v) for eid, u, v in self.edge_rows}

    @cached_property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(eid for eid, _, _ in self.edge_rows)

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_rows)

    @property
    def n_edges(self) -> int:
        return len(self.edge_rows)

    def is_loop(self, eid: str) -> bool:
        u, v = self.edges[eid]
        return u == v

    def endpoints(self, eid: str) -> tuple[str, str]:
        try:
            return self.edges[eid]
        except KeyError:
            raise GraphError(f"unknown edge id {eid!r}") from None

    def valence(self, vid: str) -> int:
        """Edge endpoints at vid (loops count twice) plus legs."""
        val = self.legs[vid]
        for _, u, v in self.edge_rows:
            if u == vid:
                val += 1
            if v == vid:
                val += 1
        return val

    @cached_property
    def total_legs(self) -> int:
        return sum(l for _, _, l in self.vertex_rows)

    def __repr__(self) -> str:  # compact, deterministic
        vs = ",".join(
            f"{vid}" + (f"(h={w},n={l})" if (w or l) else "")
            for vid, w, l in self.vertex_rows
        )
        es = ",".join(f"{u}-{v}" for _, u, v in self.edge_rows)
        return f"WeightedGraph[{vs}|{es}]"


# -- connectivity -----------------------------------------------------------


def _adjacency(G: WeightedGraph, skip: frozenset[str] = frozenset()) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in G.vertices}
    for eid, u, v in G.edge_rows:
        if eid in skip:
            continue
        adj[u].add(v)
        adj[v].add(u)
    return adj


def connected_components(
    G: WeightedGraph, skip: frozenset[str] = frozenset()
) -> list[frozenset[str]]:
    """Vertex sets of the connected components of G minus the skipped edges."""
    adj = _adjacency(G, skip)
    seen: set[str] = set()
    comps = []
    for start in G.vertices:
        if start in seen:
            continue
        stack = [start]
        comp = {start}
        seen.add(start)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    seen.add(y)
                    stack.append(y)
        comps.append(frozenset(comp))
    return comps


def is_connected(G: WeightedGraph) -> bool:
    return len(connected_components(G)) <= 1


def first_betti(G: WeightedGraph) -> int:
    """|E| - |V| + (number of connected components); legs are ignored."""
    return G.n_edges - G.n_vertices + len(connected_components(G))


def genus(G: WeightedGraph) -> int:
    """First Betti number plus the sum of the vertex weights."""
    return first_betti(G) + sum(w for _, w, _ in G.vertex_rows)


def is_stable(G: WeightedGraph, mode: str = "pointed") -> bool:
    """True iff every vertex satisfies 2*weight - 2 + valence > 0.

    Valence counts loops twice and legs once; this is the unique local
    condition making the one-vertex three-leg graph the smallest stable
    graph and edge contraction stability-preserving.
    """
    if mode != "pointed":
        raise GraphError(f"unknown stability mode {mode!r}")
    return all(2 * G.weight[v] - 2 + G.valence(v) > 0 for v in G.vertices)


def bridges(G: WeightedGraph) -> EdgeSubset:
    """Non-loop edges whose deletion increases the component count."""
    base = len(connected_components(G))
    out = set()
    for eid, u, v in G.edge_rows:
        if u == v:
            continue
        if len(connected_components(G, frozenset({eid}))) > base:
            out.add(eid)
    return frozenset(out)


# -- deletion and contraction -----------------------------------------------


def _check_edge_subset(G: WeightedGraph, S: Iterable[str]) -> frozenset[str]:
    S = frozenset(str(e) for e in S)
    unknown = S - set(G.edge_ids)
    if unknown:
        raise GraphError(f"unknown edge id {sorted(unknown)[0]!r}")
    return S


def delete_edges(G: WeightedGraph, S: Iterable[str]) -> WeightedGraph:
    """Remove the edges in S; all vertices, weights, and legs are kept."""
    S = _check_edge_subset(G, S)
    return WeightedGraph(
        G.vertex_rows, tuple(row for row in G.edge_rows if row[0] not in S)
    )


def contract_edges(G: WeightedGraph, S: Iterable[str]) -> WeightedGraph:
    """Contract every edge of S.

    A non-loop contraction merges the endpoints (weights and legs add); a
    loop contraction removes the loop and adds 1 to its vertex weight, so
    genus is preserved.  The result does not depend on the contraction
    order: each component C of the subgraph (V, S) collapses to one vertex
    of weight sum(h(v) for v in C) + b1(C), named after its smallest vertex.
    """
    S = _check_edge_subset(G, S)
    parent = {v: v for v in G.vertices}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    n_merges = 0
    for eid, u, v in G.edge_rows:
        if eid not in S:
            continue
        ru, rv = find(u), find(v)
        if ru != rv:
            lo, hi = min(ru, rv), max(ru, rv)
            parent[hi] = lo
            n_merges += 1
    groups: dict[str, list[str]] = {}
    for v in G.vertices:
        groups.setdefault(find(v), []).append(v)
    # b1 of each S-component spreads as +1 weight per independent S-cycle
    extra = {rep: 0 for rep in groups}
    spent = {rep: len(groups[rep]) - 1 for rep in groups}  # merges used per group
    for eid, u, v in G.edge_rows:
        if eid in S:
            extra[find(u)] += 1
    vertex_rows = []
    for rep, members in groups.items():
        w = sum(G.weight[m] for m in members) + extra[rep] - spent[rep]
        l = sum(G.legs[m] for m in members)
        vertex_rows.append((min(members), w, l))
    edge_rows = []
    for eid, u, v in G.edge_rows:
        if eid in S:
            continue
        a, b = min(groups[find(u)]), min(groups[find(v)])
        edge_rows.append((eid, min(a, b), max(a, b)))
    return WeightedGraph(tuple(sorted(vertex_rows)), tuple(sorted(edge_rows)))


def connected_spanning_subgraph_poset(G: WeightedGraph):
    """The poset C(G) of edge subsets S with G-S connected.

    Ordered by reverse inclusion: the maximal element is the empty set, the
    minimal elements are the complements of spanning trees.  The rank of S
    is genus(G-S).
    """
    from .poset import Poset, poset_from_masks

    if not is_connected(G):
        raise GraphError("C(G) requires a connected graph")
    eids = G.edge_ids
    m = len(eids)
    masks = []
    for mask in range(1 << m):
        skip = frozenset(eids[k] for k in range(m) if mask >> k & 1)
        if len(connected_components(G, skip)) == 1:
            masks.append(mask)
    elements = [
        frozenset(eids[k] for k in range(m) if mask >> k & 1) for mask in masks
    ]
    order = sorted(range(len(masks)), key=lambda i: (len(elements[i]), sorted(elements[i])))
    masks = [masks[i] for i in order]
    elements = [elements[i] for i in order]
    # S <= S' iff S is a superset of S'
    return poset_from_masks(tuple(elements), masks, superset_below=True)


# -- isomorphism --------------------------------------------------------------


def _refined_colors(G: WeightedGraph) -> dict[str, tuple]:
    """Iterated color refinement; colors are isomorphism-invariant."""
    loops = {v: 0 for v in G.vertices}
    mult: dict[str, dict[str, int]] = {v: {} for v in G.vertices}
    for _, u, v in G.edge_rows:
        if u == v:
            loops[u] += 1
        else:
            mult[u][v] = mult[u].get(v, 0) + 1
            mult[v][u] = mult[v].get(u, 0) + 1
    colors = {
        v: (G.weight[v], G.legs[v], loops[v], sum(mult[v].values()))
        for v in G.vertices
    }
    for _ in range(G.n_vertices):
        new = {
            v: (colors[v], tuple(sorted((colors[u], k) for u, k in mult[v].items())))
            for v in G.vertices
        }
        if len(set(new.values())) == len(set(colors.values())):
            break
        colors = new
    return colors


def _encode(G: WeightedGraph, order: Sequence[str]) -> tuple:
    idx = {v: i for i, v in enumerate(order)}
    attrs = tuple((G.weight[v], G.legs[v]) for v in order)
    pairs = sorted(
        (min(idx[u], idx[v]), max(idx[u], idx[v])) for _, u, v in G.edge_rows
    )
    return (G.n_vertices, G.n_edges, attrs, tuple(pairs))


def canonical_form(G: WeightedGraph) -> tuple:
    """A hashable key equal on two graphs iff they are isomorphic.

    Isomorphisms must preserve weights, leg counts, and edge multiplicities
    (including loops).  Vertices are bucketed by refined color; the key is
    the minimum encoding over all color-respecting vertex orders.
    """
    colors = _refined_colors(G)
    buckets: dict[tuple, list[str]] = {}
    for v in G.vertices:
        buckets.setdefault(colors[v], []).append(v)
    classes = [sorted(buckets[c]) for c in sorted(buckets)]
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for perm in perms for v in perm]
        enc = _encode(G, order)
        if best is None or enc < best:
            best = enc
    assert best is not None
    return best


def is_isomorphic(G: WeightedGraph, H: WeightedGraph) -> bool:
    if G.n_vertices != H.n_vertices or G.n_edges != H.n_edges:
        return False
    return canonical_form(G) == canonical_form(H)


# -- file format --------------------------------------------------------------

_VERTEX_FIELDS = {"id", "weight", "legs"}
_EDGE_FIELDS = {"id", "ends"}
_TOP_FIELDS = {"vertices", "edges", "lengths"}


def _require_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def parse_graph(data) -> tuple[WeightedGraph, dict[str, float] | None]:
    """Parse a graph document; returns (graph, lengths or None).

    Document shape: {"vertices": [{"id", "weight", "legs"}],
    "edges": [{"id", "ends": [u, v]}]} with an optional "lengths" mapping
    for metric graphs.  Unknown fields are rejected.
    """
    if not isinstance(data, dict):
        raise GraphFormatError("top level: expected an object")
    unknown = set(data) - _TOP_FIELDS
    if unknown:
        raise GraphFormatError(f"top level: unknown field {sorted(unknown)[0]!r}")
    if "vertices" not in data:
        raise GraphFormatError("top level: missing field 'vertices'")
    vertices = []
    for i, row in enumerate(data["vertices"]):
        where = f"vertices[{i}]"
        if not isinstance(row, dict):
            raise GraphFormatError(f"{where}: expected an object")
        bad = set(row) - _VERTEX_FIELDS
        if bad:
            raise GraphFormatError(f"{where}: unknown field {sorted(bad)[0]!r}")
        if "id" not in row or not isinstance(row["id"], str):
            raise GraphFormatError(f"{where}: missing or non-string 'id'")
        w = _require_int(row.get("weight", 0), f"{where}.weight")
        l = _require_int(row.get("legs", 0), f"{where}.legs")
        if w < 0 or l < 0:
            raise GraphFormatError(f"{where}: weight and legs must be >= 0")
        vertices.append((row["id"], w, l))
    edges = []
    for i, row in enumerate(data.get("edges", [])):
        where = f"edges[{i}]"
        if not isinstance(row, dict):
            raise GraphFormatError(f"{where}: expected an object")
        bad = set(row) - _EDGE_FIELDS
        if bad:
            raise GraphFormatError(f"{where}: unknown field {sorted(bad)[0]!r}")
        if "id" not in row or not isinstance(row["id"], str):
            raise GraphFormatError(f"{where}: missing or non-string 'id'")
        ends = row.get("ends")
        if (
            not isinstance(ends, list)
            or len(ends) != 2
            or not all(isinstance(x, str) for x in ends)
        ):
            raise GraphFormatError(f"{where}.ends: expected a pair of vertex ids")
        edges.append((row["id"], ends[0], ends[1]))
    try:
        G = WeightedGraph.build(vertices, edges)
    except GraphError as exc:
        raise GraphFormatError(str(exc)) from None
    lengths = None
    if "lengths" in data:
        raw = data["lengths"]
        if not isinstance(raw, dict):
            raise GraphFormatError("lengths: expected an object")
        lengths = {}
        for eid, val in raw.items():
            if eid not in G.edges:
                raise GraphFormatError(f"lengths: unknown edge id {eid!r}")
            if val == "inf":
                lengths[eid] = float("inf")
            elif isinstance(val, (int, float)) and not isinstance(val, bool):
                lengths[eid] = float(val)
            else:
                raise GraphFormatError(f"lengths[{eid!r}]: expected a number or 'inf'")
    return G, lengths


def load_graph_file(path) -> tuple[WeightedGraph, dict[str, float] | None]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return parse_graph(data)


def graph_to_dict(G: WeightedGraph) -> dict:
    """Round-trips through parse_graph."""
    return {
        "vertices": [
            {"id": vid, "weight": w, "legs": l} for vid, w, l in G.vertex_rows
        ],
        "edges": [
            {"id": eid, "ends": [u, v]} for eid, u, v in G.edge_rows
        ],
    }
