"""Bratteli diagrams with multiplicity-one edges.

Vertices are ``(row, index)`` pairs with both coordinates starting at 1.
A diagram is a finite prefix of rows ``1..horizon``; infinite diagrams are
handled by materializing further rows from a generator and every query is
answered relative to the materialized horizon.
"""

from __future__ import annotations

import json
from array import array
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from . import kernels


class DiagramError(ValueError):
    pass


class Vertex(NamedTuple):
    row: int
    index: int

    def __str__(self):
        return f"{self.row}:{self.index}"


@dataclass(frozen=True)
class PathSeq:
    """A finite stretch of a complete connected sequence.

    ``stable_from`` is the first row from which the path is known to follow
    its eventually periodic tail (``None`` when nothing is known).
    """

    vertices: tuple[Vertex, ...]
    stable_from: int | None = None

    @property
    def start_row(self) -> int:
        return self.vertices[0].row

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    def at(self, row: int) -> Vertex:
        return self.vertices[row - self.start_row]

    def __len__(self):
        return len(self.vertices)


# row k -> (size of row k+1, edges (j, h) from row k to row k+1)
Generator = Callable[[int, "BratteliDiagram"], tuple[int, Iterable[tuple[int, int]]]]


class BratteliDiagram:
    """Rows of vertices joined by edges between consecutive rows.

    ``edges`` holds triples ``(k, j, h)`` for the edge ``(k, j) -> (k+1, h)``.
    Every vertex off the last row must have a child.
    """

    def __init__(self, rows: Sequence[int], edges: Iterable[tuple[int, int, int]] = (),
                 generator: Generator | None = None):
        self.rows = tuple(int(s) for s in rows)
        if any(s < 1 for s in self.rows):
            raise DiagramError("row sizes must be positive")
        self.generator = generator
        self._offset = [0]
        for s in self.rows:
            self._offset.append(self._offset[-1] + s)
        n = self._offset[-1]
        children: list[set[int]] = [set() for _ in range(n)]
        parents: list[set[int]] = [set() for _ in range(n)]
        for k, j, h in edges:
            if not 1 <= k < len(self.rows):
                raise DiagramError(f"edge from row {k} leaves the materialized rows")
            if not (1 <= j <= self.rows[k - 1] and 1 <= h <= self.rows[k]):
                raise DiagramError(f"edge ({k},{j})->({k + 1},{h}) has an unknown endpoint")
            u, w = self._offset[k - 1] + j - 1, self._offset[k] + h - 1
            children[u].add(w)
            parents[w].add(u)
        for v in range(self._offset[-2] if len(self.rows) > 1 else 0):
            if not children[v]:
                raise DiagramError(f"vertex {self.vertex(v)} has no child")
        self._children = [tuple(sorted(c)) for c in children]
        self._parents = [tuple(sorted(p)) for p in parents]
        self.child_ptr, self.child_idx = _csr(self._children)
        self.parent_ptr, self.parent_idx = _csr(self._parents)
        self._dims: list[int] | None = None

    # -- identification -------------------------------------------------
    @property
    def horizon(self) -> int:
        return len(self.rows)

    @property
    def size(self) -> int:
        return self._offset[-1]

    @property
    def final_start(self) -> int:
        """Id of the first vertex on the last row."""
        return self._offset[-2] if self.rows else 0

    def vid(self, v: Vertex | tuple[int, int]) -> int:
        k, j = v
        if not (1 <= k <= len(self.rows) and 1 <= j <= self.rows[k - 1]):
            raise DiagramError(f"unknown vertex ({k},{j})")
        return self._offset[k - 1] + j - 1

    def vertex(self, vid: int) -> Vertex:
        lo, hi = 0, len(self.rows)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._offset[mid] <= vid:
                lo = mid
            else:
                hi = mid
        return Vertex(lo + 1, vid - self._offset[lo] + 1)

    def row_vids(self, k: int) -> range:
        return range(self._offset[k - 1], self._offset[k])

    def vertices(self, row: int | None = None) -> list[Vertex]:
        if row is not None:
            return [Vertex(row, j) for j in range(1, self.rows[row - 1] + 1)]
        return [Vertex(k, j) for k, s in enumerate(self.rows, 1) for j in range(1, s + 1)]

    def __contains__(self, v) -> bool:
        k, j = v
        return 1 <= k <= len(self.rows) and 1 <= j <= self.rows[k - 1]

    def edges(self) -> list[tuple[int, int, int]]:
        out = []
        for u, cs in enumerate(self._children):
            k, j = self.vertex(u)
            out.extend((k, j, w - self._offset[k] + 1) for w in cs)
        return out

    def children(self, v) -> list[Vertex]:
        return [self.vertex(w) for w in self._children[self.vid(v)]]

    def parents(self, v) -> list[Vertex]:
        return [self.vertex(w) for w in self._parents[self.vid(v)]]

    def child_ids(self, vid: int) -> tuple[int, ...]:
        return self._children[vid]

    def parent_ids(self, vid: int) -> tuple[int, ...]:
        return self._parents[vid]

    def has_edge(self, u, w) -> bool:
        return self.vid(w) in self._children[self.vid(u)]

    # -- queries --------------------------------------------------------
    def dimension(self, v) -> int:
        if self._dims is None:
            dims = [1] * self.size
            for w in range(self.size):
                ps = self._parents[w]
                if ps:
                    dims[w] = sum(dims[u] for u in ps)
            self._dims = dims
        return self._dims[self.vid(v)]

    def mask(self, vs: Iterable) -> bytearray:
        m = bytearray(self.size)
        for v in vs:
            m[self.vid(v)] = 1
        return m

    def from_mask(self, m) -> frozenset[Vertex]:
        return frozenset(self.vertex(i) for i, b in enumerate(m) if b)

    def descendant_mask(self, seed) -> bytearray:
        return kernels.reach(self.child_ptr, self.child_idx, seed)

    def ancestor_mask(self, seed) -> bytearray:
        return kernels.reach(self.parent_ptr, self.parent_idx, seed)

    def descendants(self, v, up_to_row: int | None = None) -> frozenset[Vertex]:
        out = self.from_mask(self.descendant_mask(self.mask([v])))
        if up_to_row is None:
            return out
        if up_to_row > self.horizon:
            raise DiagramError(f"row {up_to_row} is beyond horizon {self.horizon}")
        return frozenset(w for w in out if w.row <= up_to_row)

    def ancestors(self, v) -> frozenset[Vertex]:
        return self.from_mask(self.ancestor_mask(self.mask([v])))

    def is_complete_connected(self, path: PathSeq | Sequence) -> bool:
        vs = path.vertices if isinstance(path, PathSeq) else tuple(path)
        if not vs or any(v not in self for v in vs):
            return False
        for a, b in zip(vs, vs[1:]):
            if b[0] != a[0] + 1 or not self.has_edge(a, b):
                return False
        return True

    # -- truncation and extension ---------------------------------------
    def truncate(self, horizon: int) -> "BratteliDiagram":
        if not 1 <= horizon <= self.horizon:
            raise DiagramError(f"cannot truncate to row {horizon}")
        edges = [e for e in self.edges() if e[0] < horizon]
        return BratteliDiagram(self.rows[:horizon], edges, self.generator)

    def materialize(self, horizon: int) -> "BratteliDiagram":
        """Return a diagram extended to ``horizon`` rows with the generator."""
        if horizon <= self.horizon:
            return self.truncate(horizon)
        if self.generator is None:
            raise DiagramError("diagram has no generator to extend with")
        d = self
        while d.horizon < horizon:
            k = d.horizon
            size, new = d.generator(k, d)
            edges = d.edges() + [(k, j, h) for j, h in new]
            d = BratteliDiagram(d.rows + (size,), edges, d.generator)
        return d

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rows": list(self.rows),
            "edges": [[k, j, k + 1, h] for k, j, h in sorted(self.edges())],
            "horizon": self.horizon,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BratteliDiagram":
        try:
            rows = data["rows"]
            edges = []
            for e in data["edges"]:
                k, j, k1, h = e
                if k1 != k + 1:
                    raise DiagramError(f"edge {e} skips a row")
                edges.append((k, j, h))
        except (KeyError, TypeError, ValueError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc
        d = cls(rows, edges)
        if "horizon" in data and data["horizon"] != d.horizon:
            raise DiagramError("horizon does not match the number of rows")
        return d

    def export(self, fmt: str = "json", labels: Callable[[Vertex], str] | None = None) -> bytes:
        if fmt == "json":
            return (json.dumps(self.to_json(), sort_keys=True) + "\n").encode()
        if fmt == "dot":
            return to_dot(self, labels).encode()
        raise DiagramError(f"unknown export format {fmt!r}")

    def __eq__(self, other):
        if not isinstance(other, BratteliDiagram):
            return NotImplemented
        return self.rows == other.rows and self._children == other._children

    def __hash__(self):
        return hash((self.rows, tuple(self._children)))

    def __repr__(self):
        return f"BratteliDiagram(rows={list(self.rows)}, edges={len(self.edges())})"


def to_dot(d: BratteliDiagram, labels: Callable[[Vertex], str] | None = None) -> str:
    lines = ["digraph bratteli {", "  rankdir=TB;"]
    for k in range(1, d.horizon + 1):
        names = []
        for v in d.vertices(k):
            label = f"{v.row}:{v.index}/{d.dimension(v)}"
            if labels is not None:
                label += f"\\n{labels(v)}"
            lines.append(f'  "{v}" [label="{label}"];')
            names.append(f'"{v}"')
        lines.append("  { rank=same; " + " ".join(names) + " }")
    for k, j, h in sorted(d.edges()):
        lines.append(f'  "{k}:{j}" -> "{k + 1}:{h}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _csr(adj: Sequence[Sequence[int]]) -> tuple[array, array]:
    ptr = array("q", [0])
    idx = array("q")
    for nbrs in adj:
        idx.extend(nbrs)
        ptr.append(len(idx))
    return ptr, idx
