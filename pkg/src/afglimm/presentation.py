"""Finite-horizon presentations of a space as a quotient of clopen blocks.

Block ``n`` is a totally disconnected compactum whose clopen cells exist on
rows ``k >= n``; each row refines the previous one inside every block.
The quotient map is encoded by a per-row ``touch`` relation: two cells
touch when some point of one is identified with some point of the other.
Points are eventually periodic cell paths (:class:`PointSpec`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    row: int
    pos: int  # position in the row's input list
    id: Hashable
    block: int
    parent: int | None  # position in the previous row


@dataclass(frozen=True)
class Violation:
    row: int
    cells: tuple
    rule: str

    def to_json(self):
        return {"row": self.row, "cells": [str(c) for c in self.cells], "rule": self.rule}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"status": "pass" if self.ok else "fail",
                "violations": [v.to_json() for v in self.violations]}


class QuotientPresentation:
    """Rows of cells with parents, block ids and a touch relation.

    ``rows[k-1]`` lists the cells of row ``k`` as ``(id, block, parent_id)``
    triples; ``touch[k-1]`` lists pairs of ids.  Touch is stored reflexive
    and symmetric.  ``total_blocks`` is ``None`` when blocks keep being born
    beyond the horizon.
    """

    def __init__(self, rows: Sequence[Sequence[tuple]], touch: Sequence[Iterable[tuple]],
                 total_blocks: int | None = None, generator: dict | None = None,
                 family=None, witness_rule=None):
        if len(touch) != len(rows):
            raise PresentationError("one touch list is needed per row")
        self.cells: list[list[Cell]] = []
        self._pos: list[dict] = []
        for k, row in enumerate(rows, 1):
            cells, pos = [], {}
            for i, entry in enumerate(row):
                cid, block, parent = entry
                if cid in pos:
                    raise PresentationError(f"duplicate cell id {cid!r} on row {k}")
                if parent is not None:
                    if k == 1 or parent not in self._pos[k - 2]:
                        raise PresentationError(f"cell {cid!r} on row {k} has unknown parent {parent!r}")
                    parent = self._pos[k - 2][parent]
                pos[cid] = i
                cells.append(Cell(k, i, cid, int(block), parent))
            self.cells.append(cells)
            self._pos.append(pos)
        self._raw_touch: list[list[tuple[int, int]]] = []
        self._touch: list[list[set[int]]] = []
        for k, pairs in enumerate(touch, 1):
            adj = [{i} for i in range(len(self.cells[k - 1]))]
            raw = []
            for a, b in pairs:
                try:
                    i, j = self._pos[k - 1][a], self._pos[k - 1][b]
                except KeyError as exc:
                    raise PresentationError(f"touch on row {k} names unknown cell {exc}") from None
                raw.append((i, j))
                adj[i].add(j)
                adj[j].add(i)
            self._raw_touch.append(raw)
            self._touch.append(adj)
        self._children: list[list[list[int]]] = []
        for k in range(1, len(self.cells) + 1):
            ch = [[] for _ in self.cells[k - 1]]
            if k < len(self.cells):
                for c in self.cells[k]:
                    if c.parent is not None:
                        ch[c.parent].append(c.pos)
            self._children.append(ch)
        self.total_blocks = total_blocks
        self.generator = generator
        self.family = family
        self.witness_rule = witness_rule

    @property
    def horizon(self) -> int:
        return len(self.cells)

    @property
    def n_blocks(self) -> int:
        return max((c.block for row in self.cells for c in row), default=0)

    def cell(self, row: int, pos: int) -> Cell:
        return self.cells[row - 1][pos]

    def pos_of(self, row: int, cid) -> int:
        return self._pos[row - 1][cid]

    def children(self, row: int, pos: int) -> list[int]:
        return self._children[row - 1][pos]

    def touching(self, row: int, pos: int) -> set[int]:
        return self._touch[row - 1][pos]

    def touches(self, row: int, a: int, b: int) -> bool:
        return b in self._touch[row - 1][a]

    def roots(self, block: int) -> list[int]:
        """Positions of the cells where ``block`` is born (row ``block``)."""
        if block > self.horizon:
            return []
        return [c.pos for c in self.cells[block - 1] if c.block == block]

    def ancestor(self, row: int, pos: int, target_row: int) -> int:
        while row > target_row:
            p = self.cells[row - 1][pos].parent
            if p is None:
                raise PresentationError("no ancestor on that row")
            row, pos = row - 1, p
        return pos

    def leftmost_descendant(self, row: int, pos: int, target_row: int) -> int:
        while row < target_row:
            pos = self._children[row - 1][pos][0]
            row += 1
        return pos

    def descendants_at(self, row: int, pos: int, target_row: int) -> list[int]:
        cur = [pos]
        for r in range(row, target_row):
            cur = [c for p in cur for c in self._children[r - 1][p]]
        return cur

    def truncate(self, horizon: int) -> "QuotientPresentation":
        if not 1 <= horizon <= self.horizon:
            raise PresentationError(f"cannot truncate to row {horizon}")
        rows = [[(c.id, c.block, None if c.parent is None else self.cells[c.row - 2][c.parent].id)
                 for c in row] for row in self.cells[:horizon]]
        touch = [[(self.cells[k][a].id, self.cells[k][b].id) for a, b in self._raw_touch[k]]
                 for k in range(horizon)]
        return QuotientPresentation(rows, touch, self.total_blocks, self.generator,
                                    self.family, self.witness_rule)

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        rows = []
        for k, row in enumerate(self.cells, 1):
            pairs = sorted({(min(a, b), max(a, b)) for a in range(len(row))
                            for b in self._touch[k - 1][a] if a != b})
            rows.append({
                "k": k,
                "cells": [{"id": c.id, "block": c.block,
                           "parent": None if c.parent is None else self.cells[k - 2][c.parent].id}
                          for c in row],
                "touch": [[row[a].id, row[b].id] for a, b in pairs],
            })
        out: dict[str, Any] = {"blocks": self.n_blocks, "rows": rows, "horizon": self.horizon}
        out["total_blocks"] = self.total_blocks
        if self.generator is not None:
            out["generator"] = self.generator
        return out

    @classmethod
    def from_json(cls, data: dict) -> "QuotientPresentation":
        try:
            rows_in = sorted(data["rows"], key=lambda r: r["k"])
            if [r["k"] for r in rows_in] != list(range(1, len(rows_in) + 1)):
                raise PresentationError("rows must be numbered 1..H without gaps")
            rows = [[(c["id"], c["block"], c.get("parent")) for c in r["cells"]] for r in rows_in]
            touch = [[tuple(p) for p in r.get("touch", [])] for r in rows_in]
        except (KeyError, TypeError) as exc:
            raise PresentationError(f"malformed presentation JSON: missing or bad field {exc}") from exc
        total = data["total_blocks"] if "total_blocks" in data else data.get("blocks")
        p = cls(rows, touch, total, data.get("generator"))
        if "horizon" in data and data["horizon"] != p.horizon:
            raise PresentationError("horizon does not match the number of rows")
        if "blocks" in data and data["blocks"] != p.n_blocks:
            raise PresentationError("block count does not match the cells")
        return p

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def validate(p: QuotientPresentation) -> ValidationReport:
    rep = ValidationReport()
    bad = rep.violations.append
    H = p.horizon
    for k in range(1, H + 1):
        row = p.cells[k - 1]
        for c in row:
            if c.block < 1 or c.block > k:
                bad(Violation(k, (c.id,), f"block {c.block} cannot have cells on row {k}"))
                continue
            if c.block == k and c.parent is not None:
                bad(Violation(k, (c.id,), "cell on its block's birth row has a parent"))
            if c.block < k:
                if c.parent is None:
                    bad(Violation(k, (c.id,), "partition: cell has no parent"))
                elif p.cells[k - 2][c.parent].block != c.block:
                    bad(Violation(k, (c.id,), "partition: parent lies in another block"))
            if k < H and not p.children(k, c.pos):
                bad(Violation(k, (c.id,), "partition: cell has no child"))
        if (p.total_blocks is None or k <= p.total_blocks) and not p.roots(k):
            bad(Violation(k, (), f"block {k} is empty"))
        for c in row:
            for t in p.touching(k, c.pos):
                if t < c.pos:
                    continue
                d = row[t]
                if k < H:
                    ok = any(p.touches(k + 1, x, y)
                             for x in p.children(k, c.pos) for y in p.children(k, d.pos))
                    if not ok:
                        bad(Violation(k, (c.id, d.id), "touch: no touching child pair (downward coherence)"))
                if k > 1 and c.parent is not None and d.parent is not None:
                    if not p.touches(k - 1, c.parent, d.parent):
                        bad(Violation(k, (c.id, d.id), "touch: parents do not touch (upward coherence)"))
    return rep


# -- points ----------------------------------------------------------------

@dataclass(frozen=True)
class PointSpec:
    """An eventually periodic cell path.

    Starts at root cell ``root`` (index among the block's birth-row cells)
    on row ``block``; step ``i`` picks child number ``prefix[i]`` while the
    prefix lasts, then cycles through ``cycle``.
    """

    block: int
    root: int = 0
    prefix: tuple[int, ...] = ()
    cycle: tuple[int, ...] = (0,)

    def __post_init__(self):
        if not self.cycle:
            raise PresentationError("cycle must be nonempty")

    def choice(self, step: int) -> int:
        if step < len(self.prefix):
            return self.prefix[step]
        return self.cycle[(step - len(self.prefix)) % len(self.cycle)]

    @property
    def periodic_from(self) -> int:
        """Row from which the path follows its cycle."""
        return self.block + len(self.prefix)

    def to_json(self):
        return {"block": self.block, "root": self.root,
                "prefix": list(self.prefix), "cycle": list(self.cycle)}

    @classmethod
    def from_json(cls, d):
        return cls(d["block"], d.get("root", 0), tuple(d.get("prefix", ())),
                   tuple(d.get("cycle", (0,))))

    def __str__(self):
        pre = "".join(map(str, self.prefix))
        cyc = "".join(map(str, self.cycle))
        return f"b{self.block}r{self.root}:{pre}({cyc})"


def cell_path(p: QuotientPresentation, x: PointSpec, horizon: int | None = None) -> list[int]:
    """Cell positions of ``x`` on rows ``x.block .. horizon``."""
    H = p.horizon if horizon is None else horizon
    roots = p.roots(x.block)
    if not 0 <= x.root < len(roots):
        raise PresentationError(f"point {x} names a missing root")
    path = [roots[x.root]]
    for step, k in enumerate(range(x.block, H)):
        ch = p.children(k, path[-1])
        c = x.choice(step)
        if not 0 <= c < len(ch):
            raise PresentationError(f"point {x} picks child {c} of a cell with {len(ch)} children")
        path.append(ch[c])
    return path


def leftmost_point(p: QuotientPresentation, row: int, pos: int) -> PointSpec:
    """The cell's sample point: always take the first child."""
    block = p.cell(row, pos).block
    chain = [pos]
    for r in range(row, block, -1):
        chain.append(p.cell(r, chain[-1]).parent)
    chain.reverse()
    root = p.roots(block).index(chain[0])
    prefix = tuple(p.children(r, chain[i]).index(chain[i + 1])
                   for i, r in enumerate(range(block, row)))
    return PointSpec(block, root, prefix, (0,))


def point_through(p: QuotientPresentation, row: int, pos: int, tail: Sequence[int] = (0,)) -> PointSpec:
    """Point whose path passes through the cell, then cycles through ``tail``."""
    x = leftmost_point(p, row, pos)
    return PointSpec(x.block, x.root, x.prefix, tuple(tail))


@dataclass(frozen=True)
class TouchVerdict:
    status: str  # "identified" | "separated" | "unknown"
    row: int | None = None
    horizon: int = 0

    def to_json(self):
        return {"status": self.status, "row": self.row, "horizon": self.horizon}


def persistent_touch(p: QuotientPresentation, a: PointSpec, b: PointSpec,
                     horizon: int | None = None, window: int = 3) -> TouchVerdict:
    """Compare two points by whether their cells touch on every row.

    ``separated`` at the first row where the cells do not touch.  If they
    touch all the way to the horizon, ``identified`` is returned once both
    points have followed their cycles for at least ``window`` rows,
    otherwise ``unknown``.
    """
    H = p.horizon if horizon is None else horizon
    start = max(a.block, b.block)
    if start > H:
        return TouchVerdict("unknown", None, H)
    pa, pb = cell_path(p, a, H), cell_path(p, b, H)
    for k in range(start, H + 1):
        if not p.touches(k, pa[k - a.block], pb[k - b.block]):
            return TouchVerdict("separated", k, H)
    if a == b or max(a.periodic_from, b.periodic_from) <= H - window:
        return TouchVerdict("identified", None, H)
    return TouchVerdict("unknown", None, H)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            groups.setdefault(self.find(i), []).append(i)
        return sorted(groups.values())


@dataclass
class PointPartition:
    classes: list[list[int]]
    unknown_pairs: list[tuple[int, int]]
    horizon: int

    def to_json(self):
        return {"classes": self.classes, "unknown_pairs": [list(p) for p in self.unknown_pairs],
                "horizon": self.horizon}


def point_classes(p: QuotientPresentation, sample: Sequence[PointSpec],
                  horizon: int | None = None, window: int = 3) -> PointPartition:
    H = p.horizon if horizon is None else horizon
    uf = UnionFind(len(sample))
    unknown = []
    for i in range(len(sample)):
        for j in range(i + 1, len(sample)):
            v = persistent_touch(p, sample[i], sample[j], H, window)
            if v.status == "identified":
                uf.union(i, j)
            elif v.status == "unknown":
                unknown.append((i, j))
    return PointPartition(uf.classes(), unknown, H)


# -- ingestion from samples ------------------------------------------------

@dataclass(frozen=True)
class SamplePoint:
    id: Hashable
    block: int
    label: Hashable
    values: tuple[float, ...]


@dataclass
class SampledSpace:
    """Finite clouds for ``X_n \\ X_{n-1}`` with quotient labels and function values.

    ``schedule[k-1]`` is how many functions must be resolved on row ``k``
    (default: ``min(k, M)``).
    """

    points: list[SamplePoint]
    schedule: list[int] | None = None

    @property
    def n_functions(self) -> int:
        return len(self.points[0].values) if self.points else 0

    @classmethod
    def from_json(cls, data: dict) -> "SampledSpace":
        try:
            pts = [SamplePoint(d["id"], int(d["block"]), d.get("label", d["id"]),
                               tuple(float(v) for v in d["values"])) for d in data["points"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise PresentationError(f"malformed sample JSON: {exc}") from exc
        return cls(pts, data.get("schedule"))


def _split(points: list[SamplePoint], m: int, width: float) -> list[list[SamplePoint]]:
    """Cut a cell into runs of function ``m`` with oscillation < ``width``."""
    pts = sorted(points, key=lambda s: (s.values[m], str(s.id)))
    out, cur, lo = [], [], None
    for s in pts:
        if cur and s.values[m] - lo >= width:
            out.append(cur)
            cur = []
        if not cur:
            lo = s.values[m]
        cur.append(s)
    if cur:
        out.append(cur)
    return out


def build_from_samples(space: SampledSpace, depth: int) -> QuotientPresentation:
    """Oscillation partitions of each block's cloud, rows ``1..depth``.

    Row ``k`` splits every row ``k-1`` cell so that each scheduled function
    oscillates by less than ``2**-k`` on every cell; block ``n`` enters on
    row ``n`` by splitting its whole cloud.  Cells touch when they hold
    points with a common quotient label.
    """
    if not space.points:
        raise PresentationError("empty sample")
    M = space.n_functions
    if any(len(s.values) != M for s in space.points):
        raise PresentationError("every point needs the same number of function values")
    nb = max(s.block for s in space.points)
    blocks = {n: [s for s in space.points if s.block == n] for n in range(1, nb + 1)}
    for n, pts in blocks.items():
        if not pts:
            raise PresentationError(f"empty block {n}")
    schedule = space.schedule or [min(k, M) for k in range(1, depth + 1)]
    if len(schedule) < depth:
        schedule = list(schedule) + [schedule[-1]] * (depth - len(schedule))
    if any(b < a for a, b in zip(schedule, schedule[1:])) or any(s > M for s in schedule):
        raise PresentationError("function schedule must be nondecreasing and within range")

    def refine(pts, k):
        parts = [pts]
        for m in range(schedule[k - 1]):
            parts = [q for part in parts for q in _split(part, m, 2.0 ** -k)]
        return parts

    rows, touch = [], []
    prev: list[tuple[str, int, list[SamplePoint]]] = []
    for k in range(1, depth + 1):
        cur = []
        for cid, n, pts in prev:
            for i, part in enumerate(refine(pts, k)):
                cur.append((f"{cid}.{i}", n, part, cid))
        if k in blocks:
            for i, part in enumerate(refine(blocks[k], k)):
                cur.append((f"{k}:{i}", k, part, None))
        rows.append([(cid, n, parent) for cid, n, _, parent in cur])
        by_label: dict = {}
        for cid, _, pts, _ in cur:
            for s in pts:
                by_label.setdefault(s.label, set()).add(cid)
        pairs = sorted({(a, b) for ids in by_label.values() for a in ids for b in ids if a < b})
        touch.append(pairs)
        prev = [(cid, n, pts) for cid, n, pts, _ in cur]
    total = nb if nb <= depth else None
    return QuotientPresentation(rows, touch, total_blocks=total,
                                generator={"name": "samples", "depth": depth})
