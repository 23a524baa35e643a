"""Compile a quotient presentation into an indexed Bratteli diagram.

Row ``k`` of the diagram lists the cells of blocks ``1..k`` on that row,
block by block.  ``(k, j) -> (k+1, h)`` is an edge when the parent of cell
``h`` has index at most ``j`` and some child of cell ``j`` touches ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import BratteliDiagram, PathSeq, Vertex
from .ideals import (IdealSubdiagram, block_unit_quotient_norm, is_ideal_subdiagram,
                     is_prime_complement, largest_ideal_avoiding_path)
from .presentation import PointSpec, QuotientPresentation, cell_path, validate


class ConstructionError(RuntimeError):
    """An invariant that the construction guarantees has failed."""


@dataclass(frozen=True)
class IndexTable:
    """Upper indexing of the cells.

    ``r[k][p]`` is the last index used by blocks ``<= p`` on row ``k``
    (``r[k][0] = 0``); ``index[k-1][pos]`` and ``cell[k-1][j-1]`` translate
    between cell positions and 1-based indices.
    """

    r: tuple[tuple[int, ...], ...]
    index: tuple[tuple[int, ...], ...]
    cell: tuple[tuple[int, ...], ...]

    def r_of(self, k: int, p: int) -> int:
        row = self.r[k - 1]
        return row[min(p, len(row) - 1)]

    def to_json(self, pres: QuotientPresentation) -> dict:
        return {
            "r": {str(k): list(row) for k, row in enumerate(self.r, 1)},
            "vertices": [
                {"k": k, "j": j, "block": pres.cell(k, pos).block, "cell": pres.cell(k, pos).id}
                for k, row in enumerate(self.cell, 1) for j, pos in enumerate(row, 1)
            ],
        }


def assign_indices(p: QuotientPresentation, horizon: int | None = None) -> IndexTable:
    """Blocks in order; a newborn block keeps input order; older blocks list
    the children of each parent in parent-index order."""
    H = p.horizon if horizon is None else horizon
    r_rows, index_rows, cell_rows = [], [], []
    for k in range(1, H + 1):
        order: list[int] = []
        r = [0]
        for blk in range(1, k + 1):
            if blk == k:
                order += [c.pos for c in p.cells[k - 1] if c.block == k]
            else:
                prev = cell_rows[k - 2]
                for ppos in prev:
                    if p.cell(k - 1, ppos).block == blk:
                        order += p.children(k - 1, ppos)
            r.append(len(order))
        if len(order) != len(p.cells[k - 1]):
            raise ConstructionError(f"row {k}: cells are not covered by the block partition")
        idx = [0] * len(order)
        for j, pos in enumerate(order, 1):
            idx[pos] = j
        r_rows.append(tuple(r))
        index_rows.append(tuple(idx))
        cell_rows.append(tuple(order))
    return IndexTable(tuple(r_rows), tuple(index_rows), tuple(cell_rows))


class ConstructedDiagram:
    def __init__(self, presentation: QuotientPresentation, table: IndexTable,
                 diagram: BratteliDiagram):
        self.presentation = presentation
        self.table = table
        self.diagram = diagram
        self._block_ideals: dict[int, IdealSubdiagram] = {}

    @property
    def horizon(self) -> int:
        return self.diagram.horizon

    def block_of(self, v) -> int:
        k, j = v
        return self.presentation.cell(k, self.table.cell[k - 1][j - 1]).block

    def cell_of(self, v) -> int:
        k, j = v
        return self.table.cell[k - 1][j - 1]

    def vertex_of(self, row: int, pos: int) -> Vertex:
        return Vertex(row, self.table.index[row - 1][pos])

    def point_path(self, x: PointSpec) -> PathSeq:
        cells = cell_path(self.presentation, x, self.horizon)
        vs = tuple(self.vertex_of(k, pos) for k, pos in enumerate(cells, x.block))
        return PathSeq(vs, stable_from=x.periodic_from)

    def block_ideal(self, n: int) -> IdealSubdiagram:
        if n not in self._block_ideals:
            self._block_ideals[n] = block_ideal(self, n)
        return self._block_ideals[n]

    def labels(self, v: Vertex) -> str:
        c = self.presentation.cell(v.row, self.cell_of(v))
        return f"b{c.block} {c.id}"

    def table_json(self) -> dict:
        return self.table.to_json(self.presentation)


def build_diagram(p: QuotientPresentation, table: IndexTable | None = None,
                  horizon: int | None = None) -> ConstructedDiagram:
    H = p.horizon if horizon is None else horizon
    if table is None:
        table = assign_indices(p, H)
    edges = []
    for k in range(1, H):
        nxt = p.cells[k]
        for j, pos in enumerate(table.cell[k - 1], 1):
            targets = set()
            for child in p.children(k, pos):
                targets |= p.touching(k + 1, child)
            for hpos in targets:
                par = nxt[hpos].parent
                if par is not None and table.index[k - 1][par] <= j:
                    edges.append((k, j, table.index[k][hpos]))
    d = BratteliDiagram([len(row) for row in table.cell], edges)
    return ConstructedDiagram(p, table, d)


def construct(p: QuotientPresentation, horizon: int | None = None,
              check: bool = True) -> ConstructedDiagram:
    """Validate ``p``, index its cells and build the diagram."""
    if check:
        rep = validate(p)
        if not rep:
            first = rep.violations[0]
            raise ConstructionError(f"invalid presentation: row {first.row}: {first.rule}")
    return build_diagram(p, assign_indices(p, horizon), horizon)


def block_ideal(c: ConstructedDiagram, n: int) -> IdealSubdiagram:
    """Vertices of blocks ``<= n``; these form an ideal subdiagram."""
    d = c.diagram
    members = bytearray(d.size)
    for k in range(1, d.horizon + 1):
        last = c.table.r_of(k, n)
        for j in range(1, last + 1):
            members[d.vid((k, j))] = 1
    res = is_ideal_subdiagram(d, members)
    if not res:
        raise ConstructionError(f"block subdiagram {n} fails {res.axiom} at {res.vertex}")
    return IdealSubdiagram(d, members, check=False)


def varphi(c: ConstructedDiagram, x: PointSpec) -> IdealSubdiagram:
    """Largest primitive ideal whose complement holds the point's path."""
    lam = largest_ideal_avoiding_path(c.diagram, c.point_path(x))
    if is_prime_complement(lam, delta=1).status == "no":
        raise ConstructionError(f"complement of varphi({x}) is not directed")
    return lam


def minimal_block(c: ConstructedDiagram, lam: IdealSubdiagram) -> int | None:
    """Least ``n`` with ``||f_n + lam|| = 1``."""
    for n in range(1, c.horizon + 1):
        if block_unit_quotient_norm(c.block_ideal(n), lam):
            return n
    return None


@dataclass(frozen=True)
class CanonicalPoint:
    point: PointSpec
    path: PathSeq  # the decreasing cell sequence as diagram vertices
    stable_until: int  # last row whose cell has stabilized over the window
    window: int
    horizon: int

    @property
    def stabilized(self) -> bool:
        return self.stable_until >= self.point.block

    def to_json(self):
        return {"point": self.point.to_json(), "stable_until": self.stable_until,
                "window": self.window, "horizon": self.horizon}


def canonical_point(c: ConstructedDiagram, path: PathSeq, window: int = 3) -> CanonicalPoint:
    """The point whose decreasing cell sequence absorbs the tail of ``path``.

    For each row ``l`` the within-block ancestor on row ``l`` of the path's
    row-``k`` cell is non-increasing in ``k``; its eventual value is the
    cell ``t_l``.  At a finite horizon the last value is taken, and a row
    counts as stable once the value has not moved for ``window`` rows.
    """
    d, p = c.diagram, c.presentation
    if not d.is_complete_connected(path):
        raise ConstructionError("canonical_point needs a complete connected path")
    H = path.end.row
    end_cell = c.cell_of(path.end)
    b = p.cell(H, end_cell).block
    chain = {H: end_cell}
    for l in range(H - 1, b - 1, -1):
        chain[l] = p.cell(l + 1, chain[l + 1]).parent
    stable_until = b - 1
    for l in range(b, H + 1):
        seq = []
        for v in path.vertices:
            if v.row < l:
                continue
            pos = c.cell_of(v)
            if p.cell(v.row, pos).block > l:
                continue
            seq.append(c.table.index[l - 1][p.ancestor(v.row, pos, l)])
        if any(y > x for x, y in zip(seq, seq[1:])):
            raise ConstructionError(f"row-{l} ancestors of the path are not non-increasing")
        tail = seq[-window:]
        if len(tail) == window and len(set(tail)) == 1 and stable_until == l - 1:
            stable_until = l
    roots = p.roots(b)
    prefix = tuple(p.children(l, chain[l]).index(chain[l + 1]) for l in range(b, H))
    x = PointSpec(b, roots.index(chain[b]), prefix, (0,))
    vs = tuple(c.vertex_of(l, chain[l]) for l in range(b, H + 1))
    return CanonicalPoint(x, PathSeq(vs, stable_from=None), stable_until, window, c.horizon)
