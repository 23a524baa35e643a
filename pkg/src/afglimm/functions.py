"""Bounded continuous functions on the quotient, in finitely computable form.

Every function exposes the same small surface used by the Glimm checks:
``value(point)`` for ``g(q(y))``, ``cell_range(row, pos)`` for the range of
``g o q`` over a cell, ``sample_value(row, pos)`` at the cell's leftmost
point, and ``bound`` for the sup norm.  Values are exact ``Fraction``s.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .presentation import (PointSpec, PresentationError, QuotientPresentation, UnionFind,
                           cell_path)


class FunctionError(ValueError):
    pass


class StepFunction:
    """Constant on the cells of block ``b`` at row ``max(depth, b)``.

    ``values`` maps ``(row, pos)`` of those anchor cells to numbers.  Cells
    that touch must get equal values, otherwise ``g o q`` would not be a
    function on the quotient.
    """

    def __init__(self, p: QuotientPresentation, depth: int, values: Mapping[tuple[int, int], object],
                 check: bool = True):
        if depth > p.horizon:
            raise FunctionError("function depth beyond the presentation horizon")
        self.p = p
        self.depth = depth
        self.values = {key: Fraction(v) for key, v in values.items()}
        for k in range(1, p.horizon + 1):
            for c in p.cells[k - 1]:
                if k == self.anchor_row(c.block) and (k, c.pos) not in self.values:
                    raise FunctionError(f"no value for anchor cell ({k}, {c.id!r})")
        self._range: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
        if check:
            bad = self.touch_violation()
            if bad is not None:
                raise FunctionError(f"values differ on touching cells {bad}")

    @classmethod
    def from_rule(cls, p: QuotientPresentation, depth: int, rule: Callable, check: bool = True):
        """Build from ``rule(cell) -> value`` evaluated on the anchor cells."""
        vals = {}
        for k in range(1, p.horizon + 1):
            for c in p.cells[k - 1]:
                if k == max(depth, c.block):
                    vals[(k, c.pos)] = rule(c)
        return cls(p, depth, vals, check)

    def anchor_row(self, block: int) -> int:
        return max(self.depth, block)

    @property
    def bound(self) -> Fraction:
        return max((abs(v) for v in self.values.values()), default=Fraction(0))

    def _anchor_value(self, row: int, pos: int) -> Fraction:
        a = self.anchor_row(self.p.cell(row, pos).block)
        return self.values[(a, self.p.ancestor(row, pos, a))]

    def touch_violation(self):
        p = self.p
        for k in range(1, p.horizon + 1):
            for c in p.cells[k - 1]:
                if k < self.anchor_row(c.block):
                    continue
                for t in p.touching(k, c.pos):
                    d = p.cell(k, t)
                    if k < self.anchor_row(d.block):
                        continue
                    if self._anchor_value(k, c.pos) != self._anchor_value(k, t):
                        return (k, c.id, d.id)
        return None

    def value(self, x: PointSpec) -> Fraction:
        a = self.anchor_row(x.block)
        if a > self.p.horizon:
            raise FunctionError("point is born beyond the horizon")
        path = cell_path(self.p, x, a)
        return self.values[(a, path[-1])]

    def cell_range(self, row: int, pos: int) -> tuple[Fraction, Fraction]:
        key = (row, pos)
        if key not in self._range:
            a = self.anchor_row(self.p.cell(row, pos).block)
            if row >= a:
                v = self._anchor_value(row, pos)
                self._range[key] = (v, v)
            else:
                rs = [self.cell_range(row + 1, c) for c in self.p.children(row, pos)]
                self._range[key] = (min(r[0] for r in rs), max(r[1] for r in rs))
        return self._range[key]

    def oscillation(self, row: int, pos: int) -> Fraction:
        lo, hi = self.cell_range(row, pos)
        return hi - lo

    def sample_value(self, row: int, pos: int) -> Fraction:
        a = self.anchor_row(self.p.cell(row, pos).block)
        if row >= a:
            return self._anchor_value(row, pos)
        return self.values[(a, self.p.leftmost_descendant(row, pos, a))]


def constant(p: QuotientPresentation, value) -> StepFunction:
    return StepFunction.from_rule(p, 1, lambda c: value)


def dyadic_coordinate(x: PointSpec) -> Fraction:
    """Binary expansion point of an eventually periodic left/right path."""
    pre = Fraction(0)
    for i, c in enumerate(x.prefix, 1):
        pre += Fraction(c, 2 ** i)
    L = len(x.cycle)
    cyc = sum(Fraction(c, 2 ** i) for i, c in enumerate(x.cycle, 1))
    return pre + cyc / (1 - Fraction(1, 2 ** L)) / 2 ** len(x.prefix)


def dyadic_interval(row: int, pos: int) -> tuple[Fraction, Fraction]:
    w = Fraction(1, 2 ** (row - 1))
    return pos * w, (pos + 1) * w


class IntervalFunction:
    """Piecewise-linear function of the coordinate on the binary-tree
    presentation of [0, 1] (cell ``pos`` on row ``k`` is the ``pos``-th
    dyadic interval of length ``2**(1-k)``)."""

    def __init__(self, breakpoints: Sequence[tuple[object, object]]):
        pts = sorted((Fraction(x), Fraction(v)) for x, v in breakpoints)
        if not pts or pts[0][0] > 0 or pts[-1][0] < 1:
            raise FunctionError("breakpoints must cover [0, 1]")
        if any(a[0] == b[0] for a, b in zip(pts, pts[1:])):
            raise FunctionError("breakpoints must have distinct abscissae")
        self.points = pts
        self._xs = [x for x, _ in pts]
        self._at: dict = {}
        self._range: dict = {}

    @classmethod
    def from_grid(cls, values: Sequence[object]) -> "IntervalFunction":
        n = len(values) - 1
        if n < 1:
            raise FunctionError("need at least two grid values")
        return cls([(Fraction(i, n), v) for i, v in enumerate(values)])

    @property
    def bound(self) -> Fraction:
        return max(abs(v) for _, v in self.points)

    def at(self, x: Fraction) -> Fraction:
        if x not in self._at:
            if not self._xs[0] <= x <= self._xs[-1]:
                raise FunctionError(f"{x} outside the domain")
            i = min(bisect_right(self._xs, x), len(self._xs) - 1)
            (x0, v0), (x1, v1) = self.points[i - 1], self.points[i]
            self._at[x] = v0 + (v1 - v0) * (x - x0) / (x1 - x0)
        return self._at[x]

    def value(self, x: PointSpec) -> Fraction:
        return self.at(dyadic_coordinate(x))

    def cell_range(self, row: int, pos: int) -> tuple[Fraction, Fraction]:
        key = (row, pos)
        if key not in self._range:
            a, b = dyadic_interval(row, pos)
            inner = self.points[bisect_right(self._xs, a):bisect_left(self._xs, b)]
            vals = [self.at(a), self.at(b)] + [v for _, v in inner]
            self._range[key] = (min(vals), max(vals))
        return self._range[key]

    def oscillation(self, row: int, pos: int) -> Fraction:
        lo, hi = self.cell_range(row, pos)
        return hi - lo

    def sample_value(self, row: int, pos: int) -> Fraction:
        return self.at(dyadic_interval(row, pos)[0])


class StepFamily:
    """Separating functions that are indicators of touch classes.

    Anchor cells at depth ``r`` (row ``max(r, block)``) are merged whenever
    two of their descendants touch on some row up to the horizon; the
    indicator of one merged class is then touch-compatible.  The shallowest
    ``r`` that puts the two points in different classes is used.
    """

    def separating(self, p: QuotientPresentation, a: PointSpec, b: PointSpec,
                   horizon: int | None = None):
        H = p.horizon if horizon is None else horizon
        if max(a.block, b.block) > H:
            return None
        q = p if H == p.horizon else p.truncate(H)
        for r in range(max(a.block, b.block), H + 1):
            anchor = _anchor_classes(q, r)
            ka = anchor((max(r, a.block), cell_path(q, a, max(r, a.block))[-1]))
            kb = anchor((max(r, b.block), cell_path(q, b, max(r, b.block))[-1]))
            if ka != kb:
                return StepFunction.from_rule(q, r, lambda c: 1 if anchor((c.row, c.pos)) == ka else 0)
        return None


def _anchor_classes(p: QuotientPresentation, depth: int):
    """Map each anchor cell at ``depth`` to its touch class representative."""
    ids: dict[tuple[int, int], int] = {}
    for k in range(1, p.horizon + 1):
        for c in p.cells[k - 1]:
            if k == max(depth, c.block):
                ids[(k, c.pos)] = len(ids)
    uf = UnionFind(len(ids))

    def up(k, pos):
        a = max(depth, p.cell(k, pos).block)
        return ids[(a, p.ancestor(k, pos, a))]

    for k in range(depth, p.horizon + 1):
        for c in p.cells[k - 1]:
            if k < max(depth, c.block):
                continue
            for t in p.touching(k, c.pos):
                if t > c.pos and k >= max(depth, p.cell(k, t).block):
                    uf.union(up(k, c.pos), up(k, t))
    return lambda key: uf.find(ids[key])


class IntervalFamily:
    """Hat functions separating two points of [0, 1]."""

    def separating(self, p: QuotientPresentation, a: PointSpec, b: PointSpec,
                   horizon: int | None = None):
        xa, xb = dyadic_coordinate(a), dyadic_coordinate(b)
        if xa == xb:
            return None
        r = abs(xa - xb) / 2
        pts = {Fraction(0): None, Fraction(1): None}
        for x in (xa - r, xa, xa + r):
            if 0 <= x <= 1:
                pts[x] = None
        hat = lambda x: max(Fraction(0), 1 - abs(x - xa) / r)  # noqa: E731
        return IntervalFunction([(x, hat(x)) for x in sorted(pts)])


def check_function(p: QuotientPresentation, g) -> None:
    """Raise unless ``g`` is well defined on the quotient at ``p``'s horizon."""
    if isinstance(g, StepFunction):
        bad = g.touch_violation()
        if bad is not None:
            raise FunctionError(f"values differ on touching cells {bad}")
    elif not isinstance(g, IntervalFunction):
        raise PresentationError(f"unsupported function type {type(g).__name__}")
