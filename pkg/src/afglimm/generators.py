"""Builtin example presentations.

``point``           a single point.
``convseq``         a convergent sequence with its limit, one block.
``cantor-interval`` the Cantor set mapped onto [0, 1] by binary expansion.
``fan``             convergent sequences, one per block, with all limits
                    glued to one point (a representative of the glued-sum
                    spaces that are nowhere first countable at the gluing).

Each example knows how to sample points and functions for the checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .functions import IntervalFamily, IntervalFunction, StepFamily, StepFunction
from .presentation import PointSpec, PresentationError, QuotientPresentation

NAMES = ("point", "convseq", "cantor-interval", "fan")


@dataclass
class Example:
    name: str
    params: dict = field(default_factory=dict)

    # -- presentations --------------------------------------------------
    def presentation(self, horizon: int) -> QuotientPresentation:
        if horizon < 1:
            raise PresentationError("horizon must be positive")
        build = {"point": _point, "convseq": _convseq,
                 "cantor-interval": _cantor, "fan": _fan}[self.name]
        p = build(horizon, **self.params)
        p.generator = {"name": self.name, "params": dict(sorted(self.params.items()))}
        return reattach(p)

    # -- samples --------------------------------------------------------
    def sample_points(self, horizon: int) -> list[PointSpec]:
        if self.name == "point":
            # one point written twelve ways
            return [PointSpec(1, 0, (0,) * a, (0,) * c) for a in range(4) for c in (1, 2, 3)]
        if self.name == "convseq":
            pts = [PointSpec(1, 0, (), (1,)), PointSpec(1, 0, (1, 1), (1,)),
                   PointSpec(1, 0, (1,), (1, 1))]
            pts += [seq_point(1, i) for i in range(1, 9)]
            return pts
        if self.name == "cantor-interval":
            return dyadic_sample(3) + [PointSpec(1, 0, (), (0, 1)), PointSpec(1, 0, (), (1, 0))]
        nb = self.params.get("blocks") or horizon
        pts = []
        for b in range(1, min(nb, 4) + 1):
            pts.append(PointSpec(b, 0, (), (1,)))
            pts += [seq_point(b, i) for i in range(1, 4)]
        return pts

    def glued_points(self, horizon: int) -> list[PointSpec]:
        if self.name != "fan":
            return []
        nb = self.params.get("blocks") or horizon
        return [PointSpec(b, 0, (), (1,)) for b in range(1, min(nb, 4) + 1)]

    def random_function(self, p: QuotientPresentation, rng: random.Random, max_depth: int):
        """A random function that is well defined on the quotient."""
        if self.name == "cantor-interval":
            d = rng.randint(1, 3)
            return IntervalFunction.from_grid(
                [Fraction(rng.randint(0, 8), 8) for _ in range(2 ** d + 1)])
        depth = rng.randint(1, min(max_depth, p.horizon))
        if self.name == "fan":
            glued = Fraction(rng.randint(-4, 4), 4)
            extra = {}

            def rule(c):
                if str(c.id).endswith(".t") or c.row == c.block:
                    return glued
                return extra.setdefault(c.id, Fraction(rng.randint(-4, 4), 4))
            return StepFunction.from_rule(p, depth, rule)
        return StepFunction.from_rule(p, depth, lambda c: Fraction(rng.randint(-4, 4), 4))


def seq_point(block: int, i: int) -> PointSpec:
    """The ``i``-th point of the sequence in ``block`` (sequence examples)."""
    return PointSpec(block, 0, (1,) * (i - 1) + (0,), (0,))


def dyadic_sample(level: int) -> list[PointSpec]:
    """Both binary expansions of every ``m / 2**level`` (one at 0 and 1)."""
    pts = [PointSpec(1, 0, (), (0,))]
    for m in range(1, 2 ** level):
        bits = tuple(int(b) for b in format(m, f"0{level}b"))
        last = max(i for i, b in enumerate(bits) if b)
        left = bits[:last] + (0,)
        right = bits[:last] + (1,)
        pts.append(PointSpec(1, 0, left, (1,)))
        pts.append(PointSpec(1, 0, right, (0,)))
    pts.append(PointSpec(1, 0, (), (1,)))
    return pts


def example(name: str, **params) -> Example:
    if name not in NAMES:
        raise PresentationError(f"unknown example {name!r}; choose from {', '.join(NAMES)}")
    if name != "fan" and params:
        raise PresentationError(f"example {name!r} takes no parameters")
    if set(params) - {"blocks"}:
        raise PresentationError("fan takes only the 'blocks' parameter")
    return Example(name, params)


def parse_example(text: str) -> Example:
    """``name`` or ``name:key=value,...`` (e.g. ``fan:blocks=3``)."""
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        try:
            params[key] = int(val)
        except ValueError:
            raise PresentationError(f"bad example parameter {item!r}") from None
    return example(name, **params)


# -- builders ----------------------------------------------------------------

def _point(H):
    rows = [[("p", 1, None if k == 1 else "p")] for k in range(1, H + 1)]
    return QuotientPresentation(rows, [[] for _ in rows], total_blocks=1)


def _sequence_block(b: int, H: int):
    """Rows of block ``b``: singletons ``b.1 .. b.(k-b)`` and the tail ``b.t``."""
    out = {}
    for k in range(b, H + 1):
        cells = []
        for i in range(1, k - b + 1):
            parent = f"{b}.{i}" if i < k - b else f"{b}.t"
            cells.append((f"{b}.{i}", b, parent))
        cells.append((f"{b}.t", b, None if k == b else f"{b}.t"))
        out[k] = cells
    return out


def _convseq(H):
    blk = _sequence_block(1, H)
    rows = [blk[k] for k in range(1, H + 1)]
    return QuotientPresentation(rows, [[] for _ in rows], total_blocks=1)


def _cantor(H):
    rows, touch = [], []
    for k in range(1, H + 1):
        n = 2 ** (k - 1)
        rows.append([(j, 1, None if k == 1 else j // 2) for j in range(n)])
        touch.append([(j, j + 1) for j in range(n - 1)])
    return QuotientPresentation(rows, touch, total_blocks=1)


def _fan(H, blocks: int | None = None):
    nb = H if blocks is None else min(blocks, H)
    per = {b: _sequence_block(b, H) for b in range(1, nb + 1)}
    rows, touch = [], []
    for k in range(1, H + 1):
        row = []
        for b in range(1, min(k, nb) + 1):
            # the singleton split off on this row precedes the tail, so it is child 0
            row += per[b][k]
        rows.append(row)
        tails = [f"{b}.t" for b in range(1, min(k, nb) + 1)]
        touch.append([(a, c) for i, a in enumerate(tails) for c in tails[i + 1:]])
    return QuotientPresentation(rows, touch, total_blocks=blocks)


def _fan_witness_rule(blocks: int | None) -> Callable | None:
    """For a glued point of block ``b``: ``n ->`` first point of sequence
    ``max(n + 1, b)``, which lies near the glued point but outside blocks ``<= n``."""
    if blocks is not None:
        return None

    def rule(x: PointSpec):
        if tuple(x.cycle) != (1,):
            return None
        return lambda n: seq_point(max(n + 1, x.block), 1)
    return rule


def reattach(p: QuotientPresentation) -> QuotientPresentation:
    """Restore the function family and witness rule of a builtin example
    whose presentation was read back from JSON."""
    gen = p.generator or {}
    if gen.get("name") in NAMES:
        ex = example(gen["name"], **gen.get("params", {}))
        p.family = IntervalFamily() if ex.name == "cantor-interval" else StepFamily()
        if ex.name == "fan":
            p.witness_rule = _fan_witness_rule(ex.params.get("blocks"))
    return p
