"""Ideal subdiagrams, truncated primitive ideals and central-element norms.

An ideal subdiagram is a vertex set that is descendant-closed and
saturated (a vertex whose children all lie in the set is in the set).
Both axioms are imposed on rows below the horizon; the last row is a
frontier and carries no constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from . import kernels
from .diagram import BratteliDiagram, DiagramError, PathSeq, Vertex

DESCENDANT_CLOSED = "descendant-closed"
SATURATED = "saturated"


class IdealError(ValueError):
    pass


@dataclass(frozen=True)
class IdealCheck:
    ok: bool
    vertex: Vertex | None = None
    axiom: str | None = None

    def __bool__(self):
        return self.ok


class IdealSubdiagram:
    """An ideal subdiagram of a materialized diagram, tagged with its horizon."""

    def __init__(self, diagram: BratteliDiagram, members, check: bool = True):
        self.diagram = diagram
        if isinstance(members, (bytes, bytearray)):
            self._mask = bytes(members)
        else:
            self._mask = bytes(diagram.mask(members))
        if check:
            res = is_ideal_subdiagram(diagram, self._mask)
            if not res:
                raise IdealError(f"not an ideal subdiagram: {res.vertex} violates {res.axiom}")

    @property
    def horizon(self) -> int:
        return self.diagram.horizon

    @property
    def mask(self) -> bytes:
        return self._mask

    @property
    def vertices(self) -> frozenset[Vertex]:
        return self.diagram.from_mask(self._mask)

    def complement_mask(self) -> bytes:
        return bytes(1 - b for b in self._mask)

    def complement(self) -> frozenset[Vertex]:
        return self.diagram.from_mask(self.complement_mask())

    def __contains__(self, v) -> bool:
        return bool(self._mask[self.diagram.vid(v)])

    def __len__(self):
        return sum(self._mask)

    def __le__(self, other: "IdealSubdiagram") -> bool:
        _same(self, other)
        return all(b <= c for b, c in zip(self._mask, other._mask))

    def __eq__(self, other):
        if not isinstance(other, IdealSubdiagram):
            return NotImplemented
        return self.diagram is other.diagram and self._mask == other._mask

    def __hash__(self):
        return hash(self._mask)

    def __repr__(self):
        return f"IdealSubdiagram({len(self)} of {self.diagram.size} vertices, H={self.horizon})"

    def to_json(self) -> dict:
        return {"vertices": [[v.row, v.index] for v in sorted(self.vertices)],
                "horizon": self.horizon}

    @classmethod
    def from_json(cls, diagram: BratteliDiagram, data: dict) -> "IdealSubdiagram":
        if data.get("horizon", diagram.horizon) != diagram.horizon:
            raise IdealError("ideal horizon differs from the diagram's")
        return cls(diagram, [Vertex(k, j) for k, j in data["vertices"]])


def is_ideal_subdiagram(diagram: BratteliDiagram, members) -> IdealCheck:
    m = members if isinstance(members, (bytes, bytearray)) else diagram.mask(members)
    v, code = kernels.ideal_violation(diagram.child_ptr, diagram.child_idx, m,
                                      diagram.final_start)
    if v < 0:
        return IdealCheck(True)
    return IdealCheck(False, diagram.vertex(v), DESCENDANT_CLOSED if code == 1 else SATURATED)


def _same(a: IdealSubdiagram, b: IdealSubdiagram):
    if a.diagram is not b.diagram and a.diagram != b.diagram:
        raise IdealError("ideals live in different diagrams")


def meet(a: IdealSubdiagram, b: IdealSubdiagram) -> IdealSubdiagram:
    _same(a, b)
    return IdealSubdiagram(a.diagram, bytes(x & y for x, y in zip(a.mask, b.mask)), check=False)


def join(a: IdealSubdiagram, b: IdealSubdiagram) -> IdealSubdiagram:
    _same(a, b)
    d = a.diagram
    union = bytearray(x | y for x, y in zip(a.mask, b.mask))
    return IdealSubdiagram(d, kernels.saturate(d.child_ptr, d.child_idx, union, d.final_start),
                           check=False)


def meet_join(a, b) -> tuple[IdealSubdiagram, IdealSubdiagram]:
    return meet(a, b), join(a, b)


def generated_ideal(diagram: BratteliDiagram, seed: Iterable) -> IdealSubdiagram:
    """Least ideal subdiagram containing ``seed``."""
    closed = diagram.descendant_mask(diagram.mask(seed))
    return IdealSubdiagram(diagram, kernels.saturate(diagram.child_ptr, diagram.child_idx,
                                                     closed, diagram.final_start), check=False)


def empty_ideal(diagram: BratteliDiagram) -> IdealSubdiagram:
    return IdealSubdiagram(diagram, bytes(diagram.size), check=False)


def full_ideal(diagram: BratteliDiagram) -> IdealSubdiagram:
    return IdealSubdiagram(diagram, bytes([1]) * diagram.size, check=False)


def largest_ideal_avoiding_path(diagram: BratteliDiagram, path: PathSeq) -> IdealSubdiagram:
    """Greatest descendant-closed set missing every vertex of ``path``.

    The result is saturated as well: a removed vertex either lies on the
    path (whose next vertex is excluded) or has an excluded child.
    """
    if not diagram.is_complete_connected(path):
        raise IdealError("path is not complete connected")
    excluded = diagram.mask(path.vertices)
    m = kernels.greatest_fixpoint(diagram.child_ptr, diagram.child_idx,
                                  diagram.parent_ptr, diagram.parent_idx, excluded)
    return IdealSubdiagram(diagram, m, check=False)


def path_descendant_set(diagram: BratteliDiagram, path: PathSeq) -> frozenset[Vertex]:
    """All descendants of the path's vertices (the set whose complement is
    sometimes described as the primitive ideal of the path)."""
    return diagram.from_mask(diagram.descendant_mask(diagram.mask(path.vertices)))


@dataclass(frozen=True)
class PathIdealComparison:
    fixpoint: IdealSubdiagram
    descendant_set: frozenset[Vertex]
    complement_is_ideal: bool
    agree: bool


def compare_path_ideals(diagram: BratteliDiagram, path: PathSeq) -> PathIdealComparison:
    """Put the fixpoint ideal next to the complement of the descendant set."""
    lam = largest_ideal_avoiding_path(diagram, path)
    desc = path_descendant_set(diagram, path)
    comp = frozenset(diagram.vertices()) - desc
    return PathIdealComparison(lam, desc, bool(is_ideal_subdiagram(diagram, comp)),
                               comp == lam.vertices)


def leftmost_path_to(diagram: BratteliDiagram, v) -> PathSeq:
    """Complete connected path ending at ``v``, climbing via lowest-index parents."""
    vs = [Vertex(*v)]
    while True:
        ps = diagram.parents(vs[-1])
        if not ps:
            break
        vs.append(ps[0])
    return PathSeq(tuple(reversed(vs)))


def truncated_primitives(diagram: BratteliDiagram) -> list[tuple[Vertex, IdealSubdiagram]]:
    """One primitive ideal per distinct last-row vertex.

    The ideal attached to ``v`` is everything outside the ancestors of
    ``v``; its complement is directed with ``v`` as a common descendant.
    """
    out = []
    for v in diagram.vertices(diagram.horizon):
        anc = diagram.ancestor_mask(diagram.mask([v]))
        out.append((v, IdealSubdiagram(diagram, bytes(1 - b for b in anc), check=False)))
    return out


@dataclass(frozen=True)
class PrimeVerdict:
    status: str  # "yes" | "no" | "unknown"
    witness: tuple[Vertex, Vertex] | None = None
    horizon: int = 0


def is_prime_complement(ideal: IdealSubdiagram, delta: int = 1, window: int = 3) -> PrimeVerdict:
    """Directedness of the complement, checked up to the horizon.

    Every pair of complement vertices on rows ``<= H - delta`` must share a
    descendant in the complement.  A pair that does not is reported as a
    ``no`` only when both sides have kept a constant width inside the
    complement over the last ``window`` rows; otherwise ``unknown``.
    """
    d = ideal.diagram
    H = d.horizon
    comp = ideal.complement_mask()
    cands = [i for i in range(d.size) if comp[i] and d.vertex(i).row <= H - delta]
    if not cands:
        return PrimeVerdict("yes", horizon=H)
    desc = {}
    for i in cands:
        seed = bytearray(d.size)
        seed[i] = 1
        desc[i] = _reach_within(d, seed, comp)
    worst = None
    for a_pos, a in enumerate(cands):
        for b in cands[a_pos + 1:]:
            if any(x & y for x, y in zip(desc[a], desc[b])):
                continue
            if _stable_width(d, desc[a], window) and _stable_width(d, desc[b], window):
                return PrimeVerdict("no", (d.vertex(a), d.vertex(b)), H)
            worst = worst or (d.vertex(a), d.vertex(b))
    if worst is not None:
        return PrimeVerdict("unknown", worst, H)
    return PrimeVerdict("yes", horizon=H)


def _reach_within(d: BratteliDiagram, seed: bytearray, allowed) -> bytearray:
    out = bytearray(seed)
    stack = [i for i, b in enumerate(seed) if b]
    while stack:
        v = stack.pop()
        for w in d.child_ids(v):
            if allowed[w] and not out[w]:
                out[w] = 1
                stack.append(w)
    return out


def _stable_width(d: BratteliDiagram, m, window: int) -> bool:
    H = d.horizon
    if H - window < 1:
        return False
    widths = [sum(m[i] for i in d.row_vids(k)) for k in range(H - window + 1, H + 1)]
    return len(set(widths)) == 1


# -- central elements ----------------------------------------------------

@dataclass(frozen=True)
class CentralElement:
    """``sum_j alpha_j f_k^j`` on row ``k``; absent indices carry 0."""

    row: int
    coefficients: Mapping[int, Fraction] = field(default_factory=dict)

    def coefficient(self, j: int):
        return self.coefficients.get(j, 0)


def central_norm_distance(diagram: BratteliDiagram, a1: CentralElement, a2: CentralElement,
                          corner: Vertex | None = None):
    """Norm of ``a1 - a2`` (or of ``(a1 - a2) f`` for the corner unit ``f``).

    Sup of ``|alpha - beta|`` over summand pairs with nonzero product.  Two
    row units ``f_k^j`` and ``f_l^h`` (k <= l) multiply to a nonzero element
    iff ``(l, h)`` descends from ``(k, j)``; the corner adds the requirement
    that ``(k, j)`` descends from it.  Without a corner, the part of row l
    not covered by the unit of row k (paths from roots born after row k)
    pairs ``alpha_l`` with 0.
    """
    if a1.row > a2.row:
        a1, a2 = a2, a1
    k, l = a1.row, a2.row
    if max(k, l) > diagram.horizon:
        raise DiagramError("central element beyond the horizon")
    if corner is not None and corner.row > k:
        raise IdealError("corner must sit on or above both rows")
    if corner is not None:
        allowed = diagram.descendant_mask(diagram.mask([corner]))
    else:
        allowed = None
    best = 0
    found = False
    for j in range(1, diagram.rows[k - 1] + 1):
        u = diagram.vid((k, j))
        if allowed is not None and not allowed[u]:
            continue
        alpha = a1.coefficient(j)
        if k == l:
            best = max(best, abs(alpha - a2.coefficient(j)))
            found = True
            continue
        seed = bytearray(diagram.size)
        seed[u] = 1
        reach = diagram.descendant_mask(seed)
        for w in diagram.row_vids(l):
            if reach[w]:
                h = w - diagram.row_vids(l).start + 1
                best = max(best, abs(alpha - a2.coefficient(h)))
                found = True
    if corner is None and k < l:
        late = _born_after(diagram, k, l)
        for h in late:
            best = max(best, abs(a2.coefficient(h)))
            found = True
    return best if found else 0


def _born_after(diagram: BratteliDiagram, k: int, l: int) -> list[int]:
    """Indices on row l that have a root ancestor on a row after k."""
    seed = bytearray(diagram.size)
    for r in range(k + 1, l + 1):
        for v in diagram.row_vids(r):
            if not diagram.parent_ids(v):
                seed[v] = 1
    reach = diagram.descendant_mask(seed)
    start = diagram.row_vids(l).start
    return [w - start + 1 for w in diagram.row_vids(l) if reach[w]]


def block_unit_quotient_norm(block_ideal: IdealSubdiagram, ideal: IdealSubdiagram) -> int:
    """``||f_n + P||`` for the unit ``f_n`` of a block ideal: 1 unless the
    block subdiagram lies inside ``ideal``."""
    _same(block_ideal, ideal)
    return 0 if block_ideal <= ideal else 1
