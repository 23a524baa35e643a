"""Finite-horizon checks of the correspondence between points of the
quotient and Glimm classes of primitive ideals of the constructed algebra.

Glimm equivalence is approximated from one side by chains of
subordinations (ideal containments visible on the diagram) and refuted by
separating functions; anything else is reported as ``unknown``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .construct import CanonicalPoint, ConstructedDiagram, canonical_point, minimal_block
from .diagram import PathSeq, Vertex
from .ideals import (CentralElement, IdealSubdiagram, central_norm_distance,
                     largest_ideal_avoiding_path, leftmost_path_to, truncated_primitives)
from .presentation import PointSpec, UnionFind, cell_path, persistent_touch

WINDOW = 3


class VerificationError(AssertionError):
    """A finite-horizon consequence of the construction failed."""


def _num(x):
    return None if x is None else str(x)


# -- equivalence -----------------------------------------------------------

@dataclass(frozen=True)
class GlimmVerdict:
    status: str  # "equivalent" | "distinct" | "unknown"
    witness: object = None
    horizon: int = 0

    def to_json(self):
        w = self.witness
        return {"status": self.status, "horizon": self.horizon,
                "witness": w.to_json() if hasattr(w, "to_json") else w}


@dataclass(frozen=True)
class Separation:
    function: str
    values: tuple[Fraction, Fraction]
    resolution: Fraction

    def to_json(self):
        return {"function": self.function, "values": [str(v) for v in self.values],
                "resolution": str(self.resolution)}


def subordinate(c: ConstructedDiagram, a: PathSeq, b: PathSeq, window: int = WINDOW) -> bool:
    """Certificate that ``a``'s ideal contains ``b``'s at the horizon.

    Every vertex of ``a`` below the last row must be an ancestor of ``b``'s
    last vertex, and both paths must have followed their periods for
    ``window`` rows so that the pattern can be trusted to continue (a path
    that leaves ``a`` only near the horizon would otherwise pass).  The
    containment must also have held for ``window`` rows after the paths
    part, since ancestor sets are a couple of cells wider than the path.
    """
    d = c.diagram
    H = min(a.end.row, b.end.row)
    if any(x.stable_from is None or x.stable_from > H - window for x in (a, b)):
        return False
    if _parting_row(a, b, H) > H - window:
        return False
    anc = d.ancestor_mask(d.mask([b.at(H)]))
    return all(anc[d.vid(v)] for v in a.vertices if v.row < H)


def _parting_row(a: PathSeq, b: PathSeq, H: int) -> int:
    start = max(a.vertices[0].row, b.vertices[0].row)
    for r in range(start, H + 1):
        if a.at(r) != b.at(r):
            return r
    return start


def glimm_equiv(c: ConstructedDiagram, p1: PathSeq, p2: PathSeq, horizon: int | None = None,
                window: int = WINDOW) -> GlimmVerdict:
    H = c.horizon if horizon is None else horizon
    if p1.vertices == p2.vertices:
        return GlimmVerdict("equivalent", "same path", H)
    if subordinate(c, p1, p2, window) or subordinate(c, p2, p1, window):
        return GlimmVerdict("equivalent", "subordination", H)
    sep = separate(c, p1, p2, H)
    if sep is not None:
        return GlimmVerdict("distinct", sep, H)
    return GlimmVerdict("unknown", None, H)


def separate(c: ConstructedDiagram, p1: PathSeq, p2: PathSeq, horizon: int | None = None):
    """A function whose lift takes clearly different values on both ideals."""
    family = c.presentation.family
    if family is None:
        return None
    H = c.horizon if horizon is None else horizon
    x1 = canonical_point(c, p1).point
    x2 = canonical_point(c, p2).point
    g = family.separating(c.presentation, x1, x2, H)
    if g is None:
        return None
    v1 = gtilde(c, g, p1)
    v2 = gtilde(c, g, p2)
    if v1.value is None or v2.value is None:
        return None
    res = v1.resolution + v2.resolution
    if abs(v1.value - v2.value) > res:
        return Separation(type(g).__name__, (v1.value, v2.value), res)
    return None


@dataclass
class GlimmClasses:
    representatives: list[PathSeq]
    partition: list[list[int]]
    provenance: list[tuple[int, int, str]] = field(default_factory=list)
    horizon: int = 0

    def to_json(self):
        return {"classes": self.partition, "horizon": self.horizon,
                "provenance": [list(t) for t in self.provenance]}


def glimm_classes(c: ConstructedDiagram, paths: Sequence[PathSeq],
                  window: int = WINDOW) -> GlimmClasses:
    """Transitive closure of subordination over the given paths."""
    uf = UnionFind(len(paths))
    trace = []
    for i, a in enumerate(paths):
        for j in range(i + 1, len(paths)):
            b = paths[j]
            if a.vertices == b.vertices:
                how = "same path"
            elif subordinate(c, a, b, window) or subordinate(c, b, a, window):
                how = "subordination"
            else:
                continue
            trace.append((i, j, how))
            uf.union(i, j)
    return GlimmClasses(list(paths), uf.classes(), trace, c.horizon)


# -- the lift of a function --------------------------------------------------

@dataclass(frozen=True)
class Lift:
    value: Fraction | None
    resolution: Fraction  # the value is known up to this much
    point: PointSpec | None
    stable_until: int

    def to_json(self):
        return {"value": _num(self.value), "resolution": str(self.resolution),
                "point": None if self.point is None else self.point.to_json(),
                "stable_until": self.stable_until}


def _end_vertices(c: ConstructedDiagram, target) -> list[PathSeq]:
    d = c.diagram
    if isinstance(target, PathSeq):
        return [target]
    comp = target.complement_mask()
    ends = [v for v in d.vertices(d.horizon) if comp[d.vid(v)]]
    return [leftmost_path_to(d, v) for v in ends]


def _lift_one(c: ConstructedDiagram, g, cp: CanonicalPoint) -> Lift:
    p = c.presentation
    if not cp.stabilized:
        return Lift(None, Fraction(0), cp.point, cp.stable_until)
    x = cp.point
    row = cp.stable_until
    pos = cell_path(p, x, row)[-1]
    return Lift(g.value(x), g.oscillation(row, pos), x, row)


def gtilde(c: ConstructedDiagram, g, target) -> Lift:
    """Value of the lift of ``g`` at a primitive ideal (or at the ideal of a path).

    The decreasing cell sequence inside the complement gives a point ``y``;
    the lift is ``g(q(y))``, known up to ``g``'s oscillation over the last
    stable cell.  With several last-row complement vertices the values must
    agree within resolution.
    """
    lifts = [_lift_one(c, g, canonical_point(c, path)) for path in _end_vertices(c, target)]
    known = [lf for lf in lifts if lf.value is not None]
    if not known:
        return lifts[0] if lifts else Lift(None, Fraction(0), None, 0)
    first = known[0]
    for lf in known[1:]:
        if abs(lf.value - first.value) > lf.resolution + first.resolution:
            raise VerificationError(f"lift is not well defined: {first.value} vs {lf.value}")
    return first


# -- central approximation ---------------------------------------------------

class CentralApproximation:
    """Coefficients ``alpha_k^j`` of ``a_k`` and error bounds ``eta_k^n``.

    ``alpha_k^j`` is ``g`` at the cell's leftmost point; ``eta_k^n`` is the
    largest oscillation of ``g`` over a row-``k`` cell of blocks ``<= n``,
    which bounds the distance between ``g o q`` and the row-``k`` step
    approximation on the first ``n`` blocks.
    """

    def __init__(self, c: ConstructedDiagram, g):
        self.c = c
        self.g = g
        d, p = c.diagram, c.presentation
        H = d.horizon
        self.alpha: dict[tuple[int, int], Fraction] = {}
        osc: dict[tuple[int, int], Fraction] = {}
        for k in range(1, H + 1):
            for j, pos in enumerate(c.table.cell[k - 1], 1):
                self.alpha[(k, j)] = g.sample_value(k, pos)
                osc[(k, j)] = g.oscillation(k, pos)
        self.osc = osc
        self.eta: dict[tuple[int, int], Fraction] = {}
        for k in range(1, H + 1):
            running = Fraction(0)
            for n in range(1, k + 1):
                for j in range(c.table.r_of(k, n - 1) + 1, c.table.r_of(k, n) + 1):
                    running = max(running, osc[(k, j)])
                self.eta[(k, n)] = running
        bound = g.bound
        bad = [kj for kj, a in self.alpha.items() if abs(a) > bound]
        if bad:
            raise VerificationError(f"coefficient above the sup norm at {bad[0]}")
        for n in range(1, H + 1):
            seq = [self.eta_at(k, n) for k in range(n, H + 1)]
            if any(b > a for a, b in zip(seq, seq[1:])):
                raise VerificationError(f"eta_k^{n} increases with k")

    def eta_at(self, k: int, n: int) -> Fraction:
        return self.eta[(k, min(n, k))]

    def element(self, k: int) -> CentralElement:
        row = self.c.table.cell[k - 1]
        return CentralElement(k, {j: self.alpha[(k, j)] for j in range(1, len(row) + 1)})


def central_approximation(c: ConstructedDiagram, g) -> CentralApproximation:
    return CentralApproximation(c, g)


@dataclass(frozen=True)
class CauchyCheck:
    m: int
    i: int
    k: int
    l: int
    lhs: Fraction
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs

    def to_json(self):
        return {"corner": [self.m, self.i], "k": self.k, "l": self.l,
                "lhs": str(self.lhs), "rhs": str(self.rhs), "ok": self.ok}


def verify_strict_cauchy(ca: CentralApproximation, m: int, i: int, k: int, l: int,
                         strict: bool = True) -> CauchyCheck:
    """``||a_k a - a_l a|| <= eta_k^m + eta_l^m`` for ``a`` in the corner ``(m, i)``."""
    if not m < k < l:
        raise ValueError("need m < k < l")
    d = ca.c.diagram
    lhs = central_norm_distance(d, ca.element(k), ca.element(l), corner=Vertex(m, i))
    chk = CauchyCheck(m, i, k, l, Fraction(lhs), ca.eta_at(k, m) + ca.eta_at(l, m))
    if strict and not chk.ok:
        raise VerificationError(f"Cauchy estimate fails: {chk.to_json()}")
    return chk


# -- h against the lift --------------------------------------------------------

@dataclass(frozen=True)
class HCheck:
    status: str  # "pass" | "fail" | "unknown"
    eps: Fraction
    s: int | None = None
    k: int | None = None
    h: Fraction | None = None
    gtilde: Fraction | None = None
    worst: Fraction | None = None  # largest |g(q(y)) - alpha| over the overlap
    reason: str = ""

    def to_json(self):
        return {"status": self.status, "eps": str(self.eps), "s": self.s, "k": self.k,
                "h": _num(self.h), "gtilde": _num(self.gtilde), "worst": _num(self.worst),
                "reason": self.reason}


def verify_h_equals_gtilde(c: ConstructedDiagram, g, lam: IdealSubdiagram, eps,
                           ca: CentralApproximation | None = None) -> HCheck:
    """Compare the multiplier's value at ``lam`` with the lift of ``g``.

    Follows the leftmost complement vertex on each row, finds the first row
    ``s`` where ``g`` varies by less than ``eps`` on that cell, then the first
    ``k >= s`` with ``eta_k^n < eps``.  Every complement descendant of
    ``(s, i_s)`` on rows ``k..H`` must be a sub-cell of it with coefficient
    within ``2 eps`` of ``g(q(y))``.  ``h`` is represented by ``alpha_k^{i_k}``.
    """
    eps = Fraction(eps)
    d, p = c.diagram, c.presentation
    H = d.horizon
    ca = ca or central_approximation(c, g)
    comp = lam.complement_mask()
    rows = [k for k in range(1, H + 1) if any(comp[v] for v in d.row_vids(k))]
    if not rows:
        return HCheck("unknown", eps, reason="empty complement")
    chain = {k: next(v for v in d.vertices(k) if comp[d.vid(v)]) for k in rows}
    for k in rows[1:]:
        if k - 1 in chain and c.cell_of(chain[k - 1]) != p.cell(k, c.cell_of(chain[k])).parent:
            raise VerificationError(f"leftmost complement cells do not decrease at row {k}")
    s = next((k for k in rows if ca.osc[tuple(chain[k])] < eps), None)
    if s is None:
        return HCheck("unknown", eps, reason="no row with small oscillation")
    n = minimal_block(c, lam)
    k0 = next((k for k in range(s, H + 1) if ca.eta_at(k, n) < eps), None)
    if k0 is None:
        return HCheck("unknown", eps, s=s, reason="eta does not drop below eps")
    end = chain[H]
    y = canonical_point(c, leftmost_path_to(d, end)).point
    gy = g.value(y)
    gt = gtilde(c, g, lam)
    corner = chain[s]
    below = d.descendant_mask(d.mask([corner]))
    s_cells = set(p.descendants_at(s, c.cell_of(corner), H))
    worst = Fraction(0)
    for k in range(k0, H + 1):
        for v in d.vertices(k):
            vid = d.vid(v)
            if not (comp[vid] and below[vid]):
                continue
            pos = c.cell_of(v)
            if p.cell(k, pos).block != p.cell(s, c.cell_of(corner)).block or \
                    not set(p.descendants_at(k, pos, H)) <= s_cells:
                raise VerificationError(f"complement vertex {v} leaves the cell of {corner}")
            worst = max(worst, abs(gy - ca.alpha[tuple(v)]))
    h = ca.alpha[tuple(chain[k0])]
    if gt.value is None:
        return HCheck("unknown", eps, s, k0, h, None, worst, "lift not stabilized")
    ok = worst < 2 * eps and abs(h - gt.value) < 3 * eps
    return HCheck("pass" if ok else "fail", eps, s, k0, h, gt.value, worst)


# -- the bijection -------------------------------------------------------------

@dataclass
class PsiReport:
    horizon: int
    pairs: list[dict]
    contradictions: list[dict]
    unknown: list[dict]
    surjectivity: list[dict]
    glimm_classes: list[list[int]]
    touch_classes: list[list[int]]

    @property
    def status(self) -> str:
        bad_surj = [s for s in self.surjectivity if s["status"] == "fail"]
        if self.contradictions or bad_surj:
            return "fail"
        return "pass"

    def to_json(self):
        return {"status": self.status, "horizon": self.horizon, "pairs": self.pairs,
                "contradictions": self.contradictions, "unknown": self.unknown,
                "surjectivity": self.surjectivity, "glimm_classes": self.glimm_classes,
                "touch_classes": self.touch_classes}


def surjectivity_check(c: ConstructedDiagram, v: Vertex, lam: IdealSubdiagram,
                       window: int = WINDOW) -> dict:
    """Round trip of a truncated primitive through its canonical point."""
    d = c.diagram
    n = minimal_block(c, lam)
    cp = canonical_point(c, leftmost_path_to(d, v), window)
    out = {"vertex": str(v), "block": n, "point": str(cp.point), "stable_until": cp.stable_until}
    if not cp.stabilized:
        out["status"] = "unknown"
        return out
    ok = n is not None and cp.point.block <= n
    comp = lam.complement_mask()
    ok = ok and all(comp[d.vid(u)] for u in cp.path.vertices if u.row <= cp.stable_until)
    ok = ok and ideal_of_point(c, cp.point) == lam
    out["status"] = "pass" if ok else "fail"
    return out


def psi_check(c: ConstructedDiagram, sample: Sequence[PointSpec],
              pairs: Sequence[tuple[int, int]] | None = None, window: int = WINDOW) -> PsiReport:
    """Touch verdicts against Glimm verdicts on sampled pairs, and the round
    trip of every truncated primitive ideal."""
    p = c.presentation
    H = c.horizon
    paths = [c.point_path(x) for x in sample]
    classes = glimm_classes(c, paths, window)
    cls_of = {i: ci for ci, members in enumerate(classes.partition) for i in members}
    if pairs is None:
        pairs = [(i, j) for i in range(len(sample)) for j in range(i, len(sample))]
    rows, bad, unknown = [], [], []
    touch_uf = UnionFind(len(sample))
    for i, j in pairs:
        tv = persistent_touch(p, sample[i], sample[j], H, window)
        if tv.status == "identified":
            touch_uf.union(i, j)
        if cls_of[i] == cls_of[j]:
            gv = GlimmVerdict("equivalent", "class", H)
        else:
            gv = glimm_equiv(c, paths[i], paths[j], H, window)
        row = {"a": str(sample[i]), "b": str(sample[j]), "touch": tv.status, "glimm": gv.status}
        rows.append(row)
        if (tv.status, gv.status) in {("identified", "distinct"), ("separated", "equivalent")}:
            bad.append(row)
        elif "unknown" in (tv.status, gv.status):
            unknown.append(row)
    surj = [surjectivity_check(c, v, lam, window) for v, lam in truncated_primitives(c.diagram)]
    return PsiReport(H, rows, bad, unknown, surj, classes.partition, touch_uf.classes())


def psi_report_json(c: ConstructedDiagram, sample: Sequence[PointSpec]) -> dict:
    rep = psi_check(c, sample)
    out = rep.to_json()
    out["sample"] = [x.to_json() for x in sample]
    return out


def ideal_of_point(c: ConstructedDiagram, x: PointSpec) -> IdealSubdiagram:
    return largest_ideal_avoiding_path(c.diagram, c.point_path(x))
