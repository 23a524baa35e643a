"""Local compactness of points of the quotient, read off a presentation.

For a point ``x`` the cover ``U_n`` consists of the whole blocks ``<= n``
that meet the fibre of ``x``, and the neighbourhood ``V_n`` consists of the
cells on row ``n`` (or the birth row of later blocks) that touch the cell
of ``x``.  If some ``V_n`` is covered by ``U_n``, then ``x`` has a compact
neighbourhood.  If instead points ``y_n`` in ``V_n`` escape every ``U_n``
the point is not locally compact; that direction needs an explicit rule
producing ``y_n`` for all ``n``, supplied by the presentation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .presentation import PointSpec, QuotientPresentation, cell_path, leftmost_point

MIN_WITNESSES = 3
MARGIN = 3


class ClassificationError(AssertionError):
    pass


@dataclass(frozen=True)
class ClassificationWitness:
    verdict: str  # "LocallyCompact" | "NotLocallyCompact" | "Unknown"
    horizon: int
    n0: int | None = None
    compact_witness: tuple[tuple[int, str], ...] | None = None  # (block, root cell id)
    failure_witness: tuple[PointSpec, ...] | None = None

    def __post_init__(self):
        has = (self.compact_witness is not None, self.failure_witness is not None)
        if self.verdict == "LocallyCompact" and has != (True, False):
            raise ClassificationError("a compact verdict needs exactly the compact witness")
        if self.verdict == "NotLocallyCompact" and has != (False, True):
            raise ClassificationError("a failure verdict needs exactly the failure witness")
        if self.verdict == "Unknown" and any(has):
            raise ClassificationError("an unknown verdict carries no witness")

    def to_json(self):
        out = {"verdict": self.verdict, "horizon": self.horizon}
        if self.compact_witness is not None:
            out["n0"] = self.n0
            out["compact_witness"] = [{"block": b, "cell": cid} for b, cid in self.compact_witness]
        if self.failure_witness is not None:
            out["failure_witness"] = [{"n": n, "point": str(y)}
                                      for n, y in enumerate(self.failure_witness, 1)]
            out["rule"] = "generator"
        return out


def _cell_at(p: QuotientPresentation, x: PointSpec, row: int) -> int:
    return cell_path(p, x, row)[-1]


def fibre_blocks(p: QuotientPresentation, x: PointSpec, horizon: int | None = None) -> list[int]:
    """Blocks whose cell family reaches the fibre of ``x`` on the last row."""
    H = p.horizon if horizon is None else horizon
    if x.block > H:
        return []
    cx = _cell_at(p, x, H)
    near = p.touching(H, cx)
    return sorted({p.cell(H, t).block for t in near})


def cover(p: QuotientPresentation, x: PointSpec, n: int, horizon: int | None = None):
    """Root cells of ``U_n``: one per block ``<= n`` meeting the fibre."""
    blocks = [b for b in fibre_blocks(p, x, horizon) if b <= n]
    return tuple((b, p.cell(b, r).id) for b in blocks for r in p.roots(b)
                 if _root_meets(p, b, r, x, horizon))


def _root_meets(p, b, r, x, horizon):
    H = p.horizon if horizon is None else horizon
    cx = _cell_at(p, x, H)
    return any(t in p.touching(H, cx) for t in p.descendants_at(b, r, H))


def _reach(p: QuotientPresentation, x: PointSpec, n: int, row: int) -> set[int]:
    """Cells on ``row`` touching the part of ``x``'s row-``n`` cell there."""
    top = max(n, x.block)
    out: set[int] = set()
    for d in p.descendants_at(top, _cell_at(p, x, top), row):
        out |= p.touching(row, d)
    return out


def neighbourhood(p: QuotientPresentation, x: PointSpec, n: int,
                  horizon: int | None = None) -> dict[int, set[int]]:
    """``V_n`` as block -> cell positions on row ``max(n, block, x.block)``."""
    H = p.horizon if horizon is None else horizon
    out: dict[int, set[int]] = {}
    for b in range(1, H + 1):
        row = max(n, b, x.block)
        if row > H:
            break
        cells = {t for t in _reach(p, x, n, row) if p.cell(row, t).block == b}
        if cells:
            out[b] = cells
    return out


def in_neighbourhood(p: QuotientPresentation, x: PointSpec, n: int, y: PointSpec,
                     horizon: int | None = None) -> bool:
    H = p.horizon if horizon is None else horizon
    row = max(n, y.block, x.block)
    if row > H:
        return False
    return _cell_at(p, y, row) in _reach(p, x, n, row)


def escapes_cover(p: QuotientPresentation, y: PointSpec, n: int,
                  horizon: int | None = None) -> bool:
    """Some cell of ``y`` touches no cell of the blocks ``<= n``."""
    H = p.horizon if horizon is None else horizon
    for row in range(y.block, H + 1):
        cy = _cell_at(p, y, row)
        if all(p.cell(row, t).block > n for t in p.touching(row, cy)):
            return True
    return False


def _compact_certificate(p, x, H):
    for n in range(max(1, x.block), H):
        U = {b for b, _ in cover(p, x, n, H)}
        V = neighbourhood(p, x, n, H)
        if V and set(V) <= U:
            return n, cover(p, x, n, H)
    return None


def _failure_certificate(p, x, H):
    rule_for = getattr(p, "witness_rule", None)
    if rule_for is None:
        return None
    rule = rule_for(x)
    if rule is None:
        return None
    ys = []
    for n in range(1, H - 1):
        y = rule(n)
        if not (in_neighbourhood(p, x, n, y, H) and escapes_cover(p, y, n, H)):
            return None
        ys.append(y)
    if len(ys) < MIN_WITNESSES:
        return None
    return tuple(ys)


def classify_point(p: QuotientPresentation, x: PointSpec,
                   horizon: int | None = None) -> ClassificationWitness:
    H = p.horizon if horizon is None else horizon
    good = _compact_certificate(p, x, H)
    bad = _failure_certificate(p, x, H)
    if good and bad:
        raise ClassificationError(f"point {x} has both a compact and a failure witness")
    if good:
        n0, fam = good
        return ClassificationWitness("LocallyCompact", H, n0, fam)
    if bad:
        return ClassificationWitness("NotLocallyCompact", H, failure_witness=bad)
    return ClassificationWitness("Unknown", H)


@dataclass
class LabeledSample:
    points: list[PointSpec]
    verdicts: list[ClassificationWitness]
    horizon: int

    @property
    def S(self) -> list[int]:
        return [i for i, w in enumerate(self.verdicts) if w.verdict == "LocallyCompact"]

    def to_json(self):
        return {"horizon": self.horizon, "S": self.S,
                "points": [{"point": str(x), **w.to_json()}
                           for x, w in zip(self.points, self.verdicts)]}


def locally_compact_set(p: QuotientPresentation, sample: Sequence[PointSpec],
                        horizon: int | None = None) -> LabeledSample:
    """Classify every sampled point; no certified neighbourhood of a point
    of ``S`` may contain a sampled point known to lie outside ``S``."""
    H = p.horizon if horizon is None else horizon
    verdicts = [classify_point(p, x, H) for x in sample]
    for i, w in enumerate(verdicts):
        if w.verdict != "LocallyCompact":
            continue
        for j, y in enumerate(sample):
            if verdicts[j].verdict == "NotLocallyCompact" and \
                    in_neighbourhood(p, sample[i], w.n0, y, H):
                raise ClassificationError(
                    f"neighbourhood of {sample[i]} holds non-locally-compact {y}")
    return LabeledSample(list(sample), verdicts, H)


def baire_report(p: QuotientPresentation, sample: Sequence[PointSpec],
                 horizon: int | None = None, rows: Sequence[int] | None = None) -> dict:
    """Does every sampled basic open set contain a point of ``S``?

    The basic open sets are the neighbourhoods ``V_n`` of the sampled
    points for ``n`` in ``rows`` (default: up to ``MARGIN`` rows below the
    horizon, so that probes still have room to be classified).
    Besides the sampled points, the leftmost point of every cell of ``V_n``
    is classified as a probe.
    """
    H = p.horizon if horizon is None else horizon
    lab = locally_compact_set(p, sample, H)
    rows = list(rows) if rows is not None else list(range(1, H - MARGIN + 1))
    probes: dict[PointSpec, str] = {}

    def probe(row, pos):
        y = leftmost_point(p, row, pos)
        if y not in probes:
            probes[y] = classify_point(p, y, H).verdict
        return probes[y]

    n_open = 0
    missing, open_question = [], []
    for x in sample:
        for n in rows:
            if max(n, x.block) > H:
                continue
            n_open += 1
            inside = [j for j, y in enumerate(sample) if in_neighbourhood(p, x, n, y, H)]
            labels = {lab.verdicts[j].verdict for j in inside}
            for b, cells in neighbourhood(p, x, n, H).items():
                if "LocallyCompact" in labels:
                    break
                row = max(n, b, x.block)
                labels |= {probe(row, t) for t in sorted(cells)}
            if "LocallyCompact" in labels:
                continue
            entry = {"point": str(x), "n": n, "members": inside}
            (open_question if "Unknown" in labels else missing).append(entry)
    if missing:
        verdict = "S misses open set"
    elif open_question:
        verdict = "inconclusive"
    else:
        verdict = "S dense on sample"
    return {"verdict": verdict, "horizon": H, "S": lab.S,
            "witness": missing[0] if missing else None,
            "open_sets": n_open, "probes": len(probes), "unresolved": open_question,
            "classification": lab.to_json()}
