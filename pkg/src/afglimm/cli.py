"""Command-line interface.

Every subcommand prints a JSON report (keys sorted, so identical inputs
give identical bytes) and, with ``--out``, also writes it there.  Exit
status: 0 when all checks pass or are unknown, 1 when a check fails,
2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .construct import ConstructionError, construct
from .diagram import DiagramError
from .generators import Example, parse_example, reattach
from .glimm import (VerificationError, central_approximation, gtilde, psi_check,
                    verify_h_equals_gtilde, verify_strict_cauchy)
from .ideals import (IdealError, compare_path_ideals, is_ideal_subdiagram, is_prime_complement,
                     truncated_primitives)
from .analysis import ClassificationError, baire_report, locally_compact_set
from .presentation import (PointSpec, PresentationError, QuotientPresentation, SampledSpace,
                           build_from_samples, leftmost_point, validate)

DEFAULT_HORIZON = 8
TRIALS = 20


class UsageError(Exception):
    pass


# -- inputs --------------------------------------------------------------------

def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


class Source:
    """The presentation under study, from ``--example`` or ``--input``."""

    def __init__(self, args):
        if bool(args.example) == bool(args.input):
            raise UsageError("give exactly one of --example and --input")
        self.example: Example | None = None
        self.fixed: QuotientPresentation | None = None
        if args.example:
            self.example = parse_example(args.example)
        else:
            self.fixed = reattach(QuotientPresentation.from_json(_read_json(args.input)))
        self.horizon = args.horizon or (self.fixed.horizon if self.fixed else DEFAULT_HORIZON)
        if self.fixed is not None and self.horizon > self.fixed.horizon:
            raise UsageError(f"--horizon {self.horizon} exceeds the {self.fixed.horizon} "
                             "rows of the input presentation")

    def presentation(self) -> QuotientPresentation:
        if self.example is not None:
            return self.example.presentation(self.horizon)
        p = self.fixed
        return p if self.horizon == p.horizon else p.truncate(self.horizon)

    def sample(self, p: QuotientPresentation) -> list[PointSpec]:
        if self.example is not None:
            return self.example.sample_points(self.horizon)
        row = min(3, p.horizon)
        return [leftmost_point(p, row, c.pos) for c in p.cells[row - 1]]

    def meta(self) -> dict:
        if self.example is not None:
            gen = {"name": self.example.name, "params": dict(sorted(self.example.params.items()))}
        else:
            gen = self.fixed.generator or {"name": "input"}
        return {"horizon": self.horizon, "generator": gen}


# -- subcommands ---------------------------------------------------------------

def cmd_validate(args, src: Source):
    rep = validate(src.presentation())
    out = {"status": "pass" if rep else "fail", **rep.to_json()}
    return out, None


def cmd_ingest(args, src):
    if not args.input:
        raise UsageError("ingest needs --input with sampled points")
    space = SampledSpace.from_json(_read_json(args.input))
    p = build_from_samples(space, args.depth or DEFAULT_HORIZON)
    rep = validate(p)
    out = {"status": "pass" if rep else "fail", "validation": rep.to_json(),
           "horizon": p.horizon, "generator": p.generator, "presentation": p.to_json()}
    return out, {"presentation.json": _dumps(p.to_json())}


def cmd_construct(args, src):
    p = src.presentation()
    c = construct(p)
    fmt = args.format or "dot"
    body = c.diagram.export(fmt, labels=c.labels if fmt == "dot" else None).decode()
    table = c.table_json()
    out = {"status": "pass", "rows": [len(c.diagram.vertices(k)) for k in range(1, c.horizon + 1)],
           "edges": len(c.diagram.edges()), "table": table}
    return out, {f"diagram.{fmt}": body, "table.json": _dumps(table)}, body


def cmd_ideals(args, src):
    p = src.presentation()
    c = construct(p)
    d = c.diagram
    failures, unknown = [], []
    blocks = []
    for n in range(1, min(p.n_blocks, c.horizon) + 1):
        blocks.append({"n": n, "size": len(c.block_ideal(n))})
    prims = []
    for v, lam in truncated_primitives(d):
        chk = is_ideal_subdiagram(d, lam.mask)
        prime = is_prime_complement(lam)
        entry = {"vertex": str(v), "size": len(lam), "ideal": bool(chk), "prime": prime.status}
        prims.append(entry)
        if not chk or prime.status == "no":
            failures.append(entry)
        elif prime.status == "unknown":
            unknown.append(entry)
    paths = []
    for x in src.sample(p):
        cmp_ = compare_path_ideals(d, c.point_path(x))
        paths.append({"point": str(x), "fixpoint_size": len(cmp_.fixpoint),
                      "descendant_complement_is_ideal": cmp_.complement_is_ideal,
                      "agree": cmp_.agree})
    status = "fail" if failures else "pass"
    return {"status": status, "block_ideals": blocks, "primitives": prims,
            "failures": failures, "unknown": unknown, "path_ideals": paths}, None


def cmd_glimm(args, src):
    p = src.presentation()
    c = construct(p)
    sample = src.sample(p)
    psi = psi_check(c, sample)
    out = {"psi": psi.to_json()}
    unknown = [{"check": "psi", **u} for u in psi.unknown]
    unknown += [{"check": "surjectivity", **s} for s in psi.surjectivity if s["status"] == "unknown"]
    failed = psi.status == "fail"
    if src.example is not None:
        rng = random.Random(args.seed)
        cauchy, hcheck, lifts = [], [], []
        H = c.horizon
        prims = truncated_primitives(c.diagram)
        for _ in range(TRIALS):
            g = src.example.random_function(p, rng, args.depth or 4)
            ca = central_approximation(c, g)
            if H >= 3:
                m = rng.randint(1, H - 2)
                k = rng.randint(m + 1, H - 1)
                l = rng.randint(k + 1, H)
                i = rng.randint(1, len(c.diagram.vertices(m)))
                chk = verify_strict_cauchy(ca, m, i, k, l, strict=False)
                cauchy.append(chk.to_json())
                failed |= not chk.ok
            v, lam = prims[rng.randrange(len(prims))]
            eps = Fraction(1, 2 ** rng.randint(1, 5))
            h = verify_h_equals_gtilde(c, g, lam, eps, ca)
            hcheck.append({"vertex": str(v), **h.to_json()})
            failed |= h.status == "fail"
            if h.status == "unknown":
                unknown.append({"check": "h", "vertex": str(v), "eps": str(eps)})
            lifts.append({"vertex": str(v), **gtilde(c, g, lam).to_json()})
        out.update({"seed": args.seed, "cauchy": cauchy, "h_equals_gtilde": hcheck,
                    "gtilde": lifts})
    out["status"] = "fail" if failed else "pass"
    out["unknown"] = unknown
    return out, None


def _classify_sample(src, p):
    sample = src.sample(p)
    if src.example is not None:
        sample += [x for x in src.example.glued_points(src.horizon) if x not in sample]
    return sample


def cmd_classify(args, src):
    p = src.presentation()
    lab = locally_compact_set(p, _classify_sample(src, p))
    out = lab.to_json()
    out["status"] = "pass"
    out["unknown"] = [e["point"] for e in out["points"] if e["verdict"] == "Unknown"]
    return out, None


def cmd_baire(args, src):
    p = src.presentation()
    rep = baire_report(p, _classify_sample(src, p))
    rep["status"] = "pass"
    return rep, None


def cmd_export(args, src):
    p = src.presentation()
    c = construct(p)
    fmt = args.format or "json"
    body = c.diagram.export(fmt, labels=c.labels if fmt == "dot" else None).decode()
    files = {"presentation.json": _dumps(p.to_json()), f"diagram.{fmt}": body,
             "table.json": _dumps(c.table_json())}
    out = {"status": "pass", "files": sorted(files)}
    return out, files, body


COMMANDS = {
    "validate": (cmd_validate, "check a presentation against its invariants"),
    "ingest": (cmd_ingest, "build a presentation from sampled points"),
    "construct": (cmd_construct, "compile the Bratteli diagram"),
    "ideals": (cmd_ideals, "enumerate and check primitive ideals at the horizon"),
    "glimm": (cmd_glimm, "check the point / Glimm class correspondence"),
    "classify": (cmd_classify, "classify sampled points by local compactness"),
    "baire": (cmd_baire, "report whether the locally compact points are dense"),
    "export": (cmd_export, "write presentation, diagram and index table"),
}


# -- plumbing ------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afglimm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, help="rows to materialize")
    common.add_argument("--depth", type=int, help="refinement depth (ingest, random functions)")
    common.add_argument("--input", help="presentation or sample JSON file")
    common.add_argument("--example", help="builtin example, e.g. cantor-interval or fan:blocks=3")
    common.add_argument("--out", help="directory for report and artifact files")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--format", choices=("dot", "json"), help="diagram format")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.horizon is not None and args.horizon < 1:
        print("error: --horizon must be positive", file=stderr)
        return 2
    func = COMMANDS[args.command][0]
    start = time.perf_counter()
    try:
        src = None if args.command == "ingest" else Source(args)
        result = func(args, src)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except (PresentationError, DiagramError, IdealError) as exc:
        print(f"error: invalid input: {exc}", file=stderr)
        return 2
    except (ConstructionError, VerificationError, ClassificationError) as exc:
        report = {"status": "fail", "error": str(exc), "command": args.command}
        print(_dumps(report), end="", file=stdout)
        return 1
    report, files = result[0], result[1]
    body = result[2] if len(result) > 2 else None
    if src is not None:
        report.update(src.meta())
    report["command"] = args.command
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - start, 6)
    text = _dumps(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text)
        for fname, content in (files or {}).items():
            (out / fname).write_text(content)
    if body is not None and not args.out:
        print(body.rstrip("\n"), file=stdout)
    else:
        print(text, end="", file=stdout)
    return 1 if report.get("status") == "fail" else 0


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
