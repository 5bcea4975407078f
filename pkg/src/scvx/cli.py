"""Command-line entry point: ``scvx <command> [options]``.

Reports go to stdout as JSON lines, a short summary goes to stderr.
Exit status is 0 when every requested report passes, 1 on a law failure
and 2 on bad input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .algebra import (
    LAW_KINDS,
    BarycenterOf,
    GeneralizedPointTable,
    LawReport,
    barycenter,
    check_laws,
    resolve_generalized_point,
    same,
)
from .components import Candidate, comp, divergence_witness, no_affine_to_two_witness
from .core import DEFAULT_POLICY, EvalPolicy
from .errors import NotDeterministic, ScvxError
from .giry import FinMeasurableSpace, Measure, integrate, rescale_to_unit, simple_approx
from .manifest import Manifest, ManifestError, dumps
from .sampling import DEFAULT_SEED
from .spaces import RInfSpace, Space, desk_carrier, generator_family, space_from_name

SET_KINDS = ("monad", "triangles")


class InputError(Exception):
    pass


class Run:
    def __init__(self, args):
        self.args = args
        self.policy = EvalPolicy(args.max_terms, args.tol, DEFAULT_POLICY.divergence_threshold)
        self.manifest = Manifest.load(args.manifest) if args.manifest else None
        self.failed = 0
        self.reports = 0

    def emit(self, obj):
        print(dumps(obj))

    def report(self, rep: LawReport, expect_fail: bool = False):
        ok = rep.passed != expect_fail
        for c in rep.counterexamples:
            self.emit({"kind": rep.kind, "subject": rep.subject, "counterexample": {
                "inputs": c.inputs, "lhs": c.lhs, "rhs": c.rhs, "gap": c.gap}})
        self.emit({"kind": rep.kind, "subject": rep.subject, "cases": rep.cases, "skipped": rep.skipped,
                   "counterexamples": len(rep.counterexamples), "pass": ok})
        print(f"[{'PASS' if ok else 'FAIL'}] {rep.kind} {rep.subject}: {rep.cases} cases, "
              f"{len(rep.counterexamples)} counterexamples", file=sys.stderr)
        self.reports += 1
        self.failed += not ok

    def space(self) -> Space:
        name = self.args.space or "disc3"
        if self.manifest is not None and name in self.manifest.spaces:
            return self.manifest.spaces[name]
        try:
            return space_from_name(name)
        except ValueError as e:
            raise InputError(str(e)) from None

    def need_manifest(self, section):
        if self.manifest is None:
            raise InputError(f"this command needs --manifest with a {section!r} section")
        return getattr(self.manifest, section)


def cmd_eval(run: Run):
    for name, (space, alpha, seq) in sorted(run.need_manifest("mixtures").items()):
        value = space.mix(alpha, seq, run.policy)
        run.emit({"kind": "eval", "name": name, "space": str(space), "value": value})
        print(f"[OK] {name} = {dumps(value)}", file=sys.stderr)


def cmd_barycenter(run: Run):
    for name, (space, weights) in sorted(run.need_manifest("barycenters").items()):
        P = Measure(FinMeasurableSpace.discrete(weights), weights)
        value = barycenter(space, P, run.policy)
        run.emit({"kind": "barycenter", "name": name, "space": str(space), "value": value})
        print(f"[OK] {name} = {dumps(value)}", file=sys.stderr)


def _laws_for(run: Run, kind: str):
    a = run.args
    seed = a.seed
    if kind in SET_KINDS:
        X = FinMeasurableSpace.discrete(range(a.size))
        return [check_laws(kind, X, run.policy, seed)]
    if run.manifest is not None and kind == "algebra" and run.manifest.rules and not a.space:
        return [check_laws(kind, h, run.policy, seed) for _, h in sorted(run.manifest.rules.items())]
    if run.manifest is not None and kind == "affine" and run.manifest.maps and not a.space:
        return [check_laws(kind, m, run.policy, seed) for _, m in sorted(run.manifest.maps.items())]
    space = run.space()
    if kind in ("scvx-axioms", "roundtrip"):
        return [check_laws(kind, space, run.policy, seed)]
    if kind == "algebra":
        return [check_laws(kind, BarycenterOf.on(space), run.policy, seed)]
    family = generator_family(space)
    if kind == "affine":
        return [check_laws(kind, m, run.policy, seed, carrier=_carrier_or_none(space)) for m in family]
    return [check_laws(kind, (m, space, RInfSpace()), run.policy, seed) for m in family]


def _carrier_or_none(space):
    try:
        return space.carrier()
    except ScvxError:
        return None


def cmd_laws(run: Run):
    kinds = list(LAW_KINDS) if run.args.kind == "all" else [run.args.kind]
    for kind in kinds:
        for rep in _laws_for(run, kind):
            run.report(rep)


def cmd_comp(run: Run):
    space = run.space()
    res = comp(space)
    try:
        carrier = desk_carrier(space)
    except ScvxError:
        carrier = ()
    run.emit({"kind": "comp", "space": str(space), "count": res.count,
              "projection": [[a, res.projection(a)] for a in carrier]})
    print(f"[OK] comp({space}) = {res.count}", file=sys.stderr)


def cmd_approx(run: Run):
    n = run.args.level
    if n < 0:
        raise InputError("--level must be nonnegative")
    measures = run.need_manifest("measures")
    for fname, m in sorted(run.need_manifest("functions").items()):
        scale, shift = 1, 0
        if any(not 0 <= v < 1 for _, v in m.table):
            m, scale, shift = rescale_to_unit(m)
        psi = simple_approx(m, n)
        coeffs = [[x, psi.coefficient(x)] for x in m.space.carrier]
        for pname, P in sorted(measures.items()):
            if P.space != m.space:
                continue
            lo, hi = integrate(psi.as_function(), P), integrate(m, P)
            ok = 0 <= hi - lo <= Fraction(1, 2**n)
            run.emit({"kind": "approx", "function": fname, "measure": pname, "level": n,
                      "scale": scale, "shift": shift, "coefficients": coeffs, "integral_psi": lo, "integral": hi, "pass": ok})
            run.reports += 1
            run.failed += not ok
            print(f"[{'PASS' if ok else 'FAIL'}] approx {fname} vs {pname} at level {n}", file=sys.stderr)


def cmd_resolve(run: Run):
    space = run.space()
    rep = LawReport("resolve", str(space))
    for a in desk_carrier(space):
        J = GeneralizedPointTable.evaluation(space, a)
        b = resolve_generalized_point(space, J)
        same_atom = all(same(m(a), m(b)) for m in J.functions)
        run.emit({"kind": "resolve", "point": a, "resolved": b, "pass": same_atom})
        rep.add({"point": a}, tuple(m(b) for m in J.functions), tuple(m(a) for m in J.functions))
    if run.manifest is not None:
        for name, P in sorted(run.manifest.measures.items()):
            J = GeneralizedPointTable.on_indicators(space, P)
            try:
                b = resolve_generalized_point(space, J, P.space.carrier)
                run.emit({"kind": "resolve", "measure": name, "resolved": b, "deterministic": True})
            except NotDeterministic as e:
                run.emit({"kind": "resolve", "measure": name, "deterministic": False, "reason": str(e)})
    run.report(rep.finish())


def cmd_witness(run: Run):
    gamma = no_affine_to_two_witness(Candidate(), run.policy)
    found = any(c.lhs == 0 and c.rhs == 1 for c in gamma.counterexamples)
    run.report(gamma, expect_fail=found)
    run.report(divergence_witness(policy=run.policy))


COMMANDS = {
    "eval": cmd_eval,
    "barycenter": cmd_barycenter,
    "laws": cmd_laws,
    "comp": cmd_comp,
    "approx": cmd_approx,
    "resolve": cmd_resolve,
    "witness": cmd_witness,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="JSON manifest with named spaces, measures, maps and rules")
    common.add_argument("--space", help="space name: rinf, infunit, discN, sjN, semidirectN[-max|-min], findistK, or a manifest space")
    common.add_argument("--max-terms", type=int, default=DEFAULT_POLICY.max_terms)
    common.add_argument("--tol", type=float, default=DEFAULT_POLICY.abs_tol)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    ap = argparse.ArgumentParser(prog="scvx", description="Super convex spaces, finite Giry monad and law checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate the manifest's mixtures")
    sub.add_parser("barycenter", parents=[common], help="barycenters of the manifest's weighted points")
    laws = sub.add_parser("laws", parents=[common], help="run a law suite")
    laws.add_argument("--kind", required=True, choices=sorted(LAW_KINDS) + ["all"])
    laws.add_argument("--size", type=int, default=3, help="carrier size for monad and triangle checks")
    sub.add_parser("comp", parents=[common], help="component count and projection")
    approx = sub.add_parser("approx", parents=[common], help="simple-function approximation of manifest functions")
    approx.add_argument("--level", type=int, required=True)
    sub.add_parser("resolve", parents=[common], help="recover points from their evaluation functionals")
    sub.add_parser("witness", parents=[common], help="single-component and divergence witnesses")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        COMMANDS[args.command](run)
    except ManifestError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except (InputError, ScvxError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    if run.reports:
        print(f"{run.reports - run.failed}/{run.reports} reports passed", file=sys.stderr)
    return 1 if run.failed else 0


if __name__ == "__main__":
    sys.exit(main())
