"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import SCHEMA_VERSION
from .errors import PtolemyError
from .groupoid import base_object, loop_from_json, loop_report, verify_relations
from .qdilog import (
    QDParams,
    alpha,
    difference_defect,
    phi_estimate,
    psi_compact,
    reflexivity_defect,
    unitarity_defect,
)
from .surface import (
    Seed,
    flip,
    seed_from_json,
    seed_to_json,
    standard_surface,
    triangulation_from_json,
    triangulation_to_json,
)
from .symplectic import (
    decomposition_from_json,
    kashiwara_index,
    maslov_form,
    space_from_json,
    subspace_from_json,
)
from . import linalg as la
from .phase import residual_to_json
from .weil import Grid, expected_triple_phase, triple_phase_check


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _load(value: str, flag: str):
    """Inline JSON or a path to a JSON file."""
    text = value
    if not value.lstrip().startswith(("{", "[")):
        try:
            text = Path(value).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"{flag}: cannot read {value!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: invalid JSON ({exc.msg})") from None


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _seed_arg(args) -> Seed:
    if getattr(args, "surface", None):
        return Seed.from_triangulation(triangulation_from_json(_load(args.surface, "--surface")))
    if getattr(args, "seed", None):
        return seed_from_json(_load(args.seed, "--seed"))
    if getattr(args, "genus", None) is not None and getattr(args, "punctures", None) is not None:
        return Seed.from_triangulation(standard_surface(args.genus, args.punctures))
    raise UsageError("one of --surface or --seed is required")


def _positive(name):
    def conv(s):
        try:
            v = float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v

    return conv


def _pow2(s):
    try:
        n = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError("--grid-n must be an integer") from None
    if n < 2 or n & (n - 1):
        raise argparse.ArgumentTypeError("--grid-n must be a power of two")
    return n


# -- subcommands -------------------------------------------------------------

def cmd_surface(args):
    return triangulation_to_json(standard_surface(args.genus, args.punctures))


def cmd_seed(args):
    return seed_to_json(_seed_arg(args))


def cmd_flip(args):
    if args.surface:
        t = triangulation_from_json(_load(args.surface, "--surface"))
        k = {str(e): e for e in t.edges}.get(args.edge)
        if k is None:
            raise UsageError(f"--edge: unknown edge {args.edge!r}")
        return triangulation_to_json(flip(t, k))
    s = _seed_arg(args)
    k = {str(e): e for e in s.labels}.get(args.edge)
    if k is None:
        raise UsageError(f"--edge: unknown label {args.edge!r}")
    return seed_to_json(s.mutate(k))


def cmd_maslov(args):
    V = space_from_json(_load(args.space, "--space"))
    ls = [subspace_from_json(_load(v, f"--l{i}")) for i, v in enumerate((args.l1, args.l2, args.l3), 1)]
    return {"tau": kashiwara_index(V, *ls), "form": la.fmt_mat(maslov_form(V, *ls))}


def cmd_phase(args):
    seed = _seed_arg(args)
    decomp = decomposition_from_json(_load(args.decomposition, "--decomposition")) if args.decomposition else None
    base = base_object(seed, decomp)
    spec = loop_from_json(base, _load(args.loop, "--loop"))
    r = loop_report(spec)
    out = r.phase.to_json()
    out["residual"] = residual_to_json(r.residual)
    return out


def cmd_qdilog(args):
    p = QDParams(args.hbar, tolerance=args.tolerance)
    z = complex(args.re, args.im)
    if args.action == "eval":
        value, err = phi_estimate(z, p)
        out = {"re": value.real, "im": value.imag, "abs": abs(value), "est_error": err}
        if args.check == "unitarity":
            out["check"] = {"unitarity": unitarity_defect(args.re, p)}
        elif args.check == "reflexivity":
            out["check"] = {"reflexivity": reflexivity_defect(z, p)}
        elif args.check == "difference":
            out["check"] = {"difference_hbar": difference_defect(z, p, "hbar"), "difference_one": difference_defect(z, p, "one")}
        return out
    if args.action == "alpha":
        return {"hbar": args.hbar, "alpha": _complex(alpha(args.hbar))}
    if args.q_abs is None:
        raise UsageError("--q-abs is required for 'compact'")
    q = complex(args.q_abs * math.cos(args.q_arg), args.q_abs * math.sin(args.q_arg))
    val, tail = psi_compact(z, q, args.terms)
    return {"value": _complex(val), "tail_bound": tail}


def cmd_weil(args):
    if args.triple:
        data = _load(args.triple, "--triple")
        try:
            V = space_from_json(data["space"])
            ds = [decomposition_from_json(d) for d in data["decompositions"]]
        except (KeyError, TypeError):
            raise UsageError("--triple: expected {\"space\": .., \"decompositions\": [d1, d2, d3]}") from None
        if len(ds) != 3:
            raise UsageError("--triple: exactly three decompositions are required")
    elif args.space and args.d1 and args.d2 and args.d3:
        V = space_from_json(_load(args.space, "--space"))
        ds = [decomposition_from_json(_load(v, f"--d{i}")) for i, v in enumerate((args.d1, args.d2, args.d3), 1)]
    else:
        raise UsageError("give --triple, or --space with --d1 --d2 --d3")
    grid = Grid(args.grid_L, args.grid_n)
    got = triple_phase_check(V, *ds, grid=grid, hbar=args.hbar)
    want = expected_triple_phase(V, *ds)
    tau = kashiwara_index(V, *(d.lagrangian for d in ds))
    return {"scalar": _complex(got), "expected": _complex(want), "tau": tau, "deviation": abs(got - want)}


def cmd_verify(args):
    seed = _seed_arg(args)
    kinds = {
        "all": ("twice", "square", "pentagon", "perm", "ff", "compat"),
        "pentagon": ("pentagon",),
        "square": ("square",),
        "twice": ("twice",),
    }[args.loops]
    return [r.to_json() for r in verify_relations(seed, kinds)]


# -- parser ------------------------------------------------------------------

def _source_flags(p, genus=False):
    p.add_argument("--surface", help="triangulation JSON (file or inline)")
    p.add_argument("--seed", help="seed JSON (file or inline)")
    if genus:
        p.add_argument("--genus", type=int)
        p.add_argument("--punctures", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptolemy-phase", description="Phase constants of quantum Teichmüller intertwiners.")
    parser.add_argument("--version", action="version", version=f"schema {SCHEMA_VERSION}")
    parser.add_argument("--output", help="write JSON here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("surface", help="standard triangulation of a punctured surface")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--punctures", type=int, required=True)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("seed", help="exchange matrix of a triangulation")
    _source_flags(p, genus=True)
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("flip", help="flip a triangulation or mutate a seed")
    _source_flags(p)
    p.add_argument("--edge", required=True)
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("maslov", help="Kashiwara index of three essential Lagrangians")
    p.add_argument("--space", required=True)
    p.add_argument("--l1", required=True)
    p.add_argument("--l2", required=True)
    p.add_argument("--l3", required=True)
    p.set_defaults(func=cmd_maslov)

    p = sub.add_parser("phase", help="phase constant of a groupoid loop")
    p.add_argument("action", choices=["loop"])
    _source_flags(p, genus=True)
    p.add_argument("--loop", required=True)
    p.add_argument("--decomposition", help="base decomposition (default: canonical)")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("qdilog", help="quantum dilogarithm")
    p.add_argument("action", choices=["eval", "alpha", "compact"])
    p.add_argument("--hbar", type=_positive("--hbar"), default=1.0)
    p.add_argument("--re", type=float, default=0.0)
    p.add_argument("--im", type=float, default=0.0)
    p.add_argument("--tolerance", type=_positive("--tolerance"), default=1e-12)
    p.add_argument("--check", choices=["unitarity", "reflexivity", "difference"])
    p.add_argument("--q-abs", type=float)
    p.add_argument("--q-arg", type=float, default=0.0)
    p.add_argument("--terms", type=int, default=200)
    p.set_defaults(func=cmd_qdilog)

    p = sub.add_parser("weil", help="numerical triple composition of rank-one intertwiners")
    p.add_argument("action", choices=["triple"])
    p.add_argument("--triple", help="JSON {space, decompositions: [d1, d2, d3]}")
    p.add_argument("--space")
    p.add_argument("--d1")
    p.add_argument("--d2")
    p.add_argument("--d3")
    p.add_argument("--hbar", type=_positive("--hbar"), default=1.0)
    p.add_argument("--grid-n", type=_pow2, default=1024)
    p.add_argument("--grid-L", type=_positive("--grid-L"), default=10.0)
    p.set_defaults(func=cmd_weil)

    p = sub.add_parser("verify", help="verify all standard relation loops at a seed")
    _source_flags(p, genus=True)
    p.add_argument("--loops", choices=["all", "pentagon", "square", "twice"], default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"ptolemy-phase: error: {exc}", file=sys.stderr)
        return 2
    except (PtolemyError, ValueError, KeyError, ZeroDivisionError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
