"""Command-line interface: ``magk <subcommand> ...``.

Every run prints exactly one JSON document. Exit codes: 0 on success, 2 on
invalid input, 3 when a numerical contract or a machine check fails.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bloch import (DEFAULT_MESH, DEFAULT_TOL, ChernResult, SymmetryOp, TightBindingModel,
                    builtin_c4t_model, chern_and_gap, invariants, spin_blocks)
from .catalog import load_action_spec, load_group, load_model_spec
from .corep import classification_report, corep_basis, magnetic_context, twisted_context
from .errors import MagkError, SchemaError, TheoremViolated, ValidationError
from .groups import FiniteMagneticGroup
from .kcoeff import magnetic_coefficients
from .reporting import dumps, envelope
from .torus import AffineTorusAction, delocalized_rank, spin_sectors

BUILTIN_MODELS = ("c4t-model",)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"invalid arguments: {message}", pointer="argv")


def _add_group_args(p, twist=True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", metavar="NAME", help="catalog group name")
    src.add_argument("--group", metavar="PATH", help="group spec JSON file")
    if twist:
        p.add_argument("--twist", metavar="builtin|PATH",
                       help="'builtin' for the group file's own cocycle, or a cocycle JSON file")


def _add_model_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=BUILTIN_MODELS, help="builtin model")
    src.add_argument("--model", metavar="NAME|PATH", help="catalog model name or model JSON file")
    p.add_argument("--mass", type=float, default=1.0, help="mass of the builtin model (default 1.0)")
    p.add_argument("--mesh", type=int, default=DEFAULT_MESH, help="k-mesh size N (default 48)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="symmetry residual tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="magk", description="Magnetic equivariant K-theory toolkit.")
    parser.add_argument("--version", action="version", version=f"magk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="corep types, basis and the rational iso check")
    _add_group_args(p)
    p = sub.add_parser("ktable", help="coefficient groups for a range of degrees")
    _add_group_args(p)
    p.add_argument("--qmin", type=int, default=-7)
    p.add_argument("--qmax", type=int, default=0)
    p = sub.add_parser("restrict", help="restriction matrix to R(G0)")
    _add_group_args(p)
    p = sub.add_parser("torus-rank", help="rational rank of K-theory of T^2")
    _add_group_args(p)
    p.add_argument("--action", required=True, metavar="NAME|PATH", help="action spec")
    for name in ("chern", "z2"):
        p = sub.add_parser(name, help="Chern numbers" if name == "chern" else "spin-Chern parity")
        _add_model_args(p)
    sub.add_parser("verify-all", help="run every machine check over the catalog")
    for p in sub.choices.values():
        p.add_argument("--output", metavar="PATH", help="write the report here instead of stdout")
    return parser


def _group_input(args) -> tuple[str, dict]:
    name = args.builtin or args.group
    entry = load_group(name, getattr(args, "twist", None))
    canonical = {"group": entry.spec}
    if getattr(args, "twist", None) is not None:
        canonical["twist"] = args.twist if args.twist == "builtin" else entry.extension.cocycle.tolist()
    return entry, canonical


def _context(entry):
    if entry.extension is not None:
        return twisted_context(entry.extension)
    return magnetic_context(entry.magnetic)


def cmd_classify(args):
    entry, canonical = _group_input(args)
    return canonical, classification_report(_context(entry), entry.name)


def cmd_restrict(args):
    entry, canonical = _group_input(args)
    report = classification_report(_context(entry), entry.name)
    keys = ("group", "restriction_matrix", "ranks", "cokernel", "image_invariant")
    return canonical, {k: report[k] for k in keys}


def cmd_ktable(args):
    if args.qmin > args.qmax:
        raise ValidationError("qmin must not exceed qmax", pointer="--qmin")
    entry, canonical = _group_input(args)
    canonical.update(qmin=args.qmin, qmax=args.qmax)
    basis = corep_basis(_context(entry))
    rows = []
    for q in range(args.qmax, args.qmin - 1, -1):
        g = magnetic_coefficients(basis, q)
        rows.append({"q": q, **g.to_json(), "text": str(g)})
    return canonical, {"types": [l.value for l in basis.labels], "table": rows}


def cmd_torus_rank(args):
    entry, canonical = _group_input(args)
    spec = load_action_spec(args.action)
    canonical["action"] = spec
    action = AffineTorusAction.from_json(entry.group, spec)
    if entry.extension is not None:
        ext = entry.extension
        lifted = AffineTorusAction(ext.total, tuple(action.maps[int(p)] for p in ext.proj))
        report = spin_sectors(ext, lifted)
        return canonical, {**report.invariant.to_json(), "spin_split": report.to_json()}
    G = entry.group
    if isinstance(G, FiniteMagneticGroup):
        sub, emb = G.kernel
        action = AffineTorusAction(sub, tuple(action.maps[int(g)] for g in emb))
        G = sub
    return canonical, delocalized_rank(G, action).to_json()


def _model_input(args):
    if args.builtin:
        model, c4t, sz = builtin_c4t_model(args.mass)
        canonical = {"builtin": args.builtin, "mass": args.mass}
        return model, {"C4T": c4t, "Sz": sz}, canonical
    spec = load_model_spec(args.model)
    model = TightBindingModel.from_json(spec)
    syms = spec.get("symmetries", {}) or {}
    if not isinstance(syms, dict):
        raise SchemaError("symmetries must be an object", pointer="/symmetries")
    ops = {name: SymmetryOp.from_json(obj, name) for name, obj in sorted(syms.items())}
    canonical = {"model": model.to_json(), "symmetries": {k: v.to_json() for k, v in ops.items()}}
    return model, ops, canonical


def cmd_chern(args):
    model, ops, canonical = _model_input(args)
    canonical["mesh"] = args.mesh
    total, gap = chern_and_gap(model, args.mesh)
    if "Sz" in ops:
        up, down = spin_blocks(model, ops["Sz"], args.tol)
    else:
        # no spin symmetry: the whole model counts as the up block
        up, down = model, TightBindingModel(0, {}, model.fermi)
    (c_up, gap_up), (c_down, gap_down) = chern_and_gap(up, args.mesh), chern_and_gap(down, args.mesh)
    return canonical, ChernResult(total, c_up, c_down, c_up % 2, min(gap, gap_up, gap_down),
                                  args.mesh).to_json()


def cmd_z2(args):
    model, ops, canonical = _model_input(args)
    canonical.update(mesh=args.mesh, tol=args.tol)
    missing = [k for k in ("C4T", "Sz") if k not in ops]
    if missing:
        raise SchemaError("z2 needs C4T and Sz symmetries", pointer="/symmetries", missing=missing)
    return canonical, invariants(model, ops["C4T"], ops["Sz"], args.mesh, tol=args.tol).to_json()


def cmd_verify_all(args):
    from .verify import verify_all
    report = verify_all()
    if not report["ok"]:
        failed = [k for k, v in report.items() if isinstance(v, dict) and not v.get("ok", True)]
        raise TheoremViolated("verify-all found failing checks", failed=failed, report=report)
    return {}, report


COMMANDS = {
    "classify": cmd_classify,
    "ktable": cmd_ktable,
    "restrict": cmd_restrict,
    "torus-rank": cmd_torus_rank,
    "chern": cmd_chern,
    "z2": cmd_z2,
    "verify-all": cmd_verify_all,
}


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    output = None
    try:
        args = build_parser().parse_args(argv)
        output = args.output
        canonical, result = COMMANDS[args.command](args)
        _emit(dumps(envelope(args.command, canonical, result)), output)
        return 0
    except MagkError as exc:
        _emit(dumps(exc.to_json()), output)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
