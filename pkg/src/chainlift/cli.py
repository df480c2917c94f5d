"""Command-line entry point.

Every subcommand reads line-based text files (standard input when no path or
``-`` is given) and writes either a text artifact or a JSON report.  JSON
reports carry ``schema_version``, ``command`` and the ``seed`` in use, and
are written with sorted keys so identical runs give identical bytes.

Exit status: 0 on success, 1 on a domain error (for example a local matrix
with 2-torsion during a sparse lift, or a complex that fails validation), 2
on usage errors and malformed input files.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from fractions import Fraction

from . import codes, decongestion, lifting, skeleton, textio, zhomology
from .core import BinMatrix, ChainComplex2, ChainComplexZ, IntMatrix, betti2, mod2, sparsity, validate_complex
from .errors import ChainliftError, FormatError, NotAdmissible

SCHEMA_VERSION = "1.0.0"

_STAGE_NAMES = {"x": "X", "qx": "QX", "zqx": "ZQX", "zqx+": "ZQX+", "double": "double"}


def report_schema_version() -> str:
    return SCHEMA_VERSION


def load_schema(command: str) -> dict:
    """Published JSON schema for the report of ``command``."""
    path = resources.files("chainlift") / "schemas" / f"{command}.json"
    return json.loads(path.read_text(encoding="utf-8"))


class UsageError(Exception):
    """Bad flag combination detected after argument parsing."""


# ---------------------------------------------------------------- input and output helpers

def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_complex(text: str):
    """A complex file, or a CSS code file converted to its complex."""
    head = next(iter(textio.iter_tokens(text)), (1, [""]))[1][0]
    if head == "css":
        return codes.css_to_complex(textio.parse_code(text))
    return textio.parse_complex(text)


def _as_binary(c) -> ChainComplex2:
    return mod2(c) if isinstance(c, ChainComplexZ) else c


def _load_matrix(text: str):
    head = next(iter(textio.iter_tokens(text)), (1, [""]))[1][0]
    if head in ("complex2", "complexz"):
        c = textio.parse_complex(text)
        if len(c.boundaries) != 1:
            raise FormatError("expected a matrix or a complex with a single boundary", 1)
        return c.boundaries[0]
    return textio.parse_matrix(text)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(args, command: str, payload: dict) -> str:
    body = {"schema_version": SCHEMA_VERSION, "command": command, "seed": args.seed, **payload}
    if args.format == "text":
        lines = []
        for key in sorted(body):
            val = body[key]
            lines.append(f"{key}: {json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else val}")
        return "\n".join(lines) + "\n"
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _report(args, command: str, payload: dict) -> None:
    _emit(args, _render(args, command, payload))


def _positive(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if val <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {val}")
    return val


def _seed(text: str) -> int:
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None
    if not 0 <= val < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return val


# ---------------------------------------------------------------- gen

def _cmd_gen(args) -> int:
    kind = args.family
    if kind == "cycle":
        c = codes.gen_cycle(args.m)
        _emit(args, textio.format_complex(c, [f"cycle graph, {args.m} vertices"]))
        return 0
    if kind == "toric":
        a = b = codes.gen_cycle(args.L)
        c = codes.gen_hypergraph_product(a, b)
        note = [f"toric code, L = {args.L}"]
    elif kind == "hgp":
        a = _as_binary(_load_complex(_read(args.a)))
        b = _as_binary(_load_complex(_read(args.b)))
        c = codes.gen_hypergraph_product(a, b)
        note = ["hypergraph product"]
    else:
        base = _as_binary(_load_complex(_read(args.base)))
        twists = textio.parse_twists(_read(args.twists)) if args.twists else {}
        try:
            spec = codes.FiberBundleSpec(base, args.m, twists)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        c = codes.gen_fiber_bundle(spec)
        text = textio.format_complex(c, [f"circle bundle, fiber length {args.m}"])
        text += textio.embed(textio.format_complex(base), "bundle-base")
        text += textio.embed(f"{args.m}\n", "bundle-fiber")
        text += textio.embed(textio.format_twists(spec.twists), "bundle-twists")
        _emit(args, text)
        return 0
    text = textio.format_complex(c, note)
    text += textio.embed(textio.format_complex(a), "factor-a")
    text += textio.embed(textio.format_complex(b), "factor-b")
    _emit(args, text)
    return 0


# ---------------------------------------------------------------- validate / lift

def _cmd_validate(args) -> int:
    c = _load_complex(_read(args.input))
    rep = validate_complex(c)
    payload = {
        "ring": "z" if isinstance(c, ChainComplexZ) else "f2",
        "dims": list(c.dims),
        "ok": rep.ok,
        "violation": list(rep.violation) if rep.violation else None,
        "value": rep.value,
        "sparsity": sparsity(c),
    }
    _report(args, "validate", payload)
    return 0 if rep.ok else 1


def _bundle_spec(blocks: dict) -> codes.FiberBundleSpec:
    for tag in ("bundle-base", "bundle-fiber", "bundle-twists"):
        if tag not in blocks:
            raise UsageError(f"input has no embedded {tag} block; generate it with 'gen bundle'")
    base = textio.parse_complex(blocks["bundle-base"])
    fiber = int(blocks["bundle-fiber"].split()[0])
    return codes.FiberBundleSpec(base, fiber, textio.parse_twists(blocks["bundle-twists"]))


def _product_factors(blocks: dict):
    if "factor-a" not in blocks or "factor-b" not in blocks:
        raise UsageError("input has no embedded factor blocks; generate it with 'gen toric' or 'gen hgp'")
    return textio.parse_complex(blocks["factor-a"]), textio.parse_complex(blocks["factor-b"])


def _cmd_lift(args) -> int:
    text = _read(args.input)
    loaded = _load_complex(text)
    source = _as_binary(loaded)
    blocks = textio.embedded_blocks(text)
    method = args.method
    if method == "naive":
        res = lifting.describe_lift(lifting.naive_lift(source), source)
    elif method == "general":
        res = lifting.general_lift(source)
    elif method == "product":
        res = lifting.describe_lift(lifting.product_lift(*_product_factors(blocks)), source)
    elif method == "bundle":
        res = lifting.describe_lift(lifting.fiber_bundle_lift(_bundle_spec(blocks)), source)
    else:
        d1 = args.d1
        if d1 is None:
            d1_lift = loaded.boundaries[0] if isinstance(loaded, ChainComplexZ) else "naive"
        elif d1 == "naive":
            d1_lift = "naive"
        elif d1 == "product":
            d1_lift = lifting.product_lift(*_product_factors(blocks)).boundaries[0]
        elif d1 == "bundle":
            d1_lift = lifting.fiber_bundle_lift(_bundle_spec(blocks)).boundaries[0]
        else:
            d1_lift = textio.parse_matrix(_read(d1))
            if not isinstance(d1_lift, IntMatrix):
                raise UsageError("--d1 file must hold an int matrix")
        res = lifting.sparse_lift(source, d1_lift)
    if res.lifted.dims != source.dims or not res.parity_ok:
        raise UsageError("embedded construction does not match the complex in the file")
    payload = {
        "method": method,
        "dims": list(source.dims),
        "parity_ok": res.parity_ok,
        "admissible": res.admissible,
        "sparsity_in": res.sparsity_in,
        "sparsity_out": res.sparsity_out,
        "max_local_l1": res.max_local_l1,
    }
    out_text = textio.format_complex(res.lifted, [f"{method} lift"])
    for tag, block in blocks.items():
        out_text += textio.embed(block, tag)
    _emit(args, out_text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(_render(args, "lift", payload))
    return 0 if res.admissible else 1


# ---------------------------------------------------------------- algebra

def _torsion_payload(summary) -> list:
    return [
        {"degree": j, "free_rank": d.free_rank, "torsion": list(d.torsion), "cohomology_torsion": list(d.cohomology_torsion)}
        for j, d in enumerate(summary.degrees)
    ]


def _cmd_homology(args) -> int:
    c = _load_complex(_read(args.input))
    if args.ring == "z":
        if not isinstance(c, ChainComplexZ):
            c = lifting.naive_lift(c)
        summary = zhomology.homology_z(c)
        payload = {"ring": "z", "dims": list(c.dims), "degrees": _torsion_payload(summary),
                   "torsion_free": summary.torsion_free}
    else:
        b = _as_binary(c)
        rep = validate_complex(b)
        if not rep.ok:
            raise NotAdmissible(f"boundaries do not compose to zero mod 2 at {rep.violation}")
        payload = {"ring": "f2", "dims": list(b.dims), "betti": [betti2(b, j) for j in range(len(b.dims))]}
    _report(args, "homology", payload)
    return 0


def _cmd_snf(args) -> int:
    text = _read(args.input)
    head = next(iter(textio.iter_tokens(text)), (1, [""]))[1][0]
    if head in ("complex2", "complexz", "css"):
        c = _load_complex(text)
        if not 0 <= args.boundary < len(c.boundaries):
            raise UsageError(f"--boundary must lie in 0..{len(c.boundaries) - 1}")
        m = c.boundaries[args.boundary]
    else:
        m = textio.parse_matrix(text)
    if isinstance(m, BinMatrix):
        m = IntMatrix.naive(m)
    res = zhomology.snf(m)
    payload = {"shape": list(m.shape), "rank": res.rank, "invariant_factors": list(res.invariant_factors),
               "torsion": [d for d in res.invariant_factors if d > 1]}
    _report(args, "snf", payload)
    return 0


def _cmd_lu_probe(args) -> int:
    m = _load_matrix(_read(args.input))
    if isinstance(m, IntMatrix):
        m = m.mod2()
    res = zhomology.try_sparse_lu(m, args.budget_fill)
    payload = {"shape": list(m.shape), "fill": res.fill, "det": res.det,
               "row_perm": list(res.row_perm), "col_perm": list(res.col_perm)}
    if args.lifted:
        with open(args.lifted, "w", encoding="utf-8") as fh:
            fh.write(textio.format_matrix(res.lifted))
    _report(args, "lu-probe", payload)
    return 0


def _cmd_minor_gcd(args) -> int:
    m = _load_matrix(_read(args.input))
    if isinstance(m, BinMatrix):
        m = IntMatrix.naive(m)
    res = zhomology.probe_minor_gcd(m, args.trials, args.seed)
    payload = {"shape": list(m.shape), "gcd": res.gcd, "trials_used": res.trials_used,
               "determinants": list(res.determinants)}
    _report(args, "minor-gcd", payload)
    return 0


# ---------------------------------------------------------------- codes

def _cmd_distance(args) -> int:
    c = _as_binary(_load_complex(_read(args.input)))
    d = codes.distance(c, args.side, args.budget_weight, True if args.mitm else None)
    _report(args, "distance", {"side": args.side, "n": c.dims[1], "distance": d})
    return 0


def _cmd_sr(args) -> int:
    c = _as_binary(_load_complex(_read(args.input)))
    rep = codes.systolic_ratio(c, args.budget_weight)
    sr = Fraction(rep.sr)
    payload = {"d_hom": rep.d_hom, "d_cohom": rep.d_cohom, "n": rep.n,
               "sr": f"{sr.numerator}/{sr.denominator}", "sr_float": float(sr)}
    _report(args, "sr", payload)
    return 0


# ---------------------------------------------------------------- graphs and skeleton

def _cmd_cycle_basis(args) -> int:
    g = textio.parse_graph(_read(args.input))
    basis = decongestion.cycle_basis(g, seed=args.seed, max_retries=args.budget_retries,
                                     degree_cap=args.degree_cap, search=args.search)
    payload = {
        "vertices": g.v,
        "edges": len(g.edges),
        "rank": decongestion.cycle_space_rank(g),
        "cycles": [list(c) for c in basis.cycles],
        "certificates": list(basis.certificates),
        "retries_used": basis.retries_used,
    }
    status = 0
    if args.verify:
        weak = decongestion.verify_weakly_fundamental(g, basis).ok
        certs = decongestion.verify_certificates(g, basis).ok
        spans = decongestion.verify_spanning(g, basis)
        payload["verified"] = {"weakly_fundamental": weak, "certificates": certs, "spanning": spans}
        status = 0 if weak and certs and spans else 1
    if args.stats:
        payload["stats"] = {
            "max_multiplicity": decongestion.multiplicity_stats(basis, g).max,
            "multiplicity_bound": decongestion.multiplicity_bound(g.v),
            "total_weight": decongestion.basis_weight(basis, g),
            "max_intersections": decongestion.intersection_stats(basis, g).max,
            "retries_used": basis.retries_used,
        }
    _report(args, "cycle-basis", payload)
    return status


def _cmd_skeleton(args) -> int:
    text = _read(args.input)
    c = _load_complex(text)
    if not isinstance(c, ChainComplexZ):
        raise UsageError("skeleton needs an integer (lifted) complex; run 'lift' first")
    stage = _STAGE_NAMES[args.stage]
    sk = skeleton.build_skeleton(c, stage, seed=args.seed, policy=args.policy)
    if (args.report or args.format) == "dot":
        _emit(args, skeleton.to_dot(sk))
        return 0
    audit = skeleton.congestion_audit(sk)
    vol = skeleton.volume_report(sk, c.dims)
    middle = skeleton.verify_middle_complex(sk, c).ok if stage in ("ZQX", "ZQX+", "double") else None
    payload = {
        "stage": stage,
        "counts": {str(k): v for k, v in sk.count_by_index().items()},
        "max_contact": sk.max_contact,
        "max_congestion": audit.max,
        "congested": audit.congested,
        "basis_size": len(sk.pi1_basis) if sk.pi1_basis is not None else 0,
        "colors": (max(sk.colors) + 1) if sk.colors else 0,
        "volume_ratio": vol["volume_ratio"],
        "middle_complex_ok": middle,
    }
    _report(args, "skeleton", payload)
    return 0


def _cmd_mc_push(args) -> int:
    center = None
    if args.center is not None:
        center = [float(x) for x in args.center.split(",")]
        if len(center) != args.n:
            raise UsageError(f"--center needs {args.n} comma separated coordinates")
    try:
        est = skeleton.mc_push(args.k, args.n, args.budget_samples, args.seed, center, args.ceiling)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"k": est.k, "n": est.n, "samples": est.samples, "mean": est.mean, "stderr": est.stderr,
               "ceiling": est.ceiling, "finite": est.finite, "below_ceiling": est.below_ceiling}
    _report(args, "mc-push", payload)
    return 0 if est.below_ceiling else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--out", help="write the main output here instead of standard output")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")
    common.add_argument("--budget-weight", type=_positive, default=None, help="largest weight tried by distance searches")
    common.add_argument("--budget-retries", type=_positive, default=32, help="cycle-basis attempts")
    common.add_argument("--budget-fill", type=_positive, default=None, help="fill-in allowed by the LU probe")
    common.add_argument("--budget-samples", type=_positive, default=100_000, help="Monte Carlo samples")

    parser = argparse.ArgumentParser(prog="chainlift", description="Lift binary chain complexes to integer ones.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate a complex")
    fam = gen.add_subparsers(dest="family", required=True)
    p = fam.add_parser("cycle", parents=[common])
    p.add_argument("--m", type=_positive, required=True)
    p = fam.add_parser("toric", parents=[common])
    p.add_argument("--L", type=_positive, required=True)
    p = fam.add_parser("hgp", parents=[common])
    p.add_argument("--a", required=True, help="first factor, a 1-complex file")
    p.add_argument("--b", required=True, help="second factor, a 1-complex file")
    p = fam.add_parser("bundle", parents=[common])
    p.add_argument("--base", required=True, help="base 1-complex file")
    p.add_argument("--m", type=_positive, required=True, help="fiber length")
    p.add_argument("--twists", help="twist file with lines 'b1 a0 shift'")
    gen.set_defaults(run=_cmd_gen)

    def with_input(name, run, helptext):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("input", nargs="?", default=None)
        p.set_defaults(run=run)
        return p

    with_input("validate", _cmd_validate, "check that boundaries compose to zero")
    p = with_input("lift", _cmd_lift, "lift a binary complex to the integers")
    p.add_argument("--method", choices=("naive", "general", "product", "bundle", "sparse"), default="general")
    p.add_argument("--d1", help="first-boundary lift for --method sparse: naive, product, bundle or an int matrix file")
    p.add_argument("--report", help="write the JSON lift report to this file")
    p = with_input("homology", _cmd_homology, "homology over Z or F2")
    p.add_argument("--ring", choices=("z", "f2"), default="z")
    p = with_input("snf", _cmd_snf, "Smith normal form of a matrix or a boundary")
    p.add_argument("--boundary", type=int, default=0)
    p = with_input("lu-probe", _cmd_lu_probe, "sparse LU of a square binary matrix")
    p.add_argument("--lifted", help="write the unimodular lift to this file")
    p = with_input("minor-gcd", _cmd_minor_gcd, "gcd of random maximal minors")
    p.add_argument("--trials", type=_positive, default=16)
    p = with_input("distance", _cmd_distance, "code distance")
    p.add_argument("--side", choices=("homology", "cohomology"), default="homology")
    p.add_argument("--mitm", action="store_true", help="always meet in the middle")
    with_input("sr", _cmd_sr, "systolic ratio")
    p = with_input("cycle-basis", _cmd_cycle_basis, "weakly fundamental cycle basis")
    p.add_argument("--degree-cap", type=_positive, default=16)
    p.add_argument("--search", choices=("local", "girth"), default="local")
    p.add_argument("--verify", action="store_true", help="run the basis verifiers; exit 1 if one fails")
    p.add_argument("--stats", action="store_true", help="add multiplicity, weight and intersection statistics")
    p = with_input("skeleton", _cmd_skeleton, "handle skeleton of a lifted complex")
    p.add_argument("--stage", choices=tuple(_STAGE_NAMES), default="double")
    p.add_argument("--policy", choices=("first-fit", "random"), default="first-fit")
    p.add_argument("--report", choices=("json", "dot"), help="report kind; same as --format")
    p = sub.add_parser("mc-push", parents=[common], help="radial projection area estimate")
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--center", help="comma separated barycenter of the simplex")
    p.add_argument("--ceiling", type=float, default=50.0)
    p.set_defaults(run=_cmd_mc_push)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format == "dot" and args.command != "skeleton":
        print("chainlift: error: --format dot is only available for skeleton", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except (UsageError, FormatError) as exc:
        print(f"chainlift {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ChainliftError as exc:
        print(f"chainlift {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
