"""Command-line interface.

Subcommands::

    spectrum       eigenvalues and eigenvalue statistics of a cyclic polygon
    mesh-spectrum  eigenvalues of a triangulated planar mesh
    verify         randomized sampling check of one spectral bound
    optimize       gradient descent toward the regular profile
    probe          functional values along a ray to the simplex boundary
    sweep          eigenvalue table over a one-parameter polygon family

Reports go to stdout as JSON (default) or CSV; all floats are rendered
with %.17g so output is byte-stable across runs.  Errors are reported as
one JSON object on stderr.  Exit status: 0 on success, 1 when a
verification finds violations or a descent fails to converge, 2 for usage
or validation errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import extremum, mesh, spectrum
from .cyclic import (
    assemble_cyclic,
    cot_vector,
    elementary_symmetric,
    make_arc_profile,
    regular_profile,
)
from .errors import PolylapError

SCHEMA_VERSION = 1

# accepted spellings for --objective
OBJECTIVE_ALIASES = {
    "sumcot": extremum.Objective.SUM_COT,
    "sum-cot": extremum.Objective.SUM_COT,
    "gquad": extremum.Objective.G_QUAD,
    "g-quad": extremum.Objective.G_QUAD,
    "g4": extremum.Objective.G_QUAD,
    "esym": extremum.Objective.E_SYM,
    "e-sym": extremum.Objective.E_SYM,
    "lambda1": extremum.Objective.LAMBDA1,
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _to_json(obj) -> str:
    # hand-rolled so floats always serialize via _fmt (byte-determinism)
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(k) + ":" + _to_json(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit_json(payload: dict):
    sys.stdout.write(_to_json(payload) + "\n")


def _emit_csv(header, rows):
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    sys.stdout.write("\n".join(out) + "\n")


def _error(exc: BaseException):
    msg = {"error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(_to_json(msg) + "\n")


def _objective(name: str) -> extremum.Objective:
    try:
        return OBJECTIVE_ALIASES[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; choose from {', '.join(sorted(OBJECTIVE_ALIASES))}"
        ) from None


def _parse_floats(text: str, degrees: bool):
    vals = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    if degrees:
        vals = [math.radians(v) for v in vals]
    return vals


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _resolve_profile(args):
    """Build the ArcProfile named by --regular/--theta/--input."""
    if getattr(args, "regular", None) is not None:
        return regular_profile(args.regular)
    if getattr(args, "theta", None) is not None:
        return make_arc_profile(_parse_floats(args.theta, args.degrees))
    data = _load_json(args.input)
    if "theta_degrees" in data:
        return make_arc_profile([math.radians(v) for v in data["theta_degrees"]])
    if "theta" in data:
        return make_arc_profile(data["theta"])
    raise ValueError(f"{args.input}: polygon file needs 'theta' or 'theta_degrees'")


def _add_profile_args(sub, required=True):
    grp = sub.add_mutually_exclusive_group(required=required)
    grp.add_argument("--regular", type=int, metavar="N", help="regular N-gon")
    grp.add_argument("--theta", metavar="LIST", help="comma-separated half-angles")
    grp.add_argument("--input", metavar="PATH",
                     help="JSON file with 'theta' or 'theta_degrees'")
    sub.add_argument("--degrees", action="store_true",
                     help="--theta values are in degrees")
    return grp


def cmd_spectrum(args) -> int:
    p = _resolve_profile(args)
    a = cot_vector(p)
    L = assemble_cyclic(a)
    spec = spectrum.eigenvalues(L)
    if args.format == "csv":
        _emit_csv(["index", "eigenvalue"], list(enumerate(map(float, spec.values))))
        return 0
    residuals = {}
    if p.n == 3:
        residuals["e2_minus_1"] = elementary_symmetric(a, 2) - 1.0
    elif p.n == 4:
        e1 = elementary_symmetric(a, 1)
        residuals["e3_minus_e1"] = elementary_symmetric(a, 3) - e1
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "spectrum",
            "n": p.n,
            "theta": list(p.theta),
            "a": list(a.a),
            "matrix": [list(row) for row in L.entries],
            "eigenvalues": list(spec.values),
            "sum_nontrivial": spectrum.sum_nontrivial(spec),
            "product_nontrivial": spectrum.product_nontrivial(spec),
            "matrix_tree_product": spectrum.matrix_tree_product(a),
            "identity_residuals": residuals,
        }
    )
    return 0


def cmd_mesh_spectrum(args) -> int:
    data = _load_json(args.input)
    try:
        tm = mesh.TriMesh(data["vertices"], data["faces"])
    except KeyError as exc:
        raise ValueError(f"{args.input}: mesh file needs 'vertices' and 'faces'") from exc
    conv = mesh.WeightConvention(args.convention)
    spec = spectrum.eigenvalues(mesh.assemble_mesh_laplacian(tm, conv))
    if args.format == "csv":
        _emit_csv(["index", "eigenvalue"], list(enumerate(map(float, spec.values))))
        return 0
    _emit_json(
        {
            "schema_version": SCHEMA_VERSION,
            "command": "mesh-spectrum",
            "n_vertices": tm.n_vertices,
            "convention": conv.value,
            "eigenvalues": list(spec.values),
            "sum_nontrivial": spectrum.sum_nontrivial(spec),
            "product_nontrivial": spectrum.product_nontrivial(spec),
        }
    )
    return 0


def cmd_verify(args) -> int:
    rep = extremum.verify_sampling(args.theorem, args.samples, args.seed, args.n)
    fields = [
        ("theorem", rep.theorem),
        ("n", rep.n),
        ("samples", rep.samples),
        ("seed", rep.seed),
        ("violations", rep.violations),
        ("extremal", rep.extremal),
        ("bound", rep.bound),
        ("gap", rep.gap),
        ("side", rep.side),
        ("passed", rep.passed),
    ]
    if args.format == "csv":
        _emit_csv([k for k, _ in fields], [[v for _, v in fields]])
    else:
        payload = {"schema_version": SCHEMA_VERSION, "command": "verify"}
        payload.update(fields)
        _emit_json(payload)
    return 0 if rep.passed else 1


def _run_report(rep: extremum.OptimizationReport) -> dict:
    return {
        "start": list(rep.start.theta),
        "final": list(rep.final.theta),
        "objective_value": rep.objective_value,
        "iterations": rep.iterations,
        "reduced_gradient_norm": rep.reduced_gradient_norm,
        "lagrange_multiplier": rep.lagrange_multiplier,
        "converged": rep.converged,
    }


def cmd_optimize(args) -> int:
    obj = _objective(args.objective)
    if args.n is not None:
        if args.regular is not None or args.theta is not None or args.input is not None:
            raise ValueError("give either --n (random starts) or one explicit start")
        starts = [
            make_arc_profile(row)
            for row in extremum.sample_profiles(args.n, args.starts, args.seed)
        ]
    else:
        if args.regular is None and args.theta is None and args.input is None:
            raise ValueError("need a start: --regular, --theta, --input, or --n")
        starts = [_resolve_profile(args)] * args.starts
    reports = [
        extremum.minimize(obj, s, gtol=args.gtol, max_iterations=args.max_iterations)
        for s in starts
    ]
    all_conv = all(r.converged for r in reports)
    if args.format == "csv":
        n = reports[0].final.n
        header = ["run", "converged", "iterations", "objective_value",
                  "reduced_gradient_norm", "lagrange_multiplier"]
        header += [f"final_{i}" for i in range(n)]
        rows = []
        for i, r in enumerate(reports):
            rows.append([i, r.converged, r.iterations, r.objective_value,
                         r.reduced_gradient_norm, r.lagrange_multiplier]
                        + [float(t) for t in r.final.theta])
        _emit_csv(header, rows)
    else:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "optimize",
                "objective": obj.value,
                "starts": len(reports),
                "all_converged": all_conv,
                "runs": [_run_report(r) for r in reports],
            }
        )
    return 0 if all_conv else 1


def cmd_probe(args) -> int:
    obj = _objective(args.objective)
    target = _parse_floats(args.target, args.degrees)
    values = extremum.boundary_probe(obj, len(target), target, args.steps)
    if args.format == "csv":
        _emit_csv(
            ["k", "scale", "value"],
            [[k, 0.5**k, float(v)] for k, v in enumerate(values)],
        )
    else:
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "probe",
                "objective": obj.value,
                "target": [float(v) for v in target],
                "steps": args.steps,
                "values": list(values),
            }
        )
    return 0


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise ValueError("steps must be positive")
    # isoceles triangle family: theta = (t, t, pi - 2t) on a uniform
    # interior grid of (0, pi/2)
    k = np.arange(args.steps)
    t = (k + 1) * math.pi / (2.0 * (args.steps + 1))
    thetas = np.column_stack((t, t, math.pi - 2.0 * t))
    vals = spectrum._batch_eigenvalues(extremum._cyclic_batch(thetas))
    rows = [
        [int(ki), float(ti), float(l1), float(l2)]
        for ki, ti, l1, l2 in zip(k, t, vals[:, 1], vals[:, 2])
    ]
    if args.format == "json":
        _emit_json(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "sweep",
                "family": args.family,
                "steps": args.steps,
                "rows": [
                    {"k": r[0], "t": r[1], "lambda1": r[2], "lambda2": r[3]}
                    for r in rows
                ],
            }
        )
    else:
        _emit_csv(["k", "t", "lambda1", "lambda2"], rows)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polylap",
        description="Spectra of discrete Laplace operators on cyclic polygons "
        "and planar triangulations, with randomized extremum verification.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("spectrum", help="eigenvalues of a cyclic polygon")
    _add_profile_args(sub)
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.set_defaults(func=cmd_spectrum)

    sub = subs.add_parser("mesh-spectrum", help="eigenvalues of a triangulated mesh")
    sub.add_argument("--input", required=True, metavar="PATH",
                     help="JSON file with 'vertices' and 'faces'")
    sub.add_argument("--convention", choices=["full", "half"], default="full")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.set_defaults(func=cmd_mesh_spectrum)

    sub = subs.add_parser("verify", help="randomized check of a spectral bound")
    sub.add_argument("theorem", metavar="THEOREM",
                     help="theorem id, e.g. T1-lambda1-max or T3-sum-min(7)")
    sub.add_argument("--samples", type=int, default=100_000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--n", type=int, default=None,
                     help="polygon size for general-n theorems")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("optimize", help="descend a functional over profiles")
    sub.add_argument("--objective", required=True, metavar="NAME",
                     help="sumcot | gquad | esym")
    _add_profile_args(sub, required=False)
    sub.add_argument("--n", type=int, default=None,
                     help="draw random interior starts of this size instead")
    sub.add_argument("--starts", type=int, default=1,
                     help="number of runs (with --n: random multistart)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--gtol", type=float, default=1e-9)
    sub.add_argument("--max-iterations", type=int, default=100_000)
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.set_defaults(func=cmd_optimize)

    sub = subs.add_parser("probe", help="evaluate along a ray to the boundary")
    sub.add_argument("--objective", required=True, metavar="NAME",
                     help="sumcot | gquad | esym | lambda1")
    sub.add_argument("--target", required=True, metavar="LIST",
                     help="boundary point, comma-separated, first entry 0")
    sub.add_argument("--steps", type=int, default=20)
    sub.add_argument("--degrees", action="store_true")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.set_defaults(func=cmd_probe)

    sub = subs.add_parser("sweep", help="eigenvalues over a polygon family")
    sub.add_argument("--family", choices=["isoceles-triangle"],
                     default="isoceles-triangle")
    sub.add_argument("--steps", type=int, default=50)
    sub.add_argument("--format", choices=["json", "csv"], default="csv")
    sub.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PolylapError as exc:
        _error(exc)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        _error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
