"""Command-line front end.

Subcommands::

    curvlab eval   --case <I|II|III|IV|V|file:PATH> [--params a=1,b=2]
                   [--point x1,x2,...] [--frame orthonormal|coordinate]
                   [--format pretty|json|csv]
    curvlab solve  [--cases I,II,III,IV,V] [--points-per-case 5]
                   [--tol 1e-8] [--seed S] [--format pretty|json]
    curvlab fuzz   [--dim 4] [--trials 100] [--seed 7] [--degree 3]
                   [--amplitude 0.05] [--format pretty|json]
    curvlab oracle --case <spec> [--point x1,..] [--h 1e-2]
                   [--format pretty|json]

Exit codes are stable API: 0 success, 1 geometry failure, 2 usage error,
3 nullspace dimension not 1 (or coefficient mismatch), 4 fuzz failure,
5 oracle mismatch.  The environment variable ``CURVLAB_SEED`` overrides
``--seed``.  JSON reports follow ``report.schema.json`` shipped with the
package.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CurvlabError, GeometryError, NullspaceError, ParseError
from .geometry import curvature_package, finite_difference_package, lie_group_package
from .invariants import PHI_LABELS, phi_vector, to_orthonormal
from .metrics import (
    CaseKind,
    CaseSpec,
    build_patch,
    case_sample_points,
    default_case,
    parse_metric_file,
    solvable_lie_algebra,
)
from .solver import (
    UNIVERSAL_COEFFICIENTS,
    assemble_constraints,
    fuzz_verify,
    recover_coefficients,
)

EXIT_OK = 0
EXIT_GEOMETRY = 1
EXIT_USAGE = 2
EXIT_NULLSPACE = 3
EXIT_FUZZ = 4
EXIT_ORACLE = 5

ORACLE_TOLERANCE = 1e-5


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _report(command: str, inputs: dict, outputs: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "inputs": _jsonable(inputs),
        "outputs": _jsonable(outputs),
    }


def _print_matrix(m: np.ndarray, indent: str = "  ") -> None:
    for row in np.asarray(m):
        print(indent + "[" + "  ".join(f"{v: .10g}" for v in row) + "]")


class _UsageError(Exception):
    pass


def _parse_params(text: str) -> dict:
    params = {}
    if not text:
        return params
    for item in text.split(","):
        if "=" not in item:
            raise _UsageError(f"bad parameter assignment {item!r}")
        name, value = item.split("=", 1)
        try:
            params[name.strip()] = float(value)
        except ValueError:
            raise _UsageError(f"bad parameter value {value!r}") from None
    return params


def _parse_point(text: str):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise _UsageError(f"bad point {text!r}") from None


def _load_case(case: str, params: dict):
    """Resolve a --case argument to a (label, patch-or-None, spec) triple."""
    if case.startswith("file:"):
        path = Path(case[5:])
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise _UsageError(f"cannot read {path}: {exc}") from None
        patch = parse_metric_file(text, name=str(path))
        return case, patch, None
    try:
        kind = CaseKind(case)
    except ValueError:
        raise _UsageError(
            f"unknown case {case!r}; expected I, II, III, IV, V, flat, or file:PATH"
        ) from None
    if kind is CaseKind.RANDOM:
        raise _UsageError("random metrics are exercised through the fuzz command")
    spec = default_case(kind) if kind is not CaseKind.RANDOM else None
    merged = dict(spec.params)
    merged.update(params)
    spec = CaseSpec(kind, merged, spec.points)
    if kind is CaseKind.IV:
        return case, None, spec
    return case, build_patch(spec), spec


def _independent_riemann_components(riem: np.ndarray):
    """Nonzero R_ijkl with i<j, k<l, (i,j) <= (k,l), 1-based indices."""
    d = riem.shape[0]
    out = []
    scale = np.max(np.abs(riem))
    tol = 1e-12 * max(scale, 1.0)
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                for l in range(k + 1, d):
                    if (i, j) > (k, l):
                        continue
                    v = riem[i, j, k, l]
                    if abs(v) > tol:
                        out.append(
                            {"indices": [i + 1, j + 1, k + 1, l + 1], "value": float(v)}
                        )
    return out


def _cmd_eval(args) -> int:
    params = _parse_params(args.params)
    label, patch, spec = _load_case(args.case, params)

    b_independence = None
    if spec is not None and spec.kind is CaseKind.IV:
        if args.point:
            raise _UsageError("case IV is homogeneous; --point is not supported")
        pkg = lie_group_package(solvable_lie_algebra(spec.params["a"], spec.params["b"]))
        alt = lie_group_package(
            solvable_lie_algebra(spec.params["a"], spec.params["b"] + 2.5)
        )
        point = None
    else:
        if args.point:
            point = _parse_point(args.point)
        elif spec is not None and spec.points:
            point = spec.points[0]
        else:
            point = np.zeros(patch.dim)
        pkg = curvature_package(patch, point)
        alt = None

    iv = phi_vector(pkg, case=label)
    if args.frame == "orthonormal":
        iv = to_orthonormal(iv, pkg.g)
    elif pkg.frame != "coordinate":
        raise _UsageError("the algebraic case is only available in its own frame")

    if alt is not None:
        iv_alt = phi_vector(alt)
        dev = max(
            float(np.max(np.abs(a.entries - b.entries)))
            for a, b in zip(iv.phi, iv_alt.phi)
        )
        b_independence = {"checked": True, "max_deviation_under_b_shift": dev}

    outputs = {
        "frame": iv.frame,
        "tau": pkg.tau,
        "ricci": pkg.ricci.entries,
        "riemann_components": _independent_riemann_components(pkg.riemann.entries),
        "phi": {f"phi{k + 1}": iv.phi[k].entries for k in range(10)},
    }
    if b_independence is not None:
        outputs["parameter_b_independence"] = b_independence
    report = _report(
        "eval",
        {
            "case": args.case,
            "params": params,
            "point": None if point is None else point,
            "frame": args.frame,
        },
        outputs,
    )

    if args.format == "json":
        print(json.dumps(report, indent=2))
    elif args.format == "csv":
        print("quantity,i,j,value")
        for k in range(10):
            m = iv.phi[k].entries
            for i in range(m.shape[0]):
                for j in range(m.shape[1]):
                    print(f"phi{k + 1},{i + 1},{j + 1},{m[i, j]!r}")
        m = pkg.ricci.entries
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                print(f"ricci,{i + 1},{j + 1},{m[i, j]!r}")
    else:
        print(f"case {args.case}  frame={iv.frame}")
        if point is not None:
            print("point: " + ", ".join(f"{x:.6g}" for x in point))
        print(f"tau = {pkg.tau:.10g}")
        print("ricci:")
        _print_matrix(pkg.ricci.entries)
        print("riemann components (i<j, k<l, independent, nonzero):")
        for comp in outputs["riemann_components"]:
            i, j, k, l = comp["indices"]
            print(f"  R[{i}{j}{k}{l}] = {comp['value']:.10g}")
        for k in range(10):
            print(f"phi{k + 1}  ({PHI_LABELS[k]}):")
            _print_matrix(iv.phi[k].entries)
        if b_independence is not None:
            print(
                "note: invariants unchanged when parameter b shifts "
                f"(max deviation {b_independence['max_deviation_under_b_shift']:.3g})"
            )
    return EXIT_OK


def _cmd_solve(args) -> int:
    names = [n.strip() for n in args.cases.split(",") if n.strip()]
    try:
        kinds = [CaseKind(n) for n in names]
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    if args.tol >= 1e-2:
        print(
            "warning: --tol this loose can absorb genuine constraints and "
            "inflate the nullspace dimension",
            file=sys.stderr,
        )
    cases = [default_case(k, args.points_per_case, args.seed) for k in kinds]
    system = assemble_constraints(cases)

    inputs = {
        "cases": names,
        "points_per_case": args.points_per_case,
        "tol": args.tol,
        "seed": args.seed,
    }
    try:
        report = recover_coefficients(system, tol=args.tol)
    except NullspaceError as exc:
        outputs = {
            "nullspace_dimension": exc.dimension,
            "singular_values": exc.singular_values,
            "rows": len(system.rows),
            "matches_universal": False,
        }
        doc = _report("solve", inputs, outputs)
        if args.format == "json":
            print(json.dumps(doc, indent=2))
        else:
            print(f"nullspace dimension = {exc.dimension} (expected 1)")
            print("singular values:", ", ".join(f"{v:.3e}" for v in exc.singular_values))
        return EXIT_NULLSPACE

    outputs = {
        "nullspace_dimension": report.nullspace_dimension,
        "coefficients": report.coefficients,
        "singular_values": report.singular_values,
        "rows": report.rows,
        "matches_universal": report.matches_universal,
        "max_relative_residual": report.max_relative_residual,
        "relation_checks": [
            {"case": c, "component": list(comp), "monomial": m, "residual": r}
            for (c, comp, m, r) in report.relation_residuals
        ],
    }
    doc = _report("solve", inputs, outputs)
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(f"rows: {report.rows}   nullspace dimension: {report.nullspace_dimension}")
        names10 = [f"c{k}" for k in range(1, 11)]
        print("coefficients (c7 = -1):")
        for n, v in zip(names10, report.coefficients):
            print(f"  {n} = {v: .12g}")
        print("singular values:", ", ".join(f"{v:.3e}" for v in report.singular_values))
        print(f"max relative residual: {report.max_relative_residual:.3e}")
        print(f"matches universal vector: {report.matches_universal}")
    return EXIT_OK if report.matches_universal else EXIT_NULLSPACE


def _cmd_fuzz(args) -> int:
    if args.trials < 1:
        raise _UsageError("--trials must be >= 1")
    if not 2 <= args.dim <= 6:
        raise _UsageError("--dim must be in 2..6")
    report = fuzz_verify(args.seed, args.trials, args.dim, args.degree, args.amplitude)
    inputs = {
        "dim": args.dim,
        "trials": args.trials,
        "seed": args.seed,
        "degree": args.degree,
        "amplitude": args.amplitude,
    }
    outputs = {
        "dim": report.dim,
        "trials": report.trials,
        "threshold": report.threshold,
        "max_relative_residual": report.max_relative_residual,
        "all_passed": report.all_passed,
        "fraction_violating": report.fraction_violating,
        "skipped": report.skipped,
        "results": [
            {
                "index": t.index,
                "metric_seed": t.metric_seed,
                "max_relative_residual": t.max_relative_residual,
                "passed": t.passed,
            }
            for t in report.results
        ],
    }
    doc = _report("fuzz", inputs, outputs)
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(
            f"dim {report.dim}: {report.trials} trials, "
            f"max relative residual {report.max_relative_residual:.3e}"
        )
        if report.dim == 4:
            print(f"all trials within {report.threshold:.0e}: {report.all_passed}")
        else:
            print(
                f"fraction of trials with residual above 1e-3: "
                f"{report.fraction_violating:.2%}"
            )
        if report.skipped:
            print(f"skipped draws (not positive definite): {report.skipped}")
    if report.dim == 4 and not report.all_passed:
        for t in report.results:
            if t.passed is False:
                print(
                    f"failing trial {t.index}: metric seed {t.metric_seed}, "
                    f"residual {t.max_relative_residual:.3e}",
                    file=sys.stderr,
                )
        return EXIT_FUZZ
    return EXIT_OK


_PACKAGE_FIELDS = (
    "g",
    "g_inv",
    "riemann",
    "ricci",
    "tau",
    "grad_tau",
    "hess_tau",
    "lap_tau",
    "rough_lap_ricci",
)


def _field_array(pkg, name: str) -> np.ndarray:
    v = getattr(pkg, name)
    if hasattr(v, "entries"):
        return np.asarray(v.entries, dtype=float)
    return np.atleast_1d(np.asarray(v, dtype=float))


def _cmd_oracle(args) -> int:
    params = _parse_params(args.params)
    label, patch, spec = _load_case(args.case, params)
    if spec is not None and spec.kind is CaseKind.IV:
        raise _UsageError(
            "the algebraic case has no coordinate chart, so there is no "
            "finite-difference package to compare against"
        )
    if args.point:
        point = _parse_point(args.point)
    elif spec is not None and spec.points:
        point = spec.points[0]
    else:
        point = np.zeros(patch.dim)
    if args.h <= 0:
        raise _UsageError("--h must be positive")

    jet_pkg = curvature_package(patch, point)
    fd_pkg = finite_difference_package(patch, point, h=args.h)
    deviations = {}
    for name in _PACKAGE_FIELDS:
        a = _field_array(jet_pkg, name)
        b = _field_array(fd_pkg, name)
        scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        diff = float(np.max(np.abs(a - b)))
        deviations[name] = 0.0 if scale < 1e-9 else diff / scale
    worst = max(deviations.values())
    passed = worst <= ORACLE_TOLERANCE

    doc = _report(
        "oracle",
        {"case": args.case, "params": params, "point": point, "h": args.h},
        {
            "h": args.h,
            "deviations": deviations,
            "max_relative_deviation": worst,
            "passed": passed,
        },
    )
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(f"case {args.case} at " + ", ".join(f"{x:.6g}" for x in point))
        print(f"jet vs finite-difference packages (h = {args.h:g}):")
        for name, dev in deviations.items():
            print(f"  {name:>16}: {dev:.3e}")
        print(f"max relative deviation: {worst:.3e} (bound {ORACLE_TOLERANCE:.0e})")
    return EXIT_OK if passed else EXIT_ORACLE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab",
        description="Quadratic curvature invariants and the universal identity "
        "satisfied by 4-dimensional Riemannian metrics.",
    )
    parser.add_argument("--version", action="version", version=f"curvlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate the ten invariants of one metric")
    p_eval.add_argument("--case", required=True, help="I, II, III, IV, V, flat, or file:PATH")
    p_eval.add_argument("--params", default="", help="comma-separated name=value pairs")
    p_eval.add_argument("--point", default="", help="comma-separated coordinates")
    p_eval.add_argument("--frame", choices=["orthonormal", "coordinate"], default="orthonormal")
    p_eval.add_argument("--format", choices=["pretty", "json", "csv"], default="pretty")

    p_solve = sub.add_parser("solve", help="recover the identity coefficients")
    p_solve.add_argument("--cases", default="I,II,III,IV,V")
    p_solve.add_argument("--points-per-case", type=int, default=5)
    p_solve.add_argument("--tol", type=float, default=1e-8)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--format", choices=["pretty", "json"], default="pretty")

    p_fuzz = sub.add_parser("fuzz", help="test the identity on random metrics")
    p_fuzz.add_argument("--dim", type=int, default=4)
    p_fuzz.add_argument("--trials", type=int, default=100)
    p_fuzz.add_argument("--seed", type=int, default=7)
    p_fuzz.add_argument("--degree", type=int, default=3)
    p_fuzz.add_argument("--amplitude", type=float, default=0.05)
    p_fuzz.add_argument("--format", choices=["pretty", "json"], default="pretty")

    p_oracle = sub.add_parser(
        "oracle", help="compare the jet and finite-difference curvature packages"
    )
    p_oracle.add_argument("--case", required=True)
    p_oracle.add_argument("--params", default="")
    p_oracle.add_argument("--point", default="")
    p_oracle.add_argument("--h", type=float, default=1e-2)
    p_oracle.add_argument("--format", choices=["pretty", "json"], default="pretty")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0

    env_seed = os.environ.get("CURVLAB_SEED")
    if env_seed is not None and hasattr(args, "seed"):
        try:
            args.seed = int(env_seed)
        except ValueError:
            print(f"CURVLAB_SEED must be an integer, got {env_seed!r}", file=sys.stderr)
            return EXIT_USAGE

    handlers = {
        "eval": _cmd_eval,
        "solve": _cmd_solve,
        "fuzz": _cmd_fuzz,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"metric file error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except CurvlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


def entry_point() -> None:
    sys.exit(main())
