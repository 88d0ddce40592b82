"""Command-line front end: estimation, grids, fitting, evaluation, design.

Thin adapter over the library modules.  All lengths on the command line and
in files are millimeters and all inductances are microhenries; conversion
to SI happens at this boundary and nowhere else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import (
    SampleFileError,
    dataset_a_spec,
    dataset_b_spec,
    dataset_c_spec,
    GridSpec,
    generate_grid,
    read_csv,
    read_geometry_csv,
    synth_labels,
    write_csv,
    write_geometry_csv,
)
from .estimator import (
    DEFAULT_COEFFICIENTS,
    CoefficientSet,
    inductance,
    inductance_simplified,
    inductance_square,
    mohan_inductance,
)
from .geometry import (
    GeometryError,
    InfeasibleGeometryError,
    canonicalize,
    derive_inner_side,
)
from .optimizer import (
    DEFAULT_RESOLUTION,
    InfeasibleProblemError,
    OptimizationProblem,
    brute_force_max,
    default_problem,
    maximize,
)
from .regression import RankDeficiencyError, evaluate, repeated_fit
from .units import h_to_uh, m_to_mm, mm_to_m

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INFEASIBLE = 4
EXIT_NUMERICAL = 5

_BUILTIN_SPECS = {"A": dataset_a_spec, "B": dataset_b_spec, "C": dataset_c_spec}


class UsageError(Exception):
    """Bad flag combination or value, reported as a usage error."""


def _write_json(path, mapping) -> None:
    with open(path, "w") as handle:
        json.dump(mapping, handle, indent=2)
        handle.write("\n")


def _load_json(path):
    with open(path) as handle:
        return json.load(handle)


def _load_coefficients(spec: str) -> CoefficientSet:
    if spec == "default":
        return DEFAULT_COEFFICIENTS
    return CoefficientSet.from_mapping(_load_json(spec))


def _load_grid_specs(spec: str) -> list[GridSpec]:
    if spec in _BUILTIN_SPECS:
        return [_BUILTIN_SPECS[spec]()]
    if spec == "AB":
        return [dataset_a_spec(), dataset_b_spec()]
    return [GridSpec.from_mapping(_load_json(spec))]


def _cmd_estimate(args) -> int:
    model = args.model
    if args.coeffs is not None and model not in ("full", "square"):
        raise UsageError(f"--coeffs applies to the full and square models, not {model}")
    if args.NL >= 2 and args.O is None:
        raise UsageError(f"--O is required for --NL {args.NL}")
    coefficients = _load_coefficients(args.coeffs) if args.coeffs else DEFAULT_COEFFICIENTS
    gap = mm_to_m(args.O) if args.O is not None else None
    geometry = canonicalize(
        mm_to_m(args.D1), mm_to_m(args.D2), mm_to_m(args.w), mm_to_m(args.s),
        args.NT, args.NL, gap,
    )
    if model == "full":
        L = inductance(geometry, coefficients)
    elif model == "simplified":
        L = inductance_simplified(geometry)
    elif model == "square":
        if args.D1 != args.D2:
            raise UsageError("the square model needs --D1 equal to --D2")
        L = inductance_square(
            geometry.D1, geometry.w, geometry.s, geometry.n_turns,
            geometry.n_layers, geometry.layer_gap, coefficients,
        )
    else:  # mohan
        if args.NL != 1:
            raise UsageError("the mohan model is single-layer, use --NL 1")
        if args.D1 != args.D2:
            raise UsageError("the mohan model is square, use --D1 equal to --D2")
        d = derive_inner_side(geometry.D1, geometry.n_turns, geometry.w, geometry.s)
        L = mohan_inductance(geometry.D1, d, geometry.w, geometry.s, geometry.n_turns)
    fields = {
        "model": model,
        "L_uH": h_to_uh(L),
        "d1_mm": m_to_mm(geometry.d1),
        "d2_mm": m_to_mm(geometry.d2),
        "Dbar1_mm": m_to_mm((geometry.D1 + geometry.d1) / 2.0),
        "Dbar2_mm": m_to_mm((geometry.D2 + geometry.d2) / 2.0),
    }
    if args.format == "json":
        text = json.dumps(fields, indent=2) + "\n"
    elif args.format == "csv":
        text = ",".join(fields) + "\n" + ",".join(str(v) for v in fields.values()) + "\n"
    else:
        lines = [f"L_uH = {fields['L_uH']:.2f}"]
        lines += [
            f"{name} = {fields[name]:.4f}"
            for name in ("d1_mm", "d2_mm", "Dbar1_mm", "Dbar2_mm")
        ]
        text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_grid(args) -> int:
    if args.labels is None and (args.noise != 0.0 or args.seed != 0):
        raise UsageError("--noise and --seed need --labels")
    geometries = []
    for spec in _load_grid_specs(args.spec):
        geometries.extend(generate_grid(spec))
    if args.labels is None:
        write_geometry_csv(geometries, args.out)
        print(f"wrote {len(geometries)} windings to {args.out}")
    else:
        coefficients = _load_coefficients(args.labels)
        samples = synth_labels(geometries, coefficients, args.noise, args.seed)
        write_csv(samples, args.out)
        print(f"wrote {len(samples)} labeled windings to {args.out}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    geometries = read_geometry_csv(args.input)
    coefficients = _load_coefficients(args.coeffs)
    samples = synth_labels(geometries, coefficients, args.noise, args.seed)
    write_csv(samples, args.out)
    print(f"wrote {len(samples)} labeled windings to {args.out}")
    return EXIT_OK


def _cmd_fit(args) -> int:
    samples = read_csv(args.input)
    results, dispersion = repeated_fit(
        samples,
        fraction=args.fraction,
        base_seed=args.seed,
        repeats=args.repeats,
        threshold_pct=args.threshold,
        bin_width_pct=args.bin_width,
    )
    coefficients, report = results[0]
    _write_json(args.out, coefficients.to_mapping())
    if args.report:
        mapping = report.to_mapping()
        if args.repeats > 1:
            mapping["dispersion"] = dispersion.to_mapping()
        _write_json(args.report, mapping)
    print(
        f"fit {report.n_train} samples (seed {args.seed}), "
        f"MAE {report.mae_pct:.4f}% on {report.n_eval} held out"
    )
    return EXIT_OK


def _cmd_eval(args) -> int:
    samples = read_csv(args.input)
    coefficients = _load_coefficients(args.coeffs)
    report = evaluate(samples, coefficients, args.threshold, args.bin_width)
    _write_json(args.report, report.to_mapping())
    if args.hist:
        with open(args.hist, "w") as handle:
            handle.write("bin_center_pct,count\n")
            for lo, hi, count in report.histogram:
                handle.write(f"{(lo + hi) / 2.0},{count}\n")
    print(
        f"evaluated {report.n_eval} samples: mean {report.mean_error_pct:.4f}%, "
        f"std {report.std_error_pct:.4f}%, MAE {report.mae_pct:.4f}%"
    )
    return EXIT_OK


def _parse_resolution(text: str) -> dict:
    steps = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in DEFAULT_RESOLUTION:
            raise UsageError(
                f"bad --resolution entry {item!r}, keys are D1, D2, w, s (values in mm)"
            )
        try:
            steps[key] = mm_to_m(float(value))
        except ValueError:
            raise UsageError(f"bad --resolution value in {item!r}") from None
    return steps


def _cmd_optimize(args) -> int:
    if args.problem == "default":
        problem = default_problem()
    else:
        problem = OptimizationProblem.from_mapping(_load_json(args.problem))
    result = maximize(problem, restarts=args.restarts, seed=args.seed)
    mapping = result.to_mapping()
    if result.feasible_found:
        best = mapping["best"]
        print(
            f"best L = {mapping['L_best_uH']:.2f} uH at "
            f"D1 = {best['D1_mm']:.4f} mm, D2 = {best['D2_mm']:.4f} mm, "
            f"w = {best['w_mm']:.4f} mm, s = {best['s_mm']:.4f} mm, "
            f"N_T = {best['N_T']} ({result.restarts_run} restarts)"
        )
    else:
        print(f"no feasible point found in {result.restarts_run} restarts")
    if args.oracle and result.feasible_found:
        resolution = _parse_resolution(args.resolution) if args.resolution else None
        oracle = brute_force_max(problem, resolution)
        oracle_mapping = oracle.to_mapping()
        del oracle_mapping["restarts"]
        del oracle_mapping["restarts_run"]
        mapping["oracle"] = oracle_mapping
        agreement = (result.L_best - oracle.L_best) / oracle.L_best * 100.0
        mapping["oracle_agreement_pct"] = agreement
        print(
            f"oracle L = {oracle_mapping['L_best_uH']:.2f} uH, "
            f"optimizer ahead by {agreement:.4f}%"
        )
    elif args.oracle:
        print("skipping the oracle, nothing to compare against")
    _write_json(args.out, mapping)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planarwind",
        description="Inductance estimation, model fitting and design "
                    "optimization for multilayer rectangular planar windings. "
                    "Lengths are mm, inductances uH.",
    )
    parser.add_argument(
        "--units", choices=["mm-uH"], default="mm-uH",
        help="unit system for flags and files (fixed in this version)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    est = commands.add_parser("estimate", help="estimate one winding's inductance")
    est.add_argument("--D1", type=float, required=True, metavar="MM", help="outer side 1")
    est.add_argument("--D2", type=float, required=True, metavar="MM", help="outer side 2")
    est.add_argument("--w", type=float, required=True, metavar="MM", help="trace width")
    est.add_argument("--s", type=float, required=True, metavar="MM", help="turn spacing")
    est.add_argument("--NT", type=int, required=True, help="turns per layer")
    est.add_argument("--NL", type=int, required=True, help="number of layers")
    est.add_argument("--O", type=float, default=None, metavar="MM",
                     help="layer gap, required for --NL >= 2")
    est.add_argument("--model", choices=["full", "simplified", "square", "mohan"],
                     default="full", help="which estimate to print (default full)")
    est.add_argument("--coeffs", default=None, metavar="FILE",
                     help="coefficient JSON for the full/square models, or 'default'")
    est.add_argument("--format", choices=["text", "json", "csv"], default="text")
    est.add_argument("--output", default=None, metavar="FILE",
                     help="write instead of printing")
    est.set_defaults(func=_cmd_estimate)

    grid = commands.add_parser("grid", help="generate a winding grid as CSV")
    grid.add_argument("--spec", required=True, metavar="FILE",
                      help="grid spec JSON, or one of the built-in corpora A, B, C, AB")
    grid.add_argument("--out", required=True, metavar="FILE", help="output CSV")
    grid.add_argument("--labels", default=None, metavar="FILE",
                      help="label with this coefficient JSON (or 'default')")
    grid.add_argument("--noise", type=float, default=0.0,
                      help="log10 noise sigma for labels (default 0)")
    grid.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    grid.set_defaults(func=_cmd_grid)

    synth = commands.add_parser("synth", help="label geometries with model inductance")
    synth.add_argument("--in", dest="input", required=True, metavar="FILE",
                       help="geometry CSV")
    synth.add_argument("--coeffs", required=True, metavar="FILE",
                       help="coefficient JSON (or 'default')")
    synth.add_argument("--noise", type=float, default=0.0,
                       help="log10 noise sigma (default 0)")
    synth.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    synth.add_argument("--out", required=True, metavar="FILE", help="output CSV")
    synth.set_defaults(func=_cmd_synth)

    fit = commands.add_parser("fit", help="fit model coefficients to labeled samples")
    fit.add_argument("--in", dest="input", required=True, metavar="FILE",
                     help="labeled sample CSV")
    fit.add_argument("--fraction", type=float, default=0.8,
                     help="training fraction (default 0.8)")
    fit.add_argument("--seed", type=int, default=0, help="split seed (default 0)")
    fit.add_argument("--repeats", type=int, default=1,
                     help="fits with derived seeds; coefficients come from the first")
    fit.add_argument("--out", required=True, metavar="FILE", help="coefficient JSON")
    fit.add_argument("--report", default=None, metavar="FILE", help="report JSON")
    fit.add_argument("--threshold", type=float, default=5.0,
                     help="exceedance threshold, percent (default 5)")
    fit.add_argument("--bin-width", type=float, default=0.5,
                     help="histogram bin width, percent (default 0.5)")
    fit.set_defaults(func=_cmd_fit)

    ev = commands.add_parser("eval", help="evaluate coefficients on labeled samples")
    ev.add_argument("--in", dest="input", required=True, metavar="FILE",
                    help="labeled sample CSV")
    ev.add_argument("--coeffs", required=True, metavar="FILE",
                    help="coefficient JSON (or 'default')")
    ev.add_argument("--threshold", type=float, default=5.0,
                    help="exceedance threshold, percent (default 5)")
    ev.add_argument("--bin-width", type=float, default=0.5,
                    help="histogram bin width, percent (default 0.5)")
    ev.add_argument("--report", required=True, metavar="FILE", help="report JSON")
    ev.add_argument("--hist", default=None, metavar="FILE",
                    help="also write the histogram as CSV")
    ev.set_defaults(func=_cmd_eval)

    opt = commands.add_parser("optimize", help="maximize inductance under bounds")
    opt.add_argument("--problem", required=True, metavar="FILE",
                     help="problem JSON, or 'default' for the reference task")
    opt.add_argument("--restarts", type=int, default=100,
                     help="local searches per turn count (default 100)")
    opt.add_argument("--seed", type=int, default=0, help="start-point seed (default 0)")
    opt.add_argument("--out", required=True, metavar="FILE", help="result JSON")
    opt.add_argument("--oracle", action="store_true",
                     help="also run the exhaustive grid oracle and compare")
    opt.add_argument("--resolution", default=None, metavar="D1=0.5,D2=0.5,w=0.1,s=0.1",
                     help="oracle grid steps in mm")
    opt.set_defaults(func=_cmd_optimize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SampleFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RankDeficiencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InfeasibleGeometryError, InfeasibleProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON: {exc.msg} at line {exc.lineno}", file=sys.stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
