"""Command-line interface.

Subcommands: ``inpaint``, ``shockfilter``, ``gen-mask``, ``gen-dipole``,
``metrics`` and ``experiment``.  ``--config FILE`` reads ``key=value`` lines
whose keys are the long flag names (``max-iter=500``); flags given on the
command line win.  Exit status: 0 success, 1 failed check, 2 usage or I/O
error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .experiments import EXPERIMENTS, ExperimentSpec, load_inputs, run_experiment, run_many
from .generators import gen_dipole, gen_disk_dipoles, gen_random_mask
from .image_core import ImageFormatError, load_image, load_mask, read_key_values, save_image, save_mask, write_key_values
from .metrics import compute_metrics
from .params import RdsParams, StabilityError, couple_parameters
from .rds_solver import inpaint_vector
from .shock_filters import ShockConfig, run_shock_filter
from .structure import joint_structure_tensor

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2
SHOCK_ALIASES = {"coherence": "coherence", "am": "alvarez_mazorra", "alvarez_mazorra": "alvarez_mazorra"}
OPERATOR_ALIASES = {
    "laplacian": "laplacian",
    "gradient-direction": "gradient_direction",
    "am": "alvarez_mazorra",
    "coherence": "coherence",
}

logger = logging.getLogger("rdsinpaint")


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file with defaults for the long flags")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdsinpaint", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inpaint", help="RDS inpainting of an image from the pixels marked in a mask")
    _add_config(p)
    p.add_argument("--image", help="input PGM/PPM/PNG")
    p.add_argument("--mask", help="mask image; pixels above 127.5 are known")
    p.add_argument("--output", help="result image")
    p.add_argument("--sigma", type=float, help="noise scale; rho = nu = 1.6 sigma unless given")
    p.add_argument("--lambda", dest="lam", type=float, help="contrast parameter; epsilon = 0.15 lambda unless given")
    expert = p.add_argument_group("expert parameters")
    expert.add_argument("--rho", type=float)
    expert.add_argument("--nu", type=float)
    expert.add_argument("--epsilon", type=float)
    expert.add_argument("--delta", type=float)
    expert.add_argument("--tau", type=float, help="time step; default 0.95 of the stability bound")
    expert.add_argument("--guidance", choices=("arctan", "sign"))
    expert.add_argument("--shock", choices=sorted(SHOCK_ALIASES))
    expert.add_argument("--max-iter", type=int)
    expert.add_argument("--tol", type=float, help="stop when the largest update is below this")
    expert.add_argument("--init", choices=("mean", "zero"))
    expert.add_argument("--lag", type=_positive_int, help="recompute weight and guidance every LAG steps")
    p.add_argument("--report", help="write the solver report as key=value text")
    p.add_argument("--orientation-dump", metavar="PREFIX",
                   help="write the final dominant eigenvector field as PREFIX_c.npy and PREFIX_s.npy")

    p = sub.add_parser("shockfilter", help="evolve a shock filter on every channel")
    _add_config(p)
    p.add_argument("--image")
    p.add_argument("--output")
    p.add_argument("--operator", choices=sorted(OPERATOR_ALIASES))
    p.add_argument("--sigma", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--guidance", choices=("arctan", "sign"))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--tol", type=float, help="steady-state tolerance on the largest update")
    p.add_argument("--report")

    p = sub.add_parser("gen-mask", help="random mask with a fixed number of known pixels")
    _add_config(p)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output")

    p = sub.add_parser("gen-dipole", help="dipole image and mask, or four dipoles on a disk")
    _add_config(p)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--x", type=float, help="point on the line (default: grid centre)")
    p.add_argument("--y", type=float)
    p.add_argument("--angle", type=float, help="line direction in degrees (default 90)")
    p.add_argument("--low", type=float)
    p.add_argument("--high", type=float)
    p.add_argument("--disk-radius", type=float, help="four dipoles on a centred circle instead")
    p.add_argument("--image-out")
    p.add_argument("--mask-out")

    p = sub.add_parser("metrics", help="MSE, PSNR and binary accuracy against a reference")
    p.add_argument("--result", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--output", help="also write the metrics as key=value text")

    p = sub.add_parser("experiment", help="run scripted experiments")
    p.add_argument("name", help=f"'all', 'list' or one of: {', '.join(EXPERIMENTS)}")
    p.add_argument("--outdir", default="experiments_out")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--image", help="replace the generated input (single experiment only)")
    p.add_argument("--mask")
    p.add_argument("--reference")
    parser.subcommands = sub.choices
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Fill flags left unset from ``args.config``."""
    path = getattr(args, "config", None)
    if not path:
        return
    sub = parser.subcommands[args.command]
    actions = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                actions[opt[2:]] = action
    for key, text in read_key_values(path).items():
        action = actions.get(key.replace("_", "-"))
        if action is None or action.dest in ("config", "help"):
            raise UsageError(f"{path}: unknown key {key!r}")
        if getattr(args, action.dest) is not None:
            continue
        try:
            value = action.type(text) if action.type else text
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}: bad value for {key}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{path}: {key} must be one of {sorted(action.choices)}")
        setattr(args, action.dest, value)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n.replace("_", "-")) for n in missing)
        raise UsageError(f"missing required setting(s): {flags}")


def rds_params_from_args(args) -> RdsParams:
    _require(args, "sigma", "lam")
    overrides = {}
    for flag, name in (("rho", "rho"), ("nu", "nu"), ("epsilon", "epsilon"), ("delta", "delta"),
                       ("tau", "tau"), ("guidance", "guidance"), ("max_iter", "max_iterations"),
                       ("tol", "stop_tolerance"), ("init", "init"), ("lag", "lag")):
        value = getattr(args, flag)
        if value is not None:
            overrides[name] = value
    if args.shock is not None:
        overrides["shock"] = SHOCK_ALIASES[args.shock]
    return couple_parameters(args.sigma, args.lam, **overrides)


def _cmd_inpaint(args) -> int:
    _require(args, "image", "mask", "output")
    params = rds_params_from_args(args)
    image = load_image(args.image)
    mask = load_mask(args.mask)
    if mask.shape != image.shape[1:]:
        raise UsageError(f"mask size {mask.shape[::-1]} differs from image size {image.shape[:0:-1]}")
    result, report = inpaint_vector(image, mask, params)
    save_image(result, args.output)
    if args.report:
        report.write(args.report)
    if args.orientation_dump:
        field = joint_structure_tensor(result, params.sigma, params.rho, params.h)
        np.save(f"{args.orientation_dump}_c.npy", field.c)
        np.save(f"{args.orientation_dump}_s.npy", field.s)
    print(f"{report.iterations_run} iterations, max update {report.final_max_update:.3g}, "
          f"{report.wall_seconds:.2f} s")
    return EXIT_OK


def _cmd_shockfilter(args) -> int:
    _require(args, "image", "output")
    values = {}
    for flag in ("sigma", "rho", "guidance", "epsilon", "tau", "iterations"):
        if getattr(args, flag) is not None:
            values[flag] = getattr(args, flag)
    if args.tol is not None:
        values["tolerance"] = args.tol
    operator = OPERATOR_ALIASES[args.operator or "coherence"]
    cfg = ShockConfig(operator=operator, **values)
    image = load_image(args.image)
    outs, reports = zip(*(run_shock_filter(channel, cfg) for channel in image))
    save_image(np.stack(outs), args.output)
    if args.report:
        if len(reports) == 1:
            reports[0].write(args.report)
        else:
            _write_channel_reports(reports, args.report)
    print(f"{max(r.iterations_run for r in reports)} iterations, "
          f"max update {max(r.final_max_update for r in reports):.3g}")
    return EXIT_OK


def _write_channel_reports(reports, path) -> None:
    pairs = {}
    for c, r in enumerate(reports):
        pairs.update({f"channel{c}.{k}": repr(v) if isinstance(v, float) else v for k, v in r.as_dict().items()})
    write_key_values(pairs, path)


def _cmd_gen_mask(args) -> int:
    _require(args, "width", "height", "density", "output")
    mask = gen_random_mask(args.width, args.height, args.density, 0 if args.seed is None else args.seed)
    save_mask(mask, args.output)
    print(f"{int(mask.sum())} known pixels")
    return EXIT_OK


def _cmd_gen_dipole(args) -> int:
    _require(args, "width", "height", "image_out", "mask_out")
    values = (0.0 if args.low is None else args.low, 255.0 if args.high is None else args.high)
    if args.disk_radius is not None:
        if args.width != args.height:
            raise UsageError("the disk variant needs a square grid")
        image, mask = gen_disk_dipoles(args.width, args.disk_radius, values)
    else:
        point = (args.width / 2 if args.x is None else args.x, args.height / 2 if args.y is None else args.y)
        image, mask = gen_dipole(args.width, args.height, point, 90.0 if args.angle is None else args.angle, values)
    save_image(image, args.image_out)
    save_mask(mask, args.mask_out)
    print(f"{int(mask.sum())} known pixels")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    m = compute_metrics(load_image(args.result), load_image(args.reference))
    for key, value in m.as_dict().items():
        print(f"{key}={value!r}")
    if args.output:
            write_key_values({k: repr(v) for k, v in m.as_dict().items()}, args.output)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.name == "list":
        for spec in EXPERIMENTS.values():
            print(f"{spec.name}: {spec.summary}")
        return EXIT_OK
    names = list(EXPERIMENTS) if args.name == "all" else [args.name]
    if args.name != "all" and args.name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {args.name!r}; choose from {', '.join(EXPERIMENTS)} or 'all'")
    if args.image is not None:
        if len(names) != 1:
            raise UsageError("--image needs a single experiment name")
        spec: ExperimentSpec = EXPERIMENTS[names[0]]
        inputs = load_inputs(args.image, args.mask, args.reference)
        return run_experiment(spec, args.outdir, inputs).status
    return run_many(names, args.outdir, args.jobs)


COMMANDS = {
    "inpaint": _cmd_inpaint,
    "shockfilter": _cmd_shockfilter,
    "gen-mask": _cmd_gen_mask,
    "gen-dipole": _cmd_gen_dipole,
    "metrics": _cmd_metrics,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _apply_config(parser, args)
        return COMMANDS[args.command](args)
    except (UsageError, StabilityError, ImageFormatError, KeyError, OSError, ValueError, TypeError) as exc:
        print(f"rdsinpaint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

