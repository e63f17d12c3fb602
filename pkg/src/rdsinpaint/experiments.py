"""Scripted desk-scale experiments with synthetic inputs and automated checks.

Each :class:`ExperimentSpec` generates its inputs (or takes user-supplied
ones), runs one or more inpainting or shock-filter configurations, writes
the result images, solver reports and metrics to an output directory, and
evaluates a list of checks.  ``run_experiment`` prints one line per check
plus a summary line and returns a process exit status.
"""

from __future__ import annotations

import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage

from . import generators as gen
from .image_core import as_channels, load_image, load_mask, save_image, save_mask, write_key_values
from .metrics import (
    binary_fraction,
    compute_metrics,
    connected_components,
    isoperimetric_ratio,
    threshold,
    touches_borders,
)
from .params import RdsParams, couple_parameters, homogeneous_diffusion_params
from .rds_solver import inpaint_vector
from .report import SolverReport
from .shock_filters import ShockConfig, run_shock_filter
from .stencils import gaussian_convolve

logger = logging.getLogger(__name__)

PASS, FAIL = 0, 1


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self, experiment: str) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {experiment}: {self.name} ({self.detail})"


@dataclass
class RunResult:
    output: np.ndarray
    report: SolverReport


@dataclass(frozen=True)
class ExperimentSpec:
    """A named experiment.

    ``generate()`` returns a dict with ``image`` ``(n_c, H, W)`` and optionally
    ``mask`` and ``reference``.  ``runs`` maps a label to an :class:`RdsParams`
    (inpainting, needs a mask) or a :class:`ShockConfig` (filtering of every
    channel).  ``evaluate(inputs, results)`` returns the checks.
    """

    name: str
    summary: str
    generate: Callable[[], dict]
    runs: dict
    evaluate: Callable[[dict, dict], list]


@dataclass
class ExperimentOutcome:
    name: str
    checks: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> int:
        return PASS if self.passed else FAIL

    def lines(self) -> list[str]:
        out = [c.line(self.name) for c in self.checks]
        n_ok = sum(c.passed for c in self.checks)
        out.append(f"{'PASS' if self.passed else 'FAIL'} {self.name} ({n_ok}/{len(self.checks)} checks)")
        return out


def _bounds_check(label: str, report: SolverReport) -> Check:
    return Check(
        f"{label} stays within the data range",
        report.within_bounds(),
        f"observed [{report.observed_min:.6g}, {report.observed_max:.6g}], "
        f"data [{report.input_min:.6g}, {report.input_max:.6g}]",
    )


def _converged_check(label: str, report: SolverReport, tol: float) -> Check:
    return Check(
        f"{label} converged",
        report.final_max_update < tol,
        f"{report.iterations_run} iterations, last max update {report.final_max_update:.3g} < {tol:g}",
    )


def _range_and_convergence(spec_runs: dict, results: dict) -> list[Check]:
    checks = []
    for label, cfg in spec_runs.items():
        tol = cfg.stop_tolerance if isinstance(cfg, RdsParams) else cfg.tolerance
        checks.append(_bounds_check(label, results[label].report))
        checks.append(_converged_check(label, results[label].report, tol))
    return checks


# dipole to half-plane

HALFPLANE_SIZE = 128
HALFPLANE_LINE = ((64.0, 64.0), 90.0)
HALFPLANE_ACCURACY = 0.99


def _halfplane_inputs() -> dict:
    point, angle = HALFPLANE_LINE
    image, mask = gen.gen_dipole(HALFPLANE_SIZE, HALFPLANE_SIZE, point, angle)
    reference = gen.half_plane(HALFPLANE_SIZE, HALFPLANE_SIZE, point, angle)
    return dict(image=image, mask=mask, reference=reference[np.newaxis])


def _halfplane_checks(inputs: dict, results: dict) -> list[Check]:
    res = results["rds"]
    acc = compute_metrics(res.output, inputs["reference"]).binary_accuracy
    return [
        Check("rds binary accuracy", acc >= HALFPLANE_ACCURACY, f"{acc:.4f} >= {HALFPLANE_ACCURACY}"),
        _bounds_check("rds", res.report),
    ]


# four dipoles to disk

DISK_SIZE = 127
DISK_RADIUS = 39.5
DISK_ISOPERIMETRIC = 0.85
DISK_BINARY = 0.95


def _disk_inputs() -> dict:
    image, mask = gen.gen_disk_dipoles(DISK_SIZE, DISK_RADIUS)
    return dict(image=image, mask=mask, reference=gen.disk(DISK_SIZE, DISK_RADIUS)[np.newaxis])


def _disk_checks(inputs: dict, results: dict) -> list[Check]:
    u = results["rds"].output[0]
    n = connected_components(threshold(u))
    iso = isoperimetric_ratio(u)
    binary = binary_fraction(u, tol=1.0)
    return [
        Check("single thresholded component", n == 1, f"{n} components"),
        Check("isoperimetric ratio", iso > DISK_ISOPERIMETRIC, f"{iso:.4f} > {DISK_ISOPERIMETRIC}"),
        Check("binary up to 1 grey level", binary >= DISK_BINARY,
              f"{binary:.4f} of pixels within 1 of 0 or 255, need >= {DISK_BINARY}"),
        _bounds_check("rds", results["rds"].report),
    ]


# triangle from disk data

KANIZSA_SIZE = 128
KANIZSA_CIRCUMRADIUS = 0.32 * KANIZSA_SIZE
KANIZSA_DISK_RADIUS = 14.0


def _kanizsa_inputs() -> dict:
    reference = gen.triangle(KANIZSA_SIZE, KANIZSA_CIRCUMRADIUS)
    verts = gen.triangle_vertices(KANIZSA_SIZE, KANIZSA_CIRCUMRADIUS)
    mask = gen.disks_mask(KANIZSA_SIZE, verts, KANIZSA_DISK_RADIUS)
    return dict(image=np.where(mask, reference, 0.0)[np.newaxis], mask=mask, reference=reference[np.newaxis])


def _kanizsa_checks(inputs: dict, results: dict) -> list[Check]:
    return _range_and_convergence(EXPERIMENTS["kaniza-triangle"].runs, results)


# partial line elongation by shock filters

LINE_SIZE = 256
LINE_ANGLE = 30.0
LINE_LENGTH = 80.0
LINE_THICKNESS = 6.0


def _line_inputs() -> dict:
    c = LINE_SIZE / 2
    img = gen.line_segment(LINE_SIZE, LINE_SIZE, (c, c), LINE_ANGLE, LINE_LENGTH, LINE_THICKNESS)
    return dict(image=img[np.newaxis])


def _component_through(binary: np.ndarray, seed: np.ndarray) -> np.ndarray:
    labels, _ = ndimage.label(binary)
    hit = np.unique(labels[seed & binary])
    return np.isin(labels, hit[hit > 0])


def _line_checks(inputs: dict, results: dict) -> list[Check]:
    source = threshold(inputs["image"][0])
    coherent = _component_through(threshold(results["coherence"].output[0]), source)
    left, right, top, bottom = touches_borders(coherent)
    reaches = (left and right) or (top and bottom)
    area_in = int(source.sum())
    area_am = int(threshold(results["alvarez_mazorra"].output[0]).sum())
    return [
        Check("coherence filter extends the line to opposite borders", reaches,
              f"left={left} right={right} top={top} bottom={bottom}"),
        Check("alvarez_mazorra filter shrinks the line", area_am < area_in,
              f"foreground {area_in} -> {area_am} pixels"),
    ]


# cross with a missing centre; coherence versus Alvarez-Mazorra shock term

CROSS_SIZE = 64
CROSS_BAR = 24.0
CROSS_GAP = 30.0


def _cross_inputs() -> dict:
    reference = gen.cross(CROSS_SIZE, CROSS_BAR)
    mask = ~gen.centre_square(CROSS_SIZE, CROSS_GAP)
    return dict(image=np.where(mask, reference, 0.0)[np.newaxis], mask=mask, reference=reference[np.newaxis])


def _cross_checks(inputs: dict, results: dict) -> list[Check]:
    return _range_and_convergence(EXPERIMENTS["cross"].runs, results)


# steady states of unsmoothed shock filters

SHOCK_SIZE = 128
SHOCK_BLUR = 4.0
SHOCK_BINARY = 0.99


def _shock_inputs() -> dict:
    c = SHOCK_SIZE / 2
    box = gen.line_segment(SHOCK_SIZE, SHOCK_SIZE, (c, c), 0.0, 60.0, 40.0)
    return dict(image=gaussian_convolve(box, SHOCK_BLUR)[np.newaxis])


def _shock_checks(inputs: dict, results: dict) -> list[Check]:
    checks = _range_and_convergence(EXPERIMENTS["shock-steady"].runs, results)
    for label, res in results.items():
        frac = binary_fraction(res.output, tol=1.0)
        checks.append(Check(f"{label} steady state is binary", frac >= SHOCK_BINARY,
                            f"{frac:.4f} of pixels within 1 of 0 or 255, need >= {SHOCK_BINARY}"))
    return checks


# sparse natural-like images

SPARSE_DENSITY = 0.2


def _sparse_grey_inputs() -> dict:
    size = 256
    reference = gen.grey_scene(size)
    mask = gen.gen_random_mask(size, size, SPARSE_DENSITY, seed=0)
    return dict(image=np.where(mask, reference, 0.0)[np.newaxis], mask=mask, reference=reference[np.newaxis])


def _sparse_colour_inputs() -> dict:
    size = 128
    reference = gen.colour_scene(size)
    mask = gen.gen_random_mask(size, size, SPARSE_DENSITY, seed=1)
    return dict(image=np.where(mask, reference, 0.0), mask=mask, reference=reference)


def _sparse_checks(name: str):
    def evaluate(inputs: dict, results: dict) -> list[Check]:
        checks = _range_and_convergence(EXPERIMENTS[name].runs, results)
        ref = inputs["reference"]
        rds = compute_metrics(results["rds"].output, ref).psnr
        base = compute_metrics(results["diffusion"].output, ref).psnr
        checks.append(Check("rds beats homogeneous diffusion", rds > base, f"PSNR {rds:.2f} dB vs {base:.2f} dB"))
        return checks

    return evaluate


DIFFUSION_BASELINE = homogeneous_diffusion_params(stop_tolerance=1e-5)

EXPERIMENTS: dict[str, ExperimentSpec] = {
    spec.name: spec
    for spec in (
        ExperimentSpec(
            "dipole-halfplane",
            "half-plane from one dipole, 128x128",
            _halfplane_inputs,
            {"rds": couple_parameters(2.0, 1.0)},
            _halfplane_checks,
        ),
        ExperimentSpec(
            "dipole-disk",
            "disk from four dipoles, 127x127",
            _disk_inputs,
            {"rds": couple_parameters(1.8, 3.2)},
            _disk_checks,
        ),
        ExperimentSpec(
            "kaniza-triangle",
            "white triangle on black from data in three disks",
            _kanizsa_inputs,
            {"rds": couple_parameters(3.5, 3.0)},
            _kanizsa_checks,
        ),
        ExperimentSpec(
            "line-elongation",
            "partial line under coherence and Alvarez-Mazorra shock filters, 256x256",
            _line_inputs,
            {
                "coherence": ShockConfig("coherence", sigma=2.0, rho=5.0, iterations=3000, tolerance=1e-4),
                "alvarez_mazorra": ShockConfig("alvarez_mazorra", sigma=2.0, iterations=3000, tolerance=1e-4),
            },
            _line_checks,
        ),
        ExperimentSpec(
            "cross",
            "cross with a missing centre, coherence and Alvarez-Mazorra shock terms",
            _cross_inputs,
            {
                "rds": couple_parameters(2.0, 1.5),
                "rds_alvarez_mazorra": couple_parameters(2.0, 1.5, rho=0.0, nu=4.0, shock="alvarez_mazorra"),
            },
            _cross_checks,
        ),
        ExperimentSpec(
            "shock-steady",
            "steady states of Laplacian and gradient-direction shock filters on a blurred box",
            _shock_inputs,
            {
                "laplacian": ShockConfig("laplacian", iterations=5000, tolerance=1e-4),
                "gradient_direction": ShockConfig("gradient_direction", iterations=5000, tolerance=1e-4),
            },
            _shock_checks,
        ),
        ExperimentSpec(
            "sparse-grey",
            "greyscale scene from 20% random pixels, 256x256",
            _sparse_grey_inputs,
            {"rds": couple_parameters(1.5, 5.0), "diffusion": DIFFUSION_BASELINE},
            _sparse_checks("sparse-grey"),
        ),
        ExperimentSpec(
            "sparse-colour",
            "colour scene from 20% random pixels, 128x128",
            _sparse_colour_inputs,
            {"rds": couple_parameters(3.0, 3.0), "diffusion": DIFFUSION_BASELINE},
            _sparse_checks("sparse-colour"),
        ),
    )
}


def load_inputs(image, mask=None, reference=None) -> dict:
    """User-supplied replacements for an experiment's generated inputs."""
    inputs = dict(image=load_image(image))
    if mask is not None:
        inputs["mask"] = load_mask(mask)
    if reference is not None:
        inputs["reference"] = load_image(reference)
    return inputs


def execute(cfg, inputs: dict) -> RunResult:
    image = as_channels(inputs["image"])
    if isinstance(cfg, RdsParams):
        if "mask" not in inputs:
            raise ValueError("inpainting needs a mask")
        out, report = inpaint_vector(image, inputs["mask"], cfg)
        return RunResult(out, report)
    outs, reports = zip(*(run_shock_filter(channel, cfg) for channel in image))
    report = reports[0]
    for other in reports[1:]:
        report.observed_min = min(report.observed_min, other.observed_min)
        report.observed_max = max(report.observed_max, other.observed_max)
        report.input_min = min(report.input_min, other.input_min)
        report.input_max = max(report.input_max, other.input_max)
        report.iterations_run = max(report.iterations_run, other.iterations_run)
        report.final_max_update = max(report.final_max_update, other.final_max_update)
        report.wall_seconds += other.wall_seconds
    return RunResult(np.stack(outs), report)


def _ext(img: np.ndarray) -> str:
    return ".pgm" if img.shape[0] == 1 else ".ppm" if img.shape[0] == 3 else ".npy"


def _save(img: np.ndarray, path: Path) -> None:
    if path.suffix == ".npy":
        np.save(path, img)
    else:
        save_image(img, path)


def _flat_metrics(metrics: dict) -> dict:
    return {f"{label}.{key}": repr(value) for label, m in metrics.items() for key, value in m.items()}


def run_experiment(spec: ExperimentSpec, outdir, inputs: dict | None = None, stream=None) -> ExperimentOutcome:
    """Run all configurations of ``spec``, write artefacts under ``outdir/spec.name``, print check lines."""
    stream = sys.stdout if stream is None else stream
    inputs = spec.generate() if inputs is None else inputs
    inputs["image"] = as_channels(inputs["image"])
    where = Path(outdir) / spec.name
    where.mkdir(parents=True, exist_ok=True)
    ext = _ext(inputs["image"])
    _save(inputs["image"], where / f"input{ext}")
    if "mask" in inputs:
        save_mask(inputs["mask"], where / "mask.pgm")
    if "reference" in inputs:
        inputs["reference"] = as_channels(inputs["reference"])
        _save(inputs["reference"], where / f"reference{ext}")

    results = {}
    outcome = ExperimentOutcome(spec.name)
    for label, cfg in spec.runs.items():
        logger.info("%s: running %s", spec.name, label)
        res = execute(cfg, inputs)
        results[label] = res
        _save(res.output, where / f"{label}{ext}")
        res.report.write(where / f"{label}_report.txt")
        entry = dict(iterations=res.report.iterations_run, seconds=res.report.wall_seconds)
        if "reference" in inputs and inputs["reference"].shape == res.output.shape:
            entry.update(compute_metrics(res.output, inputs["reference"]).as_dict())
        outcome.metrics[label] = entry

    outcome.checks = spec.evaluate(inputs, results)
    write_key_values(_flat_metrics(outcome.metrics), where / "metrics.txt")
    (where / "checks.txt").write_text("\n".join(outcome.lines()) + "\n")
    for line in outcome.lines():
        print(line, file=stream, flush=True)
    return outcome


def _run_named(name: str, outdir: str) -> tuple[str, int, list[str]]:
    buffer = io.StringIO()
    outcome = run_experiment(EXPERIMENTS[name], outdir, stream=buffer)
    return name, outcome.status, buffer.getvalue().splitlines()


def run_many(names, outdir, jobs: int = 1, stream=None) -> int:
    """Run experiments by name; ``jobs > 1`` uses a process pool.  Returns the worst status."""
    stream = sys.stdout if stream is None else stream
    unknown = [n for n in names if n not in EXPERIMENTS]
    if unknown:
        raise KeyError(f"unknown experiment(s): {', '.join(unknown)}")
    if jobs <= 1:
        return max(run_experiment(EXPERIMENTS[n], outdir, stream=stream).status for n in names)
    status = PASS
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for _, code, lines in pool.map(_run_named, names, [str(outdir)] * len(names)):
            for line in lines:
                print(line, file=stream, flush=True)
            status = max(status, code)
    return status


__all__ = [
    "EXPERIMENTS",
    "Check",
    "ExperimentOutcome",
    "ExperimentSpec",
    "execute",
    "load_inputs",
    "run_experiment",
    "run_many",
]

