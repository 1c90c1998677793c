"""Command-line front end: ``hssr synth|degrade|baseline|solve|metrics|export-band``.

Every flag mirrors a config field.  ``--config FILE`` reads a JSON object of
the same (underscore) names; flags given explicitly on the command line win
over file values, which win over built-in defaults.

Exit codes: 0 success (``solve``: tolerance reached), 2 ``solve`` stopped at
the iteration cap, 1 usage or I/O error.
"""
import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .admm import SolverConfig, solve
from .cube_io import SynthConfig, export_band, numerical_ranks, read_cube, synth_cube, write_cube
from .degradation import DegradationConfig, bicubic_upsample, degrade, gaussian_kernel
from .errors import FormatError, ShapeError
from .lowrank import McpParams, ModeWeights
from .metrics import evaluate
from .tv import TvConfig

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CAPPED = 2

DEGRADE_DEFAULTS = {"factor": 2, "kernel_size": 7, "sigma": 2.0, "noise": 0.0, "seed": 0}
SOLVER_DEFAULTS = {
    "lambda1": 1e-3,
    "lambda2": 1e-2,
    "rho": 1.0,
    "rho_growth": 1.05,
    "alpha": [1 / 3, 1 / 3, 1 / 3],
    "penalty": "nuclear",
    "mcp_lambda": 1.0,
    "mcp_a": 2.0,
    "epsilon": 1e-3,
    "max_outer": 100,
    "max_inner": 10,
    "tol": 1e-4,
    "init": "bicubic",
}
SYNTH_DEFAULTS = {"dims": [32, 32, 8], "rank": [4, 4, 2], "smoothness": 2.0, "seed": 7}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse uses exit status 2 for usage errors; 2 is reserved here for capped solves
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _triple(text):
    parts = text.lower().split("x")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxWxB, got {text!r}") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected HxWxB, got {text!r}")
    return vals


def _floats(text):
    try:
        return [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


# --- config assembly --------------------------------------------------------

def resolve(args, defaults):
    """Merge built-in defaults, the optional JSON config file and explicit flags."""
    merged = dict(defaults)
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as e:
            raise UsageError(f"config file {args.config}: {e}") from None
        if not isinstance(data, dict):
            raise UsageError(f"config file {args.config} must hold a JSON object")
        unknown = set(data) - set(defaults)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(data)
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    return merged


def degradation_config(p):
    return DegradationConfig(
        gaussian_kernel(int(p["kernel_size"]), float(p["sigma"])),
        int(p["factor"]),
        float(p["noise"]),
        int(p["seed"]),
    )


def solver_config(p):
    return SolverConfig(
        lambda1=float(p["lambda1"]),
        lambda2=float(p["lambda2"]),
        rho=float(p["rho"]),
        rho_growth=float(p["rho_growth"]),
        alpha=ModeWeights(tuple(float(a) for a in p["alpha"])),
        penalty=p["penalty"],
        mcp=McpParams(float(p["mcp_lambda"]), float(p["mcp_a"])),
        tv=TvConfig(float(p["epsilon"])),
        max_outer=int(p["max_outer"]),
        max_inner=int(p["max_inner"]),
        tol=float(p["tol"]),
        degradation=degradation_config(p),
        init=p["init"],
    )


def _build(factory, params):
    # config validation happens before any file is read or any compute starts
    try:
        return factory(params)
    except (ValueError, TypeError) as e:
        raise UsageError(str(e)) from None


# --- manifest ---------------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict
    outputs: dict
    duration: float = 0.0
    final: dict = None
    metrics: dict = None
    version: str = __version__
    extra: dict = field(default_factory=dict)

    def to_text(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_text(cls, text):
        return cls(**json.loads(text))

    def write(self, path):
        Path(path).write_text(self.to_text())


def _default_path(out, suffix):
    return str(Path(out).with_name(Path(out).name + suffix))


# --- commands ---------------------------------------------------------------

def cmd_synth(args):
    p = resolve(args, SYNTH_DEFAULTS)
    cfg = _build(lambda q: SynthConfig(q["dims"], q["rank"], float(q["smoothness"]), int(q["seed"])), p)
    x = synth_cube(cfg)
    write_cube(x, args.output)
    h, w, b = x.shape
    r1, r2, r3 = numerical_ranks(x)
    print(f"dims = {h}x{w}x{b}")
    print(f"ranks = {r1}x{r2}x{r3}")
    return EXIT_OK


def cmd_degrade(args):
    p = resolve(args, DEGRADE_DEFAULTS)
    cfg = _build(degradation_config, p)
    t0 = time.perf_counter()
    x = read_cube(args.input)
    y = degrade(x, cfg)
    write_cube(y, args.output)
    manifest = args.manifest or _default_path(args.output, ".manifest.json")
    RunManifest(
        "degrade", p, {"input": args.input}, {"cube": args.output}, time.perf_counter() - t0
    ).write(manifest)
    h, w, b = y.shape
    print(f"dims = {h}x{w}x{b}")
    return EXIT_OK


def cmd_baseline(args):
    factor = int(resolve(args, {"factor": DEGRADE_DEFAULTS["factor"]})["factor"])
    if factor < 1:
        raise UsageError("factor must be a positive integer")
    x = bicubic_upsample(read_cube(args.input), factor)
    write_cube(x, args.output)
    h, w, b = x.shape
    print(f"dims = {h}x{w}x{b}")
    return EXIT_OK


def cmd_solve(args):
    defaults = {**DEGRADE_DEFAULTS, **SOLVER_DEFAULTS}
    p = resolve(args, defaults)
    cfg = _build(solver_config, p)
    i_obs = read_cube(args.input)
    ref = read_cube(args.reference) if args.reference else None
    hr = cfg.degradation.hr_dims(i_obs.shape)
    if ref is not None and ref.shape != hr:
        raise ShapeError(f"reference dims {ref.shape} differ from reconstruction dims {hr}")
    trace_path = args.trace or _default_path(args.output, ".trace")
    manifest_path = args.manifest or _default_path(args.output, ".manifest.json")

    t0 = time.perf_counter()
    res = solve(i_obs, cfg)
    duration = time.perf_counter() - t0
    write_cube(res.x, args.output)
    Path(trace_path).write_text("".join(r.to_line() + "\n" for r in res.trace))

    report = evaluate(ref, res.x, cfg.degradation.factor) if ref is not None else None
    last = res.trace[-1]
    RunManifest(
        "solve",
        p,
        {"input": args.input, "reference": args.reference},
        {"cube": args.output, "trace": trace_path},
        duration,
        asdict(last),
        report.to_dict() if report else None,
        extra={"converged": res.converged, "iterations": len(res.trace)},
    ).write(manifest_path)
    print(last.to_line())
    if report is not None:
        print(report.to_text())
    status = "converged" if res.converged else "iteration cap reached"
    print(f"status = {status}")
    return EXIT_OK if res.converged else EXIT_CAPPED


def cmd_metrics(args):
    ref, est = read_cube(args.reference), read_cube(args.estimate)
    if ref.shape != est.shape:
        raise ShapeError(f"dims differ: reference {ref.shape} vs estimate {est.shape}")
    report = evaluate(ref, est, args.ratio)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(report.to_text())
    return EXIT_OK


def cmd_export_band(args):
    img = export_band(read_cube(args.input), args.band, args.output)
    print(f"wrote {img.shape[1]}x{img.shape[0]} band {args.band}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def _add_degradation_flags(p):
    g = p.add_argument_group("degradation")
    g.add_argument("--factor", type=int, help="decimation factor r (default 2)")
    g.add_argument("--kernel-size", dest="kernel_size", type=int, help="odd blur kernel size (default 7)")
    g.add_argument("--sigma", type=float, help="Gaussian blur width (default 2.0)")
    g.add_argument("--noise", type=float, help="additive noise std (default 0)")
    g.add_argument("--seed", type=int, help="noise seed (default 0)")


def build_parser():
    parser = _Parser(prog="hssr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hssr {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every iteration to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write a synthetic low-rank smooth cube")
    p.add_argument("--dims", type=_triple, help="HxWxB (default 32x32x8)")
    p.add_argument("--rank", type=_triple, help="Tucker ranks (default 4x4x2)")
    p.add_argument("--smoothness", type=float, help="factor smoothing amount (default 2)")
    p.add_argument("--seed", type=int, help="RNG seed (default 7)")
    p.add_argument("--config")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("degrade", help="blur, decimate and add noise")
    p.add_argument("input")
    _add_degradation_flags(p)
    p.add_argument("--config")
    p.add_argument("--manifest", help="manifest path (default <output>.manifest.json)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("baseline", help="bicubic upsampling")
    p.add_argument("input")
    p.add_argument("--factor", type=int)
    p.add_argument("--config")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("solve", help="ADMM super-resolution")
    p.add_argument("input")
    _add_degradation_flags(p)
    g = p.add_argument_group("solver")
    g.add_argument("--lambda1", type=float, help="TV weight (default 1e-3)")
    g.add_argument("--lambda2", type=float, help="low-rank weight (default 1e-2)")
    g.add_argument("--rho", type=float, help="initial penalty (default 1.0)")
    g.add_argument("--rho-growth", dest="rho_growth", type=float, help="per-iteration rho multiplier (default 1.05)")
    g.add_argument("--alpha", type=_floats, help="mode weights a1,a2,a3 summing to 1")
    g.add_argument("--penalty", choices=["nuclear", "mcp"])
    g.add_argument("--mcp-lambda", dest="mcp_lambda", type=float, help="MCP lambda (default 1)")
    g.add_argument("--mcp-a", dest="mcp_a", type=float, help="MCP concavity a > 1 (default 2)")
    g.add_argument("--epsilon", type=float, help="TV smoothing (default 1e-3)")
    g.add_argument("--max-outer", dest="max_outer", type=int)
    g.add_argument("--max-inner", dest="max_inner", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--init", choices=["bicubic", "zero-upsample"])
    p.add_argument("--reference", help="ground truth; adds metrics to the manifest")
    p.add_argument("--trace", help="trace path (default <output>.trace)")
    p.add_argument("--manifest", help="manifest path (default <output>.manifest.json)")
    p.add_argument("--config")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("metrics", help="PSNR, SAM and ERGAS of an estimate")
    p.add_argument("reference")
    p.add_argument("estimate")
    p.add_argument("--ratio", type=int, default=2, help="resolution ratio for ERGAS (default 2)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-band", help="write one band as an 8-bit PGM")
    p.add_argument("input")
    p.add_argument("--band", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export_band)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"hssr {args.command}: error: {e}", file=sys.stderr)
    except (FormatError, ShapeError, ValueError, IndexError, OSError) as e:
        print(f"hssr {args.command}: error: {e}", file=sys.stderr)
    return EXIT_ERROR


__all__ = ["main", "build_parser", "RunManifest", "resolve", "solver_config", "degradation_config"]
