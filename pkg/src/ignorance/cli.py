"""Command-line front end.

Subcommands write plot-ready CSV (plus JSON/PGM where noted) into ``--out``:

  sweep-dim   both sides of the bound for each dimension
  sweep-bias  quantum vs classical parts probability against pointer bias
  noise       contamination error and fidelity against dimension
  counts      full Monte Carlo counting experiment with standard errors
  render      intensity/phase images of every encoding at one dimension

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import configparser
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .counting import DetectorConfig, run_experiment
from .game import (
    QUANTUM,
    ClassicalStrategy,
    classical_parts_probability,
    evaluate_game,
    min_entropy,
    quantum_parts_probability_biased,
    vw_rhs_probability,
    whole_entropy_theoretical,
)
from .modes import Grid, default_basis, render_images, synthesize_state_field, write_pgm
from .photonics import SourceParams, noisy_game_curve
from .qudit import DitString, encode_state

log = logging.getLogger("ignorance")

EXIT_USAGE = 2
EXIT_IO = 3


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    d_min: int = 2
    d_max: int = 14
    q_grid: list = field(default_factory=lambda: [round(0.1 * i, 10) for i in range(11)])
    m: int = 0
    noise: Optional[SourceParams] = None
    detector: Optional[DetectorConfig] = None
    output_dir: Path = Path(".")
    seed: int = 0
    strategy: str = QUANTUM
    workers: int = 1

    def validate(self) -> "SweepConfig":
        if self.d_min < 2:
            raise ConfigError(f"d-min must be >= 2, got {self.d_min}")
        if self.d_min > self.d_max:
            raise ConfigError(f"empty dimension range {self.d_min}..{self.d_max}")
        if any(not 0.0 <= q <= 1.0 for q in self.q_grid) or not self.q_grid:
            raise ConfigError("q-grid values must lie in [0, 1]")
        if self.m < 0:
            raise ConfigError("leakage m must be >= 0")
        return self

    @property
    def dims(self) -> list[int]:
        return list(range(self.d_min, self.d_max + 1))


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, header: dict, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO(newline="")
    buf.write(f"# ignorance {__version__}\n")
    for k, v in header.items():
        buf.write(f"# {k}: {v}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def parallel_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def derived_seed(seed: int, *keys: int) -> int:
    """Independent per-point stream from the master seed."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def config_header(cfg: SweepConfig, **extra) -> dict:
    header = {
        "d_min": cfg.d_min,
        "d_max": cfg.d_max,
        "m": cfg.m,
        "seed": cfg.seed,
        "strategy": cfg.strategy,
        "q_grid": " ".join(fmt(q) for q in cfg.q_grid),
    }
    if cfg.noise is not None:
        header["noise"] = json.dumps(asdict(cfg.noise), sort_keys=True)
    if cfg.detector is not None:
        header["detector"] = json.dumps(asdict(cfg.detector), sort_keys=True)
    header.update(extra)
    return header


def parse_strategy(name: str):
    name = name.lower().replace("-", "_")
    if name == QUANTUM:
        return QUANTUM
    try:
        return ClassicalStrategy[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown strategy {name!r}; use quantum, store_y0 or store_y1") from None


def cmd_sweep_dimension(cfg: SweepConfig) -> Path:
    cfg.validate()
    strategy = parse_strategy(cfg.strategy)
    simulate = cfg.detector is not None

    def point(d):
        if simulate:
            det = DetectorConfig(**{**asdict(cfg.detector), "seed": derived_seed(cfg.seed, d)})
            rep = run_experiment(d, 0.5, strategy, det, m=cfg.m)
        else:
            rep = evaluate_game(d, 0.5, cfg.m, strategy)
        row = [d, rep.p_parts, rep.h_parts, whole_entropy_theoretical(d), rep.h_whole, rep.rhs_bits, rep.violated]
        if simulate:
            row += [rep.stderr_parts, rep.stderr_h_parts, rep.stderr_whole, rep.margin_sigma]
        return row

    rows = sorted(parallel_map(point, cfg.dims, cfg.workers), key=lambda r: r[0])
    columns = ["d", "p_parts", "h_parts", "h_whole_theoretical", "h_whole_basis_estimator", "rhs_bits", "violated"]
    if simulate:
        columns += ["stderr_parts", "stderr_h_parts", "stderr_whole", "margin_sigma"]
    path = cfg.output_dir / "sweep_dim.csv"
    write_csv(path, config_header(cfg, mode="monte-carlo" if simulate else "analytic", q=0.5), columns, rows)
    return path


def cmd_sweep_bias(cfg: SweepConfig, d: int = 13) -> Path:
    cfg.validate()
    if d < 2:
        raise ConfigError(f"d must be >= 2, got {d}")
    bound = vw_rhs_probability(d, cfg.m)

    def point(q):
        p_q = quantum_parts_probability_biased(d, q)
        return [
            q,
            p_q,
            classical_parts_probability(d, ClassicalStrategy.STORE_Y0, q),
            classical_parts_probability(d, ClassicalStrategy.STORE_Y1, q),
            bound,
            evaluate_game(d, q, cfg.m, QUANTUM).violated,
        ]

    rows = sorted(parallel_map(point, sorted(set(cfg.q_grid)), cfg.workers), key=lambda r: r[0])
    columns = ["q", "p_quantum", "p_classical_storeY0", "p_classical_storeY1", "p_bound", "violated_quantum"]
    path = cfg.output_dir / "sweep_bias.csv"
    write_csv(path, config_header(cfg, d=d), columns, rows)
    return path


def cmd_noise_curve(cfg: SweepConfig) -> Path:
    cfg.validate()
    src = cfg.noise or SourceParams()

    def point(d):
        r = noisy_game_curve([d], src.mean_photon_number, src.efficiency)[0]
        return [r.d, r.delta_percent, r.fidelity, r.p_single, r.p_guess_ideal, r.p_guess_noisy]

    rows = sorted(parallel_map(point, cfg.dims, cfg.workers), key=lambda r: r[0])
    columns = ["d", "delta_percent", "fidelity", "p_single", "p_guess_ideal", "p_guess_noisy"]
    path = cfg.output_dir / "noise_curve.csv"
    write_csv(path, config_header(cfg, noise=json.dumps(asdict(src), sort_keys=True)), columns, rows)
    return path


def cmd_counting_experiment(cfg: SweepConfig) -> tuple[Path, Path]:
    cfg.validate()
    if cfg.detector is None:
        raise ConfigError("counting experiment needs a detector configuration")
    strategy = parse_strategy(cfg.strategy)
    keys = [(d, q) for d in cfg.dims for q in sorted(set(cfg.q_grid))]

    def point(key):
        d, q = key
        qi = int(round(q * 1e6))
        det = DetectorConfig(**{**asdict(cfg.detector), "seed": derived_seed(cfg.seed, d, qi)})
        return run_experiment(d, q, strategy, det, m=cfg.m)

    reports = sorted(parallel_map(point, keys, cfg.workers), key=lambda r: (r.d, r.q))
    columns = ["d", "q", "strategy", "p_parts", "stderr_parts", "h_parts", "stderr_h_parts",
               "p_whole", "stderr_whole", "h_whole", "rhs_bits", "margin_sigma", "violated"]
    rows = [[r.d, r.q, r.strategy, r.p_parts, r.stderr_parts, r.h_parts, r.stderr_h_parts,
             r.p_whole, r.stderr_whole, r.h_whole, r.rhs_bits, r.margin_sigma, r.violated] for r in reports]
    csv_path = cfg.output_dir / "counts.csv"
    write_csv(csv_path, config_header(cfg), columns, rows)

    def as_json(r):
        out = asdict(r)
        out["stderr_h_parts"] = r.stderr_h_parts
        out["margin_sigma"] = r.margin_sigma
        return {k: (float(v) if isinstance(v, np.floating) else v) for k, v in out.items()}

    json_path = cfg.output_dir / "counts.json"
    payload = {"version": __version__, "config": config_header(cfg), "reports": [as_json(r) for r in reports]}
    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def image_stem(d: int, y: DitString) -> str:
    # two-digit dits above d=10 keep names unambiguous
    width = 1 if d <= 10 else 2
    return f"mode_d{d}_y{y.y0:0{width}d}{y.y1:0{width}d}"


def cmd_render_modes(d: int, output_dir: Path, grid: Grid = Grid(), workers: int = 1) -> Path:
    if d < 2:
        raise ConfigError(f"d must be >= 2, got {d}")
    basis = default_basis(d)
    output_dir.mkdir(parents=True, exist_ok=True)

    def render(y: DitString):
        f = synthesize_state_field(encode_state(y), basis, grid)
        intensity, phase = render_images(f)
        stem = image_stem(d, y)
        write_pgm(output_dir / f"{stem}_intensity.pgm", intensity, 0.0, 1.0)
        write_pgm(output_dir / f"{stem}_phase.pgm", phase, -np.pi, np.pi)
        # CSVs keep the raw |u|^2 so that sum * pixel_area is the field norm
        np.savetxt(output_dir / f"{stem}_intensity.csv", np.abs(f.values) ** 2, fmt="%.12g", delimiter=",")
        np.savetxt(output_dir / f"{stem}_phase.csv", phase, fmt="%.12g", delimiter=",")
        return stem

    stems = parallel_map(render, list(DitString.all(d)), workers)
    manifest = {
        "version": __version__,
        "d": d,
        "grid_size": grid.size,
        "extent_w0": grid.extent,
        "pixel_area_w0sq": grid.pixel_area,
        "basis_convention": "first d LG modes by |l|+2p, then ascending l (not taken from the experiment)",
        "basis": [{"rail": j, "l": m.l, "p": m.p} for j, m in enumerate(basis)],
        "images": sorted(stems),
    }
    path = output_dir / f"manifest_d{d}.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def parse_q_grid(text: str) -> list[float]:
    """``"0,0.5,1"`` or ``"start:stop:step"`` (inclusive)."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step <= 0:
                raise ConfigError("q-grid step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(n)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad q-grid {text!r}: {exc}") from None


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; keys use the long flag names with - or _."""
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[config]\n" + fh.read())
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in parser["config"].items()}


# (type, default) for every option that may come from a flag or the config file
OPTIONS = {
    "d_min": (int, 2),
    "d_max": (int, 14),
    "d": (int, None),
    "q_grid": (parse_q_grid, None),
    "m": (int, 0),
    "alpha_sq": (float, 0.01),
    "eta": (float, 0.6),
    "rate": (float, 1e6),
    "dark": (float, 150.0),
    "time": (float, 1.0),
    "seed": (int, 0),
    "out": (Path, Path(".")),
    "strategy": (str, QUANTUM),
    "workers": (int, 1),
    "grid": (int, 512),
    "extent": (float, 6.0),
    "simulate": (lambda s: str(s).lower() in ("1", "true", "yes", "on"), False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ignorance", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--seed", help="master RNG seed")
        p.add_argument("--workers", help="worker threads for sweep points")
        p.add_argument("-v", "--verbose", action="store_true")

    def drange(p):
        p.add_argument("--d-min")
        p.add_argument("--d-max")
        p.add_argument("--d", help="single dimension (sets d-min = d-max)")
        p.add_argument("--m", help="leakage bits (default 0)")

    def detector(p):
        p.add_argument("--rate", help="signal counts/s at unit overlap (default 1e6)")
        p.add_argument("--dark", help="dark counts/s (default 150)")
        p.add_argument("--time", help="integration time per setting in s (default 1)")

    p = sub.add_parser("sweep-dim", help="min-entropies against dimension")
    common(p), drange(p), detector(p)
    p.add_argument("--strategy", help="quantum | store_y0 | store_y1")
    p.add_argument("--simulate", action="store_const", const="true", help="use the counting simulation")

    p = sub.add_parser("sweep-bias", help="guessing probabilities against pointer bias")
    common(p)
    p.add_argument("--d", help="dimension (default 13)")
    p.add_argument("--m")
    p.add_argument("--q-grid", help="comma list or start:stop:step (default 0:1:0.1)")

    p = sub.add_parser("noise", help="multi-photon contamination curve")
    common(p), drange(p)
    p.add_argument("--alpha-sq", help="mean photon number (default 0.01)")
    p.add_argument("--eta", help="detection efficiency (default 0.6)")

    p = sub.add_parser("counts", help="Monte Carlo counting experiment")
    common(p), drange(p), detector(p)
    p.add_argument("--q-grid", help="pointer biases (default 0.5)")
    p.add_argument("--strategy", help="quantum | store_y0 | store_y1")

    p = sub.add_parser("render", help="intensity/phase images for all encodings")
    common(p)
    p.add_argument("--d", help="dimension (default 3)")
    p.add_argument("--grid", help="pixels per side (default 512)")
    p.add_argument("--extent", help="half-width in waists (default 6)")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    merged = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for k, v in vars(args).items():
        if k in OPTIONS and v is not None:
            merged[k] = v
    out = {}
    for key, (conv, default) in OPTIONS.items():
        if key in merged:
            try:
                out[key] = conv(merged[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {merged[key]!r} ({exc})") from None
        else:
            out[key] = default
    unknown = set(merged) - set(OPTIONS) - {"config", "command", "verbose"}
    if unknown:
        raise ConfigError(f"unknown option(s): {', '.join(sorted(unknown))}")
    return out


def make_sweep_config(opts: dict, command: str) -> SweepConfig:
    d_min, d_max = opts["d_min"], opts["d_max"]
    if opts["d"] is not None:
        d_min = d_max = opts["d"]
    q_grid = opts["q_grid"]
    if q_grid is None:
        q_grid = [0.5] if command == "counts" else SweepConfig().q_grid
    try:
        noise = SourceParams(opts["alpha_sq"], opts["eta"])
        det = DetectorConfig(opts["rate"], opts["dark"], opts["time"], opts["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    simulate = command == "counts" or (command == "sweep-dim" and opts["simulate"])
    return SweepConfig(
        d_min=d_min,
        d_max=d_max,
        q_grid=q_grid,
        m=opts["m"],
        noise=noise if command == "noise" else None,
        detector=det if simulate else None,
        output_dir=opts["out"],
        seed=opts["seed"],
        strategy=opts["strategy"],
        workers=max(1, opts["workers"]),
    ).validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        opts = resolve(args)
        if args.command == "render":
            d = opts["d"] if opts["d"] is not None else 3
            try:
                grid = Grid(opts["grid"], opts["extent"])
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            paths = [cmd_render_modes(d, opts["out"], grid, max(1, opts["workers"]))]
        else:
            if args.command == "sweep-bias" and opts["d"] is None:
                opts["d"] = 13
            cfg = make_sweep_config(opts, args.command)
            if args.command == "sweep-dim":
                paths = [cmd_sweep_dimension(cfg)]
            elif args.command == "sweep-bias":
                paths = [cmd_sweep_bias(cfg, opts["d"])]
            elif args.command == "noise":
                paths = [cmd_noise_curve(cfg)]
            else:
                paths = list(cmd_counting_experiment(cfg))
    except ConfigError as exc:
        print(f"ignorance: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ignorance: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        log.info("wrote %s", p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
