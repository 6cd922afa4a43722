"""Command-line entry point: ``gapfuse fuse|eval|synth|reproduce``."""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

from . import __version__
from .compose import METHODS, run_method
from .fusion import FusionConfig
from .grid import GridError, RainGrid, check_same_dims
from .gridio import SUFFIX, FormatError, atomic_write_text, read_grid, write_grid
from .pyramid import PyramidError
from .synth import EnsembleParams, ParameterError, SceneParams, iter_ensemble

log = logging.getLogger("gapfuse")

MANIFEST = "manifest.json"


class CliError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: List[str] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)
    timestamp: str = ""
    extra: dict = field(default_factory=dict)

    def write(self, outdir: Path) -> None:
        if not self.timestamp:
            self.timestamp = _timestamp()
        text = json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"
        atomic_write_text(Path(outdir) / MANIFEST, text, encoding="utf-8")


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp for reproducible manifests
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
        if epoch
        else _dt.datetime.now(_dt.timezone.utc)
    )
    return when.replace(microsecond=0).isoformat()


def _load(path) -> RainGrid:
    try:
        return read_grid(path)
    except (OSError, FormatError, UnicodeDecodeError) as exc:
        raise CliError(f"{path}: cannot read grid: {exc}") from exc


def _grid_files(directory: Path) -> List[Path]:
    return sorted(p for p in directory.iterdir() if p.suffix == SUFFIX and p.is_file())


def _fusion_config(args) -> FusionConfig:
    try:
        return FusionConfig(
            levels=args.levels,
            orientations=args.orientations,
            inner_depth=args.inner_depth,
            missing_fill=args.fill,
            rain_threshold=args.threshold,
        )
    except (ValueError, PyramidError) as exc:
        raise CliError(str(exc)) from exc


# ---------------------------------------------------------------------------
# fuse


def _fuse_one(path_a: Path, path_b: Path, out: Path, method: str, cfg: FusionConfig) -> None:
    a, b = _load(path_a), _load(path_b)
    try:
        check_same_dims(a, b)
    except GridError as exc:
        raise CliError(f"{path_a} vs {path_b}: {exc}") from exc
    try:
        cfg.validate_for(a.meta.width, a.meta.height)
        fused = run_method(method, a, b, cfg)
    except PyramidError as exc:
        raise CliError(f"{path_a}: {exc}") from exc
    write_grid(out, fused)


def cmd_fuse(args) -> int:
    cfg = _fusion_config(args)
    a, b, out = Path(args.input_a), Path(args.input_b), Path(args.output)
    if a.is_dir() != b.is_dir():
        raise CliError("inputs must both be files or both be directories")
    if not a.is_dir():
        _fuse_one(a, b, out, args.method, cfg)
        log.info("wrote %s", out)
        return 0

    names = [p.name for p in _grid_files(a)]
    missing = [n for n in names if not (b / n).is_file()]
    if missing:
        raise CliError(f"{b}: no counterpart for {', '.join(missing)}")
    out.mkdir(parents=True, exist_ok=True)
    for n in names:
        _fuse_one(a / n, b / n, out / n, args.method, cfg)
    RunManifest(
        "fuse",
        {"method": args.method, **asdict(cfg)},
        inputs=[str(a), str(b)],
        outputs=names,
    ).write(out)
    log.info("fused %d pairs into %s", len(names), out)
    return 0


# ---------------------------------------------------------------------------
# eval


def _product_names(paths: List[Path]) -> List[str]:
    names, seen = [], {}
    for p in paths:
        base = p.stem if p.is_file() else p.name
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}_{seen[base]}")
    return names


def cmd_eval(args) -> int:
    from .report import Evaluation, write_reports

    truth_path = Path(args.truth)
    preds = [Path(p) for p in args.pred]
    products = _product_names(preds)
    if "truth" in products:
        raise CliError("a prediction may not be named 'truth'")
    ev = Evaluation(products)

    if truth_path.is_dir():
        if not all(p.is_dir() for p in preds):
            raise CliError("with a truth directory every prediction must be a directory")
        images = [(f.stem, f, [p / f.name for p in preds]) for f in _grid_files(truth_path)]
    else:
        images = [(truth_path.stem, truth_path, preds)]
    for name, tpath, ppaths in images:
        truth = _load(tpath)
        grids = {}
        for prod, pp in zip(products, ppaths):
            g = _load(pp)
            try:
                check_same_dims(truth, g)
            except GridError as exc:
                raise CliError(f"{pp}: {exc}") from exc
            grids[prod] = g
        ev.add_image(name, truth, grids, args.threshold)

    out = Path(args.output_dir)
    summary = write_reports(out, ev, args.alpha, args.bin_width, args.ks_mode, plots=not args.no_plots)
    for r in summary["ks"]:
        if r.status != "ok":
            print(f"notice: KS skipped for {r.scope}/{r.product}: empty common-valid mask")
    RunManifest(
        "eval",
        {"alpha": args.alpha, "threshold": args.threshold, "bin_width": args.bin_width,
         "ks_mode": args.ks_mode},
        inputs=[str(truth_path), *map(str, preds)],
        outputs=summary["files"],
    ).write(out)
    return 0


# ---------------------------------------------------------------------------
# synth


def _ensemble_params(args) -> EnsembleParams:
    try:
        scene = SceneParams(
            seed=0,
            width=args.width,
            height=args.height,
            cell_count=args.cell_count,
            cell_scale=args.cell_scale,
            intensity_scale=args.intensity_scale,
            wet_fraction_target=args.wet_fraction,
        )
        return EnsembleParams(
            scene=scene,
            coverage_range=(args.coverage_min, args.coverage_max),
            noise_sigma=args.noise_sigma,
            detection_floor=args.detection_floor,
            false_alarm_rate=args.false_alarm_rate,
        )
    except ParameterError as exc:
        raise CliError(str(exc)) from exc


def cmd_synth(args) -> int:
    params = _ensemble_params(args)
    if args.pairs < 0:
        raise CliError("--pairs must be >= 0")
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    accepted, rejected, outputs = [], [], []
    try:
        for i, pair in iter_ensemble(args.pairs, args.seed, params):
            if pair is None:
                rejected.append(i)
                continue
            accepted.append(i)
            name = f"pair_{i:04d}{SUFFIX}"
            for kind, grid in (("truth", pair.truth), ("a", pair.a), ("b", pair.b)):
                write_grid(out / kind / name, grid)
                outputs.append(f"{kind}/{name}")
    except ParameterError as exc:
        raise CliError(str(exc)) from exc
    RunManifest(
        "synth",
        params.as_dict(),
        outputs=outputs,
        seeds=[args.seed],
        extra={"pairs_requested": args.pairs, "accepted": len(accepted), "rejected": rejected},
    ).write(out)
    log.info("synth: %d of %d pairs accepted", len(accepted), args.pairs)
    return 0


# ---------------------------------------------------------------------------
# reproduce


def cmd_reproduce(args) -> int:
    from .experiment import qualitative_checks, run_ensemble
    from .report import _tsv, write_reports

    cfg = _fusion_config(args)
    params = _ensemble_params(args)
    out = Path(args.output_dir)
    run = run_ensemble(args.pairs, args.seed, params, cfg)
    summary = write_reports(out, run.evaluation, args.alpha, args.bin_width, "pooled", plots=not args.no_plots)
    checks = qualitative_checks(run, args.alpha)
    atomic_write_text(
        out / "checks.tsv",
        _tsv(
            ["check", "lhs", "relation", "rhs", "pass", "kind"],
            ([c.name, c.lhs, c.relation, c.rhs, c.passed, "asserted" if c.asserted else "recorded"]
             for c in checks),
        ),
    )
    files = summary["files"] + ["checks.tsv"]
    if not args.no_plots and run.first_pair is not None:
        from .plotting import plot_sample

        i, pair, prods = run.first_pair
        grids = {"truth": pair.truth, **prods}
        files.append(plot_sample(out / "sample_pair.png", grids, f"pair_{i:04d}"))
    RunManifest(
        "reproduce",
        {"fusion": asdict(cfg), "ensemble": params.as_dict(), "alpha": args.alpha,
         "bin_width": args.bin_width},
        outputs=files,
        seeds=[args.seed],
        extra={"pairs_requested": args.pairs, "accepted": len(run.accepted), "rejected": run.rejected},
    ).write(out)
    for c in checks:
        tag = "PASS" if c.passed else "FAIL"
        note = "" if c.asserted else " (recorded)"
        print(f"{tag}  {c.name}: {c.lhs:.4f} {c.relation} {c.rhs:.4f}{note}")
    return 0


# ---------------------------------------------------------------------------


def _add_fusion_flags(p):
    p.add_argument("--levels", type=int, default=4, help="steerable pyramid levels (default 4)")
    p.add_argument("--orientations", type=int, default=16, help="orientations per level (default 16)")
    p.add_argument("--inner-depth", type=int, default=2, help="Laplacian depth inside each subband (default 2)")
    p.add_argument("--threshold", type=float, default=0.0, help="rain/no-rain threshold in mm/hr (default 0)")
    p.add_argument("--fill", choices=("cross", "zero"), default="cross",
                   help="how missing pixels enter the transform (default cross)")


def _add_synth_flags(p):
    d = EnsembleParams()
    s = d.scene
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=200)
    p.add_argument("--width", type=int, default=s.width)
    p.add_argument("--height", type=int, default=s.height)
    p.add_argument("--cell-count", type=float, default=s.cell_count)
    p.add_argument("--cell-scale", type=float, default=s.cell_scale)
    p.add_argument("--intensity-scale", type=float, default=s.intensity_scale)
    p.add_argument("--wet-fraction", type=float, default=s.wet_fraction_target)
    p.add_argument("--coverage-min", type=float, default=d.coverage_range[0])
    p.add_argument("--coverage-max", type=float, default=d.coverage_range[1])
    p.add_argument("--noise-sigma", type=float, default=d.noise_sigma)
    p.add_argument("--detection-floor", type=float, default=d.detection_floor)
    p.add_argument("--false-alarm-rate", type=float, default=d.false_alarm_rate)


def _add_report_flags(p):
    p.add_argument("--alpha", type=float, default=0.05, help="KS significance level (default 0.05)")
    p.add_argument("--bin-width", type=float, default=0.5, help="PDF bin width in mm/hr (default 0.5)")
    p.add_argument("--no-plots", action="store_true", help="skip PNG figures")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gapfuse", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="merge two rain grids (files or directories of files)")
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("output")
    p.add_argument("--method", choices=METHODS, default="fused")
    _add_fusion_flags(p)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="score predictions against a truth grid (or directory)")
    p.add_argument("truth")
    p.add_argument("pred", nargs="+")
    p.add_argument("-o", "--output-dir", required=True)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--ks-mode", choices=("pooled", "per-image"), default="pooled")
    _add_report_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="write synthetic truth/a/b triplets")
    p.add_argument("output_dir")
    _add_synth_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("reproduce", help="run the synthetic method comparison")
    p.add_argument("output_dir")
    _add_synth_flags(p)
    _add_fusion_flags(p)
    _add_report_flags(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CliError, GridError, PyramidError, ParameterError) as exc:
        print(f"gapfuse {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
