"""Command line front end.

Commands: ``lut build``, ``generate``, ``reconstruct``, ``metrics`` and
``pipeline``. Settings come from an optional JSON ``--config`` file and
are overridden by flags. Exit status is 0 on success, 1 on validation
errors and 2 on I/O errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import __version__
from .errors import CorruptFileError
from .field import DEFAULT_PITCH, DEFAULT_SIZE, DEFAULT_WAVELENGTH, DEFAULT_Z, OpCounter, SceneParams
from .io import load_hologram, load_image, load_saliency, save_hologram, save_magnitude_png
from .lut import BLOCK_SIZES, load_or_build_luts, lut_cache_path
from .metrics import build_report
from .propagation import reconstruct
from .synthesis import (
    ENGINES,
    STAGES,
    ProgressiveResult,
    RefinementPlan,
    apply_random_phase,
    synthesize_pointwise_oracle,
    synthesize_progressive,
)

logger = logging.getLogger("wavecgh")

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2

MANIFEST = "manifest.json"
REPORT_JSON = "report.json"
REPORT_TABLE = "report.txt"
ORACLE_FILE = "holo_oracle.cgh"


class ValidationError(ValueError):
    pass


@dataclass
class PipelineConfig:
    wavelength: float = DEFAULT_WAVELENGTH
    pitch: float = DEFAULT_PITCH
    z: float = DEFAULT_Z
    size: int | None = None
    t_ll: float = 0.5
    t_l: float = 0.7
    t_full: float = 0.9
    object: str | None = None
    saliency: str | None = None
    uniform_saliency: bool = False
    out: str | None = None
    lut_cache: str | None = None
    intensity_recon: bool = False
    random_phase_seed: int | None = None
    engine: str = "fft"
    jobs: int | None = None

    def validate(self) -> "PipelineConfig":
        for name in ("wavelength", "pitch", "z"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                raise ValidationError(f"{name}: must be a positive number, got {value!r}")
        if self.size is not None:
            if isinstance(self.size, bool) or not isinstance(self.size, int) or self.size < 8 \
                    or self.size & (self.size - 1):
                raise ValidationError(f"size: must be a power of two >= 8, got {self.size!r}")
        for name in ("t_ll", "t_l", "t_full"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{name}: must be a number, got {value!r}")
        try:
            self.plan()
        except ValueError as exc:
            raise ValidationError(f"t_ll/t_l/t_full: {exc}") from exc
        if self.engine not in ENGINES:
            raise ValidationError(f"engine: must be one of {ENGINES}, got {self.engine!r}")
        if self.jobs is not None and (not isinstance(self.jobs, int) or self.jobs < 1):
            raise ValidationError(f"jobs: must be a positive integer, got {self.jobs!r}")
        if self.random_phase_seed is not None and (
            not isinstance(self.random_phase_seed, int) or not 0 <= self.random_phase_seed < 2**64
        ):
            raise ValidationError(f"random_phase_seed: must be an unsigned 64-bit integer, got {self.random_phase_seed!r}")
        return self

    def plan(self) -> RefinementPlan:
        return RefinementPlan(self.t_ll, self.t_l, self.t_full)

    def scene(self, size: int | None = None) -> SceneParams:
        return SceneParams(self.wavelength, self.pitch, self.z, size or self.size or DEFAULT_SIZE)


_CONFIG_KEYS = {f.name for f in fields(PipelineConfig)}


def _read_config_file(path) -> dict:
    text = Path(path).read_text()
    if not text.strip():
        raise ValidationError(f"config: {path} is empty (usage: --config FILE with a JSON object)")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config: {path} is not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"config: {path} must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"config: unknown keys {sorted(unknown)}")
    return data


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    for key in _CONFIG_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    if not values.get("lut_cache") and os.environ.get("WAVECGH_LUT_CACHE"):
        values["lut_cache"] = os.environ["WAVECGH_LUT_CACHE"]
    return PipelineConfig(**values).validate()


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_text(path, text):
    Path(path).write_text(text)


def _load_object(cfg: PipelineConfig):
    if not cfg.object:
        raise ValidationError("object: no object image given (--object)")
    path = Path(cfg.object)
    if not path.exists():
        raise ValidationError(f"object: file not found: {path}")
    try:
        image = load_image(path)
    except ValueError as exc:
        raise ValidationError(f"object: {exc}") from exc
    n = image.shape[0]
    if image.shape[0] != image.shape[1] or n < 8 or n & (n - 1):
        raise ValidationError(f"object: image must be square with power-of-two side >= 8, got {image.shape}")
    if cfg.size is not None and cfg.size != n:
        raise ValidationError(f"size: {cfg.size} does not match object side {n}")
    return image


def _object_field(cfg: PipelineConfig, image):
    if cfg.random_phase_seed is not None:
        return apply_random_phase(image, cfg.random_phase_seed)
    return image


def _load_saliency(cfg: PipelineConfig, n: int):
    if cfg.saliency:
        path = Path(cfg.saliency)
        if not path.exists():
            raise ValidationError(f"saliency: file not found: {path}")
        try:
            sal = load_saliency(path)
        except ValueError as exc:
            raise ValidationError(f"saliency: {exc}") from exc
        if sal.shape != (n, n):
            raise ValidationError(f"saliency: shape {sal.shape} does not match object {(n, n)}")
        return sal
    if cfg.uniform_saliency:
        return None
    raise ValidationError("saliency: no saliency map given; pass --saliency PATH or --uniform-saliency")


def _stage_file(stage: str) -> str:
    return f"holo_{stage}.cgh"


# -- commands ---------------------------------------------------------------


def cmd_lut_build(cfg: PipelineConfig) -> int:
    if not cfg.lut_cache:
        raise ValidationError("lut_cache: no cache directory (--lut-cache or WAVECGH_LUT_CACHE)")
    scene = cfg.scene()
    load_or_build_luts(scene, cfg.lut_cache)
    for b in BLOCK_SIZES:
        logger.info("LUT B=%d: %s", b, lut_cache_path(cfg.lut_cache, b, scene.plane_size))
    return EXIT_OK


def cmd_generate(cfg: PipelineConfig) -> int:
    if not cfg.out:
        raise ValidationError("out: no output directory (--out)")
    image = _load_object(cfg)
    n = image.shape[0]
    saliency = _load_saliency(cfg, n)
    scene = cfg.scene(n)
    plan = cfg.plan()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    luts = load_or_build_luts(scene, cfg.lut_cache)
    result = synthesize_progressive(_object_field(cfg, image), saliency, scene, plan, luts,
                                    cfg.engine, cfg.jobs)
    for stage in STAGES:
        save_hologram(result.holograms[stage], scene, out / _stage_file(stage))
    stale_oracle = out / ORACLE_FILE
    if stale_oracle.exists():
        stale_oracle.unlink()

    effective = asdict(cfg)
    effective["size"] = n
    effective["object"] = str(Path(cfg.object).resolve())
    if cfg.saliency:
        effective["saliency"] = str(Path(cfg.saliency).resolve())
    # output location and worker count do not affect the numbers
    effective.pop("out")
    effective.pop("jobs")
    manifest = {
        "wavecgh_version": __version__,
        "config": effective,
        "scene": scene.to_dict(),
        "inputs": {
            "object_sha256": _sha256(cfg.object),
            "saliency_sha256": _sha256(cfg.saliency) if cfg.saliency else None,
        },
        "ops": result.ops.per_level,
        "ops_cumulative": result.cumulative_ops(),
        "applied_cells": {k: int(m.sum()) for k, m in result.gated_masks.items()},
        "holograms": {stage: _stage_file(stage) for stage in STAGES},
    }
    _write_text(out / MANIFEST, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    for stage, total in result.cumulative_ops().items():
        logger.info("%-10s cumulative ops %d", stage, total)
    return EXIT_OK


def cmd_reconstruct(hologram_path, out_png, intensity: bool = False, normalize: bool = True) -> int:
    field, scene = load_hologram(hologram_path)
    recon = reconstruct(field, scene, intensity=intensity)
    save_magnitude_png(recon, out_png, normalize=normalize)
    logger.info("wrote %s", out_png)
    return EXIT_OK


def _read_manifest(run_dir: Path) -> dict:
    path = run_dir / MANIFEST
    if not path.exists():
        raise ValidationError(f"run_dir: no {MANIFEST} in {run_dir}")
    return json.loads(path.read_text())


def _oracle_hologram(run_dir: Path, manifest: dict, scene: SceneParams):
    path = run_dir / ORACLE_FILE
    if path.exists():
        field, stored = load_hologram(path)
        if stored == scene:
            return field
        logger.info("oracle hologram scene mismatch, recomputing")
    cfg = PipelineConfig(**manifest["config"])
    obj_path = cfg.object
    if not Path(obj_path).exists():
        raise ValidationError(f"object: {obj_path} referenced by the manifest is missing")
    if _sha256(obj_path) != manifest["inputs"]["object_sha256"]:
        raise ValidationError(f"object: {obj_path} changed since the run was generated")
    image = load_image(obj_path)
    luts = load_or_build_luts(scene, cfg.lut_cache, block_sizes=(1,))
    counter = OpCounter()
    oracle = synthesize_pointwise_oracle(_object_field(cfg, image), scene, counter, luts[1],
                                         cfg.engine, cfg.jobs)
    save_hologram(oracle, scene, path)
    logger.info("point-wise oracle: %d ops, cached in %s", counter["pointwise_oracle"], path)
    # Always score the stored single-precision copy so reruns match.
    return load_hologram(path)[0]


def cmd_metrics(run_dir, intensity: bool | None = None) -> int:
    run_dir = Path(run_dir)
    manifest = _read_manifest(run_dir)
    scene = SceneParams(**manifest["scene"])
    if intensity is None:
        intensity = bool(manifest["config"].get("intensity_recon", False))
    holograms = {}
    for stage in STAGES:
        field, stored = load_hologram(run_dir / manifest["holograms"][stage])
        if stored != scene:
            raise ValidationError(f"scene: {stage} hologram was written for {stored}, manifest says {scene}")
        holograms[stage] = field
    result = ProgressiveResult(holograms, OpCounter(manifest["ops"]))
    oracle = _oracle_hologram(run_dir, manifest, scene)
    report = build_report(result, reconstruct(oracle, scene, intensity=intensity), scene, intensity)
    _write_text(run_dir / REPORT_JSON, report.to_json())
    table = report.to_table()
    _write_text(run_dir / REPORT_TABLE, table)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_pipeline(cfg: PipelineConfig) -> int:
    if not cfg.out:
        raise ValidationError("out: no output directory (--out)")
    out = Path(cfg.out)
    if not cfg.lut_cache:
        cfg.lut_cache = str(out / "lut_cache")
    image = _load_object(cfg)
    cfg.size = image.shape[0]
    cmd_lut_build(cfg)
    cmd_generate(cfg)
    cmd_metrics(out, cfg.intensity_recon)
    for stage in STAGES + ("oracle",):
        cmd_reconstruct(out / _stage_file(stage), out / f"recon_{stage}.png", cfg.intensity_recon)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _add_scene_flags(p):
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    p.add_argument("--wavelength", type=float, help="wavelength in meters (default 532e-9)")
    p.add_argument("--pitch", type=float, help="pixel pitch in meters (default 8e-6)")
    p.add_argument("--z", type=float, help="object-hologram distance in meters (default 0.1)")
    p.add_argument("--size", type=int, help="plane size N in pixels")
    p.add_argument("--lut-cache", dest="lut_cache", metavar="DIR",
                   help="LUT cache directory (default $WAVECGH_LUT_CACHE)")


def _add_run_flags(p):
    p.add_argument("--object", metavar="PATH", help="object image (PNG/PGM)")
    sal = p.add_mutually_exclusive_group()
    sal.add_argument("--saliency", metavar="PATH", help="saliency map (grayscale PNG/PGM)")
    sal.add_argument("--uniform-saliency", dest="uniform_saliency", action="store_const", const=True,
                     help="use a uniform saliency of 1.0")
    p.add_argument("--t-ll", dest="t_ll", type=float, help="threshold for LLL -> LL (default 0.5)")
    p.add_argument("--t-l", dest="t_l", type=float, help="threshold for LL -> L (default 0.7)")
    p.add_argument("--t-full", dest="t_full", type=float, help="threshold for L -> object (default 0.9)")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--intensity-recon", dest="intensity_recon", action="store_const", const=True,
                   help="reconstruct squared magnitude instead of magnitude")
    p.add_argument("--random-phase-seed", dest="random_phase_seed", type=int, metavar="U64",
                   help="attach a seeded random phase to the object")
    p.add_argument("--engine", choices=ENGINES, help="block accumulation engine (default fft)")
    p.add_argument("--jobs", type=int, help="worker threads for the direct engine")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavecgh", description="Saliency-gated progressive hologram synthesis.")
    parser.add_argument("--version", action="version", version=f"wavecgh {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    lut = sub.add_parser("lut", help="fringe LUT cache management")
    lut_sub = lut.add_subparsers(dest="lut_command", metavar="ACTION", parser_class=_Parser)
    lut_build = lut_sub.add_parser("build", help="build and cache LUTs for B in 1, 2, 4, 8")
    _add_scene_flags(lut_build)

    gen = sub.add_parser("generate", help="synthesize per-stage holograms and a run manifest")
    _add_scene_flags(gen)
    _add_run_flags(gen)

    rec = sub.add_parser("reconstruct", help="back-propagate a hologram to a PNG")
    rec.add_argument("hologram", metavar="HOLOGRAM", help="hologram file (.cgh)")
    rec.add_argument("--out", metavar="PNG", help="output PNG (default: HOLOGRAM with .png)")
    rec.add_argument("--config", metavar="PATH", help="JSON config (reads intensity_recon)")
    rec.add_argument("--intensity-recon", dest="intensity_recon", action="store_const", const=True)
    rec.add_argument("--no-normalize", dest="normalize", action="store_false",
                     help="clamp magnitudes to [0, 1] instead of stretching to [min, max]")

    met = sub.add_parser("metrics", help="SSIM and operator report for a generate run")
    met.add_argument("run_dir", metavar="RUN_DIR")
    met.add_argument("--intensity-recon", dest="intensity_recon", action="store_const", const=True)

    pipe = sub.add_parser("pipeline", help="lut build, generate, metrics and stage PNGs in one go")
    _add_scene_flags(pipe)
    _add_run_flags(pipe)
    return parser


def _dispatch(args, parser) -> int:
    if args.command == "lut":
        if args.lut_command != "build":
            parser.parse_args(["lut", "--help"])
        return cmd_lut_build(resolve_config(args))
    if args.command == "generate":
        return cmd_generate(resolve_config(args))
    if args.command == "pipeline":
        return cmd_pipeline(resolve_config(args))
    if args.command == "reconstruct":
        intensity = bool(args.intensity_recon)
        if args.config and args.intensity_recon is None:
            intensity = bool(_read_config_file(args.config).get("intensity_recon", False))
        out = args.out or str(Path(args.hologram).with_suffix(".png"))
        return cmd_reconstruct(args.hologram, out, intensity, args.normalize)
    if args.command == "metrics":
        return cmd_metrics(args.run_dir, args.intensity_recon)
    parser.print_help(sys.stderr)
    return EXIT_VALIDATION


def _configure_logging(quiet: bool) -> None:
    # one handler on the package logger, replaced on every call so repeated
    # in-process invocations do not stack handlers
    pkg = logging.getLogger("wavecgh")
    for h in list(pkg.handlers):
        if getattr(h, "_wavecgh_cli", False):
            pkg.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    handler._wavecgh_cli = True
    pkg.addHandler(handler)
    pkg.setLevel(logging.WARNING if quiet else logging.INFO)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.quiet)
    try:
        return _dispatch(args, parser)
    except CorruptFileError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except (ValidationError, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
