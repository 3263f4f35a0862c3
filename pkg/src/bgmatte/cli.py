"""Command-line surface for batch photo/video matting workflows.

Subcommands: synth-dataset, train, matte, composite, evaluate.  A run is
driven by a YAML config (documented in the README) plus flag overrides; all
commands are deterministic given config + seeds.  Exit codes: 0 success,
1 usage/config error, 2 runtime failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import augment, imgio
from .augment import MatteAsset, derive_seed, example_key, make_syn_example
from .evalpost import connected_components, postprocess_alpha, render_composite, sad, mse
from .model import MattingInput, NetConfig, generator_forward, load_generator
from .preprocess import (
    AlignmentError,
    SubjectNotFoundError,
    auto_trimap,
    build_motion_stack,
    crop_around_subject,
    estimate_homography,
    identity_homography,
    refine_segmentation,
    resize_bilinear,
    warp_background,
)
from .train import RealExample, TrainConfig, train_adobe, train_real

log = logging.getLogger("bgmatte")

DEFAULT_GREEN = (0.0, 177.0 / 255.0, 64.0 / 255.0)

EXAMPLE_FILES = (
    "img.png",
    "bg.png",
    "bg_input.png",
    "seg.png",
    "m0.png",
    "m1.png",
    "m2.png",
    "m3.png",
    "fg_gt.png",
    "alpha_gt.png",
)


class ConfigError(ValueError):
    """Bad config file or command usage; maps to exit code 1."""


@dataclass
class PathsConfig:
    assets: str | None = None
    backgrounds: str | None = None
    captures: str | None = None
    novel_backgrounds: str | None = None
    dataset: str | None = None
    checkpoints: str | None = None
    output: str | None = None


@dataclass
class PreprocessConfig:
    align: bool = True
    motion: bool = True
    crop_size: int = 512
    motion_interval: int = 20


@dataclass
class MatteConfig:
    checkpoint: str | None = None
    n_subjects: int | None = None


@dataclass
class RunConfig:
    seed: int = 0
    paths: PathsConfig = None
    net: NetConfig = None
    train: TrainConfig = None
    train_real: TrainConfig = None  # optional per-phase override; falls back to train
    preprocess: PreprocessConfig = None
    matte: MatteConfig = None

    def __post_init__(self):
        self.paths = self.paths or PathsConfig()
        self.net = self.net or NetConfig()
        self.train = self.train or TrainConfig()
        self.preprocess = self.preprocess or PreprocessConfig()
        self.matte = self.matte or MatteConfig()


def _build_section(dc_type, data, where):
    if data is None:
        return dc_type()
    if not isinstance(data, dict):
        raise ConfigError(f"config section {where!r} must be a mapping")
    allowed = {f.name for f in fields(dc_type)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys in {where!r}: {unknown}")
    try:
        return dc_type(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config section {where!r}: {exc}") from exc


def load_run_config(path) -> RunConfig:
    import yaml

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    data = yaml.safe_load(path.read_text()) or {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    allowed = {"seed", "paths", "net", "train", "train_real", "preprocess", "matte"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {unknown}")
    return RunConfig(
        seed=int(data.get("seed", 0)),
        paths=_build_section(PathsConfig, data.get("paths"), "paths"),
        net=_build_section(NetConfig, data.get("net"), "net"),
        train=_build_section(TrainConfig, data.get("train"), "train"),
        train_real=(
            _build_section(TrainConfig, data["train_real"], "train_real")
            if data.get("train_real") is not None
            else None
        ),
        preprocess=_build_section(PreprocessConfig, data.get("preprocess"), "preprocess"),
        matte=_build_section(MatteConfig, data.get("matte"), "matte"),
    )


def _require_dir(value, what) -> Path:
    if value is None:
        raise ConfigError(f"config is missing a path for {what}")
    p = Path(value)
    if not p.is_dir():
        raise ConfigError(f"{what} directory not found: {p}")
    return p


def _require_file(value, what) -> Path:
    if value is None:
        raise ConfigError(f"config is missing a path for {what}")
    p = Path(value)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {p}")
    return p


# ---------------------------------------------------------------------------
# synth-dataset


def _load_assets(assets_dir: Path):
    """Yield (asset_dir, MatteAsset) for readable assets, logging skips."""
    for sub in sorted(p for p in assets_dir.iterdir() if p.is_dir()):
        try:
            fg = imgio.read_image(sub / "fg.png")
            alpha = imgio.read_map(sub / "alpha.png")
            if fg.shape[:2] != alpha.shape:
                raise IOError(f"fg/alpha size mismatch in {sub}")
            if alpha.max() <= 0.0:
                raise IOError(f"alpha is identically zero in {sub}")
        except IOError as exc:
            log.warning("skipping asset %s: %s", sub.name, exc)
            continue
        yield MatteAsset(fg=fg, alpha=alpha, id=sub.name)


def _write_example(example_dir: Path, ex) -> None:
    example_dir.mkdir(parents=True, exist_ok=True)
    imgio.write_image(example_dir / "img.png", ex.img)
    imgio.write_image(example_dir / "bg.png", ex.bg_true)
    imgio.write_image(example_dir / "bg_input.png", ex.bg_input)
    imgio.write_map16(example_dir / "seg.png", ex.seg)
    for i in range(4):
        imgio.write_map8(example_dir / f"m{i}.png", ex.motion[i])
    imgio.write_image(example_dir / "fg_gt.png", ex.fg_gt)
    imgio.write_map16(example_dir / "alpha_gt.png", ex.alpha_gt)


def _example_complete(example_dir: Path) -> bool:
    return all((example_dir / name).is_file() for name in EXAMPLE_FILES)


def load_syn_dataset(dataset_dir: Path):
    examples = []
    for sub in sorted(p for p in dataset_dir.iterdir() if p.is_dir()):
        if not _example_complete(sub):
            log.warning("ignoring incomplete example %s", sub.name)
            continue
        motion = np.stack([imgio.read_map(sub / f"m{i}.png") for i in range(4)], axis=0)
        examples.append(
            augment.SynExample(
                img=imgio.read_image(sub / "img.png"),
                bg_true=imgio.read_image(sub / "bg.png"),
                bg_input=imgio.read_image(sub / "bg_input.png"),
                seg=imgio.read_map(sub / "seg.png"),
                motion=motion,
                fg_gt=imgio.read_image(sub / "fg_gt.png"),
                alpha_gt=imgio.read_map(sub / "alpha_gt.png"),
                key=sub.name,
            )
        )
    return examples


def cmd_synth_dataset(cfg: RunConfig, out_override=None) -> int:
    assets_dir = _require_dir(cfg.paths.assets, "assets")
    bg_dir = _require_dir(cfg.paths.backgrounds, "backgrounds")
    out = Path(out_override or cfg.paths.dataset or "dataset")
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    manifest = {"global_seed": cfg.seed, "examples": {}}
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text())

    bg_files = sorted(p for p in bg_dir.iterdir() if p.suffix.lower() == ".png")
    if not bg_files:
        log.error("no backgrounds in %s", bg_dir)
        return 2

    new = 0
    for asset in _load_assets(assets_dir):
        for bg_path in bg_files:
            key = example_key(asset.id, bg_path.stem)
            example_dir = out / key
            if _example_complete(example_dir):
                continue
            seed = derive_seed(cfg.seed, asset.id, bg_path.stem)
            try:
                ex = make_syn_example(
                    asset,
                    imgio.read_image(bg_path),
                    cfg.net.input_size,
                    np.random.default_rng(seed),
                    key=key,
                )
            except augment.EmptyAlphaError as exc:
                log.warning("skipping %s: %s", key, exc)
                continue
            _write_example(example_dir, ex)
            manifest["examples"][key] = {"asset": asset.id, "bg": bg_path.stem, "seed": seed}
            new += 1

    if new:
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    total = len([p for p in out.iterdir() if p.is_dir() and _example_complete(p)])
    log.info("dataset at %s: %d examples (%d new)", out, total, new)
    if total == 0:
        log.error("no examples were produced")
        return 2
    return 0


# ---------------------------------------------------------------------------
# per-frame capture preprocessing (shared by train --phase real and matte)


class _FrameWindow:
    """Lazy list of frames resized by `scale` and cropped at a fixed window;
    lets the motion-stack builder index a video without loading it whole."""

    def __init__(self, paths, scale_to, window):
        self.paths = paths
        self.scale_to = scale_to  # (H, W) after optional upscale, or None
        self.window = window  # (top, left, size)

    def __len__(self):
        return len(self.paths)

    def __getitem__(self, i):
        frame = imgio.read_image(self.paths[i])
        if self.scale_to is not None:
            frame = resize_bilinear(frame, self.scale_to)
        top, left, size = self.window
        return frame[top : top + size, left : left + size]


def _session_paths(capture_dir: Path):
    frames_dir = capture_dir / "frames"
    if not frames_dir.is_dir():
        raise ConfigError(f"capture has no frames directory: {frames_dir}")
    frame_paths = sorted(frames_dir.glob("*.png"))
    if not frame_paths:
        raise ConfigError(f"no frames in {frames_dir}")
    plate_path = capture_dir / "background.png"
    if not plate_path.is_file():
        raise ConfigError(f"missing background plate: {plate_path}")
    return frame_paths, plate_path


def _read_prob(capture_dir: Path, frame_path: Path, prob_from_threshold: bool):
    prob_path = capture_dir / "prob" / frame_path.name
    if not prob_path.is_file():
        raise ConfigError(f"missing probability map: {prob_path}")
    prob = imgio.read_map(prob_path)
    if prob_from_threshold:
        # crude probability map from a binary mask
        prob = np.where(prob > 0.5, 1.0, 0.0).astype(np.float32)
    return prob


def prepare_frame(
    frame_paths,
    index: int,
    plate,
    prob,
    cfg: RunConfig,
    align: bool,
    motion: bool,
):
    """One capture frame -> (MattingInput, paste-back info).

    Aligns the plate to the frame (identity fallback on failure), upscales
    when the crop exceeds the frame, crops around the subject, refines the
    segmentation, and builds the motion stack (four grayscale copies of the
    frame for stills)."""
    frame = imgio.read_image(frame_paths[index])
    orig_shape = frame.shape[:2]

    if align:
        try:
            h = estimate_homography(plate, frame, derive_seed(cfg.seed, "align", index))
        except AlignmentError as exc:
            log.warning("frame %d: alignment failed (%s), using identity", index, exc)
            h = identity_homography()
        plate_aligned = warp_background(plate, h, frame.shape[:2])
    else:
        plate_aligned = plate
        if plate_aligned.shape[:2] != frame.shape[:2]:
            plate_aligned = resize_bilinear(plate_aligned, frame.shape[:2])

    size = cfg.preprocess.crop_size
    scale_to = None
    if size > min(orig_shape):
        s = size / min(orig_shape)
        scale_to = (max(size, round(orig_shape[0] * s)), max(size, round(orig_shape[1] * s)))
        frame = resize_bilinear(frame, scale_to)
        plate_aligned = resize_bilinear(plate_aligned, scale_to)
        prob = resize_bilinear(prob, scale_to)

    crop_img, (top, left) = crop_around_subject(frame, prob, size)
    plate_crop = plate_aligned[top : top + size, left : left + size]
    prob_crop = prob[top : top + size, left : left + size]
    seg = refine_segmentation(prob_crop)

    if motion and len(frame_paths) > 1:
        window = _FrameWindow(frame_paths, scale_to, (top, left, size))
        stack = build_motion_stack(window, index, cfg.preprocess.motion_interval)
    else:
        stack = build_motion_stack([crop_img], 0, cfg.preprocess.motion_interval)

    x = MattingInput(img=crop_img, bg=plate_crop, seg=seg, motion=stack)
    return x, {"offset": (top, left), "scaled_shape": scale_to, "orig_shape": orig_shape}


def prepare_real_examples(capture_dir: Path, novel_dir: Path, cfg: RunConfig):
    """Capture session -> RealExamples for adversarial training."""
    frame_paths, plate_path = _session_paths(capture_dir)
    plate = imgio.read_image(plate_path)
    novel_files = sorted(p for p in novel_dir.iterdir() if p.suffix.lower() == ".png")
    if not novel_files:
        raise ConfigError(f"no novel backgrounds in {novel_dir}")
    size = cfg.preprocess.crop_size
    examples = []
    for i, fp in enumerate(frame_paths):
        prob = _read_prob(capture_dir, fp, prob_from_threshold=False)
        try:
            x, _ = prepare_frame(
                frame_paths, i, plate, prob, cfg, cfg.preprocess.align, cfg.preprocess.motion
            )
        except SubjectNotFoundError:
            log.warning("frame %s: no subject, skipped for training", fp.name)
            continue
        novel = imgio.read_image(novel_files[i % len(novel_files)])
        examples.append(
            RealExample(x=x, novel_bg=resize_bilinear(novel, (size, size)), key=fp.stem)
        )
    if not examples:
        raise ConfigError(f"no usable frames in {capture_dir}")
    return examples


# ---------------------------------------------------------------------------
# train


def cmd_train(cfg: RunConfig, phase: str, out_override=None) -> int:
    ckpt_root = Path(out_override or cfg.paths.checkpoints or "checkpoints")
    out_dir = ckpt_root / phase
    if phase == "adobe":
        dataset = load_syn_dataset(_require_dir(cfg.paths.dataset, "dataset"))
        if not dataset:
            raise ConfigError(f"dataset {cfg.paths.dataset} has no complete examples")
        out_dir.mkdir(parents=True, exist_ok=True)
        train_adobe(dataset, cfg.train, cfg.net, out_dir=out_dir)
        log.info("supervised phase done; checkpoints in %s", out_dir)
        return 0

    teacher_path = ckpt_root / "adobe" / "generator_latest.pt"
    if not teacher_path.is_file():
        raise ConfigError(
            f"phase=real needs a trained teacher checkpoint; missing {teacher_path}"
        )
    captures = _require_dir(cfg.paths.captures, "captures")
    novel = _require_dir(cfg.paths.novel_backgrounds, "novel_backgrounds")
    teacher = load_generator(teacher_path, expected_cfg=cfg.net)
    examples = prepare_real_examples(captures, novel, cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_real(examples, teacher, cfg.train_real or cfg.train, cfg.net, out_dir=out_dir)
    log.info("adversarial phase done; checkpoints in %s", out_dir)
    return 0


# ---------------------------------------------------------------------------
# matte


def cmd_matte(cfg: RunConfig, capture_dir, args) -> int:
    capture_dir = Path(capture_dir)
    if not capture_dir.is_dir():
        raise ConfigError(f"capture directory not found: {capture_dir}")
    frame_paths, plate_path = _session_paths(capture_dir)
    ckpt = _require_file(
        args.checkpoint or cfg.matte.checkpoint, "generator checkpoint (matte.checkpoint)"
    )
    gen = load_generator(ckpt)
    if gen.cfg.input_size != cfg.preprocess.crop_size:
        raise ConfigError(
            f"crop size {cfg.preprocess.crop_size} does not match checkpoint "
            f"input size {gen.cfg.input_size}"
        )
    out = Path(args.out or cfg.paths.output or "mattes")
    (out / "alpha").mkdir(parents=True, exist_ok=True)
    (out / "fg").mkdir(parents=True, exist_ok=True)
    if args.write_trimaps:
        (out / "trimap").mkdir(parents=True, exist_ok=True)

    plate = imgio.read_image(plate_path)
    align = cfg.preprocess.align and not args.no_align
    motion = cfg.preprocess.motion if args.motion is None else args.motion

    for i, fp in enumerate(frame_paths):
        prob = _read_prob(capture_dir, fp, args.prob_from_threshold)
        if args.write_trimaps:
            imgio.write_trimap(out / "trimap" / fp.name, auto_trimap(prob))
        try:
            x, info = prepare_frame(frame_paths, i, plate, prob, cfg, align, motion)
        except SubjectNotFoundError:
            log.warning("frame %s: no subject found, writing empty matte", fp.name)
            frame = imgio.read_image(fp)
            imgio.write_map16(out / "alpha" / fp.name, np.zeros(frame.shape[:2], np.float32))
            imgio.write_image(out / "fg" / fp.name, frame)
            continue

        fg, alpha = generator_forward(x, gen)

        n = args.n_subjects or cfg.matte.n_subjects
        if n is None:
            n = max(1, len(connected_components(prob > 0.5).sizes))
        top, left = info["offset"]
        size = cfg.preprocess.crop_size
        shape = info["scaled_shape"] or info["orig_shape"]
        full_alpha = np.zeros(shape, dtype=np.float32)
        full_alpha[top : top + size, left : left + size] = alpha
        full_alpha = postprocess_alpha(full_alpha, n)
        full_fg = (
            resize_bilinear(imgio.read_image(fp), shape)
            if info["scaled_shape"]
            else imgio.read_image(fp)
        )
        full_fg[top : top + size, left : left + size] = fg
        if info["scaled_shape"]:
            full_alpha = resize_bilinear(full_alpha, info["orig_shape"])
            full_fg = resize_bilinear(full_fg, info["orig_shape"])
        imgio.write_map16(out / "alpha" / fp.name, np.clip(full_alpha, 0.0, 1.0))
        imgio.write_image(out / "fg" / fp.name, np.clip(full_fg, 0.0, 1.0))
    log.info("mattes written to %s", out)
    return 0


# ---------------------------------------------------------------------------
# composite


def _fit_background(bg, shape):
    """Resize (preserving aspect) and center-crop bg to `shape`."""
    h, w = shape
    bh, bw = bg.shape[:2]
    if (bh, bw) != (h, w):
        log.info("resizing novel background from %dx%d to %dx%d", bh, bw, h, w)
        s = max(h / bh, w / bw)
        bg = resize_bilinear(bg, (max(h, round(bh * s)), max(w, round(bw * s))))
        top = (bg.shape[0] - h) // 2
        left = (bg.shape[1] - w) // 2
        bg = bg[top : top + h, left : left + w]
    return bg


def cmd_composite(mattes_dir, bg_arg, out_override=None) -> int:
    mattes_dir = Path(mattes_dir)
    alpha_dir = mattes_dir / "alpha"
    fg_dir = mattes_dir / "fg"
    if not alpha_dir.is_dir() or not fg_dir.is_dir():
        raise ConfigError(f"{mattes_dir} must contain alpha/ and fg/ directories")
    names = sorted(p.name for p in alpha_dir.glob("*.png") if (fg_dir / p.name).is_file())
    if not names:
        raise ConfigError(f"no matte pairs in {mattes_dir}")
    out = Path(out_override or (mattes_dir / "composite"))
    out.mkdir(parents=True, exist_ok=True)

    bg_image = None
    if bg_arg != "green":
        bg_image = imgio.read_image(_require_file(bg_arg, "novel background"))

    for name in names:
        alpha = imgio.read_map(alpha_dir / name)
        fg = imgio.read_image(fg_dir / name)
        target = (
            np.array(DEFAULT_GREEN, dtype=np.float32)
            if bg_image is None
            else _fit_background(bg_image, alpha.shape)
        )
        imgio.write_image(out / name, render_composite(fg, alpha, target))
    log.info("composites written to %s", out)
    return 0


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(pred_dir, gt_dir, report_path=None) -> int:
    pred_dir, gt_dir = Path(pred_dir), Path(gt_dir)
    if not pred_dir.is_dir() or not gt_dir.is_dir():
        raise ConfigError("evaluate needs two existing directories of alpha PNGs")
    pred_names = {p.name for p in pred_dir.glob("*.png")}
    gt_names = {p.name for p in gt_dir.glob("*.png")}
    for name in sorted(pred_names ^ gt_names):
        log.warning("unmatched frame: %s", name)
    common = sorted(pred_names & gt_names)
    if not common:
        raise ConfigError("no overlapping frames between prediction and ground truth")

    records = []
    for name in common:
        pred = resize_bilinear(imgio.read_map(pred_dir / name), (512, 512))
        gt = resize_bilinear(imgio.read_map(gt_dir / name), (512, 512))
        records.append({"frame": name, "sad": sad(pred, gt), "mse": mse(pred, gt)})
    agg = {
        "frames": len(records),
        "mean_sad": float(np.mean([r["sad"] for r in records])),
        "mean_mse": float(np.mean([r["mse"] for r in records])),
    }
    lines = [json.dumps(r) for r in records] + [json.dumps({"aggregate": agg})]
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text("\n".join(lines) + "\n")
    print(f"frames={agg['frames']} mean_sad={agg['mean_sad']:.6f} mean_mse={agg['mean_mse']:.6f}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bgmatte", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth-dataset", help="build the synthetic composite dataset")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("train", help="run a training phase")
    sp.add_argument("--config", required=True)
    sp.add_argument("--phase", choices=["adobe", "real"], required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")

    sp = sub.add_parser("matte", help="matte a capture directory")
    sp.add_argument("capture_dir")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--checkpoint")
    sp.add_argument("--no-align", action="store_true")
    sp.add_argument("--motion", dest="motion", action="store_true", default=None)
    sp.add_argument("--no-motion", dest="motion", action="store_false")
    sp.add_argument("--n-subjects", type=int)
    sp.add_argument("--crop-size", type=int)
    sp.add_argument("--motion-interval", type=int)
    sp.add_argument("--prob-from-threshold", action="store_true")
    sp.add_argument("--write-trimaps", action="store_true")

    sp = sub.add_parser("composite", help="composite mattes over a novel background")
    sp.add_argument("mattes_dir")
    sp.add_argument("background", help="image path or 'green'")
    sp.add_argument("--out")

    sp = sub.add_parser("evaluate", help="SAD/MSE against ground-truth mattes at 512x512")
    sp.add_argument("pred_dir")
    sp.add_argument("gt_dir")
    sp.add_argument("--out", help="report file (line-delimited JSON)")

    return p


def _load_cfg(args) -> RunConfig:
    cfg = load_run_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        cfg.train = replace(cfg.train, seed=args.seed)
        if cfg.train_real is not None:
            cfg.train_real = replace(cfg.train_real, seed=args.seed)
    if getattr(args, "crop_size", None) is not None:
        cfg.preprocess = replace(cfg.preprocess, crop_size=args.crop_size)
    if getattr(args, "motion_interval", None) is not None:
        cfg.preprocess = replace(cfg.preprocess, motion_interval=args.motion_interval)
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.command == "synth-dataset":
            return cmd_synth_dataset(_load_cfg(args), args.out)
        if args.command == "train":
            return cmd_train(_load_cfg(args), args.phase, args.out)
        if args.command == "matte":
            return cmd_matte(_load_cfg(args), args.capture_dir, args)
        if args.command == "composite":
            return cmd_composite(args.mattes_dir, args.background, args.out)
        if args.command == "evaluate":
            return cmd_evaluate(args.pred_dir, args.gt_dir, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        log.error("%s", exc)
        return 1
    except Exception as exc:  # runtime failure
        log.error("command failed: %s", exc)
        return 2


def entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
