"""Loss functions, the guidance-weight schedule, supervised training on
synthetic composites, and teacher-student adversarial training on real
captures.

All L1 terms are means over the elements of their tensor, which keeps the
loss weights resolution-independent.  Training is deterministic for a fixed
TrainConfig.seed on a given platform.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .evalpost import sad
from .model import (
    Generator,
    MattingInput,
    NetConfig,
    generator_forward,
    image_to_tensor,
    init_discriminator,
    init_params,
    map_to_tensor,
    motion_to_tensor,
    save_discriminator,
    save_generator,
)

# Foreground L1 weight in the supervised loss; alpha/gradient weights in the
# guided adversarial loss.
SUPERVISED_FG_WEIGHT = 2.0
GUIDED_ALPHA_WEIGHT = 2.0
GUIDED_GRAD_WEIGHT = 4.0

D_SCORE_SATURATION = 100.0


@dataclass
class PseudoGT:
    """Frozen-teacher outputs used as supervision for the student."""

    fg: np.ndarray
    alpha: np.ndarray


@dataclass
class RealExample:
    """One real capture bundle plus a novel background for composites."""

    x: MattingInput
    novel_bg: np.ndarray
    key: str = ""


@dataclass
class TrainConfig:
    batch_size: int = 4
    lr_g: float = 1e-4
    lr_d: float = 1e-5
    lambda0: float = 0.05
    lambda_halve_every: int = 2
    d_update_every: int = 5
    epochs: int = 10
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    val_every: int = 1

    def __post_init__(self):
        for name in ("batch_size", "lr_g", "lr_d", "lambda0", "lambda_halve_every",
                     "d_update_every", "epochs", "val_every"):
            if getattr(self, name) <= 0:
                raise ValueError(f"TrainConfig.{name} must be positive")


def lambda_schedule(epoch: int, cfg: TrainConfig) -> float:
    """Guidance weight: lambda0 halved every lambda_halve_every epochs."""
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    return cfg.lambda0 * 0.5 ** (epoch // cfg.lambda_halve_every)


def image_gradient(alpha: torch.Tensor):
    """Forward differences along x and y; the last column/row is zero."""
    gx = torch.zeros_like(alpha)
    gy = torch.zeros_like(alpha)
    gx[..., :, :-1] = alpha[..., :, 1:] - alpha[..., :, :-1]
    gy[..., :-1, :] = alpha[..., 1:, :] - alpha[..., :-1, :]
    return gx, gy


def _l1(a, b):
    return torch.mean(torch.abs(a - b))


def _grad_l1(a, b):
    """Mean |gradient difference| over all elements of the stacked (gx, gy)
    field."""
    gxa, gya = image_gradient(a)
    gxb, gyb = image_gradient(b)
    return 0.5 * (_l1(gxa, gxb) + _l1(gya, gyb))


def _compose_l1(img, fg, alpha, bg):
    return torch.mean(torch.abs(img - alpha * fg - (1.0 - alpha) * bg))


def supervised_loss(pred, img, bg_true, fg_gt, alpha_gt) -> torch.Tensor:
    """Supervised objective on synthetic composites:
    |a - a*| + |grad a - grad a*| + 2 |F - F*| + |I - aF - (1-a)B|,
    each term a mean, with B the true background used for composing."""
    fg, alpha = pred
    return (
        _l1(alpha, alpha_gt)
        + _grad_l1(alpha, alpha_gt)
        + SUPERVISED_FG_WEIGHT * _l1(fg, fg_gt)
        + _compose_l1(img, fg, alpha, bg_true)
    )


def generator_loss(pred, pseudo, d_scores, img, bg_input, lam: float) -> torch.Tensor:
    """Adversarial phase generator objective: least-squares fooling term on
    the composite scores plus lam-weighted teacher guidance
    (2 |a - a~| + 4 |grad a - grad a~| + |F - F~| + |I - aF - (1-a)B'|),
    with B' the captured input background."""
    fg, alpha = pred
    pseudo_fg, pseudo_alpha = pseudo
    guided = (
        GUIDED_ALPHA_WEIGHT * _l1(alpha, pseudo_alpha)
        + GUIDED_GRAD_WEIGHT * _grad_l1(alpha, pseudo_alpha)
        + _l1(fg, pseudo_fg)
        + _compose_l1(img, fg, alpha, bg_input)
    )
    return torch.mean((d_scores - 1.0) ** 2) + lam * guided


def discriminator_loss(d_fake, d_real) -> torch.Tensor:
    """Least-squares discriminator objective: fakes to 0, captures to 1."""
    return torch.mean(d_fake**2) + torch.mean((d_real - 1.0) ** 2)


class MetricsLog:
    """Append-only line-delimited metrics; records are also kept in memory."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self.records = []
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record: dict) -> None:
        self.records.append(record)
        if self.path is not None:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(record) + "\n")


def _syn_tensors(ex):
    return {
        "img": image_to_tensor(ex.img),
        "bg_true": image_to_tensor(ex.bg_true),
        "bg_input": image_to_tensor(ex.bg_input),
        "seg": map_to_tensor(ex.seg),
        "motion": motion_to_tensor(ex.motion),
        "fg_gt": image_to_tensor(ex.fg_gt),
        "alpha_gt": map_to_tensor(ex.alpha_gt),
    }


def _real_tensors(ex: RealExample):
    return {
        "img": image_to_tensor(ex.x.img),
        "bg_input": image_to_tensor(ex.x.bg),
        "seg": map_to_tensor(ex.x.seg),
        "motion": motion_to_tensor(ex.x.motion),
        "novel_bg": image_to_tensor(ex.novel_bg),
    }


def _stack(tensor_dicts, idx, field):
    return torch.stack([tensor_dicts[i][field] for i in idx])


def alpha_mae(gen: Generator, dataset) -> float:
    """Mean per-pixel |alpha - alpha_gt| over a SynExample dataset."""
    gen.eval()
    errs = []
    with torch.no_grad():
        for ex in dataset:
            x = MattingInput(img=ex.img, bg=ex.bg_input, seg=ex.seg, motion=ex.motion)
            _, alpha = generator_forward(x, gen)
            errs.append(float(np.mean(np.abs(alpha - ex.alpha_gt))))
    return float(np.mean(errs))


def validation_sad(gen: Generator, dataset) -> float:
    gen.eval()
    vals = []
    with torch.no_grad():
        for ex in dataset:
            x = MattingInput(img=ex.img, bg=ex.bg_input, seg=ex.seg, motion=ex.motion)
            _, alpha = generator_forward(x, gen)
            vals.append(sad(alpha, ex.alpha_gt))
    return float(np.mean(vals))


def _abort_if_not_finite(loss, step, keys):
    if not torch.isfinite(loss):
        raise RuntimeError(f"non-finite loss at step {step} on examples {keys}")


def train_adobe(
    dataset,
    cfg: TrainConfig,
    netcfg: NetConfig,
    *,
    val_dataset=None,
    out_dir=None,
    stop_fn=None,
) -> Generator:
    """Supervised phase: minimize the composite-supervision loss with Adam.

    Logs per-step loss and per-epoch validation SAD; writes per-epoch
    checkpoints when out_dir is given.  stop_fn(epoch, gen) -> bool allows
    early stopping once a target is reached.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset is empty")
    val_dataset = list(val_dataset) if val_dataset is not None else dataset
    out_dir = Path(out_dir) if out_dir is not None else None

    torch.manual_seed(cfg.seed)
    gen = init_params(netcfg, cfg.seed)
    opt = torch.optim.Adam(
        gen.parameters(), lr=cfg.lr_g, betas=(cfg.adam_beta1, cfg.adam_beta2), weight_decay=0.0
    )
    metrics = MetricsLog(out_dir / "metrics.jsonl" if out_dir else None)
    tensors = [_syn_tensors(ex) for ex in dataset]
    keys = [ex.key or str(i) for i, ex in enumerate(dataset)]
    order = np.random.default_rng(cfg.seed)

    step = 0
    for epoch in range(cfg.epochs):
        gen.train()
        perm = order.permutation(len(dataset))
        for start in range(0, len(perm), cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            pred = gen(
                _stack(tensors, idx, "img"),
                _stack(tensors, idx, "bg_input"),
                _stack(tensors, idx, "seg"),
                _stack(tensors, idx, "motion"),
            )
            loss = supervised_loss(
                pred,
                _stack(tensors, idx, "img"),
                _stack(tensors, idx, "bg_true"),
                _stack(tensors, idx, "fg_gt"),
                _stack(tensors, idx, "alpha_gt"),
            )
            _abort_if_not_finite(loss, step, [keys[i] for i in idx])
            opt.zero_grad()
            loss.backward()
            opt.step()
            step += 1
            metrics.write({"phase": "adobe", "step": step, "epoch": epoch, "loss": loss.item()})

        if epoch % cfg.val_every == 0 or epoch == cfg.epochs - 1:
            metrics.write(
                {
                    "phase": "adobe",
                    "step": step,
                    "epoch": epoch,
                    "val_sad": validation_sad(gen, val_dataset),
                }
            )
        if out_dir is not None:
            save_generator(out_dir / f"generator_epoch{epoch:04d}.pt", gen)
            save_generator(out_dir / "generator_latest.pt", gen)
        if stop_fn is not None and stop_fn(epoch, gen):
            break
    gen.metrics = metrics
    return gen


def pseudo_gt(teacher: Generator, x: MattingInput, netcfg: NetConfig | None = None) -> PseudoGT:
    """One frozen-teacher inference pass; no gradients touch the teacher."""
    if netcfg is not None and teacher.cfg != netcfg:
        raise ValueError(f"teacher config {teacher.cfg} does not match {netcfg}")
    fg, alpha = generator_forward(x, teacher)
    return PseudoGT(fg=fg, alpha=alpha)


def train_real(
    dataset,
    teacher: Generator,
    cfg: TrainConfig,
    netcfg: NetConfig,
    *,
    out_dir=None,
    max_steps=None,
):
    """Adversarial phase: a freshly initialized student is trained against a
    patch discriminator on composites over novel backgrounds, guided toward
    the frozen teacher's outputs by the lambda-weighted loss.

    The discriminator takes one step after every cfg.d_update_every
    generator steps; its real pool is the dataset's own captured images.
    Returns (student, discriminator).
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("dataset is empty")
    out_dir = Path(out_dir) if out_dir is not None else None

    torch.manual_seed(cfg.seed)
    student = init_params(netcfg, cfg.seed + 1)
    disc = init_discriminator(netcfg.base_channels, cfg.seed + 2)
    opt_g = torch.optim.Adam(
        student.parameters(), lr=cfg.lr_g, betas=(cfg.adam_beta1, cfg.adam_beta2), weight_decay=0.0
    )
    opt_d = torch.optim.Adam(
        disc.parameters(), lr=cfg.lr_d, betas=(cfg.adam_beta1, cfg.adam_beta2), weight_decay=0.0
    )
    teacher.eval()
    metrics = MetricsLog(out_dir / "metrics.jsonl" if out_dir else None)
    tensors = [_real_tensors(ex) for ex in dataset]
    keys = [ex.key or str(i) for i, ex in enumerate(dataset)]
    order = np.random.default_rng(cfg.seed)

    g_step = 0
    done = False
    for epoch in range(cfg.epochs):
        if done:
            break
        lam = lambda_schedule(epoch, cfg)
        metrics.write({"phase": "real", "epoch": epoch, "lambda": lam})
        perm = order.permutation(len(dataset))
        for start in range(0, len(perm), cfg.batch_size):
            idx = perm[start : start + cfg.batch_size]
            img = _stack(tensors, idx, "img")
            bg_input = _stack(tensors, idx, "bg_input")
            seg = _stack(tensors, idx, "seg")
            motion = _stack(tensors, idx, "motion")
            novel_bg = _stack(tensors, idx, "novel_bg")

            with torch.no_grad():
                pseudo = teacher(img, bg_input, seg, motion)

            student.train()
            fg, alpha = student(img, bg_input, seg, motion)
            comp = alpha * fg + (1.0 - alpha) * novel_bg
            d_scores = disc(comp)
            loss_g = generator_loss((fg, alpha), pseudo, d_scores, img, bg_input, lam)
            _abort_if_not_finite(loss_g, g_step, [keys[i] for i in idx])
            score_level = d_scores.detach().abs().mean().item()
            if score_level > D_SCORE_SATURATION:
                raise RuntimeError(
                    f"discriminator scores saturated at g_step {g_step} "
                    f"(mean |score| {score_level:.1f})"
                )
            opt_g.zero_grad()
            loss_g.backward()
            opt_g.step()
            g_step += 1
            metrics.write(
                {
                    "phase": "real",
                    "step": g_step,
                    "epoch": epoch,
                    "loss_g": loss_g.item(),
                    "lambda": lam,
                }
            )

            if g_step % cfg.d_update_every == 0:
                d_fake = disc(comp.detach())
                d_real = disc(img)
                loss_d = discriminator_loss(d_fake, d_real)
                _abort_if_not_finite(loss_d, g_step, [keys[i] for i in idx])
                opt_d.zero_grad()
                loss_d.backward()
                opt_d.step()
                metrics.write({"event": "d_step", "g_step": g_step, "loss_d": loss_d.item()})

            if max_steps is not None and g_step >= max_steps:
                done = True
                break
        if out_dir is not None:
            save_generator(out_dir / "student_latest.pt", student)
            save_discriminator(out_dir / "discriminator_latest.pt", disc)
    student.metrics = metrics
    return student, disc
