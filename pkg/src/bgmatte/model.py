"""Matting generator and patch discriminator.

The generator encodes four cues (image, background plate, soft segmentation,
motion stack) with separate encoders, fuses them with per-cue selectors and a
combinator conditioned on the image features, and decodes alpha and
foreground through residual stacks.  A NetConfig scales channel widths so toy
configurations keep the same topology.
"""

from dataclasses import asdict, dataclass

import numpy as np
import torch
import torch.nn as nn

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class NetConfig:
    """Channel widths and depths; defaults are the full-scale configuration."""

    base_channels: int = 64
    enc_channels: int = 256
    selector_channels: int = 64
    shared_resblocks: int = 7
    branch_resblocks: int = 3
    input_size: int = 512

    def __post_init__(self):
        for field, value in asdict(self).items():
            if value < 1:
                raise ValueError(f"NetConfig.{field} must be >= 1, got {value}")
        if self.input_size % 4 != 0:
            raise ValueError(f"input_size must be divisible by 4, got {self.input_size}")


def toy_net_config(input_size: int = 64, base_channels: int = 8) -> NetConfig:
    """Small config for tests and smoke runs; same topology, thin channels."""
    return NetConfig(
        base_channels=base_channels,
        enc_channels=4 * base_channels,
        selector_channels=base_channels,
        shared_resblocks=2,
        branch_resblocks=1,
        input_size=input_size,
    )


@dataclass
class MattingInput:
    """Generator input bundle at a common resolution: image (H,W,3),
    background plate (H,W,3), soft segmentation (H,W), motion stack (4,H,W)."""

    img: np.ndarray
    bg: np.ndarray
    seg: np.ndarray
    motion: np.ndarray


ENCODER_CHANNELS = {"image": 3, "background": 3, "segmentation": 1, "motion": 4}


def _conv_bn_relu(in_ch, out_ch, kernel, stride):
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, kernel, stride=stride, padding=kernel // 2, bias=False),
        nn.BatchNorm2d(out_ch),
        nn.ReLU(inplace=True),
    )


class CueEncoder(nn.Module):
    """Three conv stages (stride 1, 2, 2), each conv-BN-ReLU, bias-free;
    output has enc_channels at 1/4 spatial resolution."""

    def __init__(self, in_channels: int, cfg: NetConfig):
        super().__init__()
        self.in_channels = in_channels
        self.stage1 = _conv_bn_relu(in_channels, cfg.base_channels, 7, 1)
        self.stage2 = _conv_bn_relu(cfg.base_channels, 2 * cfg.base_channels, 3, 2)
        self.stage3 = _conv_bn_relu(2 * cfg.base_channels, cfg.enc_channels, 3, 2)

    def forward(self, x, return_skip: bool = False):
        if x.shape[1] != self.in_channels:
            raise ValueError(f"expected {self.in_channels} channels, got {x.shape[1]}")
        if x.shape[-2] % 4 != 0 or x.shape[-1] % 4 != 0:
            raise ValueError(f"spatial size {tuple(x.shape[-2:])} not divisible by 4")
        h1 = self.stage1(x)
        h2 = self.stage2(h1)
        h3 = self.stage3(h2)
        return (h3, h2) if return_skip else h3


class ResBlock(nn.Module):
    """conv-BN-ReLU-conv-BN with an additive skip."""

    def __init__(self, channels: int):
        super().__init__()
        self.body = nn.Sequential(
            nn.Conv2d(channels, channels, 3, padding=1, bias=False),
            nn.BatchNorm2d(channels),
            nn.ReLU(inplace=True),
            nn.Conv2d(channels, channels, 3, padding=1, bias=False),
            nn.BatchNorm2d(channels),
        )

    def forward(self, x):
        return x + self.body(x)


class Decoder(nn.Module):
    """Two x2 bilinear-upsample + conv-BN-ReLU stages, then a 7x7 output
    conv.  Optional skip features are concatenated before the second stage."""

    def __init__(self, cfg: NetConfig, out_channels: int, skip_channels: int = 0):
        super().__init__()
        self.up1 = nn.Upsample(scale_factor=2, mode="bilinear", align_corners=False)
        self.conv1 = _conv_bn_relu(cfg.enc_channels, 2 * cfg.base_channels, 3, 1)
        self.up2 = nn.Upsample(scale_factor=2, mode="bilinear", align_corners=False)
        self.conv2 = _conv_bn_relu(2 * cfg.base_channels + skip_channels, cfg.base_channels, 3, 1)
        self.out = nn.Conv2d(cfg.base_channels, out_channels, 7, padding=3, bias=True)

    def forward(self, x, skip=None):
        h = self.conv1(self.up1(x))
        if skip is not None:
            h = torch.cat([h, skip], dim=1)
        return self.out(self.conv2(self.up2(h)))


class Generator(nn.Module):
    """Four cue encoders, selector/combinator fusion, shared and per-branch
    residual stacks, and decoders for alpha and foreground.

    The foreground decoder receives a skip connection from the image
    encoder's second (stride-2) stage; the alpha decoder gets none.  Alpha is
    the tanh output remapped to [0,1]; foreground is clamped to [0,1].
    """

    def __init__(self, cfg: NetConfig):
        super().__init__()
        self.cfg = cfg
        self.image_encoder = CueEncoder(3, cfg)
        self.background_encoder = CueEncoder(3, cfg)
        self.segmentation_encoder = CueEncoder(1, cfg)
        self.motion_encoder = CueEncoder(4, cfg)
        self.selector_background = _selector(cfg)
        self.selector_segmentation = _selector(cfg)
        self.selector_motion = _selector(cfg)
        self.combinator = _conv_bn_relu(
            cfg.enc_channels + 3 * cfg.selector_channels, cfg.enc_channels, 1, 1
        )
        self.shared = nn.Sequential(
            *[ResBlock(cfg.enc_channels) for _ in range(cfg.shared_resblocks)]
        )
        self.alpha_branch = nn.Sequential(
            *[ResBlock(cfg.enc_channels) for _ in range(cfg.branch_resblocks)]
        )
        self.fg_branch = nn.Sequential(
            *[ResBlock(cfg.enc_channels) for _ in range(cfg.branch_resblocks)]
        )
        self.alpha_decoder = Decoder(cfg, out_channels=1)
        self.fg_decoder = Decoder(cfg, out_channels=3, skip_channels=2 * cfg.base_channels)

    def encode(self, x, which: str):
        encoder = {
            "image": self.image_encoder,
            "background": self.background_encoder,
            "segmentation": self.segmentation_encoder,
            "motion": self.motion_encoder,
        }[which]
        return encoder(x)

    def cs_block(self, img_feat, bg_feat, seg_feat, mot_feat):
        """Fuse image features with each prior separately (selectors), then
        combine everything back to enc_channels (combinator)."""
        for name, feat in (("background", bg_feat), ("segmentation", seg_feat), ("motion", mot_feat)):
            if feat.shape != img_feat.shape:
                raise ValueError(
                    f"{name} features {tuple(feat.shape)} != image features {tuple(img_feat.shape)}"
                )
        sel_b = self.selector_background(torch.cat([img_feat, bg_feat], dim=1))
        sel_s = self.selector_segmentation(torch.cat([img_feat, seg_feat], dim=1))
        sel_m = self.selector_motion(torch.cat([img_feat, mot_feat], dim=1))
        return self.combinator(torch.cat([img_feat, sel_b, sel_s, sel_m], dim=1))

    def forward(self, image, background, segmentation, motion):
        size = (self.cfg.input_size, self.cfg.input_size)
        for name, t in (
            ("image", image),
            ("background", background),
            ("segmentation", segmentation),
            ("motion", motion),
        ):
            if tuple(t.shape[-2:]) != size:
                raise ValueError(
                    f"{name} spatial size {tuple(t.shape[-2:])} != configured {size}"
                )
        img_feat, skip = self.image_encoder(image, return_skip=True)
        bg_feat = self.background_encoder(background)
        seg_feat = self.segmentation_encoder(segmentation)
        mot_feat = self.motion_encoder(motion)
        fused = self.cs_block(img_feat, bg_feat, seg_feat, mot_feat)
        h = self.shared(fused)
        alpha = (torch.tanh(self.alpha_decoder(self.alpha_branch(h))) + 1.0) / 2.0
        fg = torch.clamp(self.fg_decoder(self.fg_branch(h), skip=skip), 0.0, 1.0)
        return fg, alpha


def _selector(cfg: NetConfig):
    return _conv_bn_relu(2 * cfg.enc_channels, cfg.selector_channels, 1, 1)


class Discriminator(nn.Module):
    """Patch discriminator: four stride-2 4x4 conv blocks (leaky ReLU 0.2,
    instance norm on all but the first), then a 4x4 conv to a one-channel
    score map.  No output nonlinearity (least-squares objective)."""

    MIN_INPUT = 70

    def __init__(self, base_channels: int = 64):
        super().__init__()
        c = base_channels
        layers = [nn.Conv2d(3, c, 4, stride=2, padding=1), nn.LeakyReLU(0.2, inplace=True)]
        for mult in (2, 4, 8):
            layers += [
                nn.Conv2d(c, base_channels * mult, 4, stride=2, padding=1),
                nn.InstanceNorm2d(base_channels * mult),
                nn.LeakyReLU(0.2, inplace=True),
            ]
            c = base_channels * mult
        layers.append(nn.Conv2d(c, 1, 4, stride=1, padding=1))
        self.net = nn.Sequential(*layers)
        self.base_channels = base_channels

    def forward(self, img):
        if img.shape[-2] < self.MIN_INPUT or img.shape[-1] < self.MIN_INPUT:
            raise ValueError(
                f"discriminator input must be at least {self.MIN_INPUT}px, got {tuple(img.shape[-2:])}"
            )
        return self.net(img)


def _init_weights(module):
    if isinstance(module, nn.Conv2d):
        nn.init.normal_(module.weight, 0.0, 0.02)
        if module.bias is not None:
            nn.init.zeros_(module.bias)
    elif isinstance(module, nn.BatchNorm2d):
        nn.init.ones_(module.weight)
        nn.init.zeros_(module.bias)


def init_params(cfg: NetConfig, seed: int) -> Generator:
    """Deterministically initialized generator (normal(0, 0.02) convs,
    normalization scales 1, offsets 0)."""
    torch.manual_seed(seed)
    gen = Generator(cfg)
    gen.apply(_init_weights)
    return gen


def init_discriminator(base_channels: int, seed: int) -> Discriminator:
    torch.manual_seed(seed)
    disc = Discriminator(base_channels)
    disc.apply(_init_weights)
    return disc


# numpy <-> torch raster conversion

def image_to_tensor(img: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1))).float()


def map_to_tensor(m: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(np.ascontiguousarray(m))[None].float()


def motion_to_tensor(motion: np.ndarray) -> torch.Tensor:
    return torch.from_numpy(np.ascontiguousarray(motion)).float()


def tensor_to_image(t: torch.Tensor) -> np.ndarray:
    arr = t.detach().cpu().numpy()
    if arr.ndim == 4:
        arr = arr[0]
    return np.clip(arr.transpose(1, 2, 0), 0.0, 1.0)


def tensor_to_map(t: torch.Tensor) -> np.ndarray:
    arr = t.detach().cpu().numpy()
    arr = arr.reshape(arr.shape[-2:])
    return np.clip(arr, 0.0, 1.0)


def input_to_tensors(x: MattingInput):
    """Batch-of-one tensors (image, background, segmentation, motion)."""
    return (
        image_to_tensor(x.img)[None],
        image_to_tensor(x.bg)[None],
        map_to_tensor(x.seg)[None],
        motion_to_tensor(x.motion)[None],
    )


def generator_forward(x: MattingInput, gen: Generator):
    """One inference pass on a single bundle; returns (fg, alpha) as numpy
    rasters.  Uses fixed normalization statistics (eval mode)."""
    gen.eval()
    with torch.no_grad():
        fg, alpha = gen(*input_to_tensors(x))
    return tensor_to_image(fg), tensor_to_map(alpha)


def params_checksum(module: nn.Module) -> str:
    """Stable digest of all parameters and buffers; used to verify that a
    frozen network was not touched."""
    import hashlib

    digest = hashlib.sha256()
    state = module.state_dict()
    for name in sorted(state):
        digest.update(name.encode())
        digest.update(state[name].detach().cpu().numpy().tobytes())
    return digest.hexdigest()


# checkpoints: named-tensor archive with a version tag and the config

def save_generator(path, gen: Generator) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "kind": "generator",
            "net_config": asdict(gen.cfg),
            "state_dict": gen.state_dict(),
        },
        path,
    )


def load_generator(path, expected_cfg: NetConfig | None = None) -> Generator:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    _check_payload(payload, "generator")
    cfg = NetConfig(**payload["net_config"])
    if expected_cfg is not None and cfg != expected_cfg:
        raise ValueError(f"checkpoint config {cfg} does not match expected {expected_cfg}")
    gen = Generator(cfg)
    gen.load_state_dict(payload["state_dict"])
    return gen


def save_discriminator(path, disc: Discriminator) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "kind": "discriminator",
            "base_channels": disc.base_channels,
            "state_dict": disc.state_dict(),
        },
        path,
    )


def load_discriminator(path) -> Discriminator:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    _check_payload(payload, "discriminator")
    disc = Discriminator(payload["base_channels"])
    disc.load_state_dict(payload["state_dict"])
    return disc


def _check_payload(payload, kind: str) -> None:
    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('format_version')}")
    if payload.get("kind") != kind:
        raise ValueError(f"checkpoint holds a {payload.get('kind')!r}, expected {kind!r}")
