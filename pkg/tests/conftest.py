"""Session fixtures: toy datasets and the toy training runs shared between
the unit tests and the acceptance suite."""

import time

import numpy as np
import pytest

from bgmatte import toydata
from bgmatte.model import MattingInput, NetConfig
from bgmatte.preprocess import build_motion_stack, refine_segmentation
from bgmatte.train import RealExample, TrainConfig, alpha_mae, train_adobe

TOY_SIZE = 128
TOY_NETCFG = NetConfig(
    base_channels=4,
    enc_channels=16,
    selector_channels=4,
    shared_resblocks=2,
    branch_resblocks=1,
    input_size=TOY_SIZE,
)


@pytest.fixture(scope="session")
def toy_examples():
    return toydata.toy_syn_examples(8, TOY_SIZE, seed=7)


@pytest.fixture(scope="session")
def toy_overfit(toy_examples):
    """Supervised toy run (8 composites, 128px): trains until the mean
    per-pixel alpha error drops below 0.035, capped at 2000 steps."""
    history = []
    start = time.time()

    def stop(epoch, gen):
        if (epoch + 1) % 25 == 0:
            mae = alpha_mae(gen, toy_examples)
            history.append({"epoch": epoch + 1, "steps": 2 * (epoch + 1), "alpha_mae": mae})
            return mae < 0.035
        return False

    cfg = TrainConfig(batch_size=4, lr_g=1e-3, epochs=1000, seed=0, val_every=1000)
    gen = train_adobe(toy_examples, cfg, TOY_NETCFG, stop_fn=stop)
    runtime = time.time() - start
    if not history or history[-1]["alpha_mae"] >= 0.05:
        history.append(
            {"epoch": cfg.epochs, "steps": 2 * cfg.epochs, "alpha_mae": alpha_mae(gen, toy_examples)}
        )
    return {"generator": gen, "history": history, "runtime": runtime, "netcfg": TOY_NETCFG}


@pytest.fixture(scope="session")
def toy_real_world():
    """Eight capture-style scenes at TOY_SIZE plus the RealExamples built
    from them (still-image motion stacks, refined segmentations)."""
    rng = np.random.default_rng(42)
    scenes, reals = [], []
    for i in range(8):
        sc = toydata.toy_scene(TOY_SIZE, rng)
        x = MattingInput(
            img=sc["frame"],
            bg=sc["plate"],
            seg=refine_segmentation(sc["prob"]),
            motion=build_motion_stack([sc["frame"]], 0, 20),
        )
        reals.append(
            RealExample(x=x, novel_bg=toydata.textured_background(TOY_SIZE, rng), key=f"real{i}")
        )
        scenes.append(sc)
    return {"scenes": scenes, "examples": reals}
