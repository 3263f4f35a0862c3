"""Shared test utilities: independent brute-force oracles and a scriptable
random generator.

The oracles here are deliberately written as plain python loops so they stay
independent of the library code paths they check.
"""

import numpy as np


def loop_erode(grid, steps):
    """Reference erosion: 3x3 cross, outside-of-frame counts as foreground."""
    out = (np.asarray(grid) > 0.5).astype(np.uint8)
    h, w = out.shape
    for _ in range(steps):
        nxt = np.zeros_like(out)
        for y in range(h):
            for x in range(w):
                keep = out[y, x] == 1
                for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    ny, nx_ = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx_ < w:
                        keep = keep and out[ny, nx_] == 1
                nxt[y, x] = 1 if keep else 0
        out = nxt
    return out


def loop_dilate(grid, steps):
    """Reference dilation: 3x3 cross, outside-of-frame counts as background."""
    out = (np.asarray(grid) > 0.5).astype(np.uint8)
    h, w = out.shape
    for _ in range(steps):
        nxt = np.zeros_like(out)
        for y in range(h):
            for x in range(w):
                hit = out[y, x] == 1
                for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    ny, nx_ = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx_ < w and out[ny, nx_] == 1:
                        hit = True
                nxt[y, x] = 1 if hit else 0
        out = nxt
    return out


class ScriptedRng:
    """Generator stand-in whose scalar draws pop from a queue; array draws
    delegate to a real seeded generator."""

    def __init__(self, scripted, seed=0):
        self.queue = list(scripted)
        self.rng = np.random.default_rng(seed)

    def _pop(self, fallback):
        if self.queue:
            return self.queue.pop(0)
        return fallback()

    def random(self, size=None):
        if size is None:
            return self._pop(self.rng.random)
        return self.rng.random(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        if size is None:
            return self._pop(lambda: self.rng.normal(loc, scale))
        return self.rng.normal(loc, scale, size)

    def uniform(self, low=0.0, high=1.0, size=None):
        if size is None:
            return self._pop(lambda: self.rng.uniform(low, high))
        return self.rng.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        if size is None:
            return int(self._pop(lambda: self.rng.integers(low, high)))
        return self.rng.integers(low, high, size)

    def choice(self, a, size=None, **kw):
        if size is None:
            return self._pop(lambda: self.rng.choice(a, **kw))
        return self.rng.choice(a, size=size, **kw)

    def permutation(self, n):
        return self.rng.permutation(n)


def sample_param_entries(module, count, seed):
    """(name, flat index) pairs sampled across all parameters."""
    import torch  # noqa: F401

    params = dict(module.named_parameters())
    names = sorted(params)
    rng = np.random.default_rng(seed)
    picks = []
    for _ in range(count):
        name = names[int(rng.integers(len(names)))]
        picks.append((name, int(rng.integers(params[name].numel()))))
    return picks


def fd_gradcheck(module, loss_fn, picks, h=1e-5):
    """Central finite differences vs autograd for the sampled entries.

    Returns the worst relative error.  loss_fn() must rebuild the loss from
    the module's current parameters.
    """
    import torch

    module.zero_grad()
    loss_fn().backward()
    params = dict(module.named_parameters())
    worst = 0.0
    for name, idx in picks:
        p = params[name]
        analytic = p.grad.flatten()[idx].item()
        with torch.no_grad():
            orig = p.flatten()[idx].item()
            p.flatten()[idx] = orig + h
            plus = loss_fn().item()
            p.flatten()[idx] = orig - h
            minus = loss_fn().item()
            p.flatten()[idx] = orig
        fd = (plus - minus) / (2.0 * h)
        rel = abs(fd - analytic) / max(abs(fd), abs(analytic), 1e-8)
        worst = max(worst, rel)
    return worst
