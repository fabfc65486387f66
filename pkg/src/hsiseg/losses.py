"""Training objective pieces as pure functions: soft Dice, BCE, and their
λ-blend, plus the per-session mean used for click-accumulated updates.

No optimizer or autograd here; these exist to be called and verified."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossBreakdown:
    dice_loss: float
    bce_loss: float
    combined: float
    lam: float


def _validate(probs, target, valid):
    p = np.asarray(probs, dtype=np.float64)
    g = np.asarray(target, dtype=bool)
    v = np.asarray(valid, dtype=bool)
    if not (p.shape == g.shape == v.shape):
        raise ValueError(f"shape mismatch: probs {p.shape}, target {g.shape}, valid {v.shape}")
    if p.size and (p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    return p[v], g[v].astype(np.float64)


def soft_dice_loss(probs, target, valid, epsilon: float = 1.0) -> float:
    """1 - (2 Σpg + ε) / (Σp + Σg + ε) over valid pixels."""
    p, g = _validate(probs, target, valid)
    inter = float(np.dot(p, g))
    total = float(p.sum() + g.sum())
    return 1.0 - (2.0 * inter + epsilon) / (total + epsilon)


def bce_loss(probs, target, valid, clamp: float = 1e-7) -> float:
    """Mean binary cross-entropy over valid pixels, probabilities clamped to
    [clamp, 1 - clamp] so exact 0/1 predictions stay finite."""
    p, g = _validate(probs, target, valid)
    if p.size == 0:
        return 0.0
    p = np.clip(p, clamp, 1.0 - clamp)
    return float(-np.mean(g * np.log(p) + (1.0 - g) * np.log(1.0 - p)))


def combined_loss(probs, target, valid, lam: float = 0.5,
                  epsilon: float = 1.0, clamp: float = 1e-7) -> LossBreakdown:
    """λ·dice + (1-λ)·bce with λ = 0.5 by default."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    d = soft_dice_loss(probs, target, valid, epsilon=epsilon)
    b = bce_loss(probs, target, valid, clamp=clamp)
    return LossBreakdown(dice_loss=d, bce_loss=b,
                         combined=lam * d + (1.0 - lam) * b, lam=lam)


def session_mean_loss(per_step: list[LossBreakdown]) -> float:
    """Mean combined loss over the interaction steps of one class session."""
    if not per_step:
        raise ValueError("session has no recorded steps")
    return float(np.mean([s.combined for s in per_step]))
