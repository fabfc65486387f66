"""Dice metrics and the simulated-user interactive evaluation protocol.

A session starts with one click at the interior-most point of the largest
connected component of the target mask; each following click lands on the
least-confident not-yet-clicked foreground pixel of the current score map.
Per step we record Dice at the fixed threshold and the exact best Dice over
all thresholds.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .cube import HyperCube, LabelMap, PseudoRgb
from .imgproc import largest_component_center
from .spectral import ClickSet

if TYPE_CHECKING:  # pragma: no cover
    from .backends import SegmentationBackend


class SessionError(RuntimeError):
    """Backend failure wrapped with interaction-step context."""


@dataclass(frozen=True)
class EvalConfig:
    max_clicks: int = 5
    threshold: float = 0.5
    ignore_index: int = 255
    threshold_sweep: str = "exact"  # "exact" or "grid(n)"
    connectivity: int = 4

    def __post_init__(self):
        if self.max_clicks < 1:
            raise ValueError("max_clicks must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.threshold_sweep != "exact" and self._grid_points() is None:
            raise ValueError(f"threshold_sweep must be 'exact' or 'grid(n)', got {self.threshold_sweep!r}")

    def _grid_points(self) -> int | None:
        s = self.threshold_sweep
        if s.startswith("grid(") and s.endswith(")"):
            try:
                n = int(s[5:-1])
                return n if n >= 1 else None
            except ValueError:
                return None
        return None


@dataclass(frozen=True)
class StepRecord:
    step: int
    dice_at_tau: float
    dice_at_max: float
    best_tau: float
    click: tuple[int, int]


@dataclass(frozen=True)
class TaskResult:
    image_id: str
    class_id: int
    steps: tuple[StepRecord, ...]


@dataclass(frozen=True)
class EvalReport:
    method: str
    dataset: str
    config: EvalConfig
    tasks: tuple[TaskResult, ...]
    mean_dice_at_tau: tuple[float, ...]  # indexed by step - 1
    mean_dice_at_max: tuple[float, ...]

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    def to_json(self, include_tasks: bool = True) -> str:
        doc = {
            "method": self.method,
            "dataset": self.dataset,
            "max_clicks": self.config.max_clicks,
            "threshold": self.config.threshold,
            "n_tasks": self.n_tasks,
            "mean_dice_at_tau": list(self.mean_dice_at_tau),
            "mean_dice_at_max": list(self.mean_dice_at_max),
        }
        if include_tasks:
            doc["tasks"] = [
                {
                    "image_id": t.image_id,
                    "class_id": t.class_id,
                    "steps": [
                        {
                            "step": s.step,
                            "dice_at_tau": s.dice_at_tau,
                            "dice_at_max": s.dice_at_max,
                            "best_tau": s.best_tau,
                            "click": list(s.click),
                        }
                        for s in t.steps
                    ],
                }
                for t in self.tasks
            ]
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """One summary row: fixed-threshold and best-threshold Dice at 1 and K clicks."""
        k = self.config.max_clicks
        tau = f"{self.config.threshold:g}"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["method", "dataset", f"dice@{tau}_1c", "dice@max_1c", f"dice@{tau}_{k}c", "n_tasks"]
        )
        writer.writerow(
            [
                self.method,
                self.dataset,
                repr(self.mean_dice_at_tau[0]),
                repr(self.mean_dice_at_max[0]),
                repr(self.mean_dice_at_tau[k - 1]),
                self.n_tasks,
            ]
        )
        return buf.getvalue()

    def summary_line(self) -> str:
        k = self.config.max_clicks
        tau = self.config.threshold
        return (
            f"{self.method:>10s} | dice@{tau:g} (1c) {self.mean_dice_at_tau[0]:.5f} | "
            f"dice@max (1c) {self.mean_dice_at_max[0]:.5f} | "
            f"dice@{tau:g} ({k}c) {self.mean_dice_at_tau[k - 1]:.5f} | "
            f"tasks {self.n_tasks}"
        )


def _as_masks(pred, gt, valid):
    p = np.asarray(pred, dtype=bool)
    g = np.asarray(gt, dtype=bool)
    v = np.asarray(valid, dtype=bool)
    if not (p.shape == g.shape == v.shape):
        raise ValueError(f"mask shape mismatch: {p.shape}, {g.shape}, {v.shape}")
    return p & v, g & v


def dice(pred, gt, valid) -> float:
    """Dice overlap restricted to valid pixels; empty vs empty counts as 1."""
    p, g = _as_masks(pred, gt, valid)
    denom = int(p.sum()) + int(g.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int((p & g).sum()) / denom


def dice_f1_check(pred, gt, valid) -> tuple[float, float]:
    """Dice via set overlap and F1 via TP/FP/FN counts, computed separately.

    The two are algebraically identical; returning both lets tests assert it.
    """
    d = dice(pred, gt, valid)
    p, g = _as_masks(pred, gt, valid)
    tp = int((p & g).sum())
    fp = int((p & ~g).sum())
    fn = int((~p & g).sum())
    if tp + fp + fn == 0:
        return d, 1.0
    f1 = 2.0 * tp / (2.0 * tp + fp + fn)
    return d, f1


def dice_at_max(scores, gt, valid) -> tuple[float, float]:
    """Exact maximum of Dice({scores > tau}) over all thresholds.

    Sweeps cut points over the descending unique scores of the valid pixels
    (plus tau = 0 for the include-everything cut when the smallest score is
    positive). Thresholding is strict, so pixels exactly at tau are
    background. Ties prefer the larger tau.
    """
    s = np.asarray(scores, dtype=np.float64)
    g = np.asarray(gt, dtype=bool)
    v = np.asarray(valid, dtype=bool)
    if not (s.shape == g.shape == v.shape):
        raise ValueError(f"shape mismatch: {s.shape}, {g.shape}, {v.shape}")
    sv = s[v]
    gv = g[v]
    if sv.size == 0:
        return 1.0, 1.0

    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    gv = gv[order]
    total_gt = int(gv.sum())

    # empty prediction at tau = the largest score (strict >)
    best = 1.0 if total_gt == 0 else 0.0
    best_tau = float(sv[0])

    # group boundaries: positions where the sorted value changes
    change = np.nonzero(np.diff(sv))[0]
    group_ends = np.append(change, sv.size - 1)  # inclusive end index per group
    tp_cum = np.cumsum(gv)

    for gi, end in enumerate(group_ends):
        included = int(end) + 1
        tp = int(tp_cum[end])
        if gi + 1 < len(group_ends):
            tau = float(sv[group_ends[gi] + 1])
        elif sv[end] > 0.0:
            tau = 0.0  # include-everything cut
        else:
            break  # score-0 pixels can never be predicted foreground
        denom = included + total_gt
        d = 1.0 if denom == 0 else 2.0 * tp / denom
        if d > best:
            best = d
            best_tau = tau
    return float(best), float(best_tau)


def dice_at_max_grid(scores, gt, valid, n: int = 255) -> tuple[float, float]:
    """Brute-force DICE@Max over the grid {0, 1/n, ..., 1} plus the unique
    score values. Retained as a test oracle for the exact sweep."""
    s = np.asarray(scores, dtype=np.float64)
    taus = np.union1d(np.arange(n + 1) / n, np.unique(s))
    best, best_tau = -1.0, 1.0
    for tau in taus[::-1]:  # descending so ties keep the larger tau
        d = dice(s > tau, gt, valid)
        if d > best:
            best, best_tau = d, float(tau)
    return best, best_tau


def next_click(scores, foreground, clicks: ClickSet) -> tuple[int, int]:
    """Least-similar foreground pixel not yet clicked (row-major tie-break)."""
    s = np.asarray(scores, dtype=np.float64)
    f = np.asarray(foreground, dtype=bool)
    if s.shape != f.shape:
        raise ValueError(f"shape mismatch: {s.shape} vs {f.shape}")
    eligible = f.copy()
    for r, c in clicks:
        eligible[r, c] = False
    if not eligible.any():
        raise ValueError("all foreground pixels have been clicked")
    masked = np.where(eligible, s, np.inf)
    flat = int(np.argmin(masked))  # first occurrence = smallest row, then col
    return flat // s.shape[1], flat % s.shape[1]


def _step_metrics(scores, foreground, valid, config: EvalConfig) -> tuple[float, float, float]:
    d_tau = dice(np.asarray(scores) > config.threshold, foreground, valid)
    n = config._grid_points()
    if n is None:
        d_max, best_tau = dice_at_max(scores, foreground, valid)
    else:
        d_max, best_tau = dice_at_max_grid(scores, foreground, valid, n=n)
    return d_tau, d_max, best_tau


def simulate_session(
    backend: "SegmentationBackend",
    cube: HyperCube,
    rgb: PseudoRgb,
    foreground,
    valid,
    config: EvalConfig,
) -> list[StepRecord]:
    """Run one simulated interactive session and return K step records.

    The first click is the center of the largest connected component of the
    foreground mask; later clicks come from the backend's own score map. If
    the foreground runs out of unclicked pixels early, the click set freezes
    and the remaining steps re-evaluate the same prediction.
    """
    f = np.asarray(foreground, dtype=bool)
    v = np.asarray(valid, dtype=bool)
    if not (f & v).any():
        raise ValueError("foreground mask has no valid pixels")

    clicks = ClickSet.of(largest_component_center(f, connectivity=config.connectivity))
    records: list[StepRecord] = []
    for step in range(1, config.max_clicks + 1):
        try:
            scores = backend.segment(cube, rgb, clicks)
        except Exception as exc:
            raise SessionError(f"backend failed at step {step} with {len(clicks)} clicks: {exc}") from exc
        d_tau, d_max, best_tau = _step_metrics(scores, f, v, config)
        records.append(
            StepRecord(step=step, dice_at_tau=d_tau, dice_at_max=d_max,
                       best_tau=best_tau, click=clicks.points[-1])
        )
        if step < config.max_clicks:
            remaining = f.copy()
            for r, c in clicks:
                remaining[r, c] = False
            if remaining.any():
                clicks = clicks.with_click(*next_click(scores, f, clicks))
    return records


def evaluate_dataset(
    backend: "SegmentationBackend",
    dataset: Sequence[tuple[HyperCube, LabelMap, PseudoRgb]],
    config: EvalConfig,
    method: str = "backend",
    dataset_name: str = "dataset",
    image_ids: Sequence[str] | None = None,
    jobs: int = 1,
) -> EvalReport:
    """One session per (image, labeled class); aggregates mean Dice per step.

    Sessions are independent and may run on several threads; results are
    keyed and sorted by (image id, class id), so the report is byte-identical
    regardless of scheduling.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    if image_ids is None:
        image_ids = [f"image_{i:03d}" for i in range(len(dataset))]
    if len(image_ids) != len(dataset):
        raise ValueError("image_ids length does not match dataset length")

    work: list[tuple[str, int, int]] = []
    for idx, (cube, labels, _rgb) in enumerate(dataset):
        labels.validate_against(cube)
        valid = labels.labels != labels.ignore_index
        for class_id in labels.valid_classes():
            if ((labels.labels == class_id) & valid).any():
                work.append((image_ids[idx], class_id, idx))
    if not work:
        raise ValueError("no labeled classes to evaluate")

    def _run(item: tuple[str, int, int]) -> TaskResult:
        image_id, class_id, idx = item
        cube, labels, rgb = dataset[idx]
        foreground = labels.labels == class_id
        valid = labels.labels != labels.ignore_index
        steps = simulate_session(backend, cube, rgb, foreground, valid, config)
        return TaskResult(image_id=image_id, class_id=class_id, steps=tuple(steps))

    if jobs <= 1:
        results = [_run(item) for item in work]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run, work))

    results.sort(key=lambda t: (t.image_id, t.class_id))
    k = config.max_clicks
    mean_tau = tuple(
        float(np.mean([t.steps[i].dice_at_tau for t in results])) for i in range(k)
    )
    mean_max = tuple(
        float(np.mean([t.steps[i].dice_at_max for t in results])) for i in range(k)
    )
    return EvalReport(
        method=method,
        dataset=dataset_name,
        config=config,
        tasks=tuple(results),
        mean_dice_at_tau=mean_tau,
        mean_dice_at_max=mean_max,
    )
