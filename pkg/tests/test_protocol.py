import json
from dataclasses import dataclass

import numpy as np
import pytest

from hsiseg.backends import ScfBackend
from hsiseg.cube import BandTriple, pseudo_rgb
from hsiseg.evaluation import (
    EvalConfig,
    SessionError,
    evaluate_dataset,
    simulate_session,
)
from hsiseg.imgproc import largest_component_center
from hsiseg.phantom import PhantomSpec, generate
from hsiseg.spectral import ScfKind


@dataclass(frozen=True)
class OracleBackend:
    """Returns the ground-truth mask itself as a 1.0/0.0 score map."""

    foreground: np.ndarray

    def segment(self, cube, rgb, clicks):
        return self.foreground.astype(np.float64)


@dataclass(frozen=True)
class FailingBackend:
    def segment(self, cube, rgb, clicks):
        raise RuntimeError("synthetic failure")


def _task(seed=11, class_id=0):
    cube, labels = generate(PhantomSpec(16, 16, 8, n_materials=2, noise_sigma=0.0, seed=seed))
    rgb = pseudo_rgb(cube, BandTriple.default_for(cube.bands))
    foreground = labels.labels == class_id
    valid = labels.labels != labels.ignore_index
    return cube, labels, rgb, foreground, valid


class TestSimulateSession:
    def test_oracle_backend_is_perfect_everywhere(self):
        cube, _, rgb, f, v = _task()
        records = simulate_session(OracleBackend(f), cube, rgb, f, v, EvalConfig(max_clicks=5))
        assert len(records) == 5
        for rec in records:
            assert rec.dice_at_tau == 1.0
            assert rec.dice_at_max == 1.0

    def test_single_click_boundary(self):
        cube, _, rgb, f, v = _task()
        records = simulate_session(OracleBackend(f), cube, rgb, f, v, EvalConfig(max_clicks=1))
        assert len(records) == 1
        assert records[0].step == 1
        assert records[0].click == largest_component_center(f)

    def test_sa_on_noiseless_phantom_separates_at_step_one(self):
        cube, _, rgb, f, v = _task()
        records = simulate_session(ScfBackend(ScfKind.SA), cube, rgb, f, v,
                                   EvalConfig(max_clicks=3))
        assert records[0].dice_at_max == 1.0

    def test_clicks_unique_and_inside_foreground(self):
        cube, _, rgb, f, v = _task(seed=29, class_id=1)
        records = simulate_session(ScfBackend(ScfKind.SA), cube, rgb, f, v,
                                   EvalConfig(max_clicks=5))
        clicks = [rec.click for rec in records]
        assert len(set(clicks)) == len(clicks)
        for r, c in clicks:
            assert f[r, c]

    def test_step_invariant_max_ge_tau(self):
        cube, _, rgb, f, v = _task(seed=31)
        for kind in (ScfKind.SA, ScfKind.PCC, ScfKind.SA_EQUALIZED):
            for rec in simulate_session(ScfBackend(kind), cube, rgb, f, v,
                                        EvalConfig(max_clicks=4)):
                assert rec.dice_at_max >= rec.dice_at_tau

    def test_tiny_foreground_freezes_clicks(self):
        cube, _, rgb, f, v = _task()
        tiny = np.zeros_like(f)
        tiny[3, 3] = True  # single-pixel target, fewer pixels than clicks
        records = simulate_session(OracleBackend(tiny), cube, rgb, tiny, v,
                                   EvalConfig(max_clicks=4))
        assert len(records) == 4
        assert all(rec.click == (3, 3) for rec in records)

    def test_backend_failure_wrapped_with_step(self):
        cube, _, rgb, f, v = _task()
        with pytest.raises(SessionError, match="step 1"):
            simulate_session(FailingBackend(), cube, rgb, f, v, EvalConfig())

    def test_empty_foreground_rejected(self):
        cube, _, rgb, f, v = _task()
        with pytest.raises(ValueError, match="no valid pixels"):
            simulate_session(OracleBackend(f), cube, rgb, np.zeros_like(f), v, EvalConfig())

    def test_grid_sweep_mode(self):
        cube, _, rgb, f, v = _task()
        cfg = EvalConfig(max_clicks=2, threshold_sweep="grid(64)")
        records = simulate_session(ScfBackend(ScfKind.SA), cube, rgb, f, v, cfg)
        assert all(0.0 <= rec.dice_at_max <= 1.0 for rec in records)


def _dataset(n=2):
    items, ids = [], []
    for i in range(n):
        cube, labels = generate(PhantomSpec(12, 12, 6, n_materials=2, noise_sigma=0.0, seed=50 + i))
        rgb = pseudo_rgb(cube, BandTriple.default_for(cube.bands))
        items.append((cube, labels, rgb))
        ids.append(f"phantom_{i}")
    return items, ids


class TestEvaluateDataset:
    def test_oracle_means_are_one(self):
        items, ids = _dataset(1)
        cube, labels, rgb = items[0]
        backend = OracleBackend(labels.labels == 0)
        report = evaluate_dataset(
            backend, [(cube, _only_class(labels, 0), rgb)], EvalConfig(max_clicks=2),
            image_ids=["a"],
        )
        assert report.mean_dice_at_tau == (1.0, 1.0)
        assert report.mean_dice_at_max == (1.0, 1.0)

    def test_mean_is_arithmetic_over_tasks(self):
        items, ids = _dataset(2)
        report = evaluate_dataset(ScfBackend(ScfKind.SA), items, EvalConfig(max_clicks=2),
                                  image_ids=ids)
        per_task = [t.steps[0].dice_at_tau for t in report.tasks]
        assert report.mean_dice_at_tau[0] == pytest.approx(np.mean(per_task))
        assert report.n_tasks == 4  # 2 images x 2 classes

    def test_parallel_equals_sequential(self):
        items, ids = _dataset(3)
        a = evaluate_dataset(ScfBackend(ScfKind.SA_EQUALIZED), items, EvalConfig(max_clicks=3),
                             image_ids=ids, jobs=1)
        b = evaluate_dataset(ScfBackend(ScfKind.SA_EQUALIZED), items, EvalConfig(max_clicks=3),
                             image_ids=ids, jobs=8)
        assert a.to_json() == b.to_json()
        assert a.to_csv() == b.to_csv()

    def test_task_order_permutation_invariant_aggregates(self):
        items, ids = _dataset(3)
        fwd = evaluate_dataset(ScfBackend(ScfKind.SA), items, EvalConfig(max_clicks=2),
                               image_ids=ids)
        rev = evaluate_dataset(ScfBackend(ScfKind.SA), items[::-1], EvalConfig(max_clicks=2),
                               image_ids=ids[::-1])
        assert fwd.mean_dice_at_tau == rev.mean_dice_at_tau
        assert fwd.mean_dice_at_max == rev.mean_dice_at_max

    def test_ignored_class_skipped(self):
        cube, labels = generate(PhantomSpec(10, 10, 6, n_materials=2, seed=77))
        relabeled = labels.labels.copy()
        relabeled[labels.labels == 1] = 255  # mark class 1 pixels as ignored
        from hsiseg.cube import LabelMap

        lm = LabelMap(relabeled, ignore_index=255)
        rgb = pseudo_rgb(cube, BandTriple.default_for(cube.bands))
        report = evaluate_dataset(ScfBackend(ScfKind.SA), [(cube, lm, rgb)],
                                  EvalConfig(max_clicks=1))
        assert {t.class_id for t in report.tasks} == {0}

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            evaluate_dataset(ScfBackend(ScfKind.SA), [], EvalConfig())

    def test_report_json_schema(self):
        items, ids = _dataset(1)
        report = evaluate_dataset(ScfBackend(ScfKind.SA), items, EvalConfig(max_clicks=2),
                                  method="sa", dataset_name="toy", image_ids=ids)
        doc = json.loads(report.to_json())
        assert doc["method"] == "sa"
        assert doc["dataset"] == "toy"
        assert doc["n_tasks"] == len(doc["tasks"])
        assert len(doc["mean_dice_at_tau"]) == 2
        for task in doc["tasks"]:
            for step in task["steps"]:
                assert 0.0 <= step["dice_at_tau"] <= 1.0
                assert step["dice_at_max"] >= step["dice_at_tau"]

    def test_report_csv_schema(self):
        items, ids = _dataset(1)
        report = evaluate_dataset(ScfBackend(ScfKind.SA), items, EvalConfig(max_clicks=5),
                                  method="sa", dataset_name="toy", image_ids=ids)
        header, row = report.to_csv().strip().split("\n")
        assert header == "method,dataset,dice@0.5_1c,dice@max_1c,dice@0.5_5c,n_tasks"
        fields = row.split(",")
        assert fields[0] == "sa" and fields[1] == "toy"
        assert fields[5] == str(report.n_tasks)


def _only_class(labels, class_id):
    from hsiseg.cube import LabelMap

    keep = labels.labels.copy()
    keep[labels.labels != class_id] = labels.ignore_index
    keep[labels.labels == class_id] = class_id
    return LabelMap(keep, ignore_index=labels.ignore_index)
