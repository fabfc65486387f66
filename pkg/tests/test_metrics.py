import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsiseg.evaluation import dice, dice_at_max, dice_at_max_grid, dice_f1_check, next_click
from hsiseg.spectral import ClickSet


def _masks(pred_cells, gt_cells, shape, invalid_cells=()):
    pred = np.zeros(shape, bool)
    gt = np.zeros(shape, bool)
    valid = np.ones(shape, bool)
    for r, c in pred_cells:
        pred[r, c] = True
    for r, c in gt_cells:
        gt[r, c] = True
    for r, c in invalid_cells:
        valid[r, c] = False
    return pred, gt, valid


class TestDice:
    def test_perfect_match(self):
        p, g, v = _masks([(0, 0)], [(0, 0)], (1, 2))
        assert dice(p, g, v) == 1.0

    def test_disjoint(self):
        p, g, v = _masks([(0, 0)], [(0, 1)], (1, 2))
        assert dice(p, g, v) == 0.0

    def test_half_overlap(self):
        p, g, v = _masks([(0, 0), (0, 1)], [(0, 1), (0, 2)], (1, 3))
        assert dice(p, g, v) == 0.5

    def test_ignored_pixel_changes_count(self):
        p, g, v = _masks([(0, 0), (0, 1)], [(0, 1), (0, 2)], (1, 3), invalid_cells=[(0, 2)])
        assert dice(p, g, v) == pytest.approx(2 / 3)

    def test_empty_empty_is_one(self):
        p, g, v = _masks([], [], (2, 2))
        assert dice(p, g, v) == 1.0

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = rng.random((6, 6)) < 0.4
            g = rng.random((6, 6)) < 0.4
            v = rng.random((6, 6)) < 0.85
            d = dice(p, g, v)
            assert 0.0 <= d <= 1.0
            assert d == dice(g, p, v)

    def test_self_dice_is_one(self):
        rng = np.random.default_rng(1)
        a = rng.random((5, 5)) < 0.5
        v = np.ones((5, 5), bool)
        if a.any():
            assert dice(a, a, v) == 1.0

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            dice(np.zeros((2, 2), bool), np.zeros((3, 3), bool), np.ones((2, 2), bool))


class TestDiceF1:
    def test_equal_pair_random(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = rng.random((8, 8)) < rng.uniform(0.1, 0.9)
            g = rng.random((8, 8)) < rng.uniform(0.1, 0.9)
            v = rng.random((8, 8)) < 0.8
            d, f = dice_f1_check(p, g, v)
            assert abs(d - f) < 1e-12

    def test_empty_empty(self):
        p, g, v = _masks([], [], (2, 2))
        assert dice_f1_check(p, g, v) == (1.0, 1.0)

    def test_two_thirds_case(self):
        p, g, v = _masks([(0, 0), (0, 1)], [(0, 1), (0, 2)], (1, 3), invalid_cells=[(0, 2)])
        d, f = dice_f1_check(p, g, v)
        assert d == pytest.approx(2 / 3) and f == pytest.approx(2 / 3)


class TestDiceAtMax:
    def test_top_cut_perfect(self):
        scores = np.array([[0.9, 0.4]])
        gt = np.array([[True, False]])
        v = np.ones((1, 2), bool)
        best, tau = dice_at_max(scores, gt, v)
        assert best == 1.0
        assert tau == pytest.approx(0.4)  # strict >, so tau=0.4 keeps only 0.9

    def test_everything_cut_best(self):
        scores = np.array([[0.4, 0.9]])
        gt = np.array([[True, False]])
        v = np.ones((1, 2), bool)
        best, tau = dice_at_max(scores, gt, v)
        assert best == pytest.approx(2 / 3)
        assert tau < 0.4

    def test_equals_grid_oracle_on_random_maps(self):
        rng = np.random.default_rng(3)
        for i in range(100):
            scores = rng.random((8, 8))
            if i % 2:
                scores = np.round(scores * 255) / 255  # force duplicate values
            gt = rng.random((8, 8)) < 0.4
            v = rng.random((8, 8)) < 0.9
            exact, _ = dice_at_max(scores, gt, v)
            grid, _ = dice_at_max_grid(scores, gt, v)
            assert exact == grid

    def test_dominates_every_fixed_threshold(self):
        rng = np.random.default_rng(4)
        scores = rng.random((10, 10))
        gt = rng.random((10, 10)) < 0.3
        v = np.ones((10, 10), bool)
        best, _ = dice_at_max(scores, gt, v)
        for tau in np.arange(0, 256) / 255:
            assert best >= dice(scores > tau, gt, v)

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(deadline=None, max_examples=30)
    def test_invariant_under_strictly_increasing_transforms(self, seed):
        rng = np.random.default_rng(seed)
        scores = rng.random((6, 6))
        gt = rng.random((6, 6)) < 0.4
        v = rng.random((6, 6)) < 0.9
        base, _ = dice_at_max(scores, gt, v)
        squared, _ = dice_at_max(scores**2, gt, v)
        shifted, _ = dice_at_max((scores + 1) / 2, gt, v)
        assert base == squared == shifted

    def test_all_invalid(self):
        assert dice_at_max(np.zeros((2, 2)), np.zeros((2, 2), bool),
                           np.zeros((2, 2), bool)) == (1.0, 1.0)

    def test_best_tau_reproduces_best_dice(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            scores = rng.random((7, 7))
            gt = rng.random((7, 7)) < 0.35
            v = rng.random((7, 7)) < 0.9
            best, tau = dice_at_max(scores, gt, v)
            assert dice(scores > tau, gt, v) == best


class TestNextClick:
    def test_argmin(self):
        scores = np.array([[0.2, 0.9, 0.1]])
        f = np.ones((1, 3), bool)
        assert next_click(scores, f, ClickSet.of()) == (0, 2)

    def test_excluded_minimum(self):
        scores = np.array([[0.2, 0.9, 0.1]])
        f = np.ones((1, 3), bool)
        assert next_click(scores, f, ClickSet.of((0, 2))) == (0, 0)

    def test_tie_breaks_row_major(self):
        scores = np.array([[0.5, 0.5]])
        f = np.ones((1, 2), bool)
        assert next_click(scores, f, ClickSet.of()) == (0, 0)

    def test_restricted_to_foreground(self):
        scores = np.array([[0.0, 0.9], [0.5, 0.4]])
        f = np.array([[False, True], [True, True]])
        assert next_click(scores, f, ClickSet.of()) == (1, 1)

    def test_exhausted_raises(self):
        scores = np.zeros((1, 2))
        f = np.array([[True, False]])
        with pytest.raises(ValueError, match="clicked"):
            next_click(scores, f, ClickSet.of((0, 0)))
