import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsiseg.imgproc import (
    connected_components,
    distance_transform,
    distance_transform_squared,
    histogram_equalize,
    largest_component_center,
    resize_bilinear,
)


def flood_fill_oracle(mask, connectivity):
    """Independent recursive-style flood fill (explicit stack, DFS order)."""
    offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)]
    if connectivity == 8:
        offsets += [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=int)
    current = 0
    for start in range(h * w):
        r, c = divmod(start, w)
        if not mask[r, c] or labels[r, c]:
            continue
        current += 1
        stack = [(r, c)]
        while stack:
            rr, cc = stack.pop()
            if not (0 <= rr < h and 0 <= cc < w):
                continue
            if not mask[rr, cc] or labels[rr, cc]:
                continue
            labels[rr, cc] = current
            for dr, dc in offsets:
                stack.append((rr + dr, cc + dc))
    return labels


def brute_force_edt_squared(mask):
    """O(n^2) scan over every false pixel, border ring included."""
    h, w = mask.shape
    falses = [
        (r, c)
        for r in range(-1, h + 1)
        for c in range(-1, w + 1)
        if r in (-1, h) or c in (-1, w) or not mask[r, c]
    ]
    out = np.zeros((h, w), dtype=np.int64)
    for r in range(h):
        for c in range(w):
            if mask[r, c]:
                out[r, c] = min((r - fr) ** 2 + (c - fc) ** 2 for fr, fc in falses)
    return out


class TestHistogramEqualize:
    def test_constant_unchanged(self):
        m = np.full((4, 4), 0.37)
        assert np.array_equal(histogram_equalize(m), m)

    def test_four_distinct_values(self):
        m = np.array([[0.1, 0.35], [0.6, 0.9]])
        out = histogram_equalize(m)
        assert sorted(out.ravel()) == pytest.approx([0.0, 1 / 3, 2 / 3, 1.0])

    def test_output_in_unit_range(self):
        rng = np.random.default_rng(5)
        out = histogram_equalize(rng.random((13, 7)))
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_rank_order_preserved(self):
        rng = np.random.default_rng(6)
        m = rng.random((9, 9))
        out = histogram_equalize(m)
        flat_in = m.ravel()
        flat_out = out.ravel()
        order = np.argsort(flat_in)
        assert (np.diff(flat_out[order]) >= -1e-15).all()

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(deadline=None, max_examples=25)
    def test_threshold_nestedness(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.random((8, 8))
        out = histogram_equalize(m)
        # equal inputs map to equal outputs; v1 <= v2 implies eq(v1) <= eq(v2)
        a, b = m.ravel(), out.ravel()
        for i in range(0, a.size, 7):
            le = a <= a[i]
            assert (b[le] <= b[i] + 1e-15).all()

    def test_single_bin_degenerate(self):
        m = np.array([[0.2, 0.8]])
        assert np.array_equal(histogram_equalize(m, bins=1), m)


class TestConnectedComponents:
    def test_empty_mask(self):
        labeling = connected_components(np.zeros((3, 3), bool))
        assert labeling.count == 0
        assert labeling.labels.max() == 0

    def test_diagonal_connectivity(self):
        mask = np.zeros((3, 3), bool)
        mask[0, 0] = mask[1, 1] = True
        assert connected_components(mask, 4).count == 2
        assert connected_components(mask, 8).count == 1

    def test_sizes_partition_mask(self):
        rng = np.random.default_rng(7)
        mask = rng.random((10, 10)) < 0.5
        labeling = connected_components(mask)
        assert sum(labeling.sizes) == int(mask.sum())
        assert ((labeling.labels > 0) == mask).all()

    def test_first_encounter_numbering(self):
        mask = np.array([[0, 1, 0, 1], [0, 1, 0, 1]], dtype=bool)
        labeling = connected_components(mask)
        assert labeling.labels[0, 1] == 1
        assert labeling.labels[0, 3] == 2

    @pytest.mark.parametrize("connectivity", [4, 8])
    def test_matches_flood_fill_oracle(self, connectivity):
        rng = np.random.default_rng(8)
        for _ in range(40):
            h, w = rng.integers(1, 9, size=2)
            mask = rng.random((h, w)) < rng.uniform(0.2, 0.8)
            ours = connected_components(mask, connectivity).labels
            oracle = flood_fill_oracle(mask, connectivity)
            # same partition: component membership must agree even if
            # the oracle numbers them in a different order
            assert (ours > 0).tolist() == (oracle > 0).tolist()
            for lab in range(1, ours.max() + 1):
                cells = ours == lab
                oracle_ids = np.unique(oracle[cells])
                assert len(oracle_ids) == 1
                assert (oracle == oracle_ids[0]).sum() == cells.sum()


class TestDistanceTransform:
    def test_single_pixel(self):
        mask = np.zeros((3, 3), bool)
        mask[1, 1] = True
        assert distance_transform(mask)[1, 1] == 1.0

    def test_false_pixels_zero(self):
        mask = np.zeros((2, 2), bool)
        assert np.array_equal(distance_transform(mask), np.zeros((2, 2)))

    def test_center_of_solid_square_is_deepest(self):
        d = distance_transform_squared(np.ones((3, 3), bool))
        assert d[1, 1] > d[0, 0]
        assert d[1, 1] == d.max()

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        for _ in range(60):
            h, w = rng.integers(1, 13, size=2)
            mask = rng.random((h, w)) < rng.uniform(0.3, 0.95)
            assert np.array_equal(distance_transform_squared(mask),
                                  brute_force_edt_squared(mask))


class TestLargestComponentCenter:
    def test_single_pixel(self):
        mask = np.zeros((4, 4), bool)
        mask[2, 3] = True
        assert largest_component_center(mask) == (2, 3)

    def test_solid_square_center(self):
        assert largest_component_center(np.ones((3, 3), bool)) == (1, 1)

    def test_picks_largest_component(self):
        mask = np.zeros((6, 10), bool)
        mask[0, 0:2] = True            # size 2
        mask[2:5, 3:7] = True          # size 12
        r, c = largest_component_center(mask)
        labeling = connected_components(mask)
        big = 1 + int(np.argmax(np.asarray(labeling.sizes)))
        assert labeling.labels[r, c] == big

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError, match="no true pixels"):
            largest_component_center(np.zeros((2, 2), bool))

    def test_tie_break_row_then_col(self):
        # two vertical bars of equal size: first-encounter component wins;
        # inside it every depth ties, so smallest row then col
        mask = np.zeros((3, 5), bool)
        mask[:, 0] = True
        mask[:, 4] = True
        assert largest_component_center(mask) == (0, 0)


class TestResizeBilinear:
    def test_identity(self):
        m = np.random.default_rng(10).random((5, 7))
        assert np.array_equal(resize_bilinear(m, 5, 7), m)

    def test_constant_from_single_pixel(self):
        out = resize_bilinear(np.array([[0.3]]), 4, 6)
        assert np.allclose(out, 0.3)
        assert out.shape == (4, 6)

    def test_corners_and_center_2x2_to_3x3(self):
        m = np.array([[0.0, 1.0], [0.2, 0.8]])
        out = resize_bilinear(m, 3, 3)
        assert out[0, 0] == 0.0 and out[0, 2] == 1.0
        assert out[2, 0] == 0.2 and out[2, 2] == 0.8
        assert out[1, 1] == pytest.approx(m.mean())

    @given(st.integers(min_value=0, max_value=2**32 - 1),
           st.integers(min_value=1, max_value=9),
           st.integers(min_value=1, max_value=9))
    @settings(deadline=None, max_examples=40)
    def test_never_overshoots(self, seed, out_h, out_w):
        rng = np.random.default_rng(seed)
        m = rng.random((int(rng.integers(1, 6)), int(rng.integers(1, 6))))
        out = resize_bilinear(m, out_h, out_w)
        assert out.min() >= m.min() - 1e-12
        assert out.max() <= m.max() + 1e-12
