import numpy as np
import pytest

from nctorus import kernel
from nctorus.errors import ArgumentError


def naive_convolution(left, right):
    n = left.shape[1]
    out = np.zeros((len(left) + len(right) - 1, n, n), dtype=complex)
    for s in range(len(left)):
        for r in range(len(right)):
            out[s + r] += left[s] @ right[r]
    return out


def random_sequence(rng, length, n):
    return rng.normal(size=(length, n, n)) + 1j * rng.normal(size=(length, n, n))


@pytest.mark.parametrize("len_l, len_r", [(1, 5), (7, 3), (60, 70), (100, 49)])
def test_convolve_rods_matches_naive_sum(rng, len_l, len_r):
    left = random_sequence(rng, len_l, 2)
    right = random_sequence(rng, len_r, 2)
    expected = naive_convolution(left, right)
    np.testing.assert_allclose(kernel.convolve_rods(left, right), expected, atol=1e-10)


def test_split_rods_fills_gaps_with_zeros():
    modes = np.array([[0, 2, 0], [1, 1, 0], [0, 0, 0]], dtype=np.int64)
    values = np.arange(1, 4, dtype=complex).reshape(3, 1, 1)

    rods = kernel.split_rods(modes, values)

    assert [key for key, _, _ in rods] == [(0, 0), (1, 0)]
    key, lo, dense = rods[0]
    assert lo == 0
    np.testing.assert_array_equal(dense[:, 0, 0], [3, 0, 1])
    assert rods[1][1] == 1


def test_star_phase_is_one_without_deformation():
    modes = np.array([[1, -2, 3], [4, 5, -6]], dtype=np.int64)
    np.testing.assert_array_equal(kernel.star_phase(np.zeros((3, 3)), modes), [1, 1])


def test_encode_modes_preserves_lexicographic_order(rng):
    modes = rng.integers(-4, 5, size=(50, 3))
    keys = kernel.encode_modes(modes, 5)
    order = np.lexsort((modes[:, 2], modes[:, 1], modes[:, 0]))
    assert np.all(np.diff(keys[order]) >= 0)
    assert len(np.unique(keys)) == len(np.unique(modes, axis=0))


def test_unit_phase_reduces_argument():
    assert kernel.unit_phase(np.array(1e6 + 0.25)) == pytest.approx(1j, abs=1e-9)


def test_split_rods_breaks_at_wide_gaps():
    gap = kernel.GAP_LIMIT + 1
    modes = np.array([[0, 0, 0], [0, gap, 0], [0, gap + 2, 0]], dtype=np.int64)
    values = np.ones((3, 1, 1), dtype=complex)

    rods = kernel.split_rods(modes, values)

    assert [(key, lo, len(dense)) for key, lo, dense in rods] == [((0, 0), 0, 1), ((0, 0), gap, 3)]


def test_cluster_parts_keeps_distant_pieces_apart():
    one = np.ones((2, 1, 1), dtype=complex)
    parts = [(10**6, one), (0, one), (3, one)]

    runs = kernel.cluster_parts(parts)

    assert [(lo, hi) for lo, hi, _ in runs] == [(0, 5), (10**6, 10**6 + 2)]
    assert [lo for lo, _ in runs[0][2]] == [0, 3]


def test_encode_modes_rejects_overflowing_offset():
    with pytest.raises(ArgumentError):
        kernel.encode_modes(np.zeros((1, 3), dtype=np.int64), kernel.MAX_KEY_OFFSET + 1)


@pytest.mark.parametrize("far", [3, 10**7])
def test_match_modes_pairs_equal_rows(far):
    modes_a = np.array([[0, 0, 0], [1, far, -1], [2, 2, 2]], dtype=np.int64)
    modes_b = np.array([[1, far, -1], [5, 5, 5], [0, 0, 0]], dtype=np.int64)

    idx_a, idx_b = kernel.match_modes(modes_a, modes_b)

    pairs = sorted(zip(idx_a.tolist(), idx_b.tolist()))
    assert pairs == [(0, 2), (1, 0)]
