"""
Twisted convolution kernel.

Elements are cut into "rods": all stored modes sharing (p1, p3), kept as a dense
array over p2. For a pair of rods the product phase

    exp(2iπ (θ21 p2 q1 + θ31 p3 q1 + θ32 p3 q2))

splits into a modulation of the left rod along p2, a modulation of the right rod
along q2 and a constant, so every rod pair is an ordinary 1D convolution of
matrix sequences. Short rods are convolved directly, long ones through FFT.

Summation order is fixed: rod pairs are visited in sorted order and added to the
output in that order, so results do not depend on scheduling.
"""

import logging
import typing as t

import numpy as np
from scipy import signal

from nctorus.errors import ArgumentError


logger = logging.getLogger(__name__)

# Below this (shorter) rod length a direct sum is faster and exact in ordering
DIRECT_LIMIT = 48

# Largest run of absent p2 modes stored as zeros inside one rod
GAP_LIMIT = DIRECT_LIMIT

# encode_modes keys need (2 offset + 1)^3 < 2^63
MAX_KEY_OFFSET = 1_048_575

Rod = t.Tuple[t.Tuple[int, int], int, np.ndarray]


def unit_phase(x: np.ndarray) -> np.ndarray:
    """exp(2iπx), with x reduced mod 1 first to keep the argument small."""
    return np.exp(2j * np.pi * np.mod(x, 1.0))


def split_rods(modes: np.ndarray, values: np.ndarray) -> t.List[Rod]:
    """
    Group modes by (p1, p3) into dense arrays over p2. A gap in p2 wider than
    GAP_LIMIT starts a new rod, so storage follows the support and not its span.
    """
    if len(modes) == 0:
        return []

    order = np.lexsort((modes[:, 1], modes[:, 2], modes[:, 0]))
    modes = modes[order]
    values = values[order]

    keys = modes[:, [0, 2]]
    new_key = np.any(keys[1:] != keys[:-1], axis=1)
    wide_gap = np.diff(modes[:, 1]) > GAP_LIMIT
    boundaries = np.nonzero(new_key | wide_gap)[0] + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [len(modes)]))

    rods = []
    n = values.shape[1]
    for start, end in zip(starts, ends):
        p2 = modes[start:end, 1]
        lo = int(p2[0])
        dense = np.zeros((int(p2[-1]) - lo + 1, n, n), dtype=complex)
        dense[p2 - lo] = values[start:end]
        rods.append(((int(modes[start, 0]), int(modes[start, 2])), lo, dense))
    return rods


def convolve_rods(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """out[r] = Σ_{s} left[s] @ right[r - s] for matrix sequences."""
    len_l, len_r = len(left), len(right)
    n = left.shape[1]

    if min(len_l, len_r) <= DIRECT_LIMIT:
        out = np.zeros((len_l + len_r - 1, n, n), dtype=complex)
        if len_l <= len_r:
            for s in range(len_l):
                out[s : s + len_r] += np.matmul(left[s], right)
        else:
            for s in range(len_r):
                out[s : s + len_l] += np.matmul(left, right[s])
        return out

    # Broadcast over (i, k, j) and contract k after the convolution
    full = signal.fftconvolve(left[:, :, :, None], right[:, None, :, :], axes=0)
    return full.sum(axis=2)


def cluster_parts(
    parts: t.List[t.Tuple[int, np.ndarray]]
) -> t.List[t.Tuple[int, int, t.List[t.Tuple[int, np.ndarray]]]]:
    """
    Group (lo, array) pieces of one output rod into (lo, hi, pieces) runs whose
    spans are at most GAP_LIMIT apart. Pieces keep their original order inside a run.
    """
    by_start = sorted(range(len(parts)), key=lambda i: parts[i][0])
    runs = []
    for i in by_start:
        part_lo, arr = parts[i]
        part_hi = part_lo + len(arr)
        if runs and part_lo - runs[-1][1] <= GAP_LIMIT:
            runs[-1][1] = max(runs[-1][1], part_hi)
            runs[-1][2].append(i)
        else:
            runs.append([part_lo, part_hi, [i]])
    return [(lo, hi, [parts[i] for i in sorted(members)]) for lo, hi, members in runs]


def twisted_convolution(
    theta: np.ndarray, rods_a: t.List[Rod], rods_b: t.List[Rod], n: int
) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Product of two elements given as rods. Returns (modes, values), not pruned
    and with possibly zero coefficients.
    """
    pieces = {}
    for (p1, p3), lo_a, arr_a in rods_a:
        p2 = np.arange(lo_a, lo_a + len(arr_a))
        for (q1, q3), lo_b, arr_b in rods_b:
            q2 = np.arange(lo_b, lo_b + len(arr_b))

            mod_a = arr_a * unit_phase(theta[1, 0] * q1 * p2)[:, None, None]
            mod_b = arr_b * unit_phase(theta[2, 1] * p3 * q2)[:, None, None]
            conv = convolve_rods(mod_a, mod_b)
            conv *= unit_phase(np.array(theta[2, 0] * p3 * q1))

            pieces.setdefault((p1 + q1, p3 + q3), []).append((lo_a + lo_b, conv))

    logger.debug(
        "twisted product: %d x %d rods -> %d rods", len(rods_a), len(rods_b), len(pieces)
    )

    all_modes = []
    all_values = []
    for (r1, r3), parts in sorted(pieces.items()):
        for lo, hi, cluster in cluster_parts(parts):
            buf = np.zeros((hi - lo, n, n), dtype=complex)
            for part_lo, arr in cluster:
                buf[part_lo - lo : part_lo - lo + len(arr)] += arr

            rod_modes = np.empty((hi - lo, 3), dtype=np.int64)
            rod_modes[:, 0] = r1
            rod_modes[:, 1] = np.arange(lo, hi)
            rod_modes[:, 2] = r3
            all_modes.append(rod_modes)
            all_values.append(buf)

    if not all_modes:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, n, n), dtype=complex)
    return np.concatenate(all_modes), np.concatenate(all_values)


def star_phase(theta: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """
    ω(p) = exp(2iπ Σ_{i>j} θ_ij p_i p_j), the phase carrying
    U3^{-p3} U2^{-p2} U1^{-p1} into canonical order.
    """
    p1, p2, p3 = modes[:, 0], modes[:, 1], modes[:, 2]
    return unit_phase(theta[1, 0] * p2 * p1 + theta[2, 0] * p3 * p1 + theta[2, 1] * p3 * p2)


def encode_modes(modes: np.ndarray, offset: int) -> np.ndarray:
    """Pack modes into sortable int64 keys; |p_i| must stay below offset."""
    if offset > MAX_KEY_OFFSET:
        raise ArgumentError(f"mode keys overflow int64 beyond offset {MAX_KEY_OFFSET}, got {offset}")
    width = 2 * offset + 1
    shifted = modes + offset
    return (shifted[:, 0] * width + shifted[:, 1]) * width + shifted[:, 2]


def match_modes(modes_a: np.ndarray, modes_b: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """Indices (ia, ib) with modes_a[ia] == modes_b[ib]; both inputs hold unique rows."""
    radius = max(int(np.abs(modes_a).max(initial=0)), int(np.abs(modes_b).max(initial=0)))
    if radius + 1 <= MAX_KEY_OFFSET:
        keys_a = encode_modes(modes_a, radius + 1)
        keys_b = encode_modes(modes_b, radius + 1)
        _, idx_a, idx_b = np.intersect1d(keys_a, keys_b, assume_unique=True, return_indices=True)
        return idx_a, idx_b

    # Equal rows become neighbours after a stable sort, rows of modes_a first
    rows = np.concatenate((modes_a, modes_b))
    order = np.lexsort((rows[:, 2], rows[:, 1], rows[:, 0]))
    ordered = rows[order]
    hits = np.nonzero(np.all(ordered[1:] == ordered[:-1], axis=1))[0]
    return order[hits], order[hits + 1] - len(modes_a)
