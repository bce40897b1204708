"""Numba kernels for the sequential inner loops (dead time, GF(2) rank,
Berlekamp-Massey, template scanning).  Everything here has a pure-python
oracle in the test suite."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def min_gap_filter(times, gap, last):
    """Greedy nonparalyzable filter: keep an entry iff it is >= ``gap`` after
    the last kept entry.  ``last`` carries state across chunks (-inf to
    start).  Returns (keep mask, updated last)."""
    keep = np.zeros(times.size, dtype=np.bool_)
    for i in range(times.size):
        if times[i] >= last + gap:
            keep[i] = True
            last = times[i]
    return keep, last


@njit(cache=True)
def gf2_rank_many(rows, ncols):
    """Rank over GF(2) of many square matrices.

    ``rows[k, i]`` is row i of matrix k packed into a uint64 (bit j = column j).
    """
    nmat, nrows = rows.shape
    out = np.empty(nmat, dtype=np.int64)
    work = np.empty(nrows, dtype=np.uint64)
    one = np.uint64(1)
    for k in range(nmat):
        for i in range(nrows):
            work[i] = rows[k, i]
        rank = 0
        for col in range(ncols - 1, -1, -1):
            colbit = np.uint64(col)
            pivot = -1
            for r in range(rank, nrows):
                if (work[r] >> colbit) & one:
                    pivot = r
                    break
            if pivot < 0:
                continue
            tmp = work[rank]
            work[rank] = work[pivot]
            work[pivot] = tmp
            for r in range(nrows):
                if r != rank and ((work[r] >> colbit) & one):
                    work[r] ^= work[rank]
            rank += 1
        out[k] = rank
    return out


@njit(cache=True)
def linear_complexities(bits, m):
    """Berlekamp-Massey linear complexity of each length-``m`` block of
    ``bits`` (uint8 0/1).  Connection polynomials are kept bit-packed in
    uint64 words; the history window is maintained in reversed bit order so
    the discrepancy is a masked popcount."""
    nblocks = bits.size // m
    nwords = (m + 2) // 64 + 1
    out = np.empty(nblocks, dtype=np.int64)
    c = np.empty(nwords, dtype=np.uint64)
    b = np.empty(nwords, dtype=np.uint64)
    hist = np.empty(nwords, dtype=np.uint64)
    one = np.uint64(1)
    for blk in range(nblocks):
        base = blk * m
        for w in range(nwords):
            c[w] = 0
            b[w] = 0
            hist[w] = 0
        c[0] = one
        b[0] = np.uint64(2)  # b holds B(x) pre-shifted; the shift count starts at 1
        length = 0
        for n in range(m):
            # slide the reversed window left by one and insert s_n at bit 0
            for w in range(nwords - 1, 0, -1):
                hist[w] = (hist[w] << one) | (hist[w - 1] >> np.uint64(63))
            hist[0] = (hist[0] << one) | np.uint64(bits[base + n])
            # discrepancy = parity of popcount(c & hist)
            acc = np.uint64(0)
            for w in range(nwords):
                v = c[w] & hist[w]
                # popcount via parallel bit folding
                v ^= v >> np.uint64(1)
                v ^= v >> np.uint64(2)
                v ^= v >> np.uint64(4)
                v ^= v >> np.uint64(8)
                v ^= v >> np.uint64(16)
                v ^= v >> np.uint64(32)
                acc ^= v & one
            if acc:
                if 2 * length <= n:
                    # save old c before updating, then swap roles
                    for w in range(nwords):
                        tmp = c[w]
                        c[w] = tmp ^ b[w]
                        b[w] = tmp
                    length = n + 1 - length
                else:
                    for w in range(nwords):
                        c[w] ^= b[w]
            # b tracks the previous polynomial shifted once per step
            for w in range(nwords - 1, 0, -1):
                b[w] = (b[w] << one) | (b[w - 1] >> np.uint64(63))
            b[0] = b[0] << one
        out[blk] = length
    return out


@njit(cache=True)
def nonoverlapping_counts(positions, block_len, m, n_blocks):
    """Greedy non-overlapping occurrence counts per block.

    ``positions`` are ascending window start indexes of template matches in
    the whole stream.  Matches straddling a block boundary are ignored and a
    match consumes ``m`` bits before the next one may be counted."""
    counts = np.zeros(n_blocks, dtype=np.int64)
    next_free = -1
    current = -1
    for p in positions:
        blk = p // block_len
        if blk >= n_blocks:
            break
        if p % block_len > block_len - m:
            continue
        if blk != current:
            current = blk
            next_free = -1
        if p >= next_free:
            counts[blk] += 1
            next_free = p + m
    return counts
