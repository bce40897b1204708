"""The fifteen randomness tests of NIST SP 800-22 rev. 1a.

Every test maps a bit stream to one or more p-values and a pass decision at
a significance level alpha (a result "passes" only if every emitted p-value
is >= alpha).  Tests whose length or pre-test requirements fail return
``applicable=False``; ``check_length=False`` waives the length requirements
so the standard's short worked examples can be reproduced.

frequency, block_frequency, runs, cumulative_sums, serial and
approximate_entropy stream over the packed bytes in constant memory; the
remaining tests unpack the sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .._kernels import gf2_rank_many, linear_complexities, nonoverlapping_counts
from ..bits import BitStream
from .special import erfc, igamc, normal_cdf

_CHUNK_BYTES = 1 << 17  # 2**20 bits per unpacked chunk


@dataclass(frozen=True)
class TestResult:
    """Outcome of one statistical test on one bit stream."""

    test_name: str
    p_values: tuple[float, ...]
    applicable: bool
    passed: bool | None
    p_labels: tuple[str, ...] = ()
    stats: dict = field(default_factory=dict)

    def min_p(self) -> float:
        return min(self.p_values)


def _result(name: str, p_values, alpha: float, labels=(), **stats) -> TestResult:
    pv = tuple(float(min(max(p, 0.0), 1.0)) for p in p_values)
    return TestResult(name, pv, True, all(p >= alpha for p in pv),
                      tuple(labels), stats)


def _not_applicable(name: str, reason: str) -> TestResult:
    return TestResult(name, (), False, None, (), {"reason": reason})


def _as_bitstream(bits) -> BitStream:
    if isinstance(bits, BitStream):
        return bits
    return BitStream.from_array(np.asarray(bits))


def _iter_chunks(bs: BitStream, chunk_bytes: int = _CHUNK_BYTES):
    full = bs.n_bits // 8
    for i in range(0, full, chunk_bytes):
        yield np.unpackbits(bs.data[i:min(i + chunk_bytes, full)])
    rem = bs.n_bits - full * 8
    if rem:
        yield np.unpackbits(bs.data[full:full + 1])[:rem]


# ---------------------------------------------------------------------------
# frequency / block frequency / runs / cusum (streaming)

def frequency_monobit(bits, alpha: float = 0.01, check_length: bool = True) -> TestResult:
    """Balance of ones and zeros: p = erfc(|S| / sqrt(2n))."""
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if n == 0 or (check_length and n < 100):
        return _not_applicable("frequency", f"needs >= 100 bits, got {n}")
    s = 2 * bs.ones_count() - n
    p = erfc(abs(s) / math.sqrt(n) / math.sqrt(2.0))
    return _result("frequency", [p], alpha, S=s)


def block_frequency(bits, block_len: int = 128, alpha: float = 0.01,
                    check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if block_len < 2:
        raise ValueError("block_len must be >= 2")
    n_blocks = n // block_len
    if n_blocks == 0 or (check_length and n < 100):
        return _not_applicable("block_frequency", f"needs >= 100 bits, got {n}")
    acc = 0.0
    carry = np.empty(0, dtype=np.uint8)
    done = 0
    for chunk in _iter_chunks(bs):
        arr = np.concatenate([carry, chunk]) if carry.size else chunk
        usable = min(arr.size // block_len, n_blocks - done)
        if usable:
            pis = arr[:usable * block_len].reshape(usable, block_len).mean(axis=1)
            acc += float(((pis - 0.5) ** 2).sum())
            done += usable
        carry = arr[usable * block_len:]
    chi2 = 4.0 * block_len * acc
    p = igamc(n_blocks / 2.0, chi2 / 2.0)
    return _result("block_frequency", [p], alpha, chi2=chi2, n_blocks=n_blocks)


def runs_test(bits, alpha: float = 0.01, check_length: bool = True) -> TestResult:
    """Number of runs vs. expectation; pre-test requires |pi - 1/2| < 2/sqrt(n)."""
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if n == 0 or (check_length and n < 100):
        return _not_applicable("runs", f"needs >= 100 bits, got {n}")
    pi = bs.ones_count() / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return _not_applicable("runs", f"ones fraction {pi:.4f} fails the pre-test")
    switches = 0
    prev = None
    for chunk in _iter_chunks(bs):
        if prev is not None and chunk.size:
            switches += int(chunk[0] != prev)
        switches += int(np.count_nonzero(np.diff(chunk)))
        if chunk.size:
            prev = chunk[-1]
    v = switches + 1
    p = erfc(abs(v - 2.0 * n * pi * (1 - pi))
             / (2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)))
    return _result("runs", [p], alpha, V=v, pi=pi)


def cumulative_sums(bits, alpha: float = 0.01, check_length: bool = True) -> TestResult:
    """Maximum excursion of the +-1 random walk, forward and reverse."""
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if n == 0 or (check_length and n < 100):
        return _not_applicable("cumulative_sums", f"needs >= 100 bits, got {n}")
    s = 0
    gmin = gmax = 0  # over all prefix sums S_0..S_n
    for chunk in _iter_chunks(bs):
        cs = np.cumsum(2 * chunk.astype(np.int64) - 1) + s
        gmin = min(gmin, int(cs.min()))
        gmax = max(gmax, int(cs.max()))
        s = int(cs[-1])
    z_fwd = max(-gmin, gmax)
    z_rev = max(s - gmin, gmax - s)

    def pval(z: int) -> float:
        if z == 0:
            return 0.0
        sq = math.sqrt(n)
        a = sum(normal_cdf((4 * k + 1) * z / sq) - normal_cdf((4 * k - 1) * z / sq)
                for k in range(math.floor((-n / z + 1) / 4),
                               math.floor((n / z - 1) / 4) + 1))
        b = sum(normal_cdf((4 * k + 3) * z / sq) - normal_cdf((4 * k + 1) * z / sq)
                for k in range(math.floor((-n / z - 3) / 4),
                               math.floor((n / z - 1) / 4) + 1))
        return 1.0 - a + b

    return _result("cumulative_sums", [pval(z_fwd), pval(z_rev)], alpha,
                   labels=("forward", "reverse"), z_forward=z_fwd, z_reverse=z_rev)


# ---------------------------------------------------------------------------
# longest run of ones

_LONGEST_RUN_REGIMES = (
    # (min n, block len, category lower edges, category probabilities)
    (750000, 10**4, (10, 11, 12, 13, 14, 15, 16),
     (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6272, 128, (4, 5, 6, 7, 8, 9),
     (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, (1, 2, 3, 4),
     (0.2148, 0.3672, 0.2305, 0.1875)),
)


def longest_run_of_ones(bits, alpha: float = 0.01,
                        check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if n < 128:
        return _not_applicable("longest_run", f"needs >= 128 bits, got {n}")
    for min_n, m, edges, pis in _LONGEST_RUN_REGIMES:
        if n >= min_n:
            break
    n_blocks = n // m
    arr = bs.to_array()[: n_blocks * m].reshape(n_blocks, m)
    counts = np.zeros(len(pis), dtype=np.int64)
    lo, hi = edges[0], edges[-1]
    for row in arr:
        zpos = np.flatnonzero(row == 0)
        longest = int(np.diff(np.concatenate([[-1], zpos, [m]])).max()) - 1
        counts[min(max(longest, lo), hi) - lo] += 1
    expected = n_blocks * np.asarray(pis)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p = igamc((len(pis) - 1) / 2.0, chi2 / 2.0)
    return _result("longest_run", [p], alpha, chi2=chi2, block_len=m,
                   counts=counts.tolist())


# ---------------------------------------------------------------------------
# binary matrix rank

@lru_cache(maxsize=None)
def _rank_probs(m: int) -> tuple[float, float, float]:
    """Exact (P[rank=m], P[rank=m-1], P[rank<=m-2]) for a random m x m
    GF(2) matrix."""

    def prob(r: int) -> float:
        v = 2.0 ** (r * (2 * m - r) - m * m)
        for i in range(r):
            v *= (1.0 - 2.0 ** (i - m)) ** 2 / (1.0 - 2.0 ** (i - r))
        return v

    pf, pm1 = prob(m), prob(m - 1)
    return pf, pm1, 1.0 - pf - pm1


def binary_matrix_rank(bits, matrix_size: int = 32, alpha: float = 0.01,
                       check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    m = matrix_size
    if not 2 <= m <= 64:
        raise ValueError("matrix_size must be in [2, 64]")
    n_mat = bs.n_bits // (m * m)
    if n_mat == 0 or (check_length and n_mat < 38):
        return _not_applicable("rank", f"needs >= 38 {m}x{m} matrices, got {n_mat}")
    arr = bs.to_array()[: n_mat * m * m].reshape(n_mat, m, m)
    powers = (np.uint64(1) << np.arange(m, dtype=np.uint64))[::-1]
    rows = (arr.astype(np.uint64) * powers).sum(axis=2, dtype=np.uint64)
    ranks = gf2_rank_many(rows, m)
    pf, pm1, ple = _rank_probs(m)
    counts = np.array([(ranks == m).sum(), (ranks == m - 1).sum(), 0], dtype=np.int64)
    counts[2] = n_mat - counts[0] - counts[1]
    expected = n_mat * np.array([pf, pm1, ple])
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p = igamc(1.0, chi2 / 2.0)
    return _result("rank", [p], alpha, chi2=chi2, n_matrices=n_mat,
                   counts=counts.tolist())


# ---------------------------------------------------------------------------
# spectral

def dft_spectral(bits, alpha: float = 0.01, check_length: bool = True) -> TestResult:
    """Fraction of DFT peak magnitudes below the 95 % threshold."""
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if n < 2 or (check_length and n < 1000):
        return _not_applicable("dft", f"needs >= 1000 bits, got {n}")
    x = 2.0 * bs.to_array().astype(np.float64) - 1.0
    magnitudes = np.abs(np.fft.rfft(x)[: n // 2])
    threshold = math.sqrt(math.log(1.0 / 0.05) * n)
    n0 = 0.95 * n / 2.0
    n1 = int((magnitudes < threshold).sum())
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    p = erfc(abs(d) / math.sqrt(2.0))
    return _result("dft", [p], alpha, d=d, below=n1)


# ---------------------------------------------------------------------------
# template tests

@lru_cache(maxsize=None)
def aperiodic_templates(m: int) -> tuple[tuple[int, ...], ...]:
    """All length-m templates that cannot overlap a shifted copy of
    themselves (148 of them for m = 9)."""
    out = []
    for w in range(2 ** m):
        t = tuple((w >> (m - 1 - j)) & 1 for j in range(m))
        if all(t[k:] != t[: m - k] for k in range(1, m)):
            out.append(t)
    return tuple(out)


def _window_values(arr: np.ndarray, m: int) -> np.ndarray:
    """Integer value of each overlapping m-bit window (MSB-first)."""
    powers = (1 << np.arange(m - 1, -1, -1)).astype(np.int64)
    view = np.lib.stride_tricks.sliding_window_view(arr, m)
    return view.astype(np.int64) @ powers


def non_overlapping_templates(bits, template_len: int = 9, n_blocks: int = 8,
                              templates=None, alpha: float = 0.01,
                              check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    m, nb = template_len, n_blocks
    n = bs.n_bits
    block_len = n // nb
    mean = (block_len - m + 1) / 2.0 ** m
    if block_len < m or (check_length and mean < 1.0):
        return _not_applicable(
            "non_overlapping_template",
            f"blocks of {block_len} bits are too short for m={m} templates")
    var = block_len * (1.0 / 2 ** m - (2.0 * m - 1.0) / 2 ** (2 * m))
    if templates is None:
        templates = aperiodic_templates(m)
    arr = bs.to_array()[: nb * block_len]
    w = _window_values(arr, m)
    order = np.argsort(w, kind="stable")
    sorted_w = w[order]
    pvals, labels = [], []
    for t in templates:
        value = int("".join(map(str, t)), 2)
        lo, hi = np.searchsorted(sorted_w, [value, value + 1])
        counts = nonoverlapping_counts(order[lo:hi].astype(np.int64),
                                       block_len, m, nb)
        chi2 = float(((counts - mean) ** 2 / var).sum())
        pvals.append(igamc(nb / 2.0, chi2 / 2.0))
        labels.append("".join(map(str, t)))
    return _result("non_overlapping_template", pvals, alpha, labels=labels,
                   block_len=block_len, mean=mean, variance=var)


# Exact category probabilities for the standard battery geometry
# (m=9, block 1032, K=5); the Poisson-mixture formula is used otherwise.
_OVERLAP_PI_DEFAULT = (0.364091, 0.185659, 0.139381, 0.100571, 0.070432, 0.139865)


def _overlap_probs(k_cats: int, eta: float) -> np.ndarray:
    out = np.empty(k_cats + 1)
    out[0] = math.exp(-eta)
    for u in range(1, k_cats):
        total = 0.0
        for l in range(1, u + 1):
            total += math.exp(-eta - u * math.log(2) + l * math.log(eta)
                              - math.lgamma(l + 1) + math.lgamma(u)
                              - math.lgamma(l) - math.lgamma(u - l + 1))
        out[u] = total
    out[k_cats] = 1.0 - out[:k_cats].sum()
    return out


def overlapping_templates(bits, template_len: int = 9, block_len: int = 1032,
                          k_cats: int = 5, alpha: float = 0.01,
                          check_length: bool = True) -> TestResult:
    """Occurrences of the all-ones template, counted with overlap."""
    bs = _as_bitstream(bits)
    m = template_len
    n_blocks = bs.n_bits // block_len
    if block_len < m or n_blocks == 0:
        return _not_applicable("overlapping_template",
                               f"needs blocks of >= {m} bits")
    if (m, block_len, k_cats) == (9, 1032, 5):
        pis = np.asarray(_OVERLAP_PI_DEFAULT)
    else:
        lam = (block_len - m + 1) / 2.0 ** m
        pis = _overlap_probs(k_cats, lam / 2.0)
    if check_length and n_blocks * pis.min() < 5.0:
        return _not_applicable(
            "overlapping_template",
            f"{n_blocks} blocks give expected category counts below 5")
    arr = bs.to_array()[: n_blocks * block_len]
    cums = np.concatenate([[0], np.cumsum(arr, dtype=np.int64)])
    window_sums = cums[m:] - cums[:-m]
    pos = np.flatnonzero(window_sums == m)
    pos = pos[pos % block_len <= block_len - m]
    per_block = np.bincount(pos // block_len, minlength=n_blocks)
    counts = np.bincount(np.minimum(per_block, k_cats), minlength=k_cats + 1)
    expected = n_blocks * pis
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p = igamc(k_cats / 2.0, chi2 / 2.0)
    return _result("overlapping_template", [p], alpha, chi2=chi2,
                   counts=counts.tolist(), n_blocks=n_blocks)


# ---------------------------------------------------------------------------
# Maurer's universal statistical test

_UNIVERSAL_TABLE = {
    1: (0.7326495, 0.690), 2: (1.5374383, 1.338), 3: (2.4016068, 1.901),
    4: (3.3112247, 2.358), 5: (4.2534266, 2.705), 6: (5.2177052, 2.954),
    7: (6.1962507, 3.125), 8: (7.1836656, 3.238), 9: (8.1764248, 3.311),
    10: (9.1723243, 3.356), 11: (10.170032, 3.384), 12: (11.168765, 3.401),
    13: (12.168070, 3.410), 14: (13.167693, 3.416), 15: (14.167488, 3.419),
    16: (15.167379, 3.421),
}
_UNIVERSAL_THRESHOLDS = (
    (1059061760, 16), (496435200, 15), (231669760, 14), (107560960, 13),
    (49643520, 12), (22753280, 11), (10342400, 10), (4654080, 9),
    (2068480, 8), (904960, 7), (387840, 6),
)


def maurer_universal(bits, block_len: int | None = None,
                     init_blocks: int | None = None, alpha: float = 0.01,
                     check_length: bool = True) -> TestResult:
    """Mean log-distance between repeats of L-bit blocks."""
    bs = _as_bitstream(bits)
    n = bs.n_bits
    if block_len is None:
        for threshold, candidate in _UNIVERSAL_THRESHOLDS:
            if n >= threshold:
                block_len = candidate
                break
        else:
            return _not_applicable("universal", f"needs >= 387840 bits, got {n}")
    length = block_len
    q = init_blocks if init_blocks is not None else 10 * 2 ** length
    nb = n // length
    k = nb - q
    if k < 1:
        return _not_applicable("universal", "not enough blocks after initialization")
    arr = bs.to_array()[: nb * length]
    powers = (1 << np.arange(length - 1, -1, -1)).astype(np.int64)
    values = arr.reshape(nb, length).astype(np.int64) @ powers
    idx = np.arange(1, nb + 1, dtype=np.int64)
    order = np.argsort(values, kind="stable")
    sv = values[order]
    si = idx[order]
    prev_sorted = np.concatenate([[0], si[:-1]])
    prev_sorted[np.concatenate([[True], sv[1:] != sv[:-1]])] = 0
    prev = np.empty(nb, dtype=np.int64)
    prev[order] = prev_sorted
    distances = (idx - prev)[q:]
    fn = float(np.log2(distances).sum() / k)
    expected, variance = _UNIVERSAL_TABLE[length]
    c = 0.7 - 0.8 / length + (4.0 + 32.0 / length) * k ** (-3.0 / length) / 15.0
    sigma = c * math.sqrt(variance / k)
    p = erfc(abs(fn - expected) / (math.sqrt(2.0) * sigma))
    return _result("universal", [p], alpha, fn=fn, L=length, Q=q, K=k)


# ---------------------------------------------------------------------------
# serial & approximate entropy (streaming m-gram counts)

def _cyclic_mgram_counts(bs: BitStream, m: int) -> np.ndarray:
    """Counts of the n overlapping m-bit windows of the cyclically extended
    stream, in one chunked pass."""
    counts = np.zeros(2 ** m, dtype=np.int64)
    carry = np.empty(0, dtype=np.uint8)
    first_bits: np.ndarray | None = None
    for chunk in _iter_chunks(bs):
        if first_bits is None:
            first_bits = chunk[: m - 1].copy()
        arr = np.concatenate([carry, chunk]) if carry.size else chunk
        if arr.size >= m:
            counts += np.bincount(_window_values(arr, m), minlength=2 ** m)
            carry = arr[arr.size - (m - 1):] if m > 1 else arr[:0]
        else:
            carry = arr
    # wrap-around windows touching the start of the stream
    if first_bits is None:
        return counts
    tail = np.concatenate([carry, first_bits])
    if tail.size >= m:
        counts += np.bincount(_window_values(tail, m), minlength=2 ** m)
    return counts


def _fold_counts(counts: np.ndarray) -> np.ndarray:
    """(m)-gram counts from cyclic (m+1)-gram counts: sum over the last bit."""
    return counts.reshape(-1, 2).sum(axis=1)


def serial_test(bits, pattern_len: int = 2, alpha: float = 0.01,
                check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    m, n = pattern_len, bs.n_bits
    if m < 2:
        raise ValueError("pattern_len must be >= 2")
    if n == 0 or (check_length and (n < 100 or m >= math.log2(n) - 2)):
        return _not_applicable("serial", f"needs m < log2(n) - 2, got m={m}, n={n}")

    counts_m = _cyclic_mgram_counts(bs, m)

    def psi2(counts: np.ndarray, order: int) -> float:
        if order == 0:
            return 0.0
        return (2.0 ** order / n) * float((counts.astype(np.float64) ** 2).sum()) - n

    counts_m1 = _fold_counts(counts_m)
    counts_m2 = _fold_counts(counts_m1) if m >= 2 else None
    psi_m = psi2(counts_m, m)
    psi_m1 = psi2(counts_m1, m - 1)
    psi_m2 = psi2(counts_m2, m - 2) if m >= 2 else 0.0
    d1 = max(psi_m - psi_m1, 0.0)
    d2 = max(psi_m - 2.0 * psi_m1 + psi_m2, 0.0)
    p1 = igamc(2.0 ** (m - 2), d1 / 2.0)
    p2 = igamc(2.0 ** (m - 3), d2 / 2.0)
    return _result("serial", [p1, p2], alpha, labels=("del1", "del2"),
                   psi2_m=psi_m, del1=d1, del2=d2)


def approximate_entropy(bits, pattern_len: int = 2, alpha: float = 0.01,
                        check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    m, n = pattern_len, bs.n_bits
    if m < 1:
        raise ValueError("pattern_len must be >= 1")
    if n == 0 or (check_length and (n < 100 or m + 1 >= math.log2(n) - 2)):
        return _not_applicable("approximate_entropy",
                               f"needs m + 1 < log2(n) - 2, got m={m}, n={n}")
    counts_hi = _cyclic_mgram_counts(bs, m + 1)
    counts_lo = _fold_counts(counts_hi)

    def phi(counts: np.ndarray) -> float:
        c = counts[counts > 0].astype(np.float64) / n
        return float((c * np.log(c)).sum())

    apen = phi(counts_lo) - phi(counts_hi)
    chi2 = max(2.0 * n * (math.log(2.0) - apen), 0.0)
    p = igamc(2.0 ** (m - 1), chi2 / 2.0)
    return _result("approximate_entropy", [p], alpha, apen=apen, chi2=chi2)


# ---------------------------------------------------------------------------
# linear complexity

_LINCOMP_PI = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)


def linear_complexity(bits, block_len: int = 500, alpha: float = 0.01,
                      check_length: bool = True) -> TestResult:
    bs = _as_bitstream(bits)
    m = block_len
    if m < 4:
        raise ValueError("block_len must be >= 4")
    n_blocks = bs.n_bits // m
    if n_blocks == 0 or (check_length and n_blocks * min(_LINCOMP_PI) < 5.0):
        return _not_applicable(
            "linear_complexity",
            f"{n_blocks} blocks of {m} bits give expected category counts below 5")
    arr = bs.to_array()[: n_blocks * m]
    lengths = linear_complexities(arr, m)
    mean = (m / 2.0 + (9.0 + (-1.0) ** (m + 1)) / 36.0
            - (m / 3.0 + 2.0 / 9.0) / 2.0 ** m)
    t = (-1.0) ** m * (lengths - mean) + 2.0 / 9.0
    cats = np.searchsorted([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5], t, side="left")
    counts = np.bincount(cats, minlength=7)
    expected = n_blocks * np.asarray(_LINCOMP_PI)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p = igamc(3.0, chi2 / 2.0)
    return _result("linear_complexity", [p], alpha, chi2=chi2,
                   counts=counts.tolist(), mean=mean)


# ---------------------------------------------------------------------------
# random excursions

_EXCURSION_STATES = (-4, -3, -2, -1, 1, 2, 3, 4)
_VARIANT_STATES = tuple(x for x in range(-9, 10) if x != 0)


def _walk(bs: BitStream) -> tuple[np.ndarray, np.ndarray, int]:
    """Partial sums of the +-1 walk, per-step cycle ids, and cycle count J
    for the zero-padded walk."""
    s = np.cumsum(2 * bs.to_array().astype(np.int64) - 1)
    zero = s == 0
    cycle_id = np.concatenate([[0], np.cumsum(zero[:-1])])
    j = int(zero.sum()) + (0 if s[-1] == 0 else 1)
    return s, cycle_id, j


def _excursion_probs(x: int) -> np.ndarray:
    ax = abs(x)
    a = 1.0 - 1.0 / (2.0 * ax)
    pis = [a]
    pis += [a ** (k - 1) / (4.0 * x * x) for k in range(1, 5)]
    pis.append(a ** 4 / (2.0 * ax))
    return np.asarray(pis)


def random_excursions(bits, alpha: float = 0.01,
                      check_length: bool = True) -> TestResult:
    """Visit counts to states +-1..+-4 per zero-to-zero excursion."""
    bs = _as_bitstream(bits)
    if bs.n_bits == 0:
        return _not_applicable("random_excursions", "empty stream")
    s, cycle_id, j = _walk(bs)
    if check_length and j < 500:
        return _not_applicable("random_excursions",
                               f"only {j} excursions, needs >= 500")
    pvals, labels = [], []
    for x in _EXCURSION_STATES:
        visits = np.bincount(cycle_id[s == x], minlength=j)
        counts = np.bincount(np.minimum(visits, 5), minlength=6)
        expected = j * _excursion_probs(x)
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        pvals.append(igamc(2.5, chi2 / 2.0))
        labels.append(f"x={x:+d}")
    return _result("random_excursions", pvals, alpha, labels=labels, J=j)


def random_excursions_variant(bits, alpha: float = 0.01,
                              check_length: bool = True) -> TestResult:
    """Total visit counts to states +-1..+-9 over the whole walk."""
    bs = _as_bitstream(bits)
    if bs.n_bits == 0:
        return _not_applicable("random_excursions_variant", "empty stream")
    s, _, j = _walk(bs)
    if check_length and j < 500:
        return _not_applicable("random_excursions_variant",
                               f"only {j} excursions, needs >= 500")
    pvals, labels = [], []
    for x in _VARIANT_STATES:
        xi = int((s == x).sum())
        p = erfc(abs(xi - j) / math.sqrt(2.0 * j * (4.0 * abs(x) - 2.0)))
        pvals.append(p)
        labels.append(f"x={x:+d}")
    return _result("random_excursions_variant", pvals, alpha, labels=labels, J=j)
