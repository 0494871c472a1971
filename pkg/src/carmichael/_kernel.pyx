# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled residue kernels for the subset-product search.

All moduli are below 2**63.  Modular products use Shoup's precomputed
quotient so the inner loop needs no 128-bit division.
"""
import mmap

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t
from libcpp.vector cimport vector

cnp.import_array()

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

BACKEND = "cython"

cdef uint64_t EMPTY = 0xFFFFFFFFFFFFFFFFULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t GOLDEN2 = 0xC2B2AE3D27D4EB4FULL
DEF BATCH = 4096


cdef inline uint64_t shoup_pre(uint64_t w, uint64_t L) noexcept nogil:
    return <uint64_t>((<u128>w << 64) // L)


cdef inline uint64_t shoup_mul(uint64_t x, uint64_t w, uint64_t wp, uint64_t L) noexcept nogil:
    cdef uint64_t q = <uint64_t>((<u128>x * wp) >> 64)
    cdef uint64_t r = x * w - q * L
    if r >= L:
        r -= L
    return r


def mulmod_scalar(cnp.ndarray[cnp.uint64_t, ndim=1] a, uint64_t c, uint64_t L):
    cdef Py_ssize_t i, n = a.shape[0]
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(n, dtype=np.uint64)
    cdef uint64_t cr = c % L
    cdef uint64_t cp = shoup_pre(cr, L)
    with nogil:
        for i in range(n):
            out[i] = shoup_mul(a[i] % L, cr, cp, L)
    return out


def subset_residues(cnp.ndarray[cnp.uint64_t, ndim=1] mults, uint64_t start, uint64_t L):
    """Residues of ``start * prod(subset)`` for every subset, indexed by bitmask."""
    cdef Py_ssize_t k = mults.shape[0], j, i, half
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(1 << k, dtype=np.uint64)
    cdef uint64_t w, wp
    out[0] = start % L
    half = 1
    with nogil:
        for j in range(k):
            w = mults[j] % L
            wp = shoup_pre(w, L)
            for i in range(half):
                out[half + i] = shoup_mul(out[i], w, wp, L)
            half <<= 1
    return out


def _table(Py_ssize_t n, dtype, fill=0):
    # large lookup arrays ask for transparent huge pages to cut TLB misses
    dt = np.dtype(dtype)
    nbytes = max(n * dt.itemsize, 1)
    if nbytes < (1 << 21) or not hasattr(mmap, "MADV_HUGEPAGE"):
        return np.full(n, fill, dtype=dt)
    buf = mmap.mmap(-1, nbytes)
    try:
        buf.madvise(mmap.MADV_HUGEPAGE)
    except OSError:
        pass
    arr = np.frombuffer(buf, dtype=dt, count=n)
    if fill:
        arr.fill(fill)
    return arr


cdef inline uint64_t bloom_pattern(uint64_t h) noexcept nogil:
    # three bit positions inside one word, taken from the low hash bits
    return (1ULL << (h & 63)) | (1ULL << ((h >> 6) & 63)) | (1ULL << ((h >> 12) & 63))


cdef class Matcher:
    """Open-addressing index over a sorted residue array.

    Two filters sit in front of the hash table (load <= 1/4): a blocked
    Bloom filter that stays in L2 and a sparse one on an independent hash.  Nearly every
    probe is rejected on a well-predicted branch.  ``sweep`` reports, for every ``d``
    and ``y``, the first position in the sorted array equal to ``d*y mod L``.
    """
    cdef readonly uint64_t L
    cdef readonly int bits
    cdef readonly int fbits
    cdef uint64_t[::1] keys
    cdef int32_t[::1] pos
    cdef uint64_t[::1] filt
    cdef uint64_t[::1] filt2
    cdef readonly int f2bits

    def __init__(self, cnp.ndarray[cnp.uint64_t, ndim=1] x_sorted, uint64_t L):
        cdef Py_ssize_t n = x_sorted.shape[0], i
        cdef int bits = 4
        while (1 << bits) < 4 * n:
            bits += 1
        self.bits = bits
        self.fbits = bits + 1 if bits >= 8 else 9
        self.L = L
        self.keys = _table(1 << bits, np.uint64, EMPTY)
        self.pos = _table(1 << bits, np.int32)
        self.filt = _table((1 << self.fbits) >> 6, np.uint64)
        self.f2bits = bits + 1
        self.filt2 = _table((1 << self.f2bits) >> 6, np.uint64)
        cdef uint64_t key, h, mask = (1ULL << bits) - 1
        cdef uint64_t slot
        cdef int shift = 64 - bits, wshift = 70 - self.fbits, f2shift = 64 - self.f2bits
        for i in range(n):
            key = x_sorted[i]
            if i > 0 and x_sorted[i - 1] == key:
                continue
            h = key * GOLDEN
            self.filt[h >> wshift] |= bloom_pattern(h)
            h = (key * GOLDEN2) >> f2shift
            self.filt2[h >> 6] |= 1ULL << (h & 63)
            h = key * GOLDEN
            slot = h >> shift
            while self.keys[slot] != EMPTY:
                slot = (slot + 1) & mask
            self.keys[slot] = key
            self.pos[slot] = <int32_t>i

    def sweep(self, cnp.ndarray[cnp.uint64_t, ndim=1] y, cnp.ndarray[cnp.uint64_t, ndim=1] d_res):
        cdef Py_ssize_t nd = d_res.shape[0], ny = y.shape[0], a, b, lo, hi, c, n1, n2
        cdef uint64_t L = self.L, d, dp, r, h, fh, slot, k, bit
        cdef uint64_t mask = (1ULL << self.bits) - 1
        cdef int shift = 64 - self.bits, wshift = 70 - self.fbits, f2shift = 64 - self.f2bits
        cdef uint64_t pat
        cdef uint64_t[::1] keys = self.keys
        cdef int32_t[::1] pos = self.pos
        cdef uint64_t[::1] filt = self.filt
        cdef uint64_t[::1] filt2 = self.filt2
        cdef const uint64_t[::1] yv = np.ascontiguousarray(y)
        cdef const uint64_t[::1] dv = np.ascontiguousarray(d_res)
        # survivors of each filter stage, written without branches
        cdef uint64_t[::1] buf_r = np.empty(BATCH, dtype=np.uint64)
        cdef int32_t[::1] buf_b = np.empty(BATCH, dtype=np.int32)
        cdef vector[int64_t] hd, hx, hy
        with nogil:
            for a in range(nd):
                d = dv[a] % L
                dp = shoup_pre(d, L)
                lo = 0
                while lo < ny:
                    hi = lo + BATCH if lo + BATCH < ny else ny
                    n1 = 0
                    for b in range(lo, hi):
                        r = shoup_mul(yv[b], d, dp, L)
                        h = r * GOLDEN
                        pat = bloom_pattern(h)
                        bit = (filt[h >> wshift] & pat) == pat
                        buf_r[n1] = r
                        buf_b[n1] = <int32_t>b
                        n1 += bit
                    n2 = 0
                    for c in range(n1):
                        r = buf_r[c]
                        fh = (r * GOLDEN2) >> f2shift
                        bit = (filt2[fh >> 6] >> (fh & 63)) & 1
                        buf_r[n2] = r
                        buf_b[n2] = buf_b[c]
                        n2 += bit
                    for c in range(n2):
                        r = buf_r[c]
                        slot = (r * GOLDEN) >> shift
                        k = keys[slot]
                        while k != EMPTY:
                            if k == r:
                                hd.push_back(a)
                                hx.push_back(pos[slot])
                                hy.push_back(buf_b[c])
                                break
                            slot = (slot + 1) & mask
                            k = keys[slot]
                    lo = hi
        out_d = np.empty(hd.size(), dtype=np.int64)
        out_x = np.empty(hd.size(), dtype=np.int64)
        out_y = np.empty(hd.size(), dtype=np.int64)
        for a in range(<Py_ssize_t>hd.size()):
            out_d[a] = hd[a]
            out_x[a] = hx[a]
            out_y[a] = hy[a]
        return out_d, out_x, out_y
