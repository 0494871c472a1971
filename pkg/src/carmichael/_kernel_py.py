"""Pure numpy fallback for the compiled residue kernels.

Products ``a*c mod L`` of 63-bit values overflow uint64, so ``c`` is fed in
digit by digit (Horner), with the digit width chosen so every partial sum
stays below 2**64.  Moduli of 63 bits fall back to Python ints.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def _digit_width(L: int) -> int:
    return 63 - L.bit_length()


def mulmod_scalar(a: np.ndarray, c: int, L: int) -> np.ndarray:
    c %= L
    w = _digit_width(L)
    if w < 1:
        return np.array([int(x) * c % L for x in a.tolist()], dtype=np.uint64)
    a = a % np.uint64(L)
    if c == 0:
        return np.zeros_like(a)
    Lu = np.uint64(L)
    digits = []
    while c:
        digits.append(c & ((1 << w) - 1))
        c >>= w
    acc = np.zeros_like(a)
    shift = np.uint64(w)
    for dgt in reversed(digits):
        acc = ((acc << shift) % Lu + a * np.uint64(dgt)) % Lu
    return acc


def subset_residues(mults: np.ndarray, start: int, L: int) -> np.ndarray:
    out = np.empty(1 << len(mults), dtype=np.uint64)
    out[0] = start % L
    half = 1
    for m in mults.tolist():
        out[half : 2 * half] = mulmod_scalar(out[:half], int(m), L)
        half *= 2
    return out


class Matcher:
    """Sorted-array index; ``sweep`` matches ``d*y mod L`` by binary search."""

    def __init__(self, x_sorted: np.ndarray, L: int):
        self.L = L
        self.x = np.ascontiguousarray(x_sorted, dtype=np.uint64)

    def sweep(self, y: np.ndarray, d_res: np.ndarray):
        hd, hx, hy = [], [], []
        n = len(self.x)
        if n == 0:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        for a, d in enumerate(d_res.tolist()):
            r = mulmod_scalar(y, int(d), self.L)
            idx = np.searchsorted(self.x, r)
            idx_c = np.minimum(idx, n - 1)
            hit = np.nonzero(self.x[idx_c] == r)[0]
            if len(hit):
                hd.append(np.full(len(hit), a, dtype=np.int64))
                hx.append(idx_c[hit].astype(np.int64))
                hy.append(hit.astype(np.int64))
        if not hd:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty, empty
        return np.concatenate(hd), np.concatenate(hx), np.concatenate(hy)
