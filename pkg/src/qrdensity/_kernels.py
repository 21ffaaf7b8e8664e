"""Hot inner loops, compiled with numba when available.

Every kernel has two implementations with identical semantics: a numba
``@njit`` loop and a vectorised numpy fallback. The active backend is chosen
once at import time. Set ``QRD_DISABLE_NUMBA=1`` to force the numpy path.

Both implementation tables stay importable (``NUMBA_KERNELS`` and
``NUMPY_KERNELS``) so tests and the benchmark can run them side by side.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly by whichever backend is live
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

_DISABLED = os.environ.get("QRD_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
USE_NUMBA = HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"

# popcount parity chunking for the brute-force GF(2) counter
_CHUNK = 1 << 20


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def _sieve_mask_numpy(bound: int) -> np.ndarray:
    mask = np.ones(bound + 1, dtype=np.bool_)
    mask[:2] = False
    mask[4::2] = False
    r = int(bound**0.5) + 1
    for p in range(3, r + 1, 2):
        if mask[p]:
            mask[p * p :: 2 * p] = False
    return mask


def _legendre_prime_numpy(q: int, primes: np.ndarray) -> np.ndarray:
    """Euler's criterion for a fixed small integer ``q`` against many odd primes."""
    p = primes.astype(np.int64)
    base = np.mod(np.int64(q), p)
    zero = base == 0
    e = (p - 1) // 2
    acc = np.ones_like(p)
    while e.any():
        odd = (e & 1).astype(np.bool_)
        acc = np.where(odd, acc * base % p, acc)
        base = base * base % p
        e >>= 1
    out = np.where(acc == 1, 1, -1).astype(np.int8)
    out[zero] = 0
    return out


def _residue_table_numpy(p: int) -> np.ndarray:
    table = np.full(p, -1, dtype=np.int8)
    table[0] = 0
    x = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    table[x * x % p] = 1
    return table


def _count_windows_numpy(table, a, b, s, nmax, eps) -> int:
    if nmax < 1:
        return 0
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    offs = np.arange(s, dtype=np.int64)
    total = 0
    step = max(1, _CHUNK // max(1, a.size * s))
    for lo in range(1, nmax + 1, step):
        n = np.arange(lo, min(nmax, lo + step - 1) + 1, dtype=np.int64)
        # (len(n), m, s) grid of progression elements
        vals = a[None, :, None] + b[None, :, None] * (n[:, None, None] + offs[None, None, :])
        hit = table[vals.reshape(n.size, -1)] == eps
        total += int(hit.all(axis=1).sum())
    return total


def _parity_count_numpy(odd_masks, even_masks, n) -> int:
    odd_masks = np.asarray(odd_masks, dtype=np.int64)
    even_masks = np.asarray(even_masks, dtype=np.int64)
    total = 0
    for lo in range(0, 1 << n, _CHUNK):
        cand = np.arange(lo, min(1 << n, lo + _CHUNK), dtype=np.int64)
        ok = np.ones(cand.size, dtype=np.bool_)
        for m in odd_masks:
            ok &= (np.bitwise_count(cand & m) & 1) == 1
        for m in even_masks:
            ok &= (np.bitwise_count(cand & m) & 1) == 0
        total += int(ok.sum())
    return total


NUMPY_KERNELS = {
    "sieve_mask": _sieve_mask_numpy,
    "legendre_prime": _legendre_prime_numpy,
    "residue_table": _residue_table_numpy,
    "count_windows": _count_windows_numpy,
    "parity_count": _parity_count_numpy,
}


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _sieve_mask_nb(bound):
        mask = np.ones(bound + 1, dtype=np.bool_)
        mask[0] = False
        if bound >= 1:
            mask[1] = False
        for i in range(4, bound + 1, 2):
            mask[i] = False
        p = 3
        while p * p <= bound:
            if mask[p]:
                for j in range(p * p, bound + 1, 2 * p):
                    mask[j] = False
            p += 2
        return mask

    @numba.njit(cache=True)
    def _legendre_prime_nb(q, primes):
        out = np.empty(primes.size, dtype=np.int8)
        for idx in range(primes.size):
            p = np.int64(primes[idx])
            base = np.int64(q) % p
            if base == 0:
                out[idx] = 0
                continue
            e = (p - 1) // 2
            acc = np.int64(1)
            while e > 0:
                if e & 1:
                    acc = acc * base % p
                base = base * base % p
                e >>= 1
            out[idx] = 1 if acc == 1 else -1
        return out

    @numba.njit(cache=True)
    def _residue_table_nb(p):
        table = np.full(p, -1, dtype=np.int8)
        table[0] = 0
        for x in range(1, (p - 1) // 2 + 1):
            table[np.int64(x) * x % p] = 1
        return table

    @numba.njit(cache=True)
    def _count_windows_kernel(table, a, b, s, nmax, eps):
        total = 0
        for n in range(1, nmax + 1):
            ok = True
            for j in range(a.size):
                for i in range(s):
                    if table[a[j] + b[j] * (n + i)] != eps:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                total += 1
        return total

    def _count_windows_nb(table, a, b, s, nmax, eps) -> int:
        if nmax < 1:
            return 0
        return int(
            _count_windows_kernel(
                table,
                np.asarray(a, dtype=np.int64),
                np.asarray(b, dtype=np.int64),
                int(s),
                int(nmax),
                np.int8(eps),
            )
        )

    @numba.njit(cache=True)
    def _parity(x):
        c = 0
        while x:
            x &= x - 1
            c ^= 1
        return c

    @numba.njit(cache=True)
    def _parity_count_kernel(odd_masks, even_masks, n):
        total = 0
        for cand in range(1 << n):
            ok = True
            for m in odd_masks:
                if _parity(cand & m) != 1:
                    ok = False
                    break
            if ok:
                for m in even_masks:
                    if _parity(cand & m) != 0:
                        ok = False
                        break
            if ok:
                total += 1
        return total

    def _parity_count_nb(odd_masks, even_masks, n) -> int:
        return int(
            _parity_count_kernel(
                np.asarray(odd_masks, dtype=np.int64),
                np.asarray(even_masks, dtype=np.int64),
                int(n),
            )
        )

    NUMBA_KERNELS = {
        "sieve_mask": _sieve_mask_nb,
        "legendre_prime": _legendre_prime_nb,
        "residue_table": _residue_table_nb,
        "count_windows": _count_windows_nb,
        "parity_count": _parity_count_nb,
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}


_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS


def sieve_mask(bound: int) -> np.ndarray:
    """Boolean primality flags for ``0..bound``."""
    return _ACTIVE["sieve_mask"](int(bound))


def legendre_prime(q: int, primes: np.ndarray) -> np.ndarray:
    """Legendre symbol of the small integer ``q`` modulo each odd prime in ``primes``."""
    return _ACTIVE["legendre_prime"](int(q), np.ascontiguousarray(primes, dtype=np.int64))


def residue_table(p: int) -> np.ndarray:
    """int8 table with ``table[z] = (z/p)`` for ``0 <= z < p``."""
    return _ACTIVE["residue_table"](int(p))


def count_windows(table, a, b, s, nmax, eps) -> int:
    """Number of ``n`` in ``[1, nmax]`` whose length-``s`` windows are all ``eps`` in ``table``."""
    return _ACTIVE["count_windows"](table, a, b, s, nmax, eps)


def parity_count(odd_masks, even_masks, n) -> int:
    """Brute-force count of ``N`` in ``[0, 2**n)`` meeting every parity constraint."""
    return _ACTIVE["parity_count"](odd_masks, even_masks, n)
