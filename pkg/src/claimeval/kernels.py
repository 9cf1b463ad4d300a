"""Edit-distance kernels.

Character-level Levenshtein distance is the one hot numeric loop in this
package: the fluency scorer computes it twice per claim, so corpus runs hit
it tens of thousands of times. Two interchangeable implementations are
provided:

* a numba ``@njit`` scalar kernel (default when numba imports), and
* a vectorized numpy row-DP fallback.

Set ``CLAIMEVAL_NO_NUMBA=1`` in the environment to force the numpy path.
``benchmarks/bench_levenshtein.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

NUMBA_ENV_FLAG = "CLAIMEVAL_NO_NUMBA"


def _numba_disabled_by_env() -> bool:
    return os.environ.get(NUMBA_ENV_FLAG, "").strip().lower() in {"1", "true", "yes"}


def _encode(text: str) -> np.ndarray:
    # codepoint array; utf-32-le yields one uint32 per character
    return np.frombuffer(text.encode("utf-32-le"), dtype="<u4").astype(np.int64)


def levenshtein_numpy(a: str, b: str) -> int:
    """Levenshtein distance via a row-vectorized numpy DP.

    Within-row deletion dependencies are resolved with the running-minimum
    identity row[j] = j + min_{k<=j}(cand[k] - k).
    """
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    ca, cb = _encode(a), _encode(b)
    m = cb.size
    offsets = np.arange(m + 1, dtype=np.int64)
    prev = offsets.copy()
    for i in range(ca.size):
        cand = np.empty(m + 1, dtype=np.int64)
        cand[0] = i + 1
        np.minimum(prev[:-1] + (cb != ca[i]), prev[1:] + 1, out=cand[1:])
        prev = np.minimum.accumulate(cand - offsets) + offsets
    return int(prev[-1])


_lev_jit = None
if not _numba_disabled_by_env():  # pragma: no branch
    try:
        from numba import njit

        @njit(cache=True)
        def _lev_jit_kernel(ca: np.ndarray, cb: np.ndarray) -> int:
            m = cb.size
            prev = np.arange(m + 1, dtype=np.int64)
            cur = np.empty(m + 1, dtype=np.int64)
            for i in range(ca.size):
                cur[0] = i + 1
                ai = ca[i]
                for j in range(1, m + 1):
                    best = prev[j - 1] + (0 if cb[j - 1] == ai else 1)
                    if prev[j] + 1 < best:
                        best = prev[j] + 1
                    if cur[j - 1] + 1 < best:
                        best = cur[j - 1] + 1
                    cur[j] = best
                prev, cur = cur, prev
            return int(prev[m])

        _lev_jit = _lev_jit_kernel
    except ImportError:
        _lev_jit = None


def levenshtein_numba(a: str, b: str) -> int:
    """Levenshtein distance via the numba kernel; raises if numba is absent."""
    if _lev_jit is None:
        raise RuntimeError("numba kernel unavailable (not installed or disabled)")
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    return _lev_jit(_encode(a), _encode(b))


def active_implementation() -> str:
    """Which kernel `levenshtein` dispatches to: 'numba' or 'numpy'."""
    return "numba" if _lev_jit is not None else "numpy"


def levenshtein(a: str, b: str) -> int:
    """Character-level Levenshtein distance between two strings."""
    if _lev_jit is not None:
        return levenshtein_numba(a, b)
    return levenshtein_numpy(a, b)
