"""Wigner 3j symbols from the Racah formula, with log-gamma factorials."""

from __future__ import annotations

import math
from functools import lru_cache


def _lfact(n: int) -> float:
    return math.lgamma(n + 1)


@lru_cache(maxsize=None)
def wigner_3j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3j symbol for integer angular momenta.

    Returns 0 whenever the selection rules (``m1+m2+m3 = 0``, triangle
    inequality, ``|m_i| <= j_i``) fail.  Factorial ratios are combined in log
    space so large arguments do not overflow.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if j3 < abs(j1 - j2) or j3 > j1 + j2:
        return 0.0

    log_tri = 0.5 * (_lfact(j1 + j2 - j3) + _lfact(j1 - j2 + j3) + _lfact(-j1 + j2 + j3)
                     - _lfact(j1 + j2 + j3 + 1))
    log_m = 0.5 * (_lfact(j1 + m1) + _lfact(j1 - m1) + _lfact(j2 + m2) + _lfact(j2 - m2)
                   + _lfact(j3 + m3) + _lfact(j3 - m3))

    kmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    kmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = 0.0
    for k in range(kmin, kmax + 1):
        log_den = (_lfact(k) + _lfact(j1 + j2 - j3 - k) + _lfact(j1 - m1 - k)
                   + _lfact(j2 + m2 - k) + _lfact(j3 - j2 + m1 + k) + _lfact(j3 - j1 - m2 + k))
        term = math.exp(log_tri + log_m - log_den)
        total += -term if k % 2 else term
    phase = -1.0 if (j1 - j2 - m3) % 2 else 1.0
    return phase * total
