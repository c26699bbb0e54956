"""Pure-numpy leapfrog advance; same contract as the compiled ``_leapfrog.advance``."""
import numpy as np


def advance(u_prev, u, work, a, src, g, dp, dm):
    p0, p1, p2 = u_prev, u, work
    inner = (slice(1, -1), slice(1, -1))
    a_i, src_i, dp_i, dm_i = a[inner], src[inner], dp[inner], dm[inner]
    lap = np.empty_like(a_i)
    for gn in np.asarray(g, dtype=float):
        np.add(p1[2:, 1:-1], p1[:-2, 1:-1], out=lap)
        lap += p1[1:-1, 2:]
        lap += p1[1:-1, :-2]
        lap -= 4.0 * p1[inner]
        lap *= a_i
        lap += 2.0 * p1[inner]
        lap -= dp_i * p0[inner]
        lap += src_i * gn
        lap *= dm_i
        p2[inner] = lap
        p0, p1, p2 = p1, p2, p0
    return bool(np.all(np.isfinite(p1)))
