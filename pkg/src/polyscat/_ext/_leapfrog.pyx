# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled leapfrog advance for the damped variable-speed wave equation."""

from libc.math cimport isfinite


def advance(double[:, ::1] u_prev, double[:, ::1] u, double[:, ::1] work,
            double[:, ::1] a, double[:, ::1] src, double[::1] g,
            double[:, ::1] dp, double[:, ::1] dm):
    """Run ``len(g)`` steps, rotating the three buffers once per step.

    After n steps the (previous, current, scratch) levels live in
    ``(bufs[n % 3], bufs[(n + 1) % 3], bufs[(n + 2) % 3])`` with
    ``bufs = (u_prev, u, work)``. Edge nodes are never written. Returns False
    if the newest level contains a non-finite value.
    """
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef Py_ssize_t i, j, n, nsteps = g.shape[0]
    cdef double gn, lap
    cdef double[:, ::1] p0 = u_prev
    cdef double[:, ::1] p1 = u
    cdef double[:, ::1] p2 = work
    cdef double[:, ::1] tmp
    cdef bint ok = True
    with nogil:
        for n in range(nsteps):
            gn = g[n]
            for i in range(1, nx - 1):
                for j in range(1, ny - 1):
                    lap = p1[i + 1, j] + p1[i - 1, j] + p1[i, j + 1] + p1[i, j - 1] - 4.0 * p1[i, j]
                    p2[i, j] = (2.0 * p1[i, j] - dp[i, j] * p0[i, j]
                                + a[i, j] * lap + src[i, j] * gn) * dm[i, j]
            tmp = p0
            p0 = p1
            p1 = p2
            p2 = tmp
        for i in range(nx):
            for j in range(ny):
                if not isfinite(p1[i, j]):
                    ok = False
    return ok
