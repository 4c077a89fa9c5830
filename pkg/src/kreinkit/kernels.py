"""Numeric inner loops, each in a numba and a pure-numpy flavour.

The public names (``green_matrix``, ``field_eval``, ``point_gamma_scan``,
``weighted_gram``) are bound to the numba variant when numba is available
and ``KREINKIT_DISABLE_NUMBA`` is unset, to the numpy variant otherwise.
Both variants are always importable under ``*_numpy`` / ``*_numba`` so the
test-suite and the benchmark can compare them.

All Green kernels are ``exp(-s r) / (4 pi r)`` with ``s`` the principal
square root of the spectral parameter.
"""
import numpy as np

from ._jit import USE_NUMBA, njit

FOUR_PI = 4.0 * np.pi


# --------------------------------------------------------------------------
# pairwise Green matrix, zero diagonal


def green_matrix_numpy(centers, sqrt_z):
    centers = np.asarray(centers, dtype=float)
    n = centers.shape[0]
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    out = np.zeros((n, n), dtype=complex)
    off = ~np.eye(n, dtype=bool)
    r = dist[off]
    out[off] = np.exp(-sqrt_z * r) / (FOUR_PI * r)
    return out


@njit
def green_matrix_numba(centers, sqrt_z):
    n = centers.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(3):
                t = centers[i, k] - centers[j, k]
                d2 += t * t
            r = np.sqrt(d2)
            g = np.exp(-sqrt_z * r) / (FOUR_PI * r)
            out[i, j] = g
            out[j, i] = g
    return out


# --------------------------------------------------------------------------
# kernel-sum field evaluation
#
# Terms whose centre coincides with the evaluation point (distance <= tiny)
# contribute their finite part -amp * s / (4 pi); the caller must check via
# the returned net amplitude that the 1/r parts cancel.


def field_eval_numpy(points, centers, sqrt_z, amps, tiny):
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    npts = points.shape[0]
    if centers.shape[0] == 0:
        zero = np.zeros(npts, dtype=complex)
        return zero, zero.copy(), np.zeros(npts)
    diff = points[:, None, :] - centers[None, :, :]
    r = np.sqrt(np.einsum("ptk,ptk->pt", diff, diff))
    hit = r <= tiny
    safe = np.where(hit, 1.0, r)
    vals = np.where(
        hit,
        -amps * sqrt_z / FOUR_PI,
        amps * np.exp(-sqrt_z * safe) / (FOUR_PI * safe),
    )
    net = np.where(hit, amps, 0.0).sum(axis=1)
    mag = np.where(hit, np.abs(amps), 0.0).sum(axis=1)
    return vals.sum(axis=1), net, mag


@njit
def field_eval_numba(points, centers, sqrt_z, amps, tiny):
    npts = points.shape[0]
    nterm = centers.shape[0]
    vals = np.zeros(npts, dtype=np.complex128)
    net = np.zeros(npts, dtype=np.complex128)
    mag = np.zeros(npts, dtype=np.float64)
    for p in range(npts):
        acc = 0.0 + 0.0j
        for t in range(nterm):
            d2 = 0.0
            for k in range(3):
                u = points[p, k] - centers[t, k]
                d2 += u * u
            r = np.sqrt(d2)
            if r <= tiny:
                acc += -amps[t] * sqrt_z[t] / FOUR_PI
                net[p] += amps[t]
                mag[p] += abs(amps[t])
            else:
                acc += amps[t] * np.exp(-sqrt_z[t] * r) / (FOUR_PI * r)
        vals[p] = acc
    return vals, net, mag


# --------------------------------------------------------------------------
# point-model Gamma(lambda) over a grid of spectral parameters


def point_gamma_scan_numpy(centers, sqrt_lams, sqrt_z0):
    centers = np.asarray(centers, dtype=float)
    sqrt_lams = np.asarray(sqrt_lams, dtype=complex)
    n = centers.shape[0]
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = ~np.eye(n, dtype=bool)
    safe = np.where(off, dist, 1.0)
    g_star = np.where(off, np.exp(-sqrt_z0 * safe).real / (FOUR_PI * safe), 0.0)
    g_lam = np.exp(-sqrt_lams[:, None, None] * safe) / (FOUR_PI * safe)
    out = g_star[None] - np.where(off, g_lam, 0.0)
    idx = np.arange(n)
    out[:, idx, idx] = ((sqrt_lams - sqrt_z0.real) / FOUR_PI)[:, None]
    return out


@njit
def point_gamma_scan_numba(centers, sqrt_lams, sqrt_z0):
    n = centers.shape[0]
    ng = sqrt_lams.shape[0]
    out = np.empty((ng, n, n), dtype=np.complex128)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d2 = 0.0
            for k in range(3):
                u = centers[i, k] - centers[j, k]
                d2 += u * u
            dist[i, j] = np.sqrt(d2)
            dist[j, i] = dist[i, j]
    for g in range(ng):
        s = sqrt_lams[g]
        for i in range(n):
            out[g, i, i] = (s - sqrt_z0.real) / FOUR_PI
            for j in range(i + 1, n):
                r = dist[i, j]
                v = (np.exp(-sqrt_z0 * r).real - np.exp(-s * r)) / (FOUR_PI * r)
                out[g, i, j] = v
                out[g, j, i] = v
    return out


# --------------------------------------------------------------------------
# weighted Gram matrix sum_m conj(V[j, m]) V[k, m] w[m]


def weighted_gram_numpy(vecs, weights):
    vecs = np.asarray(vecs, dtype=complex)
    return (vecs.conj() * weights) @ vecs.T


@njit
def weighted_gram_numba(vecs, weights):
    n, m = vecs.shape
    u = np.empty((n, m), dtype=np.complex128)
    for j in range(n):
        for i in range(m):
            u[j, i] = np.conj(vecs[j, i]) * weights[i]
    out = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        for k in range(n):
            re = 0.0
            im = 0.0
            for i in range(m):
                a = u[j, i]
                b = vecs[k, i]
                re += a.real * b.real - a.imag * b.imag
                im += a.real * b.imag + a.imag * b.real
            out[j, k] = re + 1j * im
    return out


# the loop kernel beats a BLAS call only while the call overhead dominates
_GRAM_NUMBA_MAX_WORK = 1 << 14


def _weighted_gram_dispatch(vecs, weights):
    n, m = vecs.shape
    if n * n * m <= _GRAM_NUMBA_MAX_WORK:
        return weighted_gram_numba(vecs, weights)
    return weighted_gram_numpy(vecs, weights)


if USE_NUMBA:
    green_matrix = green_matrix_numba
    field_eval = field_eval_numba
    point_gamma_scan = point_gamma_scan_numba
    weighted_gram = _weighted_gram_dispatch
else:
    green_matrix = green_matrix_numpy
    field_eval = field_eval_numpy
    point_gamma_scan = point_gamma_scan_numpy
    weighted_gram = weighted_gram_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
