"""Point spectrum of ``A_Theta`` inside the real resolvent set of ``A``.

A real ``lambda`` is an eigenvalue exactly when ``Theta + Gamma(lambda)`` is
singular; the eigenfunctions are ``G(lambda) Q`` with ``Q`` in its kernel.
``Theta + Gamma(lambda)`` is Hermitian for real ``lambda``, so we follow its
sorted eigenvalues ("eigencurves") on a grid and bisect every sign change.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, List, Optional

import numpy as np

from . import kernels
from .errors import IntervalOutsideResolventSet
from .extension import KreinExtension
from .models import DiagonalModel, KernelField, PointModel3D, principal_sqrt

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenResult:
    lam: float
    charges: np.ndarray  # (multiplicity, n), orthonormal rows spanning the kernel
    multiplicity: int
    eigenfunction: Any
    residual: float

    @property
    def charge(self) -> np.ndarray:
        return self.charges[0]


def _hermitian_part(m):
    return 0.5 * (m + np.swapaxes(m.conj(), -1, -2))


def krein_eigencurves(ext: KreinExtension, lam: float) -> np.ndarray:
    """Sorted eigenvalues of the Hermitian matrix ``Theta + Gamma(lam)``."""
    lam = float(lam)
    return np.linalg.eigvalsh(_hermitian_part(ext.krein_matrix(lam)))


def eigencurve_table(ext: KreinExtension, lams) -> np.ndarray:
    """Eigencurves on a grid, shape ``(len(lams), n)``."""
    lams = np.asarray(lams, dtype=float)
    model = ext.model
    if isinstance(model, PointModel3D):
        if np.any(lams <= 0.0):
            raise IntervalOutsideResolventSet("point-model eigencurves need lambda > 0")
        mats = kernels.point_gamma_scan(
            np.ascontiguousarray(model.centers),
            np.sqrt(lams).astype(complex),
            principal_sqrt(ext.z0),
        )
        mats = mats + ext.theta_matrix[None]
    else:
        mats = np.stack([ext.krein_matrix(lam) for lam in lams])
    return np.linalg.eigvalsh(_hermitian_part(mats))


def default_interval(ext: KreinExtension):
    """Search window for the point model.

    Each diagonal entry of ``Gamma(lambda)`` grows like ``sqrt(lambda)/(4 pi)``
    and dominates ``||Theta||`` past the upper end.
    """
    if not isinstance(ext.model, PointModel3D):
        raise ValueError("no default search interval for the diagonal model")
    s0 = principal_sqrt(ext.z0).real
    upper = 4.0 * (s0 + 4.0 * np.pi * np.linalg.norm(ext.theta_matrix, 2)) ** 2
    return 1e-8, max(upper, 1.0)


def _check_interval(ext, lo, hi):
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise IntervalOutsideResolventSet(f"bad interval [{lo}, {hi}]")
    model = ext.model
    if isinstance(model, PointModel3D):
        if lo <= 0.0:
            raise IntervalOutsideResolventSet("point-model interval must lie in (0, inf)")
    elif isinstance(model, DiagonalModel):
        a = model.eigenvalues
        inside = a[(a >= lo) & (a <= hi)]
        if inside.size:
            raise IntervalOutsideResolventSet(
                f"interval [{lo}, {hi}] contains eigenvalue(s) of A: {inside[:5].tolist()}"
            )


def _grid(ext, lo, hi, grid):
    if isinstance(ext.model, PointModel3D):
        # Gamma is smooth in sqrt(lambda)
        return np.linspace(np.sqrt(lo), np.sqrt(hi), grid) ** 2
    return np.linspace(lo, hi, grid)


def _refine(ext, lams, curves, gap_tol, factor=8):
    """Subdivide cells where two eigencurves nearly touch."""
    if curves.shape[1] < 2:
        return lams, curves
    gaps = np.diff(curves, axis=1).min(axis=1)
    close = gaps < gap_tol
    cells = np.flatnonzero(close[:-1] | close[1:])
    if cells.size == 0:
        return lams, curves
    extra = np.concatenate([np.linspace(lams[i], lams[i + 1], factor + 1)[1:-1] for i in cells])
    lams = np.union1d(lams, extra)
    return lams, eigencurve_table(ext, lams)


def _bisect(ext, k, lo, hi, flo, maxiter=200):
    """Bisect curve ``k`` on ``[lo, hi]`` down to adjacent floats."""
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = krein_eigencurves(ext, mid)[k]
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _phase_normalize(v):
    v = v / np.linalg.norm(v)
    j = np.argmax(np.abs(v) > 0.5 * np.abs(v).max())  # first dominant component
    return v * (abs(v[j]) / v[j])


def kernel_threshold(ext: KreinExtension, mat, tol: float = 0.0) -> float:
    """Pencil eigenvalues below this count as zero.

    The floor is the rounding level of ``Theta + Gamma(lambda)``, measured on
    its two summands since they cancel near a root.
    """
    scale = np.linalg.norm(ext.theta_matrix, 2) + np.linalg.norm(mat - ext.theta_matrix, 2)
    return max(tol, 100 * _EPS * scale)


def eigen_result(ext: KreinExtension, lam: float, tol: float = 0.0) -> EigenResult:
    mat = _hermitian_part(ext.krein_matrix(lam))
    ev, vecs = np.linalg.eigh(mat)
    idx = np.flatnonzero(np.abs(ev) <= kernel_threshold(ext, mat, tol))
    if idx.size == 0:
        idx = np.array([np.argmin(np.abs(ev))])
    charges = np.array([_phase_normalize(vecs[:, i]) for i in idx])
    residual = max(float(np.linalg.norm(mat @ q)) for q in charges)
    q0 = charges[0]
    return EigenResult(
        lam=float(lam),
        charges=charges,
        multiplicity=int(idx.size),
        eigenfunction=ext.model.g(lam, q0),
        residual=residual,
    )


def find_point_spectrum(
    ext: KreinExtension,
    interval=None,
    grid: int = 512,
    tol: float = 0.0,
) -> List[EigenResult]:
    """All eigenvalues of ``A_Theta`` in ``interval`` detectable by a sign
    change of an eigencurve across a grid cell, in increasing order.

    Roots are bisected to machine precision. ``tol`` raises the threshold
    below which a pencil eigenvalue counts as zero (multiplicity and merging
    of coincident roots from different curves); the default is the rounding
    floor of ``Theta + Gamma(lambda)``.
    """
    if interval is None:
        interval = default_interval(ext)
    lo, hi = float(interval[0]), float(interval[1])
    _check_interval(ext, lo, hi)
    if grid < 2:
        raise ValueError("grid must be >= 2")
    lams = _grid(ext, lo, hi, int(grid))
    curves = eigencurve_table(ext, lams)
    gap_tol = 10 * max(tol, 100 * _EPS * np.abs(curves).max(initial=1.0))
    lams, curves = _refine(ext, lams, curves, gap_tol)

    roots = []
    for k in range(curves.shape[1]):
        c = curves[:, k]
        for i in np.flatnonzero(c == 0.0):
            roots.append(lams[i])
        s = np.sign(c)
        for i in np.flatnonzero(s[:-1] * s[1:] < 0):
            roots.append(_bisect(ext, k, lams[i], lams[i + 1], c[i]))
    roots.sort()

    # a crossing of several curves yields one root per curve; keep one
    results: List[EigenResult] = []
    group = 0
    for r in roots:
        if results:
            prev = results[-1]
            near = abs(r - prev.lam) <= 1e-8 * max(1.0, abs(r))
            if near and prev.multiplicity > group:
                group += 1
                continue
        results.append(eigen_result(ext, r, tol))
        group = 1
    return results


def eigenfunction_eval(result: EigenResult, x):
    """``sum_j Q_j G_lambda(|x - y_j|)``; raises ``SingularAtCenter`` at a centre."""
    f = result.eigenfunction
    if not isinstance(f, KernelField):
        raise TypeError("eigenfunction_eval is defined for point-model results")
    return f(x)


def boundary_certificate(ext: KreinExtension, result: EigenResult, q: Optional[np.ndarray] = None) -> float:
    """``|| tau phi_star - Theta Q ||`` for ``phi_star = -(G_star - G(lambda)) Q``."""
    q = result.charge if q is None else np.asarray(q, dtype=complex)
    model = ext.model
    regular = model.g(result.lam, q) - ext.g_star(q)
    return float(np.linalg.norm(model.trace(regular) - ext.theta_matrix @ q))
