"""Correspondence between Hermitian parameters ``Theta`` and von Neumann's
unitary parametrization, carried out on the auxiliary space.

With ``G_pm = G(+-i)`` and ``Gamma = Gamma(i)`` (reference point ``i``), the
unitary ``U: K_+ -> K_-`` is represented by the reduced matrix
``W = G_-^{-1} U G_+``, an ``n x n`` matrix that is unitary for the inner
product ``<Q1, Q2>_Gamma = <Q1, (-i Gamma) Q2>``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import GammaNotAntiHermitian, GammaNotPositive, SolveFailed, WPlusOneSingular
from .extension import ThetaParam
from .models import DiagonalModel, GammaMatrix, OperatorModel, gamma_matrix, ReferencePoint


def _value(g):
    return np.asarray(g.value if isinstance(g, GammaMatrix) else g, dtype=complex)


@dataclass(frozen=True)
class ReducedUnitary:
    W: np.ndarray
    gamma: np.ndarray

    def unitarity_residual(self) -> float:
        """``||W^* (-i Gamma) W - (-i Gamma)|| / ||-i Gamma||``."""
        h = -1j * self.gamma
        return float(np.linalg.norm(self.W.conj().T @ h @ self.W - h) / np.linalg.norm(h))


def gamma_i(model: OperatorModel, tol=1e-10) -> GammaMatrix:
    """``Gamma(i)`` with reference point ``i``; validates ``Gamma^* = -Gamma``
    and ``-i Gamma > 0``."""
    g = gamma_matrix(model, 1j, ReferencePoint(1j))
    v = g.value
    scale = np.linalg.norm(v)
    if np.linalg.norm(v + v.conj().T) > tol * scale:
        raise GammaNotAntiHermitian("Gamma(i) is not anti-Hermitian")
    h = -1j * v
    ev = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    if ev[0] <= 0.0:
        raise GammaNotPositive(f"-i Gamma(i) is not positive definite (min eigenvalue {ev[0]:.3e})")
    return g


def gamma_sqrt(g) -> np.ndarray:
    """Hermitian positive square root of ``-i Gamma``."""
    h = -1j * _value(g)
    h = 0.5 * (h + h.conj().T)
    ev, vecs = np.linalg.eigh(h)
    if ev[0] <= 0.0:
        raise GammaNotPositive(f"-i Gamma is not positive definite (min eigenvalue {ev[0]:.3e})")
    return (vecs * np.sqrt(ev)) @ vecs.conj().T


def _theta(theta):
    return theta.matrix if isinstance(theta, ThetaParam) else np.asarray(theta, dtype=complex)


def theta_to_w(theta, g) -> ReducedUnitary:
    """``W = -(1 + 2 (Theta - Gamma)^{-1} Gamma)``."""
    th = _theta(theta)
    gam = _value(g)
    n = gam.shape[0]
    try:
        x = np.linalg.solve(th - gam, gam)
    except np.linalg.LinAlgError as err:
        raise SolveFailed(f"Theta - Gamma could not be factored: {err}") from None
    return ReducedUnitary(-(np.eye(n) + 2.0 * x), gam)


def w_inverse(theta, g) -> np.ndarray:
    """Closed-form inverse ``W^{-1} = -(1 - 2 (Theta + Gamma)^{-1} Gamma)``."""
    th = _theta(theta)
    gam = _value(g)
    n = gam.shape[0]
    return -(np.eye(n) - 2.0 * np.linalg.solve(th + gam, gam))


def _raw_theta(w: ReducedUnitary) -> np.ndarray:
    W = np.asarray(w.W, dtype=complex)
    gam = np.asarray(w.gamma, dtype=complex)
    n = W.shape[0]
    eye = np.eye(n)
    wp = W + eye
    smin = np.linalg.svd(wp, compute_uv=False)[-1]
    if smin < 1e-10 * n:
        raise WPlusOneSingular(f"W + 1 is singular (smallest singular value {smin:.3e})")
    # right solve: Theta (W + 1) = Gamma (W - 1)
    rhs = (gam @ (W - eye)).conj().T
    return np.linalg.solve(wp.conj().T, rhs).conj().T


def theta_hermiticity_residual(w: ReducedUnitary) -> float:
    """Relative anti-Hermitian part of the raw ``Gamma (W-1)(W+1)^{-1}``."""
    th = _raw_theta(w)
    return float(np.linalg.norm(th - th.conj().T) / max(np.linalg.norm(th), 1e-300))


def w_to_theta(w: ReducedUnitary, tol=1e-8) -> ThetaParam:
    """``Theta = Gamma (W - 1) (W + 1)^{-1}``.

    ``W + 1`` singular means the extension meets ``D(A)`` in more than the
    restricted domain and has no ``Theta`` parametrization. A result whose
    anti-Hermitian part exceeds ``tol`` (relative) means ``W`` was not
    Gamma-unitary.
    """
    th = _raw_theta(w)
    skew = np.linalg.norm(th - th.conj().T)
    if skew > tol * max(np.linalg.norm(th), 1.0):
        raise SolveFailed(f"W is not Gamma-unitary: Theta has anti-Hermitian part {skew:.3e}")
    return ThetaParam(th)


def cayley_check(model: DiagonalModel, charges=None, rng=None) -> dict:
    """Residuals of ``G_- = U_A G_+`` and ``G_-+ - G_+- = +-2i R(-+i) G_+-``.

    ``U_A = (-A + i)(-A - i)^{-1}`` acts spectrally. Returned residuals are
    relative maxima over the supplied (or random) charges.
    """
    if not isinstance(model, DiagonalModel):
        raise TypeError("cayley_check needs a diagonal model")
    if charges is None:
        rng = np.random.default_rng(rng)
        charges = rng.standard_normal((8, model.n)) + 1j * rng.standard_normal((8, model.n))
    a = model.eigenvalues
    u_a = (-a + 1j) / (-a - 1j)
    cay = 0.0
    id41 = 0.0
    for q in np.atleast_2d(charges):
        gp = model.g(1j, q)
        gm = model.g(-1j, q)
        cay = max(cay, np.linalg.norm(gm - u_a * gp) / np.linalg.norm(gm))
        scale = np.linalg.norm(gm - gp)
        id41 = max(id41,
                   np.linalg.norm((gm - gp) - 2j * model.resolvent(-1j, gp)) / scale,
                   np.linalg.norm((gp - gm) + 2j * model.resolvent(1j, gm)) / scale)
    return {"cayley": float(cay), "identity_minus_plus": float(id41)}
