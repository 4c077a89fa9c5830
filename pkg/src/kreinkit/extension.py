"""Self-adjoint extensions ``A_Theta`` built from a model, a Hermitian
parameter ``Theta`` and a reference point ``z0``.

The resolvent is

    R_Theta(z) = R(z) + G(z) (Theta + Gamma(z))^{-1} tau R(z)

and a domain element splits as ``phi = phi_star + G_star Q`` with the
boundary condition ``tau phi_star = Theta Q``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .errors import (
    BoundaryViolation,
    ConfigInvalid,
    KreinMatrixSingular,
    SolveFailed,
    SpectralPointInSpectrum,
    ThetaSingular,
    ZeroInSpectrum,
)
from .kernels import weighted_gram
from .models import DiagonalModel, OperatorModel, ReferencePoint

_EPS = np.finfo(float).eps
DEFAULT_TOL = 1e-10


def _cond_limit(n):
    return 1.0 / (n * _EPS * 1e3)


def solve_checked(mat, rhs, exc=KreinMatrixSingular, what="Theta + Gamma(z)"):
    """LU solve (partial pivoting) refusing numerically singular systems."""
    mat = np.asarray(mat, dtype=complex)
    n = mat.shape[0]
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > _cond_limit(n):
        raise exc(f"{what} is singular (condition number {cond:.3e})")
    try:
        return np.linalg.solve(mat, rhs)
    except np.linalg.LinAlgError as err:  # pragma: no cover - guarded by cond
        raise SolveFailed(str(err)) from None


@dataclass(frozen=True)
class ThetaParam:
    """Hermitian ``n x n`` extension parameter; need not be invertible."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigInvalid(f"Theta must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ConfigInvalid("Theta must be finite")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m, tol=1e-12):
        """Validate Hermiticity to ``tol * ||m||`` before symmetrizing."""
        m = np.asarray(m, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigInvalid(f"Theta must be square, got shape {m.shape}")
        norm = np.linalg.norm(m)
        if np.linalg.norm(m - m.conj().T) > tol * norm:
            raise ConfigInvalid("Theta is not Hermitian")
        return cls(m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KreinExtension:
    model: OperatorModel
    theta: Any
    ref: Any = ReferencePoint()

    def __post_init__(self):
        theta = self.theta
        if not isinstance(theta, ThetaParam):
            theta = ThetaParam.from_matrix(np.atleast_2d(np.asarray(theta, dtype=complex)))
        ref = self.ref
        if not isinstance(ref, ReferencePoint):
            ref = ReferencePoint(complex(ref))
        if theta.n != self.model.n:
            raise ConfigInvalid(f"Theta is {theta.n}x{theta.n} but the model has n = {self.model.n}")
        if ref.is_real:
            try:
                self.model.check_resolvent(ref.z0)
            except SpectralPointInSpectrum:
                if ref.z0 == 0:
                    raise ZeroInSpectrum("0 is an eigenvalue of A") from None
                raise
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "ref", ref)

    @property
    def z0(self) -> complex:
        return self.ref.z0

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def theta_matrix(self) -> np.ndarray:
        return self.theta.matrix

    def with_theta(self, theta):
        return replace(self, theta=theta)

    def gamma(self, z):
        return self.model.gamma(z, self.z0)

    def krein_matrix(self, z):
        return self.theta_matrix + self.gamma(z)

    def solve(self, z, rhs):
        return solve_checked(self.krein_matrix(z), rhs)

    def g_star(self, q):
        return self.model.g_star(self.z0, q)

    def g_diamond(self, q):
        return self.model.g_diamond(self.z0, q)


@dataclass(frozen=True)
class DecomposedState:
    """``phi = regular + G_star charge`` with ``regular`` in ``D(A)``."""

    regular: Any
    charge: np.ndarray

    def assemble(self, ext: KreinExtension):
        return self.regular + ext.g_star(self.charge)


# --------------------------------------------------------------------------


def charge_of(ext: KreinExtension, z, phi) -> np.ndarray:
    """Charge of ``R_Theta(z) phi``: ``(Theta + Gamma(z))^{-1} tau R(z) phi``."""
    return ext.solve(z, ext.model.g_breve(z, phi))


def krein_resolvent_apply(ext: KreinExtension, z, phi):
    model = ext.model
    s = charge_of(ext, z, phi)
    return model.resolvent(z, phi) + model.g(z, s)


def reference_shift(ext: KreinExtension, z, d: DecomposedState):
    """``phi_z = phi_star + (G_star - G(z)) Q``, an element of ``D(A)``."""
    q = np.asarray(d.charge, dtype=complex)
    return d.regular + ext.g_star(q) - ext.model.g(z, q)


def reference_unshift(ext: KreinExtension, z, phi_z, q) -> DecomposedState:
    """Inverse of :func:`reference_shift`."""
    q = np.asarray(q, dtype=complex)
    return DecomposedState(phi_z - ext.g_star(q) + ext.model.g(z, q), q)


def decompose_resolvent(ext: KreinExtension, z, phi) -> DecomposedState:
    """Regular/singular split of ``psi = R_Theta(z) phi``."""
    q = charge_of(ext, z, phi)
    return reference_unshift(ext, z, ext.model.resolvent(z, phi), q)


def decompose(ext: KreinExtension, psi) -> DecomposedState:
    """Regular/singular split of a raw diagonal-model state.

    In a finite truncation ``G_star Q`` is itself regular, so the split is
    fixed by the boundary condition alone: ``tau psi = (Theta + tau G_star) Q``.
    """
    model = _diagonal(ext)
    a = model.eigenvalues
    z0 = ext.z0
    w = 0.5 * (1.0 / (z0 - a) + 1.0 / (z0.conjugate() - a))
    tau_gstar = weighted_gram(model.trace_vectors, np.ascontiguousarray(w))
    q = solve_checked(ext.theta_matrix + tau_gstar, model.trace(psi),
                      what="Theta + tau G_star")
    return DecomposedState(np.asarray(psi, dtype=complex) - ext.g_star(q), q)


def boundary_check(ext: KreinExtension, d: DecomposedState) -> float:
    """``|| tau phi_star - Theta Q ||``; zero iff the state lies in ``D(A_Theta)``."""
    q = np.asarray(d.charge, dtype=complex)
    return float(np.linalg.norm(ext.model.trace(d.regular) - ext.theta_matrix @ q))


def _diagonal(ext) -> DiagonalModel:
    if not isinstance(ext.model, DiagonalModel):
        raise TypeError("operation is only available for the diagonal model")
    return ext.model


def apply_extension(ext: KreinExtension, d: DecomposedState, tol=DEFAULT_TOL):
    """``A_Theta phi = A phi_star + Re(z0) G_star Q + i Im(z0) G_diamond Q``."""
    model = _diagonal(ext)
    q = np.asarray(d.charge, dtype=complex)
    tq = model.trace(d.regular)
    tq2 = ext.theta_matrix @ q
    scale = max(1.0, np.linalg.norm(tq), np.linalg.norm(tq2))
    res = np.linalg.norm(tq - tq2)
    if res > tol * scale:
        raise BoundaryViolation(f"boundary residual {res:.3e} exceeds {tol:.1e} (relative)")
    z0 = ext.z0
    return (model.apply_a(d.regular) + z0.real * ext.g_star(q)
            + 1j * z0.imag * ext.g_diamond(q))


def additive_apply(ext: KreinExtension, d: DecomposedState):
    """``(A_bar + T) phi``: the closed extension of ``A`` plus ``tau^* Q``.

    Coincides with :func:`apply_extension` on ``D(A_Theta)``; it is defined
    on every decomposed state, boundary condition or not.
    """
    model = _diagonal(ext)
    phi = d.assemble(ext)
    return model.apply_a(phi) + model.trace_adjoint(d.charge)


def v_theta_pairing(ext: KreinExtension, phi1, phi2) -> complex:
    """``(V_Theta phi1, phi2) = <Theta^{-1} tau phi1, tau phi2>``."""
    model = ext.model
    u = solve_checked(ext.theta_matrix, model.trace(phi1), ThetaSingular, "Theta")
    return complex(np.vdot(u, model.trace(phi2)))


def v_theta_apply(ext: KreinExtension, phi):
    """``V_Theta phi = tau^* Theta^{-1} tau phi`` (diagonal model)."""
    model = _diagonal(ext)
    u = solve_checked(ext.theta_matrix, model.trace(phi), ThetaSingular, "Theta")
    return model.trace_adjoint(u)


def inverse_apply(ext: KreinExtension, phi):
    """``A_Theta^{-1} phi`` for the extension with reference point 0.

    With ``z0 = 0`` one has ``A_Theta phi = A phi_star`` and
    ``A_Theta^{-1} = -R_Theta(0) = A^{-1} - G(0) Theta^{-1} tau R(0)``.
    """
    model = _diagonal(ext)
    if ext.z0 != 0:
        raise ConfigInvalid("the inverse formula needs an extension with reference point z0 = 0")
    a = model.eigenvalues
    if np.any(a == 0.0):
        raise ZeroInSpectrum("0 is an eigenvalue of A")
    phi = np.asarray(phi, dtype=complex)
    u = solve_checked(ext.theta_matrix, model.g_breve(0.0, phi), ThetaSingular, "Theta")
    return phi / a - model.g(0.0, u)
