"""Concrete realizations of a self-adjoint operator ``A`` with a trace map.

Two models are provided:

``DiagonalModel``
    ``A = diag(a)`` on ``C^M`` with trace ``(tau phi)_j = <v_j, phi>`` where
    ``v_j`` is row ``j`` of the trace matrix ``V``. This is the truncated
    finite-rank perturbation setting; every operator is a dense matrix.

``PointModel3D``
    ``A`` is the Laplacian on ``L^2(R^3)`` and ``tau`` evaluates at a finite
    set of centers. States are kernel sums (``KernelField``) on which the free
    resolvent, the trace and the ``L^2`` inner product act in closed form.

Conventions: ``R(z) = (-A + z)^{-1}``; ``G(z) = (tau R(conj z))^*``; the
square root of the spectral parameter is the principal branch (``Re > 0``),
which makes the free kernel ``exp(-sqrt(z) r) / (4 pi r)`` decay.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import (
    BranchCutViolation,
    ConfigInvalid,
    DegenerateRadius,
    SingularAtCenter,
    SpectralPointInSpectrum,
)

FOUR_PI = 4.0 * np.pi
_EPS = np.finfo(float).eps


def principal_sqrt(z):
    return np.sqrt(complex(z))


@dataclass(frozen=True)
class ReferencePoint:
    """The point ``z0`` used to split states into regular and singular parts.

    ``z0`` must be non-real unless ``allow_real`` is set; a real reference
    point is only meaningful inside the real resolvent set of ``A`` and is
    validated against the model by :class:`~kreinkit.extension.KreinExtension`.
    """

    z0: complex = 1j
    allow_real: bool = False

    def __post_init__(self):
        z0 = complex(self.z0)
        if not np.isfinite(z0):
            raise ConfigInvalid("reference point must be finite")
        if z0.imag == 0.0 and not self.allow_real:
            raise ConfigInvalid("reference point z0 must have a non-zero imaginary part")
        object.__setattr__(self, "z0", z0)

    @property
    def conj(self) -> complex:
        return self.z0.conjugate()

    @property
    def is_real(self) -> bool:
        return self.z0.imag == 0.0


@dataclass(frozen=True)
class GammaMatrix:
    """``Gamma(z) = tau (G_star - G(z))`` evaluated at ``z`` for reference ``z0``."""

    value: np.ndarray
    z: complex
    z0: complex

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.value, dtype=dtype)


def _as_points(x):
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected points of shape (P, 3), got {np.shape(x)}")
    return np.ascontiguousarray(pts)


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class KernelField:
    """A field on ``R^3`` given as a finite sum of free Green kernels.

    ``f(x) = smooth(x) + sum_t amp_t * exp(-sqrt(z_t) |x - c_t|) / (4 pi |x - c_t|)``

    ``smooth`` is an optional callable mapping ``(P, 3)`` points to ``P``
    complex values; it can be traced and evaluated but the resolvent and the
    inner product only act on the kernel terms.
    """

    __slots__ = ("centers", "zs", "amps", "sqrt_zs", "smooth")

    def __init__(self, centers=(), zs=(), amps=(), smooth: Optional[Callable] = None):
        centers = np.asarray(centers, dtype=float).reshape(-1, 3)
        zs = np.asarray(zs, dtype=complex).reshape(-1)
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        if not (len(centers) == len(zs) == len(amps)):
            raise ValueError("centers, zs and amps must have equal length")
        self.centers = _freeze(centers)
        self.zs = _freeze(zs)
        self.amps = _freeze(amps)
        self.sqrt_zs = _freeze(np.sqrt(zs))
        self.smooth = smooth

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def kernel(cls, center, z, amp=1.0):
        return cls([center], [z], [amp])

    def __len__(self):
        return len(self.amps)

    def __repr__(self):
        extra = ", smooth" if self.smooth is not None else ""
        return f"KernelField({len(self)} terms{extra})"

    # -- algebra ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, KernelField):
            return NotImplemented
        if self.smooth is None:
            smooth = other.smooth
        elif other.smooth is None:
            smooth = self.smooth
        else:
            a, b = self.smooth, other.smooth
            smooth = lambda x: a(x) + b(x)  # noqa: E731
        return KernelField(
            np.concatenate([self.centers, other.centers]),
            np.concatenate([self.zs, other.zs]),
            np.concatenate([self.amps, other.amps]),
            smooth,
        ).compact()

    def __mul__(self, c):
        c = complex(c)
        smooth = None
        if self.smooth is not None:
            s = self.smooth
            smooth = lambda x: c * s(x)  # noqa: E731
        return KernelField(self.centers, self.zs, self.amps * c, smooth)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        if not isinstance(other, KernelField):
            return NotImplemented
        return self + (-other)

    def compact(self):
        """Merge terms sharing centre and spectral parameter; drop exact zeros."""
        if len(self) == 0:
            return self
        keys = {}
        for c, z, a in zip(self.centers, self.zs, self.amps):
            k = (c[0], c[1], c[2], z.real, z.imag)
            keys[k] = keys.get(k, 0.0) + a
        items = [(k, a) for k, a in keys.items() if a != 0]
        if not items:
            return KernelField(smooth=self.smooth)
        centers = [k[:3] for k, _ in items]
        zs = [complex(k[3], k[4]) for k, _ in items]
        amps = [a for _, a in items]
        return KernelField(centers, zs, amps, self.smooth)

    # -- evaluation ------------------------------------------------------

    def evaluate(self, x, tol=1e-9):
        """Evaluate at points ``x`` (shape ``(3,)`` or ``(P, 3)``).

        Where kernel terms sit exactly on an evaluation point their ``1/r``
        parts must cancel (net amplitude zero within ``tol`` relative); the
        finite remainder is then returned. Otherwise ``SingularAtCenter``.
        """
        pts = _as_points(x)
        scale = max(1.0, float(np.abs(self.centers).max(initial=0.0)))
        vals, net, mag = kernels.field_eval(
            pts,
            np.ascontiguousarray(self.centers),
            np.ascontiguousarray(self.sqrt_zs),
            np.ascontiguousarray(self.amps),
            64 * _EPS * scale,
        )
        bad = np.abs(net) > tol * np.maximum(mag, 1e-300)
        if np.any(bad):
            p = pts[np.argmax(bad)]
            raise SingularAtCenter(f"kernel singularity at evaluation point {p.tolist()}")
        if self.smooth is not None:
            vals = vals + np.asarray(self.smooth(pts), dtype=complex)
        return vals

    def __call__(self, x):
        vals = self.evaluate(x)
        return vals[0] if np.ndim(x) == 1 else vals

    def net_amplitude(self, point):
        """Sum of amplitudes of the terms centred at ``point``."""
        point = np.asarray(point, dtype=float)
        hit = np.all(self.centers == point, axis=1)
        return complex(self.amps[hit].sum())

    def is_regular_at(self, points, tol=1e-9):
        for p in _as_points(points):
            hit = np.all(self.centers == p, axis=1)
            mag = np.abs(self.amps[hit]).sum()
            if mag and abs(self.amps[hit].sum()) > tol * mag:
                return False
        return True


def _overlap(sp, sq, r):
    """``int G_p(|x - y1|) G_q(|x - y2|) dx`` with ``|y1 - y2| = r``.

    ``sp, sq`` are the principal roots of ``p, q``; follows from the first
    resolvent identity of the free Laplacian.
    """
    if r == 0.0:
        return 1.0 / (FOUR_PI * (sp + sq))
    d = sq - sp
    if d == 0:
        return np.exp(-sp * r) / (2.0 * FOUR_PI * sp)
    # exp(-sp r) - exp(-sq r) without cancellation for sq close to sp
    return -np.exp(-sp * r) * np.expm1(-d * r) / (FOUR_PI * r * d * (sp + sq))


def l2_inner(f: KernelField, g: KernelField) -> complex:
    """Exact ``L^2`` inner product (conjugate-linear in ``f``) of kernel fields."""
    if f.smooth is not None or g.smooth is not None:
        raise NotImplementedError("inner product is defined for pure kernel sums only")
    total = 0.0 + 0.0j
    for cf, sf, af in zip(f.centers, f.sqrt_zs, f.amps):
        if af == 0:
            continue
        for cg, sg, ag in zip(g.centers, g.sqrt_zs, g.amps):
            r = float(np.linalg.norm(cf - cg))
            total += np.conj(af) * ag * _overlap(np.conj(sf), sg, r)
    return complex(total)


class OperatorModel:
    """Common surface of the two models.

    Subclasses supply ``n``, ``check_resolvent``, ``resolvent``, ``trace``,
    ``g``, ``gamma``, ``inner`` and ``zero_state``.
    """

    n: int

    def g_breve(self, z, phi):
        """``tau R(z) phi``."""
        return self.trace(self.resolvent(z, phi))

    def g_star(self, z0, q):
        z0 = complex(z0)
        if z0.imag == 0.0:
            return self.g(z0, q)
        return 0.5 * (self.g(z0, q) + self.g(z0.conjugate(), q))

    def g_diamond(self, z0, q):
        z0 = complex(z0)
        if z0.imag == 0.0:
            return 0.0 * self.g(z0, q)
        return 0.5 * (self.g(z0, q) - self.g(z0.conjugate(), q))

    def _charge(self, q):
        q = np.asarray(q, dtype=complex).reshape(-1)
        if q.shape != (self.n,):
            raise ValueError(f"charge must have length {self.n}, got {q.shape}")
        return q


@dataclass(frozen=True)
class DiagonalModel(OperatorModel):
    """``A = diag(eigenvalues)`` with trace functionals the rows of ``trace_vectors``."""

    eigenvalues: np.ndarray
    trace_vectors: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.eigenvalues, dtype=float).reshape(-1)
        v = np.asarray(self.trace_vectors, dtype=complex)
        if v.ndim == 1:
            v = v[None, :]
        if v.ndim != 2 or v.shape[1] != a.size:
            raise ConfigInvalid(
                f"trace_vectors must be n x M with M = {a.size}, got shape {v.shape}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
            raise ConfigInvalid("model data must be finite")
        n, m = v.shape
        if m < n:
            raise ConfigInvalid(f"need M >= n, got M={m}, n={n}")
        if np.linalg.matrix_rank(v) < n:
            raise ConfigInvalid("trace vectors are rank deficient: the trace map is not surjective")
        object.__setattr__(self, "eigenvalues", _freeze(a))
        object.__setattr__(self, "trace_vectors", _freeze(v))

    @classmethod
    def random(cls, size, n, rng=None, spread=3.0):
        rng = np.random.default_rng(rng)
        a = spread * rng.standard_normal(size)
        v = rng.standard_normal((n, size)) + 1j * rng.standard_normal((n, size))
        return cls(a, v / np.sqrt(size))

    @property
    def n(self) -> int:
        return self.trace_vectors.shape[0]

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def check_resolvent(self, z):
        z = complex(z)
        a = self.eigenvalues
        if z.imag == 0.0 and np.any(np.abs(z.real - a) <= 4 * _EPS * np.maximum(1.0, np.abs(a))):
            raise SpectralPointInSpectrum(f"z = {z} is an eigenvalue of A")
        return z

    def _state(self, phi):
        phi = np.asarray(phi, dtype=complex)
        if phi.shape[-1] != self.size:
            raise ValueError(f"state must have length {self.size}, got {phi.shape}")
        return phi

    def zero_state(self):
        return np.zeros(self.size, dtype=complex)

    def apply_a(self, phi):
        return self.eigenvalues * self._state(phi)

    def resolvent(self, z, phi):
        z = self.check_resolvent(z)
        return self._state(phi) / (z - self.eigenvalues)

    def trace(self, phi):
        return self.trace_vectors.conj() @ self._state(phi)

    def trace_adjoint(self, q):
        """``tau^*``: charge to the ``H_-`` functional ``sum_j q_j v_j``."""
        return self.trace_vectors.T @ self._charge(q)

    def g(self, z, q):
        z = self.check_resolvent(z)
        return (self.trace_vectors.T @ self._charge(q)) / (z - self.eigenvalues)

    def g_matrix(self, z):
        """``G(z)`` as a dense ``M x n`` matrix."""
        z = self.check_resolvent(z)
        return self.trace_vectors.T / (z - self.eigenvalues)[:, None]

    def gamma(self, z, z0=1j):
        z = self.check_resolvent(z)
        z0 = complex(z0)
        a = self.eigenvalues
        w = 0.5 * (1.0 / (z0 - a) + 1.0 / (z0.conjugate() - a)) - 1.0 / (z - a)
        return kernels.weighted_gram(self.trace_vectors, np.ascontiguousarray(w))

    def inner(self, f, g):
        return complex(np.vdot(f, g))

    def norm(self, f):
        return float(np.linalg.norm(f))


@dataclass(frozen=True)
class PointModel3D(OperatorModel):
    """Laplacian on ``L^2(R^3)`` with point evaluation at ``centers``."""

    centers: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        if c.ndim != 2 or c.shape[1] != 3 or c.shape[0] < 1:
            raise ConfigInvalid(f"centers must be a non-empty (n, 3) array, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ConfigInvalid("centers must be finite")
        if self.min_separation_of(c) <= 0.0:
            raise ConfigInvalid("centers must be pairwise distinct")
        object.__setattr__(self, "centers", _freeze(c))

    @staticmethod
    def min_separation_of(c):
        if len(c) < 2:
            return np.inf
        d = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
        return float(d[~np.eye(len(c), dtype=bool)].min())

    @property
    def min_separation(self) -> float:
        return self.min_separation_of(self.centers)

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    def check_resolvent(self, z):
        z = complex(z)
        if not np.isfinite(z):
            raise SpectralPointInSpectrum("z must be finite")
        if z.imag == 0.0 and z.real <= 0.0:
            raise BranchCutViolation(f"z = {z} lies on the spectrum (-inf, 0] of the Laplacian")
        return z

    def zero_state(self):
        return KernelField.zero()

    def resolvent(self, z, phi: KernelField):
        """Free resolvent on kernel sums.

        Each term ``G_w(. - c)`` maps to ``(G_z - G_w)(. - c) / (w - z)``.
        """
        z = self.check_resolvent(z)
        if phi.smooth is not None:
            raise NotImplementedError("the resolvent acts on kernel sums only")
        if np.any(phi.zs == z):
            raise ValueError("resolvent parameter coincides with a kernel parameter")
        coef = phi.amps / (phi.zs - z)
        return KernelField(
            np.concatenate([phi.centers, phi.centers]),
            np.concatenate([np.full(len(phi), z), phi.zs]),
            np.concatenate([coef, -coef]),
        ).compact()

    def trace(self, phi: KernelField):
        return phi.evaluate(self.centers)

    def g(self, z, q):
        z = self.check_resolvent(z)
        return KernelField(self.centers, np.full(self.n, z), self._charge(q))

    def gamma(self, z, z0=1j):
        z = self.check_resolvent(z)
        s0 = principal_sqrt(z0)
        out = kernels.point_gamma_scan(
            np.ascontiguousarray(self.centers),
            np.array([principal_sqrt(z)], dtype=complex),
            s0,
        )
        return out[0]

    def inner(self, f, g):
        return l2_inner(f, g)

    def norm(self, f):
        return float(np.sqrt(max(l2_inner(f, f).real, 0.0)))


# --------------------------------------------------------------------------
# operation-level functions


def resolvent_apply(model: OperatorModel, z, phi):
    """``R(z) phi = (-A + z)^{-1} phi``."""
    return model.resolvent(z, phi)


def free_green_eval(z, r) -> complex:
    """``exp(-sqrt(z) r) / (4 pi r)`` with the principal root."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise BranchCutViolation(f"z = {z} lies on the cut (-inf, 0]")
    r = float(r)
    if r <= 0.0:
        raise DegenerateRadius("radius must be positive")
    return complex(np.exp(-principal_sqrt(z) * r) / (FOUR_PI * r))


def trace_apply(model: OperatorModel, phi):
    return model.trace(phi)


def g_apply(model: OperatorModel, z, q):
    return model.g(z, q)


def g_breve_apply(model: OperatorModel, z, phi):
    return model.g_breve(z, phi)


def gamma_matrix(model: OperatorModel, z, ref: ReferencePoint = ReferencePoint()) -> GammaMatrix:
    z0 = ref.z0 if isinstance(ref, ReferencePoint) else complex(ref)
    return GammaMatrix(model.gamma(z, z0), complex(z), z0)


def load_model(doc: dict) -> OperatorModel:
    """Build a model from its JSON description."""
    from .io import parse_complex_array

    if not isinstance(doc, dict) or "type" not in doc:
        raise ConfigInvalid("model description needs a 'type' field")
    kind = doc["type"]
    if kind == "diagonal":
        try:
            a = np.asarray(doc["eigenvalues"], dtype=float)
            v = parse_complex_array(doc["trace_vectors"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad diagonal model: {exc}") from None
        if v.ndim == 1:
            v = v[None, :]
        return DiagonalModel(a, v)
    if kind == "point3d":
        try:
            c = np.asarray(doc["centers"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"bad point3d model: {exc}") from None
        return PointModel3D(c)
    raise ConfigInvalid(f"unknown model type {kind!r}")
