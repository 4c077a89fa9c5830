"""Identity suite run by ``kreinkit check``.

Every check returns a relative residual. Report keys are fixed short
identifiers that downstream tooling matches on: "2.4" resolvent/potential
identity, "2.6" adjoint symmetry of the Krein resolvent, "2.8" its first
resolvent identity, "2.10" Gamma difference, "2.11" Gamma conjugation, "4.1"
Cayley/deficiency identities, "4.2" the (Theta -+ Gamma) inverse identity,
"5.1-identity" the finite-rank kernel identity, and "gamma-unitarity" for the
reduced von Neumann unitary.
"""
from __future__ import annotations

from typing import Dict, List

import numpy as np

from .bridge import cayley_check, gamma_i, theta_to_w, w_to_theta
from .extension import KreinExtension, krein_resolvent_apply
from .models import DiagonalModel, KernelField, PointModel3D

Z_SAMPLES = (1j, 2j, 1.0 + 1.0j, -0.5 + 0.7j, 3.0 - 0.5j)


def rel(lhs, rhs) -> float:
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
    return float(np.linalg.norm(lhs - rhs) / scale)


def _pairs(zs):
    return [(z, w) for i, z in enumerate(zs) for w in zs[i + 1:]]


def _rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# --------------------------------------------------------------------------
# model-level identities


def potential_identity(model, zs=Z_SAMPLES, rng=None) -> float:
    """``(z - w) R(w) G(z) Q = G(w) Q - G(z) Q``; point model compared via traces."""
    rng = np.random.default_rng(rng)
    worst = 0.0
    for z, w in _pairs(zs):
        q = _rand_c(rng, model.n)
        lhs = model.resolvent(w, model.g(z, q)) * (z - w)
        rhs = model.g(w, q) - model.g(z, q)
        if isinstance(model, PointModel3D):
            lhs, rhs = model.trace(lhs), model.trace(rhs)
        worst = max(worst, rel(lhs, rhs))
    return worst


def g_breve_g(model, w, z) -> np.ndarray:
    """``tau R(w) G(z)`` as an ``n x n`` matrix, built column by column."""
    eye = np.eye(model.n)
    return np.column_stack([model.g_breve(w, model.g(z, e)) for e in eye])


def gamma_difference(model, z0, zs=Z_SAMPLES) -> float:
    """``Gamma(z) - Gamma(w) = (z - w) tau R(w) G(z)``."""
    worst = 0.0
    for z, w in _pairs(zs):
        lhs = model.gamma(z, z0) - model.gamma(w, z0)
        rhs = (z - w) * g_breve_g(model, w, z)
        worst = max(worst, rel(lhs, rhs))
    return worst


def gamma_conjugation(model, z0, zs=Z_SAMPLES) -> float:
    """``Gamma(conj z) = Gamma(z)^*``."""
    return max(rel(model.gamma(np.conj(z), z0), model.gamma(z, z0).conj().T) for z in zs)


def finite_rank_identity(model: DiagonalModel, zs=Z_SAMPLES, rng=None) -> float:
    """``(R(i) + R(-i) - 2 R(z)) / 2 = (1 + z A)(A - z)^{-1}(A^2 + 1)^{-1}``."""
    rng = np.random.default_rng(rng)
    a = model.eigenvalues
    worst = 0.0
    for z in zs:
        phi = _rand_c(rng, model.size)
        lhs = 0.5 * (model.resolvent(1j, phi) + model.resolvent(-1j, phi)) - model.resolvent(z, phi)
        rhs = (1 + z * a) / (a - z) / (a * a + 1) * phi
        worst = max(worst, rel(lhs, rhs))
    return worst


def inverse_identity(theta, gamma) -> float:
    """``(Theta - Gamma)^{-1} - (Theta + Gamma)^{-1} = 2 (Theta + Gamma)^{-1} Gamma (Theta - Gamma)^{-1}``."""
    inv_m = np.linalg.inv(theta - gamma)
    inv_p = np.linalg.inv(theta + gamma)
    return rel(inv_m - inv_p, 2.0 * inv_p @ gamma @ inv_m)


def gamma_gram(model) -> float:
    """``Gamma(i) = i G_+^* G_+`` with the Gram matrix from the model's inner product."""
    g = gamma_i(model).value
    cols = [model.g(1j, e) for e in np.eye(model.n)]
    gram = np.array([[model.inner(u, v) for v in cols] for u in cols])
    return rel(g, 1j * gram)


# --------------------------------------------------------------------------
# extension-level identities


def _probe_states(model, rng, count):
    if isinstance(model, DiagonalModel):
        return [_rand_c(rng, model.size) for _ in range(count)]
    # kernel sums sitting off the centres, parameter away from the samples
    scale = max(1.0, model.min_separation if model.n > 1 else 1.0)
    out = []
    for _ in range(count):
        pts = model.centers[rng.integers(model.n, size=2)] + 0.37 * scale * rng.standard_normal((2, 3))
        out.append(KernelField(pts, [1.5 + 0.25j, 0.8 - 0.6j], _rand_c(rng, 2)))
    return out


def _sample_points(model, rng, count=16):
    c = model.centers
    return c[rng.integers(len(c), size=count)] + rng.standard_normal((count, 3))


def _compare_states(model, f, g, pts):
    if isinstance(model, DiagonalModel):
        return rel(f, g)
    return rel(f.evaluate(pts), g.evaluate(pts))


def adjoint_symmetry(ext: KreinExtension, zs=Z_SAMPLES, rng=None) -> float:
    """``<phi1, R_Theta(z) phi2> = <R_Theta(conj z) phi1, phi2>``."""
    rng = np.random.default_rng(rng)
    model = ext.model
    worst = 0.0
    for z in zs:
        p1, p2 = _probe_states(model, rng, 2)
        lhs = model.inner(p1, krein_resolvent_apply(ext, z, p2))
        rhs = model.inner(krein_resolvent_apply(ext, np.conj(z), p1), p2)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst


def krein_resolvent_identity(ext: KreinExtension, zs=Z_SAMPLES, rng=None) -> float:
    """``(z - w) R_Theta(w) R_Theta(z) = R_Theta(w) - R_Theta(z)``."""
    rng = np.random.default_rng(rng)
    model = ext.model
    worst = 0.0
    for z, w in _pairs(zs):
        (phi,) = _probe_states(model, rng, 1)
        lhs = krein_resolvent_apply(ext, w, krein_resolvent_apply(ext, z, phi)) * (z - w)
        rhs = krein_resolvent_apply(ext, w, phi) - krein_resolvent_apply(ext, z, phi)
        pts = None if isinstance(model, DiagonalModel) else _sample_points(model, rng)
        worst = max(worst, _compare_states(model, lhs, rhs, pts))
    return worst


def gamma_unitarity(ext: KreinExtension) -> Dict[str, float]:
    g = gamma_i(ext.model)
    w = theta_to_w(ext.theta, g)
    th = w_to_theta(w).matrix
    return {
        "unitarity": w.unitarity_residual(),
        "roundtrip": float(np.linalg.norm(th - ext.theta_matrix) / (1.0 + np.linalg.norm(ext.theta_matrix))),
    }


# --------------------------------------------------------------------------


def _entry(desc, residual, tol):
    return {
        "description": desc,
        "residual": float(residual),
        "tolerance": float(tol),
        "pass": bool(residual < tol),
    }


def identity_suite(ext: KreinExtension, tol: float = 1e-10, seed: int = 0) -> Dict[str, dict]:
    """Run every applicable identity against ``ext``; deterministic for a seed."""
    rng = np.random.default_rng(seed)
    model = ext.model
    z0 = ext.z0
    gam_i = gamma_i(model).value
    report: Dict[str, dict] = {}
    report["2.4"] = _entry("(z-w) R(w) G(z) = G(w) - G(z)", potential_identity(model, rng=rng), tol)
    report["2.6"] = _entry("<f, R_Theta(z) g> = <R_Theta(conj z) f, g>", adjoint_symmetry(ext, rng=rng), tol)
    report["2.8"] = _entry("(z-w) R_Theta(w) R_Theta(z) = R_Theta(w) - R_Theta(z)",
                           krein_resolvent_identity(ext, rng=rng), tol)
    report["2.10"] = _entry("Gamma(z) - Gamma(w) = (z-w) tau R(w) G(z)", gamma_difference(model, z0), tol)
    report["2.11"] = _entry("Gamma(conj z) = Gamma(z)^*", gamma_conjugation(model, z0), tol)
    if isinstance(model, DiagonalModel):
        cay = cayley_check(model, rng=rng)
        report["4.1"] = _entry("G_-+ - G_+- = +-2i R(-+i) G_+- and G_- = U_A G_+",
                               max(cay.values()), tol)
    report["gamma-gram"] = _entry("Gamma(i) = i G_+^* G_+", gamma_gram(model), tol)
    th = ext.theta_matrix
    rand_th = _rand_c(rng, model.n, model.n)
    rand_th = rand_th + rand_th.conj().T
    report["4.2"] = _entry("(T-G)^-1 - (T+G)^-1 = 2 (T+G)^-1 G (T-G)^-1",
                           max(inverse_identity(th, gam_i), inverse_identity(rand_th, gam_i)), tol)
    if isinstance(model, DiagonalModel):
        report["5.1-identity"] = _entry("(R(i)+R(-i)-2R(z))/2 = (1+zA)(A-z)^-1(A^2+1)^-1",
                                        finite_rank_identity(model, rng=rng), tol)
    gu = gamma_unitarity(ext)
    report["gamma-unitarity"] = _entry("W^* (-i Gamma) W = -i Gamma", gu["unitarity"], tol)
    report["vn-roundtrip"] = _entry("w_to_theta(theta_to_w(Theta)) = Theta", gu["roundtrip"], tol)
    return report


def failed(report: Dict[str, dict]) -> List[str]:
    return [k for k, v in report.items() if not v["pass"]]
