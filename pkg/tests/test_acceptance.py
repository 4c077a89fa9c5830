"""Acceptance criteria, one test per criterion.

Each test appends a ``PASS``/``FAIL`` line to the terminal summary. Runtimes
are measured after a warm-up that loads (or compiles) the numba kernels, so
they reflect steady-state cost. Run standalone with
``python3 tests/test_acceptance.py`` to print just the summary lines.
"""
import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from kreinkit import (
    DiagonalModel,
    KernelField,
    KreinExtension,
    PointModel3D,
    ReferencePoint,
    apply_extension,
    boundary_check,
    charge_of,
    decompose,
    decompose_resolvent,
    find_point_spectrum,
    gamma_i,
    inverse_apply,
    krein_resolvent_apply,
    theta_to_w,
    w_to_theta,
)
from kreinkit import checks, cli
from kreinkit.bridge import cayley_check

sys.path.insert(0, str(Path(__file__).resolve().parent))
import oracles  # noqa: E402
from conftest import ACCEPTANCE_LINES, point_theta, rand_c, rand_hermitian  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FOUR_PI = 4.0 * np.pi


def report(num, ok, detail, elapsed=None, limit=None):
    timing = "" if elapsed is None else f" [{elapsed:.2f}s / limit {limit:g}s]"
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}{timing}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module", autouse=True)
def warm_up():
    ext = KreinExtension(PointModel3D([[0, 0, 0], [1, 0, 0]]), np.eye(2))
    find_point_spectrum(ext)
    krein_resolvent_apply(ext, 2j, KernelField.kernel([0.5, 0.5, 0], 1j))
    m = DiagonalModel.random(8, 2, 0)
    checks.identity_suite(KreinExtension(m, np.eye(2)))


# --------------------------------------------------------------------------


def test_criterion_1_single_center():
    t0 = time.perf_counter()
    worst, counts_ok = 0.0, True
    for alpha in (-0.1, -1.0, -10.0):
        ext = KreinExtension(PointModel3D([[0, 0, 0]]), [[alpha + 1 / (FOUR_PI * math.sqrt(2))]])
        res = find_point_spectrum(ext)
        counts_ok &= len(res) == 1
        if res:
            expect = (FOUR_PI * alpha) ** 2
            worst = max(worst, abs(res[0].lam - expect) / expect)
    for alpha in (0.0, 1.0):
        ext = KreinExtension(PointModel3D([[0, 0, 0]]), [[alpha + 1 / (FOUR_PI * math.sqrt(2))]])
        counts_ok &= find_point_spectrum(ext) == []
    dt = time.perf_counter() - t0
    ok = counts_ok and worst < 1e-9 and dt < 1.0
    report(1, ok, f"single-centre roots, max rel err {worst:.1e} (< 1e-9), root counts ok={counts_ok}", dt, 1)
    assert ok


def test_criterion_2_two_center():
    t0 = time.perf_counter()
    worst_lam, worst_q, ok_count = 0.0, 0.0, True
    s = 1 / math.sqrt(2)
    pattern = {"symmetric": np.array([s, s]), "antisymmetric": np.array([s, -s])}
    for L in (0.5, 1.0, 2.0):
        c = [[0, 0, 0], [L, 0, 0]]
        ext = KreinExtension(PointModel3D(c), point_theta(-1.0, c))
        res = find_point_spectrum(ext)
        ref = oracles.two_center_roots(-1.0, L)
        ok_count &= len(res) == len(ref)
        for name, lam in ref.items():
            # match by charge pattern, then compare eigenvalue
            best = min(res, key=lambda r: np.linalg.norm(r.charge - pattern[name]))
            worst_q = max(worst_q, float(np.linalg.norm(best.charge - pattern[name])))
            worst_lam = max(worst_lam, abs(best.lam - lam) / lam)
    dt = time.perf_counter() - t0
    ok = ok_count and worst_lam < 1e-8 and worst_q < 1e-8 and dt < 5.0
    report(2, ok, f"two-centre roots rel err {worst_lam:.1e}, charge err {worst_q:.1e} (< 1e-8)", dt, 5)
    assert ok


def test_criterion_3_identity_suite():
    t0 = time.perf_counter()
    worst = {}
    for M in (64, 512):
        for n in (1, 2, 4, 8):
            for seed in range(20):
                rng = np.random.default_rng(1000 * M + 10 * n + seed)
                model = DiagonalModel.random(M, n, rng)
                ext = KreinExtension(model, rand_hermitian(rng, n))
                g = gamma_i(model).value
                res = {
                    "2.4": checks.potential_identity(model, rng=rng),
                    "2.6": checks.adjoint_symmetry(ext, rng=rng),
                    "2.8": checks.krein_resolvent_identity(ext, rng=rng),
                    "2.10": checks.gamma_difference(model, ext.z0),
                    "2.11": checks.gamma_conjugation(model, ext.z0),
                    "4.1": max(cayley_check(model, rng=rng).values()),
                    "4.2": checks.inverse_identity(ext.theta_matrix, g),
                    "5.1": checks.finite_rank_identity(model, rng=rng),
                }
                for k, v in res.items():
                    worst[k] = max(worst.get(k, 0.0), v)
    dt = time.perf_counter() - t0
    top = max(worst.values())
    ok = top < 1e-10 and dt < 30.0
    detail = ", ".join(f"{k}={v:.0e}" for k, v in worst.items())
    report(3, ok, f"identity suite, 160 models, max residual {top:.1e} (< 1e-10): {detail}", dt, 30)
    assert ok


def test_criterion_4_bridge():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst_u, worst_rt, worst_big = 0.0, 0.0, 0.0
    for k in range(100):
        n = 1 + k % 8
        model = DiagonalModel.random(max(16, 2 * n), n, rng)
        g = gamma_i(model)
        th = rand_hermitian(rng, n, scale=10.0 ** rng.uniform(-2, 2))
        w = theta_to_w(th, g)
        worst_u = max(worst_u, w.unitarity_residual())  # already relative to ||-i Gamma||
        back = w_to_theta(w).matrix
        worst_rt = max(worst_rt, np.linalg.norm(back - th) / (1 + np.linalg.norm(th)))
        big = theta_to_w(1e12 * (th + (np.linalg.norm(th, 2) + 1) * np.eye(n)), g)
        worst_big = max(worst_big, np.linalg.norm(big.W + np.eye(n)))
    dt = time.perf_counter() - t0
    ok = worst_u < 1e-12 and worst_rt < 1e-10 and worst_big < 1e-6 and dt < 5.0
    report(4, ok, f"bridge: unitarity {worst_u:.1e} (< 1e-12), roundtrip {worst_rt:.1e} (< 1e-10), "
                  f"||W+I|| at scale 1e12 {worst_big:.1e} (< 1e-6)", dt, 5)
    assert ok


def test_criterion_5_boundary_certificate():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst_bc, worst_q = 0.0, 0.0
    zs = (1j, 2j, 1 + 1j)
    exts = []
    for n in (1, 3, 6):
        exts.append(KreinExtension(DiagonalModel.random(128, n, rng), rand_hermitian(rng, n)))
    centers = [[0, 0, 0], [1, 0, 0], [0.3, 0.8, -0.2]]
    exts.append(KreinExtension(PointModel3D(centers), point_theta(-0.5, centers)))
    for ext in exts:
        for _ in range(5):
            if isinstance(ext.model, DiagonalModel):
                phi = rand_c(rng, ext.model.size)
            else:
                phi = KernelField(rng.standard_normal((2, 3)), [1.5 + 0.25j, 0.8 - 0.6j], rand_c(rng, 2))
            for z in zs:
                d = decompose_resolvent(ext, z, phi)
                worst_bc = max(worst_bc, boundary_check(ext, d))
                # same psi seen from every other z gives the same charge
                psi = d.assemble(ext)
                for z2 in zs:
                    phi2 = phi + (z2 - z) * psi
                    q2 = charge_of(ext, z2, phi2)
                    worst_q = max(worst_q, np.linalg.norm(q2 - d.charge))
                if isinstance(ext.model, DiagonalModel):
                    q_raw = decompose(ext, psi).charge
                    worst_q = max(worst_q, np.linalg.norm(q_raw - d.charge))
    dt = time.perf_counter() - t0
    ok = worst_bc < 1e-10 and worst_q < 1e-10 and dt < 5.0
    report(5, ok, f"boundary residual {worst_bc:.1e}, charge z-dependence {worst_q:.1e} (< 1e-10)", dt, 5)
    assert ok


def test_criterion_6_inverse_formula():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(50):
        n = 1 + k % 4
        base = DiagonalModel.random(64, n, rng, spread=2.0)
        a = base.eigenvalues + np.where(base.eigenvalues >= 0, 0.5, -0.5)
        model = DiagonalModel(a, base.trace_vectors)
        ev, vecs = np.linalg.eigh(rand_hermitian(rng, n))
        ev = ev + np.where(ev >= 0, 0.5, -0.5)  # keep Theta invertible
        th = (vecs * ev) @ vecs.conj().T
        ext0 = KreinExtension(model, th, ReferencePoint(0.0, allow_real=True))
        phi = rand_c(rng, model.size)
        back = apply_extension(ext0, decompose(ext0, inverse_apply(ext0, phi)))
        worst = max(worst, np.linalg.norm(back - phi) / np.linalg.norm(phi))
    dt = time.perf_counter() - t0
    ok = worst < 1e-10 and dt < 2.0
    report(6, ok, f"A_Theta A_Theta^-1 = 1 on 50 vectors, max rel err {worst:.1e} (< 1e-10)", dt, 2)
    assert ok


def test_criterion_7_cli_golden(tmp_path):
    same = True
    for name in ("diagonal_small", "point_single", "point_two_center"):
        cfg = cli.parse_config(json.loads((ROOT / "configs" / f"{name}.json").read_text()), "check")
        blobs = []
        for i in range(2):
            rep, code = cli.run_task(cfg, tmp_path / f"{name}{i}")
            same &= code == cli.EXIT_OK
            blobs.append((tmp_path / f"{name}{i}" / "check_report.json").read_bytes())
        same &= blobs[0] == blobs[1]
    codes = {}
    bad = json.loads((ROOT / "configs" / "diagonal_small.json").read_text())
    bad["theta"][0][1] = [0.25, 0.5]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    neg = json.loads((ROOT / "configs" / "point_two_center.json").read_text())
    neg["z"] = -1.0
    q = tmp_path / "neg.json"
    q.write_text(json.dumps(neg))
    for label, args, want in (
        ("ok", ["check", "--config", ROOT / "configs" / "point_single.json"], 0),
        ("fail", ["check", "--config", ROOT / "configs" / "point_single.json", "--tol", "1e-300"], 1),
        ("config", ["check", "--config", p], 2),
        ("numeric", ["resolvent", "--config", q], 3),
    ):
        r = subprocess.run([sys.executable, "-m", "kreinkit", *map(str, args)],
                           capture_output=True, text=True, env=dict(os.environ))
        codes[label] = (r.returncode, want)
    codes_ok = all(got == want for got, want in codes.values())
    ok = same and codes_ok
    report(7, ok, f"check reports byte-identical across runs={same}, exit codes "
                  + ", ".join(f"{k}={g}" for k, (g, _) in codes.items()))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
