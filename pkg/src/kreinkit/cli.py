"""Command line front end.

    kreinkit <task> --config <path> [--out <dir>] [--tol <float>]

Tasks: check, bound-states, resolvent, vn-forward, vn-inverse.

Exit codes: 0 success, 1 identity check failed, 2 invalid configuration,
3 numerical/domain error raised by the library. Errors are reported on
stderr as ``{"error": <code>, "detail": <message>}``.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import io
from .bridge import ReducedUnitary, gamma_i, theta_to_w, w_to_theta
from .checks import failed, identity_suite
from .errors import ConfigInvalid, KreinkitError
from .extension import KreinExtension, ThetaParam, krein_resolvent_apply
from .models import DiagonalModel, KernelField, ReferencePoint, load_model
from .spectrum import eigencurve_table, find_point_spectrum, default_interval

TASKS = ("check", "bound-states", "resolvent", "vn-forward", "vn-inverse")
DEFAULT_TOL = 1e-10

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INTERNAL = 0, 1, 2, 3, 4


def default_tolerance() -> float:
    env = os.environ.get("KREINKIT_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise ConfigInvalid(f"KREINKIT_TOL is not a number: {env!r}") from None
    return DEFAULT_TOL


@dataclass
class RunConfig:
    task: str
    model: Any
    theta: Optional[ThetaParam]
    z0: complex = 1j
    tol: float = DEFAULT_TOL
    seed: int = 0
    options: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def extension(self) -> KreinExtension:
        if self.theta is None:
            raise ConfigInvalid(f"task {self.task!r} needs 'theta'")
        return KreinExtension(self.model, self.theta, ReferencePoint(self.z0))


def _get_z0(doc):
    raw = doc.get("z0")
    if raw is None and isinstance(doc.get("reference"), dict):
        raw = doc["reference"].get("z0")
    return io.parse_complex(raw if raw is not None else [0.0, 1.0])


def parse_config(doc: dict, task: str, tol: Optional[float] = None, base_dir=".") -> RunConfig:
    """Validate a config document; every failure is ``ConfigInvalid``."""
    if task not in TASKS:
        raise ConfigInvalid(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    if not isinstance(doc, dict):
        raise ConfigInvalid("config must be a JSON object")
    if "model" not in doc:
        raise ConfigInvalid("config needs a 'model' entry")
    model = load_model(doc["model"])
    try:
        z0 = _get_z0(doc)
        theta = None
        if doc.get("theta") is not None:
            theta = ThetaParam.from_matrix(io.parse_complex_matrix(doc["theta"]))
        if tol is None:
            tol = float(doc["tolerance"]) if "tolerance" in doc else default_tolerance()
        seed = int(doc.get("seed", 0))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigInvalid):
            raise
        raise ConfigInvalid(str(exc)) from None
    if z0.imag == 0.0:
        raise ConfigInvalid("z0 must have a non-zero imaginary part")
    if theta is not None and theta.n != model.n:
        raise ConfigInvalid(f"theta is {theta.n}x{theta.n} but the model has n = {model.n}")
    if task != "vn-inverse" and theta is None:
        raise ConfigInvalid(f"task {task!r} needs 'theta'")
    if not (tol > 0.0):
        raise ConfigInvalid("tolerance must be positive")
    opts = {k: v for k, v in doc.items()
            if k not in ("model", "theta", "z0", "reference", "tolerance", "seed", "task")}
    cfg = RunConfig(task, model, theta, z0, tol, seed, opts, Path(base_dir))
    _check_task_options(cfg)
    return cfg


def _check_task_options(cfg: RunConfig):
    o = cfg.options
    if cfg.task == "resolvent":
        if "z" not in o or "state" not in o:
            raise ConfigInvalid("resolvent task needs 'z' and 'state'")
        if not isinstance(cfg.model, DiagonalModel) and "points" not in o:
            raise ConfigInvalid("point-model resolvent task needs sample 'points'")
    if cfg.task == "vn-inverse" and "w" not in o:
        raise ConfigInvalid("vn-inverse task needs 'w'")
    if cfg.task == "bound-states":
        if isinstance(cfg.model, DiagonalModel) and "interval" not in o:
            raise ConfigInvalid("bound-states on the diagonal model needs an 'interval'")
        if "grid" in o and int(o["grid"]) < 2:
            raise ConfigInvalid("grid must be >= 2")


def _parse_state(cfg: RunConfig, raw):
    try:
        if isinstance(cfg.model, DiagonalModel):
            phi = io.parse_complex_array(raw)
            if phi.shape != (cfg.model.size,):
                raise ValueError(f"state must have {cfg.model.size} entries")
            return phi
        terms = raw["terms"] if isinstance(raw, dict) else raw
        return KernelField(
            [t["center"] for t in terms],
            [io.parse_complex(t["z"]) for t in terms],
            [io.parse_complex(t.get("amplitude", 1.0)) for t in terms],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad input state: {exc}") from None


# --------------------------------------------------------------------------
# tasks


def run_check(cfg: RunConfig):
    report = identity_suite(cfg.extension(), tol=cfg.tol, seed=cfg.seed)
    bad = failed(report)
    out = {
        "task": "check",
        "model": "diagonal" if isinstance(cfg.model, DiagonalModel) else "point3d",
        "n": cfg.model.n,
        "z0": cfg.z0,
        "tolerance": cfg.tol,
        "identities": report,
        "failed": bad,
        "all_pass": not bad,
    }
    return out, {"check_report.json": io.dumps(out)}, (EXIT_OK if not bad else EXIT_FAIL)


def _csv(rows, header):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(x, ".17g") if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def run_bound_states(cfg: RunConfig):
    ext = cfg.extension()
    o = cfg.options
    interval = tuple(float(x) for x in o["interval"]) if "interval" in o else default_interval(ext)
    grid = int(o.get("grid", 512))
    root_tol = float(o.get("root_tol", 0.0))
    results = find_point_spectrum(ext, interval, grid=grid, tol=root_tol)
    out = {
        "task": "bound-states",
        "interval": list(interval),
        "grid": grid,
        "eigenvalues": [
            {"lambda": r.lam, "charge": io.encode_complex(r.charge), "multiplicity": r.multiplicity}
            for r in results
        ],
    }
    lams = np.linspace(interval[0], interval[1], grid)
    curves = eigencurve_table(ext, lams)
    files = {
        "bound_states.json": io.dumps(out),
        "bound_states.csv": _csv([(r.lam, r.multiplicity) for r in results], ["lambda", "multiplicity"]),
        "eigencurves.csv": _csv(
            [[float(lam)] + [float(c) for c in row] for lam, row in zip(lams, curves)],
            ["lambda"] + [f"curve_{k}" for k in range(curves.shape[1])],
        ),
    }
    return out, files, EXIT_OK


def run_resolvent(cfg: RunConfig):
    ext = cfg.extension()
    o = cfg.options
    try:
        z = io.parse_complex(o["z"])
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad z: {exc}") from None
    phi = _parse_state(cfg, o["state"])
    psi = krein_resolvent_apply(ext, z, phi)
    out = {"task": "resolvent", "z": z}
    if isinstance(cfg.model, DiagonalModel):
        out["coefficients"] = io.encode_complex(psi)
    else:
        pts = np.asarray(o["points"], dtype=float).reshape(-1, 3)
        out["points"] = pts.tolist()
        out["values"] = io.encode_complex(psi.evaluate(pts))
    return out, {"resolvent.json": io.dumps(out)}, EXIT_OK


def run_vn_forward(cfg: RunConfig):
    g = gamma_i(cfg.model)
    w = theta_to_w(cfg.theta, g)
    out = {"task": "vn-forward", "W": io.encode_complex(w.W), "gamma": io.encode_complex(g.value)}
    return out, {"w.json": io.dumps(out)}, EXIT_OK


def run_vn_inverse(cfg: RunConfig):
    raw = cfg.options["w"]
    try:
        if isinstance(raw, str):
            doc = json.loads((cfg.base_dir / raw).read_text())
            raw = doc["W"] if isinstance(doc, dict) else doc
        W = io.parse_complex_matrix(raw)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"bad W: {exc}") from None
    g = gamma_i(cfg.model)
    if W.shape != g.value.shape:
        raise ConfigInvalid(f"W must be {cfg.model.n}x{cfg.model.n}")
    theta = w_to_theta(ReducedUnitary(W, g.value))
    out = {"task": "vn-inverse", "theta": io.encode_complex(theta.matrix)}
    return out, {"theta.json": io.dumps(out)}, EXIT_OK


RUNNERS = {
    "check": run_check,
    "bound-states": run_bound_states,
    "resolvent": run_resolvent,
    "vn-forward": run_vn_forward,
    "vn-inverse": run_vn_inverse,
}


def run_task(cfg: RunConfig, out_dir: Optional[Path] = None):
    """Execute ``cfg``; returns ``(report, exit_code)`` and writes files to ``out_dir``."""
    report, files, code = RUNNERS[cfg.task](cfg)
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out_dir / name).write_text(text)
    return report, code


def _error(exc, code):
    name = getattr(exc, "code", type(exc).__name__)
    sys.stderr.write(io.dumps({"error": name, "detail": str(exc)}))
    return code


def build_parser():
    p = argparse.ArgumentParser(prog="kreinkit", description=__doc__.split("\n\n")[0])
    p.add_argument("task", choices=TASKS)
    p.add_argument("--config", required=True, type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, default=None, help="directory for output files")
    p.add_argument("--tol", type=float, default=None, help="identity tolerance (relative)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        try:
            doc = json.loads(args.config.read_text())
        except (OSError, ValueError) as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from None
        cfg = parse_config(doc, args.task, args.tol, base_dir=args.config.parent)
        report, code = run_task(cfg, args.out)
    except ConfigInvalid as exc:
        return _error(exc, EXIT_CONFIG)
    except KreinkitError as exc:
        return _error(exc, EXIT_NUMERIC)
    except Exception as exc:  # noqa: BLE001 - last-resort machine-readable error
        return _error(exc, EXIT_INTERNAL)
    sys.stdout.write(io.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
