"""Batch front door: config ingestion, experiment execution, data emission.

Config files are strict JSON: unknown keys are rejected anywhere in the
document, since silent typos in physics parameters are the worst failure
mode.  Identical (config, seed) pairs produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .density import dress, gdm_from_json
from .dynamics import StateTrajectory, evolution_csv
from .entanglement import concurrence_oracle, eof_optimize
from .errors import NHQMError, ParseError, ValidationError
from .hamiltonian import (
    HamiltonianModel,
    PTParams,
    PTQubit,
    classify_regime,
    dim_of,
    hamiltonian_from_json,
    matrix_from_json,
    pt_eigenvalues,
)
from .metric import MetricTrajectory, metric_csv, solve_metric, stationary_metric
from .nogo import ALL_THEOREMS, run_verification_suite
from .oracles import (
    BrokenMetricParams,
    EPMetricParams,
    UnbrokenMetricParams,
    broken_metric,
    cpt_metric,
    decay_metric,
    ep_metric,
    unbroken_metric,
)

TASKS = ("metric", "evolve", "sweep", "verify", "entangle")


@dataclass
class RunConfig:
    task: str
    hamiltonian: HamiltonianModel | None
    initial_metric: Any
    t0: float
    t1: float
    step: float
    out_format: str
    out_path: str
    seed: int
    samples: int
    state: np.ndarray | None = None
    sweep: dict | None = None
    verify: dict = field(default_factory=dict)
    entangle: dict | None = None


def _check_keys(obj: dict, allowed: set[str], field_name: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ValidationError(f"{field_name}.{sorted(unknown)[0]}" if field_name else sorted(unknown)[0],
                              "unknown key")


def _as_number(obj: dict, key: str, default: float | None, field_name: str) -> float:
    if key not in obj:
        if default is None:
            raise ValidationError(f"{field_name}.{key}", "required")
        return default
    val = obj[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ValidationError(f"{field_name}.{key}", "must be a number")
    return float(val)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration (strict mode)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc
    if not isinstance(doc, dict):
        raise ValidationError("", "top level must be an object")
    allowed = {
        "task", "hamiltonian", "initial_metric", "time", "output", "seed",
        "samples", "state", "sweep", "verify", "entangle",
    }
    _check_keys(doc, allowed, "")

    task = doc.get("task")
    if task not in TASKS:
        raise ValidationError("task", f"must be one of {', '.join(TASKS)}")

    time_obj = doc.get("time", {})
    if not isinstance(time_obj, dict):
        raise ValidationError("time", "must be an object")
    _check_keys(time_obj, {"t0", "t1", "step"}, "time")
    t0 = _as_number(time_obj, "t0", 0.0, "time")
    t1 = _as_number(time_obj, "t1", 1.0, "time")
    step = _as_number(time_obj, "step", 1e-3, "time")
    if step <= 0:
        raise ValidationError("time.step", "must be positive")
    if t1 <= t0:
        raise ValidationError("time.t1", "must exceed time.t0")

    out_obj = doc.get("output", {})
    if not isinstance(out_obj, dict):
        raise ValidationError("output", "must be an object")
    _check_keys(out_obj, {"format", "path"}, "output")
    default_fmt = "json" if task in ("verify", "entangle") else "csv"
    fmt = out_obj.get("format", default_fmt)
    if fmt not in ("csv", "json"):
        raise ValidationError("output.format", "must be csv or json")
    path = out_obj.get("path", "-")
    if not isinstance(path, str):
        raise ValidationError("output.path", "must be a string")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValidationError("seed", "must be an integer")

    samples = doc.get("samples", 201)
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 2:
        raise ValidationError("samples", "must be an integer >= 2")

    hamiltonian = None
    if "hamiltonian" in doc:
        hamiltonian = hamiltonian_from_json(doc["hamiltonian"])
    if task in ("metric", "evolve") and hamiltonian is None:
        raise ValidationError("hamiltonian", "required")

    initial_metric = doc.get("initial_metric")
    if task in ("metric", "evolve"):
        initial_metric = _validate_initial_metric(initial_metric)

    state = None
    if task == "evolve":
        if "state" not in doc:
            raise ValidationError("state", "required")
        try:
            state = np.array(
                [complex(float(x[0]), float(x[1])) for x in doc["state"]], dtype=complex
            )
        except (TypeError, ValueError, IndexError) as exc:
            raise ValidationError("state", f"expected a list of [re, im] pairs: {exc}") from exc

    sweep = None
    if task == "sweep":
        if "sweep" not in doc:
            raise ValidationError("sweep", "required")
        sweep = _validate_sweep(doc["sweep"])

    verify = {}
    if "verify" in doc:
        vobj = doc["verify"]
        if not isinstance(vobj, dict):
            raise ValidationError("verify", "must be an object")
        _check_keys(vobj, {"suites", "trials", "restarts"}, "verify")
        suites = vobj.get("suites")
        if suites is not None:
            if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
                raise ValidationError("verify.suites", "must be a list of names")
            for s in suites:
                if s not in ALL_THEOREMS:
                    raise ValidationError("verify.suites", f"unknown suite {s!r}")
        for key in ("trials", "restarts"):
            if key in vobj and (not isinstance(vobj[key], int) or vobj[key] < 1):
                raise ValidationError(f"verify.{key}", "must be a positive integer")
        verify = vobj

    entangle = None
    if task == "entangle":
        if "entangle" not in doc:
            raise ValidationError("entangle", "required")
        eobj = doc["entangle"]
        if not isinstance(eobj, dict):
            raise ValidationError("entangle", "must be an object")
        _check_keys(eobj, {"gdm", "ensemble_size", "restarts"}, "entangle")
        if "gdm" not in eobj:
            raise ValidationError("entangle.gdm", "required")
        entangle = eobj

    return RunConfig(
        task=task,
        hamiltonian=hamiltonian,
        initial_metric=initial_metric,
        t0=t0,
        t1=t1,
        step=step,
        out_format=fmt,
        out_path=path,
        seed=seed,
        samples=samples,
        state=state,
        sweep=sweep,
        verify=verify,
        entangle=entangle,
    )


def _validate_initial_metric(obj) -> Any:
    if obj is None:
        raise ValidationError("initial_metric", "required")
    if isinstance(obj, str):
        if obj in ("identity", "stationary"):
            return obj
        raise ValidationError("initial_metric", f"unknown choice {obj!r}")
    if not isinstance(obj, dict):
        raise ValidationError("initial_metric", "must be a string or an object")
    kind = obj.get("kind")
    if kind == "matrix":
        _check_keys(obj, {"kind", "matrix"}, "initial_metric")
        return {"kind": "matrix", "matrix": matrix_from_json(obj["matrix"], "initial_metric.matrix")}
    if kind == "oracle":
        _check_keys(obj, {"kind", "label", "coefficients"}, "initial_metric")
        label = obj.get("label")
        if label not in ("cpt", "unbroken", "broken", "ep", "decay"):
            raise ValidationError("initial_metric.label", f"unknown oracle {label!r}")
        coeffs = obj.get("coefficients", {})
        if not isinstance(coeffs, dict):
            raise ValidationError("initial_metric.coefficients", "must be an object")
        return {"kind": "oracle", "label": label, "coefficients": coeffs}
    raise ValidationError("initial_metric.kind", f"unknown kind {kind!r}")


def _validate_sweep(obj) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError("sweep", "must be an object")
    _check_keys(obj, {"r", "s", "theta"}, "sweep")
    out = {}
    for axis in ("r", "s", "theta"):
        if axis not in obj:
            raise ValidationError(f"sweep.{axis}", "required")
        spec = obj[axis]
        if isinstance(spec, (int, float)) and not isinstance(spec, bool):
            out[axis] = [float(spec)]
        elif isinstance(spec, dict):
            _check_keys(spec, {"start", "stop", "count"}, f"sweep.{axis}")
            start = _as_number(spec, "start", None, f"sweep.{axis}")
            stop = _as_number(spec, "stop", None, f"sweep.{axis}")
            count = spec.get("count")
            if not isinstance(count, int) or count < 1:
                raise ValidationError(f"sweep.{axis}.count", "must be a positive integer")
            out[axis] = [float(x) for x in np.linspace(start, stop, count)]
        else:
            raise ValidationError(f"sweep.{axis}", "must be a number or a grid object")
    return out


def _initial_metric_matrix(cfg: RunConfig) -> np.ndarray:
    spec = cfg.initial_metric
    h = cfg.hamiltonian
    d = dim_of(h)
    if spec == "identity":
        return np.eye(d, dtype=complex)
    if spec == "stationary":
        return stationary_metric(h)
    if spec["kind"] == "matrix":
        return spec["matrix"]
    label = spec["label"]
    coeffs = spec["coefficients"]
    if label == "decay":
        g0 = float(coeffs.get("g0", 1.0))
        return np.array([[decay_metric(g0, 0.0, 0.0)]], dtype=complex)
    if not isinstance(h, PTQubit):
        raise ValidationError("initial_metric", f"oracle {label!r} needs a pt_qubit hamiltonian")
    p = h.params
    if label == "cpt":
        return cpt_metric(p)
    if label == "unbroken":
        c = UnbrokenMetricParams(
            float(coeffs.get("a", 0.0)), float(coeffs.get("b", 0.0)),
            float(coeffs["c"]), float(coeffs.get("d", 0.0)),
        )
        return unbroken_metric(p, c, 0.0)
    if label == "broken":
        c = BrokenMetricParams(
            float(coeffs["a_plus"]), float(coeffs["a_minus"]),
            float(coeffs.get("b", 0.0)), float(coeffs.get("c", 0.0)),
        )
        return broken_metric(p, c, 0.0)
    c = EPMetricParams(
        float(coeffs["a"]), float(coeffs.get("b", 0.0)),
        float(coeffs.get("c", 0.0)), float(coeffs.get("d", 0.0)),
    )
    return ep_metric(p, c, 0.0)


def _run_metric(cfg: RunConfig) -> str:
    g0 = _initial_metric_matrix(cfg)
    traj = solve_metric(cfg.hamiltonian, g0, cfg.t0, cfg.t1, cfg.step)
    times = np.linspace(cfg.t0, cfg.t1, cfg.samples)
    if cfg.out_format == "csv":
        return metric_csv(traj, times)
    payload = [
        {"t": float(t), "g": [[_cpair(x) for x in row] for row in traj.at(t)]} for t in times
    ]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _cpair(x: complex) -> list[float]:
    return [float(x.real), float(x.imag)]


def _run_evolve(cfg: RunConfig) -> str:
    g0 = _initial_metric_matrix(cfg)
    gtraj = solve_metric(cfg.hamiltonian, g0, cfg.t0, cfg.t1, cfg.step)
    straj = StateTrajectory(cfg.hamiltonian, cfg.state, cfg.t0, cfg.step)
    times = np.linspace(cfg.t0, cfg.t1, cfg.samples)
    states = [straj.at(t) for t in times]
    metrics = [gtraj.at(t) for t in times]
    if cfg.out_format == "csv":
        return evolution_csv(times, states, metrics)
    payload = [
        {
            "t": float(t),
            "state": [_cpair(x) for x in psi],
            "norm_g": float(np.sqrt(max((psi.conj() @ g @ psi).real, 0.0))),
            "norm_conv": float(np.linalg.norm(psi)),
        }
        for t, psi, g in zip(times, states, metrics)
    ]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _sweep_point(args: tuple[float, float, float, float, float, float]) -> tuple:
    r, s, theta, t0, t1, step = args
    p = PTParams(r, s, theta)
    regime = classify_regime(p)
    try:
        lam_p, lam_m = pt_eigenvalues(p)
        gap = abs(lam_p - lam_m)
    except NHQMError:
        gap = 0.0
    h = PTQubit(p)
    traj = solve_metric(h, np.eye(2, dtype=complex), t0, t1, step)
    ts = np.linspace(t0, t1, 21)
    lognorms = np.array([math.log(float(np.linalg.norm(traj.at(t)))) for t in ts])
    slope = float(np.polyfit(ts, lognorms, 1)[0])
    return (r, s, theta, regime.value, gap, slope)


def _run_sweep(cfg: RunConfig) -> str:
    points = [
        (r, s, theta, cfg.t0, cfg.t1, cfg.step)
        for r in cfg.sweep["r"]
        for s in cfg.sweep["s"]
        for theta in cfg.sweep["theta"]
    ]
    threads = int(os.environ.get("NHQM_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    rows.sort(key=lambda row: (row[0], row[1], row[2]))
    if cfg.out_format == "csv":
        lines = ["r,s,theta,regime,eigenvalue_gap,metric_growth_exponent"]
        for r, s, theta, regime, gap, slope in rows:
            lines.append(
                ",".join([repr(float(r)), repr(float(s)), repr(float(theta)),
                          regime, repr(float(gap)), repr(float(slope))])
            )
        return "\n".join(lines) + "\n"
    payload = [
        {"r": r, "s": s, "theta": theta, "regime": regime,
         "eigenvalue_gap": gap, "metric_growth_exponent": slope}
        for r, s, theta, regime, gap, slope in rows
    ]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _run_verify(cfg: RunConfig) -> tuple[str, bool]:
    suites = cfg.verify.get("suites")
    reports = run_verification_suite(
        suites,
        trials=cfg.verify.get("trials"),
        seed=cfg.seed,
        restarts=cfg.verify.get("restarts"),
    )
    text = json.dumps([r.to_json() for r in reports], sort_keys=True, indent=2) + "\n"
    return text, all(r.passed for r in reports)


def _run_entangle(cfg: RunConfig) -> str:
    gdm, dim_a, dim_b = gdm_from_json(cfg.entangle["gdm"])
    m = cfg.entangle.get("ensemble_size")
    restarts = cfg.entangle.get("restarts", 16)
    value = eof_optimize(gdm, m=m, restarts=restarts, seed=cfg.seed, dims=(dim_a, dim_b))
    payload = {
        "eof_nats": value,
        "ensemble_size": m,
        "restarts": restarts,
        "seed": cfg.seed,
    }
    if dim_a == 2 and dim_b == 2:
        payload["concurrence_oracle_nats"] = concurrence_oracle(dress(gdm))
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nhqm",
        description="Non-Hermitian quantum mechanics engine: metric dynamics and no-go verification.",
    )
    parser.add_argument("task", choices=TASKS, help="task to run")
    parser.add_argument("--config", required=True, help="path to a JSON run configuration")
    parser.add_argument("--out", help="override the configured output path")
    parser.add_argument("--seed", type=int, help="override the configured seed")
    parser.add_argument("--step", type=float, help="override the configured integrator step")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
        if cfg.task != args.task:
            raise ValidationError("task", f"config is for task {cfg.task!r}, not {args.task!r}")
        if args.seed is not None:
            cfg.seed = args.seed
        if args.step is not None:
            if args.step <= 0:
                raise ValidationError("step", "must be positive")
            cfg.step = args.step
        if args.out is not None:
            cfg.out_path = args.out

        if cfg.task == "metric":
            _emit(_run_metric(cfg), cfg.out_path)
        elif cfg.task == "evolve":
            _emit(_run_evolve(cfg), cfg.out_path)
        elif cfg.task == "sweep":
            _emit(_run_sweep(cfg), cfg.out_path)
        elif cfg.task == "entangle":
            _emit(_run_entangle(cfg), cfg.out_path)
        else:
            text, ok = _run_verify(cfg)
            _emit(text, cfg.out_path)
            if not ok:
                return 1
        return 0
    except (NHQMError, OSError) as exc:
        print(f"nhqm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
