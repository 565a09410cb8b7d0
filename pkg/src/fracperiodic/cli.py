"""Command-line front end: ``fracperiodic {verify,solve,trace,kernel}``.

Runs are described by a YAML file (or a bundled preset) with the sections
``command``, ``problem``, ``numerics``, ``output`` and an optional
command-specific ``options`` mapping.  Every artifact echoes the resolved
configuration, and floats are written in shortest round-trip form so that
identical configs give byte-identical files.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from . import identity_lab
from .branch_tracer import BifurcationProblem, BranchConfig, solutions_at, trace_branch
from .errors import FracPeriodicError, ParseError, ValidationError
from .frac_op import FracOrder, apply_kernel, apply_spectral, kernel_K_with_bound, normalization_C1s
from .lienard_solver import IterationConfig, LienardProblem, Polynomial, SystemProblem, solve_lienard, solve_system
from .nonlinearity import Nonlinearity
from .singular_solver import (
    AttractiveProblem,
    ContinuationConfig,
    RepulsiveProblem,
    forbat_problem,
    solve_attractive,
    solve_repulsive,
)
from .trig_field import PeriodicFunction, QuadratureConfig, grid, synthesize

log = logging.getLogger("fracperiodic")

COMMANDS = ("verify", "solve", "trace", "kernel")
KINDS = ("forbat", "attractive", "repulsive", "lienard", "system", "bifurcation")
FORMATS = ("csv", "json")
MEAN_IDENTITY_TOL = 1e-6


# -- configuration ------------------------------------------------------------------


@dataclass
class Numerics:
    n_modes: int = 64
    residual_tol: float = 1e-10
    damping: float = 0.5
    max_iterations: int = 500
    method: str = "hybrid"
    abs_tol: float = 1e-9
    max_refinement_depth: int = 12
    tail_cutoff_periods: int = 2
    seed: int = 0

    def iteration(self) -> IterationConfig:
        return IterationConfig(
            damping=self.damping,
            residual_tol=self.residual_tol,
            max_iterations=self.max_iterations,
            method=self.method,
        )

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.abs_tol, self.max_refinement_depth, self.tail_cutoff_periods)


@dataclass
class OutputSpec:
    directory: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])


@dataclass
class RunConfig:
    command: str
    problem: dict
    numerics: Numerics
    output: OutputSpec
    options: dict = field(default_factory=dict)
    preset: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "preset": self.preset,
            "problem": self.problem,
            "numerics": asdict(self.numerics),
            "output": asdict(self.output),
            "options": self.options,
        }


def preset_names() -> list:
    return sorted(p.name[: -len(".yaml")] for p in resources.files("fracperiodic.presets").iterdir() if p.name.endswith(".yaml"))


def preset_text(name: str) -> str:
    if name not in preset_names():
        raise ValidationError([f"unknown preset {name!r}; available: {', '.join(preset_names())}"])
    return resources.files("fracperiodic.presets").joinpath(f"{name}.yaml").read_text(encoding="utf-8")


def _parse_yaml(text: str, source: str):
    """Parse YAML, returning the data and a map from key paths to line numbers."""
    try:
        loader = yaml.SafeLoader(text)
        try:
            node = loader.get_single_node()
            data = loader.construct_document(node) if node is not None else {}
        finally:
            loader.dispose()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ParseError(f"{source}: {exc.problem or exc}", line, col) from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    lines: dict = {}

    def walk(n, path):
        lines[path] = n.start_mark.line + 1
        if isinstance(n, yaml.MappingNode):
            for k, v in n.value:
                walk(v, path + (str(k.value),))
        elif isinstance(n, yaml.SequenceNode):
            for i, v in enumerate(n.value):
                walk(v, path + (i,))

    if node is not None:
        walk(node, ())
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be a mapping", 1, 1)
    return data, lines


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


class _Problems:
    """Collects validation messages with the line of the offending key."""

    def __init__(self, lines: dict):
        self.lines = lines
        self.items: list = []

    def add(self, path: tuple, message: str):
        line = None
        p = tuple(path)
        while p and line is None:
            line = self.lines.get(p)
            p = p[:-1]
        where = ".".join(str(x) for x in path)
        prefix = f"line {line}: " if line is not None else ""
        self.items.append(f"{prefix}{where}: {message}")


def _check_nonlinearity(items, path, probs: _Problems):
    if not isinstance(items, list):
        probs.add(path, "expected a list of {coef, power} terms")
        return
    for i, d in enumerate(items):
        if not isinstance(d, dict) or set(d) != {"coef", "power"}:
            probs.add(path + (i,), "each term needs exactly the keys coef and power")
            continue
        for key in ("coef", "power"):
            if not isinstance(d[key], (int, float)) or not math.isfinite(d[key]):
                probs.add(path + (i, key), "must be a finite number")


def _check_forcing(payload, path, n_modes, probs: _Problems):
    if not isinstance(payload, dict):
        probs.add(path, "expected {mean, modes: [{n, a, b}]}")
        return
    if not isinstance(payload.get("mean", 0.0), (int, float)):
        probs.add(path + ("mean",), "must be a number")
    for i, m in enumerate(payload.get("modes", []) or []):
        if not isinstance(m, dict) or "n" not in m:
            probs.add(path + ("modes", i), "each mode needs n and optional a, b")
            continue
        n = m["n"]
        if not isinstance(n, int) or not 1 <= n <= n_modes:
            probs.add(path + ("modes", i, "n"), f"mode index must be an integer in 1..{n_modes}")


def _check_s(value, path, probs: _Problems):
    if not isinstance(value, (int, float)):
        probs.add(path, "s must be a number")
    elif not 0.5 < value < 1.0:
        probs.add(path, f"s={value} violates the standing assumption s in (1/2, 1)")


def _validate(raw: dict, lines: dict) -> RunConfig:
    probs = _Problems(lines)
    known = {"command", "preset", "problem", "numerics", "output", "options"}
    for k in raw:
        if k not in known:
            probs.add((k,), "unknown section")
    command = raw.get("command")
    if command not in COMMANDS:
        probs.add(("command",), f"command must be one of {', '.join(COMMANDS)}")

    num_raw = raw.get("numerics", {}) or {}
    numerics = Numerics()
    for k, v in num_raw.items():
        if not hasattr(numerics, k):
            probs.add(("numerics", k), "unknown numerics field")
            continue
        setattr(numerics, k, v)
    for k in ("residual_tol", "abs_tol", "damping"):
        v = getattr(numerics, k)
        if not isinstance(v, (int, float)) or not v > 0:
            probs.add(("numerics", k), f"{k} must be positive")
    if isinstance(numerics.damping, (int, float)) and numerics.damping > 1:
        probs.add(("numerics", "damping"), "damping must lie in (0, 1]")
    for k in ("n_modes", "max_iterations", "max_refinement_depth", "tail_cutoff_periods"):
        v = getattr(numerics, k)
        if not isinstance(v, int) or v < 1:
            probs.add(("numerics", k), f"{k} must be a positive integer")
    if numerics.method not in ("picard", "newton", "hybrid"):
        probs.add(("numerics", "method"), "method must be picard, newton or hybrid")
    if not isinstance(numerics.seed, int):
        probs.add(("numerics", "seed"), "seed must be an integer")

    out_raw = raw.get("output", {}) or {}
    output = OutputSpec(**{k: v for k, v in out_raw.items() if k in ("directory", "formats")})
    for k in out_raw:
        if k not in ("directory", "formats"):
            probs.add(("output", k), "unknown output field")
    if not isinstance(output.formats, list) or not set(output.formats) <= set(FORMATS):
        probs.add(("output", "formats"), f"formats must be a subset of {list(FORMATS)}")

    problem = raw.get("problem", {}) or {}
    n_modes = numerics.n_modes if isinstance(numerics.n_modes, int) and numerics.n_modes > 0 else 1
    if command in ("solve", "trace"):
        kind = problem.get("kind")
        if kind not in KINDS:
            probs.add(("problem", "kind"), f"kind must be one of {', '.join(KINDS)}")
        else:
            _validate_problem(kind, problem, n_modes, probs)
        if command == "trace" and kind not in (None, "bifurcation") and kind in KINDS:
            probs.add(("problem", "kind"), "trace needs a bifurcation problem")
        if command == "solve" and kind == "bifurcation":
            probs.add(("problem", "kind"), "solve does not accept bifurcation problems; use trace")
    options = raw.get("options", {}) or {}
    if not isinstance(options, dict):
        probs.add(("options",), "options must be a mapping")
        options = {}
    if command == "kernel":
        s = options.get("s", 0.5)
        if not isinstance(s, (int, float)) or not 0 < s < 1:
            probs.add(("options", "s"), "kernel order s must lie in (0, 1)")
        zs = options.get("z", [math.pi])
        zs = zs if isinstance(zs, list) else [zs]
        if not all(isinstance(z, (int, float)) and 0 < z < 2 * math.pi for z in zs):
            probs.add(("options", "z"), "every z must lie in (0, 2*pi)")
        tol = options.get("tol", 1e-12)
        if not isinstance(tol, (int, float)) or not tol > 0:
            probs.add(("options", "tol"), "tol must be positive")
    if probs.items:
        raise ValidationError(probs.items)
    return RunConfig(command, problem, numerics, output, options, raw.get("preset"))


def _validate_problem(kind: str, pr: dict, n_modes: int, probs: _Problems):
    base = ("problem",)

    def need(key):
        if key not in pr:
            probs.add(base + (key,), "missing")
            return False
        return True

    def positive(key, allow_zero=False):
        if need(key):
            v = pr[key]
            ok = isinstance(v, (int, float)) and (v >= 0 if allow_zero else v > 0)
            if not ok:
                probs.add(base + (key,), "must be " + ("non-negative" if allow_zero else "positive"))

    if kind == "system":
        if need("s_vec"):
            if not isinstance(pr["s_vec"], list) or not pr["s_vec"]:
                probs.add(base + ("s_vec",), "expected a non-empty list")
            else:
                for i, s in enumerate(pr["s_vec"]):
                    _check_s(s, base + ("s_vec", i), probs)
        if need("e"):
            for i, f in enumerate(pr["e"] if isinstance(pr["e"], list) else []):
                _check_forcing(f, base + ("e", i), n_modes, probs)
        need("A")
        need("H")
        return
    if need("s"):
        _check_s(pr["s"], base + ("s",), probs)
    forcing_key = "w" if kind == "lienard" else "e"
    if need(forcing_key):
        _check_forcing(pr[forcing_key], base + (forcing_key,), n_modes, probs)
    for key in {"forbat": ("f",), "attractive": ("f", "g"), "repulsive": ("g",), "lienard": ("f",), "bifurcation": ("G",)}[kind]:
        if need(key):
            _check_nonlinearity(pr[key], base + (key,), probs)
    if kind == "forbat":
        positive("C")
    if kind in ("repulsive", "bifurcation"):
        positive("c")
    if kind == "repulsive":
        for key in ("g4_a", "g4_b"):
            if key in pr and not isinstance(pr[key], (int, float)):
                probs.add(base + (key,), "must be a number")
        if "g3_epsilon" in pr and not (isinstance(pr["g3_epsilon"], (int, float)) and pr["g3_epsilon"] > 0):
            probs.add(base + ("g3_epsilon",), "must be positive")
        if pr.get("operator_sign", "minus") not in ("minus", "plus"):
            probs.add(base + ("operator_sign",), "must be minus or plus")
        e = pr.get("e")
        if isinstance(e, dict) and isinstance(e.get("mean", 0.0), (int, float)) and not e.get("mean", 0.0) > 0:
            probs.add(base + ("e", "mean"), "the repulsive case needs mean(e) > 0")
    if kind == "bifurcation":
        mr = pr.get("mu_range", [1e-3, 10.0])
        if not (isinstance(mr, list) and len(mr) == 2 and all(isinstance(v, (int, float)) for v in mr) and mr[0] < mr[1]):
            probs.add(base + ("mu_range",), "expected [mu_min, mu_max] with mu_min < mu_max")


def load_config(path=None, preset: Optional[str] = None, text: Optional[str] = None) -> RunConfig:
    """Parse and validate a run configuration.

    A file may name a ``preset``; the preset is loaded first and the file's
    own sections override it key by key.
    """
    if text is None and path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc}") from exc
    source = str(path) if path is not None else f"preset {preset}"
    data, lines = ({}, {}) if text is None else _parse_yaml(text, source)
    preset = preset or data.get("preset")
    if preset and preset != "custom":
        base, _ = _parse_yaml(preset_text(preset), f"preset {preset}")
        merged = _merge(base, data)
        merged["preset"] = preset
        data = merged
    return _validate(data, lines)


# -- problem construction -------------------------------------------------------------


def _forcing(payload: dict, n_modes: int) -> PeriodicFunction:
    modes = [(m["n"], m.get("a", 0.0), m.get("b", 0.0)) for m in payload.get("modes", []) or []]
    return PeriodicFunction.from_modes(float(payload.get("mean", 0.0)), modes, n_modes)


def build_problem(cfg: RunConfig):
    pr = cfg.problem
    n = cfg.numerics.n_modes
    kind = pr["kind"]
    if kind == "forbat":
        return forbat_problem(float(pr["C"]), Nonlinearity.from_list(pr["f"]), _forcing(pr["e"], n), pr["s"])
    if kind == "attractive":
        return AttractiveProblem(Nonlinearity.from_list(pr["f"]), Nonlinearity.from_list(pr["g"]), _forcing(pr["e"], n), pr["s"])
    if kind == "repulsive":
        return RepulsiveProblem(
            c=float(pr["c"]),
            g=Nonlinearity.from_list(pr["g"]),
            e=_forcing(pr["e"], n),
            s=pr["s"],
            g4_a=float(pr.get("g4_a", 0.0)),
            g4_b=float(pr.get("g4_b", 0.0)),
            g3_epsilon=float(pr.get("g3_epsilon", 1e-3)),
            operator_sign=pr.get("operator_sign", "minus"),
        )
    if kind == "lienard":
        return LienardProblem(Nonlinearity.from_list(pr["f"]), _forcing(pr["w"], n), pr["s"], float(pr.get("mean_level", 0.0)))
    if kind == "system":
        dim = len(pr["s_vec"])
        return SystemProblem(
            tuple(pr["s_vec"]),
            Polynomial.from_list(dim, pr["H"]),
            np.array(pr["A"], dtype=float),
            tuple(_forcing(f, n) for f in pr["e"]),
        )
    if kind == "bifurcation":
        return BifurcationProblem(
            float(pr["c"]), Nonlinearity.from_list(pr["G"]), _forcing(pr["e"], n), pr["s"], tuple(pr.get("mu_range", (1e-3, 10.0)))
        )
    raise ValidationError([f"problem.kind: unsupported kind {kind!r}"])


# -- output -----------------------------------------------------------------------------


def _jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, PeriodicFunction):
        return _jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    """Stable JSON: sorted keys, repr-exact floats, trailing newline."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(directory: Path, name: str, text: str):
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / name, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv(header: list, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


# -- commands --------------------------------------------------------------------------


def _verify_suite(cfg: RunConfig, jobs: int) -> list:
    opts = cfg.options
    rng = np.random.default_rng(cfg.numerics.seed)
    q = cfg.numerics.quadrature()
    n_random = int(opts.get("n_random", 3))
    s_values = [float(s) for s in opts.get("s_values", [0.55, 0.75, 0.9])]
    funcs = []
    for _ in range(n_random):
        n = int(rng.integers(1, 17))
        funcs.append(PeriodicFunction(rng.normal(), rng.normal(size=n), rng.normal(size=n)))
    t_nodes = grid(33)

    def entry(identity, parameters, residual, tolerance, comparison="<="):
        ok = residual <= tolerance if comparison == "<=" else residual < tolerance
        return {"identity": identity, "parameters": parameters, "residual": residual, "tolerance": tolerance, "pass": bool(ok)}

    def cross_oracle(k, s):
        f = funcs[k]
        diff = float(np.max(np.abs(apply_kernel(f, t_nodes, s, q) - apply_spectral(f, s)(t_nodes))))
        return entry("kernel_vs_spectral", {"function": k, "n_modes": f.n_modes, "s": s}, diff, max(1e-6, 10 * q.abs_tol))

    tasks = [(cross_oracle, (k, s)) for k in range(n_random) for s in s_values]

    def zero_mean(k, s):
        f = funcs[k]
        return [
            entry("zero_mean_spectral", {"function": k, "s": s}, identity_lab.check_zero_mean(f, s), 1e-12),
            entry("zero_mean_kernel", {"function": k, "s": s}, identity_lab.check_zero_mean(f, s, "kernel", q), max(1e-6, 10 * q.abs_tol)),
            entry("orthogonality", {"function": k, "s": s}, identity_lab.check_orthogonality(f, s), 1e-10),
        ]

    tasks += [(zero_mean, (k, s)) for k in range(n_random) for s in s_values]

    def poincare(s):
        worst = -math.inf
        for _ in range(int(opts.get("n_poincare", 100))):
            n = 8
            f = PeriodicFunction(0.0, rng_p.normal(size=n), rng_p.normal(size=n))
            lhs, rhs = identity_lab.check_poincare(f, s)
            worst = max(worst, lhs - rhs)
        return entry("poincare", {"s": s, "samples": int(opts.get("n_poincare", 100))}, max(worst, 0.0), 0.0)

    rng_p = np.random.default_rng(cfg.numerics.seed + 1)
    poincare_results = [poincare(s) for s in s_values]

    def energy():
        f = PeriodicFunction.from_modes(0.0, [(1, 1.0, 0.0)], 1)
        br = identity_lab.energy_identity(f, math.pi / 4, math.pi / 2, 0.75, q)
        return [
            entry("energy_identity", {"function": "cos t", "s": 0.75, "a": math.pi / 4, "b": math.pi / 2}, br.residual, max(1e-3, 50 * q.abs_tol)),
            entry("energy_lhs_closed_form", {"function": "cos t", "s": 0.75, "expected": -0.25}, abs(br.lhs + 0.25), 1e-10),
        ]

    tasks.append((energy, ()))

    def closed_forms():
        K, *_ = kernel_K_with_bound(math.pi, 0.5, 1e-12)
        return [
            entry("kernel_closed_form", {"z": math.pi, "s": 0.5, "expected": 0.25}, abs(K - 0.25), 1e-10),
            entry("normalization_closed_form", {"s": 0.5, "expected": 1 / math.pi}, abs(normalization_C1s(0.5) - 1 / math.pi), 1e-8),
        ]

    tasks.append((closed_forms, ()))

    def run_task(task):
        fn, args = task
        out = fn(*args)
        return out if isinstance(out, list) else [out]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(run_task, tasks))
    else:
        chunks = [run_task(t) for t in tasks]
    results = [r for chunk in chunks for r in chunk] + poincare_results
    return results


def _cmd_verify(cfg: RunConfig, out: Path, jobs: int) -> int:
    results = _verify_suite(cfg, jobs)
    report = {
        "config": cfg.to_dict(),
        "results": results,
        "all_pass": all(r["pass"] for r in results),
        "assumptions": [
            "the normalization written C(1,s) and c(1,s) is taken to be one constant, computed by normalization_C1s",
        ],
    }
    if "json" in cfg.output.formats:
        _write(out, "verify.json", dumps(report))
    return 0 if report["all_pass"] else 1


def _solution_rows(solution, m: int):
    t = grid(m)
    if isinstance(solution, list):
        cols = [synthesize(u, m) for u in solution]
        return ["t"] + [f"u{i + 1}" for i in range(len(solution))], zip(t, *cols)
    return ["t", "u"], zip(t, synthesize(solution, m))


def _cmd_solve(cfg: RunConfig, out: Path) -> int:
    problem = build_problem(cfg)
    it = cfg.numerics.iteration()
    kind = cfg.problem["kind"]
    if kind in ("forbat", "attractive"):
        report = solve_attractive(problem, it)
    elif kind == "repulsive":
        cont = ContinuationConfig(strict_conditions=bool(cfg.problem.get("strict_conditions", True)))
        report = solve_repulsive(problem, it, cont)
    elif kind == "lienard":
        lam = float(cfg.problem.get("continuation_lambda", 1.0))
        report = solve_lienard(problem, IterationConfig(**{**asdict(it), "continuation_lambda": lam}))
    else:
        report = solve_system(problem, it)
    checks = report.checks
    contract = {
        "residual": report.residual <= 10.0 * cfg.numerics.residual_tol,
        "mean_identity": checks.get("mean_identity", 0.0) <= MEAN_IDENTITY_TOL,
    }
    if "min_u" in checks:
        contract["positivity"] = checks["min_u"] > 0
    payload = {"config": cfg.to_dict(), "report": report.to_dict(), "contract": contract, "pass": all(contract.values())}
    full = report.full_solution
    n = full[0].n_modes if isinstance(full, list) else full.n_modes
    header, rows = _solution_rows(full, 8 * (2 * n + 1))
    if "csv" in cfg.output.formats:
        _write(out, "solution.csv", _csv(header, rows))
    if "json" in cfg.output.formats:
        _write(out, "report.json", dumps(payload))
        if report.bounds is not None:
            _write(out, "bounds.json", dumps({"config": cfg.to_dict(), "bounds": report.bounds}))
    return 0 if payload["pass"] else 1


def _cmd_trace(cfg: RunConfig, out: Path) -> int:
    problem = build_problem(cfg)
    pr = cfg.problem
    bcfg = BranchConfig(
        mu_seed=float(pr.get("mu_seed", 1.0)),
        sup_norm_cap=float(pr.get("sup_norm_cap", 1e3)),
        residual_tol=cfg.numerics.residual_tol,
    )
    branch = trace_branch(problem, bcfg)
    worst = max(p.mean_identity_residual for p in branch)
    summary = branch.mu_sign_summary()
    probe = [float(m) for m in cfg.options.get("probe_mu", [])]
    counts = {repr(m): len(solutions_at(branch, m)) for m in probe}
    payload = {
        "config": cfg.to_dict(),
        "termination": branch.termination,
        "conditions": branch.conditions,
        "n_points": len(branch),
        "max_mean_identity_residual": worst,
        "mu_sign": summary,
        "solution_counts": counts,
        "pass": worst <= MEAN_IDENTITY_TOL,
    }
    if cfg.options.get("solutions", False):
        payload["points"] = [p.to_dict(with_solution=True) for p in branch]
    if "csv" in cfg.output.formats:
        _write(out, "branch.csv", branch.to_csv())
    if "json" in cfg.output.formats:
        _write(out, "branch.json", dumps(payload))
    return 0 if payload["pass"] else 1


def _cmd_kernel(cfg: RunConfig, out: Path) -> int:
    s = float(cfg.options.get("s", 0.5))
    zs = cfg.options.get("z", [math.pi])
    zs = [float(z) for z in (zs if isinstance(zs, list) else [zs])]
    tol = float(cfg.options.get("tol", 1e-12))
    rows = []
    for z in zs:
        value, n_images, bound, _ = kernel_K_with_bound(z, s, tol)
        rows.append((z, value, bound))
    c1s = normalization_C1s(FracOrder(s))
    if "csv" in cfg.output.formats:
        _write(out, "kernel.csv", _csv(["z", "K", "tail_bound"], rows))
    if "json" in cfg.output.formats:
        payload = {
            "config": cfg.to_dict(),
            "s": s,
            "C1s": c1s,
            "table": [{"z": z, "K": k, "tail_bound": b} for z, k, b in rows],
        }
        _write(out, "kernel.json", dumps(payload))
    return 0


def run(cfg: RunConfig, out: Optional[Path] = None, jobs: int = 1) -> int:
    """Execute a validated config; module errors become ``error.json`` and exit status 1."""
    out = Path(out if out is not None else cfg.output.directory)
    try:
        if cfg.command == "verify":
            return _cmd_verify(cfg, out, jobs)
        if cfg.command == "solve":
            return _cmd_solve(cfg, out)
        if cfg.command == "trace":
            return _cmd_trace(cfg, out)
        return _cmd_kernel(cfg, out)
    except FracPeriodicError as exc:
        write_error(out, exc, cfg.to_dict())
        return 1


def write_error(out: Path, exc: Exception, config: Optional[dict] = None):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ValidationError):
        payload["problems"] = exc.problems
    if isinstance(exc, ParseError):
        payload["line"] = exc.line
        payload["column"] = exc.column
    last = getattr(exc, "last_residual", None)
    if last is not None:
        payload["last_residual"] = last
    if config is not None:
        payload["config"] = config
    _write(out, "error.json", dumps(payload))


def _setup_logging():
    level = os.environ.get("FRACPERIODIC_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracperiodic", description="Periodic fractional Laplacian toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--preset", help="bundled preset name (or 'custom' to use --config alone)")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, help="seed for randomized checks")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for independent sub-runs")
        if name == "kernel":
            p.add_argument("--s", type=float, help="fractional order")
            p.add_argument("--z", type=float, nargs="+", help="kernel arguments in (0, 2*pi)")
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    try:
        if args.config is None and args.preset is None:
            text = f"command: {args.command}\n"
            cfg = load_config(text=text)
        else:
            cfg = load_config(args.config, preset=args.preset)
        overrides = {}
        if args.command != cfg.command:
            overrides["command"] = args.command
        if args.seed is not None:
            overrides.setdefault("numerics", {})["seed"] = args.seed
        if args.command == "kernel":
            if args.s is not None:
                overrides.setdefault("options", {})["s"] = args.s
            if args.z is not None:
                overrides.setdefault("options", {})["z"] = list(args.z)
        if overrides:
            data = _merge(cfg.to_dict(), overrides)
            data = {k: v for k, v in data.items() if v is not None}
            cfg = _validate(data, {})
    except (ParseError, ValidationError) as exc:
        target = out or Path("out")
        write_error(target, exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, out, jobs=max(1, args.jobs))


if __name__ == "__main__":
    sys.exit(main())
