"""Batch command-line front end.

Subcommands (all take ``--config <json>``, ``--out <dir>`` and an
optional ``--seed`` override):

* ``sample``      draw environment samples to CSV
* ``contour``     estimate contour tables/boundaries and validate them
* ``risk``        evaluate cost risk of one design
* ``design-opt``  optimize strengths against contour thresholds

Exit codes: 0 success, 2 configuration (including malformed input
data and cost-model violations), 3 I/O, 4 numeric/geometry/dimension,
5 no feasible design.  Identical config and seed produce byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import contour as contour_mod
from . import design as design_mod
from . import envdata
from . import lindesign
from .errors import (
    ConfigError,
    DimensionError,
    EmptyTailError,
    FactorizationError,
    GeometryError,
    ModelViolationError,
    NoFeasibleDesignError,
    NumericError,
    SampleParseError,
)
from .risk import RiskLevel

_TOP_LEVEL_KEYS = {
    "alpha", "directions", "seed", "model", "samples", "count",
    "holdout_fraction", "cost", "performance", "design", "epsilon",
    "u", "monotonicity", "sweep",
}


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = set(cfg) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"config.{sorted(unknown)[0]}: unknown field")
    return cfg


def _effective_seed(cfg: dict, override: int | None) -> int | None:
    """--seed beats the config's top-level seed; None defers to the model."""
    if override is not None:
        return override
    if "seed" in cfg:
        seed = cfg["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError(f"seed: must be a 64-bit unsigned integer, got {seed!r}")
        return seed
    return None


def _alpha(cfg: dict) -> RiskLevel:
    if "alpha" not in cfg:
        raise ConfigError("alpha: required")
    try:
        return RiskLevel(float(cfg["alpha"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"alpha: {exc}") from None


def _positive_int(cfg: dict, key: str, default: int | None = None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"{key}: required")
        return default
    value = cfg[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"{key}: must be a positive integer, got {value!r}")
    return value


def _resolve_samples(cfg: dict, seed: int | None) -> np.ndarray:
    """Load or generate the sample matrix per the exactly-one-of rule."""
    has_model = "model" in cfg and cfg["model"] is not None
    has_path = "samples" in cfg and cfg["samples"] is not None
    if has_model and has_path:
        raise ConfigError(
            "config: both 'model' and 'samples' are present; provide exactly one"
        )
    if not has_model and not has_path:
        raise ConfigError("config: one of 'model' or 'samples' is required")
    if has_path:
        path = cfg["samples"]
        if not isinstance(path, str):
            raise ConfigError(f"samples: must be a file path string, got {path!r}")
        return envdata.read_samples(path)
    model = envdata.EnvModelConfig.from_json(cfg["model"])
    if seed is not None:
        model = dataclasses.replace(model, seed=seed)
    count = _positive_int(cfg, "count")
    return envdata.sample(model, count)


def _write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_sample(args) -> int:
    cfg = _load_config(args.config)
    seed = _effective_seed(cfg, args.seed)
    if "samples" in cfg and cfg["samples"] is not None:
        if "model" in cfg and cfg["model"] is not None:
            raise ConfigError(
                "config: both 'model' and 'samples' are present; provide exactly one"
            )
        raise ConfigError("config: the sample command requires 'model'")
    if "model" not in cfg or cfg["model"] is None:
        raise ConfigError("config: the sample command requires 'model'")
    model = envdata.EnvModelConfig.from_json(cfg["model"])
    if seed is not None:
        model = dataclasses.replace(model, seed=seed)
    count = _positive_int(cfg, "count")
    values = envdata.sample(model, count)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "samples.csv")
    envdata.write_samples(values, path)
    print(f"wrote {values.shape[0]} rows x {values.shape[1]} columns to {path}")
    return 0


def _split_indices(n: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded permutation split: (estimation, holdout) index arrays."""
    n_holdout = int(round(n * fraction))
    n_holdout = min(max(n_holdout, 1), n - 1)
    perm = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([seed, 1]))
    ).permutation(n)
    return perm[: n - n_holdout], perm[n - n_holdout :]


def cmd_contour(args) -> int:
    cfg = _load_config(args.config)
    level = _alpha(cfg)
    k = _positive_int(cfg, "directions", default=360)
    fraction = cfg.get("holdout_fraction", 0.5)
    if not isinstance(fraction, (int, float)) or not 0.0 < float(fraction) < 1.0:
        raise ConfigError(
            f"holdout_fraction: must lie strictly between 0 and 1, got {fraction!r}"
        )
    seed = _effective_seed(cfg, args.seed)
    values = _resolve_samples(cfg, seed)
    if values.shape[0] < 2:
        raise ConfigError("config: at least 2 samples are needed for a holdout split")

    split_seed = seed if seed is not None else _model_seed(cfg)
    est_idx, hold_idx = _split_indices(values.shape[0], float(fraction), split_seed)
    grid = contour_mod.DirectionGrid.uniform_2d(k) if values.shape[1] == 2 else None
    if grid is None:
        raise DimensionError(
            f"contour command supports 2-D environments, got dimension {values.shape[1]}"
        )
    if k < 3:
        raise GeometryError(f"directions: boundary construction needs at least 3, got {k}")
    table = contour_mod.build_table(values[est_idx], grid, level)
    report = contour_mod.validate_exceedance(table, values[hold_idx])

    os.makedirs(args.out, exist_ok=True)
    table_path = os.path.join(args.out, "table.csv")
    contour_mod.write_contour_table(table, table_path)
    for which, name in (("classical", "boundary_classical.csv"), ("buffered", "boundary_buffered.csv")):
        bnd = contour_mod.boundary(table, which)
        contour_mod.write_contour_boundary(bnd, os.path.join(args.out, name))
    _write_json(report.to_json(), os.path.join(args.out, "validation.json"))
    print(
        f"contour table over {k} directions from {len(est_idx)} samples; "
        f"holdout max |p_hat - alpha| = {report.max_abs_deviation:.5f}"
    )
    return 0


def _model_seed(cfg: dict) -> int:
    model = cfg.get("model")
    if isinstance(model, dict) and isinstance(model.get("seed"), int):
        return model["seed"]
    return 0


def _performance_from_config(block) -> tuple[design_mod.PerformanceFunction, np.ndarray]:
    if not isinstance(block, dict) or "kind" not in block:
        raise ConfigError("performance: expected an object with a 'kind' field")
    kind = block["kind"]
    if kind == "linear":
        for name in ("A", "x"):
            if name not in block:
                raise ConfigError(f"performance.{name}: required for kind 'linear'")
        g = design_mod.linear_performance(block["A"])
        return g, np.asarray(block["x"], dtype=np.float64)
    if kind == "halfspace":
        for name in ("u", "c"):
            if name not in block:
                raise ConfigError(f"performance.{name}: required for kind 'halfspace'")
        try:
            g = design_mod.halfspace_performance(block["u"], block["c"])
        except ValueError as exc:
            raise ConfigError(f"performance.u: {exc}") from None
        return g, np.zeros(0)
    if kind == "constant":
        if "value" not in block:
            raise ConfigError("performance.value: required for kind 'constant'")
        return design_mod.constant_performance(block["value"]), np.zeros(0)
    raise ConfigError(
        f"performance.kind: expected 'linear', 'halfspace' or 'constant', got {kind!r}"
    )


def _cost_model(cfg: dict, level: RiskLevel) -> tuple[design_mod.CostModel, float]:
    block = cfg.get("cost")
    if not isinstance(block, dict):
        raise ConfigError("cost: required object with fields 'K' and 'kappa'")
    for name in ("K", "kappa"):
        if name not in block:
            raise ConfigError(f"cost.{name}: required")
    kappa_value = float(block["kappa"])
    model = design_mod.CostModel(
        failure_cost=float(block["K"]),
        design_cost=lambda _x: kappa_value,
        level=level,
    )
    return model, kappa_value


def cmd_risk(args) -> int:
    cfg = _load_config(args.config)
    level = _alpha(cfg)
    seed = _effective_seed(cfg, args.seed)
    model, _ = _cost_model(cfg, level)
    g, x = _performance_from_config(cfg.get("performance"))
    values = _resolve_samples(cfg, seed)
    report = design_mod.risk_of_cost_report(g, x, values, model)
    os.makedirs(args.out, exist_ok=True)
    payload = report.to_json()
    payload["alpha"] = level.alpha
    _write_json(payload, os.path.join(args.out, "risk.json"))
    print(
        f"p_f = {report.p_f:.6g}, var_cost = {report.var_cost:.6g}, "
        f"cvar_cost = {report.cvar_cost:.6g} ({report.case_label})"
    )
    return 0


def _candidate_directions(cfg: dict, dimension: int) -> list[np.ndarray]:
    if cfg.get("u") is not None:
        try:
            return [contour_mod.as_unit_vector(cfg["u"])]
        except ValueError as exc:
            raise ConfigError(f"u: {exc}") from None
    if cfg.get("monotonicity") is None:
        raise ConfigError("config: design-opt needs either 'u' or 'monotonicity'")
    try:
        constraints = design_mod.choose_u_signs(cfg["monotonicity"])
    except ValueError as exc:
        raise ConfigError(f"monotonicity: {exc}") from None
    if len(constraints.signs) != dimension:
        raise ConfigError(
            f"monotonicity: has {len(constraints.signs)} entries, "
            f"environment dimension is {dimension}"
        )
    sweep = _positive_int(cfg, "sweep", default=32)
    if dimension != 2:
        raise ConfigError("config: direction sweeps are supported in dimension 2 only")
    return list(constraints.sweep_2d(sweep))


def cmd_design_opt(args) -> int:
    cfg = _load_config(args.config)
    level = _alpha(cfg)
    seed = _effective_seed(cfg, args.seed)
    block = cfg.get("design")
    if not isinstance(block, dict):
        raise ConfigError("design: required object (fields A, c, lower_bounds, K, alpha)")
    block = dict(block)
    if "alpha" in block and float(block["alpha"]) != level.alpha:
        raise ConfigError(
            f"design.alpha: {block['alpha']!r} conflicts with top-level alpha {level.alpha!r}"
        )
    block.setdefault("alpha", level.alpha)
    problem = lindesign.LinearDesignProblem.from_json(block)
    epsilon = float(cfg.get("epsilon", 0.0))
    values = _resolve_samples(cfg, seed)
    if values.shape[1] != problem.n_env:
        raise DimensionError(
            f"samples have dimension {values.shape[1]}, load matrix expects {problem.n_env}"
        )
    directions = _candidate_directions(cfg, problem.n_env)

    g = design_mod.linear_performance(problem.load_matrix)
    cost_model = design_mod.CostModel(
        failure_cost=problem.failure_cost,
        design_cost=problem.design_cost,
        level=level,
    )
    results = []
    feasible: list[tuple[int, float]] = []
    for i, u in enumerate(directions):
        c_u = contour_mod.directional_quantile(values, u, level)
        record: dict = {"direction": [float(v) for v in u], "c_u": c_u}
        try:
            x, cost = lindesign.optimize_design(problem, u, c_u, epsilon)
        except NoFeasibleDesignError as exc:
            record.update({"feasible": False, "error": str(exc)})
            results.append(record)
            continue
        check = lindesign.condition_check(problem, x, u, c_u, epsilon)
        report = design_mod.risk_of_cost_report(g, x, values, cost_model)
        record.update(
            {
                "feasible": True,
                "x": [float(v) for v in x],
                "cost": cost,
                "lp_value": check.lp_value,
                "p_f": report.p_f,
                "var_cost": report.var_cost,
                "cvar_cost": report.cvar_cost,
                "case": report.case_label,
            }
        )
        results.append(record)
        feasible.append((i, report.var_cost))
    if not feasible:
        raise NoFeasibleDesignError("no feasible design for any admissible direction")
    winner_pos = design_mod.compare_concepts([v for _, v in feasible])
    winner = feasible[winner_pos][0]
    payload = {
        "alpha": level.alpha,
        "epsilon": epsilon,
        "winner": winner,
        "results": results,
    }
    os.makedirs(args.out, exist_ok=True)
    _write_json(payload, os.path.join(args.out, "design.json"))
    best = results[winner]
    print(
        f"evaluated {len(directions)} direction(s); winner {winner} with cost "
        f"{best['cost']:.6g} (p_f = {best['p_f']:.6g})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envcontour",
        description="Monte Carlo environmental contours and risk-based design",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, text in (
        ("sample", cmd_sample, "draw environment samples to CSV"),
        ("contour", cmd_contour, "estimate contour table, boundaries and validation"),
        ("risk", cmd_risk, "evaluate cost risk of one design"),
        ("design-opt", cmd_design_opt, "optimize strengths against contour thresholds"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SampleParseError, ModelViolationError, FactorizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DimensionError, GeometryError, EmptyTailError, NumericError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NoFeasibleDesignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


def entry_point() -> None:  # console-script shim
    sys.exit(main())
