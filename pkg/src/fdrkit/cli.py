"""Command-line interface: simulate, estimate, benchmark, selftest.

Configuration comes from a flat ``key = value`` file (``--config``) with
command-line flags taking precedence. Exit codes: 0 success,
2 validation problem, 3 I/O problem, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import io
from .basis import BSPLINE, PCA
from .edr import EdrConfig, FSAVE_METHOD, METHODS, estimate
from .exceptions import (
    DatasetFormatError,
    EstimationError,
    FdrkitError,
    ParameterError,
    SingularityError,
)
from .fda import Grid
from .figures import benchmark_boxplot_svg, direction_overlay_svg
from .selftest import format_report, run_selftest
from .simulate import MODELS, model_spec, run_benchmark, simulate_dataset
from .smoothing import get_kernel

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4

THREADS_ENV_VAR = "FDRKIT_THREADS"


def _parse_bool(token: str) -> bool:
    if token.lower() in ("true", "1", "yes"):
        return True
    if token.lower() in ("false", "0", "no"):
        return False
    raise ParameterError(f"expected a boolean, got {token!r}")


def _parse_bandwidth(token: str):
    if token == "cv":
        return "cv"
    try:
        return float(token)
    except ValueError:
        raise ParameterError(f"bandwidth must be a number or 'cv', got {token!r}") from None


def _parse_int_list(token: str) -> tuple:
    return tuple(int(v) for v in token.split(",") if v)


def _parse_str_list(token: str) -> tuple:
    return tuple(v.strip() for v in token.split(",") if v.strip())


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared by all commands."""

    model: str = "model1"
    models: tuple = ("model1", "model2")
    method: str = "fave"
    methods: tuple = ("fave", "fsir", "fsave")
    basis: str = PCA
    bases: tuple = (PCA, BSPLINE)
    dim: int = 4
    dims: tuple = (4, 5, 6, 7, 8)
    ndirs: int = 2
    slices: int | None = None
    kernel: str = "epanechnikov2"
    bandwidth: float | str = "cv"
    clip_cap: float | None = None
    clip_exponent: float | None = None
    ridge: float = 1e-12
    n: int = 100
    m: int = 100
    grid_size: int = 100
    seed: int = 0
    out: str = "."
    plots: bool = True
    threads: int | None = None

    def validate(self):
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}")
        for mdl in self.models:
            if mdl not in MODELS:
                raise ParameterError(f"model must be one of {MODELS}")
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS}")
        for meth in self.methods:
            if meth not in METHODS:
                raise ParameterError(f"method must be one of {METHODS}")
        for b in (self.basis, *self.bases):
            if b not in (PCA, BSPLINE):
                raise ParameterError(f"basis must be 'pca' or 'bspline', got {b!r}")
        get_kernel(self.kernel)
        for name, value, floor in (
            ("dim", self.dim, 1),
            ("ndirs", self.ndirs, 1),
            ("n", self.n, 2),
            ("m", self.m, 1),
            ("grid_size", self.grid_size, 2),
        ):
            if value < floor:
                raise ParameterError(f"{name} must be at least {floor}")
        if not self.dims or any(d < 1 for d in self.dims):
            raise ParameterError("dims must be positive integers")
        if self.slices is not None and self.slices < 2:
            raise ParameterError("slices must be at least 2")
        if self.threads is not None and self.threads < 1:
            raise ParameterError("threads must be at least 1")
        if isinstance(self.bandwidth, str) and self.bandwidth != "cv":
            raise ParameterError("bandwidth must be a number or 'cv'")
        return self

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return self.threads
        env = os.environ.get(THREADS_ENV_VAR)
        if env:
            try:
                value = int(env)
            except ValueError:
                raise ParameterError(
                    f"{THREADS_ENV_VAR} must be an integer, got {env!r}"
                ) from None
            if value < 1:
                raise ParameterError(f"{THREADS_ENV_VAR} must be at least 1")
            return value
        return 1

    def edr_config(self, n_components: int | None = None) -> EdrConfig:
        return EdrConfig(
            n_components=self.dim if n_components is None else n_components,
            n_directions=self.ndirs,
            basis=self.basis,
            kernel=self.kernel,
            bandwidth=self.bandwidth,
            clip_cap=self.clip_cap,
            clip_exponent=self.clip_exponent,
            ridge=self.ridge,
        )


_FIELD_PARSERS = {
    "model": str,
    "models": _parse_str_list,
    "method": str,
    "methods": _parse_str_list,
    "basis": str,
    "bases": _parse_str_list,
    "dim": int,
    "dims": _parse_int_list,
    "ndirs": int,
    "slices": int,
    "kernel": str,
    "bandwidth": _parse_bandwidth,
    "clip_cap": float,
    "clip_exponent": float,
    "ridge": float,
    "n": int,
    "m": int,
    "grid_size": int,
    "seed": int,
    "out": str,
    "plots": _parse_bool,
    "threads": int,
}


def parse_config_text(text: str) -> dict:
    """Parse a flat key = value config; '#' starts a comment; unknown keys rejected."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"config line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_PARSERS:
            raise ParameterError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ParameterError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = _FIELD_PARSERS[key](value)
    return values


def serialize_config(config: RunConfig) -> str:
    """Config as flat text; parsing it back reproduces the config exactly."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            text = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path: str | None, overrides: dict) -> RunConfig:
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values).validate()


def _overrides_from_args(args) -> dict:
    mapping = {
        "model": args.model,
        "method": getattr(args, "method", None),
        "basis": getattr(args, "basis", None),
        "dim": getattr(args, "dim", None),
        "ndirs": getattr(args, "ndirs", None),
        "slices": getattr(args, "slices", None),
        "bandwidth": getattr(args, "bandwidth", None),
        "n": getattr(args, "n", None),
        "m": getattr(args, "m", None),
        "seed": args.seed,
        "out": args.out,
        "plots": getattr(args, "plots", None),
        "threads": getattr(args, "threads", None),
    }
    if getattr(args, "model", None) is not None:
        mapping["models"] = (args.model,)
    return mapping


def cmd_simulate(config: RunConfig) -> int:
    grid = Grid.uniform(config.grid_size)
    spec = model_spec(config.model, grid)
    ds = simulate_dataset(spec, config.n, config.seed)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{config.model}_n{config.n}_seed{config.seed}"
    data_path = out / f"{stem}.csv"
    io.write_dataset(data_path, ds)
    io.write_manifest(
        out / f"{stem}.json",
        model=config.model,
        seed=config.seed,
        n=config.n,
        noise_sd=spec.noise_sd,
        grid=grid,
    )
    print(f"wrote {data_path}")
    return EXIT_OK


def cmd_estimate(config: RunConfig, dataset_path: str) -> int:
    if config.method == FSAVE_METHOD and config.slices is None:
        raise ParameterError("method 'fsave' requires --slices (or config key 'slices')")
    dataset_path = Path(dataset_path)
    manifest_path = dataset_path.with_suffix(".json")
    manifest = io.read_manifest(manifest_path) if manifest_path.exists() else {}
    ds = io.read_dataset(dataset_path, grid=manifest.get("grid"))
    result = estimate(ds, config.method, config.edr_config(), n_slices=config.slices)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{dataset_path.stem}_{config.method}"
    io.write_directions_csv(out / f"{stem}_directions.csv", result)
    io.write_estimate_json(out / f"{stem}.json", result)
    truth = None
    if manifest.get("model") in MODELS:
        truth = model_spec(manifest["model"], ds.grid)
    if truth is not None:
        io.write_indices_csv(
            out / f"{stem}_indices.csv",
            ds.values @ (truth.betas * ds.grid.weights).T,
            result.indices(ds.values),
        )
    if config.plots:
        direction_overlay_svg(
            out / f"{stem}_directions.svg",
            ds.grid,
            result.directions,
            truths=truth.betas if truth is not None else None,
            title=f"{config.method} directions ({dataset_path.stem})",
        )
    print(f"wrote {out / (stem + '_directions.csv')}")
    return EXIT_OK


def cmd_benchmark(config: RunConfig) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    threads = config.resolved_threads()
    all_results = []
    for model in config.models:
        all_results.extend(
            run_benchmark(
                model,
                methods=config.methods,
                basis_kinds=config.bases,
                dims=config.dims,
                n=config.n,
                m=config.m,
                seed=config.seed,
                grid_size=config.grid_size,
                n_slices=config.slices if config.slices is not None else 10,
                config=config.edr_config(),
                threads=threads,
            )
        )
    long_path = out / "benchmark_long.csv"
    io.write_benchmark_long(long_path, all_results)
    io.write_benchmark_summary(out / "benchmark_summary.csv", all_results)
    if config.plots:
        for model in config.models:
            for basis_kind in config.bases:
                subset = [
                    r for r in all_results
                    if r.model == model and r.basis == basis_kind
                ]
                if not subset:
                    continue
                benchmark_boxplot_svg(
                    out / f"boxplot_{model}_{basis_kind}.svg",
                    subset,
                    title=f"{model}, {basis_kind} basis",
                )
    total = sum(r.per_replication.size for r in all_results)
    failed = sum(r.failures for r in all_results)
    print(f"wrote {long_path} ({total} replications, {failed} failures)")
    if failed == total:
        raise EstimationError("benchmark", "every replication failed")
    return EXIT_OK


def cmd_selftest(corrupt: str | None = None) -> int:
    checks = run_selftest(corrupt=corrupt)
    print(format_report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdrkit",
        description="Functional dimension reduction: kernel FAVE, FSIR, sliced FSAVE.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_estimation=False, with_bench=False):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory (default: current)")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--model", choices=MODELS, help="simulation model")
        if with_estimation:
            p.add_argument("--method", choices=METHODS, help="estimator")
            p.add_argument("--basis", choices=(PCA, BSPLINE), help="truncation basis")
            p.add_argument("--dim", type=int, help="truncation dimension D")
            p.add_argument("--ndirs", type=int, help="number of directions K")
            p.add_argument("--slices", type=int, help="FSAVE slice count")
            p.add_argument(
                "--bandwidth", type=_parse_bandwidth, help="kernel bandwidth or 'cv'"
            )
            p.add_argument("--plots", type=_parse_bool, help="write SVG figures (true/false)")
        if with_bench:
            p.add_argument("--threads", type=int, help="parallel replications")
            p.add_argument("--n", type=int, help="sample size per dataset")
            p.add_argument("--m", type=int, help="replications per scenario")

    p_sim = sub.add_parser("simulate", help="write a simulated dataset and manifest")
    common(p_sim)
    p_sim.add_argument("--n", type=int, help="sample size")

    p_est = sub.add_parser("estimate", help="fit an estimator on a dataset CSV")
    common(p_est, with_estimation=True)
    p_est.add_argument("dataset", help="dataset CSV path")

    p_bench = sub.add_parser("benchmark", help="replicated comparison study")
    common(p_bench, with_estimation=True, with_bench=True)

    p_self = sub.add_parser("selftest", help="run reduced-size self-checks")
    p_self.add_argument("--corrupt", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest(corrupt=args.corrupt)
        config = load_config(args.config, _overrides_from_args(args))
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "estimate":
            return cmd_estimate(config, args.dataset)
        return cmd_benchmark(config)
    except (EstimationError, SingularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DatasetFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FdrkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
