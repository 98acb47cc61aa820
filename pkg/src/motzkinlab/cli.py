"""Command-line front end.

Subcommands: exact (weight tables, joint laws, end-point generating
function), sample (exact path sampling), limit (kernel rows, initial
laws, trajectories), verify (numerical certificates), converge (total
variation ladders).  Every run writes a manifest echoing the fully
resolved configuration; outputs are byte-identical across reruns of the
same configuration.  Exit codes: 0 success, 1 configuration error, 2
certificate failure.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import converge, engine, limit_chains, sampler, spectral
from .model import (
    BoundaryMeasure,
    ModelSpec,
    RejectedInputError,
    WeightConfig,
    as_fraction,
)

_COMMANDS = ("exact", "sample", "limit", "verify", "converge")


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so errors become machine-readable JSON
    def error(self, message):
        raise _CliError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    sigma: str = "1"
    alpha: str = "finite:1"
    beta: str = "finite:1"
    length: int = 8
    ladder: tuple[int, ...] | None = None
    k: int | None = None
    rho1: str | None = None
    rho0: str | None = None
    seed: int = 0
    samples: int = 1000
    tol: float | None = None
    out: str = "out"
    format: str = "json"
    theorem: int = 1
    tightness_cap: int = 10
    coords: tuple[int, ...] | None = None
    z0: str = "1"
    z1: str = "1"
    binary: bool = False
    init: str | None = None
    kernel_states: int = 20
    quick: bool = False

    def to_manifest(self) -> dict:
        data = dataclasses.asdict(self)
        data["ladder"] = list(self.ladder) if self.ladder is not None else None
        data["coords"] = list(self.coords) if self.coords is not None else None
        return data

    @classmethod
    def from_manifest(cls, data: dict) -> "RunConfig":
        kwargs = dict(data)
        if kwargs.get("ladder") is not None:
            kwargs["ladder"] = tuple(kwargs["ladder"])
        if kwargs.get("coords") is not None:
            kwargs["coords"] = tuple(kwargs["coords"])
        return cls(**kwargs)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise _CliError(f"cannot parse integer list from {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="motzkinlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file with a section per command")
        p.add_argument("--sigma", help="level weight, exact rational (e.g. 1, 1/2, 0.5)")
        p.add_argument("--alpha", help="start measure, finite:w0,w1,... or geom:rho")
        p.add_argument("--beta", help="end measure, same syntax")
        p.add_argument("--length", type=int, help="path length L")
        p.add_argument("--ladder", help="comma-separated lengths, e.g. 8,16,32,64")
        p.add_argument("--K", dest="k", type=int, help="number of tracked coordinates")
        p.add_argument("--rho1", help="geometric end ratio (limit/converge)")
        p.add_argument("--rho0", help="geometric start ratio (two-geometrics law)")
        p.add_argument("--seed", type=int, help="64-bit sampling seed")
        p.add_argument("--samples", type=int, help="number of sampled paths")
        p.add_argument("--tol", type=float, help="certificate tolerance override")
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), help="law output format")
        p.add_argument("--theorem", type=int, choices=(1, 2), help="which ladder family")
        p.add_argument("--tightness-cap", dest="tightness_cap", type=int)
        p.add_argument("--coords", help="comma-separated path coordinates to tabulate")
        p.add_argument("--z0", help="start marker for the generating function")
        p.add_argument("--z1", help="end marker for the generating function")
        p.add_argument("--binary", action="store_true", help="also dump paths in binary")
        p.add_argument("--init", choices=("size-biased", "q-deformed", "two-geometrics"))
        p.add_argument("--kernel-states", dest="kernel_states", type=int)
        p.add_argument("--quick", action="store_true", help="reduced verify grids")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    args = _build_parser().parse_args(argv)
    values: dict = {"command": args.command}
    if args.config:
        ini = configparser.ConfigParser()
        if not ini.read(args.config):
            raise _CliError(f"cannot read config file {args.config}")
        if ini.has_section(args.command):
            for key, raw in ini.items(args.command):
                key = key.replace("-", "_")
                values[key] = raw
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        if key == "binary" and val is False and "binary" not in values:
            continue
        if key == "quick" and val is False and "quick" not in values:
            continue
        values[key] = val
    # normalize string-typed entries coming from INI or flags
    fields = {f.name: f for f in dataclasses.fields(RunConfig)}
    clean: dict = {}
    for key, val in values.items():
        if key not in fields:
            raise _CliError(f"unknown configuration key {key!r}")
        if key in ("ladder", "coords") and isinstance(val, str):
            val = _int_list(val)
        elif key in ("length", "k", "seed", "samples", "theorem", "tightness_cap", "kernel_states") and isinstance(val, str):
            val = int(val)
        elif key == "tol" and isinstance(val, str):
            val = float(val)
        elif key in ("binary", "quick") and isinstance(val, str):
            val = val.strip().lower() in ("1", "true", "yes", "on")
        clean[key] = val
    try:
        config = RunConfig(**clean)
    except TypeError as exc:
        raise _CliError(str(exc)) from exc
    # eager validation of rational-valued fields
    for field_name in ("sigma", "z0", "z1"):
        as_fraction(getattr(config, field_name))
    for field_name in ("rho0", "rho1"):
        if getattr(config, field_name) is not None:
            as_fraction(getattr(config, field_name))
    BoundaryMeasure.parse(config.alpha)
    BoundaryMeasure.parse(config.beta)
    return config


# ---------------------------------------------------------------------------
# Output helpers


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_law(path_base: Path, table: engine.DistTable, fmt: str, meta: dict) -> None:
    if fmt == "json":
        obj = dict(meta)
        obj["atoms"] = table.to_json_atoms()
        obj["tail"] = str(table.tail)
        _write_json(path_base.with_suffix(".json"), obj)
    else:
        lines = ["support,prob,prob_float"]
        for key, p in zip(table.support, table.probs):
            lines.append(f"\"{','.join(str(h) for h in key)}\",{p},{float(p)!r}")
        lines.append(f"tail,{table.tail},{float(table.tail)!r}")
        path_base.with_suffix(".csv").write_text("\n".join(lines) + "\n")


def _model_spec(config: RunConfig) -> ModelSpec:
    return ModelSpec(
        weights=WeightConfig.constant(as_fraction(config.sigma)),
        alpha=BoundaryMeasure.parse(config.alpha),
        beta=BoundaryMeasure.parse(config.beta),
        length=config.length,
    )


# ---------------------------------------------------------------------------
# Commands


def _run_exact(config: RunConfig, outdir: Path) -> int:
    spec = _model_spec(config)
    k = config.k if config.k is not None else min(spec.length, 3)
    cap = engine.initial_height_cap(spec)
    table = engine.weight_table(spec.weights, spec.length, cap + spec.length)
    with (outdir / "weight_table.csv").open("w") as fh:
        table.to_csv(fh)
    law = engine.left_fdd_law(spec, k)
    _write_law(outdir / "fdd_left", law, config.format, {"k": k})
    value = engine.endpoint_pgf(spec, as_fraction(config.z0), as_fraction(config.z1))
    _write_json(
        outdir / "pgf.json",
        {"z0": config.z0, "z1": config.z1, "value": str(value), "value_float": float(value)},
    )
    return 0


def _run_sample(config: RunConfig, outdir: Path) -> int:
    spec = _model_spec(config)
    table = sampler.build_backward_table(spec)
    paths = sampler.sample_paths(table, spec.alpha, config.seed, config.samples)
    (outdir / "paths.txt").write_text("\n".join(p.serialize() for p in paths) + "\n")
    if config.binary:
        with (outdir / "paths.bin").open("wb") as fh:
            sampler.write_binary(paths, fh)
    coords = config.coords if config.coords is not None else (0, min(1, spec.length), spec.length)
    empirical = sampler.empirical_fdd(paths, coords)
    _write_law(outdir / "empirical", empirical, config.format, {"coords": list(coords)})
    return 0


def _initial_spec(config: RunConfig) -> limit_chains.InitialLawSpec:
    alpha = BoundaryMeasure.parse(config.alpha)
    kind = config.init
    if kind is None:
        kind = "q-deformed" if config.rho1 is not None else "size-biased"
    if kind == "size-biased":
        return limit_chains.SizeBiased(alpha)
    if kind == "q-deformed":
        if config.rho1 is None:
            raise _CliError("q-deformed initial law needs --rho1")
        return limit_chains.QDeformed(alpha, as_fraction(config.rho1))
    if config.rho0 is None or config.rho1 is None:
        raise _CliError("two-geometrics law needs --rho0 and --rho1 (as rho-hat)")
    return limit_chains.TwoGeometrics(as_fraction(config.rho0), as_fraction(config.rho1))


def _run_limit(config: RunConfig, outdir: Path) -> int:
    sigma = as_fraction(config.sigma)
    if config.rho1 is not None:
        kernel = limit_chains.BoundaryKernel.tilted(as_fraction(config.rho1), sigma)
    else:
        kernel = limit_chains.BoundaryKernel.critical(sigma)
    rows = {
        str(n): {str(m): str(p) for m, p in sorted(limit_chains.kernel_row(kernel, n).items())}
        for n in range(config.kernel_states + 1)
    }
    _write_json(
        outdir / "kernel.json",
        {"rho": str(kernel.rho), "sigma": str(kernel.sigma), "rows": rows},
    )
    init_spec = _initial_spec(config)
    law = limit_chains.initial_law(init_spec)
    _write_law(outdir / "initial_law", law, config.format, {"init": config.init or "auto"})
    trajectory = limit_chains.simulate_chain(kernel, init_spec, config.length, config.seed)
    (outdir / "trajectory.txt").write_text(",".join(str(z) for z in trajectory) + "\n")
    return 0


def _run_verify(config: RunConfig, outdir: Path) -> int:
    reports: list[dict] = []
    quick = config.quick

    # path-count integrals against the exact engine
    viennot_tol = config.tol if config.tol is not None else 1e-10
    max_mn = 3 if quick else 6
    max_l = 4 if quick else 12
    for sigma in ("1/2", "1", "2"):
        weights = WeightConfig.constant(as_fraction(sigma))
        for length in range(1, max_l + 1):
            table = engine.weight_table(weights, length, max_mn + length)
            for m in range(max_mn + 1):
                for n in range(max_mn + 1):
                    exact = float(table.value(m, n))
                    approx = spectral.viennot_integral(m, n, length, float(as_fraction(sigma)))
                    residual = abs(approx - exact) / max(1.0, abs(exact))
                    reports.append(
                        spectral.CheckReport(
                            check="path-count-integral",
                            params={"m": m, "n": n, "L": length, "sigma": sigma},
                            lhs=exact,
                            rhs=approx,
                            residual=residual,
                            tol=viennot_tol,
                            passed=residual <= viennot_tol,
                        ).to_json_obj()
                    )

    # mixed-measure moment identity
    mixed_tol = config.tol if config.tol is not None else 1e-8
    ms = (0, 2) if quick else (0, 1, 2, 3, 4, 5)
    lengths = (1, 5) if quick else (1, 5, 10, 20, 30)
    for sigma in ("1/2", "1"):
        for rho in ("1/2", "1", "2", "3"):
            for m in ms:
                for length in lengths:
                    reports.append(
                        spectral.lemma42_check(m, rho, length, sigma, tol=mixed_tol).to_json_obj()
                    )

    # measure normalization
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    for rho in (0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 3.0):
        mass = spectral.mu_moment(one, rho, 1.0, 0)
        residual = abs(mass - 1.0)
        reports.append(
            spectral.CheckReport(
                check="measure-mass",
                params={"rho": rho},
                lhs=1.0,
                rhs=mass,
                residual=residual,
                tol=1e-10,
                passed=residual <= 1e-10,
            ).to_json_obj()
        )

    # moment-ratio ladders: convergence to the top of the support
    ladder = (4, 8, 16) if quick else (8, 16, 32, 64)
    probes = [
        ("ratio-to-zero", spectral.MixedMeasure(2.0), lambda x: 1.0 - 2.0 * x + 4.0, 0.0),
        ("ratio-to-edge", spectral.MixedMeasure.semicircle(), lambda x: np.asarray(x, dtype=float), 2.0),
    ]
    for name, measure, func, target in probes:
        ratios = spectral.ratio_probe(func, measure, 1.0, ladder)
        gaps = [abs(r - target) for r in ratios]
        ok = all(a > b for a, b in zip(gaps, gaps[1:]))
        reports.append(
            {
                "check": name,
                "params": {"rho": measure.rho, "lengths": list(ladder)},
                "ratios": ratios,
                "target": target,
                "pass": ok,
            }
        )

    failed = [r for r in reports if not r["pass"]]
    _write_json(
        outdir / "verify.json",
        {"checks": reports, "total": len(reports), "failed": len(failed)},
    )
    if failed:
        print(json.dumps({"error": f"{len(failed)} certificate(s) failed", "kind": "certificate"}), file=sys.stderr)
        return 2
    return 0


def _run_converge(config: RunConfig, outdir: Path) -> int:
    alpha = BoundaryMeasure.parse(config.alpha)
    k = config.k if config.k is not None else 1
    ladder = config.ladder if config.ladder is not None else (8, 16, 32, 64)
    if config.theorem == 1:
        beta = BoundaryMeasure.parse(config.beta)
        report = converge.theorem1_ladder(as_fraction(config.sigma), alpha, beta, k, ladder)
    else:
        if config.rho1 is None:
            raise _CliError("the geometric-end ladder needs --rho1")
        report = converge.theorem2_ladder(
            as_fraction(config.sigma), alpha, as_fraction(config.rho1), k, ladder,
            tightness_cap=config.tightness_cap,
        )
    _write_json(outdir / "report.json", report.to_json_obj())
    (outdir / "report.csv").write_text(report.to_csv_text())
    if not all(report.verdicts.values()):
        print(json.dumps({"error": "ladder ordering violated", "kind": "certificate"}), file=sys.stderr)
        return 2
    return 0


_RUNNERS = {
    "exact": _run_exact,
    "sample": _run_sample,
    "limit": _run_limit,
    "verify": _run_verify,
    "converge": _run_converge,
}


def run(config: RunConfig) -> int:
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_json(outdir / "manifest.json", config.to_manifest())
    return _RUNNERS[config.command](config, outdir)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = parse_config(argv)
        return run(config)
    except (_CliError, RejectedInputError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "kind": "config"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
