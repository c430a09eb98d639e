"""Command-line pipeline: synth -> moments -> fit -> plane.

Each subcommand reads a daily value CSV (or generates one from a synthetic
config), derives the weekly moment panel, and writes its artifacts under
--out.  Files carry the data; stdout only carries a human-readable summary.

Exit codes: 0 success, 1 error, 2 empty result.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import econometrics as econ
from . import ingest, moments, plane, synth
from .errors import SkplaneError, TooFewGroups

__all__ = ["RunConfig", "cmd_moments", "cmd_fit", "cmd_plane", "cmd_synth", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2

DEFAULT_MODELS = (econ.Model.M7, econ.Model.M8, econ.Model.M9, econ.Model.M11)


@dataclass
class RunConfig:
    """Everything one subcommand run needs; exactly one of input/synth is set."""

    out_dir: Path
    input_path: Path | None = None
    synth_config_path: Path | None = None
    schema: ingest.CsvSchema = field(default_factory=ingest.CsvSchema)
    returns: str = "simple"
    min_days: int = 5
    covid_cutoff: dt.date = moments.DEFAULT_COVID_CUTOFF
    models: tuple[econ.Model, ...] = DEFAULT_MODELS
    seed: int | None = None
    s_range: tuple[float, float] = plane.DEFAULT_S_RANGE
    s_step: float = plane.DEFAULT_S_STEP


def _load_synth_config(config: RunConfig) -> synth.SynthConfig:
    cfg = synth.load_config(config.synth_config_path)
    if config.seed is not None:
        cfg = synth.SynthConfig(
            n_assets=cfg.n_assets,
            n_weeks=cfg.n_weeks,
            dgp=cfg.dgp,
            a=cfg.a,
            b=cfg.b,
            interaction=cfg.interaction,
            sigma_u2=cfg.sigma_u2,
            sigma_e2=cfg.sigma_e2,
            covid_week=cfg.covid_week,
            seed=config.seed,
            start=cfg.start,
        )
    return cfg


def _input_bytes(config: RunConfig) -> bytes:
    if config.input_path is not None:
        return config.input_path.read_bytes()
    return synth.generate_raw_csv(_load_synth_config(config), config.schema)


def _moment_pipeline(config: RunConfig):
    """raw CSV -> observations -> returns -> weekly windows -> moment panel."""
    observations = ingest.parse_observations(_input_bytes(config), config.schema)
    by_symbol: dict[str, list[ingest.Observation]] = {}
    for obs in observations:
        by_symbol.setdefault(obs.symbol, []).append(obs)
    series = [
        ingest.compute_returns(group, config.returns)
        for group in by_symbol.values()
        if len(group) >= 2
    ]
    raw_panel, report = ingest.assemble_panel(series, config.min_days)
    panel, zero_var_drops = moments.weekly_moments(raw_panel, config.covid_cutoff)
    drops: dict[str, int] = dict(report.dropped_windows)
    for symbol, count in zero_var_drops.items():
        drops[symbol] = drops.get(symbol, 0) + count
    return panel, drops


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _stats_dict(stats: moments.Stats) -> dict:
    return {
        "n": stats.n,
        "mean": stats.mean,
        "sd": stats.sd,
        "min": stats.min,
        "max": stats.max,
        "p1": stats.p1,
        "p25": stats.p25,
        "p50": stats.p50,
        "p75": stats.p75,
        "p99": stats.p99,
    }


def cmd_moments(config: RunConfig) -> int:
    """Write moments.csv, descriptives.json and drops.json."""
    panel, drops = _moment_pipeline(config)
    if len(panel) == 0:
        print("moments: no computable windows", file=sys.stderr)
        return EXIT_EMPTY
    columns = moments.panel_values(panel)
    descriptives = {
        name: (_stats_dict(moments.descriptive_stats(vals)) if vals else None)
        for name, vals in columns.items()
    }
    _write_text(config.out_dir / "moments.csv", moments.render_panel_csv(panel))
    _write_json(config.out_dir / "descriptives.json", descriptives)
    _write_json(config.out_dir / "drops.json", drops)
    print(
        f"moments: {len(panel)} records from {len({r.symbol for r in panel.records})} symbols, "
        f"{sum(drops.values())} windows dropped -> {config.out_dir}"
    )
    return EXIT_OK


def cmd_fit(config: RunConfig) -> int:
    """Write fits.json: every requested model under both estimators, with tests."""
    panel, _ = _moment_pipeline(config)
    if len(panel) == 0:
        print("fit: no computable windows", file=sys.stderr)
        return EXIT_EMPTY
    current = None
    try:
        payload: dict = {"nobs": len(panel), "models": {}}
        for model in config.models:
            current = model
            payload["models"][model.value] = _fit_payload_for_model(panel, model)
    except SkplaneError as exc:
        print(f"fit: model {current.value if current else '?'} failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    _write_json(config.out_dir / "fits.json", payload)
    n_fits = 2 * len(config.models)
    print(f"fit: {n_fits} fits over {len(panel)} records -> {config.out_dir / 'fits.json'}")
    return EXIT_OK


def _fit_payload_for_model(panel: moments.MomentPanel, model: econ.Model) -> dict:
    design = econ.build_design(panel, econ.ModelSpec(model))
    entry: dict = {}
    for name, fitter in (
        ("random_effects", econ.fit_random_effects),
        ("pooled_ols", econ.fit_pooled_ols),
    ):
        fit = fitter(design)
        tester = econ.wald_joint_test if name == "random_effects" else econ.f_joint_test
        tests = {"joint_zero_total": tester(fit, econ.slope_terms(fit)).to_dict()}
        if "skew_sq_covid" in fit.term_names:
            tests["joint_zero_interaction"] = tester(fit, ["skew_sq_covid"]).to_dict()
        fit_dict = fit.to_dict()
        fit_dict["tests"] = tests
        entry[name] = fit_dict
    return entry


def _quadratic_params(panel: moments.MomentPanel) -> tuple[tuple[float, float], str]:
    """(A, B) for the fitted curve from the M8 random-effects fit.

    Falls back to pooled OLS when the panel cannot support random effects
    (e.g. a single symbol).
    """
    design = econ.build_design(panel, econ.ModelSpec(econ.Model.M8))
    try:
        fit = econ.fit_random_effects(design)
        source = "M8 random effects"
    except TooFewGroups:
        fit = econ.fit_pooled_ols(design)
        source = "M8 pooled OLS (single group fallback)"
    coef = fit.coefficients
    return (coef["skew_sq"][0], coef[econ.CONST][0]), source


def cmd_plane(config: RunConfig) -> int:
    """Write plane.csv, plane_pre.csv, plane_post.csv and heatmap.csv."""
    panel, _ = _moment_pipeline(config)
    if len(panel) == 0:
        print("plane: no computable windows", file=sys.stderr)
        return EXIT_EMPTY
    curve_params, curve_source = _quadratic_params(panel)
    dataset = plane.export_plane(
        panel, curve_params=curve_params, s_range=config.s_range, s_step=config.s_step
    )
    heatmap = plane.export_heatmap(panel)
    _write_text(config.out_dir / "plane.csv", plane.render_plane_csv(dataset))
    _write_text(config.out_dir / "plane_pre.csv", plane.render_points_csv(dataset.pre))
    _write_text(config.out_dir / "plane_post.csv", plane.render_points_csv(dataset.post))
    _write_text(config.out_dir / "heatmap.csv", plane.render_heatmap_csv(heatmap))
    print(
        f"plane: {len(dataset.points)} points ({len(dataset.pre)} pre / {len(dataset.post)} post), "
        f"quadratic curve from {curve_source} -> {config.out_dir}"
    )
    return EXIT_OK


def cmd_synth(config: RunConfig) -> int:
    """Generate the daily value CSV for a raw-returns synthetic config."""
    cfg = _load_synth_config(config)
    data = synth.generate_raw_csv(cfg, config.schema)
    path = config.out_dir / "data.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    print(f"synth: {cfg.n_assets} assets x {7 * cfg.n_weeks} days (seed {cfg.seed}) -> {path}")
    return EXIT_OK


def _parse_models(text: str) -> tuple[econ.Model, ...]:
    out = []
    for token in text.split(","):
        token = token.strip().upper()
        if not token:
            continue
        if not token.startswith("M"):
            token = "M" + token
        try:
            out.append(econ.Model(token))
        except ValueError:
            valid = ", ".join(m.value for m in econ.Model)
            raise argparse.ArgumentTypeError(f"unknown model {token!r} (valid: {valid})")
    if not out:
        raise argparse.ArgumentTypeError("empty model list")
    return tuple(out)


def _add_common_args(parser: argparse.ArgumentParser, needs_input: bool) -> None:
    if needs_input:
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument("--input", type=Path, help="daily value CSV")
        group.add_argument("--synth-config", type=Path, help="synthetic config JSON")
    else:
        parser.add_argument("--synth-config", type=Path, required=True)
    parser.add_argument("--date-col", default="date")
    parser.add_argument("--symbol-col", default="symbol")
    parser.add_argument("--value-col", default="mcap")
    parser.add_argument("--returns", choices=("simple", "log"), default="simple")
    parser.add_argument("--min-days", type=int, default=5)
    parser.add_argument(
        "--covid-cutoff",
        type=dt.date.fromisoformat,
        default=moments.DEFAULT_COVID_CUTOFF,
        metavar="YYYY-MM-DD",
    )
    parser.add_argument("--models", type=_parse_models, default=DEFAULT_MODELS)
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the synth config seed")
    parser.add_argument("--s-range", type=float, nargs=2, default=plane.DEFAULT_S_RANGE,
                        metavar=("LO", "HI"))
    parser.add_argument("--s-step", type=float, default=plane.DEFAULT_S_STEP)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        out_dir=args.out,
        input_path=getattr(args, "input", None),
        synth_config_path=args.synth_config,
        schema=ingest.CsvSchema(args.date_col, args.symbol_col, args.value_col),
        returns=args.returns,
        min_days=args.min_days,
        covid_cutoff=args.covid_cutoff,
        models=args.models,
        seed=args.seed,
        s_range=tuple(args.s_range),
        s_step=args.s_step,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skplane",
        description="Weekly higher moments, S-K plane datasets, and quadratic panel fits",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_input in (("moments", True), ("fit", True), ("plane", True), ("synth", False)):
        p = sub.add_parser(name)
        _add_common_args(p, needs_input)
    return parser


_COMMANDS = {
    "moments": cmd_moments,
    "fit": cmd_fit,
    "plane": cmd_plane,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = _config_from_args(args)
    try:
        return _COMMANDS[args.command](config)
    except (SkplaneError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
