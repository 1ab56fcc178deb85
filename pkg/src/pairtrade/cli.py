"""Command-line entry point.

Subcommands:

    backtest      run the sliding-window strategy over a price CSV
    montecarlo    Monte Carlo check that traded periods profit in expectation
    verify-lemma  Monte Carlo check of the curvature bound on the spread

Every value resolves with precedence: command-line flag, then config file,
then built-in default. The config file is flat UTF-8 `key = value` text with
`#` line comments; dots and dashes in keys normalize to underscores, so
`gamma.floor`, `gamma-floor`, and `gamma_floor` name the same key. The fully
resolved configuration is echoed under the "config" key of the emitted JSON.

Exit codes: 0 success, 1 flag/config validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .backtest import (
    BacktestConfig,
    run_backtest,
    write_ledger_csv,
    write_plot_csv,
    write_report_json,
)
from .domain import DomainError, PricePoint
from .estimation import DEFAULT_GAMMA_FLOOR, WindowConfig
from .ingest import AdjustmentRule, apply_adjustments, load_csv
from .synthetic import THRESHOLD_MODES, OUPairSpec, verify_lemma, verify_theorem

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    """Invalid flags or config values; maps to exit 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise UsageError(message)


# ---------------------------------------------------------------------------
# config file parsing and per-key coercion


def _coerce_int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"config key {key!r}: expected an integer, got {text!r}") from None


def _coerce_float(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"config key {key!r}: expected a number, got {text!r}") from None


def _coerce_str(key: str, text: str) -> str:
    return text


def _coerce_bool(key: str, text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise UsageError(f"config key {key!r}: expected a boolean, got {text!r}")


def _parse_adjustment(text: str) -> AdjustmentRule:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"adjustment must be stock:index:factor, got {text!r}")
    try:
        stock = int(parts[0])
        index = int(parts[1])
        factor = float(parts[2])
    except ValueError:
        raise UsageError(f"adjustment must be stock:index:factor, got {text!r}") from None
    try:
        return AdjustmentRule(stock, index, factor)
    except DomainError as exc:
        raise UsageError(f"adjustment {text!r}: {exc}") from None


def _coerce_adjust(key: str, text: str) -> list[AdjustmentRule]:
    return [_parse_adjustment(tok.strip()) for tok in text.split(",") if tok.strip()]


def _coerce_p0(key: str, text: str) -> list[float]:
    parts = [tok for tok in text.replace(",", " ").split() if tok]
    if len(parts) != 2:
        raise UsageError(f"config key {key!r}: expected two numbers, got {text!r}")
    return [_coerce_float(key, parts[0]), _coerce_float(key, parts[1])]


def _adjust_flag(text: str) -> AdjustmentRule:
    try:
        return _parse_adjustment(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass(frozen=True)
class _Key:
    coerce: Callable[[str, str], object]
    default: object


_COMMON_MC_LEMMA = {
    "seed": _Key(_coerce_int, 0),
    "out_dir": _Key(_coerce_str, None),
}

SCHEMAS: dict[str, dict[str, _Key]] = {
    "backtest": {
        "input": _Key(_coerce_str, None),
        "out_dir": _Key(_coerce_str, "."),
        "adjust": _Key(_coerce_adjust, []),
        "train_len": _Key(_coerce_int, 40),
        "trade_len": _Key(_coerce_int, 5),
        "leverage": _Key(_coerce_float, 1.0),
        "initial_value": _Key(_coerce_float, 10_000.0),
        "threshold_mode": _Key(_coerce_str, "approx"),
        "gamma": _Key(_coerce_float, None),
        "gamma_floor": _Key(_coerce_float, DEFAULT_GAMMA_FLOOR),
        "emit_ledger": _Key(_coerce_bool, True),
        "emit_report": _Key(_coerce_bool, True),
        "emit_plot": _Key(_coerce_bool, True),
    },
    "montecarlo": {
        **_COMMON_MC_LEMMA,
        "trials": _Key(_coerce_int, 10_000),
        "periods": _Key(_coerce_int, 250),
        "theta": _Key(_coerce_float, 0.3),
        "sigma_s": _Key(_coerce_float, 0.012),
        "sigma_w": _Key(_coerce_float, 0.005),
        "beta": _Key(_coerce_float, 2.0),
        "mu": _Key(_coerce_float, 0.0),
        "gamma_cap": _Key(_coerce_float, 0.05),
        "s0": _Key(_coerce_float, 0.0),
        "p0": _Key(_coerce_p0, [100.0, 50.0]),
        "eta": _Key(_coerce_float, 0.2),
        "gamma": _Key(_coerce_float, None),
        "threshold_mode": _Key(_coerce_str, "approx"),
        "leverage": _Key(_coerce_float, 1.0),
        "initial_value": _Key(_coerce_float, 10_000.0),
        "bins": _Key(_coerce_int, 0),
    },
    "verify-lemma": {
        **_COMMON_MC_LEMMA,
        "samples": _Key(_coerce_int, 10_000),
        "beta": _Key(_coerce_float, 2.0),
        "mu": _Key(_coerce_float, 0.0),
        "gamma": _Key(_coerce_float, 0.05),
        "band": _Key(_coerce_float, 1.0),
        "p0": _Key(_coerce_p0, [100.0, 50.0]),
    },
}


def _read_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from None
    out: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        key = key.strip().replace("-", "_").replace(".", "_")
        value = value.strip()
        if not sep or not key or not value:
            raise UsageError(f"config file line {line_no}: expected `key = value`")
        out[key] = value
    return out


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> _Parser:
    parser = _Parser(prog="pairtrade", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    bt = sub.add_parser("backtest", help="run the sliding-window strategy over a price CSV")
    bt.add_argument("--config", metavar="PATH", help="flat key = value config file")
    bt.add_argument("--input", metavar="PATH", help="price CSV with header date,p1,p2")
    bt.add_argument("--out-dir", metavar="DIR", help="output directory (default .)")
    bt.add_argument(
        "--adjust",
        metavar="STOCK:INDEX:FACTOR",
        type=_adjust_flag,
        action="append",
        help="price correction rule, repeatable; scales STOCK before INDEX by FACTOR",
    )
    bt.add_argument("--train-len", type=int, metavar="N", help="training window length (default 40)")
    bt.add_argument("--trade-len", type=int, metavar="M", help="trading window length (default 5)")
    bt.add_argument("--leverage", type=float, help="leverage factor L (default 1.0)")
    bt.add_argument("--initial-value", type=float, help="starting account value (default 10000)")
    bt.add_argument(
        "--threshold-mode", choices=THRESHOLD_MODES, help="threshold variant (default approx)"
    )
    bt.add_argument("--gamma", type=float, help="fixed gamma override instead of the window estimate")
    bt.add_argument("--gamma-floor", type=float, help="gamma floor for flat windows (default 1e-4)")
    bt.add_argument(
        "--no-ledger", dest="emit_ledger", action="store_const", const=False, help="skip ledger.csv"
    )
    bt.add_argument(
        "--no-report", dest="emit_report", action="store_const", const=False, help="skip report.json"
    )
    bt.add_argument(
        "--no-plot", dest="emit_plot", action="store_const", const=False, help="skip plot.csv"
    )

    mc = sub.add_parser("montecarlo", help="Monte Carlo check of traded-period expected profit")
    mc.add_argument("--config", metavar="PATH", help="flat key = value config file")
    mc.add_argument("--out-dir", metavar="DIR", help="also write montecarlo.json here")
    mc.add_argument("--trials", type=int, help="number of independent trials (default 10000)")
    mc.add_argument("--periods", type=int, help="periods per trial (default 250)")
    mc.add_argument("--theta", type=float, help="true reversion rate in (0,1) (default 0.3)")
    mc.add_argument("--sigma-s", type=float, help="spread innovation scale (default 0.012)")
    mc.add_argument("--sigma-w", type=float, help="log-price step scale (default 0.005)")
    mc.add_argument("--beta", type=float, help="true cointegration slope (default 2.0)")
    mc.add_argument("--mu", type=float, help="true cointegration level (default 0.0)")
    mc.add_argument("--gamma-cap", type=float, help="hard per-period return cap (default 0.05)")
    mc.add_argument("--s0", type=float, help="initial spread (default 0.0)")
    mc.add_argument("--p0", type=float, nargs=2, metavar=("P1", "P2"), help="initial prices")
    mc.add_argument("--eta", type=float, help="assumed reversion rate for the threshold (default 0.2)")
    mc.add_argument("--gamma", type=float, help="assumed return bound (default: gamma-cap)")
    mc.add_argument(
        "--threshold-mode", choices=THRESHOLD_MODES, help="threshold variant (default approx)"
    )
    mc.add_argument("--leverage", type=float, help="leverage factor (default 1.0)")
    mc.add_argument("--initial-value", type=float, help="account value per trial (default 10000)")
    mc.add_argument("--bins", type=int, help="spread bins for the stderr diagnostic (default 0)")
    mc.add_argument("--seed", type=int, help="base RNG seed (default 0)")

    vl = sub.add_parser("verify-lemma", help="Monte Carlo check of the curvature bound")
    vl.add_argument("--config", metavar="PATH", help="flat key = value config file")
    vl.add_argument("--out-dir", metavar="DIR", help="also write verify_lemma.json here")
    vl.add_argument("--samples", type=int, help="number of sampled points (default 10000)")
    vl.add_argument("--beta", type=float, help="cointegration slope (default 2.0)")
    vl.add_argument("--mu", type=float, help="cointegration level (default 0.0)")
    vl.add_argument("--gamma", type=float, help="box half-width in (0,1) (default 0.05)")
    vl.add_argument("--band", type=float, help="log-uniform price band half-width (default 1.0)")
    vl.add_argument("--p0", type=float, nargs=2, metavar=("P1", "P2"), help="band center prices")
    vl.add_argument("--seed", type=int, help="RNG seed (default 0)")

    return parser


def _resolve(ns: argparse.Namespace) -> dict:
    """Merge flag > file > default into a plain config dict."""
    schema = SCHEMAS[ns.command]
    file_vals: dict[str, object] = {}
    if ns.config is not None:
        for key, text in _read_config_file(ns.config).items():
            if key not in schema:
                raise UsageError(f"config file: unknown key {key!r} for {ns.command}")
            file_vals[key] = schema[key].coerce(key, text)
    resolved: dict[str, object] = {"subcommand": ns.command}
    for key, entry in schema.items():
        flag_val = getattr(ns, key, None)
        if flag_val is not None:
            resolved[key] = flag_val
        elif key in file_vals:
            resolved[key] = file_vals[key]
        else:
            resolved[key] = entry.default
    if isinstance(resolved.get("p0"), (list, tuple)):
        resolved["p0"] = [float(resolved["p0"][0]), float(resolved["p0"][1])]
    return resolved


def _echo_config(cfg: dict) -> dict:
    """JSON form of the resolved config for the report's `config` block."""
    out: dict[str, object] = {}
    for key, value in cfg.items():
        if key == "adjust":
            out[key] = [
                {"stock": r.stock, "index": r.effective_index, "factor": r.factor} for r in value
            ]
        else:
            out[key] = value
    return out


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def _validate_backtest(cfg: dict) -> BacktestConfig:
    _require(cfg["input"] is not None, "backtest: --input is required")
    _require(Path(cfg["input"]).is_file(), f"--input: no such file: {cfg['input']}")
    try:
        window = WindowConfig(train_len=cfg["train_len"], trade_len=cfg["trade_len"])
        return BacktestConfig(
            window=window,
            leverage=cfg["leverage"],
            initial_value=cfg["initial_value"],
            threshold_mode=cfg["threshold_mode"],
            gamma_override=cfg["gamma"],
            gamma_floor=cfg["gamma_floor"],
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _validate_spec(cfg: dict, sigma_s: float, sigma_w: float, theta: float, s0: float) -> OUPairSpec:
    try:
        p0 = PricePoint(cfg["p0"][0], cfg["p0"][1])
        gamma_cap = cfg.get("gamma_cap")
        if gamma_cap is None:
            gamma_cap = cfg["gamma"]
        return OUPairSpec(
            theta=theta,
            sigma_s=sigma_s,
            sigma_w=sigma_w,
            beta_true=cfg["beta"],
            mu_true=cfg["mu"],
            gamma_cap=gamma_cap,
            s0=s0,
            p0=p0,
            seed=cfg["seed"],
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _validate_montecarlo(cfg: dict) -> tuple[OUPairSpec, float]:
    spec = _validate_spec(cfg, cfg["sigma_s"], cfg["sigma_w"], cfg["theta"], cfg["s0"])
    _require(cfg["trials"] >= 1, "--trials must be at least 1")
    _require(cfg["periods"] >= 2, "--periods must be at least 2")
    _require(cfg["bins"] >= 0, "--bins must be non-negative")
    _require(_finite(cfg["eta"]), "--eta must be a finite number")
    _require(
        _finite(cfg["leverage"]) and cfg["leverage"] > 0.0, "--leverage must be finite and positive"
    )
    _require(
        _finite(cfg["initial_value"]) and cfg["initial_value"] > 0.0,
        "--initial-value must be finite and positive",
    )
    _require(cfg["threshold_mode"] in THRESHOLD_MODES, "--threshold-mode must be approx or exact")
    gamma_assumed = cfg["gamma"] if cfg["gamma"] is not None else spec.gamma_cap
    _require(0.0 < gamma_assumed < 1.0, "--gamma must lie in (0, 1)")
    return spec, gamma_assumed


def _validate_lemma(cfg: dict) -> OUPairSpec:
    _require(cfg["samples"] >= 1, "--samples must be at least 1")
    _require(_finite(cfg["band"]) and cfg["band"] > 0.0, "--band must be finite and positive")
    _require(
        _finite(cfg["gamma"]) and 0.0 < cfg["gamma"] < 1.0, "--gamma must lie in (0, 1)"
    )
    # the lemma needs no dynamics: a zero-noise spec carries (beta, mu, gamma, p0, seed)
    return _validate_spec(cfg, 0.0, 0.0, 0.5, 0.0)


# ---------------------------------------------------------------------------
# subcommands


def _dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _cmd_backtest(cfg: dict, bt_config: BacktestConfig) -> int:
    series = load_csv(cfg["input"])
    if cfg["adjust"]:
        series = apply_adjustments(series, cfg["adjust"])
    rows, report = run_backtest(series, bt_config)
    out_dir = Path(cfg["out_dir"])
    if cfg["emit_ledger"] or cfg["emit_report"] or cfg["emit_plot"]:
        out_dir.mkdir(parents=True, exist_ok=True)
    if cfg["emit_ledger"]:
        write_ledger_csv(rows, out_dir / "ledger.csv")
    if cfg["emit_report"]:
        write_report_json(report, out_dir / "report.json", extra={"config": _echo_config(cfg)})
    if cfg["emit_plot"]:
        write_plot_csv(out_dir / "plot.csv", series, rows, bt_config.initial_value)
    print(
        f"final_value={report.final_value:.2f} "
        f"total_return={report.total_return:.6f} "
        f"max_drawdown={report.max_drawdown:.6f} "
        f"active_periods={report.active_periods}"
    )
    return EXIT_OK


def _cmd_montecarlo(cfg: dict, spec: OUPairSpec, gamma_assumed: float) -> int:
    summary = verify_theorem(
        spec,
        trials=cfg["trials"],
        periods=cfg["periods"],
        eta_assumed=cfg["eta"],
        gamma_assumed=gamma_assumed,
        mode=cfg["threshold_mode"],
        leverage=cfg["leverage"],
        initial_value=cfg["initial_value"],
        collect_bins=cfg["bins"],
    )
    payload = {
        "trials": summary.trials,
        "trade_events": summary.trade_events,
        "mean_dV": summary.mean_dv,
        "p_value": summary.p_value,
        "mode": summary.mode,
        "config": _echo_config(cfg),
    }
    text = _dump_json(payload)
    sys.stdout.write(text)
    ratio = summary.tau_approx / summary.tau_exact if summary.tau_exact > 0.0 else math.nan
    print(
        f"tau_used={summary.tau:.10g} tau_exact={summary.tau_exact:.10g} "
        f"tau_approx={summary.tau_approx:.10g} approx/exact={ratio:.6g}",
        file=sys.stderr,
    )
    if summary.trade_events == 0:
        print("inconclusive: no trading events occurred", file=sys.stderr)
    if summary.bin_edges is not None:
        for i in range(len(summary.bin_counts)):
            print(
                f"bin[{summary.bin_edges[i]:.6g}, {summary.bin_edges[i + 1]:.6g}): "
                f"events={summary.bin_counts[i]} mean_dV={summary.bin_mean_dv[i]:.6g}",
                file=sys.stderr,
            )
    if cfg["out_dir"] is not None:
        out_dir = Path(cfg["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "montecarlo.json").write_text(text, encoding="utf-8")
    return EXIT_OK


def _cmd_verify_lemma(cfg: dict, spec: OUPairSpec) -> int:
    summary = verify_lemma(spec, samples=cfg["samples"], gamma=cfg["gamma"], band=cfg["band"])
    payload = {
        "samples": summary.samples,
        "gamma": summary.gamma,
        "max_violation": summary.max_violation,
        "max_remainder": summary.max_remainder,
        "max_ratio": summary.max_ratio,
        "config": _echo_config(cfg),
    }
    text = _dump_json(payload)
    sys.stdout.write(text)
    if cfg["out_dir"] is not None:
        out_dir = Path(cfg["out_dir"])
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "verify_lemma.json").write_text(text, encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    try:
        ns = _build_parser().parse_args(argv)
        cfg = _resolve(ns)
        if ns.command == "backtest":
            bt_config = _validate_backtest(cfg)
        elif ns.command == "montecarlo":
            spec, gamma_assumed = _validate_montecarlo(cfg)
        else:
            spec = _validate_lemma(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        if ns.command == "backtest":
            return _cmd_backtest(cfg, bt_config)
        if ns.command == "montecarlo":
            return _cmd_montecarlo(cfg, spec, gamma_assumed)
        return _cmd_verify_lemma(cfg, spec)
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps failures to exit 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
