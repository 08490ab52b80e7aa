"""Command-line front end: sweep configs in, CSV (or SVG) out.

Subcommands
-----------
er      effective-rate sweep over (a_s, theta, rho) grids
dvp     delay-violation bound (and optional queue simulation) per user
approx  high/low-SNR approximations, ergodic bound, rate loss, low-SNR metrics
power   discrete search for the sum-rate-maximizing power coefficient

Config files are INI-style with [channel], [system], [snc], [sim] and
[output] sections; dB and coefficient ranges use start:stop:step
(inclusive) and lists are comma-separated.  Command-line flags win over
file values.  Set NOMA_EFFRATE_LOG=debug for diagnostics.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import math
import os
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import AlphaMuChannel, ChannelPair
from .effrate import (
    DelayQos,
    NomaSystem,
    er_derivatives,
    er_high_snr,
    er_low_snr,
    er_noma,
    er_oma,
    ergodic_rate,
    min_energy_per_bit,
    power_search,
    wideband_slope,
)
from .sim import SimPlan, queue_dvp
from .snc import SncConfig, dvp_curve

log = logging.getLogger("noma_effrate")


class ConfigError(ValueError):
    """Config-file problem, annotated with section and key."""


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def parse_values(text: str) -> list[float]:
    """Parse '1, 2, 3' lists or 'start:stop:step' inclusive ranges."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad range {text!r}")
        n = int(round((stop - start) / step))
        vals = [start + i * step for i in range(n + 1)]
        if vals[-1] > stop + 1e-12:
            vals.pop()
        return vals
    return [float(p) for p in text.split(",") if p.strip()]


@dataclass
class SweepConfig:
    """Typed view of one sweep configuration file."""

    alpha: int = 2
    mu: int = 1
    omega_s: float = 1.0
    omega_w: float = math.sqrt(0.1)
    a_s_values: list[float] = field(default_factory=lambda: [0.24])
    rho_db: list[float] = field(default_factory=lambda: [10.0])
    theta: list[float] = field(default_factory=lambda: [0.5])
    tb: float = 1.0
    strategy: str = "quadrature"
    symbols_per_slot: int = 168
    lambdas: list[float] = field(default_factory=list)
    s_min: float = 1e-6
    s_max: float = 5.0
    vartheta_max: int = 30
    seed: int = 12345
    draws: int = 1_000_000
    slots: int = 0
    batches: int = 10
    out_path: str | None = None
    out_format: str = "csv"

    def pair(self) -> ChannelPair:
        return ChannelPair(
            AlphaMuChannel(self.alpha, self.mu, self.omega_s),
            AlphaMuChannel(self.alpha, self.mu, self.omega_w),
        )

    def system(self, a_s: float, theta: float, rho_db: float) -> NomaSystem:
        return NomaSystem(
            self.pair(), a_s, 10.0 ** (rho_db / 10.0), DelayQos(theta, self.tb)
        )


def _get(cp, section, key, cast, default):
    if not cp.has_option(section, key):
        return default
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except Exception as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from exc


def load_config(path: str | None) -> SweepConfig:
    cfg = SweepConfig()
    if path is None:
        return cfg
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = cp.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    known = {"channel", "system", "snc", "sim", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    cfg.alpha = _get(cp, "channel", "alpha", int, cfg.alpha)
    cfg.mu = _get(cp, "channel", "mu", int, cfg.mu)
    cfg.omega_s = _get(cp, "channel", "omega_s", float, cfg.omega_s)
    cfg.omega_w = _get(cp, "channel", "omega_w", float, cfg.omega_w)
    has_as = cp.has_option("system", "a_s")
    has_grid = cp.has_option("system", "a_s_grid")
    if has_as and has_grid:
        raise ConfigError("[system] give either a_s or a_s_grid, not both")
    if has_as or has_grid:
        key = "a_s" if has_as else "a_s_grid"
        cfg.a_s_values = _get(cp, "system", key, parse_values, cfg.a_s_values)
    cfg.rho_db = _get(cp, "system", "rho_db", parse_values, cfg.rho_db)
    cfg.theta = _get(cp, "system", "theta", parse_values, cfg.theta)
    cfg.tb = _get(cp, "system", "tb", float, cfg.tb)
    cfg.strategy = _get(cp, "system", "strategy", str, cfg.strategy).strip()
    cfg.symbols_per_slot = _get(cp, "snc", "symbols_per_slot", int, cfg.symbols_per_slot)
    cfg.lambdas = _get(cp, "snc", "lambda", parse_values, cfg.lambdas)
    cfg.s_min = _get(cp, "snc", "s_min", float, cfg.s_min)
    cfg.s_max = _get(cp, "snc", "s_max", float, cfg.s_max)
    cfg.vartheta_max = _get(cp, "snc", "vartheta_max", int, cfg.vartheta_max)
    cfg.seed = _get(cp, "sim", "seed", int, cfg.seed)
    cfg.draws = _get(cp, "sim", "draws", int, cfg.draws)
    cfg.slots = _get(cp, "sim", "slots", int, cfg.slots)
    cfg.batches = _get(cp, "sim", "batches", int, cfg.batches)
    cfg.out_path = _get(cp, "output", "path", str, cfg.out_path)
    cfg.out_format = _get(cp, "output", "format", str, cfg.out_format).strip()
    _validate(cfg)
    return cfg


def _validate(cfg: SweepConfig):
    for name, vals in (
        ("a_s", cfg.a_s_values),
        ("rho_db", cfg.rho_db),
        ("theta", cfg.theta),
    ):
        if not vals:
            raise ConfigError(f"[system] {name}: empty grid")
    if cfg.strategy not in ("quadrature", "closed-form"):
        raise ConfigError(f"[system] strategy: {cfg.strategy!r} not supported")
    if cfg.out_format not in ("csv", "svg"):
        raise ConfigError(f"[output] format: must be csv or svg, got {cfg.out_format!r}")
    try:
        cfg.pair()
    except ValueError as exc:
        raise ConfigError(f"[channel] {exc}") from exc


# ---------------------------------------------------------------------------
# er sweep


ER_HEADER = (
    "alpha,mu,omega_w,a_s,theta,rho_db,R_s,R_w,R_sum,R_sum_oma,gap,strategy,err"
)


def _er_point(args):
    cfg, a_s, theta, rho_db = args
    sysm = cfg.system(a_s, theta, rho_db)
    rs = er_noma(sysm, "strong", cfg.strategy)
    rw = er_noma(sysm, "weak", cfg.strategy)
    os_ = er_oma(sysm, "strong", cfg.strategy)
    ow = er_oma(sysm, "weak", cfg.strategy)
    r_sum = rs.value + rw.value
    oma_sum = os_.value + ow.value
    err = max(rs.error_estimate, rw.error_estimate, os_.error_estimate, ow.error_estimate)
    return (
        cfg.alpha,
        cfg.mu,
        cfg.omega_w,
        a_s,
        theta,
        rho_db,
        rs.value,
        rw.value,
        r_sum,
        oma_sum,
        r_sum - oma_sum,
        cfg.strategy,
        err,
    )


def cmd_er(cfg: SweepConfig, jobs: int) -> tuple[str, list[tuple]]:
    tasks = [
        (cfg, a_s, theta, rho)
        for a_s in cfg.a_s_values
        for theta in cfg.theta
        for rho in cfg.rho_db
    ]
    return ER_HEADER, _run_tasks(_er_point, tasks, jobs)


# ---------------------------------------------------------------------------
# dvp


DVP_HEADER = "user,vartheta,bound,minimizer_s,feasible,empirical_p,ci_low,ci_high"


def cmd_dvp(cfg: SweepConfig, jobs: int, lambda_scale: float) -> tuple[str, list[tuple]]:
    if len(cfg.a_s_values) != 1 or len(cfg.theta) != 1 or len(cfg.rho_db) != 1:
        raise ConfigError("dvp needs single a_s, theta and rho_db values")
    if len(cfg.lambdas) != 1:
        raise ConfigError("[snc] lambda: dvp needs exactly one arrival rate per run")
    lam = cfg.lambdas[0] * lambda_scale
    sysm = cfg.system(cfg.a_s_values[0], cfg.theta[0], cfg.rho_db[0])
    snc_cfg = SncConfig(
        sysm, cfg.symbols_per_slot, lam, s_min=cfg.s_min, s_max=cfg.s_max
    )
    rows = []
    for user in ("strong", "weak"):
        curve = dvp_curve(snc_cfg, user, range(cfg.vartheta_max + 1))
        emp = None
        if cfg.slots > 0:
            emp = queue_dvp(
                snc_cfg,
                user,
                SimPlan(cfg.seed, cfg.slots, cfg.batches),
                cfg.vartheta_max,
            )
        for d, b in enumerate(curve):
            if emp is None:
                empirical = (None, None, None)
            else:
                empirical = (
                    emp.probabilities[d],
                    emp.ci_low[d],
                    emp.ci_high[d],
                )
            rows.append((user, d, b.bound, b.minimizer_s, b.feasible) + empirical)
    return DVP_HEADER, rows


# ---------------------------------------------------------------------------
# approx


APPROX_HEADER = (
    "rho_db,exact_sum,high_snr_sum,low_snr_sum,ergodic_sum,rate_loss,"
    "ebn0_min_s,ebn0_min_w,slope_s,slope_w"
)


def _approx_point(args):
    cfg, a_s, theta, rho_db = args
    sysm = cfg.system(a_s, theta, rho_db)
    exact = (
        er_noma(sysm, "strong", cfg.strategy).value
        + er_noma(sysm, "weak", cfg.strategy).value
    )
    ergodic = (
        ergodic_rate(sysm, "strong", cfg.strategy).value
        + ergodic_rate(sysm, "weak", cfg.strategy).value
    )
    nu = sysm.nu
    if sysm.pair.alpha * sysm.pair.mu > 2.0 * nu:
        high = er_high_snr(sysm, "strong").value + er_high_snr(sysm, "weak").value
    else:
        high = None
    low = er_low_snr(sysm, "strong").value + er_low_snr(sysm, "weak").value
    return (
        rho_db,
        exact,
        high,
        low,
        ergodic,
        ergodic - exact,
        min_energy_per_bit(sysm, "strong"),
        min_energy_per_bit(sysm, "weak"),
        wideband_slope(sysm, "strong"),
        wideband_slope(sysm, "weak"),
    )


def cmd_approx(cfg: SweepConfig, jobs: int) -> tuple[str, list[tuple]]:
    if len(cfg.a_s_values) != 1 or len(cfg.theta) != 1:
        raise ConfigError("approx needs single a_s and theta values")
    tasks = [(cfg, cfg.a_s_values[0], cfg.theta[0], rho) for rho in cfg.rho_db]
    return APPROX_HEADER, _run_tasks(_approx_point, tasks, jobs)


# ---------------------------------------------------------------------------
# power


POWER_HEADER = "rho_db,best_a_s,best_sum_er"


def _power_point(args):
    cfg, theta, rho_db = args
    sysm = cfg.system(cfg.a_s_values[0], theta, rho_db)
    best_a, best_sum = power_search(sysm, cfg.a_s_values, strategy=cfg.strategy)
    return (rho_db, best_a, best_sum)


def cmd_power(cfg: SweepConfig, jobs: int) -> tuple[str, list[tuple]]:
    if len(cfg.theta) != 1:
        raise ConfigError("power needs a single theta value")
    tasks = [(cfg, cfg.theta[0], rho) for rho in cfg.rho_db]
    return POWER_HEADER, _run_tasks(_power_point, tasks, jobs)


# ---------------------------------------------------------------------------
# dispatch plumbing


def _run_tasks(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so parallelism cannot reorder rows
        return list(pool.map(fn, tasks, chunksize=1))


def write_csv(header: str, rows: list[tuple], stream) -> None:
    stream.write(header + "\n")
    for row in rows:
        stream.write(",".join(_fmt(v) for v in row) + "\n")


def write_svg(header: str, rows: list[tuple], stream) -> None:
    """Minimal polyline chart: first column as x, numeric columns as series."""
    cols = header.split(",")
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        try:
            x = float(row[0] if not isinstance(row[0], str) else row[1])
        except (TypeError, ValueError):
            continue
        for name, v in zip(cols[1:], row[1:]):
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                series.setdefault(name, []).append((x, float(v)))
    width, height, pad = 640, 420, 48
    xs = [p[0] for pts in series.values() for p in pts]
    ys = [p[1] for pts in series.values() for p in pts if math.isfinite(p[1])]
    if not xs or not ys:
        stream.write("<svg xmlns='http://www.w3.org/2000/svg'/>\n")
        return
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0

    def sx(x):
        return pad + (x - x0) / xspan * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / yspan * (height - 2 * pad)

    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
               "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
    out = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}'>",
        f"<rect width='{width}' height='{height}' fill='white'/>",
        f"<line x1='{pad}' y1='{height-pad}' x2='{width-pad}' y2='{height-pad}' stroke='black'/>",
        f"<line x1='{pad}' y1='{pad}' x2='{pad}' y2='{height-pad}' stroke='black'/>",
        f"<text x='{width//2}' y='{height-10}' font-size='12'>{cols[0]}</text>",
    ]
    for i, (name, pts) in enumerate(series.items()):
        pts = sorted(pts)
        color = palette[i % len(palette)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts if math.isfinite(y))
        out.append(
            f"<polyline points='{path}' fill='none' stroke='{color}' stroke-width='1.5'/>"
        )
        out.append(
            f"<text x='{width-pad+4}' y='{pad + 14*i}' font-size='10' fill='{color}'>{name}</text>"
        )
    out.append("</svg>")
    stream.write("\n".join(out) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-effrate",
        description="Delay-violation bounds and effective rates for two-user "
        "downlink NOMA over alpha-mu fading",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("er", "effective-rate sweep"),
        ("dvp", "delay-violation bound and queue simulation"),
        ("approx", "high/low-SNR approximations and rate loss"),
        ("power", "power-coefficient search"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", help="INI sweep configuration file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "svg"), help="output format")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--seed", type=int, help="simulation seed override")
        p.add_argument(
            "--lambda-scale",
            type=float,
            default=1.0,
            help="multiplier applied to configured arrival rates",
        )
    return parser


def main(argv=None) -> int:
    level = os.environ.get("NOMA_EFFRATE_LOG", "").upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.INFO))
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out_path = args.out
        if args.format is not None:
            cfg.out_format = args.format
        log.info("command %s with %d jobs", args.command, args.jobs)
        if args.command == "er":
            header, rows = cmd_er(cfg, args.jobs)
        elif args.command == "dvp":
            header, rows = cmd_dvp(cfg, args.jobs, args.lambda_scale)
        elif args.command == "approx":
            header, rows = cmd_approx(cfg, args.jobs)
        else:
            header, rows = cmd_power(cfg, args.jobs)
        writer = write_csv if cfg.out_format == "csv" else write_svg
        if cfg.out_path:
            with open(cfg.out_path, "w") as fh:
                writer(header, rows, fh)
        else:
            writer(header, rows, _sys.stdout)
        return 0
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
