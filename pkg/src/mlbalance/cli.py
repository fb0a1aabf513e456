"""Command-line entry point: ``mlbalance <command> INPUT... [options]``.

INPUT is an edge-list path or a built-in generator: ``gen:cycle:N:K`` (N-cycle
with K negative edges) or ``gen:petersen:X`` for X in a..e.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import balance, cycles, dynamics
from .graph import SignedGraph, is_balanced, read_edge_list
from .spectral import MLParams

COMMANDS = ("balance", "profile", "cycles", "consensus", "diffuse", "approx", "moments")


class CLIError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    alphas: list[float] = field(default_factory=list)
    alpha_grid: Optional[list[float]] = None
    gamma: Optional[float] = None
    beta: float = 1.0
    chi: Optional[float] = None
    tolerance: float = 1e-5
    lmax: int = 10
    r: int = 15
    seed: Optional[int] = None
    fmt: str = "csv"
    output: Optional[str] = None
    times: Optional[list[float]] = None
    dt: float = 1.0
    t_max: float = 1000.0
    threshold: float = 0.1
    diff: bool = False
    model: str = "fractional"
    allow_large: bool = False


# --------------------------------------------------------------------------- inputs

def load_graph(spec: str) -> SignedGraph:
    if spec.startswith("gen:"):
        parts = spec.split(":")
        if len(parts) == 4 and parts[1] == "cycle":
            try:
                n, k = int(parts[2]), int(parts[3])
            except ValueError:
                raise CLIError(f"{spec}: cycle generator needs integers, e.g. gen:cycle:10:1") from None
            return cycles.cycle_graph(n, k)
        if len(parts) == 3 and parts[1] == "petersen":
            signings = cycles.petersen_signings()
            if parts[2] not in signings:
                raise CLIError(f"{spec}: unknown Petersen signing {parts[2]!r} (use a..e)")
            return signings[parts[2]]
        raise CLIError(f"{spec}: unknown generator (use gen:cycle:N:K or gen:petersen:a..e)")
    return read_edge_list(spec)


def parse_floats(text: str, flag: str) -> list[float]:
    """``a,b,c`` or ``start:stop:step`` (inclusive stop)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step == 0 or (stop - start) / step < 0:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CLIError(f"{flag}: cannot parse {text!r}; use a,b,c or start:stop:step") from None


def _check_alphas(values: Sequence[float], flag: str) -> None:
    bad = [a for a in values if not 0 < a <= 1]
    if bad:
        raise CLIError(f"{flag}: alpha values must lie in (0, 1], got {bad}")


# --------------------------------------------------------------------------- commands
# each command returns (header, rows) for one graph, or for all graphs when
# the table is keyed by alpha / k rather than by graph

def _balance(name: str, g: SignedGraph, cfg: RunConfig):
    ok, _ = is_balanced(g)
    rep = balance.k_exp(g, cfg.beta)
    header = ["graph", "n", "m", "balanced", "K_1", "pos_1", "neg_1"]
    row = [name, g.n, g.m, ok, rep.index, rep.positive_part, rep.negative_part]
    for a in cfg.alphas:
        p = MLParams(a, cfg.gamma)
        header += [f"Kml_{a:g}", f"posml_{a:g}", f"negml_{a:g}"]
        try:
            r = balance.k_ml(g, p)
            row += [r.index, r.positive_part, r.negative_part]
        except OverflowError:
            # the traces leave double range; the ratio is still available
            row += [balance.k_ml_log(g, p), None, None]
    return header, [row]


def _cycles(name: str, g: SignedGraph, cfg: RunConfig):
    census = cycles.cycle_census(g, cfg.lmax, allow_large=cfg.allow_large)
    rows = [[name, k, *census.counts[k]] for k in range(3, cfg.lmax + 1)]
    return ["graph", "length", "positive", "negative"], rows


def _consensus(name: str, g: SignedGraph, cfg: RunConfig):
    u0 = dynamics.random_initial_state(g.n, cfg.seed) if cfg.seed is not None else None
    res = dynamics.consensus_time(g, u0, tolerance=cfg.tolerance, dt=cfg.dt, t_max=cfg.t_max)
    return (["graph", "n", "t_c", "final_spread", "dissensus"],
            [[name, g.n, res.t_c, res.final_spread, res.dissensus]])


def _diffuse(name: str, g: SignedGraph, cfg: RunConfig):
    times = cfg.times if cfg.times is not None else [float(t) for t in range(11)]
    if cfg.seed is not None:
        u0 = dynamics.random_initial_state(g.n, cfg.seed)
    else:
        u0 = dynamics.default_initial_state(g.n)
    if cfg.model == "altafini":
        traj = dynamics.altafini_trajectory(g, u0, times)
    else:
        alpha = cfg.alphas[0] if cfg.alphas else 1.0
        chi = cfg.chi if cfg.chi is not None else float(g.degrees().max(initial=0))
        traj = dynamics.frac_trajectory(g, chi, alpha, u0, times)
    _, deficit = dynamics.mass_series(traj)
    header = ["graph", "time", *(f"v{i}" for i in range(g.n)), "total_mass", "mass_deficit"]
    rows = [[name, t, *s, m, d] for t, s, m, d in zip(traj.times, traj.states, traj.total_mass, deficit)]
    return header, rows


def _approx(name: str, g: SignedGraph, cfg: RunConfig):
    grid = cfg.alpha_grid or [round(1.0 - 0.05 * i, 2) for i in range(13)]
    ac = balance.alpha_c(g, cfg.gamma, cfg.threshold, sorted(set(grid), reverse=True))
    gap = balance.relative_spectral_gap(g)
    rows = []
    for a in grid:
        p = MLParams(a, cfg.gamma)
        res = balance.k_ml_gap_approx(g, p)
        rows.append([name, a, p.gamma, res.exact, res.approx, res.relative_error, res.multiplicity, gap, ac])
    header = ["graph", "alpha", "gamma", "K", "K_approx", "rel_error", "m1", "rel_gap", "alpha_c"]
    return header, rows


def _profile_all(named: list[tuple[str, SignedGraph]], cfg: RunConfig):
    grid = cfg.alpha_grid or list(balance.DEFAULT_GRID)
    cols = [balance.balance_profile(g, grid, cfg.gamma) for _, g in named]
    header = ["alpha", "gamma", *(f"K[{n}]" for n, _ in named)]
    rows = []
    for i, a in enumerate(grid):
        gamma = cfg.gamma if cfg.gamma is not None else math.gamma(a + 1)
        rows.append([a, gamma, *(c[i][1] for c in cols)])
    return _with_diff(header, rows, len(named), cfg)


def _moments_all(named: list[tuple[str, SignedGraph]], cfg: RunConfig):
    alpha = cfg.alphas[0] if cfg.alphas else 1.0
    ledgers = [balance.moment_ledger(g, alpha, cfg.r) for _, g in named]
    depth = min(l.r for l in ledgers)
    header = ["k"]
    for n, _ in named:
        header += [f"signed[{n}]", f"unsigned[{n}]", f"M[{n}]"]
    rows = []
    for k in range(depth + 1):
        row = [k]
        for l in ledgers:
            row += [l.signed_moments[k], l.unsigned_moments[k], l.partial_ratios[k]]
        rows.append(row)
    if cfg.diff and len(named) == 2:
        header.append("signed_diff")
        rows = [row + [row[1] - row[4]] for row in rows]
    return header, rows


def _with_diff(header, rows, count, cfg):
    if cfg.diff and count == 2:
        return header + ["diff"], [row + [row[-2] - row[-1]] for row in rows]
    return header, rows


PER_GRAPH: dict[str, Callable] = {
    "balance": _balance,
    "cycles": _cycles,
    "consensus": _consensus,
    "diffuse": _diffuse,
    "approx": _approx,
}
JOINT: dict[str, Callable] = {"profile": _profile_all, "moments": _moments_all}


# --------------------------------------------------------------------------- output

def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _json_value(x):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    return x


def render(header: list[str], rows: list[list], fmt: str, seed: Optional[int]) -> str:
    out = []
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        if seed is not None:
            buf.write(f"# seed={seed}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(x) for x in row])
        return buf.getvalue()
    if seed is not None:
        out.append(json.dumps({"seed": seed}))
    for row in rows:
        out.append(json.dumps({h: _json_value(x) for h, x in zip(header, row)}))
    return "".join(line + "\n" for line in out)


# --------------------------------------------------------------------------- driver

def _threads() -> int:
    raw = os.environ.get("MLBALANCE_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        raise CLIError(f"MLBALANCE_THREADS: expected an integer, got {raw!r}") from None


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    failures = 0

    def attempt(fn, *args):
        try:
            return fn(*args), None
        except (OSError, ValueError, LookupError, OverflowError, CLIError) as exc:
            return None, str(exc)

    def load(spec):
        g, err = attempt(load_graph, spec)
        return spec, g, (f"{spec}: {err}" if err and not err.startswith(spec) else err)

    try:
        workers = _threads()
    except CLIError as exc:
        print(f"mlbalance: {exc}", file=stderr)
        return 2
    with ThreadPoolExecutor(max_workers=workers) as pool:
        loaded = list(pool.map(load, cfg.inputs))
        named = []
        for spec, g, err in loaded:
            if err:
                failures += 1
                print(f"mlbalance: {err}", file=stderr)
            else:
                named.append((spec, g))

        header, rows = None, []
        if cfg.command in JOINT:
            if named:
                result, err = attempt(JOINT[cfg.command], named, cfg)
                if err:
                    failures += 1
                    print(f"mlbalance: {cfg.command}: {err}", file=stderr)
                else:
                    header, rows = result
        else:
            fn = PER_GRAPH[cfg.command]
            results = list(pool.map(lambda item: (item[0], attempt(fn, item[0], item[1], cfg)), named))
            blocks = []
            for spec, (result, err) in results:
                if err:
                    failures += 1
                    print(f"mlbalance: {spec}: {err}", file=stderr)
                else:
                    blocks.append(result)
            if blocks:
                # graphs of different order give different state columns in diffuse
                header = []
                for h, _ in blocks:
                    header += [name for name in h if name not in header]
                for h, r in blocks:
                    rows.extend(_align(h, header, r))
    if header is not None:
        text = render(header, rows, cfg.fmt, cfg.seed)
        if cfg.output:
            try:
                with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                print(f"mlbalance: --output {cfg.output}: {exc}", file=stderr)
                return 1
        else:
            stdout.write(text)
    return 1 if failures else 0


def _align(h: list[str], header: list[str], rows: list[list]) -> list[list]:
    if h == header:
        return rows
    pos = {name: i for i, name in enumerate(h)}
    return [[row[pos[name]] if name in pos else None for name in header] for row in rows]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mlbalance", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("inputs", nargs="+", metavar="INPUT")
    p.add_argument("--alpha", help="alpha value(s): a,b,c or start:stop:step")
    p.add_argument("--alpha-grid", help="alpha grid for profile/approx")
    p.add_argument("--gamma", type=float, help="fixed gamma (default Gamma(alpha+1))")
    p.add_argument("--beta", type=float, default=1.0, help="inverse temperature of K(G, beta)")
    p.add_argument("--chi", type=float, help="chi of L_chi = chi I - A (default: max degree)")
    p.add_argument("--tolerance", type=float, default=1e-5)
    p.add_argument("--lmax", type=int, default=10)
    p.add_argument("--allow-large", action="store_true", help="lift the lmax <= 12 guard")
    p.add_argument("--r", type=int, default=15, help="moment truncation order")
    p.add_argument("--seed", type=int, help="random initial state for consensus/diffuse")
    p.add_argument("--times", help="diffuse sample times: a,b,c or start:stop:step")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--threshold", type=float, default=0.1, help="alpha_c error threshold")
    p.add_argument("--model", choices=("fractional", "altafini"), default="fractional")
    p.add_argument("--diff", action="store_true", help="append first-minus-second column (two inputs)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json-lines"), default="csv")
    p.add_argument("--output", help="write the table here instead of stdout")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    alphas = parse_floats(ns.alpha, "--alpha") if ns.alpha else []
    _check_alphas(alphas, "--alpha")
    grid = parse_floats(ns.alpha_grid, "--alpha-grid") if ns.alpha_grid else None
    if grid is not None:
        _check_alphas(grid, "--alpha-grid")
    times = parse_floats(ns.times, "--times") if ns.times else None
    if ns.gamma is not None and not ns.gamma > 0:
        raise CLIError("--gamma: must be positive")
    if not ns.beta > 0:
        raise CLIError("--beta: must be positive")
    if ns.chi is not None and ns.chi < 0:
        raise CLIError("--chi: must be nonnegative")
    if not ns.tolerance > 0:
        raise CLIError("--tolerance: must be positive")
    if ns.r < 0:
        raise CLIError("--r: must be >= 0")
    if not ns.dt > 0:
        raise CLIError("--dt: must be positive")
    return RunConfig(ns.command, list(ns.inputs), alphas, grid, ns.gamma, ns.beta, ns.chi, ns.tolerance,
                     ns.lmax, ns.r, ns.seed, "csv" if ns.fmt == "csv" else "json-lines", ns.output,
                     times, ns.dt, ns.t_max, ns.threshold, ns.diff, ns.model, ns.allow_large)


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except CLIError as exc:
        print(f"mlbalance: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
