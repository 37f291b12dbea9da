"""Command-line front end: every table and figure as CSV with a provenance header.

Exit codes: 0 success, 2 parameter error, 3 numeric failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import io
import math
import shlex
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import box_spectrum as bs
from . import engine_cycle as ec
from . import general_demon as gd
from . import quantum_weight as qw
from . import thermal_gas as tg
from . import thermo_ledger as tl
from .airy import DomainTooLarge

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

NUMERIC_ERRORS = (bs.ContinuationStall, ec.StationaryNonConvergence, ArithmeticError)


@dataclass
class RunConfig:
    command: str
    params: dict
    out: str | None = None
    seed: int | None = None
    argv: list = field(default_factory=list)

    def __post_init__(self):
        for key in ("points", "ma_points"):
            v = self.params.get(key)
            if v is not None and v < 2:
                raise ValueError(f"--{key.replace('_', '-')} must be at least 2")


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x + 0.0:.12g}"


class CsvWriter:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.buf = io.StringIO()
        self.buf.write(f"# artifact {__version__}\n")
        self.buf.write(f"# command: szilard {shlex.join(cfg.argv)}\n")
        self.buf.write(f"# seed: {cfg.seed if cfg.seed is not None else 'none'}\n")
        for k in sorted(cfg.params):
            self.buf.write(f"# param {k}={fmt(cfg.params[k])}\n")

    def comment(self, text: str):
        self.buf.write(f"# {text}\n")

    def header(self, cols):
        self.cols = list(cols)
        self.buf.write(",".join(self.cols) + "\n")

    def row(self, values):
        self.buf.write(",".join(fmt(v) for v in values) + "\n")

    def footer(self, table: dict):
        """min/max of each numeric column, for positivity audits."""
        for name in self.cols:
            col = np.asarray(table[name], dtype=float)
            finite = col[~np.isnan(col)]
            lo, hi = (finite.min(), finite.max()) if finite.size else (math.nan, math.nan)
            self.comment(f"min {name}={fmt(lo)} max {name}={fmt(hi)}")

    def table(self, table: dict, footer: bool = False):
        cols = list(table)
        self.header(cols)
        arrays = [np.ravel(np.asarray(table[c])) for c in cols]
        for i in range(arrays[0].size):
            self.row(a[i] for a in arrays)
        if footer:
            self.footer(table)

    def flush(self):
        text = self.buf.getvalue()
        if self.cfg.out in (None, "-"):
            sys.stdout.write(text)
        else:
            with open(self.cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        return text


def _reset(args) -> ec.ResetUnitary:
    m_a = args.ma
    if args.mb is None and args.mc is None:
        return ec.ResetUnitary.symmetric(m_a)
    m_b = args.mb if args.mb is not None else 1.0 - m_a - args.mc
    m_c = args.mc if args.mc is not None else 1.0 - m_a - m_b
    return ec.ResetUnitary(m_a, m_b, m_c)


def _grid01(n: int, closed: bool = True) -> np.ndarray:
    if closed:
        return np.linspace(0.0, 1.0, n)
    return np.arange(1, n + 1) / (n + 1.0)


# commands

def cmd_eigencurve(args, w: CsvWriter):
    if args.vmin < 0 or not args.vmax > args.vmin:
        raise ValueError("need 0 <= vmin < vmax")
    V = np.linspace(args.vmin, args.vmax, args.points)
    states = bs.continue_levels(args.symmetry, args.level, V, args.p)
    E = np.array([s.energy for s in states])
    # the asymptotic forms have no meaning without a barrier
    hba = np.array([bs.hba_energy(args.symmetry, args.level, v, args.p) if v > 0 else math.nan
                    for v in V])
    z = np.array([bs.zurek_energy(args.level, v, args.p) if v > 0 else (math.nan, math.nan)
                  for v in V])
    w.comment(f"limit energy (V -> inf) = {fmt(bs.limit_energy(args.level, args.p))}")
    w.table({"V": V, "E_numeric": E, "E_hba": hba,
             "E_zurek_upper": z[:, 0] + z[:, 1], "E_zurek_lower": z[:, 0] - z[:, 1]})


def cmd_energy_surface(args, w: CsvWriter):
    P1 = _grid01(args.points)
    ma = _grid01(args.ma_points or args.points)
    PP, MM = np.meshgrid(P1, ma, indexing="ij")
    flow = ec.energy_flow_closed(PP, MM)
    pr = 0.5 * PP * (1.0 + MM)
    pl = (1.0 - 2.0 * PP) + PP * PP * (1.0 + MM)
    f = (pl - pr) / (pl + pr)
    w.comment("f: (N_R-N_L)/(N_R+N_L) from run lengths; delta_E: mean flow per cycle in k T_G")
    w.table({"P1": PP, "m_a": MM, "f": f, "delta_E": flow * math.log(2.0)}, footer=True)


def cmd_entropy_surface(args, w: CsvWriter):
    P1 = _grid01(args.points)
    ma = _grid01(args.ma_points or args.points)
    PP, MM = np.meshgrid(P1, ma, indexing="ij")
    mb, mc = tl.slice_resets(MM, args.slice)
    t = tl.cycle_totals(PP, MM, mb, mc)
    w.comment("entropies in nats, free energies in k T_W")
    w.table({"P1": PP, "m_a": MM, "m_b": mb, "m_c": mc, "dS_R": t["dS_R"],
             "dS_L_total": t["dS_L_total"], "dF_R": t["dF_R"], "dF_L": t["dF_L"]},
            footer=True)


def cmd_montecarlo(args, w: CsvWriter):
    if args.cycles < 1:
        raise ValueError("--cycles must be positive")
    if args.model == "engine":
        reset = _reset(args)
        P1 = args.p1 if args.p1 is not None else 0.5 ** (args.tg / args.tw)
        r = ec.mc_engine(P1, args.cycles, seed=args.seed, reset=reset)
        closed = ec.energy_flow(P1, reset)
        stat = math.nan
        if abs(reset.m_b - reset.m_c) < 1e-12:
            try:
                stat = ec.stationary_mix(P1, reset)
            except ec.StationaryNonConvergence:
                w.comment("stationary mixture does not settle at these parameters")
        w.table({"P1": [P1], "m_a": [reset.m_a], "mean_flow": [r["mean_flow"]],
                 "stderr": [r["stderr"]], "flow_closed": [closed],
                 "fraction_raising": [r["fraction_raising"]],
                 "fraction_stderr": [r["fraction_stderr"]], "stationary_mix": [stat]})
    else:
        params = gd.DemonParams(args.pa, args.tau)
        r = gd.mc_demon(params, args.cycles, seed=args.seed)
        f = gd.demon_flow(params)
        w.table({"p_A": [args.pa], "tau": [args.tau], "mean_Q": [r["mean_Q"]],
                 "stderr": [r["stderr"]], "Q_closed": [f.Q],
                 "first_lowering_A": [r["first_lowering_A"]],
                 "visits_LA": [r["visits_LA"]], "visits_LB": [r["visits_LB"]]})


def cmd_demon_report(args, w: CsvWriter):
    taus = _grid01(args.points, closed=False)
    pas = np.array([args.pa]) if args.pa is not None else _grid01(args.points, closed=False)
    rows = {k: [] for k in ("p_A", "tau", "P_R", "P_L", "N_R", "N_L", "Q_R", "Q_L", "Q")}
    for pa in pas:
        for t in taus:
            f = gd.demon_flow(gd.DemonParams(float(pa), float(t)))
            for k, v in (("p_A", pa), ("tau", t), ("P_R", f.P_R), ("P_L", f.P_L),
                         ("N_R", f.N_R), ("N_L", f.N_L), ("Q_R", f.Q_R),
                         ("Q_L", f.Q_L), ("Q", f.Q)):
                rows[k].append(v)
    w.comment("energies in k T_G")
    w.table(rows, footer=True)


def cmd_weight_split(args, w: CsvWriter):
    params = qw.WeightParams(T_W=args.tw)
    h = np.linspace(0.0, args.hmax * args.tw / params.Mg, args.points)
    closed = np.array([qw.p_above_shelf(x, params) for x in h])
    numeric = np.array([qw.p_above_shelf_numeric(x, params) for x in h])
    w.comment(f"Mg=H=1, levels summed: {qw.level_count(params)}")
    w.table({"h": h, "P_above_closed": closed, "P_above_numeric": numeric})


def cmd_expansion(args, w: CsvWriter):
    Y = np.linspace(0.0, 1.0 - args.p, args.points)
    cols = {k: [] for k in ("Y", "E", "P", "T", "W", "E_numeric", "W_numeric", "h_gearing")}
    for y in Y:
        c = tg.expansion_profile(args.regime, y, args.tg, args.p)
        n = tg.expansion_profile_numeric(args.regime, y, args.tg, args.p)
        h = tg.gearing_height(y, args.tg, 1.0, args.p, regime=args.regime)
        for k, v in (("Y", y), ("E", c["E"]), ("P", c["P"]), ("T", c["T"]), ("W", c["W"]),
                     ("E_numeric", n["E"]), ("W_numeric", n["W"]), ("h_gearing", h)):
            cols[k].append(v)
    w.comment("W > 0 is work extracted; h_gearing for Mg = 1")
    w.table(cols)


def cmd_ledger(args, w: CsvWriter):
    params = ec.EngineParams(args.tg, args.tw, _reset(args))
    which = ("raising", "lowering") if args.cycle == "both" else (args.cycle,)
    w.comment("F 'undefined' marks correlated stages spanning two temperatures")
    w.header(["cycle", "stage", "subsystem", "E", "S", "F", "note"])
    totals = {}
    for name in which:
        led = (tl.raising_ledger if name == "raising" else tl.lowering_ledger)(params)
        for r in led.rows:
            note = "; ".join(r.notes)
            subs = list(dict.fromkeys([*r.energy, *r.entropy, *r.free_energy]))
            for sub in subs:
                F = r.free_energy.get(sub)
                w.row([name, r.stage, sub, r.energy.get(sub), r.entropy.get(sub),
                       "undefined" if F is tl.UNDEFINED else F, note])
            tot_F = r.total_free_energy
            w.row([name, r.stage, "total", r.total_energy, r.total_entropy,
                   "undefined" if tot_F is tl.UNDEFINED else tot_F, note])
        totals.update({f"{name}:{k}": v for k, v in led.totals.items()})
    for k in sorted(totals):
        w.comment(f"{k}={fmt(totals[k])}")


COMMANDS = {
    "eigencurve": cmd_eigencurve,
    "energy-surface": cmd_energy_surface,
    "entropy-surface": cmd_entropy_surface,
    "montecarlo": cmd_montecarlo,
    "demon-report": cmd_demon_report,
    "weight-split": cmd_weight_split,
    "expansion": cmd_expansion,
    "ledger": cmd_ledger,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output CSV path (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--points", type=int, default=None, help="grid points per axis")

    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--tg", type=float, default=1.0)
    engine.add_argument("--tw", type=float, default=2.0)
    engine.add_argument("--ma", type=float, default=0.5)
    engine.add_argument("--mb", type=float, default=None)
    engine.add_argument("--mc", type=float, default=None)

    demon = argparse.ArgumentParser(add_help=False)
    demon.add_argument("--pa", type=float, default=0.5)
    demon.add_argument("--tau", type=float, default=0.5)

    ap = argparse.ArgumentParser(prog="szilard", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"artifact {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigencurve", parents=[common], help="eigenvalue vs barrier height")
    p.add_argument("--symmetry", choices=bs.SYMMETRIES, default=bs.EVEN)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--vmin", type=float, default=0.0)
    p.add_argument("--vmax", type=float, default=1e4)
    p.add_argument("--p", type=float, default=0.01)
    p.set_defaults(points_default=200)

    for name, help_ in (("energy-surface", "mean energy flow over (P1, m_a)"),
                        ("entropy-surface", "cycle entropy / free-energy changes over (P1, m_a)")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--ma-points", type=int, default=None)
        if name == "entropy-surface":
            p.add_argument("--slice", choices=("mc_zero", "mb_eq_mc"), default="mc_zero")
        p.set_defaults(points_default=101)

    p = sub.add_parser("montecarlo", parents=[common, engine, demon], help="Monte-Carlo run")
    p.add_argument("model", choices=("engine", "demon"))
    p.add_argument("--cycles", type=int, default=10**6)
    p.add_argument("--p1", type=float, default=None, help="engine P1, overrides --tg/--tw")
    p.set_defaults(points_default=None)

    p = sub.add_parser("demon-report", parents=[common], help="closed-form demon flows")
    p.add_argument("--pa", type=float, default=None, help="fix p_A and sweep tau only")
    p.set_defaults(points_default=50)

    p = sub.add_parser("weight-split", parents=[common], help="shelf probability vs height")
    p.add_argument("--tw", type=float, default=100.0)
    p.add_argument("--hmax", type=float, default=3.0, help="largest h in units of T_W/Mg")
    p.set_defaults(points_default=31)

    p = sub.add_parser("expansion", parents=[common], help="gas expansion profile")
    p.add_argument("--regime", choices=tg.REGIMES, default=tg.ISOTHERMAL)
    p.add_argument("--tg", type=float, default=100.0)
    p.add_argument("--p", type=float, default=0.01)
    p.set_defaults(points_default=51)

    p = sub.add_parser("ledger", parents=[common, engine], help="stage-by-stage ledgers")
    p.add_argument("--cycle", choices=("raising", "lowering", "both"), default="both")
    p.set_defaults(points_default=None)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.points is None:
        args.points = args.points_default
    params = {k: v for k, v in vars(args).items()
              if k not in ("out", "seed", "command", "points_default") and v is not None}
    try:
        cfg = RunConfig(args.command, params, args.out, args.seed, argv)
        writer = CsvWriter(cfg)
        COMMANDS[args.command](args, writer)
    except NUMERIC_ERRORS as exc:
        print(f"szilard: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, DomainTooLarge) as exc:
        print(f"szilard: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    try:
        writer.flush()
    except OSError as exc:
        print(f"szilard: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
