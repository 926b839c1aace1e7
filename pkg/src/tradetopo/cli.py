"""Command-line batch pipelines over trade/GDP/recession CSV inputs.

Exit codes: 0 success, 2 input/parse error, 3 empty or degenerate
result, 4 non-convergence (partial trace still written). All floats in
output files use 12 significant digits so repeated runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

from . import hclust, ingest, metrics, shockprop, stats
from .errors import (
    EmptyYear,
    MissingGdp,
    MissingYear,
    NoConvergence,
    ParseError,
    TradeTopoError,
)

log = logging.getLogger("tradetopo")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3
EXIT_NO_CONVERGENCE = 4


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def round12(value: float) -> float:
    return float(f"{value:.12g}")


def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def write_table(path, header, rows, fmt_name):
    """Write rows either as CSV or as a JSON list of row objects."""
    if fmt_name == "json":
        payload = [
            {k: round12(v) if isinstance(v, float) else v for k, v in zip(header, row)}
            for row in rows
        ]
        atomic_write(path, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [",".join(header)]
        lines.extend(",".join(fmt(v) for v in row) for row in rows)
        atomic_write(path, "\n".join(lines) + "\n")


def write_json(path, payload):
    def clean(v):
        if isinstance(v, float):
            return round12(v)
        if isinstance(v, list):
            return [clean(x) for x in v]
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        return v

    atomic_write(path, json.dumps(clean(payload), indent=2) + "\n")


def table_path(out_dir, stem, fmt_name):
    ext = "json" if fmt_name == "json" else "csv"
    return os.path.join(out_dir, f"{stem}.{ext}")


def load_trade(path):
    with open(path, encoding="utf-8") as fh:
        return ingest.parse_trade_csv(fh)


def load_gdp(path):
    with open(path, encoding="utf-8") as fh:
        return ingest.parse_gdp_csv(fh)


def load_recessions(path):
    with open(path, encoding="utf-8") as fh:
        return ingest.parse_recessions(fh)


def select_years(args, records):
    if args.year is not None:
        return [args.year]
    if args.years is not None:
        lo, _, hi = args.years.partition(":")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ParseError(f"bad year range {args.years!r}") from None
        return [y for y in ingest.available_years(records) if lo <= y <= hi]
    return ingest.available_years(records)


def networks_for_years(records, years, mode):
    nets = []
    for year in years:
        try:
            nets.append(ingest.build_network(records, year, mode))
        except EmptyYear as exc:
            log.warning("%s", exc)
    return nets


def shock_config(args):
    return shockprop.ShockConfig(
        epicenter=args.epicenter,
        shock_fraction=args.shock,
        tolerance=args.tol,
        max_steps=args.max_steps,
        update_rule=args.update,
    )


def worker_count():
    raw = os.environ.get("TRADE_TOPOLOGY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring bad TRADE_TOPOLOGY_THREADS=%r", raw)
        return 1


# --- commands ---


def cmd_ccc_series(args):
    records = load_trade(args.trade)
    nets = networks_for_years(records, select_years(args, records), args.mode)
    series = metrics.ccc_series(nets)
    if not series:
        log.error("no year produced a CCC value")
        return EXIT_EMPTY
    write_table(
        table_path(args.out, "ccc_series", args.format),
        ["year", "ccc", "n_countries"],
        [(p.year, p.ccc, p.n_countries) for p in series],
        args.format,
    )
    if args.gdp:
        gdp = load_gdp(args.gdp)
        ratio_rows, total_rows = [], []
        for net in nets:
            total_rows.append((net.year, metrics.total_trade(net)))
            try:
                ratio_rows.append((net.year, metrics.trade_gdp_ratio(net, gdp)))
            except MissingGdp as exc:
                log.warning("year %d: %s", net.year, exc)
        write_table(
            table_path(args.out, "trade_gdp_ratio", args.format),
            ["year", "ratio"], ratio_rows, args.format,
        )
        write_table(
            table_path(args.out, "total_trade", args.format),
            ["year", "total_trade"], total_rows, args.format,
        )
    return EXIT_OK


def cmd_dendrogram(args):
    records = load_trade(args.trade)
    net = ingest.build_network(records, args.year, args.mode)
    dend = hclust.average_linkage(hclust.distances_from_network(net))
    atomic_write(
        os.path.join(args.out, f"tree_{net.year}.nwk"),
        hclust.to_newick(dend, net.countries) + "\n",
    )
    k = min(args.cut, net.n)
    if k != args.cut:
        log.warning("cut count %d clamped to %d countries", args.cut, net.n)
    assignment = hclust.cut_at_count(dend, k)
    write_table(
        table_path(args.out, f"clusters_{net.year}", args.format),
        ["country", "cluster"],
        list(zip(net.countries, assignment)),
        args.format,
    )
    return EXIT_OK


def cmd_share_matrix(args):
    records = load_trade(args.trade)
    net = ingest.build_network(records, args.year, args.mode)
    dend = hclust.average_linkage(hclust.distances_from_network(net))
    share = metrics.ordered_share_matrix(net, dend)
    lines = ["," + ",".join(share.countries)]
    for country, row in zip(share.countries, share.s):
        lines.append(country + "," + ",".join(fmt(float(v)) for v in row))
    atomic_write(
        os.path.join(args.out, f"share_matrix_{net.year}.csv"),
        "\n".join(lines) + "\n",
    )
    return EXIT_OK


def _year_flows(records, year):
    flows = [r for r in records if r.year == year]
    if not flows:
        raise EmptyYear(f"no trade records for year {year}")
    return flows


def _write_trace(path_stem, trace, args):
    rows = [
        (t, country, float(y[i]))
        for t, y in enumerate(trace.steps)
        for i, country in enumerate(trace.countries)
    ]
    write_table(
        table_path(args.out, path_stem, args.format),
        ["step", "country", "gdp"], rows, args.format,
    )


def cmd_shock(args):
    records = load_trade(args.trade)
    gdp = load_gdp(args.gdp)
    state = shockprop.init_state(_year_flows(records, args.year), gdp)
    config = shock_config(args)
    try:
        trace = shockprop.run_to_steady(state, config)
    except NoConvergence as exc:
        _write_trace(f"shock_trace_{args.year}", exc.trace, args)
        log.error("%s", exc)
        return EXIT_NO_CONVERGENCE
    _write_trace(f"shock_trace_{args.year}", trace, args)
    write_json(
        os.path.join(args.out, f"shock_summary_{args.year}.json"),
        {
            "world_gdp_change": shockprop.world_gdp_change(trace),
            "impact_ratio": shockprop.impact_ratio(trace, config.epicenter),
            "steps": len(trace.steps),
            "converged": trace.converged,
        },
    )
    return EXIT_OK


def _shock_and_recover(state, config):
    """Run the full shock + recovery scenario; returns (shock trace,
    recovery trace, recovery fit)."""
    initial_y = state.y[state.index(config.epicenter)]
    shock_trace = shockprop.run_to_steady(state, config)
    recovery = shockprop.run_recovery(
        shock_trace.final_state, float(initial_y), config
    )
    fit = shockprop.fit_recovery(recovery)
    return shock_trace, recovery, fit


def cmd_recover(args):
    records = load_trade(args.trade)
    gdp = load_gdp(args.gdp)
    state = shockprop.init_state(_year_flows(records, args.year), gdp)
    config = shock_config(args)
    try:
        shock_trace, recovery, fit = _shock_and_recover(state, config)
    except NoConvergence as exc:
        _write_trace(f"recovery_trace_{args.year}", exc.trace, args)
        log.error("%s", exc)
        return EXIT_NO_CONVERGENCE
    _write_trace(f"recovery_trace_{args.year}", recovery, args)
    write_json(
        os.path.join(args.out, f"recovery_summary_{args.year}.json"),
        {
            "world_gdp_change": shockprop.world_gdp_change(shock_trace),
            "impact_ratio": shockprop.impact_ratio(shock_trace, config.epicenter),
            "lambda": fit.lam,
            "a": fit.a,
            "y_inf": fit.y_inf,
            "steps": len(recovery.steps),
            "converged": recovery.converged,
        },
    )
    return EXIT_OK


def _ccc_series_for(args, records):
    nets = networks_for_years(records, select_years(args, records), args.mode)
    return metrics.ccc_series(nets)


def cmd_recessions_test(args):
    records = load_trade(args.trade)
    windows = load_recessions(args.recessions)
    series = _ccc_series_for(args, records)
    try:
        shift = stats.recession_ccc_shift(series, windows)
    except MissingYear as exc:
        log.error("%s", exc)
        return EXIT_EMPTY
    write_json(
        os.path.join(args.out, "recessions_test.json"),
        {
            "D": shift["two_sided"].d_statistic,
            "p": shift["two_sided"].p_value,
            "method": shift["two_sided"].method,
            "before": shift["before"],
            "after": shift["after"],
            "one_sided_p": shift["one_sided_p"],
        },
    )
    return EXIT_OK


def cmd_pipeline(args):
    rc = cmd_ccc_series(args)
    if rc != EXIT_OK:
        return rc
    records = load_trade(args.trade)
    series = _ccc_series_for(args, records)
    ccc_by_year = {p.year: p.ccc for p in series}

    gdp = None
    if args.gdp and os.path.exists(args.gdp):
        gdp = load_gdp(args.gdp)
    else:
        log.warning("no GDP data; shock and recovery stages skipped")

    fig4a_rows, fig4b_rows = [], []
    if gdp is not None:
        config = shock_config(args)

        def scenario(year):
            state = shockprop.init_state(_year_flows(records, year), gdp)
            return _shock_and_recover(state, config)

        years = [p.year for p in series]
        with ThreadPoolExecutor(max_workers=worker_count()) as pool:
            futures = {y: pool.submit(scenario, y) for y in years}
        for year in years:
            try:
                shock_trace, _, fit = futures[year].result()
            except (TradeTopoError, ValueError) as exc:
                log.warning("year %d: shock scenario skipped: %s", year, exc)
                continue
            fig4a_rows.append((
                year, ccc_by_year[year],
                shockprop.impact_ratio(shock_trace, config.epicenter),
            ))
            fig4b_rows.append((
                year, ccc_by_year[year],
                shockprop.world_gdp_change(shock_trace), fit.lam,
            ))
        write_table(
            os.path.join(args.out, "fig4a.csv"),
            ["year", "ccc", "impact_ratio"], fig4a_rows, "csv",
        )
        write_table(
            os.path.join(args.out, "fig4b.csv"),
            ["year", "ccc", "world_gdp_change", "lambda"], fig4b_rows, "csv",
        )

    if args.recessions:
        rc = cmd_recessions_test(args)
        if rc != EXIT_OK:
            return rc
    return EXIT_OK


# --- argument parsing ---


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tradetopo",
        description="Hierarchy metrics and shock propagation for trade networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, needs_year=False, needs_gdp=False):
        p = sub.add_parser(name)
        p.set_defaults(func=func)
        p.add_argument("--trade", required=True, help="trade flow CSV")
        p.add_argument("--gdp", required=needs_gdp, help="GDP CSV")
        p.add_argument("--recessions", help="recession windows CSV")
        if needs_year:
            p.add_argument("--year", type=int, required=True)
        else:
            group = p.add_mutually_exclusive_group()
            group.add_argument("--year", type=int)
            group.add_argument("--years", metavar="A:B", help="inclusive year range")
        p.add_argument("--mode", choices=ingest.SYMMETRIZATION_MODES, default="sum")
        p.add_argument("--epicenter", default="USA")
        p.add_argument("--shock", type=float, default=0.054,
                       help="epicenter GDP shock fraction")
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--max-steps", type=int, default=100_000)
        p.add_argument("--update", choices=shockprop.UPDATE_RULES,
                       default="multiplicative")
        p.add_argument("--cut", type=int, default=6, help="cluster count for cuts")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    add("ccc-series", cmd_ccc_series)
    add("dendrogram", cmd_dendrogram, needs_year=True)
    add("share-matrix", cmd_share_matrix, needs_year=True)
    add("shock", cmd_shock, needs_year=True, needs_gdp=True)
    add("recover", cmd_recover, needs_year=True, needs_gdp=True)
    add("recessions-test", cmd_recessions_test)
    add("pipeline", cmd_pipeline)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "recessions-test" and not args.recessions:
        print("error: --recessions is required for recessions-test", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (FileNotFoundError, ParseError, MissingGdp, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EmptyYear as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except TradeTopoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
