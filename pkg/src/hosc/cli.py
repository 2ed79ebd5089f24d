"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 validation failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from . import dts_catalog, dts_search, hamming, rulers, simulator, staircase

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror}") from None


def _read_dts(path: str) -> rulers.DifferenceTriangleSet:
    try:
        return rulers.parse_dts(_read_text(path))
    except rulers.DtsParseError as exc:
        raise CliError(EXIT_INVALID, f"{path}: {exc}") from None


# --- code construction --------------------------------------------------------


def _component(r: int | None, L: int, M: int, Sp: int):
    if r is None:
        return None
    n = (M + 1) * L * Sp
    if n > 1 << (r - 1):
        raise CliError(EXIT_USAGE, f"component r = {r} is too small for length {n}")
    try:
        return hamming.affine_spec(r, (1 << (r - 1)) - n)
    except hamming.HammingError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None


def _build(code: dict) -> staircase.CodeSpec:
    """Build a code from a JSON-style dict (keys L, M, Sp, C, dts, net, variant, r)."""
    try:
        L, M, Sp = int(code["L"]), int(code["M"]), int(code["Sp"])
    except KeyError as exc:
        raise CliError(EXIT_USAGE, f"code needs key {exc}") from None
    dts = code.get("dts")
    if isinstance(dts, str):
        dts = _read_dts(dts)
    try:
        return staircase.build_spec(
            L,
            M,
            Sp,
            C=int(code.get("C", 1)),
            dts=dts,
            net_kind=code.get("net", "zmod"),
            net_variant=code.get("variant", "standard"),
            component=_component(code.get("r"), L, M, Sp),
        )
    except staircase.SpecError as exc:
        raise CliError(EXIT_USAGE, f"invalid code: {exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_USAGE, f"invalid code: {exc}") from None


def _code_from_args(a) -> dict:
    code = {"L": a.L, "M": a.M, "Sp": a.Sp, "C": a.C, "net": a.net, "variant": a.variant}
    if a.dts_file:
        code["dts"] = a.dts_file
    if a.r is not None:
        code["r"] = a.r
    return code


def cmd_construct(a) -> int:
    spec = _build(_code_from_args(a))
    enc, dec = staircase.memory_metrics(spec)
    lines = [
        f"L={spec.L} M={spec.M} Sp={spec.Sp} S={spec.S} C={spec.C}",
        f"dts: {spec.dts.as_lists()}",
        f"component: extended Hamming n={spec.component.n} r={spec.r} k={spec.component.k}",
        f"rate: {spec.rate:.6f}",
        f"memory: encoding {enc} bits, decoding {dec} bits",
        f"stall bound: {staircase.stall_bound(spec.M, spec.component.t)}",
        f"span: {staircase.span_layout(spec)}",
    ]
    print("\n".join(lines))
    if a.check_scattering:
        ok = staircase.check_scattering(spec)
        print(f"scattering: {'PASS' if ok else 'FAIL'}")
        if not ok:
            return EXIT_INVALID
    return EXIT_OK


# --- simulation ----------------------------------------------------------------

_SIM_KEYS = {f.name for f in fields(simulator.SimConfig)}


def _campaign(a) -> tuple[dict, dict, list, str | None]:
    """Merge an optional JSON config with command-line overrides."""
    cfg = {}
    if a.config:
        try:
            cfg = json.loads(_read_text(a.config))
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_USAGE, f"{a.config}: bad JSON ({exc})") from None
    code = dict(cfg.get("code", {}))
    if a.L is not None:
        code.update(L=a.L, M=a.M, Sp=a.Sp)
    for key in ("C", "net", "variant", "r"):
        val = getattr(a, key, None)
        if val is not None:
            code[key] = val
    if a.dts_file:
        code["dts"] = a.dts_file
    sim = dict(cfg.get("sim", {}))
    for key in ("W", "I", "F", "seed", "min_bits", "min_errors", "max_bits", "batch", "count"):
        val = getattr(a, key, None)
        if val is not None:
            sim[key] = val
    unknown = set(sim) - _SIM_KEYS
    if unknown:
        raise CliError(EXIT_USAGE, f"unknown sim keys: {sorted(unknown)}")
    channel = dict(cfg.get("channel", {}))
    if a.gap:
        channel = {"gap_db": a.gap}
    elif a.epsilon:
        channel = {"epsilon": a.epsilon}
    gaps = channel.get("gap_db")
    eps = channel.get("epsilon")
    if gaps is not None and not isinstance(gaps, list):
        gaps = [gaps]
    if eps is not None and not isinstance(eps, list):
        eps = [eps]
    if not gaps and not eps:
        raise CliError(EXIT_USAGE, "no channel points: give --gap or --epsilon")
    points = [("gap", float(g)) for g in gaps or []] + [("eps", float(e)) for e in eps or []]
    return code, sim, points, a.output or cfg.get("output")


def _run_sim(a, single: bool) -> int:
    code, sim, points, output = _campaign(a)
    if single and len(points) != 1:
        raise CliError(EXIT_USAGE, "simulate takes exactly one channel point; use sweep")
    spec = _build(code)
    try:
        cfg = simulator.SimConfig(**sim)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"invalid sim config: {exc}") from None
    R = float(simulator.terminated_rate(spec.S, spec.r, cfg.F, cfg.W))
    channels = [
        simulator.ChannelSpec(gap_db=v, R=R) if kind == "gap" else simulator.ChannelSpec(epsilon=v)
        for kind, v in points
    ]

    def progress(point, frames, bits, errors):
        if not a.quiet:
            print(f"point {point}: frames={frames} bits={bits} errors={errors}", file=sys.stderr)

    workers = a.threads or simulator.default_workers()
    report = simulator.run_campaign(spec, channels, cfg, workers=workers, progress=progress)
    _write_text(output, report.to_csv(include_wall=not a.no_wall))
    return EXIT_OK


def cmd_simulate(a) -> int:
    return _run_sim(a, single=True)


def cmd_sweep(a) -> int:
    return _run_sim(a, single=False)


# --- DTS tools -----------------------------------------------------------------


def cmd_dts_search(a) -> int:
    T = a.scope
    if T is None:
        try:
            T = rulers.lower_bounds(a.L, a.M)[0]
        except rulers.UnsupportedBoundError:
            raise CliError(EXIT_USAGE, "no scope bound known for this (L, M); pass --scope") from None

    def show(d):
        print(f"# scope {rulers.scope(d)} sum {rulers.sum_of_lengths(d)}")
        print(rulers.format_dts(d), end="", flush=True)

    if a.no_model:
        best = dts_search.search(a.L, a.M, T, a.objective, None, a.budget, a.seed, threads=a.threads, on_improve=show)
    else:
        best = dts_search.pipeline_search(a.L, a.M, T, a.objective, seed=a.seed, budget=a.budget, on_improve=show)
    if best is None:
        print(f"no ({a.L},{a.M})-DTS of scope <= {T} found", file=sys.stderr)
        return EXIT_INVALID
    if a.output:
        _write_text(a.output, rulers.format_dts(best))
    return EXIT_OK


def _bound_report(d) -> tuple[str, bool]:
    sc, sm = rulers.scope(d), rulers.sum_of_lengths(d)
    text = f"scope {sc}, sum {sm}"
    try:
        bs, bm = rulers.lower_bounds(d.L, d.M)
    except rulers.UnsupportedBoundError:
        return text + ", bounds unknown", False
    met = [name for name, v, b in (("scope", sc, bs), ("sum", sm, bm)) if v == b]
    if len(met) == 2:
        note = "both bounds met"
    elif met:
        note = f"{met[0]} bound met"
    else:
        note = f"bounds {bs}/{bm} not met"
    return f"{text}, {note}", len(met) == 2


def cmd_dts_verify(a) -> int:
    d = _read_dts(a.file)
    ok = rulers.is_dts(d)
    note, _ = _bound_report(d)
    print(f"{'PASS' if ok else 'FAIL'}, ({d.L},{d.M}), {note}")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_dts_catalog(a) -> int:
    if a.verify_catalog:
        try:
            problems = dts_catalog.verify_catalog()
        except dts_catalog.CatalogIntegrityError as exc:
            problems = [str(exc)]
        for p in problems:
            print(p)
        print(f"catalog: {'PASS' if not problems else 'FAIL'} ({len(dts_catalog.catalog_entries())} tables)")
        return EXIT_OK if not problems else EXIT_INVALID
    if a.L is None or a.M is None:
        for L, M, d in dts_catalog.catalog_entries():
            print(f"({L},{M}) scope {rulers.scope(d)} sum {rulers.sum_of_lengths(d)}")
        return EXIT_OK
    d = dts_catalog.catalog_lookup(a.L, a.M, a.pareto)
    if d is None:
        print(f"no catalog entry for ({a.L},{a.M})", file=sys.stderr)
        return EXIT_INVALID
    note, _ = _bound_report(d)
    _write_text(a.output, rulers.format_dts(d, comment=f"({a.L},{a.M})-DTS, {note}"))
    return EXIT_OK


def cmd_dts_combine(a) -> int:
    X, Y = _read_dts(a.file_a), _read_dts(a.file_b)
    try:
        d = dts_catalog.combine(X, Y)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    note, _ = _bound_report(d)
    _write_text(a.output, rulers.format_dts(d, comment=f"({d.L},{d.M})-DTS, {note}"))
    return EXIT_OK


def cmd_dts_bounds(a) -> int:
    try:
        s, m = rulers.lower_bounds(a.L, a.M)
    except rulers.UnsupportedBoundError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    print(s, m)
    return EXIT_OK


# --- Hamming tools ---------------------------------------------------------------


def cmd_hamming_find_perm(a) -> int:
    try:
        aa, bb = hamming.find_affine(a.r)
    except hamming.HammingError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    print(aa, bb)
    return EXIT_OK


def cmd_hamming_verify_tables(a) -> int:
    bad = 0
    for m, (aa, bb, ainv) in sorted(hamming.AFFINE_TABLE.items()):
        spec = hamming.affine_spec(m + 1)
        ok = hamming.systematize_check(spec) and aa * ainv % (1 << m) == 1
        bad += not ok
        print(f"affine r-1={m} a={aa} b={bb}: {'PASS' if ok else 'FAIL'}")
    for m in range(3, max(hamming.BOOLEAN_TABLE) + 2):
        ok = hamming.systematize_check(hamming.ExtHammingSpec(r=m + 1, perm="boolean"))
        bad += not ok
        print(f"boolean r-1={m}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if not bad else EXIT_INVALID


def cmd_hamming_dump_columns(a) -> int:
    try:
        if a.perm == "affine":
            spec = hamming.affine_spec(a.r, a.shortening, a.a, a.b)
        else:
            spec = hamming.ExtHammingSpec(r=a.r, shortening=a.shortening, perm=a.perm)
    except hamming.HammingError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    start = a.start if a.start is not None else spec.n - spec.r
    stop = min(spec.n, start + (a.count if a.count is not None else spec.r))
    if not 0 <= start < stop:
        raise CliError(EXIT_USAGE, f"no columns in [{start}, {stop})")
    cols = [hamming.column_bits(spec, j) for j in range(start, stop)]
    for q in range(spec.r):
        print("".join(str(c[q]) for c in cols))
    return EXIT_OK


# --- channel conversion ----------------------------------------------------------


def _rate(a) -> float:
    if a.rate is not None:
        return a.rate
    if None in (a.S, a.r, a.F, a.W):
        raise CliError(EXIT_USAGE, "give --rate or all of --S --r --F --W")
    return float(simulator.terminated_rate(a.S, a.r, a.F, a.W))


def cmd_gap_to_epsilon(a) -> int:
    try:
        print(f"{simulator.gap_to_epsilon(a.value, _rate(a)):.6e}")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    return EXIT_OK


def cmd_gap_to_db(a) -> int:
    try:
        print(f"{simulator.epsilon_to_gap(a.value, _rate(a)):.4f}")
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    return EXIT_OK


# --- parser ------------------------------------------------------------------------


def _code_args(p, required: bool = True) -> None:
    p.add_argument("--L", type=int, required=required)
    p.add_argument("--M", type=int, required=required)
    p.add_argument("--Sp", type=int, required=required, help="block side S/L")
    p.add_argument("--C", type=int, default=None if not required else 1, help="interleaved chains")
    p.add_argument("--dts-file", help="DTS text file (default: catalog)")
    p.add_argument("--net", choices=["zmod", "field"], default=None if not required else "zmod")
    p.add_argument("--variant", choices=["standard", "involution"], default=None if not required else "standard")
    p.add_argument("--r", type=int, help="component parity bits (default: smallest parent)")


def _sim_args(p) -> None:
    p.add_argument("--config", help="JSON campaign config")
    _code_args(p, required=False)
    p.add_argument("--W", type=int)
    p.add_argument("--I", type=int)
    p.add_argument("--F", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--min-bits", dest="min_bits", type=int)
    p.add_argument("--min-errors", dest="min_errors", type=int)
    p.add_argument("--max-bits", dest="max_bits", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--count", choices=["info", "all"], help="bits over which residual errors are scored")
    p.add_argument("--threads", type=int, help="worker processes (default: HOSC_THREADS or 1)")
    p.add_argument("--output", "-o", help="CSV path (default: stdout)")
    p.add_argument("--no-wall", action="store_true", help="leave wall_s empty for byte-stable output")
    p.add_argument("--quiet", "-q", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hosc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and print its parameters")
    _code_args(p)
    p.add_argument("--check-scattering", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", help="simulate one channel point")
    _sim_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gap", type=float, nargs=1)
    g.add_argument("--epsilon", type=float, nargs=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="simulate several channel points")
    _sim_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gap", type=float, nargs="+")
    g.add_argument("--epsilon", type=float, nargs="+")
    p.set_defaults(func=cmd_sweep)

    dts = sub.add_parser("dts", help="difference triangle set tools").add_subparsers(dest="dts_cmd", required=True)
    p = dts.add_parser("search", help="stochastic search for an (L, M)-DTS")
    p.add_argument("L", type=int)
    p.add_argument("M", type=int)
    p.add_argument("--scope", type=int, help="scope bound T (default: lower bound)")
    p.add_argument("--objective", choices=["scope", "scope_then_sum"], default="scope")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**8, help="mark attempts")
    p.add_argument("--no-model", action="store_true", help="uniform sampling only")
    p.add_argument("--threads", type=int, default=1, help="parallel restarts with --no-model")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dts_search)
    p = dts.add_parser("verify", help="check a DTS file")
    p.add_argument("file")
    p.set_defaults(func=cmd_dts_verify)
    p = dts.add_parser("catalog", help="print a catalog entry")
    p.add_argument("L", type=int, nargs="?")
    p.add_argument("M", type=int, nargs="?")
    p.add_argument("--pareto", choices=["scope", "sum"], default="scope")
    p.add_argument("--verify-catalog", action="store_true", help="re-validate every embedded table")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dts_catalog)
    p = dts.add_parser("combine", help="combine two DTS files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_dts_combine)
    p = dts.add_parser("bounds", help="lower bounds on scope and sum of lengths")
    p.add_argument("L", type=int)
    p.add_argument("M", type=int)
    p.set_defaults(func=cmd_dts_bounds)

    ham = sub.add_parser("hamming", help="component code tools").add_subparsers(dest="ham_cmd", required=True)
    p = ham.add_parser("find-perm", help="smallest systematizing affine permutation")
    p.add_argument("r", type=int)
    p.set_defaults(func=cmd_hamming_find_perm)
    p = ham.add_parser("verify-tables", help="check the built-in permutation tables")
    p.set_defaults(func=cmd_hamming_verify_tables)
    p = ham.add_parser("dump-columns", help="print parity-check columns as a bit matrix")
    p.add_argument("r", type=int)
    p.add_argument("--shortening", type=int, default=0)
    p.add_argument("--perm", choices=["affine", "boolean", "natural"], default="affine")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--start", type=int, help="first column (default: last r)")
    p.add_argument("--count", type=int)
    p.set_defaults(func=cmd_hamming_dump_columns)

    gap = sub.add_parser("gap", help="channel parameter conversion").add_subparsers(dest="gap_cmd", required=True)
    for name, func, what in (
        ("to-epsilon", cmd_gap_to_epsilon, "gap in dB"),
        ("to-db", cmd_gap_to_db, "crossover probability"),
    ):
        p = gap.add_parser(name)
        p.add_argument("value", type=float, help=what)
        p.add_argument("--rate", type=float)
        p.add_argument("--S", type=int)
        p.add_argument("--r", type=int)
        p.add_argument("--F", type=int)
        p.add_argument("--W", type=int)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hosc: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
