"""Command-line entry point.

Every subcommand prints a JSON document (default), CSV or plain text.
Indices in JSON output are 1-based.  Exit status: 0 success, 2 a check
failed or disagreed with a published value, 3 a resource limit was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from math import comb

from . import fan as fg
from . import gossip as gb
from . import groups as tg
from .detours import DetourGraph, kleene_compatible, realize, transpose_detours
from .pq import pq_example_check
from .trop import (
    TropMatrix,
    build_W,
    core_witness,
    format_scalar,
    is_irredundant,
    is_metric,
    kleene_star,
    metric_as_calls,
    parse_matrix_file,
    symmetric_core,
)

EXIT_OK, EXIT_MISMATCH, EXIT_RESOURCE = 0, 2, 3

# published values the reproduce-paper run is compared against
MONOID_SIZES = {1: (1, 0), 2: (2, 1), 3: (11, 3), 4: (189, 4), 5: (9152, 6), 6: (1_092_473, 10),
          7: (293_656_554, 13)}
IRREDUNDANT_LENGTHS = {1: 0, 2: 1, 3: 3, 4: 5, 5: 8, 6: 12, 7: 16}
SPANS = {2: 1, 3: 7, 4: 289}
ORBITS = {2: {1: 1}, 3: {1: 1, 6: 1}, 4: {1: 1, 12: 6, 24: 9}}
TRANSPOSE_CLASSES_4 = 11
FVECTOR_4 = (43, 327, 1042, 1560, 1092, 289)

log = logging.getLogger("lossygossip")


# -- output ----------------------------------------------------------------------

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix.rstrip("."), obj


def render(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if isinstance(obj, dict) and "csv" in obj:
            return obj["csv"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in _flatten(obj):
            w.writerow([k, json.dumps(v) if isinstance(v, (list, dict)) else v])
        return buf.getvalue()
    if isinstance(obj, dict) and "text" in obj:
        return obj["text"]
    return "".join(f"{k}: {v}\n" for k, v in _flatten(obj))


def emit(obj, args) -> None:
    out = render(obj, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


# -- subcommands ----------------------------------------------------------------

def _edges(text: str) -> list:
    out = []
    for tok in text.split(","):
        a, b = tok.strip().split("-")
        out.append((int(a) - 1, int(b) - 1))
    return out


def cmd_tropmul(args):
    ms = [parse_matrix_file(p) for p in args.matrices]
    prod = ms[0]
    for m in ms[1:]:
        prod = prod @ m
    return {"product": prod.to_json(), "text": prod.to_text()}, EXIT_OK


def cmd_kleene(args):
    star = kleene_star(parse_matrix_file(args.matrix))
    return {"star": star.to_json(), "is_metric": is_metric(star), "text": star.to_text()}, EXIT_OK


def cmd_metric_check(args):
    m = parse_matrix_file(args.matrix)
    res = {"is_metric": is_metric(m),
           "symmetric_core": sorted([i + 1, j + 1] for i, j in symmetric_core(m))}
    if res["is_metric"] and args.as_calls:
        res["calls"] = metric_as_calls(m).to_json()
    return res, EXIT_OK


def cmd_core_witness(args):
    seq = core_witness(args.n, _edges(args.edges))
    prod = seq.product()
    return {"sequence": seq.to_json(), "product": prod.to_json(),
            "symmetric_core": sorted([i + 1, j + 1] for i, j in symmetric_core(prod))}, EXIT_OK


def cmd_irredundant(args):
    res = {"n": args.n}
    if args.build_w:
        w = build_W(args.n)
        res["W"] = w.to_json()
        res["W_length"] = len(w)
        res["W_irredundant"] = is_irredundant(w)
    length, word = gb.max_irredundant_length(args.n, True)
    res["max_length"] = length
    res["witness"] = [[k + 1, l + 1] for k, l in word]
    res["bound_C(n,2)"] = comb(args.n, 2)
    return res, EXIT_OK


def cmd_gossip_enum(args):
    try:
        rep = gb.enumerate_monoid(args.n, args.memory_budget)
    except gb.MemoryBudgetExceeded as exc:
        part = exc.partial
        obj = part.to_json() if part is not None else {"n": args.n}
        obj["error"] = str(exc)
        return obj, EXIT_RESOURCE
    obj = rep.to_json()
    obj["csv"] = "n,count,max_length,histogram...\n" + rep.csv_row() + "\n"
    if args.all_zero_length:
        obj["all_zero_length"] = gb.element_length(gb.full_state(args.n), args.n)
    return obj, EXIT_OK


def cmd_pessimal(args):
    calls = gb.construct_pessimal(args.n)
    res = {"n": args.n, "construction": [[k + 1, l + 1] for k, l in calls],
           "length": len(calls), "verified": gb.verify_pessimal(calls, args.n),
           "bound_C(n,2)": comb(args.n, 2)}
    if args.exact:
        res["longest_chain"] = gb.longest_pessimal_chain(args.n)
    if args.attempts:
        res["random_search"] = gb.random_pessimal_search(args.n, args.attempts, args.seed)
    ok = res["verified"] and res["length"] == comb(args.n, 2)
    return res, EXIT_OK if ok else EXIT_MISMATCH


def _census(args):
    return fg.enumerate_spans(args.n, progress=_progress(args))


def _progress(args):
    if not args.verbose:
        return None

    def cb(done, total):
        log.info("schemes %d/%d", done, total)

    return cb


def cmd_spans(args):
    c = _census(args)
    return {"n": args.n, "spans": len(c.spans), "stats": c.stats}, EXIT_OK


def cmd_orbits(args):
    c = _census(args)
    orbits = fg.orbit_classify(c.spans, args.n, with_transpose=args.transpose)
    dist = fg.orbit_size_distribution(orbits)
    return {"n": args.n, "transpose": args.transpose, "spans": len(c.spans), "orbits": len(orbits),
            "size_distribution": {str(k): v for k, v in sorted(dist.items())}}, EXIT_OK


def _fan(args):
    return fg.gossip_fan(args.n, progress=_progress(args))


def cmd_fan(args):
    f = _fan(args)
    res = f.to_json()
    if args.emit:
        with open(args.emit, "w") as fh:
            json.dump(res, fh, indent=2, sort_keys=True)
            fh.write("\n")
    del res["cones"]
    return res, EXIT_OK if f.report.is_fan else EXIT_MISMATCH


def cmd_fvector(args):
    f = _fan(args)
    return {"n": args.n, "f_vector": list(f.f_vector), "is_fan": f.report.is_fan}, EXIT_OK


def cmd_closure_check(args):
    f = _fan(args)
    rep = fg.closure_sample_check(f, args.trials, args.seed)
    return rep.to_json(), EXIT_OK if not rep.failures else EXIT_MISMATCH


def cmd_pq_check(args):
    rep = pq_example_check(args.seed)
    return rep.to_json(), EXIT_OK if rep.ok else EXIT_MISMATCH


def cmd_tdet(args):
    m = parse_matrix_file(args.matrix)
    d = tg.tdet(m)
    return {"value": format_scalar(d.value), "multiplicity": d.multiplicity,
            "minimizers": [[p + 1 for p in perm] for perm in d.minimizers],
            "in_trop_sl": tg.in_trop_sl(m)}, EXIT_OK


def cmd_sl_check(args):
    rep = tg.sl_closure_check(args.n, args.trials, args.seed)
    return rep.to_json(), EXIT_OK if not rep.failures else EXIT_MISMATCH


def cmd_o2_check(args):
    return {"cone": tg.o2_classify(parse_matrix_file(args.matrix))}, EXIT_OK


def cmd_o3_check(args):
    m = parse_matrix_file(args.matrix)
    res = tg.o3_prevariety_check(m)
    if res["satisfied"] and m.is_nonnegative:
        cl = tg.o3_nonneg_classify(m)
        for key in ("permutation", "relabelling"):
            if cl.get(key) is not None:
                cl[key] = [p + 1 for p in cl[key]]
        res["classification"] = cl
    return res, EXIT_OK


def cmd_realize(args):
    with open(args.graph) as fh:
        g = DetourGraph.from_json(json.load(fh))
    if args.transpose:
        g = transpose_detours(g)
    m = realize(g, strict=not args.closure)
    return {"matrix": m.to_json(), "kleene_compatible": kleene_compatible(g, strict=not args.closure),
            "text": m.to_text()}, EXIT_OK


# -- reproduce-paper ------------------------------------------------------------

class Report:
    def __init__(self):
        self.rows = []

    def check(self, name, expected, computed):
        ok = expected == computed
        self.rows.append({"check": name, "expected": expected, "computed": computed, "pass": ok})
        log.info("%s %s", "PASS" if ok else "FAIL", name)
        return ok

    @property
    def ok(self) -> bool:
        return all(r["pass"] for r in self.rows)


def reproduce_paper(quick: bool = False, include_n7: bool = False, seed: int = 0,
                    trials: int = 10_000, memory_budget: int | None = None) -> dict:
    rep = Report()
    ex = TropMatrix([[0, 90, 140], [90, 0, 60], [140, 60, 0]]) @ \
        TropMatrix([[0, 630, 640], [630, 0, 20], [640, 20, 0]])
    rep.check("car-bike product", [["0", "90", "110"], ["90", "0", "20"], ["140", "20", "0"]],
              ex.to_json()["entries"])

    top = 5 if quick else 6
    ns = list(range(1, top + 1)) + ([7] if include_n7 else [])
    aborted = None
    for n in ns:
        try:
            r = gb.enumerate_monoid(n, memory_budget)
        except gb.MemoryBudgetExceeded as exc:
            aborted = str(exc)
            break
        rep.check(f"ordinary gossip monoid n={n}", list(MONOID_SIZES[n]), [r.total_count, r.max_length])
    for n in range(2, top + 1):
        expected = {2: 1, 3: 3}.get(n, 2 * n - 4)
        rep.check(f"all-zero length n={n}", expected, gb.element_length(gb.full_state(n), n))
    for n in range(1, top + 1):
        rep.check(f"irredundant length n={n}", IRREDUNDANT_LENGTHS[n], gb.max_irredundant_length(n))
    for n in range(2, 9):
        calls = gb.construct_pessimal(n)
        rep.check(f"pessimal construction n={n}", [comb(n, 2), True],
                  [len(calls), gb.verify_pessimal(calls, n)])
    for n in range(2, 6):
        rep.check(f"longest pessimal chain n={n}", comb(n, 2), gb.longest_pessimal_chain(n))
    for n in range(1, 7):
        w = build_W(n)
        rep.check(f"W_n irredundant n={n}", [comb(n + 1, 3), True], [len(w), is_irredundant(w)])

    fan_ns = (2, 3) if quick else (2, 3, 4)
    for n in fan_ns:
        f = fg.gossip_fan(n)
        spans = f.census.spans
        rep.check(f"spans n={n}", SPANS[n], len(spans))
        dist = fg.orbit_size_distribution(fg.orbit_classify(spans, n))
        rep.check(f"orbit sizes n={n}", {str(k): v for k, v in ORBITS[n].items()},
                  {str(k): v for k, v in sorted(dist.items())})
        rep.check(f"fan n={n}: is fan, pure, connected, metric cone present",
                  [True, True, True, True],
                  [f.report.is_fan, f.is_pure, f.codim1_connected, f.metric_cone_index is not None])
        if n == 4:
            rep.check("transpose classes n=4", TRANSPOSE_CLASSES_4,
                      len(fg.orbit_classify(spans, 4, with_transpose=True)))
            rep.check("f-vector n=4", list(FVECTOR_4), list(f.f_vector))
        if n >= 3:
            cr = fg.closure_sample_check(f, trials, seed)
            rep.check(f"closure sampling n={n}", 0, len(cr.failures))

    pq = pq_example_check(seed)
    rep.check("P/Q spans equal, intersection dim, non-convexity witness",
              [True, 10, True], [pq.spans_equal, pq.intersection_dim, pq.witness is not None])
    out = {"quick": quick, "include_n7": include_n7, "seed": seed, "trials": trials,
           "checks": rep.rows, "all_pass": rep.ok}
    if aborted:
        out["resource_abort"] = aborted
    return out


def cmd_reproduce_paper(args):
    res = reproduce_paper(args.quick, args.include_n7, args.seed, args.trials, args.memory_budget)
    lines = [f"{'PASS' if r['pass'] else 'FAIL'}  {r['check']}: expected {r['expected']}, "
             f"computed {r['computed']}" for r in res["checks"]]
    res["text"] = "\n".join(lines) + "\n"
    if "resource_abort" in res:
        code = EXIT_RESOURCE
    else:
        code = EXIT_OK if res["all_pass"] else EXIT_MISMATCH
    return res, code


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="lossygossip", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("tropmul", cmd_tropmul, "tropical product of matrix files")
    sp.add_argument("matrices", nargs="+")
    sp = add("kleene", cmd_kleene, "Kleene star (shortest-path closure)")
    sp.add_argument("matrix")
    sp = add("metric-check", cmd_metric_check, "metric-cone membership and symmetric core")
    sp.add_argument("matrix")
    sp.add_argument("--as-calls", action="store_true", help="also write a metric as edge calls")
    sp = add("core-witness", cmd_core_witness, "product whose symmetric core is a given graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--edges", required=True, help="e.g. 1-2,2-3")
    sp = add("irredundant", cmd_irredundant, "longest irredundant product of calls C_kl(0)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--build-w", action="store_true", help="also build the lower-bound product")
    sp = add("gossip-enum", cmd_gossip_enum, "enumerate the ordinary gossip monoid")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--memory-budget", type=int, help="bytes; abort with status 3 beyond it")
    sp.add_argument("--all-zero-length", action="store_true")
    sp = add("pessimal", cmd_pessimal, "pessimal call chains")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--exact", action="store_true", help="longest chain by exhaustive search")
    sp.add_argument("--attempts", type=int, default=0, help="random walks to sample")
    sp.add_argument("--seed", type=int, default=0)
    for name, func, help_ in (("spans", cmd_spans, "count spans of full-dimensional cones"),
                              ("orbits", cmd_orbits, "orbits of spans under relabelling"),
                              ("fan", cmd_fan, "maximal cones and fan verification"),
                              ("fvector", cmd_fvector, "f-vector of the fan"),
                              ("closure-check", cmd_closure_check, "sampled closure under calls")):
        sp = add(name, func, help_)
        sp.add_argument("--n", type=int, required=True)
        if name == "orbits":
            sp.add_argument("--transpose", action="store_true", help="include transposition")
        if name == "fan":
            sp.add_argument("--emit", help="write all cones as JSON")
        if name == "closure-check":
            sp.add_argument("--trials", type=int, default=10_000)
            sp.add_argument("--seed", type=int, default=0)
    sp = add("pq-check", cmd_pq_check, "two overlapping cones of G_5 with non-convex union")
    sp.add_argument("--seed", type=int, default=0)
    sp = add("tdet", cmd_tdet, "tropical determinant")
    sp.add_argument("matrix")
    sp = add("sl-check", cmd_sl_check, "sampled closure of Trop(SL_n)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp = add("o2-check", cmd_o2_check, "classify a 2x2 matrix against Trop(O_2)")
    sp.add_argument("matrix")
    sp = add("o3-check", cmd_o3_check, "Trop(O_3) prevariety residues")
    sp.add_argument("matrix", nargs="?")
    sp.add_argument("--matrix", dest="matrix_opt")
    sp = add("realize", cmd_realize, "matrix realised by a graph with detours")
    sp.add_argument("graph", help="graph JSON file")
    sp.add_argument("--transpose", action="store_true", help="reverse every detour first")
    sp.add_argument("--closure", action="store_true", help="allow detours as long as shortest paths")
    sp = add("reproduce-paper", cmd_reproduce_paper, "recompute all published values")
    sp.add_argument("--quick", action="store_true", help="skip n=6 monoid rows and the n=4 fan")
    sp.add_argument("--include-n7", action="store_true", help="also enumerate n=7 (large)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--memory-budget", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if getattr(args, "matrix_opt", None):
        args.matrix = args.matrix_opt
    if args.command == "o3-check" and not args.matrix:
        build_parser().error("o3-check needs a matrix file")
    try:
        obj, code = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    if isinstance(obj, dict):
        keep = {"csv": ("csv",), "text": ("text",)}.get(args.format, ())
        if args.format in keep and args.format not in obj:
            keep = ()
        obj = {k: v for k, v in obj.items() if k not in ("text", "csv") or k in keep}
    emit(obj, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
