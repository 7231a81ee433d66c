"""Command line driver: generate graphs, replay scripts, verify, benchmark.

Subcommands:

    gen      sample a random digraph and print its edge list
    run      replay a command script against one oracle
    verify   replay against the oracle and BFS/Dijkstra side by side
    bench    time the asymptotic-win paths against naive baselines
    serve    expose sessions over HTTP

Every subcommand takes a mandatory 64-bit --seed; one seeded generator
drives all sampling, so identical invocations produce identical output
(benchmark wall times excepted).
"""

import argparse
import csv
import io
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import GenericityFailure, GraphError, ScriptError
from .field import Field, sample_prime
from .frobenius import (
    build_power_oracle,
    compute_fnf,
    naive_iterates,
    query_submatrix_powers,
)
from .graphenc import format_edge_list, parse_edge_list, random_digraph
from .harness import (
    ORACLE_KINDS,
    TINY_FIELD_PRIME,
    BruteForceSession,
    OracleSession,
    ReplayError,
    apply_command,
    parse_script,
    replay_records,
)
from .matrix import Matrix, mat_mul
from .oracles import MultiFailureDSO, bfs_oracle
from .updates import PerturbationContext, perturbed_iterates

MAX_SEED = 2**64 - 1

BENCH_COLUMNS = ("operation", "n", "h", "f", "seconds", "agreement")


def _seed_arg(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}")
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _density_arg(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("density lies in [0, 1]")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fnfdso",
        description="Distance oracles for digraphs over random finite fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a digraph, print its edge list")
    gen.add_argument("--seed", type=_seed_arg, required=True)
    gen.add_argument("--n", type=_positive_int, required=True)
    gen.add_argument("--density", type=_density_arg, required=True)
    gen.add_argument("--weight-bound", type=_positive_int, default=1)
    gen.add_argument("--out", help="output file (default stdout)")

    def session_args(cmd):
        cmd.add_argument("--seed", type=_seed_arg, required=True)
        cmd.add_argument("--graph", required=True, help="edge-list file")
        cmd.add_argument("--script", required=True, help="command script file")
        cmd.add_argument("--oracle", choices=ORACLE_KINDS, required=True)
        cmd.add_argument("--vertex-failures", action="store_true",
                         help="split vertices so F batches may name vertices")
        cmd.add_argument("--c", type=_positive_int, default=1,
                         help="field size exponent bump")
        cmd.add_argument("--gamma", type=float, default=4.0,
                         help="hitting-set oversampling factor")
        cmd.add_argument("--alpha", type=float, default=0.5,
                         help="dyn-edge phase-length exponent")
        cmd.add_argument("--out", help="output file (default stdout)")

    run = sub.add_parser("run", help="replay a script, print query results")
    session_args(run)
    run.add_argument("--format", choices=("text", "json", "csv"), default="text")
    run.add_argument("--threads", type=_positive_int, default=1,
                     help="answer consecutive queries concurrently")
    run.add_argument("--server", help="base URL of a serve instance to run against")

    verify = sub.add_parser("verify", help="compare a replay against brute force")
    session_args(verify)
    verify.add_argument("--tiny-field", action="store_true",
                        help=f"force the {TINY_FIELD_PRIME}-element field to "
                             "provoke visible mismatches")

    bench = sub.add_parser("bench", help="time library paths against baselines")
    bench.add_argument("--seed", type=_seed_arg, required=True)
    bench.add_argument("--rank1-n", type=_positive_int, default=512)
    bench.add_argument("--powers-n", type=_positive_int, default=256)
    bench.add_argument("--dso-n", type=_positive_int, default=100)
    bench.add_argument("--dso-f", type=_positive_int, default=4)
    bench.add_argument("--pairs", type=_positive_int, default=60,
                       help="query pairs sampled for the dso agreement check")
    bench.add_argument("--out", help="output file (default stdout)")

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    return parser


def _emit(out, text):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(message):
    print(f"error: {message}", file=sys.stderr)
    return 1


def cmd_gen(args):
    rng = random.Random(args.seed)
    graph = random_digraph(args.n, args.density, args.weight_bound, rng)
    _emit(args.out, format_edge_list(graph))
    return 0


def _build_session(args, graph, field=None):
    return OracleSession(
        graph,
        args.oracle,
        random.Random(args.seed),
        vertex_failures=args.vertex_failures,
        c=args.c,
        gamma=args.gamma,
        alpha=args.alpha,
        field=field,
    )


def _load_inputs(args):
    graph_text = Path(args.graph).read_text()
    script_text = Path(args.script).read_text()
    graph = parse_edge_list(graph_text)
    commands = parse_script(script_text)
    return graph_text, script_text, graph, commands


def _format_records(records, fmt):
    if fmt == "json":
        return json.dumps({"queries": records}, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("index", "line", "s", "t", "distance"))
        for r in records:
            d = "INF" if r["distance"] is None else r["distance"]
            writer.writerow((r["index"], r["line"], r["s"], r["t"], d))
        return buf.getvalue()
    lines = []
    for r in records:
        d = "INF" if r["distance"] is None else r["distance"]
        lines.append(f"Q {r['s']} {r['t']} -> {d}")
    return "".join(line + "\n" for line in lines)


def _make_client(base_url):
    import httpx

    return httpx.Client(base_url=base_url, timeout=600.0)


def _run_remote(args, graph_text, script_text):
    payload = {
        "graph": graph_text,
        "oracle": args.oracle,
        "seed": args.seed,
        "vertex_failures": args.vertex_failures,
        "c": args.c,
        "gamma": args.gamma,
        "alpha": args.alpha,
    }
    with _make_client(args.server.rstrip("/")) as client:
        created = client.post("/sessions", json=payload)
        created.raise_for_status()
        sid = created.json()["session_id"]
        try:
            answered = client.post(f"/sessions/{sid}/script", json={"text": script_text})
            answered.raise_for_status()
            return answered.json()["results"]
        finally:
            client.delete(f"/sessions/{sid}")


def cmd_run(args):
    try:
        graph_text, script_text, graph, commands = _load_inputs(args)
    except (ScriptError, OSError) as exc:
        return _fail(exc)
    if args.server:
        import httpx

        try:
            records = _run_remote(args, graph_text, script_text)
        except httpx.HTTPStatusError as exc:
            detail = exc.response.json().get("detail", exc.response.text)
            return _fail(f"server: {detail}")
        except httpx.HTTPError as exc:
            return _fail(f"server: {exc}")
    else:
        pool = ThreadPoolExecutor(args.threads) if args.threads > 1 else None
        try:
            session = _build_session(args, graph)
            records = replay_records(session, commands, pool)
        except (ReplayError, GraphError, GenericityFailure) as exc:
            return _fail(exc)
        finally:
            if pool is not None:
                pool.shutdown()
    _emit(args.out, _format_records(records, args.format))
    return 0


def cmd_verify(args):
    try:
        _, _, graph, commands = _load_inputs(args)
    except (ScriptError, OSError) as exc:
        return _fail(exc)
    field = Field(TINY_FIELD_PRIME) if args.tiny_field else None
    try:
        session = _build_session(args, graph, field=field)
    except (GraphError, GenericityFailure) as exc:
        return _fail(exc)
    brute = BruteForceSession(graph, args.oracle, vertex_failures=args.vertex_failures)
    lines = [
        f"verify: oracle={args.oracle} n={graph.n} seed={args.seed} "
        f"script={args.script}"
    ]
    queries = 0
    mismatches = 0
    for index, command in enumerate(commands):
        try:
            got = apply_command(session, command)
        except (ValueError, GenericityFailure) as exc:
            return _fail(f"command {index + 1} (line {command.lineno}): {exc}")
        want = apply_command(brute, command)
        if command.kind != "query":
            continue
        queries += 1
        if got != want:
            mismatches += 1
            s, t = command.args
            lines.append(
                f"mismatch at command {index + 1} (line {command.lineno}): "
                f"Q {s + 1} {t + 1} oracle={got} reference={want} seed={args.seed}"
            )
    lines.append(f"{mismatches} mismatches / {queries} queries")
    _emit(args.out, "".join(line + "\n" for line in lines))
    return 0 if mismatches == 0 else 1


def _timed(fn, *fargs, **fkw):
    start = time.perf_counter()
    result = fn(*fargs, **fkw)
    return result, time.perf_counter() - start


def _bench_rank1(args, rng, rows):
    n = args.rank1_n
    field = Field(sample_prime(n, 1, rng))
    a = Matrix.random(field, n, n, rng)
    u = field.rand_vector(rng, n)
    col = field.rand_vector(rng, n)
    row = field.rand_vector(rng, n)
    delta = naive_iterates(a, u, n)
    alpha = naive_iterates(a, col, n)
    p = field.p
    updated = a.copy()
    for i in range(n):
        ci = col[i]
        if ci:
            arow = updated.data[i]
            updated.data[i] = [(x + ci * r) % p for x, r in zip(arow, row)]
    ctx = PerturbationContext(field, delta, alpha, row)
    fast, t_fast = _timed(perturbed_iterates, ctx)
    naive, t_naive = _timed(naive_iterates, updated, u, n)
    agree = fast == naive
    rows.append(("perturbed_iterates", n, "", "", f"{t_fast:.6f}", agree))
    rows.append(("naive_iterates", n, "", "", f"{t_naive:.6f}", agree))
    return agree


def _bench_powers(args, rng, rows):
    n = args.powers_n
    h = 1
    while h * h < n:
        h += 1
    field = Field(sample_prime(n, 1, rng))
    a = Matrix.random(field, n, n, rng)
    form = compute_fnf(a, rng)
    oracle = build_power_oracle(a, form)
    everything = list(range(n))
    fast, t_fast = _timed(query_submatrix_powers, oracle, everything, everything, h)

    def naive():
        out = [a]
        for _ in range(h - 1):
            out.append(mat_mul(out[-1], a))
        return out

    slow, t_naive = _timed(naive)
    agree = all(f == s for f, s in zip(fast, slow))
    rows.append(("submatrix_powers", n, h, "", f"{t_fast:.6f}", agree))
    rows.append(("naive_powering", n, h, "", f"{t_naive:.6f}", agree))
    return agree


def _bench_dso(args, rng, rows):
    n = args.dso_n
    graph = random_digraph(n, 0.12, 1, rng)
    oracle = MultiFailureDSO(graph, rng)
    edges = graph.sorted_edges()
    f = min(args.dso_f, len(edges))
    batch = rng.sample(edges, f) if f else []
    _, t_update = _timed(oracle.update, batch)

    def rebuild():
        survivor = graph.copy()
        for u, v in batch:
            survivor.remove_edge(u, v)
        return MultiFailureDSO(survivor, rng)

    fresh, t_rebuild = _timed(rebuild)
    agree = True
    for _ in range(args.pairs):
        s = rng.randrange(n)
        t = rng.randrange(n)
        want = bfs_oracle(graph, batch, s, t)
        if oracle.query(s, t) != want or fresh.query(s, t) != want:
            agree = False
    h = oracle.state.h
    rows.append(("dso_update", n, h, f, f"{t_update:.6f}", agree))
    rows.append(("dso_rebuild", n, h, f, f"{t_rebuild:.6f}", agree))
    return agree


def bench_rows(args):
    """All benchmark rows plus the and-fold of their agreement flags."""
    rng = random.Random(args.seed)
    rows = []
    ok = _bench_rank1(args, rng, rows)
    ok = _bench_powers(args, rng, rows) and ok
    ok = _bench_dso(args, rng, rows) and ok
    return rows, ok


def cmd_bench(args):
    rows, ok = bench_rows(args)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow(
            tuple(str(x).lower() if isinstance(x, bool) else x for x in row)
        )
    _emit(args.out, buf.getvalue())
    return 0 if ok else 1


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "run": cmd_run,
        "verify": cmd_verify,
        "bench": cmd_bench,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
