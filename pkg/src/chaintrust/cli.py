"""Command-line interface: run scenarios, benchmark, inspect chains, serve queries."""

from __future__ import annotations

import argparse
import sys

from .errors import ChainTrustError


def _cmd_run(args) -> int:
    from .scenario import run_config_file

    result = run_config_file(args.config, args.out, seed=args.seed)
    rows = len(result.output.rows)
    labels = ", ".join(sorted(result.networks)) or "-"
    print(f"scenario {result.config.name!r}: {rows} time-series rows ({labels})")
    print(f"wrote {args.out}/timeseries.csv, chain.txt, snapshot.json")
    return 0


def _cmd_bench(args) -> int:
    from .scenario import bench

    rates = tuple(int(r) for r in args.rates.split(","))
    rows = bench(
        tx_kind=args.tx, send_rates=rates, duration=args.duration, seed=args.seed
    )
    header = f"{'rate':>6} {'sent':>7} {'ok':>7} {'tx/s':>9} {'p50 ms':>9} {'p95 ms':>9} {'p99 ms':>9}"
    print(header)
    for row in rows:
        print(
            f"{row.rate:>6} {row.submitted:>7} {row.accepted:>7} "
            f"{row.throughput:>9.1f} {row.p50_ms:>9.2f} {row.p95_ms:>9.2f} {row.p99_ms:>9.2f}"
        )
    if args.out:
        lines = ["rate,submitted,accepted,elapsed_s,throughput,p50_ms,p95_ms,p99_ms"]
        for row in rows:
            lines.append(
                f"{row.rate},{row.submitted},{row.accepted},{row.elapsed_s!r},"
                f"{row.throughput!r},{row.p50_ms!r},{row.p95_ms!r},{row.p99_ms!r}"
            )
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_export(args) -> int:
    from .ledger import export_blocks, import_chain, validate_blocks

    blocks = import_chain(args.chain)
    ok = validate_blocks(blocks)
    txs = sum(len(b.transactions) for b in blocks)
    tip = blocks[-1].block_hash.hex() if blocks else "-"
    print(f"blocks: {len(blocks)}  transactions: {txs}")
    print(f"tip: {tip}")
    print(f"integrity: {'ok' if ok else 'FAILED'}")
    if args.out:
        export_blocks(blocks, args.out)
        print(f"wrote {args.out}")
    return 0 if ok else 1


def _cmd_serve(args) -> int:
    from .api import serve
    from .snapshot import load_snapshot

    host, _, port = args.bind.partition(":")
    state, params = load_snapshot(args.snapshot)
    print(f"serving snapshot {args.snapshot} on http://{host}:{port or 8000}")
    serve(state, params, host=host or "127.0.0.1", port=int(port or 8000))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaintrust",
        description="Supply-chain trust scoring over a simulated consortium ledger",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config, write CSV/chain/snapshot")
    p_run.add_argument("--config", required=True, help="scenario YAML file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="throughput/latency microbenchmark")
    p_bench.add_argument("--tx", choices=("trade", "produce"), default="trade")
    p_bench.add_argument("--rates", default="100,500,1000", help="comma-separated tx/s targets")
    p_bench.add_argument("--duration", type=float, default=5.0, help="seconds per rate")
    p_bench.add_argument("--seed", type=int, default=7)
    p_bench.add_argument("--out", default=None, help="also write a CSV report")
    p_bench.set_defaults(func=_cmd_bench)

    p_export = sub.add_parser("export", help="validate / re-export a chain file")
    p_export.add_argument("--chain", required=True, help="line-delimited chain file")
    p_export.add_argument("--out", default=None, help="re-export to this path")
    p_export.set_defaults(func=_cmd_export)

    p_serve = sub.add_parser("serve", help="serve the read-only query API")
    p_serve.add_argument("--snapshot", required=True, help="snapshot.json from a run")
    p_serve.add_argument("--bind", default="127.0.0.1:8000", help="host:port")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChainTrustError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
