"""
Flag-style front end for run.py.

    python run_cli.py greedy --graph g.txt --k 2 --mode exact
    python run_cli.py verify --generator exhaustive_small --max-nodes 3 --checks lemmas --k 2,3
    python run_cli.py gap-search --generator erdos_renyi:n=5,edge_prob=0.5 --trials 500 --oracle wide

Flags become Hydra overrides; anything after `--` is passed to Hydra untouched.
"""

import argparse
import sys

import run

COMMANDS = ("greedy", "adaptive-greedy", "oracle", "gap-search", "verify", "smsm-greedy", "smsm-verify")
GENERATORS = ("exhaustive_small", "erdos_renyi", "star", "chain", "bipartite", "empty")


def _quote(value: str) -> str:
    return "'" + str(value).replace("\\", "\\\\").replace("'", "\\'") + "'"


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{text}'")


def _generator(value: str) -> list[str]:
    """`name` or `name:key=value,key=value` -> family overrides."""
    name, _, params = value.partition(":")
    if name not in GENERATORS:
        raise argparse.ArgumentTypeError(f"unknown generator '{name}'; expected one of {', '.join(GENERATORS)}")
    overrides = [f"family={name}"]
    for item in filter(None, params.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"generator parameter '{item}' is not key=value")
        overrides.append(f"family.{key.strip()}={value.strip()}")
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run_cli.py", description="Adaptive influence maximization harness")
    parser.add_argument("command", choices=COMMANDS)
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--graph", help="edge-list file")
    source.add_argument("--generator", type=_generator, help="family name, optionally name:key=value,...")
    parser.add_argument("--instance", help="SMSM instance JSON")
    parser.add_argument("--k", type=_int_list, help="budget; a list such as 2,3 sets the k range")
    parser.add_argument("--mode", choices=("exact", "mc"))
    parser.add_argument("--samples", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--checks", help="comma separated check ids, or all / lemmas")
    parser.add_argument("--policy", choices=("optimal", "greedy"))
    parser.add_argument("--max-nodes", type=int, help="largest n of the exhaustive family")
    parser.add_argument("--max-edges", type=int, help="largest edge count of the exhaustive family")
    parser.add_argument("--max-realisation-size", type=int)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--target", type=float, help="stop the gap search once this gap is reached")
    parser.add_argument("--oracle", choices=("default", "wide"))
    parser.add_argument("--cap", type=int, help="enumeration cap on free edges")
    parser.add_argument("--no-progress", action="store_true")
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Flags before `--` go to argparse; everything after it is kept as raw Hydra overrides."""
    argv = list(sys.argv[1:] if argv is None else argv)
    extra: list[str] = []
    if "--" in argv:
        cut = argv.index("--")
        argv, extra = argv[:cut], argv[cut + 1:]
    args = build_parser().parse_args(argv)
    args.overrides = extra
    return args


def build_overrides(args: argparse.Namespace) -> list[str]:
    out = [f"command={args.command}"]
    if args.graph:
        out.append(f"graph={_quote(args.graph)}")
    if args.generator:
        out.extend(args.generator)
    if args.instance:
        out.append(f"instance={_quote(args.instance)}")
        if args.command == "smsm-verify":
            out.append("smsm=file")
    if args.k:
        out.append(f"k={args.k[0]}")
        if len(args.k) > 1:
            out.append(f"k_range=[{','.join(map(str, args.k))}]")
    if args.checks:
        out.append(f"checks=[{','.join(c.strip() for c in args.checks.split(',') if c.strip())}]")
    if args.max_nodes is not None or args.max_edges is not None:
        if args.generator and args.generator[0] != "family=exhaustive_small":
            raise SystemExit("--max-nodes/--max-edges apply to the exhaustive_small generator only")
        if not args.generator:
            out.append("family=exhaustive_small")
        if args.max_nodes is not None:
            out.append(f"family.n_max={args.max_nodes}")
        if args.max_edges is not None:
            out.append(f"family.max_edges={args.max_edges}")
    simple = {"mode": args.mode, "samples": args.samples, "workers": args.workers, "seed": args.seed,
              "format": args.format, "policy": args.policy, "max_realisation_size": args.max_realisation_size,
              "trials": args.trials, "target": args.target, "oracle": args.oracle, "enumeration_cap": args.cap}
    out.extend(f"{key}={value}" for key, value in simple.items() if value is not None)
    if args.out:
        out.append(f"out={_quote(args.out)}")
    if args.no_progress:
        out.append("progress=false")
    return out + list(args.overrides)


def main(argv: list[str] | None = None):
    overrides = build_overrides(parse_args(argv))
    sys.argv = [sys.argv[0], *overrides]
    run.main()


if __name__ == "__main__":
    main()
