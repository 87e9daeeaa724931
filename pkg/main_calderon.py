import os
import sys
import argparse
from typing import Dict, List, Optional

# Add repo dir to sys.path to allow imports when run from elsewhere
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from cli.commands import discrete_command, lab_command, normal_command, symbol_command
from cli.config import SUBCOMMANDS, SUITE_NAMES, RunConfig, load_config, merge_run
from cli.reports import build_id
from cli.suites import verify_all
from linalg_core.errors import CalderonError, SchemaError
from normal_family.geometries import CATALOGUE
from utils.logger import log_section, setup_logger, update_context

# --- Configuration ---
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
NEEDS_OPERATOR = ("symbol", "normal", "discrete")
logger = setup_logger("Calderon")


def parse_xi(values: Optional[List[str]]) -> Optional[List[List[float]]]:
    """Each --xi is one covector, components separated by commas."""
    if not values:
        return None
    try:
        return [[float(v) for v in item.split(",")] for item in values]
    except ValueError as e:
        raise SchemaError("run.xi", f"not a comma-separated list of numbers: {e}") from e


def parse_tolerances(values: Optional[List[str]]) -> Optional[Dict[str, float]]:
    """--tol-override NAME=VALUE, repeatable."""
    if not values:
        return None
    out = {}
    for item in values:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise SchemaError("run.tolerances", f"expected NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError as e:
            raise SchemaError(f"run.tolerances.{name.strip()}", f"not a number: {value!r}") from e
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Calderón projectors of φ-elliptic model operators")
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="What to run")
    parser.add_argument("--config", default=None, help="Operator config (JSON); its 'run' block sets defaults")
    parser.add_argument("--geometry", choices=sorted(CATALOGUE), default=None,
                        help="Catalogue operator to use when no --config is given")
    parser.add_argument("--out", default=None, help="Output directory for CSVs and matrices")
    parser.add_argument("--seed", type=int, default=None, help="Seed of every randomized suite")
    parser.add_argument("--suite", action="append", choices=SUITE_NAMES, default=None,
                        help="verify only: restrict to this suite (repeatable)")
    parser.add_argument("--ns", type=int, nargs="+", default=None, help="Grid sizes in s (refinement sequence)")
    parser.add_argument("--nz", type=int, nargs="+", default=None, help="Grid sizes in z, paired with --ns")
    parser.add_argument("--S", type=float, default=None, help="Truncation of the singular end, s <= S")
    parser.add_argument("--tau-min", type=float, default=None, help="Smallest τ of the normal sweep")
    parser.add_argument("--tau-max", type=float, default=None, help="Largest τ of the normal sweep")
    parser.add_argument("--tau-steps", type=int, default=None, help="Number of τ values")
    parser.add_argument("--probe-tau", type=float, default=None, help="τ of the discrete normal probe")
    parser.add_argument("--xi", action="append", default=None,
                        help="Tangential covector, comma-separated components (repeatable)")
    parser.add_argument("--bump-height", type=float, default=None, help="Height of the minus-side bump potential")
    parser.add_argument("--tol-override", action="append", default=None, help="NAME=VALUE suite threshold")
    parser.add_argument("--no-probes", action="store_true", help="verify only: skip the 2-D discrete probes")
    return parser


def resolve(args: argparse.Namespace):
    if args.config:
        run, op = load_config(args.config)
    else:
        run, op = RunConfig(), None
        if args.geometry:
            op = CATALOGUE[args.geometry]()
    if op is None and args.subcommand in NEEDS_OPERATOR:
        raise SchemaError("config", f"'{args.subcommand}' needs --config or --geometry")
    run = merge_run(run, {
        "subcommand": args.subcommand,
        "out": args.out,
        "seed": args.seed,
        "suites": args.suite,
        "ns": args.ns,
        "nz": args.nz,
        "S": args.S,
        "tau_min": args.tau_min,
        "tau_max": args.tau_max,
        "tau_steps": args.tau_steps,
        "probe_tau": args.probe_tau,
        "xi": parse_xi(args.xi),
        "bump_height": args.bump_height,
        "tolerances": parse_tolerances(args.tol_override),
        "probes": False if args.no_probes else None,
    })
    return run, op


def dispatch(run: RunConfig, op) -> int:
    if run.subcommand == "symbol":
        return symbol_command(op, run)
    if run.subcommand == "normal":
        return normal_command(op, run)
    if run.subcommand == "lab":
        return lab_command(run)
    if run.subcommand == "discrete":
        return discrete_command(op, run)
    status, _ = verify_all(run)
    return status


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    update_context(step=args.subcommand)
    try:
        run, op = resolve(args)
        os.makedirs(run.out, exist_ok=True)
        log_section(logger, f"{run.subcommand} (seed {run.seed}, build {build_id()})")
        print(f"📂 Output Directory: {run.out}")
        status = dispatch(run, op)
    except ValueError as e:
        # SchemaError, PointFibre, GeometryMismatch and bad grids
        logger.error(f"Input error: {e}")
        return EXIT_INPUT
    except CalderonError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_FAILED

    if status:
        logger.error(f"{run.subcommand} finished with failures.")
    else:
        logger.info(f"{run.subcommand} finished.")
    return status


if __name__ == "__main__":
    sys.exit(main())
