"""Command line interface for qform-tk.

Every command prints plain text to standard output; the counting and
packing commands can also write CSV (and JSON) files. Exit codes:

- 0: success (and agreement, for the verification commands)
- 1: usage error or invalid input
- 2: a verification found a mismatch

Examples:

    qform-tk decide --form 1,0,5 --n 21
    qform-tk verify-tables --dmin -100 --dmax 100 --nmax 2000 --jobs 8
    qform-tk find-dl --form 1,0,5 --A 1 --B 1 --mode strict
    qform-tk count-primes --form 1,0,1 --A 1 --B 1 --N 100
    qform-tk apollonian form --quadruple 2,2,3,-1 --index 0
    qform-tk apollonian bfs --quadruple=-1,2,2,3 --bound 100

A value that starts with a minus sign has to be glued to its flag with
`=`, otherwise argparse takes it for an option.

The older spellings `--route thm2`, `--route thm3` and `check-lemma31`
still work and mean `tables`, `residues` and `check-square-split`.
"""
import argparse
import logging
import sys

from qform_tk import __version__
from qform_tk import admissible_tools as admissible
from qform_tk import apollonian_tools as apollonian
from qform_tk import form_tools as forms
from qform_tk import oracle_tools as oracle
from qform_tk import prime_count_tools as counting
from qform_tk import table_tools as tables

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2

ROUTES = ("tables", "residues", "oracle", "all")

# older route names, kept as aliases
ROUTE_ALIASES = {"thm2": "tables", "thm3": "residues"}

log_levels = {0: logging.WARNING, 1: logging.INFO}


class UsageError(Exception):
    """Raised for invalid flag combinations found after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_form(text: str) -> forms.QuadraticForm:
    """Parses and validates a form given as a,b,c."""
    try:
        f = forms.QuadraticForm.from_string(text)
        forms.check_form(f)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err))
    return f


def parse_quadruple(text: str) -> tuple:
    try:
        q = tuple(int(piece) for piece in text.split(","))
    except ValueError:
        msg = f"curvatures must be integers; got '{text}'"
        raise argparse.ArgumentTypeError(msg)
    if not apollonian.is_descartes(q):
        msg = f"{text} is not a Descartes quadruple"
        raise argparse.ArgumentTypeError(msg)
    return q


def parse_checkpoints(text: str) -> list:
    try:
        return [int(piece) for piece in text.split(",")]
    except ValueError:
        msg = f"checkpoints must be integers; got '{text}'"
        raise argparse.ArgumentTypeError(msg)


def _yes_no(value: bool) -> str:
    return "true" if value else "false"


def _add_shift_arguments(parser, with_n: bool = True) -> None:
    parser.add_argument("--form", type=parse_form, required=True)
    parser.add_argument("--A", type=int, required=True)
    parser.add_argument("--B", type=int, default=1)
    if with_n:
        parser.add_argument("--N", type=int, required=True)
    parser.add_argument("--mod", type=int, dest="mbar")
    parser.add_argument("--res", type=int, dest="ell")


def _shift_config(args) -> admissible.ShiftConfig:
    try:
        cfg = admissible.ShiftConfig(args.A, args.B, args.ell, args.mbar)
        cfg.check_discriminant(args.form.discriminant)
    except ValueError as err:
        raise UsageError(str(err))
    return cfg


def _print_count_report(report, args) -> None:
    print(f"count: {report.count}")
    for point in report.checkpoints:
        print(f"N={point.N} count={point.count} normalized={point.normalized}")
    if getattr(args, "csv", None):
        report.write_csv(args.csv)
    if getattr(args, "json", None):
        report.write_json(args.json)


def run_decide(args) -> int:
    f, n = args.form, args.n
    route = ROUTE_ALIASES.get(args.route, args.route)
    routes = ROUTES[:3] if route == "all" else (route,)
    if n == 0:
        for route in routes:
            print(f"{route}: false (n=0)")
        return EXIT_OK
    negative_definite_target = f.discriminant < 0 and n < 0
    for route in routes:
        if route == "tables":
            answer = tables.genus_represents(n, f, args.legacy)
            print(f"tables: {_yes_no(answer)}")
            if negative_definite_target:
                print("  n < 0 and f is positive definite")
                continue
            g = forms.normalize_for_tables(f)
            print(f"  normalized form: {g}")
            for entry in tables.table_certificate(n, g, args.legacy):
                print(f"  {entry.describe()}")
        elif route == "residues":
            answer = tables.genus_represents_by_residues(n, f, args.legacy)
            print(f"residues: {_yes_no(answer)}")
            if negative_definite_target:
                continue
            g = forms.normalize_for_tables(f)
            dd = tables.discriminant_data(g.discriminant, args.legacy)
            td = tables.decompose(n, dd)
            try:
                Q = tables.residue_modulus(dd, td)
                residues = tables.admissible_residues(dd, td, g)
            except tables.InadmissibleError as err:
                print(f"  d={td.d} m={td.m}: {err}")
                continue
            print(f"  d={td.d} m={td.m} Q={Q} m mod Q={td.m % Q}")
            print(f"  admissible L: {residues}")
        else:
            answer = oracle.genus_represents_oracle(f, n)
            print(f"oracle: {_yes_no(answer)}")
    return EXIT_OK


def run_verify_tables(args) -> int:
    if args.dmin > args.dmax:
        raise UsageError(f"--dmin {args.dmin} exceeds --dmax {args.dmax}")
    if args.nmax < 1 or args.jobs < 1:
        raise UsageError("--nmax and --jobs must be positive")
    report = oracle.verify_tables(
        range(args.dmin, args.dmax + 1),
        range(-args.nmax, args.nmax + 1),
        report_sink=args.out,
        jobs=args.jobs,
        legacy=args.legacy,
    )
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_MISMATCH


def run_find_dl(args) -> int:
    cfg = _shift_config(args)
    pair = admissible.find_admissible_pair(args.form, cfg, args.mode)
    if pair is None:
        tag = admissible.classify_exception(args.form, cfg, args.mode)
        print(f"exception: {tag}")
        return EXIT_OK
    print(f"d={pair.d} L={pair.L} Q={pair.Q}")
    for row in pair.certificate:
        print(f"  {row.describe()}")
    return EXIT_OK


def run_exhaust_pairs(args) -> int:
    report = admissible.exhaust_pairs(
        args.bound, args.amax, args.bmax, jobs=args.jobs
    )
    print(report.summary())
    for mismatch in report.mismatches:
        print("mismatch " + " ".join(str(item) for item in mismatch))
    return EXIT_OK if report.mismatch_count == 0 else EXIT_MISMATCH


def run_count_primes(args) -> int:
    cfg = _shift_config(args)
    report = counting.count_primes(
        args.form,
        cfg,
        args.N,
        level=args.level,
        primitive=not args.non_primitive,
    )
    _print_count_report(report, args)
    return EXIT_OK


def run_count_ssq(args) -> int:
    cfg = _shift_config(args)
    print(counting.count_squarefree_shifted(args.form, cfg, args.N))
    return EXIT_OK


def run_check_square_split(args) -> int:
    cfg = _shift_config(args)
    check = counting.check_square_split_bound(args.form, cfg, args.N, args.Z)
    print(f"sifted: {check.sifted}")
    print(f"squarefree: {check.squarefree}")
    print(f"square multiples: {check.square_multiples}")
    print(f"pi(|A|): {check.small_primes}")
    print(f"holds: {_yes_no(check.holds)}")
    return EXIT_OK if check.holds else EXIT_MISMATCH


def run_growth(args) -> int:
    cfg = _shift_config(args)
    report = counting.growth_report(
        args.form, cfg, args.checkpoints, level=args.level
    )
    _print_count_report(report, args)
    print(f"ratios: {report.ratios()}")
    print(f"flagged: {_yes_no(report.flagged)}")
    return EXIT_OK


def run_apollonian(args) -> int:
    q = args.quadruple
    if args.index is not None and not 0 <= args.index < 4:
        raise UsageError("--index must be 0, 1, 2 or 3")
    if args.packing_command == "bfs":
        packing = apollonian.packing_bfs(q, args.bound)
        print(f"circles: {len(packing.curvatures)}")
        print(f"curvatures: {packing.curvature_multiset()}")
        if args.csv:
            packing.write_csv(args.csv)
    elif args.packing_command == "form":
        f = apollonian.tangency_form(q, args.index)
        print(f"form: {f}")
        print(f"discriminant: {f.discriminant}")
        if args.bound is not None:
            curvatures = apollonian.tangent_curvatures_via_form(
                q, args.index, args.bound
            )
            print(f"tangent curvatures: {curvatures}")
    else:
        report = apollonian.count_tangent_primes(
            q, args.index, args.N, args.ell, args.mbar
        )
        _print_count_report(report, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="qform-tk",
        description="Genus tables, shifted primes and Apollonian forms.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for debug output",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    decide = commands.add_parser("decide", help="decide representability")
    decide.add_argument("--form", type=parse_form, required=True)
    decide.add_argument("--n", type=int, required=True)
    decide.add_argument(
        "--route", choices=ROUTES + tuple(ROUTE_ALIASES), default="all"
    )
    decide.add_argument("--legacy", action="store_true")
    decide.set_defaults(handler=run_decide)

    verify = commands.add_parser(
        "verify-tables", help="compare the tables with the oracle"
    )
    verify.add_argument("--dmin", type=int, required=True)
    verify.add_argument("--dmax", type=int, required=True)
    verify.add_argument("--nmax", type=int, required=True)
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--out", help="write a JSON report here")
    verify.add_argument("--legacy", action="store_true")
    verify.set_defaults(handler=run_verify_tables)

    find_dl = commands.add_parser("find-dl", help="search for (d, L)")
    _add_shift_arguments(find_dl, with_n=False)
    find_dl.add_argument(
        "--mode", choices=admissible.MODES, default="strict"
    )
    find_dl.set_defaults(handler=run_find_dl)

    exhaust = commands.add_parser(
        "exhaust-pairs", help="sweep (d, L) search against the classifier"
    )
    exhaust.add_argument("--bound", type=int, default=150)
    exhaust.add_argument("--amax", type=int, default=15)
    exhaust.add_argument("--bmax", type=int, default=15)
    exhaust.add_argument("--jobs", type=int, default=1)
    exhaust.set_defaults(handler=run_exhaust_pairs)

    count = commands.add_parser("count-primes", help="count shifted primes")
    _add_shift_arguments(count)
    count.add_argument("--level", choices=counting.LEVELS, default="class")
    count.add_argument("--non-primitive", action="store_true")
    count.add_argument("--csv")
    count.add_argument("--json")
    count.set_defaults(handler=run_count_primes)

    ssq = commands.add_parser("count-ssq", help="squarefree shifted count")
    _add_shift_arguments(ssq)
    ssq.set_defaults(handler=run_count_ssq)

    split = commands.add_parser(
        "check-square-split",
        aliases=["check-lemma31"],
        help="check the sifted-count bound",
    )
    _add_shift_arguments(split)
    split.add_argument("--Z", type=int, required=True)
    split.set_defaults(handler=run_check_square_split)

    growth = commands.add_parser("growth", help="normalized growth check")
    _add_shift_arguments(growth, with_n=False)
    growth.add_argument(
        "--checkpoints", type=parse_checkpoints, required=True
    )
    growth.add_argument("--level", choices=counting.LEVELS, default="class")
    growth.add_argument("--csv")
    growth.add_argument("--json")
    growth.set_defaults(handler=run_growth)

    packing = commands.add_parser("apollonian", help="Apollonian packings")
    packing_commands = packing.add_subparsers(
        dest="packing_command", required=True
    )
    bfs = packing_commands.add_parser("bfs")
    bfs.add_argument("--quadruple", type=parse_quadruple, required=True)
    bfs.add_argument("--bound", type=int, required=True)
    bfs.add_argument("--csv")
    bfs.set_defaults(handler=run_apollonian, index=None)
    form = packing_commands.add_parser("form")
    form.add_argument("--quadruple", type=parse_quadruple, required=True)
    form.add_argument("--index", type=int, required=True)
    form.add_argument("--bound", type=int)
    form.set_defaults(handler=run_apollonian)
    primes = packing_commands.add_parser("primes")
    primes.add_argument("--quadruple", type=parse_quadruple, required=True)
    primes.add_argument("--index", type=int, required=True)
    primes.add_argument("--N", type=int, required=True)
    primes.add_argument("--mod", type=int, dest="mbar")
    primes.add_argument("--res", type=int, dest="ell")
    primes.add_argument("--csv")
    primes.add_argument("--json")
    primes.set_defaults(handler=run_apollonian)
    return parser


def configure_logging(verbosity: int) -> None:
    level = log_levels.get(verbosity, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return exit_request.code
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (UsageError, ValueError) as err:
        print(f"qform-tk: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
