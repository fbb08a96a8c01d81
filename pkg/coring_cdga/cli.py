"""
coring-cdga: build, transform and verify corings, curved DGAs, comodule and contramodule complexes.

Objects travel between subcommands as JSON on stdin/stdout ("-" is the default FILE), so that
`coring-cdga catalog matrix --n 2 | coring-cdga functor t | coring-cdga check cdga` works. Builders
write their object to stdout and their verification report to stderr; checkers write the report to
stdout. Exit status: 0 when every check passes, 1 on a failed check or a rejected input (the witness
is printed), 2 on usage, configuration or format errors.
"""
import argparse
import json
import sys
from typing import Optional, Sequence

from dotenv import find_dotenv, load_dotenv

from coring_cdga import catalog
from coring_cdga.algmod import cyclic_group_algebra, matrix_algebra, rationals, upper_triangular
from coring_cdga.cdga import check_cdga_degreewise, check_generators
from coring_cdga.comatrix import check_comatrix_description
from coring_cdga.comod import check_complex, check_dg_category, cone, connection_from_complex, is_cohesive
from coring_cdga.config import Settings
from coring_cdga.contra import check_contramodule_complex, check_divergence_assembly, \
    divergence_from_contramodule_complex, divergence_from_curved_module
from coring_cdga.coring import based, check_coring, check_coring_morphism, is_base_point
from coring_cdga.equiv import roundtrip_tu, roundtrip_ut, t_based, t_flat, u_functor
from coring_cdga.errors import ConfigError, CoringCdgaError, FormatError
from coring_cdga.exactla import Vec, scalar, vec_from_any
from coring_cdga.report import ReportBundle
from coring_cdga.serialize import based_to_dict, cdga_to_dict, complex_to_dict, coring_to_dict, read_document, \
    to_json_ready
from coring_cdga.util import configure_logging, get_logger, load_json, witness_vec

LOG = get_logger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


# argument helpers

def parse_algebra(text: str):
    """Q, M<n> (matrices), Z<n> (cyclic group algebra) or T<n> (upper triangular matrices)"""
    text = text.strip()
    try:
        if text.upper() in ("Q", "QQ"):
            return rationals()
        kind, n = text[0].upper(), int(text[1:])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"parse_algebra -- unknown algebra {text!r}", witness=text) from exc
    builders = {"M": matrix_algebra, "Z": cyclic_group_algebra, "T": upper_triangular}
    if kind not in builders or n < 1:
        raise FormatError(f"parse_algebra -- unknown algebra {text!r}", witness=text)
    return builders[kind](n)


def parse_vec(text: Optional[str], size: int) -> Optional[Vec]:
    """a dense comma-separated list "0,1/2,0" or sparse "index:value" pairs "1:1/2,3:-1" """
    if text is None:
        return None
    try:
        if ":" in text:
            pairs = [item.split(":", 1) for item in text.split(",") if item.strip()]
            return vec_from_any({int(k): scalar(v) for k, v in pairs}, size)
        return vec_from_any([item for item in text.split(",")], size)
    except ValueError as exc:
        if isinstance(exc, CoringCdgaError):
            raise
        raise FormatError(f"parse_vec -- cannot read {text!r}", witness=text) from exc


def parse_pairs(text: str) -> list:
    """"1:2,2:3" -> [("1", "2"), ("2", "3")]"""
    pairs = []
    for item in text.split(","):
        if not item.strip():
            continue
        if ":" not in item:
            raise FormatError(f"parse_pairs -- expected s:t, got {item!r}", witness=item)
        s, t = item.split(":", 1)
        pairs.append((s.strip(), t.strip()))
    return pairs


def closure(elements: Sequence, pairs: Sequence) -> list:
    """reflexive and transitive closure of a relation"""
    relation = set(pairs) | {(s, s) for s in elements}
    changed = True
    while changed:
        changed = False
        for (s, u), (u2, t) in list((p, q) for p in relation for q in relation):
            if u == u2 and (s, t) not in relation:
                relation.add((s, t))
                changed = True
    return sorted(relation, key=lambda p: (list(elements).index(p[0]), list(elements).index(p[1])))


# output

class Output:
    """where objects and reports go for one run"""

    def __init__(self, settings: Settings, path: Optional[str]):
        self.settings = settings
        self.path = path

    def render(self, report) -> str:
        if self.settings.output_format == "json":
            return report.to_json()
        return report.to_text()

    def write(self, text: str, stream=None):
        if stream is None and self.path and self.path != "-":
            with open(self.path, "w", encoding="utf8") as file:
                file.write(text + "\n")
            return
        (stream or sys.stdout).write(text + "\n")

    def report(self, report) -> int:
        self.write(self.render(report))
        return EXIT_OK if report.passed else EXIT_FAILED

    def built(self, obj: dict, report) -> int:
        """an object on stdout (or --output), its report on stderr"""
        self.write(json.dumps(to_json_ready(obj), indent=2))
        self.write(self.render(report), stream=sys.stderr)
        return EXIT_OK if report.passed else EXIT_FAILED


def _bundle(**reports) -> ReportBundle:
    bundle = ReportBundle(deterministic=True)
    for name, report in reports.items():
        bundle.add(name, report)
    return bundle


def _base_point(args, coring, from_file: Optional[Vec]) -> Optional[Vec]:
    x = parse_vec(getattr(args, "base_point", None), coring.rank)
    return x if x is not None else from_file


# subcommands

def cmd_check(args, settings: Settings, out: Output) -> int:
    data = load_json(args.file)
    what = args.what
    if what == "coring":
        coring, x = read_document(data, "coring")
        report = check_coring(coring)
        if x is not None:
            report.add("base_point", is_base_point(coring, x), witness_vec(coring.eps(x)))
        return out.report(report)
    if what == "cdga":
        cdga = read_document(data, "cdga", max_degree=settings.max_degree, check=False)
        report = check_generators(cdga)
        if report.passed:
            report.extend(check_cdga_degreewise(cdga), prefix="degreewise")
        return out.report(report)
    if what in ("comodule", "complex"):
        complex_, _ = read_document(data, "complex", check=False)
        report = check_complex(complex_)
        if args.samples and report.passed:
            report.extend(check_dg_category(complex_, samples=args.samples, seed=settings.seed), prefix="dg")
        return out.report(report)
    if what == "contramodule":
        return out.report(check_contramodule_complex(read_document(data, "contramodule_complex", check=False)))
    if what == "morphism":
        return out.report(check_coring_morphism(read_document(data, "coring_morphism")))
    raise FormatError(f"check -- unknown object {what!r}")


def cmd_functor(args, settings: Settings, out: Output) -> int:
    data = load_json(args.file)
    if args.which == "u":
        u = u_functor(read_document(data, "cdga", max_degree=settings.max_degree))
        return out.built(based_to_dict(u.based), u.report)
    coring, from_file = read_document(data, "coring")
    x = _base_point(args, coring, from_file)
    if args.which == "tflat":
        result = t_flat(coring, x, max_degree=settings.max_degree)
        return out.built(cdga_to_dict(result.cdga), result.report)
    result = t_based(based(coring, x), max_degree=settings.max_degree)
    return out.built(cdga_to_dict(result.cdga), result.report)


def cmd_roundtrip(args, settings: Settings, out: Output) -> int:
    data = load_json(args.file)
    if args.which == "tu":
        return out.report(roundtrip_tu(read_document(data, "cdga", max_degree=settings.max_degree)))
    coring, from_file = read_document(data, "coring")
    return out.report(roundtrip_ut(based(coring, _base_point(args, coring, from_file)),
                                   max_degree=settings.max_degree).report)


def cmd_catalog(args, settings: Settings, out: Output) -> int:
    D = settings.max_degree
    A = parse_algebra(args.algebra)
    if args.family == "matrix":
        b = catalog.catalog_matrix(args.n, A)
        t = t_based(b, max_degree=D)
        N = args.n
        report = catalog.order_formulas(t, range(1, N + 1), [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)],
                                        N)
        return out.built(based_to_dict(b), _bundle(coring=check_coring(b.coring), T=t.report, formulas=report))
    if args.family == "order":
        elements = [item.strip() for item in args.elements.split(",") if item.strip()]
        pairs = parse_pairs(args.pairs or "")
        if args.closure:
            pairs = closure(elements, pairs)
        e = args.base or elements[0]
        b = catalog.catalog_order(elements, pairs, A, e=e)
        t = t_based(b, max_degree=D)
        return out.built(based_to_dict(b), _bundle(coring=check_coring(b.coring), T=t.report,
                                                   formulas=catalog.order_formulas(t, elements, pairs, e)))
    if args.family == "comatrix":
        data = catalog.catalog_comatrix(A, args.n, max_degree=D)
        return out.built(based_to_dict(data.based),
                         _bundle(comatrix=data.comatrix.report, T=data.result.report,
                                 connection=data.connection.report, description=check_comatrix_description(data)))
    if args.family == "sweedler":
        x = parse_vec(args.x, A.dim * A.dim)
        coring, result = catalog.catalog_sweedler(A, x, max_degree=D)
        return out.built(coring_to_dict(coring, result.x),
                         _bundle(Tflat=result.report, formulas=catalog.sweedler_formulas(result)))
    if args.family == "entwining":
        ent = catalog.graded_entwining(cyclic_group_algebra(args.order), list(range(args.order)), args.order)
        data = catalog.catalog_entwining(ent, window=args.window if args.window is not None
                                         else settings.entwining_window, max_degree=D)
        return out.built(complex_to_dict(data.complex, data.based.base_point),
                         _bundle(entwining=data.report, complex=check_complex(data.complex)))
    raise FormatError(f"catalog -- unknown family {args.family!r}")


def _connection(args, settings: Settings):
    complex_, from_file = read_document(load_json(args.file), "complex")
    x = _base_point(args, complex_.coring, from_file)
    return connection_from_complex(complex_, x, based_variant=args.based, max_degree=settings.max_degree)


def cmd_connection(args, settings: Settings, out: Output) -> int:
    conn = _connection(args, settings)
    return out.report(_bundle(connection=conn.report, cohesive=is_cohesive(conn)))


def cmd_divergence(args, settings: Settings, out: Output) -> int:
    if args.source == "from-module":
        conn = _connection(args, settings)
        return out.report(_bundle(divergence=divergence_from_curved_module(conn.module).report,
                                  assembly=check_divergence_assembly(conn.module)))
    data = load_json(args.file)
    complex_ = read_document(data, "contramodule_complex")
    x = parse_vec(args.base_point, complex_.coring.rank)
    if x is None and isinstance(data.get("coring"), dict) and data["coring"].get("base_point") is not None:
        x = vec_from_any(data["coring"]["base_point"], complex_.coring.rank)
    divergence = divergence_from_contramodule_complex(complex_, x, based_variant=args.based,
                                                      max_degree=settings.max_degree)
    return out.report(divergence.report)


def cmd_cone(args, settings: Settings, out: Output) -> int:
    source, _ = read_document(load_json(args.file), "complex")
    phi = read_document(load_json(args.morphism), "complex_morphism", source=source)
    return out.report(cone(phi).report)


# parser

def _global_options(parser: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--max-degree", type=int, default=default, help="truncation degree D (default 4)")
    parser.add_argument("--format", dest="output_format", choices=["json", "text"], default=default,
                        help="report format (default text)")
    parser.add_argument("--seed", type=int, default=default, help="seed for randomized sample checks")
    parser.add_argument("--output", default=default, help="write the main output to this file")
    parser.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coring-cdga", description="corings and semi-free curved DGAs")
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    subparsers = parser.add_subparsers(dest="command", required=True)

    check = subparsers.add_parser("check", parents=[common], help="verify an object read from JSON")
    check.add_argument("what", choices=["coring", "cdga", "comodule", "complex", "contramodule", "morphism"])
    check.add_argument("file", nargs="?", default="-")
    check.add_argument("--samples", type=int, default=0, help="random dg-morphism samples for the dg category laws")
    check.set_defaults(func=cmd_check)

    functor = subparsers.add_parser("functor", parents=[common], help="T-flat, T or U")
    functor.add_argument("which", choices=["tflat", "t", "u"])
    functor.add_argument("file", nargs="?", default="-")
    functor.add_argument("--base-point", help="x as a dense or index:value list")
    functor.set_defaults(func=cmd_functor)

    roundtrip = subparsers.add_parser("roundtrip", parents=[common], help="T U or U T round trip")
    roundtrip.add_argument("which", choices=["tu", "ut"])
    roundtrip.add_argument("file", nargs="?", default="-")
    roundtrip.add_argument("--base-point")
    roundtrip.set_defaults(func=cmd_roundtrip)

    cat = subparsers.add_parser("catalog", parents=[common], help="build a standard example")
    cat.add_argument("family", choices=["matrix", "order", "comatrix", "sweedler", "entwining"])
    cat.add_argument("--n", type=int, default=2, help="matrix size or rank of P")
    cat.add_argument("--algebra", default="Q", help="Q, M<n>, Z<n> or T<n>")
    cat.add_argument("--elements", default="1,2", help="order: comma-separated elements")
    cat.add_argument("--pairs", default=None, help="order: s:t pairs of the relation")
    cat.add_argument("--closure", action="store_true", help="order: close the relation reflexively and transitively")
    cat.add_argument("--base", default=None, help="order: base element e")
    cat.add_argument("--x", default=None, help="sweedler: the element x of A (x) A")
    cat.add_argument("--order", type=int, default=2, help="entwining: order of the cyclic group")
    cat.add_argument("--window", type=int, default=None, help="entwining: top degree of the induced complex")
    cat.set_defaults(func=cmd_catalog)

    connection = subparsers.add_parser("connection", parents=[common], help="Z-connection of a comodule complex")
    connection.add_argument("source", choices=["from-complex"])
    connection.add_argument("file", nargs="?", default="-")
    connection.add_argument("--base-point")
    connection.add_argument("--based", action="store_true", help="work over T(C, x) instead of T-flat")
    connection.set_defaults(func=cmd_connection)

    divergence = subparsers.add_parser("divergence", parents=[common], help="Z-divergences")
    divergence.add_argument("source", choices=["from-contra", "from-module"])
    divergence.add_argument("file", nargs="?", default="-")
    divergence.add_argument("--base-point")
    divergence.add_argument("--based", action="store_true")
    divergence.set_defaults(func=cmd_divergence)

    cone_parser = subparsers.add_parser("cone", parents=[common], help="cone of a closed degree-0 morphism")
    cone_parser.add_argument("file")
    cone_parser.add_argument("morphism")
    cone_parser.set_defaults(func=cmd_cone)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv(find_dotenv(usecwd=True))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_environment().replace(max_degree=args.max_degree,
                                                       output_format=args.output_format, seed=args.seed)
    except ConfigError as error:
        sys.stderr.write(json.dumps(error.to_dict()) + "\n")
        return EXIT_USAGE
    configure_logging("DEBUG" if args.verbose else settings.log_level)
    out = Output(settings, args.output)
    try:
        return args.func(args, settings, out)
    except (ConfigError, FormatError) as error:
        sys.stderr.write(json.dumps(to_json_ready(error.to_dict())) + "\n")
        return EXIT_USAGE
    except CoringCdgaError as error:
        LOG.info("%s: %s", type(error).__name__, error)
        out.write(json.dumps(to_json_ready(error.to_dict()), indent=2))
        return EXIT_FAILED
    except json.JSONDecodeError as error:
        sys.stderr.write(json.dumps({"error": "FormatError", "message": f"invalid JSON: {error}"}) + "\n")
        return EXIT_USAGE
    except OSError as error:
        sys.stderr.write(json.dumps({"error": type(error).__name__, "message": str(error)}) + "\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
