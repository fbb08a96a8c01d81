import os

from dotenv import find_dotenv, load_dotenv

from coring_cdga import catalog
from coring_cdga.algmod import cyclic_group_algebra, upper_triangular
from coring_cdga.comatrix import check_comatrix_description
from coring_cdga.config import Settings
from coring_cdga.equiv import check_group_like_curvature, roundtrip_tu, t_based
from coring_cdga.report import ReportBundle
from coring_cdga.util import configure_logging, write_json

load_dotenv(find_dotenv())

settings = Settings.from_environment()
configure_logging(settings.log_level)

data_folder = os.path.join(os.path.dirname(__file__), "data")
os.makedirs(data_folder, exist_ok=True)


def run_matrix(bundle: ReportBundle, N: int = 2):
    b = catalog.catalog_matrix(N)
    t = t_based(b, max_degree=settings.max_degree)
    bundle.add(f"matrix{N}.T", t.report)
    S = list(range(1, N + 1))
    bundle.run(f"matrix{N}.formulas", catalog.order_formulas, t, S, [(i, j) for i in S for j in S], N)
    bundle.run(f"matrix{N}.curvature", check_group_like_curvature, b)
    return t


def run_order(bundle: ReportBundle):
    # the chain a < b < c based at its minimum and at its middle
    S = ["a", "b", "c"]
    Q = [(s, s) for s in S] + [("a", "b"), ("b", "c"), ("a", "c")]
    for e in ("a", "b"):
        b = catalog.catalog_order(S, Q, e=e)
        t = t_based(b, max_degree=settings.max_degree, check=False)
        bundle.run(f"order.{e}", catalog.order_formulas, t, S, Q, e)


def run_sweedler(bundle: ReportBundle):
    for A in (cyclic_group_algebra(2), upper_triangular(2)):
        _, result = catalog.catalog_sweedler(A, max_degree=min(settings.max_degree, 3))
        bundle.add(f"sweedler.{A.name}.T", result.report)
        bundle.run(f"sweedler.{A.name}.formulas", catalog.sweedler_formulas, result)


def run_comatrix(bundle: ReportBundle):
    data = catalog.catalog_comatrix(n=2, max_degree=min(settings.max_degree, 3))
    bundle.add("comatrix", data.report)
    bundle.run("comatrix.description", check_comatrix_description, data)


def run_entwining(bundle: ReportBundle):
    ent = catalog.graded_entwining(cyclic_group_algebra(2), [0, 1], order=2)
    data = catalog.catalog_entwining(ent, window=settings.entwining_window, max_degree=min(settings.max_degree, 3))
    bundle.add("entwining", data.report)


def run_all() -> ReportBundle:
    bundle = ReportBundle(deterministic=False)
    t = run_matrix(bundle)
    bundle.run("matrix2.roundtrip_tu", roundtrip_tu, t.cdga)
    run_order(bundle)
    run_sweedler(bundle)
    run_comatrix(bundle)
    run_entwining(bundle)
    return bundle


if __name__ == '__main__':
    results = run_all()
    write_json(results.to_dict(), os.path.join(data_folder, "catalog_reports.json"))
    for name, report in results.reports.items():
        print(f"{name}: {'PASS' if report.passed else 'FAIL'} ({results.timings.get(name, 0.0):.3f}s)")
