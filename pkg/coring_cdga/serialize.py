"""
JSON forms of the objects the CLI pipes between subcommands.

Every document carries a "kind" so that `from_dict` can dispatch on it. Scalars are "p/q" strings,
short vectors are dense lists, tensors are lists of rows [i, j, ..., "value"].
"""
from typing import Any, Optional

from coring_cdga.algmod import Algebra, AlgebraMap, ModuleSpace, hom_right_A, linmap, make_algebra, make_module
from coring_cdga.cdga import SemiFreeCDGA, make_cdga
from coring_cdga.comod import ComoduleComplex, ComplexMorphism, make_comodule, make_complex, make_morphism
from coring_cdga.contra import Contramodule, ContramoduleComplex, make_contramodule, make_contramodule_complex
from coring_cdga.coring import BasedCoring, Coring, CoringMorphism, make_coring
from coring_cdga.errors import CoringCdgaError, FormatError
from coring_cdga.exactla import Vec, dense, format_scalar, inverse, is_invertible, matrix_from_columns, scalar, \
    to_rows, vec_from_any
from coring_cdga.util import get_logger, make_json_serializable

LOG = get_logger(__name__)

KINDS = ("algebra", "module", "coring", "cdga", "complex", "contramodule", "contramodule_complex",
         "coring_morphism", "complex_morphism")


def _dense_out(v: Vec, size: int) -> list:
    return [format_scalar(val) for val in dense(v, size)]


def _sparse_out(v: Vec) -> dict:
    return {str(key): format_scalar(v[key]) for key in sorted(v)}


def _tensor_out(tensor: dict) -> list:
    return [list(word) + [format_scalar(val)] for word, val in sorted(tensor.items())]


def _tensor_in(rows) -> dict:
    result = {}
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) < 2:
            raise FormatError(f"serialize -- tensor rows look like [i, j, ..., value], got {row!r}")
        word = tuple(int(w) for w in row[:-1])
        result[word] = result.get(word, scalar(0)) + scalar(row[-1])
    return {word: val for word, val in result.items() if val}


def _vec_in(values, size: Optional[int] = None) -> Vec:
    if values is None:
        return {}
    return vec_from_any(values, size)


def _require(data: dict, *keys) -> None:
    missing = [key for key in keys if key not in data]
    if missing:
        raise FormatError(f"serialize -- missing keys {missing} in {data.get('kind', 'document')}")


def kind_of(data: dict) -> str:
    """the declared kind, or a guess from the keys for hand-written files"""
    if not isinstance(data, dict):
        raise FormatError("serialize -- expected a JSON object")
    kind = data.get("kind")
    if kind is not None:
        if kind not in KINDS:
            raise FormatError(f"serialize -- unknown kind {kind!r}", witness=kind)
        return kind
    if "mul" in data:
        return "algebra"
    if "d1_lift" in data:
        return "cdga"
    if "delta_lift" in data:
        return "coring"
    if "terms" in data:
        terms = data["terms"]
        return "contramodule_complex" if terms and "alpha" in terms[0] else "complex"
    if "alpha" in data:
        return "contramodule"
    if "f1" in data:
        return "coring_morphism"
    if "components" in data:
        return "complex_morphism"
    if "rank" in data:
        return "module"
    raise FormatError("serialize -- cannot tell what kind of object this is")


# algebras and modules

def algebra_to_dict(A: Algebra) -> dict:
    return {
        "kind": "algebra",
        "name": A.name,
        "dim": A.dim,
        "unit": _dense_out(A.unit, A.dim),
        "mul": [[_dense_out(A.table[i][j], A.dim) for j in range(A.dim)] for i in range(A.dim)],
        "labels": list(A.labels) if A.labels else None,
    }


def algebra_from_dict(data: dict) -> Algebra:
    _require(data, "dim", "unit", "mul")
    return make_algebra(int(data["dim"]), data["unit"], data["mul"], name=data.get("name") or "",
                        labels=data.get("labels"))


def module_to_dict(M: ModuleSpace) -> dict:
    result = {
        "kind": "module",
        "name": M.name,
        "rank": M.rank,
        "right": None if M.right is None else [[_sparse_out(v) for v in row] for row in M.right],
        "left": None if M.left is None else [[_sparse_out(v) for v in row] for row in M.left],
        "labels": list(M.labels) if M.labels else None,
    }
    if M.left is not None and M.left_algebra is not M.algebra:
        result["left_algebra"] = algebra_to_dict(M.left_algebra)
    return result


def module_from_dict(data: dict, algebra: Algebra, left_algebra: Optional[Algebra] = None,
                     check: bool = True) -> ModuleSpace:
    _require(data, "rank")
    if left_algebra is None and "left_algebra" in data:
        left_algebra = algebra_from_dict(data["left_algebra"])
    right = data.get("right")
    left = data.get("left")
    return make_module(int(data["rank"]), algebra=algebra if right is not None or left is not None else None,
                       right=right, left=left, left_algebra=left_algebra or algebra, labels=data.get("labels"),
                       name=data.get("name") or "", check=check)


# corings

def coring_to_dict(c: Coring, base_point: Optional[Vec] = None) -> dict:
    return {
        "kind": "coring",
        "name": c.name,
        "algebra": algebra_to_dict(c.algebra),
        "C": module_to_dict(c.C),
        "delta_lift": [_tensor_out(lift) for lift in c.delta_lift],
        "counit": [_dense_out(v, c.algebra.dim) for v in c.counit],
        "base_point": None if base_point is None else _dense_out(base_point, c.rank),
    }


def based_to_dict(b: BasedCoring) -> dict:
    return coring_to_dict(b.coring, b.base_point)


def coring_from_dict(data: dict) -> tuple[Coring, Optional[Vec]]:
    """the coring and its base point, if the file names one"""
    _require(data, "algebra", "C", "delta_lift", "counit")
    A = algebra_from_dict(data["algebra"])
    C = module_from_dict(data["C"], A)
    coring = make_coring(A, C, [_tensor_in(rows) for rows in data["delta_lift"]],
                         [_vec_in(v, A.dim) for v in data["counit"]], name=data.get("name") or "")
    base_point = data.get("base_point")
    return coring, (None if base_point is None else _vec_in(base_point, C.rank))


# CDGAs

def cdga_to_dict(cdga: SemiFreeCDGA) -> dict:
    return {
        "kind": "cdga",
        "name": cdga.name,
        "algebra": algebra_to_dict(cdga.algebra),
        "V": module_to_dict(cdga.V),
        "d0": [_dense_out(v, cdga.V.rank) for v in cdga.d0],
        "d1_lift": [_tensor_out(lift) for lift in cdga.d1_lift],
        "gamma_lift": _tensor_out(cdga.gamma_lift),
        "max_degree": cdga.max_degree,
    }


def cdga_from_dict(data: dict, max_degree: Optional[int] = None, check: bool = True) -> SemiFreeCDGA:
    _require(data, "algebra", "V", "d0", "d1_lift", "gamma_lift")
    A = algebra_from_dict(data["algebra"])
    V = module_from_dict(data["V"], A)
    D = max_degree if max_degree is not None else int(data.get("max_degree", 4))
    return make_cdga(A, V, [_vec_in(v, V.rank) for v in data["d0"]], [_tensor_in(rows) for rows in data["d1_lift"]],
                     _tensor_in(data["gamma_lift"]), max_degree=D, name=data.get("name") or "", check=check)


# comodule complexes

def complex_to_dict(c: ComoduleComplex, base_point: Optional[Vec] = None) -> dict:
    terms = []
    for l_index in c.degrees:
        term = c.term(l_index)
        delta = None
        if l_index < c.hi:
            delta = [_sparse_out(col) for col in c.delta[l_index - c.lo].columns]
        terms.append({
            "M": module_to_dict(term.M),
            "rho_lift": [_tensor_out(term.MC.lift(col)) for col in term.rho.columns],
            "delta": delta,
        })
    return {"kind": "complex", "name": c.name, "coring": coring_to_dict(c.coring, base_point),
            "window": [c.lo, c.hi], "terms": terms}


def complex_from_dict(data: dict, coring: Optional[Coring] = None,
                      check: bool = True) -> tuple[ComoduleComplex, Optional[Vec]]:
    """
    :param coring: use this coring instead of the embedded one, so that complexes loaded from different
        files share one coring object
    """
    _require(data, "coring", "window", "terms")
    base_point = None
    if coring is None:
        coring, base_point = coring_from_dict(data["coring"])
    lo = int(data["window"][0])
    terms, delta = [], []
    for k, term in enumerate(data["terms"]):
        _require(term, "M", "rho_lift")
        M = module_from_dict(term["M"], coring.algebra)
        terms.append(make_comodule(coring, M, [_tensor_in(rows) for rows in term["rho_lift"]],
                                   name=term["M"].get("name") or f"M^{lo + k}", check=check))
        if k < len(data["terms"]) - 1:
            delta.append([_vec_in(col) for col in term.get("delta") or []])
    return make_complex(coring, lo, terms, delta, name=data.get("name") or "", check=check), base_point


# contramodules

def contramodule_to_dict(m: Contramodule) -> dict:
    homs = m.homs
    return {
        "kind": "contramodule",
        "name": m.name,
        "coring": coring_to_dict(m.coring),
        "M": module_to_dict(m.M),
        "alpha": [_sparse_out(col) for col in m.alpha.columns],
        "hom_basis": [[_sparse_out(col) for col in homs.columns({j: scalar(1)})] for j in range(homs.rank)],
    }


def _alpha_on_computed_basis(coring: Coring, M: ModuleSpace, data: dict) -> list[Vec]:
    """re-express alpha, given on an emitted basis of Hom_A(C, M), on the basis computed here"""
    alpha = [_vec_in(col, M.rank) for col in data["alpha"]]
    if "hom_basis" not in data:
        return alpha
    homs = hom_right_A(coring.C, M)
    emitted = [[_vec_in(col, M.rank) for col in basis_map] for basis_map in data["hom_basis"]]
    if len(emitted) != homs.rank or len(alpha) != homs.rank:
        raise FormatError(f"contramodule -- the hom basis has {len(emitted)} maps, expected {homs.rank}")
    coords = [homs.coordinates(cols) for cols in emitted]
    change = matrix_from_columns(coords, homs.rank)
    if not is_invertible(change):
        raise FormatError("contramodule -- the emitted hom basis is not a basis of Hom_A(C, M)")
    inv = to_rows(inverse(change))
    result = []
    for j in range(homs.rank):
        column: Vec = {}
        for k in range(homs.rank):
            if inv[k][j]:
                for i, val in alpha[k].items():
                    column[i] = column.get(i, scalar(0)) + inv[k][j] * val
        result.append({i: val for i, val in column.items() if val})
    return result


def contramodule_from_dict(data: dict, coring: Optional[Coring] = None, check: bool = True) -> Contramodule:
    _require(data, "M", "alpha")
    if coring is None:
        _require(data, "coring")
        coring, _ = coring_from_dict(data["coring"])
    M = module_from_dict(data["M"], coring.algebra)
    return make_contramodule(coring, M, _alpha_on_computed_basis(coring, M, data), name=data.get("name") or "",
                             check=check)


def contramodule_complex_to_dict(c: ContramoduleComplex) -> dict:
    terms = []
    for l_index in c.degrees:
        term = contramodule_to_dict(c.term(l_index))
        term.pop("coring")
        term.pop("kind")
        if l_index < c.hi:
            term["delta"] = [_sparse_out(col) for col in c.delta[l_index - c.lo].columns]
        terms.append(term)
    return {"kind": "contramodule_complex", "name": c.name, "coring": coring_to_dict(c.coring),
            "window": [c.lo, c.hi], "terms": terms}


def contramodule_complex_from_dict(data: dict, check: bool = True) -> ContramoduleComplex:
    """a complex file, or a single contramodule read as a complex concentrated in degree 0"""
    coring, _ = coring_from_dict(data["coring"]) if "coring" in data else (None, None)
    if kind_of(data) == "contramodule":
        term = contramodule_from_dict(data, coring, check=check)
        return make_contramodule_complex(term.coring, 0, [term], [], name=term.name, check=check)
    _require(data, "coring", "window", "terms")
    lo = int(data["window"][0])
    terms = [contramodule_from_dict(term, coring, check=check) for term in data["terms"]]
    delta = [[_vec_in(col) for col in term.get("delta") or []] for term in data["terms"][:-1]]
    return make_contramodule_complex(coring, lo, terms, delta, name=data.get("name") or "", check=check)


# morphisms

def coring_morphism_to_dict(m: CoringMorphism) -> dict:
    return {
        "kind": "coring_morphism",
        "source": coring_to_dict(m.source),
        "target": coring_to_dict(m.target),
        "f0": [_dense_out(col, m.target.algebra.dim) for col in m.f0.columns],
        "f1": [_sparse_out(col) for col in m.f1.columns],
    }


def coring_morphism_from_dict(data: dict) -> CoringMorphism:
    _require(data, "source", "target", "f0", "f1")
    source, _ = coring_from_dict(data["source"])
    target, _ = coring_from_dict(data["target"])
    f0 = AlgebraMap(source=source.algebra, target=target.algebra,
                    columns=tuple(_vec_in(col, target.algebra.dim) for col in data["f0"]))
    f1 = linmap(source.C, target.C, [_vec_in(col, target.rank) for col in data["f1"]])
    return CoringMorphism(source=source, target=target, f0=f0, f1=f1)


def complex_morphism_to_dict(phi: ComplexMorphism, include_target: bool = True) -> dict:
    result = {
        "kind": "complex_morphism",
        "degree": phi.degree,
        "components": [{"k": k, "l": l_index, "columns": [_sparse_out(col) for col in phi.components[(k, l_index)]]}
                       for k, l_index in sorted(phi.components)],
    }
    if include_target and phi.target is not phi.source:
        result["target"] = complex_to_dict(phi.target)
    return result


def complex_morphism_from_dict(data: dict, source: ComoduleComplex) -> ComplexMorphism:
    """the target is read from the file, or is the source itself when the file has none"""
    _require(data, "components")
    target = source
    if data.get("target") is not None:
        target, _ = complex_from_dict(data["target"], coring=source.coring)
    components = {(int(item["k"]), int(item["l"])): [_vec_in(col) for col in item["columns"]]
                  for item in data["components"]}
    return make_morphism(source, target, int(data.get("degree", 0)), components)


def from_dict(data: dict, **kwargs) -> Any:
    """dispatch on the kind of the document"""
    kind = kind_of(data)
    try:
        if kind == "algebra":
            return algebra_from_dict(data)
        if kind == "coring":
            return coring_from_dict(data)
        if kind == "cdga":
            return cdga_from_dict(data, **kwargs)
        if kind == "complex":
            return complex_from_dict(data, **kwargs)
        if kind == "contramodule":
            return contramodule_from_dict(data, **kwargs)
        if kind == "contramodule_complex":
            return contramodule_complex_from_dict(data, **kwargs)
        if kind == "coring_morphism":
            return coring_morphism_from_dict(data)
        if kind == "complex_morphism":
            return complex_morphism_from_dict(data, **kwargs)
        raise FormatError(f"from_dict -- {kind} documents are only read as parts of larger ones", witness=kind)
    except CoringCdgaError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        LOG.info("from_dict: %s", exc)
        raise FormatError(f"from_dict -- malformed {kind} document: {exc}") from exc


def read_document(data: dict, kind: str, **kwargs) -> Any:
    """`from_dict` for a document that must be of the given kind"""
    found = kind_of(data)
    if found != kind:
        raise FormatError(f"serialize -- expected a {kind} document, got {found}", witness=found)
    return from_dict(data, **kwargs)


def to_json_ready(obj: Any) -> Any:
    return make_json_serializable(obj)
