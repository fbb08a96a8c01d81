"""
Exact rational linear algebra.

Scalars are elements of sympy's ``QQ`` domain, matrices are ``DomainMatrix`` objects over ``QQ``.
Inside the builders, vectors are kept sparse as ``dict[int, Scalar]`` with zero entries omitted;
every public matrix is a dense ``DomainMatrix``.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from coring_cdga.errors import FormatError, ShapeError

Scalar = Any
Vec = dict[int, Scalar]

ZERO = QQ(0)
ONE = QQ(1)


def scalar(value) -> Scalar:
    """
    coerce ints, Fractions, "p/q" strings and QQ elements to a QQ element

    :param value: anything that denotes a rational number
    :return: the value as an element of QQ
    """
    if isinstance(value, str):
        return parse_scalar(value)
    if isinstance(value, bool):
        raise FormatError(f"scalar -- refusing to read a boolean as a rational: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if QQ.of_type(value):
        return value
    try:
        return QQ.convert(value)
    except Exception as exc:
        raise FormatError(f"scalar -- cannot read {value!r} as a rational") from exc


def parse_scalar(text: str) -> Scalar:
    text = text.strip()
    try:
        if "/" in text:
            numerator, denominator = text.split("/", 1)
            if int(denominator) == 0:
                raise FormatError(f"parse_scalar -- zero denominator in {text!r}")
            return QQ(int(numerator), int(denominator))
        return QQ(int(text))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"parse_scalar -- not a rational: {text!r}") from exc


def format_scalar(value: Scalar) -> str:
    """serialize a scalar as "p/q", or "p" when the denominator is 1"""
    value = scalar(value)
    numerator, denominator = int(QQ.numer(value)), int(QQ.denom(value))
    if denominator == 1:
        return str(numerator)
    return f"{numerator}/{denominator}"


# sparse vectors

def vec_add(u: Vec, v: Vec, coeff: Scalar = ONE) -> Vec:
    """u + coeff * v as a new vector"""
    result = dict(u)
    add_into(result, v, coeff)
    return result


def add_into(target: Vec, v: Vec, coeff: Scalar = ONE) -> Vec:
    """target += coeff * v, in place; returns target"""
    if not coeff:
        return target
    for key, val in v.items():
        new = target.get(key, ZERO) + coeff * val
        if new:
            target[key] = new
        else:
            target.pop(key, None)
    return target


def vec_scale(v: Vec, coeff: Scalar) -> Vec:
    if not coeff:
        return {}
    return {key: coeff * val for key, val in v.items()}


def vec_sub(u: Vec, v: Vec) -> Vec:
    return vec_add(u, v, -ONE)


def unit_vec(index: int) -> Vec:
    return {index: ONE}


def parity_sign(n: int) -> Scalar:
    """(-1)^n"""
    return ONE if n % 2 == 0 else -ONE


def dense(v: Vec, size: int) -> list:
    result = [ZERO] * size
    for key, val in v.items():
        result[key] = val
    return result


def sparse(values: Sequence) -> Vec:
    return {i: scalar(val) for i, val in enumerate(values) if scalar(val)}


def vec_from_any(values, size: Optional[int] = None) -> Vec:
    """accept either a dense list or a {index: value} mapping"""
    if isinstance(values, dict):
        result = {int(k): scalar(val) for k, val in values.items()}
        result = {k: val for k, val in result.items() if val}
    else:
        if size is not None and len(values) != size:
            raise ShapeError(f"vec_from_any -- expected length {size}, got {len(values)}")
        result = sparse(values)
    if size is not None and any(k < 0 or k >= size for k in result):
        raise ShapeError(f"vec_from_any -- index out of range for length {size}")
    return result


# matrices

def matrix_from_rows(rows: Sequence[Sequence], ncols: Optional[int] = None) -> DomainMatrix:
    """build a dense QQ matrix from nested lists of anything `scalar` accepts"""
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    grid = []
    for row in rows:
        if len(row) != ncols:
            raise ShapeError(f"matrix_from_rows -- ragged row of length {len(row)}, expected {ncols}")
        grid.append([scalar(val) for val in row])
    if nrows == 0:
        return DomainMatrix.zeros((0, ncols), QQ)
    return DomainMatrix(grid, (nrows, ncols), QQ)


def matrix_from_columns(columns: Sequence[Vec], nrows: int) -> DomainMatrix:
    """dense matrix whose j-th column is the sparse vector columns[j]"""
    dod: dict[int, dict[int, Scalar]] = {}
    for j, col in enumerate(columns):
        for i, val in col.items():
            dod.setdefault(i, {})[j] = val
    return DomainMatrix.from_dod(dod, (nrows, len(columns)), QQ).to_dense()


def sparse_rows_matrix(rows: Sequence[Vec], ncols: int) -> DomainMatrix:
    dod = {i: dict(row) for i, row in enumerate(rows) if row}
    return DomainMatrix.from_dod(dod, (len(rows), ncols), QQ)


def to_rows(m: DomainMatrix) -> list[list]:
    return m.to_dense().to_list()


def columns_of(m: DomainMatrix) -> list[Vec]:
    nrows, ncols = m.shape
    columns: list[Vec] = [{} for _ in range(ncols)]
    for i, row in m.to_dod().items():
        for j, val in row.items():
            if val:
                columns[j][i] = val
    return columns


def identity(n: int) -> DomainMatrix:
    return DomainMatrix.eye(n, QQ).to_dense()


def zeros(nrows: int, ncols: int) -> DomainMatrix:
    return DomainMatrix.zeros((nrows, ncols), QQ).to_dense()


def rref_rows(rows: Sequence[Vec], ncols: int) -> tuple[list[Vec], list[int]]:
    rows = [row for row in rows if row]
    if not rows or ncols == 0:
        return [], []
    reduced, pivots = sparse_rows_matrix(rows, ncols).rref()
    dod = reduced.to_dod()
    result = []
    for i in range(len(pivots)):
        result.append({j: val for j, val in dod.get(i, {}).items() if val})
    return result, list(pivots)


def rref(m: DomainMatrix) -> tuple[DomainMatrix, list[int]]:
    """
    reduced row echelon form and pivot columns

    :param m: any QQ matrix
    :return: (rref(m), pivot column list); the row space is preserved
    """
    nrows, ncols = m.shape
    if nrows == 0 or ncols == 0:
        return m.to_dense(), []
    reduced, pivots = m.convert_to(QQ).rref()
    return reduced.to_dense(), list(pivots)


def rank(m: DomainMatrix) -> int:
    return len(rref(m)[1])


def sparse_kernel(rows: Sequence[Vec], ncols: int) -> list[Vec]:
    """
    kernel basis of the system given by sparse rows; one basis vector per free column, with value 1
    at that column, so the coordinates of a kernel element are its values at the free columns
    """
    return sparse_kernel_keys(rows, ncols)[0]


def sparse_kernel_keys(rows: Sequence[Vec], ncols: int) -> tuple[list[Vec], list[int]]:
    """kernel basis together with its free columns"""
    reduced, pivots = rref_rows(rows, ncols)
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    basis = []
    for f in free:
        v = {f: ONE}
        for row, p in zip(reduced, pivots):
            val = row.get(f)
            if val:
                v[p] = -val
        basis.append(v)
    return basis, free


def kernel_basis(m: DomainMatrix) -> list[list]:
    """
    basis of {v : m v = 0}

    :return: dense vectors, count = cols - rank
    """
    nrows, ncols = m.shape
    rows = [dict(row) for row in m.to_dod().values()] if nrows else []
    return [dense(v, ncols) for v in sparse_kernel(rows, ncols)]


def sparse_solve(rows: Sequence[Vec], rhs: Sequence[Scalar], ncols: int,
                 prefer_late: bool = False) -> Optional[Vec]:
    """
    one solution of rows . x = rhs, or None if the system is inconsistent

    free variables are set to zero; with prefer_late the pivots are chosen on the latest columns,
    so the solution is supported on late coordinates
    """
    augmented = []
    for row, b in zip(rows, rhs):
        new = {(ncols - 1 - j if prefer_late else j): val for j, val in row.items()}
        if b:
            new[ncols] = scalar(b)
        if new:
            augmented.append(new)
    reduced, pivots = rref_rows(augmented, ncols + 1)
    solution: Vec = {}
    for row, p in zip(reduced, pivots):
        if p == ncols:
            return None
        val = row.get(ncols)
        if val:
            solution[ncols - 1 - p if prefer_late else p] = val
    return solution


def solve(m: DomainMatrix, b: Sequence) -> Optional[list]:
    """one solution of m x = b as a dense list, or None"""
    nrows, ncols = m.shape
    if len(b) != nrows:
        raise ShapeError(f"solve -- right-hand side has length {len(b)}, expected {nrows}")
    dod = m.to_dod()
    rows = [dict(dod.get(i, {})) for i in range(nrows)]
    solution = sparse_solve(rows, [scalar(val) for val in b], ncols)
    if solution is None:
        return None
    return dense(solution, ncols)


def is_invertible(m: DomainMatrix) -> bool:
    nrows, ncols = m.shape
    return nrows == ncols and rank(m) == nrows


def inverse(m: DomainMatrix) -> DomainMatrix:
    if not is_invertible(m):
        raise ShapeError("inverse -- matrix is not invertible")
    if m.shape[0] == 0:
        return m
    return m.to_dense().inv()


@dataclass(frozen=True)
class Quotient:
    """
    A quotient of QQ^ambient_dim by the span of some relations, with canonical representatives.

    `reductions` maps every eliminated coordinate p to the combination of earlier representative
    coordinates it is congruent to.
    """
    ambient_dim: int
    representatives: tuple
    reductions: dict = field(repr=False)
    position: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.representatives)

    def project_index(self, index: int) -> Vec:
        if index in self.reductions:
            return {self.position[f]: val for f, val in self.reductions[index].items()}
        return {self.position[index]: ONE}

    def project(self, v: Vec) -> Vec:
        result: Vec = {}
        for index, val in v.items():
            add_into(result, self.project_index(index), val)
        return result

    def lift(self, v: Vec) -> Vec:
        return {self.representatives[i]: val for i, val in v.items()}

    @property
    def projection(self) -> DomainMatrix:
        return matrix_from_columns([self.project_index(i) for i in range(self.ambient_dim)], self.dim)

    @property
    def section(self) -> DomainMatrix:
        return matrix_from_columns([unit_vec(r) for r in self.representatives], self.ambient_dim)


def sparse_quotient(ambient_dim: int, relations: Iterable[Vec]) -> Quotient:
    """
    canonical quotient of QQ^ambient_dim by span(relations); the representatives are the
    lexicographically-first coordinates that stay independent modulo the relations
    """
    reversed_rows = []
    for rel in relations:
        if rel:
            reversed_rows.append({ambient_dim - 1 - j: val for j, val in rel.items()})
    reduced, pivots = rref_rows(reversed_rows, ambient_dim)
    reductions = {}
    for row, p in zip(reduced, pivots):
        eliminated = ambient_dim - 1 - p
        reductions[eliminated] = {ambient_dim - 1 - j: -val for j, val in row.items() if j != p}
    representatives = tuple(i for i in range(ambient_dim) if i not in reductions)
    position = {r: i for i, r in enumerate(representatives)}
    return Quotient(ambient_dim=ambient_dim, representatives=representatives,
                    reductions=reductions, position=position)


def quotient_basis(ambient_dim: int, relations: Sequence) -> tuple[list[int], DomainMatrix, DomainMatrix]:
    """
    quotient of QQ^ambient_dim by the span of the relations

    :param ambient_dim: dimension of the ambient space
    :param relations: dense or sparse relation vectors of length ambient_dim
    :return: (representative coordinates, projection matrix, section matrix) with
             projection . section = identity
    """
    quotient = sparse_quotient(ambient_dim, [vec_from_any(rel, ambient_dim) for rel in relations])
    return list(quotient.representatives), quotient.projection, quotient.section
