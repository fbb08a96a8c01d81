"""
Finite-dimensional algebras over QQ, one- and two-sided modules, module maps, tensor products over
an algebra and right-linear hom spaces.

Elements are sparse vectors (``dict[int, Scalar]``) in the basis of their space. Structure maps that
land in a tensor product over A are given as lifts into the plain tensor over QQ: a lift is a
``dict[tuple[int, ...], Scalar]`` keyed by words of basis indices, one index per tensor factor,
and is pushed into the quotient with ``TensorSpace.project``.
"""
import threading
import weakref
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Optional, Sequence

from sympy.polys.matrices import DomainMatrix

from coring_cdga.errors import DomainMismatch, MissingAction, NotAssociative, NotSubmodule, NotUnital, ShapeError
from coring_cdga.exactla import (ONE, Quotient, Scalar, Vec, add_into, matrix_from_columns, sparse_kernel_keys,
                                 sparse_quotient, unit_vec, vec_from_any, rref_rows)
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)

Tensor = dict  # word (tuple of basis indices) -> Scalar


def tensor_add(target: Tensor, other: Tensor, coeff: Scalar = ONE) -> Tensor:
    """target += coeff * other for plain tensors, in place"""
    return add_into(target, other, coeff)


@dataclass(frozen=True, eq=False)
class Algebra:
    """
    Unital associative algebra with basis e_0..e_{dim-1}; table[i][j] is the product e_i e_j.
    """
    dim: int
    unit: Vec
    table: tuple
    name: str = ""
    labels: Optional[tuple] = None

    def mul_basis(self, i: int, j: int) -> Vec:
        return self.table[i][j]

    def mul(self, u: Vec, v: Vec) -> Vec:
        result: Vec = {}
        for i, a in u.items():
            row = self.table[i]
            for j, b in v.items():
                add_into(result, row[j], a * b)
        return result

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"e{i}"

    @cached_property
    def generators(self) -> tuple:
        """small generating set together with the unit, see `algebra_generators`"""
        return tuple(algebra_generators(self))

    def __repr__(self):
        return f"Algebra {self.name or '?'} (dim {self.dim})"


def _span_rank(vectors: Sequence[Vec], size: int) -> int:
    return len(rref_rows(list(vectors), size)[1])


def _closure(algebra: Algebra, gens: Sequence[Vec]) -> list[Vec]:
    """a spanning list of the subalgebra generated by gens"""
    span = [dict(algebra.unit)] + [dict(g) for g in gens]
    rank = _span_rank(span, algebra.dim)
    while True:
        new = list(span)
        for s in span:
            for g in gens:
                new.append(algebra.mul(s, g))
        new_rank = _span_rank(new, algebra.dim)
        reduced, _ = rref_rows(new, algebra.dim)
        span = reduced
        if new_rank == rank:
            return span
        rank = new_rank


def algebra_generators(algebra: Algebra) -> list[Vec]:
    """
    greedy generating set of basis vectors: add the basis vector that enlarges the generated
    subalgebra the most, then drop generators the others already produce
    """
    gens: list[Vec] = []
    current = _span_rank(_closure(algebra, gens), algebra.dim)
    while current < algebra.dim:
        best, best_rank = None, current
        for i in range(algebra.dim):
            candidate = gens + [unit_vec(i)]
            r = _span_rank(_closure(algebra, candidate), algebra.dim)
            if r > best_rank:
                best, best_rank = i, r
        gens.append(unit_vec(best))
        current = best_rank
    for g in list(gens):
        rest = [h for h in gens if h is not g]
        if _span_rank(_closure(algebra, rest), algebra.dim) == algebra.dim:
            gens = rest
    return gens


def make_algebra(dim: int, unit, mul, name: str = "", labels: Optional[Sequence[str]] = None) -> Algebra:
    """
    validated algebra from structure constants

    :param dim: dimension over QQ
    :param unit: unit vector, dense list or sparse dict
    :param mul: rank-3 array, mul[i][j][k] = coefficient of e_k in e_i e_j; rows may also be sparse dicts
    :return: Algebra, after checking associativity and unitality on all basis triples
    """
    if len(mul) != dim or any(len(row) != dim for row in mul):
        raise ShapeError(f"make_algebra -- mul must be {dim}x{dim}x{dim}")
    table = tuple(tuple(vec_from_any(mul[i][j], dim) for j in range(dim)) for i in range(dim))
    algebra = Algebra(dim=dim, unit=vec_from_any(unit, dim), table=table, name=name,
                      labels=tuple(labels) if labels else None)
    report = check_algebra(algebra)
    if not report.passed:
        failure = report.failures[0]
        error = NotAssociative if failure.name == "associativity" else NotUnital
        raise error(f"make_algebra -- {failure.name} fails", witness=failure.witness)
    LOG.debug("make_algebra: %s of dimension %d", name or "algebra", dim)
    return algebra


def check_algebra(algebra: Algebra) -> VerificationReport:
    report = VerificationReport(subject=f"algebra {algebra.name}".strip())
    witness = None
    for i, j, k in product(range(algebra.dim), repeat=3):
        left = algebra.mul(algebra.table[i][j], unit_vec(k))
        right = algebra.mul(unit_vec(i), algebra.table[j][k])
        if left != right:
            witness = [i, j, k]
            break
    report.add("associativity", witness is None, witness)
    witness = None
    for i in range(algebra.dim):
        e_i = unit_vec(i)
        if algebra.mul(algebra.unit, e_i) != e_i or algebra.mul(e_i, algebra.unit) != e_i:
            witness = i
            break
    report.add("unitality", witness is None, witness)
    return report


@dataclass(frozen=True, eq=False)
class AlgebraMap:
    source: Algebra
    target: Algebra
    columns: tuple

    def __call__(self, v: Vec) -> Vec:
        result: Vec = {}
        for i, val in v.items():
            add_into(result, self.columns[i], val)
        return result

    @cached_property
    def matrix(self) -> DomainMatrix:
        return matrix_from_columns(self.columns, self.target.dim)


def identity_algebra_map(algebra: Algebra) -> AlgebraMap:
    return AlgebraMap(source=algebra, target=algebra, columns=tuple(unit_vec(i) for i in range(algebra.dim)))


def compose_algebra_maps(g: AlgebraMap, f: AlgebraMap) -> AlgebraMap:
    if f.target is not g.source:
        raise DomainMismatch("compose_algebra_maps -- target of f is not the source of g")
    return AlgebraMap(source=f.source, target=g.target, columns=tuple(g(col) for col in f.columns))


def check_algebra_map(f: AlgebraMap) -> VerificationReport:
    report = VerificationReport(subject="algebra map")
    report.add("unit", f(f.source.unit) == f.target.unit, witness_vec(f(f.source.unit)))
    witness = None
    for i, j in product(range(f.source.dim), repeat=2):
        if f(f.source.table[i][j]) != f.target.mul(f.columns[i], f.columns[j]):
            witness = [i, j]
            break
    report.add("multiplicative", witness is None, witness)
    return report


@dataclass(frozen=True, eq=False)
class ModuleSpace:
    """
    Finite-rank QQ-space with optional actions: right[m][a] = e_m . e_a (over `algebra`) and
    left[a][m] = e_a . e_m (over `left_algebra`).
    """
    rank: int
    algebra: Optional[Algebra] = None
    right: Optional[tuple] = None
    left: Optional[tuple] = None
    left_algebra: Optional[Algebra] = None
    labels: Optional[tuple] = None
    name: str = ""

    def act_right(self, m: Vec, a: Vec) -> Vec:
        if self.right is None:
            raise MissingAction(f"ModuleSpace.act_right -- {self.name or 'module'} has no right action")
        result: Vec = {}
        for i, x in m.items():
            row = self.right[i]
            for j, y in a.items():
                add_into(result, row[j], x * y)
        return result

    def act_left(self, a: Vec, m: Vec) -> Vec:
        if self.left is None:
            raise MissingAction(f"ModuleSpace.act_left -- {self.name or 'module'} has no left action")
        result: Vec = {}
        for i, x in a.items():
            row = self.left[i]
            for j, y in m.items():
                add_into(result, row[j], x * y)
        return result

    @property
    def is_bimodule(self) -> bool:
        return self.left is not None and self.right is not None

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"m{i}"

    def __repr__(self):
        return f"ModuleSpace {self.name or '?'} (rank {self.rank})"


def make_module(rank: int, algebra: Optional[Algebra] = None, right=None, left=None,
                left_algebra: Optional[Algebra] = None, labels=None, name: str = "",
                check: bool = True) -> ModuleSpace:
    """
    module from action arrays; right[m][a] and left[a][m] are dense or sparse vectors of length rank
    """
    left_algebra = left_algebra or algebra
    right_table = None
    if right is not None:
        if algebra is None:
            raise MissingAction("make_module -- a right action needs an algebra")
        right_table = tuple(tuple(vec_from_any(right[m][a], rank) for a in range(algebra.dim)) for m in range(rank))
    left_table = None
    if left is not None:
        if left_algebra is None:
            raise MissingAction("make_module -- a left action needs an algebra")
        left_table = tuple(tuple(vec_from_any(left[a][m], rank) for m in range(rank)) for a in range(left_algebra.dim))
    space = ModuleSpace(rank=rank, algebra=algebra, right=right_table, left=left_table,
                        left_algebra=left_algebra if left is not None else None,
                        labels=tuple(labels) if labels else None, name=name)
    if check:
        report = check_module(space)
        if not report.passed:
            failure = report.failures[0]
            error = NotUnital if "unital" in failure.name else NotAssociative
            raise error(f"make_module -- {failure.name} fails", witness=failure.witness)
    return space


def check_module(space: ModuleSpace) -> VerificationReport:
    report = VerificationReport(subject=f"module {space.name}".strip())
    if space.right is not None:
        algebra = space.algebra
        witness = next((m for m in range(space.rank)
                        if space.act_right(unit_vec(m), algebra.unit) != unit_vec(m)), None)
        report.add("right.unital", witness is None, witness)
        witness = None
        for m, a, b in product(range(space.rank), range(algebra.dim), range(algebra.dim)):
            if space.act_right(space.right[m][a], unit_vec(b)) != space.act_right(unit_vec(m), algebra.table[a][b]):
                witness = [m, a, b]
                break
        report.add("right.associative", witness is None, witness)
    if space.left is not None:
        algebra = space.left_algebra
        witness = next((m for m in range(space.rank) if space.act_left(algebra.unit, unit_vec(m)) != unit_vec(m)), None)
        report.add("left.unital", witness is None, witness)
        witness = None
        for a, b, m in product(range(algebra.dim), range(algebra.dim), range(space.rank)):
            if space.act_left(unit_vec(a), space.left[b][m]) != space.act_left(algebra.table[a][b], unit_vec(m)):
                witness = [a, b, m]
                break
        report.add("left.associative", witness is None, witness)
    if space.is_bimodule:
        witness = None
        for a, m, b in product(range(space.left_algebra.dim), range(space.rank), range(space.algebra.dim)):
            if space.act_right(space.left[a][m], unit_vec(b)) != space.act_left(unit_vec(a), space.right[m][b]):
                witness = [a, m, b]
                break
        report.add("bimodule", witness is None, witness)
    return report


def regular_bimodule(algebra: Algebra) -> ModuleSpace:
    """A as an (A, A)-bimodule"""
    table = algebra.table
    return ModuleSpace(rank=algebra.dim, algebra=algebra,
                       right=tuple(tuple(table[m][a] for a in range(algebra.dim)) for m in range(algebra.dim)),
                       left=tuple(tuple(table[a][m] for m in range(algebra.dim)) for a in range(algebra.dim)),
                       left_algebra=algebra, labels=algebra.labels, name=algebra.name)


def free_right_module(algebra: Algebra, n: int, left: Optional[tuple] = None,
                      left_algebra: Optional[Algebra] = None, name: str = "") -> ModuleSpace:
    """A^n as a right A-module; basis (k, i) -> k*dim + i"""
    d = algebra.dim
    right = []
    for k in range(n):
        for i in range(d):
            right.append(tuple({k * d + j: val for j, val in algebra.table[i][a].items()} for a in range(d)))
    return ModuleSpace(rank=n * d, algebra=algebra, right=tuple(right), left=left,
                       left_algebra=left_algebra if left is not None else None, name=name or f"A^{n}")


def direct_sum(spaces: Sequence[ModuleSpace], name: str = "") -> tuple[ModuleSpace, list[int]]:
    """blockwise direct sum; returns the sum and the block offsets"""
    offsets, total = [], 0
    for space in spaces:
        offsets.append(total)
        total += space.rank
    algebra = next((s.algebra for s in spaces if s.algebra is not None), None)
    left_algebra = next((s.left_algebra for s in spaces if s.left_algebra is not None), None)
    has_right = all(s.right is not None for s in spaces) and algebra is not None
    has_left = all(s.left is not None for s in spaces) and left_algebra is not None
    right = None
    if has_right:
        rows = []
        for space, offset in zip(spaces, offsets):
            for m in range(space.rank):
                rows.append(tuple({offset + k: v for k, v in space.right[m][a].items()} for a in range(algebra.dim)))
        right = tuple(rows)
    left = None
    if has_left:
        left = tuple(
            tuple({offset + k: v for k, v in space.left[a][m].items()}
                  for space, offset in zip(spaces, offsets) for m in range(space.rank))
            for a in range(left_algebra.dim))
    space = ModuleSpace(rank=total, algebra=algebra if has_right else None, right=right, left=left,
                        left_algebra=left_algebra if has_left else None, name=name)
    return space, offsets


@dataclass(frozen=True, eq=False)
class LinMap:
    """QQ-linear map; columns[i] is the image of the i-th source basis vector"""
    source: ModuleSpace
    target: ModuleSpace
    columns: tuple
    linearity: frozenset = field(default_factory=frozenset)

    def __call__(self, v: Vec) -> Vec:
        result: Vec = {}
        for i, val in v.items():
            add_into(result, self.columns[i], val)
        return result

    @cached_property
    def matrix(self) -> DomainMatrix:
        return matrix_from_columns(self.columns, self.target.rank)

    def compose(self, other: "LinMap") -> "LinMap":
        """self after other"""
        if other.target is not self.source:
            raise DomainMismatch("LinMap.compose -- target of the inner map is not the source of the outer map")
        return LinMap(source=other.source, target=self.target, columns=tuple(self(c) for c in other.columns),
                      linearity=self.linearity & other.linearity)

    def is_zero(self) -> bool:
        return all(not col for col in self.columns)


def linmap(source: ModuleSpace, target: ModuleSpace, columns: Sequence, linearity=()) -> LinMap:
    columns = tuple(vec_from_any(col, target.rank) for col in columns)
    if len(columns) != source.rank:
        raise ShapeError(f"linmap -- {len(columns)} columns for a source of rank {source.rank}")
    return LinMap(source=source, target=target, columns=columns, linearity=frozenset(linearity))


def identity_map(space: ModuleSpace) -> LinMap:
    return LinMap(source=space, target=space, columns=tuple(unit_vec(i) for i in range(space.rank)),
                  linearity=frozenset({"leftA", "rightA"}))


def check_linmap(f: LinMap, linearity: Optional[Sequence[str]] = None) -> VerificationReport:
    """re-check the declared linearity flags on all basis pairs"""
    report = VerificationReport(subject="linear map")
    flags = set(linearity if linearity is not None else f.linearity)
    if "rightA" in flags:
        witness = None
        for m, a in product(range(f.source.rank), range(f.source.algebra.dim)):
            if f(f.source.right[m][a]) != f.target.act_right(f.columns[m], unit_vec(a)):
                witness = [m, a]
                break
        report.add("rightA", witness is None, witness)
    if "leftA" in flags:
        witness = None
        for a, m in product(range(f.source.left_algebra.dim), range(f.source.rank)):
            if f(f.source.left[a][m]) != f.target.act_left(unit_vec(a), f.columns[m]):
                witness = [a, m]
                break
        report.add("leftA", witness is None, witness)
    return report


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Subspace of an ambient space with basis vectors that are 1 at their key coordinate and 0 at the
    other keys, so coordinates are read off at the keys.
    """
    ambient_rank: int
    basis: tuple
    keys: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, v: Vec) -> Vec:
        return {i: v[k] for i, k in enumerate(self.keys) if v.get(k)}

    def embed(self, coords: Vec) -> Vec:
        result: Vec = {}
        for i, val in coords.items():
            add_into(result, self.basis[i], val)
        return result

    def contains(self, v: Vec) -> bool:
        return self.embed(self.coords(v)) == v


def span_subspace(ambient_rank: int, vectors: Sequence[Vec]) -> Subspace:
    reduced, pivots = rref_rows(list(vectors), ambient_rank)
    return Subspace(ambient_rank=ambient_rank, basis=tuple(reduced), keys=tuple(pivots))


def kernel_subspace(ambient_rank: int, rows: Sequence[Vec]) -> Subspace:
    """kernel of the linear system given by rows (each row a functional on the ambient space)"""
    basis, free = sparse_kernel_keys(rows, ambient_rank)
    return Subspace(ambient_rank=ambient_rank, basis=tuple(basis), keys=tuple(free))


def map_kernel(f: LinMap) -> Subspace:
    rows: list[Vec] = [dict() for _ in range(f.target.rank)]
    for j, col in enumerate(f.columns):
        for i, val in col.items():
            rows[i][j] = val
    return kernel_subspace(f.source.rank, rows)


def submodule(space: ModuleSpace, sub: Subspace, name: str = "") -> tuple[ModuleSpace, LinMap]:
    """
    sub-(bi)module on a subspace closed under the actions; returns the module and its inclusion

    raises NotSubmodule with the offending basis pair otherwise
    """
    def restrict(v: Vec, witness):
        if not sub.contains(v):
            raise NotSubmodule(f"submodule -- {name or 'subspace'} is not closed under the action", witness=witness)
        return sub.coords(v)

    right = None
    if space.right is not None:
        right = tuple(tuple(restrict(space.act_right(b, unit_vec(a)), [i, a]) for a in range(space.algebra.dim))
                      for i, b in enumerate(sub.basis))
    left = None
    if space.left is not None:
        left = tuple(tuple(restrict(space.act_left(unit_vec(a), b), [a, i]) for i, b in enumerate(sub.basis))
                     for a in range(space.left_algebra.dim))
    module = ModuleSpace(rank=sub.dim, algebra=space.algebra if right is not None else None, right=right,
                         left=left, left_algebra=space.left_algebra if left is not None else None, name=name)
    inclusion = LinMap(source=module, target=space, columns=tuple(dict(b) for b in sub.basis),
                       linearity=frozenset({"leftA", "rightA"}))
    return module, inclusion


def plain_tensor_space(factors: Sequence[ModuleSpace]) -> ModuleSpace:
    rank = 1
    for f in factors:
        rank *= f.rank
    return ModuleSpace(rank=rank, name=" (x) ".join(f.name or "?" for f in factors))


@dataclass(frozen=True, eq=False)
class TensorSpace(ModuleSpace):
    """
    M_1 (x)_A ... (x)_A M_n as a quotient of the plain tensor. Each basis element remembers the
    word of factor basis indices it represents; `project` pushes plain tensors into the quotient.
    """
    factors: tuple = ()
    words: tuple = ()
    quotient: Optional[Quotient] = None
    prefix: Optional["TensorSpace"] = None
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def plain_index(self, word: tuple) -> int:
        index = 0
        for f, w in zip(self.factors, word):
            index = index * f.rank + w
        return index

    def plain_word(self, index: int) -> tuple:
        word = []
        for f in reversed(self.factors):
            index, w = divmod(index, f.rank)
            word.append(w)
        return tuple(reversed(word))

    def project_word(self, word: tuple) -> Vec:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        if len(self.factors) == 1:
            result = {word[0]: ONE}
        elif self.prefix is None:
            result = self.quotient.project_index(self.plain_index(word))
        else:
            last = self.factors[-1]
            result = {}
            for p, val in self.prefix.project_word(word[:-1]).items():
                add_into(result, self.quotient.project_index(p * last.rank + word[-1]), val)
        with self._lock:
            self._cache[word] = result
        return result

    def project(self, tensor: Tensor) -> Vec:
        result: Vec = {}
        for word, val in tensor.items():
            add_into(result, self.project_word(tuple(word)), val)
        return result

    def lift(self, v: Vec) -> Tensor:
        """plain tensor over the representative words"""
        return {self.words[i]: val for i, val in v.items()}

    def __repr__(self):
        return f"TensorSpace {self.name or '?'} (rank {self.rank}, {len(self.factors)} factors)"


# keyed by ids; a cached space holds the objects its key names, so an id is not reused while its entry lives
_TENSOR_CACHE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()
_TENSOR_LOCK = threading.RLock()


def clear_tensor_cache():
    with _TENSOR_LOCK:
        _TENSOR_CACHE.clear()
        _HOM_CACHE.clear()


def _middle_generators(left: ModuleSpace, right: ModuleSpace) -> list[Vec]:
    if left.right is None:
        raise MissingAction(f"tensor_over_A -- {left.name or 'left factor'} has no right action")
    if right.left is None:
        raise MissingAction(f"tensor_over_A -- {right.name or 'right factor'} has no left action")
    if left.algebra is not right.left_algebra:
        raise DomainMismatch("tensor_over_A -- the factors are modules over different algebras")
    return list(left.algebra.generators)


def _tensor_actions(space_rank: int, words: Sequence[tuple], factors: Sequence[ModuleSpace], project_word):
    first, last = factors[0], factors[-1]
    left = None
    if first.left is not None:
        left = []
        for a in range(first.left_algebra.dim):
            row = []
            for word in words:
                image: Vec = {}
                for w, val in first.left[a][word[0]].items():
                    add_into(image, project_word((w,) + word[1:]), val)
                row.append(image)
            left.append(tuple(row))
        left = tuple(left)
    right = None
    if last.right is not None:
        right = []
        for word in words:
            row = []
            for a in range(last.algebra.dim):
                image = {}
                for w, val in last.right[word[-1]][a].items():
                    add_into(image, project_word(word[:-1] + (w,)), val)
                row.append(image)
            right.append(tuple(row))
        right = tuple(right)
    return left, right


def tensor_chain(factors: Sequence[ModuleSpace], single_pass: bool = False) -> TensorSpace:
    """
    M_1 (x)_A ... (x)_A M_n, built by successive quotients (or in one quotient with single_pass).
    Results are cached per tuple of factor objects.
    """
    factors = tuple(factors)
    if not factors:
        raise ShapeError("tensor_chain -- needs at least one factor")
    key = (tuple(id(f) for f in factors), single_pass)
    with _TENSOR_LOCK:
        hit = _TENSOR_CACHE.get(key)
        if hit is not None:
            return hit

    name = " (x) ".join(f.name or "?" for f in factors)
    if len(factors) == 1:
        space = TensorSpace(rank=factors[0].rank, algebra=factors[0].algebra, right=factors[0].right,
                            left=factors[0].left, left_algebra=factors[0].left_algebra, name=name,
                            factors=factors, words=tuple((i,) for i in range(factors[0].rank)),
                            quotient=sparse_quotient(factors[0].rank, []))
    elif single_pass:
        space = _single_pass_tensor(factors, name)
    else:
        prefix = tensor_chain(factors[:-1])
        last = factors[-1]
        gens = _middle_generators(prefix, last)
        relations = []
        for g in gens:
            for p in range(prefix.rank):
                pg = prefix.act_right(unit_vec(p), g)
                for n in range(last.rank):
                    rel: Vec = {}
                    for q, val in pg.items():
                        add_into(rel, {q * last.rank + n: val})
                    for q, val in last.act_left(g, unit_vec(n)).items():
                        add_into(rel, {p * last.rank + q: -val})
                    if rel:
                        relations.append(rel)
        quotient = sparse_quotient(prefix.rank * last.rank, relations)
        words = tuple(prefix.words[r // last.rank] + (r % last.rank,) for r in quotient.representatives)
        space = TensorSpace(rank=quotient.dim, name=name, factors=factors, words=words, quotient=quotient,
                            prefix=prefix)
        left, right = _tensor_actions(space.rank, words, factors, space.project_word)
        space = _with_actions(space, left, right)
    LOG.debug("tensor_chain: %s has rank %d", name, space.rank)
    with _TENSOR_LOCK:
        _TENSOR_CACHE[key] = space
    return space


def _with_actions(space: TensorSpace, left, right) -> TensorSpace:
    first, last = space.factors[0], space.factors[-1]
    return TensorSpace(rank=space.rank, algebra=last.algebra if right is not None else None, right=right,
                       left=left, left_algebra=first.left_algebra if left is not None else None,
                       name=space.name, factors=space.factors, words=space.words, quotient=space.quotient,
                       prefix=space.prefix)


def _single_pass_tensor(factors: tuple, name: str) -> TensorSpace:
    ranks = [f.rank for f in factors]
    total = 1
    for r in ranks:
        total *= r
    shell = TensorSpace(rank=0, factors=factors)
    relations = []
    for pos in range(len(factors) - 1):
        gens = _middle_generators(factors[pos], factors[pos + 1])
        others = [range(r) for r in ranks]
        for word in product(*others):
            for g in gens:
                rel: Tensor = {}
                for w, val in factors[pos].act_right(unit_vec(word[pos]), g).items():
                    tensor_add(rel, {word[:pos] + (w,) + word[pos + 1:]: val})
                for w, val in factors[pos + 1].act_left(g, unit_vec(word[pos + 1])).items():
                    tensor_add(rel, {word[:pos + 1] + (w,) + word[pos + 2:]: -val})
                if rel:
                    relations.append({shell.plain_index(k): v for k, v in rel.items()})
    quotient = sparse_quotient(total, relations)
    words = tuple(shell.plain_word(r) for r in quotient.representatives)
    space = TensorSpace(rank=quotient.dim, name=name, factors=factors, words=words, quotient=quotient)
    left, right = _tensor_actions(space.rank, words, factors, space.project_word)
    return _with_actions(space, left, right)


def tensor_over_A(M: ModuleSpace, N: ModuleSpace) -> tuple[TensorSpace, LinMap]:
    """
    M (x)_A N with the canonical projection from the plain tensor

    :return: (quotient space, projection LinMap from M (x)_QQ N)
    """
    space = tensor_chain([M, N])
    plain = plain_tensor_space([M, N])
    projection = LinMap(source=plain, target=space,
                        columns=tuple(space.project_word(divmod(i, N.rank)) for i in range(plain.rank)))
    return space, projection


def tensor_power_over_A(C: ModuleSpace, n: int, single_pass: bool = False) -> tuple[ModuleSpace, LinMap]:
    """
    C^{(x)_A n}; n = 0 gives the regular bimodule A, whose projection sends 1 to the unit
    """
    if n < 0:
        raise ShapeError("tensor_power_over_A -- n must be non-negative")
    if C.right is None or C.left is None:
        raise MissingAction("tensor_power_over_A -- C must be a bimodule")
    if n == 0:
        A = regular_bimodule(C.algebra)
        return A, LinMap(source=ModuleSpace(rank=1), target=A, columns=(dict(C.algebra.unit),))
    space = tensor_chain([C] * n, single_pass=single_pass)
    plain = plain_tensor_space([C] * n)
    projection = LinMap(source=plain, target=space,
                        columns=tuple(space.project_word(space.plain_word(i)) for i in range(plain.rank)))
    return space, projection


def canonical_iso(source: TensorSpace, target: TensorSpace) -> LinMap:
    """the iso between two quotient presentations of the same tensor product, through words"""
    if [id(f) for f in source.factors] != [id(f) for f in target.factors]:
        raise DomainMismatch("canonical_iso -- the tensor spaces have different factors")
    return LinMap(source=source, target=target,
                  columns=tuple(target.project_word(w) for w in source.words),
                  linearity=frozenset({"leftA", "rightA"}))


@dataclass(frozen=True, eq=False)
class HomSpace(ModuleSpace):
    """
    Hom_A(M, N) for right A-modules. A map f is stored through its values f(e_m) in N; its
    coordinates are the values at the free unknowns of the linearity system.
    """
    source: Optional[ModuleSpace] = None
    target: Optional[ModuleSpace] = None
    basis_maps: tuple = ()
    free_vars: tuple = ()

    def var(self, m: int, n: int) -> int:
        return m * self.target.rank + n

    def columns(self, coords: Vec) -> list[Vec]:
        """the map as the list of images f(e_m)"""
        cols: list[Vec] = [dict() for _ in range(self.source.rank)]
        for i, val in coords.items():
            for v, x in self.basis_maps[i].items():
                m, n = divmod(v, self.target.rank)
                add_into(cols[m], {n: x}, val)
        return cols

    def coordinates(self, columns: Sequence[Vec]) -> Vec:
        """coordinates of the map with images `columns` (assumed right A-linear)"""
        result = {}
        for i, v in enumerate(self.free_vars):
            m, n = divmod(v, self.target.rank)
            val = columns[m].get(n)
            if val:
                result[i] = val
        return result

    def contains(self, columns: Sequence[Vec]) -> bool:
        return self.columns(self.coordinates(columns)) == [dict(c) for c in columns]

    def evaluate(self, coords: Vec, m: Vec) -> Vec:
        cols = self.columns(coords)
        result: Vec = {}
        for i, val in m.items():
            add_into(result, cols[i], val)
        return result

    def as_linmap(self, coords: Vec) -> LinMap:
        return LinMap(source=self.source, target=self.target, columns=tuple(self.columns(coords)),
                      linearity=frozenset({"rightA"}))

    def __repr__(self):
        return f"HomSpace {self.name or '?'} (rank {self.rank})"


_HOM_CACHE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


def hom_right_A(M: ModuleSpace, N: ModuleSpace) -> HomSpace:
    """
    Hom_A(M, N) for right A-modules M, N, from the linearity system over algebra generators.
    If M also has a left action, the result is a right module by (f.a)(u) = f(a.u).
    """
    key = (id(M), id(N))
    with _TENSOR_LOCK:
        hit = _HOM_CACHE.get(key)
        if hit is not None:
            return hit
    if M.right is None or N.right is None:
        raise MissingAction("hom_right_A -- both modules need right actions")
    if M.algebra is not N.algebra:
        raise DomainMismatch("hom_right_A -- the modules are over different algebras")
    nm, nn = M.rank, N.rank
    equations = []
    for g in M.algebra.generators:
        # ng[n] = {q: coefficient of e_n in e_q . g}
        ng: list[Vec] = [dict() for _ in range(nn)]
        for q in range(nn):
            for n, val in N.act_right(unit_vec(q), g).items():
                ng[n][q] = val
        for m in range(nm):
            mg = M.act_right(unit_vec(m), g)
            for n in range(nn):
                row: Vec = {}
                for q, val in mg.items():
                    add_into(row, {q * nn + n: val})
                for q, val in ng[n].items():
                    add_into(row, {m * nn + q: -val})
                if row:
                    equations.append(row)
    basis, free = sparse_kernel_keys(equations, nm * nn)
    free = tuple(free)
    name = f"Hom({M.name or '?'}, {N.name or '?'})"
    shell = HomSpace(rank=len(basis), name=name, source=M, target=N, basis_maps=tuple(basis), free_vars=free)
    right = None
    if M.left is not None:
        right = []
        for b in range(shell.rank):
            cols = shell.columns({b: ONE})
            row = []
            for a in range(M.left_algebra.dim):
                new_cols = []
                for m in range(nm):
                    image: Vec = {}
                    for q, val in M.left[a][m].items():
                        add_into(image, cols[q], val)
                    new_cols.append(image)
                row.append(shell.coordinates(new_cols))
            right.append(tuple(row))
        right = tuple(right)
    space = HomSpace(rank=shell.rank, algebra=M.left_algebra if right is not None else None, right=right,
                     name=name, source=M, target=N, basis_maps=shell.basis_maps, free_vars=free)
    with _TENSOR_LOCK:
        _HOM_CACHE[key] = space
    return space


def adjunction_iso(M: ModuleSpace, L: ModuleSpace, N: ModuleSpace) -> tuple[LinMap, LinMap]:
    """
    Phi: Hom_A(M (x)_A L, N) -> Hom_A(M, Hom_A(L, N)), f -> (m -> (l -> f(m (x) l))), and its
    inverse Psi, g -> (m (x) l -> g(m)(l))
    """
    if L.left is None:
        raise MissingAction("adjunction_iso -- L must be a bimodule")
    ML = tensor_chain([M, L])
    X = hom_right_A(ML, N)
    inner = hom_right_A(L, N)
    Y = hom_right_A(M, inner)
    phi_columns = []
    for b in range(X.rank):
        cols = X.columns({b: ONE})
        outer = []
        for m in range(M.rank):
            values = []
            for l_index in range(L.rank):
                image: Vec = {}
                for t, val in ML.project_word((m, l_index)).items():
                    add_into(image, cols[t], val)
                values.append(image)
            outer.append(inner.coordinates(values))
        phi_columns.append(Y.coordinates(outer))
    psi_columns = []
    for b in range(Y.rank):
        outer = Y.columns({b: ONE})
        values = [inner.evaluate(outer[w[0]], unit_vec(w[1])) for w in ML.words]
        psi_columns.append(X.coordinates(values))
    phi = LinMap(source=X, target=Y, columns=tuple(phi_columns), linearity=frozenset({"rightA"}))
    psi = LinMap(source=Y, target=X, columns=tuple(psi_columns), linearity=frozenset({"rightA"}))
    return phi, psi


def dual_right_module(P: ModuleSpace, name: str = "") -> tuple[ModuleSpace, HomSpace]:
    """
    P* = Hom_A(P, A) with (a chi)(p) = a chi(p), and (chi b)(p) = chi(b p) when P has a left action;
    returns P* and the hom space that evaluates its elements
    """
    A = P.algebra
    H = hom_right_A(P, regular_bimodule(A))
    left = tuple(tuple(H.coordinates([A.mul(unit_vec(a), col) for col in H.columns({chi: ONE})])
                       for chi in range(H.rank)) for a in range(A.dim))
    dual = ModuleSpace(rank=H.rank, algebra=H.algebra, right=H.right, left=left, left_algebra=A,
                       name=name or f"{P.name or 'P'}*")
    return dual, H


def check_inverse(f: LinMap, g: LinMap) -> VerificationReport:
    """g after f and f after g are identities"""
    report = VerificationReport(subject="inverse pair")
    witness = next((i for i in range(f.source.rank) if g(f.columns[i]) != unit_vec(i)), None)
    report.add("left_inverse", witness is None, witness)
    witness = next((i for i in range(g.source.rank) if f(g.columns[i]) != unit_vec(i)), None)
    report.add("right_inverse", witness is None, witness)
    return report


def maps_equal(f_columns: Sequence[Vec], g_columns: Sequence[Vec]) -> Optional[int]:
    """index of the first differing column, or None"""
    for i, (a, b) in enumerate(zip(f_columns, g_columns)):
        if a != b:
            return i
    return None


# standard algebras

def rationals() -> Algebra:
    return Algebra(dim=1, unit={0: ONE}, table=(({0: ONE},),), name="Q", labels=("1",))


def matrix_algebra(n: int, base: Optional[Algebra] = None) -> Algebra:
    """M_n(base); basis E_ij (x) b_alpha at index (i*n + j)*dim(base) + alpha"""
    base = base or rationals()
    d = base.dim
    size = n * n * d
    table = []
    for i, j, alpha in product(range(n), range(n), range(d)):
        row = []
        for k, l_index, beta in product(range(n), range(n), range(d)):
            if j != k:
                row.append({})
            else:
                row.append({(i * n + l_index) * d + gamma: val for gamma, val in base.table[alpha][beta].items()})
        table.append(tuple(row))
    unit: Vec = {}
    for i in range(n):
        for alpha, val in base.unit.items():
            unit[(i * n + i) * d + alpha] = val
    labels = None
    if d == 1:
        labels = tuple(f"E{i + 1}{j + 1}" for i in range(n) for j in range(n))
    name = f"M{n}({base.name})"
    return Algebra(dim=size, unit=unit, table=tuple(table), name=name, labels=labels)


def cyclic_group_algebra(n: int) -> Algebra:
    """QQ[Z/n] with basis g^0..g^{n-1}"""
    table = tuple(tuple({(i + j) % n: ONE} for j in range(n)) for i in range(n))
    return Algebra(dim=n, unit={0: ONE}, table=table, name=f"Q[Z/{n}]",
                   labels=tuple("1" if i == 0 else f"g^{i}" for i in range(n)))


def upper_triangular(n: int) -> Algebra:
    """upper triangular n x n matrices, basis E_ij with i <= j in row-major order"""
    pairs = [(i, j) for i in range(n) for j in range(n) if i <= j]
    index = {p: k for k, p in enumerate(pairs)}
    table = tuple(tuple({index[(i, l_index)]: ONE} if j == k else {} for (k, l_index) in pairs) for (i, j) in pairs)
    unit = {index[(i, i)]: ONE for i in range(n)}
    return Algebra(dim=len(pairs), unit=unit, table=table, name=f"T{n}",
                   labels=tuple(f"E{i + 1}{j + 1}" for i, j in pairs))

