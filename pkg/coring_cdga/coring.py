"""
A-corings: a bimodule C with a coassociative, counital comultiplication into C (x)_A C.

The comultiplication is held as a lift into the plain tensor C (x)_QQ C (one dict of words per basis
vector); every comparison happens after projecting to the quotient.
"""
import threading
import weakref
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Optional, Sequence

from coring_cdga.algmod import (Algebra, AlgebraMap, LinMap, ModuleSpace, Subspace, Tensor, TensorSpace,
                                check_algebra_map, check_module, compose_algebra_maps, identity_algebra_map,
                                identity_map, kernel_subspace, regular_bimodule, span_subspace, submodule,
                                tensor_add, tensor_chain)
from coring_cdga.errors import DomainMismatch, NoBasePoint, NotBased, ShapeError
from coring_cdga.exactla import Vec, add_into, scalar, sparse_solve, unit_vec, vec_from_any, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Coring:
    algebra: Algebra
    C: ModuleSpace
    delta_lift: tuple
    counit: tuple
    name: str = ""

    @cached_property
    def CC(self) -> TensorSpace:
        return tensor_chain([self.C, self.C])

    @cached_property
    def CCC(self) -> TensorSpace:
        return tensor_chain([self.C, self.C, self.C])

    @cached_property
    def A(self) -> ModuleSpace:
        return regular_bimodule(self.algebra)

    @property
    def rank(self) -> int:
        return self.C.rank

    def comul(self, c: Vec) -> Vec:
        """Delta(c) in C (x)_A C"""
        result: Vec = {}
        for i, val in c.items():
            add_into(result, self._comul_basis[i], val)
        return result

    @cached_property
    def _comul_basis(self) -> tuple:
        return tuple(self.CC.project(lift) for lift in self.delta_lift)

    def comul_words(self, c: Vec) -> Tensor:
        """Delta(c) as a plain tensor over representative words"""
        return self.CC.lift(self.comul(c))

    def eps(self, c: Vec) -> Vec:
        result: Vec = {}
        for i, val in c.items():
            add_into(result, self.counit[i], val)
        return result

    @cached_property
    def delta_map(self) -> LinMap:
        return LinMap(source=self.C, target=self.CC, columns=self._comul_basis,
                      linearity=frozenset({"leftA", "rightA"}))

    @cached_property
    def counit_map(self) -> LinMap:
        return LinMap(source=self.C, target=self.A, columns=tuple(self.counit),
                      linearity=frozenset({"leftA", "rightA"}))

    def label(self, i: int) -> str:
        return self.C.label(i)

    def __repr__(self):
        return f"Coring {self.name or '?'} (rank {self.rank} over {self.algebra.name or '?'})"


@dataclass(frozen=True, eq=False)
class BasedCoring:
    coring: Coring
    base_point: Vec

    @property
    def name(self) -> str:
        return self.coring.name


@dataclass(frozen=True, eq=False)
class CoringMorphism:
    source: Coring
    target: Coring
    f0: AlgebraMap
    f1: LinMap


@dataclass
class BasePoints:
    witness: Optional[Vec]
    dimension: int

    @property
    def found(self) -> bool:
        return self.witness is not None

    def require(self) -> Vec:
        if self.witness is None:
            raise NoBasePoint("find_base_points -- the counit is not surjective onto the unit")
        return self.witness


@dataclass(frozen=True, eq=False)
class Splitting:
    """C = Ax (+) C+ = xA (+) C+ for a base point x"""
    based: BasedCoring
    cplus: ModuleSpace
    inclusion: LinMap
    kernel: Subspace
    pi_left: LinMap
    pi_right: LinMap
    report: VerificationReport = field(repr=False, default=None)


def make_coring(algebra: Algebra, C: ModuleSpace, delta_lift: Sequence, counit: Sequence, name: str = "") -> Coring:
    """
    :param delta_lift: per basis vector of C, a dict {(i, j): scalar} lifting Delta(e_c) to C (x)_QQ C
    :param counit: per basis vector of C, the vector eps(e_c) in A
    """
    if len(delta_lift) != C.rank or len(counit) != C.rank:
        raise ShapeError(f"make_coring -- expected {C.rank} comultiplication and counit entries")
    lifts = tuple(tensor_from_any(lift) for lift in delta_lift)
    for lift in lifts:
        for word in lift:
            if len(word) != 2 or not all(0 <= w < C.rank for w in word):
                raise ShapeError(f"make_coring -- bad comultiplication word {word}")
    counit = tuple(vec_from_any(eps, algebra.dim) for eps in counit)
    if C.algebra is not algebra or C.left_algebra is not algebra:
        raise DomainMismatch("make_coring -- C must be an A-bimodule over the given algebra")
    return Coring(algebra=algebra, C=C, delta_lift=lifts, counit=counit, name=name)


def tensor_from_any(lift) -> Tensor:
    result: Tensor = {}
    for word, val in lift.items():
        val = scalar(val)
        if val:
            tensor_add(result, {tuple(word): val})
    return result


def _first(items, predicate):
    return next((item for item in items if predicate(item)), None)


def check_coring(c: Coring) -> VerificationReport:
    """bimodule axioms, bilinearity of Delta and eps, coassociativity and both counit laws"""
    C, A = c.C, c.algebra
    report = VerificationReport(subject=f"coring {c.name}".strip())
    report.extend(check_module(C), prefix="C")

    witness = _first(product(range(C.rank), range(A.dim)),
                     lambda p: c.comul(C.right[p[0]][p[1]]) != c.CC.act_right(c.comul(unit_vec(p[0])), unit_vec(p[1])))
    report.add("delta.rightA", witness is None, list(witness) if witness else None)
    witness = _first(product(range(A.dim), range(C.rank)),
                     lambda p: c.comul(C.left[p[0]][p[1]]) != c.CC.act_left(unit_vec(p[0]), c.comul(unit_vec(p[1]))))
    report.add("delta.leftA", witness is None, list(witness) if witness else None)
    witness = _first(product(range(C.rank), range(A.dim)),
                     lambda p: c.eps(C.right[p[0]][p[1]]) != A.mul(c.counit[p[0]], unit_vec(p[1])))
    report.add("counit.rightA", witness is None, list(witness) if witness else None)
    witness = _first(product(range(A.dim), range(C.rank)),
                     lambda p: c.eps(C.left[p[0]][p[1]]) != A.mul(unit_vec(p[0]), c.counit[p[1]]))
    report.add("counit.leftA", witness is None, list(witness) if witness else None)

    witness = _first(range(C.rank), lambda i: delta_left(c, unit_vec(i)) != delta_right(c, unit_vec(i)))
    report.add("coassociativity", witness is None, _basis_witness(c.C, witness))
    witness = _first(range(C.rank), lambda i: counit_left(c, unit_vec(i)) != unit_vec(i))
    report.add("counitality.left", witness is None, _basis_witness(c.C, witness))
    witness = _first(range(C.rank), lambda i: counit_right(c, unit_vec(i)) != unit_vec(i))
    report.add("counitality.right", witness is None, _basis_witness(c.C, witness))
    for failure in report.failures:
        LOG.info("check_coring %s: %s failed at %s", c.name, failure.name, failure.witness)
    return report


def _basis_witness(space: ModuleSpace, index: Optional[int]):
    if index is None:
        return None
    return {"basis": index, "label": space.label(index)}


def delta_left(c: Coring, v: Vec) -> Vec:
    """(Delta (x) id) Delta(v) in C^{(x)3}"""
    result: Tensor = {}
    for (i, j), val in c.comul_words(v).items():
        for (p, q), w in c.comul_words(unit_vec(i)).items():
            tensor_add(result, {(p, q, j): val * w})
    return c.CCC.project(result)


def delta_right(c: Coring, v: Vec) -> Vec:
    """(id (x) Delta) Delta(v) in C^{(x)3}"""
    result: Tensor = {}
    for (i, j), val in c.comul_words(v).items():
        for (p, q), w in c.comul_words(unit_vec(j)).items():
            tensor_add(result, {(i, p, q): val * w})
    return c.CCC.project(result)


def counit_left(c: Coring, v: Vec) -> Vec:
    """(eps (x) id) Delta(v), identified with an element of C"""
    result: Vec = {}
    for (i, j), val in c.comul_words(v).items():
        add_into(result, c.C.act_left(c.counit[i], unit_vec(j)), val)
    return result


def counit_right(c: Coring, v: Vec) -> Vec:
    result: Vec = {}
    for (i, j), val in c.comul_words(v).items():
        add_into(result, c.C.act_right(unit_vec(i), c.counit[j]), val)
    return result


def tensor_two(c: Coring, u: Vec, v: Vec) -> Vec:
    """u (x) v projected into C (x)_A C"""
    result: Tensor = {}
    for i, a in u.items():
        for j, b in v.items():
            tensor_add(result, {(i, j): a * b})
    return c.CC.project(result)


def find_base_points(c: Coring) -> BasePoints:
    """
    solve eps(x) = 1; the witness is the solution with pivots on the earliest basis vectors and the free
    coordinates zero, which for the matrix coring is E_11

    :return: BasePoints with the witness (None if eps misses the unit) and the solution-space dimension
    """
    rows: list[Vec] = [dict() for _ in range(c.algebra.dim)]
    for j, eps in enumerate(c.counit):
        for k, val in eps.items():
            rows[k][j] = val
    rhs = [c.algebra.unit.get(k, 0) for k in range(c.algebra.dim)]
    witness = sparse_solve(rows, rhs, c.rank)
    if witness is None:
        return BasePoints(witness=None, dimension=0)
    rank = len(kernel_subspace(c.rank, rows).basis)
    return BasePoints(witness=witness, dimension=rank)


def is_base_point(c: Coring, x: Vec) -> bool:
    return c.eps(x) == c.algebra.unit


def is_grouplike(c: Coring, x: Vec) -> bool:
    """Delta(x) = x (x) x and eps(x) = 1"""
    return is_base_point(c, x) and c.comul(x) == tensor_two(c, x, x)


def based(c: Coring, x: Optional[Vec] = None) -> BasedCoring:
    """attach a base point, the canonical one if x is None"""
    if x is None:
        x = find_base_points(c).require()
    if not is_base_point(c, x):
        raise NotBased(f"based -- eps(x) != 1 for {c.name or 'coring'}", witness=witness_vec(c.eps(x)))
    return BasedCoring(coring=c, base_point=dict(x))


def split_at(b: BasedCoring) -> Splitting:
    """
    pi_L(c) = c - eps(c)x and pi_R(c) = c - x eps(c) onto C+ = ker eps, verified as splittings of the
    left and right module structures
    """
    c, x = b.coring, b.base_point
    if not is_base_point(c, x):
        raise NotBased("split_at -- eps(x) != 1", witness=witness_vec(c.eps(x)))
    with _SPLIT_LOCK:
        cached = _SPLIT_CACHE.get(id(b))
    if cached is not None and cached.based is b:
        return cached
    kernel = kernel_subspace(c.rank, _counit_rows(c))
    cplus, inclusion = submodule(c.C, kernel, name=f"{c.C.name or 'C'}+")
    pi_left_cols, pi_right_cols = [], []
    for i in range(c.rank):
        e = unit_vec(i)
        pi_left_cols.append(kernel.coords(vec_sub(e, c.C.act_left(c.counit[i], x))))
        pi_right_cols.append(kernel.coords(vec_sub(e, c.C.act_right(x, c.counit[i]))))
    pi_left = LinMap(source=c.C, target=cplus, columns=tuple(pi_left_cols), linearity=frozenset({"leftA"}))
    pi_right = LinMap(source=c.C, target=cplus, columns=tuple(pi_right_cols), linearity=frozenset({"rightA"}))

    report = VerificationReport(subject=f"splitting of {c.name}".strip())
    witness = _first(range(cplus.rank), lambda i: pi_left(inclusion.columns[i]) != unit_vec(i))
    report.add("pi_left.retraction", witness is None, witness)
    witness = _first(range(cplus.rank), lambda i: pi_right(inclusion.columns[i]) != unit_vec(i))
    report.add("pi_right.retraction", witness is None, witness)
    ax = span_subspace(c.rank, [c.C.act_left(unit_vec(a), x) for a in range(c.algebra.dim)])
    xa = span_subspace(c.rank, [c.C.act_right(x, unit_vec(a)) for a in range(c.algebra.dim)])
    for side, part in (("left", ax), ("right", xa)):
        total = span_subspace(c.rank, list(part.basis) + list(kernel.basis))
        report.add(f"direct_sum.{side}", part.dim + kernel.dim == c.rank and total.dim == c.rank,
                   {"dim_Ax": part.dim, "dim_C+": kernel.dim, "dim_C": c.rank})
    witness = _first(range(ax.dim), lambda i: pi_left(ax.basis[i]) != {})
    report.add("kernel.pi_left_is_Ax", witness is None, witness)
    witness = _first(range(xa.dim), lambda i: pi_right(xa.basis[i]) != {})
    report.add("kernel.pi_right_is_xA", witness is None, witness)
    splitting = Splitting(based=b, cplus=cplus, inclusion=inclusion, kernel=kernel, pi_left=pi_left,
                          pi_right=pi_right, report=report)
    with _SPLIT_LOCK:
        _SPLIT_CACHE[id(b)] = splitting
    return splitting


# a splitting holds its based coring, so the id key stays valid while the entry lives
_SPLIT_CACHE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()
_SPLIT_LOCK = threading.Lock()


def _counit_rows(c: Coring) -> list[Vec]:
    rows: list[Vec] = [dict() for _ in range(c.algebra.dim)]
    for j, eps in enumerate(c.counit):
        for k, val in eps.items():
            rows[k][j] = val
    return rows


def section_from_base_point(b: BasedCoring) -> LinMap:
    """the left A-linear section a -> a x of eps"""
    c = b.coring
    return LinMap(source=c.A, target=c.C,
                  columns=tuple(c.C.act_left(unit_vec(a), b.base_point) for a in range(c.algebra.dim)),
                  linearity=frozenset({"leftA"}))


def base_point_from_section(c: Coring, section: LinMap) -> Vec:
    """x = s(1) for a left A-linear section s of eps; NotBased if s is not a section"""
    for a in range(c.algebra.dim):
        if c.eps(section.columns[a]) != unit_vec(a):
            raise NotBased("base_point_from_section -- eps . s is not the identity", witness=a)
        if section.columns[a] != c.C.act_left(unit_vec(a), section(c.algebra.unit)):
            raise NotBased("base_point_from_section -- s is not left A-linear", witness=a)
    return section(c.algebra.unit)


def check_coring_morphism(m: CoringMorphism) -> VerificationReport:
    """f0 an algebra map, f1 bilinear along f0, counit and comultiplication preserved"""
    C, D = m.source, m.target
    report = VerificationReport(subject="coring morphism")
    report.extend(check_algebra_map(m.f0), prefix="f0")
    f0, f1 = m.f0, m.f1
    witness = _first(product(range(C.algebra.dim), range(C.rank)),
                     lambda p: f1(C.C.left[p[0]][p[1]]) != D.C.act_left(f0.columns[p[0]], f1.columns[p[1]]))
    report.add("f1.leftA", witness is None, list(witness) if witness else None)
    witness = _first(product(range(C.rank), range(C.algebra.dim)),
                     lambda p: f1(C.C.right[p[0]][p[1]]) != D.C.act_right(f1.columns[p[0]], f0.columns[p[1]]))
    report.add("f1.rightA", witness is None, list(witness) if witness else None)
    witness = _first(range(C.rank), lambda i: D.eps(f1.columns[i]) != f0(C.counit[i]))
    report.add("counit", witness is None, _basis_witness(C.C, witness))
    witness = _first(range(C.rank), lambda i: D.comul(f1.columns[i]) != push_tensor(m, C.comul_words(unit_vec(i))))
    report.add("comultiplication", witness is None, _basis_witness(C.C, witness))
    return report


def push_tensor(m: CoringMorphism, tensor: Tensor) -> Vec:
    """(f1 (x) f1) applied to a plain tensor over C, projected into D (x)_B D"""
    result: Tensor = {}
    for (i, j), val in tensor.items():
        for p, a in m.f1.columns[i].items():
            for q, b in m.f1.columns[j].items():
                tensor_add(result, {(p, q): val * a * b})
    return m.target.CC.project(result)


def identity_coring_morphism(c: Coring) -> CoringMorphism:
    return CoringMorphism(source=c, target=c, f0=identity_algebra_map(c.algebra), f1=identity_map(c.C))


def compose_coring_morphisms(g: CoringMorphism, f: CoringMorphism) -> CoringMorphism:
    if f.target is not g.source:
        raise DomainMismatch("compose_coring_morphisms -- target of f is not the source of g")
    return CoringMorphism(source=f.source, target=g.target, f0=compose_algebra_maps(g.f0, f.f0),
                          f1=LinMap(source=f.source.C, target=g.target.C,
                                    columns=tuple(g.f1(col) for col in f.f1.columns)))


def trivial_coring(algebra: Algebra) -> Coring:
    """C = A with Delta(a) = a (x) 1 and eps = id"""
    A = regular_bimodule(algebra)
    lifts = []
    for i in range(algebra.dim):
        lift: Tensor = {}
        for k, val in algebra.unit.items():
            tensor_add(lift, {(i, k): val})
        lifts.append(lift)
    return Coring(algebra=algebra, C=A, delta_lift=tuple(lifts),
                  counit=tuple(unit_vec(i) for i in range(algebra.dim)), name=f"trivial({algebra.name})")
