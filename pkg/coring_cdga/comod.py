"""
Right comodules over a coring, complexes of comodules as a dg category, and the passage between
such complexes and integrable Z-connections.

A morphism of complexes of degree s is a family of right A-linear components
phi^k_l: M^l -> N^{l+s-k} (x)_A C^{(x)k}; components are stored by (k, l) as columns in the block
space N^{l+s-k} (x)_A C^{(x)k}, and absent components are zero.
"""
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Optional, Sequence, Union

from coring_cdga.algmod import LinMap, ModuleSpace, Tensor, direct_sum, free_right_module, hom_right_A, \
    tensor_add, tensor_chain
from coring_cdga.cdga import SemiFreeCDGA
from coring_cdga.coring import BasedCoring, Coring, is_base_point
from coring_cdga.equiv import TBasedResult, TFlatResult, UResult, t_based, t_flat, u_functor
from coring_cdga.errors import DomainMismatch, HigherComponentsPresent, NotBased, NotClosed, NotComodule, \
    NotComplex, NotDegreeZero, ShapeError
from coring_cdga.exactla import ONE, Vec, add_into, parity_sign, scalar, sparse_solve, unit_vec, vec_from_any
from coring_cdga.modules import ConnectionModule, GradedHomSpace, check_curved_module, connection_module, \
    graded_hom_space
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)

DG_TENSOR_NOTE = ("dg differential: the first term is read as (delta_N (x) C^(x)k) phi^k_l, the tensor power "
                  "following the component index k so that degrees match")


def block_space(space: ModuleSpace, C: ModuleSpace, k: int) -> ModuleSpace:
    """space (x)_A C^{(x)k}; k = 0 is the space itself"""
    return space if k == 0 else tensor_chain([space] + [C] * k)


def block_words(space: ModuleSpace, C: ModuleSpace, k: int, v: Vec) -> Tensor:
    if k == 0:
        return {(i,): val for i, val in v.items()}
    return block_space(space, C, k).lift(v)


def block_project(space: ModuleSpace, C: ModuleSpace, k: int, tensor: Tensor) -> Vec:
    if k == 0:
        result: Vec = {}
        for word, val in tensor.items():
            add_into(result, {word[0]: ONE}, val)
        return result
    return block_space(space, C, k).project(tensor)


@dataclass(frozen=True, eq=False)
class Comodule:
    coring: Coring
    M: ModuleSpace
    rho: LinMap
    name: str = ""

    @property
    def rank(self) -> int:
        return self.M.rank

    @cached_property
    def MC(self) -> ModuleSpace:
        return tensor_chain([self.M, self.coring.C])

    def coact_words(self, m: Vec) -> Tensor:
        return self.MC.lift(self.rho(m))

    def __repr__(self):
        return f"Comodule {self.name or '?'} (rank {self.rank} over {self.coring.name or '?'})"


def make_comodule(coring: Coring, M: ModuleSpace, rho_lift: Sequence, name: str = "",
                  check: bool = True) -> Comodule:
    """
    comodule from a coaction given per basis vector as a plain tensor of words (m, c) or as a vector of
    M (x)_A C

    raises NotComodule with the failing check when check is set
    """
    if len(rho_lift) != M.rank:
        raise ShapeError(f"make_comodule -- {len(rho_lift)} coaction values for a module of rank {M.rank}")
    if M.rank and M.algebra is not coring.algebra:
        raise DomainMismatch("make_comodule -- M is not a module over the algebra of the coring")
    MC = tensor_chain([M, coring.C])
    columns = []
    for value in rho_lift:
        if isinstance(value, dict) and value and isinstance(next(iter(value)), tuple):
            columns.append(MC.project(value))
        else:
            columns.append(vec_from_any(value, MC.rank))
    rho = LinMap(source=M, target=MC, columns=tuple(columns), linearity=frozenset({"rightA"}))
    comodule = Comodule(coring=coring, M=M, rho=rho, name=name)
    if check:
        report = check_comodule(comodule)
        if not report.passed:
            raise report.first_failure_error(NotComodule, f"make_comodule -- {name or 'M'} is not a comodule")
    return comodule


def regular_comodule(coring: Coring) -> Comodule:
    """C over itself with rho = Delta"""
    return Comodule(coring=coring, M=coring.C, rho=coring.delta_map, name=coring.C.name or "C")


def zero_comodule(coring: Coring) -> Comodule:
    M = ModuleSpace(rank=0, algebra=coring.algebra, right=(), name="0")
    return Comodule(coring=coring, M=M, rho=LinMap(source=M, target=tensor_chain([M, coring.C]), columns=()),
                    name="0")


def check_comodule(m: Comodule) -> VerificationReport:
    """right A-linearity of rho, coassociativity and counitality on every basis vector"""
    c, M = m.coring, m.M
    report = VerificationReport(subject=f"comodule {m.name}".strip())
    if not M.rank:
        report.add("coassociativity", True)
        report.add("counitality", True)
        return report
    MC = m.MC
    witness = next(([i, a] for i, a in product(range(M.rank), range(c.algebra.dim))
                    if m.rho(M.right[i][a]) != MC.act_right(m.rho.columns[i], unit_vec(a))), None)
    report.add("rho.rightA", witness is None, witness)
    MCC = tensor_chain([M, c.C, c.C])
    witness = None
    for i in range(M.rank):
        left: Tensor = {}
        right: Tensor = {}
        for (p, q), val in m.coact_words(unit_vec(i)).items():
            for (r, s), w in m.coact_words(unit_vec(p)).items():
                tensor_add(left, {(r, s, q): val * w})
            for (r, s), w in c.comul_words(unit_vec(q)).items():
                tensor_add(right, {(p, r, s): val * w})
        if MCC.project(left) != MCC.project(right):
            witness = {"basis": i, "label": M.label(i)}
            break
    report.add("coassociativity", witness is None, witness)
    witness = next(({"basis": i, "label": M.label(i)} for i in range(M.rank)
                    if counit_contract(m, m.rho.columns[i]) != unit_vec(i)), None)
    report.add("counitality", witness is None, witness)
    for failure in report.failures:
        LOG.info("check_comodule %s: %s failed at %s", m.name, failure.name, failure.witness)
    return report


def counit_contract(m: Comodule, v: Vec) -> Vec:
    """(id (x) eps) on M (x)_A C, identified with M"""
    result: Vec = {}
    for (p, q), val in m.MC.lift(v).items():
        add_into(result, m.M.act_right(unit_vec(p), m.coring.counit[q]), val)
    return result


def _push_first(f: LinMap, MC: ModuleSpace, NC: ModuleSpace, v: Vec) -> Vec:
    """(f (x) C) on M (x)_A C"""
    result: Tensor = {}
    for (p, q), val in MC.lift(v).items():
        for r, w in f.columns[p].items():
            tensor_add(result, {(r, q): val * w})
    return NC.project(result)


def check_comodule_map(f: LinMap, M: Comodule, N: Comodule) -> VerificationReport:
    """right A-linearity and rho_N f = (f (x) C) rho_M"""
    report = VerificationReport(subject=f"comodule map {M.name} -> {N.name}")
    A = M.coring.algebra
    witness = next(([i, a] for i, a in product(range(M.rank), range(A.dim))
                    if f(M.M.right[i][a]) != N.M.act_right(f.columns[i], unit_vec(a))), None)
    report.add("rightA", witness is None, witness)
    witness = next((i for i in range(M.rank)
                    if N.rho(f.columns[i]) != _push_first(f, M.MC, N.MC, M.rho.columns[i])), None)
    report.add("coaction", witness is None, witness)
    return report


# complexes

@dataclass(frozen=True, eq=False)
class ComoduleComplex:
    coring: Coring
    lo: int
    terms: tuple
    delta: tuple
    name: str = ""

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def in_window(self, l_index: int) -> bool:
        return self.lo <= l_index <= self.hi

    @cached_property
    def _zero(self) -> Comodule:
        return zero_comodule(self.coring)

    def term(self, l_index: int) -> Comodule:
        """M^l, the zero comodule outside the window"""
        return self.terms[l_index - self.lo] if self.in_window(l_index) else self._zero

    def space(self, l_index: int) -> ModuleSpace:
        return self.term(l_index).M

    def rank(self, l_index: int) -> int:
        return self.space(l_index).rank

    def block(self, l_index: int, k: int) -> ModuleSpace:
        return block_space(self.space(l_index), self.coring.C, k)

    def d(self, l_index: int, m: Vec) -> Vec:
        if not m or not self.in_window(l_index + 1) or not self.in_window(l_index):
            return {}
        return self.delta[l_index - self.lo](m)

    def __repr__(self):
        ranks = [t.rank for t in self.terms]
        return f"ComoduleComplex {self.name or '?'} (window [{self.lo}, {self.hi}], ranks {ranks})"


def make_complex(coring: Coring, lo: int, terms: Sequence[Comodule], delta: Sequence, name: str = "",
                 check: bool = True) -> ComoduleComplex:
    """
    complex from comodules M^lo, ..., M^hi and differentials given as LinMaps or column lists

    raises NotComplex with the failing check when check is set
    """
    terms = tuple(terms)
    if len(delta) != max(len(terms) - 1, 0):
        raise ShapeError("make_complex -- one differential is needed between consecutive terms")
    maps = []
    for l_index, value in enumerate(delta):
        source, target = terms[l_index].M, terms[l_index + 1].M
        if isinstance(value, LinMap):
            maps.append(value)
        else:
            maps.append(LinMap(source=source, target=target,
                               columns=tuple(vec_from_any(col, target.rank) for col in value)))
    complex_ = ComoduleComplex(coring=coring, lo=lo, terms=terms, delta=tuple(maps), name=name)
    if check:
        report = check_complex(complex_)
        if not report.passed:
            raise report.first_failure_error(NotComplex, f"make_complex -- {name or 'input'} is not a complex")
    return complex_


def check_complex(c: ComoduleComplex) -> VerificationReport:
    report = VerificationReport(subject=f"comodule complex {c.name}".strip(), window=[c.lo, c.hi])
    for l_index in c.degrees:
        report.extend(check_comodule(c.term(l_index)), prefix=f"term{l_index}")
    for l_index in range(c.lo, c.hi):
        report.extend(check_comodule_map(c.delta[l_index - c.lo], c.term(l_index), c.term(l_index + 1)),
                      prefix=f"delta{l_index}")
    for l_index in range(c.lo, c.hi - 1):
        witness = next((i for i in range(c.rank(l_index)) if c.d(l_index + 1, c.d(l_index, unit_vec(i)))), None)
        report.add(f"delta_squared.degree{l_index}", witness is None, witness)
    for failure in report.failures:
        LOG.info("check_complex %s: %s failed at %s", c.name, failure.name, failure.witness)
    return report


def single_term_complex(m: Comodule, degree: int = 0) -> ComoduleComplex:
    return ComoduleComplex(coring=m.coring, lo=degree, terms=(m,), delta=(), name=m.name)


def shift(c: ComoduleComplex, k: int = 1) -> ComoduleComplex:
    """M[k]^l = M^{l+k} with the same coactions and differentials"""
    return ComoduleComplex(coring=c.coring, lo=c.lo - k, terms=c.terms, delta=c.delta,
                           name=f"{c.name or 'M'}[{k}]")


# the dg category

@dataclass(frozen=True, eq=False)
class ComplexMorphism:
    source: ComoduleComplex
    target: ComoduleComplex
    degree: int
    components: dict = field(default_factory=dict)

    def target_degree(self, k: int, l_index: int) -> int:
        return l_index + self.degree - k

    def apply(self, k: int, l_index: int, m: Vec) -> Vec:
        """phi^k_l(m) in N^{l+s-k} (x)_A C^{(x)k}"""
        columns = self.components.get((k, l_index))
        if columns is None or not m:
            return {}
        result: Vec = {}
        for i, val in m.items():
            add_into(result, columns[i], val)
        return result

    @property
    def max_k(self) -> int:
        return max((k for k, _ in self.components), default=-1)

    def is_zero(self) -> bool:
        return not self.components

    def __repr__(self):
        keys = sorted(self.components)
        return f"ComplexMorphism degree {self.degree} ({self.source.name} -> {self.target.name}, components {keys})"


def make_morphism(source: ComoduleComplex, target: ComoduleComplex, degree: int, components: dict) -> ComplexMorphism:
    """drop zero components and those landing outside the target window"""
    cleaned = {}
    for (k, l_index), columns in components.items():
        columns = tuple(dict(col) for col in columns)
        if not any(columns) or not target.in_window(l_index + degree - k) or not source.in_window(l_index):
            continue
        if len(columns) != source.rank(l_index):
            raise ShapeError(f"make_morphism -- component {(k, l_index)} has {len(columns)} columns")
        cleaned[(k, l_index)] = columns
    return ComplexMorphism(source=source, target=target, degree=degree, components=cleaned)


def morphisms_equal(f: ComplexMorphism, g: ComplexMorphism) -> bool:
    return f.degree == g.degree and f.components == g.components


def identity_morphism(c: ComoduleComplex) -> ComplexMorphism:
    return make_morphism(c, c, 0, {(0, l_index): tuple(unit_vec(i) for i in range(c.rank(l_index)))
                                   for l_index in c.degrees})


def zero_morphism(source: ComoduleComplex, target: ComoduleComplex, degree: int = 0) -> ComplexMorphism:
    return ComplexMorphism(source=source, target=target, degree=degree, components={})


def comodule_map_morphism(source: ComoduleComplex, target: ComoduleComplex, maps: dict) -> ComplexMorphism:
    """degree-0 morphism with phi^0_l = maps[l]"""
    return make_morphism(source, target, 0, {(0, l_index): f.columns if isinstance(f, LinMap) else f
                                             for l_index, f in maps.items()})


def random_morphism(source: ComoduleComplex, target: ComoduleComplex, degree: int, rng: random.Random,
                    max_k: int = 1, bound: int = 2) -> ComplexMorphism:
    """right A-linear components with small integer coordinates on the hom bases"""
    C = source.coring.C
    components = {}
    for l_index, k in product(source.degrees, range(max_k + 1)):
        j = l_index + degree - k
        if not target.in_window(j) or not source.rank(l_index) or not target.rank(j):
            continue
        hom = hom_right_A(source.space(l_index), block_space(target.space(j), C, k))
        coords = {i: scalar(rng.randint(-bound, bound)) for i in range(hom.rank)}
        components[(k, l_index)] = tuple(hom.columns({i: v for i, v in coords.items() if v}))
    return make_morphism(source, target, degree, components)


def check_morphism(phi: ComplexMorphism) -> VerificationReport:
    """every component is right A-linear"""
    report = VerificationReport(subject="complex morphism")
    A = phi.source.coring.algebra
    for (k, l_index), columns in sorted(phi.components.items()):
        M = phi.source.space(l_index)
        out = phi.target.block(phi.target_degree(k, l_index), k)
        witness = next(([i, a] for i, a in product(range(M.rank), range(A.dim))
                        if phi.apply(k, l_index, M.right[i][a]) != out.act_right(columns[i], unit_vec(a))), None)
        report.add(f"component{k}.degree{l_index}.rightA", witness is None, witness)
    return report


def _after_first(c: ComoduleComplex, j: int, k: int, v: Vec, first_image, out_degree: int, extra: int) -> Vec:
    """replace the first letter n of each word of v in N^j (x) C^k by the words of first_image(n)"""
    if not v:
        return {}
    C = c.coring.C
    result: Tensor = {}
    for word, val in block_words(c.space(j), C, k, v).items():
        for head, w in first_image(word[0]).items():
            tensor_add(result, {head + word[1:]: val * w})
    return block_project(c.space(out_degree), C, k + extra, result)


def _delta_tensor(c: ComoduleComplex, j: int, k: int, v: Vec) -> Vec:
    """(delta (x) C^k) on N^j (x) C^k"""
    if not c.in_window(j + 1):
        return {}
    return _after_first(c, j, k, v, lambda n: {(i,): val for i, val in c.d(j, unit_vec(n)).items()}, j + 1, 0)


def _coact_tensor(c: ComoduleComplex, j: int, k: int, v: Vec) -> Vec:
    """(rho (x) C^k) on N^j (x) C^k"""
    term = c.term(j)
    return _after_first(c, j, k, v, lambda n: term.coact_words(unit_vec(n)), j, 1)


def _comul_tensor(c: ComoduleComplex, j: int, k: int, position: int, v: Vec) -> Vec:
    """(N (x) Delta_i) on N^j (x) C^k, Delta applied to the letter at position i (1-based)"""
    if not v:
        return {}
    C = c.coring.C
    result: Tensor = {}
    for word, val in block_words(c.space(j), C, k, v).items():
        for pair, w in c.coring.comul_words(unit_vec(word[position])).items():
            tensor_add(result, {word[:position] + pair + word[position + 1:]: val * w})
    return block_project(c.space(j), C, k + 1, result)


def b_operator(phi: ComplexMorphism, k: int, l_index: int, m: Vec) -> Vec:
    """
    b(phi^k_l)(m) = (rho (x) C^k) phi(m) + sum_i (-1)^i (N (x) Delta_i) phi(m) + (-1)^{k+1} (phi (x) C) rho(m)
    in N^{l+s-k} (x)_A C^{(x)k+1}
    """
    N, M = phi.target, phi.source
    j = phi.target_degree(k, l_index)
    value = phi.apply(k, l_index, m)
    result = _coact_tensor(N, j, k, value)
    for i in range(1, k + 1):
        add_into(result, _comul_tensor(N, j, k, i, value), parity_sign(i))
    if m and M.rank(l_index):
        C = M.coring.C
        tail: Tensor = {}
        for (p, q), val in M.term(l_index).coact_words(m).items():
            for word, w in block_words(N.space(j), C, k, phi.apply(k, l_index, unit_vec(p))).items():
                tensor_add(tail, {word + (q,): val * w})
        add_into(result, block_project(N.space(j), C, k + 1, tail), parity_sign(k + 1))
    return result


def dg_differential(phi: ComplexMorphism) -> ComplexMorphism:
    """
    (d phi)^k_l = (delta_N (x) C^k) phi^k_l - (-1)^s phi^k_{l+1} delta_M - (-1)^{l+s-k} b(phi^{k-1}_l),
    the tensor power in the first term being C^{(x)k}
    """
    S, T, s = phi.source, phi.target, phi.degree
    components = {}
    for l_index in S.degrees:
        for k in range(phi.max_k + 2):
            j = l_index + s + 1 - k
            if not T.in_window(j):
                continue
            columns = []
            for m in range(S.rank(l_index)):
                e = unit_vec(m)
                image = _delta_tensor(T, j - 1, k, phi.apply(k, l_index, e))
                add_into(image, phi.apply(k, l_index + 1, S.d(l_index, e)), -parity_sign(s))
                if k >= 1:
                    add_into(image, b_operator(phi, k - 1, l_index, e), -parity_sign(l_index + s - k))
                columns.append(image)
            components[(k, l_index)] = columns
    return make_morphism(S, T, s + 1, components)


def dg_compose(psi: ComplexMorphism, phi: ComplexMorphism) -> ComplexMorphism:
    """(psi phi)^k_l = sum_i (psi^{k-i}_{l+s-i} (x) C^i) phi^i_l"""
    if phi.target is not psi.source:
        raise DomainMismatch("dg_compose -- target of phi is not the source of psi")
    S, N, P = phi.source, phi.target, psi.target
    s, t = phi.degree, psi.degree
    C = S.coring.C
    components = {}
    for l_index in S.degrees:
        for k in range(phi.max_k + psi.max_k + 1):
            out = l_index + s + t - k
            if not P.in_window(out):
                continue
            columns = []
            for m in range(S.rank(l_index)):
                result: Tensor = {}
                for i in range(k + 1):
                    mid = l_index + s - i
                    value = phi.apply(i, l_index, unit_vec(m))
                    if not value:
                        continue
                    for word, val in block_words(N.space(mid), C, i, value).items():
                        head = psi.apply(k - i, mid, unit_vec(word[0]))
                        for hw, w in block_words(P.space(out), C, k - i, head).items():
                            tensor_add(result, {hw + word[1:]: val * w})
                columns.append(block_project(P.space(out), C, k, result) if result else {})
            components[(k, l_index)] = columns
    return make_morphism(S, P, s + t, components)


def is_closed(phi: ComplexMorphism) -> bool:
    return dg_differential(phi).is_zero()


def add_morphisms(f: ComplexMorphism, g: ComplexMorphism, coeff=ONE) -> ComplexMorphism:
    """f + coeff * g"""
    if f.source is not g.source or f.target is not g.target or f.degree != g.degree:
        raise DomainMismatch("add_morphisms -- the morphisms are not parallel")
    components = {key: [dict(col) for col in columns] for key, columns in f.components.items()}
    for key, columns in g.components.items():
        summed = components.setdefault(key, [{} for _ in columns])
        for i, col in enumerate(columns):
            add_into(summed[i], col, coeff)
    return make_morphism(f.source, f.target, f.degree, components)


def check_dg_category(c: ComoduleComplex, samples: int = 4, seed: int = 0, max_k: int = 1) -> VerificationReport:
    """
    the dg category laws on random endomorphisms of c: identity is a closed unit, d^2 = 0, composition is
    associative and d(psi phi) = d(psi) phi + (-1)^|psi| psi d(phi)
    """
    report = VerificationReport(subject=f"dg endomorphisms of {c.name}", window=[c.lo, c.hi])
    report.note(DG_TENSOR_NOTE)
    rng = random.Random(seed)
    identity = identity_morphism(c)
    report.add("identity.closed", is_closed(identity), None)
    for n in range(samples):
        degrees = [rng.randint(-1, 1) for _ in range(3)]
        phi, psi, chi = (random_morphism(c, c, s, rng, max_k=max_k) for s in degrees)
        d_phi, d_psi = dg_differential(phi), dg_differential(psi)
        unit = morphisms_equal(dg_compose(identity, phi), phi) and morphisms_equal(dg_compose(phi, identity), phi)
        report.add(f"sample{n}.unit", unit, degrees)
        report.add(f"sample{n}.square_zero", dg_differential(d_phi).is_zero(), degrees)
        report.add(f"sample{n}.associative", morphisms_equal(dg_compose(chi, dg_compose(psi, phi)),
                                                             dg_compose(dg_compose(chi, psi), phi)), degrees)
        leibniz = add_morphisms(dg_compose(d_psi, phi), dg_compose(psi, d_phi), parity_sign(psi.degree))
        report.add(f"sample{n}.leibniz", morphisms_equal(dg_differential(dg_compose(psi, phi)), leibniz), degrees)
    return report


@dataclass(frozen=True, eq=False)
class Cone:
    complex: ComoduleComplex
    iota: ComplexMorphism
    pi: ComplexMorphism
    offsets: dict
    report: VerificationReport = field(repr=False, default=None)


def cone(phi: ComplexMorphism) -> Cone:
    """
    O^l = N^l (+) M^{l+1} with rho_O = [[rho_N, phi^1], [0, rho_M]] and delta_O = [[-delta_N, phi^0], [0, delta_M]],
    together with iota^0_l(n) = (-1)^l (n, 0) and pi^0_l(n, m) = m into M[1]
    """
    if phi.degree != 0:
        raise NotDegreeZero(f"cone -- phi has degree {phi.degree}", witness=phi.degree)
    higher = sorted(key for key in phi.components if key[0] >= 2)
    if higher:
        raise HigherComponentsPresent("cone -- phi has components with k >= 2", witness=[list(key) for key in higher])
    d_phi = dg_differential(phi)
    if not d_phi.is_zero():
        key = min(d_phi.components)
        raise NotClosed("cone -- phi is not closed", witness={"component": list(key)})
    M, N = phi.source, phi.target
    c = M.coring
    C = c.C
    lo, hi = min(N.lo, M.lo - 1), max(N.hi, M.hi - 1)
    spaces, offsets = {}, {}
    for l_index in range(lo, hi + 1):
        space, (_, offset) = direct_sum([N.space(l_index), M.space(l_index + 1)], name=f"Cone^{l_index}")
        spaces[l_index] = space
        offsets[l_index] = offset
    terms = []
    for l_index in range(lo, hi + 1):
        O, offset = spaces[l_index], offsets[l_index]
        OC = tensor_chain([O, C])
        lifts = []
        for n in range(N.rank(l_index)):
            lifts.append(OC.project(N.term(l_index).coact_words(unit_vec(n))))
        for m in range(M.rank(l_index + 1)):
            tensor: Tensor = {}
            for (p, q), val in block_words(N.space(l_index), C, 1, phi.apply(1, l_index + 1, unit_vec(m))).items():
                tensor_add(tensor, {(p, q): val})
            for (p, q), val in M.term(l_index + 1).coact_words(unit_vec(m)).items():
                tensor_add(tensor, {(offset + p, q): val})
            lifts.append(OC.project(tensor))
        terms.append(Comodule(coring=c, M=O, rho=LinMap(source=O, target=OC, columns=tuple(lifts)),
                              name=f"Cone^{l_index}"))
    delta = []
    for l_index in range(lo, hi):
        upper_offset = offsets[l_index + 1]
        columns = []
        for n in range(N.rank(l_index)):
            columns.append({i: -val for i, val in N.d(l_index, unit_vec(n)).items()})
        for m in range(M.rank(l_index + 1)):
            image = dict(phi.apply(0, l_index + 1, unit_vec(m)))
            add_into(image, {upper_offset + i: val for i, val in M.d(l_index + 1, unit_vec(m)).items()})
            columns.append(image)
        delta.append(LinMap(source=spaces[l_index], target=spaces[l_index + 1], columns=tuple(columns)))
    result = ComoduleComplex(coring=c, lo=lo, terms=tuple(terms), delta=tuple(delta),
                             name=f"Cone({M.name} -> {N.name})")
    shifted = shift(M)
    iota = make_morphism(N, result, 0, {(0, l_index): tuple({i: parity_sign(l_index)} for i in range(N.rank(l_index)))
                                        for l_index in N.degrees})
    pi = make_morphism(result, shifted, 0,
                       {(0, l_index): tuple([{} for _ in range(N.rank(l_index))] +
                                            [unit_vec(i) for i in range(M.rank(l_index + 1))])
                        for l_index in result.degrees})
    report = VerificationReport(subject=f"cone of {M.name} -> {N.name}", window=[lo, hi])
    report.note(DG_TENSOR_NOTE)
    report.extend(check_complex(result), prefix="complex")
    report.add("iota.closed", is_closed(iota), None)
    report.add("pi.closed", is_closed(pi), None)
    LOG.debug("cone: window [%d, %d], ranks %s", lo, hi, [t.rank for t in terms])
    return Cone(complex=result, iota=iota, pi=pi, offsets=offsets, report=report)


# complexes and Z-connections

@dataclass(frozen=True, eq=False)
class ZConnection:
    """an integrable Z-connection on the graded module `terms`, with its assembled curved module"""
    cdga: SemiFreeCDGA
    terms: tuple
    term_lo: int
    nabla: dict
    module: ConnectionModule
    report: VerificationReport = field(repr=False, default=None)
    name: str = ""

    @property
    def term_hi(self) -> int:
        return self.term_lo + len(self.terms) - 1

    def term(self, l_index: int) -> ModuleSpace:
        return self.terms[l_index - self.term_lo]

    def component(self, k: int, l_index: int) -> Optional[tuple]:
        return self.nabla.get((k, l_index))


def make_zconnection(cdga: SemiFreeCDGA, terms: Sequence[ModuleSpace], term_lo: int, nabla: dict,
                     name: str = "") -> ZConnection:
    """assemble the connection module and verify Leibniz and integrability within its window"""
    module = connection_module(cdga, terms, term_lo, nabla, name=name)
    report = VerificationReport(subject=f"Z-connection {name}".strip(), window=[module.lo, module.hi])
    report.extend(check_curved_module(module), prefix="module")
    return ZConnection(cdga=cdga, terms=tuple(terms), term_lo=term_lo, nabla=dict(nabla), module=module,
                       report=report, name=name)


def connection_from_complex(c: ComoduleComplex, x: Optional[Vec] = None,
                            target: Union[TFlatResult, TBasedResult, None] = None, based_variant: bool = False,
                            max_degree: int = 4) -> ZConnection:
    """
    nabla^{0,l} = delta^l and nabla^{1,l}(m) = (-1)^l (rho_l(m) - m (x) x) over T-flat(C, x), or over T(C, x)
    through (id (x) pi_L) when the based variant is asked for

    raises NotBased for the based variant when eps(x) != 1
    """
    coring = c.coring
    if target is None:
        if based_variant:
            if x is None or not is_base_point(coring, x):
                raise NotBased("connection_from_complex -- the based variant needs eps(x) = 1",
                               witness=witness_vec(coring.eps(x or {})))
            target = t_based(BasedCoring(coring=coring, base_point=dict(x)), max_degree=max_degree, check=False)
        else:
            target = t_flat(coring, x, max_degree=max_degree, check_oracle=False)
    if target.coring is not coring:
        raise DomainMismatch("connection_from_complex -- the CDGA is not built on the coring of the complex")
    x = target.x
    cdga = target.cdga
    pi_left = target.splitting.pi_left if isinstance(target, TBasedResult) else None
    V = cdga.V
    terms = tuple(c.space(l_index) for l_index in c.degrees)
    nabla = {}
    report = VerificationReport(subject=f"connection of {c.name}".strip())
    for l_index in c.degrees:
        term = c.term(l_index)
        sign = parity_sign(l_index)
        if l_index < c.hi:
            nabla[(0, l_index)] = tuple(c.delta[l_index - c.lo].columns)
        MV = block_space(term.M, V, 1) if term.rank else None
        columns = []
        for m in range(term.rank):
            tensor = term.coact_words(unit_vec(m))
            for i, val in x.items():
                tensor_add(tensor, {(m, i): -val})
            if pi_left is not None:
                contracted = counit_contract(term, term.MC.project(tensor))
                if contracted:
                    report.add(f"nabla1.in_C+.degree{l_index}", False, {"basis": m})
                pushed: Tensor = {}
                for (p, q), val in tensor.items():
                    for r, w in pi_left.columns[q].items():
                        tensor_add(pushed, {(p, r): val * w})
                tensor = pushed
            columns.append({i: sign * val for i, val in MV.project(tensor).items()})
        if any(columns):
            nabla[(1, l_index)] = tuple(columns)
    if pi_left is not None and not report.failures:
        report.add("nabla1.in_C+", True)
    connection = make_zconnection(cdga, terms, c.lo, nabla, name=f"{c.name or 'M'} (x) T")
    connection.report.extend(report)
    return connection


def complex_from_connection(conn: ZConnection,
                            u: Optional[UResult] = None) -> tuple[ComoduleComplex, VerificationReport]:
    """
    rho_l(m) = (-1)^l nabla^{1,l}(m) + m (x) x over the coring U of the CDGA, delta^l = nabla^{0,l}

    raises HigherComponentsPresent if some nabla^{k,l} with k >= 2 is nonzero
    """
    higher = sorted(key for key, cols in conn.nabla.items() if key[0] >= 2 and any(cols))
    if higher:
        raise HigherComponentsPresent("complex_from_connection -- nabla has components of degree >= 2",
                                      witness=[list(key) for key in higher])
    u = u or u_functor(conn.cdga, check=False)
    if u.cdga is not conn.cdga:
        raise DomainMismatch("complex_from_connection -- U was built from another CDGA")
    coring, x, offset, V = u.coring, u.based.base_point, u.offset, conn.cdga.V
    terms = []
    for l_index in range(conn.term_lo, conn.term_hi + 1):
        M = conn.term(l_index)
        MV = block_space(M, V, 1) if M.rank else None
        nabla1 = conn.component(1, l_index)
        sign = parity_sign(l_index)
        lifts = []
        for m in range(M.rank):
            tensor: Tensor = {(m, i): val for i, val in x.items()}
            if nabla1 is not None:
                for (p, v), val in MV.lift(nabla1[m]).items():
                    tensor_add(tensor, {(p, offset + v): sign * val})
            lifts.append(tensor)
        terms.append(make_comodule(coring, M, lifts, name=f"M^{l_index}", check=False))
    delta = []
    for l_index in range(conn.term_lo, conn.term_hi):
        columns = conn.component(0, l_index)
        if columns is None:
            columns = tuple({} for _ in range(conn.term(l_index).rank))
        delta.append(LinMap(source=terms[l_index - conn.term_lo].M, target=terms[l_index - conn.term_lo + 1].M,
                            columns=tuple(columns)))
    complex_ = ComoduleComplex(coring=coring, lo=conn.term_lo, terms=tuple(terms), delta=tuple(delta),
                               name=conn.name)
    return complex_, check_complex(complex_)


def module_map_from_comodule_map(phi: ComplexMorphism, source: ZConnection,
                                 target: ZConnection) -> tuple[GradedHomSpace, Vec]:
    """f (x) id between connection modules for a degree-0 morphism with only k = 0 components"""
    if phi.degree != 0:
        raise NotDegreeZero("module_map_from_comodule_map -- phi must have degree 0", witness=phi.degree)
    if phi.max_k > 0:
        raise HigherComponentsPresent("module_map_from_comodule_map -- phi has components with k >= 1",
                                      witness=sorted(list(key) for key in phi.components if key[0] > 0))
    space = graded_hom_space(source.module, target.module, 0)
    values = {}
    for l_index in space.key_components:
        images = []
        for m in range(source.term(l_index).rank):
            image: Vec = {}
            value = phi.apply(0, l_index, unit_vec(m))
            if value:
                offset = target.module.block_offset(l_index, l_index)
                image = {offset + i: val for i, val in value.items()}
            images.append(image)
        values[l_index] = images
    return space, space.coords_of(values)


def is_cohesive(c: Union[ComoduleComplex, ZConnection]) -> VerificationReport:
    """bounded with every term finitely generated projective: the free cover A^r -> M^l splits A-linearly"""
    if isinstance(c, ZConnection):
        spaces = {l_index: c.term(l_index) for l_index in range(c.term_lo, c.term_hi + 1)}
    else:
        spaces = {l_index: c.space(l_index) for l_index in c.degrees}
    report = VerificationReport(subject="cohesive")
    report.note("every term has finite rank over QQ, so boundedness and finite generation hold")
    for l_index, M in spaces.items():
        report.add(f"projective.degree{l_index}", is_projective(M), None)
    return report


def is_projective(M: ModuleSpace) -> bool:
    """solve p s = id for a right A-linear s: M -> A^rank(M), p(e_m a) = m a"""
    if not M.rank:
        return True
    A = M.algebra
    F = free_right_module(A, M.rank)
    cover = [M.act_right(unit_vec(k), unit_vec(i)) for k in range(M.rank) for i in range(A.dim)]
    hom = hom_right_A(M, F)
    # unknowns are hom coordinates; one equation per (m, coordinate of M)
    rows, rhs = [], []
    images = [hom.columns({b: ONE}) for b in range(hom.rank)]
    for m in range(M.rank):
        for target in range(M.rank):
            row: Vec = {}
            for b, cols in enumerate(images):
                value: Vec = {}
                for f_index, val in cols[m].items():
                    add_into(value, cover[f_index], val)
                if value.get(target):
                    row[b] = value[target]
            rows.append(row)
            rhs.append(ONE if target == m else 0)
    return sparse_solve(rows, rhs, hom.rank) is not None
