"""
Semi-free curved differential graded algebras T_A(V) truncated at a maximal degree D.

The differential is stored on generators (d0: A -> V and d1: V -> V (x)_A V, the latter as a lift into
the plain tensor) and extended to T^n by the graded Leibniz rule on demand. Degree-n maps are cached
per instance. Elements of T^n are sparse vectors in the basis of ``cdga.space(n)``; T^0 is the
regular bimodule A and T^n (n >= 1) is ``tensor_chain([V] * n)``.
"""
import threading
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from coring_cdga.algmod import (Algebra, AlgebraMap, LinMap, ModuleSpace, Tensor, check_algebra_map,
                                compose_algebra_maps, identity_algebra_map, regular_bimodule, tensor_add,
                                tensor_chain)
from coring_cdga.errors import (BianchiFailed, CurvatureMismatch, DomainMismatch, LeibnizIncompatible, NotMorphism,
                                ShapeError, WindowTooNarrow)
from coring_cdga.exactla import ONE, Vec, add_into, scalar, unit_vec, vec_from_any, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)

# generator-level checks need d: T^2 -> T^3 even when D = 2
GENERATOR_REACH = 3


@dataclass(frozen=True, eq=False)
class SemiFreeCDGA:
    algebra: Algebra
    V: ModuleSpace
    max_degree: int
    d0: tuple
    d1_lift: tuple
    gamma_lift: Tensor
    name: str = ""
    _spaces: dict = field(default_factory=dict, repr=False)
    _d_maps: dict = field(default_factory=dict, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    @property
    def reach(self) -> int:
        return max(self.max_degree, GENERATOR_REACH)

    def space(self, n: int) -> ModuleSpace:
        """T^n; n may exceed D by the generator reach"""
        if n < 0 or n > self.reach:
            raise WindowTooNarrow(f"SemiFreeCDGA.space -- degree {n} is outside [0, {self.reach}]", witness=n)
        cached = self._spaces.get(n)
        if cached is not None:
            return cached
        with self._lock:
            if n not in self._spaces:
                if n == 0:
                    self._spaces[n] = regular_bimodule(self.algebra)
                else:
                    self._spaces[n] = tensor_chain([self.V] * n)
            return self._spaces[n]

    def dim(self, n: int) -> int:
        return self.space(n).rank

    def words(self, n: int) -> tuple:
        """representative words of the basis of T^n; T^0 has the single empty word per A-basis vector"""
        if n == 0:
            return tuple(() for _ in range(self.algebra.dim))
        return self.space(n).words

    def project(self, n: int, tensor: Tensor) -> Vec:
        if n == 0:
            raise ShapeError("SemiFreeCDGA.project -- degree 0 elements are plain vectors of A")
        return self.space(n).project(tensor)

    def mul(self, p: int, u: Vec, q: int, v: Vec) -> Vec:
        """u v for u in T^p and v in T^q"""
        if not u or not v:
            return {}
        if p == 0 and q == 0:
            return self.algebra.mul(u, v)
        if p == 0:
            return self.space(q).act_left(u, v)
        if q == 0:
            return self.space(p).act_right(u, v)
        target = self.space(p + q)
        left_words, right_words = self.space(p).words, self.space(q).words
        result: Vec = {}
        for i, a in u.items():
            for j, b in v.items():
                add_into(result, target.project_word(left_words[i] + right_words[j]), a * b)
        return result

    def commutator(self, p: int, u: Vec, q: int, v: Vec) -> Vec:
        """graded commutator [u, v] = uv - (-1)^{pq} vu"""
        sign = -ONE if (p * q) % 2 == 0 else ONE
        return add_into(self.mul(p, u, q, v), self.mul(q, v, p, u), sign)

    @property
    def gamma(self) -> Vec:
        return self.project(2, self.gamma_lift)

    def d1(self, v: Vec) -> Vec:
        result: Vec = {}
        for i, val in v.items():
            add_into(result, self._d1_basis[i], val)
        return result

    @property
    def _d1_basis(self) -> tuple:
        return self.d_map(1).columns

    def d_map(self, n: int) -> LinMap:
        """d: T^n -> T^{n+1} as a linear map, extended from generators by the graded Leibniz rule"""
        cached = self._d_maps.get(n)
        if cached is not None:
            return cached
        if n + 1 > self.reach:
            raise WindowTooNarrow(f"SemiFreeCDGA.d_map -- d on degree {n} leaves the window", witness=n)
        with self._lock:
            if n in self._d_maps:
                return self._d_maps[n]
            source, target = self.space(n), self.space(n + 1)
            if n == 0:
                columns = tuple(dict(col) for col in self.d0)
            elif n == 1:
                columns = tuple(target.project(lift) for lift in self.d1_lift)
            else:
                d1_words = [self.space(2).lift(col) for col in self.d_map(1).columns]
                columns = []
                for word in source.words:
                    image: Tensor = {}
                    for k, letter in enumerate(word):
                        sign = ONE if k % 2 == 0 else -ONE
                        for pair, val in d1_words[letter].items():
                            tensor_add(image, {word[:k] + pair + word[k + 1:]: val}, sign)
                    columns.append(target.project(image))
                columns = tuple(columns)
            d = LinMap(source=source, target=target, columns=columns)
            self._d_maps[n] = d
            LOG.debug("SemiFreeCDGA %s: d on degree %d (%d -> %d)", self.name, n, source.rank, target.rank)
            return d

    def d(self, n: int, u: Vec) -> Vec:
        return self.d_map(n)(u)

    def __repr__(self):
        return f"SemiFreeCDGA {self.name or '?'} (rank V {self.V.rank}, D = {self.max_degree})"


@dataclass(frozen=True, eq=False)
class CDGAMorphism:
    """
    (f, omega): f0 on A, f1 on the generators V (landing in degree one of the target), omega in B^1
    """
    source: SemiFreeCDGA
    target: SemiFreeCDGA
    f0: AlgebraMap
    f1: tuple
    omega: Vec

    def apply(self, n: int, u: Vec) -> Vec:
        """the algebra map T_A(V) -> B on degree n"""
        if n == 0:
            return self.f0(u)
        words = self.source.words(n)
        result: Vec = {}
        for i, val in u.items():
            add_into(result, self._apply_word(words[i]), val)
        return result

    def _apply_word(self, word: tuple) -> Vec:
        image = dict(self.f1[word[0]])
        for k, letter in enumerate(word[1:], start=1):
            image = self.target.mul(k, image, 1, self.f1[letter])
        return image


def make_cdga(algebra: Algebra, V: ModuleSpace, d0: Sequence, d1_lift: Sequence, gamma_lift,
              max_degree: int = 4, name: str = "", check: bool = True) -> SemiFreeCDGA:
    """
    build T_A(V) with its differential and curvature and verify the generator-level axioms

    :param d0: per basis vector of A, d0(e_a) in V
    :param d1_lift: per basis vector of V, a plain tensor {(p, q): scalar} lifting d1(e_v)
    :param gamma_lift: plain tensor {(p, q): scalar} lifting the curvature
    :param max_degree: truncation degree D >= 2
    :raises LeibnizIncompatible, CurvatureMismatch, BianchiFailed: on the first failing check
    """
    if max_degree < 2:
        raise ShapeError(f"make_cdga -- max_degree must be at least 2, got {max_degree}")
    if len(d0) != algebra.dim or len(d1_lift) != V.rank:
        raise ShapeError("make_cdga -- d0 needs one entry per basis vector of A and d1 one per basis vector of V")
    if V.rank and (V.algebra is not algebra or V.left_algebra is not algebra):
        raise DomainMismatch("make_cdga -- V must be a bimodule over the given algebra")
    cdga = SemiFreeCDGA(algebra=algebra, V=V, max_degree=max_degree,
                        d0=tuple(vec_from_any(v, V.rank) for v in d0),
                        d1_lift=tuple(_read_tensor(lift) for lift in d1_lift),
                        gamma_lift=_read_tensor(gamma_lift), name=name)
    if check:
        report = check_generators(cdga)
        if not report.passed:
            raise generator_error(report)
    return cdga


def _read_tensor(lift) -> Tensor:
    result: Tensor = {}
    for word, val in dict(lift).items():
        tensor_add(result, {tuple(word): scalar(val)})
    return result


def generator_error(report: VerificationReport):
    failure = report.failures[0]
    if failure.name.startswith("leibniz"):
        return LeibnizIncompatible(f"make_cdga -- {failure.name} fails", witness=failure.witness)
    if failure.name.startswith("curvature"):
        degree = int(failure.name.rsplit(".degree", 1)[-1])
        return CurvatureMismatch(f"make_cdga -- d^2 != [gamma, .] in degree {degree}",
                                 witness={"degree": degree, "basis": failure.witness})
    return BianchiFailed("make_cdga -- d(gamma) != 0", witness=failure.witness)


def check_generators(cdga: SemiFreeCDGA) -> VerificationReport:
    """derivation property of d0, twisted bilinearity of d1, d^2 = [gamma, .] on generators, Bianchi"""
    A, V = cdga.algebra, cdga.V
    report = VerificationReport(subject=f"cdga {cdga.name}".strip(), window=[0, 1])

    witness = next(([i, j] for i, j in product(range(A.dim), repeat=2)
                    if cdga.d(0, A.table[i][j]) != add_into(V.act_right(cdga.d0[i], unit_vec(j)),
                                                             V.act_left(unit_vec(i), cdga.d0[j]))), None)
    report.add("leibniz.d0", witness is None, witness)

    def left_ok(a, v):
        # d(a v) = d(a) v + a d(v)
        expected = add_into(cdga.mul(1, cdga.d0[a], 1, unit_vec(v)), cdga.mul(0, unit_vec(a), 2, cdga.d1(unit_vec(v))))
        return cdga.d1(V.left[a][v]) == expected

    def right_ok(v, a):
        # d(v a) = d(v) a - v d(a)
        expected = add_into(cdga.mul(2, cdga.d1(unit_vec(v)), 0, unit_vec(a)),
                            cdga.mul(1, unit_vec(v), 1, cdga.d0[a]), -ONE)
        return cdga.d1(V.right[v][a]) == expected

    witness = next(([a, v] for a, v in product(range(A.dim), range(V.rank)) if not left_ok(a, v)), None)
    report.add("leibniz.d1.left", witness is None, witness)
    witness = next(([v, a] for v, a in product(range(V.rank), range(A.dim)) if not right_ok(v, a)), None)
    report.add("leibniz.d1.right", witness is None, witness)
    if not report.passed:
        return report

    gamma = cdga.gamma
    witness = next((a for a in range(A.dim)
                    if cdga.d(1, cdga.d0[a]) != cdga.commutator(2, gamma, 0, unit_vec(a))), None)
    report.add("curvature.degree0", witness is None, witness)
    witness = next((v for v in range(V.rank)
                    if cdga.d(2, cdga.d1(unit_vec(v))) != cdga.commutator(2, gamma, 1, unit_vec(v))), None)
    report.add("curvature.degree1", witness is None, witness)
    dgamma = cdga.d(2, gamma)
    report.add("bianchi", not dgamma, witness_vec(dgamma))
    return report


def check_cdga_degreewise(cdga: SemiFreeCDGA) -> VerificationReport:
    """
    d^2 = [gamma, .] on every basis element of T^n for n <= D - 2, the graded Leibniz rule on basis
    pairs with total degree <= D - 1, and the Bianchi identity
    """
    D = cdga.max_degree
    report = VerificationReport(subject=f"cdga {cdga.name} degreewise".strip(), window=[0, D - 2])
    gamma = cdga.gamma
    for n in range(0, D - 1):
        witness = next((i for i in range(cdga.dim(n))
                        if cdga.d(n + 1, cdga.d(n, unit_vec(i))) != cdga.commutator(2, gamma, n, unit_vec(i))), None)
        report.add(f"d_squared.degree{n}", witness is None, witness, window=[n, n])
    for p in range(0, D):
        for q in range(0, D - p):
            witness = _leibniz_witness(cdga, p, q)
            report.add(f"leibniz.degree{p}x{q}", witness is None, witness, window=[p, q])
    dgamma = cdga.d(2, gamma)
    report.add("bianchi", not dgamma, witness_vec(dgamma))
    for failure in report.failures:
        LOG.info("check_cdga_degreewise %s: %s failed at %s", cdga.name, failure.name, failure.witness)
    return report


def _leibniz_witness(cdga: SemiFreeCDGA, p: int, q: int) -> Optional[list]:
    """d(uv) = d(u) v + (-1)^p u d(v) on basis pairs"""
    sign = ONE if p % 2 == 0 else -ONE
    for i in range(cdga.dim(p)):
        u = unit_vec(i)
        du = cdga.d(p, u)
        for j in range(cdga.dim(q)):
            v = unit_vec(j)
            lhs = cdga.d(p + q, cdga.mul(p, u, q, v))
            rhs = add_into(cdga.mul(p + 1, du, q, v), cdga.mul(p, u, q + 1, cdga.d(q, v)), sign)
            if lhs != rhs:
                return [i, j]
    return None


def cdga_equal(a: SemiFreeCDGA, b: SemiFreeCDGA) -> VerificationReport:
    """
    coefficientwise equality of two CDGAs over the same algebra whose generator modules have identical
    action tables (so that their tensor powers share bases)
    """
    report = VerificationReport(subject="cdga equality")
    report.add("algebra", a.algebra is b.algebra)
    same_v = a.V.rank == b.V.rank and a.V.right == b.V.right and a.V.left == b.V.left
    report.add("V", same_v, {"rank": [a.V.rank, b.V.rank]})
    if not report.passed:
        return report
    witness = next((i for i in range(a.algebra.dim) if a.d0[i] != b.d0[i]), None)
    report.add("d0", witness is None, witness)
    wa, wb = a.space(2).words, b.space(2).words
    report.add("T2.basis", wa == wb)
    if wa == wb:
        witness = next((v for v in range(a.V.rank) if a.d1(unit_vec(v)) != b.d1(unit_vec(v))), None)
        report.add("d1", witness is None, witness)
        report.add("gamma", a.gamma == b.gamma, {"left": witness_vec(a.gamma), "right": witness_vec(b.gamma)})
    return report


def check_cdga_morphism(f: CDGAMorphism) -> VerificationReport:
    """
    f(d a) = d f(a) + [omega, f(a)] on generators of degrees 0 and 1, and
    f(gamma_A) = gamma_B + d omega + omega^2
    """
    A, B = f.source, f.target
    report = VerificationReport(subject="cdga morphism", window=[0, 2])
    report.extend(check_algebra_map(f.f0), prefix="f0")
    witness = next(([a, v] for a, v in product(range(A.algebra.dim), range(A.V.rank))
                    if f.apply(1, A.V.left[a][v]) != B.mul(0, f.f0.columns[a], 1, f.f1[v])), None)
    report.add("f1.leftA", witness is None, witness)
    witness = next(([v, a] for v, a in product(range(A.V.rank), range(A.algebra.dim))
                    if f.apply(1, A.V.right[v][a]) != B.mul(1, f.f1[v], 0, f.f0.columns[a])), None)
    report.add("f1.rightA", witness is None, witness)
    omega = f.omega

    def degree0_ok(a):
        fa = f.f0.columns[a]
        return f.apply(1, A.d0[a]) == add_into(B.d(0, fa), B.commutator(1, omega, 0, fa))

    def degree1_ok(v):
        fv = f.f1[v]
        return f.apply(2, A.d1(unit_vec(v))) == add_into(B.d(1, fv), B.commutator(1, omega, 1, fv))

    witness = next((a for a in range(A.algebra.dim) if not degree0_ok(a)), None)
    report.add("differential.degree0", witness is None, witness)
    witness = next((v for v in range(A.V.rank) if not degree1_ok(v)), None)
    report.add("differential.degree1", witness is None, witness)
    expected = add_into(add_into(dict(B.gamma), B.d(1, omega)), B.mul(1, omega, 1, omega))
    actual = f.apply(2, A.gamma)
    report.add("curvature", actual == expected, witness_vec(vec_sub(actual, expected)))
    return report


def identity_cdga_morphism(cdga: SemiFreeCDGA) -> CDGAMorphism:
    return CDGAMorphism(source=cdga, target=cdga, f0=identity_algebra_map(cdga.algebra),
                        f1=tuple(unit_vec(v) for v in range(cdga.V.rank)), omega={})


def compose_cdga_morphisms(g: CDGAMorphism, f: CDGAMorphism, check: bool = True) -> CDGAMorphism:
    """(g f, g(omega_f) + omega_g), re-verified"""
    if f.target is not g.source:
        raise DomainMismatch("compose_cdga_morphisms -- target of f is not the source of g")
    composite = CDGAMorphism(source=f.source, target=g.target, f0=compose_algebra_maps(g.f0, f.f0),
                             f1=tuple(g.apply(1, col) for col in f.f1),
                             omega=add_into(g.apply(1, f.omega), g.omega))
    if check:
        report = check_cdga_morphism(composite)
        if not report.passed:
            raise report.first_failure_error(NotMorphism, "compose_cdga_morphisms")
    return composite


def morphisms_equal(f: CDGAMorphism, g: CDGAMorphism) -> bool:
    return (f.source is g.source and f.target is g.target and f.f0.columns == g.f0.columns
            and tuple(f.f1) == tuple(g.f1) and f.omega == g.omega)
