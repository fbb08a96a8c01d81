"""
Builders for the standard families of corings: matrices, partial orders (relations), Sweedler corings,
comatrix corings and corings of entwining structures, together with the closed-form differentials and
curvatures each family is known for.

Every builder verifies its output and raises on a failed axiom.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Optional, Sequence

from coring_cdga.algmod import (Algebra, ModuleSpace, Tensor, free_right_module, identity_algebra_map,
                                kernel_subspace, linmap, rationals, tensor_add)
from coring_cdga.comatrix import ComatrixCoring, ComatrixData, comatrix_cdga, comatrix_coring
from coring_cdga.comod import Comodule, ComoduleComplex, make_comodule, make_complex
from coring_cdga.coring import BasedCoring, Coring, CoringMorphism, based, check_coring, check_coring_morphism, \
    make_coring
from coring_cdga.equiv import TBasedResult, TFlatResult, lift_to_coring, t_flat
from coring_cdga.errors import BowTieFailed, NotComodule, NotCoring, NotReflexive, NotTransitive, ShapeError
from coring_cdga.exactla import ONE, Vec, add_into, is_invertible, matrix_from_columns, parity_sign, scalar, \
    unit_vec, vec_from_any, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)


def _verified(coring: Coring) -> Coring:
    report = check_coring(coring)
    if not report.passed:
        raise report.first_failure_error(NotCoring, f"catalog -- {coring.name} is not a coring")
    return coring


def _unit_words(A: Algebra) -> list:
    return sorted(A.unit.items())


def coefficient_bimodule(A: Algebra, n: int, labels: Optional[Sequence[str]] = None, name: str = "") -> ModuleSpace:
    """A^n with A acting on the coefficients from both sides; basis (k, alpha) -> k*dim + alpha"""
    d = A.dim
    right = tuple(tuple({k * d + g: val for g, val in A.table[alpha][a].items()} for a in range(d))
                  for k in range(n) for alpha in range(d))
    left = tuple(tuple({k * d + g: val for g, val in A.table[a][alpha].items()}
                       for k in range(n) for alpha in range(d)) for a in range(d))
    if labels is not None and d > 1:
        labels = [f"{label}.{A.label(alpha)}" for label in labels for alpha in range(d)]
    return ModuleSpace(rank=n * d, algebra=A, right=right, left=left, left_algebra=A,
                       labels=tuple(labels) if labels else None, name=name)


# partial orders and matrices

def check_relation(S: Sequence[Hashable], Q) -> None:
    """raises NotReflexive or NotTransitive with the offending elements"""
    relation = set(map(tuple, Q))
    for pair in relation:
        if pair[0] not in S or pair[1] not in S:
            raise ShapeError(f"check_relation -- {pair} is not a pair of elements of S", witness=list(pair))
    for s in S:
        if (s, s) not in relation:
            raise NotReflexive(f"check_relation -- ({s}, {s}) is missing", witness=[s, s])
    for (s, u), (u2, t) in product(sorted(relation, key=str), repeat=2):
        if u == u2 and (s, t) not in relation:
            raise NotTransitive(f"check_relation -- ({s}, {t}) is missing", witness=[s, u, t])


def catalog_order(S: Sequence[Hashable], Q, A: Optional[Algebra] = None, e: Optional[Hashable] = None,
                  name: str = "") -> BasedCoring:
    """
    C = A^(Q) with Delta(s, t) = sum over u in omega(s, t) of (s, u) (x) (u, t) and eps(s, t) = delta_st,
    based at (e, e); pairs are ordered by the order of S
    """
    A = A or rationals()
    S = list(S)
    Q = [tuple(pair) for pair in Q]
    check_relation(S, Q)
    position = {s: i for i, s in enumerate(S)}
    pairs = sorted(set(Q), key=lambda p: (position[p[0]], position[p[1]]))
    index = {pair: k for k, pair in enumerate(pairs)}
    d = A.dim
    C = coefficient_bimodule(A, len(pairs), labels=[f"({s},{t})" for s, t in pairs], name=name or "A^(Q)")
    lifts, counit = [], []
    for (s, t), alpha in product(pairs, range(d)):
        lift: Tensor = {}
        for u in S:
            if (s, u) in index and (u, t) in index:
                for beta, val in _unit_words(A):
                    tensor_add(lift, {(index[(s, u)] * d + beta, index[(u, t)] * d + alpha): val})
        lifts.append(lift)
        counit.append(unit_vec(alpha) if s == t else {})
    coring = _verified(make_coring(A, C, lifts, counit, name=name or f"order({len(S)}, {len(pairs)})"))
    e = S[0] if e is None else e
    if e not in position:
        raise ShapeError(f"catalog_order -- base element {e} is not in S", witness=str(e))
    x = {index[(e, e)] * d + beta: val for beta, val in _unit_words(A)}
    LOG.debug("catalog_order: %d pairs over %s", len(pairs), A.name)
    return based(coring, x)


def catalog_matrix(N: int, A: Optional[Algebra] = None) -> BasedCoring:
    """M_N(A) with Delta(E_ij) = sum_k E_ik (x) E_kj and eps(E_ij) = delta_ij, based at E_NN"""
    if N < 1:
        raise ShapeError("catalog_matrix -- N must be positive", witness=N)
    A = A or rationals()
    S = list(range(1, N + 1))
    b = catalog_order(S, product(S, S), A, e=N, name=f"M{N}({A.name})")
    C = b.coring.C
    labels = tuple(f"E{i}{j}" if A.dim == 1 else f"E{i}{j}.{A.label(alpha)}"
                   for i, j, alpha in product(S, S, range(A.dim)))
    C = ModuleSpace(rank=C.rank, algebra=A, right=C.right, left=C.left, left_algebra=A, labels=labels,
                    name=f"M{N}({A.name})")
    coring = make_coring(A, C, b.coring.delta_lift, b.coring.counit, name=b.coring.name)
    return BasedCoring(coring=coring, base_point=b.base_point)


def matrix_row_comodule(coring: Coring, N: int) -> Comodule:
    """A^N over M_N(A) with rho(e_i a) = sum_j e_j (x) E_ji a"""
    A = coring.algebra
    d = A.dim
    if coring.rank != N * N * d:
        raise ShapeError(f"matrix_row_comodule -- {coring.name} is not M_{N} over {A.name}", witness=coring.rank)
    M = free_right_module(A, N, name=f"{A.name}^{N}")
    lifts = []
    for i, alpha in product(range(N), range(d)):
        lift: Tensor = {}
        for j in range(N):
            for beta, val in _unit_words(A):
                tensor_add(lift, {(j * d + beta, (j * N + i) * d + alpha): val})
        lifts.append(lift)
    return make_comodule(coring, M, lifts, name=f"row({coring.name})")


def order_formulas(t: TBasedResult, S: Sequence[Hashable], Q, e: Hashable) -> VerificationReport:
    """
    d(s, t) = (e, e, s, t) - sum over u in omega(s, t) of (s, u, u, t) + (s, t, e, e) on C+ and
    gamma = -sum over u in omega(e, e), u != e, of (e, u, u, e), compared inside C (x)_A C
    """
    c, cdga = t.coring, t.cdga
    A, d = c.algebra, c.algebra.dim
    S = list(S)
    position = {s: i for i, s in enumerate(S)}
    pairs = sorted(set(map(tuple, Q)), key=lambda p: (position[p[0]], position[p[1]]))
    index = {pair: k for k, pair in enumerate(pairs)}
    units = _unit_words(A)
    report = VerificationReport(subject=f"order formulas of {c.name}".strip(), window=[1, 2])

    def pair_word(left, right, alpha) -> Tensor:
        return {(index[left] * d + beta, index[right] * d + alpha): val for beta, val in units}

    def formula(v: Vec) -> Vec:
        plain: Tensor = {}
        for i, val in v.items():
            q, alpha = divmod(i, d)
            s, u_end = pairs[q]
            tensor_add(plain, pair_word((e, e), (s, u_end), alpha), val)
            for u in S:
                if (s, u) in index and (u, u_end) in index:
                    for beta, w in units:
                        tensor_add(plain, {(index[(s, u)] * d + alpha, index[(u, u_end)] * d + beta): -val * w})
            for beta, w in units:
                tensor_add(plain, {(i, index[(e, e)] * d + beta): val * w})
        return c.CC.project(plain)

    inclusion = t.splitting.inclusion.columns
    witness = next((i for i in range(cdga.dim(1))
                    if c.CC.project(lift_to_coring(t, 2, cdga.d(1, unit_vec(i)))) != formula(inclusion[i])), None)
    report.add("differential", witness is None, witness)
    expected: Tensor = {}
    for u in S:
        if u != e and (e, u) in index and (u, e) in index:
            for beta, w in units:
                tensor_add(expected, pair_word((e, u), (u, e), beta), -w)
    expected_vec = c.CC.project(expected)
    actual = c.CC.project(lift_to_coring(t, 2, cdga.gamma))
    report.add("curvature", actual == expected_vec, witness_vec(vec_sub(actual, expected_vec)))
    return report


# Sweedler corings

def catalog_sweedler(A: Algebra, x: Optional[Vec] = None, max_degree: int = 4) -> tuple[Coring, TFlatResult]:
    """
    C = A (x) A with a'(a (x) b)a'' = a'a (x) ba'', Delta(a (x) b) = (a (x) 1) (x)_A (1 (x) b) and
    eps(a (x) b) = ab; basis a (x) b at a*dim + b. x defaults to 1 (x) 1.
    """
    d = A.dim
    right = tuple(tuple({a * d + g: val for g, val in A.table[b][c].items()} for c in range(d))
                  for a in range(d) for b in range(d))
    left = tuple(tuple({g * d + b: val for g, val in A.table[c][a].items()} for a in range(d) for b in range(d))
                 for c in range(d))
    labels = tuple(f"{A.label(a)}(x){A.label(b)}" for a in range(d) for b in range(d))
    C = ModuleSpace(rank=d * d, algebra=A, right=right, left=left, left_algebra=A, labels=labels,
                    name=f"{A.name}(x){A.name}")
    units = _unit_words(A)
    lifts, counit = [], []
    for a, b in product(range(d), range(d)):
        lift: Tensor = {}
        for (beta, u), (gamma, w) in product(units, units):
            tensor_add(lift, {(a * d + beta, gamma * d + b): u * w})
        lifts.append(lift)
        counit.append(A.table[a][b])
    coring = _verified(make_coring(A, C, lifts, counit, name=f"Sweedler({A.name})"))
    if x is None:
        x = {}
        for (beta, u), (gamma, w) in product(units, units):
            add_into(x, {beta * d + gamma: u * w})
    LOG.debug("catalog_sweedler: rank %d", C.rank)
    return coring, t_flat(coring, x, max_degree=max_degree)


def _sweedler_element(result: TFlatResult, n: int, tensor: Tensor) -> Vec:
    """a_0 (x) ... (x) a_n in A^{(x)n+1} as an element of T^n = C^{(x)_A n}"""
    A = result.coring.algebra
    d = A.dim
    if n == 0:
        out: Vec = {}
        for word, val in tensor.items():
            add_into(out, {word[0]: val})
        return out
    plain: Tensor = {}
    units = _unit_words(A)
    for word, val in tensor.items():
        for betas in product(units, repeat=n - 1):
            coeff = val
            key = [word[0] * d + word[1]]
            for (beta, u), a in zip(betas, word[2:]):
                coeff *= u
                key.append(beta * d + a)
            tensor_add(plain, {tuple(key): coeff})
    return result.cdga.project(n, plain)


def sweedler_formulas(result: TFlatResult, max_n: int = 2) -> VerificationReport:
    """
    d(a_0 (x) ... (x) a_n) = x a_0 (x) ... + sum_k (-1)^k (... (x) a_{k-1} (x) 1 (x) a_k (x) ...)
    + (-1)^{n+1} a_0 (x) ... (x) a_n x and gamma = sum x^i (x) y^i x^j (x) y^j - sum x^i (x) 1 (x) y^i
    """
    A = result.coring.algebra
    d, units = A.dim, _unit_words(A)
    x_pairs = [(divmod(i, d), val) for i, val in result.x.items()]
    max_n = min(max_n, result.cdga.max_degree - 1)
    report = VerificationReport(subject=f"Sweedler formulas of {result.coring.name}".strip(), window=[0, max_n])

    def display(word: tuple) -> Tensor:
        n = len(word) - 1
        image: Tensor = {}
        for (p, q), val in x_pairs:
            for g, w in A.table[q][word[0]].items():
                tensor_add(image, {(p, g) + word[1:]: val * w})
            for g, w in A.table[word[-1]][p].items():
                tensor_add(image, {word[:-1] + (g, q): parity_sign(n + 1) * val * w})
        for k in range(1, n + 1):
            for beta, u in units:
                tensor_add(image, {word[:k] + (beta,) + word[k:]: parity_sign(k) * u})
        return image

    for n in range(max_n + 1):
        witness = None
        for word in product(range(d), repeat=n + 1):
            if result.cdga.d(n, _sweedler_element(result, n, {word: ONE})) != \
                    _sweedler_element(result, n + 1, display(word)):
                witness = list(word)
                break
        report.add(f"differential.degree{n}", witness is None, witness, window=[n, n])
    gamma: Tensor = {}
    for ((p, q), val), ((r, s), w) in product(x_pairs, x_pairs):
        for g, z in A.table[q][r].items():
            tensor_add(gamma, {(p, g, s): val * w * z})
    for (p, q), val in x_pairs:
        for beta, u in units:
            tensor_add(gamma, {(p, beta, q): -val * u})
    expected = _sweedler_element(result, 2, gamma)
    report.add("curvature", result.cdga.gamma == expected, witness_vec(vec_sub(result.cdga.gamma, expected)))
    return report


# comatrix corings

def scalar_endomorphisms(P: ModuleSpace) -> list:
    return [[unit_vec(m) for m in range(P.rank)]]


def full_endomorphisms(A: Algebra, n: int) -> list:
    """
    a basis of End_A(A^n): matrix units with coefficients in A acting on the left
    of the coefficient column, E_ij a : e_j b -> e_i a b
    """
    d = A.dim
    basis = []
    for i, j, alpha in product(range(n), range(n), range(d)):
        cols = []
        for k, beta in product(range(n), range(d)):
            cols.append({i * d + g: val for g, val in A.table[alpha][beta].items()} if k == j else {})
        basis.append(cols)
    return basis


def catalog_comatrix(A: Optional[Algebra] = None, n: int = 2, B_basis: Optional[Sequence] = None,
                     x: Optional[Vec] = None, max_degree: int = 4) -> ComatrixData:
    """the comatrix coring of P = A^n over B (the scalars by default), based at x or the canonical point"""
    A = A or rationals()
    P = free_right_module(A, n, name=f"{A.name}^{n}")
    cm = comatrix_coring(A, P, B_basis)
    return comatrix_cdga(cm, x, max_degree=max_degree)


def comatrix_matrix_iso(cm: ComatrixCoring, target: Coring) -> tuple[CoringMorphism, VerificationReport]:
    """
    chi (x) e_k b -> sum_i E_ik chi(e_i) b from the comatrix coring of A^N over the scalars to M_N(A),
    with the check that it is a bijective coring morphism
    """
    A, P, d = cm.algebra, cm.P, cm.algebra.dim
    N = P.rank // d
    if target.algebra is not A or target.rank != N * N * d:
        raise ShapeError("comatrix_matrix_iso -- the target is not M_N(A) over the same algebra")
    units = _unit_words(A)
    columns = []
    for chi, p in cm.C.words:
        k, alpha = divmod(p, d)
        image: Vec = {}
        for i in range(N):
            e_i = {i * d + beta: u for beta, u in units}
            value = A.mul(cm.dual.evaluate({chi: ONE}, e_i), unit_vec(alpha))
            add_into(image, {(i * N + k) * d + g: val for g, val in value.items()})
        columns.append(image)
    f1 = linmap(cm.C, target.C, columns, linearity=("leftA", "rightA"))
    morphism = CoringMorphism(source=cm.coring, target=target, f0=identity_algebra_map(A), f1=f1)
    report = VerificationReport(subject="comatrix to matrix coring")
    report.extend(check_coring_morphism(morphism), prefix="morphism")
    square = cm.C.rank == target.rank
    report.add("bijective", square and is_invertible(matrix_from_columns(columns, target.rank)),
               {"source": cm.C.rank, "target": target.rank})
    return morphism, report


# entwining structures

@dataclass(frozen=True, eq=False)
class Coalgebra:
    """comul[h] is a plain tensor {(i, j): scalar}, counit[h] a scalar"""
    dim: int
    comul: tuple
    counit: tuple
    name: str = ""
    labels: Optional[tuple] = None

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"h{i}"


def make_coalgebra(dim: int, comul: Sequence, counit: Sequence, name: str = "", labels=None,
                   check: bool = True) -> Coalgebra:
    if len(comul) != dim or len(counit) != dim:
        raise ShapeError(f"make_coalgebra -- expected {dim} comultiplication and counit entries")
    comul = tuple({tuple(k): scalar(v) for k, v in t.items() if scalar(v)} for t in comul)
    coalgebra = Coalgebra(dim=dim, comul=comul,
                          counit=tuple(scalar(v) for v in counit), name=name,
                          labels=tuple(labels) if labels else None)
    if check:
        report = check_coalgebra(coalgebra)
        if not report.passed:
            raise report.first_failure_error(NotCoring, f"make_coalgebra -- {name or 'C'} is not a coalgebra")
    return coalgebra


def check_coalgebra(C: Coalgebra) -> VerificationReport:
    report = VerificationReport(subject=f"coalgebra {C.name}".strip())
    witness = None
    for h in range(C.dim):
        left: Tensor = {}
        right: Tensor = {}
        for (i, j), val in C.comul[h].items():
            for (p, q), w in C.comul[i].items():
                tensor_add(left, {(p, q, j): val * w})
            for (p, q), w in C.comul[j].items():
                tensor_add(right, {(i, p, q): val * w})
        if left != right:
            witness = h
            break
    report.add("coassociativity", witness is None, witness)
    witness = None
    for h in range(C.dim):
        left: Vec = {}
        right: Vec = {}
        for (i, j), val in C.comul[h].items():
            add_into(left, {j: val * C.counit[i]})
            add_into(right, {i: val * C.counit[j]})
        if left != unit_vec(h) or right != unit_vec(h):
            witness = h
            break
    report.add("counitality", witness is None, witness)
    return report


def group_coalgebra(n: int) -> Coalgebra:
    """QQ[Z/n] with every g^i group-like"""
    return Coalgebra(dim=n, comul=tuple({(i, i): ONE} for i in range(n)), counit=tuple(ONE for _ in range(n)),
                     name=f"Q[Z/{n}]", labels=tuple("1" if i == 0 else f"g^{i}" for i in range(n)))


@dataclass(frozen=True, eq=False)
class Entwining:
    """psi[h][a] = psi(h (x) a) in A (x) C, basis a (x) h at a*dim(C) + h"""
    algebra: Algebra
    coalgebra: Coalgebra
    psi: tuple
    name: str = ""

    def apply(self, h: int, a: Vec) -> Vec:
        result: Vec = {}
        for i, val in a.items():
            add_into(result, self.psi[h][i], val)
        return result


def make_entwining(A: Algebra, C: Coalgebra, psi: Sequence, name: str = "") -> Entwining:
    size = A.dim * C.dim
    if len(psi) != C.dim or any(len(row) != A.dim for row in psi):
        raise ShapeError(f"make_entwining -- psi must be {C.dim}x{A.dim}")
    return Entwining(algebra=A, coalgebra=C, psi=tuple(tuple(vec_from_any(v, size) for v in row) for row in psi),
                     name=name)


def graded_entwining(A: Algebra, degrees: Sequence[int], order: Optional[int] = None) -> Entwining:
    """psi(h (x) a) = a (x) h deg(a) for a basis of A homogeneous for a Z/order grading"""
    order = order or (max(degrees) + 1 if degrees else 1)
    C = group_coalgebra(order)
    psi = [[{a * order + (h + degrees[a]) % order: ONE} for a in range(A.dim)] for h in range(order)]
    return Entwining(algebra=A, coalgebra=C, psi=tuple(tuple(row) for row in psi), name=f"graded({A.name})")


BOW_TIE_CELLS = ("multiplication", "unit", "comultiplication", "counit")


def check_entwining(ent: Entwining) -> VerificationReport:
    """the four cells of the bow-tie diagram, on all basis elements"""
    A, C = ent.algebra, ent.coalgebra
    dc = C.dim
    report = VerificationReport(subject=f"entwining {ent.name}".strip())

    def split(v: Vec):
        return [(divmod(i, dc), val) for i, val in v.items()]

    witness = None
    for h, a, b in product(range(dc), range(A.dim), range(A.dim)):
        lhs = ent.apply(h, A.table[a][b])
        rhs: Vec = {}
        for (a1, h1), val in split(ent.psi[h][a]):
            for (b1, h2), w in split(ent.psi[h1][b]):
                for g, z in A.table[a1][b1].items():
                    add_into(rhs, {g * dc + h2: val * w * z})
        if lhs != rhs:
            witness = [h, a, b]
            break
    report.add("multiplication", witness is None, witness)
    witness = next((h for h in range(dc)
                    if ent.apply(h, A.unit) != {a * dc + h: val for a, val in A.unit.items()}), None)
    report.add("unit", witness is None, witness)
    witness = None
    for h, a in product(range(dc), range(A.dim)):
        lhs: Tensor = {}
        for (a1, h1), val in split(ent.psi[h][a]):
            for (p, q), w in C.comul[h1].items():
                tensor_add(lhs, {(a1, p, q): val * w})
        rhs: Tensor = {}
        for (p, q), val in C.comul[h].items():
            for (a1, q1), w in split(ent.psi[q][a]):
                for (a2, p1), z in split(ent.psi[p][a1]):
                    tensor_add(rhs, {(a2, p1, q1): val * w * z})
        if lhs != rhs:
            witness = [h, a]
            break
    report.add("comultiplication", witness is None, witness)
    witness = None
    for h, a in product(range(dc), range(A.dim)):
        lhs: Vec = {}
        for (a1, h1), val in split(ent.psi[h][a]):
            add_into(lhs, {a1: val * C.counit[h1]})
        if lhs != ({a: C.counit[h]} if C.counit[h] else {}):
            witness = [h, a]
            break
    report.add("counit", witness is None, witness)
    return report


def entwining_coring(ent: Entwining) -> Coring:
    """
    A (x) C with a(a' (x) c)a'' = aa' psi(c (x) a''), Delta = id (x) Delta_C, eps = id (x) eps_C

    raises BowTieFailed with the index (1 to 4) of the first failing cell
    """
    report = check_entwining(ent)
    if not report.passed:
        failure = report.failures[0]
        raise BowTieFailed(f"entwining_coring -- the {failure.name} cell fails",
                           witness={"cell": BOW_TIE_CELLS.index(failure.name) + 1, "at": failure.witness})
    A, Cc = ent.algebra, ent.coalgebra
    d, dc = A.dim, Cc.dim
    right = []
    for a, h in product(range(d), range(dc)):
        row = []
        for b in range(d):
            image: Vec = {}
            for i, val in ent.psi[h][b].items():
                a1, h1 = divmod(i, dc)
                for g, w in A.table[a][a1].items():
                    add_into(image, {g * dc + h1: val * w})
            row.append(image)
        right.append(tuple(row))
    left = tuple(tuple({g * dc + h: val for g, val in A.table[c][a].items()} for a in range(d) for h in range(dc))
                 for c in range(d))
    labels = tuple(f"{A.label(a)}(x){Cc.label(h)}" for a in range(d) for h in range(dc))
    M = ModuleSpace(rank=d * dc, algebra=A, right=tuple(right), left=left, left_algebra=A, labels=labels,
                    name=f"{A.name}(x){Cc.name}")
    units = _unit_words(A)
    lifts, counit = [], []
    for a, h in product(range(d), range(dc)):
        lift: Tensor = {}
        for (p, q), val in Cc.comul[h].items():
            for beta, u in units:
                tensor_add(lift, {(a * dc + p, beta * dc + q): val * u})
        lifts.append(lift)
        counit.append({a: Cc.counit[h]} if Cc.counit[h] else {})
    return _verified(make_coring(A, M, lifts, counit, name=f"C({ent.name or A.name})"))


def check_coalgebra_comodule(C: Coalgebra, dim: int, rho: Sequence) -> VerificationReport:
    """rho[v] = {(w, h): scalar}: coassociativity and counitality of a right C-comodule"""
    report = VerificationReport(subject="coalgebra comodule")
    witness = None
    for v in range(dim):
        left: Tensor = {}
        right: Tensor = {}
        for (w, h), val in rho[v].items():
            for (w2, h2), z in rho[w].items():
                tensor_add(left, {(w2, h2, h): val * z})
            for (p, q), z in C.comul[h].items():
                tensor_add(right, {(w, p, q): val * z})
        if left != right:
            witness = v
            break
    report.add("coassociativity", witness is None, witness)
    witness = None
    for v in range(dim):
        value: Vec = {}
        for (w, h), val in rho[v].items():
            add_into(value, {w: val * C.counit[h]})
        if value != unit_vec(v):
            witness = v
            break
    report.add("counitality", witness is None, witness)
    return report


@dataclass(frozen=True, eq=False)
class EntwiningData:
    entwining: Entwining
    based: BasedCoring
    complex: ComoduleComplex
    report: VerificationReport = field(repr=False, default=None)


def catalog_entwining(ent: Entwining, e: Optional[Vec] = None, V: Optional[tuple] = None, window: int = 2,
                      max_degree: int = 4) -> EntwiningData:
    """
    the coring of an entwining structure based at 1 (x) e, and the complex M^l = V (x) A^{(x)l+1},
    l = 0..window, with coaction through iterated psi and delta^l = sum_{k<=l} (-1)^k (unit inserted at k)

    :param e: element of C with eps(e) = 1, the first group-like basis element by default
    :param V: (dim, rho) with rho[v] = {(w, h): scalar}; C itself when omitted
    """
    A, Cc = ent.algebra, ent.coalgebra
    coring = entwining_coring(ent)
    d, dc = A.dim, Cc.dim
    if e is None:
        e = next(unit_vec(h) for h in range(dc) if Cc.counit[h] == ONE)
    e = vec_from_any(e, dc)
    units = _unit_words(A)
    x = {beta * dc + h: u * val for beta, u in units for h, val in e.items()}
    b = based(coring, x)
    if V is None:
        V = (dc, [dict(Cc.comul[h]) for h in range(dc)])
    dim_v, rho_v = V[0], [{tuple(k): scalar(val) for k, val in r.items()} for r in V[1]]
    comodule_report = check_coalgebra_comodule(Cc, dim_v, rho_v)
    if not comodule_report.passed:
        raise comodule_report.first_failure_error(NotComodule, "catalog_entwining -- V is not a C-comodule")

    terms, deltas = [], []
    for level in range(window + 1):
        M = free_right_module(A, dim_v * d ** level, name=f"V(x)A^{level + 1}")
        lifts = []
        for m in range(M.rank):
            word = _digits(m, dim_v, d, level + 1)
            states = [((w,), h, val) for (w, h), val in rho_v[word[0]].items()]
            for a in word[1:]:
                states = [(prefix + (a1,), h1, val * z) for prefix, h, val in states
                          for a1, h1, z in _psi_terms(ent, h, a)]
            lift: Tensor = {}
            for prefix, h, val in states:
                for beta, u in units:
                    tensor_add(lift, {(_number(prefix, d), beta * dc + h): val * u})
            lifts.append(lift)
        terms.append(make_comodule(coring, M, lifts, name=f"M^{level}", check=False))
        if level < window:
            columns = []
            for m in range(M.rank):
                word = _digits(m, dim_v, d, level + 1)
                image: Vec = {}
                for k in range(level + 1):
                    for beta, u in units:
                        add_into(image, {_number(word[:k + 1] + (beta,) + word[k + 1:], d): parity_sign(k) * u})
                columns.append(image)
            deltas.append(columns)
    complex_ = make_complex(coring, 0, terms, deltas, name=f"V(x)A^. over {coring.name}")
    report = VerificationReport(subject=f"entwining catalog {ent.name}".strip())
    report.extend(check_entwining(ent), prefix="bow_tie")
    report.extend(comodule_report, prefix="V")
    report.extend(entwining_formulas(t_flat(coring, x, max_degree=max_degree, check_oracle=False), ent, e))
    report.note("flatness over the ground field is automatic")
    LOG.debug("catalog_entwining: ranks %s", [t.rank for t in terms])
    return EntwiningData(entwining=ent, based=b, complex=complex_, report=report)


def _digits(m: int, dim_v: int, d: int, count: int) -> tuple:
    """basis index of V (x) A^{(x)count} -> (v, a_1, ..., a_count), last factor fastest"""
    digits = []
    for _ in range(count):
        m, a = divmod(m, d)
        digits.append(a)
    return (m,) + tuple(reversed(digits))


def _number(word: tuple, d: int) -> int:
    index = word[0]
    for a in word[1:]:
        index = index * d + a
    return index


def _psi_terms(ent: Entwining, h: int, a: int) -> list:
    dc = ent.coalgebra.dim
    return [(i // dc, i % dc, val) for i, val in ent.psi[h][a].items()]


def entwining_formulas(result: TFlatResult, ent: Entwining, e: Vec) -> VerificationReport:
    """
    with x = 1 (x) e: d(a) = psi(e (x) a) - a (x) e and, for c in ker eps_C,
    d(a (x) c) = psi(e (x) a) (x) c - a (x) Delta(c) + a (x) c (x) e
    """
    A, Cc, c = ent.algebra, ent.coalgebra, result.coring
    d, dc = A.dim, Cc.dim
    units = _unit_words(A)
    report = VerificationReport(subject="entwining formulas", window=[0, 1])

    def psi_e(a: int) -> Vec:
        value: Vec = {}
        for h, val in e.items():
            add_into(value, ent.psi[h][a], val)
        return value

    witness = next((a for a in range(d)
                    if result.cdga.d(0, unit_vec(a)) != vec_sub(psi_e(a), {a * dc + h: v for h, v in e.items()})),
                   None)
    report.add("differential.degree0", witness is None, witness)
    kernel = kernel_subspace(dc, [{h: val for h, val in enumerate(Cc.counit) if val}])
    witness = None
    for a, k in product(range(d), range(kernel.dim)):
        chat = kernel.basis[k]
        element = {a * dc + h: val for h, val in chat.items()}
        plain: Tensor = {}
        for (i, val), (h, w) in product(psi_e(a).items(), chat.items()):
            for beta, u in units:
                tensor_add(plain, {(i, beta * dc + h): val * w * u})
        for h, w in chat.items():
            for (p, q), val in Cc.comul[h].items():
                for beta, u in units:
                    tensor_add(plain, {(a * dc + p, beta * dc + q): -w * val * u})
            for (g, val), (beta, u) in product(e.items(), units):
                tensor_add(plain, {(a * dc + h, beta * dc + g): w * val * u})
        if result.cdga.d(1, element) != c.CC.project(plain):
            witness = [a, k]
            break
    report.add("differential.degree1", witness is None, witness)
    return report
