"""
Comatrix corings P* (x)_B P of a finitely generated projective right A-module P and a subalgebra B of
End_A(P), their based CDGAs, and the pre-Galois morphism into any CDGA over which P carries an
integrable connection.

Endomorphisms of P are given as column lists: columns[m] is the image of the m-th basis vector.
The CDGA in degree n is also described inside P* (x)_B S^{(x)n-1} (x)_B P, S = End_A(P), as the common
kernel of the maps Phi_i that contract neighbouring factors; `comatrix_degree_dimension` computes it
independently of the quotient construction.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from coring_cdga.algmod import (Algebra, HomSpace, ModuleSpace, TensorSpace, check_module, dual_right_module,
                                hom_right_A, identity_algebra_map, kernel_subspace, make_algebra, span_subspace,
                                tensor_add, tensor_chain)
from coring_cdga.cdga import CDGAMorphism, SemiFreeCDGA, check_cdga_morphism
from coring_cdga.comod import Comodule, ZConnection, check_comodule, connection_from_complex, make_comodule, \
    single_term_complex
from coring_cdga.contra import LeftConnection, ZDivergence, divergence_from_left_connection, make_left_connection
from coring_cdga.coring import BasedCoring, Coring, based, check_coring, find_base_points, make_coring
from coring_cdga.equiv import TBasedResult, lift_to_coring, t_based
from coring_cdga.errors import BNotClosed, ConnectionNotIntegrable, DomainMismatch, NotProgenerator, ShapeError
from coring_cdga.exactla import ONE, Vec, add_into, matrix_from_columns, rank, rref_rows, sparse_solve, unit_vec, \
    vec_from_any, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)


def _apply(columns: Sequence[Vec], v: Vec) -> Vec:
    result: Vec = {}
    for i, val in v.items():
        add_into(result, columns[i], val)
    return result


def _solve_in_span(vectors: Sequence[Vec], target: Vec, size: int) -> Optional[Vec]:
    """coefficients c with sum c_j vectors[j] = target, or None"""
    rows: list[Vec] = [dict() for _ in range(size)]
    for j, v in enumerate(vectors):
        for r, val in v.items():
            rows[r][j] = val
    return sparse_solve(rows, [target.get(r, 0) for r in range(size)], len(vectors))


def _project_factors(space: TensorSpace, vectors: Sequence[Vec]) -> Vec:
    """the elementary tensor of one vector per factor, projected into `space`"""
    plain = {}
    for items in product(*(v.items() for v in vectors)):
        coeff = ONE
        for _, val in items:
            coeff *= val
        tensor_add(plain, {tuple(i for i, _ in items): coeff})
    return space.project(plain)


def comatrix_algebra(P: ModuleSpace, B_basis: Sequence[Sequence], name: str = "B") -> Algebra:
    """
    the subalgebra of End_A(P) spanned by B_basis, with structure constants from composition

    raises BNotClosed if an element is not right A-linear, if the span misses the identity or if it is
    not closed under composition
    """
    S = hom_right_A(P, P)
    endos, vectors = [], []
    for b, cols in enumerate(B_basis):
        if len(cols) != P.rank:
            raise ShapeError(f"comatrix_algebra -- endomorphism {b} has {len(cols)} columns, P has rank {P.rank}")
        cols = [vec_from_any(col, P.rank) for col in cols]
        if not S.contains(cols):
            raise BNotClosed(f"comatrix_algebra -- element {b} is not right A-linear", witness=b)
        endos.append(cols)
        vectors.append(S.coordinates(cols))
    if len(rref_rows(vectors, S.rank)[1]) != len(vectors):
        raise ShapeError("comatrix_algebra -- the basis of B is linearly dependent")
    unit = _solve_in_span(vectors, S.coordinates([unit_vec(m) for m in range(P.rank)]), S.rank)
    if unit is None:
        raise BNotClosed("comatrix_algebra -- B does not contain the identity", witness="unit")
    table = []
    for i, f in enumerate(endos):
        row = []
        for j, g in enumerate(endos):
            coeffs = _solve_in_span(vectors, S.coordinates([_apply(f, col) for col in g]), S.rank)
            if coeffs is None:
                raise BNotClosed("comatrix_algebra -- B is not closed under composition", witness=[i, j])
            row.append(coeffs)
        table.append(row)
    return make_algebra(len(endos), unit, table, name=name)


def endomorphism_bimodule(P: ModuleSpace) -> HomSpace:
    """S = End_A(P) as a B-bimodule, (b s b')(p) = b(s(b' p)), for P with a left B-action"""
    H = hom_right_A(P, P)
    B = P.left_algebra
    left = tuple(tuple(H.coordinates([P.act_left(unit_vec(b), col) for col in H.columns({s: ONE})])
                       for s in range(H.rank)) for b in range(B.dim))
    return HomSpace(rank=H.rank, algebra=H.algebra, right=H.right, left=left, left_algebra=B,
                    name=f"End({P.name or 'P'})", source=P, target=P, basis_maps=H.basis_maps,
                    free_vars=H.free_vars)


@dataclass(frozen=True, eq=False)
class ComatrixCoring:
    algebra: Algebra
    P: ModuleSpace
    B: Algebra
    B_basis: tuple
    S: HomSpace
    Pstar: ModuleSpace
    dual: HomSpace
    PPstar: TensorSpace
    dual_basis: Vec
    coring: Coring
    comodule: Comodule
    report: VerificationReport = field(repr=False, default=None)

    @property
    def C(self) -> TensorSpace:
        return self.coring.C

    def theta(self, p: int, chi: int) -> Vec:
        """Theta(p (x) chi) = [q -> p chi(q)] in S"""
        return self.S.coordinates([self.P.act_right(unit_vec(p), self.dual.evaluate({chi: ONE}, unit_vec(q)))
                                   for q in range(self.P.rank)])

    @property
    def identity(self) -> Vec:
        return self.S.coordinates([unit_vec(m) for m in range(self.P.rank)])


def comatrix_coring(A: Algebra, P: ModuleSpace, B_basis: Optional[Sequence[Sequence]] = None,
                    name: str = "") -> ComatrixCoring:
    """
    C = P* (x)_B P with Delta(chi (x) p) = chi (x) e (x) p and eps(chi (x) p) = chi(p), where e is the dual
    basis element Theta^{-1}(1); P is a right C-comodule by p -> e (x) p

    :param B_basis: endomorphisms spanning B, the scalars when omitted
    raises NotProgenerator if there is no dual basis or the evaluation misses the unit, BNotClosed for a bad B
    """
    if P.algebra is not A or P.right is None:
        raise DomainMismatch("comatrix_coring -- P must be a right module over A")
    if B_basis is None:
        B_basis = [[unit_vec(m) for m in range(P.rank)]]
    B = comatrix_algebra(P, B_basis)
    endos = tuple(tuple(vec_from_any(col, P.rank) for col in cols) for cols in B_basis)
    P_B = ModuleSpace(rank=P.rank, algebra=A, right=P.right, left=tuple(tuple(dict(col) for col in cols)
                                                                         for cols in endos),
                      left_algebra=B, labels=P.labels, name=P.name or "P")
    report = VerificationReport(subject=f"comatrix coring of {P_B.name}")
    report.extend(check_module(P_B), prefix="P")

    Pstar, dual = dual_right_module(P_B, name=f"{P_B.name}*")
    S = endomorphism_bimodule(P_B)
    PPstar = tensor_chain([P_B, Pstar])
    shell = ComatrixCoring(algebra=A, P=P_B, B=B, B_basis=endos, S=S, Pstar=Pstar, dual=dual, PPstar=PPstar,
                           dual_basis={}, coring=None, comodule=None)
    images = [shell.theta(p, chi) for p, chi in PPstar.words]
    theta_rank = rank(matrix_from_columns(images, S.rank)) if images else 0
    report.add("theta.isomorphism", theta_rank == PPstar.rank == S.rank,
               {"rank": theta_rank, "P(x)P*": PPstar.rank, "S": S.rank})
    e = _solve_in_span(images, shell.identity, S.rank)
    if e is None:
        raise NotProgenerator("comatrix_coring -- P has no dual basis, it is not finitely generated projective")

    C = tensor_chain([Pstar, P_B])
    e_words = PPstar.lift(e)
    lifts = []
    for chi, p in C.words:
        lift = {}
        for (q, psi), coef in e_words.items():
            right = C.project_word((psi, p))
            for i, a in C.project_word((chi, q)).items():
                for j, b in right.items():
                    tensor_add(lift, {(i, j): coef * a * b})
        lifts.append(lift)
    counit = [dual.evaluate({chi: ONE}, unit_vec(p)) for chi, p in C.words]
    coring = make_coring(A, C, lifts, counit, name=name or f"{Pstar.name} (x)_{B.name} {P_B.name}")
    report.extend(check_coring(coring), prefix="coring")
    points = find_base_points(coring)
    report.add("evaluation.surjective", points.found)
    if not points.found:
        raise NotProgenerator("comatrix_coring -- the evaluation P* (x) P -> A misses the unit, P is no generator")

    rho = []
    for p in range(P_B.rank):
        lift = {}
        for (q, psi), coef in e_words.items():
            for c, val in C.project_word((psi, p)).items():
                tensor_add(lift, {(q, c): coef * val})
        rho.append(lift)
    comodule = make_comodule(coring, P_B, rho, name=P_B.name, check=False)
    report.extend(check_comodule(comodule), prefix="comodule")
    LOG.debug("comatrix_coring: P rank %d, B dim %d, C rank %d", P_B.rank, B.dim, C.rank)
    return ComatrixCoring(algebra=A, P=P_B, B=B, B_basis=endos, S=S, Pstar=Pstar, dual=dual, PPstar=PPstar,
                          dual_basis=e, coring=coring, comodule=comodule, report=report)


@dataclass(frozen=True, eq=False)
class ComatrixData:
    """a comatrix coring with a base point, its CDGA and the connection of the comodule P"""
    comatrix: ComatrixCoring
    result: TBasedResult
    connection: ZConnection
    report: VerificationReport = field(repr=False, default=None)

    @property
    def based(self) -> BasedCoring:
        return self.result.based

    @property
    def coring(self) -> Coring:
        return self.comatrix.coring

    @property
    def cdga(self) -> SemiFreeCDGA:
        return self.result.cdga

    @property
    def x(self) -> Vec:
        return self.result.x


def comatrix_cdga(cm: ComatrixCoring, x: Optional[Vec] = None, max_degree: int = 4) -> ComatrixData:
    """T(C, x) for the comatrix coring and the connection p -> e (x) p - p (x) x on P"""
    result = t_based(based(cm.coring, x), max_degree=max_degree)
    connection = connection_from_complex(single_term_complex(cm.comodule), target=result, based_variant=True,
                                         max_degree=max_degree)
    report = VerificationReport(subject=f"comatrix CDGA of {cm.P.name}", window=[0, max_degree])
    report.extend(cm.report)
    report.extend(result.report, prefix="T")
    report.extend(connection.report, prefix="connection")
    return ComatrixData(comatrix=cm, result=result, connection=connection, report=report)


# the description inside P* (x)_B S^{(x)n-1} (x)_B P

def comatrix_space(cm: ComatrixCoring, n: int) -> TensorSpace:
    """P* (x)_B S^{(x)n-1} (x)_B P; n = 1 is C itself"""
    if n < 1:
        raise ShapeError("comatrix_space -- n must be positive")
    return tensor_chain([cm.Pstar] + [cm.S] * (n - 1) + [cm.P])


def _compose_dual(cm: ComatrixCoring, chi: int, s: int) -> Vec:
    return cm.dual.coordinates([cm.dual.evaluate({chi: ONE}, cm.S.evaluate({s: ONE}, unit_vec(q)))
                                for q in range(cm.P.rank)])


def _compose_endos(cm: ComatrixCoring, s: int, t: int) -> Vec:
    return cm.S.coordinates([cm.S.evaluate({s: ONE}, cm.S.evaluate({t: ONE}, unit_vec(q)))
                             for q in range(cm.P.rank)])


def phi_map(cm: ComatrixCoring, m: int, i: int) -> list[Vec]:
    """
    columns of Phi_i: P* (x) S^{(x)m} (x) P -> P* (x) S^{(x)m-1} (x) P for m >= 1, contracting the
    factors i and i + 1; m = 0 is the evaluation into A
    """
    if m == 0:
        return list(cm.coring.counit)
    if not 0 <= i <= m:
        raise ShapeError(f"phi_map -- index {i} outside [0, {m}]", witness=[m, i])
    source, target = comatrix_space(cm, m + 1), comatrix_space(cm, m)
    columns = []
    for word in source.words:
        vectors = [unit_vec(w) for w in word]
        if i == 0:
            merged = _compose_dual(cm, word[0], word[1])
        elif i == m:
            merged = cm.S.evaluate({word[m]: ONE}, unit_vec(word[m + 1]))
        else:
            merged = _compose_endos(cm, word[i], word[i + 1])
        columns.append(_project_factors(target, vectors[:i] + [merged] + vectors[i + 2:]))
    return columns


def phi_kernel(cm: ComatrixCoring, n: int):
    """the common kernel of Phi_0..Phi_{n-1} on P* (x) S^{(x)n-1} (x) P, a Subspace"""
    m = n - 1
    source_rank = comatrix_space(cm, n).rank
    target_rank = cm.algebra.dim if m == 0 else comatrix_space(cm, m).rank
    rows = []
    for i in range(n):
        block: list[Vec] = [dict() for _ in range(target_rank)]
        for j, col in enumerate(phi_map(cm, m, i)):
            for r, val in col.items():
                block[r][j] = val
        rows.extend(block)
    return kernel_subspace(source_rank, rows)


def comatrix_degree_dimension(cm: ComatrixCoring, n: int) -> int:
    """dimension over QQ of the degree-n part of T(C, x), from the Phi kernels"""
    if n == 0:
        return cm.algebra.dim
    return phi_kernel(cm, n).dim


def to_comatrix_form(cm: ComatrixCoring, n: int, tensor: dict) -> Vec:
    """
    c_1 (x) ... (x) c_n in C^{(x)n}, given as a plain tensor of C-words, sent to
    chi_1 (x) Theta(p_1 (x) chi_2) (x) ... (x) p_n
    """
    space = comatrix_space(cm, n)
    result: Vec = {}
    C = cm.C
    for word, val in tensor.items():
        pairs = [C.words[c] for c in word]
        vectors = [unit_vec(pairs[0][0])]
        for (_, p), (chi, _) in zip(pairs, pairs[1:]):
            vectors.append(cm.theta(p, chi))
        vectors.append(unit_vec(pairs[-1][1]))
        add_into(result, _project_factors(space, vectors), val)
    return result


def check_comatrix_description(data: ComatrixData, max_n: Optional[int] = None) -> VerificationReport:
    """
    compares T(C, x) with its description inside P* (x) S^{(x)n-1} (x) P: dimensions, the image of each
    degree in the Phi kernel, and the closed forms of d on C+ and of the curvature
    """
    cm, cdga, result = data.comatrix, data.cdga, data.result
    max_n = max_n or min(cdga.max_degree, 3)
    report = VerificationReport(subject=f"comatrix description of {cm.P.name}", window=[1, max_n])
    inclusion = result.splitting.inclusion.columns

    for n in range(1, max_n + 1):
        kernel = phi_kernel(cm, n)
        report.add(f"dimension.degree{n}", kernel.dim == cdga.dim(n), {"phi": kernel.dim, "T": cdga.dim(n)})
        images = [to_comatrix_form(cm, n, lift_to_coring(result, n, unit_vec(i))) for i in range(cdga.dim(n))]
        witness = next((i for i, v in enumerate(images) if not kernel.contains(v)), None)
        report.add(f"image_in_kernel.degree{n}", witness is None, witness)
        span = span_subspace(comatrix_space(cm, n).rank, images)
        report.add(f"injective.degree{n}", span.dim == len(images), {"rank": span.dim, "dim": len(images)})

    x_words = [(cm.C.words[c], val) for c, val in data.x.items()]
    W2 = comatrix_space(cm, 2)

    def closed_form(v: Vec) -> Vec:
        image: Vec = {}
        for c, val in v.items():
            chi, p = cm.C.words[c]
            add_into(image, _project_factors(W2, [unit_vec(chi), cm.identity, unit_vec(p)]), -val)
            for (xi, xp), w in x_words:
                add_into(image, _project_factors(W2, [unit_vec(xi), cm.theta(xp, chi), unit_vec(p)]), val * w)
                add_into(image, _project_factors(W2, [unit_vec(chi), cm.theta(p, xi), unit_vec(xp)]), val * w)
        return image

    def differential(i: int) -> Vec:
        return to_comatrix_form(cm, 2, lift_to_coring(result, 2, cdga.d(1, unit_vec(i))))

    witness = next((i for i in range(cdga.dim(1)) if differential(i) != closed_form(inclusion[i])), None)
    report.add("differential.degree1", witness is None, witness)
    gamma: Vec = {}
    for (xi, xp), w in x_words:
        add_into(gamma, _project_factors(W2, [unit_vec(xi), cm.identity, unit_vec(xp)]), -w)
        for (yi, yp), u in x_words:
            add_into(gamma, _project_factors(W2, [unit_vec(xi), cm.theta(xp, yi), unit_vec(yp)]), w * u)
    actual = to_comatrix_form(cm, 2, lift_to_coring(result, 2, cdga.gamma))
    report.add("curvature", actual == gamma, witness_vec(vec_sub(actual, gamma)))
    return report


# pre-Galois

@dataclass(frozen=True, eq=False)
class PreGalois:
    source: ComatrixData
    morphism: CDGAMorphism
    report: VerificationReport = field(repr=False, default=None)


def pregalois_theta(cdga: SemiFreeCDGA, conn: ZConnection, B_basis: Optional[Sequence[Sequence]] = None,
                    x: Optional[Vec] = None, source: Optional[ComatrixData] = None) -> PreGalois:
    """
    the morphism (id, theta_1, omega) from the comatrix CDGA of (P, B, x) into `cdga`, where P is the
    degree-0 module of `conn`: theta^L(chi (x) p) = sum chi(q) v for nabla(p) = sum q (x) v, theta_1 its
    restriction to ker eps and omega = theta^L(x)

    raises NotProgenerator, BNotClosed (some b in B does not commute with nabla) or ConnectionNotIntegrable
    """
    if conn.cdga is not cdga:
        raise DomainMismatch("pregalois_theta -- the connection lives over another CDGA")
    if conn.term_lo != 0 or conn.term_hi != 0:
        raise ShapeError("pregalois_theta -- the connection must be concentrated in degree 0",
                         witness=[conn.term_lo, conn.term_hi])
    bad = [c for c in conn.report.failures if "curvature" in c.name]
    if bad:
        raise ConnectionNotIntegrable(f"pregalois_theta -- {bad[0].name} failed", witness=bad[0].witness)
    P, A, V = conn.term(0), cdga.algebra, cdga.V
    if source is None:
        source = comatrix_cdga(comatrix_coring(A, P, B_basis), x, max_degree=cdga.max_degree)
    cm = source.comatrix
    if cm.algebra is not A or cm.P.rank != P.rank:
        raise DomainMismatch("pregalois_theta -- the comatrix data is not built on the module of the connection")

    block = tensor_chain([P, V])
    nabla = conn.component(1, 0) or tuple({} for _ in range(P.rank))
    nabla_words = [block.lift(col) for col in nabla]
    for b, endo in enumerate(cm.B_basis):
        for p in range(P.rank):
            lhs = _apply(nabla, endo[p])
            rhs = {}
            for (q, v), val in nabla_words[p].items():
                for r, w in endo[q].items():
                    tensor_add(rhs, {(r, v): val * w})
            if lhs != block.project(rhs):
                raise BNotClosed("pregalois_theta -- an element of B does not commute with nabla", witness=[b, p])

    C = cm.C
    theta_basis = []
    for chi, p in C.words:
        value: Vec = {}
        for (q, v), val in nabla_words[p].items():
            add_into(value, V.act_left(cm.dual.evaluate({chi: ONE}, unit_vec(q)), unit_vec(v)), val)
        theta_basis.append(value)

    def theta_left(c: Vec) -> Vec:
        return _apply(theta_basis, c)

    def theta_right(c: Vec) -> Vec:
        return vec_sub(theta_left(c), cdga.d(0, cm.coring.eps(c)))

    omega = theta_left(source.x)
    morphism = CDGAMorphism(source=source.cdga, target=cdga, f0=identity_algebra_map(A),
                            f1=tuple(theta_left(col) for col in source.result.splitting.inclusion.columns),
                            omega=omega)
    report = VerificationReport(subject=f"pre-Galois morphism of {P.name or 'P'}".strip(), window=[0, 2])
    witness = next(([c, a] for c in range(C.rank) for a in range(A.dim)
                    if theta_right(C.right[c][a]) != V.act_right(theta_right(unit_vec(c)), unit_vec(a))), None)
    report.add("theta_R.rightA", witness is None, witness)
    report.add("omega.theta_R", theta_right(source.x) == omega, witness_vec(theta_right(source.x)))
    report.extend(check_cdga_morphism(morphism), prefix="morphism")
    if not report.passed:
        LOG.warning("pregalois_theta: %s", [failure.name for failure in report.failures])
    return PreGalois(source=source, morphism=morphism, report=report)


# P* as a left comodule, and its dual divergence

def comatrix_left_connection(data: ComatrixData) -> LeftConnection:
    """the left connection chi -> x (x) chi - chi (x) e on P* over T(C, x), landing in C+ (x)_A P*"""
    cm, cdga = data.comatrix, data.cdga
    pi_right = data.result.splitting.pi_right
    block = tensor_chain([cdga.space(1), cm.Pstar])
    e_words = cm.PPstar.lift(cm.dual_basis)
    columns = []
    for chi in range(cm.Pstar.rank):
        plain = {(c, chi): val for c, val in data.x.items()}
        for (q, psi), coef in e_words.items():
            for c, val in cm.C.project_word((chi, q)).items():
                tensor_add(plain, {(c, psi): -coef * val})
        pushed = {}
        for (c, m), val in plain.items():
            for r, w in pi_right.columns[c].items():
                tensor_add(pushed, {(r, m): val * w})
        columns.append(block.project(pushed))
    return make_left_connection(cdga, cm.B, [cm.Pstar], 0, {(1, 0): columns}, name=cm.Pstar.name)


def comatrix_dual_divergence(data: ComatrixData) -> ZDivergence:
    """the divergence on Hom_B(P*, B) dual to `comatrix_left_connection`"""
    return divergence_from_left_connection(comatrix_left_connection(data))
