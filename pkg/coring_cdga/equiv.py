"""
The functors between corings and semi-free curved differential graded algebras.

T-flat sends (C, x) to T_A(C) with d_x(a) = xa - ax, d_x(c) = x (x) c - Delta(c) + c (x) x and
gamma_x = x (x) x - Delta(x). For a base point x the based variant T lives on C+ = ker eps, where the
same differential is -(pi_R (x) pi_L) Delta. U sends a semi-free CDGA to the coring A x (+) V based at x.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

from coring_cdga.algmod import (LinMap, ModuleSpace, Tensor, check_inverse, identity_algebra_map, identity_map,
                                tensor_add)
from coring_cdga.cdga import (CDGAMorphism, SemiFreeCDGA, cdga_equal, check_cdga_morphism, identity_cdga_morphism,
                              make_cdga)
from coring_cdga.coring import (BasedCoring, Coring, CoringMorphism, Splitting, check_coring,
                                check_coring_morphism, is_base_point, is_grouplike, make_coring, split_at)
from coring_cdga.errors import DomainMismatch, NotBased, NotMorphism
from coring_cdga.exactla import ONE, Vec, add_into, is_invertible, unit_vec, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class TFlatResult:
    coring: Coring
    x: Vec
    cdga: SemiFreeCDGA
    report: VerificationReport = field(repr=False, default=None)


@dataclass(frozen=True, eq=False)
class TBasedResult:
    based: BasedCoring
    splitting: Splitting
    cdga: SemiFreeCDGA
    report: VerificationReport = field(repr=False, default=None)

    @property
    def coring(self) -> Coring:
        return self.based.coring

    @property
    def x(self) -> Vec:
        return self.based.base_point


@dataclass(frozen=True, eq=False)
class UResult:
    cdga: SemiFreeCDGA
    coring: Coring
    based: BasedCoring
    report: VerificationReport = field(repr=False, default=None)

    @property
    def offset(self) -> int:
        """index of the first V-basis vector in A x (+) V"""
        return self.cdga.algebra.dim


def _scaled_words(x: Vec, make_word) -> Tensor:
    result: Tensor = {}
    for i, val in x.items():
        tensor_add(result, {make_word(i): val})
    return result


def _lift_of(c: Coring, v: Vec) -> Tensor:
    """a plain lift of Delta(v)"""
    result: Tensor = {}
    for i, val in v.items():
        tensor_add(result, c.delta_lift[i], val)
    return result


def t_flat(c: Coring, x: Optional[Vec] = None, max_degree: int = 4, check_oracle: bool = True) -> TFlatResult:
    """
    T-flat(C, x); x may be any element of C (no counit condition)

    :return: TFlatResult whose report holds the generator checks and, with check_oracle, the closed-form
        differential compared against the Leibniz extension in every degree below D
    """
    x = dict(x or {})
    A, C = c.algebra, c.C
    d0 = [vec_sub(C.act_right(x, unit_vec(a)), C.act_left(unit_vec(a), x)) for a in range(A.dim)]
    d1_lift = []
    for k in range(C.rank):
        lift = _scaled_words(x, lambda i: (i, k))
        tensor_add(lift, c.delta_lift[k], -ONE)
        tensor_add(lift, _scaled_words(x, lambda i: (k, i)))
        d1_lift.append(lift)
    gamma: Tensor = {}
    for i, a in x.items():
        for j, b in x.items():
            tensor_add(gamma, {(i, j): a * b})
    tensor_add(gamma, _lift_of(c, x), -ONE)
    cdga = make_cdga(A, C, d0, d1_lift, gamma, max_degree=max_degree, name=f"Tflat({c.name})")
    report = VerificationReport(subject=f"T-flat of {c.name}".strip(), window=[0, max_degree - 1])
    report.add("make_cdga", True)
    result = TFlatResult(coring=c, x=x, cdga=cdga, report=report)
    if check_oracle:
        for n in range(0, max_degree):
            witness = next((i for i in range(cdga.dim(n))
                            if cdga.d(n, unit_vec(i)) != explicit_flat_differential(result, n, i)), None)
            report.add(f"explicit_formula.degree{n}", witness is None, witness, window=[n, n])
    LOG.debug("t_flat %s: rank T^1 = %d", c.name, C.rank)
    return result


def explicit_flat_differential(result: TFlatResult, n: int, index: int) -> Vec:
    """
    the closed form of d_x on the basis element `index` of T^n:
    xa - ax in degree 0, and x (x) c + sum_k (-1)^k Delta_k(c) + (-1)^{n+1} c (x) x for n >= 1
    """
    c, x, cdga = result.coring, result.x, result.cdga
    if n == 0:
        return vec_sub(c.C.act_right(x, unit_vec(index)), c.C.act_left(unit_vec(index), x))
    word = cdga.words(n)[index]
    image: Tensor = {}
    for i, val in x.items():
        tensor_add(image, {(i,) + word: val})
    for k in range(n):
        sign = -ONE if k % 2 == 0 else ONE
        for pair, val in c.delta_lift[word[k]].items():
            tensor_add(image, {word[:k] + pair + word[k + 1:]: val}, sign)
    end_sign = ONE if n % 2 == 1 else -ONE
    for i, val in x.items():
        tensor_add(image, {word + (i,): val}, end_sign)
    return cdga.project(n + 1, image)


def _push_pair(tensor: Tensor, left: LinMap, right: LinMap, coeff=ONE) -> Tensor:
    """(left (x) right) on a plain tensor of pairs"""
    result: Tensor = {}
    for (i, j), val in tensor.items():
        for p, a in left.columns[i].items():
            for q, b in right.columns[j].items():
                tensor_add(result, {(p, q): coeff * val * a * b})
    return result


def t_based(b: BasedCoring, max_degree: int = 4, check: bool = True) -> TBasedResult:
    """
    T(C, x) on C+; the report compares it with T-flat(C, x) through the inclusion C+ -> C, which must be a
    CDGA morphism with omega = 0 since both differentials agree on C+
    """
    c, x = b.coring, b.base_point
    if not is_base_point(c, x):
        raise NotBased("t_based -- eps(x) != 1", witness=witness_vec(c.eps(x)))
    s = split_at(b)
    A = c.algebra
    d0 = [s.kernel.coords(vec_sub(c.C.act_right(x, unit_vec(a)), c.C.act_left(unit_vec(a), x)))
          for a in range(A.dim)]
    d1_lift = [_push_pair(_lift_of(c, col), s.pi_right, s.pi_left, -ONE) for col in s.inclusion.columns]
    gamma = _push_pair(_lift_of(c, x), s.pi_right, s.pi_left, -ONE)
    cdga = make_cdga(A, s.cplus, d0, d1_lift, gamma, max_degree=max_degree, name=f"T({c.name})")
    report = VerificationReport(subject=f"T of {c.name}".strip(), window=[0, 2])
    report.extend(s.report, prefix="splitting")
    result = TBasedResult(based=b, splitting=s, cdga=cdga, report=report)
    if check:
        flat = t_flat(c, x, max_degree=max_degree, check_oracle=False)
        inclusion = CDGAMorphism(source=cdga, target=flat.cdga, f0=identity_algebra_map(A),
                                 f1=tuple(dict(col) for col in s.inclusion.columns), omega={})
        report.extend(check_cdga_morphism(inclusion), prefix="restriction")
    return result


def lift_to_coring(t: TBasedResult, n: int, v: Vec) -> Tensor:
    """an element of T(C, x)^n (n >= 1) as a plain tensor over words of C, through C+ -> C"""
    columns = t.splitting.inclusion.columns
    words = {(i,): val for i, val in v.items()} if n == 1 else t.cdga.space(n).lift(v)
    result: Tensor = {}
    for word, val in words.items():
        expanded = {(): val}
        for w in word:
            expanded = {key + (c,): coef * x for key, coef in expanded.items() for c, x in columns[w].items()}
        for key, coef in expanded.items():
            tensor_add(result, {key: coef})
    return result


def t_morphism(m: CoringMorphism, source: TFlatResult, target: TFlatResult, check: bool = True) -> CDGAMorphism:
    """(T(f0, f1), f1(x) - y) from T-flat(C, x) to T-flat(D, y)"""
    if source.coring is not m.source or target.coring is not m.target:
        raise DomainMismatch("t_morphism -- the morphism does not connect the given corings")
    omega = vec_sub(m.f1(source.x), target.x)
    f = CDGAMorphism(source=source.cdga, target=target.cdga, f0=m.f0, f1=tuple(dict(col) for col in m.f1.columns),
                     omega=omega)
    if check:
        report = check_cdga_morphism(f)
        if not report.passed:
            raise report.first_failure_error(NotMorphism, "t_morphism")
    return f


def t_based_morphism(m: CoringMorphism, source: TBasedResult,
                     target: TBasedResult) -> tuple[CDGAMorphism, VerificationReport]:
    """
    the based variant: f1 restricted to C+ (it lands in D+ since eps f1 = f0 eps) and omega = f1(x) - y in D+
    """
    if source.coring is not m.source or target.coring is not m.target:
        raise DomainMismatch("t_based_morphism -- the morphism does not connect the given corings")
    report = VerificationReport(subject="T of a coring morphism")
    ks, kt = source.splitting, target.splitting
    images = [m.f1(col) for col in ks.inclusion.columns]
    omega_full = vec_sub(m.f1(source.x), target.x)
    witness = next((i for i, v in enumerate(images) if not kt.kernel.contains(v)), None)
    report.add("f1.lands_in_D+", witness is None, witness)
    report.add("omega.in_D+", kt.kernel.contains(omega_full), witness_vec(omega_full))
    f = CDGAMorphism(source=source.cdga, target=target.cdga, f0=m.f0,
                     f1=tuple(kt.kernel.coords(v) for v in images), omega=kt.kernel.coords(omega_full))
    report.extend(check_cdga_morphism(f), prefix="morphism")
    return f, report


def base_point_change(c: Coring, x: Vec, y: Vec, max_degree: int = 4) -> tuple[CDGAMorphism, TFlatResult, TFlatResult]:
    """(id, x - y): T-flat(C, x) -> T-flat(C, y)"""
    source = t_flat(c, x, max_degree=max_degree, check_oracle=False)
    target = t_flat(c, y, max_degree=max_degree, check_oracle=False)
    identity = CoringMorphism(source=c, target=c, f0=identity_algebra_map(c.algebra), f1=identity_map(c.C))
    return t_morphism(identity, source, target), source, target


def check_group_like_curvature(b: BasedCoring, max_degree: int = 2) -> VerificationReport:
    """gamma_x = 0 exactly when Delta(x) = x (x) x"""
    report = VerificationReport(subject=f"group-like curvature of {b.name}".strip())
    grouplike = is_grouplike(b.coring, b.base_point)
    gamma = t_based(b, max_degree=max_degree, check=False).cdga.gamma
    report.add("grouplike_iff_flat", grouplike == (not gamma),
               {"grouplike": grouplike, "gamma": witness_vec(gamma)})
    if grouplike:
        report.note("the base point is group-like, so the CDGA is an honest DGA")
    return report


def u_functor(cdga: SemiFreeCDGA, check: bool = True) -> UResult:
    """
    C(A, V) = A x (+) V with (a x + v) a' = a a' x + a d(a') + v a',
    Delta(a x + v) = a x (x) x - a gamma + x (x) v + v (x) x - d v and eps(a x + v) = a
    """
    A, V = cdga.algebra, cdga.V
    n, r = A.dim, A.dim + V.rank
    unit = A.unit

    def shift(v: Vec) -> Vec:
        return {n + k: val for k, val in v.items()}

    left = tuple(tuple([A.table[a][i] for i in range(n)] + [shift(V.left[a][j]) for j in range(V.rank)])
                 for a in range(n))
    right = []
    for i in range(n):
        right.append(tuple(add_into(dict(A.table[i][b]), shift(V.act_left(unit_vec(i), cdga.d0[b])))
                           for b in range(n)))
    for j in range(V.rank):
        right.append(tuple(shift(V.right[j][b]) for b in range(n)))
    C = ModuleSpace(rank=r, algebra=A, right=tuple(right), left=left, left_algebra=A,
                    labels=_u_labels(cdga), name=f"C({cdga.name})")
    gamma = cdga.space(2).lift(cdga.gamma)
    lifts = []
    for i in range(n):
        lift = _scaled_words(unit, lambda k: (i, k))
        for (p, q), val in gamma.items():
            for p2, w in V.left[i][p].items():
                tensor_add(lift, {(n + p2, n + q): -val * w})
        lifts.append(lift)
    for j in range(V.rank):
        lift = _scaled_words(unit, lambda k: (k, n + j))
        tensor_add(lift, _scaled_words(unit, lambda k: (n + j, k)))
        for (p, q), val in cdga.space(2).lift(cdga.d1(unit_vec(j))).items():
            tensor_add(lift, {(n + p, n + q): -val})
        lifts.append(lift)
    counit = [unit_vec(i) for i in range(n)] + [{} for _ in range(V.rank)]
    coring = make_coring(A, C, lifts, counit, name=f"U({cdga.name})")
    result = UResult(cdga=cdga, coring=coring, based=BasedCoring(coring=coring, base_point=dict(unit)),
                     report=check_coring(coring) if check else None)
    return result


def _u_labels(cdga: SemiFreeCDGA) -> Optional[tuple]:
    A, V = cdga.algebra, cdga.V
    return tuple([f"{A.label(i)}x" for i in range(A.dim)] + [V.label(j) for j in range(V.rank)])


def u_morphism(f: CDGAMorphism, source: UResult, target: UResult,
               check: bool = True) -> tuple[CoringMorphism, Optional[VerificationReport]]:
    """C(f)_1: a x + v -> f0(a) y + f0(a) omega + f1(v)"""
    if source.cdga is not f.source or target.cdga is not f.target:
        raise DomainMismatch("u_morphism -- the morphism does not connect the given CDGAs")
    n_src, n_tgt = source.offset, target.offset
    B = f.target

    def shift(v: Vec) -> Vec:
        return {n_tgt + k: val for k, val in v.items()}

    columns = []
    for i in range(n_src):
        fa = f.f0.columns[i]
        columns.append(add_into(dict(fa), shift(B.mul(0, fa, 1, f.omega))))
    for j in range(f.source.V.rank):
        columns.append(shift(f.f1[j]))
    m = CoringMorphism(source=source.coring, target=target.coring, f0=f.f0,
                       f1=LinMap(source=source.coring.C, target=target.coring.C, columns=tuple(columns)))
    return m, check_coring_morphism(m) if check else None


def roundtrip_tu(cdga: SemiFreeCDGA, morphism: Optional[CDGAMorphism] = None) -> VerificationReport:
    """T(U(A)) = A on the nose, and T(U(f)) = f on a sample morphism (the identity by default)"""
    u = u_functor(cdga, check=False)
    t = t_based(u.based, max_degree=cdga.max_degree, check=False)
    report = VerificationReport(subject=f"T U round trip of {cdga.name}".strip(), window=[0, 2])
    report.extend(cdga_equal(t.cdga, cdga), prefix="objects")
    f = morphism or identity_cdga_morphism(cdga)
    if f.source is cdga and f.target is cdga:
        um, _ = u_morphism(f, u, u, check=False)
        tf, _ = t_based_morphism(um, t, t)
        report.add("morphism.f1", tuple(tf.f1) == tuple(f.f1))
        report.add("morphism.omega", tf.omega == f.omega, {"round_trip": witness_vec(tf.omega),
                                                           "original": witness_vec(f.omega)})
    if report.passed:
        report.note("exact equality")
    return report


@dataclass(frozen=True, eq=False)
class RoundTrip:
    phi: CoringMorphism
    psi: CoringMorphism
    u: UResult
    t: TBasedResult
    report: VerificationReport = field(repr=False, default=None)


def roundtrip_ut(b: BasedCoring, max_degree: int = 2,
                 morphisms: Sequence[tuple] = ()) -> RoundTrip:
    """
    phi: c -> eps(c) y + (c - eps(c) x) from C to U(T(C, x)) and its inverse psi: a y + v -> a x + v

    :param morphisms: optional (m, target_based) pairs, m: C -> D a coring morphism and target_based a base
        point of D; naturality U(T(m)) phi_C = phi_D m is checked for each
    """
    c, x = b.coring, b.base_point
    t = t_based(b, max_degree=max_degree, check=False)
    u = u_functor(t.cdga, check=False)
    phi, psi = _roundtrip_maps(t, u)
    report = VerificationReport(subject=f"U T round trip of {c.name}".strip())
    report.extend(check_inverse(phi.f1, psi.f1), prefix="inverse")
    report.extend(check_coring_morphism(phi), prefix="phi")
    report.extend(check_coring_morphism(psi), prefix="psi")
    report.add("base_point", phi.f1(x) == u.based.base_point, witness_vec(phi.f1(x)))
    for k, (m, target_based) in enumerate(morphisms):
        report.extend(_naturality(m, t, target_based, phi, max_degree), prefix=f"naturality{k}")
    return RoundTrip(phi=phi, psi=psi, u=u, t=t, report=report)


def _roundtrip_maps(t: TBasedResult, u: UResult) -> tuple[CoringMorphism, CoringMorphism]:
    c, x, s = t.coring, t.x, t.splitting
    n = c.algebra.dim
    phi_cols = []
    for i in range(c.rank):
        e = unit_vec(i)
        col = dict(c.counit[i])
        add_into(col, {n + k: val for k, val in s.pi_left(e).items()})
        phi_cols.append(col)
    psi_cols = [c.C.act_left(unit_vec(a), x) for a in range(n)] + [dict(v) for v in s.inclusion.columns]
    identity = identity_algebra_map(c.algebra)
    phi = CoringMorphism(source=c, target=u.coring, f0=identity,
                         f1=LinMap(source=c.C, target=u.coring.C, columns=tuple(phi_cols)))
    psi = CoringMorphism(source=u.coring, target=c, f0=identity,
                         f1=LinMap(source=u.coring.C, target=c.C, columns=tuple(psi_cols)))
    return phi, psi


def _naturality(m: CoringMorphism, t: TBasedResult, target_based: BasedCoring, phi: CoringMorphism,
                max_degree: int) -> VerificationReport:
    report = VerificationReport(subject="naturality")
    t_target = t_based(target_based, max_degree=max_degree, check=False)
    u_source = phi.target
    u_target = u_functor(t_target.cdga, check=False)
    phi_target, _ = _roundtrip_maps(t_target, u_target)
    tm, tm_report = t_based_morphism(m, t, t_target)
    report.extend(tm_report, prefix="T")
    source_u = UResult(cdga=t.cdga, coring=u_source, based=BasedCoring(coring=u_source, base_point={}))
    um, _ = u_morphism(tm, source_u, u_target, check=False)
    witness = next((i for i in range(m.source.rank)
                    if um.f1(phi.f1.columns[i]) != phi_target.f1(m.f1.columns[i])), None)
    report.add("square", witness is None, witness)
    return report


def d_variant_iso(cdga: SemiFreeCDGA) -> tuple[CoringMorphism, VerificationReport]:
    """
    the right-handed variant D(A, V) = y A (+) V with a (y b + v) = y a b - d(a) b + a v, and the coring
    isomorphism D(A, V) -> C(A, V), y a + v -> x a + v = a x + d(a) + v
    """
    A, V = cdga.algebra, cdga.V
    n = A.dim
    u = u_functor(cdga, check=False)

    def shift(v: Vec) -> Vec:
        return {n + k: val for k, val in v.items()}

    right = tuple(tuple(A.table[i][b] for b in range(n)) for i in range(n)) + \
        tuple(tuple(shift(V.right[j][b]) for b in range(n)) for j in range(V.rank))
    left = tuple(tuple([add_into(dict(A.table[a][i]), shift(V.act_right(cdga.d0[a], unit_vec(i))), -ONE)
                        for i in range(n)] + [shift(V.left[a][j]) for j in range(V.rank)])
                 for a in range(n))
    D = ModuleSpace(rank=n + V.rank, algebra=A, right=right, left=left, left_algebra=A,
                    labels=tuple([f"y{A.label(i)}" for i in range(n)] + [V.label(j) for j in range(V.rank)]),
                    name=f"D({cdga.name})")
    gamma = cdga.space(2).lift(cdga.gamma)
    lifts = []
    for i in range(n):
        lift = _scaled_words(A.unit, lambda k: (k, i))
        for (p, q), val in gamma.items():
            for q2, w in V.right[q][i].items():
                tensor_add(lift, {(n + p, n + q2): -val * w})
        lifts.append(lift)
    for j in range(V.rank):
        lift = _scaled_words(A.unit, lambda k: (k, n + j))
        tensor_add(lift, _scaled_words(A.unit, lambda k: (n + j, k)))
        for (p, q), val in cdga.space(2).lift(cdga.d1(unit_vec(j))).items():
            tensor_add(lift, {(n + p, n + q): -val})
        lifts.append(lift)
    counit = [unit_vec(i) for i in range(n)] + [{} for _ in range(V.rank)]
    variant = make_coring(A, D, lifts, counit, name=f"D({cdga.name})")
    columns = [add_into(unit_vec(i), shift(cdga.d0[i])) for i in range(n)] + [unit_vec(n + j) for j in range(V.rank)]
    iso = CoringMorphism(source=variant, target=u.coring, f0=identity_algebra_map(A),
                         f1=LinMap(source=D, target=u.coring.C, columns=tuple(columns)))
    report = VerificationReport(subject=f"D(A, V) variant of {cdga.name}".strip())
    report.extend(check_coring(variant), prefix="D")
    report.extend(check_coring_morphism(iso), prefix="iso")
    report.add("iso.invertible", is_invertible(iso.f1.matrix))
    return iso, report
