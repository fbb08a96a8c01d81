"""
Right contramodules over a coring, the graded module Xi(A, M) of a graded right A-module and
Z-divergences on it.

For a truncated CDGA with generator degree bound D and a graded module M^. on [lo, hi],
Xi^n = prod_i Hom_A(A^i, M^{n+i}) is kept on the degrees n >= hi - D, where every component the product
needs has i <= D; above hi it is zero. A divergence is stored as the curved module (Xi, nabla).
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from coring_cdga.algmod import Algebra, HomSpace, LinMap, ModuleSpace, adjunction_iso, check_linmap, check_module, \
    hom_right_A, regular_bimodule, tensor_chain
from coring_cdga.cdga import SemiFreeCDGA
from coring_cdga.coring import Coring, based, find_base_points
from coring_cdga.equiv import t_based, t_flat
from coring_cdga.errors import ComponentLeibnizFailed, DomainMismatch, NotComplex, NotContramodule, \
    NotContramoduleMap, NotRightBLinear, ShapeError, WindowTooNarrow
from coring_cdga.exactla import ONE, Vec, add_into, parity_sign, unit_vec, vec_from_any, vec_sub
from coring_cdga.modules import CurvedModule, check_curved_module, graded_hom_space, induced_xi_module, \
    regular_bimodule_cdga
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)

NABLA1_SIGN_NOTE = ("divergence of a contramodule complex: nabla^p_1(xi) = (-1)^p (alpha_{p+1}(xi) - xi(x)), the sign "
                    "of the expanded formula for nabla^{n,0}; the compact form (-1)^p (xi(x) - alpha(xi)) has the "
                    "opposite sign")


def _apply(columns: Sequence[Vec], v: Vec) -> Vec:
    result: Vec = {}
    for i, val in v.items():
        add_into(result, columns[i], val)
    return result


# contramodules

@dataclass(frozen=True, eq=False)
class Contramodule:
    """a right module M with alpha: Hom_A(C, M) -> M"""
    coring: Coring
    M: ModuleSpace
    alpha: LinMap
    name: str = ""

    @property
    def rank(self) -> int:
        return self.M.rank

    @property
    def homs(self) -> HomSpace:
        return self.alpha.source


def make_contramodule(coring: Coring, M: ModuleSpace, alpha_columns: Sequence, name: str = "",
                      check: bool = True) -> Contramodule:
    """
    alpha is given by its values on the computed basis of Hom_A(C, M)

    raises NotContramodule if an axiom fails and check is set
    """
    if M.algebra is not coring.algebra and M.rank:
        raise DomainMismatch("make_contramodule -- M is not a module over the base algebra of the coring")
    homs = hom_right_A(coring.C, M)
    columns = tuple(vec_from_any(col, M.rank) for col in alpha_columns)
    if len(columns) != homs.rank:
        raise ShapeError(f"make_contramodule -- alpha needs {homs.rank} columns, got {len(columns)}")
    alpha = LinMap(source=homs, target=M, columns=columns, linearity=frozenset({"rightA"}))
    contra = Contramodule(coring=coring, M=M, alpha=alpha, name=name)
    if check:
        report = check_contramodule(contra)
        if not report.passed:
            raise report.first_failure_error(NotContramodule, f"make_contramodule {name}".strip())
    return contra


def check_contramodule(m: Contramodule) -> VerificationReport:
    """
    right A-linearity of alpha, associativity alpha Hom(C, alpha) = alpha Hom(Delta, M) read through the
    adjunction Hom_A(C (x)_A C, M) = Hom_A(C, Hom_A(C, M)), and counitality alpha Hom(eps, M) = id
    """
    c, M, alpha = m.coring, m.M, m.alpha
    report = VerificationReport(subject=f"contramodule {m.name}".strip())
    if not M.rank:
        report.note("zero module")
        return report
    H = m.homs
    report.extend(check_linmap(alpha, ["rightA"]), prefix="alpha")
    _, psi = adjunction_iso(c.C, c.C, M)
    Y, X = psi.source, psi.target
    comul = [c.comul(unit_vec(i)) for i in range(c.rank)]
    witness = None
    for g in range(Y.rank):
        outer = Y.columns({g: ONE})
        lhs = alpha(H.coordinates([alpha(col) for col in outer]))
        f = psi.columns[g]
        rhs = alpha(H.coordinates([X.evaluate(f, image) for image in comul]))
        if lhs != rhs:
            witness = {"hom_basis": g, "difference": witness_vec(vec_sub(lhs, rhs))}
            break
    report.add("associativity", witness is None, witness)
    witness = None
    for i in range(M.rank):
        values = [M.act_right(unit_vec(i), eps) for eps in c.counit]
        if alpha(H.coordinates(values)) != unit_vec(i):
            witness = i
            break
    report.add("counitality", witness is None, witness)
    return report


def cofree_contramodule(coring: Coring, N: ModuleSpace, name: str = "") -> Contramodule:
    """Hom_A(C, N) with alpha(g)(c) = g(c_(1))(c_(2)), i.e. precomposition with Delta under the adjunction"""
    M = hom_right_A(coring.C, N)
    if M.right is None:
        raise DomainMismatch("cofree_contramodule -- the coring has no left action to act on Hom_A(C, N)")
    _, psi = adjunction_iso(coring.C, coring.C, N)
    X = psi.target
    H = hom_right_A(coring.C, M)
    comul = [coring.comul(unit_vec(i)) for i in range(coring.rank)]
    columns = []
    for g in range(H.rank):
        f = psi.columns[g]
        columns.append(M.coordinates([X.evaluate(f, image) for image in comul]))
    alpha = LinMap(source=H, target=M, columns=tuple(columns), linearity=frozenset({"rightA"}))
    LOG.debug("cofree_contramodule over %s: rank %d", coring.name, M.rank)
    return Contramodule(coring=coring, M=M, alpha=alpha, name=name or f"Hom({coring.name}, {N.name})")


def check_contramodule_map(f: LinMap, source: Contramodule, target: Contramodule) -> VerificationReport:
    """f alpha_M = alpha_N Hom(C, f) and right A-linearity"""
    report = VerificationReport(subject=f"contramodule map {source.name} -> {target.name}")
    if f.source is not source.M or f.target is not target.M:
        raise DomainMismatch("check_contramodule_map -- the map does not run between the contramodules")
    if source.rank:
        report.extend(check_linmap(f, ["rightA"]))
    H_source, H_target = source.homs, target.homs
    witness = None
    for h in range(H_source.rank):
        lhs = f(source.alpha.columns[h])
        pushed = [f(col) for col in H_source.columns({h: ONE})]
        rhs = target.alpha(H_target.coordinates(pushed))
        if lhs != rhs:
            witness = {"hom_basis": h, "difference": witness_vec(vec_sub(lhs, rhs))}
            break
    report.add("alpha", witness is None, witness)
    return report


@dataclass(frozen=True, eq=False)
class ContramoduleComplex:
    """delta[l - lo]: M^l -> M^{l+1}"""
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

    def term(self, l_index: int) -> Contramodule:
        return self.terms[l_index - self.lo]


def make_contramodule_complex(coring: Coring, lo: int, terms: Sequence[Contramodule], delta: Sequence,
                              name: str = "", check: bool = True) -> ContramoduleComplex:
    terms = tuple(terms)
    if not terms:
        raise ShapeError("make_contramodule_complex -- at least one term is needed")
    if len(delta) != len(terms) - 1:
        raise ShapeError("make_contramodule_complex -- one differential per degree below the top is needed")
    maps = []
    for l_index, cols in enumerate(delta):
        if isinstance(cols, LinMap):
            maps.append(cols)
            continue
        source, target = terms[l_index].M, terms[l_index + 1].M
        maps.append(LinMap(source=source, target=target,
                           columns=tuple(vec_from_any(col, target.rank) for col in cols)))
    complex_ = ContramoduleComplex(coring=coring, lo=lo, terms=terms, delta=tuple(maps), name=name)
    if check:
        _raise_for(check_contramodule_complex(complex_), f"make_contramodule_complex {name}".strip())
    return complex_


def single_contramodule_complex(m: Contramodule, degree: int = 0) -> ContramoduleComplex:
    return ContramoduleComplex(coring=m.coring, lo=degree, terms=(m,), delta=(), name=m.name)


def check_contramodule_complex(complex_: ContramoduleComplex) -> VerificationReport:
    report = VerificationReport(subject=f"contramodule complex {complex_.name}".strip(),
                                window=[complex_.lo, complex_.hi])
    for l_index in complex_.degrees:
        report.extend(check_contramodule(complex_.term(l_index)), prefix=f"term{l_index}")
    for l_index in range(complex_.lo, complex_.hi):
        delta = complex_.delta[l_index - complex_.lo]
        report.extend(check_contramodule_map(delta, complex_.term(l_index), complex_.term(l_index + 1)),
                      prefix=f"delta{l_index}")
    for l_index in range(complex_.lo, complex_.hi - 1):
        first, second = complex_.delta[l_index - complex_.lo], complex_.delta[l_index + 1 - complex_.lo]
        witness = next((m for m, col in enumerate(first.columns) if second(col)), None)
        report.add(f"delta_squared.degree{l_index}", witness is None, witness)
    return report


def _raise_for(report: VerificationReport, message: str):
    if report.passed:
        return
    name = report.failures[0].name
    if name.startswith("term"):
        raise report.first_failure_error(NotContramodule, message)
    if name.startswith("delta_squared"):
        raise report.first_failure_error(NotComplex, message)
    raise report.first_failure_error(NotContramoduleMap, message)


# Xi(A, M)

@dataclass(frozen=True, eq=False)
class XiModule:
    """
    Xi^n on [lo, hi] as the direct sum of the components Hom_A(A^i, M^{n+i}); homs[(n, i)] is that hom
    space and offsets[(n, i)] its first coordinate in Xi^n
    """
    cdga: SemiFreeCDGA
    terms: tuple
    term_lo: int
    lo: int
    parts: dict
    homs: dict
    offsets: dict
    spaces: dict
    report: VerificationReport = field(repr=False, default=None)
    name: str = ""

    @property
    def term_hi(self) -> int:
        return self.term_lo + len(self.terms) - 1

    @property
    def hi(self) -> int:
        return self.term_hi

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def term(self, l_index: int) -> ModuleSpace:
        return self.terms[l_index - self.term_lo]

    def space(self, n: int) -> ModuleSpace:
        if n not in self.spaces:
            raise WindowTooNarrow(f"XiModule.space -- degree {n} is outside [{self.lo}, {self.hi}]", witness=n)
        return self.spaces[n]

    def rank(self, n: int) -> int:
        return self.spaces[n].rank if n in self.spaces else 0

    def hom_of(self, i: int, l_index: int) -> HomSpace:
        """Hom_A(A^i, M^l)"""
        return hom_right_A(self.cdga.space(i), self.term(l_index))

    def split(self, n: int, coords: Vec) -> dict:
        """{i: coordinates of xi_i}"""
        result = {}
        for i in self.parts[n]:
            offset, rank = self.offsets[(n, i)], self.homs[(n, i)].rank
            result[i] = {k - offset: val for k, val in coords.items() if offset <= k < offset + rank}
        return result

    def join(self, n: int, parts: dict) -> Vec:
        result: Vec = {}
        for i, coords in parts.items():
            offset = self.offsets[(n, i)]
            for k, val in coords.items():
                if val:
                    result[offset + k] = val
        return result

    def act(self, n: int, coords: Vec, k: int, t: Vec) -> Vec:
        """xi . t for t in A^k: (xi t)_j(b) = xi_{j+k}(t b)"""
        if not coords or not t or n + k > self.hi:
            return {}
        if k == 0:
            return self.spaces[n].act_right(coords, t)
        cdga, target = self.cdga, n + k
        parts = self.split(n, coords)
        moved = {}
        for j in self.parts[target]:
            columns = self.homs[(n, j + k)].columns(parts[j + k])
            images = [_apply(columns, cdga.mul(k, t, j, unit_vec(b))) for b in range(cdga.dim(j))]
            moved[j] = self.homs[(target, j)].coordinates(images)
        return self.join(target, moved)


def build_xi(cdga: SemiFreeCDGA, terms: Sequence[ModuleSpace], term_lo: int, lo: Optional[int] = None,
             name: str = "") -> XiModule:
    """
    Xi(A, M)^n for the bounded graded right A-module terms[l - term_lo] = M^l

    raises WindowTooNarrow if lo asks for a degree whose product would need A^i with i > D
    """
    terms = tuple(terms)
    if not terms:
        raise ShapeError("build_xi -- at least one term is needed")
    for term in terms:
        if term.rank and term.algebra is not cdga.algebra:
            raise DomainMismatch(f"build_xi -- {term.name or 'a term'} is not a module over the CDGA")
    D = cdga.max_degree
    term_hi = term_lo + len(terms) - 1
    exact_lo = term_hi - D
    lo = exact_lo if lo is None else lo
    if lo < exact_lo:
        raise WindowTooNarrow(f"build_xi -- degree {lo} needs components beyond A^{D}", witness=lo)
    parts, homs, offsets, spaces = {}, {}, {}, {}
    for n in range(lo, term_hi + 1):
        parts[n] = tuple(i for i in range(D + 1) if term_lo <= n + i <= term_hi)
        total = 0
        for i in parts[n]:
            hom = hom_right_A(cdga.space(i), terms[n + i - term_lo])
            homs[(n, i)] = hom
            offsets[(n, i)] = total
            total += hom.rank
        right = []
        for c in range(total):
            row = []
            for a in range(cdga.algebra.dim):
                image: Vec = {}
                for i in parts[n]:
                    offset, hom = offsets[(n, i)], homs[(n, i)]
                    if offset <= c < offset + hom.rank:
                        image = {offset + k: val for k, val in hom.right[c - offset][a].items()}
                        break
                row.append(image)
            right.append(tuple(row))
        spaces[n] = ModuleSpace(rank=total, algebra=cdga.algebra, right=tuple(right), name=f"Xi^{n}")
    xi = XiModule(cdga=cdga, terms=terms, term_lo=term_lo, lo=lo, parts=parts, homs=homs, offsets=offsets,
                  spaces=spaces, report=VerificationReport(subject=f"Xi {name}".strip(), window=[lo, term_hi]),
                  name=name)
    for n in xi.degrees:
        if spaces[n].rank:
            xi.report.extend(check_module(spaces[n]), prefix=f"degree{n}")
    LOG.debug("build_xi %s: window [%d, %d], ranks %s", name, lo, term_hi, [xi.rank(n) for n in xi.degrees])
    return xi


# divergences

@dataclass(frozen=True, eq=False)
class ZDivergence:
    """
    the divergence as the curved module (Xi, nabla); `components` are the maps
    nabla^p_k: Hom_A(A^k, M^{p+k}) -> M^{p+1} it was assembled from, if any
    """
    cdga: SemiFreeCDGA
    module: CurvedModule
    report: VerificationReport = field(repr=False, default=None)
    xi: Optional[XiModule] = None
    components: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    name: str = ""

    def nabla(self, n: int, coords: Vec) -> Vec:
        return self.module.dm(n, coords)

    @property
    def integrable(self) -> bool:
        return all(check.passed for check in self.report.checks if "curvature" in check.name)


def divergence_component(xi: XiModule, p: int, k: int, func: Callable[[list], Vec]) -> LinMap:
    """nabla^p_k from a function on the images xi(e_b) of the basis of A^k"""
    source, target = xi.hom_of(k, p + k), xi.term(p + 1)
    columns = tuple(func(source.columns({c: ONE})) for c in range(source.rank))
    return LinMap(source=source, target=target, columns=columns)


def check_components(xi: XiModule, components: dict) -> VerificationReport:
    """nabla^p_k(xi a) = nabla^p_k(xi) a + (-1)^p [k = 1] xi(da) for a in A"""
    cdga = xi.cdga
    report = VerificationReport(subject="divergence components")
    for (p, k), comp in sorted(components.items()):
        H, target = comp.source, comp.target
        sign = parity_sign(p)
        witness = None
        for c in range(H.rank):
            for a in range(cdga.algebra.dim):
                rhs = target.act_right(comp.columns[c], unit_vec(a))
                if k == 1:
                    add_into(rhs, H.evaluate({c: ONE}, cdga.d0[a]), sign)
                if comp(H.right[c][a]) != rhs:
                    witness = {"degree": p, "k": k, "pair": [c, a]}
                    break
            if witness is not None:
                break
        report.add(f"component.degree{p}.k{k}", witness is None, witness)
    return report


def _assembled_nabla(xi: XiModule, components: dict, n: int, coords: Vec) -> Vec:
    """nabla^{n,m}(xi)(a) = sum_k nabla^{n+m}_k(xi_{m+k} a) + (-1)^{n+1} xi_{m+1}(da)"""
    cdga, D = xi.cdga, xi.cdga.max_degree
    columns = {i: xi.homs[(n, i)].columns(part) for i, part in xi.split(n, coords).items()}
    sign = parity_sign(n + 1)
    result = {}
    for m in xi.parts[n + 1]:
        values = []
        for b in range(cdga.dim(m)):
            a = unit_vec(b)
            value: Vec = {}
            for k in range(D + 1 - m):
                comp = components.get((n + m, k))
                if comp is None or m + k not in columns:
                    continue
                moved = [_apply(columns[m + k], cdga.mul(m, a, k, unit_vec(e))) for e in range(cdga.dim(k))]
                add_into(value, comp(comp.source.coordinates(moved)))
            if m + 1 in columns:
                add_into(value, _apply(columns[m + 1], cdga.d(m, a)), sign)
            values.append(value)
        result[m] = xi.homs[(n + 1, m)].coordinates(values)
    return xi.join(n + 1, result)


def assemble_divergence(xi: XiModule, components: dict, name: str = "") -> ZDivergence:
    """
    the divergence with the given components; components maps (p, k) to nabla^p_k and absent components
    are zero

    raises ComponentLeibnizFailed if a component breaks its Leibniz rule
    """
    report = VerificationReport(subject=f"divergence {name}".strip(), window=[xi.lo, xi.hi])
    component_report = check_components(xi, components)
    if not component_report.passed:
        raise component_report.first_failure_error(ComponentLeibnizFailed, f"assemble_divergence {name}".strip())
    report.extend(component_report)
    report.extend(xi.report, prefix="xi")
    cdga = xi.cdga
    spaces = tuple(xi.space(n) for n in xi.degrees)
    v_action, d_maps = [], []
    for n in range(xi.lo, xi.hi):
        v_action.append(tuple(tuple(xi.act(n, {c: ONE}, 1, unit_vec(v)) for v in range(cdga.V.rank))
                              for c in range(xi.rank(n))))
        columns = tuple(_assembled_nabla(xi, components, n, {c: ONE}) for c in range(xi.rank(n)))
        d_maps.append(LinMap(source=xi.space(n), target=xi.space(n + 1), columns=columns))
    module = CurvedModule(cdga=cdga, lo=xi.lo, hi=xi.hi, spaces=spaces, v_action=tuple(v_action), d=tuple(d_maps),
                          name=f"Xi({name})" if name else "Xi", zero_above=True)
    report.extend(check_curved_module(module), prefix="divergence")
    LOG.info("assemble_divergence %s: %s", name, "PASS" if report.passed else "FAIL")
    return ZDivergence(cdga=cdga, module=module, report=report, xi=xi, components=dict(components), name=name)


def divergence_from_curved_module(M: CurvedModule, lo: Optional[int] = None) -> ZDivergence:
    """
    nabla(xi) = d_M xi - (-1)^n xi d on the A^.-linear maps (A^., d) -> M, i.e. Xi of M induced along the
    regular bimodule
    """
    D = M.cdga.max_degree
    lo = M.hi - D if lo is None else lo
    if lo < M.hi - D:
        raise WindowTooNarrow(f"divergence_from_curved_module -- degree {lo} needs components beyond A^{D}",
                              witness=lo)
    E = regular_bimodule_cdga(M.cdga)
    module = induced_xi_module(E, M, lo=lo, hi=M.hi)
    maps = {n: graded_hom_space(E, M, n) for n in range(lo, M.hi + 1)}
    report = VerificationReport(subject=f"divergence of {M.name}".strip(), window=[lo, M.hi])
    report.extend(check_curved_module(module), prefix="divergence")
    return ZDivergence(cdga=M.cdga, module=module, report=report, maps=maps, name=M.name)


def curved_module_components(xi: XiModule, M: CurvedModule) -> dict:
    """nabla^p_0(eta) = d_M(eta(1)); the components with k >= 1 vanish since d(1) = 0"""
    unit = M.cdga.algebra.unit
    return {(p, 0): divergence_component(xi, p, 0, lambda cols, p=p: M.dm(p, _apply(cols, unit)))
            for p in range(M.lo, M.hi)}


def _direct_nabla(xi: XiModule, M: CurvedModule, n: int, coords: Vec) -> Vec:
    """(d_M xi - (-1)^n xi d)_m(a) = d_M(xi_m(a)) - (-1)^n xi_{m+1}(da)"""
    cdga = xi.cdga
    columns = {i: xi.homs[(n, i)].columns(part) for i, part in xi.split(n, coords).items()}
    result = {}
    for m in xi.parts[n + 1]:
        values = []
        for b in range(cdga.dim(m)):
            value = M.dm(n + m, columns[m][b]) if m in columns else {}
            if m + 1 in columns:
                add_into(value, _apply(columns[m + 1], cdga.d(m, unit_vec(b))), -parity_sign(n))
            values.append(value)
        result[m] = xi.homs[(n + 1, m)].coordinates(values)
    return xi.join(n + 1, result)


def check_divergence_assembly(M: CurvedModule, lo: Optional[int] = None) -> VerificationReport:
    """
    the divergence xi -> d_M xi - (-1)^n xi d on Xi(A, M) = prod_k Hom_A(A^k, M^{n+k}) computed directly and
    assembled from its components, compared column by column; the direct map is A-linear only when d
    vanishes on A, otherwise the comparison is skipped and noted
    """
    cdga = M.cdga
    report = VerificationReport(subject=f"divergence assembly of {M.name}".strip())
    if any(cdga.d0):
        report.note("divergence assembly: skipped, d does not vanish on A")
        return report
    xi = build_xi(cdga, M.spaces, M.lo, lo=lo, name=M.name)
    assembled = assemble_divergence(xi, curved_module_components(xi, M), name=M.name)
    report.extend(assembled.report, prefix="assembled")
    for n in range(xi.lo, xi.hi):
        d_map = assembled.module.d[n - xi.lo]
        witness = next((c for c in range(xi.rank(n)) if d_map.columns[c] != _direct_nabla(xi, M, n, {c: ONE})),
                       None)
        report.add(f"agrees.degree{n}", witness is None, None if witness is None else {"degree": n, "column": witness},
                   window=[xi.lo, xi.hi])
    return report


def divergence_from_contramodule_complex(complex_: ContramoduleComplex, x: Optional[Vec] = None,
                                         based_variant: bool = False, max_degree: int = 4) -> ZDivergence:
    """
    nabla^p_0 = delta^p and nabla^p_1(xi) = (-1)^p (alpha_{p+1}(xi) - xi(x)) over T-flat(C, x). The based
    variant works over T(C, x) and precomposes xi with pi_R: C -> C+ before applying the flat component.

    raises NotContramodule, NotContramoduleMap or NotComplex for bad input, NotBased if the based variant
    gets an x with eps(x) != 1
    """
    coring = complex_.coring
    checked = check_contramodule_complex(complex_)
    _raise_for(checked, f"divergence_from_contramodule_complex {complex_.name}".strip())
    if based_variant:
        b = based(coring, x)
        x = b.base_point
        t = t_based(b, max_degree=max_degree, check=False)
        cdga, restrict = t.cdga, t.splitting.pi_right.columns
    else:
        x = dict(x) if x is not None else find_base_points(coring).require()
        cdga = t_flat(coring, x, max_degree=max_degree, check_oracle=False).cdga
        restrict = None
    xi = build_xi(cdga, [term.M for term in complex_.terms], complex_.lo, name=complex_.name)
    unit = coring.algebra.unit
    components = {}
    for p in range(complex_.lo, complex_.hi):
        delta = complex_.delta[p - complex_.lo]
        components[(p, 0)] = divergence_component(xi, p, 0, lambda cols, delta=delta: delta(_apply(cols, unit)))
    for p in range(complex_.lo - 1, complex_.hi):
        term = complex_.term(p + 1)

        def nabla1(cols, term=term, sign=parity_sign(p)):
            if restrict is not None:
                cols = [_apply(cols, col) for col in restrict]
            value = vec_sub(term.alpha(term.homs.coordinates(cols)), _apply(cols, x))
            return {k: sign * val for k, val in value.items()}

        components[(p, 1)] = divergence_component(xi, p, 1, nabla1)
    divergence = assemble_divergence(xi, components, name=complex_.name)
    divergence.report.extend(checked, prefix="complex")
    divergence.report.note(NABLA1_SIGN_NOTE)
    return divergence


# left connections and their duals

@dataclass(frozen=True, eq=False)
class LeftConnection:
    """
    a graded (A, B)-bimodule M^. with nabla^{k,n}: M^n -> A^k (x)_A M^{n-k+1} over a CDGA on A;
    nabla[(k, n)] is a LinMap into `block(k, n - k + 1)`
    """
    cdga: SemiFreeCDGA
    B: Algebra
    terms: tuple
    term_lo: int
    nabla: dict
    name: str = ""

    @property
    def term_hi(self) -> int:
        return self.term_lo + len(self.terms) - 1

    def term(self, n: int) -> ModuleSpace:
        return self.terms[n - self.term_lo]

    def in_window(self, n: int) -> bool:
        return self.term_lo <= n <= self.term_hi

    def block(self, k: int, n: int) -> ModuleSpace:
        """A^k (x)_A M^n"""
        return self.term(n) if k == 0 else tensor_chain([self.cdga.space(k), self.term(n)])


def make_left_connection(cdga: SemiFreeCDGA, B: Algebra, terms: Sequence[ModuleSpace], term_lo: int,
                         nabla: dict, name: str = "") -> LeftConnection:
    """nabla maps (k, n) to the columns of nabla^{k,n}; components into missing terms must vanish"""
    terms = tuple(terms)
    for term in terms:
        if term.rank and (term.left_algebra is not cdga.algebra or term.algebra is not B):
            raise DomainMismatch(f"make_left_connection -- {term.name or 'a term'} is not an (A, B)-bimodule")
    shell = LeftConnection(cdga=cdga, B=B, terms=terms, term_lo=term_lo, nabla={}, name=name)
    maps = {}
    for (k, n), cols in nabla.items():
        if not shell.in_window(n) or not shell.in_window(n - k + 1):
            if any(vec_from_any(col) for col in cols):
                raise ShapeError(f"make_left_connection -- nabla^({k},{n}) leaves the window", witness=[k, n])
            continue
        target = shell.block(k, n - k + 1)
        maps[(k, n)] = LinMap(source=shell.term(n), target=target,
                              columns=tuple(vec_from_any(col, target.rank) for col in cols))
    return LeftConnection(cdga=cdga, B=B, terms=terms, term_lo=term_lo, nabla=maps, name=name)


def check_left_connection(conn: LeftConnection) -> VerificationReport:
    """
    right B-linearity of every component, the left Leibniz rule
    nabla^{1,n}(a m) = a nabla^{1,n}(m) + (-1)^n da (x) m and left A-linearity for k != 1
    """
    cdga = conn.cdga
    report = VerificationReport(subject=f"left connection {conn.name}".strip())
    for (k, n), f in sorted(conn.nabla.items()):
        source, target = f.source, f.target
        witness = next(([m, b] for m in range(source.rank) for b in range(conn.B.dim)
                        if f(source.right[m][b]) != target.act_right(f.columns[m], unit_vec(b))), None)
        report.add(f"rightB.k{k}.degree{n}", witness is None, witness)
        sign = parity_sign(n)
        witness = None
        for a in range(cdga.algebra.dim):
            for m in range(source.rank):
                rhs = target.act_left(unit_vec(a), f.columns[m])
                if k == 1:
                    for v, val in cdga.d0[a].items():
                        add_into(rhs, target.project_word((v, m)), sign * val)
                if f(source.left[a][m]) != rhs:
                    witness = [a, m]
                    break
            if witness is not None:
                break
        report.add(f"left_leibniz.k{k}.degree{n}", witness is None, witness)
    return report


def dual_terms(conn: LeftConnection) -> tuple[list, int]:
    """N^p = Hom_B(M^{-p}, B) for p in [-term_hi, -term_lo], right A-modules by (f a)(m) = f(a m)"""
    B = regular_bimodule(conn.B)
    return [hom_right_A(conn.term(-p), B) for p in range(-conn.term_hi, -conn.term_lo + 1)], -conn.term_hi


def divergence_from_left_connection(conn: LeftConnection) -> ZDivergence:
    """
    the divergence on N^p = Hom_B(M^{-p}, B) with nabla^p_k(f)(m) = sum_i f(t_i)(m_i) for
    nabla^{k,n}(m) = sum_i t_i (x) m_i and p = -n - 1

    raises NotRightBLinear if a component is not right B-linear
    """
    checked = check_left_connection(conn)
    bad = next((c for c in checked.failures if c.name.startswith("rightB")), None)
    if bad is not None:
        raise NotRightBLinear(f"divergence_from_left_connection -- {bad.name} failed", witness=bad.witness)
    cdga = conn.cdga
    terms, lo = dual_terms(conn)
    xi = build_xi(cdga, terms, lo, name=f"{conn.name}*")
    components = {}
    for (k, n), f in conn.nabla.items():
        p = -n - 1
        dual_source = terms[(p + k) - lo]
        block = f.target

        def pairing(cols, k=k, f=f, dual_source=dual_source, block=block, target=terms[(p + 1) - lo]):
            values = []
            for m in range(f.source.rank):
                image = f.columns[m]
                if k == 0:
                    values.append(dual_source.evaluate(_apply(cols, cdga.algebra.unit), image))
                    continue
                value: Vec = {}
                for (t, m2), val in block.lift(image).items():
                    add_into(value, dual_source.evaluate(cols[t], unit_vec(m2)), val)
                values.append(value)
            return target.coordinates(values)

        components[(p, k)] = divergence_component(xi, p, k, pairing)
    divergence = assemble_divergence(xi, components, name=f"{conn.name}*")
    divergence.report.extend(checked, prefix="connection")
    return divergence
