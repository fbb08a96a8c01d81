"""
Curved modules over a truncated semi-free CDGA.

A curved module lives on a window [lo, hi] of degrees: every M^n is a right A-module, the generators
V act by tables M^n x V -> M^{n+1} and d_M is one LinMap per degree below hi. Identities quantified
over all elements are checked only where both sides stay inside the window.
"""
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from coring_cdga.algmod import HomSpace, LinMap, ModuleSpace, Subspace, check_module, hom_right_A, kernel_subspace, \
    span_subspace, tensor_chain
from coring_cdga.cdga import SemiFreeCDGA
from coring_cdga.errors import DomainMismatch, ShapeError, WindowTooNarrow
from coring_cdga.exactla import ONE, Vec, add_into, parity_sign, sparse_quotient, unit_vec, vec_scale, vec_sub
from coring_cdga.report import VerificationReport
from coring_cdga.util import get_logger, witness_vec

LOG = get_logger(__name__)


def _apply_columns(columns: Sequence[Vec], v: Vec) -> Vec:
    result: Vec = {}
    for i, val in v.items():
        add_into(result, columns[i], val)
    return result


@dataclass(frozen=True, eq=False)
class CurvedModule:
    cdga: SemiFreeCDGA
    lo: int
    hi: int
    spaces: tuple
    v_action: tuple
    d: tuple
    name: str = ""
    # M^n = 0 for n > hi rather than unknown
    zero_above: bool = False

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def in_window(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def space(self, n: int) -> ModuleSpace:
        if not self.in_window(n):
            raise WindowTooNarrow(f"CurvedModule.space -- degree {n} is outside [{self.lo}, {self.hi}]", witness=n)
        return self.spaces[n - self.lo]

    def rank(self, n: int) -> int:
        return self.spaces[n - self.lo].rank if self.in_window(n) else 0

    def act_v(self, n: int, m: Vec, v: int) -> Vec:
        """m . v for m in M^n and a basis vector v of V"""
        if not m:
            return {}
        if n + 1 > self.hi:
            if self.zero_above:
                return {}
            raise WindowTooNarrow(f"CurvedModule.act_v -- degree {n + 1} is outside the window", witness=n)
        table = self.v_action[n - self.lo]
        result: Vec = {}
        for i, val in m.items():
            add_into(result, table[i][v], val)
        return result

    def act(self, n: int, m: Vec, k: int, t: Vec) -> Vec:
        """m . t for m in M^n and t in T^k"""
        if k == 0:
            return self.space(n).act_right(m, t)
        result: Vec = {}
        for word, val in self.cdga.space(k).lift(t).items():
            image = m
            for offset, letter in enumerate(word):
                image = self.act_v(n + offset, image, letter)
            add_into(result, image, val)
        return result

    def dm(self, n: int, m: Vec) -> Vec:
        if not m:
            return {}
        if n + 1 > self.hi:
            if self.zero_above:
                return {}
            raise WindowTooNarrow(f"CurvedModule.dm -- d on degree {n} leaves the window", witness=n)
        return self.d[n - self.lo](m)

    def __repr__(self):
        ranks = [s.rank for s in self.spaces]
        return f"CurvedModule {self.name or '?'} (window [{self.lo}, {self.hi}], ranks {ranks})"


@dataclass(frozen=True, eq=False)
class CurvedBimodule(CurvedModule):
    """
    a curved (A, B)-bimodule: the right structure is over `cdga` (B), the left one over `left_cdga`
    (A); left_v_action[n - lo][v][e] = v . e in E^{n+1}
    """
    left_cdga: Optional[SemiFreeCDGA] = None
    left_v_action: tuple = ()

    def left_act_v(self, n: int, v: int, e: Vec) -> Vec:
        if not e:
            return {}
        if n + 1 > self.hi:
            if self.zero_above:
                return {}
            raise WindowTooNarrow(f"CurvedBimodule.left_act_v -- degree {n + 1} is outside the window", witness=n)
        table = self.left_v_action[n - self.lo]
        result: Vec = {}
        for i, val in e.items():
            add_into(result, table[v][i], val)
        return result

    def left_act(self, k: int, t: Vec, n: int, e: Vec) -> Vec:
        """t . e for t in A^k and e in E^n"""
        if k == 0:
            return self.space(n).act_left(t, e)
        result: Vec = {}
        for word, val in self.left_cdga.space(k).lift(t).items():
            image = e
            for offset, letter in enumerate(reversed(word)):
                image = self.left_act_v(n + offset, letter, image)
            add_into(result, image, val)
        return result


def make_curved_module(cdga: SemiFreeCDGA, lo: int, spaces: Sequence[ModuleSpace], v_action: Sequence,
                       d: Sequence[LinMap], name: str = "", zero_above: bool = False) -> CurvedModule:
    spaces = tuple(spaces)
    if not spaces:
        raise ShapeError("make_curved_module -- at least one degree is needed")
    if len(v_action) != len(spaces) - 1 or len(d) != len(spaces) - 1:
        raise ShapeError("make_curved_module -- v_action and d need one entry per degree below the top")
    for space in spaces:
        if space.rank and space.algebra is not cdga.algebra:
            raise DomainMismatch(f"make_curved_module -- {space.name or 'a term'} is not a module over the CDGA")
    return CurvedModule(cdga=cdga, lo=lo, hi=lo + len(spaces) - 1, spaces=spaces, v_action=tuple(v_action),
                        d=tuple(d), name=name, zero_above=zero_above)


def zero_module(cdga: SemiFreeCDGA, lo: int = 0, hi: int = 0) -> CurvedModule:
    A = cdga.algebra
    empty = ModuleSpace(rank=0, algebra=A, right=(), name="0")
    spaces = tuple(empty for _ in range(lo, hi + 1))
    maps = tuple(LinMap(source=empty, target=empty, columns=()) for _ in range(lo, hi))
    return CurvedModule(cdga=cdga, lo=lo, hi=hi, spaces=spaces, v_action=tuple(() for _ in range(lo, hi)),
                        d=maps, name="0", zero_above=True)


def shift(M: CurvedModule, k: int = 1) -> CurvedModule:
    """M[k]^n = M^{n+k} with d multiplied by (-1)^k"""
    sign = parity_sign(k)
    d = tuple(LinMap(source=f.source, target=f.target, columns=tuple(vec_scale(c, sign) for c in f.columns))
              for f in M.d)
    return CurvedModule(cdga=M.cdga, lo=M.lo - k, hi=M.hi - k, spaces=M.spaces, v_action=M.v_action, d=d,
                        name=f"{M.name or 'M'}[{k}]", zero_above=M.zero_above)


def _check_right_structure(M: CurvedModule, report: VerificationReport):
    """module axioms, balance of the A and V actions, and the Leibniz rule against A and V"""
    A, V, cdga = M.cdga.algebra, M.cdga.V, M.cdga
    for n in M.degrees:
        space = M.space(n)
        if space.rank:
            report.extend(check_module(space), prefix=f"module.degree{n}")
    for n in range(M.lo, M.hi):
        source = M.space(n)
        witness = None
        for m, a, v in product(range(source.rank), range(A.dim), range(V.rank)):
            e = unit_vec(m)
            if M.act_v(n, source.act_right(e, unit_vec(a)), v) != M.act(n, e, 1, V.left[a][v]):
                witness = {"degree": n, "pair": ["a.v", m, a, v]}
                break
            if M.space(n + 1).act_right(M.act_v(n, e, v), unit_vec(a)) != M.act(n, e, 1, V.right[v][a]):
                witness = {"degree": n, "pair": ["v.a", m, v, a]}
                break
        report.add(f"balance.degree{n}", witness is None, witness, window=[n, n + 1])
        sign = parity_sign(n)
        witness = next(([m, a] for m, a in product(range(source.rank), range(A.dim))
                        if M.dm(n, source.act_right(unit_vec(m), unit_vec(a))) !=
                        add_into(M.space(n + 1).act_right(M.dm(n, unit_vec(m)), unit_vec(a)),
                                 M.act(n, unit_vec(m), 1, cdga.d0[a]), sign)), None)
        report.add(f"leibniz.degree{n}.A", witness is None, witness, window=[n, n + 1])
    for n in range(M.lo, M.hi - 1):
        sign = parity_sign(n)
        witness = next(([m, v] for m, v in product(range(M.rank(n)), range(V.rank))
                        if M.dm(n + 1, M.act_v(n, unit_vec(m), v)) !=
                        add_into(M.act_v(n + 1, M.dm(n, unit_vec(m)), v),
                                 M.act(n, unit_vec(m), 2, cdga.d1(unit_vec(v))), sign)), None)
        report.add(f"leibniz.degree{n}.V", witness is None, witness, window=[n, n + 2])


def check_curved_module(M: CurvedModule) -> VerificationReport:
    """Leibniz rule and d_M d_M (m) = -m gamma on every basis element inside the window"""
    report = VerificationReport(subject=f"curved module {M.name}".strip(), window=[M.lo, M.hi])
    _check_right_structure(M, report)
    gamma = M.cdga.gamma
    for n in range(M.lo, M.hi - 1):
        witness = next((m for m in range(M.rank(n))
                        if M.dm(n + 1, M.dm(n, unit_vec(m))) != vec_scale(M.act(n, unit_vec(m), 2, gamma), -ONE)),
                       None)
        report.add(f"curvature.degree{n}", witness is None, witness, window=[n, n + 2])
    for failure in report.failures:
        LOG.info("check_curved_module %s: %s failed at %s", M.name, failure.name, failure.witness)
    return report


def check_curved_bimodule(E: CurvedBimodule) -> VerificationReport:
    """both one-sided structures, their compatibility, the two-sided Leibniz rule and d^2 = gamma_A e - e gamma_B"""
    report = VerificationReport(subject=f"curved bimodule {E.name}".strip(), window=[E.lo, E.hi])
    _check_right_structure(E, report)
    L, R = E.left_cdga, E.cdga
    A, V = L.algebra, L.V
    for n in range(E.lo, E.hi):
        space, upper = E.space(n), E.space(n + 1)
        witness = None
        for e, a, v in product(range(space.rank), range(A.dim), range(V.rank)):
            u = unit_vec(e)
            if E.left_act_v(n, v, space.act_left(unit_vec(a), u)) != E.left_act(1, V.right[v][a], n, u):
                witness = ["v.a", e, v, a]
                break
            if upper.act_left(unit_vec(a), E.left_act_v(n, v, u)) != E.left_act(1, V.left[a][v], n, u):
                witness = ["a.v", e, a, v]
                break
        report.add(f"left_balance.degree{n}", witness is None, witness, window=[n, n + 1])
        witness = None
        for e, v in product(range(space.rank), range(V.rank)):
            u = unit_vec(e)
            left_first = E.left_act_v(n, v, u)
            for b in range(R.algebra.dim):
                if upper.act_right(left_first, unit_vec(b)) != E.left_act_v(n, v, space.act_right(u, unit_vec(b))):
                    witness = ["v.e.b", e, v, b]
                    break
            if witness is None and n + 2 <= E.hi:
                for w in range(R.V.rank):
                    if E.act_v(n + 1, left_first, w) != E.left_act_v(n + 1, v, E.act_v(n, u, w)):
                        witness = ["v.e.w", e, v, w]
                        break
            if witness is not None:
                break
        if witness is None:
            witness = next((["a.e.w", e, a, w] for e, a, w in product(range(space.rank), range(A.dim), range(R.V.rank))
                            if E.act_v(n, space.act_left(unit_vec(a), unit_vec(e)), w) !=
                            upper.act_left(unit_vec(a), E.act_v(n, unit_vec(e), w))), None)
        report.add(f"two_sided.degree{n}", witness is None, witness, window=[n, n + 1])
        witness = next(([a, e] for a, e in product(range(A.dim), range(space.rank))
                        if E.dm(n, space.act_left(unit_vec(a), unit_vec(e))) !=
                        add_into(E.left_act(1, L.d0[a], n, unit_vec(e)),
                                 upper.act_left(unit_vec(a), E.dm(n, unit_vec(e))))), None)
        report.add(f"left_leibniz.degree{n}.A", witness is None, witness, window=[n, n + 1])
    for n in range(E.lo, E.hi - 1):
        witness = next(([v, e] for v, e in product(range(V.rank), range(E.rank(n)))
                        if E.dm(n + 1, E.left_act_v(n, v, unit_vec(e))) !=
                        add_into(E.left_act(2, L.d1(unit_vec(v)), n, unit_vec(e)),
                                 E.left_act_v(n + 1, v, E.dm(n, unit_vec(e))), -ONE)), None)
        report.add(f"left_leibniz.degree{n}.V", witness is None, witness, window=[n, n + 2])
        witness = next((e for e in range(E.rank(n))
                        if E.dm(n + 1, E.dm(n, unit_vec(e))) !=
                        vec_sub(E.left_act(2, L.gamma, n, unit_vec(e)), E.act(n, unit_vec(e), 2, R.gamma))), None)
        report.add(f"curvature.degree{n}", witness is None, witness, window=[n, n + 2])
    return report


def regular_bimodule_cdga(cdga: SemiFreeCDGA) -> CurvedBimodule:
    """(A^., d) as a curved (A, A)-bimodule on [0, D]"""
    D, V = cdga.max_degree, cdga.V
    spaces = tuple(cdga.space(n) for n in range(D + 1))
    right = tuple(tuple(tuple(cdga.mul(n, unit_vec(i), 1, unit_vec(v)) for v in range(V.rank))
                        for i in range(cdga.dim(n))) for n in range(D))
    left = tuple(tuple(tuple(cdga.mul(1, unit_vec(v), n, unit_vec(i)) for i in range(cdga.dim(n)))
                       for v in range(V.rank)) for n in range(D))
    return CurvedBimodule(cdga=cdga, lo=0, hi=D, spaces=spaces, v_action=right,
                          d=tuple(cdga.d_map(n) for n in range(D)), name=f"({cdga.name}, d)",
                          left_cdga=cdga, left_v_action=left)


# connection modules

@dataclass(frozen=True, eq=False)
class ConnectionModule(CurvedModule):
    """
    M^. (x)_A A^. for a bounded graded right A-module M^. = (terms), with
    d(m (x) t) = sum_k nabla^{k,l}(m) t + (-1)^l m (x) d(t). nabla[(k, l)] holds the columns of
    nabla^{k,l}: M^l -> M^{l-k+1} (x)_A T^k, in the block space of (l - k + 1, k).
    """
    terms: tuple = ()
    term_lo: int = 0
    blocks: tuple = ()
    nabla: Optional[dict] = None

    @property
    def term_hi(self) -> int:
        return self.term_lo + len(self.terms) - 1

    def term(self, l_index: int) -> ModuleSpace:
        return self.terms[l_index - self.term_lo]

    def block_offset(self, n: int, l_index: int) -> Optional[int]:
        for l2, offset in self.blocks[n - self.lo]:
            if l2 == l_index:
                return offset
        return None

    def generator(self, l_index: int, m: int) -> Vec:
        """m (x) 1 in degree l"""
        return {self.block_offset(l_index, l_index) + m: ONE}

    def decompose(self, n: int, x: Vec) -> dict:
        """x in degree n as {l: element of the block space M^l (x) T^{n-l}}"""
        parts: dict = {}
        offsets = self.blocks[n - self.lo]
        for i, val in x.items():
            for l_index, offset in reversed(offsets):
                if i >= offset:
                    parts.setdefault(l_index, {})[i - offset] = val
                    break
        return parts


def block_space(cdga: SemiFreeCDGA, term: ModuleSpace, k: int) -> ModuleSpace:
    """M (x)_A T^k; the degree-zero block is M itself"""
    if k == 0:
        return term
    return tensor_chain([term] + [cdga.V] * k)


def _block_word(cdga: SemiFreeCDGA, term: ModuleSpace, word: tuple) -> Vec:
    """the class of m (x) v_1 ... v_k for a word (m, v_1, ..., v_k)"""
    if len(word) == 1:
        return {word[0]: ONE}
    return block_space(cdga, term, len(word) - 1).project_word(word)


def _block_words(cdga: SemiFreeCDGA, term: ModuleSpace, k: int, v: Vec) -> dict:
    if k == 0:
        return {(m,): val for m, val in v.items()}
    return block_space(cdga, term, k).lift(v)


def connection_module(cdga: SemiFreeCDGA, terms: Sequence[ModuleSpace], term_lo: int, nabla: dict,
                      name: str = "") -> ConnectionModule:
    """
    assemble the curved module of a Z-connection on the window [term_lo, term_lo + D]

    :param nabla: {(k, l): columns} with columns[m] = nabla^{k,l}(e_m) in M^{l-k+1} (x)_A T^k
    """
    D = cdga.max_degree
    terms = tuple(terms)
    term_hi = term_lo + len(terms) - 1
    lo, hi = term_lo, term_lo + D
    if term_hi > hi:
        raise WindowTooNarrow(f"connection_module -- terms span more than D = {D} degrees", witness=[term_lo, term_hi])

    def term(l_index):
        return terms[l_index - term_lo]

    blocks, spaces = [], []
    for n in range(lo, hi + 1):
        offsets, total, parts = [], 0, []
        for l_index in range(max(term_lo, n - D), min(n, term_hi) + 1):
            space = block_space(cdga, term(l_index), n - l_index)
            offsets.append((l_index, total))
            parts.append(space)
            total += space.rank
        blocks.append(tuple(offsets))
        spaces.append((tuple(offsets), tuple(parts), total))

    A = cdga.algebra
    module_spaces = []
    for offsets, parts, total in spaces:
        right = []
        for (l_index, offset), part in zip(offsets, parts):
            for i in range(part.rank):
                right.append(tuple({offset + j: val for j, val in part.right[i][a].items()} for a in range(A.dim)))
        module_spaces.append(ModuleSpace(rank=total, algebra=A, right=tuple(right),
                                         name=f"{name}^{len(module_spaces) + lo}"))

    def block_element(n, l_index, word, coeff, result):
        offset = dict(blocks[n - lo])[l_index]
        for j, val in _block_word(cdga, term(l_index), word).items():
            add_into(result, {offset + j: val}, coeff)

    v_action = []
    for n in range(lo, hi):
        offsets, parts, total = spaces[n - lo]
        table = []
        for (l_index, offset), part in zip(offsets, parts):
            k = n - l_index
            for i in range(part.rank):
                word = (i,) if k == 0 else part.words[i]
                row = []
                for v in range(cdga.V.rank):
                    image: Vec = {}
                    block_element(n + 1, l_index, word + (v,), ONE, image)
                    row.append(image)
                table.append(tuple(row))
        v_action.append(tuple(table))

    d_maps = []
    for n in range(lo, hi):
        offsets, parts, total = spaces[n - lo]
        columns = []
        for (l_index, offset), part in zip(offsets, parts):
            k = n - l_index
            sign = parity_sign(l_index)
            for i in range(part.rank):
                word = (i,) if k == 0 else part.words[i]
                image: Vec = {}
                for j in range(0, D + 1):
                    target_l = l_index - j + 1
                    cols = nabla.get((j, l_index))
                    if cols is None or not term_lo <= target_l <= term_hi or j + k > D:
                        continue
                    for nw, val in _block_words(cdga, term(target_l), j, cols[word[0]]).items():
                        block_element(n + 1, target_l, nw + word[1:], val, image)
                if k > 0:
                    t = cdga.space(k).project_word(word[1:])
                    for tw, val in cdga.space(k + 1).lift(cdga.d(k, t)).items():
                        block_element(n + 1, l_index, (word[0],) + tw, sign * val, image)
                columns.append(image)
        d_maps.append(LinMap(source=module_spaces[n - lo], target=module_spaces[n - lo + 1], columns=tuple(columns)))
    LOG.debug("connection_module %s: ranks %s", name, [s.rank for s in module_spaces])
    return ConnectionModule(cdga=cdga, lo=lo, hi=hi, spaces=tuple(module_spaces), v_action=tuple(v_action),
                            d=tuple(d_maps), name=name, terms=terms, term_lo=term_lo, blocks=tuple(blocks),
                            nabla=dict(nabla))


# graded homs

@dataclass(frozen=True, eq=False)
class GradedHomSpace:
    """
    right-linear graded maps of degree s from `source` to `target`, as tuples of component homs
    f_j: source^j -> target^{j+s} compatible with the generators. For a connection module source
    the maps are free on the generators M^l and the components are indexed by l.
    """
    source: CurvedModule
    target: CurvedModule
    degree: int
    components: tuple
    homs: dict
    offsets: dict
    subspace: Subspace
    free_generators: bool = False

    @property
    def dim(self) -> int:
        return self.subspace.dim

    @property
    def key_components(self) -> tuple:
        keys = set(self.subspace.keys)
        return tuple(j for j in self.components
                     if any(self.offsets[j] <= k < self.offsets[j] + self.homs[j].rank for k in keys))

    def inputs(self, j: int) -> list[Vec]:
        """the source elements whose images determine component j"""
        if self.free_generators:
            return [self.source.generator(j, m) for m in range(self.source.term(j).rank)]
        return [unit_vec(e) for e in range(self.source.rank(j))]

    def components_of(self, coords: Vec) -> dict:
        full = self.subspace.embed(coords)
        result = {}
        for j in self.components:
            offset, hom = self.offsets[j], self.homs[j]
            local = {i - offset: val for i, val in full.items() if offset <= i < offset + hom.rank}
            result[j] = hom.columns(local)
        return result

    def coords_of(self, values: dict) -> Vec:
        """coordinates from the images of inputs(j); only components holding keys are read"""
        full: Vec = {}
        for j in self.key_components:
            if j not in values:
                raise WindowTooNarrow(f"GradedHomSpace.coords_of -- component {j} is needed", witness=j)
            for i, val in self.homs[j].coordinates(values[j]).items():
                full[self.offsets[j] + i] = val
        return self.subspace.coords(full)

    def evaluate(self, coords, n: int, x: Vec, components: Optional[dict] = None) -> Vec:
        """f(x) for x in source^n"""
        if not x:
            return {}
        components = components if components is not None else self.components_of(coords)
        S, T, s = self.source, self.target, self.degree
        if not self.free_generators:
            if n in components:
                return _apply_columns(components[n], x)
            if n + s < T.lo or n + s > T.hi and T.zero_above:
                return {}
            raise WindowTooNarrow(f"GradedHomSpace.evaluate -- component {n} is outside the window", witness=n)
        result: Vec = {}
        for l_index, part in S.decompose(n, x).items():
            if l_index not in components:
                if l_index + s < T.lo:
                    continue
                raise WindowTooNarrow(f"GradedHomSpace.evaluate -- generator degree {l_index} is outside the window",
                                      witness=l_index)
            k = n - l_index
            for word, val in _block_words(S.cdga, S.term(l_index), k, part).items():
                image = components[l_index][word[0]]
                if k:
                    image = T.act(l_index + s, image, k, S.cdga.space(k).project_word(word[1:]))
                add_into(result, image, val)
        return result


def graded_hom_space(S: CurvedModule, T: CurvedModule, s: int) -> GradedHomSpace:
    if S.cdga.algebra is not T.cdga.algebra:
        raise DomainMismatch("graded_hom_space -- the modules are over different algebras")
    if isinstance(S, ConnectionModule):
        components = tuple(l_index for l_index in range(S.term_hi, S.term_lo - 1, -1) if T.in_window(l_index + s))
        homs = {l_index: hom_right_A(S.term(l_index), T.space(l_index + s)) for l_index in components}
        offsets, total = _offsets(components, homs)
        subspace = kernel_subspace(total, [])
        return GradedHomSpace(source=S, target=T, degree=s, components=components, homs=homs, offsets=offsets,
                              subspace=subspace, free_generators=True)
    components = tuple(j for j in range(S.hi, S.lo - 1, -1) if T.in_window(j + s))
    homs = {j: hom_right_A(S.space(j), T.space(j + s)) for j in components}
    offsets, total = _offsets(components, homs)
    entries: dict = defaultdict(dict)
    V = S.cdga.V
    for j in range(S.lo, S.hi):
        if j + 1 not in homs:
            continue
        hk = homs[j + 1]
        hj = homs.get(j)
        for c in range(hj.rank if hj is not None else 0):
            cols = hj.columns({c: ONE})
            for e, v in product(range(S.rank(j)), range(V.rank)):
                for t, val in T.act_v(j + s, cols[e], v).items():
                    add_into(entries[(j, e, v, t)], {offsets[j] + c: -val})
        images = {(e, v): S.act_v(j, unit_vec(e), v) for e, v in product(range(S.rank(j)), range(V.rank))}
        for c in range(hk.rank):
            cols = hk.columns({c: ONE})
            for (e, v), ev in images.items():
                for t, val in _apply_columns(cols, ev).items():
                    add_into(entries[(j, e, v, t)], {offsets[j + 1] + c: val})
    rows = [row for row in entries.values() if row]
    return GradedHomSpace(source=S, target=T, degree=s, components=components, homs=homs, offsets=offsets,
                          subspace=kernel_subspace(total, rows))


def _offsets(components, homs) -> tuple[dict, int]:
    offsets, total = {}, 0
    for j in components:
        offsets[j] = total
        total += homs[j].rank
    return offsets, total


def hom_differential(src: GradedHomSpace, dst: GradedHomSpace, coords: Vec) -> Vec:
    """d(f) = d_T f - (-1)^s f d_S"""
    S, T, s = src.source, src.target, src.degree
    components = src.components_of(coords)
    sign = parity_sign(s)
    values = {}
    for j in dst.key_components:
        images = []
        for x in dst.inputs(j):
            image = T.dm(j + s, src.evaluate(coords, j, x, components)) if T.in_window(j + s) else {}
            add_into(image, src.evaluate(coords, j + 1, S.dm(j, x), components), -sign)
            images.append(image)
        values[j] = images
    return dst.coords_of(values)


def hom_compose(f_space: GradedHomSpace, f: Vec, g_space: GradedHomSpace, g: Vec, dst: GradedHomSpace) -> Vec:
    """f after g, no Koszul sign"""
    f_components, g_components = f_space.components_of(f), g_space.components_of(g)
    t = g_space.degree
    values = {}
    for j in dst.key_components:
        values[j] = [f_space.evaluate(f, j + t, g_space.evaluate(g, j, x, g_components), f_components)
                     for x in dst.inputs(j)]
    return dst.coords_of(values)


@dataclass(frozen=True, eq=False)
class HomComplex:
    source: CurvedModule
    target: CurvedModule
    spaces: dict
    differentials: dict
    cohomology: dict
    report: VerificationReport = field(repr=False, default=None)

    def identity_coords(self) -> Vec:
        """coordinates of the identity in degree 0 (source = target)"""
        space = self.spaces[0]
        return space.coords_of({j: list(space.inputs(j)) for j in space.key_components})


def hom_complex(M: CurvedModule, N: CurvedModule) -> HomComplex:
    """
    graded right A^.-linear maps with d(f) = d_N f - (-1)^s f d_M, d^2 = 0 checked on basis maps, and the
    cohomology ranks wherever both adjacent differentials are inside the window
    """
    lo, hi = N.lo - (M.term_hi if isinstance(M, ConnectionModule) else M.hi), N.hi - M.lo
    spaces = {s: graded_hom_space(M, N, s) for s in range(lo, hi + 1)}
    report = VerificationReport(subject=f"hom complex ({M.name}, {N.name})", window=[lo, hi])
    differentials = {}
    for s in range(lo, hi):
        try:
            differentials[s] = tuple(hom_differential(spaces[s], spaces[s + 1], unit_vec(c))
                                     for c in range(spaces[s].dim))
        except WindowTooNarrow as error:
            report.note(f"d on degree {s} leaves the window at {error.witness}")
    for s in range(lo, hi - 1):
        if s in differentials and s + 1 in differentials:
            witness = next((c for c, col in enumerate(differentials[s])
                            if _apply_columns(differentials[s + 1], col)), None)
            report.add(f"d_squared.degree{s}", witness is None, witness, window=[s, s + 2])
    cohomology = {}
    for s in range(lo, hi + 1):
        if s not in differentials:
            continue
        if s - 1 in differentials:
            incoming = _rank_of(differentials[s - 1], spaces[s].dim)
        elif spaces.get(s - 1) is None or spaces[s - 1].dim == 0:
            incoming = 0
        else:
            continue
        kernel = spaces[s].dim - _rank_of(differentials[s], spaces[s + 1].dim)
        cohomology[s] = kernel - incoming
    return HomComplex(source=M, target=N, spaces=spaces, differentials=differentials, cohomology=cohomology,
                      report=report)


def _rank_of(columns: Sequence[Vec], nrows: int) -> int:
    return span_subspace(nrows, list(columns)).dim if columns else 0


def endomorphism_dga(M: CurvedModule, degrees: Sequence[int] = (0, 1)) -> tuple[HomComplex, VerificationReport]:
    """
    the endomorphism complex with composition: d_S^2 = 0 and d_S(f g) = d_S(f) g + (-1)^{|f|} f d_S(g)
    on basis pairs of the listed degrees, and the identity is closed
    """
    complex_ = hom_complex(M, M)
    report = VerificationReport(subject=f"endomorphisms of {M.name}".strip())
    report.extend(complex_.report, prefix="complex")
    spaces, diffs = complex_.spaces, complex_.differentials
    if 0 in diffs:
        identity = complex_.identity_coords()
        d_identity = hom_differential(spaces[0], spaces[1], identity)
        report.add("identity_closed", not d_identity, witness_vec(d_identity))
    for s, t in product(degrees, repeat=2):
        if not all(k in diffs for k in (s, t, s + t)) or s + t + 1 not in spaces:
            continue
        witness = None
        for a, b in product(range(spaces[s].dim), range(spaces[t].dim)):
            try:
                fg = hom_compose(spaces[s], unit_vec(a), spaces[t], unit_vec(b), spaces[s + t])
                lhs = hom_differential(spaces[s + t], spaces[s + t + 1], fg)
                rhs = hom_compose(spaces[s + 1], diffs[s][a], spaces[t], unit_vec(b), spaces[s + t + 1])
                add_into(rhs, hom_compose(spaces[s], unit_vec(a), spaces[t + 1], diffs[t][b], spaces[s + t + 1]),
                         parity_sign(s))
            except WindowTooNarrow:
                continue
            if lhs != rhs:
                witness = [s, a, t, b]
                break
        report.add(f"leibniz.degree{s}x{t}", witness is None, witness)
    return complex_, report


# induced modules

def induced_xi_module(E: CurvedBimodule, M: CurvedModule, lo: Optional[int] = None,
                      hi: Optional[int] = None) -> CurvedModule:
    """
    Xi_B(E, M): graded right B^.-linear maps E -> M, a curved module over the left CDGA of E with
    (xi a)(e) = xi(a e) and d(xi) = d_M xi - (-1)^{|xi|} xi d_E
    """
    if E.cdga is not M.cdga:
        raise DomainMismatch("induced_xi_module -- M must be a module over the right CDGA of E")
    lo = M.lo - E.lo if lo is None else lo
    hi = M.hi - E.lo if hi is None else hi
    L = E.left_cdga
    spaces = {n: graded_hom_space(E, M, n) for n in range(lo, hi + 1)}
    A = L.algebra

    def act(n, coords, k, t):
        target = spaces[n + k]
        components = spaces[n].components_of(coords)
        values = {j: [spaces[n].evaluate(coords, j + k, E.left_act(k, t, j, x), components) for x in target.inputs(j)]
                  for j in target.key_components}
        return target.coords_of(values)

    module_spaces = []
    for n in range(lo, hi + 1):
        X = spaces[n]
        right = tuple(tuple(act(n, unit_vec(c), 0, unit_vec(a)) for a in range(A.dim)) for c in range(X.dim))
        module_spaces.append(ModuleSpace(rank=X.dim, algebra=A, right=right, name=f"Xi^{n}"))
    v_action, d_maps = [], []
    for n in range(lo, hi):
        v_action.append(tuple(tuple(act(n, unit_vec(c), 1, unit_vec(v)) for v in range(L.V.rank))
                              for c in range(spaces[n].dim)))
        columns = tuple(hom_differential(spaces[n], spaces[n + 1], unit_vec(c)) for c in range(spaces[n].dim))
        d_maps.append(LinMap(source=module_spaces[n - lo], target=module_spaces[n - lo + 1], columns=columns))
    return CurvedModule(cdga=L, lo=lo, hi=hi, spaces=tuple(module_spaces), v_action=tuple(v_action),
                        d=tuple(d_maps), name=f"Xi({E.name}, {M.name})")


def induced_tensor_module(M: CurvedModule, E: CurvedBimodule) -> CurvedModule:
    """
    M (x)_A E over the right CDGA of E, d(m (x) e) = d_M(m) (x) e + (-1)^{|m|} m (x) d_E(e), on the
    window of degrees where every summand M^i (x) E^{k-i} is available
    """
    if E.left_cdga is not M.cdga:
        raise DomainMismatch("induced_tensor_module -- M must be a module over the left CDGA of E")
    lo = M.lo + E.lo
    hi = min(M.hi + E.lo, E.hi + M.lo)
    V = M.cdga.V
    B = E.cdga.algebra
    degrees = []
    for k in range(lo, hi + 1):
        parts, offsets, total = [], {}, 0
        for i in range(M.lo, k - E.lo + 1):
            space = tensor_chain([M.space(i), E.space(k - i)])
            offsets[i] = total
            parts.append((i, space))
            total += space.rank
        relations = []
        for i, space in parts:
            if i + 1 not in offsets:
                continue
            upper = dict(parts)[i + 1]
            for m, v, e in product(range(M.rank(i)), range(V.rank), range(E.rank(k - i - 1))):
                rel: Vec = {}
                for m2, val in M.act_v(i, unit_vec(m), v).items():
                    add_into(rel, {offsets[i + 1] + j: x for j, x in upper.project_word((m2, e)).items()}, val)
                for e2, val in E.left_act_v(k - i - 1, v, unit_vec(e)).items():
                    add_into(rel, {offsets[i] + j: x for j, x in space.project_word((m, e2)).items()}, -val)
                if rel:
                    relations.append(rel)
        degrees.append((parts, offsets, sparse_quotient(total, relations)))

    def locate(k, index):
        parts, offsets, _ = degrees[k - lo]
        for i, space in reversed(parts):
            if index >= offsets[i]:
                return i, space, index - offsets[i]
        raise ShapeError("induced_tensor_module -- index out of range")

    def project(k, i, tensor_vec):
        parts, offsets, quotient = degrees[k - lo]
        return quotient.project({offsets[i] + j: val for j, val in tensor_vec.items()})

    module_spaces = []
    for k in range(lo, hi + 1):
        quotient = degrees[k - lo][2]
        right = []
        for r in quotient.representatives:
            i, space, local = locate(k, r)
            right.append(tuple(project(k, i, space.act_right(unit_vec(local), unit_vec(b))) for b in range(B.dim)))
        module_spaces.append(ModuleSpace(rank=quotient.dim, algebra=B, right=tuple(right), name=f"M(x)E^{k}"))
    v_action, d_maps = [], []
    for k in range(lo, hi):
        quotient = degrees[k - lo][2]
        rows, columns = [], []
        for r in quotient.representatives:
            i, space, local = locate(k, r)
            m, e = space.words[local]
            same = dict(degrees[k + 1 - lo][0])[i]
            rows.append(tuple(project(k + 1, i, _pair(same, m, E.act_v(k - i, unit_vec(e), w)))
                              for w in range(E.cdga.V.rank)))
            image: Vec = {}
            if i + 1 in degrees[k + 1 - lo][1]:
                upper = dict(degrees[k + 1 - lo][0])[i + 1]
                for m2, val in M.dm(i, unit_vec(m)).items():
                    add_into(image, project(k + 1, i + 1, upper.project_word((m2, e))), val)
            add_into(image, project(k + 1, i, _pair(same, m, E.dm(k - i, unit_vec(e)))), parity_sign(i))
            columns.append(image)
        v_action.append(tuple(rows))
        d_maps.append(LinMap(source=module_spaces[k - lo], target=module_spaces[k - lo + 1], columns=tuple(columns)))
    return CurvedModule(cdga=E.cdga, lo=lo, hi=hi, spaces=tuple(module_spaces), v_action=tuple(v_action),
                        d=tuple(d_maps), name=f"{M.name} (x) {E.name}")


def _pair(space, m: int, e: Vec) -> Vec:
    result: Vec = {}
    for j, val in e.items():
        add_into(result, space.project_word((m, j)), val)
    return result
