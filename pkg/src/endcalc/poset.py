"""The order on end types and the local structures that realise them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import canonical as K
from . import ordinal as O
from . import semantics as M
from . import signature as S
from .canonical import Verdict, YES, NO, UNKNOWN, from3
from .ordinal import Ordinal

SINGLE, CANTOR_MANY = "SingleEnd", "CantorManyEnds"


class NotLocalStructure(ValueError):
    pass


@dataclass(frozen=True)
class LocalStructure:
    sig: object
    top: object
    max_kind: str
    genus_mark: bool

    @staticmethod
    def of_type(t) -> "LocalStructure":
        kind = CANTOR_MANY if isinstance(t, M.CantorType) else SINGLE
        return LocalStructure(K.type_to_signature(t), t, kind, bool(t.marked))

    @staticmethod
    def of(sig) -> "LocalStructure":
        if isinstance(sig, LocalStructure):
            return sig
        v = K.is_self_similar(sig)
        if v.answer != YES:
            raise NotLocalStructure(f"{S.to_text(sig)} is not self-similar ({v.tag})")
        ((t, _),) = M.max_type_counts(sig)
        return LocalStructure(K.normalize(sig), t, CANTOR_MANY if isinstance(t, M.CantorType) else SINGLE, bool(t.marked))

    def shell(self):
        return K.max_shell(self.top)

    def text(self) -> str:
        return S.to_text(self.sig)


def _top(z):
    if isinstance(z, LocalStructure):
        return z.top
    if M.is_type(z):
        return z
    return LocalStructure.of(z).top


# -- membership and comparison -----------------------------------------------------


def has_end_of_type(sig, z) -> Verdict:
    t = _top(z)
    return from3(M.le_set(t, M.types(sig)), "EndTypeMembership", M.describe(t))


def leq(z, z2) -> Verdict:
    a, b = _top(z), _top(z2)
    return from3(M.leq(a, b), "EndTypeOrder")


def strictly_below(a, b) -> Optional[bool]:
    if a == b:
        return False
    v = M.leq(a, b)
    if v is not True:
        return v
    back = M.leq(b, a)
    return None if back is None else not back


def maximal_end_types(sig):
    """[(LocalStructure, multiplicity)] where multiplicity is an int or 'CantorMany'."""
    st = K.is_stable(sig)
    if st.status == "Unstable":
        raise K.NotDecomposable(f"unstable: {st.witness}")
    out = []
    for t, c in M.max_type_counts(sig):
        mult = "CantorMany" if isinstance(t, M.CantorType) or c == M.INF else int(c)
        out.append((LocalStructure.of_type(t), mult))
    return out


def minimal_local_structures():
    return [LocalStructure.of_type(t) for t in
            (M.PLAIN_POINT, M.MARKED_POINT, M.PLAIN_CANTOR, M.MARKED_CANTOR)]


# -- explicit types occurring in a signature ---------------------------------------


def explicit_types(gens, probe=None) -> list:
    """Concrete end types reachable from generators.

    Towers contribute their rank-zero floor, and when a probe type sits in a
    tower the next rank above it, which is the least type of that tower
    strictly above the probe.
    """
    seen = set()
    order = []

    def add(t):
        if t is None or t in seen:
            return
        if isinstance(t, M.Indexed):
            for k in range(M.SEARCH_BOUND):
                for g in M.indexed_member_types(t, k):
                    add(g)
            return
        if isinstance(t, M.Range):
            add(M.mk_point(t.acc, t.marked, O.ZERO))
            _probe_step(t.acc, t.marked, t.bound, True)
            for g in t.acc:
                add(g)
            return
        seen.add(t)
        order.append(t)
        if isinstance(t, M.PointType) and not t.rank.is_zero():
            add(M.mk_point(t.acc, t.marked, O.ZERO))
            _probe_step(t.acc, t.marked, t.rank, False)
        for g in t.acc:
            add(g)

    def _probe_step(acc, marked, limit, strict_limit):
        if not isinstance(probe, M.PointType) or probe.acc != acc or probe.marked != marked:
            return
        nxt = probe.rank.succ()
        if O.cmp(nxt, limit) < 0 or (not strict_limit and nxt == limit):
            add(M.mk_point(acc, marked, nxt))

    for g in M.sorted_types(gens):
        add(g)
    return order


def ranks_in(gens) -> list:
    out = []
    for t in explicit_types(gens):
        if isinstance(t, M.PointType):
            out.append(t.rank)
    for g in _ranges(gens):
        out.append(g.bound)
    return out


def _ranges(gens):
    found = []
    stack = list(gens)
    seen = set()
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, M.Range):
            found.append(g)
        if isinstance(g, M.Indexed):
            for k in range(M.SEARCH_BOUND):
                stack.extend(M.indexed_member_types(g, k))
        else:
            stack.extend(g.acc)
    return found


# -- constructions ---------------------------------------------------------------


def incomparable_to(x) -> LocalStructure:
    ts = M.types(x)
    if not M.contains_cantor(ts):
        return LocalStructure.of_type(M.PLAIN_CANTOR)
    top = O.ZERO
    for r in ranks_in(ts):
        top = O.omax(top, r)
    return LocalStructure.of_type(M.mk_point(M.EMPTY, False, top.succ()))


def immediate_successor(x, kind: str = "one"):
    if isinstance(x, LocalStructure):
        x = x.sig
    inc = incomparable_to(x).sig
    base = S.ONE if kind == "one" else S.C
    return S.Conv(S.Const(S.wedge([x, inc])), base)


def minimal_upper_bound(zs, kind: str = "one"):
    if not zs:
        raise ValueError("minimal upper bound of an empty collection")
    zs = [LocalStructure.of(z) for z in zs]
    for z in zs:
        if all(M.leq(w.top, z.top) is True for w in zs):
            return immediate_successor(z, kind)
    base = S.ONE if kind == "one" else S.C
    fam = S.Accum(S.Prefix(tuple(z.sig for z in zs), S.Const(S.R0)))
    return S.Conv(fam, base)


def clopen_embeds(a, b) -> Verdict:
    """Does the end space of a sit inside b's as a clopen subset?"""
    if M.has_ends(a) and not M.has_ends(b):
        return Verdict(NO, "EmptyTarget")
    if M.is_countable(b) and not M.is_countable(a):
        return Verdict(NO, "Countability")
    st = K.is_stable(a)
    if st.status != "Stable":
        return Verdict(UNKNOWN, "Stability" + st.status)
    tb = M.types(b)
    counts_b = dict(M.max_type_counts(b))
    need = {}
    for comp in K.wedge_decomposition(a, st):
        if comp.top is not None:
            need[comp.top] = need.get(comp.top, 0) + 1
    unknown = False
    for t, c in need.items():
        v = M.le_set(t, tb)
        if v is False:
            return Verdict(NO, "MissingEndType", M.describe(t))
        if v is None:
            unknown = True
            continue
        if c > 1 and t in counts_b and not _inside(t, tb) and counts_b[t] < c:
            return Verdict(NO, "TooFewMaximalEnds", M.describe(t))
    if unknown:
        return Verdict(UNKNOWN, "UndecidedMembership")
    return Verdict(YES, "ComponentsPresent")


def _inside(t, gens) -> bool:
    """t occurs strictly inside some generator, so infinitely often."""
    return any(g != t and M.le_gen(t, g) is True for g in gens)
