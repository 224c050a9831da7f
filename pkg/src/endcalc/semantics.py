"""End types, genus and the countable normal form of a signature.

Every end of a represented graph gets a *type*, an exact description of
its neighbourhoods:

* ``PointType(acc, marked, rank)`` is an end whose small neighbourhoods are
  a countable tower of height ``rank`` over the types in ``acc``;
  ``w^a+1`` has the single maximal type ``PointType({}, False, a)``.
* ``CantorType(acc, marked)`` is an end in a Cantor set of equal ends whose
  neighbourhoods also carry the types in ``acc``; ``C`` has
  ``CantorType({}, False)``.

``marked`` means the end is accumulated by genus.  A set of types is kept
as a frozenset of maximal generators; ``Range`` stands for the infinite
set of towers of every height below a limit bound, and ``Indexed`` for the
union over the members of a family that has no closed description.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from . import ordinal as O
from . import signature as S
from .ordinal import Ordinal, ZERO

INF = math.inf
SEARCH_BOUND = 8  # member indices probed when an indexed family is queried


class Uncountable(ValueError):
    pass


class EmptyEndSpace(ValueError):
    pass


@dataclass(frozen=True)
class PointType:
    acc: frozenset
    marked: bool
    rank: Ordinal


@dataclass(frozen=True)
class CantorType:
    acc: frozenset
    marked: bool


@dataclass(frozen=True)
class Range:
    acc: frozenset
    marked: bool
    bound: Ordinal


@dataclass(frozen=True)
class Indexed:
    family: object
    ops: tuple = ()


EMPTY = frozenset()
PLAIN_POINT = PointType(EMPTY, False, ZERO)  # an isolated end
MARKED_POINT = PointType(EMPTY, True, ZERO)  # an isolated end accumulated by genus
PLAIN_CANTOR = CantorType(EMPTY, False)
MARKED_CANTOR = CantorType(EMPTY, True)


def is_type(g) -> bool:
    return isinstance(g, (PointType, CantorType))


# -- ordering helpers ---------------------------------------------------------


def type_key(g):
    if isinstance(g, PointType):
        return (0, g.marked, _OrdKey(g.rank), _set_key(g.acc))
    if isinstance(g, CantorType):
        return (2, g.marked, _OrdKey(ZERO), _set_key(g.acc))
    if isinstance(g, Range):
        return (1, g.marked, _OrdKey(g.bound), _set_key(g.acc))
    return (3, False, _OrdKey(ZERO), (repr(g),))


def _set_key(s):
    return tuple(sorted(type_key(g) for g in s))


class _OrdKey:
    __slots__ = ("o",)

    def __init__(self, o):
        self.o = o

    def __lt__(self, other):
        return O.cmp(self.o, other.o) < 0

    def __eq__(self, other):
        return self.o == other.o

    def __hash__(self):
        return hash(self.o)


def sorted_types(s):
    return sorted(s, key=type_key)


# -- membership ---------------------------------------------------------------


def _and3(vals):
    out = True
    for v in vals:
        if v is False:
            return False
        if v is None:
            out = None
    return out


def _or3(vals):
    out = False
    for v in vals:
        if v is True:
            return True
        if v is None:
            out = None
    return out


def le_set(x, gens) -> Optional[bool]:
    """Is the type x present below (or equal to) some generator of gens?"""
    return _or3(le_gen(x, g) for g in gens)


@lru_cache(maxsize=None)
def le_gen(x, g) -> Optional[bool]:
    if x == g:
        return True
    if isinstance(g, PointType):
        if isinstance(x, PointType) and x.acc == g.acc and x.marked == g.marked and x.rank < g.rank:
            return True
        return le_set(x, g.acc)
    if isinstance(g, CantorType):
        return le_set(x, g.acc)
    if isinstance(g, Range):
        if isinstance(x, PointType) and x.acc == g.acc and x.marked == g.marked and x.rank < g.bound:
            return True
        return le_set(x, g.acc)
    for k in range(SEARCH_BOUND):
        if le_set(x, indexed_member_types(g, k)) is True:
            return True
    return None


def leq(x, y) -> Optional[bool]:
    """x is an end type occurring in every neighbourhood of an end of type y."""
    return le_gen(x, y)


def below(t) -> frozenset:
    """Generators of the types strictly below an explicit type."""
    if isinstance(t, PointType) and not t.rank.is_zero():
        r = mk_range(t.acc, t.marked, t.rank)
        return norm_set(t.acc | {r})
    return t.acc


def _gen_within(g, h) -> bool:
    """Is every type described by g also described (or dominated) by h?"""
    if g == h:
        return True
    if isinstance(g, Indexed) or isinstance(h, Indexed):
        return False
    if isinstance(g, Range):
        if isinstance(h, (PointType, Range)) and h.acc == g.acc and h.marked == g.marked:
            top = h.rank.succ() if isinstance(h, PointType) else h.bound
            if g.bound <= top:
                return True
        return any(_gen_within(g, a) for a in h.acc)
    return le_gen(g, h) is True


def norm_set(gens) -> frozenset:
    items = {g for g in gens if g is not None}
    ordered = sorted(items, key=type_key)
    kept = []
    for g in ordered:
        dominated = False
        for h in ordered:
            if h is g:
                continue
            if _gen_within(g, h) and not (_gen_within(h, g) and type_key(h) > type_key(g)):
                dominated = True
                break
        if not dominated:
            kept.append(g)
    return frozenset(kept)


def any_marked(gens) -> bool:
    for g in gens:
        if isinstance(g, Indexed):
            if any(any_marked(indexed_member_types(g, k)) for k in range(3)):
                return True
        elif g.marked:
            return True
    return False


# -- constructors ---------------------------------------------------------------


@lru_cache(maxsize=None)
def mk_point(acc: frozenset, marked: bool, rank: Ordinal):
    acc = norm_set(acc)
    marked = marked or any_marked(acc)
    if len(acc) == 1:
        (g,) = acc
        if isinstance(g, CantorType) and g.marked == marked:
            return g
        if isinstance(g, PointType) and g.marked == marked:
            return mk_point(g.acc, marked, g.rank + O.ONE + rank)
        if isinstance(g, Range) and g.marked == marked:
            return mk_point(g.acc, marked, g.bound + rank)
    return PointType(acc, marked, rank)


@lru_cache(maxsize=None)
def mk_cantor(acc: frozenset, marked: bool):
    acc = norm_set(acc)
    marked = marked or any_marked(acc)
    if len(acc) == 1:
        (g,) = acc
        if isinstance(g, CantorType) and g.marked == marked:
            return g
    return CantorType(acc, marked)


@lru_cache(maxsize=None)
def mk_range(acc: frozenset, marked: bool, bound: Ordinal):
    if bound.is_zero():
        return None
    if bound.is_successor():
        return mk_point(acc, marked, bound.pred())
    t0 = mk_point(acc, marked, ZERO)
    if isinstance(t0, CantorType):
        return t0
    return Range(t0.acc, t0.marked, t0.rank + bound)


@lru_cache(maxsize=None)
def mark_gen(g):
    if isinstance(g, PointType):
        return mk_point(mark_set(g.acc), True, g.rank)
    if isinstance(g, CantorType):
        return mk_cantor(mark_set(g.acc), True)
    if isinstance(g, Range):
        return mk_range(mark_set(g.acc), True, g.bound)
    return Indexed(g.family, g.ops + (("mark",),))


def mark_set(gens) -> frozenset:
    return norm_set(mark_gen(g) for g in gens)


@lru_cache(maxsize=None)
def lift_gen(g, L: frozenset, mL: bool):
    """Type of an end of a convergence base once the family accumulates at it."""
    if isinstance(g, PointType):
        return mk_point(L | lift_set(g.acc, L, mL), g.marked or mL, g.rank)
    if isinstance(g, CantorType):
        return mk_cantor(L | lift_set(g.acc, L, mL), g.marked or mL)
    if isinstance(g, Range):
        return mk_range(L | lift_set(g.acc, L, mL), g.marked or mL, g.bound)
    return Indexed(g.family, g.ops + (("lift", L, mL),))


def lift_set(gens, L, mL) -> frozenset:
    if not L and not mL:
        return frozenset(gens)
    return norm_set(lift_gen(g, L, mL) for g in gens)


@lru_cache(maxsize=None)
def indexed_member_types(g: Indexed, k: int) -> frozenset:
    out = types(S.family_member(g.family, k))
    for op in g.ops:
        if op[0] == "mark":
            out = mark_set(out)
        else:
            out = lift_set(out, op[1], op[2])
    return out


# -- types of signatures ---------------------------------------------------------


def has_ends(sig) -> bool:
    return bool(types(sig))


@lru_cache(maxsize=None)
def types(sig) -> frozenset:
    """Maximal generators of the end types of a closed signature."""
    return _types(sig, False)


@lru_cache(maxsize=None)
def types_limit(template) -> frozenset:
    """Union over n of the end types of a template whose index only feeds ordinals."""
    return _types(template, True)


def _types(sig, lim: bool) -> frozenset:
    if isinstance(sig, S.Rose):
        return EMPTY
    if isinstance(sig, S.CantorTree):
        return frozenset({PLAIN_CANTOR})
    if isinstance(sig, S.Ord):
        a = sig.alpha
        if isinstance(a, Ordinal):
            return frozenset({mk_point(EMPTY, False, a)})
        if not lim:
            raise ValueError("open template where a closed signature was expected")
        s, attained = O.sup_over_index(a)
        g = mk_point(EMPTY, False, s) if attained else mk_range(EMPTY, False, s)
        return frozenset({g})
    if isinstance(sig, S.Genus):
        return mark_set(_types(sig.inner, lim))
    if isinstance(sig, S.Wedge):
        out = set()
        for p in sig.parts:
            out |= _types(p, lim)
        return norm_set(out)
    fam = sig.family
    base_types = _types(sig.base, lim)
    if not base_types:
        # a finite base: members sit at the finitely many vertex depths
        depth_max = max_depth(_closed(sig.base))
        out = set()
        for d in range(depth_max + 1):
            out |= types(S.family_member(fam, d))
        return norm_set(out)
    L = limsup(fam)
    mL = any_marked(L) or tail_genus_positive(fam)
    out = set(L)
    for d in range(S.head_length(fam)):
        out |= types(S.family_member(fam, d))
    out |= lift_set(base_types, L, mL)
    return norm_set(out)


def _closed(sig):
    return S.substitute(sig, 1) if S.free_in(sig) else sig


def distributive(template) -> bool:
    """The index occurs only in ordinal leaves outside every family."""
    if isinstance(template, (S.Genus,)):
        return distributive(template.inner)
    if isinstance(template, S.Wedge):
        return all(distributive(p) for p in template.parts)
    if isinstance(template, S.Conv):
        return not S.free_in_family(template.family) and distributive(template.base)
    return True


@lru_cache(maxsize=None)
def limsup(fam) -> frozenset:
    """Types recurring along the family: they accumulate at every base end."""
    if isinstance(fam, S.Const):
        return types(fam.y)
    if isinstance(fam, S.Param):
        if distributive(fam.template):
            return types_limit(fam.template)
        return frozenset({Indexed(fam)})
    if isinstance(fam, S.Accum):
        out = set(limsup(fam.gen))
        for d in range(S.head_length(fam.gen)):
            out |= types(S.family_member(fam.gen, d))
        return _wrap_indexed(norm_set(out), fam)
    if isinstance(fam, S.Stride):
        return _wrap_indexed(limsup(fam.inner), fam)
    if isinstance(fam, S.WedgeFam):
        return norm_set(limsup(fam.a) | limsup(fam.b))
    return limsup(fam.tail)


def _wrap_indexed(gens, fam) -> frozenset:
    if any(isinstance(g, Indexed) for g in gens):
        return norm_set({g for g in gens if not isinstance(g, Indexed)} | {Indexed(fam)})
    return gens


def tail_genus_positive(fam) -> bool:
    h = S.head_length(fam)
    return any(genus_value(S.family_member(fam, k)) > 0 for k in range(h, h + 4))


# -- vertex counts and genus ---------------------------------------------------------


@lru_cache(maxsize=None)
def max_depth(sig) -> int:
    """Largest vertex depth of a finite graph."""
    if isinstance(sig, S.Rose):
        return 0
    if isinstance(sig, S.Genus):
        return max_depth(sig.inner)
    if isinstance(sig, S.Wedge):
        return max(max_depth(p) for p in sig.parts)
    if isinstance(sig, S.Conv):
        db = max_depth(sig.base)
        return max(d + max_depth(S.family_member(sig.family, d)) for d in range(db + 1))
    raise ValueError("infinite graph has unbounded depth")


@lru_cache(maxsize=None)
def vcount(sig, d: int) -> int:
    """Vertices at distance d from the base vertex in the canonical model."""
    if isinstance(sig, S.Rose):
        return 1 if d == 0 else 0
    if isinstance(sig, S.CantorTree):
        return 2**d
    if isinstance(sig, S.Genus):
        return vcount(sig.inner, d)
    if isinstance(sig, S.Wedge):
        return 1 if d == 0 else sum(vcount(p, d) for p in sig.parts)
    if isinstance(sig, S.Ord):
        beta = sig.alpha
        if beta.is_zero():
            return 1
        if beta.is_successor():
            return _vconv(lambda j: S.Ord(beta.pred()), S.ONE, d)
        return _vconv(lambda j: S.Ord(beta.fundamental(j)), S.ONE, d)
    return _vconv(lambda j: S.family_member(sig.family, j), sig.base, d)


def _vconv(member, base, d):
    total = vcount(base, d)
    for j in range(d):
        vb = vcount(base, j)
        if vb:
            total += vb * vcount(member(j), d - j)
    return total


def vertex_total(sig) -> int:
    return sum(vcount(sig, d) for d in range(max_depth(sig) + 1))


@lru_cache(maxsize=None)
def genus_value(sig):
    """Rank of the fundamental group: an int or INF."""
    if isinstance(sig, S.Rose):
        return sig.k
    if isinstance(sig, (S.CantorTree, S.Ord)):
        return 0
    if isinstance(sig, S.Genus):
        if has_ends(sig.inner):
            return INF
        return genus_value(sig.inner) + vertex_total(sig.inner)
    if isinstance(sig, S.Wedge):
        return sum(genus_value(p) for p in sig.parts)
    fam, base = sig.family, sig.base
    g = genus_value(base)
    if has_ends(base):
        if tail_genus_positive(fam):
            return INF
        for d in range(S.head_length(fam)):
            gm = genus_value(S.family_member(fam, d))
            if gm:
                g += gm * vcount(base, d)
        return g
    for d in range(max_depth(base) + 1):
        gm = genus_value(S.family_member(fam, d))
        if gm:
            g += gm * vcount(base, d)
    return g


@dataclass(frozen=True)
class GenusClass:
    kind: str  # "Zero", "Finite" or "Infinite"
    k: int = 0

    def __str__(self):
        return f"Finite({self.k})" if self.kind == "Finite" else self.kind

    def to_json(self):
        return {"kind": self.kind, "k": self.k} if self.kind == "Finite" else {"kind": self.kind}


def genus_class(sig) -> GenusClass:
    g = genus_value(sig)
    if g == INF:
        return GenusClass("Infinite")
    if g == 0:
        return GenusClass("Zero")
    return GenusClass("Finite", int(g))


# -- census of maximal types -------------------------------------------------------


def _add_counts(dst, src, times=1):
    for t, c in src.items():
        dst[t] = dst.get(t, 0) + c * times


@lru_cache(maxsize=None)
def _census(sig):
    if isinstance(sig, S.Rose):
        return {}
    if isinstance(sig, S.CantorTree):
        return {PLAIN_CANTOR: INF}
    if isinstance(sig, S.Ord):
        return {mk_point(EMPTY, False, sig.alpha): 1}
    if isinstance(sig, S.Genus):
        out = {}
        for t, c in _census(sig.inner).items():
            _add_counts(out, {mark_gen(t): c})
        return out
    if isinstance(sig, S.Wedge):
        out = {}
        for p in sig.parts:
            _add_counts(out, _census(p))
        return out
    fam, base = sig.family, sig.base
    out = {}
    if not has_ends(base):
        for d in range(max_depth(base) + 1):
            _add_counts(out, _census(S.family_member(fam, d)), vcount(base, d))
        return out
    L = limsup(fam)
    mL = any_marked(L) or tail_genus_positive(fam)
    for t, c in _census(base).items():
        _add_counts(out, {lift_gen(t, L, mL): c})
    for d in range(S.head_length(fam)):
        _add_counts(out, _census(S.family_member(fam, d)), vcount(base, d))
    for t in L:
        out[t] = INF
    return out


def max_type_counts(sig):
    """[(type, count)] for the maximal end types; Cantor types count as INF."""
    cen = _census(sig)
    out = []
    for t in sorted_types(types(sig)):
        if isinstance(t, CantorType):
            out.append((t, INF))
        else:
            out.append((t, cen.get(t, INF)))
    return out


# -- structural predicates --------------------------------------------------------


def contains_cantor(gens) -> bool:
    for g in gens:
        if isinstance(g, CantorType):
            return True
        if isinstance(g, Indexed):
            if any(contains_cantor(indexed_member_types(g, k)) for k in range(3)):
                return True
        elif contains_cantor(g.acc):
            return True
    return False


def all_marked(gens) -> bool:
    for g in gens:
        if isinstance(g, Indexed):
            if not all(all_marked(indexed_member_types(g, k)) for k in range(3)):
                return False
        elif not g.marked or not all_marked(g.acc):
            return False
    return True


def is_countable(sig) -> bool:
    return not contains_cantor(types(sig))


# -- countable normal form --------------------------------------------------------


def _combine(pairs):
    pairs = [p for p in pairs if p is not None]
    if not pairs:
        return None
    top = pairs[0][0]
    for a, _ in pairs[1:]:
        top = O.expr_max(top, a)
    n = sum(c for a, c in pairs if O.eventual_cmp(a, top) == 0)
    return top, n


def ms_form(sig):
    """(alpha, n) with the end space homeomorphic to w^alpha*n+1."""
    if not is_countable(sig):
        raise Uncountable("end space is uncountable")
    res = _ms(sig)
    if res is None:
        raise EmptyEndSpace("end space is empty")
    return res


def _ms(sig):
    if isinstance(sig, S.Rose):
        return None
    if isinstance(sig, S.CantorTree):
        raise Uncountable("end space is uncountable")
    if isinstance(sig, S.Ord):
        return sig.alpha, 1
    if isinstance(sig, S.Genus):
        return _ms(sig.inner)
    if isinstance(sig, S.Wedge):
        return _combine([_ms(p) for p in sig.parts])
    fam, base = sig.family, sig.base
    closed_base = _closed(base)
    b = _ms(base)
    if b is None:
        pieces = []
        for d in range(max_depth(closed_base) + 1):
            m = _ms(S.family_member(fam, d))
            if m is not None:
                pieces.append((m[0], m[1] * vcount(closed_base, d)))
        return _combine(pieces)
    r, m = b
    tail = _tail_rank(fam)
    if tail is None:
        limit = ZERO
    else:
        s, attained = tail
        limit = O.expr_add(s, O.ONE) if attained else s
    pieces = [(O.expr_add(limit, r), m)]
    for d in range(S.head_length(fam)):
        mm = _ms(S.family_member(fam, d))
        if mm is not None:
            pieces.append((mm[0], mm[1] * vcount(closed_base, d)))
    return _combine(pieces)


def _best(cands):
    cands = [c for c in cands if c is not None]
    if not cands:
        return None
    top = cands[0][0]
    for v, _ in cands[1:]:
        top = O.expr_max(top, v)
    return top, any(a for v, a in cands if O.eventual_cmp(v, top) == 0)


def _tail_rank(fam):
    """(sup of member ranks along the tail, attained infinitely often)."""
    if isinstance(fam, S.Const):
        m = _ms(fam.y)
        return None if m is None else (m[0], True)
    if isinstance(fam, S.Param):
        m = _ms(fam.template)
        if m is None:
            return None
        return O.sup_over_index(m[0])
    if isinstance(fam, S.Accum):
        cands = [_tail_rank(fam.gen)]
        for d in range(S.head_length(fam.gen)):
            m = _ms(S.family_member(fam.gen, d))
            if m is not None:
                cands.append((m[0], True))
        return _best(cands)
    if isinstance(fam, S.Stride):
        return _tail_rank(fam.inner)
    if isinstance(fam, S.WedgeFam):
        return _best([_tail_rank(fam.a), _tail_rank(fam.b)])
    return _tail_rank(fam.tail)


# -- characteristic pair summary ------------------------------------------------------


@dataclass(frozen=True)
class CharPair:
    genus: GenusClass
    countable: bool
    ms_form: Optional[tuple]
    has_isolated_plain_end: bool
    has_isolated_genus_end: bool
    perfect: bool
    genus_support: str  # "None", "All" or "Mixed"

    def to_json(self):
        return {
            "genus": self.genus.to_json(),
            "countable": self.countable,
            "msForm": None if self.ms_form is None else {"alpha": str(self.ms_form[0]), "n": self.ms_form[1]},
            "hasIsolatedPlainEnd": self.has_isolated_plain_end,
            "hasIsolatedGenusEnd": self.has_isolated_genus_end,
            "perfect": self.perfect,
            "genusSupport": self.genus_support,
        }


def char_pair(sig) -> CharPair:
    ts = types(sig)
    g = genus_class(sig)
    countable = not contains_cantor(ts)
    ms = _ms(sig) if countable and ts else None
    plain = le_set(PLAIN_POINT, ts) is True
    gen = le_set(MARKED_POINT, ts) is True
    perfect = bool(ts) and not plain and not gen
    if g.kind != "Infinite":
        support = "None"
    elif all_marked(ts):
        support = "All"
    else:
        support = "Mixed"
    return CharPair(g, countable, ms, plain, gen, perfect, support)


def describe(t) -> str:
    """Short human-readable rendering of a type (for traces and errors)."""
    if isinstance(t, PointType):
        base = f"pt{'*' if t.marked else ''}[{t.rank}]"
    elif isinstance(t, CantorType):
        base = f"cantor{'*' if t.marked else ''}"
    elif isinstance(t, Range):
        return f"range{'*' if t.marked else ''}[<{t.bound}]" + _acc_desc(t.acc)
    else:
        return f"indexed({S.show(t.family)})"
    return base + _acc_desc(t.acc)


def _acc_desc(acc):
    if not acc:
        return ""
    return "{" + ", ".join(describe(a) for a in sorted_types(acc)) + "}"
