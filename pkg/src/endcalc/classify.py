"""Dense conjugacy class verdicts for Maps(X) and for Homeo of the end pair.

The rule chain is fixed; the first rule that fires decides the verdict and
names the theorem behind it.  Searches for obstructions are sound only: when
none is found and no positive rule applies the answer is Unknown, tagged with
one of three categories (1: no shared structure below the maximal ends,
2: two maximal ends share an infinite ascending chain, 3: not stable).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import canonical as K
from . import poset as P
from . import semantics as M
from . import signature as S

LOOP = "LoopMark"

THEOREMS = (
    "FiniteTree", "FiniteGenus", "FiniteEndType", "UniqueMaxEnd", "CantorTree",
    "SelfSimilarNo", "Babel1", "Babel2", "GcdFlux", "GeneralFlux", "TreeCantorFactor",
    "UnknownCategory1", "UnknownCategory2", "UnknownCategory3",
)


@dataclass(frozen=True)
class Verdict:
    answer: str
    theorem: str
    witness: object = None
    category: Optional[int] = None
    trace: tuple = field(default=(), compare=False)

    def to_json(self):
        out = {"answer": self.answer, "theorem": self.theorem, "witness": self.witness}
        if self.category is not None:
            out["category"] = self.category
        out["trace"] = list(self.trace)
        return out


def _desc(t) -> str:
    return LOOP if t == LOOP else M.describe(t)


def _sig_of(t) -> str:
    return "R1" if t == LOOP else S.to_text(K.type_to_signature(t))


# -- domination helpers ---------------------------------------------------------------


def _le(lam, t) -> Optional[bool]:
    if lam == LOOP:
        return bool(t.marked)
    return M.leq(lam, t)


def _above(lam, pool):
    """Members of pool strictly above lam; None if some comparison is undecided."""
    out = []
    for x in pool:
        if x == lam:
            continue
        if lam == LOOP:
            if x.marked:
                out.append(x)
            continue
        v = P.strictly_below(lam, x)
        if v is None:
            return None
        if v:
            out.append(x)
    return out


def _candidates(gens):
    pool = [t for t in P.explicit_types(gens) if not isinstance(t, M.CantorType)]
    for z in (M.PLAIN_POINT, M.MARKED_POINT):
        if z not in pool:
            pool.append(z)
    pool.append(LOOP)
    return pool


# -- gcd -------------------------------------------------------------------------------


@dataclass(frozen=True)
class GcdWitness:
    mu1: object
    mu2: object
    lam: object
    side_check: tuple

    def to_json(self):
        return {
            "mu1": _sig_of(self.mu1),
            "mu2": _sig_of(self.mu2),
            "lambda": _sig_of(self.lam),
            "sideCheck": list(self.side_check),
        }


def _end_pairs(maxes):
    for i, (t, c) in enumerate(maxes):
        if c == 2 and not isinstance(t, M.CantorType):
            yield i, i
    for i, j in itertools.combinations(range(len(maxes)), 2):
        yield i, j


def gcd_check(lam, i, j, maxes, gens) -> Optional[tuple]:
    """Side-check evidence when lam is a gcd of the maximal ends i and j, else None."""
    dom = set()
    for k, (t, _) in enumerate(maxes):
        v = _le(lam, t)
        if v is None:
            return None
        if v:
            dom.add(k)
    if dom != {i, j} or lam in (maxes[i][0], maxes[j][0]):
        return None
    max_set = {t for t, _ in maxes}
    probe = None if lam == LOOP else lam
    pool = [x for x in P.explicit_types(gens, probe) if x not in max_set]
    ups = _above(lam, pool)
    if ups is None:
        return None
    evidence = []
    for x in ups:
        a, b = M.leq(x, maxes[i][0]), M.leq(x, maxes[j][0])
        if a is None or b is None:
            return None
        if a and b:
            return None
        evidence.append(f"{M.describe(x)} under {'mu1' if a else 'mu2' if b else 'neither'}")
    return tuple(evidence)


def gcd_witness_search(sig) -> Optional[GcdWitness]:
    if K.is_stable(sig).status == "Unstable":
        return None
    gens = M.types(sig)
    maxes = M.max_type_counts(sig)
    pool = _candidates(gens)
    for i, j in _end_pairs(maxes):
        for lam in pool:
            ev = gcd_check(lam, i, j, maxes, gens)
            if ev is not None:
                return GcdWitness(maxes[i][0], maxes[j][0], lam, ev)
    return None


# -- babel ---------------------------------------------------------------------------


def babel_check(sig) -> Optional[str]:
    tops = [t for t, _ in M.max_type_counts(sig)]
    over_ray = [t for t in tops if M.leq(M.PLAIN_POINT, t) is True]
    if over_ray and all(isinstance(t, M.CantorType) for t in over_ray):
        return "Babel1"
    marked = [t for t in tops if t.marked]
    if marked and all(isinstance(t, M.CantorType) for t in marked):
        return "Babel2"
    return None


# -- flux splitting ------------------------------------------------------------------------


@dataclass(frozen=True)
class Splitting:
    nu1: object
    nu2: object
    lam: object
    side1: tuple
    side2: tuple

    def to_json(self):
        return {
            "nu1": _sig_of(self.nu1),
            "nu2": _sig_of(self.nu2),
            "lambda": _sig_of(self.lam),
            "Y1": [S.to_text(p) for p in self.side1],
            "Y2": [S.to_text(p) for p in self.side2],
        }


def _components(sig):
    nf = K.normalize(sig)
    return list(nf.parts) if isinstance(nf, S.Wedge) else [nf]


def split_ok(lam, side1, side2, gens, finite_max) -> bool:
    probe = None if lam == LOOP else lam
    pool = [x for x in P.explicit_types(gens, probe) if x not in finite_max]
    ups = _above(lam, pool)
    if ups is None:
        return False
    t1 = [M.types(p) for p in side1]
    t2 = [M.types(p) for p in side2]
    for x in ups:
        on1 = [M.le_set(x, g) for g in t1]
        on2 = [M.le_set(x, g) for g in t2]
        if None in on1 or None in on2:
            return False
        if any(on1) and any(on2):
            return False
    return True


def flux_splitting_search(sig) -> Optional[Splitting]:
    if K.is_stable(sig).status != "Stable":
        return None
    comps = _components(sig)
    if len(comps) < 2:
        return None
    gens = M.types(sig)
    maxes = M.max_type_counts(sig)
    finite_max = {t for t, c in maxes if c != M.INF}
    pool = _candidates(gens)
    comp_types = [M.types(p) for p in comps]
    # maximal ends: (type, index of the component holding it)
    ends = []
    for t, c in maxes:
        if c == M.INF:
            continue
        for ci, ts in enumerate(comp_types):
            if t in ts:
                ends.append((t, ci))
    for (t1, c1), (t2, c2) in itertools.combinations(ends, 2):
        if c1 == c2:
            continue
        free = [k for k in range(len(comps)) if k not in (c1, c2)]
        for lam in pool:
            if lam in (t1, t2) or _le(lam, t1) is not True or _le(lam, t2) is not True:
                continue
            for mask in range(2 ** len(free)):
                s1 = [c1] + [k for b, k in enumerate(free) if mask >> b & 1]
                s2 = [c2] + [k for b, k in enumerate(free) if not mask >> b & 1]
                y1 = tuple(comps[k] for k in sorted(s1))
                y2 = tuple(comps[k] for k in sorted(s2))
                if split_ok(lam, y1, y2, gens, finite_max):
                    return Splitting(t1, t2, lam, y1, y2)
    return None


# -- unknown categories -----------------------------------------------------------------


def _shared_chain(maxes) -> bool:
    tops = [t for t, _ in maxes]
    for a, b in itertools.permutations(tops, 2):
        for r in P._ranges({a}):
            if r.bound.is_successor():
                continue
            samples = [M.mk_point(r.acc, r.marked, r.bound.fundamental(k)) for k in (2, 3, 4)]
            if all(M.leq(s, b) is True for s in samples):
                return True
    return False


def unknown_category(sig, stability=None) -> int:
    st = stability or K.is_stable(sig)
    if st.status != "Stable":
        return 3
    return 2 if _shared_chain(M.max_type_counts(sig)) else 1


# -- the rule chain ------------------------------------------------------------------------


def classify_maps(sig) -> Verdict:
    trace = []

    def done(answer, theorem, witness=None, category=None):
        trace.append(f"decided by {theorem}")
        return Verdict(answer, theorem, witness, category, tuple(trace))

    text = S.to_text(sig)
    g = M.genus_class(sig)
    if not M.has_ends(sig):
        trace.append("finite graph")
        if g.kind == "Zero":
            return done("Yes", "FiniteTree", {"graph": text})
        return done("No", "FiniteGenus", {"genus": g.to_json()})
    if g.kind == "Finite":
        return done("No", "FiniteGenus", {"genus": g.to_json()})
    st = K.is_stable(sig)
    trace.append(f"stability {st.status}")
    if st.status != "Stable":
        return done("Unknown", "UnknownCategory3", st.witness, 3)
    maxes = M.max_type_counts(sig)
    for t, c in maxes:
        if c != M.INF and 2 <= c:
            return done("No", "FiniteEndType", {"type": _sig_of(t), "count": int(c)})
    ss = K.is_self_similar(sig)
    if ss.answer == "Yes":
        trace.append("self-similar")
        nf = K.normalize(sig)
        if nf == S.C:
            return done("Yes", "CantorTree", {"normalForm": S.to_text(nf)})
        (t, c), = maxes
        if c == 1:
            return done("Yes", "UniqueMaxEnd", {"maxEnd": _sig_of(t)})
        babel = babel_check(sig)
        if babel:
            return done("No", babel, {"maxTypes": [_sig_of(t)]})
        return done("No", "SelfSimilarNo", {"maxTypes": [_sig_of(t)]})
    if g.kind == "Zero":
        comps = _components(sig)
        if S.C in comps:
            rest = list(comps)
            rest.remove(S.C)
            y = S.wedge(rest) if rest else None
            if y is not None and M.has_ends(y) and M.is_countable(y):
                trace.append(f"Cantor factor split off, recursing on {S.to_text(y)}")
                inner = classify_maps(y)
                trace.extend(inner.trace)
                return done(inner.answer, "TreeCantorFactor",
                            {"recursionTarget": S.to_text(y), "inner": inner.theorem}, inner.category)
    w = gcd_witness_search(sig)
    if w is not None:
        return done("No", "GcdFlux", w.to_json())
    babel = babel_check(sig)
    if babel:
        tops = [_sig_of(t) for t, _ in maxes]
        return done("No", babel, {"maxTypes": tops})
    sp = flux_splitting_search(sig)
    if sp is not None:
        return done("No", "GeneralFlux", sp.to_json())
    cat = unknown_category(sig, st)
    return done("Unknown", f"UnknownCategory{cat}", None, cat)


def strip_genus(sig):
    if isinstance(sig, S.Rose):
        return S.R0
    if isinstance(sig, (S.CantorTree, S.Ord)):
        return sig
    if isinstance(sig, S.Genus):
        return strip_genus(sig.inner)
    if isinstance(sig, S.Wedge):
        parts = [strip_genus(p) for p in sig.parts]
        kept = [p for p in parts if p != S.R0]
        return S.wedge(kept) if kept else S.R0
    return S.Conv(_strip_family(sig.family), strip_genus(sig.base))


def _strip_family(f):
    if isinstance(f, S.Const):
        return S.Const(strip_genus(f.y))
    if isinstance(f, S.Param):
        return S.Param(strip_genus(f.template))
    if isinstance(f, S.Accum):
        return S.Accum(_strip_family(f.gen))
    if isinstance(f, S.Stride):
        return S.Stride(f.k, f.r, _strip_family(f.inner))
    if isinstance(f, S.WedgeFam):
        return S.wedge_fam(_strip_family(f.a), _strip_family(f.b))
    return S.Prefix(tuple(strip_genus(h) for h in f.head), _strip_family(f.tail))


_SURVIVING = ("FiniteEndType", "Babel1")


def classify_homeo(sig) -> Verdict:
    g = M.genus_class(sig)
    cp = M.char_pair(sig) if M.has_ends(sig) else None
    if g.kind != "Infinite" or (cp is not None and cp.genus_support == "All"):
        # the marked set is empty or everything: only the end space matters
        inner = classify_maps(strip_genus(sig))
        return Verdict(inner.answer, inner.theorem, {"spanningTree": S.to_text(strip_genus(sig)),
                                                     "inner": inner.witness},
                       inner.category, ("strip genus",) + inner.trace)
    maps = classify_maps(sig)
    if maps.answer == "Yes":
        return Verdict("Yes", maps.theorem, maps.witness, None, ("pushforward",) + maps.trace)
    surviving = maps.theorem in _SURVIVING or (
        maps.theorem == "GcdFlux" and maps.witness and maps.witness.get("lambda") != "R1")
    if maps.answer == "No" and surviving:
        return Verdict("No", maps.theorem, maps.witness, None, ("pushforward",) + maps.trace)
    cat = maps.category or unknown_category(sig)
    return Verdict("Unknown", f"UnknownCategory{cat}", None, cat, ("pushforward",) + maps.trace)
