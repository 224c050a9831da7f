"""Normal forms, stability, wedge decomposition and isomorphism tests.

Rewriting is bottom-up to a fixpoint.  Every step must strictly decrease
the pair (weight, wedge inversions), where the weight interprets leaves as
2, ``o(X)`` as ``2*w(X)``, a wedge as the sum of its parts plus one and a
convergence as ``w(family) * w(base)**2``.  A rewrite that fails to
decrease the measure is skipped, which makes termination unconditional.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import ordinal as O
from . import semantics as M
from . import signature as S
from .ordinal import Ordinal


@dataclass(frozen=True)
class Verdict:
    answer: str  # "Yes", "No" or "Unknown"
    tag: str = ""
    witness: object = None

    def __bool__(self):
        return self.answer == "Yes"

    def to_json(self):
        out = {"answer": self.answer}
        if self.tag:
            out["tag"] = self.tag
        if self.witness is not None:
            out["witness"] = self.witness
        return out


YES, NO, UNKNOWN = "Yes", "No", "Unknown"


def from3(v: Optional[bool], tag="", witness=None) -> Verdict:
    return Verdict(YES if v is True else NO if v is False else UNKNOWN, tag, witness)


# -- term order and measure -----------------------------------------------------

_TAG = {S.Rose: 0, S.Ord: 1, S.CantorTree: 2, S.Genus: 3, S.Conv: 4, S.Wedge: 5}


class _Key:
    """Total structural order on signatures."""

    __slots__ = ("t",)

    def __init__(self, sig):
        self.t = sig

    def __lt__(self, other):
        return term_cmp(self.t, other.t) < 0


def term_cmp(a, b) -> int:
    ta, tb = _TAG[type(a)], _TAG[type(b)]
    if ta != tb:
        return -1 if ta < tb else 1
    if isinstance(a, S.Rose):
        return (a.k > b.k) - (a.k < b.k)
    if isinstance(a, S.Ord):
        ca, cb = isinstance(a.alpha, Ordinal), isinstance(b.alpha, Ordinal)
        if ca and cb:
            return O.cmp(a.alpha, b.alpha)
        if ca != cb:
            return -1 if ca else 1
        xa, xb = O.expr_str(a.alpha), O.expr_str(b.alpha)
        return (xa > xb) - (xa < xb)
    if isinstance(a, S.CantorTree):
        return 0
    if isinstance(a, S.Genus):
        return term_cmp(a.inner, b.inner)
    if isinstance(a, S.Conv):
        c = term_cmp(a.base, b.base)
        if c:
            return c
        fa, fb = S.family_text(a.family), S.family_text(b.family)
        return (fa > fb) - (fa < fb)
    for x, y in zip(a.parts, b.parts):
        c = term_cmp(x, y)
        if c:
            return c
    return (len(a.parts) > len(b.parts)) - (len(a.parts) < len(b.parts))


def weight(sig) -> int:
    if isinstance(sig, (S.Rose, S.CantorTree, S.Ord)):
        return 2
    if isinstance(sig, S.Genus):
        return 2 * weight(sig.inner)
    if isinstance(sig, S.Wedge):
        return sum(weight(p) for p in sig.parts) + 1
    return family_weight(sig.family) * weight(sig.base) ** 2


def family_weight(f) -> int:
    if isinstance(f, S.Const):
        return weight(f.y)
    if isinstance(f, S.Param):
        return weight(f.template)
    if isinstance(f, S.Accum):
        return family_weight(f.gen) + 1
    if isinstance(f, S.Stride):
        return family_weight(f.inner) + 1
    if isinstance(f, S.WedgeFam):
        return family_weight(f.a) + family_weight(f.b) + 1
    return sum(weight(h) for h in f.head) + family_weight(f.tail) + 1


def inversions(sig) -> int:
    n = 0
    for t in S.subterms(sig):
        if isinstance(t, S.Wedge):
            ps = t.parts
            for i in range(len(ps)):
                for j in range(i + 1, len(ps)):
                    if term_cmp(ps[i], ps[j]) > 0:
                        n += 1
    return n


def measure(sig):
    return weight(sig), inversions(sig)


# -- rewriting ---------------------------------------------------------------------


def _closed(sig) -> bool:
    """No free family index (indices bound by an enclosing family do not count)."""
    return not S.free_in(sig)


RULES = ("r1", "r2", "r3", "r4", "r5", "r6", "r7", "r8", "r9")


class _Rewriter:
    def __init__(self, trace=None, semantic=True, order=None):
        self.trace = trace
        self.semantic = semantic
        self.order = order or RULES

    def log(self, rule, before, after):
        if self.trace is not None:
            self.trace.append({"rule": rule, "from": S.to_text(before), "to": S.to_text(after)})

    def norm(self, sig):
        sig = self.children(sig)
        for _ in range(1000):
            step = self.step(sig)
            if step is None:
                return sig
            rule, new = step
            if measure(new) >= measure(sig):
                return sig
            self.log(rule, sig, new)
            sig = self.children(new)
        return sig

    def children(self, sig):
        if isinstance(sig, S.Genus):
            return S.Genus(self.norm(sig.inner))
        if isinstance(sig, S.Wedge):
            return S.wedge([self.norm(p) for p in sig.parts])
        if isinstance(sig, S.Conv):
            return S.Conv(self.family(sig.family), self.norm(sig.base))
        return sig

    def family(self, f):
        if isinstance(f, S.Const):
            return S.Const(self.norm(f.y))
        if isinstance(f, S.Param):
            return S.Param(_Rewriter(self.trace, semantic=False, order=self.order).norm(f.template))
        if isinstance(f, S.Accum):
            return S.Accum(self.family(f.gen))
        if isinstance(f, S.Stride):
            return S.Stride(f.k, f.r, self.family(f.inner))
        if isinstance(f, S.WedgeFam):
            return S.wedge_fam(self.family(f.a), self.family(f.b))
        return S.Prefix(tuple(self.norm(h) for h in f.head), self.family(f.tail))

    def step(self, sig):
        for name in self.order:
            rule = getattr(self, name)
            out = rule(sig)
            if out is not None and out != sig:
                return rule.__name__.upper(), out
        return None

    # R1: wedge flattening, Rose merging and sorting
    def r1(self, sig):
        if not isinstance(sig, S.Wedge):
            return None
        parts = list(S.wedge(sig.parts).parts) if isinstance(S.wedge(sig.parts), S.Wedge) else [S.wedge(sig.parts)]
        roses = [p for p in parts if isinstance(p, S.Rose)]
        rest = [p for p in parts if not isinstance(p, S.Rose)]
        k = sum(r.k for r in roses)
        if k or not rest:
            rest.append(S.Rose(k))
        rest.sort(key=_Key)
        return S.wedge(rest)

    # R2: genus distribution
    def r2(self, sig):
        if not isinstance(sig, S.Genus):
            return None
        inner = sig.inner
        if isinstance(inner, S.Rose):
            return S.Rose(inner.k + 1)
        if not _ends(inner):
            return None
        if isinstance(inner, S.Genus):
            return inner
        if isinstance(inner, S.Wedge):
            return S.wedge([S.Genus(p) for p in inner.parts])
        return None

    # R3: a loop attached everywhere is the genus operator
    def r3(self, sig):
        if isinstance(sig, S.Conv) and sig.family == S.Const(S.Rose(1)):
            return S.Genus(sig.base)
        return None

    # R4: splitting a convergence over a wedge base
    def r4(self, sig):
        if not isinstance(sig, S.Conv) or not isinstance(sig.base, S.Wedge):
            return None
        roses = [p for p in sig.base.parts if isinstance(p, S.Rose)]
        rest = [p for p in sig.base.parts if not isinstance(p, S.Rose)]
        if roses and rest:
            return S.wedge(roses + [S.Conv(sig.family, S.wedge(rest))])
        if len(rest) >= 2 and _split_safe(sig.family) and all(_ends(p) for p in rest):
            return S.wedge([S.Conv(sig.family, p) for p in rest])
        return None

    # R5: countable trees become ordinal trees
    def r5(self, sig):
        if isinstance(sig, S.Conv) and isinstance(sig.family, S.Const) and sig.base == S.ONE:
            y = sig.family.y
            if isinstance(y, S.Ord) and O.has_var(y.alpha):
                return S.Ord(O.expr_add(y.alpha, O.ONE))
        if not self.semantic or not _closed(sig) or isinstance(sig, (S.Ord, S.Rose)):
            return None
        if isinstance(sig, S.Wedge) and all(isinstance(p, (S.Ord, S.Rose)) for p in sig.parts):
            ords = [p.alpha for p in sig.parts if isinstance(p, S.Ord)]
            if len(set(ords)) <= 1:
                return None
        if not _ends(sig) or M.genus_value(sig) != 0 or not M.is_countable(sig):
            return None
        alpha, n = M.ms_form(sig)
        return S.wedge([S.Ord(alpha)] * n)

    # R6: perfect spaces become Cantor trees
    def r6(self, sig):
        if not self.semantic or not _closed(sig) or sig in (S.C, S.Genus(S.C)):
            return None
        if not _ends(sig):
            return None
        cp = M.char_pair(sig)
        if not cp.perfect or cp.countable:
            return None
        if cp.genus.kind == "Zero":
            return S.C
        if cp.genus_support == "All":
            return S.Genus(S.C)
        return None

    # R7: a Cantor-type structure absorbs the ray it converges to
    def r7(self, sig):
        if not self.semantic or not isinstance(sig, S.Conv) or not isinstance(sig.family, S.Const):
            return None
        if sig.base not in (S.ONE, S.Genus(S.ONE)) or not _closed(sig):
            return None
        z = sig.family.y
        tz = M.types(z)
        if len(tz) != 1 or not isinstance(next(iter(tz)), M.CantorType):
            return None
        if M.types(sig) == tz and M.genus_class(sig) == M.genus_class(z):
            return z
        return None

    # R8: W v W = W for a Cantor-type W
    def r8(self, sig):
        if not self.semantic or not isinstance(sig, S.Wedge):
            return None
        seen = []
        for p in sig.parts:
            if p in seen and _closed(p) and _cantor_only(p) and M.genus_class(p).kind != "Finite":
                continue
            seen.append(p)
        if len(seen) == len(sig.parts):
            return None
        return S.wedge(seen)

    # R9: drop a part whose maximal types sit strictly inside another part
    def r9(self, sig):
        if not self.semantic or not isinstance(sig, S.Wedge):
            return None
        parts = list(sig.parts)
        for i, w in enumerate(parts):
            if not _closed(w) or not _ends(w) or M.genus_class(w).kind == "Finite":
                continue
            others = [p for j, p in enumerate(parts) if j != i and _closed(p)]
            inner = set()
            for p in others:
                for g in M.types(p):
                    if M.is_type(g):
                        inner |= M.below(g)
            if all(M.le_set(t, inner) is True for t in M.types(w) if M.is_type(t)) and all(
                M.is_type(t) for t in M.types(w)
            ):
                return S.wedge(parts[:i] + parts[i + 1 :])
        return None


def _ends(sig) -> bool:
    if not _closed(sig):
        sig = S.substitute(sig, 1)
    return M.has_ends(sig)


def _cantor_only(sig) -> bool:
    ts = M.types(sig)
    return len(ts) == 1 and isinstance(next(iter(ts)), M.CantorType)


def _split_safe(f) -> bool:
    """Duplicating the root member leaves the graph unchanged."""
    if S.head_length(f) != 0:
        return False
    if isinstance(f, S.Const):
        return True
    if isinstance(f, S.Param):
        return M.distributive(f.template)
    if isinstance(f, S.Accum):
        return True
    if isinstance(f, S.Stride):
        return _split_safe(f.inner)
    if isinstance(f, S.WedgeFam):
        return _split_safe(f.a) and _split_safe(f.b)
    return False


def normalize(sig, trace=None, order=None):
    """Rewrite to the fixed point; ``order`` permutes the rule priority."""
    return _Rewriter(trace, order=order).norm(sig)


def cumulativize(sig):
    """Rewrite monotone parametric families into cumulative ones (same graph)."""
    if isinstance(sig, S.Genus):
        return S.Genus(cumulativize(sig.inner))
    if isinstance(sig, S.Wedge):
        return S.Wedge(tuple(cumulativize(p) for p in sig.parts))
    if isinstance(sig, S.Conv):
        f = sig.family
        if isinstance(f, S.Param) and M.distributive(f.template):
            f = S.Accum(f)
        return S.Conv(f, cumulativize(sig.base))
    return sig


# -- stability ----------------------------------------------------------------------


@dataclass(frozen=True)
class Stability:
    status: str  # "Stable", "Unstable" or "Unknown"
    ordered: object = None
    witness: object = None

    def to_json(self):
        out = {"status": self.status}
        if self.ordered is not None:
            out["ordered"] = S.to_text(self.ordered)
        if self.witness is not None:
            out["witness"] = self.witness
        return out


_SAMPLE = 6


def is_stable(sig) -> Stability:
    nf = normalize(sig)
    status, witness = _stable(nf)
    if status == "Stable":
        return Stability(status, cumulativize(nf))
    return Stability(status, None, witness)


def _merge(results):
    unknown = None
    for status, w in results:
        if status == "Unstable":
            return status, w
        if status == "Unknown" and unknown is None:
            unknown = (status, w)
    return unknown or ("Stable", None)


def _stable(sig):
    if isinstance(sig, (S.Rose, S.CantorTree, S.Ord)):
        return "Stable", None
    if isinstance(sig, S.Genus):
        return _stable(sig.inner)
    if isinstance(sig, S.Wedge):
        return _merge(_stable(p) for p in sig.parts)
    fam, base = sig.family, sig.base
    results = [_stable(base)]
    h = S.head_length(fam)
    for k in range(h + 3):
        results.append(_stable(S.family_member(fam, k)))
    merged = _merge(results)
    if merged[0] == "Unstable":
        return merged
    schema = _family_schema(fam)
    if schema == "pass":
        return merged
    witness = _incomparable_members(fam)
    if witness is not None:
        witness["path"] = S.to_text(sig)
        return "Unstable", witness
    return _merge([merged, ("Unknown", {"path": S.to_text(sig), "reason": "family schema undecided"})])


def _family_schema(f) -> str:
    if isinstance(f, (S.Const, S.Accum)):
        return "pass"
    if isinstance(f, S.Param):
        if M.distributive(f.template):
            return "pass"
        return "pass" if _chain_check(f) else "fail"
    if isinstance(f, S.Stride):
        return _family_schema(f.inner)
    if isinstance(f, S.WedgeFam):
        a, b = _family_schema(f.a), _family_schema(f.b)
        if a == b == "pass":
            return "pass"
        return "pass" if _chain_check(f) else "fail"
    return _family_schema(f.tail)


def _chain_check(f) -> bool:
    """Sampled members each reappear (as types) in the next member."""
    h = S.head_length(f)
    for k in range(h, h + _SAMPLE):
        now = M.types(S.family_member(f, k))
        nxt = M.types(S.family_member(f, k + 1))
        for t in now:
            if not M.is_type(t) or M.le_set(t, nxt) is not True:
                return False
    return True


def _incomparable_members(f):
    """At least three members whose own maximal types are pairwise incomparable
    and occur in no other sampled member."""
    h = S.head_length(f)
    idx = list(range(h, h + _SAMPLE))
    members = {k: M.types(S.family_member(f, k)) for k in idx}
    picks = []
    for k in idx:
        others = [members[j] for j in idx if j != k]
        for t in M.sorted_types(members[k]):
            if not M.is_type(t):
                continue
            if all(M.le_set(t, o) is False for o in others):
                picks.append((k, t))
                break
    for i in range(len(picks)):
        for j in range(len(picks)):
            if i != j and M.leq(picks[i][1], picks[j][1]) is not False:
                return None
    if len(picks) < 3:
        return None
    return {
        "reason": "InfinitelyManyIncomparableMaxTypes",
        "members": [S.to_text(S.family_member(f, k)) for k, _ in picks],
        "indices": [k for k, _ in picks],
    }


# -- wedge decomposition and friends --------------------------------------------------


class NotDecomposable(ValueError):
    pass


@dataclass(frozen=True)
class Component:
    sig: object
    top: object  # the maximal end type of the component


def type_to_signature(t):
    """The canonical self-similar signature whose maximal ends have type t."""
    if isinstance(t, M.PointType):
        return _point_sig(t.acc, t.marked, t.rank)
    if isinstance(t, M.CantorType):
        core = S.Genus(S.C) if (t.marked and not M.any_marked(t.acc)) or (t.marked and not t.acc) else S.C
        if not t.acc:
            return core
        return S.Conv(_family_for(t.acc), core)
    raise NotDecomposable("not an explicit end type")


def _point_sig(acc, marked, rank):
    tree = S.Ord(rank)
    if not acc:
        return S.Genus(tree) if marked else tree
    base = S.Genus(tree) if marked and not M.any_marked(acc) else tree
    return S.Conv(_family_for(acc), base)


def _family_for(acc):
    pieces = []
    for g in M.sorted_types(acc):
        if M.is_type(g):
            pieces.append(S.Const(type_to_signature(g)))
        elif isinstance(g, M.Range):
            pieces.append(S.Param(_point_sig(g.acc, g.marked, _fund_expr(g.bound))))
        elif not g.ops:
            pieces.append(S.Accum(g.family))
        else:
            raise NotDecomposable("indexed types under pending operations")
    return S.wedge_fam(*pieces)


def _fund_expr(sigma: Ordinal):
    """A fundamental sequence for the limit sigma, as an expression in n."""
    exp, coef = sigma.terms[-1]
    head = Ordinal(sigma.terms[:-1] + (((exp, coef - 1),) if coef > 1 else ()))
    if exp.is_successor():
        tail = O.Mul(O.Pow(O.Lit(exp.pred())), O.Var()) if not exp.pred().is_zero() else O.Var()
    else:
        tail = O.Pow(_fund_expr(exp))
    if head.is_zero():
        return tail
    return O.Sum((O.Lit(head), tail))


def wedge_decomposition(sig, stability: Optional[Stability] = None):
    st = stability or is_stable(sig)
    if st.status != "Stable":
        raise NotDecomposable(f"stability is {st.status}")
    comps = []
    for t, c in M.max_type_counts(sig):
        z = Component(type_to_signature(t), t)
        copies = 1 if isinstance(t, M.CantorType) or c == M.INF else int(c)
        comps.extend([z] * copies)
    g = M.genus_class(sig)
    if g.kind == "Finite":
        comps.append(Component(S.Rose(g.k), None))
    return comps


def is_self_similar(sig) -> Verdict:
    st = is_stable(sig)
    if st.status != "Stable":
        return Verdict(UNKNOWN, "Stability" + st.status, st.witness)
    comps = wedge_decomposition(sig, st)
    texts = [S.to_text(c.sig) for c in comps]
    if M.genus_class(sig).kind == "Finite":
        return Verdict(NO, "FiniteGenus", texts)
    if len(comps) == 1:
        return Verdict(YES, "SingleComponent", texts)
    return Verdict(NO, "Decomposition", texts)


def max_shell(t) -> object:
    if isinstance(t, M.CantorType):
        return S.Genus(S.C) if t.marked else S.C
    return S.Genus(S.ONE) if t.marked else S.ONE


def isomorphic(a, b) -> Verdict:
    na, nb = normalize(a), normalize(b)
    if na == nb:
        return Verdict(YES, "NormalFormsEqual", S.to_text(na))
    ca, cb = M.char_pair(a), M.char_pair(b)
    for name in ("countable", "genus", "ms_form", "perfect", "genus_support",
                 "has_isolated_plain_end", "has_isolated_genus_end"):
        if getattr(ca, name) != getattr(cb, name):
            return Verdict(NO, "Invariant", name)
    sa, sb = is_stable(a), is_stable(b)
    if sa.status == sb.status == "Stable":
        ma = _census_key(a)
        mb = _census_key(b)
        if ma != mb:
            return Verdict(NO, "Invariant", "maximalEndTypes")
        return Verdict(YES, "SameDecomposition", [S.to_text(c.sig) for c in wedge_decomposition(a, sa)])
    return Verdict(UNKNOWN, "NoSeparatingInvariant")


def _census_key(sig):
    return frozenset((t, c) for t, c in M.max_type_counts(sig))
