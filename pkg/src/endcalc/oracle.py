"""Brute-force cross-checks that share no arithmetic with the main engine.

Ordinals here are plain nested tuples ``((exp, coef), ...)`` with their own
comparison and addition.  The end space of a countable signature is computed
as an ordinal interval ``[1, xi]`` by direct structural recursion: wedges
are ordinal sums, convergence onto a ray is an omega-indexed sum (plus the
limit point).  Convergence onto larger bases shifts every base rank by the
rank of that limit point; a level-by-level expansion is kept for checking.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

from . import signature as S
from .ordinal import Ordinal

Z = ()  # zero


class OracleError(ValueError):
    pass


def _nat(k):
    return ((Z, k),) if k else Z


def ocmp(a, b) -> int:
    for (ea, ca), (eb, cb) in zip(a, b):
        c = ocmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return 1 if ca > cb else -1
    return (len(a) > len(b)) - (len(a) < len(b))


def oadd(a, b):
    if not b:
        return a
    e0, c0 = b[0]
    out = []
    for e, c in a:
        d = ocmp(e, e0)
        if d > 0:
            out.append((e, c))
            continue
        if d == 0:
            return tuple(out) + ((e, c + c0),) + b[1:]
        break
    return tuple(out) + b


def olsub(g, b):
    """The delta with g + delta = b (requires g <= b)."""
    if ocmp(g, b) > 0:
        raise OracleError("left subtraction out of range")
    i = 0
    while i < len(g) and i < len(b) and g[i] == b[i]:
        i += 1
    if i == len(g):
        return b[i:]
    eg, cg = g[i]
    eb, cb = b[i]
    if eg == eb:  # cg < cb
        return ((eb, cb - cg),) + b[i + 1 :]
    return b[i:]


def from_ordinal(o: Ordinal):
    return tuple((from_ordinal(e), c) for e, c in o.terms)


def to_ordinal(t) -> Ordinal:
    return Ordinal(tuple((to_ordinal(e), c) for e, c in t))


def _is_finite(t):
    return all(e == Z for e, _ in t)


def _pred(t):
    e, c = t[-1]
    return t[:-1] + (((e, c - 1),) if c > 1 else ())


def _fund(t, k):
    """Some increasing cofinal sequence for a limit tuple-ordinal."""
    e, c = t[-1]
    head = t[:-1] + (((e, c - 1),) if c > 1 else ())
    if e[-1][0] == Z:  # successor exponent
        return oadd(head, ((_pred(e), k),) if k else Z)
    return oadd(head, ((_fund(e, k), 1),))


# -- CB derivatives ---------------------------------------------------------


def cb_derivative(xi):
    """Derived set of the space [1, xi]: left division by omega."""
    out = []
    for e, c in xi:
        if e == Z:
            continue
        if _is_finite(e):
            out.append((_nat(e[0][1] - 1), c))
        else:
            out.append((e, c))
    return tuple(out)


def _derive_power(xi, p):
    """Derivative of order omega^p for an infinite exponent p (jump step)."""
    g = ((p, 1),)
    out = []
    for e, c in xi:
        if ocmp(e, g) >= 0:
            out.append((olsub(g, e), c))
    return tuple(out)


def cb_rank_of_space(xi):
    """(alpha, n): the space [1, xi] has CB rank alpha with n top points."""
    if not xi:
        raise OracleError("empty space")
    rank = Z
    while not _is_finite(xi):
        lead = xi[0][0]
        if _is_finite(lead):
            xi = cb_derivative(xi)
            rank = oadd(rank, _nat(1))
        else:
            p = lead[0][0]
            xi = _derive_power(xi, p)
            rank = oadd(rank, ((p, 1),))
    return rank, xi[0][1]


# -- end space ordinal -------------------------------------------------------
# Families are wrapped in small hashable objects so that shifted and nested
# families can be memoized.  Members are either signatures or the tuples
# ("w", parts) and ("c", family, base) built here.

_SAMPLES = (6, 9, 12)


@dataclass(frozen=True)
class SigFam:
    f: object

    def member(self, k):
        return S.family_member(self.f, k)


@dataclass(frozen=True)
class Shift:
    f: object
    d: int

    def member(self, k):
        return self.f.member(k + self.d)


@dataclass(frozen=True)
class DropRoot:
    f: object

    def member(self, k):
        return S.R0 if k == 0 else self.f.member(k)


@dataclass(frozen=True)
class Nest:
    """Family seen by the inner base when the base is itself a convergence."""

    outer: object
    inner: object

    def member(self, k):
        return ("w", (self.outer.member(k), ("c", DropRoot(shift(self.outer, k)), self.inner.member(k))))


@dataclass(frozen=True)
class Tower:
    """Family seen along the spine of a w^beta+1 base, beta > 0."""

    outer: object
    beta: tuple

    def member(self, k):
        sub = _pred(self.beta) if self.beta[-1][0] == Z else _fund(self.beta, k)
        branch = ("c", DropRoot(shift(self.outer, k)), S.Ord(to_ordinal(sub)))
        return ("w", (self.outer.member(k), branch))


def shift(f, d):
    if d == 0:
        return f
    if isinstance(f, SigFam) and isinstance(f.f, S.Const):
        return f
    if isinstance(f, Shift):
        return shift(f.f, f.d + d)
    if isinstance(f, DropRoot):
        return shift(f.f, d)
    return Shift(f, d)


@lru_cache(maxsize=None)
def _xi(node):
    if isinstance(node, tuple):
        if node[0] == "w":
            out = Z
            for p in node[1]:
                out = oadd(out, _xi(p))
            return out
        return _conv(node[1], node[2])
    if isinstance(node, S.Rose):
        return Z
    if isinstance(node, S.CantorTree):
        raise OracleError("uncountable end space")
    if isinstance(node, S.Ord):
        if not isinstance(node.alpha, Ordinal):
            raise OracleError("open ordinal template")
        return ((from_ordinal(node.alpha), 1),)
    if isinstance(node, S.Genus):
        return _xi(node.inner)
    if isinstance(node, S.Wedge):
        return _xi(("w", node.parts))
    return _conv(SigFam(node.family), node.base)


@lru_cache(maxsize=None)
def _conv(fam, base):
    if isinstance(base, S.Rose):
        return _xi(fam.member(0))
    if isinstance(base, S.Genus):
        return _conv(fam, base.inner)
    if isinstance(base, S.CantorTree):
        raise OracleError("uncountable end space")
    if isinstance(base, S.Wedge):
        out = _xi(fam.member(0))
        for p in base.parts:
            out = oadd(out, _conv(DropRoot(fam), p))
        return out
    if isinstance(base, S.Conv) or from_ordinal(base.alpha) != Z:
        if not _EXPAND[0]:
            ground = _xi(base)
            if ground != Z:
                return _conv_rank_shift(fam, base, ground)
        if isinstance(base, S.Conv):
            return _conv(Nest(fam, SigFam(base.family)), base.base)
    beta = from_ordinal(base.alpha)
    along = fam if beta == Z else Tower(fam, beta)
    return _ray_sum(along)


_EXPAND = [False]


def _head(f) -> int:
    """Indices below which members of a wrapped family may be irregular."""
    if isinstance(f, SigFam):
        return S.head_length(f.f)
    if isinstance(f, Shift):
        return max(0, _head(f.f) - f.d)
    if isinstance(f, DropRoot):
        return max(1, _head(f.f))
    if isinstance(f, Nest):
        return max(_head(f.outer), _head(f.inner))
    return _head(f.outer)


def _tower_count(beta, d) -> int:
    """Vertices at depth d of the tree w^beta+1 grown along a spine."""
    if d == 0 or beta == Z:
        return 1
    total = 1
    for k in range(d):
        sub = _pred(beta) if beta[-1][0] == Z else _fund(beta, k)
        total += _tower_count(sub, d - k)
    return total


@lru_cache(maxsize=None)
def _vertices(node, d) -> int:
    if isinstance(node, S.Rose):
        return int(d == 0)
    if isinstance(node, S.Genus):
        return _vertices(node.inner, d)
    if isinstance(node, S.Wedge):
        return 1 if d == 0 else sum(_vertices(p, d) for p in node.parts)
    if isinstance(node, S.Ord):
        return _tower_count(from_ordinal(node.alpha), d)
    if isinstance(node, S.CantorTree):
        return 2**d
    total = _vertices(node.base, d)
    for j in range(d):
        below = _vertices(node.base, j)
        if below:
            total += below * _vertices(S.family_member(node.family, j), d - j)
    return total


def _conv_rank_shift(fam, base, ground):
    """Convergence onto a base with ends, by rank arithmetic.

    Every end of the base is approached by the whole tail of the family, so
    an end of rank r becomes an end of rank tau + r, where tau is the rank of
    a ray fed by that tail.  Members before the tail sit at finitely many
    vertices and are counted directly.
    """
    h = _head(fam)
    tau, _ = cb_rank_of_space(_ray_sum(shift(fam, h)))
    beta, count = cb_rank_of_space(ground)
    best = oadd(tau, beta)
    for d in range(h):
        xi = _xi(fam.member(d))
        if xi == Z:
            continue
        a, n = cb_rank_of_space(xi)
        c = ocmp(a, best)
        if c > 0:
            best, count = a, n * _vertices(base, d)
        elif c == 0:
            count += n * _vertices(base, d)
    return ((best, count),)


def expanded_end_space_ordinal(sig) -> Ordinal:
    """Same value as end_space_ordinal, expanding every base level by level.

    Exponentially slower; kept to check the rank arithmetic on small inputs.
    """
    _xi.cache_clear()
    _conv.cache_clear()
    _EXPAND[0] = True
    try:
        return end_space_ordinal(sig)
    finally:
        _EXPAND[0] = False
        _xi.cache_clear()
        _conv.cache_clear()


def _ray_sum(fam):
    partial = []
    total = Z
    k = 0
    for stop in _SAMPLES:
        while k < stop:
            total = oadd(total, _xi(fam.member(k)))
            k += 1
        partial.append(total)
    if partial[0] == partial[-1]:
        return oadd(total, _nat(1))  # the spine's own end is isolated
    return _sup(partial)


def _sup(seq):
    """Supremum of a growing sampled sequence of tuple-ordinals."""
    i = 0
    while all(len(s) > i for s in seq) and len({s[i] for s in seq}) == 1:
        i += 1
    prefix = seq[-1][:i]
    nxt = [s[i] for s in seq if len(s) > i]
    last = nxt[-1]
    if len(nxt) < 2 or nxt[-2][0] == last[0]:
        return oadd(prefix, ((oadd(last[0], _nat(1)), 1),))
    return oadd(prefix, ((_sup([t[0] for t in nxt]), 1),))


def end_space_ordinal(sig) -> Ordinal:
    """Ordinal xi with the end space homeomorphic to the interval [1, xi]."""
    t = _xi(sig)
    if t == Z:
        raise OracleError("empty end space")
    return to_ordinal(t)


def ms_via_oracle(sig):
    alpha, n = cb_rank_of_space(from_ordinal(end_space_ordinal(sig)))
    return to_ordinal(alpha), n


# -- rank and embedding checks ----------------------------------------------


def type_rank_check(sig, z) -> bool:
    """Does the countable end space of sig contain a point of z's rank?"""
    if not isinstance(z, S.Ord) or not isinstance(z.alpha, Ordinal):
        raise OracleError("rank check needs an ordinal tree structure")
    try:
        xi = from_ordinal(end_space_ordinal(sig))
    except OracleError:
        return False
    alpha, _ = cb_rank_of_space(xi)
    return ocmp(from_ordinal(z.alpha), alpha) <= 0


def depth_cap() -> int:
    try:
        return int(os.environ.get("ENDSPACE_DEPTH_CAP", "6"))
    except ValueError:
        return 6


def _has_cantor(sig) -> bool:
    return any(isinstance(t, S.CantorTree) for t in S.subterms(sig))


def small_embed_check(a, b, depth: int = 6) -> str:
    """'Yes', 'No' or 'Inconclusive': is the end space of a a clopen piece of b's?"""
    cap = min(depth, depth_cap())
    if S.depth(a) > cap or S.depth(b) > cap:
        return "Inconclusive"
    ua, ub = _has_cantor(a), _has_cantor(b)
    if ua and not ub:
        return "No"
    if ua or ub:
        return "Yes" if a == b else "Inconclusive"
    try:
        xa = from_ordinal(end_space_ordinal(a))
    except OracleError:
        return "Yes"
    try:
        xb = from_ordinal(end_space_ordinal(b))
    except OracleError:
        return "No"
    ra, na = cb_rank_of_space(xa)
    rb, nb = cb_rank_of_space(xb)
    c = ocmp(ra, rb)
    return "Yes" if c < 0 or (c == 0 and na <= nb) else "No"
