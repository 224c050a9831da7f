"""Random signature generators shared by the test modules."""
from __future__ import annotations

import random

from endcalc import ordinal as O
from endcalc import semantics as M
from endcalc import signature as S
from endcalc.ordinal import Ordinal

SMALL_ORDS = [O.parse_ordinal(t) for t in ("0", "1", "2", "3", "w", "w+1", "w*2", "w^2", "w^2+w", "w^w")]
PARAM_EXPRS = ["n", "n+1", "w*n", "w^n", "w+n", "w^2*n"]


def rand_ord(rng) -> S.Ord:
    return S.Ord(rng.choice(SMALL_ORDS))


def rand_template(rng, depth):
    e = O.parse_expr(rng.choice(PARAM_EXPRS))[0]
    t = S.Ord(e)
    r = rng.random()
    if depth > 1 and r < 0.3:
        return S.Conv(S.Const(rand_countable(rng, depth - 2, allow_genus=False)), t)
    if r < 0.5:
        return S.wedge([t, rand_ord(rng)])
    return t


def rand_family(rng, depth, allow_genus=True):
    r = rng.random()
    if r < 0.4:
        return S.Const(rand_countable(rng, depth - 1, allow_genus))
    if r < 0.65:
        return S.Param(rand_template(rng, depth))
    if r < 0.8:
        return S.Accum(rand_family(rng, depth - 1, allow_genus))
    if r < 0.9:
        return S.Stride(rng.randint(1, 2), rng.randint(0, 2), rand_family(rng, depth - 1, allow_genus))
    return S.Prefix((rand_countable(rng, depth - 1, allow_genus),), rand_family(rng, depth - 1, allow_genus))


def rand_countable(rng, depth=4, allow_genus=True):
    """A countable signature with at least one end, nesting depth at most ``depth``."""
    if depth <= 1:
        return rand_ord(rng)
    r = rng.random()
    if r < 0.25:
        return rand_ord(rng)
    if r < 0.35 and allow_genus:
        return S.Genus(rand_countable(rng, depth - 1, allow_genus))
    if r < 0.55:
        parts = [rand_countable(rng, depth - 1, allow_genus) for _ in range(rng.randint(2, 3))]
        if allow_genus and rng.random() < 0.2:
            parts.append(S.Rose(rng.randint(1, 2)))
        return S.wedge(parts)
    base = rand_countable(rng, depth - 1, allow_genus)
    return S.Conv(rand_family(rng, depth - 1, allow_genus), base)


def countable_corpus(n, seed=0, depth=4):
    rng = random.Random(seed)
    seen, out = set(), []
    while len(out) < n:
        s = rand_countable(rng, depth)
        if s in seen or S.depth(s) > depth:
            continue
        seen.add(s)
        out.append(s)
    return out


def rand_any(rng, depth=3):
    """Countable or not: the Cantor tree and its genus version may appear as leaves."""
    if depth <= 1:
        return rng.choice([rand_ord(rng), S.C, S.ONE, S.Genus(S.ONE), S.Genus(S.C)])
    r = rng.random()
    if r < 0.3:
        return rand_any(rng, 1)
    if r < 0.45:
        return S.Genus(rand_any(rng, depth - 1))
    if r < 0.7:
        return S.wedge([rand_any(rng, depth - 1) for _ in range(2)])
    fam = rng.choice([S.Const(rand_any(rng, depth - 1)), S.Param(rand_template(rng, 1))])
    return S.Conv(fam, rand_any(rng, depth - 1))


def stable_pool(n, seed=0, depth=3, self_similar=False):
    """Distinct signatures certified stable (and self-similar when asked)."""
    from endcalc import canonical as K

    rng = random.Random(seed)
    seen, out = set(), []
    for _ in range(50 * n):
        if len(out) == n:
            break
        s = K.normalize(rand_any(rng, depth))
        if s in seen or not M.has_ends(s):
            continue
        seen.add(s)
        if self_similar:
            if K.is_self_similar(s).answer == "Yes":
                out.append(s)
        elif K.is_stable(s).status == "Stable":
            out.append(s)
    return out
