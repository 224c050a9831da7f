"""Ordinals below epsilon_0 in Cantor normal form.

An :class:`Ordinal` is a tuple of ``(exponent, coefficient)`` terms with
strictly decreasing exponents.  Because the normal form is unique, the
dataclass equality is ordinal equality and ordinals can be hashed freely.

The module also carries a small expression language over one index
variable ``n`` (``w^n+1``, ``w^(w^n)*2`` ...) together with the symbolic
supremum used by convergence families.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterator, Optional, Union


class OrdinalSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset
        self.expected = tuple(expected)


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for exp, coef in self.terms:
            if not isinstance(exp, Ordinal) or not isinstance(coef, int) or coef < 1:
                raise ValueError("malformed Cantor normal form term")
            if prev is not None and cmp(exp, prev) >= 0:
                raise ValueError("exponents must strictly decrease")
            prev = exp

    # construction helpers
    @staticmethod
    def of(k: int) -> "Ordinal":
        if k < 0:
            raise ValueError("negative natural")
        return Ordinal(((ZERO, k),)) if k else ZERO

    @staticmethod
    def power(exp: "Ordinal", coef: int = 1) -> "Ordinal":
        return Ordinal(((exp, coef),)) if coef else ZERO

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return all(e.is_zero() for e, _ in self.terms)

    def to_int(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def leading(self):
        """(exponent, coefficient) of the leading term."""
        if not self.terms:
            raise ValueError("zero has no leading term")
        return self.terms[0]

    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero()

    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero()

    def succ(self) -> "Ordinal":
        return self + ONE

    def pred(self) -> "Ordinal":
        if not self.is_successor():
            raise ValueError(f"{self} is not a successor")
        exp, coef = self.terms[-1]
        head = self.terms[:-1]
        return Ordinal(head + (((exp, coef - 1),) if coef > 1 else ()))

    def __add__(self, other: "Ordinal") -> "Ordinal":
        return add(self, other)

    def mul_nat(self, k: int) -> "Ordinal":
        """self * k for a natural number k."""
        if k == 0 or not self.terms:
            return ZERO
        (exp, coef), rest = self.terms[0], self.terms[1:]
        return Ordinal(((exp, coef * k),) + rest)

    def fundamental(self, k: int) -> "Ordinal":
        """k-th element of the standard fundamental sequence of a limit ordinal."""
        if not self.is_limit():
            raise ValueError(f"{self} is not a limit")
        exp, coef = self.terms[-1]
        head = self.terms[:-1] + (((exp, coef - 1),) if coef > 1 else ())
        if exp.is_successor():
            tail = Ordinal.power(exp.pred(), k)
        else:
            tail = Ordinal.power(exp.fundamental(k))
        return Ordinal(head) + tail

    def __lt__(self, other: "Ordinal") -> bool:
        return cmp(self, other) < 0

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(_term_str(e, c) for e, c in self.terms)

    def __repr__(self) -> str:
        return f"Ordinal({self})"


def _exp_str(exp: Ordinal) -> str:
    if exp.is_finite() or exp == OMEGA:
        return str(exp)
    return f"({exp})"


def _term_str(exp: Ordinal, coef: int) -> str:
    if exp.is_zero():
        return str(coef)
    base = "w" if exp == ONE else f"w^{_exp_str(exp)}"
    return base if coef == 1 else f"{base}*{coef}"


ZERO = Ordinal()
ONE = Ordinal(((ZERO, 1),))
OMEGA = Ordinal(((ONE, 1),))


def cmp(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1 as a is below, equal to or above b."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = cmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    lead_exp, lead_coef = b.terms[0]
    kept = []
    for exp, coef in a.terms:
        c = cmp(exp, lead_exp)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            kept.append((exp, coef + lead_coef))
            return Ordinal(tuple(kept) + b.terms[1:])
        else:
            break
    return Ordinal(tuple(kept) + b.terms)


def ms_normal(xi: Ordinal):
    """Leading term (alpha, n): the space xi+1 is homeomorphic to w^alpha*n+1."""
    if xi.is_zero():
        raise ValueError("msNormal needs a positive ordinal")
    return xi.terms[0]


def omax(a: Ordinal, b: Ordinal) -> Ordinal:
    return a if cmp(a, b) >= 0 else b


# ---------------------------------------------------------------------------
# expressions in the index variable n


@dataclass(frozen=True)
class Lit:
    value: Ordinal


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Pow:
    exp: "Expr"


@dataclass(frozen=True)
class Mul:
    base: "Expr"
    coef: "Expr"  # a natural literal or the variable


@dataclass(frozen=True)
class Sum:
    parts: tuple


Expr = Union[Lit, Var, Pow, Mul, Sum]
OrdLike = Union[Ordinal, Expr]


def has_var(e) -> bool:
    if isinstance(e, (Ordinal, Lit)):
        return False
    if isinstance(e, Var):
        return True
    if isinstance(e, Pow):
        return has_var(e.exp)
    if isinstance(e, Mul):
        return has_var(e.base) or has_var(e.coef)
    return any(has_var(p) for p in e.parts)


def subst(e, k: int) -> Ordinal:
    """Value of the expression at n = k."""
    if isinstance(e, Ordinal):
        return e
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return Ordinal.of(k)
    if isinstance(e, Pow):
        return Ordinal.power(subst(e.exp, k))
    if isinstance(e, Mul):
        return subst(e.base, k).mul_nat(subst(e.coef, k).to_int())
    out = ZERO
    for p in e.parts:
        out = out + subst(p, k)
    return out


def replace_var(e, repl: "Expr"):
    """Substitute another expression for n."""
    if isinstance(e, (Ordinal, Lit)):
        return e
    if isinstance(e, Var):
        return repl
    if isinstance(e, Pow):
        return simplify(Pow(replace_var(e.exp, repl)))
    if isinstance(e, Mul):
        return simplify(Mul(replace_var(e.base, repl), replace_var(e.coef, repl)))
    return simplify(Sum(tuple(replace_var(p, repl) for p in e.parts)))


def simplify(e):
    """Fold closed expressions to plain ordinals."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Ordinal) or not has_var(e):
        return subst(e, 0)
    return e


def as_expr(e) -> "Expr":
    return Lit(e) if isinstance(e, Ordinal) else e


def monotone_check(e) -> bool:
    """Sound syntactic monotonicity test.

    Every constructor of the expression language is non-decreasing in each
    argument (ordinal sum, w^x and multiplication by a natural), so a term
    built only from them is monotone in n.
    """
    if isinstance(e, (Ordinal, Lit, Var)):
        return True
    if isinstance(e, Pow):
        return monotone_check(e.exp)
    if isinstance(e, Mul):
        return monotone_check(e.base) and isinstance(e.coef, (Lit, Var, Ordinal))
    if isinstance(e, Sum):
        return all(monotone_check(p) for p in e.parts)
    return False


def expr_str(e) -> str:
    if isinstance(e, Ordinal):
        return str(e)
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, Var):
        return "n"
    if isinstance(e, Pow):
        x = simplify(e.exp)
        if x == ONE:
            return "w"
        return "w^" + _atom_str(x)
    if isinstance(e, Mul):
        return f"{_mul_base_str(e.base)}*{expr_str(e.coef)}"
    return "+".join(_sum_part_str(p) for p in e.parts)


def _atom_str(x) -> str:
    if isinstance(x, Ordinal):
        return _exp_str(x)
    if isinstance(x, Var):
        return "n"
    return f"({expr_str(x)})"


def _mul_base_str(x) -> str:
    if isinstance(x, (Pow, Var)):
        return expr_str(x)
    if isinstance(x, Ordinal) and len(x.terms) == 1:
        return str(x)
    return f"({expr_str(x)})"


def _sum_part_str(x) -> str:
    return expr_str(x)


# -- eventual forms ---------------------------------------------------------
# For large n every expression has a Cantor normal form whose exponents are
# again eventual forms and whose coefficients are integer polynomials in n.
# Polynomials are tuples of coefficients, lowest degree first.


def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return _poly_trim(
        (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
    )


def _poly_mul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_cmp(a, b) -> int:
    if len(a) != len(b):
        return -1 if len(a) < len(b) else 1
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return -1 if x < y else 1
    return 0


def _ef_of_ordinal(o: Ordinal):
    return tuple((_ef_of_ordinal(e), (c,)) for e, c in o.terms)


def _ef_cmp(a, b) -> int:
    for (ea, ca), (eb, cb) in zip(a, b):
        c = _ef_cmp(ea, eb)
        if c:
            return c
        c = _poly_cmp(ca, cb)
        if c:
            return c
    return (len(a) > len(b)) - (len(a) < len(b))


def _ef_add(a, b):
    if not b:
        return a
    lead_exp, lead_coef = b[0]
    kept = []
    for exp, coef in a:
        c = _ef_cmp(exp, lead_exp)
        if c > 0:
            kept.append((exp, coef))
        elif c == 0:
            kept.append((exp, _poly_add(coef, lead_coef)))
            return tuple(kept) + b[1:]
        else:
            break
    return tuple(kept) + b


def _ef(e):
    if isinstance(e, Ordinal):
        return _ef_of_ordinal(e)
    if isinstance(e, Lit):
        return _ef_of_ordinal(e.value)
    if isinstance(e, Var):
        return (((), (0, 1)),)
    if isinstance(e, Pow):
        return ((_ef(e.exp), (1,)),)
    if isinstance(e, Mul):
        base = _ef(e.base)
        k = _ef(e.coef)
        if not base or not k:
            return ()
        if k[0][0]:
            raise ValueError("coefficient must be a natural number")
        (exp, coef), rest = base[0], base[1:]
        return ((exp, _poly_mul(coef, k[0][1])),) + rest
    out = ()
    for p in e.parts:
        out = _ef_add(out, _ef(p))
    return out


def _ef_is_const(ef) -> bool:
    return all(len(c) <= 1 and _ef_is_const(x) for x, c in ef)


def _ef_value(ef) -> Ordinal:
    return Ordinal(tuple((_ef_value(x), c[0]) for x, c in ef))


def _ef_sup(ef):
    prefix = ZERO
    for exp, coef in ef:
        if _ef_is_const(exp) and len(coef) <= 1:
            prefix = prefix + Ordinal.power(_ef_value(exp), coef[0])
            continue
        if _ef_is_const(exp):
            return prefix + Ordinal.power(_ef_value(exp).succ()), False
        sup_exp, _ = _ef_sup(exp)
        return prefix + Ordinal.power(sup_exp), False
    return prefix, True


def sup_over_index(e):
    """(sup over n of e(n), whether the sup is attained for infinitely many n)."""
    if not monotone_check(e):
        raise ValueError("expression not certified monotone")
    if not has_var(e):
        return subst(e, 0), True
    return _ef_sup(_ef(e))


def eventual_cmp(a, b) -> int:
    """Compare two expressions for all sufficiently large n."""
    return _ef_cmp(_ef(a), _ef(b))


def expr_add(a, b):
    if not has_var(a) and not has_var(b):
        return subst(a, 0) + subst(b, 0)
    return Sum((as_expr(a), as_expr(b)))


def expr_max(a, b):
    """The eventually larger of two expressions."""
    return a if eventual_cmp(a, b) >= 0 else b


# -- parsing ----------------------------------------------------------------


class _Reader:
    def __init__(self, text: str, pos: int = 0, allow_var: bool = True, var: str = "n"):
        self.text = text
        self.pos = pos
        self.allow_var = allow_var
        self.var = var

    def at_var(self) -> bool:
        if not self.allow_var or not self.text.startswith(self.var, self.pos):
            return False
        after = self.peek(len(self.var))
        return not (after.isalnum() or after == "_")

    def peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.text[i] if i < len(self.text) else ""

    def skip_ws(self):
        while self.peek() in (" ", "\t", "\n", "\r") and self.peek():
            self.pos += 1

    def offset(self) -> int:
        return len(self.text[: self.pos].encode("utf-8"))

    def fail(self, msg, expected=()):
        raise OrdinalSyntaxError(msg, self.offset(), expected)


def _is_omega(ch: str) -> bool:
    return ch in ("w", "ω")


def _read_nat(r: _Reader) -> Optional[int]:
    start = r.pos
    while r.peek().isdigit() and r.peek().isascii():
        r.pos += 1
    if r.pos == start:
        return None
    return int(r.text[start : r.pos])


def _parse_atom(r: _Reader):
    r.skip_ws()
    ch = r.peek()
    if ch == "(":
        r.pos += 1
        e = _parse_sum(r)
        r.skip_ws()
        if r.peek() != ")":
            r.fail("expected ')'", [")"])
        r.pos += 1
        return e
    if r.at_var():
        r.pos += len(r.var)
        return Var()
    if _is_omega(ch):
        r.pos += 1
        if r.peek() == "^":
            r.pos += 1
            return simplify(Pow(_parse_exp_atom(r)))
        return OMEGA
    k = _read_nat(r)
    if k is None:
        r.fail("expected ordinal term", ["nat", "w", "n", "("])
    return Ordinal.of(k)


def _parse_exp_atom(r: _Reader):
    r.skip_ws()
    ch = r.peek()
    if ch == "(":
        return _parse_atom(r)
    if r.at_var():
        r.pos += len(r.var)
        return Var()
    if _is_omega(ch):
        r.pos += 1
        if r.peek() == "^":
            r.pos += 1
            return simplify(Pow(_parse_exp_atom(r)))
        return OMEGA
    k = _read_nat(r)
    if k is None:
        r.fail("expected exponent", ["nat", "w", "n", "("])
    return Ordinal.of(k)


def _parse_term(r: _Reader):
    base = _parse_atom(r)
    while True:
        save = r.pos
        r.skip_ws()
        if r.peek() != "*":
            r.pos = save
            return base
        r.pos += 1
        r.skip_ws()
        if r.at_var():
            r.pos += len(r.var)
            coef = Var()
        else:
            k = _read_nat(r)
            if k is None:
                r.fail("expected natural coefficient", ["nat", "n"])
            coef = Ordinal.of(k)
        base = simplify(Mul(as_expr(base), as_expr(coef)))


def _parse_sum(r: _Reader):
    parts = [_parse_term(r)]
    while True:
        save = r.pos
        r.skip_ws()
        if r.peek() != "+":
            r.pos = save
            break
        r.pos += 1
        parts.append(_parse_term(r))
    if len(parts) == 1:
        return parts[0]
    return simplify(Sum(tuple(as_expr(p) for p in parts)))


def parse_expr(text: str, pos: int = 0, allow_var: bool = True, var: str = "n"):
    """Parse an ordinal expression starting at ``pos``; returns (value, new_pos)."""
    r = _Reader(text, pos, allow_var, var)
    e = _parse_sum(r)
    return simplify(e), r.pos


def parse_exponent(text: str, pos: int = 0, allow_var: bool = True, var: str = "n"):
    """Parse the exponent atom following ``w^``; returns (value, new_pos)."""
    r = _Reader(text, pos, allow_var, var)
    e = _parse_exp_atom(r)
    return simplify(e), r.pos


def parse_ordinal(text: str) -> Ordinal:
    e, pos = parse_expr(text, 0, allow_var=False)
    rest = text[pos:].strip()
    if rest:
        raise OrdinalSyntaxError("trailing input", len(text[:pos].encode("utf-8")))
    return e


def iter_below(limit_depth: int, max_coef: int = 2, max_terms: int = 2) -> Iterator[Ordinal]:
    """All small ordinals of bounded shape; handy for exhaustive checks."""
    if limit_depth <= 0:
        for k in range(max_coef + 1):
            yield Ordinal.of(k)
        return
    exps = sorted(set(iter_below(limit_depth - 1, max_coef, max_terms)), key=_sort_key)
    seen = set()

    def build(prefix, max_exp_idx, left):
        o = Ordinal(tuple(prefix))
        if o not in seen:
            seen.add(o)
            yield o
        if left == 0:
            return
        for i in range(max_exp_idx):
            for c in range(1, max_coef + 1):
                yield from build(prefix + [(exps[i], c)], i, left - 1)

    yield from build([], len(exps), max_terms)


def _sort_key(o: Ordinal):
    return _OrdKey(o)


class _OrdKey:
    __slots__ = ("o",)

    def __init__(self, o):
        self.o = o

    def __lt__(self, other):
        return cmp(self.o, other.o) < 0
