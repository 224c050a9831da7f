"""Signature expressions: AST, parser and printer.

Grammar (ASCII, with the Unicode aliases ``∨ → ω``)::

    sig    := wedge
    wedge  := conv (("v" | "∨") conv)*
    conv   := atom (("->" | "→") atom)? | "{" family "}" ("->" | "→") atom
    atom   := "R" nat | "C" | "1" | "w+1" | "w^" exp "+1" | "o(" sig ")"
            | "(" sig ")" | "Vee_{" ident "=" nat ".." (nat | ident) "}(" sig ")"
    family := item (("v" | "∨") item)*
    item   := "accum(" family ")" | "stride(" nat "," nat "," family ")"
            | "[" sig ("," sig)* ";" family "]" | conv

Inside braces the letter ``n`` is the family index; nested braces rebind it.
"""
from __future__ import annotations

from functools import lru_cache

from dataclasses import dataclass
from typing import Union

from . import ordinal as O
from .ordinal import Ordinal


class ParseError(ValueError):
    def __init__(self, message: str, offset: int, expected=()):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset
        self.expected = tuple(expected)


# -- signature nodes --------------------------------------------------------


@dataclass(frozen=True)
class Rose:
    k: int


@dataclass(frozen=True)
class CantorTree:
    pass


@dataclass(frozen=True)
class Ord:
    alpha: object  # Ordinal, or an ordinal expression in the index


@dataclass(frozen=True)
class Genus:
    inner: "Signature"


@dataclass(frozen=True)
class Wedge:
    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("a wedge needs at least two parts")


@dataclass(frozen=True)
class Conv:
    family: "Family"
    base: "Signature"


Signature = Union[Rose, CantorTree, Ord, Genus, Wedge, Conv]


# -- family nodes -----------------------------------------------------------


@dataclass(frozen=True)
class Const:
    y: Signature


@dataclass(frozen=True)
class Param:
    template: Signature


@dataclass(frozen=True)
class Accum:
    gen: "Family"


@dataclass(frozen=True)
class Stride:
    k: int
    r: int
    inner: "Family"

    def __post_init__(self):
        if self.k < 1 or self.r < 0:
            raise ValueError("stride needs k >= 1 and r >= 0")


@dataclass(frozen=True)
class WedgeFam:
    a: "Family"
    b: "Family"


@dataclass(frozen=True)
class Prefix:
    head: tuple
    tail: "Family"


Family = Union[Const, Param, Accum, Stride, WedgeFam, Prefix]

C = CantorTree()
R0 = Rose(0)
ONE = Ord(O.ZERO)


def ord_(a) -> Ord:
    if isinstance(a, int):
        a = Ordinal.of(a)
    return Ord(O.simplify(a))


def wedge(parts) -> Signature:
    """Flattening wedge constructor; a single part is returned as is."""
    flat = []
    for p in parts:
        if isinstance(p, Wedge):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if not flat:
        return R0
    if len(flat) == 1:
        return flat[0]
    return Wedge(tuple(flat))


def _plain(f) -> bool:
    return isinstance(f, (Const, Param))


def _plain_sig(f) -> Signature:
    return f.y if isinstance(f, Const) else f.template


def lift_plain(sig: Signature) -> Family:
    return Param(sig) if free_in(sig) else Const(sig)


def wedge_fam(*items) -> Family:
    """Combine families member-wise, keeping a canonical left-nested shape.

    Adjacent constant or parametric pieces merge into one template, so that
    printing and re-parsing gives back the same structure.
    """
    flat = []
    for it in items:
        stack = [it]
        parts = []
        while stack:
            f = stack.pop()
            if isinstance(f, WedgeFam):
                stack.append(f.b)
                stack.append(f.a)
            else:
                parts.append(f)
        flat.extend(parts)
    merged = []
    for f in flat:
        if merged and _plain(f) and _plain(merged[-1]):
            merged[-1] = lift_plain(wedge([_plain_sig(merged[-1]), _plain_sig(f)]))
        else:
            merged.append(f)
    out = merged[0]
    for f in merged[1:]:
        out = WedgeFam(out, f)
    return out


# -- variable handling -------------------------------------------------------


def free_in(sig: Signature) -> bool:
    """Does the signature mention the index of the innermost enclosing family?"""
    if isinstance(sig, Ord):
        return O.has_var(sig.alpha)
    if isinstance(sig, Genus):
        return free_in(sig.inner)
    if isinstance(sig, Wedge):
        return any(free_in(p) for p in sig.parts)
    if isinstance(sig, Conv):
        return free_in_family(sig.family) or free_in(sig.base)
    return False


def free_in_family(f: Family) -> bool:
    if isinstance(f, Const):
        return free_in(f.y)
    if isinstance(f, Param):
        return False
    if isinstance(f, (Accum,)):
        return free_in_family(f.gen)
    if isinstance(f, Stride):
        return free_in_family(f.inner)
    if isinstance(f, WedgeFam):
        return free_in_family(f.a) or free_in_family(f.b)
    return any(free_in(h) for h in f.head) or free_in_family(f.tail)


def substitute(sig: Signature, value) -> Signature:
    """Replace the free index by a natural number or an ordinal expression."""
    repl = Ordinal.of(value) if isinstance(value, int) else value
    return _subst(sig, repl)


def _subst(sig, repl):
    if isinstance(sig, Ord):
        if not O.has_var(sig.alpha):
            return sig
        return Ord(O.simplify(O.replace_var(sig.alpha, repl)))
    if isinstance(sig, Genus):
        return Genus(_subst(sig.inner, repl))
    if isinstance(sig, Wedge):
        return Wedge(tuple(_subst(p, repl) for p in sig.parts))
    if isinstance(sig, Conv):
        return Conv(_subst_fam(sig.family, repl), _subst(sig.base, repl))
    return sig


def _subst_fam(f, repl):
    if isinstance(f, Const):
        return lift_plain(_subst(f.y, repl))
    if isinstance(f, Param):
        return f
    if isinstance(f, Accum):
        return Accum(_subst_fam(f.gen, repl))
    if isinstance(f, Stride):
        return Stride(f.k, f.r, _subst_fam(f.inner, repl))
    if isinstance(f, WedgeFam):
        return wedge_fam(_subst_fam(f.a, repl), _subst_fam(f.b, repl))
    return Prefix(tuple(_subst(h, repl) for h in f.head), _subst_fam(f.tail, repl))


@lru_cache(maxsize=65536)
def family_member(f: Family, n: int) -> Signature:
    if n < 0:
        raise ValueError("family index must be non-negative")
    if isinstance(f, Const):
        return f.y
    if isinstance(f, Param):
        return substitute(f.template, n)
    if isinstance(f, Accum):
        return wedge([family_member(f.gen, j) for j in range(n + 1)])
    if isinstance(f, Stride):
        return family_member(f.inner, f.k * n + f.r)
    if isinstance(f, WedgeFam):
        return wedge([family_member(f.a, n), family_member(f.b, n)])
    if n < len(f.head):
        return f.head[n]
    return family_member(f.tail, n - len(f.head))


def head_length(f: Family) -> int:
    """Indices below this value may differ from the eventual pattern."""
    if isinstance(f, (Const, Param)):
        return 0
    if isinstance(f, Accum):
        return head_length(f.gen)
    if isinstance(f, Stride):
        h = head_length(f.inner)
        return max(0, -(-(h - f.r) // f.k))
    if isinstance(f, WedgeFam):
        return max(head_length(f.a), head_length(f.b))
    return len(f.head) + head_length(f.tail)


def subterms(sig: Signature):
    """All signature nodes in pre-order, including family templates and heads."""
    out = [sig]
    if isinstance(sig, Genus):
        out += subterms(sig.inner)
    elif isinstance(sig, Wedge):
        for p in sig.parts:
            out += subterms(p)
    elif isinstance(sig, Conv):
        for y in family_sigs(sig.family):
            out += subterms(y)
        out += subterms(sig.base)
    return out


def family_sigs(f: Family):
    if isinstance(f, Const):
        return [f.y]
    if isinstance(f, Param):
        return [f.template]
    if isinstance(f, Accum):
        return family_sigs(f.gen)
    if isinstance(f, Stride):
        return family_sigs(f.inner)
    if isinstance(f, WedgeFam):
        return family_sigs(f.a) + family_sigs(f.b)
    return list(f.head) + family_sigs(f.tail)


def depth(sig: Signature) -> int:
    if isinstance(sig, Genus):
        return 1 + depth(sig.inner)
    if isinstance(sig, Wedge):
        return 1 + max(depth(p) for p in sig.parts)
    if isinstance(sig, Conv):
        return 1 + max([depth(sig.base)] + [depth(y) for y in family_sigs(sig.family)])
    return 1


def size(sig: Signature) -> int:
    return len(subterms(sig))


# -- printing ---------------------------------------------------------------


def to_text(sig: Signature) -> str:
    if isinstance(sig, Wedge):
        return " v ".join(_conv_text(p) for p in sig.parts)
    return _conv_text(sig)


def _conv_text(sig) -> str:
    if isinstance(sig, Conv):
        if isinstance(sig.family, Const):
            left = _atom_text(sig.family.y)
        else:
            left = "{" + family_text(sig.family) + "}"
        return f"{left} -> {_atom_text(sig.base)}"
    return _atom_text(sig)


def _atom_text(sig) -> str:
    if isinstance(sig, Rose):
        return f"R{sig.k}"
    if isinstance(sig, CantorTree):
        return "C"
    if isinstance(sig, Ord):
        a = sig.alpha
        if isinstance(a, Ordinal):
            if a.is_zero():
                return "1"
            if a == O.ONE:
                return "w+1"
        return "w^" + O._atom_str(a) + "+1"
    if isinstance(sig, Genus):
        return f"o({to_text(sig.inner)})"
    return f"({to_text(sig)})"


def family_text(f: Family) -> str:
    if isinstance(f, Const):
        return to_text(f.y)
    if isinstance(f, Param):
        return to_text(f.template)
    if isinstance(f, Accum):
        return f"accum({family_text(f.gen)})"
    if isinstance(f, Stride):
        return f"stride({f.k},{f.r},{family_text(f.inner)})"
    if isinstance(f, WedgeFam):
        return f"{family_text(f.a)} v {family_text(f.b)}"
    heads = ", ".join(to_text(h) for h in f.head)
    return f"[{heads}; {family_text(f.tail)}]"


def show(x) -> str:
    return family_text(x) if isinstance(x, (Const, Param, Accum, Stride, WedgeFam, Prefix)) else to_text(x)


# -- parsing ----------------------------------------------------------------

_WEDGE = ("v", "∨")
_ARROW = ("->", "→")


@dataclass(frozen=True)
class _SymbolicVee:
    """A wedge whose upper bound is the enclosing family index."""

    lo: int
    body: Signature  # the body with the wedge index as free variable


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # low level
    def offset(self, pos=None) -> int:
        return len(self.text[: self.pos if pos is None else pos].encode("utf-8"))

    def fail(self, msg, expected=(), pos=None):
        raise ParseError(msg, self.offset(pos), expected)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek_tok(self, *toks) -> str:
        self.ws()
        for t in toks:
            if self.text.startswith(t, self.pos):
                if t == "v":
                    nxt = self.text[self.pos + 1 : self.pos + 2]
                    if nxt.isalnum() or nxt == "_":
                        continue
                return t
        return ""

    def accept(self, *toks) -> bool:
        t = self.peek_tok(*toks)
        if t:
            self.pos += len(t)
            return True
        return False

    def expect(self, *toks):
        if not self.accept(*toks):
            self.fail(f"expected {' or '.join(repr(t) for t in toks)}", toks)

    def nat(self) -> int:
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit() and self.text[self.pos].isascii():
            self.pos += 1
        if start == self.pos:
            self.fail("expected natural number", ["nat"])
        return int(self.text[start : self.pos])

    def ident(self) -> str:
        self.ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            self.fail("expected identifier", ["identifier"])
        return self.text[start : self.pos]

    # grammar
    def top(self) -> Signature:
        sig = self.wedge(ctx=None)
        self.ws()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input", ["v", "->", "end of input"])
        return sig

    def wedge(self, ctx):
        parts = [self.conv(ctx)]
        while self.accept(*_WEDGE):
            parts.append(self.conv(ctx))
        for p in parts:
            if isinstance(p, _SymbolicVee):
                self.fail("symbolic Vee bound must be a whole family item or its base")
        return wedge(parts)

    def conv(self, ctx, item=False):
        self.ws()
        start = self.pos
        if self.peek_tok("{"):
            self.pos += 1
            fam = self.family()
            self.expect("}")
            self.expect(*_ARROW)
            base = self.atom(ctx)
            if isinstance(base, _SymbolicVee):
                if not item:
                    self.fail("symbolic Vee bound needs an enclosing family", pos=start)
                return self._desugar_vee(fam, base)
            return Conv(fam, base)
        left = self.atom(ctx)
        if self.accept(*_ARROW):
            base = self.atom(ctx)
            if isinstance(left, _SymbolicVee):
                self.fail("symbolic Vee cannot be a convergence member", pos=start)
            if isinstance(base, _SymbolicVee):
                if not item:
                    self.fail("symbolic Vee bound needs an enclosing family", pos=start)
                return self._desugar_vee(Const(left), base)
            return Conv(Const(left), base)
        if isinstance(left, _SymbolicVee) and not item:
            self.fail("symbolic Vee bound needs an enclosing family", pos=start)
        return left

    def _desugar_vee(self, fam, vee: _SymbolicVee):
        # F -> (B(lo) v ... v B(n)) distributes over the wedge; member n of the
        # enclosing family is then the wedge of F -> B(i) for lo <= i <= n.
        return _vee_family(vee.lo, Conv(fam, vee.body))

    def atom(self, ctx):
        self.ws()
        t = self.text
        p = self.pos
        if p >= len(t):
            self.fail("unexpected end of input", ["R", "C", "1", "w", "o(", "(", "{"])
        ch = t[p]
        if ch == "R":
            self.pos += 1
            return Rose(self.nat())
        if ch == "C":
            self.pos += 1
            return C
        if t.startswith("o(", p):
            self.pos += 2
            if self.peek_tok(")"):
                self.fail("empty genus argument", ["signature"])
            inner = self.wedge(ctx)
            self.expect(")")
            return Genus(inner)
        if ch == "(":
            self.pos += 1
            inner = self.wedge_or_vee(ctx)
            self.expect(")")
            return inner
        if t.startswith("Vee_{", p):
            return self.vee(ctx)
        if ch in ("w", "ω"):
            return self.ord_atom(ctx)
        if ch == "1" and not t[p + 1 : p + 2].isdigit():
            self.pos += 1
            return ONE
        self.fail("expected signature atom", ["R", "C", "1", "w", "o(", "(", "{", "Vee_{"])

    def wedge_or_vee(self, ctx):
        save = self.pos
        self.ws()
        if self.text.startswith("Vee_{", self.pos):
            v = self.vee(ctx)
            if isinstance(v, _SymbolicVee) and self.peek_tok(")"):
                return v
            self.pos = save
        return self.wedge(ctx)

    def ord_atom(self, ctx):
        t = self.text
        self.pos += 1
        var = ctx["var"] if ctx else "n"
        allow = bool(ctx)
        if self.peek_tok("+"):
            self.pos += 1
            self.ws()
            if t.startswith("1", self.pos) and not t[self.pos + 1 : self.pos + 2].isdigit():
                self.pos += 1
                return Ord(O.ONE)
            self.fail("expected '+1'", ["+1"])
        if not t.startswith("^", self.pos):
            self.fail("expected '^' or '+1' after w", ["^", "+1"])
        self.pos += 1
        try:
            alpha, self.pos = O.parse_exponent(t, self.pos, allow_var=allow, var=var)
        except O.OrdinalSyntaxError as e:
            raise ParseError(str(e).rsplit(" at byte", 1)[0], e.offset, e.expected) from None
        self.ws()
        if not (t.startswith("+", self.pos)):
            self.fail("expected '+1' closing an ordinal tree", ["+1"])
        self.pos += 1
        self.ws()
        if not t.startswith("1", self.pos) or t[self.pos + 1 : self.pos + 2].isdigit():
            self.fail("expected '+1' closing an ordinal tree", ["+1"])
        self.pos += 1
        return Ord(alpha)

    def vee(self, ctx):
        start = self.pos
        self.pos += len("Vee_{")
        name = self.ident()
        self.expect("=")
        lo = self.nat()
        self.expect("..")
        self.ws()
        if self.pos < len(self.text) and self.text[self.pos].isdigit():
            hi = self.nat()
        else:
            hi = self.ident()
        self.expect("}")
        self.expect("(")
        body = self.wedge({"var": name})
        self.expect(")")
        if isinstance(hi, int):
            if hi < lo:
                self.fail("empty Vee range", pos=start)
            return wedge([substitute(body, i) for i in range(lo, hi + 1)])
        if ctx is None:
            self.fail("symbolic Vee bound outside a family", pos=start)
        return _SymbolicVee(lo, body)

    def family(self):
        items = [self.item()]
        while self.accept(*_WEDGE):
            items.append(self.item())
        return wedge_fam(*items)

    def item(self):
        self.ws()
        t = self.text
        if t.startswith("accum(", self.pos):
            self.pos += len("accum(")
            g = self.family()
            self.expect(")")
            return Accum(g)
        if t.startswith("stride(", self.pos):
            self.pos += len("stride(")
            k = self.nat()
            self.expect(",")
            r = self.nat()
            self.expect(",")
            inner = self.family()
            self.expect(")")
            if k < 1:
                self.fail("stride step must be positive")
            return Stride(k, r, inner)
        if t.startswith("[", self.pos):
            self.pos += 1
            heads = [self.wedge({"var": "n"})]
            while self.accept(","):
                heads.append(self.wedge({"var": "n"}))
            self.expect(";")
            tail = self.family()
            self.expect("]")
            return Prefix(tuple(heads), tail)
        sig = self.conv({"var": "n"}, item=True)
        if isinstance(sig, _SymbolicVee):
            return _vee_family(sig.lo, sig.body)
        if isinstance(sig, (Const, Param, Accum, Stride, WedgeFam, Prefix)):
            return sig
        return lift_plain(sig)


def _vee_family(lo: int, template: Signature) -> Family:
    gen = Accum(Stride(1, lo, lift_plain(template)))
    if lo == 0:
        return gen
    return Prefix(tuple([R0] * lo), gen)


def parse(text: str) -> Signature:
    return _Parser(text).top()


def parse_family(text: str) -> Family:
    p = _Parser(text)
    f = p.family()
    p.ws()
    if p.pos != len(text):
        p.fail("unexpected trailing input")
    return f
