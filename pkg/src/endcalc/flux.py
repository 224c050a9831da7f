"""Spine models and the flux homomorphism.

A model is a bi-infinite spine whose position ``p`` carries ``d(p)`` slots
(ends or loops of the chosen kind).  ``X_n`` holds every slot at a position
``<= n``.  Actions are ``f = perm . shift``: first every slot moves ``s``
positions, then a finitely supported permutation is applied.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

END_KIND, LOOP_KIND = "EndKind", "LoopKind"


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class SpineModel:
    kind: str
    decorations: tuple  # ((position, count), ...)
    tail_period: int = 1
    tail_counts: tuple = (0,)

    def __post_init__(self):
        if self.tail_period < 1 or len(self.tail_counts) != self.tail_period:
            raise ModelError("tail needs one count per residue of the period")
        if any(c < 0 for _, c in self.decorations) or any(c < 0 for c in self.tail_counts):
            raise ModelError("slot counts must be non-negative")

    @property
    def window(self) -> int:
        return max((abs(p) for p, _ in self.decorations), default=0)

    def count(self, p: int) -> int:
        for q, c in self.decorations:
            if q == p:
                return c
        return self.tail_counts[p % self.tail_period]

    def slots_at(self, p: int):
        return [(p, j) for j in range(self.count(p))]

    def has_slot(self, x) -> bool:
        return 0 <= x[1] < self.count(x[0])

    def to_json(self):
        return {
            "kind": self.kind,
            "decorations": [list(d) for d in self.decorations],
            "tail": {"period": self.tail_period, "counts": list(self.tail_counts)},
        }


def model_from_json(data) -> SpineModel:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind", END_KIND)
    if kind not in (END_KIND, LOOP_KIND):
        raise ModelError(f"unknown model kind {kind!r}")
    decos = tuple((int(p), int(c)) for p, c in data.get("decorations", []))
    tail = data.get("tail", {"period": 1, "counts": [0]})
    return SpineModel(kind, decos, int(tail["period"]), tuple(int(c) for c in tail["counts"]))


def load_model(path) -> SpineModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


DECORATED_SPINE = SpineModel(END_KIND, ((-1, 1), (0, 1), (1, 1), (2, 2)))
UNIT_DENSITY = SpineModel(LOOP_KIND, (), 1, (1,))


# -- actions -----------------------------------------------------------------------


@dataclass(frozen=True)
class EndAction:
    shift: int = 0
    perm: tuple = ()  # sorted ((slot, image), ...) pairs, identity elsewhere

    @staticmethod
    def make(shift=0, perm=None) -> "EndAction":
        items = {k: v for k, v in (perm or {}).items() if k != v}
        if set(items) != set(items.values()):
            raise ModelError("permutation is not a bijection of its support")
        return EndAction(shift, tuple(sorted(items.items())))

    def perm_map(self) -> dict:
        return dict(self.perm)

    def support_positions(self):
        return [x[0] for x, _ in self.perm]

    def __call__(self, x):
        y = (x[0] + self.shift, x[1])
        return self.perm_map().get(y, y)

    def preimage(self, y):
        inv = {v: k for k, v in self.perm}
        x = inv.get(y, y)
        return (x[0] - self.shift, x[1])


IDENTITY = EndAction()


def validate(model: SpineModel, f: EndAction):
    reach = model.window + abs(f.shift) + model.tail_period + 1
    if f.shift:
        for p in range(-reach, reach + 1):
            if model.count(p) != model.count(p + f.shift):
                raise ModelError(f"shift {f.shift} does not preserve slot counts at position {p}")
    for x, y in f.perm:
        if not model.has_slot(x) or not model.has_slot(y):
            raise ModelError(f"swap touches a missing slot {x} or {y}")


def parse_action(spec: str) -> EndAction:
    """``shift:<k>[;swap:p1.j1,p2.j2;...]``: transpositions apply left to right after the shift."""
    shift = 0
    perm = {}
    for chunk in filter(None, (c.strip() for c in spec.split(";"))):
        key, _, val = chunk.partition(":")
        if key == "shift":
            shift = int(val)
        elif key == "swap":
            a, b = (_slot(t) for t in val.split(","))
            swap = {a: b, b: a}
            keys = set(perm) | {a, b}
            perm = {x: swap.get(perm.get(x, x), perm.get(x, x)) for x in keys}
        else:
            raise ModelError(f"unknown action clause {chunk!r}")
    return EndAction.make(shift, perm)


def _slot(text):
    p, j = text.strip().rsplit(".", 1)
    return int(p), int(j)


def compose(f: EndAction, g: EndAction) -> EndAction:
    """f after g."""
    conj = {(x[0] + f.shift, x[1]): (y[0] + f.shift, y[1]) for x, y in g.perm}
    pf = f.perm_map()
    support = set(conj) | set(pf)
    perm = {}
    for x in support:
        y = conj.get(x, x)
        perm[x] = pf.get(y, y)
    return EndAction.make(f.shift + g.shift, perm)


def inverse(f: EndAction) -> EndAction:
    perm = {(y[0] - f.shift, y[1]): (x[0] - f.shift, x[1]) for x, y in f.perm}
    return EndAction.make(-f.shift, perm)


# -- slot sets and cork ---------------------------------------------------------------


@dataclass(frozen=True)
class SlotSet:
    """The image of X_n under an action (the identity for X_n itself)."""

    n: int
    action: EndAction = field(default=IDENTITY)

    def threshold(self) -> int:
        return self.n + self.action.shift

    def contains(self, x) -> bool:
        return self.action.preimage(x)[0] <= self.n

    def span(self):
        pts = [self.threshold()]
        for x, y in self.action.perm:
            pts.extend((x[0], y[0]))
        return min(pts), max(pts)


def X(n: int) -> SlotSet:
    return SlotSet(n)


def image(f: EndAction, s: SlotSet) -> SlotSet:
    return SlotSet(s.n, compose(f, s.action))


def cork(model: SpineModel, a: SlotSet, b: SlotSet) -> int:
    """Number of slots in a that are missing from b."""
    lo = min(a.span()[0], b.span()[0])
    hi = max(a.span()[1], b.span()[1])
    total = 0
    for p in range(lo, hi + 1):
        for x in model.slots_at(p):
            if a.contains(x) and not b.contains(x):
                total += 1
    return total


def is_admissible(model: SpineModel, f: EndAction, m: int, n: int) -> bool:
    xm, xn = X(m), X(n)
    return cork(model, xn, xm) == 0 and cork(model, image(f, xn), xm) == 0


def phi(model: SpineModel, f: EndAction, m: int, n: int) -> int:
    xm, xn = X(m), X(n)
    return cork(model, xm, xn) - cork(model, xm, image(f, xn))


def least_admissible(model: SpineModel, f: EndAction, n: int = 0) -> int:
    hi = max([n, n + f.shift] + [y[0] for _, y in f.perm] + [x[0] for x, _ in f.perm])
    m = min(n, n + f.shift) - 1
    while not is_admissible(model, f, m, n):
        m += 1
        if m > hi + 1:
            raise ModelError("no admissible pair found")
    return m


def flux_value(model: SpineModel, f: EndAction, n: int = 0) -> int:
    validate(model, f)
    return phi(model, f, least_admissible(model, f, n), n)
