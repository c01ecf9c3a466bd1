"""Exact unions of closed intervals inside the base interval.

Used for the excluded sets (singularity neighborhoods and their pullbacks):
endpoints are exact scalars, measures are exact, membership is inclusive.
Pullbacks err on the inclusive side at interval boundaries, which is the
conservative direction for exclusion semantics.
"""

from __future__ import annotations

from bisect import bisect_right

from .exact import ExactScalar, exact_sum
from .iet import Iet


def _as_scalar(v):
    return v if isinstance(v, ExactScalar) else ExactScalar(v)


class IntervalUnion:
    """Disjoint sorted closed intervals [a_i, b_i], exact endpoints."""

    __slots__ = ("parts",)

    def __init__(self, parts=(), already_normalized=False):
        items = [(_as_scalar(a), _as_scalar(b)) for a, b in parts]
        if already_normalized:
            self.parts = items
            return
        items = [(a, b) for a, b in items if not b < a]
        items.sort(key=lambda p: p[0])
        merged: list = []
        for a, b in items:
            if merged and not merged[-1][1] < a:
                if merged[-1][1] < b:
                    merged[-1] = (merged[-1][0], b)
            else:
                merged.append((a, b))
        self.parts = merged

    @classmethod
    def empty(cls):
        return cls(())

    def is_empty(self) -> bool:
        return not self.parts

    def measure(self) -> ExactScalar:
        if not self.parts:
            return ExactScalar(0)
        return exact_sum(b - a for a, b in self.parts)

    def contains(self, x) -> bool:
        x = _as_scalar(x)
        for a, b in self.parts:
            if not x < a and not b < x:
                return True
        return False

    def witness(self, x):
        """The component containing x, or None."""
        x = _as_scalar(x)
        for a, b in self.parts:
            if not x < a and not b < x:
                return (a, b)
        return None

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.parts + other.parts)

    def clip(self, lo, hi) -> "IntervalUnion":
        lo = _as_scalar(lo)
        hi = _as_scalar(hi)
        out = []
        for a, b in self.parts:
            a2 = lo if a < lo else a
            b2 = hi if hi < b else b
            if not b2 < a2:
                out.append((a2, b2))
        return IntervalUnion(out, already_normalized=True)

    def preimage(self, iet: Iet) -> "IntervalUnion":
        """T^(-1) of the union: intersect with each image interval and
        translate back."""
        out = []
        for a, b in self.parts:
            for label in iet.perm.alphabet:
                lo = iet.left_image(label)
                hi = iet.right_image(label)
                a2 = a if lo < a else lo
                b2 = b if b < hi else hi
                if not b2 < a2:
                    w = iet.translation(label)
                    out.append((a2 - w, b2 - w))
        return IntervalUnion(out)

    def __len__(self):
        return len(self.parts)

    def __repr__(self):
        return "IntervalUnion(%d components, measure %s)" % (
            len(self.parts), self.measure().to_string())


def neighborhood(center, radius) -> tuple:
    center = _as_scalar(center)
    radius = _as_scalar(radius)
    return (center - radius, center + radius)


def pullback_union(iet: Iet, base: IntervalUnion, count: int,
                   clip_lo=0, clip_hi=None) -> IntervalUnion:
    """Union of T^(-i)(base) for 0 <= i <= count, clipped to the interval."""
    if clip_hi is None:
        clip_hi = iet.total
    acc = list(base.clip(clip_lo, clip_hi).parts)
    cur = base
    for _ in range(count):
        cur = cur.preimage(iet)
        acc.extend(cur.clip(clip_lo, clip_hi).parts)
    return IntervalUnion(acc)
