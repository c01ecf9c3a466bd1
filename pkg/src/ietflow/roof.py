"""Roof functions with asymmetric logarithmic singularities; special flows.

On each exchanged interval I_a = [l_a, r_a) the roof is the pure-log model

    f(x) = c0 - Cplus_a * log(x - l_a) - Cminus_a * log(r_a - x),

which realizes the constrained asymptotics exactly (f'' (x-l_a)^2 -> Cplus_a
etc.), has closed-form integrals, and is bounded below by c0 when the
interval has length <= 1.  Base coordinates stay exact; roof values are
floats with a conservative per-call error radius, since f is transcendental.
Evaluation refuses within a configurable hard cutoff of a singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import ExactScalar
from .iet import Iet

#: unit used by the conservative rounding-error model
_EPS = 2.0 ** -50

DEFAULT_HARD_CUTOFF = Fraction(1, 10 ** 30)


class SingularityTooClose(ArithmeticError):
    """Evaluation point within the hard cutoff of a singularity."""

    def __init__(self, label, side, distance, orbit_index=None):
        self.label = label
        self.side = side
        self.distance = distance
        self.orbit_index = orbit_index
        msg = "point within cutoff of singularity at %s side of %r" % (side, label)
        if orbit_index is not None:
            msg += " (orbit index %d)" % orbit_index
        super().__init__(msg)


class RoofDomainError(ValueError):
    """Evaluation exactly at a singular point."""


@dataclass(frozen=True)
class RoofSpec:
    """Per-interval singularity strengths and smooth offset.

    cplus[a] >= 0 weights the blow-up at l_a from the right, cminus[a] >= 0
    at r_a from the left; c0 > 0 is the smooth offset.  Constant roofs (all
    weights zero) are allowed; `is_asymmetric` reports whether the total
    one-sided constants differ, which is the standing assumption of the
    shearing estimates.
    """

    c0: Fraction
    cplus: dict
    cminus: dict
    hard_cutoff: Fraction = DEFAULT_HARD_CUTOFF

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("offset c0 must be positive")
        for d in (self.cplus, self.cminus):
            for v in d.values():
                if v < 0:
                    raise ValueError("singularity constants must be >= 0")

    @property
    def cplus_total(self) -> Fraction:
        return sum(self.cplus.values(), Fraction(0))

    @property
    def cminus_total(self) -> Fraction:
        return sum(self.cminus.values(), Fraction(0))

    @property
    def asymmetry_gap(self) -> Fraction:
        """C- - C+ (positive when the left-side constants dominate)."""
        return self.cminus_total - self.cplus_total

    @property
    def is_asymmetric(self) -> bool:
        return self.cplus_total != self.cminus_total

    @property
    def has_log_singularity(self) -> bool:
        return self.cplus_total > 0 or self.cminus_total > 0

    def constants_for(self, alphabet):
        return ([float(self.cplus[a]) for a in alphabet],
                [float(self.cminus[a]) for a in alphabet])


@dataclass(frozen=True)
class RoofValue:
    value: float
    err: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class FlowPoint:
    """Point (x, y) of the flow space, 0 <= y < f(x); x stays exact."""
    x: ExactScalar
    y: float


def _distances(iet: Iet, spec: RoofSpec, x: ExactScalar, orbit_index=None):
    """Exact distances of x to both endpoints of its interval, with the
    cutoff check applied.  Returns (label, dist_left, dist_right)."""
    a = iet.interval_of(x)
    dl = x - iet.left(a)
    dr = iet.right(a) - x
    if spec.has_log_singularity and dl.is_zero():
        # the model is undefined on {l_a}; constant roofs have no
        # singular set and evaluate everywhere
        raise RoofDomainError("evaluation at the singular point l_%s" % a)
    if spec.cplus[a] != 0 and dl <= spec.hard_cutoff:
        raise SingularityTooClose(a, "left", dl, orbit_index)
    if spec.cminus[a] != 0 and dr <= spec.hard_cutoff:
        raise SingularityTooClose(a, "right", dr, orbit_index)
    return a, dl, dr


def eval_roof(iet: Iet, spec: RoofSpec, x, orbit_index=None) -> RoofValue:
    """f(x) with a conservative rounding-error radius."""
    if not isinstance(x, ExactScalar):
        x = ExactScalar(x)
    a, dl, dr = _distances(iet, spec, x, orbit_index)
    cp = float(spec.cplus[a])
    cm = float(spec.cminus[a])
    val = float(spec.c0)
    err_budget = abs(val)
    if cp:
        term = -cp * math.log(float(dl))
        val += term
        err_budget += abs(term) + cp
    if cm:
        term = -cm * math.log(float(dr))
        val += term
        err_budget += abs(term) + cm
    return RoofValue(val, _EPS * (err_budget + abs(val)))


def eval_roof_derivative(iet: Iet, spec: RoofSpec, x, orbit_index=None) -> RoofValue:
    """f'(x) = -Cplus_a/(x - l_a) + Cminus_a/(r_a - x) on I_a."""
    if not isinstance(x, ExactScalar):
        x = ExactScalar(x)
    a, dl, dr = _distances(iet, spec, x, orbit_index)
    cp = float(spec.cplus[a])
    cm = float(spec.cminus[a])
    val = 0.0
    err_budget = 0.0
    if cp:
        term = -cp / float(dl)
        val += term
        err_budget += abs(term)
    if cm:
        term = cm / float(dr)
        val += term
        err_budget += abs(term)
    return RoofValue(val, _EPS * (err_budget + abs(val)) + 1e-300)


def eval_roof_second_derivative(iet: Iet, spec: RoofSpec, x,
                                orbit_index=None) -> RoofValue:
    """f''(x) = Cplus_a/(x - l_a)^2 + Cminus_a/(r_a - x)^2 on I_a."""
    if not isinstance(x, ExactScalar):
        x = ExactScalar(x)
    a, dl, dr = _distances(iet, spec, x, orbit_index)
    cp = float(spec.cplus[a])
    cm = float(spec.cminus[a])
    val = 0.0
    if cp:
        val += cp / float(dl) ** 2
    if cm:
        val += cm / float(dr) ** 2
    return RoofValue(val, _EPS * abs(val) + 1e-300)


def birkhoff_sum(iet: Iet, spec: RoofSpec, x, r: int,
                 derivative: bool = False) -> RoofValue:
    """S_r(f)(x): sum of f over r forward orbit steps; 0 for r = 0;
    -sum over T^r x .. T^-1 x for r < 0.  Exact orbit, float values."""
    if not isinstance(x, ExactScalar):
        x = ExactScalar(x)
    term = eval_roof_derivative if derivative else eval_roof
    acc = 0.0
    err = 0.0
    if r == 0:
        return RoofValue(0.0, 0.0)
    if r > 0:
        pt = x
        for i in range(r):
            tv = term(iet, spec, pt, orbit_index=i)
            acc += tv.value
            err += tv.err + abs(acc) * 2.0 ** -52
            pt = iet.evaluate(pt)
        return RoofValue(acc, err)
    pt = x
    for i in range(-r):
        pt = iet.evaluate_inverse(pt)
        tv = term(iet, spec, pt, orbit_index=-(i + 1))
        acc += tv.value
        err += tv.err + abs(acc) * 2.0 ** -52
    return RoofValue(-acc, err)


def birkhoff_derivative_sum(iet: Iet, spec: RoofSpec, x, r: int) -> RoofValue:
    return birkhoff_sum(iet, spec, x, r, derivative=True)


class BirkhoffCursor:
    """Incremental S_n(f) (and optionally S_n(f')) along one exact orbit.

    Forward direction walks x, Tx, ...; backward walks T^-1 x, T^-2 x, ...
    accumulating the negative-branch sums, so `sum_at(n)` returns S_n for
    the forward cursor and S_{-n} for the backward one.
    """

    def __init__(self, iet: Iet, spec: RoofSpec, x, forward: bool = True,
                 track_derivative: bool = False):
        self.iet = iet
        self.spec = spec
        self.forward = forward
        self.track_derivative = track_derivative
        self.point = x if isinstance(x, ExactScalar) else ExactScalar(x)
        self.steps = 0
        self.sum = 0.0
        self.err = 0.0
        self.dsum = 0.0
        self.derr = 0.0

    def advance_to(self, n: int):
        if n < self.steps:
            raise ValueError("cursor cannot move backwards")
        while self.steps < n:
            if self.forward:
                value_point = self.point
                idx = self.steps
            else:
                self.point = self.iet.evaluate_inverse(self.point)
                value_point = self.point
                idx = -(self.steps + 1)
            tv = eval_roof(self.iet, self.spec, value_point, orbit_index=idx)
            self.sum += tv.value
            self.err += tv.err + abs(self.sum) * 2.0 ** -52
            if self.track_derivative:
                dv = eval_roof_derivative(self.iet, self.spec, value_point,
                                          orbit_index=idx)
                self.dsum += dv.value
                self.derr += dv.err + abs(self.dsum) * 2.0 ** -52
            if self.forward:
                self.point = self.iet.evaluate(self.point)
            self.steps += 1
        return self

    def sum_at(self, n: int) -> RoofValue:
        self.advance_to(n)
        if self.forward:
            return RoofValue(self.sum, self.err)
        return RoofValue(-self.sum, self.err)

    def derivative_sum_at(self, n: int) -> RoofValue:
        if not self.track_derivative:
            raise ValueError("cursor not tracking the derivative")
        self.advance_to(n)
        if self.forward:
            return RoofValue(self.dsum, self.derr)
        return RoofValue(-self.dsum, self.derr)


def _advance(iet: Iet, spec: RoofSpec, x: ExactScalar, s: float,
             max_steps: int = 10 ** 7):
    """Move (x, 0) by s time units: returns (T^r x, s - S_r, r) with
    0 <= remainder < f(T^r x)."""
    steps = 0
    if s >= 0:
        while True:
            fx = eval_roof(iet, spec, x).value
            if s < fx:
                return x, s, steps
            s -= fx
            x = iet.evaluate(x)
            steps += 1
            if steps > max_steps:
                raise RuntimeError("flow advance exceeded %d steps" % max_steps)
    while s < 0:
        x = iet.evaluate_inverse(x)
        s += eval_roof(iet, spec, x).value
        steps -= 1
        if -steps > max_steps:
            raise RuntimeError("flow advance exceeded %d steps" % max_steps)
    return x, s, steps


def flow(iet: Iet, spec: RoofSpec, point: FlowPoint, t: float) -> FlowPoint:
    """Special flow phi_t.  For t >= 0 the point rises with unit speed and
    jumps (x, f(x)-) -> (Tx, 0); negative t is the inverse map."""
    x, y, _ = _advance(iet, spec, point.x, point.y + t)
    return FlowPoint(x, y)


def discrete_iterations(iet: Iet, spec: RoofSpec, x, t: float) -> int:
    """r(x, t): how many base jumps (x, 0) undergoes flowing for time t.

    Equals max{r : S_r(f)(x) < t} for t > 0 (an exact tie S_r = t advances,
    keeping the image inside the flow space); negative for t < 0."""
    if not isinstance(x, ExactScalar):
        x = ExactScalar(x)
    _, _, steps = _advance(iet, spec, x, t)
    return steps


def roof_area(iet: Iet, spec: RoofSpec) -> float:
    """Closed-form integral of f over the interval.

    Each log factor contributes lambda * (1 - log lambda) on its interval.
    """
    total = float(spec.c0) * float(iet.total)
    for a in iet.perm.alphabet:
        lam = float(iet.length(a))
        w = float(spec.cplus[a]) + float(spec.cminus[a])
        if w:
            total += w * lam * (1.0 - math.log(lam))
    return total


def roof_mean(iet: Iet, spec: RoofSpec) -> float:
    return roof_area(iet, spec) / float(iet.total)
