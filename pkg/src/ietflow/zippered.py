"""Suspension data and the invertible lift of Rauzy-Veech induction.

A suspension datum tau over a permutation pi has positive top partial sums
and negative bottom partial sums; the triple (lengths, tau) encodes a
zippered rectangle with heights read off tau.  The forward induction step
acts on tau exactly as on the lengths (tau' = B^-1 tau), so the triple
makes the induction invertible: the type of the incoming step is decided
by the sign of sum(tau) and the previous triple is reconstructed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exact import ExactScalar, exact_sum
from .iet import Iet, InvalidIetError, Permutation
from .rauzy import rv_step


class InvalidSuspensionError(ValueError):
    """tau does not satisfy the partial-sum sign conditions."""


class BackwardUndefinedError(ValueError):
    """A relevant partial sum of tau vanishes; no preimage is selected."""


def _as_scalar(v):
    if isinstance(v, ExactScalar):
        return v
    return ExactScalar(v)


class SuspensionData:
    """Signed vector tau indexed by the alphabet, inside the cone Theta_pi."""

    __slots__ = ("perm", "tau")

    def __init__(self, perm: Permutation, tau):
        if isinstance(tau, dict):
            vals = tuple(_as_scalar(tau[a]) for a in perm.alphabet)
        else:
            vals = tuple(_as_scalar(v) for v in tau)
            if len(vals) != perm.d:
                raise InvalidSuspensionError("need one coordinate per label")
        self.perm = perm
        self.tau = vals
        self.validate()

    def value(self, label) -> ExactScalar:
        return self.tau[self.perm.alphabet.index(label)]

    def top_partial(self, j: int) -> ExactScalar:
        """Sum of tau over the first j letters in top order."""
        return exact_sum(self.value(a) for a in self.perm.top[:j])

    def bottom_partial(self, j: int) -> ExactScalar:
        return exact_sum(self.value(a) for a in self.perm.bottom[:j])

    def validate(self):
        for j in range(1, self.perm.d):
            if not self.top_partial(j).sign() > 0:
                raise InvalidSuspensionError(
                    "top partial sum %d not positive" % j)
            if not self.bottom_partial(j).sign() < 0:
                raise InvalidSuspensionError(
                    "bottom partial sum %d not negative" % j)

    def total(self) -> ExactScalar:
        return exact_sum(self.tau)

    def scale(self, c) -> "SuspensionData":
        c = _as_scalar(c)
        return SuspensionData(self.perm, [v * c for v in self.tau])

    def __repr__(self):
        return "SuspensionData(%s)" % ", ".join(v.to_string() for v in self.tau)


def canonical_tau(perm: Permutation) -> SuspensionData:
    """tau_a = pi_b(a) - pi_t(a): a valid suspension datum for every
    irreducible permutation (partial sums are strict by irreducibility)."""
    if not perm.irreducible:
        raise InvalidIetError("canonical tau requires an irreducible permutation")
    tau = {a: ExactScalar(perm.bottom_position(a) - perm.top_position(a))
           for a in perm.alphabet}
    return SuspensionData(perm, tau)


def generic_tau(perm: Permutation, eps=None) -> SuspensionData:
    """Canonical tau nudged off the backward-branch boundary.

    sum(canonical_tau) is always zero, which is exactly the tie that makes
    the first backward step undefined.  Adding eps in (0, 1) to the last
    top letter keeps every constrained partial sum strict (that letter only
    enters the unconstrained j = d top sum, and shifts the negative bottom
    sums by less than their slack) while making sum(tau) = eps != 0.
    """
    from fractions import Fraction

    if eps is None:
        eps = Fraction(1, 3)
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InvalidSuspensionError("eps must lie in (0, 1)")
    base = canonical_tau(perm)
    tau = {a: base.value(a) for a in perm.alphabet}
    last_top = perm.top[-1]
    tau[last_top] = tau[last_top] + ExactScalar(eps)
    return SuspensionData(perm, tau)


def heights_from_tau(susp: SuspensionData):
    """h_a = sum_{pi_t(b)<pi_t(a), pi_b(b)>pi_b(a)} tau_b
            - sum_{pi_t(b)>pi_t(a), pi_b(b)<pi_b(a)} tau_b, all positive."""
    perm = susp.perm
    out = []
    for a in perm.alphabet:
        ta, ba = perm.top_position(a), perm.bottom_position(a)
        acc = ExactScalar(0)
        for b in perm.alphabet:
            tb, bb = perm.top_position(b), perm.bottom_position(b)
            if tb < ta and bb > ba:
                acc = acc + susp.value(b)
            elif tb > ta and bb < ba:
                acc = acc - susp.value(b)
        if not acc.sign() > 0:
            raise InvalidSuspensionError("height of %r not positive" % a)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class ZipperedRectangles:
    """Triple (lengths, tau, pi): rectangles of widths lambda_a and heights
    h_a(tau); area sum(lambda_a h_a) is 1 after normalization."""

    iet: Iet
    suspension: SuspensionData

    def __post_init__(self):
        if self.iet.perm is not self.suspension.perm and \
                self.iet.perm != self.suspension.perm:
            raise InvalidSuspensionError("iet and tau over different permutations")

    @property
    def heights(self):
        return heights_from_tau(self.suspension)

    @property
    def area(self) -> ExactScalar:
        return exact_sum(l * h for l, h in zip(self.iet.lengths, self.heights))


def area_normalize(z: ZipperedRectangles) -> ZipperedRectangles:
    """Scale the lengths so the zippered rectangle has area one."""
    area = z.area
    if not area.sign() > 0:
        raise InvalidSuspensionError("area must be positive")
    if area == 1:
        return z
    inv = area.inverse()
    lengths = [l * inv for l in z.iet.lengths]
    return ZipperedRectangles(Iet(z.iet.perm, lengths), z.suspension)


def forward_rv_step(z: ZipperedRectangles):
    """Lift of the induction step to triples: tau transforms like lambda."""
    new_iet, matrix, step_type = rv_step(z.iet)
    perm = z.iet.perm
    if step_type == "top":
        winner, loser = perm.top[-1], perm.bottom[-1]
    else:
        winner, loser = perm.bottom[-1], perm.top[-1]
    tau = {a: z.suspension.value(a) for a in perm.alphabet}
    tau[winner] = tau[winner] - tau[loser]
    new_susp = SuspensionData(new_iet.perm, tau)
    return ZipperedRectangles(new_iet, new_susp), matrix, step_type


def backward_rv_step(z: ZipperedRectangles):
    """Inverse induction step on triples.

    The sign of sum(tau) selects the type of the incoming step (< 0: 'top',
    > 0: 'bottom'); a vanishing sum leaves no preimage.  Contract: a
    forward step applied to the result recovers `z` exactly, with the same
    matrix.
    """
    perm = z.iet.perm
    total = z.suspension.total()
    sign = total.sign()
    if sign == 0:
        raise BackwardUndefinedError("sum of tau vanishes; preimage type "
                                     "undetermined")
    if sign < 0:
        # previous step was 'top': winner is the last top letter and the
        # loser sat at the end of the previous bottom row
        step_type = "top"
        winner = perm.top[-1]
        row = list(perm.bottom)
        wpos = row.index(winner)
        if wpos == len(row) - 1:
            raise BackwardUndefinedError(
                "no 'top' preimage: winner is last in the bottom row")
        loser = row[wpos + 1]
        del row[wpos + 1]
        row.append(loser)
        prev_perm = Permutation(perm.top, row, alphabet=perm.alphabet)
    else:
        step_type = "bottom"
        winner = perm.bottom[-1]
        row = list(perm.top)
        wpos = row.index(winner)
        if wpos == len(row) - 1:
            raise BackwardUndefinedError(
                "no 'bottom' preimage: winner is last in the top row")
        loser = row[wpos + 1]
        del row[wpos + 1]
        row.append(loser)
        prev_perm = Permutation(row, perm.bottom, alphabet=perm.alphabet)

    lengths = {a: z.iet.length(a) for a in perm.alphabet}
    lengths[winner] = lengths[winner] + lengths[loser]
    tau = {a: z.suspension.value(a) for a in perm.alphabet}
    tau[winner] = tau[winner] + tau[loser]

    d = perm.d
    wi = perm.alphabet.index(winner)
    li = perm.alphabet.index(loser)
    matrix = tuple(tuple(1 if (i == j or (i == wi and j == li)) else 0
                         for j in range(d)) for i in range(d))
    prev = ZipperedRectangles(Iet(prev_perm, lengths),
                              SuspensionData(prev_perm, tau))
    return prev, matrix, step_type


def canonical_zippered(iet: Iet, normalize: bool = True) -> ZipperedRectangles:
    z = ZipperedRectangles(iet, canonical_tau(iet.perm))
    return area_normalize(z) if normalize else z
