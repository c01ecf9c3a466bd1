"""Rauzy-Veech induction: steps, cocycle matrices, heights, Rohlin towers.

One unnormalized induction step compares the last top and last bottom
intervals; the longer one (the winner) absorbs the length of the shorter
(the loser) and the induced map is the first return to the shortened
interval.  Each step emits the SL(d,Z) matrix B with lambda = B lambda',
so products of step matrices transport lengths and (transposed) heights.
The executable ground truth is `first_return_map` in `iet.py`: tests check
every step against directly iterated return times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import ExactScalar, exact_max, exact_min
from .iet import Iet, IetDomainError, Permutation


class RVUndefinedError(ValueError):
    """Last top and bottom intervals have equal length (Keane failure)."""


class MatrixDomainError(ValueError):
    """Matrix does not satisfy the preconditions of the operation."""


# ---------------------------------------------------------------------------
# small exact integer matrices as tuples of tuples, indexed by the alphabet
# ---------------------------------------------------------------------------

def mat_identity(d: int):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_mul(a, b):
    n = len(a)
    bt = tuple(zip(*b))
    return tuple(tuple(sum(a[i][k] * bt[j][k] for k in range(n))
                       for j in range(n)) for i in range(n))


def mat_vec(a, v):
    return tuple(sum(a[i][k] * v[k] for k in range(len(v)))
                 for i in range(len(a)))


def mat_transpose(a):
    return tuple(zip(*a))


def mat_det(a):
    """Determinant by fraction-free Gaussian elimination (Bareiss)."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def col_norm(a) -> int:
    """Matrix norm used throughout: max column entry-sum.

    Chosen so that the norm of B^(n) equals the largest tower height
    q = max_a h_a and matches the vector norm |lambda| = sum lambda_a.
    """
    return max(sum(col) for col in zip(*a))


def is_positive(a) -> bool:
    return all(e > 0 for row in a for e in row)


# ---------------------------------------------------------------------------
# single induction step
# ---------------------------------------------------------------------------

def rv_step(iet: Iet):
    """One unnormalized Rauzy-Veech step.

    Returns (induced Iet on the shortened interval, step matrix B with
    lambda = B lambda', step type).  Type 'top' means the last top interval
    won (was longer); 'bottom' the opposite.  Equal lengths raise
    RVUndefinedError.
    """
    perm = iet.perm
    top_last = perm.top[-1]
    bottom_last = perm.bottom[-1]
    lt = iet.length(top_last)
    lb = iet.length(bottom_last)
    if lt == lb:
        raise RVUndefinedError(
            "last top and bottom intervals both have length %s"
            % lt.to_string())
    if lt > lb:
        step_type, winner, loser = "top", top_last, bottom_last
    else:
        step_type, winner, loser = "bottom", bottom_last, top_last

    new_lengths = {a: iet.length(a) for a in perm.alphabet}
    new_lengths[winner] = new_lengths[winner] - iet.length(loser)

    if step_type == "top":
        # loser leaves the end of the bottom row, re-enters after the winner
        row = [a for a in perm.bottom if a != loser]
        row.insert(row.index(winner) + 1, loser)
        new_perm = Permutation(perm.top, row, alphabet=perm.alphabet)
    else:
        row = [a for a in perm.top if a != loser]
        row.insert(row.index(winner) + 1, loser)
        new_perm = Permutation(row, perm.bottom, alphabet=perm.alphabet)

    d = perm.d
    wi = perm.alphabet.index(winner)
    li = perm.alphabet.index(loser)
    matrix = tuple(tuple(1 if (i == j or (i == wi and j == li)) else 0
                         for j in range(d)) for i in range(d))
    return Iet(new_perm, new_lengths), matrix, step_type


# ---------------------------------------------------------------------------
# induction traces
# ---------------------------------------------------------------------------

class InductionTrace:
    """Orbit of an IET under unnormalized Rauzy-Veech induction.

    Step k maps iet(k) to iet(k+1) with matrix B_k; products
    B^(m,n) = B_m ... B_{n-1} are cached.  Heights follow the dual cocycle:
    h^(n) = (B^(n))^T (1,...,1), which is also the vector of column sums of
    B^(0,n) and the vector of measured first-return times.

    Construction (extend) is sequential; once extended, a trace may be
    shared by concurrent readers — the product cache only ever fills in
    values that every reader would compute identically.
    """

    def __init__(self, base: Iet):
        self.base = base
        self._iets = [base]
        self._matrices = []
        self._types = []
        self._heights = [(1,) * base.perm.d]
        self._prefix = {0: mat_identity(base.perm.d)}
        self._window_cache = {}

    @property
    def depth(self) -> int:
        return len(self._matrices)

    def extend(self, n: int) -> "InductionTrace":
        """Extend the trace to n steps (RVUndefinedError propagates)."""
        while self.depth < n:
            nxt, matrix, step_type = rv_step(self._iets[-1])
            self._iets.append(nxt)
            self._matrices.append(matrix)
            self._types.append(step_type)
            h = self._heights[-1]
            d = self.base.perm.d
            mt = mat_transpose(matrix)
            self._heights.append(tuple(sum(mt[i][k] * h[k] for k in range(d))
                                       for i in range(d)))
            self._prefix[self.depth] = mat_mul(self._prefix[self.depth - 1],
                                               matrix)
        return self

    def iet(self, n: int) -> Iet:
        self.extend(n)
        return self._iets[n]

    def step_matrix(self, k: int):
        self.extend(k + 1)
        return self._matrices[k]

    def step_type(self, k: int) -> str:
        self.extend(k + 1)
        return self._types[k]

    def type_word(self, n: Optional[int] = None) -> str:
        if n is not None:
            self.extend(n)
        return "".join("t" if t == "top" else "b" for t in self._types)

    def product(self, m: int, n: int):
        """B^(m,n) = B_m B_{m+1} ... B_{n-1}; B^(n,n) = identity."""
        if m > n:
            raise ValueError("need m <= n")
        self.extend(n)
        if m == 0:
            return self._prefix[n]
        key = (m, n)
        cached = self._window_cache.get(key)
        if cached is None:
            cached = mat_identity(self.base.perm.d)
            for k in range(m, n):
                cached = mat_mul(cached, self._matrices[k])
            self._window_cache[key] = cached
        return cached

    def heights(self, n: int):
        self.extend(n)
        return self._heights[n]

    def q(self, n: int) -> int:
        return max(self.heights(n))

    def interval_length(self, n: int) -> ExactScalar:
        return self.iet(n).total

    def lengths(self, n: int):
        return self.iet(n).lengths

    def check_cocycle(self, n: int) -> bool:
        """lambda^(0) = B^(0,n) lambda^(n), exactly."""
        prod = self.product(0, n)
        lam_n = self.iet(n).lengths
        lam_0 = self.base.lengths
        d = self.base.perm.d
        for i in range(d):
            acc = ExactScalar(0)
            for j in range(d):
                if prod[i][j]:
                    acc = acc + lam_n[j] * prod[i][j]
            if acc != lam_0[i]:
                return False
        return True


def induct(trace: InductionTrace, n: int) -> InductionTrace:
    return trace.extend(n)


# ---------------------------------------------------------------------------
# Rohlin towers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tower:
    label: str
    height: int
    base_left: ExactScalar
    base_right: ExactScalar
    floors: tuple  # tuple of (left, right) pairs, floor i = T^i(base)


class TowerSystem:
    """Rohlin towers over the step-n induced IET.

    Floor i of the tower over I^(n)_a is T^i I^(n)_a, 0 <= i < h_a; the
    floors of all towers partition [0, total) exactly.
    """

    def __init__(self, towers: list[Tower], total: ExactScalar, step: int):
        self.towers = towers
        self.total = total
        self.step = step

    def all_floors(self):
        for tower in self.towers:
            for floor in tower.floors:
                yield floor + (tower.label,)

    def check_partition(self) -> bool:
        floors = sorted(self.all_floors(), key=lambda f: f[0])
        x = ExactScalar(0)
        for left, right, _ in floors:
            if left != x:
                return False
            x = right
        return x == self.total

    def floor_count(self) -> int:
        return sum(t.height for t in self.towers)


def _translate_interval(iet: Iet, left: ExactScalar, right: ExactScalar):
    """Image of [left, right) under T, requiring it inside one continuity
    interval (true for tower floors below the top)."""
    a = iet.interval_of(left)
    if right > iet.right(a):
        raise IetDomainError("interval crosses a discontinuity")
    w = iet.translation(a)
    return left + w, right + w


def towers(trace: InductionTrace, n: int) -> TowerSystem:
    """Exact tower system at step n; partition invariant verified on return."""
    trace.extend(n)
    base_iet = trace.base
    ind = trace.iet(n)
    heights = trace.heights(n)
    out = []
    for idx, a in enumerate(base_iet.perm.alphabet):
        left = ind.left(a)
        right = ind.right(a)
        floors = [(left, right)]
        for _ in range(heights[idx] - 1):
            left, right = _translate_interval(base_iet, left, right)
            floors.append((left, right))
        out.append(Tower(a, heights[idx], floors[0][0], floors[0][1],
                         tuple(floors)))
    system = TowerSystem(out, base_iet.total, n)
    if not system.check_partition():
        raise AssertionError("tower floors do not partition the interval")
    return system


def return_time_oracle(trace: InductionTrace, n: int, label: str) -> int:
    """First-return time of the midpoint of I^(n)_label, by direct iteration.

    Contract: equals h^(n)_label = column sum of B^(0,n) for the label.
    The walk runs on integerized exact coordinates.
    """
    from .iet import IntegerOrbit

    trace.extend(n)
    ind = trace.iet(n)
    x = (ind.left(label) + ind.right(label)) / 2
    orbit = IntegerOrbit(trace.base, x)
    cut = orbit.pair_of(ind.total)
    orbit.step_forward()
    while not orbit.less_than(cut):
        orbit.step_forward()
    return orbit.steps


# ---------------------------------------------------------------------------
# balance / positivity / acceleration
# ---------------------------------------------------------------------------

def _as_ratio(nu) -> Fraction:
    if isinstance(nu, Fraction):
        return nu
    if isinstance(nu, int):
        return Fraction(nu)
    if isinstance(nu, str):
        return Fraction(nu)
    if isinstance(nu, float):
        return Fraction(nu).limit_denominator(10 ** 6)
    raise TypeError("balance ratio must be exact (int/Fraction/str)")


def balance_check(trace: InductionTrace, n: int, nu) -> bool:
    """nu-balance at step n: all length ratios and height ratios in [1/nu, nu].

    Exact comparisons; equivalent to max <= nu * min on both vectors.
    """
    nu = _as_ratio(nu)
    trace.extend(n)
    lens = trace.iet(n).lengths
    if exact_max(lens) > exact_min(lens) * nu:
        return False
    hs = trace.heights(n)
    return max(hs) <= nu * min(hs)


def positivity_check(trace: InductionTrace, m: int, n: int) -> bool:
    """All entries of B^(m,n) strictly positive."""
    return is_positive(trace.product(m, n))


class AccelTimes:
    """A selected subsequence {n_l} of balanced induction times.

    Indexing is 1-based: l ranges over 1..count with n_1 the first
    selected time.  A(l) = B^(n_l, n_{l+1}) is defined for 1 <= l < count;
    q(l) = max_a h^(n_l)_a.
    """

    def __init__(self, trace: InductionTrace, times: list[int], nu: Fraction,
                 lbar: Optional[int], diagnostic: str = ""):
        self.trace = trace
        self.times = times
        self.nu = nu
        self.lbar = lbar
        self.diagnostic = diagnostic

    @property
    def count(self) -> int:
        return len(self.times)

    def time(self, ell: int) -> int:
        if not 1 <= ell <= self.count:
            raise IndexError("accel index %d outside 1..%d" %
                             (ell, self.count))
        return self.times[ell - 1]

    def q(self, ell: int) -> int:
        return self.trace.q(self.time(ell))

    def heights(self, ell: int):
        return self.trace.heights(self.time(ell))

    def iet(self, ell: int) -> Iet:
        return self.trace.iet(self.time(ell))

    def interval_length(self, ell: int) -> ExactScalar:
        return self.trace.interval_length(self.time(ell))

    def A(self, ell: int):
        """Accelerated cocycle matrix A_l = B^(n_l, n_{l+1})."""
        return self.trace.product(self.time(ell), self.time(ell + 1))

    def A_norm(self, ell: int) -> int:
        return col_norm(self.A(ell))

    def window(self, ell: int, span: int):
        """B^(n_l, n_{l+span})."""
        return self.trace.product(self.time(ell), self.time(ell + span))

    def __repr__(self):
        return ("AccelTimes(count=%d, nu=%s, lbar=%s)"
                % (self.count, self.nu, self.lbar))


def select_accel_times(trace: InductionTrace, nu, lbar_max: int,
                       depth: Optional[int] = None) -> AccelTimes:
    """All nu-balanced times n >= 1 up to `depth`, plus the smallest window
    width lbar <= lbar_max making every lbar-window of the selected
    subsequence positive.

    Cylinder-return constructions yield such sequences non-constructively;
    selecting every balanced time and verifying positivity empirically
    yields exactly the two properties (balance, windowed positivity) the
    downstream estimates consume.
    """
    nu = _as_ratio(nu)
    if depth is None:
        depth = trace.depth
    trace.extend(depth)
    times = [n for n in range(1, depth + 1) if balance_check(trace, n, nu)]
    if not times:
        return AccelTimes(trace, [], nu, None,
                          "no %s-balanced time within depth %d" % (nu, depth))
    lbar = None
    for cand in range(1, lbar_max + 1):
        ok = all(
            is_positive(trace.product(times[i], times[i + cand]))
            for i in range(len(times) - cand)
        )
        if ok and len(times) > cand:
            lbar = cand
            break
    diag = "" if lbar is not None else (
        "no window width <= %d achieves positivity" % lbar_max)
    return AccelTimes(trace, times, nu, lbar, diag)


def zorich_times(trace: InductionTrace, depth: Optional[int] = None) -> list:
    """Ends of maximal same-type runs of induction steps.

    Grouping consecutive steps of one type is the classical acceleration
    with finite invariant mass; it is a special case of time selection and
    feeds the same AccelTimes machinery.
    """
    if depth is None:
        depth = trace.depth
    trace.extend(depth)
    out = []
    for k in range(depth):
        if k + 1 == depth or trace.step_type(k + 1) != trace.step_type(k):
            out.append(k + 1)
    return out


# ---------------------------------------------------------------------------
# Hilbert projective metric and distortion
# ---------------------------------------------------------------------------

def hilbert_distance(u, v) -> float:
    """d_H(u, v) = log( max_i(u_i/v_i) / min_i(u_i/v_i) ), coordinates > 0.

    Accepts exact scalars, Fractions, ints or floats; the max/min ratio is
    formed exactly when the inputs are exact.
    """
    if len(u) != len(v):
        raise ValueError("vectors of different lengths")

    def as_exact(x):
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactScalar(x)
        return None

    eu = [as_exact(x) for x in u]
    ev = [as_exact(x) for x in v]
    if all(x is not None for x in eu) and all(x is not None for x in ev):
        for x in eu + ev:
            if not x.sign() > 0:
                raise MatrixDomainError("coordinates must be positive")
        ratios = [a / b for a, b in zip(eu, ev)]
        hi = exact_max(ratios)
        lo = exact_min(ratios)
        return math.log(float(hi / lo))
    fu = [float(x) for x in u]
    fv = [float(x) for x in v]
    if min(fu) <= 0 or min(fv) <= 0:
        raise MatrixDomainError("coordinates must be positive")
    ratios = [a / b for a, b in zip(fu, fv)]
    return math.log(max(ratios) / min(ratios))


def projective_diameter(a) -> float:
    """diam_H of the image simplex of a non-negative matrix.

    Finite exactly when the matrix is strictly positive; the supremum over
    the simplex is attained on vertex images, i.e. over column pairs.
    """
    d = len(a)
    cols = list(zip(*a))
    for col in cols:
        if all(e == 0 for e in col):
            raise MatrixDomainError("matrix has a zero column")
    if not is_positive(a):
        return math.inf
    best = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            ratios = [Fraction(cols[i][k], cols[j][k]) for k in range(d)]
            val = math.log(float(max(ratios) / min(ratios)))
            if val > best:
                best = val
    return best


def nu_col(c) -> Fraction:
    """Row-wise entry-ratio bound nu_col(C) = max_{i,j,k} C_ij / C_ik."""
    if not is_positive(c):
        raise MatrixDomainError("nu_col requires a strictly positive matrix")
    best = Fraction(0)
    for row in c:
        hi = max(row)
        lo = min(row)
        val = Fraction(hi, lo)
        if val > best:
            best = val
    return best


def jacobian(dmat, lam) -> float:
    """Jacobian |D lambda|^(-d) of the projectivized action on the simplex."""
    d = len(dmat)
    cols = list(zip(*dmat))
    for col in cols:
        if all(e == 0 for e in col):
            raise MatrixDomainError("matrix has a zero column")
        if any(e < 0 for e in col):
            raise MatrixDomainError("matrix must be non-negative")
    vals = [float(x) for x in lam]
    if min(vals) <= 0:
        raise MatrixDomainError("simplex point must be strictly positive")
    image = [sum(dmat[i][j] * vals[j] for j in range(d)) for i in range(d)]
    return sum(image) ** (-d)
