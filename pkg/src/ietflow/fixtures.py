"""Reference IETs and roofs used across tests, the CLI and benchmarks.

Two bounded-type bases:

* the golden rotation, the 2-IET realizing x -> x + (sqrt(5)-1)/2 mod 1,
  whose induction matrices alternate between the two elementary types and
  whose heights are consecutive Fibonacci numbers;

* a symmetric 3-IET over Q(sqrt(2)) fixed by the 6-step Rauzy loop
  't b t b t b' at (ABC / CBA).  Its length vector is the Perron
  eigenvector of the loop matrix [[1,1,1],[2,4,1],[2,3,2]] (eigenvalue
  3 + 2*sqrt(2); the characteristic polynomial has the root 1, which is
  what keeps the eigenvector inside a quadratic field).  The expansion is
  periodic, so the IET is of bounded type and satisfies Keane.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import ExactScalar
from .iet import Iet, Permutation
from .roof import RoofSpec

F = Fraction

#: Matrix of the periodic Rauzy loop of the bounded-type 3-IET.
BOUNDED3_LOOP_WORD = "tbtbtb"
BOUNDED3_LOOP_MATRIX = ((1, 1, 1), (2, 4, 1), (2, 3, 2))


def golden_rotation() -> Iet:
    """Rotation by (sqrt(5)-1)/2 as a 2-IET over Q(sqrt(5))."""
    perm = Permutation(["A", "B"], ["B", "A"])
    lam_a = ExactScalar(F(3, 2), F(-1, 2), 5)
    lam_b = ExactScalar(F(-1, 2), F(1, 2), 5)
    return Iet(perm, [lam_a, lam_b])


def bounded_type_3iet() -> Iet:
    """Self-similar symmetric 3-IET over Q(sqrt(2)), bounded type."""
    perm = Permutation(["A", "B", "C"], ["C", "B", "A"])
    lam_a = ExactScalar(3, -2, 2)            # 3 - 2 sqrt(2)
    lam_bc = ExactScalar(-1, 1, 2)           # sqrt(2) - 1
    return Iet(perm, [lam_a, lam_bc, lam_bc])


def symmetric_3iet(lengths=(F(1, 2), F(1, 3), F(1, 6))) -> Iet:
    perm = Permutation(["A", "B", "C"], ["C", "B", "A"])
    return Iet(perm, list(lengths))


def rotation_third() -> Iet:
    perm = Permutation(["A", "B"], ["B", "A"])
    return Iet(perm, [F(2, 3), F(1, 3)])


def asymmetric_log_roof(iet: Iet, gap=1, c0=1) -> RoofSpec:
    """Single asymmetric logarithmic singularity with C- - C+ = gap.

    The singularity sits at the right endpoint of the first exchanged
    interval (approached from the left), i.e. at the first interior
    discontinuity; every other one-sided constant vanishes.
    """
    first = iet.perm.top[0]
    cminus = {a: F(0) for a in iet.perm.alphabet}
    cminus[first] = F(gap)
    cplus = {a: F(0) for a in iet.perm.alphabet}
    return RoofSpec(c0=F(c0), cplus=cplus, cminus=cminus)


def constant_roof(iet: Iet, c0=1) -> RoofSpec:
    zero = {a: F(0) for a in iet.perm.alphabet}
    return RoofSpec(c0=F(c0), cplus=dict(zero), cminus=dict(zero))
