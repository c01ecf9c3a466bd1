import math
import random
from fractions import Fraction

import pytest

from ietflow.exact import ExactScalar
from ietflow.fixtures import (
    bounded_type_3iet,
    golden_rotation,
    rotation_third,
    symmetric_3iet,
)
from ietflow.iet import Iet, Permutation, first_return_map
from ietflow.rauzy import (
    AccelTimes,
    InductionTrace,
    MatrixDomainError,
    RVUndefinedError,
    balance_check,
    col_norm,
    hilbert_distance,
    induct,
    is_positive,
    jacobian,
    mat_det,
    mat_identity,
    mat_mul,
    mat_vec,
    nu_col,
    positivity_check,
    projective_diameter,
    return_time_oracle,
    rv_step,
    select_accel_times,
    towers,
)

F = Fraction


def fib(n):
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


class TestRvStep:
    def test_symmetric_3iet_example(self):
        iet = symmetric_3iet()
        new, matrix, step_type = rv_step(iet)
        # bottom interval A (1/2) beats top interval C (1/6)
        assert step_type == "bottom"
        lengths = {a: new.length(a) for a in "ABC"}
        assert lengths["A"] == ExactScalar(F(1, 3))
        assert lengths["B"] == ExactScalar(F(1, 3))
        assert lengths["C"] == ExactScalar(F(1, 6))
        assert new.total == ExactScalar(F(5, 6))
        # B = identity plus extra unit in position (A, C)
        expect = ((1, 0, 1), (0, 1, 0), (0, 0, 1))
        assert matrix == expect
        # lambda = B lambda' exactly
        lam = mat_vec(matrix, new.lengths)
        assert tuple(lam) == iet.lengths

    def test_first_return_oracle(self):
        # the induced map must equal the first-return map to the new interval
        iet = symmetric_3iet()
        new, _, _ = rv_step(iet)
        hit = first_return_map(iet, new.total)
        for k in range(1, 40):
            x = ExactScalar(F(k, 48))
            if not x < new.total:
                continue
            y, _ = hit(x)
            assert y == new.evaluate(x)

    def test_first_return_oracle_golden(self):
        iet = golden_rotation()
        new, _, _ = rv_step(iet)
        hit = first_return_map(iet, new.total)
        for k in range(1, 20):
            x = ExactScalar(F(k, 60))
            if not x < new.total:
                continue
            y, _ = hit(x)
            assert y == new.evaluate(x)

    def test_golden_alternates_and_fibonacci_lengths(self):
        trace = InductionTrace(golden_rotation()).extend(12)
        word = trace.type_word()
        assert word in ("tb" * 6, "bt" * 6)
        # |I^(n-1)| = |I^(n)| + |I^(n+1)| exactly (golden continued fraction
        # [0;1,1,1,...]: every step removes the next remainder)
        for n in range(1, 11):
            lhs = trace.interval_length(n - 1)
            rhs = trace.interval_length(n) + trace.interval_length(n + 1)
            assert lhs == rhs

    def test_rational_rotation_becomes_undefined(self):
        trace = InductionTrace(rotation_third())
        with pytest.raises(RVUndefinedError):
            trace.extend(3)
        assert trace.depth < 3

    def test_determinant_is_unimodular(self):
        trace = InductionTrace(golden_rotation()).extend(10)
        t2 = InductionTrace(bounded_type_3iet()).extend(10)
        for tr in (trace, t2):
            for k in range(tr.depth):
                assert mat_det(tr.step_matrix(k)) in (1, -1)
            assert mat_det(tr.product(0, tr.depth)) in (1, -1)


class TestInduct:
    def test_depth_zero_is_trivial(self):
        trace = InductionTrace(symmetric_3iet())
        assert trace.product(0, 0) == mat_identity(3)
        assert trace.heights(0) == (1, 1, 1)

    def test_heights_after_one_step(self):
        trace = induct(InductionTrace(symmetric_3iet()), 1)
        assert trace.heights(1) == (1, 1, 2)
        # cross-check: the return time of I^(1)_C is 2
        assert return_time_oracle(trace, 1, "C") == 2

    def test_golden_heights_are_fibonacci(self):
        trace = InductionTrace(golden_rotation()).extend(21)
        # fix the offset at small depth with the return-time oracle
        t1 = max(return_time_oracle(trace, 1, a) for a in "AB")
        assert t1 == trace.q(1) == 2 == fib(3)
        assert trace.q(20) == fib(22) == 17711

    def test_cocycle_identity(self):
        for base in (golden_rotation(), bounded_type_3iet(), symmetric_3iet()):
            trace = InductionTrace(base)
            try:
                trace.extend(15)
            except RVUndefinedError:
                pass
            for n in range(trace.depth + 1):
                assert trace.check_cocycle(n)

    def test_heights_equal_column_sums(self):
        trace = InductionTrace(bounded_type_3iet()).extend(12)
        for n in range(13):
            prod = trace.product(0, n)
            sums = tuple(sum(col) for col in zip(*prod))
            assert sums == trace.heights(n)


class TestTowers:
    def test_depth_zero(self):
        iet = symmetric_3iet()
        system = towers(InductionTrace(iet), 0)
        assert all(t.height == 1 for t in system.towers)
        assert system.floor_count() == 3
        assert system.check_partition()

    def test_3iet_one_step(self):
        system = towers(InductionTrace(symmetric_3iet()), 1)
        heights = {t.label: t.height for t in system.towers}
        assert heights == {"A": 1, "B": 1, "C": 2}
        assert system.floor_count() == 4
        assert system.check_partition()

    def test_golden_fibonacci_towers(self):
        trace = InductionTrace(golden_rotation())
        system = towers(trace, 5)
        hs = sorted(t.height for t in system.towers)
        assert hs == [fib(5), fib(6)] or hs == [fib(6), fib(7)]
        assert system.check_partition()

    def test_partition_many_depths(self):
        trace = InductionTrace(bounded_type_3iet())
        for n in range(0, 11):
            assert towers(trace, n).check_partition()


class TestReturnTimes:
    def test_depth_zero_returns_one(self):
        trace = InductionTrace(symmetric_3iet())
        for a in "ABC":
            assert return_time_oracle(trace, 0, a) == 1

    def test_golden_matches_column_sums(self):
        trace = InductionTrace(golden_rotation()).extend(10)
        prod = trace.product(0, 10)
        for idx, a in enumerate("AB"):
            measured = return_time_oracle(trace, 10, a)
            assert measured == sum(row[idx] for row in prod)


class TestBalance:
    def test_equal_lengths_fully_balanced(self):
        perm = Permutation(["A", "B", "C"], ["C", "B", "A"])
        trace = InductionTrace(Iet(perm, [F(1, 3)] * 3))
        assert balance_check(trace, 0, 1)

    def test_golden_balanced_nu3(self):
        trace = InductionTrace(golden_rotation()).extend(20)
        for n in range(21):
            assert balance_check(trace, n, 3)

    def test_3iet_step1_nu2(self):
        trace = InductionTrace(symmetric_3iet()).extend(1)
        assert balance_check(trace, 1, 2)


class TestPositivity:
    def test_single_step_not_positive_for_d3(self):
        trace = InductionTrace(symmetric_3iet()).extend(1)
        assert not positivity_check(trace, 0, 1)

    def test_golden_two_step_windows_positive(self):
        trace = InductionTrace(golden_rotation()).extend(12)
        for m in range(11):
            assert positivity_check(trace, m, m + 2)

    def test_identity_window_not_positive(self):
        trace = InductionTrace(golden_rotation()).extend(3)
        assert not positivity_check(trace, 2, 2)


class TestAccelSelection:
    def test_golden_all_steps_lbar_2(self):
        trace = InductionTrace(golden_rotation()).extend(20)
        accel = select_accel_times(trace, 3, lbar_max=4)
        assert accel.times == list(range(1, 21))
        assert accel.lbar == 2

    def test_unbalanced_stretch_skipped(self):
        # near-degenerate rotation: long unbalanced stretch in the middle
        perm = Permutation(["A", "B"], ["B", "A"])
        iet = Iet(perm, [F(499, 1000), F(501, 1000)])
        trace = InductionTrace(iet)
        try:
            trace.extend(40)
        except RVUndefinedError:
            pass
        accel = select_accel_times(trace, 3, lbar_max=6, depth=trace.depth)
        assert len(accel.times) < trace.depth  # something was skipped
        for n in accel.times:
            assert balance_check(trace, n, 3)
        if accel.lbar is not None:
            for i in range(len(accel.times) - accel.lbar):
                assert is_positive(
                    trace.product(accel.times[i], accel.times[i + accel.lbar]))

    def test_empty_trace_empty_selection(self):
        trace = InductionTrace(golden_rotation())
        accel = select_accel_times(trace, 3, lbar_max=3, depth=0)
        assert accel.times == []
        assert accel.lbar is None
        assert accel.diagnostic


class TestHilbert:
    def test_zero_on_equal(self):
        assert hilbert_distance([F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]) == 0.0

    def test_spec_values(self):
        d = hilbert_distance([F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)])
        assert d == pytest.approx(math.log(4), rel=1e-12)
        d = hilbert_distance([F(1, 2), F(1, 2)], [F(1, 4), F(3, 4)])
        assert d == pytest.approx(math.log(3), rel=1e-12)

    def test_symmetry_and_projectivity(self):
        u = [F(1, 5), F(3, 10), F(1, 2)]
        v = [F(1, 3), F(1, 3), F(1, 3)]
        assert hilbert_distance(u, v) == pytest.approx(hilbert_distance(v, u))
        assert hilbert_distance(u, [2 * x for x in u]) == 0.0

    def test_contraction_random(self):
        rng = random.Random(7)
        for _ in range(300):
            d = rng.choice([2, 3, 4])
            a = tuple(tuple(rng.randint(0, 3) for _ in range(d))
                      for _ in range(d))
            cols_ok = all(any(a[i][j] for i in range(d)) for j in range(d))
            rows_ok = all(any(row) for row in a)
            if not (cols_ok and rows_ok):
                continue
            u = [F(rng.randint(1, 50)) for _ in range(d)]
            v = [F(rng.randint(1, 50)) for _ in range(d)]
            # compare max/min ratios exactly to dodge float log rounding
            def ratio(p, q):
                r = [Fraction(pi) / Fraction(qi) for pi, qi in zip(p, q)]
                return max(r) / min(r)
            im_u = [sum(a[i][j] * u[j] for j in range(d)) for i in range(d)]
            im_v = [sum(a[i][j] * v[j] for j in range(d)) for i in range(d)]
            assert ratio(im_u, im_v) <= ratio(u, v)
            if is_positive(a) and ratio(u, v) > 1:
                assert ratio(im_u, im_v) < ratio(u, v)


class TestProjectiveDiameter:
    def test_identity_infinite(self):
        assert projective_diameter(mat_identity(3)) == math.inf

    def test_positive_2x2_with_sampling_oracle(self):
        a = ((2, 1), (1, 2))
        diam = projective_diameter(a)
        assert diam == pytest.approx(math.log(4), rel=1e-12)
        rng = random.Random(3)
        sup = 0.0
        for k in range(10 ** 4):
            # bias a share of the samples toward the simplex corners,
            # where the supremum of the image diameter is approached
            if k % 4 == 0:
                s = 10.0 ** -rng.uniform(1, 8)
                t = 10.0 ** -rng.uniform(1, 8)
                lam, mu = [s, 1 - s], [1 - t, t]
            else:
                s, t = rng.random(), rng.random()
                lam, mu = [s, 1 - s], [t, 1 - t]
            if min(lam) < 1e-12 or min(mu) < 1e-12:
                continue
            im_l = [2 * lam[0] + lam[1], lam[0] + 2 * lam[1]]
            im_m = [2 * mu[0] + mu[1], mu[0] + 2 * mu[1]]
            sup = max(sup, hilbert_distance(im_l, im_m))
        assert sup <= diam + 1e-9
        assert sup == pytest.approx(diam, abs=1e-3)

    def test_rank_one_zero_diameter(self):
        assert projective_diameter(((1, 1), (1, 1))) == 0.0

    def test_zero_column_rejected(self):
        with pytest.raises(MatrixDomainError):
            projective_diameter(((1, 0), (1, 0)))

    def test_monotone_under_products(self):
        rng = random.Random(11)
        for _ in range(100):
            d = rng.choice([2, 3])
            a = tuple(tuple(rng.randint(1, 5) for _ in range(d))
                      for _ in range(d))
            b = tuple(tuple(rng.randint(1, 5) for _ in range(d))
                      for _ in range(d))
            dab = projective_diameter(mat_mul(a, b))
            assert dab <= min(projective_diameter(a),
                              projective_diameter(b)) + 1e-9


class TestNuCol:
    def test_constant_matrix(self):
        assert nu_col(((3, 3), (3, 3))) == 1

    def test_spec_example(self):
        assert nu_col(((1, 2), (3, 4))) == 2

    def test_product_bound_random(self):
        rng = random.Random(5)
        for _ in range(1000):
            d = rng.choice([2, 3])
            c = tuple(tuple(rng.randint(0, 4) for _ in range(d))
                      for _ in range(d))
            dm = tuple(tuple(rng.randint(1, 6) for _ in range(d))
                       for _ in range(d))
            if not is_positive(mat_mul(c, dm)):
                continue
            assert nu_col(mat_mul(c, dm)) <= nu_col(dm)

    def test_rejects_nonpositive(self):
        with pytest.raises(MatrixDomainError):
            nu_col(((1, 0), (1, 1)))


class TestJacobian:
    def test_identity_unit_simplex(self):
        assert jacobian(mat_identity(2), [0.5, 0.5]) == pytest.approx(1.0)

    def test_spec_example(self):
        assert jacobian(((2, 1), (1, 2)), [0.5, 0.5]) == pytest.approx(1 / 9)

    def test_distortion_bound_sampled(self):
        rng = random.Random(13)
        for _ in range(20):
            d = rng.choice([2, 3])
            mat = tuple(tuple(rng.randint(1, 6) for _ in range(d))
                        for _ in range(d))
            bound = float(nu_col(mat)) ** d
            vals = []
            for _ in range(500):
                w = [rng.random() + 1e-9 for _ in range(d)]
                s = sum(w)
                vals.append(jacobian(mat, [x / s for x in w]))
            assert max(vals) / min(vals) <= bound * (1 + 1e-9)

    def test_finite_difference_oracle(self):
        # unimodular cocycle products: chart Jacobian det == |D lambda|^-d
        trace = InductionTrace(golden_rotation()).extend(6)
        mat = trace.product(0, 4)
        lam = [0.35, 0.65]
        h = 1e-6

        def chart(x):
            v = [x, 1 - x]
            im = [sum(mat[i][j] * v[j] for j in range(2)) for i in range(2)]
            s = im[0] + im[1]
            return im[0] / s

        numeric = abs(chart(lam[0] + h) - chart(lam[0] - h)) / (2 * h)
        assert numeric == pytest.approx(jacobian(mat, lam), rel=1e-6)

    def test_finite_difference_oracle_3d(self):
        trace = InductionTrace(bounded_type_3iet()).extend(6)
        mat = trace.product(0, 6)
        lam = [0.3, 0.45, 0.25]
        h = 1e-6

        def chart(x, y):
            v = [x, y, 1 - x - y]
            im = [sum(mat[i][j] * v[j] for j in range(3)) for i in range(3)]
            s = sum(im)
            return im[0] / s, im[1] / s

        j00 = (chart(lam[0] + h, lam[1])[0] - chart(lam[0] - h, lam[1])[0]) / (2 * h)
        j01 = (chart(lam[0], lam[1] + h)[0] - chart(lam[0], lam[1] - h)[0]) / (2 * h)
        j10 = (chart(lam[0] + h, lam[1])[1] - chart(lam[0] - h, lam[1])[1]) / (2 * h)
        j11 = (chart(lam[0], lam[1] + h)[1] - chart(lam[0], lam[1] - h)[1]) / (2 * h)
        det = abs(j00 * j11 - j01 * j10)
        assert det == pytest.approx(jacobian(mat, lam), rel=1e-5)


class TestZorich:
    def test_golden_alternating_runs(self):
        from ietflow.rauzy import zorich_times
        trace = InductionTrace(golden_rotation()).extend(10)
        # the golden word alternates, so every step ends a run
        assert zorich_times(trace) == list(range(1, 11))

    def test_run_grouping(self):
        from ietflow.rauzy import zorich_times
        trace = InductionTrace(bounded_type_3iet()).extend(12)
        times = zorich_times(trace)
        word = trace.type_word()
        # each selected time is the end of a maximal same-type run
        for t in times[:-1]:
            assert word[t - 1] != word[t]


class TestIntegerOrbit:
    def test_matches_exact_evaluate(self):
        from ietflow.iet import IntegerOrbit
        for iet in (golden_rotation(), bounded_type_3iet()):
            x = F(13, 97)
            orbit = IntegerOrbit(iet, x)
            ref = ExactScalar(x)
            for _ in range(200):
                orbit.step_forward()
                ref = iet.evaluate(ref)
                assert orbit.value() == ref
            for _ in range(400):
                orbit.step_backward()
                ref = iet.evaluate_inverse(ref)
                assert orbit.value() == ref

    def test_distance_comparisons(self):
        from ietflow.iet import IntegerOrbit
        iet = golden_rotation()
        orbit = IntegerOrbit(iet, F(3, 7))
        cut = orbit.pair_of(iet.left("B"))
        d = orbit.abs_distance(cut)
        exact = abs(ExactScalar(F(3, 7)) - iet.left("B"))
        assert orbit.to_float(d) == pytest.approx(float(exact))

    def test_length_decay_along_positive_windows(self):
        # |I^(n_l)| >= d^k |I^(n_{l + k lbar})| along the positive windows
        from ietflow.rauzy import select_accel_times
        trace = InductionTrace(bounded_type_3iet()).extend(30)
        accel = select_accel_times(trace, 4, lbar_max=6)
        d = 3
        lbar = accel.lbar
        for ell in range(1, accel.count - 3 * lbar):
            for k in (1, 2, 3):
                lhs = accel.interval_length(ell)
                rhs = accel.interval_length(ell + k * lbar) * (d ** k)
                assert not lhs < rhs


class TestBoundedTypeFixture:
    def test_periodic_word(self):
        trace = InductionTrace(bounded_type_3iet()).extend(18)
        assert trace.type_word() == "tbtbtb" * 3

    def test_self_similar(self):
        iet = bounded_type_3iet()
        trace = InductionTrace(iet).extend(6)
        after = trace.iet(6)
        rho = ExactScalar(3, 2, 2)
        assert after.perm.top == iet.perm.top
        assert after.perm.bottom == iet.perm.bottom
        assert tuple(v * rho for v in after.lengths) == iet.lengths

    def test_loop_matrix(self):
        from ietflow.fixtures import BOUNDED3_LOOP_MATRIX
        trace = InductionTrace(bounded_type_3iet()).extend(6)
        assert trace.product(0, 6) == BOUNDED3_LOOP_MATRIX

    def test_norms(self):
        assert col_norm(((1, 1, 1), (2, 4, 1), (2, 3, 2))) == 8
