"""
Tests for the Welch function, its symmetries and the constructive solvers
"""
import pytest
from pydantic import ValidationError

from app.errors import (
    CountMismatchError,
    EvenGError,
    NonUnitError,
    NonUnitXError,
    NotASolutionError,
    NotPrimitiveRootError,
    OddPrimeRequiredError,
    PrimeTwoRequiredError,
)
from app.services.oracle import scan_all_pairs, scan_fixed_c, scan_fixed_x, scan_value_set
from app.services.welch import (
    Query,
    QueryKind,
    SolutionPair,
    SolutionReport,
    WelchInstance,
    c_for_minus_one,
    c_period,
    c_values_for_fixed_x,
    check_reflection,
    count_c_for_fixed_x,
    find_doubles,
    inverse_instance,
    inverse_pair,
    reflection_c,
    shift_solution,
    solution_xs_mod_p,
    solve_all_pairs,
    solve_fixed_c,
    solve_fixed_x,
    solve_p2,
    unique_c_for_x,
    value_set_at_p,
    value_set_solutions,
    welch_f,
    welch_table,
    x_period,
)

# f(x, c) for p = 7, g = 2, e = 1, x = 1..7, c = 1..3
TABLE_1 = [
    [1, 3, 0],
    [2, 6, 0],
    [5, 6, 1],
    [5, 0, 4],
    [6, 3, 4],
    [2, 3, 5],
    [2, 4, 1],
]

T1_PAIRS = [(1, 3), (2, 3), (4, 2), (8, 2), (9, 2), (11, 1), (15, 1), (16, 1), (18, 3)]


class TestWelchInstance:
    def test_orders(self, make_instance):
        instance = make_instance(11, 2, 3)
        assert (instance.m, instance.ord_pe) == (5, 5)
        assert instance.summary() == {"p": 11, "e": 2, "g": 3, "m": 5, "ord_pe": 5}

    def test_non_unit(self, make_instance):
        with pytest.raises(NonUnitError):
            make_instance(7, 1, 14)

    def test_even_g(self, make_instance):
        with pytest.raises(EvenGError):
            make_instance(2, 3, 4)

    def test_inconsistent_orders(self, table1_instance):
        with pytest.raises(ValidationError):
            WelchInstance(modulus=table1_instance.modulus, g=table1_instance.g, m=4, ord_pe=3)


class TestWelchF:
    def test_table(self, table1_instance):
        table = welch_table(table1_instance)
        assert table.xs == list(range(1, 8))
        assert table.cs == [1, 2, 3]
        assert table.rows == TABLE_1

    def test_examples(self, table1_instance, make_instance):
        assert welch_f(table1_instance, 3, 2).value == 6
        assert welch_f(table1_instance, 7, 3).value == 1
        assert welch_f(make_instance(7, 2, 1), 1, 5).value == 0

    def test_negative_exponent(self, table1_instance):
        # 2^-1 = 4 mod 7
        assert welch_f(table1_instance, -1, 1).value == (4 + 1) % 7

    def test_reduced_exponent_matches_direct_power(self, make_instance):
        instance = make_instance(11, 2, 3)
        for x in range(1, 40):
            for c in range(1, 60, 7):
                assert welch_f(instance, x, c).value == (pow(3, x - 1 + c, 121) - x) % 121


class TestPeriods:
    @pytest.mark.parametrize("p,e,g,expected", [(7, 1, 2, 3), (3, 2, 2, 6), (11, 2, 3, 55)])
    def test_c_period(self, make_instance, p, e, g, expected):
        assert c_period(make_instance(p, e, g)) == expected

    def test_c_period_is_not_minimal(self, make_instance):
        instance = make_instance(11, 2, 3)
        assert instance.ord_pe == 5 < c_period(instance)

    @pytest.mark.parametrize("p,e,g,expected", [(7, 1, 2, 21), (2, 3, 3, 8), (3, 2, 2, 18)])
    def test_x_period(self, make_instance, p, e, g, expected):
        assert x_period(make_instance(p, e, g)) == expected

    def test_periodicity_and_shifts(self, small_instances):
        for instance in small_instances:
            q, cp, xp = instance.q, c_period(instance), x_period(instance)
            step = instance.p ** (instance.e - 1) * (instance.p - 1)
            for x in range(1, xp + 1):
                for c in range(1, cp + 1):
                    value = welch_f(instance, x, c).value
                    assert value == welch_f(instance, x, c + cp).value
                    assert value == welch_f(instance, x + xp, c).value
                    assert value == (welch_f(instance, x + step, c).value - instance.p ** (instance.e - 1)) % q
                    for y in (-3, 1, 5):
                        assert welch_f(instance, x + y, c).value == (welch_f(instance, x, c + y).value - y) % q

    def test_no_solutions_at_multiples_of_p(self, small_instances):
        for instance in small_instances:
            for x in range(instance.p, x_period(instance) + 1, instance.p):
                for c in range(1, c_period(instance) + 1):
                    assert welch_f(instance, x, c).value % instance.p != 0


class TestValueSets:
    def test_value_set_for_g2_mod_7(self, table1_instance):
        value_set = value_set_at_p(table1_instance)
        assert value_set.values == {1, 2, 4}
        assert value_set.generating_c_range == (1, 3)

    def test_primitive_root(self, primitive_instance):
        assert value_set_at_p(primitive_instance).values == {1, 2, 3, 4, 5, 6}

    def test_g_one(self, make_instance):
        assert value_set_at_p(make_instance(11, 1, 1)).values == {1}

    def test_odd_prime_required(self, make_instance):
        with pytest.raises(OddPrimeRequiredError):
            value_set_at_p(make_instance(2, 3, 3))

    def test_solutions(self, table1_instance):
        solutions = value_set_solutions(table1_instance)
        assert [(s.x, s.c_prime) for s in solutions] == [(1, 3), (2, 3), (4, 2)]
        assert all(s.matches_c_minus_x_plus_1 for s in solutions)
        assert solution_xs_mod_p(table1_instance) == {1, 2, 4}

    def test_solvable_residues_primitive(self, primitive_instance):
        assert solution_xs_mod_p(primitive_instance) == {1, 2, 3, 4, 5, 6}

    def test_matches_scan_and_inverse(self, small_instances):
        for instance in small_instances:
            values = value_set_at_p(instance).values
            assert values == scan_value_set(instance)
            assert values == value_set_at_p(inverse_instance(instance)).values
            for s in value_set_solutions(instance):
                assert s.matches_c_minus_x_plus_1
                assert pow(instance.g.value, s.x - 1 + s.c_prime, instance.p) == s.x


class TestPrimitiveRootSymmetries:
    @pytest.mark.parametrize("x,expected", [(6, 4), (1, 6)])
    def test_unique_c(self, primitive_instance, x, expected):
        assert unique_c_for_x(primitive_instance, x) == expected

    def test_minus_one(self, primitive_instance):
        assert c_for_minus_one(primitive_instance) == 4 == unique_c_for_x(primitive_instance, 6)

    def test_unique_c_matches_scan(self, make_instance):
        for p, e, g in [(5, 2, 2), (7, 2, 3), (3, 3, 2), (13, 1, 2)]:
            instance = make_instance(p, e, g)
            for x in range(1, instance.q):
                if x % p:
                    assert scan_fixed_x(instance, x) == [unique_c_for_x(instance, x)]
            assert c_for_minus_one(instance) == unique_c_for_x(instance, instance.q - 1)

    def test_not_primitive(self, table1_instance):
        with pytest.raises(NotPrimitiveRootError):
            unique_c_for_x(table1_instance, 2)

    def test_non_unit_x(self, primitive_instance):
        with pytest.raises(NonUnitXError):
            unique_c_for_x(primitive_instance, 14)

    @pytest.mark.parametrize("pair,expected", [((2, 1), (5, 3)), ((6, 4), (1, 6))])
    def test_inverse_pair(self, primitive_instance, pair, expected):
        image = inverse_pair(primitive_instance, SolutionPair(x=pair[0], c=pair[1]))
        assert image.as_tuple() == expected

    def test_inverse_pair_is_an_involution(self, make_instance):
        instance = make_instance(5, 2, 2)
        inverse = inverse_instance(instance)
        assert inverse.g.value == 13
        for x, c in scan_all_pairs(instance):
            back = inverse_pair(inverse, inverse_pair(instance, SolutionPair(x=x, c=c)))
            assert (back.x - x) % 25 == 0
            assert (back.c - c) % 20 == 0

    def test_inverse_pair_rejects_non_solution(self, primitive_instance):
        with pytest.raises(NotASolutionError):
            inverse_pair(primitive_instance, SolutionPair(x=2, c=2))

    def test_reflection(self, make_instance):
        for p, e, g in [(7, 1, 3), (5, 2, 2), (3, 3, 2), (7, 2, 3)]:
            instance = make_instance(p, e, g)
            inverse = inverse_instance(instance)
            for x in range(1, x_period(instance) + 1):
                for c in range(1, c_period(instance) + 1):
                    assert check_reflection(instance, x, c, inverse)

    def test_reflection_c(self, primitive_instance):
        assert reflection_c(primitive_instance, 1) == 3
        assert reflection_c(primitive_instance, 4) == 6


class TestShiftSolution:
    def test_zero_shift(self, table1_instance):
        assert shift_solution(table1_instance, SolutionPair(x=1, c=3), 0).as_tuple() == (1, 3)

    def test_example(self, table1_instance):
        assert shift_solution(table1_instance, SolutionPair(x=1, c=3), 1).as_tuple() == (8, 2)

    def test_m_shifts_return_c(self, small_instances):
        for instance in small_instances:
            for x, c in scan_all_pairs(instance)[:5]:
                pair = SolutionPair(x=x, c=c)
                shifted = shift_solution(instance, pair, instance.m)
                assert shifted.c == c
                assert shifted.x == x + instance.m * instance.q
                for n in (-2, 3):
                    moved = shift_solution(instance, pair, n)
                    assert pow(instance.g.value, moved.x - 1 + moved.c, instance.q) == x % instance.q

    def test_rejects_non_solution(self, table1_instance):
        with pytest.raises(NotASolutionError):
            shift_solution(table1_instance, SolutionPair(x=3, c=1), 1)


class TestFixedX:
    def test_order_collapse(self, make_instance):
        instance = make_instance(11, 2, 3)
        assert count_c_for_fixed_x(instance, 1) == 11
        assert c_values_for_fixed_x(instance, 1) == list(range(5, 56, 5))
        assert count_c_for_fixed_x(instance, 2) == 0
        assert c_values_for_fixed_x(instance, 2) == []

    def test_primitive_root_gives_one(self, make_instance):
        instance = make_instance(7, 2, 3)
        assert all(count_c_for_fixed_x(instance, x) == 1 for x in range(1, 49) if x % 7)

    def test_non_unit(self, make_instance):
        with pytest.raises(NonUnitXError):
            count_c_for_fixed_x(make_instance(7, 1, 3), 7)

    @pytest.mark.parametrize("p", [7, 11, 13])
    @pytest.mark.parametrize("e", [1, 2])
    def test_matches_scan(self, make_instance, p, e):
        for g in range(1, p):
            instance = make_instance(p, e, g)
            for x in range(1, instance.q):
                if x % p == 0:
                    continue
                expected = scan_fixed_x(instance, x)
                report = solve_fixed_x(instance, x)
                assert report.solutions == expected
                assert report.predicted_count == len(expected)
                assert len(expected) in (0, c_period(instance) // instance.ord_pe)


class TestSolveFixedC:
    def test_example(self, table1_instance):
        report = solve_fixed_c(table1_instance, 3)
        assert report.solutions == [1, 2, 18]
        assert report.predicted_count == report.observed_count == 3

    def test_g_one(self, make_instance):
        assert solve_fixed_c(make_instance(7, 1, 1), 4).solutions == [1]

    def test_extended_range(self, table1_instance):
        report = solve_fixed_c(table1_instance, 3, k=2)
        assert report.solutions == [1, 2, 18, 22, 23, 39]
        assert report.predicted_count == 6

    def test_arbitrary_range_has_no_prediction(self, table1_instance):
        report = solve_fixed_c(table1_instance, 3, x_range=(2, 30))
        assert report.solutions == [2, 18, 22, 23]
        assert report.predicted_count is None

    def test_odd_prime_required(self, make_instance):
        with pytest.raises(OddPrimeRequiredError):
            solve_fixed_c(make_instance(2, 3, 3), 1)

    def test_matches_oracle(self, small_instances):
        for instance in small_instances:
            for c in range(1, c_period(instance) + 1):
                report = solve_fixed_c(instance, c)
                assert report.solutions == scan_fixed_c(instance, c)
                assert len({x % instance.m for x in report.solutions}) == instance.m
                for k in (2, 3):
                    extended = solve_fixed_c(instance, c, k=k)
                    assert extended.solutions == scan_fixed_c(instance, c, (1, k * x_period(instance)))
                    assert extended.observed_count == k * instance.m


class TestSolveAllPairs:
    def test_example(self, table1_instance):
        report = solve_all_pairs(table1_instance)
        assert [pair.as_tuple() for pair in report.solutions] == T1_PAIRS
        assert report.predicted_count == 9
        assert report.formula == "m^2"

    def test_mod_nine(self, make_instance):
        report = solve_all_pairs(make_instance(3, 2, 2))
        assert report.observed_count == report.predicted_count == 12

    def test_g_one(self, make_instance):
        report = solve_all_pairs(make_instance(5, 1, 1))
        assert [pair.as_tuple() for pair in report.solutions] == [(1, 1)]

    def test_matches_oracle(self, small_instances):
        for instance in small_instances:
            report = solve_all_pairs(instance)
            assert [pair.as_tuple() for pair in report.solutions] == scan_all_pairs(instance)
            assert report.observed_count == instance.m ** 2 * instance.p ** (instance.e - 1)
            # for each c, the x solutions are distinct mod p^e
            by_c = {}
            for pair in report.solutions:
                by_c.setdefault(pair.c, []).append(pair.x % instance.q)
            assert all(len(set(xs)) == len(xs) for xs in by_c.values())


class TestSolveP2:
    def test_example(self, make_instance):
        report = solve_p2(make_instance(2, 3, 3), 1)
        assert report.solutions == [3]
        assert report.predicted_count == 1

    def test_g_one(self, make_instance):
        assert solve_p2(make_instance(2, 5, 1), 7).solutions == [1]

    @pytest.mark.parametrize("c", [1, 2, 5])
    def test_modulus_two(self, make_instance, c):
        assert solve_p2(make_instance(2, 1, 3), c).solutions == [1]

    def test_prime_two_required(self, table1_instance):
        with pytest.raises(PrimeTwoRequiredError):
            solve_p2(table1_instance, 1)

    @pytest.mark.parametrize("e", [1, 2, 3, 4, 5, 6, 8])
    def test_unique_odd_solution(self, make_instance, e):
        q = 2 ** e
        for g in range(1, min(q, 64), 2):
            instance = make_instance(2, e, g)
            for c in range(1, min(2 * q, 40)):
                expected = scan_fixed_c(instance, c, (1, q))
                assert len(expected) == 1 and expected[0] % 2 == 1
                assert solve_p2(instance, c).solutions == expected

    def test_extended_range(self, make_instance):
        report = solve_p2(make_instance(2, 3, 3), 1, k=3)
        assert report.solutions == [3, 11, 19]
        assert report.predicted_count == 3


class TestDoubles:
    def test_g_one_has_none(self, make_instance):
        assert find_doubles(make_instance(7, 2, 1)) == []

    def test_matches_scan(self, primitive_instance):
        g, q = 3, 7
        expected = [
            (x, c)
            for c in range(1, 7)
            for x in range(1, 43)
            if (pow(g, x - 1 + c, q) - x) % q == (pow(g, x + c, q) - x - 1) % q
        ]
        doubles = find_doubles(primitive_instance)
        assert doubles == expected
        assert all(pow(g, x - 1 + c, q) * (g - 1) % q == 1 for x, c in doubles)


class TestSolutionReport:
    def test_observed_count_must_match(self, table1_instance):
        with pytest.raises(ValidationError):
            SolutionReport(
                instance=table1_instance,
                query=Query(kind=QueryKind.FIXED_C, c=3),
                solutions=[1, 2],
                predicted_count=3,
                formula="k*m",
                theorem="fixed c",
                observed_count=3,
            )

    def test_mismatch_raises_in_verify_mode(self, table1_instance, monkeypatch):
        import app.services.welch as welch_module

        monkeypatch.setattr(welch_module, "fixed_c_base_solutions", lambda instance, c: [1, 2])
        with pytest.raises(CountMismatchError):
            solve_fixed_c(table1_instance, 3)
        assert solve_fixed_c(table1_instance, 3, verify=False).observed_count == 2
