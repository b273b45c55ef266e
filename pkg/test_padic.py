"""
Tests for the truncated p-adic layer
"""
import pytest

from app.errors import DomainError, EvenGError, EvenXError, NonUnitError, OddPrimeRequiredError, PrimeTwoRequiredError
from app.services.modring import PrimePowerModulus
from app.services.padic import (
    P2Branch,
    as_series_value,
    decompose_unit,
    interpolated_F,
    interpolated_F2,
    padic_exp,
    padic_log,
    select_p2_branch,
    teichmuller,
)


def mod(p: int, n: int) -> PrimePowerModulus:
    return PrimePowerModulus.of(p, n)


class TestTeichmuller:
    @pytest.mark.parametrize("g,expected", [(2, 30), (3, 31), (1, 1)])
    def test_examples(self, g, expected):
        assert teichmuller(g, mod(7, 2)).value == expected

    @pytest.mark.parametrize("p,n", [(3, 5), (5, 4), (7, 3), (11, 3), (13, 2)])
    def test_root_of_unity_and_multiplicative(self, p, n):
        modulus = mod(p, n)
        q = modulus.modulus
        omegas = {a: teichmuller(a, modulus).value for a in range(1, p)}
        for a, omega in omegas.items():
            assert pow(omega, p - 1, q) == 1
            assert omega % p == a
            for b in range(1, p):
                assert teichmuller(a * b, modulus).value == omega * omegas[b] % q

    def test_non_unit(self):
        with pytest.raises(NonUnitError):
            teichmuller(14, mod(7, 2))

    def test_odd_prime_required(self):
        with pytest.raises(OddPrimeRequiredError):
            teichmuller(3, mod(2, 3))


class TestDecomposeUnit:
    def test_odd_prime(self):
        d = decompose_unit(2, mod(7, 2))
        assert d.omega.value == 30
        assert d.one_unit.value == 2 * pow(30, -1, 49) % 49
        assert d.one_unit.value % 7 == 1
        assert d.unit.value == 2

    def test_prime_two(self):
        d = decompose_unit(3, mod(2, 3))
        assert (d.omega.value, d.one_unit.value) == (7, 5)

    @pytest.mark.parametrize("p,n", [(7, 3), (2, 4)])
    def test_identity(self, p, n):
        d = decompose_unit(1, mod(p, n))
        assert (d.omega.value, d.one_unit.value) == (1, 1)

    def test_modulus_two_collapses(self):
        for g in (1, 3, 5, 7):
            d = decompose_unit(g, mod(2, 1))
            assert (d.omega.value, d.one_unit.value) == (1, 1)

    def test_even_g(self):
        with pytest.raises(EvenGError):
            decompose_unit(4, mod(2, 3))

    def test_at_precision(self):
        d = decompose_unit(2, mod(7, 3))
        low = d.at_precision(2)
        assert low.omega.value == 30
        with pytest.raises(DomainError):
            low.at_precision(3)


class TestLogExp:
    def test_log_of_one(self):
        assert padic_log(1, mod(7, 3)).value.value == 0

    def test_log_example(self):
        result = padic_log(8, mod(7, 3))
        assert result.value.value == 154
        assert result.valuation_floor >= 1

    def test_log_domain(self):
        with pytest.raises(DomainError):
            padic_log(6, mod(7, 2))

    def test_log_domain_prime_two(self):
        with pytest.raises(DomainError):
            padic_log(3, mod(2, 4))

    def test_exp_of_zero(self):
        assert padic_exp(0, mod(5, 3)).value == 1

    @pytest.mark.parametrize("x,n,expected", [(154, 3, 8), (7, 2, 8)])
    def test_exp_examples(self, x, n, expected):
        assert padic_exp(as_series_value(x, mod(7, n)), mod(7, n)).value == expected

    def test_exp_domain(self):
        with pytest.raises(DomainError):
            padic_exp(3, mod(7, 2))
        with pytest.raises(DomainError):
            padic_exp(2, mod(2, 4))

    @pytest.mark.parametrize("p,n", [(2, 10), (3, 7), (5, 5), (7, 4), (11, 3), (13, 3), (97, 2)])
    def test_round_trip(self, p, n):
        modulus = mod(p, n)
        step = 4 if p == 2 else p
        for u in range(1, modulus.modulus, step):
            log_u = padic_log(u, modulus)
            assert padic_exp(log_u, modulus).value == u
            x = u - 1
            assert padic_log(padic_exp(x, modulus), modulus).value.value == x

    @pytest.mark.parametrize("p,n", [(2, 7), (3, 5), (7, 3)])
    def test_homomorphism(self, p, n):
        modulus = mod(p, n)
        q = modulus.modulus
        step = 4 if p == 2 else p
        one_units = list(range(1, q, step))
        for u in one_units:
            for v in one_units[:20]:
                lhs = padic_log(u * v % q, modulus).value.value
                rhs = padic_log(u, modulus).value.value + padic_log(v, modulus).value.value
                assert lhs == rhs % q


class TestInterpolatedF:
    def test_identity_base(self):
        d = decompose_unit(1, mod(7, 1))
        assert interpolated_F(0, 1, 1, d, mod(7, 1)).value == 1

    def test_off_class_value(self):
        d = decompose_unit(2, mod(7, 1))
        assert interpolated_F(2, 3, 2, d, mod(7, 1)).value == 4

    @pytest.mark.parametrize("p,e,g", [(7, 2, 2), (5, 2, 3), (3, 3, 2), (11, 2, 3)])
    def test_agrees_with_power_on_its_class(self, p, e, g):
        modulus = mod(p, e)
        q = modulus.modulus
        m = 1
        while pow(g, m, p) != 1:
            m += 1
        d = decompose_unit(g, modulus)
        for c in range(1, m * p ** (e - 1) + 1, 3):
            for x in range(1, m * q + 1):
                x0 = (x - 1 + c) % m
                assert interpolated_F(x0, x, c, d, modulus).value == pow(g, x - 1 + c, q)

    def test_odd_prime_required(self):
        d = decompose_unit(3, mod(2, 3))
        with pytest.raises(OddPrimeRequiredError):
            interpolated_F(0, 1, 1, d, mod(2, 3))


class TestInterpolatedF2:
    def test_f0_for_g_one_mod_four(self):
        modulus = mod(2, 3)
        d = decompose_unit(5, modulus)
        for x in (1, 3, 5, 7):
            for c in range(1, 9):
                assert interpolated_F2(P2Branch.F0, x, c, d, modulus).value == pow(5, x - 1 + c, 8)

    def test_f1_example(self):
        modulus = mod(2, 3)
        d = decompose_unit(3, modulus)
        assert select_p2_branch(d, 3) is P2Branch.F1
        assert interpolated_F2(P2Branch.F1, 3, 1, d, modulus).value == 3

    def test_even_x(self):
        modulus = mod(2, 3)
        with pytest.raises(EvenXError):
            interpolated_F2(P2Branch.F0, 2, 1, decompose_unit(3, modulus), modulus)

    def test_prime_two_required(self):
        modulus = mod(7, 1)
        with pytest.raises(PrimeTwoRequiredError):
            interpolated_F2(P2Branch.F0, 1, 1, decompose_unit(3, modulus), modulus)

    @pytest.mark.parametrize("e", [2, 3, 4])
    def test_exactly_one_branch_matches(self, e):
        modulus = mod(2, e)
        q = modulus.modulus
        for g in range(1, q, 2):
            d = decompose_unit(g, modulus)
            for x in range(1, q + 1, 2):
                for c in range(0, 2 * q):
                    target = pow(g, x - 1 + c, q)
                    matching = [b for b in P2Branch if interpolated_F2(b, x, c, d, modulus).value == target]
                    assert matching == [select_p2_branch(d, x - 1 + c)]
