"""
Truncated p-adic arithmetic at working precision N

Teichmuller decomposition of units, the p-adic log and exp series reduced
mod p^N, and the interpolated functions that agree with g^(x-1+c) on
residue classes of x.

Series terms divide by n and n!, which are not units when p | n. The p-power
part of each denominator is therefore divided out of the numerator exactly,
and only the p-free part is inverted mod p^N.
"""
from enum import Enum
from functools import lru_cache
from typing import Union

from pydantic import BaseModel, ConfigDict, model_validator

from app.errors import DomainError, EvenGError, EvenXError, NonUnitError, OddPrimeRequiredError, PrimeTwoRequiredError
from app.services.modring import PrimePowerModulus, Residue
from app.utils.logger import get_logger

logger = get_logger(__name__)


def valuation(n: int, p: int, cap: int) -> int:
    """v_p(n), with v_p(0) reported as cap"""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v


def _floor_log(n: int, p: int) -> int:
    k, power = 0, p
    while power <= n:
        power *= p
        k += 1
    return k


def _min_valuation(p: int) -> int:
    """Smallest valuation at which both series converge (1 for odd p, 2 for p = 2)"""
    return 2 if p == 2 else 1


@lru_cache(maxsize=8192)
def log_series(u: int, p: int, N: int) -> int:
    """log(u) mod p^N for an integer one-unit u (int-level, cached)"""
    modulus = p ** N
    y = (u - 1) % modulus
    if y == 0:
        return 0
    v = valuation(y, p, N)
    total = 0
    n = 1
    # n*v - floor(log_p n) never decreases, so the first vanishing term ends the sum
    while n * v - _floor_log(n, p) < N and n <= 4 * N + p:
        a = valuation(n, p, N + n)
        unit_part = n // p ** a
        term = pow(y, n, p ** (N + a)) // p ** a
        term = term * pow(unit_part, -1, modulus) % modulus
        total = total + term if n % 2 == 1 else total - term
        n += 1
    return total % modulus


def exp_series(x: int, p: int, N: int) -> int:
    """exp(x) mod p^N for an integer x inside the disk of convergence (int-level)"""
    modulus = p ** N
    x %= modulus
    if x == 0:
        return 1 % modulus
    v = valuation(x, p, N)
    total = 1
    factorial_p_power = 0
    factorial_unit = 1
    n = 1
    # terms from n on have valuation >= n*v - (n-1)/(p-1), which grows with n
    while (p - 1) * n * v - (n - 1) < (p - 1) * N and n <= 4 * N + p:
        a = valuation(n, p, N + n)
        factorial_p_power += a
        factorial_unit = factorial_unit * (n // p ** a) % modulus
        term = pow(x, n, p ** (N + factorial_p_power)) // p ** factorial_p_power
        total = (total + term * pow(factorial_unit, -1, modulus)) % modulus
        n += 1
    return total


def one_unit_power(u: int, exponent: int, p: int, N: int) -> int:
    """u^exponent mod p^N computed as exp(exponent * log u)"""
    return exp_series(exponent * log_series(u, p, N), p, N)


class UnitDecomposition(BaseModel):
    """g = omega * one_unit with omega a root of unity and one_unit in 1 + pZ_p (1 + 4Z_2)"""
    model_config = ConfigDict(frozen=True)

    omega: Residue
    one_unit: Residue
    precision: int

    @model_validator(mode="after")
    def _check_parts(self):
        modulus = self.omega.modulus
        p, q = modulus.p, modulus.modulus
        if p == 2:
            if self.omega.value not in (1, q - 1):
                raise ValueError("omega must be +1 or -1 when p = 2")
            if self.precision >= 2 and self.one_unit.value % 4 != 1:
                raise ValueError("one_unit must be 1 mod 4 when p = 2")
        else:
            if pow(self.omega.value, p - 1, q) != 1:
                raise ValueError("omega must be a (p-1)-st root of unity")
            if self.one_unit.value % p != 1:
                raise ValueError("one_unit must be 1 mod p")
        return self

    @property
    def modulus(self) -> PrimePowerModulus:
        return self.omega.modulus

    @property
    def unit(self) -> Residue:
        """The decomposed unit, omega * one_unit"""
        return self.modulus.residue(self.omega.value * self.one_unit.value)

    def at_precision(self, e: int) -> "UnitDecomposition":
        """The same decomposition reduced mod p^e, for e <= precision"""
        if e > self.precision:
            raise DomainError(f"cannot raise precision from {self.precision} to {e}")
        target = self.modulus.with_exponent(e)
        return UnitDecomposition(
            omega=target.residue(self.omega.value),
            one_unit=target.residue(self.one_unit.value),
            precision=e,
        )


class PadicSeriesValue(BaseModel):
    """A truncated p-adic number with a lower bound on its valuation"""
    model_config = ConfigDict(frozen=True)

    value: Residue
    precision: int
    valuation_floor: int

    @model_validator(mode="after")
    def _check_floor(self):
        p = self.value.modulus.p
        if self.value.value and self.value.value % p ** self.valuation_floor:
            raise ValueError(f"p^{self.valuation_floor} does not divide {self.value.value}")
        return self


def _unit_int(g: Union[int, Residue], modulus: PrimePowerModulus) -> int:
    g = g.value if isinstance(g, Residue) else g
    if g % modulus.p == 0:
        if modulus.p == 2:
            raise EvenGError(f"{g} is even")
        raise NonUnitError(f"{g} is not a unit mod {modulus.p}")
    return g


def teichmuller(g: Union[int, Residue], modulus: PrimePowerModulus) -> Residue:
    """The (p-1)-st root of unity congruent to g mod p, as the Frobenius fixed point mod p^N"""
    if modulus.p == 2:
        raise OddPrimeRequiredError("the Teichmuller character is computed for odd p only")
    omega = _unit_int(g, modulus) % modulus.modulus
    for _ in range(modulus.e - 1):
        omega = pow(omega, modulus.p, modulus.modulus)
    return modulus.residue(omega)


def decompose_unit(g: Union[int, Residue], modulus: PrimePowerModulus) -> UnitDecomposition:
    """
    Split a unit as g = omega * <g>

    Args:
        g: Unit mod p (odd for p = 2)
        modulus: p^N, the working precision

    Returns:
        UnitDecomposition where omega is the Teichmuller root (+-1 when p = 2)
        and <g> = 1 mod p (1 mod 4 when p = 2)
    """
    g = _unit_int(g, modulus)
    if modulus.p == 2:
        sign = 1 if g % 4 == 1 else -1
        omega = modulus.residue(sign)
        one_unit = modulus.residue(sign * g)
    else:
        omega = teichmuller(g, modulus)
        one_unit = modulus.residue(g * pow(omega.value, -1, modulus.modulus))
    return UnitDecomposition(omega=omega, one_unit=one_unit, precision=modulus.e)


def padic_log(u: Union[int, Residue], modulus: PrimePowerModulus) -> PadicSeriesValue:
    """log(u) mod p^N; u must be 1 mod p (1 mod 4 when p = 2)"""
    u = u.value if isinstance(u, Residue) else u
    p, N = modulus.p, modulus.e
    if (p == 2 and u % 4 != 1) or (p != 2 and u % p != 1):
        raise DomainError(f"log series diverges at {u} for p={p}")
    value = log_series(u % modulus.modulus, p, N)
    return PadicSeriesValue(
        value=modulus.residue(value),
        precision=N,
        valuation_floor=valuation(value, p, N),
    )


def padic_exp(x: Union[PadicSeriesValue, Residue, int], modulus: PrimePowerModulus) -> Residue:
    """exp(x) mod p^N; x needs valuation >= 1 (>= 2 when p = 2)"""
    if isinstance(x, PadicSeriesValue):
        x = x.value
    x = x.value if isinstance(x, Residue) else x
    p, N = modulus.p, modulus.e
    x %= modulus.modulus
    if x and valuation(x, p, N) < _min_valuation(p):
        raise DomainError(f"exp series diverges at {x} for p={p}")
    return modulus.residue(exp_series(x, p, N))


def as_series_value(x: int, modulus: PrimePowerModulus) -> PadicSeriesValue:
    x %= modulus.modulus
    return PadicSeriesValue(
        value=modulus.residue(x),
        precision=modulus.e,
        valuation_floor=valuation(x, modulus.p, modulus.e),
    )


def interpolated_F(
    x0: int,
    x: int,
    c: int,
    decomposition: UnitDecomposition,
    modulus: PrimePowerModulus,
) -> Residue:
    """
    omega(g)^x0 * <g>^(x-1+c) mod p^e

    Agrees with g^(x-1+c) whenever x - 1 + c = x0 mod m. x0 and c are
    independent inputs; keeping them consistent is the caller's job.
    """
    if modulus.p == 2:
        raise OddPrimeRequiredError("use interpolated_F2 for p = 2")
    d = decomposition.at_precision(modulus.e)
    p, e, q = modulus.p, modulus.e, modulus.modulus
    value = pow(d.omega.value, x0, q) * one_unit_power(d.one_unit.value, x - 1 + c, p, e)
    return modulus.residue(value)


class P2Branch(str, Enum):
    """The two 2-adic interpolants: F0 = <g>^k and F1 = -<g>^k"""
    F0 = "F0"
    F1 = "F1"


def select_p2_branch(decomposition: UnitDecomposition, exponent: int) -> P2Branch:
    """F1 exactly when g = 3 mod 4 and the exponent is odd"""
    modulus = decomposition.modulus
    if modulus.modulus > 2 and decomposition.omega.value == modulus.modulus - 1 and exponent % 2 == 1:
        return P2Branch.F1
    return P2Branch.F0


def interpolated_F2(
    branch: P2Branch,
    x: int,
    c: int,
    decomposition: UnitDecomposition,
    modulus: PrimePowerModulus,
) -> Residue:
    """
    Evaluate one of the two 2-adic interpolants of g^(x-1+c)

    Args:
        branch: F0 for <g>^(x-1+c), F1 for its negative
        x: Odd integer
        c: Shift
        decomposition: decompose_unit(g) for p = 2
        modulus: 2^e

    Returns:
        The branch value mod 2^e
    """
    if modulus.p != 2:
        raise PrimeTwoRequiredError("interpolated_F2 is the p = 2 interpolant")
    if x % 2 == 0:
        raise EvenXError(f"x={x} is even; the 2-adic interpolants live on odd x")
    d = decomposition.at_precision(modulus.e)
    value = one_unit_power(d.one_unit.value, x - 1 + c, 2, modulus.e)
    if P2Branch(branch) is P2Branch.F1:
        value = -value
    return modulus.residue(value)
