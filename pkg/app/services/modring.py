"""
Exact arithmetic in (Z/p^e Z)

Powering, inversion, multiplicative order, discrete logarithm and
primitive-root testing over a prime-power modulus.
"""
from functools import lru_cache
from math import isqrt
from typing import Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator
from sympy import factorint
from sympy.ntheory.modular import crt

from app.config import settings
from app.errors import (
    InvalidModulusError,
    NonUnitBaseError,
    NonUnitError,
    OddPrimeRequiredError,
)
from app.utils.logger import get_logger

logger = get_logger(__name__)


def is_prime(n: int) -> bool:
    """Deterministic trial division up to sqrt(n)"""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class PrimePowerModulus(BaseModel):
    """The ring Z/p^e Z for a prime p"""
    model_config = ConfigDict(frozen=True)

    p: int = Field(description="The prime")
    e: int = Field(description="The exponent, at least 1")
    modulus: int = Field(default=0, description="p^e, filled in on construction")

    @model_validator(mode="before")
    @classmethod
    def _check_and_fill(cls, data):
        if isinstance(data, dict):
            p, e = data.get("p"), data.get("e")
            if not isinstance(p, int) or not is_prime(p):
                raise InvalidModulusError(f"p must be prime, got {p!r}")
            if p > settings.max_prime:
                raise InvalidModulusError(f"p={p} exceeds the configured bound {settings.max_prime}")
            if not isinstance(e, int) or e < 1:
                raise InvalidModulusError(f"e must be a positive integer, got {e!r}")
            data = {**data, "modulus": p ** e}
        return data

    @classmethod
    def of(cls, p: int, e: int = 1) -> "PrimePowerModulus":
        return _modulus(p, e)

    @property
    def group_order(self) -> int:
        """Order of the unit group, p^(e-1)(p-1)"""
        return self.p ** (self.e - 1) * (self.p - 1)

    def with_exponent(self, e: int) -> "PrimePowerModulus":
        return _modulus(self.p, e)

    def residue(self, value: int) -> "Residue":
        return Residue(modulus=self, value=value)


@lru_cache(maxsize=1024)
def _modulus(p: int, e: int) -> PrimePowerModulus:
    return PrimePowerModulus(p=p, e=e)


class Residue(BaseModel):
    """An element of Z/p^e Z, always held in {0, ..., p^e - 1}"""
    model_config = ConfigDict(frozen=True)

    modulus: PrimePowerModulus
    value: int

    @field_validator("value")
    @classmethod
    def _canonical(cls, value: int, info: ValidationInfo) -> int:
        modulus = info.data.get("modulus")
        if modulus is None:
            return value
        return value % modulus.modulus

    @property
    def is_unit(self) -> bool:
        return self.value % self.modulus.p != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"Residue({self.value} mod {self.modulus.modulus})"


def _require_unit(a: Residue, error=NonUnitError) -> None:
    if not a.is_unit:
        raise error(f"{a.value} is not a unit mod {a.modulus.modulus}")


def mod_pow(base: Residue, exponent: int) -> Residue:
    """base^exponent mod p^e; negative exponents go through the inverse"""
    if exponent < 0:
        _require_unit(base, NonUnitBaseError)
    return base.modulus.residue(pow(base.value, exponent, base.modulus.modulus))


def mod_inverse(a: Residue) -> Residue:
    """
    Inverse of a unit mod p^e

    Args:
        a: Residue prime to p

    Returns:
        The residue b with a * b = 1 mod p^e

    Raises:
        NonUnitError: if p divides a
    """
    _require_unit(a)
    return a.modulus.residue(pow(a.value, -1, a.modulus.modulus))


@lru_cache(maxsize=4096)
def _factor(n: int) -> Dict[int, int]:
    return {int(q): int(k) for q, k in factorint(n).items()}


def order_of(g: int, p: int, e: int) -> int:
    """Multiplicative order of the integer unit g mod p^e (int-level helper)"""
    modulus = p ** e
    order = p ** (e - 1) * (p - 1)
    for q in _factor(order):
        while order % q == 0 and pow(g, order // q, modulus) == 1:
            order //= q
    return order


def multiplicative_order(g: Residue) -> int:
    """Smallest k >= 1 with g^k = 1, by stripping primes from p^(e-1)(p-1)"""
    _require_unit(g)
    return order_of(g.value, g.modulus.p, g.modulus.e)


def _bsgs(base: int, target: int, order: int, modulus: int) -> Optional[int]:
    """Baby-step giant-step in a cyclic subgroup of the given order"""
    if target % modulus == 1 % modulus:
        return 0
    step = isqrt(max(order - 1, 0)) + 1
    table = {}
    power = 1
    for j in range(step):
        table.setdefault(power, j)
        power = power * base % modulus
    giant = pow(base, -step, modulus)
    gamma = target % modulus
    for i in range(step + 1):
        if gamma in table:
            return (i * step + table[gamma]) % order
        gamma = gamma * giant % modulus
    return None


def _dlog_prime_power(g: int, a: int, n: int, q: int, k: int, modulus: int) -> Optional[int]:
    """Digits of log_g(a) in the subgroup of order q^k, one base-q digit at a time"""
    qk = q ** k
    g_i = pow(g, n // qk, modulus)
    a_i = pow(a, n // qk, modulus)
    gamma = pow(g_i, qk // q, modulus)
    g_inv = pow(g_i, -1, modulus)
    x = 0
    for i in range(k):
        h = pow(pow(g_inv, x, modulus) * a_i % modulus, qk // q ** (i + 1), modulus)
        digit = _bsgs(gamma, h, q, modulus)
        if digit is None:
            return None
        x += digit * q ** i
    return x


def discrete_log(g: Residue, a: Residue) -> Optional[int]:
    """
    Least k >= 0 with g^k = a mod p^e, or None when a is not a power of g

    Pohlig-Hellman over the factored order of g with baby-step/giant-step
    inside each prime-order subgroup. The candidate is always checked by
    substitution, which also covers the non-cyclic group mod 2^e.
    """
    _require_unit(g)
    _require_unit(a)
    modulus = g.modulus.modulus
    n = multiplicative_order(g)
    if n == 1:
        return 0 if a.value == 1 % modulus else None

    residues, moduli = [], []
    for q, k in _factor(n).items():
        digit = _dlog_prime_power(g.value, a.value, n, q, k, modulus)
        if digit is None:
            return None
        residues.append(digit)
        moduli.append(q ** k)

    k = int(crt(moduli, residues)[0]) % n
    if pow(g.value, k, modulus) != a.value:
        logger.debug(f"{a.value} is not in the subgroup generated by {g.value} mod {modulus}")
        return None
    return k


def is_primitive_root(g: Residue) -> bool:
    """
    Check whether g generates the unit group mod p^e

    Args:
        g: Unit residue mod p^e, p odd

    Returns:
        True when the order of g is p^(e-1)(p-1)
    """
    if g.modulus.p == 2:
        raise OddPrimeRequiredError("primitive roots are only tested for odd p")
    return multiplicative_order(g) == g.modulus.group_order


def units(modulus: PrimePowerModulus):
    """All units in {1, ..., p^e - 1}"""
    return (a for a in range(1, modulus.modulus) if a % modulus.p)

