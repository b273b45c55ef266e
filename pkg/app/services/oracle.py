"""
Brute-force reference scans

Every scan evaluates g^(x-1+c) by repeated multiplication over the grid it
covers and shares nothing with the constructive solvers beyond int arithmetic.
Scans that would exceed their ScanBudget are refused, never truncated.
"""
from typing import Dict, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.errors import BudgetExceededError
from app.utils.logger import get_logger

logger = get_logger(__name__)


class ScanBudget(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_modulus: int = Field(gt=0, description="Cap on p^e")
    max_grid: int = Field(gt=0, description="Cap on |x-range| * |c-range|")

    @classmethod
    def default(cls) -> "ScanBudget":
        return cls(max_modulus=settings.max_modulus, max_grid=settings.max_grid)

    def check(self, modulus: int, grid: int) -> None:
        if modulus > self.max_modulus:
            raise BudgetExceededError(f"modulus {modulus} exceeds scan budget {self.max_modulus}")
        if grid > self.max_grid:
            raise BudgetExceededError(f"grid of {grid} cells exceeds scan budget {self.max_grid}")


def _budget(budget: Optional[ScanBudget]) -> ScanBudget:
    return budget or ScanBudget.default()


def _powers_along_x(g: int, q: int, c: int, start: int, stop: int) -> List[int]:
    """g^(x-1+c) mod q for x = start..stop, one multiplication per step"""
    value = pow(g, start - 1 + c, q)
    values = []
    for _ in range(start, stop + 1):
        values.append(value)
        value = value * g % q
    return values


def scan_fixed_c(
    instance,
    c: int,
    x_range: Optional[Tuple[int, int]] = None,
    budget: Optional[ScanBudget] = None,
) -> List[int]:
    """All x in x_range (default {1..p^e m}) with g^(x-1+c) = x mod p^e"""
    q, g = instance.q, instance.g.value
    start, stop = x_range or (1, instance.m * q)
    _budget(budget).check(q, max(stop - start + 1, 0))
    found = [
        x
        for x, power in zip(range(start, stop + 1), _powers_along_x(g, q, c, start, stop))
        if power == x % q
    ]
    logger.debug(f"scan_fixed_c c={c} over {start}..{stop}: {len(found)} hits")
    return found


def scan_fixed_c_all(instance, budget: Optional[ScanBudget] = None) -> Dict[int, List[int]]:
    """
    scan_fixed_c for every c in {1..m p^(e-1)} at once

    One walk over the powers of g tabulates exponents; then each x in
    {1..m p^e} lands on the c values with x-1+c = log_g(x) mod ord_pe.
    """
    q, g = instance.q, instance.g.value
    x_stop, c_stop = instance.m * q, instance.m * instance.p ** (instance.e - 1)
    _budget(budget).check(q, x_stop * c_stop)
    exponents = {}
    power, k = 1, 0
    while power not in exponents:
        exponents[power] = k
        power = power * g % q
        k += 1
    order = k
    found: Dict[int, List[int]] = {c: [] for c in range(1, c_stop + 1)}
    for x in range(1, x_stop + 1):
        k = exponents.get(x % q)
        if k is None:
            continue
        for c in range((k - x) % order + 1, c_stop + 1, order):
            found[c].append(x)
    logger.debug(f"scan_fixed_c_all over {x_stop}x{c_stop}")
    return found


def scan_all_pairs(instance, budget: Optional[ScanBudget] = None) -> List[Tuple[int, int]]:
    """Every (x, c) on the grid {1..m p^e} x {1..m p^(e-1)} solving the equation, sorted"""
    q, g, p, m = instance.q, instance.g.value, instance.p, instance.m
    x_stop, c_stop = m * q, m * p ** (instance.e - 1)
    _budget(budget).check(q, x_stop * c_stop)
    pairs = []
    for c in range(1, c_stop + 1):
        for x, power in zip(range(1, x_stop + 1), _powers_along_x(g, q, c, 1, x_stop)):
            if power == x % q and x % p:
                pairs.append((x, c))
    pairs.sort()
    logger.debug(f"scan_all_pairs over {x_stop}x{c_stop}: {len(pairs)} pairs")
    return pairs


def scan_value_set(instance) -> Set[int]:
    """{f(p, c) mod p : 1 <= c <= m} by direct evaluation"""
    p, g = instance.p, instance.g.value
    values = set()
    power = pow(g, p - 1 + 1, p)
    for _ in range(instance.m):
        values.add((power - p) % p)
        power = power * g % p
    return values


def scan_discrete_log(g: int, a: int, modulus: int, budget: Optional[ScanBudget] = None) -> Optional[int]:
    """Least k >= 0 with g^k = a mod modulus, by walking the powers of g"""
    _budget(budget).check(modulus, modulus)
    target = a % modulus
    power = 1 % modulus
    for k in range(modulus):
        if power == target:
            return k
        power = power * g % modulus
        if power == 1 % modulus:
            # the cycle closed without meeting a
            return None
    return None


def scan_fixed_x(instance, x: int, budget: Optional[ScanBudget] = None) -> List[int]:
    """All c in {1..m p^(e-1)} with g^(x-1+c) = x mod p^e"""
    q, g = instance.q, instance.g.value
    c_stop = instance.m * instance.p ** (instance.e - 1)
    _budget(budget).check(q, c_stop)
    found = []
    power = pow(g, x, q)
    for c in range(1, c_stop + 1):
        if power == x % q:
            found.append(c)
        power = power * g % q
    return found


def scan_roots_above(f, base_root: int, p: int, e: int, budget: Optional[ScanBudget] = None) -> List[int]:
    """Every root of f mod p^e congruent to base_root mod p, by scanning all p^(e-1) candidates"""
    q = p ** e
    _budget(budget).check(q, q)
    return [x for x in range(base_root % p, q, p) if f(x, e) % q == 0]
