"""
Hensel lifting for simple roots of series-defined functions

Roots are lifted one power of p at a time (p, p^2, ..., p^e) so every
intermediate root is available in the trace.
"""
from typing import TYPE_CHECKING, Callable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from app.errors import DomainError, NotARootError, OddPrimeRequiredError, SingularRootError
from app.services.modring import PrimePowerModulus, Residue
from app.services.padic import UnitDecomposition, decompose_unit, log_series, one_unit_power
from app.utils.logger import get_logger

if TYPE_CHECKING:
    from app.services.welch import WelchInstance

logger = get_logger(__name__)

# f(x, k) and f'(x, k) return values mod p^k for an integer x
SeriesFunction = Callable[[int, int], int]


class LiftProblem(BaseModel):
    """A root of f mod p to be lifted to a root mod p^e"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    f: SeriesFunction
    f_prime: SeriesFunction
    base_root: int
    modulus: PrimePowerModulus

    @property
    def target_exponent(self) -> int:
        return self.modulus.e


class LiftResult(BaseModel):
    """The lifted root and the roots found at p, p^2, ..., p^e"""
    model_config = ConfigDict(frozen=True)

    root: Residue
    trace: List[int]


def lift_simple_root(problem: LiftProblem) -> LiftResult:
    """
    Lift a simple root mod p to the unique root above it mod p^e

    Args:
        problem: f, f' and the base root, with the target modulus p^e

    Returns:
        LiftResult with the root mod p^e and the root at every precision p, ..., p^e

    Raises:
        NotARootError: if base_root is not a root of f mod p
        SingularRootError: if f'(base_root) = 0 mod p
    """
    p, e = problem.modulus.p, problem.modulus.e
    root = problem.base_root % p
    if problem.f(root, 1) % p:
        raise NotARootError(f"f({root}) is not 0 mod {p}")
    if problem.f_prime(root, 1) % p == 0:
        raise SingularRootError(f"f'({root}) = 0 mod {p}")

    trace = [root]
    for k in range(2, e + 1):
        modulus = p ** k
        value = problem.f(root, k)
        derivative = problem.f_prime(root, k)
        root = (root - value * pow(derivative, -1, modulus)) % modulus
        trace.append(root)
    logger.debug(f"Lifted root {problem.base_root} mod {p} to {root} mod {p}^{e}: trace={trace}")
    return LiftResult(root=problem.modulus.residue(root), trace=trace)


def fixed_point_problem(
    coefficient: int,
    one_unit: int,
    c: int,
    modulus: PrimePowerModulus,
) -> LiftProblem:
    """
    The fixed-point equation coefficient * <g>^(x-1+c) = x as a lift problem

    <g>^(x-1+c) is evaluated as exp((x-1+c) log <g>) at the precision each
    step asks for; the derivative is coefficient * <g>^(x-1+c) * log <g> - 1.
    """
    p = modulus.p

    def f(x: int, k: int) -> int:
        q = p ** k
        return (coefficient * one_unit_power(one_unit % q, x - 1 + c, p, k) - x) % q

    def f_prime(x: int, k: int) -> int:
        q = p ** k
        power = one_unit_power(one_unit % q, x - 1 + c, p, k)
        return (coefficient * power * log_series(one_unit % q, p, k) - 1) % q

    return LiftProblem(f=f, f_prime=f_prime, base_root=coefficient % p, modulus=modulus)


def _welch_decomposition(instance: "WelchInstance", target_exponent: Optional[int]) -> Tuple[UnitDecomposition, PrimePowerModulus]:
    if instance.modulus.p == 2:
        raise OddPrimeRequiredError("the fixed-c lift with omega(g)^x0 is for odd p; see solve_p2")
    e = instance.modulus.e if target_exponent is None else target_exponent
    if not 1 <= e <= instance.modulus.e:
        raise DomainError(f"target exponent {e} must lie in 1..{instance.modulus.e}")
    target = instance.modulus.with_exponent(e)
    return decompose_unit(instance.g.value, instance.modulus).at_precision(e), target


def lift_welch_fixed_c_with_trace(instance: "WelchInstance", x0: int, c: int) -> LiftResult:
    """
    Hensel-lift the fixed point of omega(g)^x0 <g>^(x-1+c) = x from mod p to mod p^e

    Args:
        instance: The (p, e, g) instance, p odd
        x0: Residue class of x - 1 + c mod m
        c: Shift

    Returns:
        LiftResult whose trace holds the root at p, p^2, ..., p^e
    """
    decomposition, target = _welch_decomposition(instance, None)
    coefficient = pow(decomposition.omega.value, x0 % instance.m, target.modulus)
    return lift_simple_root(fixed_point_problem(coefficient, decomposition.one_unit.value, c, target))


def lift_welch_fixed_c(instance: "WelchInstance", x0: int, c: int) -> Residue:
    """The unique x mod p^e with omega(g)^x0 <g>^(x-1+c) = x, lifted from omega(g)^x0 mod p"""
    return lift_welch_fixed_c_with_trace(instance, x0, c).root


def enumerate_bivariate_lifts(
    instance: "WelchInstance",
    x0: int,
    base_pair: Tuple[int, int],
    target_exponent: Optional[int] = None,
) -> List[Tuple[int, int]]:
    """
    All (x, c) mod p^e above a root (x_bar, c_bar) mod p of omega^x0 <g>^(x-1+c) - x

    c is the free variable (df/dc = 0 mod p); for each of the p^(e-1) values
    of c above c_bar the unique x above x_bar is found by lifting in x.
    """
    decomposition, target = _welch_decomposition(instance, target_exponent)
    p, e = target.p, target.e
    coefficient = pow(decomposition.omega.value, x0 % instance.m, target.modulus)
    x_bar, c_bar = base_pair[0] % p, base_pair[1] % p
    if (coefficient - x_bar) % p:
        raise NotARootError(f"({x_bar}, {c_bar}) is not a root mod {p} for x0={x0}")

    pairs = []
    for j in range(p ** (e - 1)):
        c = c_bar + j * p
        problem = fixed_point_problem(coefficient, decomposition.one_unit.value, c, target)
        pairs.append((lift_simple_root(problem).root.value, c))
    return sorted(pairs)
