"""
The Welch function f_g(x, c) = g^(x-1+c) - x mod p^e

Periodicity and symmetry laws, value sets, and the constructive solvers:
fixed c (Hensel lift per residue x0 mod m, then CRT), all pairs (bivariate
lifts, CRT over both coordinates, fold of the c-range) and p = 2 (branch
rule plus 2-adic lift). Every solver reports the count its theorem predicts.

Ranges are 1-based at the API: x in {1..p^e m}, c in {1..m p^(e-1)}.
"""
from enum import Enum
from typing import FrozenSet, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, model_validator
from sympy.ntheory.modular import crt

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
from app.services.hensel import (
    enumerate_bivariate_lifts,
    fixed_point_problem,
    lift_simple_root,
    lift_welch_fixed_c,
)
from app.services.modring import (
    PrimePowerModulus,
    Residue,
    discrete_log,
    is_primitive_root,
    order_of,
)
from app.services.padic import decompose_unit, select_p2_branch, P2Branch
from app.utils.logger import get_logger, log_function_call

logger = get_logger(__name__)


class WelchInstance(BaseModel):
    """(p, e, g) with m = ord_p(g) and ord_pe = ord_{p^e}(g)"""
    model_config = ConfigDict(frozen=True)

    modulus: PrimePowerModulus
    g: Residue
    m: int
    ord_pe: int

    @model_validator(mode="after")
    def _check_orders(self):
        p = self.modulus.p
        if not self.g.is_unit:
            raise ValueError(f"g={self.g.value} must be a unit mod {p}")
        if (p - 1) % self.m or self.modulus.group_order % self.ord_pe or self.ord_pe % self.m:
            raise ValueError(f"inconsistent orders m={self.m}, ord_pe={self.ord_pe}")
        return self

    @classmethod
    def create(cls, p: int, e: int, g: int) -> "WelchInstance":
        modulus = PrimePowerModulus.of(p, e)
        if g % p == 0:
            if p == 2:
                raise EvenGError(f"g={g} must be odd when p = 2")
            raise NonUnitError(f"g={g} is not a unit mod {p}")
        return cls(
            modulus=modulus,
            g=modulus.residue(g),
            m=order_of(g % p, p, 1),
            ord_pe=order_of(g % modulus.modulus, p, e),
        )

    @property
    def p(self) -> int:
        return self.modulus.p

    @property
    def e(self) -> int:
        return self.modulus.e

    @property
    def q(self) -> int:
        """The modulus p^e as an int"""
        return self.modulus.modulus

    def summary(self) -> dict:
        return {"p": self.p, "e": self.e, "g": self.g.value, "m": self.m, "ord_pe": self.ord_pe}


class SolutionPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: int
    c: int

    def as_tuple(self) -> Tuple[int, int]:
        return self.x, self.c


class ValueSet(BaseModel):
    """{f(p, c) mod p : 1 <= c <= m}, which equals {g^c mod p}"""
    model_config = ConfigDict(frozen=True)

    values: FrozenSet[int]
    generating_c_range: Tuple[int, int]

    @model_validator(mode="after")
    def _check_size(self):
        start, stop = self.generating_c_range
        if len(self.values) != stop - start + 1:
            raise ValueError("powers of g over one period must be distinct")
        return self


class ValueSetSolution(BaseModel):
    """A value-set member x with its unique c' mod m and the closed forms that match it"""
    model_config = ConfigDict(frozen=True)

    x: int
    c_prime: int
    generating_c: int
    matches_c_minus_x_plus_1: bool
    matches_minus_x_plus_1_minus_c: bool


class QueryKind(str, Enum):
    FIXED_C = "fixed-c"
    ALL_PAIRS = "all-pairs"
    P2 = "p2"
    FIXED_X = "fixed-x"


class Query(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: QueryKind
    c: Optional[int] = None
    x: Optional[int] = None
    x_range: Optional[Tuple[int, int]] = None


class SolutionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    instance: WelchInstance
    query: Query
    solutions: List[Union[int, SolutionPair]]
    predicted_count: Optional[int]
    formula: str
    theorem: str
    observed_count: int

    @model_validator(mode="after")
    def _check_observed(self):
        if self.observed_count != len(self.solutions):
            raise ValueError("observed_count must equal the number of solutions")
        return self

    @property
    def matches_prediction(self) -> bool:
        return self.predicted_count is None or self.predicted_count == self.observed_count


class WelchTable(BaseModel):
    """The grid of f(x, c) values behind the `table` subcommand"""
    model_config = ConfigDict(frozen=True)

    xs: List[int]
    cs: List[int]
    rows: List[List[int]]


def _f(instance: WelchInstance, x: int, c: int) -> int:
    # the exponent only matters mod ord_pe
    return (pow(instance.g.value, (x - 1 + c) % instance.ord_pe, instance.q) - x) % instance.q


def _is_solution(instance: WelchInstance, x: int, c: int) -> bool:
    return x % instance.p != 0 and _f(instance, x, c) == 0


def _canonical(value: int, period: int) -> int:
    """Representative of value mod period in {1..period}"""
    return (value - 1) % period + 1


def _require_odd(instance: WelchInstance) -> None:
    if instance.p == 2:
        raise OddPrimeRequiredError("this operation is defined for odd p")


def _require_primitive(instance: WelchInstance) -> None:
    if not is_primitive_root(instance.g):
        raise NotPrimitiveRootError(f"g={instance.g.value} is not a primitive root mod {instance.q}")


def _require_solution(instance: WelchInstance, pair: SolutionPair) -> None:
    if not _is_solution(instance, pair.x, pair.c):
        raise NotASolutionError(f"{pair.as_tuple()} does not solve g^(x-1+c) = x mod {instance.q}")


def welch_f(instance: WelchInstance, x: int, c: int) -> Residue:
    """
    Evaluate f_g(x, c) = g^(x-1+c) - x mod p^e

    Args:
        instance: The (p, e, g) instance
        x: Any integer
        c: Any integer; negative x - 1 + c is fine since g is a unit

    Returns:
        f_g(x, c) as a residue mod p^e
    """
    return instance.modulus.residue(_f(instance, x, c))


def welch_value(instance: WelchInstance, x: int, c: int) -> int:
    """welch_f as a plain int in [0, p^e)"""
    return _f(instance, x, c)


def c_period(instance: WelchInstance) -> int:
    """m p^(e-1): a period of f in c, not necessarily the minimal one (that is ord_pe)"""
    return instance.m * instance.p ** (instance.e - 1)


def x_period(instance: WelchInstance) -> int:
    """
    Period of f in x

    Args:
        instance: The (p, e, g) instance

    Returns:
        m p^e, so that f(x, c) = f(x + m p^e, c)
    """
    return instance.m * instance.q


def welch_table(instance: WelchInstance, x_range: Optional[Tuple[int, int]] = None) -> WelchTable:
    """f(x, c) for x in x_range (default {1..p^e}) and every c in {1..m p^(e-1)}"""
    start, stop = x_range or (1, instance.q)
    xs = list(range(start, stop + 1))
    cs = list(range(1, c_period(instance) + 1))
    return WelchTable(xs=xs, cs=cs, rows=[[_f(instance, x, c) for c in cs] for x in xs])


def inverse_instance(instance: WelchInstance) -> WelchInstance:
    """The same modulus with g replaced by its inverse mod p^e"""
    return WelchInstance.create(instance.p, instance.e, pow(instance.g.value, -1, instance.q))


def value_set_at_p(instance: WelchInstance) -> ValueSet:
    """
    The value set {f(p, c) mod p : 1 <= c <= m} = {g^c mod p}

    Args:
        instance: The (p, e, g) instance, p odd

    Returns:
        ValueSet of size m generated by c in {1..m}
    """
    _require_odd(instance)
    p, g = instance.p, instance.g.value
    values = frozenset((pow(g, p - 1 + c, p) - p) % p for c in range(1, instance.m + 1))
    return ValueSet(values=values, generating_c_range=(1, instance.m))


def value_set_solutions(instance: WelchInstance) -> List[ValueSetSolution]:
    """
    For each value-set member x, the unique c' in {1..m} with g^(x-1+c') = x mod p

    c' is found by substitution, then compared against the two closed forms
    c - x + 1 and -x + 1 - c (mod m), where g^c = x mod p.
    """
    _require_odd(instance)
    p, g, m = instance.p, instance.g.value, instance.m
    solutions = []
    for c in range(1, m + 1):
        x = pow(g, c, p)
        matches = [cp for cp in range(1, m + 1) if pow(g, x - 1 + cp, p) == x]
        if len(matches) != 1:
            raise CountMismatchError(f"x={x} has {len(matches)} solutions c' mod {m}, expected 1")
        c_prime = matches[0]
        solutions.append(ValueSetSolution(
            x=x,
            c_prime=c_prime,
            generating_c=c,
            matches_c_minus_x_plus_1=(c_prime - (c - x + 1)) % m == 0,
            matches_minus_x_plus_1_minus_c=(c_prime - (1 - x - c)) % m == 0,
        ))
    return sorted(solutions, key=lambda s: s.x)


def solution_xs_mod_p(instance: WelchInstance) -> FrozenSet[int]:
    """The residues x mod p that admit some c; exactly the value set"""
    _require_odd(instance)
    xs = frozenset(s.x for s in value_set_solutions(instance))
    p, g, m = instance.p, instance.g.value, instance.m
    for x in range(1, p):
        if x not in xs and any(pow(g, x - 1 + c, p) == x for c in range(1, m + 1)):
            raise CountMismatchError(f"x={x} is outside the value set but admits a solution")
    return xs


def _minus_one_c(instance: WelchInstance) -> int:
    """(p^(e-1)(p-3) + 4) / 2, the c that pairs with x = p^e - 1"""
    p, e = instance.p, instance.e
    return (p ** (e - 1) * (p - 3) + 4) // 2


def unique_c_for_x(instance: WelchInstance, x: int) -> int:
    """The unique c in {1..p^(e-1)(p-1)} with g^(x-1+c) = x, for g a primitive root mod p^e"""
    _require_primitive(instance)
    if x % instance.p == 0:
        raise NonUnitXError(f"x={x} is not a unit mod {instance.p}")
    phi = instance.modulus.group_order
    k = discrete_log(instance.g, instance.modulus.residue(x))
    c = _canonical(k + 1 - x, phi)
    if not _is_solution(instance, x, c):
        raise NotASolutionError(f"c={c} does not solve x={x}")
    return c


def c_for_minus_one(instance: WelchInstance) -> int:
    """The closed form for c at x = p^e - 1, checked by substitution"""
    _require_primitive(instance)
    c = _canonical(_minus_one_c(instance), instance.modulus.group_order)
    if not _is_solution(instance, instance.q - 1, c):
        raise NotASolutionError(f"c={c} does not solve x=p^e-1")
    return c


def reflection_c(instance: WelchInstance, c: int) -> int:
    """c' = (p^(e-1)(p-3)+4)/2 - c reduced to {1..p^(e-1)(p-1)}"""
    _require_odd(instance)
    return _canonical(_minus_one_c(instance) - c, instance.modulus.group_order)


def check_reflection(
    instance: WelchInstance,
    x: int,
    c: int,
    inverse: Optional[WelchInstance] = None,
) -> bool:
    """f_g(x, c) = -f_{g^-1}(p^(e+1) - x, c') mod p^e, taken literally with exponent e+1"""
    _require_primitive(instance)
    inverse = inverse or inverse_instance(instance)
    lhs = _f(instance, x, c)
    rhs = -_f(inverse, instance.p ** (instance.e + 1) - x, reflection_c(instance, c)) % instance.q
    return lhs == rhs


def inverse_pair(instance: WelchInstance, pair: SolutionPair) -> SolutionPair:
    """(p^e - x, c_{p^e-1} - c) as a solution for g^-1; x is reduced into {1..p^e m}"""
    _require_primitive(instance)
    _require_solution(instance, pair)
    inverse = inverse_instance(instance)
    result = SolutionPair(
        x=_canonical(instance.q - pair.x, x_period(instance)),
        c=reflection_c(instance, pair.c),
    )
    _require_solution(inverse, result)
    return result


def shift_solution(instance: WelchInstance, pair: SolutionPair, n: int) -> SolutionPair:
    """(x0 + n p^e, c0 - n p^(e-1) mod m p^(e-1)); x_n is returned unreduced"""
    _require_solution(instance, pair)
    x_n = pair.x + n * instance.q
    c_n = _canonical(pair.c - n * instance.p ** (instance.e - 1), c_period(instance))
    if pow(instance.g.value, x_n - 1 + c_n, instance.q) != pair.x % instance.q:
        raise NotASolutionError(f"shift by n={n} broke {pair.as_tuple()}")
    return SolutionPair(x=x_n, c=c_n)


def c_values_for_fixed_x(instance: WelchInstance, x: int) -> List[int]:
    """c = log_g(x) - x + 1 mod ord_pe, listed over {1..m p^(e-1)}"""
    if x % instance.p == 0:
        raise NonUnitXError(f"x={x} is not a unit mod {instance.p}")
    k = discrete_log(instance.g, instance.modulus.residue(x))
    if k is None:
        return []
    first = _canonical(k - x + 1, instance.ord_pe)
    return list(range(first, c_period(instance) + 1, instance.ord_pe))


def count_c_for_fixed_x(instance: WelchInstance, x: int) -> int:
    """m p^(e-1) / ord_pe when log_g(x) exists, else 0"""
    if x % instance.p == 0:
        raise NonUnitXError(f"x={x} is not a unit mod {instance.p}")
    if discrete_log(instance.g, instance.modulus.residue(x)) is None:
        return 0
    return c_period(instance) // instance.ord_pe


def solve_fixed_x(instance: WelchInstance, x: int) -> SolutionReport:
    """Every c in {1..m p^(e-1)} solving the equation for this x, with its predicted count"""
    values = c_values_for_fixed_x(instance, x)
    return SolutionReport(
        instance=instance,
        query=Query(kind=QueryKind.FIXED_X, x=x),
        solutions=values,
        predicted_count=count_c_for_fixed_x(instance, x),
        formula="m*p^(e-1)/ord_pe if log_g(x) exists else 0",
        theorem="fixed x: m p^(e-1)/ord_{p^e}(g) values of c when log_g(x) exists, otherwise none",
        observed_count=len(values),
    )


def _predicted_for_range(instance: WelchInstance, x_range: Tuple[int, int], per_period: int) -> Optional[int]:
    """k * per_period when the range is {1..k p^e m}, otherwise None"""
    start, stop = x_range
    period = x_period(instance)
    if start == 1 and stop % period == 0 and stop > 0:
        return stop // period * per_period
    return None


def _expand(base: List[int], period: int, x_range: Tuple[int, int]) -> List[int]:
    """All integers in x_range congruent to a base solution mod period"""
    start, stop = x_range
    found = []
    for s in base:
        x = start + (s - start) % period
        while x <= stop:
            found.append(x)
            x += period
    return sorted(found)


def _finish(report: SolutionReport, verify: bool) -> SolutionReport:
    logger.info(
        f"{report.query.kind.value} solve for {report.instance.summary()}: "
        f"observed={report.observed_count} predicted={report.predicted_count}"
    )
    if verify and not report.matches_prediction:
        raise CountMismatchError(
            f"{report.query.kind.value}: observed {report.observed_count}, "
            f"predicted {report.predicted_count} ({report.formula})"
        )
    return report


def fixed_c_base_solutions(instance: WelchInstance, c: int) -> List[int]:
    """The m solutions in {1..p^e m}: one lift per x0 mod m, glued by CRT"""
    _require_odd(instance)
    m, q = instance.m, instance.q
    solutions = []
    for x0 in range(m):
        x1 = lift_welch_fixed_c(instance, x0, c).value
        x = int(crt([m, q], [(x0 + 1 - c) % m, x1])[0])
        solutions.append(_canonical(x, m * q))
    solutions.sort()
    if len({x % m for x in solutions}) != m or any(x % instance.p == 0 for x in solutions):
        raise CountMismatchError(f"fixed-c solutions {solutions} are not distinct mod m and prime to p")
    return solutions


@log_function_call
def solve_fixed_c(
    instance: WelchInstance,
    c: int,
    k: int = 1,
    x_range: Optional[Tuple[int, int]] = None,
    verify: bool = True,
) -> SolutionReport:
    """
    Solutions of g^(x-1+c) = x mod p^e for x in {1..k p^e m}, or in x_range

    Predicted count: k m on canonical ranges; no prediction otherwise.

    Args:
        instance: The (p, e, g) instance, p odd
        c: Shift
        k: Range multiplier for the default x-range
        x_range: Explicit inclusive x-range; overrides k
        verify: Raise CountMismatchError when the count disagrees with the prediction

    Returns:
        SolutionReport with the sorted solutions
    """
    x_range = x_range or (1, k * x_period(instance))
    base = fixed_c_base_solutions(instance, c)
    solutions = _expand(base, x_period(instance), x_range)
    report = SolutionReport(
        instance=instance,
        query=Query(kind=QueryKind.FIXED_C, c=c, x_range=x_range),
        solutions=solutions,
        predicted_count=_predicted_for_range(instance, x_range, instance.m),
        formula="k*m",
        theorem="fixed c: exactly m solutions for x in {1..p^e m}, k m in {1..k p^e m}",
        observed_count=len(solutions),
    )
    return _finish(report, verify)


@log_function_call
def solve_all_pairs(instance: WelchInstance, verify: bool = True) -> SolutionReport:
    """
    Every (x, c) with x in {1..m p^e}, c in {1..m p^(e-1)}

    For each x0 mod m and each root (x_bar, c_bar) mod p the p^(e-1) bivariate
    lifts give pairs (x1, c1) mod p^e; CRT with x = x0 + 1 - c0 and c = c0
    (mod m) over all c0 yields c mod m p^e, which folds p-to-1 onto the c-period.
    """
    _require_odd(instance)
    p, m, q = instance.p, instance.m, instance.q
    decomposition = decompose_unit(instance.g.value, instance.modulus)
    folded = set()
    generated = 0
    for x0 in range(m):
        x_bar = pow(decomposition.omega.value, x0, p)
        for c_bar in range(p):
            for x1, c1 in enumerate_bivariate_lifts(instance, x0, (x_bar, c_bar)):
                for c0 in range(m):
                    c = int(crt([m, q], [c0, c1])[0])
                    x = int(crt([m, q], [(x0 + 1 - c0) % m, x1])[0])
                    folded.add((_canonical(x, x_period(instance)), _canonical(c, c_period(instance))))
                    generated += 1
    if verify and generated != p * len(folded):
        raise CountMismatchError(f"folding {generated} lifted pairs gave {len(folded)}, expected a {p}-to-1 fold")

    pairs = [SolutionPair(x=x, c=c) for x, c in sorted(folded)]
    report = SolutionReport(
        instance=instance,
        query=Query(kind=QueryKind.ALL_PAIRS, x_range=(1, x_period(instance))),
        solutions=pairs,
        predicted_count=m * m * p ** (instance.e - 1),
        formula="m^2" if instance.e == 1 else "m^2*p^(e-1)",
        theorem="all pairs: |T_e| = m^2 p^(e-1) for x in {1..m p^e}, c in {1..m p^(e-1)}",
        observed_count=len(pairs),
    )
    return _finish(report, verify)


@log_function_call
def solve_p2(
    instance: WelchInstance,
    c: int,
    k: int = 1,
    x_range: Optional[Tuple[int, int]] = None,
    verify: bool = True,
) -> SolutionReport:
    """The unique (odd) solution in {1..2^e}, via the F0/F1 branch and a 2-adic lift"""
    if instance.p != 2:
        raise PrimeTwoRequiredError("solve_p2 is the p = 2 solver")
    if instance.g.value % 2 == 0:
        raise EvenGError(f"g={instance.g.value} must be odd")
    decomposition = decompose_unit(instance.g.value, instance.modulus)
    # every solution is odd, so x - 1 + c has the parity of c
    branch = select_p2_branch(decomposition, c)
    coefficient = -1 if branch is P2Branch.F1 else 1
    root = lift_simple_root(fixed_point_problem(coefficient, decomposition.one_unit.value, c, instance.modulus)).root.value
    x = _canonical(root, instance.q)
    if not _is_solution(instance, x, c):
        raise NotASolutionError(f"2-adic lift produced x={x}, which does not solve c={c}")

    x_range = x_range or (1, k * x_period(instance))
    solutions = _expand([x], x_period(instance), x_range)
    report = SolutionReport(
        instance=instance,
        query=Query(kind=QueryKind.P2, c=c, x_range=x_range),
        solutions=solutions,
        predicted_count=_predicted_for_range(instance, x_range, 1),
        formula="k",
        theorem="p = 2: exactly one solution for x in {1..2^e}, and it is odd",
        observed_count=len(solutions),
    )
    return _finish(report, verify)


def find_doubles(instance: WelchInstance) -> List[Tuple[int, int]]:
    """All (x, c) over one period with f(x, c) = f(x+1, c)"""
    g, q = instance.g.value, instance.q
    doubles = []
    for c in range(1, c_period(instance) + 1):
        for x in range(1, x_period(instance) + 1):
            if _f(instance, x, c) == _f(instance, x + 1, c):
                if pow(g, x - 1 + c, q) * (g - 1) % q != 1 % q:
                    raise CountMismatchError(f"double ({x}, {c}) fails g^(x-1+c)(g-1) = 1")
                doubles.append((x, c))
    return doubles
