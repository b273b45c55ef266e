"""
Theorem verification suite behind `welch verify`

Sweeps every instance (p, e, g) with p <= max_prime and p^e <= max_modulus and
checks each theorem against the oracle scans. Small grids are checked
exhaustively, larger ones on a seeded sample unless the config asks for
exhaustive checks. A scan that would exceed the budget counts as skipped,
not failed; any other error raised inside a check counts as a failure.
"""
import random
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.errors import BudgetExceededError, InvalidInputError, WelchError
from app.services import hensel, modring, oracle, padic, welch
from app.utils.logger import get_logger

logger = get_logger(__name__)


class VerifyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_modulus: int = Field(default=1000, gt=1)
    max_prime: int = Field(default=13, gt=1)
    seed: int = 0
    samples: int = Field(default=3, gt=0, description="Sampled c values per instance")
    exhaustive_grid: int = Field(default=20_000, gt=0, description="Largest grid checked cell by cell")
    exhaustive: bool = Field(default=False, description="Check every cell, unit and pair instead of samples")
    theorems: Optional[Tuple[str, ...]] = Field(default=None, description="Only these theorem families")
    max_grid: Optional[int] = Field(default=None, gt=0, description="Further cap on the settings grid budget")

    @field_validator("theorems")
    @classmethod
    def _known_theorems(cls, names: Optional[Tuple[str, ...]]) -> Optional[Tuple[str, ...]]:
        if names is None:
            return names
        known = [name for name, _, _, _ in THEOREMS]
        unknown = [name for name in names if name not in known]
        if unknown or not names:
            raise InvalidInputError(f"unknown theorem {', '.join(unknown) or '(none given)'}; choose from {', '.join(known)}")
        return names

    def budget(self) -> oracle.ScanBudget:
        """settings.budget() (WELCH_BUDGET or its parts), capped by the sweep bound and max_grid"""
        base = settings.budget()
        return oracle.ScanBudget(
            max_modulus=min(base.max_modulus, self.max_modulus),
            max_grid=min(base.max_grid, self.max_grid or base.max_grid),
        )

    def selects(self, name: str) -> bool:
        return self.theorems is None or name in self.theorems


class TheoremResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    anchor: str
    checks: int
    failures: int
    skipped: int
    first_failure: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: VerifyConfig
    instances: int
    results: List[TheoremResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


class _Tally:
    def __init__(self):
        self.checks = 0
        self.failures = 0
        self.skipped = 0
        self.first_failure: Optional[str] = None

    def check(self, condition: bool, detail: str) -> None:
        self.checks += 1
        if not condition:
            self.failures += 1
            if self.first_failure is None:
                self.first_failure = detail
                logger.warning(f"verification failure: {detail}")


class _Context:
    def __init__(self, instance: welch.WelchInstance, config: VerifyConfig, rng: random.Random, tally: _Tally):
        self.instance = instance
        self.config = config
        self.rng = rng
        self.tally = tally
        self.budget = config.budget()

    def sample(self, population: Sequence[int], limit: int) -> Sequence[int]:
        if len(population) <= limit:
            return population
        return sorted(self.rng.sample(population, limit))

    def pick(self, population: Sequence[int], limit: int) -> Sequence[int]:
        """All of population in exhaustive mode, else at most limit of it"""
        if self.config.exhaustive:
            return population
        return self.sample(population, limit)

    def sample_c(self) -> Sequence[int]:
        # the counting theorems are stated for a few sampled c, even when exhaustive
        return self.sample(range(1, welch.c_period(self.instance) + 1), self.config.samples)

    def grid(self) -> Iterator[Tuple[int, int]]:
        """The full period grid when small enough or exhaustive, else a seeded sample of it"""
        xs, cs = welch.x_period(self.instance), welch.c_period(self.instance)
        if self.config.exhaustive or xs * cs <= self.config.exhaustive_grid:
            return ((x, c) for c in range(1, cs + 1) for x in range(1, xs + 1))
        count = self.config.exhaustive_grid // 100
        return ((self.rng.randint(1, xs), self.rng.randint(1, cs)) for _ in range(count))

    def label(self, detail: str) -> str:
        i = self.instance
        return f"p={i.p} e={i.e} g={i.g.value}: {detail}"


def _f(instance: welch.WelchInstance, x: int, c: int) -> int:
    return welch.welch_value(instance, x, c)


def _log(u: int, modulus: modring.PrimePowerModulus) -> int:
    return padic.padic_log(u, modulus).value.value


# modring

def _check_order(ctx: _Context) -> None:
    i = ctx.instance
    order = modring.multiplicative_order(i.g)
    walk, power = 1, i.g.value
    while power != 1:
        power = power * i.g.value % i.q
        walk += 1
    ctx.tally.check(order == walk, ctx.label(f"order {order} != scanned order {walk}"))
    ctx.tally.check(i.modulus.group_order % order == 0, ctx.label("order does not divide the group order"))


def _check_discrete_log(ctx: _Context) -> None:
    i = ctx.instance
    for a in ctx.pick(list(modring.units(i.modulus)), 50):
        expected = oracle.scan_discrete_log(i.g.value, a, i.q, ctx.budget)
        actual = modring.discrete_log(i.g, i.modulus.residue(a))
        ctx.tally.check(actual == expected, ctx.label(f"log of {a}: {actual} != {expected}"))


def _check_inverse(ctx: _Context) -> None:
    i = ctx.instance
    for a in ctx.pick(list(modring.units(i.modulus)), 50):
        residue = i.modulus.residue(a)
        inverse = modring.mod_inverse(residue)
        ctx.tally.check(
            modring.mod_inverse(inverse) == residue and a * inverse.value % i.q == 1,
            ctx.label(f"inverse of {a}"),
        )


# padic

def _check_teichmuller(ctx: _Context) -> None:
    i = ctx.instance
    omega = padic.teichmuller(i.g.value, i.modulus)
    ctx.tally.check(pow(omega.value, i.p - 1, i.q) == 1, ctx.label("omega is not a (p-1)-st root of unity"))
    ctx.tally.check(omega.value % i.p == i.g.value % i.p, ctx.label("omega is not g mod p"))
    for h in ctx.pick(list(range(1, i.p)), ctx.config.samples):
        product = padic.teichmuller(i.g.value * h, i.modulus).value
        expected = omega.value * padic.teichmuller(h, i.modulus).value % i.q
        ctx.tally.check(product == expected, ctx.label(f"omega(g*{h}) is not multiplicative"))


def _one_units(ctx: _Context) -> Sequence[int]:
    i = ctx.instance
    step = 4 if i.p == 2 else i.p
    return ctx.pick(list(range(1, i.q, step)), 200)


def _check_log_exp(ctx: _Context) -> None:
    i = ctx.instance
    for u in _one_units(ctx):
        log_u = padic.padic_log(u, i.modulus)
        ctx.tally.check(padic.padic_exp(log_u, i.modulus).value == u, ctx.label(f"exp(log {u}) != {u}"))
        x = u - 1
        back = _log(padic.padic_exp(x, i.modulus).value, i.modulus)
        ctx.tally.check(back == x % i.q, ctx.label(f"log(exp {x}) != {x}"))


def _check_log_homomorphism(ctx: _Context) -> None:
    """Every pair of one-units when exhaustive, else each one-unit with a random partner"""
    i = ctx.instance
    units = list(_one_units(ctx))
    logs = {u: _log(u, i.modulus) for u in units}
    for u in units:
        partners = units if ctx.config.exhaustive else [ctx.rng.choice(units)]
        for v in partners:
            uv = u * v % i.q
            lhs = logs[uv] if uv in logs else _log(uv, i.modulus)
            rhs = (logs[u] + logs[v]) % i.q
            ctx.tally.check(lhs == rhs, ctx.label(f"log({u}*{v}) != log {u} + log {v}"))


def _check_interpolation(ctx: _Context) -> None:
    i = ctx.instance
    decomposition = padic.decompose_unit(i.g.value, i.modulus)
    for c in ctx.sample_c():
        for x in ctx.pick(list(range(1, welch.x_period(i) + 1)), 200):
            x0 = (x - 1 + c) % i.m
            value = padic.interpolated_F(x0, x, c, decomposition, i.modulus).value
            ctx.tally.check(value == pow(i.g.value, x - 1 + c, i.q), ctx.label(f"F_{x0}({x}) with c={c}"))


def _check_p2_branches(ctx: _Context) -> None:
    i = ctx.instance
    decomposition = padic.decompose_unit(i.g.value, i.modulus)
    for c in ctx.pick(list(range(1, welch.c_period(i) + 1)), 4 * ctx.config.samples):
        for x in ctx.pick(list(range(1, i.q + 1, 2)), 16):
            target = pow(i.g.value, x - 1 + c, i.q)
            matching = [
                branch for branch in padic.P2Branch
                if padic.interpolated_F2(branch, x, c, decomposition, i.modulus).value == target
            ]
            ctx.tally.check(
                matching == [padic.select_p2_branch(decomposition, x - 1 + c)],
                ctx.label(f"branches {matching} at x={x} c={c}"),
            )


# hensel

def _check_hensel(ctx: _Context) -> None:
    i = ctx.instance
    decomposition = padic.decompose_unit(i.g.value, i.modulus)
    for c in ctx.sample_c():
        for x0 in range(i.m):
            coefficient = pow(decomposition.omega.value, x0, i.q)
            problem = hensel.fixed_point_problem(coefficient, decomposition.one_unit.value, c, i.modulus)
            roots = oracle.scan_roots_above(problem.f, problem.base_root, i.p, i.e, ctx.budget)
            lifted = hensel.lift_welch_fixed_c(i, x0, c).value
            ctx.tally.check(roots == [lifted], ctx.label(f"lift {lifted} vs oracle roots {roots} at x0={x0} c={c}"))


def _check_bivariate(ctx: _Context) -> None:
    i = ctx.instance
    decomposition = padic.decompose_unit(i.g.value, i.modulus)
    for x0 in range(i.m):
        x_bar = pow(decomposition.omega.value, x0, i.p)
        for c_bar in ctx.pick(list(range(i.p)), ctx.config.samples):
            pairs = hensel.enumerate_bivariate_lifts(i, x0, (x_bar, c_bar))
            ok = len(pairs) == i.p ** (i.e - 1) and len(set(pairs)) == len(pairs) and all(
                padic.interpolated_F(x0, x, c, decomposition, i.modulus).value == x % i.q for x, c in pairs
            )
            ctx.tally.check(ok, ctx.label(f"bivariate lifts above ({x_bar}, {c_bar}) at x0={x0}"))


# welch: periodicity and patterns

def _check_periodicity(ctx: _Context) -> None:
    i = ctx.instance
    cp, xp = welch.c_period(i), welch.x_period(i)
    for x, c in ctx.grid():
        value = _f(i, x, c)
        ctx.tally.check(value == _f(i, x, c + cp), ctx.label(f"c-period fails at ({x}, {c})"))
        ctx.tally.check(value == _f(i, x + xp, c), ctx.label(f"x-period fails at ({x}, {c})"))


def _check_shift_identities(ctx: _Context) -> None:
    i = ctx.instance
    step = i.p ** (i.e - 1) * (i.p - 1)
    for x, c in ctx.grid():
        y = ctx.rng.randint(-i.q, i.q)
        ctx.tally.check(
            _f(i, x + y, c) == (_f(i, x, c + y) - y) % i.q,
            ctx.label(f"f(x+y, c) = f(x, c+y) - y fails at ({x}, {c}, {y})"),
        )
        ctx.tally.check(
            _f(i, x, c) == (_f(i, x + step, c) - i.p ** (i.e - 1)) % i.q,
            ctx.label(f"f(x + p^(e-1)(p-1), c) shift fails at ({x}, {c})"),
        )


def _check_multiples_of_p(ctx: _Context) -> None:
    i = ctx.instance
    for x, c in ctx.grid():
        x = x * i.p
        ctx.tally.check(_f(i, x, c) % i.p != 0, ctx.label(f"x={x} multiple of p solves with c={c}"))


def _check_value_sets(ctx: _Context) -> None:
    i = ctx.instance
    values = welch.value_set_at_p(i).values
    ctx.tally.check(values == oracle.scan_value_set(i), ctx.label("value set differs from the scan"))
    ctx.tally.check(welch.solution_xs_mod_p(i) == values, ctx.label("solvable residues differ from the value set"))
    inverse = welch.inverse_instance(i)
    ctx.tally.check(welch.value_set_at_p(inverse).values == values, ctx.label("g and g^-1 value sets differ"))
    for c in range(1, i.m + 1):
        lhs = pow(i.g.value, i.p - 1 + c, i.p)
        rhs = pow(inverse.g.value, i.p - 1 + (i.m - c), i.p)
        ctx.tally.check(lhs == rhs, ctx.label(f"g^(p-1+c) != (g^-1)^(p-1+m-c) mod p at c={c}"))


def _check_doubles(ctx: _Context) -> None:
    i = ctx.instance
    grid = welch.x_period(i) * welch.c_period(i)
    ctx.budget.check(i.q, grid)
    if grid > ctx.config.exhaustive_grid:
        raise BudgetExceededError("doubles are only compared on exhaustive grids")
    expected = [
        (x, c)
        for c in range(1, welch.c_period(i) + 1)
        for x in range(1, welch.x_period(i) + 1)
        if (pow(i.g.value, x - 1 + c, i.q) - x) % i.q == (pow(i.g.value, x + c, i.q) - x - 1) % i.q
    ]
    ctx.tally.check(sorted(welch.find_doubles(i)) == sorted(expected), ctx.label("doubles differ from the scan"))


# welch: primitive-root symmetries

def _primitive(instance: welch.WelchInstance) -> bool:
    return instance.p != 2 and modring.is_primitive_root(instance.g)


def _check_unique_c(ctx: _Context) -> None:
    i = ctx.instance
    for x in ctx.pick(list(modring.units(i.modulus)), 50):
        c = welch.unique_c_for_x(i, x)
        found = oracle.scan_fixed_x(i, x, ctx.budget)
        ctx.tally.check(found == [c], ctx.label(f"unique c for x={x}: {c} vs {found}"))
    c = welch.c_for_minus_one(i)
    ctx.tally.check(c == welch.unique_c_for_x(i, i.q - 1), ctx.label("closed form at x = p^e - 1"))


def _check_reflection(ctx: _Context) -> None:
    i = ctx.instance
    inverse = welch.inverse_instance(i)
    for x, c in ctx.grid():
        ctx.tally.check(welch.check_reflection(i, x, c, inverse), ctx.label(f"reflection fails at ({x}, {c})"))


def _check_inverse_pairs(ctx: _Context) -> None:
    i = ctx.instance
    phi = i.modulus.group_order
    inverse = welch.inverse_instance(i)
    for x, c in oracle.scan_all_pairs(i, ctx.budget):
        pair = welch.SolutionPair(x=x, c=c)
        image = welch.inverse_pair(i, pair)
        back = welch.inverse_pair(inverse, image)
        ctx.tally.check(
            (back.x - x) % i.q == 0 and (back.c - c) % phi == 0,
            ctx.label(f"inverse_pair is not an involution at ({x}, {c})"),
        )


def _check_shift_solutions(ctx: _Context) -> None:
    i = ctx.instance
    period = welch.c_period(i)
    pairs = oracle.scan_all_pairs(i, ctx.budget)
    if not ctx.config.exhaustive:
        pairs = pairs[: 4 * ctx.config.samples]
    for x, c in pairs:
        pair = welch.SolutionPair(x=x, c=c)
        for n in (-1, 1, 2, i.m):
            shifted = welch.shift_solution(i, pair, n)
            ctx.tally.check(
                pow(i.g.value, shifted.x - 1 + shifted.c, i.q) == x % i.q,
                ctx.label(f"shift by {n} of ({x}, {c})"),
            )
        ctx.tally.check(
            (welch.shift_solution(i, pair, i.m).c - c) % period == 0,
            ctx.label(f"shift by m does not return c at ({x}, {c})"),
        )


# welch: counting

def _check_fixed_c(ctx: _Context) -> None:
    i = ctx.instance
    for c in ctx.sample_c():
        report = welch.solve_fixed_c(i, c, verify=False)
        expected = oracle.scan_fixed_c(i, c, budget=ctx.budget)
        ctx.tally.check(
            report.solutions == expected and report.observed_count == i.m,
            ctx.label(f"fixed c={c}: {report.solutions} vs {expected}"),
        )
        xs = report.solutions
        ctx.tally.check(
            len({x % i.m for x in xs}) == len(xs) and all(x % i.p for x in xs),
            ctx.label(f"fixed c={c}: solutions not distinct mod m or not prime to p"),
        )


def _check_extended_range(ctx: _Context) -> None:
    i = ctx.instance
    for c in ctx.sample_c():
        for k in (2, 3):
            report = welch.solve_fixed_c(i, c, k=k, verify=False)
            expected = oracle.scan_fixed_c(i, c, (1, k * welch.x_period(i)), ctx.budget)
            ctx.tally.check(
                report.solutions == expected and report.observed_count == k * i.m,
                ctx.label(f"extended range k={k} c={c}"),
            )


def _check_pairs(ctx: _Context) -> None:
    i = ctx.instance
    expected = oracle.scan_all_pairs(i, ctx.budget)
    report = welch.solve_all_pairs(i, verify=False)
    found = [pair.as_tuple() for pair in report.solutions]
    ctx.tally.check(found == expected, ctx.label("all pairs differ from the grid scan"))
    ctx.tally.check(report.observed_count == i.m * i.m * i.p ** (i.e - 1), ctx.label("|T_e| != m^2 p^(e-1)"))


def _check_p2(ctx: _Context) -> None:
    """c runs over one period {1..2^(e-1)}; with m = 1 the x-range {1..2^e} is one x-period"""
    i = ctx.instance
    scanned = oracle.scan_fixed_c_all(i, ctx.budget)
    for c in ctx.pick(list(range(1, welch.c_period(i) + 1)), 4 * ctx.config.samples):
        report = welch.solve_p2(i, c, verify=False)
        expected = scanned[c]
        ctx.tally.check(
            report.solutions == expected and len(expected) == 1 and expected[0] % 2 == 1,
            ctx.label(f"p = 2 solve at c={c}: {report.solutions} vs {expected}"),
        )


def _check_fixed_x(ctx: _Context) -> None:
    i = ctx.instance
    for x in ctx.pick(list(modring.units(i.modulus)), 50):
        expected = oracle.scan_fixed_x(i, x, ctx.budget)
        ctx.tally.check(
            welch.c_values_for_fixed_x(i, x) == expected
            and welch.count_c_for_fixed_x(i, x) in (0, welch.c_period(i) // i.ord_pe)
            and welch.count_c_for_fixed_x(i, x) == len(expected),
            ctx.label(f"c count for x={x}"),
        )


def _odd(instance: welch.WelchInstance) -> bool:
    return instance.p != 2


def _two(instance: welch.WelchInstance) -> bool:
    return instance.p == 2


def _any(instance: welch.WelchInstance) -> bool:
    return True


Check = Callable[[_Context], None]

# (name, anchor, applies-to, check)
THEOREMS: List[Tuple[str, str, Callable[[welch.WelchInstance], bool], Check]] = [
    ("multiplicative-order", "order of g is minimal and divides p^(e-1)(p-1)", _any, _check_order),
    ("discrete-log", "Pohlig-Hellman log agrees with the power walk", _any, _check_discrete_log),
    ("inverse-involution", "mod_inverse(mod_inverse(a)) = a", _any, _check_inverse),
    ("teichmuller", "omega is a multiplicative (p-1)-st root of unity congruent to g", _odd, _check_teichmuller),
    ("log-exp-round-trip", "exp(log(1+x)) = 1+x and log(exp(x)) = x", _any, _check_log_exp),
    ("log-homomorphism", "log(uv) = log u + log v", _any, _check_log_homomorphism),
    ("interpolation", "F_x0(x) = g^(x-1+c) whenever x-1+c = x0 mod m", _odd, _check_interpolation),
    ("p2-branch-coverage", "exactly one of F0, F1 equals g^(x-1+c) mod 2^e", lambda i: _two(i) and i.e >= 2, _check_p2_branches),
    ("hensel-uniqueness", "a unique x above omega(g)^x0 mod p solves F_x0(x) = x", _odd, _check_hensel),
    ("bivariate-lifts", "|N_e| = p^(e-1) |N_1|", _odd, _check_bivariate),
    ("periodicity", "f(x, c) = f(x, c + m p^(e-1)) = f(x + m p^e, c)", _any, _check_periodicity),
    ("shift-identities", "f(x+y, c) = f(x, c+y) - y and f(x, c) = f(x + p^(e-1)(p-1), c) - p^(e-1)", _any, _check_shift_identities),
    ("no-solutions-at-multiples-of-p", "g^(x-1+c) != x mod p when p | x", _odd, _check_multiples_of_p),
    ("value-sets", "solvable x mod p are exactly {g^c}; g and g^-1 share it", _odd, _check_value_sets),
    ("doubles", "f(x, c) = f(x+1, c) iff g^(x-1+c)(g-1) = 1", _any, _check_doubles),
    ("unique-c", "primitive g: one c per unit x, c = (p^(e-1)(p-3)+4)/2 at x = p^e - 1", _primitive, _check_unique_c),
    ("reflection", "f_g(x, c) = -f_{g^-1}(p^(e+1) - x, c')", _primitive, _check_reflection),
    ("inverse-pairs", "(p^e - x, c') solves the equation for g^-1", _primitive, _check_inverse_pairs),
    ("shift-solutions", "(x + n p^e, c - n p^(e-1)) keeps g^(x-1+c) = x_0", _any, _check_shift_solutions),
    ("fixed-c-count", "exactly m solutions for x in {1..p^e m}", _odd, _check_fixed_c),
    ("extended-range-count", "exactly k m solutions for x in {1..k p^e m}", _odd, _check_extended_range),
    ("pair-count", "|T_e| = m^2 p^(e-1)", _odd, _check_pairs),
    ("p2-uniqueness", "p = 2: exactly one solution in {1..2^e}, and it is odd", _two, _check_p2),
    ("fixed-x-count", "m p^(e-1)/ord_pe values of c when log_g(x) exists, else 0", _any, _check_fixed_x),
]


def iter_instances(config: VerifyConfig) -> Iterator[welch.WelchInstance]:
    """Every (p, e, g) with p <= max_prime, p^e <= max_modulus and g a unit below p (odd g below 2^e for p = 2)"""
    for p in range(2, config.max_prime + 1):
        if not modring.is_prime(p):
            continue
        e = 1
        while p ** e <= config.max_modulus:
            generators = range(1, 2 ** e, 2) if p == 2 else range(1, p)
            for g in generators:
                yield welch.WelchInstance.create(p, e, g)
            e += 1


def run_verification(config: Optional[VerifyConfig] = None) -> VerificationReport:
    """
    Run the selected theorem families over every instance of the sweep

    Args:
        config: Sweep bounds, sampling and theorem selection (defaults to VerifyConfig())

    Returns:
        VerificationReport with one TheoremResult per selected theorem, in THEOREMS order
    """
    config = config or VerifyConfig()
    rng = random.Random(config.seed)
    selected = [theorem for theorem in THEOREMS if config.selects(theorem[0])]
    tallies: Dict[str, _Tally] = {name: _Tally() for name, _, _, _ in selected}
    instances = 0
    for instance in iter_instances(config):
        instances += 1
        for name, _, applies, check in selected:
            if not applies(instance):
                continue
            tally = tallies[name]
            ctx = _Context(instance, config, rng, tally)
            try:
                check(ctx)
            except BudgetExceededError as e:
                tally.skipped += 1
                logger.debug(f"{name} skipped for {instance.summary()}: {e}")
            except WelchError as e:
                tally.check(False, ctx.label(f"{type(e).__name__}: {e}"))
        logger.debug(f"verified {instance.summary()}")

    results = [
        TheoremResult(
            name=name,
            anchor=anchor,
            checks=tallies[name].checks,
            failures=tallies[name].failures,
            skipped=tallies[name].skipped,
            first_failure=tallies[name].first_failure,
        )
        for name, anchor, _, _ in selected
    ]
    report = VerificationReport(config=config, instances=instances, results=results)
    logger.info(f"verification over {instances} instances: {'pass' if report.passed else 'FAIL'}")
    return report
