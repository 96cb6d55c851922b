"""Validity checking for relation laws over all small carriers.

A law is a quasi-equation (see terms).  ``check_validity`` quantifies its
variables over one of four pools —

    REL     all relations on the carrier
    LTREL   left-total relations
    TOTAL   left- and right-total relations
    LTREL0  program-shaped relations on a fail-extended carrier
            (size n means n proper states plus the fail state)

— and sweeps every assignment at each requested size, either exhaustively
(budget-guarded) or by seeded random sampling.  Counterexamples are
shrunk by greedy pair removal (best effort, membership-preserving) and
replayed through the reference evaluator before being reported, so a
Counterexample verdict is always a genuine failing instance.

Assignments are ordered lexicographically with the first variable most
significant; the reported counterexample is the first in that order, and
verdicts are byte-for-byte deterministic given (formula, domain, sizes,
mode, seed) regardless of kernel path or worker count.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Union

from . import config, kernels
from .hoare import InternalCheckError
from .relations import Relation, StateSpace, from_mask, make_space
from .terms import Formula, eval_formula, parse_formula

DOMAINS = ("REL", "LTREL", "TOTAL", "LTREL0")


class BudgetError(RuntimeError):
    """Exhaustive sweep would exceed the evaluation budget."""


def space_for(domain: str, size: int) -> StateSpace:
    """The carrier used at a given size (LTREL0 adds the fail state "0")."""
    if size < 1:
        raise ValueError("size must be at least 1")
    names = tuple(str(i) for i in range(1, size + 1))
    if domain == "LTREL0":
        return make_space(names, "0")
    return make_space(names)


def in_domain(domain: str, rel: Relation) -> bool:
    if domain == "REL":
        return True
    if domain == "LTREL":
        return rel.is_left_total
    if domain == "TOTAL":
        return rel.is_total
    if domain == "LTREL0":
        return rel.is_program_relation()
    raise ValueError(f"unknown domain {domain!r}")


def candidate_pool(domain: str, space: StateSpace):
    """Pool masks in canonical (ascending) order; shared by every path."""
    return kernels.pool_masks(domain, space)


@dataclass(frozen=True)
class Counterexample:
    space: StateSpace
    assignment: tuple[tuple[str, Relation], ...]  # in variable order
    size: int

    def env(self) -> dict[str, Relation]:
        return dict(self.assignment)

    def format(self) -> str:
        return "\n".join(f"{name} = {rel}" for name, rel in self.assignment)


@dataclass(frozen=True)
class Verdict:
    formula: str  # normalized
    domain: str
    sizes: tuple[int, ...]
    mode: str
    evaluations: int
    counterexample: Optional[Counterexample]
    seed: Optional[int] = None

    @property
    def valid(self) -> bool:
        return self.counterexample is None

    def summary(self) -> str:
        span = ",".join(str(s) for s in self.sizes)
        if self.valid:
            return (f"valid at sizes {span} over {self.domain} "
                    f"({self.evaluations} instances checked, {self.mode})")
        cx = self.counterexample
        return (f"counterexample at size {cx.size} over {self.domain} "
                f"({self.evaluations} instances checked, {self.mode})\n"
                + cx.format())


def _digits_of(index: int, base: int, k: int) -> tuple[int, ...]:
    out = [0] * k
    for v in range(k - 1, -1, -1):
        out[v] = index % base
        index //= base
    return tuple(out)


def _assignment(formula: Formula, space: StateSpace, pool, digits
                ) -> dict[str, Relation]:
    names = formula.variables()
    return {names[v]: from_mask(space, int(pool[d]))
            for v, d in enumerate(digits)}


def _minimize(formula: Formula, env: dict[str, Relation],
              space: StateSpace, domain: str) -> dict[str, Relation]:
    # drop pairs one at a time while the instance still refutes the law and
    # every relation stays inside the quantification pool
    names = list(env)
    changed = True
    while changed:
        changed = False
        for name in names:
            for pair in sorted(env[name].pairs):
                cand = Relation(space, env[name].pairs - {pair})
                if not in_domain(domain, cand):
                    continue
                trial = dict(env)
                trial[name] = cand
                if not eval_formula(formula, trial, space):
                    env = trial
                    changed = True
    return env


def _finish_counterexample(formula: Formula, env: dict[str, Relation],
                           space: StateSpace, domain: str, size: int
                           ) -> Counterexample:
    env = _minimize(formula, env, space, domain)
    if eval_formula(formula, env, space):  # replay must still refute
        raise InternalCheckError("minimized counterexample no longer refutes")
    names = formula.variables()
    return Counterexample(space, tuple((n, env[n]) for n in names), size)


def _python_scan(formula: Formula, space: StateSpace, pool, k: int
                 ) -> tuple[int, int]:
    """Reference path: same (first-failure index, examined) contract."""
    rels = [from_mask(space, int(m)) for m in pool]
    names = formula.variables()
    count = 0
    for ai, digits in enumerate(itertools.product(range(len(rels)), repeat=k)):
        count += 1
        env = {names[v]: rels[d] for v, d in enumerate(digits)}
        if not eval_formula(formula, env, space):
            return ai, count
    return -1, count


def _kernel_scan(formula: Formula, space: StateSpace, pool, k: int,
                 path: str, workers: int) -> tuple[int, int]:
    compiled = kernels.compile_formula(formula, space)
    total = len(pool) ** k
    if workers <= 1 or total < 1 << 16:
        return kernels.run_exhaustive(compiled, pool, path)
    # contiguous slices; earliest hit wins, count canonicalized to the
    # sequential value so worker count never changes the verdict
    bounds = [total * i // workers for i in range(workers + 1)]
    with ThreadPoolExecutor(max_workers=workers) as pool_:
        futs = [pool_.submit(kernels.run_exhaustive, compiled, pool, path,
                             bounds[i], bounds[i + 1])
                for i in range(workers)]
        hits = [f.result()[0] for f in futs]
    found = [h for h in hits if h >= 0]
    if not found:
        return -1, total
    first = min(found)
    return first, first + 1


def check_validity(formula: Union[Formula, str],
                   domain: str = "REL",
                   sizes: tuple[int, ...] = (1, 2),
                   mode: str = "exhaustive",
                   seed: int = 0,
                   samples: int = 20_000,
                   budget: Optional[int] = None,
                   workers: int = 1) -> Verdict:
    """Decide a law over every carrier size in ``sizes``.

    Exhaustive mode enumerates all assignments (error if the total count
    exceeds the budget); random mode draws ``samples`` seeded assignments
    per size.  Validity claims cover only the tested sizes.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r} (expected one of {DOMAINS})")
    if mode not in ("exhaustive", "random"):
        raise ValueError(f"unknown mode {mode!r}")
    if not sizes:
        raise ValueError("no sizes given")
    sizes = tuple(sizes)
    k = len(formula.variables())

    plan = []
    for size in sizes:
        space = space_for(domain, size)
        pool = candidate_pool(domain, space)
        plan.append((size, space, pool))

    if mode == "exhaustive":
        limit = config.default_budget() if budget is None else budget
        total = sum(len(pool) ** k for _, _, pool in plan)
        if total > limit:
            raise BudgetError(
                f"exhaustive sweep needs {total} evaluations "
                f"(budget {limit}); use mode='random' or raise RELIC_BUDGET")

    choice = kernels.kernel_choice()
    evaluations = 0
    for size, space, pool in plan:
        if mode == "random":
            rng = random.Random(seed)
            names = formula.variables()
            rels: dict[int, Relation] = {}
            for _ in range(samples):
                digits = tuple(rng.randrange(len(pool)) for _ in range(k))
                env = {}
                for v, d in enumerate(digits):
                    if d not in rels:
                        rels[d] = from_mask(space, int(pool[d]))
                    env[names[v]] = rels[d]
                evaluations += 1
                if not eval_formula(formula, env, space):
                    cx = _finish_counterexample(formula, env, space, domain, size)
                    return Verdict(str(formula), domain, sizes, mode,
                                   evaluations, cx, seed)
            continue
        if choice == "python" or space.size > kernels.MAX_TABLE_CARRIER:
            fail, count = _python_scan(formula, space, pool, k)
        else:
            fail, count = _kernel_scan(formula, space, pool, k, choice, workers)
        evaluations += count
        if fail >= 0:
            digits = _digits_of(fail, len(pool), k)
            env = _assignment(formula, space, pool, digits)
            if eval_formula(formula, env, space):  # kernel/reference must agree
                raise InternalCheckError(
                    f"kernel reported a failing assignment at index {fail} "
                    "but the reference evaluator accepts it")
            cx = _finish_counterexample(formula, env, space, domain, size)
            return Verdict(str(formula), domain, sizes, mode, evaluations, cx,
                           seed if mode == "random" else None)
    return Verdict(str(formula), domain, sizes, mode, evaluations, None,
                   seed if mode == "random" else None)


# ---------------------------------------------------------------------------
# preset laws
# ---------------------------------------------------------------------------

def eq_valn(n: int) -> Formula:
    """Restricted left monotonicity along a chain of n+1 approximants.

    (s0 <= sn) & (si <= s(i+1) * t for i < n)  =>  s0 * t <= sn * t
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ants = [f"s0 <= s{n}"]
    ants += [f"s{i} <= (s{i + 1} * t)" for i in range(n)]
    return parse_formula(" & ".join(ants) + f" => (s0 * t) <= (s{n} * t)")


def eq_val() -> Formula:
    """The n=1 instance (the base restricted-monotonicity law)."""
    return eq_valn(1)


def existence_chain_law(n: int) -> Formula:
    """Refinement transports definedness along an n-step product chain.

    s ref<= t & ex((..(x . t) . u1) .. . un) => same chain over s
    """
    if n < 0:
        raise ValueError("n must not be negative")

    def chain(mid: str) -> str:
        t = f"(x . {mid})"
        for i in range(1, n + 1):
            t = f"({t} . u{i})"
        return t

    return parse_formula(f"s ref<= t & ex({chain('t')}) => ex({chain('s')})")


@dataclass(frozen=True)
class PresetLaw:
    name: str
    formula: str
    domain: str
    sizes: tuple[int, ...]
    expected: str  # "valid" | "counterexample"
    mode: str = "exhaustive"
    samples: int = 20_000
    note: str = ""

    def run(self, seed: int = 0, workers: int = 1) -> Verdict:
        return check_validity(self.formula, self.domain, self.sizes,
                              mode=self.mode, seed=seed,
                              samples=self.samples, workers=workers)


def _semiring_laws(prod: str, join: str) -> list[str]:
    p, j = prod, join
    return [
        f"((x {j} y) {j} z) = (x {j} (y {j} z))",
        f"(x {j} y) = (y {j} x)",
        f"(x {j} x) = x",
        f"((x {p} y) {p} z) = (x {p} (y {p} z))",
        f"((x {j} y) {p} z) = ((x {p} z) {j} (y {p} z))",
        f"(x {p} (y {j} z)) = ((x {p} y) {j} (x {p} z))",
        f"(1' {p} x) = x",
        f"(x {p} 1') = x",
    ]


def preset_suites() -> dict[str, tuple[PresetLaw, ...]]:
    """Named law collections with their expected verdicts."""
    suites: dict[str, tuple[PresetLaw, ...]] = {}

    suites["eq-valn"] = tuple(
        PresetLaw(f"eq-valn[n={n}]", str(eq_valn(n)), "REL", (1, 2), "valid")
        for n in (1, 2, 3))

    angelic = [PresetLaw(f"semiring-angelic[{i}]", f, "REL", (1, 2), "valid")
               for i, f in enumerate(_semiring_laws(";", "cup"), 1)]
    demonic = [PresetLaw(f"semiring-demonic[{i}]", f, "REL", (1, 2), "valid")
               for i, f in enumerate(_semiring_laws("*", "dj"), 1)]
    suites["semiring"] = tuple(angelic + demonic)

    suites["separation"] = (
        PresetLaw("subidentity-left-total", "s <= 1' => s = 1'",
                  "LTREL", (1, 2), "valid"),
        PresetLaw("subidentity-all-relations", "s <= 1' => s = 1'",
                  "REL", (1, 2), "counterexample",
                  note="the empty relation sits strictly below the identity"),
        PresetLaw("left-monotonicity", "s0 <= s1 => (s0 * t) <= (s1 * t)",
                  "REL", (1, 2), "counterexample",
                  note="shrinking the domain of s1 can cut rows of s1 * t"),
    )

    suites["zero-units"] = (
        PresetLaw("empty-join-unit", "x cup 0e = x", "REL", (1, 2), "valid"),
        PresetLaw("fail-join-unit", "x cup Z = x", "LTREL0", (1, 2),
                  "counterexample",
                  note="joining the always-failing program adds fail edges"),
    )

    family = []
    for n in (1, 2, 3):
        family.append(PresetLaw(
            f"existence-chain[n={n}]", str(existence_chain_law(n)),
            "REL", (1, 2), "valid",
            note="verdict recorded, not assumed"))
    family.append(PresetLaw(
        "existence-chain[n=4]", str(existence_chain_law(4)),
        "REL", (2,), "valid", mode="random", samples=50_000,
        note="verdict recorded, not assumed; exhaustive sweep is over budget"))
    suites["open-problems-family"] = tuple(family)

    return suites
