"""Approximation scheme for the best non-adaptive policy on unit-cost instances.

The scheme decomposes the threshold range into windows [a, a'] whose ends grow
geometrically, solves a bounded problem on each window, and composes the
window policies.  On a window, candidate policies are produced either by

  * full enumeration of all length-a' orders (small a), or
  * guessing the milestones of the buckets into which an ideal policy's first
    a' tests can be partitioned and rebuilding dominating buckets from them
    (``dominance.build_buckets``); or, in guided mode, reading sizes and
    milestones off a concrete reference policy and certifying the resulting
    tail bounds against it.

Window starts are the powers 2^(j/eps + shift); running the composition for
every shift and keeping the cheapest result recovers the loss a single fixed
schedule could incur, because for at least one shift the window boundaries
contribute only an O(eps) fraction of the reference cost.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations, islice, permutations, product
from typing import Iterator, Sequence

import numpy as np

from .core import (
    BudgetExceededError,
    Instance,
    PartialPolicy,
    ValidationError,
    check_policy,
    compose,
    pad_complete,
)
from .dominance import (
    build_buckets,
    candidate_milestone_vectors,
    milestones,
    unit_fraction,
)
from .evaluation import cost_tail, survival_matrix

DEFAULT_BUDGET = 10**8
_BATCH = 4096


def resolve_budget(budget: int | None = None) -> int:
    """Explicit value, else the SBFE_BUDGET environment variable, else 10^8."""
    if budget is not None:
        if budget < 1:
            raise ValidationError("budget must be positive")
        return budget
    env = os.environ.get("SBFE_BUDGET")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValidationError(f"SBFE_BUDGET={env!r} is not an integer") from exc
        if value < 1:
            raise ValidationError("SBFE_BUDGET must be positive")
        return value
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class CostWindow:
    """Threshold window [a, a'] together with the working accuracy."""

    a: int
    a_prime: int
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", unit_fraction(self.eps))
        if not 1 <= self.a < self.a_prime:
            raise ValidationError(
                f"window requires 1 <= a < a', got a={self.a}, a'={self.a_prime}"
            )


@dataclass(frozen=True)
class CertifyReport:
    """Per-threshold comparison of a rebuilt policy against its reference.

    ``pairs`` holds (ell, Pr[cost(policy) >= ell], Pr[dilated reference cost
    >= ell]) for every ell in [a, a']; ``passed`` asserts the first component
    never exceeds the second (up to 1e-12).
    """

    a: int
    a_prime: int
    eps: Fraction
    case_tag: str
    sizes: tuple[int, ...]
    pairs: tuple[tuple[int, float, float], ...]
    passed: bool


@dataclass(frozen=True)
class PtasResult:
    policy: PartialPolicy
    expected: float
    eps_int: Fraction
    shift: int
    thresholds: tuple[int, ...]
    reports: tuple[CertifyReport, ...] = ()

    @property
    def all_certified(self) -> bool:
        return all(r.passed for r in self.reports)


def internal_epsilon(eps_target: float) -> Fraction:
    """Working accuracy used inside the scheme for a requested one.

    1/ceil(56/eps_target): with this choice the cubed bucket-size dilation
    stays below 1 + eps_target/4 and the final chain of losses lands below
    1 + eps_target.
    """
    if not 0 < eps_target <= 1:
        raise ValidationError(
            f"eps_target must lie in (0, 1], got {eps_target}"
        )
    return Fraction(1, math.ceil(56 / eps_target))


def shift_thresholds(n: int, eps, shift: int) -> tuple[int, ...]:
    """Window boundaries 1 = a_0 < a_1 < ... < a_{h+1} = n for one shift.

    Interior boundaries are the powers 2^(shift + j/eps) below n; consecutive
    boundaries therefore differ by a factor of at most 2^(1/eps).
    """
    frac = unit_fraction(eps)
    r = frac.denominator
    if n < 2:
        raise ValidationError("threshold schedules need n >= 2")
    if not 0 <= shift < r:
        raise ValidationError(f"shift must lie in [0, {r - 1}], got {shift}")
    vals = {1}
    v = 2**shift
    while v < n:
        vals.add(v)
        v <<= r
    return tuple(sorted(vals)) + (n,)


def bucket_size_plan(
    a: int, a_prime: int, eps, *, force_case2: bool = False
) -> tuple[tuple[int, ...] | None, str]:
    """Target bucket sizes for the window [a, a'], with the case tag.

    Case "1" (a below 4(1+eps)/eps^2 + 1): no plan, the window is solved by
    full enumeration.  Otherwise the first bucket has floor((a-1)/(1+2 eps))
    elements and the remaining a' - |first| elements are cut into buckets of
    size 1/eps, the last one holding between 1/eps and 2/eps ("2b"); when the
    remainder is below 2/eps it forms a single second bucket ("2a").

    ``force_case2`` skips the case-1 test so the bucket machinery can be
    exercised at sizes where enumeration would normally be used.
    """
    frac = unit_fraction(eps)
    r = frac.denominator
    if not 1 <= a < a_prime:
        raise ValidationError(f"need 1 <= a < a', got a={a}, a'={a_prime}")
    if not force_case2 and Fraction(a) < 4 * (1 + frac) / frac**2 + 1:
        return None, "1"
    first = int(Fraction(a - 1) / (1 + 2 * frac))
    if first < r:
        raise ValidationError(
            f"window start a={a} is too small for bucket construction at eps={frac}"
        )
    rest = a_prime - first
    if rest < 2 * r:
        return (first, rest), "2a"
    sizes = [first]
    while rest > 2 * r:
        sizes.append(r)
        rest -= r
    sizes.append(rest)
    return tuple(sizes), "2b"


def estimate_enumeration(
    n: int, window: CostWindow, *, force_case2: bool = False
) -> int:
    """Upper bound on the number of candidate policies a window produces."""
    plan, tag = bucket_size_plan(
        window.a, window.a_prime, window.eps, force_case2=force_case2
    )
    r = window.eps.denominator
    if tag == "1":
        est = 1
        for i in range(window.a_prime):
            est *= n - i
        return est
    vectors = math.comb(n, r - 1)
    if tag == "2a":
        cap2 = int((1 + 2 * window.eps) * plan[1])
        return vectors * sum(math.comb(n, s) for s in range(cap2 + 1))
    return vectors ** len(plan)


def _fit_length(order: Sequence[int], a_prime: int, n: int) -> tuple[int, ...]:
    """Trim or pad an order to exactly a' tests.

    Both operations preserve Pr[cost >= i] for every i <= a': trimming cannot
    change what the first a' tests see, and extra tests only help.
    """
    if len(order) >= a_prime:
        return tuple(order[:a_prime])
    used = set(order)
    out = list(order)
    for i in range(1, n + 1):
        if len(out) == a_prime:
            break
        if i not in used:
            out.append(i)
    return tuple(out)


def _candidate_orders(
    inst: Instance, window: CostWindow, *, force_case2: bool = False
) -> Iterator[tuple[int, ...]]:
    n = inst.n
    a, a_prime, eps = window.a, window.a_prime, window.eps
    plan, tag = bucket_size_plan(a, a_prime, eps, force_case2=force_case2)
    if tag == "1":
        yield from permutations(range(1, n + 1), a_prime)
        return
    r = eps.denominator
    first_vectors = list(candidate_milestone_vectors(n, plan[0], eps))
    if tag == "2a":
        cap2 = int((1 + 2 * eps) * plan[1])
        for vec in first_vectors:
            (v1,) = build_buckets(n, (plan[0],), (vec,), eps)
            pool = [i for i in range(1, n + 1) if i not in set(v1)]
            for size in range(cap2 + 1):
                for v2 in combinations(pool, size):
                    yield _fit_length(v1 + v2, a_prime, n)
        return
    per_bucket = [first_vectors] + [
        list(candidate_milestone_vectors(n, s, eps)) for s in plan[1:]
    ]
    for combo in product(*per_bucket):
        flat: set[int] = set()
        clash = False
        for vec in combo:
            for m in vec:
                if m in flat:
                    clash = True
                    break
                flat.add(m)
            if clash:
                break
        if clash:
            # milestones of disjoint sets are distinct elements
            continue
        buckets = build_buckets(n, plan, combo, eps)
        order: list[int] = []
        for bucket in buckets:
            order.extend(bucket)  # buckets are sorted: ascending probability
        yield _fit_length(order, a_prime, n)


def _check_bounded_inputs(inst: Instance, window: CostWindow) -> None:
    if not inst.is_unit_cost:
        raise ValidationError("the bounded solver requires a unit-cost instance")
    if window.a_prime > inst.n:
        raise ValidationError(
            f"window end a'={window.a_prime} exceeds n={inst.n}"
        )


def enumerate_bounded(
    inst: Instance,
    window: CostWindow,
    *,
    budget: int | None = None,
    force_case2: bool = False,
) -> Iterator[PartialPolicy]:
    """Stream of candidate length-a' policies for a window.

    When the window falls to the bucket cases, the stream contains, for the
    guess matching the true milestones of an ideal policy's bucket
    decomposition, a policy whose cost tails on [a, a'] are dominated by the
    (1+2 eps)^3-dilated tails of that ideal policy.
    """
    _check_bounded_inputs(inst, window)
    limit = resolve_budget(budget)
    est = estimate_enumeration(inst.n, window, force_case2=force_case2)
    if est > limit:
        raise BudgetExceededError(est, limit)
    for order in _candidate_orders(inst, window, force_case2=force_case2):
        yield PartialPolicy(order)


def best_bounded(
    inst: Instance,
    window: CostWindow,
    *,
    budget: int | None = None,
    force_case2: bool = False,
) -> PartialPolicy:
    """Candidate minimizing ``evaluation.bounded_score`` over the window stream.

    Ties are broken toward the lexicographically smallest order.  Candidates
    are scored in batches through the vectorized survival recursion, which
    agrees with ``bounded_score`` entry for entry.
    """
    _check_bounded_inputs(inst, window)
    limit = resolve_budget(budget)
    est = estimate_enumeration(inst.n, window, force_case2=force_case2)
    if est > limit:
        raise BudgetExceededError(est, limit)
    a, a_prime = window.a, window.a_prime
    best: tuple[float, tuple[int, ...]] | None = None
    stream = _candidate_orders(inst, window, force_case2=force_case2)
    while True:
        chunk = list(islice(stream, _BATCH))
        if not chunk:
            break
        surv = survival_matrix(inst, np.array(chunk, dtype=np.intp))
        scores = surv[:, a - 1 : a_prime - 1].sum(axis=1) + a_prime * surv[:, a_prime - 1]
        low = scores.min()
        contenders = sorted(chunk[i] for i in np.flatnonzero(scores == low))
        cand = (float(low), contenders[0])
        if best is None or cand[0] < best[0] or (cand[0] == best[0] and cand[1] < best[1]):
            best = cand
    if best is None:
        raise ValidationError("the window produced no candidates")
    return PartialPolicy(best[1])


def certify_bounded(
    inst: Instance,
    reference: PartialPolicy,
    window: CostWindow,
    *,
    force_case2: bool = False,
) -> tuple[PartialPolicy, CertifyReport]:
    """Rebuild a window policy from a reference and verify the tail bounds.

    Instead of guessing, the bucket sizes and milestones are read off the
    reference's first a' tests.  The report compares Pr[cost(policy) >= ell]
    with Pr[(1+2 eps)^3 cost(reference) >= ell] for each ell in [a, a']; the
    bucket dominance guarantees make the inequality hold whenever the
    construction's assumptions do, so ``passed`` doubles as a runtime check.
    """
    _check_bounded_inputs(inst, window)
    check_policy(inst, reference)
    a, a_prime, eps = window.a, window.a_prime, window.eps
    if len(reference) < a_prime:
        raise ValidationError(
            f"reference has {len(reference)} tests but the window needs {a_prime}"
        )
    if Fraction(a) < 2 * (1 + eps) ** 2 / eps:
        raise ValidationError(
            f"window start a={a} is below 2(1+eps)^2/eps for eps={eps}"
        )
    plan, tag = bucket_size_plan(a, a_prime, eps, force_case2=force_case2)
    if tag == "1":
        raise ValidationError(
            "window is fully enumerable; certification applies to the bucket cases"
        )
    r = eps.denominator
    if any(s < r for s in plan):
        raise ValidationError(
            f"bucket plan {plan} has a bucket below 1/eps = {r}; "
            "milestones cannot be extracted"
        )
    vectors = []
    pos = 0
    for size in plan:
        segment = reference.order[pos : pos + size]
        vectors.append(milestones(segment, eps))
        pos += size
    buckets = build_buckets(inst.n, plan, vectors, eps)
    order: list[int] = []
    for bucket in buckets:
        order.extend(bucket)
    policy = PartialPolicy(_fit_length(order, a_prime, inst.n))
    policy_tail = cost_tail(inst, policy)
    ref_tail = cost_tail(inst, reference)
    dilation = (1 + 2 * eps) ** 3
    pairs = []
    passed = True
    for ell in range(a, a_prime + 1):
        lhs = policy_tail.ge(ell)
        rhs = ref_tail.ge(math.ceil(Fraction(ell) / dilation))
        pairs.append((ell, lhs, rhs))
        if lhs > rhs + 1e-12:
            passed = False
    report = CertifyReport(
        a=a,
        a_prime=a_prime,
        eps=eps,
        case_tag=tag,
        sizes=tuple(plan),
        pairs=tuple(pairs),
        passed=passed,
    )
    return policy, report


def extreme_first_policy(inst: Instance) -> PartialPolicy:
    """Complete order testing the most nearly deterministic variables first."""
    order = sorted(
        range(1, inst.n + 1),
        key=lambda i: (-max(inst.p[i - 1], 1.0 - inst.p[i - 1]), i),
    )
    return PartialPolicy(tuple(order))


def shift_contributions(
    inst: Instance, reference: PartialPolicy, eps
) -> tuple[float, ...]:
    """Boundary cost contribution of each shift against a reference policy.

    Entry ``shift`` is sum over j of a_j * Pr[(1+eps) cost(reference) >= a_j]
    with a_j = 2^(shift + j/eps).  At least one entry is at most
    2 eps (1+eps) E[cost(reference)], which is what makes the shifted window
    schedules affordable.
    """
    frac = unit_fraction(eps)
    r = frac.denominator
    tail = cost_tail(inst, reference)
    horizon = len(tail.tail) - 1
    out = []
    for shift in range(r):
        total = 0.0
        v = 2**shift
        while True:
            threshold = math.ceil(Fraction(v) / (1 + frac))
            if threshold > horizon:
                break
            total += v * tail.ge(threshold)
            v <<= r
        out.append(total)
    return tuple(out)


def ptas(
    inst: Instance,
    eps_target: float | None = None,
    *,
    mode: str = "enumerate",
    reference: PartialPolicy | None = None,
    eps_int=None,
    budget: int | None = None,
    force_case2: bool = False,
) -> PtasResult:
    """Compute a non-adaptive policy within a (1 + eps_target) factor of optimal.

    ``mode="enumerate"`` searches each window exhaustively (within the
    enumeration budget) and carries the approximation guarantee against the
    optimal policy.  ``mode="guided"`` needs a complete ``reference`` policy
    and rebuilds each window from it, carrying the dilation guarantee against
    the reference instead; it runs at sizes where enumeration cannot.

    ``eps_int`` overrides the internally derived working accuracy (a unit
    fraction such as ``"1/3"``); with the override the guarantee is relative
    to the supplied accuracy rather than ``eps_target``.
    """
    if not inst.is_unit_cost:
        raise ValidationError("the scheme requires a unit-cost instance")
    if mode not in ("enumerate", "guided"):
        raise ValidationError(f"unknown mode {mode!r}")
    if eps_int is not None:
        eps = unit_fraction(eps_int)
    elif eps_target is not None:
        eps = internal_epsilon(eps_target)
    else:
        raise ValidationError("provide eps_target or eps_int")
    if mode == "guided":
        if reference is None:
            raise ValidationError("guided mode requires a reference policy")
        check_policy(inst, reference)
        if len(reference) != inst.n:
            raise ValidationError(
                "guided mode requires a complete reference permutation"
            )
    n = inst.n
    if n == 1:
        policy = PartialPolicy((1,))
        return PtasResult(
            policy, cost_tail(inst, policy).expected, eps, 0, (1,), ()
        )
    r = eps.denominator
    schedules: dict[tuple[int, ...], int] = {}
    for shift in range(r):
        thresholds = shift_thresholds(n, eps, shift)
        schedules.setdefault(thresholds, shift)
    windows = sorted(
        {
            pair
            for thresholds in schedules
            for pair in zip(thresholds, thresholds[1:])
        }
    )
    if mode == "enumerate":
        limit = resolve_budget(budget)
        total = sum(
            estimate_enumeration(
                n, CostWindow(a, ap, eps), force_case2=force_case2
            )
            for a, ap in windows
        )
        if total > limit:
            raise BudgetExceededError(total, limit)

    solved: dict[tuple[int, int], PartialPolicy] = {}
    reports: list[CertifyReport] = []
    for a, ap in windows:
        window = CostWindow(a, ap, eps)
        if mode == "enumerate":
            solved[(a, ap)] = best_bounded(
                inst, window, budget=budget, force_case2=force_case2
            )
        else:
            _, tag = bucket_size_plan(a, ap, eps, force_case2=force_case2)
            if tag == "1":
                # Enumeration-sized window: the reference's own prefix already
                # meets the window bound with no dilation.
                solved[(a, ap)] = PartialPolicy(reference.order[:ap])
            else:
                piece, report = certify_bounded(
                    inst, reference, window, force_case2=force_case2
                )
                solved[(a, ap)] = piece
                reports.append(report)

    best: tuple[float, PartialPolicy, int, tuple[int, ...]] | None = None
    for thresholds, shift in sorted(schedules.items(), key=lambda kv: kv[1]):
        pieces = [solved[pair] for pair in zip(thresholds, thresholds[1:])]
        composed = pad_complete(reduce(compose, pieces), inst)
        expected = cost_tail(inst, composed).expected
        if (
            best is None
            or expected < best[0]
            or (expected == best[0] and composed.order < best[1].order)
        ):
            best = (expected, composed, shift, thresholds)
    assert best is not None
    return PtasResult(
        policy=best[1],
        expected=best[0],
        eps_int=eps,
        shift=best[2],
        thresholds=best[3],
        reports=tuple(reports),
    )
