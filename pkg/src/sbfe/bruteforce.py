"""Brute-force ground truth at small n.

Three independent reference computations used to validate the fast paths:

  * ``best_nonadaptive``: exhaustive search over all n! test orders (with an
    exact branch-and-bound prune that cannot change the result).
  * ``best_adaptive_cost``: the optimal adaptive expected cost by memoized
    recursion over (set of untested variables, number of 1s seen).
  * ``tail_by_enumeration``: stopping-cost tails obtained by walking a policy
    over all 2^n outcomes, weighting each by its product-form probability.

These are deliberately simple and share no code with the dynamic programs in
``evaluation``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

from .core import (
    CapExceededError,
    Instance,
    PartialPolicy,
    check_policy,
)
from .evaluation import TailDistribution


@dataclass(frozen=True)
class SearchResult:
    """Best complete test order found, with its exact expected cost."""

    policy: PartialPolicy
    cost: float


def walk_cost(
    inst: Instance,
    pi: PartialPolicy,
    outcome,
    *,
    ones_known: int = 0,
    zeros_known: int = 0,
) -> tuple[int, int | None]:
    """Cost and decided value of running ``pi`` on a fixed outcome vector.

    ``outcome`` is indexable with outcome[i-1] in {0, 1}.  Returns the total
    cost of the instance and value ``None`` when the policy ends undecided.
    """
    need1 = inst.k - ones_known
    need0 = (inst.n - inst.k + 1) - zeros_known
    if need1 <= 0:
        return 0, 1
    if need0 <= 0:
        return 0, 0
    ones = zeros = spent = 0
    for idx in pi.order:
        spent += inst.c[idx - 1]
        if outcome[idx - 1]:
            ones += 1
            if ones >= need1:
                return spent, 1
        else:
            zeros += 1
            if zeros >= need0:
                return spent, 0
    return inst.total_cost, None


def tail_by_enumeration(
    inst: Instance, pi: PartialPolicy, cap: int = 20
) -> TailDistribution:
    """Exact stopping-cost tails by summing over all 2^n outcomes."""
    n = inst.n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the enumeration cap {cap}")
    check_policy(inst, pi)
    pmf: dict[int, list[float]] = {}
    undet_chunks: list[float] = []
    for outcome in product((0, 1), repeat=n):
        pr = 1.0
        for i in range(n):
            pr *= inst.p[i] if outcome[i] else 1.0 - inst.p[i]
        spent, value = walk_cost(inst, pi, outcome)
        if value is None:
            undet_chunks.append(pr)
        pmf.setdefault(spent, []).append(pr)
    masses = {cost: math.fsum(chunks) for cost, chunks in pmf.items()}
    policy_cost = sum(inst.c[i - 1] for i in pi.order)
    horizon = inst.total_cost if undet_chunks else policy_cost
    tail = [0.0] * (horizon + 1)
    for cost, mass in masses.items():
        tail[min(cost, horizon)] += mass
    acc = 0.0
    for i in range(horizon, -1, -1):
        acc += tail[i]
        tail[i] = acc
    tail[0] = 1.0
    expected = math.fsum(cost * mass for cost, mass in masses.items())
    return TailDistribution(
        tuple(tail), float(expected), float(math.fsum(undet_chunks))
    )


def best_nonadaptive(inst: Instance, cap: int = 8) -> SearchResult:
    """Exact minimizer of expected cost over all complete test orders.

    Depth-first search in lexicographic order with an exact lower-bound prune
    (the spend so far never decreases as the order is extended).  Ties are
    broken toward the lexicographically smallest order.
    """
    n = inst.n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the search cap {cap}")
    k = inst.k
    need0 = n - k + 1

    best_cost = math.inf
    best_order: tuple[int, ...] | None = None

    def consider(order: tuple[int, ...], cost: float):
        nonlocal best_cost, best_order
        if cost < best_cost or (cost == best_cost and order < best_order):
            best_cost = cost
            best_order = order

    # Seed the bound with one arbitrary complete order so pruning bites early.
    identity = tuple(range(1, n + 1))
    consider(identity, _order_cost(inst, identity))

    def extend(prefix: list[int], remaining: list[int], state: dict[int, float], spent: float):
        if not remaining:
            consider(tuple(prefix), spent)
            return
        if not state:
            # Predicate already decided on every outcome; any completion costs
            # the same, so take the lexicographically smallest one.
            consider(tuple(prefix) + tuple(remaining), spent)
            return
        mass = math.fsum(state.values())
        for pos, idx in enumerate(remaining):
            nxt_spent = spent + inst.c[idx - 1] * mass
            if nxt_spent > best_cost:
                continue
            q = inst.p[idx - 1]
            steps = len(prefix) + 1
            nxt_state: dict[int, float] = {}
            for ones, pr in state.items():
                if pr == 0.0:
                    continue
                up = ones + 1
                if up < k:
                    nxt_state[up] = nxt_state.get(up, 0.0) + pr * q
                if steps - ones < need0:
                    nxt_state[ones] = nxt_state.get(ones, 0.0) + pr * (1.0 - q)
            prefix.append(idx)
            extend(prefix, remaining[:pos] + remaining[pos + 1 :], nxt_state, nxt_spent)
            prefix.pop()

    extend([], list(identity), {0: 1.0}, 0.0)
    assert best_order is not None
    return SearchResult(PartialPolicy(best_order), float(best_cost))


def _order_cost(inst: Instance, order: tuple[int, ...]) -> float:
    """Expected spend of a complete order, by the same recurrence as the search."""
    k, need0 = inst.k, inst.n - inst.k + 1
    state = {0: 1.0}
    total = 0.0
    for steps, idx in enumerate(order, 1):
        mass = math.fsum(state.values())
        if not mass:
            break
        total += inst.c[idx - 1] * mass
        q = inst.p[idx - 1]
        nxt: dict[int, float] = {}
        for ones, pr in state.items():
            up = ones + 1
            if up < k:
                nxt[up] = nxt.get(up, 0.0) + pr * q
            if steps - ones < need0:
                nxt[ones] = nxt.get(ones, 0.0) + pr * (1.0 - q)
        state = nxt
    return total


def best_adaptive_cost(inst: Instance, cap: int = 15) -> float:
    """Optimal adaptive expected cost, by exhaustive memoized recursion.

    V(R, ones) = 0 when the counts decide the predicate, otherwise
    min over i in R of c_i + p_i V(R-i, ones+1) + (1-p_i) V(R-i, ones),
    where R is the set of untested variables (kept as a bitmask).
    """
    n = inst.n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the recursion cap {cap}")
    k = inst.k
    need0 = n - k + 1
    p, c = inst.p, inst.c
    memo: dict[tuple[int, int], float] = {}

    def value(mask: int, ones: int) -> float:
        tested = n - mask.bit_count()
        if ones >= k or tested - ones >= need0:
            return 0.0
        key = (mask, ones)
        cached = memo.get(key)
        if cached is not None:
            return cached
        best = math.inf
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            rest = mask & ~low
            cand = c[i] + p[i] * value(rest, ones + 1) + (1.0 - p[i]) * value(rest, ones)
            if cand < best:
                best = cand
            m ^= low
        memo[key] = best
        return best

    return value((1 << n) - 1, 0)
