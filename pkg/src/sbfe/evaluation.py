"""Exact cost distributions for fixed test orders, plus a Monte Carlo checker.

The central object is the tail distribution of the stopping cost of a partial
policy: tail[i] = Pr[cost >= i] for integer thresholds i.  It is computed by a
dynamic program over (step, number of 1s observed), restricted to states in
which the predicate is still undecided; decided states are absorbing.  The
per-step survival probabilities determine every tail entry, because the cost
paid after j tests is the (deterministic) cumulative cost of the first j tests.

Conventions:
  * A policy that exhausts its tests while the predicate is undecided is
    charged the total cost of the instance (n in the unit-cost case).
  * ``expected_cost`` returns the expected amount actually paid for tests; it
    warns when the policy can end undecided, in which case it is smaller than
    the conventional expectation carried by the tail distribution.

Conditional evaluation is supported through ``ones_known``/``zeros_known``:
counts of variables outside the policy whose values are already revealed.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass
from random import Random
from typing import Callable

import numpy as np

from .core import (
    Instance,
    PartialPolicy,
    ValidationError,
    check_policy,
)


class UndeterminedPolicyWarning(UserWarning):
    """The evaluated policy leaves the predicate undecided with positive probability."""


@dataclass(frozen=True)
class TailDistribution:
    """Stopping-cost tails of a partial policy.

    tail[i] = Pr[cost >= i] for i = 0..H, where H is the total cost of the
    policy, or the total cost of the instance when the policy can end
    undecided.  ``expected`` applies the total-cost convention to the
    undecided mass, so for unit costs expected == sum(tail[1:]).
    """

    tail: tuple[float, ...]
    expected: float
    undetermined: float = 0.0

    def __post_init__(self):
        if not self.tail or abs(self.tail[0] - 1.0) > 1e-9:
            raise ValidationError("tail[0] must be 1")
        if any(a < b - 1e-9 for a, b in zip(self.tail, self.tail[1:])):
            raise ValidationError("tail must be nonincreasing")

    def __len__(self) -> int:
        return len(self.tail)

    def ge(self, i: int) -> float:
        """Pr[cost >= i], total over all integer thresholds."""
        if i <= 0:
            return 1.0
        if i < len(self.tail):
            return self.tail[i]
        return 0.0


def _requirements(
    inst: Instance, pi: PartialPolicy, ones_known: int, zeros_known: int
) -> tuple[int, int]:
    if ones_known < 0 or zeros_known < 0:
        raise ValidationError("known counts must be nonnegative")
    check_policy(inst, pi)
    if len(pi) + ones_known + zeros_known > inst.n:
        raise ValidationError(
            "policy length plus known counts exceeds the number of variables"
        )
    need1 = inst.k - ones_known
    need0 = (inst.n - inst.k + 1) - zeros_known
    if need1 < 0:
        raise ValidationError(
            f"ones_known={ones_known} exceeds the threshold k={inst.k}"
        )
    if need0 < 0:
        raise ValidationError(
            f"zeros_known={zeros_known} exceeds n-k+1={inst.n - inst.k + 1}"
        )
    return need1, need0


def _survival(
    inst: Instance, pi: PartialPolicy, need1: int, need0: int
) -> np.ndarray:
    """surv[j] = Pr[predicate undecided after the first j tests of pi]."""
    length = len(pi)
    surv = np.empty(length + 1)
    surv[0] = 1.0
    dp = np.zeros(need1)
    dp[0] = 1.0
    for j, idx in enumerate(pi.order, 1):
        q = inst.p[idx - 1]
        nxt = dp * (1.0 - q)
        nxt[1:] += dp[:-1] * q
        cut = j - need0  # states with this many or fewer 1s are decided 0
        if cut >= 0:
            nxt[: cut + 1] = 0.0
        dp = nxt
        surv[j] = min(dp.sum(), 1.0)  # guard the last ulp of rounding
    return surv


def cost_tail(
    inst: Instance,
    pi: PartialPolicy,
    *,
    ones_known: int = 0,
    zeros_known: int = 0,
) -> TailDistribution:
    """Exact tail distribution of the stopping cost of ``pi``.

    The policy walks its order and stops the first time the predicate is
    decided (counting ``ones_known``/``zeros_known`` pre-revealed values).  If
    it runs out of tests while undecided, the cost is the instance total cost.
    """
    need1, need0 = _requirements(inst, pi, ones_known, zeros_known)
    if need1 == 0 or need0 == 0:
        return TailDistribution(tail=(1.0,), expected=0.0)
    surv = _survival(inst, pi, need1, need0)
    length = len(pi)
    cums = []
    acc = 0
    for idx in pi.order:
        acc += inst.c[idx - 1]
        cums.append(acc)
    policy_cost = cums[-1] if cums else 0
    # The policy can end undecided iff it is too short to force a decision.
    can_be_undetermined = length < need1 + need0 - 1
    undet = float(surv[length]) if can_be_undetermined else 0.0
    total = inst.total_cost
    horizon = total if can_be_undetermined else policy_cost
    tail = [1.0] * (horizon + 1)
    for i in range(1, horizon + 1):
        tail[i] = float(surv[bisect_left(cums, i)])
    expected = math.fsum(
        inst.c[idx - 1] * surv[j]
        for j, idx in enumerate(pi.order)
        if inst.c[idx - 1] > 0
    ) + (total - policy_cost) * undet
    return TailDistribution(tuple(tail), float(expected), undet)


def expected_cost(
    inst: Instance,
    pi: PartialPolicy,
    *,
    ones_known: int = 0,
    zeros_known: int = 0,
) -> float:
    """Expected amount paid for tests: sum over steps of c * Pr[still undecided].

    Exact for arbitrary nonnegative integer costs, including 0.  Warns when
    the policy can end undecided; the conventional expectation (undecided mass
    charged the instance total cost) is ``cost_tail(...).expected``.
    """
    need1, need0 = _requirements(inst, pi, ones_known, zeros_known)
    if need1 == 0 or need0 == 0:
        return 0.0
    surv = _survival(inst, pi, need1, need0)
    if len(pi) < need1 + need0 - 1 and surv[len(pi)] > 0.0:
        warnings.warn(
            "policy leaves the predicate undecided with probability "
            f"{surv[len(pi)]:.3g}; expected_cost counts only test spend",
            UndeterminedPolicyWarning,
            stacklevel=2,
        )
    return float(
        math.fsum(
            inst.c[idx - 1] * surv[j]
            for j, idx in enumerate(pi.order)
            if inst.c[idx - 1] > 0
        )
    )


def bounded_score(inst: Instance, pi: PartialPolicy, a: int, a_prime: int) -> float:
    """sum_{i=a}^{a'-1} Pr[cost >= i]  +  a' * Pr[cost >= a'].

    The quantity minimized when selecting a policy for a bounded threshold
    window [a, a'].  Unit-cost instances only.
    """
    if not inst.is_unit_cost:
        raise ValidationError("bounded_score requires a unit-cost instance")
    if not 1 <= a < a_prime <= inst.n:
        raise ValidationError(
            f"thresholds must satisfy 1 <= a < a' <= n, got a={a}, a'={a_prime}"
        )
    td = cost_tail(inst, pi)
    return float(
        math.fsum(td.ge(i) for i in range(a, a_prime)) + a_prime * td.ge(a_prime)
    )


def survival_matrix(inst: Instance, orders: np.ndarray) -> np.ndarray:
    """Survival probabilities for a batch of equal-length test orders.

    ``orders`` has shape (count, length) and holds 1-based indices; rows must
    be valid policies.  Returns S with shape (count, length + 1) where
    S[r, j] = Pr[predicate undecided after the first j tests of row r].  For
    unit costs, Pr[cost(row) >= i] = S[r, i-1].
    """
    orders = np.asarray(orders, dtype=np.intp)
    if orders.ndim != 2:
        raise ValidationError("orders must be a 2-D array")
    if orders.size and (orders.min() < 1 or orders.max() > inst.n):
        raise ValidationError("order entries must lie in [1, n]")
    count, length = orders.shape
    need0 = inst.n - inst.k + 1
    probs = np.asarray(inst.p)[orders - 1]
    dp = np.zeros((count, inst.k))
    dp[:, 0] = 1.0
    surv = np.empty((count, length + 1))
    surv[:, 0] = 1.0
    for j in range(1, length + 1):
        q = probs[:, j - 1 : j]
        nxt = dp * (1.0 - q)
        nxt[:, 1:] += dp[:, :-1] * q
        cut = j - need0
        if cut >= 0:
            nxt[:, : cut + 1] = 0.0
        dp = nxt
        surv[:, j] = np.minimum(dp.sum(axis=1), 1.0)
    return surv


# ---------------------------------------------------------------------------
# Monte Carlo cross-check
# ---------------------------------------------------------------------------

Strategy = Callable[[dict[int, int]], "int | None"]


def fixed_order(pi: PartialPolicy) -> Strategy:
    """Strategy that follows a fixed order, for use with ``simulate``."""

    def choose(tested: dict[int, int]):
        for i in pi.order:
            if i not in tested:
                return i
        return None

    return choose


def simulate(
    inst: Instance, strategy: Strategy, trials: int, seed: int
) -> tuple[float, float]:
    """Estimate the expected cost of a (possibly adaptive) strategy.

    ``strategy`` maps the history so far (dict of tested index -> observed
    bit, in test order) to the next index to test, or None to give up, in
    which case the undecided trial is charged the instance total cost.
    Returns (sample mean, 95% normal-approximation half-width); deterministic
    for a fixed seed.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    rng = Random(seed)
    n, k = inst.n, inst.k
    zeros_cert = n - k + 1
    costs = []
    for _ in range(trials):
        tested: dict[int, int] = {}
        ones = zeros = 0
        spent = 0
        while ones < k and zeros < zeros_cert:
            nxt = strategy(tested)
            if nxt is None:
                spent = inst.total_cost
                break
            if not isinstance(nxt, int) or not 1 <= nxt <= n:
                raise ValidationError(f"strategy chose invalid index {nxt!r}")
            if nxt in tested:
                raise ValidationError(f"strategy repeated index {nxt}")
            bit = 1 if rng.random() < inst.p[nxt - 1] else 0
            tested[nxt] = bit
            spent += inst.c[nxt - 1]
            if bit:
                ones += 1
            else:
                zeros += 1
        costs.append(spent)
    mean = math.fsum(costs) / trials
    if trials == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in costs) / (trials - 1)
    return mean, 1.96 * math.sqrt(var / trials)
