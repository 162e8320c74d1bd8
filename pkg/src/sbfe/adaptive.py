"""Polynomial-time optimal adaptive testing via the ratio-prefix rule.

Conditional on the function value being 1, the cheapest certificate is found
by testing in increasing order of c_i / p_i; conditional on value 0, in
increasing order of c_i / (1 - p_i).  If k' more 1s and z' more 0s are needed,
those conditional plans need k' and z' tests, and since k' + z' exceeds the
number of untested variables by one, the two prefixes share at least one test
by pigeonhole.  Testing any shared variable is optimal unconditionally; this
module always picks the shared variable with the smallest index, which makes
the induced policy deterministic.
"""

from __future__ import annotations

from .core import CapExceededError, Instance, ValidationError


def ratio_prefix_choice(
    inst: Instance, remaining, ones: int, zeros: int
) -> int:
    """Next variable to test from ``remaining`` given the observed counts.

    Raises if the counts already decide the predicate or nothing remains.
    """
    rem = sorted(remaining)
    if not rem:
        raise ValidationError("no variables remain to test")
    need1 = inst.k - ones
    need0 = (inst.n - inst.k + 1) - zeros
    if need1 <= 0 or need0 <= 0:
        raise ValidationError("state is already decided")
    if need1 + need0 != len(rem) + 1:
        raise ValidationError(
            "counts are inconsistent with the remaining set"
        )
    confirm_one = sorted(rem, key=lambda i: (inst.c[i - 1] / inst.p[i - 1], i))
    confirm_zero = sorted(
        rem, key=lambda i: (inst.c[i - 1] / (1.0 - inst.p[i - 1]), i)
    )
    shared = set(confirm_one[:need1]) & set(confirm_zero[:need0])
    return min(shared)


def optimal_expected_cost(inst: Instance, cap: int = 20) -> float:
    """Exact expected cost of the policy induced by ``ratio_prefix_choice``.

    Memoized recursion over (untested set, 1s observed); by the classical
    optimality of the rule this equals the best adaptive expected cost.
    """
    n = inst.n
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the evaluation cap {cap}")
    k = inst.k
    need0 = n - k + 1
    memo: dict[tuple[int, int], float] = {}

    def value(mask: int, ones: int) -> float:
        tested = n - mask.bit_count()
        zeros = tested - ones
        if ones >= k or zeros >= need0:
            return 0.0
        key = (mask, ones)
        cached = memo.get(key)
        if cached is not None:
            return cached
        rem = [i + 1 for i in range(n) if mask >> i & 1]
        i = ratio_prefix_choice(inst, rem, ones, zeros)
        bit = 1 << (i - 1)
        q = inst.p[i - 1]
        out = (
            inst.c[i - 1]
            + q * value(mask & ~bit, ones + 1)
            + (1.0 - q) * value(mask & ~bit, ones)
        )
        memo[key] = out
        return out

    return value((1 << n) - 1, 0)


def strategy(inst: Instance):
    """Ratio-prefix rule packaged as a callback for ``evaluation.simulate``."""

    def choose(tested: dict[int, int]):
        ones = sum(tested.values())
        zeros = len(tested) - ones
        rem = [i for i in range(1, inst.n + 1) if i not in tested]
        return ratio_prefix_choice(inst, rem, ones, zeros)

    return choose
