"""Shared generators for the randomized test corpora."""

from __future__ import annotations

import random
from fractions import Fraction

from sbfe import Instance, PartialPolicy


def random_instance(rng: random.Random, n=None, max_n=12, costs="unit") -> Instance:
    """Random instance with sorted probabilities bounded away from 0 and 1.

    costs: "unit", "01" (zero/one costs), or "small" (0..3).
    """
    if n is None:
        n = rng.randint(1, max_n)
    k = rng.randint(1, n)
    p = tuple(sorted(round(rng.uniform(0.03, 0.97), 6) for _ in range(n)))
    if costs == "unit":
        c = (1,) * n
    elif costs == "01":
        c = tuple(rng.randint(0, 1) for _ in range(n))
    elif costs == "small":
        c = tuple(rng.randint(0, 3) for _ in range(n))
    else:
        raise ValueError(costs)
    return Instance(k=k, p=p, c=c)


def random_policy(rng: random.Random, n: int, min_len=0, max_len=None) -> PartialPolicy:
    length = rng.randint(min_len, n if max_len is None else max_len)
    return PartialPolicy(tuple(rng.sample(range(1, n + 1), length)))


def random_dominating_pair(rng: random.Random, n: int) -> tuple[list[int], list[int]]:
    """A pair (v, vstar) with v dominating vstar, by construction.

    Start from v = vstar and apply dominance-preserving edits: add an unused
    element, or replace an element x by one unused element at most x and one
    unused element at least x (dominance is transitive, and each edit
    dominates its predecessor).
    """
    size = rng.randint(1, n)
    vstar = sorted(rng.sample(range(1, n + 1), size))
    v = set(vstar)
    for _ in range(rng.randint(0, n)):
        op = rng.random()
        unused = [i for i in range(1, n + 1) if i not in v]
        if op < 0.4 and unused:
            v.add(rng.choice(unused))
        elif v:
            x = rng.choice(sorted(v))
            left = [i for i in unused if i <= x] + [x]
            right = [i for i in unused if i >= x] + [x]
            l = rng.choice(left)
            r = rng.choice(right)
            v.discard(x)
            v.add(l)
            v.add(r)
    return sorted(v), vstar


def exact_tail_ge(probs: list[Fraction], ell: int) -> Fraction:
    """Pr[at least ell successes] for independent trials, in exact arithmetic."""
    dp = [Fraction(1)]
    for q in probs:
        nxt = [x * (1 - q) for x in dp] + [Fraction(0)]
        for i, x in enumerate(dp):
            nxt[i + 1] += x * q
        dp = nxt
    return sum(dp[ell:], Fraction(0))
