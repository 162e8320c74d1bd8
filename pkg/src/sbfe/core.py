"""Instance model and policy primitives for sequential testing of k-of-n functions.

An instance consists of n independent Boolean variables.  Variable i takes
value 1 with probability p_i (strictly between 0 and 1) and can be revealed by
paying a nonnegative integer cost c_i.  The target predicate is "at least k of
the n variables are 1".  Testing continues until the predicate is decided:
either k ones have been seen (value 1) or n-k+1 zeros have been seen (value 0).

Probabilities are kept sorted in nondecreasing order; ``normalize`` converts an
arbitrary input vector into this canonical form and reports the permutation so
callers can translate indices back.  All indices are 1-based.

Everything in this module is an immutable value; the operations are pure
functions and safe to share across threads.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence


class SbfeError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SbfeError, ValueError):
    """An input violates a documented precondition."""


class CapExceededError(SbfeError):
    """The problem size exceeds the cap of an exhaustive computation."""


class BudgetExceededError(SbfeError):
    """The estimated enumeration work exceeds the configured budget."""

    def __init__(self, estimate: int, budget: int):
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"enumeration would evaluate about {estimate} candidates, "
            f"exceeding the budget of {budget}"
        )


@dataclass(frozen=True)
class Instance:
    """A k-of-n testing problem.

    Attributes:
        k: threshold, in [1, n].
        p: probabilities of value 1, each in (0, 1), nondecreasing.
        c: nonnegative integer test costs (all 1 for unit-cost instances).
    """

    k: int
    p: tuple[float, ...]
    c: tuple[int, ...]

    def __post_init__(self):
        n = len(self.p)
        if n == 0:
            raise ValidationError("instance needs at least one variable")
        if len(self.c) != n:
            raise ValidationError(
                f"cost vector has length {len(self.c)}, expected {n}"
            )
        if not 1 <= self.k <= n:
            raise ValidationError(f"k={self.k} outside [1, {n}]")
        for i, q in enumerate(self.p, 1):
            if not 0.0 < q < 1.0:
                raise ValidationError(
                    f"p_{i}={q} outside the open interval (0, 1)"
                )
        if any(a > b for a, b in zip(self.p, self.p[1:])):
            raise ValidationError("probabilities must be nondecreasing")
        for i, cost in enumerate(self.c, 1):
            if not isinstance(cost, int) or isinstance(cost, bool) or cost < 0:
                raise ValidationError(
                    f"c_{i}={cost!r} is not a nonnegative integer"
                )

    @classmethod
    def unit(cls, k: int, p: Sequence[float]) -> "Instance":
        """Unit-cost instance with the given threshold and probabilities."""
        return cls(k=k, p=tuple(p), c=(1,) * len(p))

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def total_cost(self) -> int:
        return sum(self.c)

    @property
    def is_unit_cost(self) -> bool:
        return all(cost == 1 for cost in self.c)

    def prob(self, i: int) -> float:
        """Probability of variable i (1-based)."""
        return self.p[i - 1]

    def cost(self, i: int) -> int:
        """Cost of variable i (1-based)."""
        return self.c[i - 1]


@dataclass(frozen=True)
class PartialPolicy:
    """A fixed test order over a subset of the variables.

    ``order`` lists distinct 1-based indices; a policy walks them left to
    right and stops as soon as the predicate is decided.
    """

    order: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        seen = set()
        for i in self.order:
            if not isinstance(i, int) or isinstance(i, bool) or i < 1:
                raise ValidationError(f"policy index {i!r} is not a positive integer")
            if i in seen:
                raise ValidationError(f"policy repeats index {i}")
            seen.add(i)

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    @property
    def tested(self) -> frozenset[int]:
        return frozenset(self.order)


class Determination(enum.Enum):
    """Outcome of checking whether observed counts decide the predicate."""

    UNDETERMINED = "undetermined"
    VALUE0 = "value0"
    VALUE1 = "value1"


def determine(inst: Instance, ones: int, zeros: int) -> Determination:
    """Classify a state by its counts of observed 1s and 0s.

    Value 1 once ones >= k, value 0 once zeros >= n-k+1; the two conditions
    cannot hold simultaneously because ones + zeros <= n.
    """
    if ones < 0 or zeros < 0:
        raise ValidationError("counts must be nonnegative")
    if ones + zeros > inst.n:
        raise ValidationError(
            f"ones + zeros = {ones + zeros} exceeds n = {inst.n}"
        )
    if ones >= inst.k:
        return Determination.VALUE1
    if zeros >= inst.n - inst.k + 1:
        return Determination.VALUE0
    return Determination.UNDETERMINED


def normalize(
    raw_p: Sequence[float], raw_c: Sequence[int] | None, k: int
) -> tuple[Instance, tuple[int, ...]]:
    """Sort probabilities ascending (stable) and permute costs to match.

    Returns the canonical instance together with ``index_map``, where
    ``index_map[j-1]`` is the original 1-based position of the variable now at
    sorted position j.  Equal probabilities keep their input order, so the map
    is deterministic.
    """
    n = len(raw_p)
    if raw_c is None:
        raw_c = [1] * n
    if len(raw_c) != n:
        raise ValidationError(
            f"cost vector has length {len(raw_c)}, expected {n}"
        )
    order = sorted(range(n), key=raw_p.__getitem__)
    inst = Instance(
        k=k,
        p=tuple(raw_p[j] for j in order),
        c=tuple(_as_cost(raw_c[j]) for j in order),
    )
    return inst, tuple(j + 1 for j in order)


def _as_cost(value) -> int:
    if isinstance(value, bool):
        raise ValidationError(f"cost {value!r} is not a nonnegative integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ValidationError(f"cost {value!r} is not a nonnegative integer")


def compose(p1: PartialPolicy, p2: PartialPolicy) -> PartialPolicy:
    """First test in order of p1, then in order of p2, skipping repeats."""
    seen = set(p1.order)
    return PartialPolicy(
        p1.order + tuple(i for i in p2.order if i not in seen)
    )


def pad_complete(pi: PartialPolicy, inst: Instance) -> PartialPolicy:
    """Append all untested indices in ascending order, yielding a full permutation."""
    seen = pi.tested
    return PartialPolicy(
        pi.order + tuple(i for i in range(1, inst.n + 1) if i not in seen)
    )


def check_policy(inst: Instance, pi: PartialPolicy) -> None:
    """Raise if the policy mentions indices outside [1, n]."""
    for i in pi.order:
        if i > inst.n:
            raise ValidationError(
                f"policy index {i} exceeds n = {inst.n}"
            )


# ---------------------------------------------------------------------------
# Instance JSON format: {"k": int, "p": [float...], "c": [int...]}, "c" optional
# (defaults to all-1).  Probabilities equal to exactly 0 or 1 are rejected.
# ---------------------------------------------------------------------------


def instance_from_obj(obj) -> tuple[Instance, tuple[int, ...]]:
    """Parse the JSON instance object and normalize it.

    Returns (instance, index_map) as in ``normalize``.
    """
    if not isinstance(obj, dict):
        raise ValidationError("instance JSON must be an object")
    unknown = set(obj) - {"k", "p", "c"}
    if unknown:
        raise ValidationError(f"unknown instance fields: {sorted(unknown)}")
    if "k" not in obj or "p" not in obj:
        raise ValidationError('instance JSON requires "k" and "p"')
    k = obj["k"]
    if not isinstance(k, int) or isinstance(k, bool):
        raise ValidationError('"k" must be an integer')
    p = obj["p"]
    if not isinstance(p, list) or not all(
        isinstance(q, (int, float)) and not isinstance(q, bool) for q in p
    ):
        raise ValidationError('"p" must be a list of numbers')
    c = obj.get("c")
    if c is not None and not isinstance(c, list):
        raise ValidationError('"c" must be a list of integers')
    return normalize([float(q) for q in p], c, k)


def load_instance(path) -> tuple[Instance, tuple[int, ...]]:
    """Read an instance JSON file; see ``instance_from_obj``."""
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return instance_from_obj(obj)


def instance_to_obj(inst: Instance) -> dict:
    """Serialize back to the JSON instance format."""
    return {"k": inst.k, "p": list(inst.p), "c": list(inst.c)}
