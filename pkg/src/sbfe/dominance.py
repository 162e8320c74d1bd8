"""Two-sided dominance between index sets and the milestone bucket builder.

With variables sorted by probability, a set V dominates V* when every prefix
[1..h] of the ground set contains at least as many elements of V as of V*, and
the same holds for every suffix.  Equivalently there are injections from V*
into V that only move elements left, and only move elements right; dominance
of tested sets therefore transfers both "enough 1s" and "enough 0s" stopping
events from V* to V.

``build_buckets`` reconstructs, from only the sizes of disjoint target sets
and a small number of their order statistics (milestones), a tuple of disjoint
sets whose unions dominate the corresponding unions of the targets while
being at most a (1 + 2 eps) factor larger.  It maintains a fractional credit
counter per bucket; the counter is held in integers scaled by 1/eps so the
comparisons are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .core import ValidationError


def unit_fraction(eps) -> Fraction:
    """Coerce eps to an exact fraction with integer reciprocal, e.g. 1/3."""
    if isinstance(eps, Fraction):
        frac = eps
    elif isinstance(eps, int):
        frac = Fraction(eps)
    elif isinstance(eps, str):
        frac = Fraction(eps)
    elif isinstance(eps, float):
        frac = Fraction(eps)
    else:
        raise ValidationError(f"cannot interpret eps={eps!r}")
    if frac <= 0 or frac > 1 or frac.numerator != 1:
        raise ValidationError(
            f"eps must be the reciprocal of a positive integer, got {eps!r}"
        )
    return frac


def _check_members(members: Iterable[int], n: int, label: str) -> tuple[int, ...]:
    out = tuple(sorted(members))
    seen = set()
    for i in out:
        if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
            raise ValidationError(f"{label} contains {i!r}, outside [1, {n}]")
        if i in seen:
            raise ValidationError(f"{label} repeats {i}")
        seen.add(i)
    return out


def dominates(v: Iterable[int], vstar: Iterable[int], n: int) -> bool:
    """True iff v dominates vstar inside the ground set [1, n].

    Checks prefix counts (left dominance) and suffix counts (right dominance)
    in one forward and one backward sweep.
    """
    a = _check_members(v, n, "v")
    b = _check_members(vstar, n, "vstar")
    in_a = bytearray(n + 1)
    in_b = bytearray(n + 1)
    for i in a:
        in_a[i] = 1
    for i in b:
        in_b[i] = 1
    count_a = count_b = 0
    for h in range(1, n + 1):
        count_a += in_a[h]
        count_b += in_b[h]
        if count_a < count_b:
            return False
    count_a = count_b = 0
    for h in range(n, 0, -1):
        count_a += in_a[h]
        count_b += in_b[h]
        if count_a < count_b:
            return False
    return True


def milestones(vstar: Iterable[int], eps) -> tuple[int, ...]:
    """Order statistics used as anchors: the floor(j*eps*|V*|)-th smallest
    member, for j = 1 .. 1/eps - 1."""
    frac = unit_fraction(eps)
    r = frac.denominator
    members = tuple(sorted(vstar))
    size = len(members)
    if size < r:
        raise ValidationError(
            f"set of size {size} is too small for eps={frac} (needs >= {r})"
        )
    return tuple(members[(j * size) // r - 1] for j in range(1, r))


def build_buckets(
    n: int,
    sizes: Sequence[int],
    milestone_vectors: Sequence[Sequence[int]],
    eps,
) -> tuple[tuple[int, ...], ...]:
    """Greedy reconstruction of dominating buckets from sizes and milestones.

    For each bucket, a forward pass over 1..n adds unused elements while a
    credit counter (started at eps*size, incremented by eps*size at each
    milestone) is at least 1; a backward pass then adds unused elements after
    a final top-up of ceil(eps*size).  When the milestones are the true ones
    of disjoint sets V*_1..V*_b of the given sizes, the output buckets are
    disjoint, |V_i| <= (1+2 eps)|V*_i|, and every union of leading buckets
    dominates the corresponding union of targets.
    """
    frac = unit_fraction(eps)
    r = frac.denominator
    if len(sizes) != len(milestone_vectors):
        raise ValidationError("one milestone vector is required per bucket")
    used = bytearray(n + 1)
    buckets: list[tuple[int, ...]] = []
    for size, vector in zip(sizes, milestone_vectors):
        if size < r:
            raise ValidationError(
                f"bucket size {size} is below 1/eps = {r}"
            )
        if len(vector) != r - 1:
            raise ValidationError(
                f"milestone vector has length {len(vector)}, expected {r - 1}"
            )
        marks = set(vector)
        for f in marks:
            if not 1 <= f <= n:
                raise ValidationError(f"milestone {f} outside [1, {n}]")
        # credit counter scaled by r: real value c corresponds to c*r here,
        # so "c >= 1" becomes "credit >= r" and all arithmetic stays integer.
        credit = size
        chosen: list[int] = []
        for f in range(1, n + 1):
            if f in marks:
                credit += size
            if credit >= r and not used[f]:
                used[f] = 1
                chosen.append(f)
                credit -= r
        credit += r * (-(-size // r))  # + r * ceil(eps * size)
        for f in range(n, 0, -1):
            if credit >= r and not used[f]:
                used[f] = 1
                chosen.append(f)
                credit -= r
        buckets.append(tuple(sorted(chosen)))
    return tuple(buckets)


def candidate_milestone_vectors(n: int, size: int, eps):
    """All vectors that could be the milestones of some size-``size`` subset
    of [1, n].

    True milestone vectors are strictly increasing with gaps at least as large
    as the gaps of their ranks, and leave room for the remaining members below
    and above; only such vectors are generated.
    """
    frac = unit_fraction(eps)
    r = frac.denominator
    if size < r:
        raise ValidationError(
            f"set size {size} is too small for eps={frac} (needs >= {r})"
        )
    ranks = [(j * size) // r for j in range(1, r)]
    if not ranks:
        yield ()
        return

    def extend(prefix: list[int], j: int):
        if j == len(ranks):
            yield tuple(prefix)
            return
        rank = ranks[j]
        if j == 0:
            lo = rank
        else:
            lo = max(rank, prefix[-1] + (rank - ranks[j - 1]))
        hi = n - (size - rank)
        for m in range(lo, hi + 1):
            prefix.append(m)
            yield from extend(prefix, j + 1)
            prefix.pop()

    yield from extend([], 0)
