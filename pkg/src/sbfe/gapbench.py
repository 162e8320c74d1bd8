"""Benchmark family separating adaptive from non-adaptive testing.

The instance with parameters (m, t, eps) has n = 2m + 2t variables and
threshold k = m + t:

  * t "zero" variables:  cost 1, probability eps          (indices 1..t)
  * 2m "free" variables: cost 0, probability 1/2          (indices t+1..2m+t)
  * t "one" variables:   cost 1, probability 1 - eps      (indices 2m+t+1..n)

Sensible policies test all free variables first ("economical" order); when
the free 1-count X lands in the band [m-t, m+t-1] the value is still open and
the paid variables decide it.  An adaptive tester knows which side to confirm
and pays about (t+1)/2 in expectation over the band; a fixed order must hedge
both sides and pays about (2t+1)/2, so the cost ratio approaches
(2t+1)/(t+1), and 2 as t grows.

Costs here are exact: the free phase is collapsed through the binomial
distribution of X and the paid phase is evaluated conditionally, while the
full-instance dynamic program provides an independent route for fixed orders.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .core import CapExceededError, Instance, PartialPolicy, ValidationError
from .evaluation import expected_cost

M_CAP = 10**5


@dataclass(frozen=True)
class GapParams:
    """Benchmark parameters: m free pairs, t paid pairs, probability slack eps."""

    m: int
    t: int
    eps: float

    def __post_init__(self):
        if self.m < 1 or self.t < 1:
            raise ValidationError("m and t must be at least 1")
        if not 0.0 < self.eps < 0.5:
            raise ValidationError(
                f"eps must lie in (0, 1/2) to keep probabilities sorted, got {self.eps}"
            )

    @property
    def n(self) -> int:
        return 2 * self.m + 2 * self.t

    @property
    def k(self) -> int:
        return self.m + self.t


@dataclass(frozen=True)
class GapRecord:
    """One benchmark row: exact costs, their ratio, and the t-limit of the ratio."""

    t: int
    m: int
    eps: float
    e_adaptive: float
    e_nonadaptive: float
    ratio: float
    limit: float


def gap_instance(params: GapParams) -> Instance:
    m, t, eps = params.m, params.t, params.eps
    p = (eps,) * t + (0.5,) * (2 * m) + (1.0 - eps,) * t
    c = (1,) * t + (0,) * (2 * m) + (1,) * t
    return Instance(k=params.k, p=p, c=c)


def zero_variables(params: GapParams) -> tuple[int, ...]:
    """Paid variables that are 0 with probability 1 - eps."""
    return tuple(range(1, params.t + 1))


def free_variables(params: GapParams) -> tuple[int, ...]:
    return tuple(range(params.t + 1, 2 * params.m + params.t + 1))


def one_variables(params: GapParams) -> tuple[int, ...]:
    """Paid variables that are 1 with probability 1 - eps."""
    return tuple(range(2 * params.m + params.t + 1, params.n + 1))


def band(params: GapParams) -> range:
    """Free 1-counts X for which the free phase leaves the value open.

    [m-t, m+t-1] clamped to the support of X; the clamp only matters in the
    degenerate regime t > m, where no free count can certify value 1.
    """
    lo = max(0, params.m - params.t)
    hi = min(2 * params.m, params.m + params.t - 1)
    return range(lo, hi + 1)


def binomial_weights(count: int) -> np.ndarray:
    """Pr[Binomial(count, 1/2) = x] for x = 0..count.

    Multiplicative recurrence outward from the mode (the recurrence from x=0
    would underflow long before count ~ 10^5), renormalized to sum to 1.
    """
    if count < 0:
        raise ValidationError("count must be nonnegative")
    w = np.zeros(count + 1)
    mode = count // 2
    w[mode] = 1.0
    for x in range(mode, 0, -1):
        w[x - 1] = w[x] * x / (count - x + 1)
    for x in range(mode, count):
        w[x + 1] = w[x] * (count - x) / (x + 1)
    total = w.sum()
    return w / total


def _check_cap(params: GapParams) -> None:
    if params.m > M_CAP:
        raise CapExceededError(
            f"m={params.m} exceeds the binomial summation cap {M_CAP}"
        )


def _check_paid_order(params: GapParams, paid_order: PartialPolicy) -> None:
    paid = set(zero_variables(params)) | set(one_variables(params))
    if set(paid_order.order) != paid or len(paid_order) != len(paid):
        raise ValidationError(
            "paid_order must be a permutation of the 2t paid variables"
        )


def adaptive_paid_order(params: GapParams, x: int) -> PartialPolicy:
    """Paid order the adaptive tester uses once the free 1-count is x:
    confirm the likelier value first."""
    ones = one_variables(params)
    zeros = zero_variables(params)
    seq = ones + zeros if x - params.m >= 0 else zeros + ones
    return PartialPolicy(seq)


def _paid_cost(params: GapParams, inst: Instance, order: PartialPolicy, x: int) -> float:
    return expected_cost(
        inst, order, ones_known=x, zeros_known=2 * params.m - x
    )


def _band_costs(
    params: GapParams, order_for_x
) -> tuple[float, float, float]:
    """(unconditional, conditional, band mass) of the paid spend."""
    _check_cap(params)
    inst = gap_instance(params)
    w = binomial_weights(2 * params.m)
    terms = []
    mass_terms = []
    for x in band(params):
        cost = _paid_cost(params, inst, order_for_x(x), x)
        terms.append(w[x] * cost)
        mass_terms.append(w[x])
    total = math.fsum(terms)
    mass = math.fsum(mass_terms)
    return total, total / mass, mass


def adaptive_cost(params: GapParams) -> float:
    """Exact expected cost of the adaptive rule: free variables first, then
    the likelier paid group.  Outside the band the free phase already decides
    the value at no cost."""
    return _band_costs(params, lambda x: adaptive_paid_order(params, x))[0]


def adaptive_conditional_cost(params: GapParams) -> float:
    """Adaptive expected cost conditioned on the free phase leaving the value open."""
    return _band_costs(params, lambda x: adaptive_paid_order(params, x))[1]


def economical_order(params: GapParams, paid_order: PartialPolicy) -> PartialPolicy:
    """Complete order: all free variables (ascending), then the paid order."""
    _check_paid_order(params, paid_order)
    return PartialPolicy(free_variables(params) + paid_order.order)


def nonadaptive_cost(params: GapParams, paid_order: PartialPolicy) -> float:
    """Exact expected cost of an economical fixed order, via the full-instance
    dynamic program (free tests cost nothing, so only the paid phase pays)."""
    _check_cap(params)
    inst = gap_instance(params)
    return expected_cost(inst, economical_order(params, paid_order))


def nonadaptive_conditional_cost(
    params: GapParams, paid_order: PartialPolicy
) -> float:
    """Conditional-on-band expected cost of an economical fixed order,
    computed by the binomial decomposition (independent of the full DP)."""
    _check_paid_order(params, paid_order)
    return _band_costs(params, lambda x: paid_order)[1]


def band_mass(params: GapParams) -> float:
    _check_cap(params)
    w = binomial_weights(2 * params.m)
    return math.fsum(w[x] for x in band(params))


def alternating_paid_order(params: GapParams) -> PartialPolicy:
    """Canonical paid order for tables: one-variable, zero-variable, repeating."""
    ones = one_variables(params)
    zeros = zero_variables(params)
    seq: list[int] = []
    for a, b in zip(ones, zeros):
        seq.extend((a, b))
    return PartialPolicy(tuple(seq))


def adaptive_strategy(params: GapParams):
    """The adaptive rule as a callback for ``evaluation.simulate``."""
    frees = free_variables(params)
    m = params.m

    def choose(tested: dict[int, int]):
        for i in frees:
            if i not in tested:
                return i
        x = sum(tested[i] for i in frees)
        for i in adaptive_paid_order(params, x).order:
            if i not in tested:
                return i
        return None

    return choose


def gap_table(
    t_values: Iterable[int], m: int, eps: float
) -> tuple[GapRecord, ...]:
    """One record per t, using the alternating paid order for the fixed policy."""
    records = []
    for t in t_values:
        params = GapParams(m=m, t=t, eps=eps)
        e_ad = adaptive_cost(params)
        e_na = nonadaptive_cost(params, alternating_paid_order(params))
        records.append(
            GapRecord(
                t=t,
                m=m,
                eps=eps,
                e_adaptive=e_ad,
                e_nonadaptive=e_na,
                ratio=e_na / e_ad,
                limit=(2 * t + 1) / (t + 1),
            )
        )
    return tuple(records)


GAP_CSV_HEADER = ("t", "m", "eps", "e_adaptive", "e_nonadaptive", "ratio", "limit")


def write_gap_csv(
    records: Sequence[GapRecord], fh: TextIO, *, comments: Sequence[str] = ()
) -> None:
    """Serialize records as CSV with the canonical header.

    ``comments`` are emitted first as "# ..." lines (schema and provenance).
    """
    for line in comments:
        fh.write(f"# {line}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GAP_CSV_HEADER)
    for rec in records:
        writer.writerow(
            [
                rec.t,
                rec.m,
                repr(rec.eps),
                repr(rec.e_adaptive),
                repr(rec.e_nonadaptive),
                repr(rec.ratio),
                repr(rec.limit),
            ]
        )
