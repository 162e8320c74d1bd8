"""Sequential testing of k-of-n functions under test costs.

Evaluate fixed test orders exactly, compute optimal adaptive policies, search
or approximate the best non-adaptive order, and reproduce the benchmark that
separates the two regimes.
"""

from .core import (
    BudgetExceededError,
    CapExceededError,
    Determination,
    Instance,
    PartialPolicy,
    SbfeError,
    ValidationError,
    compose,
    determine,
    instance_from_obj,
    instance_to_obj,
    load_instance,
    normalize,
    pad_complete,
)
from .evaluation import (
    TailDistribution,
    bounded_score,
    cost_tail,
    expected_cost,
    fixed_order,
    simulate,
)

__all__ = [
    "BudgetExceededError",
    "CapExceededError",
    "Determination",
    "Instance",
    "PartialPolicy",
    "SbfeError",
    "TailDistribution",
    "ValidationError",
    "bounded_score",
    "compose",
    "cost_tail",
    "determine",
    "expected_cost",
    "fixed_order",
    "instance_from_obj",
    "instance_to_obj",
    "load_instance",
    "normalize",
    "pad_complete",
    "simulate",
]

__version__ = "0.1.0"
