import json
import random
from itertools import product

import pytest

from sbfe import (
    Determination,
    Instance,
    PartialPolicy,
    ValidationError,
    compose,
    determine,
    instance_from_obj,
    instance_to_obj,
    normalize,
    pad_complete,
)

from conftest import random_instance, random_policy


class TestInstance:
    def test_unit_constructor(self):
        inst = Instance.unit(2, (0.1, 0.5, 0.9))
        assert inst.n == 3 and inst.c == (1, 1, 1) and inst.is_unit_cost
        assert inst.prob(3) == 0.9 and inst.cost(1) == 1
        assert inst.total_cost == 3

    def test_rejects_boundary_probabilities(self):
        with pytest.raises(ValidationError):
            Instance.unit(1, (0.0, 0.5))
        with pytest.raises(ValidationError):
            Instance.unit(1, (0.5, 1.0))

    def test_rejects_unsorted_probabilities(self):
        with pytest.raises(ValidationError):
            Instance.unit(1, (0.9, 0.1))

    def test_rejects_bad_threshold(self):
        with pytest.raises(ValidationError):
            Instance.unit(0, (0.5,))
        with pytest.raises(ValidationError):
            Instance.unit(3, (0.5, 0.5))

    def test_rejects_bad_costs(self):
        with pytest.raises(ValidationError):
            Instance(k=1, p=(0.5,), c=(-1,))
        with pytest.raises(ValidationError):
            Instance(k=1, p=(0.5,), c=(0.5,))
        with pytest.raises(ValidationError):
            Instance(k=1, p=(0.5, 0.5), c=(1,))


class TestNormalize:
    def test_two_element_sort(self):
        inst, index_map = normalize([0.9, 0.1], [1, 1], 1)
        assert inst.p == (0.1, 0.9)
        assert index_map == (2, 1)

    def test_stable_on_ties(self):
        inst, index_map = normalize([0.5, 0.5, 0.5], None, 2)
        assert index_map == (1, 2, 3)
        assert inst.c == (1, 1, 1)

    def test_three_element_sort(self):
        inst, index_map = normalize([0.3, 0.1, 0.2], None, 2)
        assert inst.p == (0.1, 0.2, 0.3)
        assert index_map == (2, 3, 1)

    def test_costs_travel_with_probabilities(self):
        inst, _ = normalize([0.9, 0.1], [7, 3], 1)
        assert inst.c == (3, 7)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValidationError):
            normalize([0.5, 0.6], [1], 1)


class TestDetermine:
    def test_threshold_reached(self):
        inst = Instance.unit(2, (0.5,) * 4)
        assert determine(inst, 2, 0) is Determination.VALUE1
        assert determine(inst, 0, 3) is Determination.VALUE0
        assert determine(inst, 1, 1) is Determination.UNDETERMINED

    def test_small_undetermined(self):
        inst = Instance.unit(2, (0.5,) * 3)
        assert determine(inst, 1, 1) is Determination.UNDETERMINED

    def test_full_outcome_always_decides(self):
        """With all n values revealed, one of the two certificates must exist."""
        rng = random.Random(5)
        for _ in range(50):
            inst = random_instance(rng, max_n=8)
            for bits in product((0, 1), repeat=inst.n):
                ones = sum(bits)
                out = determine(inst, ones, inst.n - ones)
                assert out is not Determination.UNDETERMINED

    def test_rejects_inconsistent_counts(self):
        inst = Instance.unit(1, (0.5,))
        with pytest.raises(ValidationError):
            determine(inst, 1, 1)
        with pytest.raises(ValidationError):
            determine(inst, -1, 0)


class TestPolicyAlgebra:
    def test_compose_skips_duplicates(self):
        assert compose(PartialPolicy((1, 2)), PartialPolicy((2, 3))).order == (1, 2, 3)

    def test_compose_identity(self):
        pi = PartialPolicy((3, 1))
        assert compose(pi, PartialPolicy()).order == pi.order
        assert compose(PartialPolicy(), pi).order == pi.order

    def test_compose_associative_and_idempotent(self):
        rng = random.Random(11)
        for _ in range(100):
            n = rng.randint(1, 8)
            a, b, c = (random_policy(rng, n) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))
            assert compose(a, a) == a

    def test_pad_complete(self):
        inst = Instance.unit(1, (0.1, 0.2, 0.3, 0.4))
        assert pad_complete(PartialPolicy((3, 1)), inst).order == (3, 1, 2, 4)
        inst2 = Instance.unit(1, (0.1, 0.2))
        assert pad_complete(PartialPolicy((1, 2)), inst2).order == (1, 2)
        inst3 = Instance.unit(1, (0.1, 0.2, 0.3))
        assert pad_complete(PartialPolicy(), inst3).order == (1, 2, 3)

    def test_pad_preserves_prefix(self):
        rng = random.Random(13)
        for _ in range(50):
            inst = random_instance(rng, max_n=9)
            pi = random_policy(rng, inst.n)
            padded = pad_complete(pi, inst)
            assert padded.order[: len(pi)] == pi.order
            assert len(padded) == inst.n

    def test_policy_rejects_repeats(self):
        with pytest.raises(ValidationError):
            PartialPolicy((1, 2, 1))
        with pytest.raises(ValidationError):
            PartialPolicy((0, 1))


class TestInstanceJson:
    def test_round_trip(self):
        inst = Instance(k=2, p=(0.1, 0.5, 0.9), c=(1, 0, 2))
        again, index_map = instance_from_obj(instance_to_obj(inst))
        assert again == inst
        assert index_map == (1, 2, 3)

    def test_default_unit_costs(self):
        inst, _ = instance_from_obj({"k": 1, "p": [0.4, 0.6]})
        assert inst.c == (1, 1)

    def test_normalizes_unsorted_input(self):
        inst, index_map = instance_from_obj({"k": 1, "p": [0.9, 0.1], "c": [5, 2]})
        assert inst.p == (0.1, 0.9) and inst.c == (2, 5)
        assert index_map == (2, 1)

    def test_rejects_boundary_and_garbage(self):
        with pytest.raises(ValidationError):
            instance_from_obj({"k": 1, "p": [0.0, 0.5]})
        with pytest.raises(ValidationError):
            instance_from_obj({"k": 1, "p": [1.0]})
        with pytest.raises(ValidationError):
            instance_from_obj({"k": 1, "p": [0.5], "extra": 1})
        with pytest.raises(ValidationError):
            instance_from_obj([0.5])
        with pytest.raises(ValidationError):
            instance_from_obj({"p": [0.5]})

    def test_json_text_round_trip(self):
        text = json.dumps(instance_to_obj(Instance.unit(1, (0.25, 0.75))))
        inst, _ = instance_from_obj(json.loads(text))
        assert inst.p == (0.25, 0.75)
