import itertools
import json

import pytest

from oracles import acts_trivially, random_specs
from stable_field_lab.action import (
    ActionSpec, DimensionError, classify, effective_dimension, is_conservative, kernel_lattice,
    level_decompositions,
)
from stable_field_lab.lattice import lattice_contains, lattice_equal, lattice_rank

RANDOM_SPECS = random_specs(50)
FREE_SPECS = random_specs(50, seed=7, free_only=True)


def test_example_kernel_level0(example3):
    K = kernel_lattice(example3.spec, 0).basis
    assert lattice_equal(K, [[1, 0], [1, 0], [0, 1]])


def test_example_kernel_level2(example3):
    K = kernel_lattice(example3.spec, 2).basis
    assert lattice_equal(K, [[1, 0], [1, 0], [0, 4]])


@pytest.mark.parametrize("i", range(4))
def test_nadkarni_kernel_trivial(nadkarni, i):
    K = kernel_lattice(nadkarni.spec, i).basis
    assert lattice_rank(K) == 0 if K and K[0] else True


def test_kernel_rejects_negative_level(example3):
    with pytest.raises(ValueError):
        kernel_lattice(example3.spec, -1)


@pytest.mark.parametrize("idx", range(0, 50, 3))
def test_kernel_matches_enumeration(idx):
    spec = RANDOM_SPECS[idx]
    for level in (0, 1):
        K = kernel_lattice(spec, level).basis
        for col in zip(*K):
            assert acts_trivially(spec, list(col), level)
        box = range(-4, 5) if spec.d < 3 else range(-2, 3)
        for n in itertools.product(box, repeat=spec.d):
            assert acts_trivially(spec, list(n), level) == lattice_contains(K, list(n))


@pytest.mark.parametrize("idx", range(50))
def test_kernel_nesting(idx):
    spec = RANDOM_SPECS[idx]
    for i in range(3):
        Ki = kernel_lattice(spec, i).basis
        Kn = kernel_lattice(spec, i + 1).basis
        # K_i inside K_{i+1}: a level-i coordinate n is 2n at level i+1
        assert all(lattice_contains(Kn, [2 * x for x in col]) for col in zip(*Ki))
        # 2 K_{i+1} inside K_i: 2 * (level-(i+1) point m) has level-i coordinates m
        assert all(lattice_contains(Ki, list(col)) for col in zip(*Kn))


def test_effective_dimension_example(example3):
    cls = effective_dimension(example3.spec, 3)
    assert cls.p == 1
    assert cls.torsion_profile == [[], [2], [4], [8]]


def test_effective_dimension_nadkarni(nadkarni, nadkarni_alt):
    assert effective_dimension(nadkarni.spec).p == 2
    assert effective_dimension(nadkarni_alt.spec).p == 1


def test_p_zero_rejected():
    spec = ActionSpec.from_dict({"d": 2, "translation": [["0", "0"]], "rotation": [["0", "0"]]})
    with pytest.raises(DimensionError, match="p >= 1"):
        effective_dimension(spec)
    with pytest.raises(DimensionError):
        classify(spec, 1.5)


@pytest.mark.parametrize("idx", range(50))
def test_dimension_level_invariance(idx):
    spec = RANDOM_SPECS[idx]
    decs = level_decompositions(spec, 3)
    ps = {dec.free_rank for dec in decs}
    assert len(ps) == 1
    for dec in decs:
        q = lattice_rank(dec.kernel_basis) if dec.kernel_basis[0] else 0
        assert dec.free_rank + q == spec.d


def test_conservativity_examples(example3, nadkarni, nadkarni_alt):
    assert is_conservative(example3.spec, [[1], [0], [0]]) is False
    assert is_conservative(nadkarni.spec, [[1, 0], [0, 1]]) is True
    assert is_conservative(nadkarni_alt.spec, [[1], [0]]) is False


def test_conservativity_rejects_kernel_overlap(example3):
    with pytest.raises(ValueError, match="kernel"):
        is_conservative(example3.spec, [[1], [1], [0]])


def test_pure_rotation_is_conservative():
    spec = ActionSpec.from_dict({"d": 1, "D": 2, "translation": [], "rotation": [["1/3"]],
                                 "gamma0": [[{"a": "0", "b": "1"}]]})
    # rotation by sqrt(2)/3 has infinite order
    assert effective_dimension(spec).p == 1
    assert is_conservative(spec, [[1]]) is True


def test_free_specs_cover_both_branches():
    verdicts = {is_conservative(s, level_decompositions(s, 0)[0].free_lift_basis) for s in FREE_SPECS}
    assert verdicts == {True, False}


def free_lifts(spec):
    return [dec.free_lift_basis for dec in level_decompositions(spec, 3)]


@pytest.mark.parametrize("idx", range(50))
def test_conservativity_scaling_and_levels(idx):
    spec = FREE_SPECS[idx]
    lifts = free_lifts(spec)
    base = is_conservative(spec, lifts[0])
    for r in (2, 3, 5):
        scaled = [[r * x for x in row] for row in lifts[0]]
        assert is_conservative(spec, scaled) == base
    for level, F in enumerate(lifts):
        assert is_conservative(spec, F, level) == base


def test_classify_examples(example3, nadkarni):
    c = classify(example3.spec, 1.5)
    assert (c.p, c.conservative, c.limit_law) == (1, False, "scaled Frechet")
    assert c.predicted_exponent == pytest.approx(2 / 3)
    c = classify(nadkarni.spec, 1.5)
    assert (c.p, c.conservative) == (2, True)
    assert c.predicted_exponent == pytest.approx(4 / 3)
    assert c.limit_law.startswith("degenerate")


def test_classify_rejects_bad_alpha(example3):
    with pytest.raises(ValueError):
        classify(example3.spec, 2)


def test_spec_json_roundtrip(nadkarni_alt):
    doc = nadkarni_alt.spec.to_dict()
    again = ActionSpec.from_dict(json.loads(json.dumps(doc)))
    assert again.to_dict() == doc
    assert again.digest() == nadkarni_alt.spec.digest()


@pytest.mark.parametrize("doc", [
    {"d": 2, "gamma0": [["1", "1"], ["1", "1"]], "translation": [["1", "0"]]},
    {"d": 2, "translation": [[0.5, "0"]]},
    {"d": 2, "translation": [["1"]]},
    {"d": 2},
    {"d": 2, "D": 4, "translation": [["1", "0"]]},
])
def test_spec_validation(doc):
    with pytest.raises((ValueError, TypeError)):
        ActionSpec.from_dict(doc)
