from math import comb

import numpy as np
import pytest

from oracles import FamilyConstraint, random_family
from setfam import (
    Family,
    SetFamilyError,
    Subset,
    are_cross_k_intersecting,
    chain_decomposition_problems,
    chain_projection,
    complement_family,
    is_chain,
    is_k_intersecting,
    is_non_2_covering,
    is_sperner,
    layer,
    lower_part,
    shade,
    shadow,
    size_extremes,
    symmetric_chain_decomposition,
    symmetric_chain_of,
    upper_part,
)


def fam(n, *sets):
    return Family.of(n, sets)


def test_subset_rendering():
    assert str(Subset.of(3, [1, 3])) == "{1,3}"
    assert str(Subset.of(3, [])) == "∅"
    assert Subset.of(4, [2]).complement().positions == [1, 3, 4]
    assert Subset.of(4, [1, 2, 4]).size == 3


def test_subset_rejects_positions_outside_ground_set():
    with pytest.raises(SetFamilyError):
        Subset.of(3, [4])
    with pytest.raises(ValueError):
        Subset(ground_size=2, bits=0b100)


def test_family_from_subsets_checks_ground_size():
    with pytest.raises(SetFamilyError):
        Family.from_subsets(3, [Subset.of(4, [1])])
    family = Family.from_subsets(3, [Subset.of(3, [1]), Subset.of(3, [2, 3])])
    assert family.to_lists() == [[1], [2, 3]]
    assert str(family) == "{{1}, {2,3}}"


@pytest.mark.parametrize("family, expected", [
    (fam(3, [1], [2, 3]), (1, 2)),
    (fam(4, [1, 2]), (2, 2)),
    (fam(3, [], [1, 2, 3]), (0, 3)),
])
def test_size_extremes(family, expected):
    assert size_extremes(family) == expected


def test_size_extremes_of_empty_family():
    with pytest.raises(SetFamilyError, match="undefined extremes"):
        size_extremes(Family(ground_size=3))


@pytest.mark.parametrize("family, expected", [
    (fam(3, [1], [2, 3]), True),
    (fam(3, [1], [1, 2]), False),
    (fam(3, [1, 2], [1, 2]), False),
    (Family(ground_size=3), True),
])
def test_is_sperner(family, expected):
    assert is_sperner(family) is expected


@pytest.mark.parametrize("family, expected", [
    (fam(3, [1], [2]), True),
    (fam(3, [1, 2], [2, 3]), False),
    (fam(3, [1, 2, 3]), False),
])
def test_is_non_2_covering(family, expected):
    assert is_non_2_covering(family) is expected


@pytest.mark.parametrize("family, k, expected", [
    (fam(3, [1, 2], [2, 3]), 1, True),
    (fam(3, [1], [2]), 1, False),
    (fam(4, [1, 2, 3], [1, 2, 4]), 2, True),
    (fam(3, [1]), 2, False),
])
def test_is_k_intersecting(family, k, expected):
    assert is_k_intersecting(family, k) is expected


def test_is_k_intersecting_rejects_k_below_one():
    with pytest.raises(SetFamilyError):
        is_k_intersecting(fam(3, [1]), 0)


def test_are_cross_k_intersecting():
    assert are_cross_k_intersecting(fam(3, [1, 2]), fam(3, [2, 3]), 1)
    assert not are_cross_k_intersecting(fam(3, [1]), fam(3, [2, 3]), 1)
    assert are_cross_k_intersecting(Family(ground_size=3), fam(3, [1]), 5)
    with pytest.raises(SetFamilyError):
        are_cross_k_intersecting(fam(3, [1]), fam(4, [1]), 1)


def test_is_chain():
    assert is_chain(fam(3, [1], [1, 2], [1, 2, 3]))
    assert not is_chain(fam(3, [1], [2]))


def test_shade():
    assert shade(fam(3, [1]), 2).to_lists() == [[1, 2], [1, 3]]
    assert shade(fam(3, [1, 2]), 3).to_lists() == [[1, 2, 3]]
    assert len(shade(fam(4, [1], [2]), 2)) == 5


@pytest.mark.parametrize("r", [1, 4])
def test_shade_out_of_range(r):
    with pytest.raises(SetFamilyError):
        shade(fam(3, [1, 2]), r)


def test_shadow():
    assert shadow(fam(3, [1, 2]), 1).to_lists() == [[1], [2]]
    assert shadow(fam(3, [1, 2, 3]), 0).to_lists() == [[]]
    assert shadow(fam(3, [1, 2], [2, 3]), 1).to_lists() == [[1], [2], [3]]
    with pytest.raises(SetFamilyError):
        shadow(fam(3, [1, 2]), 3)
    with pytest.raises(SetFamilyError):
        shadow(fam(3, [1, 2]), -1)


def test_shade_and_shadow_are_monotone():
    small = fam(5, [1, 2], [3, 4])
    large = fam(5, [1, 2], [3, 4], [2, 5])
    assert set(shade(small, 3).masks) <= set(shade(large, 3).masks)
    assert set(shadow(small, 1).masks) <= set(shadow(large, 1).masks)


def test_complement_family():
    assert complement_family(fam(3, [1])).to_lists() == [[2, 3]]
    assert complement_family(fam(2, [])).to_lists() == [[1, 2]]
    family = fam(5, [1, 4], [], [2, 3, 5], [1, 2, 3, 4, 5])
    assert complement_family(complement_family(family)) == family


def test_layer_and_parts_keep_list_order():
    family = fam(4, [3, 4], [1], [1, 2, 3], [2, 4])
    assert layer(family, 2).to_lists() == [[3, 4], [2, 4]]
    assert lower_part(family, 2).to_lists() == [[3, 4], [1], [2, 4]]
    assert upper_part(family, 2).to_lists() == [[3, 4], [1, 2, 3], [2, 4]]


def test_chain_decomposition_small_cases():
    assert symmetric_chain_decomposition(1).render() == ["∅ {1}"]
    three = symmetric_chain_decomposition(3)
    assert len(three.chains) == 3
    through_empty = [chain for chain in three.chains if chain[0] == 0]
    assert len(through_empty[0]) == 4
    four = symmetric_chain_decomposition(4)
    assert len(four.chains) == 6
    assert sum(len(chain) for chain in four.chains) == 16


@pytest.mark.parametrize("n", range(1, 17))
def test_chain_decomposition_is_valid(n):
    decomposition = symmetric_chain_decomposition(n)
    assert chain_decomposition_problems(decomposition) == []
    assert len(decomposition.chains) == comb(n, n // 2)


def test_chain_decomposition_range():
    with pytest.raises(SetFamilyError):
        symmetric_chain_decomposition(0)
    with pytest.raises(SetFamilyError):
        symmetric_chain_decomposition(25)


def test_symmetric_chain_of_matches_decomposition():
    decomposition = symmetric_chain_decomposition(6)
    for chain in decomposition.chains:
        for mask in chain:
            found = symmetric_chain_of(Subset(ground_size=6, bits=mask))
            assert tuple(s.bits for s in found) == chain


def test_symmetric_chain_of_beyond_materialized_range():
    chain = symmetric_chain_of(Subset.of(40, [1, 7, 20]))
    assert chain[0].size + chain[-1].size == 40
    assert any(s.bits == Subset.of(40, [1, 7, 20]).bits for s in chain)


def test_chain_projection_is_injective_on_sperner_families():
    family = fam(6, [1, 2], [3], [4, 5, 6], [2, 4])
    assert is_sperner(family)
    projected = chain_projection(family, 3)
    assert set(projected.sizes()) == {3}
    assert len(set(projected.masks)) == len(family)


def test_chain_projection_needs_reachable_size():
    # {2} is matched in [2], so its chain is the single set {2}
    with pytest.raises(SetFamilyError):
        chain_projection(fam(2, [2]), 0)


def test_sperner_bound_exhaustive_small_n():
    for n in range(1, 5):
        subsets = range(1 << n)
        for chosen in range(1, 1 << (1 << n)):
            masks = tuple(s for s in subsets if chosen >> s & 1)
            family = Family(ground_size=n, masks=masks)
            if is_sperner(family):
                assert len(family) <= comb(n, n // 2)


@pytest.mark.slow
def test_intersecting_families_have_large_shadows():
    rng = np.random.default_rng(7)
    for seed in range(1000):
        n = int(rng.integers(2, 13))
        k = int(rng.integers(1, n + 1))
        family = random_family(n, [k], FamilyConstraint.INTERSECTING, seed, max_members=40)
        assert is_k_intersecting(family, 1)
        assert len(shadow(family, k - 1)) >= len(family)


@pytest.mark.slow
def test_uniform_families_grow_under_shade_and_shadow():
    rng = np.random.default_rng(11)
    checked = 0
    for seed in range(1000):
        n = int(rng.integers(3, 13))
        upper_k = [k for k in range((n + 3) // 2, n)]
        lower_k = [k for k in range(1, n // 2)]
        if not upper_k and not lower_k:
            continue
        k = int(rng.choice(upper_k + lower_k))
        family = random_family(n, [k], FamilyConstraint.SPERNER, seed,
                               max_members=1 + seed % comb(n, k))
        if k in upper_k:
            assert len(shadow(family, k - 1)) - len(family) >= k - 1
        else:
            assert len(shade(family, k + 1)) - len(family) >= n - k - 1
        checked += 1
    assert checked > 700


@pytest.mark.slow
def test_layered_shade_and_shadow_growth():
    for seed in range(300):
        n = 4 + seed % 7
        sizes = list(range(1, n))
        family = random_family(n, sizes, FamilyConstraint.SPERNER, seed, max_members=12)
        l, u = size_extremes(family)
        for i in range(l, n // 2 + 1):
            lower = lower_part(family, i)
            assert len(shade(lower, i)) >= len(lower) + (i - l) * (n - i)
        for i in range((n + 1) // 2, u + 1):
            upper = upper_part(family, i)
            assert len(shadow(upper, i)) >= len(upper) + i * (u - i)


@pytest.mark.slow
def test_singleton_sperner_families():
    for seed in range(200):
        n = 3 + seed % 8
        family = random_family(n, range(1, n), FamilyConstraint.SPERNER, seed, max_members=15)
        with_singleton = Family(ground_size=n, masks=(1,) + tuple(m for m in family.masks if not m & 1))
        assert is_sperner(with_singleton)
        assert len(with_singleton) <= comb(n - 1, (n - 1) // 2) + 1


def test_complements_of_intersecting_lower_layer_are_3_intersecting():
    for seed in range(50):
        n = 6 + 2 * (seed % 3)
        family = random_family(n, [n // 2 - 1], FamilyConstraint.INTERSECTING, seed)
        assert is_k_intersecting(complement_family(family), 3)
