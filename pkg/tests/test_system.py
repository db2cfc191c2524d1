import numpy as np
import pytest

from manakit.system import PhasePoint, QuditSystem, is_odd_prime, symplectic_product

from reference import ref_symplectic


@pytest.mark.parametrize("d", [3, 5, 7, 11])
def test_odd_primes_accepted(d):
    assert QuditSystem(d, 1).dim == d


@pytest.mark.parametrize("d", [1, 2, 4, 9, 15, 21])
def test_non_odd_primes_rejected(d):
    with pytest.raises(ValueError):
        QuditSystem(d, 1)


def test_is_odd_prime_matches_trial_division():
    def slow(m):
        return m > 2 and m % 2 == 1 and all(m % k for k in range(2, m))

    for m in range(50):
        assert is_odd_prime(m) == slow(m)


def test_dimension_budget():
    with pytest.raises(ValueError):
        QuditSystem(3, 9)  # 3^9 = 19683 > 10^4
    assert QuditSystem(3, 8).dim == 6561


def test_qudit_count_positive():
    with pytest.raises(ValueError):
        QuditSystem(3, 0)


def test_point_index_round_trip():
    sys = QuditSystem(3, 2)
    assert sys.num_points == 81
    for idx in range(sys.num_points):
        pairs = sys.point_pairs(idx)
        assert sys.point_index(pairs) == idx
    # flat, pair, and PhasePoint inputs agree
    assert sys.point_index([1, 2, 0, 1]) == sys.point_index([(1, 2), (0, 1)])
    assert PhasePoint.of(sys, [1, 2, 0, 1]).index(sys) == sys.point_index([1, 2, 0, 1])


def test_point_components_reduced_mod_d():
    sys = QuditSystem(5, 1)
    assert sys.point_label([7, -1]) == (2, 4)


def test_labels_cover_index_space():
    sys = QuditSystem(5, 1)
    labels = sys.labels()
    assert labels.shape == (25, 2)
    assert len({tuple(l) for l in labels}) == 25


def test_symplectic_product_matches_reference():
    for d, n in [(3, 1), (3, 2), (5, 1)]:
        sys = QuditSystem(d, n)
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = rng.integers(0, d, size=2 * n)
            v = rng.integers(0, d, size=2 * n)
            assert symplectic_product(sys, u, v) == ref_symplectic(d, n, u, v)
            # antisymmetry
            assert (symplectic_product(sys, u, v)
                    + symplectic_product(sys, v, u)) % d == 0


def test_combine_and_drop():
    a = QuditSystem(3, 1)
    b = QuditSystem(3, 2)
    assert a.combine(b) == QuditSystem(3, 3)
    assert b.drop_last() == a
    with pytest.raises(ValueError):
        a.combine(QuditSystem(5, 1))
    with pytest.raises(ValueError):
        a.drop_last()
