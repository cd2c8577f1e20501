import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convalg import lattice
from convalg.errors import DimensionError, LatticeError


def random_meet_semilattice(rng, k, count):
    """Random family of subsets of a k-set closed under intersection, ordered by inclusion."""
    family = {0, (1 << k) - 1}
    for m in rng.integers(0, 1 << k, size=count):
        family.add(int(m))
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(family), 2):
            if a & b not in family:
                family.add(a & b)
                changed = True
    elems = sorted(family)
    rng.shuffle(elems)
    rel = np.array([[(a & b) == a for b in elems] for a in elems])
    return lattice.build_lattice(len(elems), rel, labels=elems), elems


@pytest.fixture
def chain3():
    return lattice.chain(3)


class TestBuild:
    def test_chain_meet_is_min(self, chain3):
        np.testing.assert_array_equal(chain3.meet, np.minimum.outer(np.arange(3), np.arange(3)))

    def test_subset_lattice_meet_is_intersection(self):
        lat = lattice.subset_lattice(2)
        for a in range(4):
            for b in range(4):
                assert lat.meet[a, b] == (a & b)

    def test_no_common_lower_bound(self):
        with pytest.raises(LatticeError) as exc:
            lattice.build_lattice(2, [])
        assert exc.value.witness == (0, 1)

    def test_no_greatest_lower_bound(self):
        # 0, 1 below both 2 and 3, but 0 and 1 incomparable
        pairs = [(0, 2), (0, 3), (1, 2), (1, 3), (4, 0), (4, 1), (4, 2), (4, 3)]
        with pytest.raises(LatticeError) as exc:
            lattice.build_lattice(5, pairs)
        assert exc.value.witness == (2, 3)

    def test_antisymmetry(self):
        with pytest.raises(LatticeError, match="antisymmetry"):
            lattice.build_lattice(2, [(0, 1), (1, 0)])

    def test_transitivity(self):
        with pytest.raises(LatticeError, match="transitivity") as exc:
            lattice.build_lattice(3, [(0, 1), (1, 2)])
        assert exc.value.witness == (0, 1, 2)
        lat = lattice.build_lattice(3, [(0, 1), (1, 2)], close=True)
        assert lat.leq[0, 2]

    def test_linear_extension_makes_zeta_unitriangular(self, rng):
        lat, _ = random_meet_semilattice(rng, 4, 6)
        p = np.array(lat.order)
        z = lattice.zeta_matrix(lat)[np.ix_(p, p)]
        np.testing.assert_array_equal(z, np.tril(z))
        np.testing.assert_array_equal(np.diag(z), 1)

    def test_meet_laws_exhaustive(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            lat, elems = random_meet_semilattice(rng, 4, int(rng.integers(1, 6)))
            assert lat.n <= 16
            m = lat.meet
            for a, b in itertools.product(range(lat.n), repeat=2):
                assert m[a, b] == m[b, a]
                assert elems[m[a, b]] == elems[a] & elems[b]
                for c in range(lat.n):
                    assert m[m[a, b], c] == m[a, m[b, c]]
            np.testing.assert_array_equal(np.diag(m), np.arange(lat.n))


class TestShifts:
    def test_top_is_identity(self):
        lat = lattice.subset_lattice(3)
        np.testing.assert_array_equal(lattice.shift_operator(lat, lat.top), np.eye(8))

    def test_bottom_selects_bottom(self):
        lat = lattice.divisor_lattice(12)
        t = lattice.shift_operator(lat, lat.bottom)
        np.testing.assert_array_equal(t[:, lat.bottom], 1)
        assert t.sum() == lat.n

    def test_chain_middle(self, chain3):
        t = lattice.shift_operator(chain3, 1)
        np.testing.assert_array_equal(t @ np.array([10, 20, 30]), [10, 20, 20])

    def test_out_of_range(self, chain3):
        with pytest.raises(DimensionError):
            lattice.shift_operator(chain3, 3)

    @pytest.mark.parametrize(
        "lat", [lattice.chain(1), lattice.chain(5), lattice.subset_lattice(3), lattice.divisor_lattice(36)]
    )
    def test_commutation(self, lat):
        rep = lattice.check_commutation(lat)
        assert rep.passed and rep.pairs_checked == lat.n**2

    def test_chain_product(self, chain3):
        t1, t2 = lattice.shift_operator(chain3, 1), lattice.shift_operator(chain3, 2)
        np.testing.assert_array_equal(t1 @ t2, t1)

    def test_random_lattices_commute(self, rng):
        for _ in range(10):
            lat, _ = random_meet_semilattice(rng, 3, 4)
            shifts = [lattice.shift_operator(lat, a) for a in range(lat.n)]
            for s, t in itertools.product(shifts, repeat=2):
                np.testing.assert_array_equal(s @ t, t @ s)


class TestDiagonalize:
    def test_chain2(self):
        pair = lattice.diagonalize_shifts(lattice.chain(2))
        np.testing.assert_array_equal(pair.zeta, [[1, 0], [1, 1]])
        np.testing.assert_array_equal(pair.moebius, [[1, 0], [-1, 1]])
        np.testing.assert_array_equal(pair.response(1), [1, 1])

    def test_bottom_response(self):
        lat = lattice.divisor_lattice(36)
        r = lattice.diagonalize_shifts(lat).response(lat.bottom)
        np.testing.assert_array_equal(r, np.eye(lat.n, dtype=int)[lat.bottom])

    def test_subset3_all_identities(self):
        lat = lattice.subset_lattice(3)
        pair = lattice.diagonalize_shifts(lat)
        for a in range(8):
            t = lattice.shift_operator(lat, a)
            np.testing.assert_array_equal(pair.moebius @ t @ pair.zeta, np.diag([(c & a) == c for c in range(8)]))
        rep = lattice.check_diagonalization(lat, pair)
        assert rep.passed and rep.identities_checked == 8

    def test_moebius_of_subset_lattice(self):
        # classical Moebius function of the boolean lattice: (-1)^{|B \ C|}
        lat = lattice.subset_lattice(3)
        mu = lattice.moebius_matrix(lat)
        for b in range(8):
            for c in range(8):
                expected = (-1) ** bin(b ^ c).count("1") if (c & b) == c else 0
                assert mu[b, c] == expected

    def test_random_lattices(self, rng):
        for _ in range(10):
            lat, _ = random_meet_semilattice(rng, 4, 5)
            assert lattice.check_diagonalization(lat).passed


class TestConvolve:
    def test_delta_top(self):
        lat = lattice.subset_lattice(2)
        s = np.array([1.5, -2.0, 3.0, 4.0])
        h = np.zeros(4)
        h[lat.top] = 1
        np.testing.assert_array_equal(lattice.lattice_convolve(lat, h, s), s)

    def test_single_generator(self, chain3):
        s = np.array([1.0, 2.0, 3.0])
        np.testing.assert_array_equal(
            lattice.lattice_convolve(chain3, np.eye(3)[1], s), lattice.shift_operator(chain3, 1) @ s
        )

    def test_chain3_example(self, chain3):
        np.testing.assert_array_equal(lattice.lattice_convolve(chain3, [1, 1, 0], [1, 2, 3]), [2, 3, 3])

    def test_frequency_domain(self, rng):
        lat = lattice.divisor_lattice(36)
        h = rng.integers(-3, 4, size=lat.n)
        s = rng.integers(-3, 4, size=lat.n)
        lhs = lattice.lattice_fourier(lat, lattice.lattice_convolve(lat, h, s))
        rhs = lattice.frequency_response(lat, h) * lattice.lattice_fourier(lat, s)
        np.testing.assert_array_equal(lhs, rhs)
        np.testing.assert_array_equal(lattice.inverse_lattice_fourier(lat, lattice.lattice_fourier(lat, s)), s)

    def test_algebra_elements_commute_exactly(self, rng):
        lat = lattice.subset_lattice(3)
        for _ in range(10):
            a = lattice.algebra_element(lat, rng.integers(-5, 6, size=8))
            b = lattice.algebra_element(lat, rng.integers(-5, 6, size=8))
            np.testing.assert_array_equal(a @ b, b @ a)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_bilinear(self, seed):
        rng = np.random.default_rng(seed)
        lat = lattice.divisor_lattice(12)
        h1, h2, s1, s2 = rng.integers(-9, 10, size=(4, lat.n))
        c = lambda h, s: lattice.lattice_convolve(lat, h, s)
        np.testing.assert_array_equal(c(h1 + 2 * h2, s1), c(h1, s1) + 2 * c(h2, s1))
        np.testing.assert_array_equal(c(h1, s1 - 3 * s2), c(h1, s1) - 3 * c(h1, s2))

    def test_length_mismatch(self, chain3):
        with pytest.raises(DimensionError):
            lattice.lattice_convolve(chain3, [1, 0], [1, 2, 3])
