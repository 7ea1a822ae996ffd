import itertools

import numpy as np
import pytest

from balmod import bec, channel, ldpc
from balmod.channel import ERASURE
from balmod.intervals import IntervalSet
from balmod.words import BitWord


@pytest.fixture(scope="module")
def tiny_code():
    return ldpc.build_gallager(8, 2, 4, seed=2)


@pytest.fixture(scope="module")
def bec_code():
    return ldpc.build_gallager(64, 3, 4, seed=11)


def all_codewords(code) -> list[np.ndarray]:
    # brute-force span of the full null space, independent of the generator
    rref, pivots = ldpc.gf2_rref(code.H)
    basis, _ = ldpc._nullspace_basis(rref, pivots, code.n)
    dim = basis.shape[1]
    out = []
    for coeffs in itertools.product((0, 1), repeat=dim):
        out.append((basis @ np.array(coeffs, np.uint8)) % 2)
    return out


def stored_form(z: np.ndarray) -> tuple[np.ndarray, int]:
    i = ldpc._balancing_index_arr(z)
    x = z.copy()
    x[:i] ^= 1
    return x, i


class TestCheckIntervalSets:
    def test_even_parity_outer_runs(self):
        s = bec.check_interval_sets([1, 4], [0, 0], n=8)
        assert s.intervals == ((0, 2), (5, 9))

    def test_odd_parity_inner_run(self):
        s = bec.check_interval_sets([1, 4], [1, 0], n=8)
        assert s.intervals == ((2, 5),)

    def test_classes_partition_universe(self):
        rng = channel.make_rng(30)
        for _ in range(40):
            n = 20
            positions = np.sort(rng.choice(n, size=4, replace=False))
            vals = rng.integers(0, 2, 4)
            s = bec.check_interval_sets(positions, vals, n)
            flipped = vals.copy()
            flipped[0] ^= 1
            t = bec.check_interval_sets(positions, flipped, n)
            assert s.intersect(t).size == 0
            assert s.size + t.size == n + 1

    def test_membership_matches_flip_counting(self):
        positions, n = [2, 5, 11], 16
        vals = [1, 1, 0]
        s = bec.check_interval_sets(positions, vals, n)
        parity = sum(vals) % 2
        for i in range(n + 1):
            flipped = sum(1 for p in positions if p < i) % 2
            assert ((flipped == parity) == (i in s))

    def test_unknown_value_rejected(self):
        with pytest.raises(ValueError):
            bec.check_interval_sets([1, 4], [0, ERASURE], n=8)


class TestGeniePeel:
    def test_no_erasures_round_trip(self, bec_code):
        u = channel.make_rng(31).integers(0, 2, bec_code.k)
        x, i = ldpc.balanced_encode(bec_code, u)
        z = bec.genie_peel(bec_code, x.to_array().astype(np.int8), i)
        expect, _ = stored_form(ldpc.encode(bec_code, u).to_array())
        assert z is not None
        assert not ldpc.syndrome(bec_code, z).any()

    def test_fills_scattered_erasures(self, bec_code):
        rng = channel.make_rng(32)
        for trial in range(30):
            u = rng.integers(0, 2, bec_code.k)
            x, i = ldpc.balanced_encode(bec_code, u)
            z_true = x.to_array().copy()
            z_true[:i] ^= 1
            y = channel.apply_bec(x, 0.2, seed=(33, trial))
            z = bec.genie_peel(bec_code, y, i)
            if z is not None:
                assert np.array_equal(z, z_true)

    def test_reports_stopping_set(self, bec_code):
        y = np.full(bec_code.n, ERASURE, dtype=np.int8)
        assert bec.genie_peel(bec_code, y, 0) is None


class TestInversionSetDecoder:
    def test_no_erasures_unique(self, bec_code):
        rng = channel.make_rng(34)
        for _ in range(20):
            u = rng.integers(0, 2, bec_code.k)
            x, i_true = ldpc.balanced_encode(bec_code, u)
            res = bec.bec_decode(bec_code, x.to_array().astype(np.int8),
                                 budget=bec_code.n + 1)
            z_true = x.to_array().copy()
            z_true[:i_true] ^= 1
            assert res.status == bec.UNIQUE
            assert np.array_equal(res.z.to_array(), z_true)
            assert res.i == i_true

    def test_all_erased_is_not_unique(self, bec_code):
        y = np.full(bec_code.n, ERASURE, dtype=np.int8)
        res = bec.bec_decode(bec_code, y, budget=bec_code.n + 1)
        assert res.status != bec.UNIQUE

    def test_budget_overflow_reported(self, bec_code):
        y = np.full(bec_code.n, ERASURE, dtype=np.int8)
        res = bec.bec_decode(bec_code, y, budget=4)
        assert res.status == bec.AMBIGUOUS
        assert res.budget_exceeded

    def test_two_erasures_on_tiny_code_match_exhaustive_oracle(self, tiny_code):
        # every returned word must be oracle-consistent, and whenever the
        # planted pair is the oracle's unique consistent answer AND its
        # erasures are peelable with the index known, the decoder must find it
        words = all_codewords(tiny_code)
        decoded_planted = 0
        for z in words:
            x, i = stored_form(z)
            for e1, e2 in ((0, 5), (2, 3), (6, 7), (1, 4)):
                y = x.astype(np.int8).copy()
                y[e1] = y[e2] = ERASURE
                mask = y != ERASURE
                consistent = set()
                for zc in words:
                    xc, ic = stored_form(zc)
                    if np.array_equal(xc[mask], y[mask].astype(np.uint8)):
                        consistent.add((tuple(zc), ic))
                res = bec.bec_decode(tiny_code, y, budget=tiny_code.n + 1)
                if res.status == bec.UNIQUE:
                    assert (tuple(res.z.to_array()), res.i) in consistent
                peelable = bec.genie_peel(tiny_code, y, i) is not None
                if peelable and len(consistent) == 1:
                    assert res.status == bec.UNIQUE
                    assert np.array_equal(res.z.to_array(), z)
                    assert res.i == i
                    decoded_planted += 1
        assert decoded_planted > 0

    def test_unique_results_are_sound(self, bec_code):
        rng = channel.make_rng(36)
        uniques = 0
        for trial in range(60):
            u = rng.integers(0, 2, bec_code.k)
            x, _ = ldpc.balanced_encode(bec_code, u)
            y = channel.apply_bec(x, 0.35, seed=(37, trial))
            res = bec.bec_decode(bec_code, y, budget=bec_code.n + 1)
            if res.status != bec.UNIQUE:
                continue
            uniques += 1
            z = res.z.to_array()
            assert not ldpc.syndrome(bec_code, z).any()
            xr = z.copy()
            xr[:res.i] ^= 1
            assert 2 * int(xr.sum()) == bec_code.n
            assert ldpc._balancing_index_arr(z) == res.i
        assert uniques > 30

    def test_genie_equivalence(self, bec_code):
        rng = channel.make_rng(38)
        agreements = 0
        for trial in range(100):
            u = rng.integers(0, 2, bec_code.k)
            x, i_true = ldpc.balanced_encode(bec_code, u)
            z_true = x.to_array().copy()
            z_true[:i_true] ^= 1
            y = channel.apply_bec(x, 0.35, seed=(39, trial))
            g = bec.genie_peel(bec_code, y, i_true)
            res = bec.bec_decode(bec_code, y, budget=bec_code.n + 1)
            if g is not None and res.status == bec.UNIQUE:
                assert np.array_equal(res.z.to_array(), g)
                agreements += 1
        assert agreements > 50
