import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from choquetknn.errors import CapacityError, DomainError, InvalidSubsetError, MeasureFormatError
from choquetknn.fuzzyrough import GammaMeasure
from choquetknn.measure import (
    AdditiveMeasure,
    ExplicitMeasure,
    LazyMeasure,
    MobiusRepresentation,
    check_monotone,
    counting_measure,
    dual,
    format_measure,
    full_mask,
    mixture,
    mobius_transform,
    parse_measure,
    read_measure,
    restrict,
    shapley_value,
    shapley_values,
    subset_indices,
    subset_mask,
    symmetrize,
    to_explicit,
    write_measure,
    zeta_reconstruct,
)

from conftest import random_measure, random_monotone_table

seeds = st.integers(0, 2**32 - 1)
sizes = st.integers(1, 6)


def all_masks(m):
    return range(1 << m)


class TestSubsets:
    def test_mask_roundtrip(self):
        assert subset_mask([2, 0], 3) == 0b101
        assert subset_indices(0b101) == (0, 2)
        assert subset_mask(0b11, 3) == 3
        assert full_mask(4) == 15

    def test_same_subset_same_key(self):
        assert subset_mask([1, 0], 3) == subset_mask((0, 1), 3) == subset_mask(3, 3)

    @pytest.mark.parametrize("bad", [[3], [-1], 8, -1])
    def test_out_of_range(self, bad):
        with pytest.raises(InvalidSubsetError):
            subset_mask(bad, 3)


class TestEvaluate:
    def test_example_pair(self, mu1):
        assert mu1.evaluate([1, 2]) == 0.5

    def test_empty_is_zero(self, mu1):
        assert mu1.evaluate([]) == 0.0
        assert AdditiveMeasure([0.2, 0.4, 0.4]).evaluate(0) == 0.0

    def test_additive_sum(self):
        assert AdditiveMeasure([0.2, 0.4, 0.4]).evaluate([0, 2]) == pytest.approx(0.6, abs=1e-15)

    def test_invalid_subset(self, mu1):
        with pytest.raises(InvalidSubsetError):
            mu1.evaluate([3])

    def test_evaluate_many_matches_scalar(self):
        rng = np.random.default_rng(3)
        mu = random_measure(rng, 5)
        masks = rng.integers(0, 32, 200)
        assert np.array_equal(mu.evaluate_many(masks), [mu.evaluate(int(k)) for k in masks])

    def test_table_is_copied_and_frozen(self):
        t = np.array([0.0, 1.0])
        mu = ExplicitMeasure(t)
        t[1] = 5.0
        assert mu.evaluate(1) == 1.0
        with pytest.raises(ValueError):
            mu.table[1] = 2.0

    @pytest.mark.parametrize(
        "table",
        [[0.0, 1.0, 2.0], [1.0, 1.0], [0.0, -1.0], [0.0, np.nan]],
    )
    def test_invalid_tables(self, table):
        with pytest.raises(DomainError):
            ExplicitMeasure(table)

    def test_from_dict_requires_all_subsets(self):
        with pytest.raises(DomainError):
            ExplicitMeasure.from_dict(2, {0: 0.0, 1: 1.0})

    def test_capacity(self):
        with pytest.raises(CapacityError):
            check_monotone(counting_measure(21))


class TestMonotone:
    def test_example(self, mu1):
        assert check_monotone(mu1)

    def test_violation_reported(self):
        mu = ExplicitMeasure([0.0, 0.5, 0.1, 0.3])
        res = check_monotone(mu)
        assert not res
        assert res.violation == ((0,), (0, 1))

    def test_counting(self):
        assert check_monotone(counting_measure(4)).is_monotone

    @given(seeds, sizes)
    def test_generator_is_monotone(self, seed, m):
        assert check_monotone(random_measure(np.random.default_rng(seed), m))


class TestDualAndMixture:
    def test_gamma_dual_values(self, X1, y1):
        g = dual(GammaMeasure(X1, y1))
        assert g.evaluate([2]) == pytest.approx(1.65, abs=1e-12)
        assert g.evaluate([0, 2]) == pytest.approx(2.55, abs=1e-12)

    def test_gamma_symmetric_values(self, X1, y1):
        s = mixture(GammaMeasure(X1, y1), 0.5)
        assert s.evaluate([2]) == pytest.approx(2.65, abs=1e-12)
        assert s.evaluate([0, 1]) == pytest.approx(1.0, abs=1e-12)

    def test_additive_self_dual(self):
        w = AdditiveMeasure([0.2, 0.4, 0.4])
        d = dual(w)
        assert all(d.evaluate(k) == pytest.approx(w.evaluate(k), abs=1e-15) for k in all_masks(3))

    @pytest.mark.parametrize("alpha", [-0.1, 1.1, np.nan])
    def test_alpha_domain(self, mu1, alpha):
        with pytest.raises(DomainError):
            mixture(mu1, alpha)

    @given(seeds, sizes)
    def test_involution_exact(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        dd = dual(dual(mu))
        assert all(dd.evaluate(k) == mu.evaluate(k) for k in all_masks(m))

    @given(seeds, sizes)
    def test_involution_of_materialised_dual(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        dd = dual(to_explicit(dual(mu)))
        assert np.allclose(to_explicit(dd).table, mu.table, rtol=0, atol=1e-12)

    @given(seeds, sizes)
    def test_complement_identity(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        d, full = dual(mu), full_mask(m)
        for k in all_masks(m):
            assert d.evaluate(k) + mu.evaluate(full & ~k) == pytest.approx(mu.total, abs=1e-12)

    @given(seeds, sizes)
    def test_symmetrised_is_self_dual(self, seed, m):
        s = symmetrize(random_measure(np.random.default_rng(seed), m))
        ds = dual(s)
        for k in all_masks(m):
            assert ds.evaluate(k) == pytest.approx(s.evaluate(k), abs=1e-12)

    @given(seeds, sizes)
    def test_mixture_endpoints(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        m0, m1, d = mixture(mu, 0.0), mixture(mu, 1.0), dual(mu)
        for k in all_masks(m):
            assert m0.evaluate(k) == mu.evaluate(k)
            assert m1.evaluate(k) == pytest.approx(d.evaluate(k), abs=1e-12)

    @given(seeds, st.integers(1, 6), st.floats(0, 1))
    def test_mixture_monotone(self, seed, m, alpha):
        assert check_monotone(mixture(random_measure(np.random.default_rng(seed), m), alpha))


class TestMobius:
    def test_additive(self):
        mob = mobius_transform(AdditiveMeasure([0.2, 0.4, 0.4]))
        assert mob.coefficient([0]) == pytest.approx(0.2)
        assert mob.coefficient([1]) == pytest.approx(0.4)
        assert mob.coefficient([2]) == pytest.approx(0.4)
        for k in (3, 5, 6, 7):
            assert mob.coefficient(k) == pytest.approx(0.0, abs=1e-15)

    def test_example_pair(self, mu1):
        # 0.5 - 0.2 - 0.2
        assert mobius_transform(mu1).coefficient([1, 2]) == pytest.approx(0.1, abs=1e-12)

    def test_counting_two(self):
        mob = mobius_transform(counting_measure(2))
        assert mob.coeffs == {1: 1.0, 2: 1.0}

    def test_matches_alternating_sum(self, mu1):
        mob = mobius_transform(mu1)
        for b in all_masks(3):
            direct = sum(
                (-1) ** (bin(b).count("1") - bin(a).count("1")) * mu1.evaluate(a)
                for a in all_masks(3)
                if a & ~b == 0
            )
            assert mob.coefficient(b) == pytest.approx(direct, abs=1e-12)

    def test_zeta_examples(self, mu1):
        assert zeta_reconstruct(MobiusRepresentation(2, {}), 3) == 0.0
        assert zeta_reconstruct(MobiusRepresentation(2, {1: 1.0}), [0, 1]) == 1.0
        mob = mobius_transform(mu1)
        for k in all_masks(3):
            assert zeta_reconstruct(mob, k) == pytest.approx(mu1.evaluate(k), abs=1e-12)

    @given(seeds, sizes)
    def test_roundtrip(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        mob = mobius_transform(mu)
        for k in all_masks(m):
            assert zeta_reconstruct(mob, k) == pytest.approx(mu.evaluate(k), abs=1e-12)


class TestShapley:
    def test_example(self, mu1):
        assert shapley_value(mu1, 0) == pytest.approx(0.2, abs=1e-12)
        assert shapley_value(mu1, 1) == pytest.approx(0.4, abs=1e-12)
        assert np.allclose(shapley_values(mu1), [0.2, 0.4, 0.4], atol=1e-12)

    def test_additive(self):
        w = [0.3, 0.1, 0.7, 0.2]
        assert np.allclose(shapley_values(AdditiveMeasure(w)), w, atol=1e-12)

    def test_out_of_range(self, mu1):
        with pytest.raises(InvalidSubsetError):
            shapley_value(mu1, 3)

    @given(seeds, sizes)
    def test_efficiency(self, seed, m):
        mu = random_measure(np.random.default_rng(seed), m)
        assert shapley_values(mu).sum() == pytest.approx(mu.total, abs=1e-12)


class TestLazy:
    def test_memoisation_and_counts(self):
        calls = []

        def f(mask):
            calls.append(mask)
            return float(bin(mask).count("1"))

        mu = LazyMeasure(4, f)
        assert mu.evaluate([0, 1]) == 2.0
        assert mu.evaluate([1, 0]) == 2.0
        mu.evaluate_many([3, 3, 5])
        assert calls == [3, 5]
        info = mu.cache_info()
        assert (info.evaluations, info.size) == (2, 2)
        assert info.hits == info.requests - info.evaluations

    def test_concurrent_readers(self):
        rng = np.random.default_rng(0)
        table = random_monotone_table(rng, 8)
        mu = LazyMeasure(8, lambda k: float(table[k]))
        masks = rng.integers(0, 256, 4000)
        results = {}

        def work(i):
            sub = masks[i::4]
            results[i] = [mu.evaluate(int(k)) for k in sub] + list(mu.evaluate_many(sub))

        threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for i in range(4):
            expected = [table[k] for k in masks[i::4]] * 2
            assert results[i] == expected
        assert mu.cache_info().evaluations == len(set(masks.tolist()))


class TestRestrict:
    def test_lifts_into_base(self, mu1):
        r = restrict(mu1, [1, 2])
        assert r.ground_size == 2
        assert r.evaluate([0, 1]) == mu1.evaluate([1, 2])
        assert r.evaluate([0]) == mu1.evaluate([1])


class TestFileFormat:
    def test_roundtrip(self, tmp_path, mu1):
        p = tmp_path / "mu.txt"
        write_measure(p, mu1)
        back = read_measure(p)
        assert back.names == ["fever", "fatigue", "cough"]
        assert np.array_equal(back.table, mu1.table)

    def test_text_layout(self, mu1):
        text = format_measure(mu1)
        lines = text.splitlines()
        assert lines[0] == "attrs: fever,fatigue,cough"
        assert lines[1] == "=0.0"
        assert lines[-1] == "fever,fatigue,cough=1.0"

    def test_comments_and_optional_empty(self):
        mu = parse_measure("# comment\nattrs: a,b\n\na=0.5\nb=0.25\nb,a=1\n")
        assert list(mu.table) == [0.0, 0.5, 0.25, 1.0]

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "a=1\n",
            "attrs: a,b\na=1\nb=1\n",
            "attrs: a,b\na=1\nb=1\na,c=1\n",
            "attrs: a,b\na=x\nb=1\na,b=1\n",
            "attrs: a,b\na=1\na=1\nb=1\na,b=1\n",
            "attrs: a\n=1\na=1\n",
            "attrs: a,a\na=1\n",
        ],
    )
    def test_invalid(self, text):
        with pytest.raises(MeasureFormatError):
            parse_measure(text)
