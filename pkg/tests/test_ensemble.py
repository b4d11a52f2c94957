import numpy as np
import pytest

from quantile_hub import EnsembleMethod, EnsembleSpec, combine
from quantile_hub.ensemble import EnsembleInputError

from conftest import make_forecast

MEAN = EnsembleSpec(EnsembleMethod.MEAN)
MEDIAN = EnsembleSpec(EnsembleMethod.MEDIAN)


def random_members(rng, n):
    return [make_forecast(tuple(np.sort(rng.normal(size=5)))) for _ in range(n)]


class TestCombine:
    def test_mean_of_two(self):
        members = [make_forecast((0, 0.5, 1, 1.5, 2)), make_forecast((1, 2, 3, 4, 5))]
        out = combine(members, MEAN)
        assert out.quantiles == (0.5, 1.25, 2.0, 2.75, 3.5)

    def test_median_robust_to_outlier(self):
        members = [
            make_forecast((0, 0.5, 1, 1.5, 2)),
            make_forecast((1, 1.5, 2, 2.5, 3)),
            make_forecast((9, 9.5, 10, 10.5, 11)),
        ]
        out = combine(members, MEDIAN)
        assert out.quantiles == (1, 1.5, 2, 2.5, 3)

    def test_idempotence_both_methods(self):
        member = make_forecast((-1, 0, 1, 2, 3))
        for spec in (MEAN, MEDIAN):
            out = combine([member] * 4, spec)
            assert out.quantiles == member.quantiles

    def test_even_count_median_is_midpoint(self):
        members = [make_forecast((0, 1, 2, 3, 4)), make_forecast((2, 3, 4, 5, 6))]
        out = combine(members, MEDIAN)
        assert out.quantiles == (1, 2, 3, 4, 5)

    def test_mixed_cells_rejected(self):
        members = [
            make_forecast((0, 1, 2, 3, 4), horizon_label="1 day"),
            make_forecast((0, 1, 2, 3, 4), horizon_label="2 day"),
        ]
        with pytest.raises(EnsembleInputError):
            combine(members, MEAN)

    def test_min_members_enforced(self):
        spec = EnsembleSpec(EnsembleMethod.MEAN, min_members=3)
        with pytest.raises(EnsembleInputError):
            combine([make_forecast((0, 1, 2, 3, 4))] * 2, spec)


class TestCombineProperties:
    def test_monotonicity_preserved(self):
        rng = np.random.default_rng(100)
        for _ in range(200):
            members = random_members(rng, rng.integers(1, 9))
            for spec in (MEAN, MEDIAN):
                out = combine(members, spec)
                assert all(a <= b for a, b in zip(out.quantiles, out.quantiles[1:]))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(101)
        members = random_members(rng, 7)
        perm = list(rng.permutation(7))
        for spec in (MEAN, MEDIAN):
            assert combine(members, spec) == combine([members[i] for i in perm], spec)

    def test_mean_affine_equivariance(self):
        rng = np.random.default_rng(102)
        members = random_members(rng, 5)
        a, b = 2.0, 3.0
        transformed = [
            make_forecast(tuple(a * q + b for q in m.quantiles)) for m in members
        ]
        lhs = combine(transformed, MEAN).quantiles
        rhs = tuple(a * q + b for q in combine(members, MEAN).quantiles)
        assert np.allclose(lhs, rhs)

    def test_median_unmoved_by_one_sided_shift(self):
        rng = np.random.default_rng(103)
        for _ in range(50):
            members = random_members(rng, 2 * int(rng.integers(1, 4)) + 1)  # odd >= 3
            base = combine(members, MEDIAN)
            # shift the member with the largest median far upward: stays on
            # the same side of the median, so the combination is unchanged
            top = max(range(len(members)), key=lambda i: members[i].quantiles[2])
            shifted = list(members)
            shifted[top] = make_forecast(
                tuple(q + 1e6 for q in members[top].quantiles)
            )
            assert combine(shifted, MEDIAN).quantiles[2] == base.quantiles[2]
