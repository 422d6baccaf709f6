import numpy as np
import pytest

from dispersive_bench.bounds import (BOUND_IDS, BoundReport, SamplerConfig, dyadic_level, starred_levels,
                                     verify_pointwise_bounds)
from dispersive_bench.multipliers import ThetaProfile


@pytest.fixture(scope="module")
def report():
    return verify_pointwise_bounds(ThetaProfile(1.5, 16.0), SamplerConfig(100_000, seed=1))


def test_dyadic_levels():
    assert list(dyadic_level([0.3, 1.0, 3.9, -4.0, 100.0])) == [1, 1, 2, 4, 64]
    st = starred_levels(np.array([1.0]), np.array([9.0]), np.array([3.0]), np.array([40.0]))
    assert list(st[:, 0]) == [32, 8, 2, 1]


def test_all_ratios_finite(report):
    assert report.all_finite
    assert {r.bound_id for r in report.rows} == set(BOUND_IDS)
    assert report.get("psi_separated", "separated").samples > 0
    assert report.get("psi_comparable", "comparable").samples > 0


def test_resonant_values_exactly_zero(report):
    assert report.get("psi_resonant", "resonant").max_ratio == 0.0
    assert report.get("m4_dnls_resonant", "resonant").max_ratio == 0.0


def test_lemma_case3_exactly_zero(report):
    assert report.get("lemma43", "case3:|y|<=|x|<=N").max_ratio == 0.0


def test_double_mvt_zero_displacement():
    p = ThetaProfile(1.5, 8.0)
    f = lambda z: p(z) ** 2
    x = np.linspace(24, 400, 50)
    assert np.all(f(x + 0 + 0) - f(x + 0) - f(x + 0) + f(x) == 0)


def test_csv_round_trip(report):
    back = BoundReport.from_csv(report.to_csv())
    assert back.rows == report.rows


def test_deterministic():
    cfg = SamplerConfig(20_000, seed=5)
    a = verify_pointwise_bounds(ThetaProfile(2.5, 8.0), cfg)
    b = verify_pointwise_bounds(ThetaProfile(2.5, 8.0), cfg)
    assert a.to_csv() == b.to_csv()


def test_m4_dnls_constant_at_s_one_and_half(report):
    assert report.get("m4_dnls").max_ratio <= 50


def test_sampler_validation():
    with pytest.raises(ValueError):
        SamplerConfig(100)
