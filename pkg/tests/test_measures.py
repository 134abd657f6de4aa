from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scalesmith.diffops import central_difference
from scalesmith.kernels1d import MethodId
from scalesmith.measures import abs_variance, continuous_abs_spread, discrete_abs_variance, spread_report

CD = [m for m in MethodId if m.central_differences]
SIGMAS = np.round(np.arange(0.1, 2.0001, 0.1), 10)

# sqrt V(|g_{x^a}(.;1)|), mpmath quadrature split at the Hermite zeros
CONT_SPREAD_S1 = {2: 1.4983302065220304681, 3: 1.4981447192461868689, 4: 1.4812180816603221382}


@pytest.mark.parametrize("order, v", [(1, 1.0), (2, 0.5), (3, 2.0), (4, 1.0)])
def test_stencil_variances(order, v):
    assert discrete_abs_variance(central_difference(order)) == pytest.approx(v, abs=1e-15)


def test_variance_uses_absolute_values_and_mean():
    # |h| = (0, 1, 0, 3, 0) on offsets -2..2: mean 0.5, second moment 1
    assert abs_variance([0, -1, 0, 3, 0]) == pytest.approx(0.75)


def test_zero_kernel_rejected():
    with pytest.raises(ValueError):
        abs_variance(np.zeros(5))


@pytest.mark.parametrize("s", [0.04, 1.0, 7.3])
def test_continuous_closed_forms(s):
    assert continuous_abs_spread(0, s) == pytest.approx(sqrt(s), rel=1e-10)
    assert continuous_abs_spread(1, s) == pytest.approx(sqrt(2 * s), rel=1e-10)


@pytest.mark.parametrize("order", sorted(CONT_SPREAD_S1))
def test_continuous_quadrature_oracle_and_scaling(order):
    assert continuous_abs_spread(order, 1.0) == pytest.approx(CONT_SPREAD_S1[order], rel=1e-10)
    assert continuous_abs_spread(order, 4.0) == pytest.approx(2 * CONT_SPREAD_S1[order], rel=1e-10)


@pytest.mark.parametrize("order, s", [(5, 1.0), (-1, 1.0), (1, 0.0), (1, -2.0)])
def test_continuous_rejects_bad_input(order, s):
    with pytest.raises(ValueError):
        continuous_abs_spread(order, s)


@settings(max_examples=30)
@given(st.floats(0.01, 25.0))
def test_discrete_analogue_smoothing_spread_exact(s):
    rep = spread_report(MethodId.DISC_ANALOGUE_CD, 0, s)
    assert rep.spread == pytest.approx(sqrt(s), abs=1e-8)
    assert abs(rep.offset) <= 1e-8


def test_offset_is_difference():
    rep = spread_report(MethodId.HYBRID_SAMPLED_CD, 3, 0.8)
    assert rep.offset == rep.spread - continuous_abs_spread(3, 0.8)
    assert rep.sigma == pytest.approx(sqrt(0.8))


def test_sampled_first_derivative_offset_small_at_large_scale():
    assert abs(spread_report(MethodId.SAMPLED_DER, 1, 4.0).offset) < 0.05


def test_hybrid_integrated_offset_oracle():
    # independent mpmath construction of the equivalent kernel: offset 0.17459382132680619776
    rep = spread_report(MethodId.HYBRID_INT_CD, 1, 4.0)
    assert rep.offset == pytest.approx(0.17459382132680619776, abs=1e-12)


@pytest.mark.parametrize("method", list(MethodId), ids=lambda m: m.value)
@pytest.mark.parametrize("order", [1, 2])
def test_offsets_bounded_at_sigma_two(method, order):
    assert abs(spread_report(method, order, 4.0).offset) < 0.2


@pytest.mark.parametrize("method", CD, ids=lambda m: m.value)
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_cd_spread_not_below_bare_stencil(method, order):
    bare = sqrt(discrete_abs_variance(central_difference(order)))
    for sigma in SIGMAS:
        assert spread_report(method, order, sigma * sigma).spread >= bare - 1e-12


def _spreads(method, order):
    return np.array([spread_report(method, order, s * s).spread for s in np.geomspace(0.1, 2.0, 40)])


@pytest.mark.parametrize("method", list(MethodId), ids=lambda m: m.value)
@pytest.mark.parametrize("order", [1, 2])
def test_spread_monotone_low_orders(method, order):
    assert np.all(np.diff(_spreads(method, order)) >= -1e-12)


@pytest.mark.parametrize("method", CD, ids=lambda m: m.value)
@pytest.mark.parametrize("order", [3, 4])
def test_spread_monotone_cd_high_orders(method, order):
    assert np.all(np.diff(_spreads(method, order)) >= -1e-12)


def test_sampled_third_derivative_spread_dips():
    # the sampled kernel loses its outer lobes below the grid spacing, so the spread is not monotone
    assert np.diff(_spreads(MethodId.SAMPLED_DER, 3)).min() < -0.1
