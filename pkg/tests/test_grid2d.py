import numpy as np
import pytest

from scalesmith.diffops import BoundaryError, BoundaryPolicy
from scalesmith.grid2d import (
    Detector,
    Image2D,
    ScaleSpace,
    derivative_response,
    dethessian_norm,
    engine_for,
    gradmag_norm,
    laplacian_norm,
    read_pgm,
    ridge_strength_norm,
    write_pgm,
)
from scalesmith.kernels1d import MethodId
from scalesmith.signals import ModelKind, ModelSpec, make_model

ALL = list(MethodId)


def model(kind, sigma0=1.5, method=MethodId.DISC_ANALOGUE_CD):
    return make_model(ModelSpec(kind, sigma0, method))


@pytest.fixture(scope="module")
def constant():
    return Image2D.from_array(np.full((61, 61), 3.25))


def test_image_invariants():
    img = Image2D.from_array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    assert (img.width, img.height) == (3, 2)
    assert img.center == (1, 1) and img.center_value() == 5.0
    with pytest.raises(ValueError):
        img.data[0, 0] = 9.0
    with pytest.raises(ValueError):
        Image2D.from_array([[1.0, np.nan]])
    with pytest.raises(ValueError):
        Image2D.from_array([1.0, 2.0])


def test_detector_table():
    assert [(d.gamma, d.polarity) for d in Detector] == [
        (1.0, "min"), (1.0, "max"), (0.5, "max"), (0.75, "min")]
    assert Detector.parse("GradMagEdge") is Detector.GRADMAG
    with pytest.raises(ValueError):
        Detector.parse("Harris")


@pytest.mark.parametrize("method", ALL, ids=lambda m: m.value)
def test_constant_image_smoothing_and_detectors(constant, method):
    out = derivative_response(constant, method, 0, 0, 4.0).data
    np.testing.assert_allclose(out, 3.25, atol=1e-10)
    for fn in (laplacian_norm, dethessian_norm, gradmag_norm, ridge_strength_norm):
        assert abs(fn(constant, method, 2.0)) <= 1e-10


@pytest.mark.parametrize("method", ALL, ids=lambda m: m.value)
def test_blob_odd_derivatives_vanish_at_centre(method):
    eng = ScaleSpace(model(ModelKind.BLOB, method=method))
    for s in (0.5, 2.0, 6.0):
        assert abs(eng.center_derivative(method, 1, 0, s)) <= 1e-10
        assert abs(eng.center_derivative(method, 1, 1, s)) <= 1e-10


def test_separable_passes_commute():
    rng = np.random.default_rng(11)
    img = Image2D.from_array(rng.standard_normal((50, 44)))
    eng = ScaleSpace(img)
    for method in (MethodId.SAMPLED_DER, MethodId.HYBRID_INT_CD):
        a = eng.response(method, 1, 1, 1.3, x_first=True).data
        b = eng.response(method, 1, 1, 1.3, x_first=False).data
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-14)


def test_full_response_centre_matches_centre_evaluation():
    rng = np.random.default_rng(5)
    img = Image2D.from_array(rng.standard_normal((61, 61)))
    eng = ScaleSpace(img)
    for method in ALL:
        full = eng.response(method, 2, 1, 2.0)
        assert full.center_value() == pytest.approx(eng.center_derivative(method, 2, 1, 2.0), abs=1e-12)


def test_blob_laplacian_negative_over_search_range():
    for method in ALL:
        img = model(ModelKind.BLOB, sigma0=1.0, method=method)
        for sigma in np.geomspace(0.1, 5.0, 12):
            assert laplacian_norm(img, method, sigma * sigma) < 0


def test_edge_has_no_y_derivative():
    eng = ScaleSpace(model(ModelKind.EDGE))
    for s in (0.3, 2.0):
        assert abs(eng.center_derivative(MethodId.DISC_ANALOGUE_CD, 0, 1, s)) <= 1e-12
        assert eng.center_derivative(MethodId.DISC_ANALOGUE_CD, 1, 0, s) > 0


def test_ridge_strength_reduction():
    method = MethodId.INTEGRATED_DER
    eng = ScaleSpace(model(ModelKind.RIDGE, method=method))
    s = 1.7
    lxx = eng.center_derivative(method, 2, 0, s)
    assert abs(eng.center_derivative(method, 0, 2, s)) <= 1e-12
    assert abs(eng.center_derivative(method, 1, 1, s)) <= 1e-12
    assert eng.detector_value(Detector.RIDGE, method, s) == pytest.approx(
        s**0.75 * 2 * min(lxx, 0.0), rel=1e-12)


def test_strict_boundary_violation():
    tiny = Image2D.from_array(np.ones((9, 9)))
    with pytest.raises(BoundaryError):
        laplacian_norm(tiny, MethodId.DISC_ANALOGUE_CD, 9.0)
    with pytest.raises(BoundaryError):
        derivative_response(tiny, MethodId.SAMPLED_DER, 1, 0, 9.0)
    out = derivative_response(tiny, MethodId.SAMPLED_DER, 0, 0, 9.0, BoundaryPolicy.REPLICATE)
    assert out.data.shape == (9, 9)


def test_smoothing_shared_between_orders():
    eng = ScaleSpace(model(ModelKind.BLOB))
    a = eng.smoothed_neighbourhood(MethodId.HYBRID_SAMPLED_CD, 1.0)
    eng.center_jet(MethodId.HYBRID_SAMPLED_CD, 1.0, Detector.DET_HESSIAN.orders)
    assert eng.smoothed_neighbourhood(MethodId.HYBRID_SAMPLED_CD, 1.0) is a


def test_engine_registry_by_identity():
    img = model(ModelKind.RIDGE)
    assert engine_for(img) is engine_for(img)
    assert engine_for(img) is not engine_for(model(ModelKind.RIDGE))


def test_detector_map_shape_and_sign():
    img = model(ModelKind.BLOB, sigma0=2.0)
    eng = ScaleSpace(img)
    lap = eng.detector_map(Detector.LAPLACIAN, MethodId.DISC_ANALOGUE_CD, 4.0)
    assert lap.shape == img.data.shape
    cy, cx = img.center
    assert lap[cy, cx] == lap.min() < 0


@pytest.mark.parametrize("mode", ["signfold", "minmax"])
def test_pgm_round_trip(tmp_path, mode):
    values = np.array([[-2.0, 0.0, 1.0], [0.5, 2.0, -1.0]])
    path = write_pgm(tmp_path / "x.pgm", values, mode, comment="hello")
    pixels, comments = read_pgm(path)
    assert pixels.shape == (2, 3)
    assert any(mode in c for c in comments) and "hello" in comments
    if mode == "signfold":
        np.testing.assert_array_equal(pixels, np.rint(65535 * np.abs(values) / 2.0))
    else:
        np.testing.assert_array_equal(pixels, np.rint(65535 * (values + 2.0) / 4.0))


def test_pgm_constant_and_bad_mode(tmp_path):
    pixels, _ = read_pgm(write_pgm(tmp_path / "c.pgm", np.ones((4, 4)), "minmax"))
    assert not pixels.any()
    with pytest.raises(ValueError):
        write_pgm(tmp_path / "bad.pgm", np.ones((2, 2)), "log")
