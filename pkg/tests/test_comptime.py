import warnings

import pytest
from hypothesis import given, strategies as st

from dvfsmodel.comptime import (
    CompletionTimeModel,
    CtCalibrationInputs,
    PetrucciCtModel,
    calibrate_ct,
    fit_theta_slope,
    petrucci_ct,
    predict_ct,
    theta_slope,
)
from dvfsmodel.core import (
    CalibrationWarning,
    DegenerateProbe,
    FrequencyNotOnGrid,
    InputError,
    InvalidCalibration,
    NonPositiveCT,
    ZeroCpu,
    validate_grid,
)

from reference_data import CPUTEST_THETAS, I5_CT_GRID, RANDMEM32_THETAS

I5 = validate_grid(I5_CT_GRID)


def synth_inputs(grid, ct0, u, theta_fmax, theta_fmin, base=1.0, probe=0.2):
    """Corner completion times that a workload with the given (U, theta) would produce."""
    ct_base_fmin = ct0 * (1 + u * (grid.f_max / grid.f_min - 1))
    stretch = (base - probe) / probe
    return CtCalibrationInputs(
        grid,
        ct_base_fmax=ct0,
        ct_base_fmin=ct_base_fmin,
        ct_probe_fmax=ct0 * (1 + theta_fmax * stretch),
        ct_probe_fmin=ct_base_fmin * (1 + theta_fmin * stretch),
        base_cpu=base,
        probe_cpu=probe,
    )


@pytest.fixture
def randmem32():
    return calibrate_ct(synth_inputs(I5, 58.0, 0.43, 0.71, 0.9), "randmem32")


def test_randmem32_constants(randmem32):
    assert randmem32.u == pytest.approx(0.43, abs=1e-12)
    assert randmem32.theta_fmax == pytest.approx(0.71, abs=1e-12)
    assert randmem32.theta_fmin == pytest.approx(0.9, abs=1e-12)
    # (0.9 - 0.71) * 1197 / (2926 - 1197)
    assert randmem32.k == pytest.approx(0.131538, abs=1e-6)
    assert randmem32.v == pytest.approx(0.57)


def test_cputest_k_zero():
    model = calibrate_ct(synth_inputs(I5, 57.0, 1.0, 1.0, 1.0), "cpuTest")
    assert model.k == pytest.approx(0.0, abs=1e-12)
    assert model.u == pytest.approx(1.0)


def test_frequency_independent_u_zero():
    grid = validate_grid([1000, 2000])
    model = calibrate_ct(CtCalibrationInputs(grid, 10.0, 10.0, 30.0, 30.0))
    assert model.u == 0.0


def test_corners_randmem32(randmem32):
    inputs = synth_inputs(I5, 58.0, 0.43, 0.71, 0.9)
    assert predict_ct(randmem32, 1.0, 2926) == pytest.approx(inputs.ct_base_fmax, rel=1e-12)
    assert predict_ct(randmem32, 1.0, 1197) == pytest.approx(inputs.ct_base_fmin, rel=1e-12)
    assert predict_ct(randmem32, 0.2, 2926) == pytest.approx(inputs.ct_probe_fmax, rel=1e-12)
    assert predict_ct(randmem32, 0.2, 1197) == pytest.approx(inputs.ct_probe_fmin, rel=1e-12)


def test_theta_endpoints(randmem32):
    assert randmem32.theta(1197) == pytest.approx(randmem32.theta_fmin, abs=1e-14)
    assert randmem32.theta(2926) == randmem32.theta_fmax
    assert randmem32.mu(2926) == pytest.approx(0.29)


def test_prediction_errors(randmem32):
    with pytest.raises(ZeroCpu):
        predict_ct(randmem32, 0.0, 2926)
    with pytest.raises(FrequencyNotOnGrid):
        predict_ct(randmem32, 0.5, 3000)


def test_input_validation():
    grid = validate_grid([1000, 2000])
    with pytest.raises(NonPositiveCT):
        CtCalibrationInputs(grid, 10.0, 0.0, 30.0, 30.0)
    with pytest.raises(DegenerateProbe):
        CtCalibrationInputs(grid, 10.0, 12.0, 30.0, 30.0, base_cpu=0.5, probe_cpu=0.5)
    with pytest.raises(InvalidCalibration):
        CtCalibrationInputs(grid, 10.0, 12.0, 30.0, 30.0, base_cpu=0.5, probe_cpu=0.7)


def test_implausible_u_warns():
    grid = validate_grid([1000, 2000])
    with pytest.warns(CalibrationWarning):
        calibrate_ct(CtCalibrationInputs(grid, 10.0, 40.0, 30.0, 80.0))


def test_json_round_trip(randmem32):
    assert CompletionTimeModel.from_dict(randmem32.to_dict()) == randmem32


def test_extrapolation_flag():
    model = calibrate_ct(synth_inputs(I5, 100.0, 0.6, 0.8, 0.85, base=0.8))
    assert model.extrapolates(1.0)
    assert not model.extrapolates(0.8)


@st.composite
def ct_inputs(draw):
    lo = draw(st.integers(500, 3000))
    hi = draw(st.integers(lo + 50, 5000))
    grid = validate_grid([lo, hi])
    base = draw(st.sampled_from([1.0, 0.8]))
    probe = draw(st.floats(0.05, base - 0.05))
    cts = [draw(st.floats(1.0, 1e4)) for _ in range(4)]
    return CtCalibrationInputs(grid, *cts, base_cpu=base, probe_cpu=probe)


@given(ct_inputs())
def test_corner_exactness_property(inputs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CalibrationWarning)
        model = calibrate_ct(inputs)
    g = inputs.grid
    b, p = inputs.base_cpu, inputs.probe_cpu
    assert model.predict(b, g.f_max) == pytest.approx(inputs.ct_base_fmax, rel=1e-9)
    assert model.predict(b, g.f_min) == pytest.approx(inputs.ct_base_fmin, rel=1e-9)
    assert model.predict(p, g.f_max) == pytest.approx(inputs.ct_probe_fmax, rel=1e-9)
    assert model.predict(p, g.f_min) == pytest.approx(inputs.ct_probe_fmin, rel=1e-9)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 1), st.floats(0.01, 1))
def test_monotone(u, t_hi, t_lo, c1, c2):
    model = calibrate_ct(synth_inputs(I5, 60.0, u, t_hi, t_lo))
    lo, hi = sorted((c1, c2))
    for f in I5:
        assert model.predict(hi, f) <= model.predict(lo, f) * (1 + 1e-12)
    if t_lo >= t_hi:
        # frequency monotonicity also needs theta to grow (or hold) toward f_min
        for c in (lo, hi):
            values = [model.predict(c, f) for f in I5]
            assert all(b <= a * (1 + 1e-12) for a, b in zip(values, values[1:]))


def test_shrinking_theta_breaks_frequency_monotonicity():
    model = calibrate_ct(synth_inputs(I5, 60.0, 0.0, 1.0, 0.0))
    assert model.predict(0.5, I5.f_min) < model.predict(0.5, I5.f_max)


@given(st.floats(0.01, 1))
def test_separability(cpu):
    model = calibrate_ct(synth_inputs(I5, 58.0, 0.43, 0.71, 0.9))
    for f in I5:
        theta = model.theta(f)
        ratio = model.predict(cpu, f) / model.predict(1.0, f)
        assert ratio == pytest.approx(theta / cpu + 1 - theta, rel=1e-12)


@given(st.floats(0.01, 1))
def test_compute_bound_limit_matches_baseline(cpu):
    model = calibrate_ct(synth_inputs(I5, 57.0, 1.0, 1.0, 1.0))
    for f in I5:
        assert model.predict(cpu, f) == pytest.approx(petrucci_ct(57.0, cpu, f, I5), rel=1e-9)


def test_petrucci_ct_values():
    assert petrucci_ct(57.0, 1.0, 2926, I5) == 57.0
    assert petrucci_ct(57.0, 0.5, 2926, I5) == 114.0
    with pytest.raises(ZeroCpu):
        petrucci_ct(57.0, 0.0, 2926, I5)


def test_file_bound_gap():
    grid = validate_grid([1600, 3400])
    model = calibrate_ct(synth_inputs(grid, 100.0, 0.0, 0.5, 0.5))
    assert model.predict(1.0, 1600) == pytest.approx(100.0)
    assert petrucci_ct(100.0, 1.0, 1600, grid) == pytest.approx(100.0 * 3400 / 1600)


def test_petrucci_model_from_ct_model(randmem32):
    base = PetrucciCtModel.from_model(randmem32)
    assert base.calibration_points() == randmem32.calibration_points()
    assert base.predict(1.0, 2926) == randmem32.ct_base_fmax


def test_theta_slope_regression_table():
    """Regression over all ten reference thetas versus the two-endpoint approximation."""
    k, intercept, r2 = fit_theta_slope(list(RANDMEM32_THETAS), list(RANDMEM32_THETAS.values()), 2926)
    assert r2 == pytest.approx(0.978, abs=0.005)
    assert 0.12 <= k <= 0.132
    assert theta_slope(0.9, 0.71, 1197, 2926) == pytest.approx(0.1316, abs=1e-4)


def test_cputest_slope_near_zero():
    k, _, _ = fit_theta_slope(list(CPUTEST_THETAS), list(CPUTEST_THETAS.values()), 2926)
    assert abs(k) < 0.02


def test_inconsistent_k_rejected(randmem32):
    doc = randmem32.to_dict()
    doc["k"] = 0.5
    with pytest.raises(InputError):
        CompletionTimeModel.from_dict(doc)
