"""Estimator-API wrappers: params, pipelines, validation."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline

import motordse as m
from motordse.detector import InductionMotorFaultDetector, ParkTransformer

from conftest import default_scenario


@pytest.fixture(scope="module")
def ag_matrix():
    sc = default_scenario(
        fault=m.FaultSpec(kind=m.FaultKind.LINE_GROUND, phases=("a",),
                          t_on=5.0, t_off=5.25),
    )
    rec = m.run_scenario(sc)
    x = rec.measurement_matrix()
    return x[(x[:, 0] >= 4.5) & (x[:, 0] <= 5.6)]


def test_get_set_params_round_trip():
    det = InductionMotorFaultDetector(window=7, p_threshold=0.9)
    params = det.get_params()
    assert params["window"] == 7 and params["p_threshold"] == 0.9
    det.set_params(stride=2)
    assert det.stride == 2
    cloned = clone(det)
    assert cloned.get_params() == det.get_params()


def test_detector_requires_fit():
    det = InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR)
    with pytest.raises(NotFittedError):
        det.predict(np.zeros((10, 9)))


def test_predict_labels_fault_windows(ag_matrix):
    det = InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR).fit()
    labels = det.predict(ag_matrix)
    results = det.detect(ag_matrix)
    assert len(labels) == len(results)
    # faulted labels exactly where p >= threshold
    expect = np.where([r.p >= det.p_threshold for r in results], -1, 1)
    assert np.array_equal(labels, expect)
    # at least one window fully inside the fault interval is flagged
    inside = [lab for lab, r in zip(labels, results)
              if r.t_start >= 5.0 and r.t_end < 5.25]
    assert -1 in inside
    # windows entirely before the fault stay healthy
    before = [lab for lab, r in zip(labels, results) if r.t_end < 5.0]
    assert set(before) == {1}


def test_decision_function_sign_convention(ag_matrix):
    det = InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR).fit()
    scores = det.decision_function(ag_matrix)
    labels = det.predict(ag_matrix)
    assert np.all((scores > 0) == (labels == 1))
    assert np.array_equal(det.score_samples(ag_matrix),
                          scores - det.p_threshold)


def test_default_motor_used_when_unset():
    det = InductionMotorFaultDetector().fit()
    assert det.motor_ == m.DEFAULT_MOTOR


def test_pipeline_composition(ag_matrix):
    pipe = Pipeline([
        ("dq", ParkTransformer(frequency=60.0, theta0=0.0)),
        ("dse", InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR,
                                            input_frame="dq")),
    ])
    pipe.fit(ag_matrix)
    labels = pipe.predict(ag_matrix)
    direct = InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR).fit()
    assert np.array_equal(labels, direct.predict(ag_matrix))


def test_park_transformer_round_trip(ag_matrix):
    pt = ParkTransformer(60.0, 0.0)
    dq = pt.fit_transform(ag_matrix)
    back = pt.inverse_transform(dq)
    assert np.max(np.abs(back - ag_matrix)) < 1e-9 * np.max(np.abs(ag_matrix))
    # torque and speed columns pass through untouched
    assert np.array_equal(dq[:, 7], ag_matrix[:, 7])
    assert np.array_equal(dq[:, 8], ag_matrix[:, 8])


def test_input_validation_messages():
    det = InductionMotorFaultDetector(motor=m.DEFAULT_MOTOR).fit()
    with pytest.raises(ValueError, match="9 columns"):
        det.predict(np.zeros((10, 4)))
    bad = np.zeros((10, 9))
    bad[:, 0] = np.arange(10) * 0.01
    bad[3, 5] = np.inf
    with pytest.raises(ValueError, match="'ib'"):
        det.predict(bad)
    ragged = np.zeros((10, 9))
    ragged[:, 0] = np.arange(10) ** 1.5
    with pytest.raises(ValueError, match="uniform"):
        det.predict(ragged)


def test_invalid_input_frame_rejected():
    with pytest.raises(ValueError, match="input_frame"):
        InductionMotorFaultDetector(input_frame="alpha-beta").fit()
