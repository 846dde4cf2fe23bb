import numpy as np
import pytest

import cstrd


def test_scores_from_counts():
    p, r, f = cstrd.scores_from_counts(21, 0, 1)
    assert round(p, 2) == 1.00 and round(r, 2) == 0.95 and round(f, 2) == 0.98
    assert cstrd.scores_from_counts(0, 0, 5) == (0.0, 0.0, 0.0)


def test_generate_is_deterministic():
    radii = cstrd.random_radii(6, 180, 3)
    a = cstrd.generate_disk(radii, seed=5, size=400, crack=True)
    b = cstrd.generate_disk(radii, seed=5, size=400, crack=True)
    assert a[0].shape == (400, 400, 3) and a[0].dtype == np.uint8
    assert np.array_equal(a[0], b[0])
    assert len(a[1]) == 6 and len(a[1][0]) == 720


def test_detect_recovers_clean_disk():
    radii = cstrd.random_radii(8, 280, 11)
    image, gt, cy, cx = cstrd.generate_disk(radii, seed=11, size=640)
    rings, timings = cstrd.detect(image, cy, cx)
    assert len(rings) == 8
    assert all(len(r) == 360 for r in rings)
    assert "edge_detection" in timings
    report = cstrd.evaluate(rings, gt, cy, cx, 640, 640)
    assert report["F"] == 1.0
    assert report["RMSE"] < 1.5


def test_evaluate_identity():
    _, gt, cy, cx = cstrd.generate_disk([40.0, 80.0, 120.0], size=300)
    report = cstrd.evaluate(gt, gt, cy, cx, 300, 300)
    assert report["F"] == 1.0 and report["RMSE"] == 0.0


def test_bad_inputs_raise():
    with pytest.raises(ValueError):
        cstrd.generate_disk([50.0, 40.0], size=300)
    with pytest.raises(ValueError):
        cstrd.detect(np.zeros((50, 50, 3), np.uint8), 100.0, 10.0)
