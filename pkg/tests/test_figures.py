import numpy as np

from tsdshap.figures import (
    save_correlation_figure,
    save_removal_curve_figure,
    save_values_figure,
)
from tsdshap.selection import RemovalCurve


def test_removal_curve_figure(tmp_path):
    curve = RemovalCurve(
        removed_counts=np.array([0, 5, 10]),
        dev_accuracies=np.array([0.7, 0.9, 0.6]),
        step=5,
        order=np.arange(15),
    )
    path = tmp_path / "curve.png"
    save_removal_curve_figure(curve, path)
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_values_figure(tmp_path, rng):
    path = tmp_path / "values.png"
    save_values_figure(rng.normal(size=100), path, title="spread")
    assert path.stat().st_size > 0


def test_correlation_figure_handles_undefined_cells(tmp_path):
    path = tmp_path / "corr.png"
    save_correlation_figure([(10.0, 0.9), (15.0, None), (20.0, -0.4)], "chains", path)
    assert path.stat().st_size > 0


def test_correlation_figure_all_undefined(tmp_path):
    path = tmp_path / "corr.png"
    save_correlation_figure([(10.0, None)], "chains", path)
    assert path.stat().st_size > 0
