"""Tests for Frenet frame estimation and curve sampling."""

import time

import numpy as np
import pytest

from frenet_kit.core.config import EstimatorSettings
from frenet_kit.core.exceptions import (
    DimensionMismatchError,
    InvalidSampleError,
    RankDeficiencyError,
    ValidationError,
)
from frenet_kit.core.utils import angle_between, random_rotation
from frenet_kit.models.geometry import Frame
from frenet_kit.models.sequence import (
    CurveKind,
    CurveSpec,
    LevelStatus,
    PointSequence,
    SamplePhase,
    SamplePlan,
)
from frenet_kit.services.frame_estimator import (
    classical_frame,
    curve_derivatives,
    estimate_frame,
    residual,
    sample_curve,
    sample_parameters,
)

CUBIC = CurveSpec(kind=CurveKind.CUBIC, dim=2)
HELIX = CurveSpec(kind=CurveKind.HELIX, dim=3)
SIN2 = CurveSpec(kind=CurveKind.SIN2, dim=2)


def cubic_sequence(count: int = 20) -> PointSequence:
    return sample_curve(CUBIC, SamplePlan(t0=0.0, t_start=0.5, ratio=0.5, count=count))


def sin2_sequence(phase: SamplePhase, count: int = 24) -> PointSequence:
    return sample_curve(SIN2, SamplePlan(t0=0.0, t_start=0.1, ratio=0.5, count=count, phase=phase))


class TestResidual:
    def test_examples(self):
        e1 = Frame.of([[1.0, 0.0]])
        np.testing.assert_allclose(residual([1.0, 1.0], [0.0, 0.0], e1), [0.0, 1.0])
        np.testing.assert_allclose(residual([2.0, 0.0], [0.0, 0.0], e1), [0.0, 0.0])
        e2 = Frame.of([[0.0, 1.0, 0.0]])
        np.testing.assert_allclose(residual([1.0, 2.0, 3.0], [1.0, 0.0, 0.0], e2), [0.0, 0.0, 3.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            residual([1.0, 2.0, 3.0], [0.0, 0.0], Frame.of([[1.0, 0.0]]))


class TestEstimateFrame:
    def test_cubic_converges_where_classical_frame_fails(self):
        with pytest.raises(RankDeficiencyError) as exc:
            classical_frame(curve_derivatives(CUBIC, 0.0, 2))
        assert exc.value.index == 2

        estimate = estimate_frame(cubic_sequence(), 2)
        assert estimate.statuses == [LevelStatus.CONVERGED, LevelStatus.CONVERGED]
        np.testing.assert_allclose(estimate.frame.vectors, [[1.0, 0.0], [0.0, 1.0]], atol=1e-6)

    def test_on_axis_sequence_hits_residual_floor(self):
        n = np.arange(1, 41, dtype=float)
        seq = PointSequence(base=[0.0, 0.0], points=np.column_stack([1.0 / n, np.zeros_like(n)]))
        estimate = estimate_frame(seq, 2)
        assert estimate.k == 1
        np.testing.assert_allclose(estimate.frame[0], [1.0, 0.0], atol=1e-12)
        assert estimate.statuses == [LevelStatus.CONVERGED, LevelStatus.RESIDUAL_FLOOR]

    def test_helix_matches_classical_frame(self):
        plan = SamplePlan(t0=0.0, t_start=0.25, ratio=0.5, count=30)
        start = time.perf_counter()
        estimate = estimate_frame(sample_curve(HELIX, plan), 3)
        elapsed = time.perf_counter() - start
        classical = classical_frame(curve_derivatives(HELIX, 0.0, 3))
        assert estimate.k == 3
        for u, v in zip(estimate.frame, classical):
            assert angle_between(u, v) < 1e-3
        assert elapsed < 1.0

    @pytest.mark.parametrize("t0", [0.3, 1.0, 2.0])
    def test_helix_away_from_zero(self, t0):
        plan = SamplePlan(t0=t0, t_start=t0 + 0.25, ratio=0.5, count=30)
        estimate = estimate_frame(sample_curve(HELIX, plan), 3)
        classical = classical_frame(curve_derivatives(HELIX, t0, 3))
        assert estimate.statuses[0] is LevelStatus.CONVERGED
        assert not estimate.diverged
        assert angle_between(estimate.frame[0], classical[0]) < 1e-4
        for u, v in zip(estimate.frame, classical):
            assert angle_between(u, v) < 1e-3
        # base coordinates cos(t0), sin(t0) cancel against the samples, so the
        # third level drowns in rounding before its tail settles
        assert estimate.k < 3

    def test_helix_classical_frame_example(self):
        derivatives = curve_derivatives(HELIX, 0.0, 2)
        np.testing.assert_allclose(derivatives, [[0.0, 1.0, 1.0], [-1.0, 0.0, 0.0]], atol=1e-15)
        frame = classical_frame(derivatives)
        np.testing.assert_allclose(
            frame.vectors, [[0.0, 1 / np.sqrt(2), 1 / np.sqrt(2)], [-1.0, 0.0, 0.0]], atol=1e-12
        )

    def test_single_vector_classical_frame(self):
        np.testing.assert_allclose(classical_frame([[3.0, 4.0]]).vectors, [[0.6, 0.8]])

    @pytest.mark.parametrize("phase, expected", [(SamplePhase.PEAKS, 1.0), (SamplePhase.TROUGHS, -1.0)])
    def test_sin2_phases_give_opposite_second_vectors(self, phase, expected):
        estimate = estimate_frame(sin2_sequence(phase), 2)
        assert estimate.k == 2
        np.testing.assert_allclose(estimate.frame[0], [1.0, 0.0], atol=1e-6)
        np.testing.assert_allclose(estimate.frame[1], [0.0, expected], atol=1e-6)

    def test_sin2_mixed_phase_diverges(self):
        estimate = estimate_frame(sin2_sequence(SamplePhase.MIXED), 2)
        assert estimate.k == 1
        assert estimate.statuses == [LevelStatus.CONVERGED, LevelStatus.DIVERGED]
        assert estimate.diverged
        witnesses = estimate.levels[1].witnesses
        assert witnesses is not None
        assert angle_between(witnesses[0], witnesses[1]) > 0.5
        assert {round(float(w[1])) for w in witnesses} == {-1, 1}

    def test_level_one_is_unit(self):
        estimate = estimate_frame(cubic_sequence(), 1)
        assert abs(np.linalg.norm(estimate.frame[0]) - 1.0) <= 1e-9

    def test_no_level_after_failure(self):
        estimate = estimate_frame(sin2_sequence(SamplePhase.MIXED), 2)
        converged = [lvl.level for lvl in estimate.levels if lvl.status is LevelStatus.CONVERGED]
        assert converged == list(range(1, estimate.k + 1))
        assert len(estimate.levels) <= 2

    def test_subsequence_stability(self):
        seq = cubic_sequence(40)
        full = estimate_frame(seq, 2)
        half = estimate_frame(seq.subsequence(range(0, len(seq), 2)), 2)
        assert full.k == half.k == 2
        for u, v in zip(full.frame, half.frame):
            assert angle_between(u, v) <= 1e-4

    def test_rigid_motion_of_planar_curve(self):
        rng = np.random.default_rng(7)
        seq = cubic_sequence()
        reference = estimate_frame(seq, 2)
        for _ in range(50):
            R = random_rotation(2, rng)
            shift = rng.uniform(-0.2, 0.2, size=2)
            moved = PointSequence(base=R @ seq.base + shift, points=seq.points @ R.T + shift)
            estimate = estimate_frame(moved, 2)
            assert estimate.k == 2
            np.testing.assert_allclose(
                estimate.frame.vectors, reference.frame.vectors @ R.T, atol=1e-9
            )

    def test_rotated_helix_keeps_tangent(self):
        rng = np.random.default_rng(8)
        seq = sample_curve(HELIX, SamplePlan(t0=0.0, t_start=0.25, ratio=0.5, count=30))
        reference = estimate_frame(seq, 1)
        for _ in range(50):
            R = random_rotation(3, rng)
            moved = PointSequence(base=R @ seq.base, points=seq.points @ R.T)
            estimate = estimate_frame(moved, 1)
            assert angle_between(estimate.frame[0], R @ reference.frame[0]) < 1e-5

    def test_scaling_invariance(self):
        rng = np.random.default_rng(9)
        seq = cubic_sequence()
        reference = estimate_frame(seq, 2)
        for exponent in rng.integers(-12, 13, size=50):
            factor = 2.0 ** int(exponent)
            scaled = PointSequence(base=seq.base * factor, points=seq.points * factor)
            estimate = estimate_frame(scaled, 2)
            assert estimate.statuses == reference.statuses
            np.testing.assert_allclose(estimate.frame.vectors, reference.frame.vectors, atol=1e-12)

    def test_point_equal_to_base_rejected(self):
        seq = PointSequence(
            base=[0.0, 0.0], points=[[1.0, 0.0], [0.5, 0.0], [0.0, 0.0], [0.2, 0.0], [0.1, 0.0]]
        )
        with pytest.raises(InvalidSampleError):
            estimate_frame(seq, 1)

    def test_window_larger_than_sequence(self):
        seq = PointSequence(base=[0.0, 0.0], points=[[1.0, 0.0], [0.5, 0.0], [0.25, 0.0]])
        with pytest.raises(InvalidSampleError):
            estimate_frame(seq, 1, EstimatorSettings(window=5))

    def test_k_max_out_of_range(self):
        with pytest.raises(ValidationError):
            estimate_frame(cubic_sequence(), 3)

    def test_non_monotone_distances_only_warn(self, caplog):
        seq = cubic_sequence()
        points = seq.points.copy()
        points[[-1, -2]] = points[[-2, -1]]
        shuffled = PointSequence(base=seq.base, points=points)
        with caplog.at_level("WARNING"):
            estimate = estimate_frame(shuffled, 1)
        assert estimate.k == 1
        assert "not decreasing" in caplog.text


class TestSampling:
    def test_cubic_points(self):
        seq = sample_curve(CUBIC, SamplePlan(t0=0.0, t_start=0.5, ratio=0.5, count=5))
        t = 0.5 ** np.arange(1, 6)
        np.testing.assert_allclose(seq.points, np.column_stack([t, t**3]))
        np.testing.assert_allclose(seq.base, [0.0, 0.0])

    def test_helix_base_and_count(self):
        seq = sample_curve(HELIX, SamplePlan(t0=0.0, t_start=0.25, ratio=0.5, count=10))
        assert len(seq) == 10
        np.testing.assert_allclose(seq.base, [1.0, 0.0, 0.0])
        t = 0.25 * 0.5 ** np.arange(10)
        np.testing.assert_allclose(seq.points, np.column_stack([np.cos(t), np.sin(t), t]))

    def test_polynomial_parabola(self):
        spec = CurveSpec(kind=CurveKind.POLYNOMIAL, dim=2, coefficients=[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        seq = sample_curve(spec, SamplePlan(t0=0.0, t_start=0.5, ratio=0.5, count=5))
        np.testing.assert_allclose(seq.points[:, 1], seq.points[:, 0] ** 2)

    def test_polynomial_rows_must_match_dimension(self):
        with pytest.raises(InvalidSampleError):
            CurveSpec(kind=CurveKind.POLYNOMIAL, dim=3, coefficients=[[0.0, 1.0], [0.0, 0.0, 1.0]])

    def test_ragged_rows_are_padded(self):
        spec = CurveSpec(kind=CurveKind.POLYNOMIAL, dim=2, coefficients=[[0.0, 1.0], [0.0, 0.0, 1.0]])
        assert spec.coefficients.shape == (2, 3)
        np.testing.assert_allclose(spec.coefficients[0], [0.0, 1.0, 0.0])
        seq = sample_curve(spec, SamplePlan(t0=0.0, t_start=0.5, ratio=0.5, count=5))
        np.testing.assert_allclose(seq.points[:, 1], seq.points[:, 0] ** 2)

    @pytest.mark.parametrize(
        "rows",
        [[[0.0, "a"]], [[0.0, 1.0], [[0.0], [1.0]]], [], [[0.0, None]]],
    )
    def test_non_numeric_rows_are_rejected(self, rows):
        with pytest.raises(InvalidSampleError):
            CurveSpec(kind=CurveKind.POLYNOMIAL, dim=max(len(rows), 1), coefficients=rows)

    def test_builtin_dimension_is_fixed(self):
        with pytest.raises(InvalidSampleError):
            CurveSpec(kind=CurveKind.HELIX, dim=2)

    @pytest.mark.parametrize(
        "kwargs",
        [{"ratio": 1.0}, {"ratio": 0.0}, {"count": 2}, {"t_start": 0.0}],
    )
    def test_invalid_plans(self, kwargs):
        with pytest.raises(InvalidSampleError):
            SamplePlan(**kwargs)

    def test_phase_parameters(self):
        peaks = sample_parameters(SIN2, SamplePlan(t_start=0.1, count=6, phase=SamplePhase.PEAKS))
        troughs = sample_parameters(SIN2, SamplePlan(t_start=0.1, count=6, phase=SamplePhase.TROUGHS))
        np.testing.assert_allclose(np.sin(1.0 / peaks), 1.0, atol=1e-9)
        np.testing.assert_allclose(np.sin(1.0 / troughs), -1.0, atol=1e-9)
        assert np.all(np.diff(peaks) < 0)
        mixed = sample_parameters(SIN2, SamplePlan(t_start=0.1, count=6, phase=SamplePhase.MIXED))
        np.testing.assert_allclose(np.sin(1.0 / mixed), [1, -1, 1, -1, 1, -1], atol=1e-9)

    def test_phase_needs_sin2(self):
        with pytest.raises(InvalidSampleError):
            sample_parameters(CUBIC, SamplePlan(phase=SamplePhase.PEAKS))

    def test_sin2_derivatives_at_zero(self):
        np.testing.assert_allclose(curve_derivatives(SIN2, 0.0, 1)[0], [1.0, 0.0])
        with pytest.raises(InvalidSampleError):
            curve_derivatives(SIN2, 0.0, 2)
