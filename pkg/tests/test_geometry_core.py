"""Tests for simplex and flag-simplex geometry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frenet_kit.core.exceptions import (
    DegenerateSimplexError,
    DimensionMismatchError,
    FlagMismatchError,
    NoPositiveStepError,
    NonPositiveScaleError,
    NotInSimplexError,
    OffAffineHullError,
    RankDeficiencyError,
    ValidationError,
)
from frenet_kit.models.geometry import FlagSimplex, Frame, Simplex
from frenet_kit.services.geometry_core import (
    barycentric,
    complete_frame,
    contains,
    find_flag_in_simplex,
    flag_membership,
    gram_schmidt,
    in_cone,
    in_relint,
    intersect_flags,
    intersect_flags_by_steps,
    max_step,
    project_onto_span,
    smallest_face,
)
from tests.strategies import (
    flag_simplices,
    frames,
    random_face_point,
    random_flag_pair,
    random_frame,
    random_simplex,
    simplex_faces,
)

SQRT2 = np.sqrt(2.0)


class TestProjection:
    def test_axis_projection(self):
        e1 = Frame.of([[1.0, 0.0]])
        np.testing.assert_allclose(project_onto_span([3.0, 4.0], e1), [3.0, 0.0])

    def test_empty_frame_projects_to_zero(self):
        np.testing.assert_allclose(project_onto_span([1.0, 1.0, 1.0], Frame.empty(3)), [0.0] * 3)

    def test_diagonal_projection(self):
        diag = Frame.of([[1 / SQRT2, 1 / SQRT2]])
        np.testing.assert_allclose(project_onto_span([1.0, 2.0], diag), [1.5, 1.5])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            project_onto_span([1.0, 2.0, 3.0], Frame.of([[1.0, 0.0]]))

    @given(frame=frames(), seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=50)
    def test_idempotent_and_orthogonal_remainder(self, frame, seed):
        v = np.random.default_rng(seed).normal(size=frame.dim)
        once = project_onto_span(v, frame)
        np.testing.assert_allclose(project_onto_span(once, frame), once, atol=1e-12)
        assert np.max(np.abs(frame.vectors @ (v - once))) <= 1e-9


class TestGramSchmidt:
    def test_triangular_input(self):
        frame = gram_schmidt([[2.0, 0.0], [1.0, 3.0]])
        np.testing.assert_allclose(frame.vectors, [[1.0, 0.0], [0.0, 1.0]], atol=1e-15)

    def test_dependent_input_names_index(self):
        with pytest.raises(RankDeficiencyError) as exc:
            gram_schmidt([[1.0, 0.0], [2.0, 0.0]])
        assert exc.value.index == 2
        assert exc.value.error_code == "RANK_DEFICIENT"

    def test_three_dimensional_example(self):
        frame = gram_schmidt([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
        expected = [
            [1 / SQRT2, 1 / SQRT2, 0.0],
            [-1 / np.sqrt(6), 1 / np.sqrt(6), 2 / np.sqrt(6)],
        ]
        np.testing.assert_allclose(frame.vectors, expected, atol=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**31 - 1), dim=st.integers(2, 5))
    @settings(max_examples=50)
    def test_flag_of_spans_is_preserved(self, seed, dim):
        rng = np.random.default_rng(seed)
        vectors = rng.normal(size=(dim, dim))
        frame = gram_schmidt(list(vectors))
        assert frame.orthonormality_error() <= 1e-12
        for j in range(1, dim + 1):
            prefix = frame.prefix(j)
            for v in vectors[:j]:
                residual = v - project_onto_span(v, prefix)
                assert np.linalg.norm(residual) <= 1e-9 * max(1.0, np.linalg.norm(v))

    def test_complete_frame_spans_space(self):
        full = complete_frame(Frame.of([[1 / SQRT2, 1 / SQRT2, 0.0]]))
        assert full.k == 3
        np.testing.assert_allclose(full.vectors[0], [1 / SQRT2, 1 / SQRT2, 0.0])
        assert full.orthonormality_error() <= 1e-12


class TestSimplexPredicates:
    def test_degenerate_simplex_rejected(self):
        with pytest.raises(DegenerateSimplexError):
            Simplex.of([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])

    @pytest.mark.parametrize(
        "point, weights",
        [
            ([0.0, 0.0], [1.0, 0.0, 0.0]),
            ([1 / 3, 1 / 3], [1 / 3, 1 / 3, 1 / 3]),
            ([0.5, 0.25], [0.25, 0.5, 0.25]),
        ],
    )
    def test_barycentric(self, unit_triangle, point, weights):
        np.testing.assert_allclose(barycentric(unit_triangle, point).weights, weights, atol=1e-12)

    def test_barycentric_off_hull(self):
        segment = Simplex.of([[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(OffAffineHullError):
            barycentric(segment, [0.5, 0.1])

    def test_contains(self, unit_triangle):
        assert contains(unit_triangle, [0.2, 0.2])
        assert not contains(unit_triangle, [0.8, 0.8])

    def test_smallest_face(self, unit_triangle):
        edge = smallest_face(unit_triangle, [0.5, 0.0])
        assert edge.same_vertices(Simplex.of([[0.0, 0.0], [1.0, 0.0]]))
        assert smallest_face(unit_triangle, [1 / 3, 1 / 3]).same_vertices(unit_triangle)
        assert smallest_face(unit_triangle, [0.0, 1.0]).same_vertices(Simplex.of([[0.0, 1.0]]))

    def test_smallest_face_outside(self, unit_triangle):
        with pytest.raises(NotInSimplexError):
            smallest_face(unit_triangle, [1.0, 1.0])

    def test_in_relint(self):
        segment = Simplex.of([[0.0, 0.0], [1.0, 0.0]])
        assert in_relint(segment, [0.5, 0.0])
        assert not in_relint(segment, [0.0, 0.0])
        assert not in_relint(segment, [0.5, 0.1])

    def test_in_cone(self, unit_triangle):
        assert in_cone(unit_triangle, [0.0, 0.0], [2.0, 2.0])
        assert not in_cone(unit_triangle, [0.0, 0.0], [-1.0, 0.0])
        for y in ([-5.0, 3.0], [0.25, -7.0], [0.25, 0.25]):
            assert in_cone(unit_triangle, [0.25, 0.25], y)

    def test_in_cone_requires_member(self, unit_triangle):
        with pytest.raises(NotInSimplexError):
            in_cone(unit_triangle, [2.0, 2.0], [0.0, 0.0])

    def test_max_step(self, unit_triangle):
        assert max_step(unit_triangle, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)
        diagonal = np.array([1.0, 1.0]) / SQRT2
        assert max_step(unit_triangle, [0.0, 0.0], diagonal) == pytest.approx(SQRT2 / 2)
        assert max_step(unit_triangle, [1.0, 0.0], [1.0, 0.0]) == 0.0

    def test_max_step_leaving_hull(self):
        segment = Simplex.of([[0.0, 0.0], [1.0, 0.0]])
        assert max_step(segment, [0.5, 0.0], [0.0, 1.0]) == 0.0

    def test_max_step_zero_direction(self, unit_triangle):
        with pytest.raises(ValidationError):
            max_step(unit_triangle, [0.1, 0.1], [0.0, 0.0])

    def test_max_step_lands_on_boundary(self, rng):
        for _ in range(50):
            T = random_simplex(rng, 3)
            z = rng.dirichlet(np.ones(4)) @ T.vertices
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            eta = max_step(T, z, u)
            assert contains(T, z + eta * u, tol_bary=1e-9)
            assert not contains(T, z + 1.01 * eta * u + 1e-6 * u, tol_bary=1e-9)


class TestFacesAndCones:
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1), dim=st.integers(1, 3))
    @settings(max_examples=100, deadline=None)
    def test_simplex_through_a_face_lies_in_it(self, seed, dim):
        rng = np.random.default_rng(seed)
        T = random_simplex(rng, dim)
        points = []
        for _ in range(int(rng.integers(1, dim + 2))):
            support = rng.choice(dim + 1, size=int(rng.integers(1, dim + 2)), replace=False)
            points.append(random_face_point(rng, T.vertices[support], low=0.1))
        # z is in the relative interior of conv(points), F the face of T it meets
        z = random_face_point(rng, np.array(points), low=0.1)
        F = smallest_face(T, z)
        for p in points:
            assert contains(F, p, tol_bary=1e-9)

    @given(case=simplex_faces(dim=3), seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=100, deadline=None)
    def test_cone_at_face_point_splits(self, case, seed):
        T, face = case
        rng = np.random.default_rng(seed)
        F = T.vertices[face]
        x = random_face_point(rng, F, low=0.1)
        y = random_face_point(rng, F)
        coeffs = rng.normal(size=face.size)
        coeffs += (1.0 - coeffs.sum()) / face.size
        a = coeffs @ F
        c = y + rng.uniform(0.1, 5.0) * (random_face_point(rng, T.vertices) - y)
        assert in_relint(T.face(face), x)
        assert in_cone(T, y, c)
        assert in_cone(T, x, a + c - y)


class TestFlagMembership:
    def test_examples(self, unit_flag):
        assert flag_membership(unit_flag, [1.0, 1.0])
        assert not flag_membership(unit_flag, [0.5, 0.6])
        assert flag_membership(unit_flag, [0.5, 0.25])

    def test_nonpositive_scale_rejected(self):
        with pytest.raises(NonPositiveScaleError):
            FlagSimplex(base=[0.0, 0.0], frame=Frame.of([[1.0, 0.0]]), scales=[0.0])

    def test_facet_of_one_level_flag_is_base(self):
        flag = FlagSimplex(base=[1.0, 2.0], frame=Frame.of([[1.0, 0.0]]), scales=[1.0])
        facet = flag.facet()
        assert facet.k == 0
        assert flag_membership(facet, [1.0, 2.0])
        assert not flag_membership(facet, [1.5, 2.0])

    @given(flag=flag_simplices(), seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_agrees_with_barycentric_membership(self, flag, seed):
        rng = np.random.default_rng(seed)
        simplex = flag.as_simplex()
        coeffs = rng.uniform(-0.2, 1.2, size=(1000, flag.k)) * flag.scales.sum()
        points = flag.base + coeffs @ flag.frame.vectors
        if flag.k < flag.dim:
            off = rng.normal(size=(1000, flag.dim)) * 1e-3
            points[::2] += off[::2]
        for p in points:
            assert flag_membership(flag, p, tol=1e-9) == contains(simplex, p, tol_bary=1e-9)


class TestFlagIntersection:
    def test_idempotent(self, unit_flag):
        np.testing.assert_allclose(intersect_flags(unit_flag, unit_flag).scales, [1.0, 1.0])

    def test_planar_example(self, unit_flag):
        other = FlagSimplex(base=unit_flag.base, frame=unit_flag.frame, scales=[2.0, 0.5])
        np.testing.assert_allclose(intersect_flags(unit_flag, other).scales, [1.0, 0.25])
        np.testing.assert_allclose(intersect_flags_by_steps(unit_flag, other).scales, [1.0, 0.25])

    def test_spatial_example(self):
        frame = Frame.of(np.eye(3))
        A = FlagSimplex(base=[0.0, 0.0, 0.0], frame=frame, scales=[1.0, 2.0, 1.0])
        B = FlagSimplex(base=[0.0, 0.0, 0.0], frame=frame, scales=[2.0, 1.0, 3.0])
        nu = intersect_flags(A, B).scales
        np.testing.assert_allclose(nu, [1.0, 0.5, 0.25])
        np.testing.assert_allclose(intersect_flags_by_steps(A, B).scales, nu, atol=1e-12)

    def test_mismatched_lengths(self, unit_flag):
        other = FlagSimplex(base=[0.0, 0.0], frame=Frame.of([[1.0, 0.0]]), scales=[1.0])
        with pytest.raises(FlagMismatchError):
            intersect_flags(unit_flag, other)

    def test_mismatched_base(self, unit_flag):
        other = FlagSimplex(base=[0.1, 0.0], frame=unit_flag.frame, scales=[1.0, 1.0])
        with pytest.raises(FlagMismatchError):
            intersect_flags(unit_flag, other)

    def test_closed_form_matches_step_recursion(self):
        rng = np.random.default_rng(33)
        for _ in range(100):
            dim = int(rng.integers(1, 5))
            k = int(rng.integers(1, min(dim, 3) + 1))
            A, B = random_flag_pair(rng, dim, k)
            nu = intersect_flags(A, B)
            np.testing.assert_allclose(
                intersect_flags_by_steps(A, B).scales, nu.scales, rtol=0, atol=1e-9
            )
            for vertex in nu.vertices:
                assert flag_membership(A, vertex, tol=1e-9)
                assert flag_membership(B, vertex, tol=1e-9)
            for t in range(k):
                inflated = nu.scales.copy()
                inflated[t] *= 1.01
                bigger = FlagSimplex(base=nu.base, frame=nu.frame, scales=inflated)
                assert any(
                    not (flag_membership(A, v, tol=1e-9) and flag_membership(B, v, tol=1e-9))
                    for v in bigger.vertices
                )


class TestFindFlag:
    def test_single_level(self, unit_triangle):
        flag = find_flag_in_simplex(unit_triangle, [0.0, 0.0], Frame.of([[1.0, 0.0]]))
        np.testing.assert_allclose(flag.scales, [0.5])

    def test_two_levels(self, unit_triangle):
        flag = find_flag_in_simplex(unit_triangle, [0.0, 0.0], Frame.of([[1.0, 0.0], [0.0, 1.0]]))
        np.testing.assert_allclose(flag.scales, [0.5, 0.25])

    def test_direction_leaving_hull(self):
        segment = Simplex.of([[0.0, 0.0], [1.0, 0.0]])
        with pytest.raises(NoPositiveStepError) as exc:
            find_flag_in_simplex(segment, [0.0, 0.0], Frame.of([[0.0, 1.0]]))
        assert exc.value.level == 1
        assert "no positive step at level 1" in exc.value.message.lower()

    def test_base_outside(self, unit_triangle):
        with pytest.raises(NotInSimplexError):
            find_flag_in_simplex(unit_triangle, [1.0, 1.0], Frame.of([[1.0, 0.0]]))

    def test_flags_stay_inside(self):
        rng = np.random.default_rng(34)
        for _ in range(100):
            dim = int(rng.integers(1, 4))
            T = random_simplex(rng, dim)
            weights = rng.dirichlet(np.ones(dim + 1))
            weights[rng.integers(0, dim + 1)] = 0.0
            weights /= weights.sum()
            x = weights @ T.vertices
            inner = rng.dirichlet(np.ones(dim + 1), size=dim) @ T.vertices
            k = int(rng.integers(1, dim + 1))
            u = gram_schmidt(list(inner[:k] - x))
            flag = find_flag_in_simplex(T, x, u)
            for vertex in flag.vertices:
                assert contains(T, vertex, tol_bary=1e-9)

    def test_flags_along_face_convergent_sequences(self):
        rng = np.random.default_rng(35)
        built = 0
        for _ in range(150):
            dim = int(rng.integers(2, 4))
            T = random_simplex(rng, dim)
            face = np.sort(rng.choice(dim + 1, size=int(rng.integers(2, dim + 2)), replace=False))
            F = T.face(face)
            x = random_face_point(rng, T.vertices[face[: int(rng.integers(1, face.size))]])
            k = int(rng.integers(1, face.size))
            targets = []
            for _ in range(k):
                support = rng.choice(face, size=int(rng.integers(1, face.size + 1)), replace=False)
                targets.append(random_face_point(rng, T.vertices[support], low=0.1))
            edges = np.array(targets) - x
            if np.linalg.matrix_rank(edges) < k:
                continue
            # x + s e_1 + s^2 e_2 + ... stays in F and has frame gram_schmidt(e)
            for s in 2.0 ** -np.arange(1, 12):
                assert contains(F, x + sum(s ** (j + 1) * e for j, e in enumerate(edges)), tol_bary=1e-9)
            u = gram_schmidt(list(edges))
            flag = find_flag_in_simplex(T, x, u)
            z = x
            for scale, direction in zip(flag.scales, u):
                assert scale == pytest.approx(max_step(T, z, direction) / 2.0, rel=1e-12)
                z = z + scale * direction
            for vertex in flag.vertices:
                assert contains(F, vertex, tol_bary=1e-9)
            built += 1
        assert built >= 75

    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_interior_base_accepts_any_frame(self, seed):
        rng = np.random.default_rng(seed)
        T = random_simplex(rng, 3)
        x = rng.dirichlet(np.ones(4) * 5) @ T.vertices
        flag = find_flag_in_simplex(T, x, random_frame(rng, 3, 3))
        assert all(contains(T, v) for v in flag.vertices)
