"""Tests for directions, phantom, ray tracing and problem assembly."""

import numpy as np
import pytest

from tvreg.tomo import (
    PRESETS,
    ProjectionGeometry,
    TestProblem,
    add_noise,
    build_system_matrix,
    chord_length,
    detector_basis,
    generate_test_problem,
    get_preset,
    lebedev_directions,
    lebedev_rule,
    load_problem_source,
    shepp_logan_3d,
    trace_ray,
)


class TestLebedev:
    @pytest.mark.parametrize("n_points", [26, 74])
    def test_rule_integrates_low_moments(self, n_points):
        points, weights = lebedev_rule(n_points)
        assert points.shape == (n_points, 3)
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)
        for axis in range(3):
            assert weights @ points[:, axis] ** 2 == pytest.approx(1 / 3, rel=1e-12)

    @pytest.mark.parametrize("n_proj", [13, 37])
    def test_directions_are_antipodally_unique(self, n_proj):
        d = lebedev_directions(n_proj)
        assert d.shape == (n_proj, 3)
        np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0, rtol=0, atol=1e-14)
        cosines = np.abs(d @ d.T)
        np.fill_diagonal(cosines, 0.0)
        assert cosines.max() < 1.0 - 1e-9

    def test_deterministic_order(self):
        np.testing.assert_array_equal(lebedev_directions(37), lebedev_directions(37))

    def test_unsupported_count(self):
        with pytest.raises(ValueError, match="unsupported"):
            lebedev_directions(12)
        with pytest.raises(ValueError, match="unsupported"):
            lebedev_rule(50)


class TestPhantom:
    def test_single_voxel(self):
        v = shepp_logan_3d(1, 1, 1)
        assert v.data.tolist() == [0.2]

    def test_value_set_on_full_grid(self):
        v = shepp_logan_3d(43, 43, 43)
        assert v.dims == (43, 43, 43)
        assert set(np.unique(v.data).tolist()) == {0.0, 0.2, 0.3, 1.0}

    def test_values_in_box(self):
        v = shepp_logan_3d(8, 9, 10)
        assert v.data.min() >= 0.0
        assert v.data.max() <= 1.0

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            shepp_logan_3d(0, 4, 4)


class TestGeometry:
    def test_detector_basis_orthonormal(self):
        for d in lebedev_directions(37):
            u, v = detector_basis(d)
            frame = np.stack([d, u, v])
            np.testing.assert_allclose(frame @ frame.T, np.eye(3), atol=1e-14)

    def test_origins_centred_on_cube(self):
        geometry = ProjectionGeometry.for_grid(lebedev_directions(13), 5, (4, 4, 4))
        assert geometry.pixel_pitch == 0.25
        origins = geometry.ray_origins(0)
        assert origins.shape == (25, 3)
        np.testing.assert_allclose(origins.mean(axis=0), [0.5, 0.5, 0.5], atol=1e-14)

    def test_detector_width_override(self):
        geometry = ProjectionGeometry.for_grid(lebedev_directions(13), 4, (4, 4, 4), 2.0)
        assert geometry.pixel_pitch == 0.5

    def test_rejects_antipodal_directions(self):
        d = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        with pytest.raises(ValueError, match="antipodal"):
            ProjectionGeometry(directions=d, p=3, pixel_pitch=0.1)

    def test_rejects_non_unit_directions(self):
        with pytest.raises(ValueError, match="unit"):
            ProjectionGeometry(directions=np.array([[2.0, 0.0, 0.0]]), p=3, pixel_pitch=0.1)

    def test_manifest_round_trip(self, tmp_path):
        geometry = ProjectionGeometry.for_grid(lebedev_directions(37), 7, (5, 6, 7))
        path = tmp_path / "geometry.txt"
        geometry.write_manifest(path)
        lines = path.read_text().splitlines()
        assert len(lines) == 38
        loaded = ProjectionGeometry.read_manifest(path)
        assert loaded.p == 7
        assert loaded.pixel_pitch == geometry.pixel_pitch
        np.testing.assert_array_equal(loaded.directions, geometry.directions)


class TestRayTracing:
    def test_axis_aligned_ray(self):
        cols, lengths = trace_ray((4, 1, 1), [-1.0, 0.5, 0.5], [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(cols, [0, 1, 2, 3])
        np.testing.assert_allclose(lengths, 0.25)

    def test_missing_ray(self):
        cols, lengths = trace_ray((3, 3, 3), [2.0, 2.0, 2.0], [1.0, 0.0, 0.0])
        assert cols.size == 0
        assert lengths.size == 0
        assert chord_length([2.0, 2.0, 2.0], [1.0, 0.0, 0.0]) == 0.0

    def test_main_diagonal(self):
        d = np.ones(3) / np.sqrt(3.0)
        cols, lengths = trace_ray((3, 3, 3), [0.0, 0.0, 0.0], d)
        np.testing.assert_array_equal(cols, [0, 13, 26])
        np.testing.assert_allclose(lengths, np.sqrt(3.0) / 3)

    def test_chord_conservation(self):
        rng = np.random.default_rng(2024)
        dims = (7, 5, 6)
        worst = 0.0
        for _ in range(10_000):
            d = rng.standard_normal(3)
            d /= np.linalg.norm(d)
            origin = rng.uniform(-0.2, 1.2, 3)
            cols, lengths = trace_ray(dims, origin, d)
            assert np.all(np.diff(cols) > 0)
            worst = max(worst, abs(lengths.sum() - chord_length(origin, d)))
        assert worst <= 1e-10


class TestAssembly:
    def test_rows_match_chord_lengths(self, tiny_tomo):
        spec = tiny_tomo.spec
        geometry = ProjectionGeometry.for_grid(lebedev_directions(spec.n_proj), spec.p, spec.dims)
        expected = []
        for index, d in enumerate(geometry.directions):
            for origin in geometry.ray_origins(index):
                if trace_ray(spec.dims, origin, d)[0].size:
                    expected.append(chord_length(origin, d))
        row_sums = tiny_tomo.A.csr @ np.ones(tiny_tomo.A.cols)
        assert tiny_tomo.A.rows == len(expected)
        np.testing.assert_allclose(row_sums, expected, rtol=0, atol=1e-10)

    def test_no_zero_rows(self, tiny_tomo):
        assert np.all(np.diff(tiny_tomo.A.indptr) > 0)
        assert tiny_tomo.A.cols == 125
        assert tiny_tomo.A.rows <= 13 * 7 * 7

    def test_thread_count_does_not_change_matrix(self):
        geometry = ProjectionGeometry.for_grid(lebedev_directions(13), 5, (4, 4, 4))
        A1 = build_system_matrix(geometry, (4, 4, 4), threads=1)
        A4 = build_system_matrix(geometry, (4, 4, 4), threads=4)
        np.testing.assert_array_equal(A1.indptr, A4.indptr)
        np.testing.assert_array_equal(A1.indices, A4.indices)
        np.testing.assert_array_equal(A1.values, A4.values)


class TestNoise:
    def test_exact_relative_level(self, rng):
        b = rng.uniform(size=500)
        noisy = add_noise(b, 0.01, seed=0)
        assert np.linalg.norm(noisy - b) / np.linalg.norm(b) == pytest.approx(0.01, rel=1e-12)

    def test_seeded(self, rng):
        b = rng.uniform(size=50)
        np.testing.assert_array_equal(add_noise(b, 0.05, seed=3), add_noise(b, 0.05, seed=3))

    def test_zero_level_copies(self):
        b = np.ones(4)
        noisy = add_noise(b, 0.0)
        np.testing.assert_array_equal(noisy, b)
        assert noisy is not b

    def test_invalid(self):
        with pytest.raises(ValueError):
            add_noise(np.ones(3), -0.1)
        with pytest.raises(ValueError):
            add_noise(np.zeros(3), 0.01)


class TestProblemBundle:
    def test_tiny_problem_noise(self, tiny_tomo):
        clean = tiny_tomo.A.csr @ tiny_tomo.x_exact.data
        rel = np.linalg.norm(tiny_tomo.b - clean) / np.linalg.norm(clean)
        assert rel == pytest.approx(0.01, rel=1e-10)

    def test_save_and_load(self, tiny_tomo, tmp_path):
        path = tmp_path / "tiny.npz"
        tiny_tomo.save(path)
        loaded = TestProblem.load(path)
        assert loaded.spec == tiny_tomo.spec
        np.testing.assert_array_equal(loaded.A.to_dense(), tiny_tomo.A.to_dense())
        np.testing.assert_array_equal(loaded.b, tiny_tomo.b)
        np.testing.assert_array_equal(loaded.x_exact.data, tiny_tomo.x_exact.data)
        assert load_problem_source(str(path)).spec == tiny_tomo.spec

    def test_generation_is_deterministic(self, tiny_tomo):
        again = generate_test_problem(tiny_tomo.spec)
        np.testing.assert_array_equal(again.b, tiny_tomo.b)

    def test_warm_start_dimension(self, tiny_tomo):
        assert tiny_tomo.warm_start().shape == (125,)

    def test_unknown_source(self):
        with pytest.raises(ValueError, match="neither a preset"):
            load_problem_source("no-such-problem.npz")

    def test_seed_selects_preset_noise(self):
        first = load_problem_source("T2-desk")
        second = load_problem_source("T2-desk", seed=1)
        assert (first.spec.seed, second.spec.seed) == (0, 1)
        np.testing.assert_array_equal(first.A.indices, second.A.indices)
        assert not np.array_equal(first.b, second.b)

    def test_bundle_noise_is_fixed(self, tiny_tomo, tmp_path):
        path = tmp_path / "tiny.npz"
        tiny_tomo.save(path)
        assert load_problem_source(str(path), seed=0).spec.seed == 0
        with pytest.raises(ValueError, match="noise seed 0, not 5"):
            load_problem_source(str(path), seed=5)


class TestPresets:
    def test_preset_shapes(self):
        assert get_preset("T1").dims == (43, 43, 43)
        assert get_preset("T1").n_proj == 37
        assert get_preset("T2").n_proj == 13
        assert get_preset("T2-desk").dims == (21, 21, 21)
        assert all(spec.noise == 0.01 for spec in PRESETS.values())

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="unknown preset"):
            get_preset("T3")


@pytest.mark.slow
@pytest.mark.parametrize("name, rows", [("T1", 99529), ("T2", 33937)])
def test_full_scale_dimensions(name, rows):
    problem = generate_test_problem(get_preset(name))
    assert (problem.A.rows, problem.A.cols) == (rows, 79507)
    assert (problem.spec.dims, problem.spec.p) == ((43, 43, 43), 63)


@pytest.mark.parametrize("name", ["T1-desk", "T2-desk"])
def test_desk_dimensions(name):
    spec = get_preset(name)
    geometry = ProjectionGeometry.for_grid(lebedev_directions(spec.n_proj), spec.p, spec.dims)
    hits = sum(
        chord_length(origin, d) > 0.0
        for index, d in enumerate(geometry.directions)
        for origin in geometry.ray_origins(index)
    )
    A = build_system_matrix(geometry, spec.dims)
    assert A.cols == 21**3
    assert A.rows == hits
    assert hits < spec.n_proj * 31 * 31
