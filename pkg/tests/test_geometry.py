import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admissible.errors import GeometryError
from admissible.geometry import (
    Ellipsoid,
    GraphDomain,
    UnitBall,
    boundary_frame,
    delta_xi,
    graph_d,
    householder_frames,
    nearest_boundary_point,
    project_complex_normal,
)

B2 = UnitBall(2)


def test_ball_nearest_point_radial():
    xi, delta = nearest_boundary_point(B2, [0.5, 0])
    assert np.allclose(xi, [1, 0]) and delta == pytest.approx(0.5)
    xi, delta = nearest_boundary_point(B2, np.array([0.6, 0.8]) * 0.9)
    assert np.allclose(xi, [0.6, 0.8]) and delta == pytest.approx(0.1)


def test_ball_centre_is_singular():
    with pytest.raises(GeometryError):
        nearest_boundary_point(B2, [0, 0])


def test_paraboloid_nearest_point_against_grid():
    D = GraphDomain.paraboloid(2, 0.25)
    xi, delta = nearest_boundary_point(D, [0.1, 0])
    # dense boundary grid: points (psi(s) + i y1, x2 + i y2)
    g = np.linspace(-1, 1, 81)
    y1, x2, y2 = np.meshgrid(g, g, g, indexing="ij")
    pts = np.stack([0.25 * (y1**2 + x2**2 + y2**2) + 1j * y1, x2 + 1j * y2], axis=-1).reshape(-1, 2)
    brute = np.min(np.linalg.norm(pts - np.array([0.1, 0]), axis=1))
    assert delta <= brute + 1e-6
    assert delta == pytest.approx(0.1, abs=1e-9)
    assert abs(float(D.defining(xi))) < 1e-10


def test_ellipsoid_nearest_point_deep_interior():
    D = Ellipsoid([1.0, 2.0])
    z = np.array([0.05 + 0.02j, 0.3j])
    xi, delta = nearest_boundary_point(D, z)
    rng = np.random.default_rng(0)
    w = rng.normal(size=(200_000, 4))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    pts = np.stack([w[:, 0] + 1j * w[:, 1], 2 * (w[:, 2] + 1j * w[:, 3])], axis=1)
    assert delta <= np.min(np.linalg.norm(pts - z, axis=1)) + 1e-9
    assert abs(np.linalg.norm(xi - z) - delta) < 1e-12


def test_batched_nearest_points_match_scalar():
    D = GraphDomain.paraboloid(2, 0.25)
    rng = np.random.default_rng(3)
    z = np.stack([rng.uniform(0.05, 0.2, 20) + 1j * rng.uniform(-0.2, 0.2, 20),
                  rng.uniform(-0.2, 0.2, 20) + 1j * rng.uniform(-0.2, 0.2, 20)], axis=1)
    xi, delta = nearest_boundary_point(D, z)
    for k in range(5):
        x1, d1 = nearest_boundary_point(D, z[k])
        assert np.allclose(x1, xi[k], atol=1e-10) and d1 == pytest.approx(delta[k], abs=1e-12)


def test_identity_and_swap_frames():
    assert np.allclose(boundary_frame(B2, [1, 0]).matrix, np.eye(2))
    F = boundary_frame(B2, [0, 1])
    assert np.allclose(F.matrix[:, 0], [0, 1])
    assert np.allclose(F.matrix @ F.matrix.conj().T, np.eye(2), atol=1e-12)


def test_frame_rejects_interior_vertex():
    with pytest.raises(GeometryError):
        boundary_frame(B2, [0.5, 0])


def test_complex_vertex_frame_unitary():
    xi = np.array([1, 1j]) / np.sqrt(2)
    U = boundary_frame(B2, xi).matrix
    assert np.allclose(U[:, 0], xi)
    assert np.max(np.abs(U @ U.conj().T - np.eye(2))) < 1e-12


unit = st.lists(st.floats(-1, 1, allow_nan=False), min_size=6, max_size=6).filter(
    lambda v: np.linalg.norm(v) > 1e-3)


@given(unit)
def test_householder_frames_unitary(v):
    nu = np.array(v[:3]) + 1j * np.array(v[3:])
    nu = nu / np.linalg.norm(nu)
    U = householder_frames(nu)
    assert np.allclose(U @ U.conj().T, np.eye(3), atol=1e-12)
    assert np.allclose(U[:, 0], nu, atol=1e-12)


def test_delta_xi_oracle():
    assert delta_xi(B2, [1, 0], [0.9, 0.2]) == pytest.approx(1 - np.sqrt(0.85))


def test_graph_d_oracles():
    D = GraphDomain.paraboloid(2, 0.25)
    z = np.array([0.2 + 0j, np.sqrt(0.4)])
    assert graph_d(D, [0, 0], z) == pytest.approx(0.1)
    assert graph_d(B2, [1, 0], [0.9, 0]) == pytest.approx(0.1, abs=1e-9)


def test_graph_d_outside_chart():
    with pytest.raises(GeometryError):
        graph_d(B2, [1, 0], [0.1, 0.9])
    assert np.isnan(graph_d(B2, [1, 0], [0.1, 0.9], strict=False))


def test_project_complex_normal():
    F = boundary_frame(B2, [1, 0])
    assert np.allclose(project_complex_normal(F, [0.9, 0.3]), [0.9, 0])


@settings(max_examples=50)
@given(st.lists(st.floats(-0.7, 0.7, allow_nan=False), min_size=4, max_size=4))
def test_projection_idempotent(v):
    F = boundary_frame(B2, np.array([0.6, 0.8j]))
    z = np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])
    p = project_complex_normal(F, z)
    assert np.allclose(project_complex_normal(F, p), p, atol=1e-12)


def test_vertex_coordinates_round_trip():
    F = boundary_frame(B2, np.array([0.6, 0.8]))
    z = np.array([0.3 + 0.1j, 0.2 - 0.4j])
    assert np.allclose(F.from_vertex(F.to_vertex(z)), z)
    # inward normal is the positive first vertex coordinate
    assert F.to_vertex(0.9 * F.vertex)[0].real == pytest.approx(0.1)


def test_graph_from_text_and_dimension():
    D = GraphDomain.from_text("(z1^2 + z2^2 + z3^2)/4", 2)
    assert D.dim == 2
    assert D.contains(np.array([0.5, 0.1]))
    assert not D.contains(np.array([-0.1, 0]))
