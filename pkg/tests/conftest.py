"""Shared fixtures: small complexes with known homology"""

import math

import numpy as np
import pytest

from cyclewalk.core.chains import Chain, boundary, chain_from_simplices
from cyclewalk.core.complex import SimplicialComplex, build_rips, build_torus_triangulation
from cyclewalk.core.torus_lab import torus_basis_cycles


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance checks (deselect with -m 'not slow')")


def strip_ring(m: int, inner_radius: float = 1.0, outer_radius: float = 2.0) -> SimplicialComplex:
    """
    Annulus made of one strip of 2m triangles.

    Outer polygon: vertices 0..m-1, inner polygon: m..2m-1. Every triangle
    has exactly two lower-adjacent neighbours.
    """
    triangles = []
    for i in range(m):
        j = (i + 1) % m
        triangles.append((i, j, m + i))
        triangles.append((j, m + j, m + i))
    angles = 2.0 * math.pi * (np.arange(m) + 0.5) / m
    ring = np.column_stack([np.cos(angles), np.sin(angles)])
    coordinates = np.vstack([outer_radius * ring, inner_radius * ring])
    return SimplicialComplex.from_simplices(triangles, coordinates=coordinates)


def polygon_cycle(complex_: SimplicialComplex, vertices) -> Chain:
    """Oriented cycle v0 -> v1 -> ... -> v0"""
    vertices = list(vertices)
    return chain_from_simplices(
        complex_, [((a, b), 1) for a, b in zip(vertices, vertices[1:] + vertices[:1])]
    )


def grid_complex(width: int, height: int, holes=()) -> SimplicialComplex:
    """Unit squares split along their diagonal; squares listed in ``holes`` stay empty"""
    def vid(x, y):
        return y * (width + 1) + x

    triangles = []
    for y in range(height):
        for x in range(width):
            if (x, y) in holes:
                continue
            a, b, c, d = vid(x, y), vid(x + 1, y), vid(x + 1, y + 1), vid(x, y + 1)
            triangles.append((a, b, c))
            triangles.append((a, c, d))
    coordinates = np.array([(x, y) for y in range(height + 1) for x in range(width + 1)], dtype=float)
    return SimplicialComplex.from_simplices(triangles, coordinates=coordinates)


def annulus_cloud() -> np.ndarray:
    """
    100 points on three staggered rings (radii 1, 1.25, 1.5; 26, 33, 41
    points). Neighbours on a ring are about 0.24 apart, so Rips at R = 0.18
    fills the band between rings and leaves the unit hole open.
    """
    rings = []
    for radius, count, offset in ((1.0, 26, 0.0), (1.25, 33, 0.3), (1.5, 41, 0.6)):
        angles = 2.0 * math.pi * (np.arange(count) + offset) / count
        rings.append(radius * np.column_stack([np.cos(angles), np.sin(angles)]))
    return np.vstack(rings)


RIPS_ANNULUS_RADIUS = 0.18


def triangle_boundary(complex_: SimplicialComplex, tau_id: int) -> Chain:
    return boundary(complex_, Chain(2, {tau_id: 1}))


def random_cycle(complex_: SimplicialComplex, rng: np.random.Generator, cycles, spread: int = 2) -> Chain:
    """Random integer combination of the given cycles and of triangle boundaries"""
    total = Chain(1)
    for cycle in cycles:
        total = total + int(rng.integers(-spread, spread + 1)) * cycle
    for tau_id in rng.choice(complex_.n_simplices(2), size=min(4, complex_.n_simplices(2)), replace=False):
        total = total + int(rng.integers(-spread, spread + 1)) * triangle_boundary(complex_, int(tau_id))
    return total


@pytest.fixture
def four_gon():
    coordinates = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return SimplicialComplex.from_simplices([(0, 1), (1, 2), (2, 3), (0, 3)], coordinates=coordinates)


@pytest.fixture
def filled_triangle():
    coordinates = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]])
    return SimplicialComplex.from_simplices([(0, 1, 2)], coordinates=coordinates)


@pytest.fixture
def tetrahedron_boundary():
    return SimplicialComplex.from_simplices([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


@pytest.fixture
def annulus():
    return strip_ring(8)


@pytest.fixture
def annulus_hole(annulus):
    """Inner polygon, counter-clockwise"""
    return polygon_cycle(annulus, range(8, 16))


@pytest.fixture
def small_annulus():
    return strip_ring(3)


@pytest.fixture
def small_annulus_hole(small_annulus):
    return polygon_cycle(small_annulus, range(3, 6))


@pytest.fixture
def two_holes():
    """6 x 3 grid with the squares (1, 1) and (4, 1) left empty"""
    return grid_complex(6, 3, holes={(1, 1), (4, 1)})


@pytest.fixture
def filled_disk():
    return grid_complex(2, 2)


@pytest.fixture
def small_graph():
    """Triangle 0-1-2 with a pendant vertex 3 attached to 2; no 2-simplices"""
    return SimplicialComplex.from_simplices([(0, 1), (1, 2), (0, 2), (2, 3)])


@pytest.fixture(scope="session")
def rips_annulus():
    return build_rips(annulus_cloud(), RIPS_ANNULUS_RADIUS, max_dim=2)


@pytest.fixture(scope="session")
def torus4():
    return build_torus_triangulation(4)


@pytest.fixture(scope="session")
def torus4_cycles(torus4):
    return torus_basis_cycles(torus4)
