import numpy as np
import pytest

from mediated_persuasion import GameSpec, PiecewiseUtility, load_fixture

RANKED_PAIR = (
    np.array([[9 / 10, 1 / 100], [1 / 10, 99 / 100]]),
    np.array([[2 / 3, 1 / 4], [1 / 3, 3 / 4]]),
)
UNRANKED_PAIR = (
    np.array([[2 / 3, 1 / 3], [1 / 3, 2 / 3]]),
    np.array([[4 / 5, 1 / 2], [1 / 5, 1 / 2]]),
)


def random_garbling(rng, lo=0.05, hi=0.95, min_det=0.05):
    """Full-rank 2x2 garbling with entries away from the simplex corners."""
    while True:
        s1, s2 = rng.uniform(lo, hi, size=2)
        if abs(s1 - s2) >= min_det:
            return np.array([[s1, s2], [1.0 - s1, 1.0 - s2]])


def random_experiment(rng):
    x, y = rng.uniform(0.0, 1.0, size=2)
    return np.array([[x, y], [1.0 - x, 1.0 - y]])


@pytest.fixture(scope="session")
def kg_game() -> GameSpec:
    return load_fixture("kg").game


@pytest.fixture(scope="session")
def fig19_game() -> GameSpec:
    return load_fixture("fig19").game


@pytest.fixture(scope="session")
def fig20_game() -> GameSpec:
    return load_fixture("fig20").game


@pytest.fixture(scope="session")
def fig22_game() -> GameSpec:
    return load_fixture("fig22").game


def concave_pwl(rng, curvature=(4.0, 12.0), nodes=64) -> PiecewiseUtility:
    """Fine piecewise-linear sample of a strictly concave function."""
    a = rng.uniform(*curvature)
    c = rng.uniform(0.25, 0.75)
    d = rng.uniform(0.0, 1.0)
    xs = np.linspace(0.0, 1.0, nodes)
    ys = d - a * (xs - c) ** 2
    return PiecewiseUtility.from_points(list(zip(xs, ys)))


def convex_pwl(rng, curvature=(4.0, 12.0), nodes=64) -> PiecewiseUtility:
    a = rng.uniform(*curvature)
    c = rng.uniform(0.25, 0.75)
    xs = np.linspace(0.0, 1.0, nodes)
    ys = a * (xs - c) ** 2
    return PiecewiseUtility.from_points(list(zip(xs, ys)))


def random_pwl(rng, n_nodes=5, lo=0.0, hi=1.0) -> PiecewiseUtility:
    xs = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 0.9, n_nodes - 2)), [1.0]])
    ys = rng.uniform(lo, hi, size=xs.size)
    return PiecewiseUtility.from_points(list(zip(xs, ys)))
