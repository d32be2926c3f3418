"""Shared fixtures, hypothesis profiles and the random game generator."""

import os
from typing import Optional

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nashforge.core.game import symmetrized_game
from nashforge.core.models import Perturbation, Player, QpNepGame
from nashforge.data.loader import load_fixture, load_fixture_direction

settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile(
    "thorough", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("quick", max_examples=5, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))


def random_game(seed: int, N: Optional[int] = None, max_n: int = 2, max_m: int = 2,
                scale: float = 2.0, integer: bool = False) -> QpNepGame:
    """
    Random QP game with entries in [-scale, scale].

    Player k gets 1..max_n variables and 0..max_m inequality rows; ``integer``
    rounds the data so that degenerate configurations come up often.
    """
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 4)) if N is None else N
    dims = [int(rng.integers(1, max_n + 1)) for _ in range(N)]
    n = sum(dims)

    def draw(*shape):
        arr = rng.uniform(-scale, scale, size=shape)
        return np.round(arr) if integer else arr

    players = []
    for nk in dims:
        mk = int(rng.integers(0, max_m + 1))
        P = draw(n, n)
        players.append(Player(nk, P + P.T, draw(n), draw(mk, nk), draw(mk), 0))
    return symmetrized_game(players)


@pytest.fixture(params=["EX31", "EX32", "EX61", "EX62"])
def fixture_game(request):
    return request.param, load_fixture(request.param)


@pytest.fixture
def ex31():
    return load_fixture("EX31")


@pytest.fixture
def ex32():
    return load_fixture("EX32")


@pytest.fixture
def ex61():
    return load_fixture("EX61")


@pytest.fixture
def ex62():
    return load_fixture("EX62")


@pytest.fixture
def ex61_direction():
    return load_fixture_direction("EX61")


@pytest.fixture
def ex62_direction():
    return load_fixture_direction("EX62")


@pytest.fixture
def zero():
    """Factory for the zero perturbation of a game."""
    return Perturbation.zero


def single_player(P, A=None, b=None, c=None, num_eq: int = 0) -> QpNepGame:
    """One-player game helper."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    n = P.shape[0]
    A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
    b = np.zeros(A.shape[0]) if b is None else np.asarray(b, dtype=float)
    c = np.zeros(n) if c is None else np.asarray(c, dtype=float)
    return QpNepGame((Player(n, P, c, A, b, num_eq),))
