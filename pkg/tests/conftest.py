import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gamemetrics.corpus import NAMES, builtin_game, random_game

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def corpus():
    return {name: builtin_game(name).game for name in NAMES}


def make_random_game(seed, **kw):
    return random_game(np.random.default_rng(seed), **kw)
