import pytest

from fhsoftedge.painleve import PainleveParams, solve_sigma


@pytest.fixture(scope="session")
def sigma_cache():
    cache = {}

    def get(alpha, omega, s_min=-10.0, s_max=8.0):
        key = (alpha, complex(omega), s_min, s_max)
        if key not in cache:
            cache[key] = solve_sigma(PainleveParams(alpha, omega), s_min, s_max)
        return cache[key]

    return get
