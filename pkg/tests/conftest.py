"""
Pytest configuration and fixtures for odesc tests.
"""

import json
import os
from fractions import Fraction

import pytest

# Keep test runs quiet and independent of a developer's .env
os.environ["ODESC_LOG"] = "warning"
os.environ["ODESC_THREADS"] = "1"

from dynamics.escape import HoleSystem, RadiusSchedule  # noqa: E402
from dynamics.interval import IntervalHole, build_solenoid, tent_map  # noqa: E402
from dynamics.odometer import parse_point  # noqa: E402
from dynamics.radix import RadixSpec  # noqa: E402


@pytest.fixture
def dyadic():
    return RadixSpec.constant(2)


@pytest.fixture
def halving():
    """rho_n = 2^-n."""
    return RadiusSchedule.geometric(1, Fraction(1, 2))


@pytest.fixture
def dyadic_system(dyadic, halving):
    """Two holes on the dyadic machine: zeros and the alternating point 1,0,1,0,..."""
    return HoleSystem(
        dyadic,
        (parse_point("digits:|0", dyadic), parse_point("digits:1,0", dyadic)),
        (halving, halving),
    )


@pytest.fixture
def tent():
    return tent_map()


@pytest.fixture
def tent_holes():
    """Holes at 2/5 and 2/7 with rho_n = (1/10) 2^-n."""
    schedule = RadiusSchedule.geometric(Fraction(1, 10), Fraction(1, 2))
    return [IntervalHole(Fraction(2, 5), schedule), IntervalHole(Fraction(2, 7), schedule)]


@pytest.fixture
def doubling_solenoid(dyadic):
    return build_solenoid(dyadic, 3)


@pytest.fixture
def simulate_config():
    """The dyadic two-hole system as a config document."""
    return {
        "system": "odometer",
        "action": "simulate",
        "spec": "2",
        "holes": [
            {"center": "digits:|0", "schedule": {"form": "geometric", "c": "1", "lambda": "1/2"}},
            {"center": "digits:1,0", "schedule": {"form": "geometric", "c": "1", "lambda": "1/2"}},
        ],
        "params": {"n_max": 6, "point": "digits:1,0,0,1,0,0|0"},
    }


@pytest.fixture
def write_config(tmp_path):
    """Write a config document to a temp file and return its path."""

    def _write(data, name="config.json"):
        path = tmp_path / name
        if isinstance(data, str):
            path.write_text(data)
        else:
            path.write_text(json.dumps(data))
        return path

    return _write
