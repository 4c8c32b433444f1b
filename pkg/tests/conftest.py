"""
Shared fixtures: the hand-written instances in tests/fixtures.
"""

import os
import sys

import pytest

# Add the repository root to the path so the flat modules import
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from ingestion.ingest_instance import load_instance  # noqa: E402

FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES_DIR, name)


@pytest.fixture
def ex1():
    """A_1={1,2}, A_2={3,4}, E={(1,3)}."""
    inst, _ = load_instance(fixture_path('ex1.json'))
    return inst


@pytest.fixture
def qap2():
    """The 2x2 assignment polytope: rows {1,2},{3,4}, columns {1,3},{2,4}; E={(1,4)}."""
    inst, _ = load_instance(fixture_path('qap2.json'))
    return inst


@pytest.fixture
def ex1_full():
    inst, _ = load_instance(fixture_path('ex1_full.json'))
    return inst
