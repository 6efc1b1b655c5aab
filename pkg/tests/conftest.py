import os

import pytest
from hypothesis import HealthCheck, settings

from driftcert.chain_model import build_builtin, spec_from_document

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def banded(offsets, boundary_rows=None, down=None, up=None, name="test_chain", constants=None):
    """Ad-hoc banded chain from offset -> probability-expression mapping."""
    rows = boundary_rows or {}
    doc = {
        "name": name,
        "banded_rule": {"cutoff": len(rows), "offsets": offsets},
        "boundary_rows": rows,
        "down_bound": down,
        "up_bound": up,
    }
    if constants:
        doc["constants"] = constants
    return spec_from_document(doc)


@pytest.fixture(scope="session")
def sit_still1():
    return build_builtin("sit_still", {"k": 1})


@pytest.fixture(scope="session")
def lopsided12():
    return build_builtin("lopsided", {"m": 1, "n": 2})


@pytest.fixture(scope="session")
def powerlaw075():
    return build_builtin("powerlaw_transient", {"alpha": 0.75})


@pytest.fixture(scope="session")
def ergodic_drift():
    return build_builtin("ergodic_drift")


@pytest.fixture(scope="session")
def ergodic_zero():
    return build_builtin("ergodic_zero_drift")


ALL_BUILTINS = [
    ("ergodic_drift", {}),
    ("sit_still", {"k": 1}),
    ("sit_still", {"k": 2}),
    ("sit_still", {"k": 3}),
    ("lopsided", {"m": 1, "n": 2}),
    ("lopsided", {"m": 2, "n": 3}),
    ("lopsided", {"m": 3, "n": 5}),
    ("ergodic_zero_drift", {}),
    ("birth_death", {"p": "1/2 + 1/(2*(i+1))"}),
    ("birth_death", {"p": "1/3", "q": "2/3"}),
    ("powerlaw_transient", {"alpha": 0.6}),
    ("powerlaw_transient", {"alpha": 0.75}),
    ("powerlaw_transient", {"alpha": 0.9}),
]


def raw_chain(offsets, boundary_rows=(), down=None, up=None):
    """Banded chain built without construction-time validation, so that
    invalid rows can be exercised through ``validate_row``."""
    from driftcert.chain_model import BandedRule, ChainSpec

    return ChainSpec("raw", BandedRule(offsets), len(boundary_rows), tuple(boundary_rows), down, up)
