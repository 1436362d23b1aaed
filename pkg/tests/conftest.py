from __future__ import annotations

import pathlib

import pytest

from goalbench import load_model

DATA_DIR = pathlib.Path(__file__).parent / "data"
GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def signage_path() -> pathlib.Path:
    return DATA_DIR / "signage.json"


@pytest.fixture(scope="session")
def signage(signage_path):
    return load_model(signage_path)


@pytest.fixture(scope="session")
def signage_nfr_path() -> pathlib.Path:
    return DATA_DIR / "signage_nfr.json"


@pytest.fixture(scope="session")
def signage_nfr(signage_nfr_path):
    return load_model(signage_nfr_path)


@pytest.fixture(scope="session")
def signage_mc_path() -> pathlib.Path:
    return DATA_DIR / "signage_mc.json"


@pytest.fixture(scope="session")
def signage_mc(signage_mc_path):
    return load_model(signage_mc_path)
