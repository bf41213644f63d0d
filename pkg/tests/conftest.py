from __future__ import annotations

import pathlib

import pytest

from matchlog import parse_program

_HERE = pathlib.Path(__file__).parent
PROGRAMS = _HERE / "programs"
GOLDEN = _HERE / "golden"


def load_program(name: str):
    return parse_program((PROGRAMS / name).read_text(encoding="utf-8"))


def golden(name: str) -> str:
    return (GOLDEN / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def listnat():
    return load_program("listnat.lp")


@pytest.fixture(scope="session")
def listnat_plus():
    return load_program("listnat_plus.lp")


@pytest.fixture(scope="session")
def gc():
    return load_program("gc.lp")


@pytest.fixture(scope="session")
def bad():
    return load_program("bad.lp")


@pytest.fixture(scope="session")
def ex33():
    return load_program("ex33.lp")
