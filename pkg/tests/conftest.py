from fractions import Fraction

import pytest

import logitstab as L


@pytest.fixture(scope="session")
def triangle():
    return L.make_triangle()


@pytest.fixture(scope="session")
def triangle_table(triangle):
    return L.GameTable(triangle)


@pytest.fixture(scope="session")
def independent():
    return L.RevisionProcess.independent(Fraction(1, 2))


@pytest.fixture(scope="session")
def asynchronous():
    return L.RevisionProcess.asynchronous()
