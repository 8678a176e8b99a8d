"""
Pytest configuration and fixtures for nonfgraph tests.

Groups are session-scoped: they are immutable apart from their caches, and
sharing them keeps the lattice and class computations from being repeated.
"""

import pytest

from nonfgraph.core.logging import setup_logging
from nonfgraph.groups.constructors import cyclic_group, direct_product
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.services.families import (
    alternating,
    construct_family,
    corpus,
    elementary_abelian,
    example1_inner,
    generalized_quaternion,
    symmetric,
)


@pytest.fixture(scope="session", autouse=True)
def quiet_logging() -> None:
    """
    Keep loguru at WARNING for the test session.
    """
    setup_logging("WARNING")


@pytest.fixture(scope="session")
def c6() -> FiniteGroup:
    return cyclic_group(6)


@pytest.fixture(scope="session")
def sym3() -> FiniteGroup:
    """
    Sym(3) from the generators (0 1) and (0 1 2), at indices 1 and 2.
    """
    return symmetric(3)


@pytest.fixture(scope="session")
def q8() -> FiniteGroup:
    return generalized_quaternion(8)


@pytest.fixture(scope="session")
def alt4() -> FiniteGroup:
    return alternating(4)


@pytest.fixture(scope="session")
def klein() -> FiniteGroup:
    """
    C2 x C2.
    """
    return elementary_abelian(2, 2)


@pytest.fixture(scope="session")
def sym4() -> FiniteGroup:
    return symmetric(4)


@pytest.fixture(scope="session")
def c8xc8() -> FiniteGroup:
    return direct_product(cyclic_group(8), cyclic_group(8))


@pytest.fixture(scope="session")
def c30() -> FiniteGroup:
    return cyclic_group(30)


@pytest.fixture(scope="session")
def inner_example() -> FiniteGroup:
    """
    (V1 x V2 x V3) x| Q8 over GF(3), order 5832.
    """
    return example1_inner(3)


@pytest.fixture(scope="session")
def example2_group() -> FiniteGroup:
    """
    The order-75264 worked example. Only requested by tests marked slow.
    """
    return construct_family("example2")


@pytest.fixture(scope="session")
def small_corpus() -> list[tuple[str, FiniteGroup]]:
    """
    The corpus up to order 16.
    """
    return list(corpus(16))
