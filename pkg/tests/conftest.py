import pytest

from mvmt import parse_language, two_element_algebra
from mvmt.fixtures import load_fixture_algebra, load_fixture_model


@pytest.fixture(scope="session")
def two():
    return load_fixture_algebra("two")


@pytest.fixture(scope="session")
def two_lattice():
    return load_fixture_algebra("two_lattice")


@pytest.fixture(scope="session")
def four_bool():
    return load_fixture_algebra("four_bool")


@pytest.fixture(scope="session")
def godel5():
    return load_fixture_algebra("godel5")


@pytest.fixture(scope="session")
def ul6():
    return load_fixture_algebra("ul6")


@pytest.fixture(scope="session")
def builtin_two():
    return two_element_algebra()


@pytest.fixture(scope="session")
def lang_rp():
    return parse_language("R:1 P:1")


@pytest.fixture(scope="session")
def lang_r():
    return parse_language("R:1")


@pytest.fixture(scope="session")
def prime_m1():
    return load_fixture_model("prime_m1")


@pytest.fixture(scope="session")
def prime_m2():
    return load_fixture_model("prime_m2")


@pytest.fixture(scope="session")
def ul_m1():
    return load_fixture_model("ul_m1")


@pytest.fixture(scope="session")
def ul_m2():
    return load_fixture_model("ul_m2")


@pytest.fixture(scope="session")
def cut_half():
    return load_fixture_model("cut_half")
