import pytest

from sullivan_dgm import SemifreeCdga, SemifreeModule, standard_model


@pytest.fixture
def s2():
    return standard_model("even_sphere", 2)


@pytest.fixture
def hopf(s2):
    return SemifreeModule.parse(s2, [("e0", 0, "0"), ("e1", 1, "x2*e0")], name="hopf")


@pytest.fixture
def w3():
    return SemifreeCdga.free([("w", 3)], name="Lw3")


@pytest.fixture
def circle():
    return standard_model("circle")
