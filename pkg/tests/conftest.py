import pytest


@pytest.fixture(scope="session")
def flagship():
    """(h, class list to det 40, Ikeda coefficient table) for n=4, k=8."""
    from kmlift.liftkm import build_coeff_table, build_plus_eigenform
    from kmlift.quadforms import enumerate_classes
    h = build_plus_eigenform(8, 4, prec=260)
    cl = enumerate_classes(4, 40)
    table = build_coeff_table(cl, h, 8, 4)
    return h, cl, table


@pytest.fixture(scope="session")
def classlist16():
    from kmlift.quadforms import enumerate_classes
    return enumerate_classes(4, 16)
