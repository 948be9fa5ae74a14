import pytest
from mpmath import mp

from expsumkit.numcore import PrecisionContext


def rel_err(approx, exact, prec=600):
    """|approx - exact| / |exact| as an mpf (absolute error if exact == 0).

    Runs at `prec` bits so ambient mp.prec never truncates the comparison;
    decimal strings are accepted and converted at that precision.
    """
    with mp.workprec(prec):
        a = mp.mpf(approx) if isinstance(approx, (str, int, float)) else approx
        e = mp.mpf(exact) if isinstance(exact, (str, int, float)) else exact
        d = abs(a - e)
        return d if e == 0 else d / abs(e)


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(128)


@pytest.fixture(scope="session")
def ctx64():
    return PrecisionContext(64)
