"""Tests for the precision context, AGM elliptic constants, and Newton solver.

Reference values were generated independently with mpmath's own ellipk /
ellipe / lambertw at 40 significant digits (parameter convention m = k^2),
then frozen here; the library under test never calls those functions.
"""

import pytest
from mpmath import mp

from expsumkit.numcore import (
    DomainError,
    NumericalError,
    PrecisionContext,
    agm_bundle,
    elliptic_e,
    newton_root,
)
from conftest import rel_err

# r -> (K(k), K(r), E(k), E(r), q), k = sqrt(1 - r^2), 33 digits
ELLIPTIC_REF = {
    1: ("2.15651564749964323543867499880032",
        "1.68575035481259604287120365779908",
        "1.21105602756845952480356289954898",
        "1.46746220933942715545979526699092",
        "0.0857957337021947665168404533201366"),
    4: ("4.16197436780004954278464595976846",
        "1.57233368731670658232953521220933",
        "1.00715507596618859526500050549869",
        "1.56926122065336244969256629393599",
        "0.305181608505571162817120597893837"),
    10: ("8.31776791141166998944494969127548",
         "1.57079670130212581298273705935041",
         "1.00000372780263612540057637348526",
         "1.570795952287801359736671238042",
         "0.552509543623015500572550919283117"),
}


class TestPrecisionContext:
    def test_eps_is_two_to_minus_bits(self):
        ctx = PrecisionContext(100)
        assert ctx.eps == mp.mpf(2) ** -100

    def test_sig_digits_from_bits(self):
        assert PrecisionContext(128).sig_digits == 39  # ceil(128*log10(2))
        assert PrecisionContext(64).sig_digits == 20

    def test_rejects_too_few_bits(self):
        with pytest.raises(DomainError):
            PrecisionContext(32)

    def test_workprec_scopes_mp_precision(self):
        ctx = PrecisionContext(200)
        before = mp.prec
        with ctx.workprec():
            assert mp.prec == 200
        assert mp.prec == before


@pytest.mark.parametrize("rexp", sorted(ELLIPTIC_REF))
def test_agm_bundle_matches_reference(rexp, ctx128):
    r = mp.mpf(2) ** -rexp
    b = agm_bundle(r, ctx128)
    kk, kr, ek, er, q = ELLIPTIC_REF[rexp]
    tol = mp.mpf(2) ** -105  # refs carry 33 digits ~ 109 bits
    assert rel_err(b.K, kk) < tol
    assert rel_err(b.Kr, kr) < tol
    assert rel_err(b.E, ek) < tol
    assert rel_err(b.Er, er) < tol
    assert rel_err(b.q, q) < tol
    with mp.workprec(200):
        assert rel_err(b.k, mp.sqrt(1 - r * r)) < mp.mpf(2) ** -140


@pytest.mark.parametrize("rexp", [1, 10])
def test_agm_bundle_legendre_relation(rexp, ctx128):
    # E(k)K(r) + E(r)K(k) - K(k)K(r) = pi/2 exactly.
    b = agm_bundle(mp.mpf(2) ** -rexp, ctx128)
    with ctx128.workprec():
        resid = b.E * b.Kr + b.Er * b.K - b.K * b.Kr - mp.pi / 2
    assert abs(resid) < mp.mpf(2) ** -120


def test_agm_bundle_high_precision(ctx128):
    # The same identities must keep holding at several hundred bits.
    ctx = PrecisionContext(320)
    b = agm_bundle(mp.mpf(2) ** -6, ctx)
    with ctx.workprec():
        resid = b.E * b.Kr + b.Er * b.K - b.K * b.Kr - mp.pi / 2
        q_alt = mp.exp(-mp.pi * b.Kr / b.K)
    assert abs(resid) < mp.mpf(2) ** -300
    assert rel_err(b.q, q_alt) < mp.mpf(2) ** -300


@pytest.mark.parametrize("bad_r", ["0", "1", "-0.25", "1.5"])
def test_agm_bundle_domain(bad_r, ctx128):
    with pytest.raises(DomainError):
        agm_bundle(mp.mpf(bad_r), ctx128)


def test_elliptic_e_against_reference(ctx128):
    # elliptic_e takes the modulus directly: E(k) with k = sqrt(1 - r^2).
    r = mp.mpf(2) ** -4
    with mp.workprec(256):
        k = mp.sqrt(1 - r * r)
    e = elliptic_e(k, ctx128)
    assert rel_err(e, ELLIPTIC_REF[4][2]) < mp.mpf(2) ** -105
    # ... and at the complementary modulus.
    e2 = elliptic_e(r, ctx128)
    assert rel_err(e2, ELLIPTIC_REF[4][3]) < mp.mpf(2) ** -105


class TestNewtonRoot:
    def test_sqrt2(self, ctx128):
        root = newton_root(lambda x: x * x - 2, lambda x: 2 * x,
                           mp.mpf(1.5), ctx128)
        assert rel_err(root, "1.41421356237309504880168872420969807857") \
            < mp.mpf(2) ** -124

    def test_bracketed_safeguard(self, ctx128):
        # cos has a root at pi/2; start Newton far enough away that the
        # plain iteration would jump outside the bracket.
        root = newton_root(mp.cos, lambda x: -mp.sin(x), mp.mpf(0.1),
                           ctx128, bracket=(mp.mpf(0), mp.mpf(3)))
        assert rel_err(root, "1.57079632679489661923132169163975144210") \
            < mp.mpf(2) ** -124

    def test_lambert_constant(self, ctx128):
        # 1 + W0(1/e): solve w e^w = 1/e.  Value from mpmath.lambertw,
        # and the 12-digit decimal the CLI table prints.
        w = newton_root(lambda x: x * mp.exp(x) - mp.exp(-1),
                        lambda x: (1 + x) * mp.exp(x),
                        mp.mpf(0.25), ctx128)
        assert rel_err(w, "0.27846454276107379510935873902298") \
            < mp.mpf(2) ** -105
        with mp.workprec(128):
            assert mp.nstr(1 + w, 13) == "1.278464542761"

    def test_no_convergence_raises(self, ctx64):
        with pytest.raises(NumericalError):
            newton_root(lambda x: mp.mpf(1) + x * 0, lambda x: mp.mpf(1),
                        mp.mpf(0), ctx64, max_iter=5)
