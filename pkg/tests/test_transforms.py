"""Tests for the five [-1,1] -> [r,1] endpoint maps and their decay rates.

The 20-row decay-rate table (rho_hat and rho_hat^2 to six significant
digits for r = 2^-1 ... 2^-20) is frozen below.  Cross-identities relating
the closed forms to the nome are checked against mpmath.kfrom, which the
library itself never calls.
"""

import random

import pytest
from mpmath import mp

from expsumkit.numcore import DomainError, PrecisionContext
from expsumkit.transforms import TransformKind, make_transform, psi, \
    psi_deriv, rho_hat
from conftest import rel_err

KINDS = [TransformKind.PHI, TransformKind.EXP, TransformKind.P2,
         TransformKind.P1, TransformKind.R01]

# rexp -> ((phi, phi^2), (exp, exp^2), (p2, p2^2), (p1, p1^2));
# the p1 column also covers r01.  Six significant digits.
RHO_TABLE = {
    1:  (("11.6556", "135.853"), ("9.17373", "84.1573"),
         ("8.24175", "67.9264"), ("5.82843", "33.9706")),
    2:  (("5.99070", "35.8885"), ("4.74319", "22.4978"),
         ("4.23607", "17.9443"), ("3.00000", "9.00000")),
    3:  (("4.15994", "17.3051"), ("3.32255", "11.0393"),
         ("2.94155", "8.65273"), ("2.09384", "4.38415")),
    4:  (("3.27674", "10.7370"), ("2.64435", "6.99256"),
         ("2.31718", "5.36931"), ("1.66667", "2.77778")),
    5:  (("2.76519", "7.64629"), ("2.25617", "5.09031"),
         ("1.95586", "3.82538"), ("1.42947", "2.04340")),
    6:  (("2.43498", "5.92910"), ("2.00864", "4.03462"),
         ("1.72318", "2.96935"), ("1.28571", "1.65306")),
    7:  (("2.20571", "4.86514"), ("1.83879", "3.38117"),
         ("1.56245", "2.44125"), ("1.19392", "1.42544")),
    8:  (("2.03794", "4.15322"), ("1.71588", "2.94425"),
         ("1.44587", "2.09054"), ("1.13333", "1.28444")),
    9:  (("1.91022", "3.64895"), ("1.62324", "2.63492"),
         ("1.35831", "1.84500"), ("1.09248", "1.19350")),
    10: (("1.80992", "3.27582"), ("1.55115", "2.40608"),
         ("1.29083", "1.66623"), ("1.06452", "1.13319")),
    11: (("1.72918", "2.99006"), ("1.49359", "2.23082"),
         ("1.23782", "1.53220"), ("1.04519", "1.09243")),
    12: (("1.66284", "2.76505"), ("1.44665", "2.09279"),
         ("1.19558", "1.42941"), ("1.03175", "1.06450")),
    13: (("1.60742", "2.58378"), ("1.40768", "1.98155"),
         ("1.16155", "1.34919"), ("1.02234", "1.04519")),
    14: (("1.56043", "2.43495"), ("1.37484", "1.89018"),
         ("1.13389", "1.28570"), ("1.01575", "1.03174")),
    15: (("1.52012", "2.31076"), ("1.34681", "1.81390"),
         ("1.11127", "1.23491"), ("1.01111", "1.02234")),
    16: (("1.48516", "2.20570"), ("1.32262", "1.74932"),
         ("1.09266", "1.19392"), ("1.00784", "1.01575")),
    17: (("1.45456", "2.11576"), ("1.30154", "1.69401"),
         ("1.07730", "1.16059"), ("1.00554", "1.01111")),
    18: (("1.42757", "2.03794"), ("1.28301", "1.64612"),
         ("1.06458", "1.13333"), ("1.00391", "1.00784")),
    19: (("1.40357", "1.97001"), ("1.26660", "1.60428"),
         ("1.05401", "1.11094"), ("1.00277", "1.00554")),
    20: (("1.38211", "1.91022"), ("1.25197", "1.56744"),
         ("1.04522", "1.09248"), ("1.00196", "1.00391")),
}


def sig6(x):
    with mp.workprec(200):
        return mp.nstr(x, 6, strip_zeros=False)


@pytest.mark.parametrize("rexp", sorted(RHO_TABLE))
def test_rho_hat_table(rexp, ctx128):
    r = mp.mpf(2) ** -rexp
    cols = dict(zip([TransformKind.PHI, TransformKind.EXP,
                     TransformKind.P2, TransformKind.P1], RHO_TABLE[rexp]))
    for kind, (s_rho, s_rho2) in cols.items():
        rho = rho_hat(make_transform(kind, r, ctx128))
        assert sig6(rho) == s_rho, f"{kind} r=2^-{rexp}"
        with mp.workprec(200):
            rho2 = rho * rho
        assert sig6(rho2) == s_rho2, f"{kind}^2 r=2^-{rexp}"
    # r01 shares the p1 rate exactly
    rho_r01 = rho_hat(make_transform(TransformKind.R01, r, ctx128))
    rho_p1 = rho_hat(make_transform(TransformKind.P1, r, ctx128))
    assert rel_err(rho_r01, rho_p1) < mp.mpf(2) ** -118


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("rexp", [1, 7, 20])
def test_endpoint_values(kind, rexp, ctx128):
    r = mp.mpf(2) ** -rexp
    t = make_transform(kind, r, ctx128)
    tol = mp.mpf(2) ** -118
    assert rel_err(psi(t, mp.mpf(-1)), r) < tol
    assert rel_err(psi(t, mp.mpf(1)), mp.mpf(1)) < tol


@pytest.mark.parametrize("kind", KINDS)
def test_monotone_and_positive_derivative(kind, ctx128):
    t = make_transform(kind, mp.mpf(2) ** -5, ctx128)
    grid = [mp.mpf(-1) + mp.mpf(i) / 16 for i in range(33)]
    vals = [psi(t, u) for u in grid]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert all(psi_deriv(t, u) > 0 for u in grid)


@pytest.mark.parametrize("kind", KINDS)
def test_derivative_matches_central_difference(kind):
    # Independent derivative check: psi' vs (psi(u+h)-psi(u-h))/2h at 256
    # bits with h = 2^-80; the h^2 truncation sits near 2^-160.
    ctx = PrecisionContext(256)
    t = make_transform(kind, mp.mpf(2) ** -3, ctx)
    rng = random.Random(11)
    with mp.workprec(300):
        h = mp.mpf(2) ** -80
    for _ in range(12):
        u = mp.mpf(rng.uniform(-0.99, 0.99))
        with mp.workprec(300):
            fd = (psi(t, u + h) - psi(t, u - h)) / (2 * h)
        assert rel_err(psi_deriv(t, u), fd) < mp.mpf(2) ** -150, f"u={u}"


def test_rho_hat_nome_identities(ctx128):
    # With q the nome of (r, k=sqrt(1-r^2)) and k(.) the modulus-from-nome
    # map (mpmath.kfrom):  rho_hat[p1]^-2 = k(q^4)  and
    # rho_hat[p2]^-4 = k(q^8).
    for rexp in (1, 4, 9):
        r = mp.mpf(2) ** -rexp
        t_phi = make_transform(TransformKind.PHI, r, ctx128)
        q = t_phi.bundle.q
        with mp.workprec(200):
            lhs_p1 = rho_hat(make_transform(TransformKind.P1, r, ctx128)) ** -2
            lhs_p2 = rho_hat(make_transform(TransformKind.P2, r, ctx128)) ** -4
            k4 = mp.kfrom(q=q ** 4)
            k8 = mp.kfrom(q=q ** 8)
        assert rel_err(lhs_p1, k4) < mp.mpf(2) ** -110
        assert rel_err(lhs_p2, k8) < mp.mpf(2) ** -110


def test_phi_series_is_cached(ctx128):
    a = make_transform(TransformKind.PHI, mp.mpf(2) ** -2, ctx128)
    b = make_transform(TransformKind.PHI, mp.mpf(2) ** -2, ctx128)
    assert a.phi is b.phi


def test_domain_and_kind_errors(ctx128):
    t = make_transform(TransformKind.P1, mp.mpf("0.25"), ctx128)
    with pytest.raises(DomainError):
        psi(t, mp.mpf("1.5"))
    with pytest.raises(DomainError):
        make_transform(TransformKind.P1, mp.mpf("1.5"), ctx128)
    with pytest.raises((DomainError, ValueError, KeyError)):
        make_transform("not-a-kind", mp.mpf("0.25"), ctx128)
