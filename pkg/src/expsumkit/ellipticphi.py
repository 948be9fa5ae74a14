"""The elliptic endpoint map Phi_r and its derivative via theta-like series.

Phi_r maps [-1, 1] increasingly onto [r, 1] and is the change of variable
with the optimal geometric decay rate 1/q for the basis coefficients, where
q is the nome of the modulus pair (r, k = sqrt(1 - r^2)).  It equals a
Jacobi dn function along a quarter period, but is evaluated here purely
from rapidly converging q-power series:

    Phi_r(u)  = sqrt(r) S(u) / S(-u),
    S(u)      = 1 + 2 sum_{n>=1} q^(n^2) T_n(u),

    Phi_r'(u) = k r^(3/4) sqrt(q) (2K/pi)^(3/2)
                * [sum_{n>=0} q^(2n^2+2n) V_n(1 - 2u^2)] / S(-u)^2,

with T_n the Chebyshev polynomials of the first kind and V_n those of the
third kind (V_0 = 1, V_1 = 2x - 1, same three-term recurrence as T_n).
Both sums are evaluated by Clenshaw's algorithm.  The truncation lengths
come from explicit tail bounds, chosen minimally so the truncation error
sits below the target precision.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp

from .numcore import DomainError, EllipticBundle, PrecisionContext


@dataclass(frozen=True)
class PhiSeries:
    """Truncated series data for one modulus: coefficient tuples are
    (1, 2q, 2q^4, ..., 2q^(N0^2)) for S and (q^0, q^4, q^12, ...,
    q^(2 N1^2 + 2 N1)) for the derivative sum."""

    bundle: EllipticBundle
    N0: int
    N1: int
    s_coeffs: tuple
    d_coeffs: tuple


def truncation_lengths(bundle: EllipticBundle, ctx: PrecisionContext,
                       bits: int | None = None) -> tuple[int, int]:
    """Minimal series lengths (N0, N1) with tail below 2^-bits.

    The tails of the two series are bounded by

        q^(N0^2) / (N0 sqrt(2 r K/pi) log(1/q))          for S, and
        (2N1+3)/(2N1+1) * 2 q^(2(N1+1/2)^2)
            / (k r^(1/4) (2K/pi)^(3/2) log(1/q))         for the V-sum,

    both decreasing in N; each N is the first integer >= 1 satisfying its
    bound.  ``bits`` defaults to ``ctx.bits``.
    """
    if bits is None:
        bits = ctx.bits
    with mp.workprec(ctx.bits + 16):
        q, r, k, big_k = bundle.q, bundle.r, bundle.k, bundle.K
        log_inv_q = -mp.log(q)
        target = mp.mpf(2) ** -bits
        c0 = mp.sqrt(2 * r * big_k / mp.pi) * log_inv_q
        n0 = 1
        while q ** (n0 * n0) / (n0 * c0) > target:
            n0 += 1
        c1 = k * r ** mp.mpf("0.25") * (2 * big_k / mp.pi) ** mp.mpf("1.5") \
            * log_inv_q
        n1 = 1
        while (mp.mpf(2 * n1 + 3) / (2 * n1 + 1)) * 2 \
                * q ** (2 * (n1 + mp.mpf(1) / 2) ** 2) / c1 > target:
            n1 += 1
    return n0, n1


def phi_series(bundle: EllipticBundle, ctx: PrecisionContext) -> PhiSeries:
    """Precompute series coefficients for Phi_r at ctx precision."""
    n0, n1 = truncation_lengths(bundle, ctx)
    with mp.workprec(ctx.bits + 16):
        q = bundle.q
        s_coeffs = (mp.mpf(1),) + tuple(2 * q ** (n * n)
                                        for n in range(1, n0 + 1))
        d_coeffs = tuple(q ** (2 * n * n + 2 * n) for n in range(n1 + 1))
    return PhiSeries(bundle=bundle, N0=n0, N1=n1,
                     s_coeffs=s_coeffs, d_coeffs=d_coeffs)


def _clenshaw_t(coeffs, x):
    # sum a_n T_n(x); T recurrence T_{n+1} = 2x T_n - T_{n-1}.
    b1 = b2 = mp.mpf(0)
    twox = 2 * x
    for a in reversed(coeffs[1:]):
        b1, b2 = twox * b1 - b2 + a, b1
    return coeffs[0] + x * b1 - b2


def _clenshaw_v(coeffs, x):
    # sum a_n V_n(x); same recurrence as T but V_0 = 1, V_1 = 2x - 1.
    b1 = b2 = mp.mpf(0)
    twox = 2 * x
    for a in reversed(coeffs[1:]):
        b1, b2 = twox * b1 - b2 + a, b1
    return coeffs[0] - b2 + (twox - 1) * b1


def _check_u(u):
    if not (-1 <= u <= 1):
        raise DomainError(f"Phi argument must lie in [-1, 1], got {u}")


def phi_eval(series: PhiSeries, u):
    """Phi_r(u) = sqrt(r) S(u)/S(-u) for u in [-1, 1]."""
    b = series.bundle
    with mp.workprec(b.bits + 16):
        u = mp.mpf(u)
        _check_u(u)
        return mp.sqrt(b.r) * _clenshaw_t(series.s_coeffs, u) \
            / _clenshaw_t(series.s_coeffs, -u)


def phi_deriv(series: PhiSeries, u):
    """Phi_r'(u) for u in [-1, 1] (one-sided at the endpoints)."""
    b = series.bundle
    with mp.workprec(b.bits + 16):
        u = mp.mpf(u)
        _check_u(u)
        v_sum = _clenshaw_v(series.d_coeffs, 1 - 2 * u * u)
        s_minus = _clenshaw_t(series.s_coeffs, -u)
        return b.k * b.r ** mp.mpf("0.75") * mp.sqrt(b.q) \
            * (2 * b.K / mp.pi) ** mp.mpf("1.5") * v_sum / (s_minus * s_minus)
