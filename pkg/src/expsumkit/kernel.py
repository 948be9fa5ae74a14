"""The inverse-power completely monotonic kernel and its derivatives.

f(x) = int_a^b e^(-xt) dW(t) with density W'(t) = t^(eta-1)/Gamma(eta),
0 < a < b, eta > 0.  Every f is positive, strictly decreasing, and
completely monotonic; for eta in {1/2, 1, 2} these are the classical
sqrt/log-free kernels appearing in fast Gauss transforms.

Derivatives at x = 0 have the closed form

    f^(n)(0) = (-1)^n a^(n+eta) expm1((n+eta) log(b/a)) / ((n+eta) Gamma(eta)),

written with expm1 so b/a -> 1 loses no relative accuracy.  For x > 0 the
integral is evaluated by Gauss-Legendre with order doubling over panels:
dyadic panels of [a, b] keep the t^(eta-1) branch point at 0 out of the
relevant Bernstein ellipses when eta - 1 is not a nonnegative integer,
and panels wider than 60/x are chopped so a fixed modest order resolves
the exponential; the remaining range is dropped once a certified
exponential tail bound falls below working accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import mp

from .numcore import DomainError, PrecisionContext
from .quadrature import gl_integrate

# x*(b-a) above which the integration interval is split into panels
_PANEL_THRESHOLD = 60


@dataclass(frozen=True)
class PowerKernel:
    """Kernel parameters (eta, a, b); all become mpf on construction."""

    eta: object
    a: object
    b: object

    def __post_init__(self):
        with mp.workprec(400):
            object.__setattr__(self, "eta", mp.mpf(self.eta))
            object.__setattr__(self, "a", mp.mpf(self.a))
            object.__setattr__(self, "b", mp.mpf(self.b))
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if not (0 < self.a < self.b):
            raise DomainError(
                f"need 0 < a < b, got a={self.a}, b={self.b}")
        if self.b == mp.inf:
            raise DomainError("b must be finite")

    def density(self, t, ctx: PrecisionContext):
        return density(self, t, ctx)


_gamma_cache: dict = {}


def gamma_eta(eta, ctx: PrecisionContext):
    """Gamma(eta) for eta > 0: exact shortcuts for eta in {1/2, 1, 2},
    otherwise Spouge's approximation with a precision-scaled parameter.

    Spouge [S] gives, for z with Re z >= 0,

        Gamma(z+1) = (z+a)^(z+1/2) e^(-(z+a))
                     [sqrt(2 pi) + sum_{k=1}^{a-1} c_k/(z+k)] (1 + eps),
        c_k = (-1)^(k-1)/(k-1)! (a-k)^(k-1/2) e^(a-k),
        |eps| < a^(-1/2) (2 pi)^(-(a+1/2)),

    so a ~ (bits+8) log 2 / log(2 pi) terms reach 2^-(bits+8).  For
    0 < eta < 1 the recurrence Gamma(eta) = Gamma(eta+1)/eta keeps the
    argument in the certified range.

    .. [S] J.L. Spouge, Computation of the gamma, digamma, and trigamma
           functions, SIAM J. Numer. Anal. 31 (1994) 931-944.
    """
    bits = ctx.bits
    # The alternating c_k reach ~ e^(a_s), so the sum cancels down by about
    # a_s/log(2) bits; pad the working precision accordingly.
    a_s = math.ceil((bits + 8) * math.log(2) / math.log(2 * math.pi)) + 2
    guard = 32 + math.ceil(a_s / math.log(2))
    with mp.workprec(bits + guard):
        eta = mp.mpf(eta)
        if not eta > 0:
            raise DomainError(f"eta must be positive, got {eta}")
        key = (eta, bits)
        hit = _gamma_cache.get(key)
        if hit is not None:
            return hit
        if eta == mp.mpf(1) / 2:
            val = mp.sqrt(mp.pi)
        elif eta == 1 or eta == 2:
            val = mp.mpf(1)
        else:
            shift = eta < 1
            z = eta if shift else eta - 1  # compute Gamma(z+1), z >= 0
            acc = mp.sqrt(2 * mp.pi)
            fact = mp.mpf(1)
            for k in range(1, a_s):
                if k > 1:
                    fact *= -(k - 1)  # carries the (-1)^(k-1) sign
                c = (mp.mpf(a_s - k) ** (k - mp.mpf(1) / 2)
                     * mp.exp(a_s - k) / fact)
                acc += c / (z + k)
            val = (z + a_s) ** (z + mp.mpf(1) / 2) * mp.exp(-(z + a_s)) * acc
            if shift:
                val /= eta
        _gamma_cache[key] = val
        return val


def density(kernel: PowerKernel, t, ctx: PrecisionContext):
    """W'(t) = t^(eta-1)/Gamma(eta) on [a, b]."""
    g = gamma_eta(kernel.eta, ctx)
    with mp.workprec(ctx.bits + 16):
        t = mp.mpf(t)
        if not (kernel.a <= t <= kernel.b):
            raise DomainError(f"t={t} outside [{kernel.a}, {kernel.b}]")
        return t ** (kernel.eta - 1) / g


def _panel_bounds(kernel: PowerKernel) -> list:
    """Panel boundaries for integrating e^(-xt) t^(eta-1+n) over [a, b].

    When eta - 1 is a nonnegative integer the integrand is entire and one
    panel suffices.  Otherwise t^(eta-1) has a branch point at 0; on a
    dyadic panel [c, 2c] the Bernstein ellipse through 0 has radius
    3 + 2 sqrt(2) ~ 5.83, restoring geometric Gauss-Legendre convergence
    however small a/b is.
    """
    a, b = kernel.a, kernel.b
    p = kernel.eta - 1
    if p >= 0 and p == int(p):
        return [a, b]
    bounds = [a]
    c = 2 * a
    while c < b:
        bounds.append(c)
        c *= 2
    bounds.append(b)
    return bounds


def _exp_power_integrals(kernel: PowerKernel, x, nmax: int,
                         ctx: PrecisionContext):
    """(I_0, ..., I_nmax) with I_n = int_a^b e^(-xt) t^(eta-1+n) dt, x > 0."""
    bits = ctx.bits
    with mp.workprec(bits + 16):
        b, eta = kernel.b, kernel.eta
        x = mp.mpf(x)
        powers = [eta - 1 + n for n in range(nmax + 1)]
        p0 = powers[0]
        two_p0 = 2 * p0

        def _lead(t):
            # t^p0, avoiding the exp/log pow for the frequent small cases
            if p0 == 0:
                return mp.mpf(1)
            if p0 == 1:
                return t
            if two_p0 == int(two_p0):
                n2 = int(two_p0)  # t^(n2/2) via integer power and sqrt
                v = mp.power(t, n2 // 2)
                return v * mp.sqrt(t) if n2 % 2 else v
            return t ** p0

        def g(t):
            e = mp.exp(-x * t)
            tp = _lead(t)
            out = [e * tp]
            for _ in range(nmax):
                tp = tp * t
                out.append(e * tp)
            return tuple(out)

        rel = mp.mpf(2) ** (-bits + 16)
        cut = mp.mpf(2) ** (-bits - 10)
        totals = [mp.mpf(0)] * (nmax + 1)
        bounds = _panel_bounds(kernel)
        done = False
        for c, d in zip(bounds, bounds[1:]):
            if done:
                break
            nchunks = (1 if x * (d - c) <= _PANEL_THRESHOLD
                       else int(mp.ceil(x * (d - c) / _PANEL_THRESHOLD)))
            step = (d - c) / nchunks
            for i in range(nchunks):
                t0, t1 = c + i * step, c + (i + 1) * step
                part = gl_integrate(g, t0, t1, ctx, rel_tol=rel)
                if not isinstance(part, tuple):
                    part = (part,)
                totals = [s + p for s, p in zip(totals, part)]
                if t1 >= b:
                    break
                # tail of the remaining range: e^(-x t) <= e^(-x t1) and
                # t^p <= max(t1^p, b^p) there, so the remainder is below
                # e^(-x t1) max(t1^p, b^p) (b - t1) for each component.
                decay = mp.exp(-x * t1)
                if all(decay * max(t1 ** p, b ** p) * (b - t1) <= tot * cut
                       for p, tot in zip(powers, totals)):
                    done = True
                    break
        return tuple(totals)


def f_derivatives(kernel: PowerKernel, x, nmax: int,
                  ctx: PrecisionContext) -> tuple:
    """(f(x), f'(x), ..., f^(nmax)(x)) sharing one quadrature pass."""
    if nmax < 0:
        raise DomainError("nmax must be >= 0")
    g = gamma_eta(kernel.eta, ctx)
    with mp.workprec(ctx.bits + 16):
        x = mp.mpf(x)
        if x < 0:
            raise DomainError(f"kernel argument must be >= 0, got {x}")
        if x == 0:
            out = []
            log_ba = mp.log(kernel.b / kernel.a)
            for n in range(nmax + 1):
                p = n + kernel.eta
                mag = kernel.a ** p * mp.expm1(p * log_ba) / (p * g)
                out.append(mag if n % 2 == 0 else -mag)
            return tuple(out)
        ints = _exp_power_integrals(kernel, x, nmax, ctx)
        return tuple(v / g if n % 2 == 0 else -v / g
                     for n, v in enumerate(ints))


def f_derivative(kernel: PowerKernel, n: int, x, ctx: PrecisionContext):
    """n-th derivative of f at x >= 0 (n = 0 gives f itself)."""
    if n < 0:
        raise DomainError("derivative order must be >= 0")
    return f_derivatives(kernel, x, n, ctx)[n]
