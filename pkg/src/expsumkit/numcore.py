"""Precision bookkeeping and arbitrary-precision building blocks.

Everything downstream (elliptic nomes, quadrature, Remez) funnels its
precision requirements through :class:`PrecisionContext` and gets the
complete elliptic integrals K, E and the nome q from :func:`agm_bundle`,
which runs the arithmetic-geometric mean iteration at working precision.

References
----------
.. [AS] M. Abramowitz, I. Stegun, Handbook of Mathematical Functions,
        17.6 (AGM computation of elliptic integrals).
.. [BB] J.M. Borwein, P.B. Borwein, Pi and the AGM, Wiley 1987 (nome
        product from AGM iterates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from mpmath import mp


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericalError(ArithmeticError):
    """A computation failed to reach its accuracy contract."""


class PrecisionError(NumericalError):
    """The requested result is not representable at the working precision."""


class StructuralError(NumericalError):
    """A computed object violates a structural invariant (count, sign, ...)."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits, plus derived tolerances.

    All library operations take one of these instead of mutating the global
    mpmath state; they wrap their arithmetic in ``with ctx.workprec():`` so
    the caller's precision is untouched.
    """

    bits: int = 128

    def __post_init__(self):
        if self.bits < 64:
            raise DomainError(f"need at least 64 bits, got {self.bits}")

    @property
    def eps(self):
        """Unit roundoff target 2^-bits."""
        with mp.workprec(self.bits):
            return mp.mpf(2) ** -self.bits

    @property
    def sig_digits(self) -> int:
        """Decimal digits carrying the full binary precision."""
        return math.ceil(self.bits * math.log10(2))

    def workprec(self):
        return mp.workprec(self.bits)


@dataclass(frozen=True)
class EllipticBundle:
    """Elliptic constants for the modulus pair (r, k), k = sqrt(1 - r^2).

    ``K``/``E`` are the complete integrals at modulus k, ``Kr``/``Er`` at
    the complementary modulus r, and ``q = exp(-pi K(r)/K(k))`` is the nome
    attached to that pair.  ``bits`` records the precision the bundle was
    built at.
    """

    r: object
    k: object
    K: object
    Kr: object
    E: object
    Er: object
    q: object
    bits: int = field(default=128, compare=False)


def _agm_sequence(a, g, bits):
    """AGM iterates [(a0,g0), (a1,g1), ...] until |a_n - g_n| <= g_n 2^(1-bits)."""
    out = [(a, g)]
    stop = mp.mpf(2) ** (1 - bits)
    while abs(a - g) > g * stop:
        a, g = (a + g) / 2, mp.sqrt(a * g)
        out.append((a, g))
        if len(out) > 64:  # AGM is quadratic; this can only mean a bug
            raise NumericalError("AGM failed to converge")
    return out


def _companion_sum(seq, c0):
    # E/K = 1 - sum_{n>=0} 2^(n-1) c_n^2 with c_0 given and
    # c_n = (a_{n-1} - g_{n-1})/2  [AS 17.6.4].
    s = c0 * c0 / 2
    for n in range(1, len(seq)):
        c = (seq[n - 1][0] - seq[n - 1][1]) / 2
        s += mp.mpf(2) ** (n - 1) * c * c
    return s


def agm_bundle(r, ctx: PrecisionContext) -> EllipticBundle:
    """Compute K(k), K(r), E(k), E(r) and the nome q for k = sqrt(1-r^2).

    The AGM with (a0, g0) = (1, r) converges to pi/(2 K(k)); the companion
    quadratic-mean differences give E [AS 17.6]; and the nome follows from
    the product over the iterates

        q = (1 - r^2)/(16 r) * prod_{n>=1} (g_n/a_n)^(3/2^n),

    which is cross-checked against q = exp(-pi K(r)/K(k)).  A Legendre
    relation residual check guards the whole bundle; failure of either
    invariant raises :class:`NumericalError`.
    """
    bits = ctx.bits
    with mp.workprec(bits + 16):
        r = mp.mpf(r)
        if not (0 < r < 1):
            raise DomainError(f"modulus parameter must satisfy 0 < r < 1, got {r}")
        k = mp.sqrt((1 - r) * (1 + r))
        seq = _agm_sequence(mp.mpf(1), r, bits)
        big_k = mp.pi / (2 * seq[-1][0])
        big_e = big_k * (1 - _companion_sum(seq, k))

        seq_c = _agm_sequence(mp.mpf(1), k, bits)
        big_kr = mp.pi / (2 * seq_c[-1][0])
        big_er = big_kr * (1 - _companion_sum(seq_c, r))

        prod = mp.mpf(1)
        for n in range(1, len(seq)):
            a_n, g_n = seq[n]
            prod *= (g_n / a_n) ** (mp.mpf(3) / 2 ** n)
        q = (1 - r * r) / (16 * r) * prod

        q_exp = mp.exp(-mp.pi * big_kr / big_k)
        if abs(q - q_exp) > abs(q) * mp.mpf(2) ** (-bits + 4):
            raise NumericalError("nome product and exp(-pi K(r)/K(k)) disagree")
        legendre = big_e * big_kr + big_er * big_k - big_k * big_kr - mp.pi / 2
        if abs(legendre) > mp.mpf(2) ** (-bits + 6):
            raise NumericalError("Legendre relation residual too large")
    return EllipticBundle(r=r, k=k, K=big_k, Kr=big_kr, E=big_e, Er=big_er,
                          q=q, bits=bits)


def elliptic_e(k, ctx: PrecisionContext):
    """Complete elliptic integral E(k) (modulus convention) by the AGM."""
    with mp.workprec(ctx.bits + 16):
        k = mp.mpf(k)
        if not (0 < k < 1):
            raise DomainError(f"modulus must satisfy 0 < k < 1, got {k}")
        kc = mp.sqrt((1 - k) * (1 + k))
        seq = _agm_sequence(mp.mpf(1), kc, ctx.bits)
        big_k = mp.pi / (2 * seq[-1][0])
        return big_k * (1 - _companion_sum(seq, k))


def newton_root(f: Callable, fprime: Callable, x0, ctx: PrecisionContext,
                tol=None, max_iter: int = 80,
                bracket: Sequence | None = None):
    """Safeguarded Newton iteration for a simple root of ``f``.

    If ``bracket=(lo, hi)`` is supplied, any Newton step leaving the bracket
    is replaced by a bisection step and the bracket is maintained from the
    signs of ``f`` (rtsafe-style).  Converges when the step size drops below
    ``tol * max(1, |x|)``; default ``tol`` is ``4 * ctx.eps``.
    """
    with ctx.workprec():
        x = mp.mpf(x0)
        if tol is None:
            tol = 4 * ctx.eps
        lo = hi = None
        flo = None
        if bracket is not None:
            lo, hi = mp.mpf(bracket[0]), mp.mpf(bracket[1])
            flo = f(lo)
            if flo * f(hi) > 0:
                raise DomainError("bracket does not enclose a sign change")
        for _ in range(max_iter):
            fx = f(x)
            if fx == 0:
                return x
            if lo is not None:
                if (fx > 0) == (flo > 0):
                    lo = x
                else:
                    hi = x
            dfx = fprime(x)
            use_newton = dfx != 0
            if use_newton:
                step = fx / dfx
                x_new = x - step
                # Converged Newton steps are accepted before the bracket
                # test: at the root the step underflows and x_new may land
                # exactly on a bracket endpoint.
                if abs(step) <= tol * max(1, abs(x)):
                    return x_new
                if lo is not None and not (lo <= x_new <= hi):
                    use_newton = False
            if not use_newton:
                if lo is None:
                    raise NumericalError("Newton step failed without a bracket")
                x_new = (lo + hi) / 2
                if hi - lo <= 2 * tol * max(1, abs(x_new)):
                    return x_new
            x = x_new
        raise NumericalError(f"no convergence in {max_iter} Newton iterations")
