"""Endpoint maps psi: [-1, 1] -> [r, 1] used as changes of variable.

Each map is increasing with psi(-1) = r and psi(1) = 1, and carries a decay
rate rho_hat: the basis coefficients of e^(-x psi(u)) in Chebyshev-like
expansions decay geometrically with this ratio, so larger rho_hat means
fewer quadrature points for the same accuracy.  The five maps:

  ``p1``   affine               (1-r)/2 u + (1+r)/2
  ``p2``   squared affine       ((1-sqrt(r))/2 u + (1+sqrt(r))/2)^2
  ``exp``  exponential          r^((1-u)/2)
  ``r01``  Moebius              2r / ((1+r) - (1-r) u)
  ``phi``  elliptic (optimal)   Phi_r(u), see :mod:`expsumkit.ellipticphi`

rho_hat closed forms:

  p1, r01:  (1+sqrt(r))/(1-sqrt(r))
  p2:       (sqrt(1+r) + sqrt(2 sqrt(r)))/(1-sqrt(r))
  exp:      L + sqrt(L^2+1),  L = pi/log(1/r)
  phi:      1/q  (reciprocal nome of (r, sqrt(1-r^2)))
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from mpmath import mp

from .ellipticphi import PhiSeries, phi_deriv, phi_eval, phi_series
from .numcore import DomainError, EllipticBundle, PrecisionContext, agm_bundle


class TransformKind(str, Enum):
    P1 = "p1"
    P2 = "p2"
    EXP = "exp"
    R01 = "r01"
    PHI = "phi"


@dataclass(frozen=True)
class Transform:
    kind: TransformKind
    r: object
    bits: int
    phi: PhiSeries | None = None

    @property
    def bundle(self) -> EllipticBundle:
        if self.phi is None:
            raise DomainError("only the elliptic map carries a bundle")
        return self.phi.bundle


_phi_cache: dict = {}


def make_transform(kind, r, ctx: PrecisionContext) -> Transform:
    """Build a transform; the elliptic series is cached per (r, bits)."""
    kind = TransformKind(kind)
    with mp.workprec(ctx.bits + 16):
        r = mp.mpf(r)
    if not (0 < r < 1):
        raise DomainError(f"transform needs 0 < r < 1, got {r}")
    series = None
    if kind is TransformKind.PHI:
        key = (r, ctx.bits)
        series = _phi_cache.get(key)
        if series is None:
            series = phi_series(agm_bundle(r, ctx), ctx)
            _phi_cache[key] = series
    return Transform(kind=kind, r=r, bits=ctx.bits, phi=series)


def psi(t: Transform, u):
    """Map value psi(u) in [r, 1]."""
    if t.kind is TransformKind.PHI:
        return phi_eval(t.phi, u)
    with mp.workprec(t.bits + 16):
        u = mp.mpf(u)
        if not (-1 <= u <= 1):
            raise DomainError(f"u must lie in [-1, 1], got {u}")
        r = t.r
        if t.kind is TransformKind.P1:
            return (1 - r) / 2 * u + (1 + r) / 2
        if t.kind is TransformKind.P2:
            s = mp.sqrt(r)
            return ((1 - s) / 2 * u + (1 + s) / 2) ** 2
        if t.kind is TransformKind.EXP:
            return r ** ((1 - u) / 2)
        # r01
        return 2 * r / ((1 + r) - (1 - r) * u)


def psi_deriv(t: Transform, u):
    """Derivative psi'(u) > 0 on [-1, 1]."""
    if t.kind is TransformKind.PHI:
        return phi_deriv(t.phi, u)
    with mp.workprec(t.bits + 16):
        u = mp.mpf(u)
        if not (-1 <= u <= 1):
            raise DomainError(f"u must lie in [-1, 1], got {u}")
        r = t.r
        if t.kind is TransformKind.P1:
            return (1 - r) / 2
        if t.kind is TransformKind.P2:
            s = mp.sqrt(r)
            return (1 - s) * ((1 - s) / 2 * u + (1 + s) / 2)
        if t.kind is TransformKind.EXP:
            return r ** ((1 - u) / 2) * mp.log(1 / r) / 2
        # r01
        return 2 * r * (1 - r) / ((1 + r) - (1 - r) * u) ** 2


def rho_hat(t: Transform):
    """Geometric decay rate of the map's basis coefficients."""
    with mp.workprec(t.bits + 16):
        r = t.r
        if t.kind is TransformKind.PHI:
            return 1 / t.phi.bundle.q
        if t.kind in (TransformKind.P1, TransformKind.R01):
            s = mp.sqrt(r)
            return (1 + s) / (1 - s)
        if t.kind is TransformKind.P2:
            s = mp.sqrt(r)
            return (mp.sqrt(1 + r) + mp.sqrt(2 * s)) / (1 - s)
        # exp
        big_l = mp.pi / mp.log(1 / r)
        return big_l + mp.sqrt(big_l * big_l + 1)
