"""Gaussian quadrature machinery at arbitrary precision.

The pipeline follows Gautschi's constructive approach [G] throughout:

  1. discretize the target measure dW(b psi(u)) on [-1, 1] by a high-order
     Gauss-Legendre rule (:func:`transformed_measure`),
  2. run the discretized Stieltjes procedure to get the three-term
     recurrence coefficients of the orthogonal polynomials of that
     discrete measure (:func:`stieltjes_coeffs`),
  3. diagonalize the Jacobi matrix to obtain nodes and weights
     (:func:`golub_welsch`), using an implicit-shift QL method at full
     working precision.

References
----------
.. [G]  W. Gautschi, Orthogonal Polynomials: Computation and Approximation,
        Oxford, 2004 (Secs. 2.2, 3.1; ORTHPOL routines sti/gauss).
.. [GW] G.H. Golub, J.H. Welsch, Calculation of Gauss quadrature rules,
        Math. Comp. 23 (1969).
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp
from mpmath.matrices.eigen_symmetric import tridiag_eigen

from .numcore import DomainError, NumericalError, PrecisionContext, \
    StructuralError
from .transforms import Transform, psi, psi_deriv


def _validate_pairs(nodes, weights, what):
    if len(nodes) != len(weights):
        raise StructuralError(f"{what}: {len(nodes)} nodes vs "
                              f"{len(weights)} weights")
    if any(b <= a for a, b in zip(nodes, nodes[1:])):
        raise StructuralError(f"{what}: nodes must be strictly increasing")
    if any(w <= 0 for w in weights):
        raise StructuralError(f"{what}: weights must be positive")


@dataclass(frozen=True)
class DiscreteMeasure:
    """Point masses `weights` at strictly increasing `nodes`."""

    nodes: tuple
    weights: tuple

    def __post_init__(self):
        _validate_pairs(self.nodes, self.weights, "DiscreteMeasure")

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class RecurrenceCoeffs:
    """Coefficients of p_{j+1} = (x - alpha_j) p_j - beta_j p_{j-1};
    beta[0] holds the total mass of the measure."""

    alpha: tuple
    beta: tuple

    def __post_init__(self):
        if len(self.alpha) != len(self.beta) or not self.alpha:
            raise StructuralError("alpha and beta must have equal length >= 1")
        if any(b <= 0 for b in self.beta):
            raise StructuralError("beta coefficients must be positive")

    def __len__(self):
        return len(self.alpha)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes (strictly increasing) and positive weights."""

    nodes: tuple
    weights: tuple

    def __post_init__(self):
        _validate_pairs(self.nodes, self.weights, "QuadratureRule")

    def __len__(self):
        return len(self.nodes)


_gl_cache: dict = {}


def gauss_legendre(m: int, ctx: PrecisionContext) -> QuadratureRule:
    """M-point Gauss-Legendre rule on [-1, 1] (cached per (m, bits)).

    Built from the Legendre recurrence alpha_j = 0, beta_0 = 2,
    beta_j = j^2/(4j^2 - 1) through :func:`golub_welsch`.
    """
    if m < 1:
        raise DomainError(f"order must be >= 1, got {m}")
    key = (m, ctx.bits)
    rule = _gl_cache.get(key)
    if rule is None:
        with mp.workprec(ctx.bits + 16):
            alpha = tuple(mp.mpf(0) for _ in range(m))
            beta = (mp.mpf(2),) + tuple(mp.mpf(j * j) / (4 * j * j - 1)
                                        for j in range(1, m))
        rule = golub_welsch(RecurrenceCoeffs(alpha=alpha, beta=beta), ctx)
        _gl_cache[key] = rule
    return rule


def gauss_chebyshev(m: int, ctx: PrecisionContext) -> QuadratureRule:
    """M-point Gauss-Chebyshev rule for (1/pi) int f(u)/sqrt(1-u^2) du:
    nodes cos((2 nu - 1) pi / (2M)), equal weights 1/M."""
    if m < 1:
        raise DomainError(f"order must be >= 1, got {m}")
    with mp.workprec(ctx.bits + 16):
        nodes = tuple(mp.cos((2 * nu - 1) * mp.pi / (2 * m))
                      for nu in range(m, 0, -1))
        weights = tuple(mp.mpf(1) / m for _ in range(m))
    return QuadratureRule(nodes=nodes, weights=weights)


def stieltjes_coeffs(measure: DiscreteMeasure, m: int,
                     ctx: PrecisionContext) -> RecurrenceCoeffs:
    """First m recurrence coefficient pairs of the measure's orthogonal
    polynomials by the discretized Stieltjes procedure [G, Sec. 2.2]."""
    n = len(measure)
    if not (1 <= m <= n):
        raise DomainError(f"need 1 <= m <= {n}, got {m}")
    with mp.workprec(ctx.bits + 16):
        x = measure.nodes
        w = measure.weights
        beta0 = mp.fsum(w)
        alpha0 = mp.fsum(wi * xi for wi, xi in zip(w, x)) / beta0
        alpha = [alpha0]
        beta = [beta0]
        if m > 1:
            p_prev = [mp.mpf(1)] * n
            p_cur = [xi - alpha0 for xi in x]
            nrm_prev = beta0
            for j in range(1, m):
                nrm_cur = mp.fsum(wi * pi * pi for wi, pi in zip(w, p_cur))
                if nrm_cur <= 0:
                    raise StructuralError(
                        f"Stieltjes breakdown at step {j}: lost positivity")
                alpha_j = mp.fsum(wi * xi * pi * pi
                                  for wi, xi, pi in zip(w, x, p_cur)) / nrm_cur
                beta_j = nrm_cur / nrm_prev
                alpha.append(alpha_j)
                beta.append(beta_j)
                if j < m - 1:
                    p_prev, p_cur = p_cur, [
                        (xi - alpha_j) * pc - beta_j * pp
                        for xi, pc, pp in zip(x, p_cur, p_prev)]
                    nrm_prev = nrm_cur
    return RecurrenceCoeffs(alpha=tuple(alpha), beta=tuple(beta))


def golub_welsch(coeffs: RecurrenceCoeffs,
                 ctx: PrecisionContext) -> QuadratureRule:
    """Nodes and weights from the Jacobi matrix of `coeffs` [GW].

    Diagonalizes the symmetric tridiagonal matrix with diagonal alpha and
    off-diagonal sqrt(beta_j) by implicit-shift QL at full working
    precision, accumulating only the first eigenvector components;
    weights are beta_0 times their squares.
    """
    n = len(coeffs)
    with mp.workprec(ctx.bits + 16):
        d = [mp.mpf(a) for a in coeffs.alpha]
        e = [mp.sqrt(coeffs.beta[j]) for j in range(1, n)] + [mp.mpf(0)]
        z = mp.zeros(1, n)
        z[0, 0] = mp.mpf(1)
        tridiag_eigen(mp, d, e, z)
        weights = tuple(coeffs.beta[0] * z[0, i] ** 2 for i in range(n))
    rule = QuadratureRule(nodes=tuple(d), weights=weights)
    return rule


def transformed_measure(kernel, transform: Transform, m_ds: int,
                        ctx: PrecisionContext) -> DiscreteMeasure:
    """Discretization of dW(b psi(u)) on [-1, 1] by an m_ds-point GL rule:
    nodes u_nu, masses c_nu * b * psi'(u_nu) * W'(b psi(u_nu))."""
    rule = gauss_legendre(m_ds, ctx)
    with mp.workprec(ctx.bits + 16):
        b = mp.mpf(kernel.b)
        weights = tuple(
            c * b * psi_deriv(transform, u)
            * kernel.density(b * psi(transform, u), ctx)
            for u, c in zip(rule.nodes, rule.weights))
    return DiscreteMeasure(nodes=rule.nodes, weights=weights)


def gl_integrate(g, lo, hi, ctx: PrecisionContext, rel_tol=None, abs_tol=None,
                 start_order: int = 16, max_order: int = 1 << 14):
    """Integrate ``g`` over [lo, hi] by Gauss-Legendre with order doubling.

    Doubles the order (start_order, 2*start_order, ...) until two successive
    orders agree within ``max(rel_tol*|I|, abs_tol)``; default rel_tol is
    2^(-bits+16).  ``g`` may return a scalar or a tuple (all components are
    then integrated on shared nodes and must all converge).  Raises
    :class:`NumericalError` if max_order is exceeded.
    """
    with mp.workprec(ctx.bits + 16):
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        if not hi > lo:
            raise DomainError("need lo < hi")
        half, mid = (hi - lo) / 2, (hi + lo) / 2
        if rel_tol is None:
            rel_tol = mp.mpf(2) ** (-ctx.bits + 16)
        if abs_tol is None:
            abs_tol = mp.mpf(0)
        prev = None
        m = start_order
        while m <= max_order:
            rule = gauss_legendre(m, ctx)
            samples = [g(mid + half * u) for u in rule.nodes]
            scalar = not isinstance(samples[0], tuple)
            if scalar:
                samples = [(s,) for s in samples]
            vals = tuple(half * mp.fsum(c * s[i]
                                        for c, s in zip(rule.weights, samples))
                         for i in range(len(samples[0])))
            if prev is not None and all(
                    abs(v - p) <= max(rel_tol * abs(v), abs_tol)
                    for v, p in zip(vals, prev)):
                return vals[0] if scalar else vals
            prev = vals
            m *= 2
        raise NumericalError(
            f"order-doubling quadrature did not settle by order {max_order}")


def _node_weight_pairs(obj):
    if hasattr(obj, "nodes"):
        return obj.nodes, obj.weights
    return obj.exponents, obj.coefficients


def mre(a, b):
    """Maximum relative deviation between two rules (or exponential sums)
    of equal length, over both the node and weight sequences."""
    xa, wa = _node_weight_pairs(a)
    xb, wb = _node_weight_pairs(b)
    if len(xa) != len(xb):
        raise DomainError("rules must have equal length for MRE")
    with mp.workprec(max(getattr(a, "bits", 0), 64) + 16):
        worst = mp.mpf(0)
        for sa, sb in ((xa, xb), (wa, wb)):
            for va, vb in zip(sa, sb):
                d = abs(va - vb)
                worst = max(worst, d if vb == 0 else d / abs(vb))
    return worst
