"""expsumkit: exponential-sum approximation of finite completely monotonic
functions by transformed Gaussian quadrature and Remez exchange."""

__version__ = "0.1.0"
