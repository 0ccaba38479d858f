"""Scalar special functions used by the closed-form metrics.

Only what the CDFMR expressions need: erfc / Q, the scaled exponential
integral e^x E1(x), Gamma at half-integers and exact binomials.
"""

import math

EULER_GAMMA = 0.57721566490153286060651209
BINOM_MAX_N = 62

_E1_SERIES_TOL = 1e-17
_E1_CF_TOL = 1e-16
_E1_MAX_ITER = 10_000
_E1_ASYMPTOTIC_FROM = 1e6


def erfc(x: float) -> float:
    """Complementary error function (delegates to the C library)."""
    return math.erfc(x)


def q_func(x: float) -> float:
    """Gaussian tail probability Q(x) = 0.5 erfc(x / sqrt 2)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _exp_e1_series(x: float) -> float:
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, _E1_MAX_ITER):
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _E1_SERIES_TOL * abs(total):
            break
    return math.exp(x) * (-EULER_GAMMA - math.log(x) - total)


def _exp_e1_cf(x: float) -> float:
    # Modified Lentz on e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _E1_MAX_ITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _E1_CF_TOL:
            return h
    raise ArithmeticError(f"exp_e1 continued fraction did not converge at x={x}")


def exp_e1(x: float) -> float:
    """Scaled exponential integral e^x * E1(x) for x > 0.

    Never forms E1(x) on its own, so it stays finite for arguments where
    e^-x underflows.
    """
    if not x > 0.0:
        raise ValueError(f"exp_e1 requires x > 0, got {x!r}")
    if math.isinf(x):
        return 0.0
    if x <= 1.0:
        return _exp_e1_series(x)
    if x >= _E1_ASYMPTOTIC_FROM:
        # 1/x (1 - 1/x + 2/x^2 - 6/x^3); next term is below 1e-23 relative
        r = 1.0 / x
        return r * (1.0 - r * (1.0 - r * (2.0 - 6.0 * r)))
    return _exp_e1_cf(x)


def gamma_half_integer(m: int) -> float:
    """Gamma(m + 1/2) via the upward recurrence from sqrt(pi)."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    value = math.sqrt(math.pi)
    for k in range(1, m + 1):
        value *= k - 0.5
    if math.isinf(value):
        raise OverflowError(f"Gamma({m} + 0.5) overflows double precision")
    return value


def binom(n: int, k: int) -> int:
    """Exact binomial coefficient restricted to 0 <= k <= n <= 62."""
    if not (0 <= k <= n <= BINOM_MAX_N):
        raise ValueError(f"binom({n}, {k}) outside the exact window 0 <= k <= n <= {BINOM_MAX_N}")
    return math.comb(n, k)
