"""Special functions for the interaction-integral engine.

Kummer's M and Tricomi's U confluent hypergeometric functions, the half-line
moment integral

    S(alpha, beta, gamma) = int_0^inf x^alpha exp(beta x - gamma x^2) dx,

its closed-form branches in the sign of beta, a three-term verification
recurrence for the same quantity, and spherical averages of unit-vector
monomials used by the derivative tensor at coincident centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erfcx, gammaln

from .errors import ConvergenceError, InvalidParameterError
from .model import double_factorial

_LOG_DBL_MAX = math.log(1.7976931348623157e308)
# Above this argument exp(beta^2 / 4 gamma) leaves double range and the
# beta > 0 branch switches to a scaled (log-magnitude) evaluation.
_SCALED_THRESHOLD = 700.0
# The Kummer power series needs ~x + O(sqrt(x)) terms; beyond this argument
# the asymptotic expansion is both cheaper and fully converged in doubles.
_ASYMPTOTIC_X = 300.0


@dataclass(frozen=True)
class SIntegralParams:
    """Arguments of the half-line moment integral."""

    alpha: int
    beta: float
    gamma: float

    def __post_init__(self):
        if self.alpha < 0:
            raise InvalidParameterError(f"alpha must be >= 0, got {self.alpha}")
        if self.gamma <= 0:
            raise InvalidParameterError(f"gamma must be > 0, got {self.gamma}")


def kummer_m(a: float, b: float, x: float, max_terms: int = 500) -> float:
    """Kummer's confluent hypergeometric M(a, b, x) by power series.

    Terms are accumulated until |term| < 1e-17 |partial sum|.
    """
    if b <= 0 and b == int(b):
        raise InvalidParameterError(f"M(a, b, x) undefined at non-positive integer b={b}")
    total = 1.0
    term = 1.0
    for n in range(max_terms):
        term *= (a + n) * x / ((b + n) * (n + 1))
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total
    raise ConvergenceError(
        f"Kummer series did not converge for a={a}, b={b}, x={x}",
        last_term=term, partial_sum=total, terms=max_terms)


def _kummer_m_scaled(a: float, b: float, x: float, max_terms: int = 80) -> float:
    """exp(-x) * M(a, b, x) through the large-x asymptotic expansion.

    Valid only for large positive x; used by the scaled moment path.
    """
    if x < _ASYMPTOTIC_X:
        raise InvalidParameterError("scaled Kummer evaluation expects large x")
    # M(a,b,x) ~ Gamma(b)/Gamma(a) e^x x^(a-b) sum_n (b-a)_n (1-a)_n / (n! x^n)
    pref = math.exp(gammaln(b) - gammaln(a)) * x ** (a - b)
    total = 1.0
    term = 1.0
    for n in range(max_terms):
        term *= (b - a + n) * (1 - a + n) / ((n + 1) * x)
        if abs(term) > abs(total):
            break  # asymptotic series started diverging; best truncation reached
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return pref * total


def tricomi_u(a: float, b: float, x: float) -> float:
    """Tricomi's confluent hypergeometric U(a, b, x) for a > 0, x > 0.

    Evaluated from the Laplace integral representation

        U(a,b,x) = 1/Gamma(a) int_0^inf e^(-x t) t^(a-1) (1+t)^(b-a-1) dt

    after the substitution t = v^2/x, which removes the endpoint singularity
    and keeps the integrand at unit scale for every x.
    """
    if a <= 0 or x <= 0:
        raise InvalidParameterError(f"U(a,b,x) quadrature path needs a>0, x>0 (a={a}, x={x})")

    c = b - a - 1.0

    def integrand(v):
        return 2.0 * np.exp(-v * v + c * np.log1p(v * v / x)) * v ** (2.0 * a - 1.0)

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=300)
    return val * x ** (-a) / math.exp(gammaln(a))


def _moment_beta_neg(alpha: int, beta: float, gamma: float) -> float:
    x = beta * beta / (4.0 * gamma)
    log_pref = gammaln(alpha + 1.0) - (alpha + 1.0) * math.log(2.0 * math.sqrt(gamma))
    return math.exp(log_pref) * tricomi_u((alpha + 1.0) / 2.0, 0.5, x)


def _moment_beta_zero(alpha: int, gamma: float) -> float:
    return math.exp(gammaln((alpha + 1.0) / 2.0)) / (2.0 * gamma ** ((alpha + 1.0) / 2.0))


def _moment_beta_pos(alpha: int, beta: float, gamma: float) -> float:
    x = beta * beta / (4.0 * gamma)
    a1, a2 = alpha / 2.0 + 1.0, (alpha + 1.0) / 2.0
    g1, g2 = math.exp(gammaln(a1)), math.exp(gammaln(a2))
    if x <= _ASYMPTOTIC_X:
        bracket = beta * g1 * kummer_m(a1, 1.5, x) + math.sqrt(gamma) * g2 * kummer_m(a2, 0.5, x)
        return bracket / (2.0 * gamma ** (alpha / 2.0 + 1.0))
    # Scaled path: carry the e^x factor in log space and only exponentiate
    # once the final magnitude is known to be representable.
    bracket_scaled = (beta * g1 * _kummer_m_scaled(a1, 1.5, x)
                      + math.sqrt(gamma) * g2 * _kummer_m_scaled(a2, 0.5, x))
    log_val = x + math.log(bracket_scaled) - math.log(2.0) \
        - (alpha / 2.0 + 1.0) * math.log(gamma)
    if log_val >= _LOG_DBL_MAX:
        raise OverflowError(
            f"S({alpha}, {beta}, {gamma}) = exp({log_val:.3f}) exceeds double range")
    return math.exp(log_val)


def exp_gauss_moment(alpha: int, beta: float, gamma: float) -> float:
    """int_0^inf x^alpha exp(beta x - gamma x^2) dx for integer alpha >= 0.

    Three closed-form branches: Tricomi U for beta < 0, a plain Gamma ratio
    for beta = 0, and a two-term Kummer M combination for beta > 0.  The
    result is finite and strictly positive; overflow on the beta > 0 branch
    raises instead of returning infinity.
    """
    SIntegralParams(alpha, beta, gamma)  # domain validation
    if abs(beta) < 1e-12 * max(1.0, math.sqrt(gamma)):
        # the |beta| branches become numerically indeterminate as the
        # hypergeometric argument underflows; relative error of the beta = 0
        # limit here is below 1e-12
        return _moment_beta_zero(alpha, gamma)
    if beta < 0:
        return _moment_beta_neg(alpha, beta, gamma)
    return _moment_beta_pos(alpha, beta, gamma)


@dataclass(frozen=True)
class MomentRecurrence:
    """Moments S(0..alpha_max) from the three-term recurrence.

    Entries where the upward recurrence lost essentially all significant
    digits are flagged in low_confidence.
    """

    values: np.ndarray
    low_confidence: np.ndarray


def exp_gauss_moment_series(alpha_max: int, beta: float, gamma: float) -> MomentRecurrence:
    """S(0..alpha_max) from closed-form S(0), S(1) plus
    2 gamma S(alpha+1) = beta S(alpha) + alpha S(alpha-1).

    The relation follows from integrating d/dx [x^alpha exp(beta x - gamma x^2)]
    over the half line.  Serves as an independent verification route for
    :func:`exp_gauss_moment`.
    """
    if gamma <= 0:
        raise InvalidParameterError(f"gamma must be > 0, got {gamma}")
    if alpha_max < 0:
        raise InvalidParameterError("alpha_max must be >= 0")
    z = -beta / (2.0 * math.sqrt(gamma))
    if beta <= 0:
        s0 = math.sqrt(math.pi) / (2.0 * math.sqrt(gamma)) * erfcx(z)
    else:
        x = beta * beta / (4.0 * gamma)
        if x >= _LOG_DBL_MAX:
            raise OverflowError(f"exp({x:.1f}) in S(0) exceeds double range")
        s0 = math.sqrt(math.pi) / (2.0 * math.sqrt(gamma)) * (2.0 * math.exp(x) - erfcx(-z))
    values = np.empty(alpha_max + 1)
    flags = np.zeros(alpha_max + 1, dtype=bool)
    values[0] = s0
    # cumulative cancellation amplification; entries whose expected rounding
    # error exceeds ~1e-11 relative are flagged low-confidence
    amp = 1.0
    if alpha_max >= 1:
        num = 1.0 + beta * s0
        values[1] = num / (2.0 * gamma)
        amp = max(1.0, abs(beta * s0)) / max(abs(num), 1e-300)
        flags[1] = abs(num) < 1e-10 * max(1.0, abs(beta * s0)) or amp > 1e5
    for a in range(1, alpha_max):
        t1 = beta * values[a]
        t2 = a * values[a - 1]
        num = t1 + t2
        values[a + 1] = num / (2.0 * gamma)
        amp *= max(abs(t1), abs(t2)) / max(abs(num), 1e-300)
        flags[a + 1] = abs(num) < 1e-10 * max(abs(t1), abs(t2)) or amp > 1e5
    return MomentRecurrence(values, flags)


def spherical_average_monomial(t: int, u: int, v: int) -> float:
    """Average of x^t y^u z^v over the unit sphere.

    Zero when any index is odd, otherwise
    (t-1)!! (u-1)!! (v-1)!! / (t+u+v+1)!!.
    """
    if min(t, u, v) < 0:
        raise InvalidParameterError("monomial powers must be non-negative")
    if (t % 2) or (u % 2) or (v % 2):
        return 0.0
    num = double_factorial(t - 1) * double_factorial(u - 1) * double_factorial(v - 1)
    return num / double_factorial(t + u + v + 1)


@dataclass(frozen=True)
class AngularTable:
    """Precomputed sphere averages for all monomials with t+u+v <= max_degree."""

    spherical_avg: dict
    max_degree: int

    def __call__(self, t: int, u: int, v: int) -> float:
        if t + u + v > self.max_degree:
            raise InvalidParameterError(
                f"degree {t+u+v} exceeds table max_degree {self.max_degree}")
        return self.spherical_avg[(t, u, v)]


def build_angular_table(max_degree: int) -> AngularTable:
    table = {}
    for t in range(max_degree + 1):
        for u in range(max_degree + 1 - t):
            for v in range(max_degree + 1 - t - u):
                table[(t, u, v)] = spherical_average_monomial(t, u, v)
    return AngularTable(table, max_degree)
