"""Analytic SIR and user-rate distributions of the typical UE.

Interferers form a PPP whose marks (fading gain and SDMA count ``M~``) are
taken i.i.d., ``M~`` following the pmf produced by :mod:`smallcell.schemes`.
With unit-mean Rayleigh fading on the useful link the SIR cdf given the
typical UE's SDMA group size ``M`` is ``1 - 1 / (1 + rho(theta, M))`` where::

    rho(theta, M) = sum_{M~ >= 1} Pr{M~} theta**(2/alpha)
                    * int_{theta**(-2/alpha)}^inf phi(u**(-alpha/2), M, M~) du
    phi(x, y, z)  = 1 - (1 + x*y/z)**(-z)

All SIR thresholds are linear (not dB).
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from ._validation import check_alpha, check_int, check_pmf, check_positive
from .exceptions import InvalidParameter, QuadratureNotConverged

EPSABS = 1e-12
EPSREL = 1e-10
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelParams:
    """Path-loss exponent and linear SIR threshold."""

    alpha: float = 4.0
    theta0: float = 1.0

    def __post_init__(self):
        check_alpha(self.alpha)
        check_positive(self.theta0, "theta0")


@dataclass(frozen=True, eq=False)
class CdfCurve:
    """A cdf sampled on a strictly increasing grid."""

    abscissae: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.shape != v.shape or x.ndim != 1:
            raise InvalidParameter("abscissae and values must be 1-d and aligned")
        if np.any(np.diff(x) <= 0):
            raise InvalidParameter("abscissae must be strictly increasing")
        if np.any((v < 0) | (v > 1)):
            raise InvalidParameter("cdf values must lie in [0, 1]")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "values", v)

    def is_monotone(self):
        return bool(np.all(np.diff(self.values) >= 0))

    def sup_distance(self, other):
        """Largest absolute gap to ``other`` on the shared grid."""
        if not np.array_equal(self.abscissae, other.abscissae):
            raise InvalidParameter("curves are sampled on different grids")
        return float(np.max(np.abs(self.values - other.values)))


def phi(x, y, z):
    """``1 - (1 + x*y/z)**(-z)``, accurate for small ``x``."""
    x = np.asarray(x, dtype=float)
    out = -np.expm1(-z * np.log1p(x * y / z))
    return out if out.ndim else float(out)


def _phi_over_x(x, y, z):
    # phi(x)/x -> y as x -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        out = -np.expm1(-z * np.log1p(x * y / z)) / x
    return np.where(x > 0, out, y)


def _quad(f, a, b):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(f, a, b, epsabs=EPSABS, epsrel=EPSREL, limit=400,
                             full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3 and abserr > max(1e-9, 1e-8 * abs(value)):
        raise QuadratureNotConverged(f"quad on [{a}, {b}]: {res[3]} (err {abserr:.2g})")
    return value


def _marks(mtilde_pmf):
    p = np.asarray(mtilde_pmf, dtype=float)
    z = np.nonzero(p[1:] > 0)[0] + 1
    return z.astype(float), p[z]


@lru_cache(maxsize=4096)
def _head_integral(y, z, w, alpha):
    """``sum_j w_j int_1^inf phi(u**(-alpha/2), y, z_j) du``.

    With ``t = u**(-(alpha-2)/2)`` the range maps to ``(0, 1]`` and the
    integrand becomes bounded: ``phi(t**q)/t**q * 2/(alpha-2)`` with
    ``q = alpha/(alpha-2)``.
    """
    z, w = np.array(z), np.array(w)
    q = alpha / (alpha - 2.0)

    def f(t):
        x = t ** q
        return float(np.dot(w, _phi_over_x(x, y, z)))

    return 2.0 / (alpha - 2.0) * _quad(f, 0.0, 1.0)


def _tail_integral(a, y, z, w, alpha):
    """``sum_j w_j int_a^inf phi(u**(-alpha/2), y, z_j) du`` for ``a > 0``."""
    if z.size == 0:
        return 0.0
    half = alpha / 2.0
    if a >= 1.0:
        q = alpha / (alpha - 2.0)
        top = a ** (-(alpha - 2.0) / 2.0)

        def f(t):
            x = t ** q
            return float(np.dot(w, _phi_over_x(x, y, z)))

        return 2.0 / (alpha - 2.0) * _quad(f, 0.0, top)

    def g(u):
        return float(np.dot(w, phi(u ** -half, y, z)))

    head = _head_integral(float(y), tuple(z), tuple(w), float(alpha))
    return head + _quad(g, a, 1.0)


def rho(theta, m, mtilde_pmf, alpha):
    """Interference functional ``rho(theta, M)`` (0 when no AP is active)."""
    theta = check_positive(theta, "theta") if np.isfinite(theta) else float(theta)
    alpha = check_alpha(alpha)
    m = check_int(m, "m", 1)
    if theta == math.inf:
        return math.inf
    z, w = _marks(mtilde_pmf)
    if z.size == 0:
        return 0.0
    a = theta ** (-2.0 / alpha)
    return theta ** (2.0 / alpha) * _tail_integral(a, float(m), z, w, alpha)


def sir_cdf_conditional(theta, m, mtilde_pmf, alpha):
    """``Pr{SIR <= theta | M = m}``."""
    if theta <= 0:
        return 0.0
    z, w = _marks(mtilde_pmf)
    return _sir_cdf_cached(float(theta), int(m), tuple(z), tuple(w), float(alpha))


@lru_cache(maxsize=1 << 16)
def _sir_cdf_cached(theta, m, z, w, alpha):
    pmf = np.zeros(int(max(z, default=0)) + 1)
    pmf[np.array(z, dtype=int)] = w
    r = rho(theta, m, pmf, alpha)
    if r == math.inf:
        return 1.0
    return r / (1.0 + r)


def _m_pmf_items(m_pmf):
    if isinstance(m_pmf, dict):
        items = sorted(m_pmf.items())
    else:
        items = [(i + 1, p) for i, p in enumerate(np.asarray(m_pmf, dtype=float))]
    probs = check_pmf([p for _, p in items], "m_pmf")
    return [(int(m), float(p)) for (m, _), p in zip(items, probs) if p > 0]


def sir_cdf(theta, m_pmf, mtilde_pmf, alpha):
    """SIR cdf averaged over the typical UE's SDMA group size.

    ``m_pmf`` is either a ``{M: prob}`` mapping or a sequence whose entry
    ``i`` is ``Pr{M = i + 1}``.
    """
    return sum(p * sir_cdf_conditional(theta, m, mtilde_pmf, alpha)
               for m, p in _m_pmf_items(m_pmf))


def interference_laplace(s, r0, lambda_a, mtilde_pmf, alpha):
    """Laplace transform ``E[exp(-s I)]`` of the interference seen at
    distance ``r0`` from the serving AP (interferers lie beyond ``r0``)."""
    alpha = check_alpha(alpha)
    r0 = check_positive(r0, "r0")
    lambda_a = check_positive(lambda_a, "lambda_a")
    if s < 0:
        raise InvalidParameter("s must be non-negative")
    if s == 0:
        return 1.0
    z, w = _marks(mtilde_pmf)
    # int_r0^inf phi(u^-alpha, s, z) u du = 1/2 int_{r0^2}^inf phi(v^(-alpha/2), s, z) dv
    integral = 0.5 * _tail_integral(r0 * r0, float(s), z, w, alpha)
    return math.exp(-2.0 * math.pi * lambda_a * integral)


def per_channel_rate(sir, n):
    """Rate per resource block, ``log2(1 + sir) / n`` in b/s/Hz."""
    return float(np.log2(1.0 + sir)) / n


def _rate_threshold(r, k0, m, n, theta0):
    """SIR needed for rate ``r`` with ``k0`` UEs sharing the subchannel."""
    exponent = r * n * k0 / m
    if exponent <= math.log2(1.0 + theta0) * (1.0 + 1e-12):
        return theta0
    if exponent * _LN2 > 700.0:
        return math.inf
    return math.expm1(exponent * _LN2)


def rate_cdf_conditional(r, k0, m, n, params, mtilde_pmf):
    """``Pr{R <= r | K0 = k0, M = m}``.

    Below ``log2(1 + theta0) * m / (n * k0)`` the rate outage equals the SIR
    outage; above it the SIR must support ``r`` after time sharing.
    """
    if r < 0:
        raise InvalidParameter("rate must be non-negative")
    theta = _rate_threshold(r, k0, m, n, params.theta0)
    return sir_cdf_conditional(theta, m, mtilde_pmf, params.alpha)


def _support(typical_joint):
    joint = np.asarray(typical_joint, dtype=float)
    k0, m = np.nonzero(joint > 0)
    if np.any(k0 < 1) or np.any(m < 1) or np.any(m > k0):
        raise InvalidParameter("joint pmf needs 1 <= M <= K0 on its support")
    check_pmf(joint[k0, m], "typical_joint")
    return k0, m, joint[k0, m]


def rate_cdf(r, typical_joint, n, params, mtilde_pmf):
    """User-rate cdf ``Pr{R <= r}`` mixed over the joint ``(K0, M)`` pmf.

    ``r`` may be a scalar or an array; the result has the same shape.
    """
    k0s, ms, ps = _support(typical_joint)
    rs = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros(rs.shape)
    for k0, m, p in zip(k0s, ms, ps):
        out += p * np.array([rate_cdf_conditional(x, int(k0), int(m), n, params, mtilde_pmf)
                             for x in rs])
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(r) else float(out[0])


def sir_outage_mass(typical_joint, params, mtilde_pmf):
    """``sum Pr{K0, M} F_SIR(theta0 | M)``: the rate cdf at ``r -> 0+``."""
    return rate_cdf(0.0, typical_joint, 1, params, mtilde_pmf)


def sir_cdf_curve(thetas, m_pmf, mtilde_pmf, alpha):
    thetas = np.asarray(thetas, dtype=float)
    return CdfCurve(thetas, np.array([sir_cdf(t, m_pmf, mtilde_pmf, alpha) for t in thetas]))


def rate_cdf_curve(rs, typical_joint, n, params, mtilde_pmf):
    rs = np.asarray(rs, dtype=float)
    return CdfCurve(rs, np.atleast_1d(rate_cdf(rs, typical_joint, n, params, mtilde_pmf)))
