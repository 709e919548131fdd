"""Complex log-gamma, gamma-ratio products, Pochhammer symbols, and the
K-Bessel function of purely imaginary order.

The K-Bessel function has two independent backends:

* backend A integrates ``K_mu(x) = int_0^inf exp(-x cosh t) cos(|mu| t) dt``
  (real for imaginary order) with the trapezoid rule.  When the order is
  large compared to the argument, the same integral is evaluated on the
  Cauchy-equivalent horizontal contour ``t = s + i*theta``; this pulls the
  exp(-pi|mu|/2) amplitude out as an explicit prefactor instead of losing
  it to cancellation between O(1) samples.

* backend B inverts the Mellin transform
  ``4 K_mu(2 pi y) = (1/2 pi i) int Gamma((s+mu)/2) Gamma((s-mu)/2) (pi y)^-s ds``
  on a vertical line, through the quadrature module.

Both backends are kept live and are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, PoleError, UnderflowError
from .scaled import ScaledComplex

__all__ = [
    "GammaRatioSpec",
    "BesselOrder",
    "log_gamma",
    "gamma_ratio",
    "pochhammer",
    "bessel_k",
    "bessel_k_prime",
    "bessel_k_scaled",
    "bessel_k_prime_scaled",
    "bessel_k_mellin",
]

_LOG_2PI = math.log(2.0 * math.pi)
_POLE_TOL = 1e-12

# B_{2k} / (2k (2k-1)): coefficients of the Stirling series for log Gamma.
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
)

# Upward recursion shifts arguments at least this far right before the
# asymptotic series is applied; at |z| >= 12 the truncation error of the
# ten-term series is below 1e-20.
_STIRLING_EDGE = 12.0


def _pole_distance(z: np.ndarray) -> np.ndarray:
    """Distance from each point to the nearest non-positive integer."""
    n = np.minimum(np.round(z.real), 0.0)
    return np.abs(z - n)


def _log_gamma_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    if np.any(_pole_distance(z) < _POLE_TOL):
        raise PoleError("log_gamma evaluated at a non-positive integer")
    w = z.copy()
    acc = np.zeros(z.shape, dtype=np.complex128)
    # shift every argument to Re >= _STIRLING_EDGE
    while True:
        mask = w.real < _STIRLING_EDGE
        if not mask.any():
            break
        acc[mask] += np.log(w[mask])
        w[mask] += 1.0
    r = 1.0 / w
    r2 = r * r
    s = np.zeros(z.shape, dtype=np.complex128)
    for c in reversed(_STIRLING):
        s = (s + c) * r2
    s /= r  # sum c_k / w^(2k-1)
    return (w - 0.5) * np.log(w) - w + 0.5 * _LOG_2PI + s - acc


def log_gamma(s):
    """log Gamma(s) for complex s (scalar or ndarray), exp-accurate to
    ~1e-14 relative for |s| <= 50.

    Computed with the Stirling asymptotic series after upward recursion
    into Re(s) >= 12.  The result is the branch obtained by subtracting
    the logs of the recursion factors; its exponential always equals
    Gamma(s).

    Raises PoleError within 1e-12 of a non-positive integer.
    """
    if isinstance(s, np.ndarray):
        return _log_gamma_array(s)
    return complex(_log_gamma_array(np.asarray([s]))[0])


@dataclass(frozen=True)
class GammaRatioSpec:
    """Product of gamma values over a product of gamma values.

    Empty lists are allowed; the empty ratio is 1.
    """

    numerators: tuple = field(default_factory=tuple)
    denominators: tuple = field(default_factory=tuple)

    def __init__(self, numerators: Sequence[complex] = (), denominators: Sequence[complex] = ()):
        object.__setattr__(self, "numerators", tuple(complex(v) for v in numerators))
        object.__setattr__(self, "denominators", tuple(complex(v) for v in denominators))


def gamma_ratio(spec: GammaRatioSpec) -> ScaledComplex:
    """Evaluate Gamma(a_1)...Gamma(a_n) / (Gamma(b_1)...Gamma(b_k)) in
    scaled form.

    A pole in a numerator raises PoleError; a pole in a denominator makes
    the ratio exactly zero.
    """
    for b in spec.denominators:
        n = min(round(b.real), 0)
        if abs(b - n) < _POLE_TOL:
            return ScaledComplex.zero()
    total = 0j
    for a in spec.numerators:
        total += log_gamma(a)
    for b in spec.denominators:
        total -= log_gamma(b)
    return ScaledComplex.from_log(total)


def pochhammer(x: complex, n: int) -> complex:
    """Rising factorial x (x+1) ... (x+n-1); equals 1 for n = 0."""
    if n < 0:
        raise ValueError("pochhammer order must be a natural number")
    out = 1 + 0j
    x = complex(x)
    for k in range(n):
        out *= x + k
    return out


# ---------------------------------------------------------------------------
# K-Bessel function of imaginary order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BesselOrder:
    """Order mu of K_mu; must be purely imaginary (|Re mu| <= 1e-12)."""

    mu: complex

    def __post_init__(self):
        mu = complex(self.mu)
        if abs(mu.real) > 1e-12:
            raise DomainError(f"K-Bessel order must be purely imaginary, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def t(self) -> float:
        """|Im mu|; K is even in the order."""
        return abs(self.mu.imag)


def _as_order(mu) -> BesselOrder:
    if isinstance(mu, BesselOrder):
        return mu
    return BesselOrder(complex(mu))


# Ratio log(max integrand / result) above which the plain real-axis rule
# loses too many digits and the shifted contour takes over.
_SHIFT_THRESHOLD = 8.0
# Contour sits at theta = pi/2 - _SHIFT_MARGIN/m, keeping the residual
# cancellation on the shifted line near exp(_SHIFT_MARGIN).
_SHIFT_MARGIN = 2.0
# log(1/eps) style truncation depth for the integrand tails.
_TAIL_LOG = 46.0


def _bessel_plain(m: float, x: float, derivative: bool) -> ScaledComplex:
    """Real-axis trapezoid sum for K_{im}(x), scaled by exp(x).

    Integrand exp(-x(cosh t - 1)) cos(m t) decays doubly exponentially;
    uniform step min(1/64, 1/(4m)) resolves the cosine.
    """
    h = 1.0 / 64.0
    if m > 0:
        h = min(h, 1.0 / (4.0 * m))
    t_max = math.acosh(1.0 + (_TAIL_LOG + 4.0) / x)
    n = int(math.ceil(t_max / h)) + 2
    t = np.arange(n + 1) * h
    envelope = np.exp(-x * (np.cosh(t) - 1.0))
    g = envelope * np.cos(m * t)
    if derivative:
        g = -np.cosh(t) * g
    g[0] *= 0.5
    val = h * math.fsum(g)
    return ScaledComplex(complex(val), -x)


def _bessel_shifted(m: float, x: float, derivative: bool) -> ScaledComplex:
    """Trapezoid sum for K_{im}(x) on the line Im t = theta < pi/2.

    K_{im}(x) = (1/2) int_R exp(-x cosh t + i m t) dt; pushing the whole
    line up to t = s + i theta multiplies the integrand by exp(-m theta)
    and leaves the envelope exp(-x cos(theta) cosh s), which removes the
    exp(-pi m / 2) cancellation of the real-axis form.
    """
    eps = _SHIFT_MARGIN / m
    cos_t = math.sin(eps)   # cos(theta) for theta = pi/2 - eps
    sin_t = math.cos(eps)
    xc = x * cos_t
    cosh_smax = 1.0 + (_TAIL_LOG + 6.0) / xc
    s_max = math.acosh(cosh_smax)
    # aliasing bound: shifting the line by iv maps theta -> theta + v, so
    # |f| <= exp(-m v) for 0 < v < eps and <= exp(m|v|) below; the step
    # must beat both exp(-(2 pi/h) 0.9 eps) and exp(-(2 pi/h - m) * 1)
    h = min(1.0 / 64.0, eps / 10.0, 2.0 * math.pi / (m + _TAIL_LOG + 10.0))
    n = int(math.ceil(s_max / h)) + 2
    s = np.arange(-n, n + 1) * h
    cosh_s = np.cosh(s)
    sinh_s = np.sinh(s)
    phase = m * s - x * sin_t * sinh_s
    w = np.exp(-xc * (cosh_s - 1.0)) * (np.cos(phase) + 1j * np.sin(phase))
    if derivative:
        w = -(cosh_s * cos_t + 1j * sinh_s * sin_t) * w
    val = 0.5 * h * complex(math.fsum(w.real), math.fsum(w.imag))
    # the imaginary part of the full-line integral vanishes analytically
    return ScaledComplex(complex(val.real), -m * (0.5 * math.pi - eps) - xc)


def _bessel_backend_a(mu, x: float, derivative: bool) -> ScaledComplex:
    order = _as_order(mu)
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"K-Bessel argument must be positive, got {x}")
    m = order.t
    if m > 4.0 and 0.5 * math.pi * m - x > _SHIFT_THRESHOLD:
        return _bessel_shifted(m, x, derivative)
    return _bessel_plain(m, x, derivative)


def bessel_k_scaled(mu, x: float) -> ScaledComplex:
    """K_mu(x) for purely imaginary mu, in scaled form (backend A).

    Real-valued; exact magnitude is mantissa * exp(log_scale), which stays
    representable even deep in the exponential tail.
    """
    return _bessel_backend_a(mu, x, derivative=False)


def bessel_k_prime_scaled(mu, x: float) -> ScaledComplex:
    """d/dx K_mu(x) in scaled form, from the differentiated integrand."""
    return _bessel_backend_a(mu, x, derivative=True)


def _scaled_to_float(sc: ScaledComplex, mu, x: float) -> float:
    la = sc.log_abs()
    if la < -744.0:
        m = _as_order(mu).t
        raise UnderflowError(
            f"exp(pi|mu|/2) K scale exp({la + 0.5 * math.pi * m:.1f}) below binary64 "
            f"range at x={x:g}; use bessel_k_scaled")
    return sc.to_complex().real


def bessel_k(mu, x: float) -> float:
    """K_mu(x) for purely imaginary mu and x > 0, as a plain float.

    Raises UnderflowError once the value leaves binary64 range; the
    scaled variant has no such restriction.
    """
    return _scaled_to_float(bessel_k_scaled(mu, x), mu, x)


def bessel_k_prime(mu, x: float) -> float:
    """d/dx K_mu(x) as a plain float."""
    return _scaled_to_float(bessel_k_prime_scaled(mu, x), mu, x)


def bessel_k_mellin(mu, x: float, h: float = 0.125, sigma: float | None = None) -> float:
    """K_mu(x) through the vertical-line inverse Mellin transform
    (backend B; independent of the cosh-integral backend).

    The line Re s = sigma defaults to max(2, x - |mu|), which keeps the
    largest term of the sum near the size of the result: for |mu| >= x the
    line wants to hug the pole lines, while for x >> |mu| it moves right
    toward the saddle of Gamma(s/2)^2 (x/2)^(-s).
    """
    from .quadrature import QuadratureGrid, inverse_mellin_line

    order = _as_order(mu)
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"K-Bessel argument must be positive, got {x}")
    if sigma is None:
        sigma = max(2.0, float(x) - order.t)
    mu_c = order.mu

    def transform(s: complex) -> ScaledComplex:
        return gamma_ratio(GammaRatioSpec([(s + mu_c) / 2.0, (s - mu_c) / 2.0]))

    # plateau of the gamma product extends to |t| ~ 2|mu|; beyond it the
    # terms decay like exp(-pi(|t|-2m)/4) per gamma pair
    m = order.t
    peak = transform(complex(sigma)).log_abs()
    n_max = int((2.0 * m + 4.0 * (_TAIL_LOG + 8.0) / math.pi + 20.0) / h) + 8
    grid = QuadratureGrid(h=h, sigma=sigma, N=n_max,
                          stop_threshold=math.exp(peak - _TAIL_LOG - 6.0),
                          stop_run=8)
    # 4 K_mu(2 pi y) = (1/2 pi i) int GG (pi y)^(-s) ds, so the plain
    # y^(-s) line sum is called at pi y = x/2
    val = inverse_mellin_line(transform, x / 2.0, grid)
    return 0.25 * val.to_complex().real
