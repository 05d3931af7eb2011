"""Link budgets and security metrics.

Network: a multi-antenna source S talks to a vehicle receiver R while an
eavesdropper E intercepts; a friendly jammer J degrades E with artificial
noise that the legitimate receiver can cancel.  Per-antenna SNRs on the
S->E and J->E links are Gamma (Nakagami-m powers) with a shared rate per
link, so the combined source and jamming SNRs at E are Gamma with shapes
nu_I = N*m_I and nu_J = K*m_J.  The eavesdropper SINR is
gamma_I / (1 + gamma_J).

The receiver link carries the composite fading models from
:mod:`jamsec.fading`; its ergodic capacity has a contour-integral series
form evaluated through :mod:`jamsec.specfun`.

All quantities here are linear; dB conversion helpers are provided for
the configuration boundary and use the exact 10*log10 pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.integrate
import scipy.special as sc

from .errors import AccuracyError, ConvergenceError, ParameterError
from .fading import (
    DoubleKappaMuShadowedParams,
    GammaSnrParams,
    RicianShadowedParams,
    dksm_pdf,
    gamma_cdf,
    gamma_pdf,
    mixture_cdf,
    rician_shadowed_cdf,
)
from .specfun import BivariateFoxHSpec, MeijerGSpec, fox_h_bivariate, meijer_g

__all__ = [
    "NetworkGeometry",
    "EveLinkParams",
    "OutageQuery",
    "MetricValue",
    "SecrecyReport",
    "db_to_linear",
    "linear_to_db",
    "mean_snr",
    "outage_receiver",
    "eve_sinr_cdf",
    "eve_sinr_cdf_integral",
    "capacity_receiver_quadrature",
    "capacity_receiver_series",
    "capacity_eve_quadrature",
    "capacity_eve_foxh",
    "capacity_gamma_quadrature",
    "secrecy_capacity",
    "eve_link_params_from_geometry",
]

_LN2 = math.log(2.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (float(x_db) / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ParameterError("dB conversion needs a positive linear value")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class NetworkGeometry:
    """Node layout and radio constants.

    K = 0 means no jammer is deployed (the eavesdropper then sees plain
    SNR); closed forms that need a jamming Gamma shape require K >= 1.
    """

    n_bs_antennas: int
    n_jammer_antennas: int
    r_sr: float
    r_se: float
    r_je: float
    delta: float
    p_s: float
    p_j: float
    noise_var_r: float
    noise_var_e: float

    def __post_init__(self):
        if not (isinstance(self.n_bs_antennas, (int, np.integer)) and self.n_bs_antennas >= 1):
            raise ParameterError("n_bs_antennas must be a positive integer")
        if not (isinstance(self.n_jammer_antennas, (int, np.integer)) and self.n_jammer_antennas >= 0):
            raise ParameterError("n_jammer_antennas must be a non-negative integer")
        for name in ("r_sr", "r_se", "r_je"):
            if not (getattr(self, name) > 0):
                raise ParameterError(f"{name} must be positive (meters)")
        if self.delta < 0:
            raise ParameterError("path-loss exponent must be non-negative")
        if self.p_s < 0 or self.p_j < 0:
            raise ParameterError("transmit powers must be non-negative")
        if not (self.noise_var_r > 0 and self.noise_var_e > 0):
            raise ParameterError("noise variances must be positive")


@dataclass(frozen=True)
class EveLinkParams:
    """Gamma shapes/rates of the aggregated S->E and J->E SNRs at E."""

    nu_i: int
    beta_i: float
    nu_j: int
    beta_j: float

    def __post_init__(self):
        for name in ("nu_i", "nu_j"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v >= 1):
                raise ParameterError(f"{name} must be an integer >= 1")
        for name in ("beta_i", "beta_j"):
            if not (getattr(self, name) > 0):
                raise ParameterError(f"{name} must be positive")


@dataclass(frozen=True)
class OutageQuery:
    """Receiver outage request: threshold plus the blockage mixture."""

    zeta: float
    zeta_unit: str
    p_los: float
    los_params: RicianShadowedParams
    nlos_params: RicianShadowedParams

    def __post_init__(self):
        if self.zeta_unit not in ("db", "linear"):
            raise ParameterError("zeta_unit must be 'db' or 'linear'")
        if self.zeta_unit == "linear" and not (self.zeta > 0):
            raise ParameterError("linear threshold must be positive")
        if not (0.0 <= self.p_los <= 1.0):
            raise ParameterError("p_los must lie in [0, 1]")

    @property
    def threshold_linear(self) -> float:
        if self.zeta_unit == "linear":
            return float(self.zeta)
        return db_to_linear(self.zeta)


_METHODS = ("closed-form", "quadrature", "monte-carlo")


@dataclass(frozen=True)
class MetricValue:
    value: float
    method: str
    error: Optional[float] = None

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ParameterError(f"method must be one of {_METHODS}")
        if not math.isfinite(self.value):
            raise ParameterError("metric value must be finite")


@dataclass(frozen=True)
class SecrecyReport:
    """Bundle of the security metrics with per-entry method tags."""

    outage_r: Optional[MetricValue] = None
    outage_e: Optional[MetricValue] = None
    c_r: Optional[MetricValue] = None
    c_e: Optional[MetricValue] = None
    c_s: Optional[MetricValue] = None

    def __post_init__(self):
        for name in ("outage_r", "outage_e"):
            entry = getattr(self, name)
            if entry is not None and not (-1e-12 <= entry.value <= 1.0 + 1e-12):
                raise ParameterError(f"{name} must be a probability")
        if self.c_r is not None and self.c_e is not None and self.c_s is not None:
            want = secrecy_capacity(self.c_r.value, self.c_e.value)
            if abs(self.c_s.value - want) > 1e-9 + 1e-9 * abs(want):
                raise ParameterError("c_s entry is inconsistent with c_r and c_e")


# ---------------------------------------------------------------------------
# link budget


def mean_snr(p: float, r: float, delta: float, noise_var: float) -> float:
    """Average received SNR P * r^(-delta) / noise_var."""
    if not (p > 0):
        raise ParameterError("transmit power must be positive")
    if not (r > 0):
        raise ParameterError("distance must be positive")
    if delta < 0:
        raise ParameterError("path-loss exponent must be non-negative")
    if not (noise_var > 0):
        raise ParameterError("noise variance must be positive")
    return p * r ** (-delta) / noise_var


def eve_link_params_from_geometry(g: NetworkGeometry, m_i: int, m_j: int) -> EveLinkParams:
    """Aggregate per-antenna Nakagami-m links at the eavesdropper.

    Shapes add across antennas; the common Gamma rate is shape over the
    per-antenna mean SNR.
    """
    for name, v in (("m_i", m_i), ("m_j", m_j)):
        if not (isinstance(v, (int, np.integer)) and v >= 1):
            raise ParameterError(f"{name} must be an integer >= 1")
    if g.n_jammer_antennas < 1:
        raise ParameterError("jamming link requires at least one jammer antenna")
    snr_i = mean_snr(g.p_s, g.r_se, g.delta, g.noise_var_e)
    snr_j = mean_snr(g.p_j, g.r_je, g.delta, g.noise_var_e)
    return EveLinkParams(
        nu_i=int(g.n_bs_antennas) * int(m_i),
        beta_i=m_i / snr_i,
        nu_j=int(g.n_jammer_antennas) * int(m_j),
        beta_j=m_j / snr_j,
    )


# ---------------------------------------------------------------------------
# receiver outage


def outage_receiver(q: OutageQuery, gamma_th: Optional[float] = None) -> float:
    """Blockage-weighted outage probability of the receiver link."""
    th = q.threshold_linear if gamma_th is None else float(gamma_th)
    if not (th > 0):
        raise ParameterError("gamma_th must be positive")
    f_los = rician_shadowed_cdf(q.los_params, th)
    f_nlos = rician_shadowed_cdf(q.nlos_params, th)
    return float(mixture_cdf(q.p_los, f_los, f_nlos))


# ---------------------------------------------------------------------------
# eavesdropper SINR distribution


def eve_sinr_cdf(p: EveLinkParams, gamma):
    """Closed-form SINR CDF at the eavesdropper.

    Survival form: each (n, q) term is assembled in log space, so large
    shape/rate combinations neither overflow nor lose the e^{-x} x^n
    balance.  Vectorized over gamma.
    """
    g = np.asarray(gamma, dtype=float)
    scalar = g.ndim == 0
    g = np.atleast_1d(g)
    if np.any(g < 0):
        raise ParameterError("gamma must be non-negative")

    out = np.zeros_like(g)
    pos = g > 0
    if np.any(pos):
        x = p.beta_i * g[pos]
        lnx = np.log(x)
        base = p.nu_j * math.log(p.beta_j) - sc.gammaln(p.nu_j)
        shifted = np.log(x + p.beta_j)
        survival = np.zeros_like(x)
        for n in range(p.nu_i):
            for q in range(n + 1):
                omega = q + p.nu_j
                ln_term = (
                    base
                    - x
                    + n * lnx
                    - sc.gammaln(n + 1)
                    + _ln_binom(n, q)
                    + sc.gammaln(omega)
                    - omega * shifted
                )
                survival += np.exp(ln_term)
        out[pos] = np.clip(1.0 - survival, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _ln_binom(n: int, q: int) -> float:
    return sc.gammaln(n + 1) - sc.gammaln(q + 1) - sc.gammaln(n - q + 1)


def eve_sinr_cdf_integral(p: EveLinkParams, gamma) -> float:
    """Defining-integral oracle: E_{gamma_J}[ F_I(gamma * (1 + gamma_J)) ]."""
    gamma = float(gamma)
    if gamma < 0:
        raise ParameterError("gamma must be non-negative")
    if gamma == 0.0:
        return 0.0
    f_i = GammaSnrParams(p.nu_i, p.beta_i)
    f_j = GammaSnrParams(p.nu_j, p.beta_j)

    def integrand(y):
        return gamma_cdf(f_i, gamma * (1.0 + y)) * gamma_pdf(f_j, y)

    val, err = scipy.integrate.quad(
        integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400
    )
    if err > max(1e-11, 1e-9 * abs(val)):
        raise AccuracyError(
            "SINR CDF integral did not reach tolerance", best=val, error_estimate=err
        )
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# receiver ergodic capacity


def capacity_receiver_quadrature(p: DoubleKappaMuShadowedParams) -> float:
    """E[log2(1 + gamma)] by adaptive quadrature of the receiver density.

    Integrates in u = ln(gamma): the substitution removes the power-law
    endpoint at zero and compresses the heavy tail.
    """
    knee = math.log((p.s - 1.0) * p.mean_snr / p.big_t)
    u_lo = knee - 60.0 / p.mu - 5.0
    u_hi = knee + 85.0 / (p.s - 1.0) + 15.0

    def integrand(u):
        t = math.exp(u)
        return math.log1p(t) / _LN2 * dksm_pdf(p, t) * t

    val, err = scipy.integrate.quad(
        integrand, u_lo, u_hi, points=[knee], limit=400, epsabs=1e-12, epsrel=1e-10
    )
    if err > max(1e-8, 1e-6 * abs(val)):
        raise AccuracyError(
            "receiver capacity quadrature did not reach tolerance",
            best=val,
            error_estimate=err,
        )
    return max(val, 0.0)


def capacity_receiver_series(
    p: DoubleKappaMuShadowedParams,
    rel_tol: float = 1e-10,
    max_terms: int = 500,
) -> float:
    """Receiver ergodic capacity as a hypergeometric-coefficient series of
    contour integrals.

    Term i carries a G(3,2;3,3) contour factor with parameter rows built
    from alpha = mu + i and eta = i + s + mu; the full coefficient
    (pochhammers, powers, 1/Gamma(eta), 1/Phi^eta) is folded into the
    contour integrand in log space so individual factors never overflow
    even when eta runs into the hundreds.
    """
    c, s, mu, kappa = p.c, p.s, p.mu, p.kappa
    phi = (s - 1.0) * p.mean_snr
    big_t = p.big_t
    z = big_t / phi

    ln_amp = (
        s * math.log(phi)
        + mu * math.log(big_t)
        + c * math.log(c / (c + mu * kappa))
        - sc.betaln(s, mu)
        - math.log(_LN2)
    )
    ln_ratio = (
        math.log(big_t) + math.log(mu * kappa) - math.log(c + mu * kappa)
        if kappa > 0
        else -math.inf
    )

    total = 0.0
    total_err = 0.0
    streak = 0
    lp_c = 0.0      # ln (c)_i
    lp_smu = 0.0    # ln (s+mu)_i
    lp_mu = 0.0     # ln (mu)_i
    ln_pow = 0.0    # i * ln(K mu kappa)
    n_terms = max_terms if kappa > 0 else 1
    for i in range(n_terms):
        alpha = mu + i
        eta = i + s + mu
        ln_coef = (
            ln_amp
            + lp_c
            + lp_smu
            + ln_pow
            - sc.gammaln(i + 1)
            - lp_mu
            - sc.gammaln(eta)
            - eta * math.log(phi)
        )
        spec = MeijerGSpec(
            m=3,
            n=2,
            p=3,
            q=3,
            a_params=(1.0 - eta, -alpha, 1.0 - alpha),
            b_params=(0.0, -alpha, -alpha),
        )
        term, err = meijer_g(spec, z, log_prefactor=ln_coef)
        total += term
        total_err += err
        if abs(term) <= rel_tol * max(abs(total), 1e-300):
            streak += 1
            if streak >= 3:
                break
        else:
            streak = 0
        lp_c += math.log(c + i)
        lp_smu += math.log(s + mu + i)
        lp_mu += math.log(mu + i)
        ln_pow += ln_ratio
    else:
        if kappa > 0:
            raise ConvergenceError(
                f"capacity series did not settle in {max_terms} terms",
                partial=total,
                terms=max_terms,
            )
    if total_err > max(1e-9, 1e-4 * abs(total)):
        raise AccuracyError(
            "capacity series contour error too large",
            best=total,
            error_estimate=total_err,
        )
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# eavesdropper ergodic capacity


def capacity_eve_quadrature(p: EveLinkParams) -> float:
    """E[log2(1 + SINR)] at the eavesdropper via the survival-function
    identity, one 1-D adaptive quadrature per (n, q) term."""
    base = p.nu_j * math.log(p.beta_j) - sc.gammaln(p.nu_j) - math.log(_LN2)
    total = 0.0
    total_err = 0.0
    for n in range(p.nu_i):
        for q in range(n + 1):
            omega = q + p.nu_j
            ln_coef = (
                base
                + _ln_binom(n, q)
                + sc.gammaln(omega)
                + n * math.log(p.beta_i)
                - sc.gammaln(n + 1)
            )

            def integrand(t, n=n, omega=omega, ln_coef=ln_coef):
                if t == 0.0:
                    return 0.0 if n > 0 else math.exp(
                        ln_coef - omega * math.log(p.beta_j)
                    )
                return math.exp(
                    ln_coef
                    + n * math.log(t)
                    - p.beta_i * t
                    - omega * math.log(p.beta_i * t + p.beta_j)
                    - math.log1p(t)
                )

            val, err = scipy.integrate.quad(
                integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=400
            )
            total += val
            total_err += err
    if total_err > max(1e-9, 1e-6 * abs(total)):
        raise AccuracyError(
            "eavesdropper capacity quadrature did not reach tolerance",
            best=total,
            error_estimate=total_err,
        )
    return max(total, 0.0)


def capacity_eve_foxh(p: EveLinkParams) -> float:
    """Eavesdropper ergodic capacity assembled from the fixed bivariate
    contour kernel, one (n, q) term per kernel evaluation.

    The (n, q) coefficient 1/(ln2 Gamma(nu_J) n! beta_I beta_J^q) times
    binom(n, q) folds into the kernel in log space.
    """
    base = -math.log(_LN2) - sc.gammaln(p.nu_j) - math.log(p.beta_i)
    x = 1.0 / p.beta_i
    y = 1.0 / p.beta_j
    total = 0.0
    total_err = 0.0
    for n in range(p.nu_i):
        for q in range(n + 1):
            omega = q + p.nu_j
            ln_coef = (
                base
                + _ln_binom(n, q)
                - sc.gammaln(n + 1)
                - q * math.log(p.beta_j)
            )
            spec = BivariateFoxHSpec(n=n, omega=float(omega))
            val, err = fox_h_bivariate(spec, x, y, log_prefactor=ln_coef)
            total += val
            total_err += err
    if total_err > max(1e-9, 1e-4 * abs(total)):
        raise AccuracyError(
            "eavesdropper capacity contour error too large",
            best=total,
            error_estimate=total_err,
        )
    return max(total, 0.0)


def capacity_gamma_quadrature(p: GammaSnrParams) -> float:
    """E[log2(1 + gamma)] for a plain Gamma SNR (jammer-free paths)."""

    def integrand(t):
        return math.log1p(t) / _LN2 * gamma_pdf(p, t)

    val, err = scipy.integrate.quad(
        integrand, 0.0, np.inf, epsabs=1e-12, epsrel=1e-10, limit=400
    )
    if err > max(1e-8, 1e-6 * abs(val)):
        raise AccuracyError(
            "capacity quadrature did not reach tolerance", best=val, error_estimate=err
        )
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# secrecy


def secrecy_capacity(c_r: float, c_e: float) -> float:
    """Average secrecy capacity floor-limited at zero."""
    c_r = float(c_r)
    c_e = float(c_e)
    if not (math.isfinite(c_r) and math.isfinite(c_e)):
        raise ParameterError("capacities must be finite")
    if c_r < 0 or c_e < 0:
        raise ParameterError("capacities must be non-negative")
    return max(c_r - c_e, 0.0)
