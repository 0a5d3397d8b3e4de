"""The H-density H^{p,0}_{q,p} by numerical Mellin inversion, and verifiers.

For balanced parameters (sum A = sum B) the Mellin transform

    M(s) = prod Gamma(A_i s + a_i) / prod Gamma(B_j s + b_j)

behaves like C rho^s s^(-mu) for large |s|, and its inverse

    h(t) = (1 / 2 pi i) int M(s) t^(-s) ds

is supported on (0, rho).  Two contours are offered.  The vertical line
Re s = c is the textbook choice but converges only like u^(-mu).  The default
is a parabola opening to the left,

    s(u) = gamma + lam (1 + i u)^2,   lam = kappa * n / log(rho / t),

which turns the oscillating t^(-s) into a Gaussian-like factor and gives
near machine accuracy with a few dozen nodes.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, comb, loggamma

from ._quadrature import exp_sinh
from .errors import AccuracyWarning, HypothesisError, InputError, PoleError
from .fox_wright import (
    FoxWrightParams,
    convergence_data,
    eval_series,
    psi_moment,
)
from .special_core import log_gamma

LOG_2PI = math.log(2.0 * math.pi)
WARN_LEVEL = 1e-6

# Stirling branch of the scaled log-Mellin transform
_STIRLING_TERMS = 12
_STIRLING_MIN_ABS = 40.0


@dataclass(frozen=True)
class ContourSpec:
    """Inversion contour.

    ``kind="parabola"`` uses ``nodes``, ``kappa`` and ``umax``; ``kind="line"``
    uses ``offset`` (None picks max(gamma + 1, 1)), ``half_length`` and ``step``.
    """

    kind: str = "parabola"
    nodes: int = 48
    kappa: float = 1.0 / 16.0
    umax: float = 4.0
    offset: float | None = None
    half_length: float = 200.0
    step: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in ("parabola", "line"):
            raise InputError(f"unknown contour kind {self.kind!r}")
        if self.kind == "line":
            ratio = self.half_length / self.step
            if self.half_length <= 0 or self.step <= 0 or abs(ratio - round(ratio)) > 1e-9:
                raise InputError("line contour needs half_length/step to be a positive integer")
        elif self.nodes < 8 or self.kappa <= 0 or self.umax <= 0:
            raise InputError("parabola contour needs nodes >= 8 and positive kappa, umax")


@dataclass(frozen=True)
class HDensitySpec:
    params: FoxWrightParams
    contour: ContourSpec = field(default_factory=ContourSpec)

    def __post_init__(self) -> None:
        conv = convergence_data(self.params)
        if not conv.balanced:
            raise HypothesisError("H-density requires balanced weights (sum A = sum B)")
        if not conv.mu > 0.0:
            raise HypothesisError(f"H-density requires mu > 0, got mu = {conv.mu:.12g}")
        if self.contour.kind == "line" and self.contour.offset is not None:
            if self.contour.offset <= conv.gamma_pole:
                raise PoleError("line contour must pass to the right of every pole")

    @property
    def rho(self) -> float:
        return convergence_data(self.params).rho


# --------------------------------------------------------------------------
# Mellin transform


@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(n: int) -> np.ndarray:
    """Coefficients of B_n(x) in increasing powers."""
    b = bernoulli(n)
    return np.array([comb(n, k, exact=False) * b[n - k] for k in range(n + 1)])


@lru_cache(maxsize=256)
def _stirling_data(params: FoxWrightParams):
    """Constant and correction coefficients of the scaled log-Mellin expansion."""
    const = 0.5 * (params.p - params.q) * LOG_2PI
    const += math.fsum(
        [(x.shift - 0.5) * math.log(x.weight) for x in params.upper]
        + [-(x.shift - 0.5) * math.log(x.weight) for x in params.lower]
    )
    # sum over pairs of (+-) (-1)^(k+1) B_{k+1}(a) / (k (k+1) A^k), k = 1..K
    corr = np.zeros(_STIRLING_TERMS + 1)
    for sign, pairs in ((1.0, params.upper), (-1.0, params.lower)):
        for x in pairs:
            for k in range(1, _STIRLING_TERMS + 1):
                bk = np.polyval(_bernoulli_poly_coeffs(k + 1)[::-1], x.shift)
                corr[k] += sign * (-1) ** (k + 1) * bk / (k * (k + 1) * x.weight**k)
    max_shift = max(x.shift for x in params.upper + params.lower)
    min_weight = min(x.weight for x in params.upper + params.lower)
    return const, corr, max_shift, min_weight


def log_mellin(params: FoxWrightParams, s) -> np.ndarray:
    """log M(s), principal branches summed, no pole check."""
    s = np.asarray(s, dtype=complex)
    out = np.zeros_like(s)
    for x in params.upper:
        out += loggamma(x.weight * s + x.shift)
    for x in params.lower:
        out -= loggamma(x.weight * s + x.shift)
    return out


def log_mellin_scaled(params: FoxWrightParams, s) -> np.ndarray:
    """log M(s) - s log(rho) for balanced params, stable for huge |s|.

    Far from the origin the linear-in-s parts of the individual Stirling
    series cancel exactly, leaving -mu log s + const + O(1/s); that branch is
    used wherever it is accurate, the direct log-gamma sum elsewhere.
    """
    s = np.asarray(s, dtype=complex)
    conv = convergence_data(params)
    const, corr, max_shift, min_weight = _stirling_data(params)
    big = (np.abs(s) * min_weight >= max(_STIRLING_MIN_ABS, 3.0 * max_shift**2)) & (
        (s.real > 0) | (np.abs(s.imag) * min_weight >= 6.0)
    )
    out = np.empty_like(s)
    if np.any(~big):
        small = s[~big]
        out[~big] = log_mellin(params, small) - small * math.log(conv.rho)
    if np.any(big):
        sb = s[big]
        inv = 1.0 / sb
        series = np.zeros_like(sb)
        for k in range(_STIRLING_TERMS, 0, -1):
            series = (series + corr[k]) * inv
        out[big] = -conv.mu * np.log(sb) + const + series
    return out


def mellin_integrand(params: FoxWrightParams, s: complex) -> complex:
    """prod Gamma(A_i s + a_i) / prod Gamma(B_j s + b_j)."""
    s = complex(s)
    gamma_pole = convergence_data(params).gamma_pole
    if s.real <= gamma_pole:
        raise PoleError(f"Re(s) = {s.real:.12g} is not to the right of the pole at {gamma_pole:.12g}")
    return complex(np.exp(log_mellin(params, s)))


# --------------------------------------------------------------------------
# inversion


def _parabola_sum(params: FoxWrightParams, log_ratio: np.ndarray, contour: ContourSpec, nodes: int):
    """Inverse Mellin transform at t = rho * exp(-log_ratio), log_ratio > 0."""
    gamma_pole = convergence_data(params).gamma_pole
    h = 2.0 * contour.umax / nodes
    u = -contour.umax + h * (np.arange(nodes) + 0.5)
    L = log_ratio[:, None]
    lam = contour.kappa * nodes / L
    w = 1.0 + 1j * u[None, :]
    s = gamma_pole + lam * w * w
    ds = 2j * lam * w
    integrand = np.exp(log_mellin_scaled(params, s) + s * L) * ds
    total = integrand.sum(axis=1) * h / (2j * math.pi)
    return total


def _line_sum(params: FoxWrightParams, log_ratio: np.ndarray, contour: ContourSpec):
    conv = convergence_data(params)
    c = contour.offset if contour.offset is not None else max(conv.gamma_pole + 1.0, 1.0)
    n_half = int(round(contour.half_length / contour.step))
    u = contour.step * np.arange(-n_half, n_half + 1)
    weights = np.full(u.size, contour.step)
    weights[0] = weights[-1] = 0.5 * contour.step
    s = c + 1j * u
    lm = log_mellin_scaled(params, s)
    L = log_ratio[:, None]
    integrand = np.exp(lm[None, :] + s[None, :] * L)
    total = (integrand * weights).sum(axis=1) / (2.0 * math.pi)
    # remainder of |M| ~ |u|^-mu beyond T
    edge = float(np.abs(np.exp(lm[-1])))
    if conv.mu > 1.0:
        remainder = edge * contour.half_length / ((conv.mu - 1.0) * math.pi)
    else:
        remainder = math.inf
    return total, remainder * np.exp(c * log_ratio)


@dataclass
class DensityEvaluation:
    values: np.ndarray
    error: np.ndarray
    imag: np.ndarray


def density_from_log_ratio(spec: HDensitySpec, log_ratio, estimate_error: bool = True) -> DensityEvaluation:
    """Density at t = rho * exp(-log_ratio); log_ratio > 0 avoids forming t near rho."""
    L = np.atleast_1d(np.asarray(log_ratio, dtype=float))
    if np.any(~(L > 0)):
        raise InputError("log_ratio must be positive")
    contour = spec.contour
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        if contour.kind == "parabola":
            main = _parabola_sum(spec.params, L, contour, contour.nodes)
            if estimate_error:
                alt = _parabola_sum(spec.params, L, contour, contour.nodes + contour.nodes // 2)
                err = np.abs(alt.real - main.real)
            else:
                err = np.zeros(L.size)
        else:
            main, err = _line_sum(spec.params, L, contour)
    # the density at t is real; the imaginary part is pure rounding
    return DensityEvaluation(values=main.real, error=err, imag=main.imag)


def h_density(spec: HDensitySpec, t, warn: bool = True):
    """H-density at ``t`` (scalar or array); exactly zero for t >= rho.

    An ``AccuracyWarning`` is issued when the error estimate of any value
    exceeds 1e-6 (absolute, or relative when the value is larger than one).
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_flat = np.atleast_1d(t_arr).ravel()
    if np.any(~(t_flat > 0)):
        raise InputError("h_density needs t > 0")
    rho = spec.rho
    out = np.zeros(t_flat.size)
    inside = t_flat < rho
    if np.any(inside):
        ev = density_from_log_ratio(spec, np.log(rho / t_flat[inside]))
        out[inside] = ev.values
        bad = ev.error > WARN_LEVEL * np.maximum(1.0, np.abs(ev.values))
        if warn and (np.any(bad) or not np.all(np.isfinite(ev.values))):
            warnings.warn(
                f"H-density error estimate up to {float(np.nanmax(ev.error)):.3g}",
                AccuracyWarning,
                stacklevel=2,
            )
    if scalar:
        return float(out[0])
    return out.reshape(t_arr.shape)


# --------------------------------------------------------------------------
# measure integrals  int_0^rho g(t) h(t) dt / t


@dataclass
class MeasureIntegral:
    value: float
    error: float
    warnings: list[str]


def integrate_against_density(spec: HDensitySpec, g, rtol: float = 1e-11) -> MeasureIntegral:
    """int_0^rho g(t) h(t) dt/t with t = rho e^(-L), so dt/t = dL on (0, inf).

    ``g`` must accept a numpy array of t values.
    """
    rho = spec.rho
    notes: list[str] = []

    def integrand(L):
        out = np.zeros(L.shape)
        ok = L < 5e3
        if np.any(ok):
            ev = density_from_log_ratio(spec, L[ok], estimate_error=False)
            out[ok] = g(rho * np.exp(-L[ok])) * ev.values
        return out

    res = exp_sinh(integrand, rtol=rtol, atol=1e-300)
    if not res.converged:
        notes.append(f"quadrature change {res.error:.3g} above rtol={rtol:g}")
    probe = np.array([1e-12, 1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0])
    worst = float(np.max(density_from_log_ratio(spec, probe).error))
    if worst > WARN_LEVEL:
        notes.append(f"density error estimate {worst:.3g}")
    return MeasureIntegral(res.value, res.error, notes)


# --------------------------------------------------------------------------
# verifiers


@dataclass
class Residual:
    series: float
    integral: float
    abs_residual: float
    rel_residual: float
    warnings: list[str] = field(default_factory=list)

    @classmethod
    def compare(cls, series: float, integral: float, notes=None) -> "Residual":
        diff = abs(series - integral)
        scale = max(abs(series), abs(integral))
        rel = diff / scale if scale > 0 else 0.0
        return cls(float(series), float(integral), float(diff), float(rel), list(notes or []))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_laplace_rep(spec: HDensitySpec, z: float) -> Residual:
    """Series value at z against int_0^rho e^(z t) h(t) dt / t."""
    z = float(z)
    series = eval_series(spec.params, z)
    m = integrate_against_density(spec, lambda t: np.exp(z * t))
    return Residual.compare(series, m.value, m.warnings)


def verify_moment(spec: HDensitySpec, k: int) -> Residual:
    """int_0^rho t^k h(t) dt / t against psi_{0,k}."""
    m = integrate_against_density(spec, lambda t: t**k)
    return Residual.compare(psi_moment(spec.params, 0, k), m.value, m.warnings)


def verify_stieltjes_rep(spec: HDensitySpec, sigma: float, z: float) -> Residual:
    """(sigma,1)-prepended series at -z against Gamma(sigma) int (1 + t z)^(-sigma) h dt/t."""
    sigma = float(sigma)
    z = float(z)
    if sigma <= 0:
        raise InputError("sigma must be positive")
    if not 0.0 <= z < 1.0:
        raise InputError("z must lie in [0, 1)")
    series = eval_series(spec.params.prepend_upper(sigma, 1.0), -z)
    m = integrate_against_density(spec, lambda t: (1.0 + t * z) ** (-sigma))
    return Residual.compare(series, math.exp(log_gamma(sigma)) * m.value, m.warnings)


def stieltjes_value(spec: HDensitySpec, sigma: float, z: float) -> MeasureIntegral:
    """Gamma(sigma) int (1 + t z)^(-sigma) h(t) dt / t for any z >= 0."""
    m = integrate_against_density(spec, lambda t: (1.0 + t * z) ** (-sigma))
    scale = math.exp(log_gamma(sigma))
    return MeasureIntegral(scale * m.value, scale * m.error, m.warnings)


def _half_line_integral(f, log_weight, rtol: float = 1e-11):
    """int_0^inf f(t) dt for f vectorised over numpy arrays.

    ``log_weight(t)`` is a cheap envelope of log|f| for t >= 1; nodes beyond 1
    where it falls 45 e-folds below its largest value are skipped instead of
    evaluated.
    """
    ref = float(np.max(log_weight(np.logspace(0.0, 5.0, 400))))

    def integrand(t):
        keep = t <= 1.0
        keep[~keep] = log_weight(t[~keep]) > ref - 45.0
        out = np.zeros(t.shape)
        if np.any(keep):
            out[keep] = f(t[keep])
        return out

    res = exp_sinh(integrand, rtol=rtol, atol=1e-300)
    notes = [] if res.converged else [f"quadrature change {res.error:.3g} above rtol={rtol:g}"]
    return res.value, res.error, notes


def _vectorise(fun):
    return lambda t: np.array([fun(float(x)) for x in np.atleast_1d(t)])


def verify_reciprocal_laplace(params: FoxWrightParams, z: float) -> Residual:
    """Series at 1/z against psi_00 + int_0^inf e^(-z t) W(t) dt.

    W is the series with shifts moved by one weight step and an extra lower
    pair (2, 1), i.e. sum_k psi_{0,k+1} t^k / (k! (k+1)!).
    """
    z = float(z)
    if z <= 0:
        raise InputError("z must be positive")
    series = eval_series(params, 1.0 / z)
    inner = FoxWrightParams(
        [(x.shift + x.weight, x.weight) for x in params.upper],
        [(x.shift + x.weight, x.weight) for x in params.lower] + [(2.0, 1.0)],
    )
    conv = convergence_data(inner)
    if conv.radius < math.inf:
        raise HypothesisError("inner series is not entire; the half-line integral cannot be formed")
    w = _vectorise(lambda t: eval_series(inner, t))
    value, _, notes = _half_line_integral(lambda t: np.exp(-z * t) * w(t), lambda t: -z * t + 2.0 * np.sqrt(t))
    total = psi_moment(params, 0, 0) + value
    return Residual.compare(series, total, notes)


def verify_lambda_transform(params: FoxWrightParams, lam: float, omega: float, z: float) -> Residual:
    """z^-lam (lam,1)-prepended series at -omega/z against the Laplace integral.

    The right side is int_0^inf e^(-z t) t^(lam-1) F(-omega t) dt.  The skip
    envelope assumes |F(-x)| stays bounded on the half line, which holds for
    the completely monotonic functions this check is meant for.
    """
    lam, omega, z = float(lam), float(omega), float(z)
    if lam <= 0 or omega < 0 or z <= 0:
        raise InputError("need lam > 0, omega >= 0, z > 0")
    lhs = z ** (-lam) * eval_series(params.prepend_upper(lam, 1.0), -omega / z)
    inner = _vectorise(lambda t: eval_series(params, -omega * t))
    value, _, notes = _half_line_integral(
        lambda t: np.exp(-z * t) * t ** (lam - 1.0) * inner(t),
        lambda t: -z * t + (lam - 1.0) * np.log(t),
    )
    return Residual.compare(lhs, value, notes)


def lambda_transform_value(params: FoxWrightParams, lam: float, x: float) -> tuple[float, list[str]]:
    """(lam,1)-prepended series at -x, computed as int_0^inf e^-t t^(lam-1) F(-x t) dt."""
    inner = _vectorise(lambda t: eval_series(params, -x * t))
    value, _, notes = _half_line_integral(
        lambda t: np.exp(-t) * t ** (lam - 1.0) * inner(t),
        lambda t: -t + (lam - 1.0) * np.log(t),
    )
    return value, notes


def meijer_g_reduction_check(params: FoxWrightParams, t: float, contour: ContourSpec | None = None) -> Residual:
    """Equal-weight density against (1/A) times the unit-weight density at t^(1/A)."""
    weights = {x.weight for x in params.upper + params.lower}
    if len(weights) != 1:
        raise InputError("all weights must be equal")
    a = weights.pop()
    contour = contour or ContourSpec()
    lhs = h_density(HDensitySpec(params, contour), t)
    unit = HDensitySpec(params.with_weights(1.0), contour)
    rhs = h_density(unit, t ** (1.0 / a)) / a
    return Residual.compare(lhs, rhs)
