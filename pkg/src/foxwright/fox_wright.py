"""Fox-Wright parameter model, convergence data and series evaluation.

The function is

    pPsi_q(z) = sum_k  prod_i Gamma(a_i + k A_i) / prod_j Gamma(b_j + k B_j) * z^k / k!

with upper pairs (a_i, A_i) and lower pairs (b_j, B_j).  Coefficients are kept
in log space and cached per parameter set, so repeated evaluation at many
arguments only pays for the exponentials.
"""

from __future__ import annotations

import cmath
import json
import math
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import DivergenceError, InputError, NoConvergenceError, NumericalError
from .special_core import log_gamma, log_gamma_diff

_EPS = np.finfo(float).eps
_BALANCE_TOL = 1e-12
MAX_TERMS = 10**6
# extended-precision sums beyond this many digits are refused
MAX_DPS = 1024

# mpmath keeps its working precision in shared state
_MP_LOCK = threading.RLock()


@dataclass(frozen=True)
class ParamPair:
    """One (shift, weight) pair."""

    shift: float
    weight: float

    def __post_init__(self) -> None:
        shift = float(self.shift)
        weight = float(self.weight)
        if not (math.isfinite(shift) and math.isfinite(weight)):
            raise InputError(f"parameter pair must be finite, got ({shift}, {weight})")
        if weight <= 0.0:
            raise InputError(f"weight must be positive, got {weight}")
        if shift <= 0.0:
            raise InputError(f"shift must be positive, got {shift}")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "weight", weight)


def _as_pairs(items: Iterable) -> tuple[ParamPair, ...]:
    out = []
    for item in items:
        if isinstance(item, ParamPair):
            out.append(item)
            continue
        try:
            shift, weight = item
        except (TypeError, ValueError):
            raise InputError(f"expected a [shift, weight] pair, got {item!r}") from None
        out.append(ParamPair(shift, weight))
    return tuple(out)


@dataclass(frozen=True)
class FoxWrightParams:
    """Upper pairs (a_i, A_i) and lower pairs (b_j, B_j).

    Accepts any iterables of pairs or ``ParamPair`` objects; they are frozen
    into tuples so instances are hashable and safe to share.
    """

    upper: tuple[ParamPair, ...]
    lower: tuple[ParamPair, ...]

    def __post_init__(self) -> None:
        upper = _as_pairs(self.upper)
        lower = _as_pairs(self.lower)
        if not upper and not lower:
            raise InputError("at least one upper or lower parameter pair is required")
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @classmethod
    def from_dict(cls, data: dict) -> "FoxWrightParams":
        if not isinstance(data, dict):
            raise InputError("parameter JSON must be an object with 'upper' and 'lower'")
        unknown = set(data) - {"upper", "lower"}
        if unknown:
            raise InputError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(data.get("upper", []), data.get("lower", []))

    @classmethod
    def from_json(cls, text: str) -> "FoxWrightParams":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid parameter JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def unit(cls, upper_shifts: Sequence[float], lower_shifts: Sequence[float], weight: float = 1.0):
        """All weights equal to ``weight``."""
        return cls([(a, weight) for a in upper_shifts], [(b, weight) for b in lower_shifts])

    def to_dict(self) -> dict:
        return {
            "upper": [[x.shift, x.weight] for x in self.upper],
            "lower": [[x.shift, x.weight] for x in self.lower],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def with_weights(self, weight: float) -> "FoxWrightParams":
        return FoxWrightParams.unit([x.shift for x in self.upper], [x.shift for x in self.lower], weight)

    def prepend_upper(self, shift: float, weight: float = 1.0) -> "FoxWrightParams":
        return FoxWrightParams(((shift, weight),) + self.upper, self.lower)

    def upper_shifts(self) -> list[float]:
        return [x.shift for x in self.upper]

    def lower_shifts(self) -> list[float]:
        return [x.shift for x in self.lower]


@dataclass(frozen=True)
class ConvergenceData:
    delta: float
    nabla: float
    rho: float
    mu: float
    gamma_pole: float
    balanced: bool

    @property
    def radius(self) -> float:
        """Radius of convergence of the defining series (0, finite or inf)."""
        if self.delta > -1.0 + _BALANCE_TOL:
            return math.inf
        if self.delta >= -1.0 - _BALANCE_TOL:
            return self.nabla
        return 0.0

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "nabla": self.nabla,
            "rho": self.rho,
            "mu": self.mu,
            "gamma_pole": self.gamma_pole,
            "balanced": self.balanced,
            "radius": self.radius,
        }


@lru_cache(maxsize=1024)
def convergence_data(params: FoxWrightParams) -> ConvergenceData:
    sum_a = math.fsum(x.weight for x in params.upper)
    sum_b = math.fsum(x.weight for x in params.lower)
    log_nabla = math.fsum(
        [-x.weight * math.log(x.weight) for x in params.upper]
        + [x.weight * math.log(x.weight) for x in params.lower]
    )
    mu = math.fsum([x.shift for x in params.lower] + [-x.shift for x in params.upper]) + 0.5 * (
        params.p - params.q
    )
    if params.upper:
        gamma_pole = -min(x.shift / x.weight for x in params.upper)
    else:
        gamma_pole = -math.inf
    return ConvergenceData(
        delta=sum_b - sum_a,
        nabla=math.exp(log_nabla),
        rho=math.exp(-log_nabla),
        mu=mu,
        gamma_pole=gamma_pole,
        balanced=abs(sum_a - sum_b) <= _BALANCE_TOL * max(1.0, sum_a, sum_b),
    )


def shift_params(params: FoxWrightParams, n: int) -> FoxWrightParams:
    """Replace every shift by shift + n*weight."""
    if n < 0:
        raise InputError("shift order must be non-negative")
    if n == 0:
        return params
    return FoxWrightParams(
        [(x.shift + n * x.weight, x.weight) for x in params.upper],
        [(x.shift + n * x.weight, x.weight) for x in params.lower],
    )


def log_psi_moment(params: FoxWrightParams, n: int, m: int) -> float:
    k = n + m
    parts = [log_gamma(x.shift + k * x.weight) for x in params.upper]
    parts += [-log_gamma(x.shift + k * x.weight) for x in params.lower]
    return math.fsum(parts)


def psi_moment(params: FoxWrightParams, n: int, m: int) -> float:
    """prod Gamma(a_i + (n+m)A_i) / prod Gamma(b_j + (n+m)B_j)."""
    if n < 0 or m < 0:
        raise InputError("moment indices must be non-negative")
    return math.exp(log_psi_moment(params, n, m))


# --------------------------------------------------------------------------
# coefficients


def log_term_direct(params: FoxWrightParams, k: int) -> float:
    """log of the k-th coefficient straight from log-gamma calls."""
    return log_psi_moment(params, 0, k) - log_gamma(k + 1.0)


class _LogCoefficients:
    """Growable cache of log c_k built by the one-step recurrence."""

    def __init__(self, params: FoxWrightParams):
        self._params = params
        self._lock = threading.Lock()
        self._values = np.array([log_psi_moment(params, 0, 0)])

    def _step(self, k: int) -> float:
        # log c_{k+1} - log c_k
        parts = [log_gamma_diff(x.shift + k * x.weight, x.weight) for x in self._params.upper]
        parts += [-log_gamma_diff(x.shift + k * x.weight, x.weight) for x in self._params.lower]
        parts.append(-math.log(k + 1.0))
        return math.fsum(parts)

    def get(self, n: int) -> np.ndarray:
        with self._lock:
            have = self._values.size
            if have < n:
                steps = np.array([self._step(k) for k in range(have - 1, n - 1)])
                new = self._values[-1] + np.cumsum(steps)
                self._values = np.concatenate([self._values, new])
            return self._values[:n]


@lru_cache(maxsize=256)
def _coefficients(params: FoxWrightParams) -> _LogCoefficients:
    return _LogCoefficients(params)


def log_coefficients(params: FoxWrightParams, n: int) -> np.ndarray:
    """First ``n`` log-coefficients, built by the term recurrence."""
    return _coefficients(params).get(n).copy()


_MP_CACHE: dict = {}


def _rising(x, w):
    # integer steps are a plain product, far cheaper than two gamma calls
    if w == int(w) and w <= 16:
        out = mpmath.mpf(1)
        for j in range(int(w)):
            out *= x + j
        return out
    return mpmath.rf(x, w)


def _mp_coefficients(params: FoxWrightParams, n: int, dps: int) -> list:
    """First n coefficients at ``dps`` digits, extended incrementally.

    c_{k+1} = c_k prod rf(a + kA, A) / prod rf(b + kB, B) / (k + 1), with rf the
    rising factorial Gamma(x + w) / Gamma(x).
    """
    with _MP_LOCK, mpmath.workdps(dps + 10):
        key = (params, dps)
        coeffs = _MP_CACHE.get(key)
        if coeffs is None:
            if len(_MP_CACHE) >= 64:
                _MP_CACHE.pop(next(iter(_MP_CACHE)))
            lg = mpmath.fsum(
                [mpmath.loggamma(mpmath.mpf(x.shift)) for x in params.upper]
                + [-mpmath.loggamma(mpmath.mpf(x.shift)) for x in params.lower]
            )
            coeffs = _MP_CACHE[key] = [mpmath.exp(lg)]
        upper = [(mpmath.mpf(x.shift), mpmath.mpf(x.weight)) for x in params.upper]
        lower = [(mpmath.mpf(x.shift), mpmath.mpf(x.weight)) for x in params.lower]
        while len(coeffs) < n:
            k = len(coeffs) - 1
            c = coeffs[-1] / (k + 1)
            for a, w in upper:
                c *= _rising(a + k * w, w)
            for b, w in lower:
                c /= _rising(b + k * w, w)
            coeffs.append(c)
        return coeffs[:n]


# --------------------------------------------------------------------------
# summation


@dataclass(frozen=True)
class SeriesResult:
    value: complex | float
    terms: int
    tail_bound: float
    max_term: float
    method: str  # "double", "mp", or "overflow" before extended precision
    log_max_term: float = -math.inf

    def lost_digits(self) -> float:
        """Decimal digits cancelled between the largest term and the value."""
        log_max = self.log_max_term if self.log_max_term > -math.inf else math.log(max(self.max_term, 1e-300))
        return (log_max - math.log(max(abs(self.value), 1e-300))) / math.log(10.0)


def _check_domain(params: FoxWrightParams, z: complex) -> ConvergenceData:
    conv = convergence_data(params)
    if z == 0:
        return conv
    if conv.delta < -1.0 - _BALANCE_TOL:
        raise DivergenceError(
            f"series diverges for every z != 0 (delta = {conv.delta:.12g} < -1)"
        )
    if conv.radius < math.inf and abs(z) >= conv.radius * (1.0 - 1e-12):
        raise DivergenceError(
            f"|z| = {abs(z):.12g} is outside the disc of convergence (radius {conv.radius:.12g})"
        )
    return conv


def _truncation(
    logc: np.ndarray, log_abs_z: float, limit_ratio: float, tol: float, atol: float, signs
):
    """Find the first index where the geometric tail is negligible.

    Returns (n_terms, tail_bound, scale) or None when the window is too short.
    ``signs`` is an array of unit phases (or None for non-negative terms).
    """
    k = np.arange(logc.size)
    logt = logc + k * log_abs_z
    scale = float(np.max(logt))
    mag = np.exp(logt - scale)
    terms = mag if signs is None else mag * signs
    partial = np.abs(np.cumsum(terms))
    dlog = np.diff(logt)
    # ratio bound from here on: worst of the next few ratios and the limit
    window = 8
    padded = np.concatenate([dlog, np.full(window, dlog[-1] if dlog.size else -np.inf)])
    worst = np.max(np.lib.stride_tricks.sliding_window_view(padded, window), axis=1)[: dlog.size]
    r = np.maximum(np.exp(worst), limit_ratio)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(r < 1.0, mag[:-1] * r / (1.0 - r), np.inf)
    abs_floor = math.exp(max(math.log(atol) - scale, -745.0)) if atol > 0 else 0.0
    thresh = np.maximum(tol * partial[:-1], abs_floor)
    # only trust indices past the largest term where ratios keep falling
    peak = int(np.argmax(logt))
    ok = (tail <= thresh) & (k[:-1] >= peak) & (dlog < 0)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return None
    i = int(idx[0])
    return i + 1, float(tail[i]) * math.exp(min(scale, 700.0)), scale


def _sum_double(params, z, tol, atol, max_terms) -> SeriesResult:
    conv = _check_domain(params, z)
    if z == 0:
        c0 = math.exp(log_psi_moment(params, 0, 0))
        return SeriesResult(c0, 1, 0.0, c0, "double")
    is_complex = isinstance(z, complex)
    log_abs_z = math.log(abs(z))
    limit_ratio = abs(z) / conv.radius if conv.radius < math.inf else 0.0
    n = 64
    while True:
        logc = _coefficients(params).get(n)
        k = np.arange(n)
        if is_complex:
            signs = np.exp(1j * cmath.phase(z) * k)
        elif z < 0:
            signs = np.where(k % 2 == 0, 1.0, -1.0)
        else:
            signs = None
        found = _truncation(logc, log_abs_z, limit_ratio, tol, atol, signs)
        if found is not None:
            break
        if n >= max_terms:
            raise NoConvergenceError(f"series did not converge within {max_terms} terms")
        n = min(2 * n, max_terms)
    count, tail, scale = found
    if scale > 700.0:
        # terms overflow double precision; only the term count is meaningful
        return SeriesResult(math.nan, count, math.inf, math.inf, "overflow", scale)
    logt = logc[:count] + k[:count] * log_abs_z
    mag = np.exp(logt)
    if signs is None:
        value = math.fsum(mag)
    elif is_complex:
        t = mag * signs[:count]
        value = complex(math.fsum(t.real), math.fsum(t.imag))
    else:
        value = math.fsum(mag * signs[:count])
    return SeriesResult(value, count, tail, float(np.max(mag)), "double", scale)


def _sum_mp(params, z, n_terms, tol, dps) -> SeriesResult:
    with _MP_LOCK:
        coeffs = _mp_coefficients(params, n_terms, dps)
    with _MP_LOCK, mpmath.workdps(dps):
        zz = mpmath.mpc(z) if isinstance(z, complex) else mpmath.mpf(z)
        acc = mpmath.mpf(0)
        power = mpmath.mpf(1)
        big = mpmath.mpf(0)
        for c in coeffs:
            t = c * power
            acc += t
            big = max(big, abs(t))
            power *= zz
        value = complex(acc) if isinstance(z, complex) else float(acc)
        log_big = float(mpmath.log(big)) if big > 0 else -math.inf
        return SeriesResult(value, n_terms, 0.0, float(big), "mp", log_big)


def _log_tail_at(params, log_abs_z: float, n: int, window: int = 8) -> float:
    """Log of a geometric bound on the terms from index n on."""
    logc = _coefficients(params).get(n + window + 1)[n:]
    logt = logc + np.arange(n, n + window + 1) * log_abs_z
    ratio = float(np.max(np.diff(logt)))
    if ratio >= 0.0:
        return math.inf
    return float(np.max(logt)) - math.log(-math.expm1(ratio))


def _resolve_cancellation(params, z, res, tol, atol, max_terms) -> SeriesResult:
    if res.method == "overflow":
        lost = res.log_max_term / math.log(10.0) + 30.0
    else:
        lost = res.lost_digits()
    dps = 16 * int(math.ceil((lost - math.log10(tol) + 20) / 16))
    if dps > MAX_DPS:
        raise NumericalError(f"cancellation of about {lost:.0f} digits exceeds the {MAX_DPS}-digit limit")
    n_terms = res.terms
    log_abs_z = math.log(abs(z))
    for _ in range(24):
        mp_res = _sum_mp(params, z, n_terms, tol, dps)
        goal = math.log(max(0.1 * tol * abs(mp_res.value), atol, 1e-320))
        enough = _log_tail_at(params, log_abs_z, n_terms) <= goal
        need_dps = mp_res.lost_digits() - math.log10(tol) + 10
        if enough and need_dps <= dps:
            return SeriesResult(mp_res.value, n_terms, res.tail_bound, mp_res.max_term, "mp", mp_res.log_max_term)
        if not enough:
            n_terms = min(max_terms, n_terms + max(n_terms // 2, 8))
        if need_dps > dps:
            dps = 16 * int(math.ceil((need_dps + 10) / 16))
            if dps > MAX_DPS:
                raise NumericalError(f"cancellation exceeds the {MAX_DPS}-digit limit")
    raise NumericalError("cancellation could not be resolved at extended precision")


def series_result(
    params: FoxWrightParams,
    z: complex | float,
    tol: float = 1e-14,
    atol: float = 0.0,
    max_terms: int = MAX_TERMS,
    allow_mp: bool = True,
) -> SeriesResult:
    """Evaluate the series and report how it was done.

    The double-precision sum is accepted when its rounding error estimate
    (largest term times a few ulps, scaled by the log magnitude) stays below
    the requested tolerance; otherwise the sum is redone in mpmath with enough
    guard digits to absorb the cancellation.
    """
    if not (0.0 < tol <= 1e-3):
        raise InputError(f"tol must lie in (0, 1e-3], got {tol}")
    if isinstance(z, (complex, np.complexfloating)):
        z = complex(z)
        if z.imag == 0.0:
            z = z.real
    else:
        z = float(z)
    res = _sum_double(params, z, tol, atol, max_terms)
    if res.method == "overflow":
        if not allow_mp:
            raise NumericalError("series terms overflow double precision")
        return _resolve_cancellation(params, z, res, tol, atol, max_terms)
    if res.method == "double" and res.terms > 1:
        magnitude_digits = max(1.0, abs(math.log(res.max_term)) if res.max_term > 0 else 1.0)
        err = 4.0 * _EPS * res.max_term * magnitude_digits * math.sqrt(res.terms)
        if err > max(tol * abs(res.value), atol) and allow_mp:
            return _resolve_cancellation(params, z, res, tol, atol, max_terms)
    return res


def eval_series(
    params: FoxWrightParams,
    z: complex | float,
    tol: float = 1e-14,
    atol: float = 0.0,
    max_terms: int = MAX_TERMS,
) -> complex | float:
    """Value of pPsi_q at ``z``; a float for real ``z``, complex otherwise."""
    return series_result(params, z, tol=tol, atol=atol, max_terms=max_terms).value


def eval_pfq(
    upper_shifts: Sequence[float],
    lower_shifts: Sequence[float],
    z: complex | float,
    tol: float = 1e-14,
) -> complex | float:
    """pFq via the unit-weight Fox-Wright function and its gamma prefactor."""
    params = FoxWrightParams.unit(upper_shifts, lower_shifts)
    log_pref = math.fsum(
        [log_gamma(b) for b in lower_shifts] + [-log_gamma(a) for a in upper_shifts]
    )
    return math.exp(log_pref) * eval_series(params, z, tol=tol)
