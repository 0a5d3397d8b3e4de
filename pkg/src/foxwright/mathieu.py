"""Generalized Mathieu series with a_k = k^nu and its zeta / digamma bounds.

    S(r) = sum_{k>=1} 2 k^(nu beta) / (r^2 + k^(nu alpha))^mu,   s = nu (mu alpha - beta)
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np
from scipy.integrate import quad

from ._quadrature import exp_sinh
from .errors import DivergenceError, HypothesisError, InputError, NoConvergenceError
from .fox_wright import FoxWrightParams, eval_series
from .special_core import EULER_GAMMA, digamma, hurwitz_zeta, log_gamma, riemann_zeta


@dataclass(frozen=True)
class MathieuSpec:
    alpha: float
    beta: float
    mu: float
    nu: float
    r: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "mu", "nu"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        r = float(self.r)
        if not (math.isfinite(r) and r >= 0):
            raise InputError(f"r must be non-negative, got {r}")
        object.__setattr__(self, "r", r)

    @property
    def exponent(self) -> float:
        return self.nu * (self.mu * self.alpha - self.beta)

    @property
    def weight(self) -> float:
        return self.mu / self.exponent

    def with_r(self, r: float) -> "MathieuSpec":
        return MathieuSpec(self.alpha, self.beta, self.mu, self.nu, r)


@dataclass
class MathieuBounds:
    lower: float
    upper: float
    exponent: float
    weight: float
    kind: str = "zeta"

    def to_dict(self) -> dict:
        return asdict(self)


def _term(spec: MathieuSpec, x):
    x = np.asarray(x, dtype=float)
    r2 = spec.r * spec.r
    return 2.0 * x ** (spec.nu * spec.beta) / (r2 + x ** (spec.nu * spec.alpha)) ** spec.mu


def _tail_integral(spec: MathieuSpec, start: float) -> float:
    """int_start^inf 2 x^-s (1 + r^2 x^(-nu alpha))^-mu dx.

    With x = start u^(-1/(s-1)) this is 2 start^(1-s)/(s-1) times the integral
    over u in (0, 1] of a smooth function bounded by one.
    """
    s = spec.exponent
    scale = 2.0 * start ** (1.0 - s) / (s - 1.0)
    if spec.r == 0.0:
        return scale
    na = spec.nu * spec.alpha
    c = spec.r * spec.r * start ** (-na)

    def g(u):
        return math.exp(-spec.mu * math.log1p(c * u ** (na / (s - 1.0))))

    value, _ = quad(g, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return scale * value


def mathieu_sum(spec: MathieuSpec, tol: float = 1e-13) -> float:
    """Sum with a bracketed tail.

    Past the index K the summand is convex and decreasing, so
        int_K^inf f - f(K)/2  <=  sum_{k>K} f(k)  <=  int_{K+1/2}^inf f.
    K grows until the bracket is narrower than ``tol`` times the sum; the
    midpoint of the bracket is added.
    """
    s = spec.exponent
    if not s > 1.0:
        raise DivergenceError(f"series diverges: nu (mu alpha - beta) = {s:.12g} <= 1")
    # beyond this point r^2 is small against k^(nu alpha): the summand is x^-s-like
    k0 = (20.0 * (1.0 + spec.mu) * (spec.r * spec.r + 1.0)) ** (1.0 / (spec.nu * spec.alpha))
    K = int(max(16, math.ceil(k0)))
    head_to = 0
    head = 0.0
    parts: list[float] = []
    for _ in range(40):
        k = np.arange(head_to + 1, K + 1, dtype=float)
        parts.append(math.fsum(_term(spec, k)))
        head_to = K
        head = math.fsum(parts)
        fK = float(_term(spec, float(K)))
        low = _tail_integral(spec, float(K)) - 0.5 * fK
        high = _tail_integral(spec, K + 0.5)
        if high - low <= tol * (head + low):
            return head + 0.5 * (low + high)
        K *= 4
        if K > 5 * 10**8:
            break
    raise NoConvergenceError("tail bracket did not close; exponent too close to 1")


def _require_unit_product(spec: MathieuSpec) -> None:
    if abs(spec.nu * spec.alpha - 1.0) > 1e-12:
        raise HypothesisError(f"bounds need nu*alpha = 1, got {spec.nu * spec.alpha:.12g}")


def mathieu_bounds(spec: MathieuSpec) -> MathieuBounds:
    """L = 2 zeta(s, w r^2 + 1) and R = 2 (1 - w) zeta(s) + 2 w zeta(s, r^2 + 1)."""
    _require_unit_product(spec)
    s, w = spec.exponent, spec.weight
    if not s > 1.0:
        raise HypothesisError(f"bounds need s > 1, got {s:.12g}")
    r2 = spec.r * spec.r
    lower = 2.0 * hurwitz_zeta(s, w * r2 + 1.0)
    upper = 2.0 * (1.0 - w) * riemann_zeta(s) + 2.0 * w * hurwitz_zeta(s, r2 + 1.0)
    return MathieuBounds(lower, upper, s, w, "zeta")


def mathieu_bounds_digamma(spec: MathieuSpec) -> MathieuBounds:
    """Digamma forms, valid for s > 2.

    L1 = 2 exp(-(s-1) psi(mu r^2 / s + 3/2)) / (s-1)
    R1 = 2 (1-w) exp((s-1) gamma) / (s-1) + 2 w exp(-(s-1) psi(r^2 + 1)) / (s-1)
    """
    _require_unit_product(spec)
    s, w = spec.exponent, spec.weight
    if not s > 2.0:
        raise HypothesisError(f"digamma bounds need s > 2, got {s:.12g}")
    r2 = spec.r * spec.r
    c = 2.0 / (s - 1.0)
    lower = c * math.exp(-(s - 1.0) * digamma(spec.mu * r2 / s + 1.5))
    upper = c * (1.0 - w) * math.exp((s - 1.0) * EULER_GAMMA) + c * w * math.exp(
        -(s - 1.0) * digamma(r2 + 1.0)
    )
    return MathieuBounds(lower, upper, s, w, "digamma")


@dataclass
class MathieuResidual:
    series: float
    integral: float
    abs_residual: float
    rel_residual: float
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def mathieu_integral(spec: MathieuSpec, quad_tol: float = 1e-11) -> tuple[float, list[str]]:
    """(2 / Gamma(mu)) int_0^inf x^(s-1) / (e^x - 1) * F(-r^2 x^(nu alpha)) dx.

    F is the 1Psi1 function with upper pair (mu, 1) and lower pair (s, nu alpha).
    Nodes where x^(s-1) e^-x is 40 e-folds below its peak are skipped; F is
    bounded on the negative axis, so they cannot matter.
    """
    s = spec.exponent
    if not s > 1.0:
        raise HypothesisError(f"integral form needs s > 1, got {s:.12g}")
    inner = FoxWrightParams([(spec.mu, 1.0)], [(s, spec.nu * spec.alpha)])
    r2 = spec.r * spec.r
    peak = (s - 1.0) * (math.log(max(s - 1.0, 1e-300)) - 1.0)

    def integrand(x):
        logw = (s - 1.0) * np.log(x) - x
        keep = (x < 1.0) | (logw > peak - 40.0)
        out = np.zeros(x.shape)
        xs = x[keep]
        if xs.size:
            vals = np.array([eval_series(inner, -r2 * v ** (spec.nu * spec.alpha)) for v in xs])
            out[keep] = xs ** (s - 1.0) / np.expm1(xs) * vals
        return out

    res = exp_sinh(integrand, rtol=quad_tol, atol=1e-300)
    notes = [] if res.converged else [f"quadrature change {res.error:.3g} above rtol={quad_tol:g}"]
    return 2.0 * math.exp(-log_gamma(spec.mu)) * res.value, notes


def verify_mathieu_integral_rep(spec: MathieuSpec, quad_tol: float = 1e-11) -> MathieuResidual:
    _require_unit_product(spec)
    total = mathieu_sum(spec)
    integral, notes = mathieu_integral(spec, quad_tol)
    diff = abs(total - integral)
    return MathieuResidual(total, integral, diff, diff / abs(total), notes)


def mathieu_rows(spec: MathieuSpec, radii: Iterable[float]) -> list[dict]:
    """One row per r with the sum and whichever bounds apply."""
    rows = []
    for r in radii:
        sp = spec.with_r(r)
        row = {"r": float(r), "L": None, "L1": None, "sum": mathieu_sum(sp), "R1": None, "R": None}
        if abs(sp.nu * sp.alpha - 1.0) <= 1e-12:
            zb = mathieu_bounds(sp)
            row["L"], row["R"] = zb.lower, zb.upper
            if sp.exponent > 2.0:
                db = mathieu_bounds_digamma(sp)
                row["L1"], row["R1"] = db.lower, db.upper
        rows.append(row)
    return rows


def mathieu_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["r", "L", "L1", "sum", "R1", "R"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow(["" if row[c] is None else f"{row[c]:.12g}" for c in cols])
    return buf.getvalue()
