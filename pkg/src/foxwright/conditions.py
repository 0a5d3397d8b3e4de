"""Hypothesis checks, numerical monotonicity tests and zero counting."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import comb

from .errors import DomainError, HypothesisError, InputError, ZeroOnBoundaryError
from .fox_wright import FoxWrightParams, eval_series, log_psi_moment
from .special_core import log_gamma

# strict inequalities between moments are tested with this relative guard so
# that exact ties computed through rounded log-gammas do not pass
_STRICT_GUARD = 1e-12


@dataclass
class ConditionReport:
    satisfied: bool
    first_failure: str | None = None
    details: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, margin: float, ok: bool, required: bool = True) -> None:
        self.details.append({"name": name, "margin": float(margin), "ok": bool(ok), "required": required})
        if required and not ok and self.first_failure is None:
            self.first_failure = name
            self.satisfied = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def check_h1(params: FoxWrightParams, n_max: int = 16) -> ConditionReport:
    """psi_{n,2} < psi_{n,1} and psi_{n,1}^2 < psi_{n,0} psi_{n,2} for n = 0..n_max.

    Margins are reported in log form, e.g. log psi_{n,1} - log psi_{n,2}.
    """
    if not 0 <= n_max <= 64:
        raise InputError("n_max must lie in [0, 64]")
    report = ConditionReport(True, notes=[f"checked for n = 0..{n_max} only"])
    for n in range(n_max + 1):
        l0, l1, l2 = (log_psi_moment(params, n, m) for m in range(3))
        first = l1 - l2
        report.add(f"n={n}: psi_n2 < psi_n1", first, first > _STRICT_GUARD)
        second = l0 + l2 - 2.0 * l1
        report.add(f"n={n}: psi_n1^2 < psi_n0*psi_n2", second, second > _STRICT_GUARD)
    return report


def check_h2(upper_shifts: Sequence[float], lower_shifts: Sequence[float]) -> ConditionReport:
    """Sorted positive shifts with dominating partial sums of the lower list."""
    a = [float(x) for x in upper_shifts]
    b = [float(x) for x in lower_shifts]
    if len(a) != len(b):
        raise InputError(f"H2 needs equal list lengths, got {len(a)} and {len(b)}")
    report = ConditionReport(True)
    report.add("positive shifts", min(a + b) if a else 0.0, bool(a) and min(a + b) > 0)
    for name, seq in (("upper", a), ("lower", b)):
        gaps = [y - x for x, y in zip(seq, seq[1:])]
        worst = min(gaps) if gaps else 0.0
        report.add(f"{name} nondecreasing", worst, worst >= 0.0)
    partial = np.cumsum(np.array(b) - np.array(a))
    for k, value in enumerate(partial, start=1):
        report.add(f"partial sum k={k}", value, value >= 0.0)
    psi_bar = math.fsum(b) - math.fsum(a)
    report.add("psi_bar > 0", psi_bar, psi_bar > 0.0, required=False)
    return report


def h2_strict(upper_shifts, lower_shifts) -> bool:
    """H2 together with the extra assumption sum(b - a) > 0."""
    report = check_h2(upper_shifts, lower_shifts)
    return report.satisfied and all(d["ok"] for d in report.details)


# --------------------------------------------------------------------------
# complete monotonicity


def _central_difference(values: np.ndarray, centre: int, order: int, stride: int, h: float) -> float:
    # sum_j (-1)^j C(n, j) f(x + (n/2 - j) h) / h^n; lattice spacing is h / stride
    total = 0.0
    for j in range(order + 1):
        offset = (order - 2 * j) * stride // 2
        total += (-1) ** j * comb(order, j, exact=True) * values[centre + offset]
    return total / h**order


def numeric_cm_check(
    f: Callable[[float], float],
    interval: tuple[float, float],
    max_order: int = 6,
    grid_n: int = 40,
    step: float | None = None,
) -> ConditionReport:
    """Finite-difference falsifier for complete monotonicity on ``interval``.

    Each derivative of order n is a central difference with step h and h/2
    combined by one Richardson step.  Order n passes when
    (-1)^n f^(n) >= -1e-6 * 10^n * max|f| at every grid point.  A pass is not a
    proof; a failure is a strong hint.
    """
    a, b = map(float, interval)
    if not 0.0 < a < b:
        raise InputError("interval must satisfy 0 < a < b")
    if not 0 <= max_order <= 8:
        raise InputError("max_order must lie in [0, 8]")
    h = step if step is not None else min(0.1, 1.8 * a / max(max_order, 1))
    q = h / 4.0
    reach = 2 * max_order  # lattice points each side, spacing h/4
    grid = np.linspace(a, b, grid_n)
    lattice = [x + q * np.arange(-reach, reach + 1) for x in grid]
    values = []
    for pts in lattice:
        row = []
        for x in pts:
            try:
                v = float(f(float(x)))
            except Exception as exc:
                raise DomainError(f"function evaluation failed at x = {x:.12g}: {exc}") from exc
            if not math.isfinite(v):
                raise DomainError(f"non-finite function value at x = {x:.12g}")
            row.append(v)
        values.append(np.array(row))
    scale = max(float(np.max(np.abs(row))) for row in values) or 1.0
    report = ConditionReport(True, notes=[f"step {h:.6g}, noise floor 1e-6*10^n*{scale:.6g}"])
    for n in range(max_order + 1):
        tol = 1e-6 * 10.0**n * scale
        worst = math.inf
        where = None
        for x, row in zip(grid, values):
            if n == 0:
                d = row[reach]
            else:
                coarse = _central_difference(row, reach, n, 4, h)
                fine = _central_difference(row, reach, n, 2, h / 2.0)
                d = (4.0 * fine - coarse) / 3.0
            signed = (-1) ** n * d
            if signed < worst:
                worst, where = signed, x
        report.add(f"order {n} (worst at x={where:.6g})", worst, worst >= -tol)
    return report


# --------------------------------------------------------------------------
# Turan and log-convexity


def turan_in_A(unit_params: FoxWrightParams, A: float, z: float) -> float:
    """F(A) F(A+2) - F(A+1)^2 with F(w) the series with every weight set to w."""
    if unit_params.p != unit_params.q:
        raise InputError("turan_in_A needs p = q")
    if A <= 0:
        raise InputError("A must be positive")
    f0, f1, f2 = (eval_series(unit_params.with_weights(A + k), z) for k in range(3))
    return f0 * f2 - f1 * f1


def turan_in_sigma(params: FoxWrightParams, sigma: float, z: float, check: bool = True) -> float:
    """Xi(sigma) Xi(sigma+2) - Xi(sigma+1)^2, Xi the (sigma,1)-prepended series at +z."""
    if sigma <= 0:
        raise InputError("sigma must be positive")
    if not 0.0 < z < 1.0:
        raise InputError("z must lie in (0, 1)")
    if check:
        report = check_h1(params)
        if not report.satisfied:
            raise HypothesisError(f"H1 fails: {report.first_failure}")
    x0, x1, x2 = (eval_series(params.prepend_upper(sigma + k, 1.0), z) for k in range(3))
    return x0 * x2 - x1 * x1


def log_convexity_probe(
    curve: Callable[[float], float], points: Sequence[tuple[float, float, float]]
) -> ConditionReport:
    """curve(t x + (1-t) y) <= curve(x)^t curve(y)^(1-t) (1 + 1e-10) on each triple."""
    report = ConditionReport(True)
    cache: dict[float, float] = {}

    def log_curve(x: float) -> float:
        if x not in cache:
            v = float(curve(x))
            if not v > 0:
                raise DomainError(f"curve must be positive, got {v!r} at {x!r}")
            cache[x] = math.log(v)
        return cache[x]

    for x, y, t in points:
        mid = t * x + (1.0 - t) * y
        margin = t * log_curve(x) + (1.0 - t) * log_curve(y) + math.log1p(1e-10) - log_curve(mid)
        report.add(f"x={x:.6g}, y={y:.6g}, t={t:.6g}", margin, margin >= 0.0)
    return report


def gamma_curve(x: float) -> float:
    return math.exp(log_gamma(x))


# --------------------------------------------------------------------------
# zeros


def _rectangle_path(rect, n_boundary: int) -> np.ndarray:
    x0, x1, y0, y1 = rect
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    perimeter = 2.0 * ((x1 - x0) + (y1 - y0))
    pts = []
    for c0, c1 in zip(corners, corners[1:]):
        m = max(4, int(round(n_boundary * abs(c1 - c0) / perimeter)))
        pts.extend(c0 + (c1 - c0) * np.arange(m) / m)
    pts.append(corners[-1])
    return np.array(pts)


def winding_number(
    func: Callable[[complex], complex],
    path: np.ndarray,
    max_depth: int = 24,
    zero_level: float = 1e-12,
) -> float:
    """Total change of arg(func) along ``path`` divided by 2 pi (not rounded).

    Segments whose phase step exceeds pi/2 are bisected until it does not.
    """
    cache: dict[complex, complex] = {}

    def value(z: complex) -> complex:
        if z not in cache:
            v = complex(func(z))
            if abs(v) < zero_level:
                raise ZeroOnBoundaryError(f"function nearly vanishes on the contour at {z}")
            cache[z] = v
        return cache[z]

    def phase_step(za: complex, zb: complex, depth: int) -> float:
        d = cmath.phase(value(zb) / value(za))
        if abs(d) <= 0.5 * math.pi:
            return d
        if depth >= max_depth:
            raise ZeroOnBoundaryError(f"phase not resolved near {za}; a zero may sit on the contour")
        zm = 0.5 * (za + zb)
        return phase_step(za, zm, depth + 1) + phase_step(zm, zb, depth + 1)

    total = math.fsum(phase_step(complex(za), complex(zb), 0) for za, zb in zip(path, path[1:]))
    return total / (2.0 * math.pi)


def zero_count_rectangle(
    params: FoxWrightParams,
    rect: tuple[float, float, float, float],
    n_boundary: int = 512,
    tol: float = 1e-10,
) -> int:
    """Zeros of the series inside ``rect`` = (x0, x1, y0, y1), by the argument principle."""
    x0, x1, y0, y1 = map(float, rect)
    if not (x0 < x1 and y0 < y1):
        raise InputError("rectangle needs x0 < x1 and y0 < y1")
    path = _rectangle_path((x0, x1, y0, y1), n_boundary)
    turns = winding_number(lambda z: eval_series(params, z, tol=tol), path)
    count = int(round(turns))
    if abs(turns - count) > 0.05:
        raise ZeroOnBoundaryError(f"winding number {turns:.6g} is not close to an integer")
    return count


def zero_count_right_half(
    params: FoxWrightParams,
    rect: tuple[float, float, float, float] = (0.1, 4.0, -6.0, 6.0),
    n_boundary: int = 512,
    check: bool = True,
) -> int:
    """Zero count in a rectangle of the right half-plane; H1 is checked first."""
    if check:
        report = check_h1(params)
        if not report.satisfied:
            raise HypothesisError(f"H1 fails: {report.first_failure}")
    return zero_count_rectangle(params, rect, n_boundary)
