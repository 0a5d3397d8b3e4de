"""Two-sided exponential and rational envelopes built from psi_{0,0}, psi_{0,1} and rho."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .conditions import check_h1, check_h2
from .errors import HypothesisError, InputError
from .fox_wright import FoxWrightParams, convergence_data, eval_pfq, eval_series, log_psi_moment
from .hfunction import HDensitySpec, stieltjes_value
from .special_core import log_gamma

CONTAIN_TOL = 1e-10


@dataclass
class Envelope:
    z: float
    lower: float
    upper: float
    value: float | None = None
    method: str | None = None
    checked: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def contained(self) -> bool | None:
        if self.value is None:
            return None
        return self.lower - CONTAIN_TOL <= self.value <= self.upper + CONTAIN_TOL

    @property
    def slack(self) -> float | None:
        """min(value - lower, upper - value); negative means a violation."""
        if self.value is None:
            return None
        return min(self.value - self.lower, self.upper - self.value)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["contained"] = self.contained
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _require_luke_hypotheses(params: FoxWrightParams) -> None:
    conv = convergence_data(params)
    if not conv.balanced:
        raise HypothesisError("envelope needs balanced weights")
    if not conv.mu > 0:
        raise HypothesisError(f"envelope needs mu > 0, got {conv.mu:.12g}")
    report = check_h1(params)
    if not report.satisfied:
        raise HypothesisError(f"H1 fails: {report.first_failure}")


def luke_formula(psi00: float, psi01: float, rho: float, z: float) -> tuple[float, float]:
    """(lower, upper) = (psi00 e^(-psi01 z / psi00), psi00 - psi01 (1 - e^(-rho z)) / rho)."""
    lower = psi00 * math.exp(-psi01 * z / psi00)
    upper = psi00 + (psi01 / rho) * math.expm1(-rho * z)
    return lower, upper


def luke_bounds(
    params: FoxWrightParams, z: float, with_value: bool = True, checked: bool = True
) -> Envelope:
    """Envelope of z -> series(-z) on z >= 0."""
    z = float(z)
    if z < 0:
        raise InputError("z must be non-negative")
    if checked:
        _require_luke_hypotheses(params)
    psi00 = math.exp(log_psi_moment(params, 0, 0))
    psi01 = math.exp(log_psi_moment(params, 0, 1))
    lower, upper = luke_formula(psi00, psi01, convergence_data(params).rho, z)
    env = Envelope(z, lower, upper, checked=checked)
    if not checked:
        env.notes.append("unchecked: hypotheses were not verified")
    if with_value:
        env.value = eval_series(params, -z)
        env.method = "series"
    return env


def luke_bounds_equal_weights(params: FoxWrightParams, z: float, with_value: bool = True) -> Envelope:
    """Specialisation to p = q with one common weight.

    Then rho = 1 and the upper side reads psi00 - psi01 (1 - e^-z).  The same
    formula routine is used, so the output matches ``luke_bounds`` exactly.
    """
    weights = {x.weight for x in params.upper + params.lower}
    if params.p != params.q or len(weights) != 1:
        raise InputError("needs p = q and one common weight")
    return luke_bounds(params, z, with_value=with_value)


def lambda_value(params: FoxWrightParams, lam: float, z: float) -> tuple[float, str, list[str]]:
    """(lam,1)-prepended series at -z.

    Inside half the disc of convergence the series is summed; further out the
    value is Gamma(lam) int (1 + t z)^(-lam) h(t) dt / t over the H-density.
    """
    prepended = params.prepend_upper(lam, 1.0)
    radius = convergence_data(prepended).radius
    if z < 0.5 * radius:
        return eval_series(prepended, -z), "series", []
    m = stieltjes_value(HDensitySpec(params), lam, z)
    return m.value, "density", m.warnings


def luke_bounds_lambda(
    params: FoxWrightParams, lam: float, z: float, with_value: bool = True, checked: bool = True
) -> Envelope:
    lam, z = float(lam), float(z)
    if lam <= 0 or z < 0:
        raise InputError("need lam > 0 and z >= 0")
    if checked:
        _require_luke_hypotheses(params)
    psi00 = math.exp(log_psi_moment(params, 0, 0))
    psi01 = math.exp(log_psi_moment(params, 0, 1))
    rho = convergence_data(params).rho
    g = math.exp(log_gamma(lam))
    lower = psi00 * g * math.exp(-lam * math.log1p(psi01 * z / psi00))
    upper = g * (psi00 + (psi01 / rho) * math.expm1(-lam * math.log1p(rho * z)))
    env = Envelope(z, lower, upper, checked=checked)
    if with_value:
        env.value, env.method, notes = lambda_value(params, lam, z)
        env.notes.extend(notes)
    return env


def pfq_luke(
    upper_shifts: Sequence[float],
    lower_shifts: Sequence[float],
    sigma: float,
    z: float,
    with_value: bool = True,
    checked: bool = True,
) -> Envelope:
    """1/(1 + theta z)^sigma <= F(sigma, a; b; -z) <= 1 - theta + theta/(1 + z)^sigma.

    Below z = 1/2 the value is the series.  Further out, and when sum(b - a) > 0,
    it is prod Gamma(b)/Gamma(a) times the order-sigma Stieltjes integral of
    the unit-weight H-density; otherwise no value is attached.
    """
    sigma, z = float(sigma), float(z)
    if sigma <= 0 or z < 0:
        raise InputError("need sigma > 0 and z >= 0")
    if checked:
        report = check_h2(upper_shifts, lower_shifts)
        if not report.satisfied:
            raise HypothesisError(f"H2 fails: {report.first_failure}")
    theta = math.prod(a / b for a, b in zip(upper_shifts, lower_shifts))
    lower = math.exp(-sigma * math.log1p(theta * z))
    upper = 1.0 - theta + theta * math.exp(-sigma * math.log1p(z))
    env = Envelope(z, lower, upper, checked=checked)
    if not with_value:
        return env
    if z < 0.5:
        env.value = eval_pfq([sigma, *upper_shifts], list(lower_shifts), -z)
        env.method = "series"
    elif math.fsum(lower_shifts) > math.fsum(upper_shifts):
        params = FoxWrightParams.unit(list(upper_shifts), list(lower_shifts))
        m = stieltjes_value(HDensitySpec(params), sigma, z)
        scale = math.fsum(log_gamma(b) for b in lower_shifts) - math.fsum(log_gamma(a) for a in upper_shifts)
        scale -= log_gamma(sigma)
        env.value = math.exp(scale) * m.value
        env.method = "density"
        env.notes.extend(m.warnings)
    return env


def envelopes_to_csv(envelopes: Iterable[Envelope]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["z", "lower", "value", "upper"])
    for env in envelopes:
        value = "" if env.value is None else f"{env.value:.12g}"
        writer.writerow([f"{env.z:.12g}", f"{env.lower:.12g}", value, f"{env.upper:.12g}"])
    return buf.getvalue()
