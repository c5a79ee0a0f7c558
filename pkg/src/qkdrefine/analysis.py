"""Threshold searches, 1-D rate sweeps and e_s/eta tradeoff curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .information import DomainError, ThresholdResult, bisect, probability, sign_change_brackets
from .rates import (
    MODES,
    SCHEMES,
    SHANNON_LIMIT,
    EcParams,
    coarse_error_for,
    key_rate,
    make_params,
)
from .scenarios import di_bell_parameter

SCAN_POINTS = 512
# Scanning e_s past 1/2 would find spurious keys from anti-correlated data.
ES_SCAN_MAX = 0.5


@dataclass(frozen=True)
class SweepRow:
    eta: float
    rate_coarse: float
    rate_refined: float
    e_c: float
    h_a: float
    i_pa_coarse: float
    s: Optional[float] = None


@dataclass(frozen=True)
class TradeoffPoint:
    e_s: float
    eta_threshold_coarse: Optional[float]
    eta_threshold_refined: Optional[float]


def _check(scheme: str, mode: str, tol: float) -> None:
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if not tol > 0:
        raise DomainError("tol must be positive")


def _threshold(rate, lo: float, hi: float, tol: float, lowest: bool) -> Optional[ThresholdResult]:
    brackets = sign_change_brackets(rate, lo, hi, SCAN_POINTS)
    if not brackets:
        return None
    x0, x1, f0, f1 = brackets[0] if lowest else brackets[-1]
    res = bisect(rate, x0, x1, tol=tol)
    if len(brackets) > 1:
        where = ", ".join(f"[{b[0]:.6g}, {b[1]:.6g}]" for b in brackets)
        note = f"rate changes sign {len(brackets)} times on the scan grid: {where}"
        res = ThresholdResult(res.root, res.bracket_lo, res.bracket_hi,
                              res.iterations, res.achieved_tolerance, (note,))
    return res


def find_eta_threshold(scheme: str, mode: str, e_s: float, tol: float = 1e-6,
                       ec: EcParams = SHANNON_LIMIT) -> Optional[ThresholdResult]:
    """Lowest transmittance (P_s for bb84) above which the rate is positive.

    DI uses the symmetric line eta_A = eta_B. Returns ``None`` if the rate is
    non-positive over all of [0, 1].
    """
    _check(scheme, mode, tol)
    e_s = probability(e_s, "e_s")

    def rate(x: float) -> float:
        return key_rate(scheme, mode, make_params(scheme, x, e_s), ec).rate

    if rate(0.0) > 0:
        return ThresholdResult(0.0, 0.0, 0.0, 0, 0.0)
    return _threshold(rate, 0.0, 1.0, tol, lowest=True)


def find_es_threshold(scheme: str, mode: str, eta: float, tol: float = 1e-6,
                      ec: EcParams = SHANNON_LIMIT) -> Optional[ThresholdResult]:
    """Largest single-click error rate that still yields a positive rate."""
    _check(scheme, mode, tol)
    eta = probability(eta, "eta")

    def rate(e: float) -> float:
        return key_rate(scheme, mode, make_params(scheme, eta, e), ec).rate

    if not rate(0.0) > 0:
        return None
    if rate(ES_SCAN_MAX) > 0:
        return ThresholdResult(ES_SCAN_MAX, ES_SCAN_MAX, ES_SCAN_MAX, 0, 0.0)
    return _threshold(rate, 0.0, ES_SCAN_MAX, tol, lowest=False)


def sweep(scheme: str, e_s: float, eta_min: float, eta_max: float, steps: int,
          ec: EcParams = SHANNON_LIMIT) -> list[SweepRow]:
    """Evaluate both processing modes on an inclusive, evenly spaced grid."""
    if scheme not in SCHEMES:
        raise DomainError(f"unknown scheme {scheme!r}")
    if not (0.0 <= eta_min < eta_max <= 1.0):
        raise DomainError(f"need 0 <= eta_min < eta_max <= 1, got {eta_min}, {eta_max}")
    if steps < 2:
        raise DomainError("steps must be at least 2")
    rows = []
    for x in np.linspace(eta_min, eta_max, steps):
        params = make_params(scheme, float(x), e_s)
        coarse = key_rate(scheme, "coarse", params, ec)
        refined = key_rate(scheme, "refined", params, ec)
        rows.append(SweepRow(
            eta=float(x),
            rate_coarse=coarse.rate,
            rate_refined=refined.rate,
            e_c=coarse_error_for(scheme, params),
            h_a=coarse.h_a,
            i_pa_coarse=coarse.i_pa,
            s=di_bell_parameter(params) if scheme == "di" else None,
        ))
    return rows


def tradeoff_curve(scheme: str, es_min: float, es_max: float, steps: int,
                   tol: float = 1e-6, ec: EcParams = SHANNON_LIMIT) -> list[TradeoffPoint]:
    """Both eta thresholds along an e_s grid. A single-point curve is allowed
    with ``steps=1`` and ``es_min == es_max``."""
    if not (0.0 <= es_min <= es_max <= 0.5):
        raise DomainError(f"need 0 <= es_min <= es_max <= 1/2, got {es_min}, {es_max}")
    if steps < 1 or (steps == 1 and es_min != es_max) or (steps > 1 and es_min == es_max):
        raise DomainError("steps must be 1 for a single point, otherwise >= 2 over a range")
    points = []
    for e in np.linspace(es_min, es_max, steps):
        e = float(e)
        c = find_eta_threshold(scheme, "coarse", e, tol, ec)
        r = find_eta_threshold(scheme, "refined", e, tol, ec)
        points.append(TradeoffPoint(e, c.root if c else None, r.root if r else None))
    return points
