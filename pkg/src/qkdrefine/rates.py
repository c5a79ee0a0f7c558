"""Asymptotic secret-key rates, R = H(A) - f H(A|B) - I_pa.

Every scheme/mode pair returns a :class:`RateBreakdown`. Rates are signed;
use :attr:`RateBreakdown.positive_rate` when a clamped value is wanted.
The efficiency factor ``f`` scales only the error-correction term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

from .information import DomainError, binary_entropy, conditional_entropy
from .scenarios import (
    Bb84Params,
    DdiParams,
    DiParams,
    coarse_error_rate,
    di_alice_entropy,
    di_bell_parameter,
    di_coarse_error,
    di_joint,
    refined_cond_entropy_erasure,
)

Scheme = Literal["bb84", "ddi", "di"]
Params = Union[Bb84Params, DdiParams, DiParams]
SCHEMES = ("bb84", "ddi", "di")
MODES = ("coarse", "refined")


@dataclass(frozen=True)
class EcParams:
    f: float = 1.0

    def __post_init__(self) -> None:
        if not (self.f >= 1.0 and math.isfinite(self.f)):
            raise DomainError(f"error-correction inefficiency f={self.f} must be >= 1")


SHANNON_LIMIT = EcParams(1.0)


@dataclass(frozen=True)
class RateBreakdown:
    h_a: float
    h_a_given_b: float
    i_pa: float
    f: float
    rate: float

    @property
    def positive_rate(self) -> float:
        return max(self.rate, 0.0)

    def as_dict(self) -> dict[str, float]:
        return {
            "h_a": self.h_a,
            "h_a_given_b": self.h_a_given_b,
            "i_pa": self.i_pa,
            "f": self.f,
            "rate": self.rate,
        }


def generic_rate(h_a: float, h_a_given_b: float, i_pa: float,
                 ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    if min(h_a, h_a_given_b, i_pa) < 0:
        raise DomainError("entropies must be non-negative")
    return RateBreakdown(h_a, h_a_given_b, i_pa, ec.f, h_a - ec.f * h_a_given_b - i_pa)


def bb84_coarse_rate(params: Bb84Params, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    h_ec = binary_entropy(coarse_error_rate(params.p_single, params.e_single))
    return generic_rate(1.0, h_ec, h_ec, ec)


def bb84_refined_rate(params: Bb84Params, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    """Bob corrects errors knowing which positions were randomly assigned;
    privacy amplification still pays h[e_c] for the coarse data."""
    h_ec = binary_entropy(coarse_error_rate(params.p_single, params.e_single))
    h_ab = refined_cond_entropy_erasure(params.p_single, params.e_single)
    return generic_rate(1.0, h_ab, h_ec, ec)


def ddi_coarse_rate(params: DdiParams, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    return bb84_coarse_rate(params.as_bb84(), ec)


def ddi_refined_rate(params: DdiParams, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    return bb84_refined_rate(params.as_bb84(), ec)


def di_ipa(s: float) -> float:
    """Privacy-amplification cost from the CHSH value ``s``.

    Without a Bell violation (s < 2) Eve is unconstrained and the cost is a
    full bit; this also keeps the curve continuous at s = 2.
    """
    if not s >= 2.0:
        return 1.0
    # (S/2)^2 - 1 may overshoot 1 by an ulp at S = 2*sqrt(2)
    root = math.sqrt(min(max((s / 2.0) ** 2 - 1.0, 0.0), 1.0))
    return binary_entropy((1.0 + root) / 2.0)


def di_coarse_rate(params: DiParams, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    """Fixed-bit assignment rate. The error-correction cost is h[e_c], as in
    the standard analysis, even though Alice's bit is not uniform; see
    :func:`di_coarse_table_gap` for the difference to the true H(A|B)."""
    return generic_rate(
        di_alice_entropy(params.eta_a),
        binary_entropy(di_coarse_error(params)),
        di_ipa(di_bell_parameter(params)),
        ec,
    )


def di_refined_rate(params: DiParams, ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    return generic_rate(
        di_alice_entropy(params.eta_a),
        conditional_entropy(di_joint(params, "refined")),
        di_ipa(di_bell_parameter(params)),
        ec,
    )


def di_coarse_table_gap(params: DiParams) -> float:
    """h[e_c] - H(A|B) of the coarse DI table; non-negative, zero at eta_a = 1."""
    return binary_entropy(di_coarse_error(params)) - conditional_entropy(di_joint(params, "coarse"))


_RATES = {
    ("bb84", "coarse"): bb84_coarse_rate,
    ("bb84", "refined"): bb84_refined_rate,
    ("ddi", "coarse"): ddi_coarse_rate,
    ("ddi", "refined"): ddi_refined_rate,
    ("di", "coarse"): di_coarse_rate,
    ("di", "refined"): di_refined_rate,
}


def make_params(scheme: str, x: float, e_single: float) -> Params:
    """Parameters for the one-dimensional family used in sweeps and thresholds:
    ``x`` is P_s (bb84), eta (ddi) or the symmetric link eta (di)."""
    if scheme == "bb84":
        return Bb84Params(x, e_single)
    if scheme == "ddi":
        return DdiParams(x, e_single)
    if scheme == "di":
        return DiParams.symmetric(x, e_single)
    raise DomainError(f"unknown scheme {scheme!r}")


def key_rate(scheme: str, mode: str, params: Params,
             ec: EcParams = SHANNON_LIMIT) -> RateBreakdown:
    try:
        fn = _RATES[scheme, mode]
    except KeyError:
        raise DomainError(f"unknown scheme/mode {scheme!r}/{mode!r}") from None
    return fn(params, ec)


def coarse_error_for(scheme: str, params: Params) -> float:
    if scheme == "bb84":
        return coarse_error_rate(params.p_single, params.e_single)
    if scheme == "ddi":
        return coarse_error_rate(params.eta, params.e_single)
    if scheme == "di":
        return di_coarse_error(params)
    raise DomainError(f"unknown scheme {scheme!r}")
