"""Physical models for the BB84, DDI and DI schemes.

Each scheme gets closed-form error rates plus coarse and refined joint tables
P(Alice bit, Bob record). Coarse tables are what a security proof sees after
bit assignment to unusable events; refined tables keep Bob's knowledge of
which positions were assigned.

BB84 and DDI assign *random* bits to double clicks / no clicks. DI assigns a
*fixed* bit (0) to lost signals on both sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .information import DomainError, JointTable, binary_entropy, probability

Mode = Literal["coarse", "refined"]

BITS = (0, 1)
CLICK = (("click", 0), ("click", 1))
ERASED = "erased"
DETECTED = (("det", 0), ("det", 1))
LOST = "lost"
FIXED_BIT = 0

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Bb84Params:
    p_single: float
    e_single: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_single", probability(self.p_single, "p_single"))
        object.__setattr__(self, "e_single", probability(self.e_single, "e_single"))


@dataclass(frozen=True)
class DdiParams:
    eta: float
    e_single: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", probability(self.eta, "eta"))
        object.__setattr__(self, "e_single", probability(self.e_single, "e_single"))

    def as_bb84(self) -> Bb84Params:
        # perfect single-photon source: single clicks occur exactly when detected
        return Bb84Params(self.eta, self.e_single)


@dataclass(frozen=True)
class DiParams:
    eta_a: float
    eta_b: float
    e_single: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta_a", probability(self.eta_a, "eta_a"))
        object.__setattr__(self, "eta_b", probability(self.eta_b, "eta_b"))
        e = probability(self.e_single, "e_single")
        if e > 0.5:
            raise DomainError(f"e_single={e} exceeds 1/2 for the DI depolarizing model")
        object.__setattr__(self, "e_single", e)

    @classmethod
    def symmetric(cls, eta: float, e_single: float) -> "DiParams":
        return cls(eta, eta, e_single)


@dataclass(frozen=True)
class EventClassWeights:
    both_detected: float
    only_a: float
    only_b: float
    neither: float

    def as_dict(self) -> dict[str, float]:
        return {
            "both_detected": self.both_detected,
            "only_a": self.only_a,
            "only_b": self.only_b,
            "neither": self.neither,
        }


# Bell value contributed by each DI event class, in EventClassWeights order.
def class_bell_values(e_single: float) -> tuple[float, float, float, float]:
    return (2.0 * SQRT2 * (1.0 - 2.0 * e_single), 0.0, 0.0, 2.0)


# --- BB84 / DDI -----------------------------------------------------------

def coarse_error_rate(p_single: float, e_single: float) -> float:
    """Error rate after random-bit assignment of non-single-click events."""
    ps = probability(p_single, "p_single")
    es = probability(e_single, "e_single")
    return ps * es + (1.0 - ps) * 0.5


def refined_cond_entropy_erasure(p_single: float, e_single: float) -> float:
    """H(A|B) when Bob knows which positions were assigned: an erasure channel
    on top of a binary symmetric channel with crossover ``e_single``."""
    ps = probability(p_single, "p_single")
    return ps * binary_entropy(e_single) + (1.0 - ps)


def bb84_joint(params: Bb84Params, mode: Mode) -> JointTable:
    ps, es = params.p_single, params.e_single
    if mode == "coarse":
        ec = coarse_error_rate(ps, es)
        probs = np.array([[1 - ec, ec], [ec, 1 - ec]]) / 2
        return JointTable(BITS, BITS, probs)
    if mode == "refined":
        agree, flip, erased = ps * (1 - es) / 2, ps * es / 2, (1 - ps) / 2
        probs = np.array([[agree, flip, erased], [flip, agree, erased]])
        return JointTable(BITS, CLICK + (ERASED,), probs)
    raise DomainError(f"unknown mode {mode!r}")


def bb84_coarsening() -> dict:
    """Bob's local map from refined BB84 records to coarse bits."""
    return {
        CLICK[0]: {0: 1.0},
        CLICK[1]: {1: 1.0},
        ERASED: {0: 0.5, 1: 0.5},
    }


# --- DI -------------------------------------------------------------------

def event_class_weights(params: DiParams) -> EventClassWeights:
    a, b = params.eta_a, params.eta_b
    return EventClassWeights(a * b, a * (1 - b), (1 - a) * b, (1 - a) * (1 - b))


def di_bell_parameter(params: DiParams) -> float:
    """CHSH value of the event-class mixture: depolarized pairs when both
    detect, S=2 when both are lost, S=0 for one-sided loss."""
    a, b, es = params.eta_a, params.eta_b, params.e_single
    return 2.0 * SQRT2 * (1.0 - 2.0 * es) * a * b + 2.0 * (1.0 - a) * (1.0 - b)


def di_coarse_error(params: DiParams) -> float:
    a, b, es = params.eta_a, params.eta_b, params.e_single
    return a * b * es + ((1.0 - b) * a + (1.0 - a) * b) * 0.5


def di_alice_entropy(eta_a: float) -> float:
    """Entropy of Alice's bit when lost signals are set to the fixed bit.

    P(A = fixed) = eta_a/2 + (1 - eta_a), so H(A) = h[eta_a / 2].
    """
    eta_a = probability(eta_a, "eta_a")
    return binary_entropy(0.5 * eta_a + (1.0 - eta_a))


def di_joint(params: DiParams, mode: Mode) -> JointTable:
    """Joint table built from the four detection event classes."""
    if mode not in ("coarse", "refined"):
        raise DomainError(f"unknown mode {mode!r}")
    w = event_class_weights(params)
    es = params.e_single
    refined = mode == "refined"
    b_alpha = DETECTED + (LOST,) if refined else BITS
    # detected bits occupy columns 0/1 in both alphabets
    col = {0: 0, 1: 1, LOST: 2 if refined else FIXED_BIT}
    probs = np.zeros((2, len(b_alpha)))
    # both detected: Alice uniform, Bob flips with probability e_single
    for a in BITS:
        probs[a, col[a]] += w.both_detected * (1 - es) / 2
        probs[a, col[1 - a]] += w.both_detected * es / 2
    # only Alice detected: Bob holds the fixed bit / a lost record
    for a in BITS:
        probs[a, col[LOST]] += w.only_a / 2
    # only Bob detected: Alice holds the fixed bit, Bob's outcome uniform
    for bit in BITS:
        probs[FIXED_BIT, col[bit]] += w.only_b / 2
    probs[FIXED_BIT, col[LOST]] += w.neither
    return JointTable(BITS, b_alpha, probs)


def di_coarsening() -> dict:
    """Bob's local map from refined DI records to coarse bits."""
    return {
        DETECTED[0]: {0: 1.0},
        DETECTED[1]: {1: 1.0},
        LOST: {FIXED_BIT: 1.0},
    }
