"""Information-theoretic primitives and a bracketing root finder.

All entropies are in bits. ``0 * log2(0)`` is taken as 0 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

PROB_TOL = 1e-12


class DomainError(ValueError):
    """Raised when an input lies outside its mathematical domain."""


class NoSignChangeError(ValueError):
    """Raised when a bisection bracket does not straddle a root."""


class ConvergenceError(RuntimeError):
    """Raised when bisection exhausts its iteration budget."""


def probability(x: float, name: str = "value") -> float:
    """Validate ``x`` as a probability, clamping float noise within 1e-12."""
    x = float(x)
    if math.isnan(x) or x < -PROB_TOL or x > 1.0 + PROB_TOL:
        raise DomainError(f"{name}={x!r} is not a probability in [0, 1]")
    return min(max(x, 0.0), 1.0)


def _plogp(p: float) -> float:
    return 0.0 if p <= 0.0 else -p * math.log2(p)


def binary_entropy(x: float) -> float:
    """Binary entropy h[x] = -x log2 x - (1-x) log2(1-x).

    >>> binary_entropy(0.5)
    1.0
    >>> binary_entropy(0.0)
    0.0
    """
    x = probability(x, "x")
    if x == 0.0 or x == 1.0:
        return 0.0
    if x == 0.5:
        return 1.0
    return _plogp(x) + _plogp(1.0 - x)


def _check_distribution(dist: np.ndarray, what: str) -> np.ndarray:
    if np.any(np.isnan(dist)) or np.any(dist < -PROB_TOL):
        raise DomainError(f"{what} has negative or NaN entries")
    total = float(dist.sum())
    if abs(total - 1.0) > PROB_TOL:
        raise DomainError(f"{what} sums to {total!r}, not 1")
    return np.clip(dist, 0.0, None)


def shannon_entropy(dist: Sequence[float] | np.ndarray) -> float:
    """Shannon entropy of a probability vector, in bits."""
    p = _check_distribution(np.asarray(dist, dtype=float).ravel(), "distribution")
    return math.fsum(_plogp(float(v)) for v in p)


@dataclass(frozen=True)
class JointTable:
    """Joint distribution P(a, b) over Alice's and Bob's alphabets.

    Rows are indexed by ``alphabet_a``, columns by ``alphabet_b``.
    """

    alphabet_a: tuple
    alphabet_b: tuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float)
        a, b = tuple(self.alphabet_a), tuple(self.alphabet_b)
        if probs.shape != (len(a), len(b)):
            raise DomainError(
                f"table shape {probs.shape} does not match alphabets ({len(a)}, {len(b)})"
            )
        if len(set(a)) != len(a) or len(set(b)) != len(b):
            raise DomainError("alphabet labels must be unique")
        probs = _check_distribution(probs, "joint table")
        probs.setflags(write=False)
        object.__setattr__(self, "alphabet_a", a)
        object.__setattr__(self, "alphabet_b", b)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_counts(cls, alphabet_a, alphabet_b, counts) -> "JointTable":
        counts = np.asarray(counts, dtype=float)
        return cls(alphabet_a, alphabet_b, counts / counts.sum())

    def prob(self, a: Hashable, b: Hashable) -> float:
        return float(self.probs[self.alphabet_a.index(a), self.alphabet_b.index(b)])

    def merge_b(self, mapping: Mapping[Hashable, Mapping[Hashable, float]],
                alphabet_b: Sequence[Hashable]) -> "JointTable":
        """Push Bob's symbols through a stochastic map into a new alphabet.

        ``mapping[old][new]`` is the probability that ``old`` becomes ``new``.
        A deterministic column merge is the special case of 0/1 weights; any
        such map is a local processing of Bob's data and cannot lower H(A|B).
        """
        new_b = tuple(alphabet_b)
        channel = np.zeros((len(self.alphabet_b), len(new_b)))
        for i, old in enumerate(self.alphabet_b):
            row = mapping[old]
            for new, w in row.items():
                channel[i, new_b.index(new)] = w
            if abs(channel[i].sum() - 1.0) > PROB_TOL:
                raise DomainError(f"mapping for {old!r} is not normalized")
        return JointTable(self.alphabet_a, new_b, self.probs @ channel)

    def disagreement(self) -> float:
        """P(a != b) over symbols shared by both alphabets' labels."""
        return math.fsum(
            float(self.probs[i, j])
            for i, a in enumerate(self.alphabet_a)
            for j, b in enumerate(self.alphabet_b)
            if a != b
        )


def marginal_a(joint: JointTable) -> np.ndarray:
    return joint.probs.sum(axis=1)


def marginal_b(joint: JointTable) -> np.ndarray:
    return joint.probs.sum(axis=0)


def conditional_entropy(joint: JointTable) -> float:
    """H(A|B) = sum_b P(b) H(A | B=b); empty columns contribute nothing."""
    terms = []
    for col in joint.probs.T:
        pb = math.fsum(float(v) for v in col)
        if pb <= 0.0:
            continue
        terms.append(pb * math.fsum(_plogp(float(v) / pb) for v in col))
    return math.fsum(terms)


@dataclass(frozen=True)
class ThresholdResult:
    root: float
    bracket_lo: float
    bracket_hi: float
    iterations: int
    achieved_tolerance: float
    warnings: tuple[str, ...] = ()


def bisect(f: Callable[[float], float], lo: float, hi: float,
           tol: float = 1e-9, max_iter: int = 200) -> ThresholdResult:
    """Bisection on a sign-changing bracket ``[lo, hi]``.

    Returns the midpoint of the final bracket, whose width is at most ``tol``.
    An exact zero hit at an evaluation point ends the search early.

    Raises:
        NoSignChangeError: if ``f(lo)`` and ``f(hi)`` share a strict sign.
        ConvergenceError: if ``max_iter`` halvings do not reach ``tol``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return ThresholdResult(lo, lo, lo, 0, 0.0)
    if fhi == 0.0:
        return ThresholdResult(hi, hi, hi, 0, 0.0)
    if (flo < 0) == (fhi < 0):
        raise NoSignChangeError(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    lo_negative = flo < 0
    for it in range(1, max_iter + 1):
        if hi - lo <= tol:
            mid = 0.5 * (lo + hi)
            return ThresholdResult(mid, lo, hi, it - 1, hi - lo)
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return ThresholdResult(mid, mid, mid, it, 0.0)
        if (fm < 0) == lo_negative:
            lo = mid
        else:
            hi = mid
    if hi - lo <= tol:
        return ThresholdResult(0.5 * (lo + hi), lo, hi, max_iter, hi - lo)
    raise ConvergenceError(f"bracket width {hi - lo} > tol {tol} after {max_iter} iterations")


def sign_change_brackets(f: Callable[[float], float], lo: float, hi: float,
                         points: int = 512) -> list[tuple[float, float, float, float]]:
    """Scan a uniform grid and return every ``(x0, x1, f0, f1)`` where the
    sign of ``f`` flips between ``<= 0`` and ``> 0``."""
    xs = np.linspace(lo, hi, points)
    vals = [f(float(x)) for x in xs]
    out = []
    for i in range(points - 1):
        if (vals[i] > 0) != (vals[i + 1] > 0):
            out.append((float(xs[i]), float(xs[i + 1]), vals[i], vals[i + 1]))
    return out
