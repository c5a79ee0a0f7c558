"""Seeded per-signal simulation of the detection event models.

The samples are an independent check on the closed forms: every signal is
drawn explicitly, bits are assigned to unusable events exactly as the
protocols prescribe, and all tables and rates are then estimated from counts.

Random numbers come from numpy's PCG64 generator seeded with the given
integer; identical (params, n, seed) always reproduce identical estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .information import DomainError, JointTable, conditional_entropy
from .rates import coarse_error_for
from .scenarios import (
    BITS,
    CLICK,
    DETECTED,
    ERASED,
    FIXED_BIT,
    LOST,
    Bb84Params,
    DdiParams,
    DiParams,
    bb84_joint,
    class_bell_values,
    di_bell_parameter,
    di_joint,
    event_class_weights,
)

GENERATOR = "PCG64"
Z_LIMIT = 5.0
DI_CLASSES = ("both_detected", "only_a", "only_b", "neither")


class ParamsMismatchError(ValueError):
    """Raised when an estimate is compared against parameters it was not drawn from."""


@dataclass(frozen=True)
class MonteCarloEstimate:
    scheme: str
    params: Union[Bb84Params, DdiParams, DiParams]
    n: int
    seed: int
    class_counts: dict[str, int]
    e_c_hat: float
    s_hat: Optional[float]
    joint_coarse_hat: JointTable
    joint_refined_hat: JointTable
    std_errors: dict[str, float]
    # counts[a, refined record, coarse bit]; both tables are marginals of it
    record_counts: np.ndarray = field(repr=False)
    generator: str = GENERATOR


def _smoothed_binomial_se(k: int, n: int) -> float:
    # add-1/2 smoothing keeps the error positive at k = 0 or k = n
    p = (k + 0.5) / (n + 1.0)
    return math.sqrt(p * (1.0 - p) / n)


def _cond_entropy_se(probs: np.ndarray, n: int) -> float:
    """Delta-method standard error of the plug-in H(A|B).

    The gradient of H(A|B) in the cell probabilities is -log2 P(a|b), so the
    variance is Var[-log2 P(a|b)] / n under the table itself.
    """
    pb = probs.sum(axis=0)
    mask = probs > 0
    info = np.zeros_like(probs)
    cond = np.divide(probs, pb, out=np.zeros_like(probs), where=pb > 0)
    info[mask] = -np.log2(cond[mask])
    mean = float((probs * info).sum())
    var = float((probs * info ** 2).sum()) - mean ** 2
    return math.sqrt(max(var, 0.0) / n)


def _smoothed(counts: np.ndarray) -> np.ndarray:
    c = counts.astype(float) + 0.5
    return c / c.sum()


def _tables(scheme: str, record: np.ndarray) -> tuple[JointTable, JointTable]:
    refined_alpha = (CLICK + (ERASED,)) if scheme in ("bb84", "ddi") else (DETECTED + (LOST,))
    refined = JointTable.from_counts(BITS, refined_alpha, record.sum(axis=2))
    coarse = JointTable.from_counts(BITS, BITS, record.sum(axis=1))
    return coarse, refined


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n={n} must be a positive integer")
    return int(n)


def _simulate_assigned(scheme: str, params, p_kept: float, e_single: float,
                       n: int, seed: int, class_names: tuple[str, str]) -> MonteCarloEstimate:
    n = _check_n(n)
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 2, n)
    kept = rng.random(n) < p_kept
    flip = rng.random(n) < e_single
    assigned = rng.integers(0, 2, n)

    b_kept = a ^ flip
    refined_idx = np.where(kept, b_kept, 2)
    coarse_bit = np.where(kept, b_kept, assigned)
    record = np.bincount(a * 6 + refined_idx * 2 + coarse_bit, minlength=12).reshape(2, 3, 2)

    coarse, refined = _tables(scheme, record)
    n_kept = int(kept.sum())
    errors = int((a != coarse_bit).sum())
    se = {
        "e_c": _smoothed_binomial_se(errors, n),
        class_names[0]: _smoothed_binomial_se(n_kept, n),
        class_names[1]: _smoothed_binomial_se(n - n_kept, n),
        "h_coarse": _cond_entropy_se(_smoothed(record.sum(axis=1)), n),
        "h_refined": _cond_entropy_se(_smoothed(record.sum(axis=2)), n),
    }
    return MonteCarloEstimate(
        scheme=scheme,
        params=params,
        n=n,
        seed=seed,
        class_counts={class_names[0]: n_kept, class_names[1]: n - n_kept},
        e_c_hat=errors / n,
        s_hat=None,
        joint_coarse_hat=coarse,
        joint_refined_hat=refined,
        std_errors=se,
        record_counts=record,
    )


def simulate_ddi(params: DdiParams, n: int, seed: int) -> MonteCarloEstimate:
    """Each signal: Alice's bit uniform, detected with probability eta, flipped
    with probability e_s if detected; undetected signals get a fresh uniform
    coarse bit and a ``lost`` refined record."""
    return _simulate_assigned("ddi", params, params.eta, params.e_single, n, seed,
                              ("detected", "not_detected"))


def simulate_bb84(params: Bb84Params, n: int, seed: int) -> MonteCarloEstimate:
    """Same sampler with single clicks kept and double clicks randomized."""
    return _simulate_assigned("bb84", params, params.p_single, params.e_single, n, seed,
                              ("single_click", "double_click"))


def simulate_di(params: DiParams, n: int, seed: int) -> MonteCarloEstimate:
    """Independent detections on both sides; lost signals take the fixed bit.

    The Bell value is the event-class mixture of per-class CHSH values, not a
    sampled measurement-setting estimate.
    """
    n = _check_n(n)
    rng = np.random.default_rng(seed)
    det_a = rng.random(n) < params.eta_a
    det_b = rng.random(n) < params.eta_b
    x = rng.integers(0, 2, n)
    flip = rng.random(n) < params.e_single

    a = np.where(det_a, x, FIXED_BIT)
    # Bob's detected bit: correlated with Alice's when she detected, else uniform
    bob_bit = x ^ (flip & det_a)
    refined_idx = np.where(det_b, bob_bit, 2)
    coarse_bit = np.where(det_b, bob_bit, FIXED_BIT)
    record = np.bincount(a * 6 + refined_idx * 2 + coarse_bit, minlength=12).reshape(2, 3, 2)

    cls = (~det_a).astype(np.int64) * 2 + (~det_b).astype(np.int64)
    counts = np.bincount(cls, minlength=4)
    class_counts = {name: int(c) for name, c in zip(DI_CLASSES, counts)}

    s_values = class_bell_values(params.e_single)
    s_hat = math.fsum(int(c) / n * s for c, s in zip(counts, s_values))
    freq = _smoothed(counts)
    s_var = float((freq * np.square(s_values)).sum()) - float((freq * s_values).sum()) ** 2

    coarse, refined = _tables("di", record)
    errors = int((a != coarse_bit).sum())
    se = {
        "e_c": _smoothed_binomial_se(errors, n),
        "s": math.sqrt(max(s_var, 0.0) / n),
        "h_coarse": _cond_entropy_se(_smoothed(record.sum(axis=1)), n),
        "h_refined": _cond_entropy_se(_smoothed(record.sum(axis=2)), n),
    }
    se.update({name: _smoothed_binomial_se(int(c), n) for name, c in zip(DI_CLASSES, counts)})
    return MonteCarloEstimate(
        scheme="di",
        params=params,
        n=n,
        seed=seed,
        class_counts=class_counts,
        e_c_hat=errors / n,
        s_hat=s_hat,
        joint_coarse_hat=coarse,
        joint_refined_hat=refined,
        std_errors=se,
        record_counts=record,
    )


def simulate(scheme: str, params, n: int, seed: int) -> MonteCarloEstimate:
    if scheme == "bb84":
        return simulate_bb84(params, n, seed)
    if scheme == "ddi":
        return simulate_ddi(params, n, seed)
    if scheme == "di":
        return simulate_di(params, n, seed)
    raise DomainError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class ComparisonRow:
    quantity: str
    analytic: float
    empirical: float
    std_error: float
    z: float
    flagged: bool


@dataclass(frozen=True)
class ComparisonReport:
    scheme: str
    n: int
    seed: int
    rows: tuple[ComparisonRow, ...]
    entropy_bias_allowance: float
    z_limit: float = Z_LIMIT

    @property
    def ok(self) -> bool:
        return not any(r.flagged for r in self.rows)

    @property
    def max_abs_z(self) -> float:
        return max(abs(r.z) for r in self.rows)


def _z(diff: float, se: float) -> float:
    if se > 0:
        return diff / se
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


def _row(name: str, analytic: float, empirical: float, se: float, slack: float = 0.0) -> ComparisonRow:
    diff = empirical - analytic
    excess = math.copysign(max(abs(diff) - slack, 0.0), diff)
    z = _z(excess, se)
    return ComparisonRow(name, analytic, empirical, se, z, abs(z) > Z_LIMIT)


def _binomial_row(name: str, p0: float, k: int, n: int) -> ComparisonRow:
    # z-scores use the standard error under the analytic (null) value
    return _row(name, p0, k / n, math.sqrt(p0 * (1.0 - p0) / n))


def compare(estimate: MonteCarloEstimate, params, scheme: str) -> ComparisonReport:
    """Check an estimate against the closed-form model it was drawn from.

    Every quantity gets a z-score against its null standard error; anything
    beyond 5 is flagged. Plug-in conditional entropies are biased low by
    O(cells / n), so that much slack is granted before scoring them.
    """
    if scheme != estimate.scheme or params != estimate.params:
        raise ParamsMismatchError(
            f"estimate was drawn for {estimate.scheme} {estimate.params}, not {scheme} {params}"
        )
    n = estimate.n
    rows: list[ComparisonRow] = []
    e_c = coarse_error_for(scheme, params)
    errors = round(estimate.e_c_hat * n)
    rows.append(_binomial_row("e_c", e_c, errors, n))

    if scheme == "di":
        weights = event_class_weights(params).as_dict()
        for name in DI_CLASSES:
            rows.append(_binomial_row(f"freq_{name}", weights[name], estimate.class_counts[name], n))
        w = np.array([weights[k] for k in DI_CLASSES])
        s_values = np.array(class_bell_values(params.e_single))
        s0 = di_bell_parameter(params)
        s_se = math.sqrt(max(float((w * s_values ** 2).sum()) - s0 ** 2, 0.0) / n)
        rows.append(_row("s", s0, estimate.s_hat, s_se))
        coarse, refined = di_joint(params, "coarse"), di_joint(params, "refined")
        # fixed-bit assignment skews Alice's marginal; uniform elsewhere
        p_a1 = float(coarse.probs[1].sum())
        rows.append(_binomial_row("p_alice_1", p_a1, int(estimate.record_counts[1].sum()), n))
    else:
        p_kept = params.eta if scheme == "ddi" else params.p_single
        kept_name = next(iter(estimate.class_counts))
        rows.append(_binomial_row(f"freq_{kept_name}", p_kept, estimate.class_counts[kept_name], n))
        bb = params.as_bb84() if scheme == "ddi" else params
        coarse, refined = bb84_joint(bb, "coarse"), bb84_joint(bb, "refined")

    cells = max(coarse.probs.size, refined.probs.size)
    allowance = cells / (n * math.log(2))
    for label, table, hat in (("h_coarse", coarse, estimate.joint_coarse_hat),
                              ("h_refined", refined, estimate.joint_refined_hat)):
        rows.append(_row(label, conditional_entropy(table), conditional_entropy(hat),
                         _cond_entropy_se(table.probs, n), slack=allowance))
    return ComparisonReport(scheme, n, estimate.seed, tuple(rows), allowance)
