"""See-saw maximization of the Svetlichny value and grid verification.

With five directions held fixed, <S> is linear in the sixth, so the
alternating ascent sets each direction to its normalized coefficient
vector in turn.  The per-cycle objective is non-decreasing by
construction, and a seeded multistart makes the search global in practice.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .qcore import (
    GhzClassParams,
    ThreeQubitPureState,
    ValidationError,
    WClassParams,
    ghz_state,
    w_state,
)
from .bell import (
    CorrelationTensor,
    MeasurementSettings,
    correlation_tensor,
    settings_from_vectors,
    smax_ghz_closed,
    smax_w,
)
from .entanglement import ghz_profile_closed, w_profile_closed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizationConfig:
    n_starts: int = 50
    max_iterations: int = 500
    convergence_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValidationError("n_starts must be at least 1")
        if self.convergence_tol <= 0:
            raise ValidationError("convergence_tol must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    best_value: float
    best_settings: MeasurementSettings
    iterations_used: int
    converged: bool
    trace: Tuple[float, ...]


@dataclass(frozen=True)
class VerificationRow:
    """One grid point of a closed-form vs. numeric comparison."""

    params: Tuple[float, ...]
    closed_value: float
    numeric_value: float
    gap: float
    flag: str


def _update_coefficient(t: np.ndarray, vs: np.ndarray, idx: int) -> np.ndarray:
    """Coefficient vectors of <S> in direction `idx` for a batch of starts.

    `vs` has shape (6, n, 3) ordered (a, a', b, b', c, c'); the result has
    shape (n, 3).
    """
    a, ap, b, bp, c, cp = vs
    d = b + bp
    dp = b - bp
    e = np.einsum
    if idx == 0:
        return e("ijk,nj,nk->ni", t, d, c) + e("ijk,nj,nk->ni", t, dp, cp)
    if idx == 1:
        return e("ijk,nj,nk->ni", t, dp, c) - e("ijk,nj,nk->ni", t, d, cp)
    if idx == 2:
        return (e("ijk,ni,nk->nj", t, a, c) + e("ijk,ni,nk->nj", t, a, cp)
                + e("ijk,ni,nk->nj", t, ap, c) - e("ijk,ni,nk->nj", t, ap, cp))
    if idx == 3:
        return (e("ijk,ni,nk->nj", t, a, c) - e("ijk,ni,nk->nj", t, a, cp)
                - e("ijk,ni,nk->nj", t, ap, c) - e("ijk,ni,nk->nj", t, ap, cp))
    if idx == 4:
        return e("ijk,ni,nj->nk", t, a, d) + e("ijk,ni,nj->nk", t, ap, dp)
    if idx == 5:
        return e("ijk,ni,nj->nk", t, a, dp) - e("ijk,ni,nj->nk", t, ap, d)
    raise ValidationError(f"direction index {idx} out of range")


def _batch_values(t: np.ndarray, vs: np.ndarray) -> np.ndarray:
    a, ap, b, bp, c, cp = vs
    d = b + bp
    dp = b - bp
    e = np.einsum
    return (e("ijk,ni,nj,nk->n", t, a, d, c)
            + e("ijk,ni,nj,nk->n", t, a, dp, cp)
            + e("ijk,ni,nj,nk->n", t, ap, dp, c)
            - e("ijk,ni,nj,nk->n", t, ap, d, cp))


def _seesaw_batch(tensor: CorrelationTensor, vs: np.ndarray,
                  cfg: OptimizationConfig):
    """Run the alternating ascent on a batch of independent starts.

    Converged starts are frozen so batched and one-at-a-time execution
    produce the same ascent paths.  Returns (values, vectors, iterations,
    all_converged).
    """
    t = tensor.entries
    n = vs.shape[1]
    active = np.ones(n, dtype=bool)
    prev = _batch_values(t, vs)
    iterations = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        for idx in range(6):
            coeff = _update_coefficient(t, vs, idx)
            norms = np.linalg.norm(coeff, axis=1)
            # Degenerate coefficient vectors keep their previous direction.
            usable = active & (norms > 1e-14)
            vs[idx][usable] = coeff[usable] / norms[usable, None]
        values = _batch_values(t, vs)
        gains = values - prev
        prev = values
        active &= gains >= cfg.convergence_tol
        if not active.any():
            return values, vs, iterations, True
    return prev, vs, iterations, False


def _settings_to_array(ms: MeasurementSettings) -> np.ndarray:
    return ms.vectors()[:, None, :].copy()


def seesaw_maximize(s: ThreeQubitPureState, init: MeasurementSettings,
                    cfg: OptimizationConfig) -> OptimizationResult:
    """Alternating ascent of <S> from one initial settings choice."""
    tensor = correlation_tensor(s)
    t = tensor.entries
    vs = _settings_to_array(init)
    trace = [float(_batch_values(t, vs)[0])]
    prev = trace[0]
    converged = False
    iterations = 0
    for _ in range(cfg.max_iterations):
        iterations += 1
        for idx in range(6):
            coeff = _update_coefficient(t, vs, idx)[0]
            norm = np.linalg.norm(coeff)
            if norm > 1e-14:
                vs[idx][0] = coeff / norm
        value = float(_batch_values(t, vs)[0])
        trace.append(value)
        if value - prev < cfg.convergence_tol:
            converged = True
            break
        prev = value
    best = trace[-1]
    if best < 0.0:
        # Flipping one party's directions flips the sign, so report |<S>|.
        vs[0] = -vs[0]
        vs[1] = -vs[1]
        best = -best
    return OptimizationResult(
        best_value=best,
        best_settings=settings_from_vectors(vs[:, 0, :]),
        iterations_used=iterations,
        converged=converged,
        trace=tuple(trace),
    )


def _random_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform directions for n starts: shape (6, n, 3).

    Sampling is inverse-CDF on the sphere: the cosine of the polar angle is
    uniform on [-1, 1] and the azimuth uniform on [0, 2 pi).
    """
    cos_polar = rng.uniform(-1.0, 1.0, size=(6, n))
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=(6, n))
    sin_polar = np.sqrt(1.0 - cos_polar ** 2)
    return np.stack([
        sin_polar * np.cos(azimuth),
        sin_polar * np.sin(azimuth),
        cos_polar,
    ], axis=-1)


def multistart_maximize(s: ThreeQubitPureState,
                        cfg: OptimizationConfig) -> OptimizationResult:
    """Best of n_starts see-saw ascents from seeded random settings."""
    tensor = correlation_tensor(s)
    rng = np.random.default_rng(cfg.seed)
    vs = _random_directions(rng, cfg.n_starts)
    values, vs, iterations, converged = _seesaw_batch(tensor, vs, cfg)
    magnitudes = np.abs(values)
    best = int(np.argmax(magnitudes))
    vectors = vs[:, best, :].copy()
    if values[best] < 0.0:
        vectors[0] = -vectors[0]
        vectors[1] = -vectors[1]
    return OptimizationResult(
        best_value=float(magnitudes[best]),
        best_settings=settings_from_vectors(vectors),
        iterations_used=iterations,
        converged=converged,
        trace=tuple(float(v) for v in magnitudes),
    )


def _row_config(cfg: OptimizationConfig, index: int) -> OptimizationConfig:
    """Derive a per-row config so parallel and serial sweeps agree."""
    row_seed = int(np.random.SeedSequence([cfg.seed, index]).generate_state(1)[0])
    return replace(cfg, seed=row_seed)


def _flag_for_gap(gap: float, report_tol: float) -> str:
    if abs(gap) <= report_tol:
        return "match"
    return "numeric-above" if gap > 0 else "numeric-below"


def ghz_verification_row(index: int, theta: float, theta3: float,
                         cfg: OptimizationConfig,
                         report_tol: float = 1e-3) -> VerificationRow:
    """One GHZ grid point: closed form vs. escalating multistart numeric.

    A numeric-below flag is retried with four times the starts before it
    sticks; numeric-above rows are findings, not failures.
    """
    params = GhzClassParams(float(theta), float(theta3))
    closed = smax_ghz_closed(ghz_profile_closed(params)).closed_value
    row_cfg = _row_config(cfg, index)
    numeric = multistart_maximize(ghz_state(params), row_cfg).best_value
    flag = _flag_for_gap(numeric - closed, report_tol)
    if flag == "numeric-below":
        escalated = replace(row_cfg, n_starts=row_cfg.n_starts * 4)
        numeric = max(numeric, multistart_maximize(
            ghz_state(params), escalated).best_value)
        flag = _flag_for_gap(numeric - closed, report_tol)
    return VerificationRow(
        params=(params.theta, params.theta3),
        closed_value=closed, numeric_value=numeric,
        gap=numeric - closed, flag=flag)


def ghz_grid_points(theta_steps: int,
                    theta3_values: Sequence[float]) -> list:
    if theta_steps < 2:
        raise ValidationError("theta_steps must be at least 2")
    return [(float(theta), float(theta3))
            for theta3 in theta3_values
            for theta in np.linspace(0.0, math.pi / 2, theta_steps)]


def verify_grid_ghz(theta_steps: int, theta3_values: Sequence[float],
                    cfg: Optional[OptimizationConfig] = None,
                    report_tol: float = 1e-3) -> list:
    """Compare the numeric maximum against the GHZ closed form on a grid."""
    cfg = cfg or OptimizationConfig()
    return [ghz_verification_row(index, theta, theta3, cfg, report_tol)
            for index, (theta, theta3)
            in enumerate(ghz_grid_points(theta_steps, theta3_values))]


def w_params_for_sum(c12: float, sum_c: float) -> WClassParams:
    """Amplitudes realizing pairwise concurrence c12 and total sum sum_c.

    With beta gamma = c12 / 2 fixed, the remaining freedom is the third
    amplitude alpha; c23 + c31 = 2 alpha (beta + gamma) grows monotonically
    with alpha, so the target sum is matched by a bracketed root solve.
    Raises when the sum is outside the realizable range.
    """
    if not 0.0 <= c12 <= 1.0:
        raise ValidationError("c12 must lie in [0, 1]")
    alpha_max = math.sqrt(max(0.0, 1.0 - c12))
    sum_max = c12 + 2.0 * math.sqrt(max(0.0, 2.0 * c12 * (1.0 - c12)))
    target = sum_c - c12
    if target < -1e-9 or sum_c > sum_max + 1e-9:
        raise ValidationError(
            f"sum {sum_c} outside realizable range [{c12}, {sum_max}]")

    def excess(alpha):
        return 2.0 * alpha * math.sqrt(1.0 - alpha * alpha + c12) - target

    if target <= 0.0:
        alpha = 0.0
    elif excess(alpha_max) <= 0.0:
        alpha = alpha_max
    else:
        alpha = brentq(excess, 0.0, alpha_max, xtol=1e-14)
    one_minus = 1.0 - alpha * alpha
    disc = math.sqrt(max(0.0, one_minus * one_minus - c12 * c12))
    beta = math.sqrt((one_minus + disc) / 2.0)
    gamma = math.sqrt(max(0.0, (one_minus - disc) / 2.0))
    norm = math.sqrt(alpha ** 2 + beta ** 2 + gamma ** 2)
    return WClassParams(alpha / norm, beta / norm, gamma / norm)


def w_verification_row(index: int, c12: float, sum_c: float,
                       cfg: OptimizationConfig,
                       report_tol: float = 1e-3) -> Optional[VerificationRow]:
    """One W grid point, or None when (c12, sum) is not realizable."""
    try:
        params = w_params_for_sum(float(c12), float(sum_c))
    except ValidationError as exc:
        logger.info("skipping c12=%g sum=%g: %s", c12, sum_c, exc)
        return None
    profile = w_profile_closed(params)
    closed = smax_w(profile).closed_value
    row_cfg = _row_config(cfg, index)
    numeric = multistart_maximize(w_state(params), row_cfg).best_value
    flag = _flag_for_gap(numeric - closed, report_tol)
    if flag == "numeric-below":
        escalated = replace(row_cfg, n_starts=row_cfg.n_starts * 4)
        numeric = max(numeric, multistart_maximize(
            w_state(params), escalated).best_value)
        flag = _flag_for_gap(numeric - closed, report_tol)
    return VerificationRow(
        params=(profile.c12, profile.c23, profile.c31),
        closed_value=closed, numeric_value=numeric,
        gap=numeric - closed, flag=flag)


def w_grid_points(c12_values: Sequence[float], sum_steps: int) -> list:
    """Fig.-2 style grid: the concurrence sum swept over [0, 2] per curve."""
    if sum_steps < 2:
        raise ValidationError("sum_steps must be at least 2")
    return [(float(c12), float(sum_c))
            for c12 in c12_values
            for sum_c in np.linspace(0.0, 2.0, sum_steps)]


def verify_grid_w(c12_values: Sequence[float], sum_steps: int,
                  cfg: Optional[OptimizationConfig] = None,
                  report_tol: float = 1e-3) -> list:
    """Compare numeric maxima against the reduced W form along Fig.-2 curves.

    Grid points outside the realizable range for their c12 are skipped
    with a log line.
    """
    cfg = cfg or OptimizationConfig()
    rows = []
    for index, (c12, sum_c) in enumerate(w_grid_points(c12_values, sum_steps)):
        row = w_verification_row(index, c12, sum_c, cfg, report_tol)
        if row is not None:
            rows.append(row)
    return rows
