"""Sampling distribution, direction generation and recombination.

The distribution follows the CMA-ES defaults for unconstrained problems:
rank-one plus rank-mu covariance update and cumulative step-size adaptation
of the ES step length. Bound constraints are handled either by projecting
the sampled points onto the box or by keeping the raw directions (extreme
barrier) and optionally adding positive generators of the tangent cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

SAMPLED, PROJECTED, GENERATOR = "sampled", "projected", "generator"


class DegenerateDirectionError(ValueError):
    pass


class CovarianceError(RuntimeError):
    pass


def default_population(n: int) -> tuple[int, int]:
    if n < 1:
        raise ValueError("n must be >= 1")
    lam = 4 + int(math.floor(3 * math.log(n)))
    return lam, lam // 2


def default_weights(lam: int, mu: int) -> np.ndarray:
    if not 1 <= mu <= lam:
        raise ValueError(f"need 1 <= mu <= lambda, got mu={mu}, lambda={lam}")
    a = math.log(lam / 2 + 0.5) - np.log(np.arange(1, mu + 1))
    if a[-1] <= 0:
        raise ValueError(f"mu={mu} too large for lambda={lam}: nonpositive weight")
    return a / a.sum()


@dataclass(frozen=True)
class CMAParams:
    """Learning rates of the distribution update (canonical defaults via :meth:`default`)."""

    c_sigma: float
    d_sigma: float
    c_c: float
    c_1: float
    c_mu: float
    mu_eff: float
    chi_n: float

    @classmethod
    def default(cls, n: int, weights) -> "CMAParams":
        w = np.asarray(weights, dtype=float)
        mu_eff = 1.0 / float(np.sum(w ** 2))
        c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
        d_sigma = 1 + 2 * max(0.0, math.sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
        c_c = (4 + mu_eff / n) / (n + 4 + 2 * mu_eff / n)
        c_1 = 2 / ((n + 1.3) ** 2 + mu_eff)
        c_mu = min(1 - c_1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((n + 2) ** 2 + mu_eff))
        chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n ** 2))
        return cls(c_sigma, d_sigma, c_c, c_1, c_mu, mu_eff, chi_n)

    def frozen(self) -> "CMAParams":
        """Copy with every learning rate set to zero."""
        return replace(self, c_sigma=0.0, c_c=0.0, c_1=0.0, c_mu=0.0)


@dataclass(frozen=True)
class DistributionState:
    cov: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    path_sigma: np.ndarray
    path_cov: np.ndarray
    sigma_es: float
    generation: int = 0

    @classmethod
    def initial(cls, n: int, sigma_es: float = 1.0, cov=None) -> "DistributionState":
        cov = np.eye(n) if cov is None else np.array(cov, dtype=float)
        vals, vecs = _eig(cov)
        return cls(cov, vals, vecs, np.zeros(n), np.zeros(n), float(sigma_es), 0)

    @property
    def dimension(self) -> int:
        return self.cov.shape[0]

    def inv_sqrt(self) -> np.ndarray:
        return (self.eigvecs / np.sqrt(self.eigvals)) @ self.eigvecs.T


def _eig(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cov = 0.5 * (cov + cov.T)
    vals, vecs = np.linalg.eigh(cov)
    if not np.all(np.isfinite(vals)):
        raise CovarianceError("covariance has non-finite eigenvalues")
    return vals, vecs


def repair_covariance(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Symmetrize and floor the spectrum at ``1e-14 * trace / n``."""
    n = cov.shape[0]
    cov = 0.5 * (cov + cov.T)
    vals, vecs = _eig(cov)
    floor = 1e-14 * max(float(np.trace(cov)), 0.0) / n
    floor = floor if floor > 0 else 1e-300
    if np.any(vals < floor):
        vals = np.maximum(vals, floor)
        cov = (vecs * vals) @ vecs.T
        cov = 0.5 * (cov + cov.T)
    return cov, vals, vecs


def safeguard_direction(d, d_min: float = 1e-10, d_max: float = 1e10) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    scale = float(np.max(np.abs(d))) if d.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        raise DegenerateDirectionError("cannot safeguard a zero or non-finite direction")
    unit = d / scale
    norm = scale * float(np.linalg.norm(unit))  # scaled to avoid under/overflow
    if norm < d_min:
        return unit * (d_min / (norm / scale))
    if norm > d_max:
        return unit * (d_max / (norm / scale))
    return d


def sample_directions(ds: DistributionState, lam: int, rng: np.random.Generator,
                      d_min: float = 1e-10, d_max: float = 1e10) -> np.ndarray:
    """Draw ``lam`` directions from N(0, C), each clamped into [d_min, d_max]."""
    scale = ds.eigvecs * np.sqrt(ds.eigvals)
    out = np.empty((lam, ds.dimension))
    for i in range(lam):
        while True:
            d = scale @ rng.standard_normal(ds.dimension)
            try:
                out[i] = safeguard_direction(d, d_min, d_max)
                break
            except DegenerateDirectionError:
                continue
    return out


def project_box(x, lower, upper) -> np.ndarray:
    return np.minimum(np.maximum(np.asarray(x, dtype=float), lower), upper)


def projected_direction(x, sigma: float, d, lower, upper) -> np.ndarray:
    """``(P(x + sigma d) - x) / sigma`` for the box projection ``P``.

    Unclipped coordinates are returned as ``d`` itself. The offspring should
    still be formed as ``project_box(x + sigma d)``; ``x + sigma * result``
    may differ from it by rounding.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    raw = x + sigma * d
    clipped = project_box(raw, lower, upper)
    return np.where(clipped == raw, d, (clipped - x) / sigma)


def tangent_generators_box(x, lower, upper, eps: float) -> list[np.ndarray]:
    """Positive generators of the tangent cone of the eps-active bounds.

    Returns an empty list when no bound is within ``eps`` of ``x``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    room_up = (np.asarray(upper) - x) > eps
    room_down = (x - np.asarray(lower)) > eps
    if np.all(room_up) and np.all(room_down):
        return []
    gens = []
    for j in range(n):
        if room_up[j]:
            e = np.zeros(n)
            e[j] = 1.0
            gens.append(e)
        if room_down[j]:
            e = np.zeros(n)
            e[j] = -1.0
            gens.append(e)
    return gens


def recombine(points, weights) -> np.ndarray:
    """Weighted mean, clipped to the componentwise envelope of ``points``.

    The clip only removes floating-point overshoot (weights summing to
    ``1 + eps``); mathematically the mean already lies inside the envelope.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(weights, dtype=float)
    if points.shape[0] != w.size:
        raise ValueError("need one weight per point")
    mean = w @ points
    return np.clip(mean, points.min(axis=0), points.max(axis=0))


def update_distribution(ds: DistributionState, ranked_steps, weights, params: CMAParams,
                        anchor_sigma: Optional[float] = None) -> DistributionState:
    """One CMA update from the selected steps in rank order.

    ``ranked_steps`` are ``(y_i - x_k) / sigma_k`` for the selected parents.
    The new ES step length is ``anchor * exp(c_sigma/d_sigma (|p_sigma|/chi_n - 1))``
    where ``anchor`` defaults to the current ES step length.
    """
    steps = np.atleast_2d(np.asarray(ranked_steps, dtype=float))
    w = np.asarray(weights, dtype=float)
    n = ds.dimension
    p = params
    y_w = w @ steps

    ps = (1 - p.c_sigma) * ds.path_sigma \
        + math.sqrt(p.c_sigma * (2 - p.c_sigma) * p.mu_eff) * (ds.inv_sqrt() @ y_w)
    gen = ds.generation + 1
    denom = math.sqrt(1 - (1 - p.c_sigma) ** (2 * gen)) if p.c_sigma > 0 else 1.0
    h_sigma = float(np.linalg.norm(ps) / max(denom, 1e-300) < (1.4 + 2 / (n + 1)) * p.chi_n)
    pc = (1 - p.c_c) * ds.path_cov + h_sigma * math.sqrt(p.c_c * (2 - p.c_c) * p.mu_eff) * y_w

    if p.c_1 == 0.0 and p.c_mu == 0.0:
        cov, vals, vecs = ds.cov, ds.eigvals, ds.eigvecs
    else:
        rank_mu = (steps.T * w) @ steps
        delta_h = (1 - h_sigma) * p.c_c * (2 - p.c_c)
        cov = (1 - p.c_1 - p.c_mu) * ds.cov \
            + p.c_1 * (np.outer(pc, pc) + delta_h * ds.cov) \
            + p.c_mu * rank_mu
        cov, vals, vecs = repair_covariance(cov)

    anchor = ds.sigma_es if anchor_sigma is None else float(anchor_sigma)
    if p.c_sigma > 0:
        factor = math.exp(min(1.0, (p.c_sigma / p.d_sigma) * (np.linalg.norm(ps) / p.chi_n - 1)))
    else:
        factor = 1.0
    return DistributionState(cov, vals, vecs, ps, pc, anchor * factor, gen)
