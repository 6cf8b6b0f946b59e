"""Landscape probes: multistart critical-point search, the infimum identity
along a*exp(b) = 1, and dense contour grids with a discrete-minimum scan.

The finder is the numerical check of the core claim: every finite point where
the augmented gradient vanishes (within tolerance, with |b| bounded) must sit
at base loss 0 with a at 0.  Runs that chase b to infinity are reported
unconverged rather than discarded.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .augment import AugConfig, AugPoint, POLICY_SATURATE, fast_value_and_grad, slice_value
from .fields import ScalarField
from .minimize import descend
from .optimize import stationarity_residual

SEED_A_RANGE = (-2.0, 2.0)
SEED_B_RANGE = (-3.0, 3.0)
B_ESCAPE_MARGIN = 5.0


@dataclass(frozen=True)
class CriticalPointReport:
    point: AugPoint
    grad_norm: float
    base_loss: float
    a_value: float
    seed_index: int
    converged: bool
    iterations: int

    def as_dict(self) -> dict:
        return {
            "theta": list(self.point.theta),
            "a": self.point.a,
            "b": self.point.b,
            "grad_norm": self.grad_norm,
            "base_loss": self.base_loss,
            "seed_index": self.seed_index,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def find_critical_points(field: ScalarField, cfg: AugConfig | None = None,
                         n_seeds: int = 256, seed: int = 0, *,
                         grad_tol: float = 1e-8, b_max: float = 20.0,
                         max_iters: int = 3000, polish_iters: int = 2000
                         ) -> list[CriticalPointReport]:
    """Damped descent from seeded starts; one report per start, converged or not.

    Seeds draw theta uniformly from the field's box, a from [-2, 2] and b from
    [-3, 3].  A report is converged only when the gradient norm reached
    ``grad_tol`` with |b| <= ``b_max``; runs whose |b| exceeds the bound by a
    margin are abandoned early (they are following the valley to infinity).
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    cfg = cfg or AugConfig()
    if cfg.saturation_policy != POLICY_SATURATE:
        # sweeps must not abort mid-run on an exponent guard
        cfg = AugConfig(lam=cfg.lam, b_clamp=cfg.b_clamp,
                        saturation_policy=POLICY_SATURATE)
    value_fn, grad_fn = fast_value_and_grad(field, cfg)
    rng = random.Random(seed)
    escape_at = b_max + B_ESCAPE_MARGIN

    reports = []
    for index in range(n_seeds):
        theta0 = [rng.uniform(lo, hi) for lo, hi in zip(field.lower, field.upper)]
        x0 = theta0 + [rng.uniform(*SEED_A_RANGE), rng.uniform(*SEED_B_RANGE)]
        res = descend(
            value_fn, grad_fn, x0,
            grad_tol=grad_tol,
            max_iters=max_iters,
            polish_iters=polish_iters,
            escape=lambda x: abs(x[-1]) > escape_at,
            clamp_lower=field.lower,
            clamp_upper=field.upper,
        )
        point = AugPoint(tuple(res.x[:field.dim]), res.x[field.dim], res.x[field.dim + 1])
        base_loss = field.value(point.theta, check_domain=False)
        # same certificate as the trajectory classifier: a vanishing gradient
        # inside the b window plus a vanishing a-stationarity residual
        converged = (res.converged and abs(point.b) <= b_max
                     and stationarity_residual(base_loss, point.b) <= grad_tol)
        reports.append(CriticalPointReport(
            point=point,
            grad_norm=res.grad_norm,
            base_loss=base_loss,
            a_value=point.a,
            seed_index=index,
            converged=converged,
            iterations=res.iterations,
        ))
    return reports


def probe_infimum(field: ScalarField, theta: Sequence[float],
                  cfg: AugConfig | None = None, *, b_max: float = 20.0,
                  curve_samples: int = 257, polish_iters: int = 80) -> float:
    """Smallest augmented value reachable over (a, b) at fixed theta.

    Along a = exp(-b) the product a*exp(b) stays at 1 and the augmented loss
    collapses to L + lam*exp(-2b), which decays to L as b grows; the probe
    samples that curve up to ``b_max``, includes the a=0 point (exact when
    L = 0), then polishes with a short (a, b) descent.  The result always
    lies in [L, L + lam*exp(-2*b_max)] up to rounding.
    """
    cfg = cfg or AugConfig()
    base = field.value(theta)
    best = base + base if base > 0.0 else 0.0  # a = 0 candidate: exactly 2L
    best_ab = (0.0, 0.0)
    for i in range(curve_samples):
        t = i / (curve_samples - 1)
        b = b_max * t
        a = math.exp(-b)
        v, _ = slice_value(base, a, b, cfg)
        if v < best:
            best = v
            best_ab = (a, b)

    def value_fn(ab):
        return slice_value(base, ab[0], ab[1], cfg)[0]

    def grad_fn(ab):
        a, b = ab
        if a == 0.0:
            u = 0.0
        else:
            t = math.log(abs(a)) + b
            u = math.copysign(math.exp(max(-cfg.b_clamp, min(cfg.b_clamp, t))), a)
        eb = math.exp(min(b, cfg.b_clamp))
        if base == 0.0:
            return [2.0 * cfg.lam * a, 0.0]
        return [2.0 * base * (u - 1.0) * eb + 2.0 * cfg.lam * a,
                2.0 * base * (u - 1.0) * u]

    res = descend(value_fn, grad_fn, list(best_ab), grad_tol=0.0,
                  max_iters=polish_iters, polish_iters=0,
                  escape=lambda x: abs(x[1]) > b_max + B_ESCAPE_MARGIN)
    return min(best, res.value)


@dataclass
class ContourGrid:
    """Augmented loss sampled on an (a, b) grid at a constant base loss."""

    a_axis: list[float]
    b_axis: list[float]
    values: list[list[float]]  # values[i][j] at (a_axis[i], b_axis[j])
    l_slice: float
    lam: float
    saturated: list[tuple[int, int]]

    def grid_min(self) -> dict:
        best = math.inf
        at = (0, 0)
        for i, row in enumerate(self.values):
            for j, v in enumerate(row):
                if v < best:
                    best = v
                    at = (i, j)
        i, j = at
        a, b = self.a_axis[i], self.b_axis[j]
        u = a * math.exp(b)
        return {
            "i": i, "j": j, "a": a, "b": b, "value": best,
            "u_deviation": abs(u - 1.0),
            "on_max_b_edge": j == len(self.b_axis) - 1,
        }

    def as_dict(self) -> dict:
        return {
            "l_slice": self.l_slice,
            "lambda": self.lam,
            "a_axis": self.a_axis,
            "b_axis": self.b_axis,
            "saturated_cells": [list(c) for c in self.saturated],
        }


def _axis(lo: float, hi: float, n: int) -> list[float]:
    # affine blend hits both endpoints exactly and 0 exactly on symmetric ranges
    return [lo * (1.0 - i / (n - 1)) + hi * (i / (n - 1)) for i in range(n)]


def sample_contour(l_slice: float, lam: float = 1.0,
                   a_range: tuple[float, float] = (-2.0, 2.0),
                   b_range: tuple[float, float] = (-2.0, 4.0),
                   resolution: int | tuple[int, int] = 101,
                   cfg: AugConfig | None = None) -> ContourGrid:
    """Dense evaluation of the augmented loss with the base frozen at l_slice."""
    if isinstance(resolution, int):
        na = nb = resolution
    else:
        na, nb = resolution
    if na < 2 or nb < 2:
        raise ValueError("resolution must be at least 2 per axis")
    if l_slice < 0.0:
        raise ValueError("l_slice must be nonnegative")
    if not all(map(math.isfinite, (*a_range, *b_range))):
        raise ValueError("ranges must be finite")
    cfg = cfg or AugConfig(lam=lam)
    if cfg.lam != lam:
        cfg = AugConfig(lam=lam, b_clamp=cfg.b_clamp,
                        saturation_policy=cfg.saturation_policy)
    a_axis = _axis(a_range[0], a_range[1], na)
    b_axis = _axis(b_range[0], b_range[1], nb)
    values = []
    flagged = []
    for i, a in enumerate(a_axis):
        row = []
        for j, b in enumerate(b_axis):
            v, sat = slice_value(l_slice, a, b, cfg)
            row.append(v)
            if sat:
                flagged.append((i, j))
        values.append(row)
    return ContourGrid(a_axis, b_axis, values, l_slice, lam, flagged)


def stationarity_scan(grid: ContourGrid) -> list[tuple[int, int]]:
    """All interior cells weakly minimal against their 8 neighbors, row-major."""
    V = grid.values
    na = len(grid.a_axis)
    nb = len(grid.b_axis)
    found = []
    for i in range(1, na - 1):
        for j in range(1, nb - 1):
            c = V[i][j]
            minimal = True
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if di == 0 and dj == 0:
                        continue
                    if V[i + di][j + dj] < c:
                        minimal = False
                        break
                if not minimal:
                    break
            if minimal:
                found.append((i, j))
    return found
