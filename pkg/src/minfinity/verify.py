"""Verification suites: each returns a JSON-ready report and counts violations.

Three suites:
  grad-check        analytic gradient vs finite differences (rel err <= 1e-6)
                    and vs dual numbers (rel err <= 1e-12), seeded samples
  critical-points   multistart finder sweep; every converged report must have
                    base loss <= 1e-4 and |a| <= 1e-3, no exceptions
  infimum           |probe(theta) - L(theta)| <= 1e-3 on seeded samples

Relative error uses scale max(1, |x|, |y|), so tiny components are compared
absolutely.
"""
from __future__ import annotations

import random

from . import augment, landscape
from .augment import AugConfig, AugPoint
from .differentiation import dual_gradient, fd_gradient
from .fields import field_names, get_field

FD_TOL = 1e-6
DUAL_TOL = 1e-12
INFIMUM_TOL = 1e-3
LOSS_TOL = 1e-4
A_TOL = 1e-3

SUITES = ("grad-check", "critical-points", "infimum", "all")


def rel_err(x: float, y: float) -> float:
    return abs(x - y) / max(1.0, abs(x), abs(y))


def _sample_point(field, rng) -> AugPoint:
    theta = field.interior_sample(rng)
    return AugPoint(theta, rng.uniform(*landscape.SEED_A_RANGE),
                    rng.uniform(*landscape.SEED_B_RANGE))


def grad_check_suite(seed: int = 0, n_points: int = 1000, lam: float = 1.0,
                     fields: list[str] | None = None) -> dict:
    cfg = AugConfig(lam=lam)
    checks = []
    for name in fields or field_names():
        field = get_field(name)
        rng = random.Random(seed)
        lifted = augment.lifted_loss(field, lam)

        def flat_value(x, _f=field, _cfg=cfg):
            p = AugPoint(tuple(x[:_f.dim]), x[_f.dim], x[_f.dim + 1])
            return augment.evaluate(_f, p, _cfg, check_domain=False).value

        worst_fd = 0.0
        worst_dual = 0.0
        fd_viol = dual_viol = 0
        used = 0
        for _ in range(n_points):
            p = _sample_point(field, rng)
            g = augment.gradient(field, p, cfg, check_domain=False)
            if g.saturated:
                continue
            used += 1
            analytic = list(g.d_theta) + [g.d_a, g.d_b]
            fd = fd_gradient(flat_value, p.coords())
            dual = dual_gradient(lifted, p.coords())
            for ga, gf, gd in zip(analytic, fd, dual):
                e_fd = rel_err(ga, gf)
                e_dual = rel_err(ga, gd)
                worst_fd = max(worst_fd, e_fd)
                worst_dual = max(worst_dual, e_dual)
                if e_fd > FD_TOL:
                    fd_viol += 1
                if e_dual > DUAL_TOL:
                    dual_viol += 1
        checks.append({
            "name": f"grad-check:{name}",
            "points": used,
            "worst_fd_rel_err": worst_fd,
            "worst_dual_rel_err": worst_dual,
            "fd_tolerance": FD_TOL,
            "dual_tolerance": DUAL_TOL,
            "violations": fd_viol + dual_viol,
        })
    return _wrap("grad-check", seed, checks)


def critical_point_suite(seed: int = 0, n_seeds: int = 256, lam: float = 1.0,
                         fields: list[str] | None = None) -> dict:
    cfg = AugConfig(lam=lam)
    checks = []
    for name in fields or field_names():
        field = get_field(name)
        reports = landscape.find_critical_points(field, cfg, n_seeds=n_seeds, seed=seed)
        converged = [r for r in reports if r.converged]
        bad = [r for r in converged
               if r.base_loss > LOSS_TOL or abs(r.a_value) > A_TOL]
        worst_loss = max((r.base_loss for r in converged), default=0.0)
        worst_a = max((abs(r.a_value) for r in converged), default=0.0)
        checks.append({
            "name": f"critical-points:{name}",
            "seeds": n_seeds,
            "converged": len(converged),
            "worst_base_loss": worst_loss,
            "worst_abs_a": worst_a,
            "loss_tolerance": LOSS_TOL,
            "a_tolerance": A_TOL,
            "violations": len(bad),
            "violating_seeds": [r.seed_index for r in bad],
        })
    return _wrap("critical-points", seed, checks)


def infimum_suite(seed: int = 0, n_points: int = 100, lam: float = 1.0,
                  fields: list[str] | None = None) -> dict:
    cfg = AugConfig(lam=lam)
    checks = []
    for name in fields or field_names():
        field = get_field(name)
        rng = random.Random(seed)
        worst = 0.0
        viol = 0
        for _ in range(n_points):
            theta = field.interior_sample(rng)
            base = field.value(theta)
            probe = landscape.probe_infimum(field, theta, cfg)
            dev = abs(probe - base)
            worst = max(worst, dev)
            if dev > INFIMUM_TOL or probe < base - 1e-12:
                viol += 1
        checks.append({
            "name": f"infimum:{name}",
            "points": n_points,
            "worst_deviation": worst,
            "tolerance": INFIMUM_TOL,
            "violations": viol,
        })
    return _wrap("infimum", seed, checks)


def run_suite(suite: str, seed: int = 0, **kwargs) -> dict:
    if suite == "grad-check":
        return grad_check_suite(seed, **kwargs)
    if suite == "critical-points":
        return critical_point_suite(seed, **kwargs)
    if suite == "infimum":
        return infimum_suite(seed, **kwargs)
    if suite == "all":
        parts = [grad_check_suite(seed), critical_point_suite(seed), infimum_suite(seed)]
        checks = [c for p in parts for c in p["checks"]]
        return _wrap("all", seed, checks)
    raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")


def _wrap(name: str, seed: int, checks: list[dict]) -> dict:
    return {
        "suite": name,
        "seed": seed,
        "checks": checks,
        "violations_total": int(sum(c["violations"] for c in checks)),
    }
