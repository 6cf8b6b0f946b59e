"""First-order optimizers over the augmented space, with trajectory recording
and terminal-outcome classification.

Outcomes:
  converged-finite     gradient norm at tolerance with |b| still bounded
  minimum-at-infinity  b walked past the divergence bound while a*exp(b)
                       hugged 1 and a shrank: the run is chasing an infimum
                       that no finite point attains
  numerical-failure    a non-finite loss or gradient appeared
  budget-exhausted     none of the above within the step budget
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import IO, Sequence

from .augment import AugConfig, AugPoint, fast_value_and_grad
from .fields import ScalarField

CONVERGED = "converged-finite"
AT_INFINITY = "minimum-at-infinity"
EXHAUSTED = "budget-exhausted"
FAILED = "numerical-failure"

DENSE_RECORD_LIMIT = 10_000  # record every step up to here, then every 10th


@dataclass(frozen=True)
class OptimizerSpec:
    kind: str  # gd | momentum | adam
    step_size: float
    max_steps: int
    grad_tol: float = 1e-8
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("gd", "momentum", "adam"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if not (math.isfinite(self.step_size) and self.step_size > 0.0):
            raise ValueError("step_size must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.grad_tol <= 0.0 or self.eps <= 0.0:
            raise ValueError("grad_tol and eps must be positive")


@dataclass(frozen=True)
class Thresholds:
    """Classification constants separating the finite and divergent regimes."""

    b_max: float = 20.0
    a_tol: float = 1e-3
    loss_tol: float = 1e-4
    u_window: float = 0.1
    grad_tol: float = 1e-8


@dataclass(frozen=True)
class OutcomeLabel:
    kind: str
    final_a: float
    final_b: float
    final_u: float
    final_base_loss: float
    final_grad_norm: float

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "final_a": self.final_a,
            "final_b": self.final_b,
            "final_u": self.final_u,
            "final_base_loss": self.final_base_loss,
            "final_grad_norm": self.final_grad_norm,
        }


@dataclass
class Trajectory:
    field_name: str
    steps: list[int] = dc_field(default_factory=list)
    points: list[AugPoint] = dc_field(default_factory=list)
    losses: list[float] = dc_field(default_factory=list)       # augmented
    base_losses: list[float] = dc_field(default_factory=list)  # L(theta)
    us: list[float] = dc_field(default_factory=list)
    grad_norms: list[float] = dc_field(default_factory=list)
    total_steps: int = 0
    clamp_events: int = 0
    saturation_events: int = 0
    augmented: bool = True
    outcome: OutcomeLabel | None = None

    def record(self, step: int, point: AugPoint, loss: float, base: float,
               u: float, grad_norm: float) -> None:
        self.steps.append(step)
        self.points.append(point)
        self.losses.append(loss)
        self.base_losses.append(base)
        self.us.append(u)
        self.grad_norms.append(grad_norm)

    def write_csv(self, out: IO[str]) -> None:
        dim = len(self.points[0].theta) if self.points else 0
        headers = ["step"] + [f"theta{i}" for i in range(dim)] + \
            ["a", "b", "u", "L", "L_tilde", "grad_norm"]
        out.write(",".join(headers) + "\n")
        for k, p, v, base, u, gn in zip(self.steps, self.points, self.losses,
                                        self.base_losses, self.us, self.grad_norms):
            row = [str(k)] + [repr(c) for c in p.theta] + \
                [repr(p.a), repr(p.b), repr(u), repr(base), repr(v), repr(gn)]
            out.write(",".join(row) + "\n")

    def summary(self) -> dict:
        return {
            "field": self.field_name,
            "outcome": self.outcome.as_dict() if self.outcome else None,
            "total_steps": self.total_steps,
            "recorded_steps": len(self.steps),
            "clamp_events": self.clamp_events,
            "saturation_events": self.saturation_events,
            "final_loss": self.losses[-1] if self.losses else None,
            "final_base_loss": self.base_losses[-1] if self.base_losses else None,
        }


class _Updater:
    """Shared state for gd / momentum / adam over a flat coordinate vector."""

    def __init__(self, spec: OptimizerSpec, n: int):
        self.spec = spec
        self.velocity = [0.0] * n
        self.m = [0.0] * n
        self.v = [0.0] * n
        self.t = 0

    def step(self, x: list[float], g: Sequence[float]) -> list[float]:
        s = self.spec
        if s.kind == "gd":
            return [xi - s.step_size * gi for xi, gi in zip(x, g)]
        if s.kind == "momentum":
            vel = self.velocity
            for i, gi in enumerate(g):
                vel[i] = s.momentum * vel[i] + gi
            return [xi - s.step_size * vi for xi, vi in zip(x, vel)]
        self.t += 1
        out = []
        c1 = 1.0 - s.beta1 ** self.t
        c2 = 1.0 - s.beta2 ** self.t
        for i, (xi, gi) in enumerate(zip(x, g)):
            self.m[i] = s.beta1 * self.m[i] + (1.0 - s.beta1) * gi
            self.v[i] = s.beta2 * self.v[i] + (1.0 - s.beta2) * gi * gi
            out.append(xi - s.step_size * (self.m[i] / c1)
                       / (math.sqrt(self.v[i] / c2) + s.eps))
        return out


def _should_record(step: int) -> bool:
    return step <= DENSE_RECORD_LIMIT or step % 10 == 0


def run_optimizer(field: ScalarField, start: AugPoint, spec: OptimizerSpec,
                  cfg: AugConfig | None = None,
                  thresholds: Thresholds | None = None) -> Trajectory:
    """Optimize the augmented loss from ``start``; never raises on overflow.

    theta is clamped to the field's box after every update (counted in
    ``clamp_events``); a and b roam free.  The run stops at the gradient
    tolerance, a completed divergence signature, a non-finite value, or the
    step budget, and the trajectory is classified in place.
    """
    cfg = cfg or AugConfig()
    thr = thresholds or Thresholds()
    dim = field.dim
    value_fn, grad_fn = fast_value_and_grad(field, cfg)

    start_theta, clamped = field.clamp(start.theta)
    x = list(start_theta) + [start.a, start.b]
    traj = Trajectory(field_name=field.name)
    if clamped:
        traj.clamp_events += 1
    upd = _Updater(spec, dim + 2)

    def base_at(xv):
        v = field.raw_value(xv[:dim]) - field.offset
        return 0.0 if -1e-9 <= v < 0.0 else v

    def u_at(xv):
        a, b = xv[dim], xv[dim + 1]
        if a == 0.0:
            return 0.0
        t = math.log(abs(a)) + b
        return math.copysign(math.exp(max(-cfg.b_clamp, min(cfg.b_clamp, t))), a)

    step = 0
    while True:
        loss = value_fn(x)
        base = base_at(x)
        u = u_at(x)
        g = grad_fn(x)
        finite = math.isfinite(loss) and all(math.isfinite(c) for c in g)
        gn = math.sqrt(math.fsum(c * c for c in g)) if finite else math.inf
        if not finite:
            traj.saturation_events += 1
        if _should_record(step) or not finite:
            traj.record(step, AugPoint(tuple(x[:dim]), x[dim], x[dim + 1]),
                        loss, base, u, gn)
        traj.total_steps = step
        if not finite:
            break
        if gn <= spec.grad_tol:
            break
        if (x[dim + 1] >= thr.b_max and abs(u - 1.0) <= thr.u_window
                and abs(x[dim]) <= 10.0 * thr.a_tol):
            break  # divergence signature complete
        if step >= spec.max_steps:
            break
        x = upd.step(x, g)
        theta, was_clamped = field.clamp(x[:dim])
        if was_clamped:
            traj.clamp_events += 1
            x[:dim] = theta
        step += 1
        if not all(map(math.isfinite, x)):
            # update escaped the representable range: saturate coordinates so
            # the failure point is still constructible, then stop
            x = _sanitize(x)
            traj.record(step, AugPoint(tuple(x[:dim]), x[dim], x[dim + 1]),
                        math.inf, base_at(x), u_at(x), math.inf)
            traj.total_steps = step
            traj.saturation_events += 1
            break

    if traj.steps and traj.steps[-1] != traj.total_steps:
        g = grad_fn(x)
        gn = math.sqrt(math.fsum(c * c for c in g)) \
            if all(math.isfinite(c) for c in g) else math.inf
        traj.record(traj.total_steps, AugPoint(tuple(x[:dim]), x[dim], x[dim + 1]),
                    value_fn(x), base_at(x), u_at(x), gn)
    traj.outcome = classify_trajectory(traj, thr)
    return traj


def _sanitize(x: list[float]) -> list[float]:
    return [0.0 if c != c else min(max(c, -1e308), 1e308) for c in x]


def run_plain(field: ScalarField, theta_start: Sequence[float], spec: OptimizerSpec,
              thresholds: Thresholds | None = None) -> Trajectory:
    """Baseline: the same optimizer on the raw loss, theta only.

    Recorded points carry a = b = u = 0 so exports share one schema.
    """
    thr = thresholds or Thresholds()
    dim = field.dim
    theta, clamped = field.clamp(tuple(float(t) for t in theta_start))
    x = list(theta)
    traj = Trajectory(field_name=field.name, augmented=False)
    if clamped:
        traj.clamp_events += 1
    upd = _Updater(spec, dim)

    def base_at(xv):
        v = field.raw_value(xv) - field.offset
        return 0.0 if -1e-9 <= v < 0.0 else v

    step = 0
    while True:
        loss = base_at(x)
        g = list(field.raw_gradient(x))
        finite = math.isfinite(loss) and all(math.isfinite(c) for c in g)
        gn = math.sqrt(math.fsum(c * c for c in g)) if finite else math.inf
        if _should_record(step) or not finite:
            traj.record(step, AugPoint(tuple(x), 0.0, 0.0), loss, loss, 0.0, gn)
        traj.total_steps = step
        if not finite or gn <= spec.grad_tol or step >= spec.max_steps:
            break
        x = upd.step(x, g)
        theta, was_clamped = field.clamp(x)
        if was_clamped:
            traj.clamp_events += 1
            x = list(theta)
        step += 1

    if traj.steps and traj.steps[-1] != traj.total_steps:
        g = list(field.raw_gradient(x))
        gn = math.sqrt(math.fsum(c * c for c in g))
        traj.record(traj.total_steps, AugPoint(tuple(x), 0.0, 0.0),
                    base_at(x), base_at(x), 0.0, gn)
    traj.outcome = classify_trajectory(traj, thr)
    return traj


def classify_trajectory(traj: Trajectory, thresholds: Thresholds | None = None) -> OutcomeLabel:
    """Assign exactly one outcome from the recorded evidence.

    converged-finite additionally demands that the stationarity residual
    2*L*exp(b) is below the gradient tolerance.  At any true finite critical
    point the auxiliary gradient at a = 0 equals -2*L*exp(b), so it must
    vanish; without this check the quasi-frozen plateau toward b -> -inf
    (where a balances at L*exp(b)/lam and every gradient component dips under
    tolerance) would masquerade as finite convergence at a strictly positive
    base loss.
    """
    thr = thresholds or Thresholds()
    if not traj.points:
        raise ValueError("cannot classify an empty trajectory")
    p = traj.points[-1]
    u = traj.us[-1]
    base = traj.base_losses[-1]
    gn = traj.grad_norms[-1]
    cert = dict(final_a=p.a, final_b=p.b, final_u=u,
                final_base_loss=base, final_grad_norm=gn)

    bad = any(not math.isfinite(v) for v in traj.losses) or \
        any(not math.isfinite(g) for g in traj.grad_norms)
    if bad:
        return OutcomeLabel(FAILED, **cert)
    if not traj.augmented:
        kind = CONVERGED if gn <= thr.grad_tol else EXHAUSTED
        return OutcomeLabel(kind, **cert)
    if (gn <= thr.grad_tol and abs(p.b) <= thr.b_max
            and stationarity_residual(base, p.b) <= thr.grad_tol):
        return OutcomeLabel(CONVERGED, **cert)
    if (p.b >= thr.b_max and abs(u - 1.0) <= thr.u_window
            and abs(p.a) <= 10.0 * thr.a_tol and _b_monotone_tail(traj)):
        return OutcomeLabel(AT_INFINITY, **cert)
    return OutcomeLabel(EXHAUSTED, **cert)


def stationarity_residual(base_loss: float, b: float) -> float:
    """|d/da| of the augmented loss at a = 0: zero only where L*exp(b) is."""
    return 2.0 * base_loss * math.exp(min(b, 700.0))


def _b_monotone_tail(traj: Trajectory) -> bool:
    """b non-decreasing over the final quarter of the recorded path."""
    bs = [p.b for p in traj.points]
    if len(bs) < 2:
        return True
    tail = bs[-max(2, len(bs) // 4):]
    return all(tail[i + 1] >= tail[i] for i in range(len(tail) - 1))


def compare_baseline(field: ScalarField, theta_start: Sequence[float],
                     spec: OptimizerSpec, cfg: AugConfig | None = None,
                     thresholds: Thresholds | None = None,
                     a_start: float = 0.1, b_start: float = 0.0
                     ) -> tuple[Trajectory, Trajectory]:
    """Paired runs from one theta start: raw loss vs augmented loss."""
    plain = run_plain(field, theta_start, spec, thresholds)
    augmented = run_optimizer(
        field, AugPoint(tuple(theta_start), a_start, b_start), spec, cfg, thresholds)
    return plain, augmented


def summary_json(traj: Trajectory, config: dict | None = None) -> str:
    doc = traj.summary()
    if config is not None:
        doc["config"] = config
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
