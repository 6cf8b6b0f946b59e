"""Base loss landscapes: nonnegative scalar fields over a box domain.

Every shipped field is normalized so its global minimum value is 0, except the
deliberate convention breaker ``quadratic-plus-one-1d`` whose minimum is 1.
Fields with strictly positive local minima register them in ``bad_minima`` so
tests and sweeps can start exactly there.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

from .differentiation import cos_, exp_, sqrt_
from .minimize import descend


class FieldError(Exception):
    """Base for evaluation failures of a scalar field."""


class DimensionError(FieldError):
    pass


class DomainError(FieldError):
    pass


class NonFiniteError(FieldError):
    pass


class NormalizationError(FieldError):
    pass


class BadMinimum(NamedTuple):
    point: tuple[float, ...]
    value: float


@dataclass(frozen=True)
class ScalarField:
    """A differentiable loss over a closed box, shifted by ``offset``.

    ``raw_value`` must accept floats and dual numbers alike (it is written in
    the lifted primitives from :mod:`minfinity.differentiation`);
    ``raw_gradient`` is the hand-derived gradient of the raw formula.
    """

    name: str
    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    raw_value: Callable[[Sequence], object]
    raw_gradient: Callable[[Sequence[float]], tuple[float, ...]]
    offset: float = 0.0
    zero_min: bool = True
    global_min: tuple[float, ...] | None = None
    bad_minima: tuple[BadMinimum, ...] = ()

    def _check(self, theta: Sequence[float], check_domain: bool) -> tuple[float, ...]:
        theta = tuple(float(t) for t in theta)
        if len(theta) != self.dim:
            raise DimensionError(
                f"{self.name}: expected {self.dim} coordinates, got {len(theta)}")
        if not all(math.isfinite(t) for t in theta):
            raise NonFiniteError(f"{self.name}: non-finite coordinate in {theta}")
        if check_domain and not self.contains(theta):
            raise DomainError(
                f"{self.name}: {theta} outside domain box {self.lower}..{self.upper}")
        return theta

    def value(self, theta: Sequence[float], check_domain: bool = True) -> float:
        """L(theta) >= 0; negatives within -1e-9 (normalization slack) clamp to 0."""
        theta = self._check(theta, check_domain)
        v = self.raw_value(theta) - self.offset
        if not math.isfinite(v):
            raise NonFiniteError(f"{self.name}: non-finite value at {theta}")
        if v < 0.0:
            if v < -1e-9:
                raise NonFiniteError(
                    f"{self.name}: value {v} below normalization slack at {theta}")
            return 0.0
        return v

    def gradient(self, theta: Sequence[float], check_domain: bool = True) -> tuple[float, ...]:
        theta = self._check(theta, check_domain)
        g = tuple(self.raw_gradient(theta))
        if not all(math.isfinite(c) for c in g):
            raise NonFiniteError(f"{self.name}: non-finite gradient at {theta}")
        return g

    def lifted_value(self, coords: Sequence) -> object:
        """Raw formula minus offset on dual numbers (or floats); no clamping."""
        return self.raw_value(coords) - self.offset

    def contains(self, theta: Sequence[float]) -> bool:
        return all(lo <= t <= hi for t, lo, hi in zip(theta, self.lower, self.upper))

    def clamp(self, theta: Sequence[float]) -> tuple[tuple[float, ...], bool]:
        """Project onto the domain box; second element reports whether anything moved."""
        clamped = tuple(min(max(t, lo), hi)
                        for t, lo, hi in zip(theta, self.lower, self.upper))
        return clamped, clamped != tuple(theta)

    def interior_sample(self, rng, margin: float = 1e-3) -> tuple[float, ...]:
        """Uniform draw from the box shrunk by a relative margin per axis."""
        out = []
        for lo, hi in zip(self.lower, self.upper):
            pad = margin * (hi - lo)
            out.append(rng.uniform(lo + pad, hi - pad))
        return tuple(out)


def normalize(raw: ScalarField, starts: int = 32, seed: int = 0,
              grad_tol: float = 1e-7) -> ScalarField:
    """Return a copy of ``raw`` shifted so the located global minimum reads 0.

    Multistart damped descent: the box midpoint plus ``starts - 1`` seeded
    uniform draws, each polished until the gradient norm drops below
    ``grad_tol``.  Raises NormalizationError when no start converges.
    """
    rng = random.Random(seed)
    mid = tuple(0.5 * (lo + hi) for lo, hi in zip(raw.lower, raw.upper))
    points = [mid] + [raw.interior_sample(rng, margin=0.0) for _ in range(starts - 1)]
    best_val = math.inf
    best_x = None
    any_converged = False
    for p in points:
        res = descend(
            lambda x: raw.raw_value(tuple(x)),
            lambda x: list(raw.raw_gradient(tuple(x))),
            list(p),
            grad_tol=grad_tol,
            max_iters=2000,
            polish_iters=1500,
            clamp_lower=raw.lower,
            clamp_upper=raw.upper,
        )
        if res.converged:
            any_converged = True
        if res.converged and res.value < best_val:
            best_val = res.value
            best_x = tuple(res.x)
    if not any_converged or best_x is None:
        raise NormalizationError(f"{raw.name}: minimum search failed to converge")
    return replace(raw, offset=raw.offset + best_val, global_min=best_x)


# ---------------------------------------------------------------------------
# shipped landscapes
# ---------------------------------------------------------------------------

_TWO_PI = 2.0 * math.pi

# located by dense grid search (step 1e-4) + bisection on the derivative
RASTRIGIN_BAD_X = 0.9949586376523349
RASTRIGIN_BAD_VALUE = 0.9949590570932916
RASTRIGIN_BAD_X2 = 1.9899122337085493
RASTRIGIN_BAD_VALUE2 = 3.979831190554087

DOUBLE_WELL_OFFSET = -1.3054284837439158   # min of x^4 - 2x^2 + 0.3x
DOUBLE_WELL_GLOBAL_X = -1.035578714088854
DOUBLE_WELL_BAD_X = 0.9601495555191055
DOUBLE_WELL_BAD_VALUE = 0.5995749647721786

ACKLEY_BAD_1 = (0.9521665459501732, 0.0)
ACKLEY_BAD_VALUE_1 = 2.579927557029873
ACKLEY_BAD_2 = (0.9684776587077252, 0.9684776587077252)
ACKLEY_BAD_VALUE_2 = 3.57445187725768


def _quadratic(coords):
    total = coords[0] * coords[0]
    for c in coords[1:]:
        total = total + c * c
    return total


def _quadratic_grad(theta):
    return tuple(2.0 * t for t in theta)


def _rastrigin(coords):
    total = 10.0 * len(coords)
    for c in coords:
        total = total + (c * c - 10.0 * cos_(_TWO_PI * c))
    return total


def _rastrigin_grad(theta):
    return tuple(2.0 * t + 20.0 * math.pi * math.sin(_TWO_PI * t) for t in theta)


def _ackley(coords):
    x, y = coords
    r = sqrt_((x * x + y * y) * 0.5)
    c = (cos_(_TWO_PI * x) + cos_(_TWO_PI * y)) * 0.5
    return -20.0 * exp_(-0.2 * r) - exp_(c) + 20.0 + math.e


def _ackley_grad(theta):
    x, y = theta
    r = math.sqrt((x * x + y * y) * 0.5)
    ec = math.exp((math.cos(_TWO_PI * x) + math.cos(_TWO_PI * y)) * 0.5)
    if r == 0.0:
        # cone point at the global minimum: no defined gradient, report 0
        return (0.0, 0.0)
    er = math.exp(-0.2 * r)
    return (2.0 * x * er / r + math.pi * math.sin(_TWO_PI * x) * ec,
            2.0 * y * er / r + math.pi * math.sin(_TWO_PI * y) * ec)


def _double_well(coords):
    x = coords[0]
    return x ** 4 - 2.0 * (x * x) + 0.3 * x


def _double_well_grad(theta):
    x = theta[0]
    return (4.0 * x ** 3 - 4.0 * x + 0.3,)


def _one_plus_quadratic(coords):
    return coords[0] * coords[0] + 1.0


def _one_plus_quadratic_grad(theta):
    return (2.0 * theta[0],)


def _build_quadratic(dim: int) -> ScalarField:
    return ScalarField(
        name=f"quadratic-{dim}d",
        dim=dim,
        lower=(-10.0,) * dim,
        upper=(10.0,) * dim,
        raw_value=_quadratic,
        raw_gradient=_quadratic_grad,
        global_min=(0.0,) * dim,
    )


def _build_rastrigin(dim: int) -> ScalarField:
    bad = [BadMinimum((RASTRIGIN_BAD_X,) * 1, RASTRIGIN_BAD_VALUE),
           BadMinimum((RASTRIGIN_BAD_X2,) * 1, RASTRIGIN_BAD_VALUE2)]
    if dim == 2:
        bad = [
            BadMinimum((RASTRIGIN_BAD_X, 0.0), RASTRIGIN_BAD_VALUE),
            BadMinimum((0.0, RASTRIGIN_BAD_X), RASTRIGIN_BAD_VALUE),
            BadMinimum((RASTRIGIN_BAD_X, RASTRIGIN_BAD_X),
                       RASTRIGIN_BAD_VALUE + RASTRIGIN_BAD_VALUE),
        ]
    return ScalarField(
        name=f"rastrigin-{dim}d",
        dim=dim,
        lower=(-5.12,) * dim,
        upper=(5.12,) * dim,
        raw_value=_rastrigin,
        raw_gradient=_rastrigin_grad,
        global_min=(0.0,) * dim,
        bad_minima=tuple(bad),
    )


def _build_ackley() -> ScalarField:
    return ScalarField(
        name="ackley-2d",
        dim=2,
        lower=(-5.0, -5.0),
        upper=(5.0, 5.0),
        raw_value=_ackley,
        raw_gradient=_ackley_grad,
        global_min=(0.0, 0.0),
        bad_minima=(
            BadMinimum(ACKLEY_BAD_1, ACKLEY_BAD_VALUE_1),
            BadMinimum((ACKLEY_BAD_1[1], ACKLEY_BAD_1[0]), ACKLEY_BAD_VALUE_1),
            BadMinimum(ACKLEY_BAD_2, ACKLEY_BAD_VALUE_2),
        ),
    )


def _build_double_well() -> ScalarField:
    raw = ScalarField(
        name="double-well-1d",
        dim=1,
        lower=(-2.0,),
        upper=(2.0,),
        raw_value=_double_well,
        raw_gradient=_double_well_grad,
    )
    normalized = normalize(raw)
    return replace(
        normalized,
        bad_minima=(BadMinimum((DOUBLE_WELL_BAD_X,), DOUBLE_WELL_BAD_VALUE),),
    )


def _build_violator() -> ScalarField:
    # min value is 1, deliberately breaking the zero-minimum convention;
    # never normalized, used by negative tests only
    return ScalarField(
        name="quadratic-plus-one-1d",
        dim=1,
        lower=(-10.0,),
        upper=(10.0,),
        raw_value=_one_plus_quadratic,
        raw_gradient=_one_plus_quadratic_grad,
        zero_min=False,
        global_min=(0.0,),
        bad_minima=(BadMinimum((0.0,), 1.0),),
    )


_BUILDERS: dict[str, Callable[[], ScalarField]] = {
    "quadratic-1d": lambda: _build_quadratic(1),
    "quadratic-2d": lambda: _build_quadratic(2),
    "rastrigin-1d": lambda: _build_rastrigin(1),
    "rastrigin-2d": lambda: _build_rastrigin(2),
    "ackley-2d": _build_ackley,
    "double-well-1d": _build_double_well,
    "quadratic-plus-one-1d": _build_violator,
}

_CACHE: dict[str, ScalarField] = {}


def field_names() -> list[str]:
    return list(_BUILDERS)


def zero_min_field_names() -> list[str]:
    return [n for n in _BUILDERS if n != "quadratic-plus-one-1d"]


def get_field(name: str) -> ScalarField:
    if name not in _BUILDERS:
        raise KeyError(f"unknown field {name!r}; available: {', '.join(_BUILDERS)}")
    if name not in _CACHE:
        _CACHE[name] = _BUILDERS[name]()
    return _CACHE[name]
