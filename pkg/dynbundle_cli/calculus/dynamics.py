"""Vector fields as coalgebras x -> (x, X(x)), and their integral curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from dynbundle_cli.calculus.errors import (
    ContractError,
    DomainError,
    NonContractionError,
    SingularityError,
)
from dynbundle_cli.calculus.smoothmap import (
    Input,
    Scale,
    Select,
    SmoothMap,
    Tuple,
    compose,
    constant,
    evaluate_array,
)
from dynbundle_cli.calculus.tangent import (
    BasicManifold,
    OpenInterval,
    SecondTangent,
    TangentVector,
    canonical_flip,
    tangent_map,
)
from dynbundle_cli.calculus.vecspace import ArrayLike, Vector, norm

DEFAULT_CLOCK_WINDOW = 10.0
DEFAULT_PICARD_GRID = 256


@dataclass(frozen=True)
class VectorField:
    """The coalgebra x -> (x, field(x)) on ``manifold``."""

    manifold: BasicManifold
    field: SmoothMap

    def __post_init__(self) -> None:
        n = self.manifold.dim
        if self.field.domain_dim != n or self.field.codomain_dim != n:
            raise ContractError(
                f"field maps R^{self.field.domain_dim} -> R^{self.field.codomain_dim} "
                f"on a {n}-manifold"
            )

    @property
    def dim(self) -> int:
        return self.manifold.dim

    def direction(self, x: ArrayLike) -> np.ndarray:
        return evaluate_array(self.field, x)

    def coalgebra(self, x: ArrayLike) -> TangentVector:
        point = self.manifold.require(x)
        return TangentVector(Vector(point), Vector(self.direction(point)))

    def negated(self) -> "VectorField":
        return VectorField(self.manifold, Scale(-1.0, self.field))


def whole_space_field(field_map: SmoothMap) -> VectorField:
    return VectorField(BasicManifold(field_map.domain_dim), field_map)


@dataclass(frozen=True)
class Clock:
    window: float = DEFAULT_CLOCK_WINDOW

    def __post_init__(self) -> None:
        if not self.window > 0:
            raise ContractError(f"clock window must be positive, got {self.window}")


def clock_field(c: Optional[Clock] = None) -> VectorField:
    """R(t) = (t, 1) on (-a, a)."""
    c = c or Clock()
    return VectorField(BasicManifold(1, OpenInterval(c.window)), constant([1.0], 1))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    dt: float
    method: str

    def __post_init__(self) -> None:
        if self.times.shape[0] != self.states.shape[0]:
            raise ContractError(f"{self.times.shape[0]} times but {self.states.shape[0]} states")

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def final_state(self) -> Vector:
        return Vector(self.states[-1])

    def state(self, k: int) -> Vector:
        return Vector(self.states[k])


def _direction(X: VectorField, x: np.ndarray, step: int) -> np.ndarray:
    try:
        if not X.manifold.contains(x):
            raise DomainError(f"state {x.tolist()} left the region")
        return evaluate_array(X.field, x)
    except DomainError as exc:
        raise SingularityError(f"integration left the guarded region: {exc.message}", step=step) from exc


def _step_count(t_end: float, dt: float) -> tuple[int, float]:
    if not t_end > 0 or not dt > 0:
        raise ContractError(f"need t_end > 0 and dt > 0, got t_end={t_end}, dt={dt}")
    if dt > t_end:
        raise ContractError(f"dt={dt} exceeds t_end={t_end}")
    steps = max(1, math.ceil(t_end / dt - 1e-9))
    return steps, t_end / steps


def integrate_rk4(X: VectorField, q0: ArrayLike, t_end: float, dt: float) -> Trajectory:
    """Classical fourth-order Runge-Kutta with a fixed step.

    The step is shrunk to t_end / ceil(t_end / dt) so that the last sample
    lands on t_end.
    """
    x = X.manifold.require(q0).astype(float)
    steps, h = _step_count(t_end, dt)
    states = np.empty((steps + 1, x.size))
    states[0] = x
    for k in range(steps):
        k1 = _direction(X, x, k)
        k2 = _direction(X, x + 0.5 * h * k1, k)
        k3 = _direction(X, x + 0.5 * h * k2, k)
        k4 = _direction(X, x + h * k3, k)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not X.manifold.contains(x):
            raise SingularityError(f"state {x.tolist()} left the region", step=k + 1)
        states[k + 1] = x
    times = h * np.arange(steps + 1)
    return Trajectory(times, states, h, "rk4")


def integrate_picard(
    X: VectorField,
    q0: ArrayLike,
    t_end: float,
    grid: int = DEFAULT_PICARD_GRID,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> Trajectory:
    """Fixed-point iteration x <- q0 + int_0^t field(x(s)) ds on a uniform grid.

    Quadrature is the cumulative trapezoidal rule. Stops once the sup-norm
    change between iterates is at most ``tol``.
    """
    if grid < 2:
        raise ContractError(f"grid needs at least 2 nodes, got {grid}")
    if not t_end > 0:
        raise ContractError(f"t_end must be positive, got {t_end}")
    q = X.manifold.require(q0).astype(float)
    times = np.linspace(0.0, t_end, grid)
    h = times[1] - times[0]
    current = np.tile(q, (grid, 1))
    change = math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for iteration in range(1, max_iter + 1):
            try:
                rates = np.array([evaluate_array(X.field, x) for x in current])
            except DomainError as exc:
                raise SingularityError(f"Picard iterate left the guarded region: {exc.message}") from exc
            increments = 0.5 * h * (rates[1:] + rates[:-1])
            updated = np.vstack([q, q + np.cumsum(increments, axis=0)])
            if not np.all(np.isfinite(updated)):
                raise NonContractionError("Picard iterates diverged", change, iteration)
            change = float(np.max(np.linalg.norm(updated - current, axis=1)))
            current = updated
            if change <= tol:
                return Trajectory(times, current, float(h), "picard")
    raise NonContractionError("Picard iteration did not converge", change, max_iter)


@dataclass
class TrajectoryReport:
    """Residual of the trajectory square X o gamma = T gamma o R."""

    max_residual: float
    argmax: int
    profile: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "argmax": self.argmax}


def check_trajectory(X: VectorField, tr: Trajectory) -> TrajectoryReport:
    """Compare differenced velocities with the field along ``tr``.

    Interior points use centred differences and give ``max_residual``; the
    end points use second-order one-sided differences and only enter
    ``profile``.
    """
    s, h = tr.states, tr.dt
    count = len(tr)
    profile = np.zeros(count)
    if count < 3:
        return TrajectoryReport(0.0, 0, profile)
    velocity = np.empty_like(s)
    velocity[1:-1] = (s[2:] - s[:-2]) / (2.0 * h)
    velocity[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h)
    velocity[-1] = (3.0 * s[-1] - 4.0 * s[-2] + s[-3]) / (2.0 * h)
    for k in range(count):
        profile[k] = norm(velocity[k] - evaluate_array(X.field, s[k]))
    interior = profile[1:-1]
    k_max = int(np.argmax(interior)) + 1
    return TrajectoryReport(float(profile[k_max]), k_max, profile)


def check_f_related(
    f: SmoothMap, X: VectorField, Y: VectorField, samples: Sequence[ArrayLike]
) -> float:
    """max ||T f (x, X(x)).dir - Y(f(x))|| over the samples."""
    worst = 0.0
    for s in samples:
        x = X.manifold.require(s)
        pushed = tangent_map(f, X.coalgebra(x))
        y = Y.manifold.require(pushed.base)
        worst = max(worst, norm(pushed.dir.coords - Y.direction(y)))
    return worst


def flow(X: VectorField, q0: ArrayLike, t: float, dt: float) -> Vector:
    """Endpoint of the integral curve after time t (negative t runs backwards)."""
    if t == 0:
        return Vector(X.manifold.require(q0))
    field_ = X if t > 0 else X.negated()
    span = abs(t)
    return integrate_rk4(field_, q0, span, min(dt, span)).final_state


def product_field(X: VectorField, Y: VectorField) -> VectorField:
    """X x Y on the product of the two manifolds, state (x, y)."""
    n, m = X.dim, Y.dim
    inp = Input(n + m)
    left = Select(inp, tuple(range(n)))
    right = Select(inp, tuple(range(n, n + m)))
    field_map = Tuple((compose(X.field, left), compose(Y.field, right)))
    return VectorField(BasicManifold(n + m), field_map)


def flip_defect(X: VectorField, x: ArrayLike) -> float:
    """Distance between (x, X(x)) in the second tangent bundle and its canonical flip.

    X must live on a tangent bundle R^2n, states read (u, e1). Second-order
    fields, whose position rate equals the velocity slot, give exactly 0.
    """
    if X.dim % 2:
        raise ContractError(f"flip_defect needs a field on R^2n, got R^{X.dim}")
    point = np.concatenate([X.manifold.require(x), X.direction(x)])
    st = SecondTangent.from_flat(point)
    flipped = canonical_flip(st)
    return norm(flipped.flat().coords - st.flat().coords)
