"""Newtonian gravity for a test mass around a pinned source, and the two-body system.

The potential follows phi(r) = G m1 / ||r||, positive and vanishing at
infinity. The potential energy of the test mass is -m2 phi and the force
is F = m2 grad(phi) = -G m1 m2 r / ||r||^3, which is attractive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dynbundle_cli.calculus.errors import ContractError, SingularityError
from dynbundle_cli.calculus.dynamics import VectorField
from dynbundle_cli.calculus.smoothmap import (
    RHO_MIN_DEFAULT,
    Guarded,
    Input,
    Mul,
    Norm,
    Pow,
    Recip,
    Scale,
    Select,
    SmoothMap,
    Tuple,
    compose,
    linear_map,
)
from dynbundle_cli.calculus.tangent import BasicManifold
from dynbundle_cli.calculus.vecspace import ArrayLike, Vector, as_array, norm

SPACE_DIM = 3


@dataclass(frozen=True)
class GravityParams:
    """Gravitational constant, source mass, test mass and guard radius.

    G = 0 is accepted so that force-free motion can be run through the same
    fields.
    """

    G: float = 1.0
    m1: float = 1.0
    m2: float = 1.0
    rho_min: float = RHO_MIN_DEFAULT

    def __post_init__(self) -> None:
        if self.G < 0:
            raise ContractError(f"G must be >= 0, got {self.G}")
        if not self.m1 > 0 or not self.m2 > 0:
            raise ContractError(f"masses must be positive, got m1={self.m1}, m2={self.m2}")
        if not self.rho_min > 0:
            raise ContractError(f"rho_min must be positive, got {self.rho_min}")


def _space_vector(v: ArrayLike, what: str) -> Vector:
    vec = Vector(as_array(v))
    if vec.dim != SPACE_DIM:
        raise ContractError(f"{what} must be three-dimensional, got dimension {vec.dim}")
    return vec


@dataclass(frozen=True)
class ConfigState:
    """A point (r, v) of configuration space."""

    r: Vector
    v: Vector

    def __post_init__(self) -> None:
        _space_vector(self.r, "position")
        _space_vector(self.v, "velocity")
        if norm(self.r) <= RHO_MIN_DEFAULT:
            raise SingularityError(f"position {self.r.tolist()} sits on the source")

    @classmethod
    def of(cls, r: ArrayLike, v: ArrayLike) -> "ConfigState":
        return cls(Vector(as_array(r)), Vector(as_array(v)))

    @classmethod
    def from_flat(cls, state: ArrayLike) -> "ConfigState":
        r, v = Vector(as_array(state)).split(SPACE_DIM, SPACE_DIM)
        return cls(r, v)

    def flat(self) -> Vector:
        return Vector.concat(self.r, self.v)


@dataclass(frozen=True)
class PhaseState:
    """A point (r, p) of phase space."""

    r: Vector
    p: Vector

    def __post_init__(self) -> None:
        _space_vector(self.r, "position")
        _space_vector(self.p, "momentum")
        if norm(self.r) <= RHO_MIN_DEFAULT:
            raise SingularityError(f"position {self.r.tolist()} sits on the source")

    @classmethod
    def of(cls, r: ArrayLike, p: ArrayLike) -> "PhaseState":
        return cls(Vector(as_array(r)), Vector(as_array(p)))

    def flat(self) -> Vector:
        return Vector.concat(self.r, self.p)


def _require_admissible(gp: GravityParams, r: np.ndarray) -> float:
    radius = norm(r)
    if radius <= gp.rho_min:
        raise SingularityError(f"radius {radius:.3e} is within rho_min={gp.rho_min:.3e}")
    return radius


# ---------------------------------------------------------------------------
# maps on R^3


def potential_map(gp: GravityParams) -> SmoothMap:
    r = Input(SPACE_DIM)
    return Guarded(gp.rho_min, Scale(gp.G * gp.m1, Recip(Norm(r))))


def potential_energy_map(gp: GravityParams) -> SmoothMap:
    """-m2 phi, the map whose negative gradient is the force."""
    return Scale(-gp.m2, potential_map(gp))


def force_map(gp: GravityParams) -> SmoothMap:
    r = Input(SPACE_DIM)
    inverse_cube = Pow(Recip(Norm(r)), 3)
    return Guarded(gp.rho_min, Scale(-gp.G * gp.m1 * gp.m2, Mul(r, inverse_cube)))


def potential(gp: GravityParams, r: ArrayLike) -> float:
    arr = _space_vector(r, "position").coords
    return gp.G * gp.m1 / _require_admissible(gp, arr)


def gravity_force(gp: GravityParams, r: ArrayLike) -> Vector:
    arr = _space_vector(r, "position").coords
    radius = _require_admissible(gp, arr)
    return Vector(-gp.G * gp.m1 * gp.m2 * arr / radius ** 3)


# ---------------------------------------------------------------------------
# equations of motion


def _halves(n: int) -> tuple[SmoothMap, SmoothMap]:
    x = Input(2 * n)
    return Select(x, tuple(range(n))), Select(x, tuple(range(n, 2 * n)))


def lagrangian_field(gp: GravityParams) -> VectorField:
    """(r, v) -> (v, F(r) / m2) on R^6, guarded on ||r|| > rho_min."""
    r, v = _halves(SPACE_DIM)
    accel = compose(Scale(1.0 / gp.m2, force_map(gp)), r)
    return VectorField(BasicManifold(2 * SPACE_DIM), Guarded(gp.rho_min, Tuple((v, accel)), r))


def hamiltonian_field(gp: GravityParams) -> VectorField:
    """(r, p) -> (p / m2, F(r)) on R^6, guarded on ||r|| > rho_min."""
    r, p = _halves(SPACE_DIM)
    body = Tuple((Scale(1.0 / gp.m2, p), compose(force_map(gp), r)))
    return VectorField(BasicManifold(2 * SPACE_DIM), Guarded(gp.rho_min, body, r))


def config_to_phase(m: float, n: int = SPACE_DIM) -> SmoothMap:
    """(r, v) -> (r, m v)."""
    return linear_map(np.diag([1.0] * n + [float(m)] * n))


def phase_to_config(m: float, n: int = SPACE_DIM) -> SmoothMap:
    """(r, p) -> (r, p / m)."""
    if not m > 0:
        raise ContractError(f"mass must be positive, got {m}")
    return linear_map(np.diag([1.0] * n + [1.0 / m] * n))


# ---------------------------------------------------------------------------
# diagnostics


def kinetic_pairing(ps: PhaseState, cs: ConfigState, m: float) -> float:
    """1/2 p(v), the kinetic energy when p = m v."""
    if norm(ps.r - cs.r) > 1e-9:
        raise ContractError("phase and configuration states sit over different positions")
    expected = m * cs.v.coords
    if norm(ps.p.coords - expected) > 1e-9 * max(1.0, norm(expected)):
        raise ContractError(f"momentum {ps.p.tolist()} is not m v for m={m}")
    return 0.5 * float(np.dot(ps.p.coords, cs.v.coords))


def total_energy(gp: GravityParams, cs: ConfigState) -> float:
    radius = _require_admissible(gp, cs.r.coords)
    v = cs.v.coords
    return 0.5 * gp.m2 * float(np.dot(v, v)) - gp.G * gp.m1 * gp.m2 / radius


def angular_momentum(cs: ConfigState, m: float) -> Vector:
    return Vector(m * np.cross(cs.r.coords, cs.v.coords))


# ---------------------------------------------------------------------------
# two bodies, state (r1, v1, r2, v2)


def two_body_field(G: float, m1: float, m2: float, rho_min: float = RHO_MIN_DEFAULT) -> VectorField:
    """Mutual gravity on R^12. The forces on the two bodies are equal and opposite."""
    GravityParams(G, m1, m2, rho_min)
    x = Input(4 * SPACE_DIM)
    blocks = [Select(x, tuple(range(k * SPACE_DIM, (k + 1) * SPACE_DIM))) for k in range(4)]
    r1, v1, r2, v2 = blocks
    d = r2 - r1
    pull = Mul(d, Pow(Recip(Norm(d)), 3))
    body = Tuple((v1, Scale(G * m2, pull), v2, Scale(-G * m1, pull)))
    return VectorField(BasicManifold(4 * SPACE_DIM), Guarded(rho_min, body, d))


def _two_body_blocks(state: ArrayLike) -> list[np.ndarray]:
    x = as_array(state)
    if x.size != 4 * SPACE_DIM:
        raise ContractError(f"two-body state has {4 * SPACE_DIM} coordinates, got {x.size}")
    return [x[k * SPACE_DIM:(k + 1) * SPACE_DIM] for k in range(4)]


def pairwise_forces(
    G: float, m1: float, m2: float, r1: ArrayLike, r2: ArrayLike, rho_min: float = RHO_MIN_DEFAULT
) -> tuple[Vector, Vector]:
    """(F12, F21): the force on body 1 from body 2 and its reaction."""
    d = as_array(r2) - as_array(r1)
    sep = norm(d)
    if sep <= rho_min:
        raise SingularityError(f"bodies are {sep:.3e} apart, within rho_min={rho_min:.3e}")
    f12 = G * m1 * m2 * d / sep ** 3
    return Vector(f12), Vector(-f12)


def two_body_energy(G: float, m1: float, m2: float, state: ArrayLike) -> float:
    r1, v1, r2, v2 = _two_body_blocks(state)
    sep = norm(r2 - r1)
    if sep <= RHO_MIN_DEFAULT:
        raise SingularityError("bodies coincide")
    kinetic = 0.5 * m1 * float(np.dot(v1, v1)) + 0.5 * m2 * float(np.dot(v2, v2))
    return kinetic - G * m1 * m2 / sep


def total_momentum(m1: float, m2: float, state: ArrayLike) -> Vector:
    _, v1, _, v2 = _two_body_blocks(state)
    return Vector(m1 * v1 + m2 * v2)
