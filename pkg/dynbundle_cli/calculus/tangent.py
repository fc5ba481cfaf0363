"""The tangent functor on basic manifolds and its companions.

Basic manifolds are open convex regions of R^n, so the tangent bundle is
trivial: a tangent vector is a pair (u, e), a point of the second tangent
bundle is (u, e1, e2, e3) read as base (u, e1) and direction (e2, e3).
Covectors are stored through their Riesz coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import numpy as np

from dynbundle_cli.calculus.errors import ContractError, DomainError
from dynbundle_cli.calculus.smoothmap import (
    Input,
    Recip,
    SmoothMap,
    TangentLift,
    compose,
    constant,
    differential,
    evaluate_array,
    fd_oracle,
    jacobian,
    linear_map,
    second_differential,
    tupled,
)
from dynbundle_cli.calculus.jets import Jet
from dynbundle_cli.calculus.vecspace import (
    EUCLIDEAN,
    ArrayLike,
    InnerProduct,
    NormSpec,
    Vector,
    as_array,
    inner,
    norm,
)


# ---------------------------------------------------------------------------
# regions and manifolds


class Region(Protocol):
    def contains(self, x: np.ndarray) -> bool: ...


@dataclass(frozen=True)
class WholeSpace:
    def contains(self, x: np.ndarray) -> bool:
        return True


@dataclass(frozen=True)
class OpenBall:
    center: tuple[float, ...]
    radius: float

    def contains(self, x: np.ndarray) -> bool:
        return float(np.linalg.norm(x - np.asarray(self.center))) < self.radius


@dataclass(frozen=True)
class OpenBox:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x > np.asarray(self.lower)) and np.all(x < np.asarray(self.upper)))


def OpenInterval(a: float, b: Optional[float] = None) -> OpenBox:
    """(-a, a), or (a, b) when both ends are given."""
    lo, hi = (-a, a) if b is None else (a, b)
    return OpenBox((float(lo),), (float(hi),))


@dataclass(frozen=True)
class BasicManifold:
    """An open convex region of R^dim with a chosen norm."""

    dim: int
    region: Region = field(default_factory=WholeSpace)
    norm: NormSpec = EUCLIDEAN

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ContractError("manifold dimension must be >= 1")

    def contains(self, x: ArrayLike) -> bool:
        arr = as_array(x)
        return arr.size == self.dim and bool(np.all(np.isfinite(arr))) and self.region.contains(arr)

    def require(self, x: ArrayLike) -> np.ndarray:
        arr = as_array(x)
        if arr.size != self.dim:
            raise ContractError(f"point of dimension {arr.size} on a {self.dim}-manifold")
        if not self.contains(arr):
            raise DomainError(f"point {arr.tolist()} lies outside the region")
        return arr

    def check_convex(self, points: Sequence[ArrayLike], samples: int, seed: int) -> Optional[dict]:
        """Look for a convexity witness among segments between the given points.

        Returns None when every sampled convex combination stays inside.
        """
        inside = [as_array(p) for p in points if self.contains(p)]
        if len(inside) < 2:
            return None
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            i, j = rng.integers(0, len(inside), size=2)
            lam = float(rng.uniform(0.0, 1.0))
            z = lam * inside[i] + (1.0 - lam) * inside[j]
            if not self.region.contains(z):
                return {"x": inside[i].tolist(), "y": inside[j].tolist(), "lambda": lam}
        return None


# ---------------------------------------------------------------------------
# bundle points


@dataclass(frozen=True)
class TangentVector:
    base: Vector
    dir: Vector

    def __post_init__(self) -> None:
        if self.base.dim != self.dir.dim:
            raise ContractError(f"base has dimension {self.base.dim}, direction {self.dir.dim}")

    @classmethod
    def of(cls, base: ArrayLike, dir: ArrayLike) -> "TangentVector":
        return cls(Vector(as_array(base)), Vector(as_array(dir)))

    @classmethod
    def from_flat(cls, flat: ArrayLike) -> "TangentVector":
        v = Vector(as_array(flat))
        if v.dim % 2:
            raise ContractError(f"flat tangent point needs even dimension, got {v.dim}")
        base, dir = v.split(v.dim // 2, v.dim // 2)
        return cls(base, dir)

    def flat(self) -> Vector:
        return Vector.concat(self.base, self.dir)


@dataclass(frozen=True)
class SecondTangent:
    base: Vector
    dirs: tuple[Vector, Vector, Vector]

    def __post_init__(self) -> None:
        if len(self.dirs) != 3 or any(d.dim != self.base.dim for d in self.dirs):
            raise ContractError("second tangent needs three directions matching the base dimension")

    @classmethod
    def of(cls, u: ArrayLike, e1: ArrayLike, e2: ArrayLike, e3: ArrayLike) -> "SecondTangent":
        return cls(Vector(as_array(u)), (Vector(as_array(e1)), Vector(as_array(e2)), Vector(as_array(e3))))

    @classmethod
    def from_flat(cls, flat: ArrayLike) -> "SecondTangent":
        v = Vector(as_array(flat))
        if v.dim % 4:
            raise ContractError(f"flat second tangent needs dimension divisible by 4, got {v.dim}")
        n = v.dim // 4
        u, e1, e2, e3 = v.split(n, n, n, n)
        return cls(u, (e1, e2, e3))

    def flat(self) -> Vector:
        return Vector.concat(self.base, *self.dirs)


@dataclass(frozen=True)
class Covector:
    """Linear functional at ``base`` acting as w -> <coeffs, w> (under ``ip`` if given)."""

    base: Vector
    coeffs: Vector
    ip: Optional[InnerProduct] = None

    def __post_init__(self) -> None:
        if self.base.dim != self.coeffs.dim:
            raise ContractError(f"base has dimension {self.base.dim}, coefficients {self.coeffs.dim}")

    @classmethod
    def of(cls, base: ArrayLike, coeffs: ArrayLike, ip: Optional[InnerProduct] = None) -> "Covector":
        return cls(Vector(as_array(base)), Vector(as_array(coeffs)), ip)

    def pair(self, w: ArrayLike) -> float:
        return inner(self.coeffs, w, self.ip)


# ---------------------------------------------------------------------------
# the functor


def tangent_map(f: SmoothMap, tv: TangentVector) -> TangentVector:
    """T f (u, e) = (f(u), Df(u).e)."""
    out = f.jet(Jet(_on_domain(f, tv.base), tv.dir.coords))
    return TangentVector(Vector(out.value), Vector(out.d1))


def tangent_lift(f: SmoothMap) -> SmoothMap:
    """T f as a map R^2n -> R^2m, itself differentiable once more."""
    return TangentLift(f)


def second_tangent_map(f: SmoothMap, st: SecondTangent) -> SecondTangent:
    """T^2 f (u, e1, e2, e3) = (f(u), Df.e1, Df.e2, D2f.(e1, e2) + Df.e3)."""
    e1, e2, e3 = (d.coords for d in st.dirs)
    out = f.jet(Jet(_on_domain(f, st.base), e1, e2, e3))
    return SecondTangent(Vector(out.value), (Vector(out.d1), Vector(out.d2), Vector(out.d12)))


def canonical_flip(st: SecondTangent) -> SecondTangent:
    e1, e2, e3 = st.dirs
    return SecondTangent(st.base, (e2, e1, e3))


def projection(tv: TangentVector) -> Vector:
    """The bundle projection (u, e) -> u."""
    return tv.base


def delta_candidate(tv: TangentVector) -> SecondTangent:
    """(u, e) -> (u, e, e, e).

    Coassociative, but not counitary; no comonad structure is built on it.
    """
    return SecondTangent(tv.base, (tv.dir, tv.dir, tv.dir))


def delta_counit_composites(tv: TangentVector) -> tuple[TangentVector, TangentVector]:
    """Both counit composites of ``delta_candidate``: (eps_T o delta, T eps o delta)."""
    st = delta_candidate(tv)
    e1, e2, _ = st.dirs
    outer = TangentVector(st.base, e1)
    lifted = TangentVector(st.base, e2)
    return outer, lifted


def monad_unit(m: BasicManifold, u: ArrayLike) -> TangentVector:
    """The zero section u -> (u, 0)."""
    x = m.require(u)
    return TangentVector(Vector(x), Vector.zeros(x.size))


def zero_section(u: ArrayLike) -> TangentVector:
    x = as_array(u)
    return TangentVector(Vector(x), Vector.zeros(x.size))


def monad_mult(st: SecondTangent) -> TangentVector:
    """(u, e1, e2, e3) -> (u, e1 + e2)."""
    e1, e2, _ = st.dirs
    return TangentVector(st.base, e1 + e2)


def monad_unit_map(n: int) -> SmoothMap:
    """eta as the linear map R^n -> R^2n, u -> (u, 0)."""
    return linear_map(np.vstack([np.eye(n), np.zeros((n, n))]))


def monad_mult_map(n: int) -> SmoothMap:
    """mu as the linear map R^4n -> R^2n, (u, e1, e2, e3) -> (u, e1 + e2)."""
    eye, zero = np.eye(n), np.zeros((n, n))
    return linear_map(np.block([[eye, zero, zero, zero], [zero, eye, eye, zero]]))


def monad_mult_lifted(point: ArrayLike) -> Vector:
    """mu at the object T U: a point of T T T U (8n coordinates) to T T U (4n)."""
    x = as_array(point)
    if x.size % 8:
        raise ContractError(f"third tangent point needs dimension divisible by 8, got {x.size}")
    n = x.size // 8
    blocks = [x[k * n:(k + 1) * n] for k in range(8)]
    # Over X = T U the point reads (x, a, b, c) with x, a, b, c in R^2n.
    u, e1, a0, a1, b0, b1 = blocks[:6]
    return Vector(np.concatenate([u, e1, a0 + b0, a1 + b1]))


def find_nonlinearity_witness(
    f: SmoothMap, samples: int, seed: int, scale: float = 1.0
) -> Optional[TangentVector]:
    """Search for (u, e) with Df(u).e != f(e), i.e. T f differs from f x f.

    Returns None when none of the seeded samples separates them.
    """
    rng = np.random.default_rng(seed)
    n = f.domain_dim
    for _ in range(samples):
        tv = TangentVector.of(scale * rng.standard_normal(n), scale * rng.standard_normal(n))
        try:
            image = tangent_map(f, tv)
            fe = evaluate_array(f, tv.dir.coords)
        except DomainError:
            continue
        if norm(image.dir.coords - fe) > 1e-9 * max(1.0, norm(fe)):
            return tv
    return None


# ---------------------------------------------------------------------------
# the cotangent side


def _gram_solve(ip: Optional[InnerProduct], b: np.ndarray) -> np.ndarray:
    return b if ip is None else np.linalg.solve(ip.matrix, b)


def _gram_apply(ip: Optional[InnerProduct], b: np.ndarray) -> np.ndarray:
    return b if ip is None else ip.matrix @ b


def pullback(f: SmoothMap, cv: Covector, u: ArrayLike) -> Covector:
    """Pull a covector at f(u) back to u: <q, w> = <p, Df(u).w>."""
    x = _on_domain(f, u)
    fx = evaluate_array(f, x)
    if fx.size != cv.base.dim or norm(fx - cv.base.coords) > 1e-9:
        raise ContractError(
            f"covector sits at {cv.base.tolist()} but f(u) = {fx.tolist()}",
            {"f(u)": fx.tolist(), "base": cv.base.tolist()},
        )
    J = jacobian(f, x)
    if cv.ip is not None and f.domain_dim != f.codomain_dim:
        raise ContractError("a non-identity gram needs an endomorphism to pull back")
    q = _gram_solve(cv.ip, J.T @ _gram_apply(cv.ip, cv.coeffs.coords))
    return Covector(Vector(x), Vector(q), cv.ip)


def pushforward_diffeo(
    f: SmoothMap,
    f_inv: SmoothMap,
    cv: Covector,
    samples: int = 8,
    seed: int = 0,
) -> Covector:
    """Push a covector at u to f(u) along a diffeomorphism with inverse ``f_inv``."""
    u = _on_domain(f, cv.base)
    if f_inv.domain_dim != f.codomain_dim or f_inv.codomain_dim != f.domain_dim:
        raise ContractError("f_inv does not have the shape of an inverse of f")
    rng = np.random.default_rng(seed)
    trials = [u] + [u + 1e-3 * rng.standard_normal(u.size) for _ in range(samples)]
    for p in trials:
        back = evaluate_array(f_inv, evaluate_array(f, p))
        if norm(back - p) > 1e-9 * max(1.0, norm(p)):
            raise ContractError(
                f"f_inv o f moves {p.tolist()} to {back.tolist()}", {"point": p.tolist()}
            )
    y = evaluate_array(f, u)
    J_inv = jacobian(f_inv, y)
    q = _gram_solve(cv.ip, J_inv.T @ _gram_apply(cv.ip, cv.coeffs.coords))
    return Covector(Vector(y), Vector(q), cv.ip)


# ---------------------------------------------------------------------------
# charts


@dataclass
class TransitionReport:
    samples: int
    max_first_deviation: float
    max_second_deviation: float
    per_sample: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_first_deviation": self.max_first_deviation,
            "max_second_deviation": self.max_second_deviation,
        }


def check_transition_smooth(
    phi0: SmoothMap,
    phi0_inv: SmoothMap,
    phi1: SmoothMap,
    overlap_samples: Sequence[ArrayLike],
) -> TransitionReport:
    """Compare the transition phi1 o phi0^-1 and its differentials against finite differences.

    Samples are points of the chart-0 image; each must map into the chart-1
    domain, otherwise DomainError is raised.
    """
    transition = compose(phi1, phi0_inv)
    report = TransitionReport(samples=len(overlap_samples), max_first_deviation=0.0, max_second_deviation=0.0)
    n = transition.domain_dim
    basis = np.eye(n)
    for s in overlap_samples:
        x = as_array(s)
        # Round-trip through chart 0 pins the sample to its image.
        back = evaluate_array(phi0, evaluate_array(phi0_inv, x))
        if norm(back - x) > 1e-9 * max(1.0, norm(x)):
            raise DomainError(f"sample {x.tolist()} is outside the image of chart 0")
        first = 0.0
        second = 0.0
        for i in range(n):
            ad = differential(transition, x, basis[i]).coords
            fd = fd_oracle(transition, x, basis[i]).coords
            first = max(first, norm(ad - fd) / max(1.0, norm(ad)))
            for j in range(n):
                dd = second_differential(transition, x, basis[i], basis[j]).coords
                h = 1e-4 * max(1.0, norm(x))
                plus = differential(transition, x + h * basis[j], basis[i]).coords
                minus = differential(transition, x - h * basis[j], basis[i]).coords
                fd2 = (plus - minus) / (2.0 * h)
                second = max(second, norm(dd - fd2) / max(1.0, norm(dd)))
        report.per_sample.append({"x": x.tolist(), "first": first, "second": second})
        report.max_first_deviation = max(report.max_first_deviation, first)
        report.max_second_deviation = max(report.max_second_deviation, second)
    return report


def circle_charts() -> tuple[SmoothMap, SmoothMap, SmoothMap]:
    """Stereographic charts of the unit circle from its two poles.

    These stand in for the usual angle charts on two overlapping arcs: the
    stereographic maps are rational, so they are built from the tree
    primitives alone, while an angle chart would need an arctangent node.
    Both atlases cover the circle with two charts and a smooth transition.

    Returns (phi0, phi0_inv, phi1): phi0 projects from (0, 1), phi1 from
    (0, -1). On the overlap the transition phi1 o phi0_inv is s -> 1/s.
    """
    x = Input(2)
    one2 = constant([1.0], 2)
    phi0 = x[0] * Recip(one2 - x[1])
    phi1 = x[0] * Recip(one2 + x[1])
    s = Input(1)
    one1 = constant([1.0], 1)
    denom = Recip(s * s + one1)
    phi0_inv = tupled(2.0 * s * denom, (s * s - one1) * denom)
    return phi0, phi0_inv, phi1


def _on_domain(f: SmoothMap, u: ArrayLike) -> np.ndarray:
    x = as_array(u)
    if x.size != f.domain_dim:
        raise ContractError(f"map reads R^{f.domain_dim}, got a point of dimension {x.size}")
    return x
