"""Smooth maps as closed expression trees, and the forward-mode engine.

Every map is a frozen tree of nodes over a single input ``x`` in R^n. Leaves
are the input itself (``Input``) and constants; every other node combines
child expressions that all read the same input. Because the tree is data,
``tangent_lift`` can wrap any map into a new map that is itself
differentiable.

Derivatives are never formed symbolically: ``differential`` pushes a first
order jet through the tree, ``second_differential`` a nested one (see
``jets``). ``fd_oracle`` is the independent central-difference check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from dynbundle_cli.calculus.errors import ContractError, DomainError
from dynbundle_cli.calculus.jets import Jet, concat
from dynbundle_cli.calculus.vecspace import ArrayLike, Vector, as_array, norm

# Default guard radius for reciprocal, norm and the gravity domain.
RHO_MIN_DEFAULT = 1e-9


class SmoothMap:
    """Base class of every expression node.

    Subclasses are frozen dataclasses, so two trees are equal exactly when
    they have the same shape and parameters.
    """

    @property
    def domain_dim(self) -> int:
        raise NotImplementedError

    @property
    def codomain_dim(self) -> int:
        raise NotImplementedError

    def children(self) -> tuple["SmoothMap", ...]:
        return ()

    def jet(self, x: Jet) -> Jet:
        """Propagate a jet seeded on the input through this node."""
        raise NotImplementedError

    # sugar -------------------------------------------------------------
    def __add__(self, other: "SmoothMap") -> "SmoothMap":
        return Add(self, other)

    def __sub__(self, other: "SmoothMap") -> "SmoothMap":
        return Add(self, Scale(-1.0, other))

    def __neg__(self) -> "SmoothMap":
        return Scale(-1.0, self)

    def __mul__(self, other: "SmoothMap | float") -> "SmoothMap":
        if isinstance(other, (int, float)):
            return Scale(float(other), self)
        return Mul(self, other)

    def __rmul__(self, c: float) -> "SmoothMap":
        return Scale(float(c), self)

    def __getitem__(self, idx: "int | slice | Sequence[int]") -> "SmoothMap":
        if isinstance(idx, int):
            indices: tuple[int, ...] = (idx,)
        elif isinstance(idx, slice):
            indices = tuple(range(self.codomain_dim)[idx])
        else:
            indices = tuple(int(i) for i in idx)
        return Select(self, indices)

    def __matmul__(self, inner: "SmoothMap") -> "SmoothMap":
        return Compose(self, inner)


def _require_same_domain(*maps: SmoothMap) -> int:
    dims = {m.domain_dim for m in maps}
    if len(dims) != 1:
        raise ContractError(f"sub-expressions read inputs of different dimensions {sorted(dims)}")
    return dims.pop()


@dataclass(frozen=True, eq=True)
class Input(SmoothMap):
    """The identity on R^n."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ContractError("input dimension must be >= 1")

    @property
    def domain_dim(self) -> int:
        return self.n

    @property
    def codomain_dim(self) -> int:
        return self.n

    def jet(self, x: Jet) -> Jet:
        return x


@dataclass(frozen=True, eq=True)
class Const(SmoothMap):
    values: tuple[float, ...]
    n: int

    def __post_init__(self) -> None:
        if not self.values:
            raise ContractError("constant needs at least one value")
        if not np.all(np.isfinite(self.values)):
            raise DomainError(f"constant has non-finite values {self.values}")

    @property
    def domain_dim(self) -> int:
        return self.n

    @property
    def codomain_dim(self) -> int:
        return len(self.values)

    def jet(self, x: Jet) -> Jet:
        return x.constant_like(np.array(self.values, dtype=float))


@dataclass(frozen=True, eq=True)
class Select(SmoothMap):
    """Coordinate projection: keep the listed output coordinates of ``arg``."""

    arg: SmoothMap
    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise ContractError("selection needs at least one index")
        for i in self.indices:
            if not 0 <= i < self.arg.codomain_dim:
                raise ContractError(f"index {i} out of range for dimension {self.arg.codomain_dim}")

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return len(self.indices)

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        return self.arg.jet(x).take(self.indices)


@dataclass(frozen=True, eq=True)
class Linear(SmoothMap):
    """Matrix applied to ``arg``."""

    matrix: tuple[tuple[float, ...], ...]
    arg: SmoothMap
    _a: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[1] != self.arg.codomain_dim:
            raise ContractError(
                f"matrix of shape {a.shape} cannot act on dimension {self.arg.codomain_dim}"
            )
        object.__setattr__(self, "_a", a)

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return int(self._a.shape[0])

    @property
    def array(self) -> np.ndarray:
        return self._a

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        a = self._a
        return self.arg.jet(x).map_linear(lambda v: a @ v)


@dataclass(frozen=True, eq=True)
class Add(SmoothMap):
    left: SmoothMap
    right: SmoothMap

    def __post_init__(self) -> None:
        _require_same_domain(self.left, self.right)
        if self.left.codomain_dim != self.right.codomain_dim:
            raise ContractError(
                f"cannot add dimensions {self.left.codomain_dim} and {self.right.codomain_dim}"
            )

    @property
    def domain_dim(self) -> int:
        return self.left.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.left.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.left, self.right)

    def jet(self, x: Jet) -> Jet:
        return self.left.jet(x) + self.right.jet(x)


@dataclass(frozen=True, eq=True)
class Scale(SmoothMap):
    factor: float
    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        return self.arg.jet(x).scale(self.factor)


@dataclass(frozen=True, eq=True)
class Mul(SmoothMap):
    """Pointwise product; a one-dimensional factor scales the other side."""

    left: SmoothMap
    right: SmoothMap

    def __post_init__(self) -> None:
        _require_same_domain(self.left, self.right)
        a, b = self.left.codomain_dim, self.right.codomain_dim
        if a != b and 1 not in (a, b):
            raise ContractError(f"cannot multiply dimensions {a} and {b}")

    @property
    def domain_dim(self) -> int:
        return self.left.domain_dim

    @property
    def codomain_dim(self) -> int:
        return max(self.left.codomain_dim, self.right.codomain_dim)

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.left, self.right)

    def jet(self, x: Jet) -> Jet:
        return self.left.jet(x) * self.right.jet(x)


@dataclass(frozen=True, eq=True)
class Tuple(SmoothMap):
    """Pairing <f1, ..., fk>: concatenate the outputs."""

    parts: tuple[SmoothMap, ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 1:
            raise ContractError("tuple needs at least one component")
        _require_same_domain(*self.parts)

    @property
    def domain_dim(self) -> int:
        return self.parts[0].domain_dim

    @property
    def codomain_dim(self) -> int:
        return sum(p.codomain_dim for p in self.parts)

    def children(self) -> tuple[SmoothMap, ...]:
        return self.parts

    def jet(self, x: Jet) -> Jet:
        return concat([p.jet(x) for p in self.parts])


@dataclass(frozen=True, eq=True)
class Compose(SmoothMap):
    """outer o inner."""

    outer: SmoothMap
    inner: SmoothMap

    def __post_init__(self) -> None:
        if self.inner.codomain_dim != self.outer.domain_dim:
            raise ContractError(
                f"cannot compose: inner lands in R^{self.inner.codomain_dim}, "
                f"outer reads R^{self.outer.domain_dim}"
            )

    @property
    def domain_dim(self) -> int:
        return self.inner.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.outer.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.outer, self.inner)

    def jet(self, x: Jet) -> Jet:
        return self.outer.jet(self.inner.jet(x))


@dataclass(frozen=True, eq=True)
class Sin(SmoothMap):
    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        return self.arg.jet(x).unary(np.sin, np.cos, lambda a: -np.sin(a))


@dataclass(frozen=True, eq=True)
class Cos(SmoothMap):
    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        return self.arg.jet(x).unary(np.cos, lambda a: -np.sin(a), lambda a: -np.cos(a))


@dataclass(frozen=True, eq=True)
class Exp(SmoothMap):
    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        return self.arg.jet(x).unary(np.exp, np.exp, np.exp)


@dataclass(frozen=True, eq=True)
class Recip(SmoothMap):
    """Pointwise 1/a, defined where every |a_i| > RHO_MIN_DEFAULT."""

    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        inner = self.arg.jet(x)
        if np.any(np.abs(inner.value) <= RHO_MIN_DEFAULT):
            raise DomainError(
                f"reciprocal undefined at {inner.value.tolist()} (guard |a| > {RHO_MIN_DEFAULT})"
            )
        return inner.unary(
            lambda a: 1.0 / a,
            lambda a: -1.0 / (a * a),
            lambda a: 2.0 / (a * a * a),
        )


@dataclass(frozen=True, eq=True)
class Norm(SmoothMap):
    """Euclidean norm of ``arg``, defined where it exceeds RHO_MIN_DEFAULT."""

    arg: SmoothMap

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return 1

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        inner = self.arg.jet(x)
        if float(np.linalg.norm(inner.value)) <= RHO_MIN_DEFAULT:
            raise DomainError(f"norm is not differentiable at {inner.value.tolist()}")
        return inner.dot_self_norm()


@dataclass(frozen=True, eq=True)
class Pow(SmoothMap):
    """Pointwise a**k for an integer k >= 0."""

    arg: SmoothMap
    k: int

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 0:
            raise ContractError(f"power exponent must be a non-negative integer, got {self.k!r}")

    @property
    def domain_dim(self) -> int:
        return self.arg.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.arg.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.arg,)

    def jet(self, x: Jet) -> Jet:
        k = self.k

        def dg(a: np.ndarray) -> np.ndarray:
            return k * a ** (k - 1) if k >= 1 else np.zeros_like(a)

        def ddg(a: np.ndarray) -> np.ndarray:
            return k * (k - 1) * a ** (k - 2) if k >= 2 else np.zeros_like(a)

        return self.arg.jet(x).unary(lambda a: a ** k, dg, ddg)


@dataclass(frozen=True, eq=True)
class Bilinear(SmoothMap):
    """B(left, right) for a 3-tensor T: B(a, b)_i = sum_jk T[i][j][k] a_j b_k."""

    tensor: tuple[tuple[tuple[float, ...], ...], ...]
    left: SmoothMap
    right: SmoothMap
    _t: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _require_same_domain(self.left, self.right)
        t = np.array(self.tensor, dtype=float)
        if t.ndim != 3 or t.shape[1:] != (self.left.codomain_dim, self.right.codomain_dim):
            raise ContractError(
                f"tensor of shape {t.shape} does not pair dimensions "
                f"{self.left.codomain_dim} and {self.right.codomain_dim}"
            )
        object.__setattr__(self, "_t", t)

    @property
    def domain_dim(self) -> int:
        return self.left.domain_dim

    @property
    def codomain_dim(self) -> int:
        return int(self._t.shape[0])

    @property
    def array(self) -> np.ndarray:
        return self._t

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.left, self.right)

    def jet(self, x: Jet) -> Jet:
        return self.left.jet(x).bilinear(self._t, self.right.jet(x))


@dataclass(frozen=True, eq=True)
class Guarded(SmoothMap):
    """``body`` restricted to the open region ||gauge(x)|| > radius."""

    radius: float
    body: SmoothMap
    gauge: Optional[SmoothMap] = None

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ContractError(f"guard radius must be positive, got {self.radius}")
        if self.gauge is not None:
            _require_same_domain(self.body, self.gauge)

    @property
    def domain_dim(self) -> int:
        return self.body.domain_dim

    @property
    def codomain_dim(self) -> int:
        return self.body.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.body,) if self.gauge is None else (self.body, self.gauge)

    def admits(self, u: np.ndarray) -> bool:
        gauged = u if self.gauge is None else self.gauge.jet(Jet(u)).value
        return float(np.linalg.norm(gauged)) > self.radius

    def jet(self, x: Jet) -> Jet:
        if not self.admits(x.value):
            raise DomainError(
                f"point {x.value.tolist()} violates guard ||gauge(x)|| > {self.radius}",
                {"radius": self.radius},
            )
        return self.body.jet(x)


@dataclass(frozen=True, eq=True)
class TangentLift(SmoothMap):
    """T f : (u, e) -> (f(u), Df(u).e) as a map R^2n -> R^2m.

    A first-order jet of the lift needs a second-order jet of ``base``, so a
    lift can be evaluated and differentiated once; its second differential
    would need third derivatives of ``base`` and is refused.
    """

    base: SmoothMap

    @property
    def domain_dim(self) -> int:
        return 2 * self.base.domain_dim

    @property
    def codomain_dim(self) -> int:
        return 2 * self.base.codomain_dim

    def children(self) -> tuple[SmoothMap, ...]:
        return (self.base,)

    def jet(self, x: Jet) -> Jet:
        n = self.base.domain_dim
        if x.order >= 2:
            raise ContractError("tangent lifts support differentiation order <= 1")
        if x.order == 0:
            inner = self.base.jet(Jet(x.value[:n], x.value[n:]))
            return Jet(np.concatenate([inner.value, inner.d1]))
        # (u, e) moving along (du, de): nested seed e -> d1, du -> d2, de -> d12.
        inner = self.base.jet(Jet(x.value[:n], x.value[n:], x.d1[:n], x.d1[n:]))
        return Jet(
            np.concatenate([inner.value, inner.d1]),
            np.concatenate([inner.d2, inner.d12]),
        )


# ---------------------------------------------------------------------------
# builders


def identity(n: int) -> SmoothMap:
    return Input(n)


def constant(values: ArrayLike, n: int) -> SmoothMap:
    return Const(tuple(float(v) for v in as_array(values)), n)


def coordinate(n: int, i: int) -> SmoothMap:
    return Select(Input(n), (i,))


def linear_map(matrix: ArrayLike | Sequence[Sequence[float]], arg: Optional[SmoothMap] = None) -> SmoothMap:
    a = np.atleast_2d(np.array(matrix, dtype=float))
    rows = tuple(tuple(float(c) for c in row) for row in a)
    return Linear(rows, Input(a.shape[1]) if arg is None else arg)


def bilinear(tensor: np.ndarray, left: SmoothMap, right: SmoothMap) -> SmoothMap:
    t = np.asarray(tensor, dtype=float)
    nested = tuple(tuple(tuple(float(c) for c in row) for row in plane) for plane in t)
    return Bilinear(nested, left, right)


def tupled(*parts: SmoothMap) -> SmoothMap:
    return Tuple(tuple(parts))


def guarded(body: SmoothMap, radius: float = RHO_MIN_DEFAULT, gauge: Optional[SmoothMap] = None) -> SmoothMap:
    return Guarded(float(radius), body, gauge)


def compose(g: SmoothMap, f: SmoothMap) -> SmoothMap:
    """g o f, whose guard is the preimage condition of both."""
    return Compose(g, f)


# ---------------------------------------------------------------------------
# operations


def _point(f: SmoothMap, u: ArrayLike) -> np.ndarray:
    x = as_array(u)
    if x.size != f.domain_dim:
        raise ContractError(f"map reads R^{f.domain_dim}, got a point of dimension {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"non-finite point {x.tolist()}")
    return x


def _direction(f: SmoothMap, e: ArrayLike) -> np.ndarray:
    d = as_array(e)
    if d.size != f.domain_dim:
        raise ContractError(f"direction must have dimension {f.domain_dim}, got {d.size}")
    return d


def evaluate_array(f: SmoothMap, u: ArrayLike) -> np.ndarray:
    """f(u) as a raw ndarray; the hot path for integrators."""
    return f.jet(Jet(_point(f, u))).value


def evaluate(f: SmoothMap, u: ArrayLike) -> Vector:
    """Return f(u)."""
    return Vector(evaluate_array(f, u))


def differential(f: SmoothMap, u: ArrayLike, e: ArrayLike) -> Vector:
    """Return Df(u).e by forward propagation of a first-order jet."""
    out = f.jet(Jet(_point(f, u), _direction(f, e)))
    return Vector(out.d1)


def jacobian(f: SmoothMap, u: ArrayLike) -> np.ndarray:
    """m x n matrix whose column j is Df(u).e_j."""
    x = _point(f, u)
    n = f.domain_dim
    cols = [f.jet(Jet(x, np.eye(n)[j])).d1 for j in range(n)]
    return np.column_stack(cols)


def second_differential(f: SmoothMap, u: ArrayLike, e1: ArrayLike, e2: ArrayLike) -> Vector:
    """Return D2f(u).(e1, e2) by propagating a nested jet."""
    x = _point(f, u)
    out = f.jet(Jet.seed(x, _direction(f, e1), _direction(f, e2)))
    return Vector(out.d12)


def fd_step(u: ArrayLike) -> float:
    """Central-difference step 1e-5 * max(1, ||u||)."""
    return 1e-5 * max(1.0, norm(as_array(u)))


def fd_oracle(f: SmoothMap, u: ArrayLike, e: ArrayLike, h: Optional[float] = None) -> Vector:
    """Central difference (f(u + h e) - f(u - h e)) / 2h."""
    x, d = _point(f, u), _direction(f, e)
    step = fd_step(x) if h is None else float(h)
    if not step > 0:
        raise ContractError(f"finite-difference step must be positive, got {step}")
    plus = evaluate_array(f, x + step * d)
    minus = evaluate_array(f, x - step * d)
    return Vector((plus - minus) / (2.0 * step))


def check_leibniz(
    B: np.ndarray,
    f1: SmoothMap,
    f2: SmoothMap,
    u: ArrayLike,
    e: ArrayLike,
) -> float:
    """Residual of D(B(f1, f2))(u).e = B(Df1.e, f2) + B(f1, Df2.e)."""
    t = np.asarray(B, dtype=float)
    product = bilinear(t, f1, f2)
    lhs = differential(product, u, e).coords
    v1, v2 = evaluate_array(f1, u), evaluate_array(f2, u)
    d1, d2 = differential(f1, u, e).coords, differential(f2, u, e).coords
    rhs = np.einsum("ijk,j,k->i", t, d1, v2) + np.einsum("ijk,j,k->i", t, v1, d2)
    return norm(lhs - rhs)


def check_chain_rule(f: SmoothMap, g: SmoothMap, x: ArrayLike, v: ArrayLike) -> float:
    """Relative residual of D(g o f)(x).v = Dg(f(x)).(Df(x).v)."""
    if g.domain_dim != f.codomain_dim:
        raise ContractError(f"cannot compose: f lands in R^{f.codomain_dim}, g reads R^{g.domain_dim}")
    whole = differential(compose(g, f), x, v).coords
    stepwise = differential(g, evaluate_array(f, x), differential(f, x, v).coords).coords
    return norm(whole - stepwise) / max(1.0, norm(stepwise))


def approximation_ratios(
    f: SmoothMap,
    g: SmoothMap,
    c: ArrayLike,
    e: ArrayLike,
    ks: Sequence[int] = (2, 3, 4, 5, 6),
) -> list[float]:
    """||f(x) - g(x)|| / ||x - c|| at x = c + 10^-k e for each k.

    For maps agreeing to first order at c the ratios shrink toward 0.
    """
    cc, d = _point(f, c), _direction(f, e)
    ratios = []
    for k in ks:
        x = cc + 10.0 ** (-k) * d
        gap = norm(evaluate_array(f, x) - evaluate_array(g, x))
        ratios.append(gap / norm(x - cc))
    return ratios


def walk(f: SmoothMap):
    """Yield every node of the tree, parents first."""
    yield f
    for child in f.children():
        yield from walk(child)
