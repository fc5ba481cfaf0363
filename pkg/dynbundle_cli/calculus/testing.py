"""Paths, tests and the testing correlation between them.

A path is a curve s -> p(s) through a manifold, a test a real-valued map on
it. The correlation of the two is the derivative at 0 of the test read along
the path. Paths with the same base point that no test tells apart are the
same tangent vector; the canonical representative is (p(0), Dp(0).1).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from dynbundle_cli.calculus.errors import ContractError, DomainError
from dynbundle_cli.calculus.jets import Jet
from dynbundle_cli.calculus.smoothmap import (
    Input,
    Mul,
    SmoothMap,
    compose,
    constant,
    coordinate,
    evaluate_array,
    jacobian,
    linear_map,
)
from dynbundle_cli.calculus.tangent import BasicManifold, Covector, TangentVector
from dynbundle_cli.calculus.vecspace import ArrayLike, Vector, as_array, norm

# Default tolerance for path equivalence and for separation.
EQUIVALENCE_TOL = 1e-9


@dataclass(frozen=True)
class Path:
    """A curve defined on the window (-a, a)."""

    map: SmoothMap
    window: float = 1.0
    manifold: Optional[BasicManifold] = None

    def __post_init__(self) -> None:
        if self.map.domain_dim != 1:
            raise ContractError(f"a path reads R^1, this map reads R^{self.map.domain_dim}")
        if not self.window > 0:
            raise ContractError(f"path window must be positive, got {self.window}")
        if self.manifold is not None:
            self.manifold.require(self.at(0.0))

    @property
    def dim(self) -> int:
        return self.map.codomain_dim

    def at(self, s: float) -> np.ndarray:
        if not -self.window < s < self.window:
            raise DomainError(f"parameter {s} outside the path window (-{self.window}, {self.window})")
        return evaluate_array(self.map, [s])

    def jet_at(self, s: float = 0.0) -> Jet:
        if not -self.window < s < self.window:
            raise DomainError(f"parameter {s} outside the path window (-{self.window}, {self.window})")
        return self.map.jet(Jet(np.array([s]), np.array([1.0])))


@dataclass(frozen=True)
class Test:
    """A real-valued map on a manifold."""

    __test__ = False  # not a pytest class

    map: SmoothMap
    label: str = ""

    def __post_init__(self) -> None:
        if self.map.codomain_dim != 1:
            raise ContractError(f"a test lands in R^1, this map lands in R^{self.map.codomain_dim}")

    @property
    def dim(self) -> int:
        return self.map.domain_dim

    def value_at(self, x: ArrayLike) -> float:
        return float(evaluate_array(self.map, x)[0])


def _along(p: Path, t: Test, s: float = 0.0) -> Jet:
    if t.dim != p.dim:
        raise ContractError(f"test reads R^{t.dim}, path lands in R^{p.dim}")
    return t.map.jet(p.jet_at(s))


def correlate(p: Path, t: Test) -> float:
    """D(t o p)(0)."""
    return float(_along(p, t).d1[0])


def tangent_of_path(p: Path) -> TangentVector:
    """Canonical representative (p(0), Dp(0).1) of the path's class."""
    j = p.jet_at(0.0)
    return TangentVector(Vector(j.value), Vector(j.d1))


def paths_equivalent(p1: Path, p2: Path, tol: float = EQUIVALENCE_TOL) -> bool:
    """Same base point and same velocity at 0, both within ``tol``."""
    a, b = tangent_of_path(p1), tangent_of_path(p2)
    if a.base.dim != b.base.dim:
        return False
    return norm(a.base - b.base) <= tol and norm(a.dir - b.dir) <= tol


def monomial_battery(dim: int, degree: int) -> list[Test]:
    """Coordinate tests x_i, and for degree 2 also the products x_i x_j (i <= j)."""
    if degree not in (1, 2):
        raise ContractError(f"battery degree must be 1 or 2, got {degree}")
    tests = [Test(coordinate(dim, i), f"x{i}") for i in range(dim)]
    if degree == 2:
        for i, j in combinations_with_replacement(range(dim), 2):
            tests.append(Test(Mul(coordinate(dim, i), coordinate(dim, j)), f"x{i}*x{j}"))
    return tests


def separating_test_search(p1: Path, p2: Path, degree: int = 2) -> Optional[Test]:
    """Find a battery test whose observed behaviour differs on the two paths.

    The behaviour of a path under a test is the pair (t(p(0)), D(t o p)(0)):
    the correlation read inside the fibre over the base point. Returns None
    when every test in the battery agrees within EQUIVALENCE_TOL.
    """
    if p1.dim != p2.dim:
        raise ContractError(f"paths land in R^{p1.dim} and R^{p2.dim}")
    for t in monomial_battery(p1.dim, degree):
        j1, j2 = _along(p1, t), _along(p2, t)
        if abs(j1.value[0] - j2.value[0]) > EQUIVALENCE_TOL or abs(j1.d1[0] - j2.d1[0]) > EQUIVALENCE_TOL:
            return t
    return None


def check_dinaturality(f: SmoothMap, p: Path, t: Test, samples: int = 1) -> float:
    """Largest |corr(f o p, t) - corr(p, t o f)| over ``samples`` parameter points.

    The first point is 0; further ones spread over the middle half of the window.
    """
    if samples < 1:
        raise ContractError("samples must be >= 1")
    pushed = Path(compose(f, p.map), p.window)
    pulled = Test(compose(t.map, f))
    offsets = [0.0]
    if samples > 1:
        offsets += np.linspace(-0.5 * p.window, 0.5 * p.window, samples - 1).tolist()
    worst = 0.0
    for s in offsets:
        lhs = float(_along(pushed, t, s).d1[0])
        rhs = float(_along(p, pulled, s).d1[0])
        worst = max(worst, abs(lhs - rhs))
    return worst


def covector_of_test(t: Test, x: ArrayLike) -> Covector:
    """The Riesz representative of e -> Dt(x).e, placed at x."""
    point = as_array(x)
    grad = jacobian(t.map, point)[0]
    return Covector(Vector(point), Vector(grad))


def line_through(x: ArrayLike, e: ArrayLike, window: float = 1.0) -> Path:
    """The affine path s -> x + s e."""
    base, d = as_array(x), as_array(e)
    if base.shape != d.shape:
        raise ContractError("point and direction differ in dimension")
    return Path(constant(base, 1) + linear_map(d.reshape(-1, 1), Input(1)), window)
