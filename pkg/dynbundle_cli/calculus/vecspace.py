"""Real coordinate vector spaces: vectors, norms, metrics, inner products.

Also hosts the seeded axiom checkers used to audit a norm or the metric it
induces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from dynbundle_cli.calculus.errors import ContractError, DomainError


# Relative slack when comparing both sides of an axiom.
AXIOM_RTOL = 1e-12

ArrayLike = Union["Vector", Sequence[float], np.ndarray]


class Vector:
    """Immutable finite vector of doubles with a fixed dimension."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Iterable[float]):
        arr = np.array(coords, dtype=float).reshape(-1)
        if arr.size < 1:
            raise ContractError("Vector needs dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"Vector has non-finite coordinates: {arr.tolist()}")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def of(cls, *xs: float) -> "Vector":
        return cls(xs)

    @classmethod
    def zeros(cls, n: int) -> "Vector":
        return cls(np.zeros(n))

    @classmethod
    def basis(cls, n: int, j: int) -> "Vector":
        if not 0 <= j < n:
            raise ContractError(f"basis index {j} out of range for dimension {n}")
        e = np.zeros(n)
        e[j] = 1.0
        return cls(e)

    @classmethod
    def concat(cls, *parts: ArrayLike) -> "Vector":
        return cls(np.concatenate([as_array(p) for p in parts]))

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return int(self._coords.size)

    def split(self, *sizes: int) -> list["Vector"]:
        """Cut the vector into consecutive blocks of the given sizes."""
        if sum(sizes) != self.dim:
            raise ContractError(f"cannot split dimension {self.dim} into {sizes}")
        out, start = [], 0
        for size in sizes:
            out.append(Vector(self._coords[start:start + size]))
            start += size
        return out

    def tolist(self) -> list[float]:
        return self._coords.tolist()

    def _other(self, other: ArrayLike) -> np.ndarray:
        arr = as_array(other)
        require_same_dim(self._coords, arr)
        return arr

    def __add__(self, other: ArrayLike) -> "Vector":
        return Vector(self._coords + self._other(other))

    def __sub__(self, other: ArrayLike) -> "Vector":
        return Vector(self._coords - self._other(other))

    def __mul__(self, scalar: float) -> "Vector":
        return Vector(self._coords * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Vector":
        return Vector(self._coords / float(scalar))

    def __neg__(self) -> "Vector":
        return Vector(-self._coords)

    def __len__(self) -> int:
        return self.dim

    def __getitem__(self, i: int) -> float:
        return float(self._coords[i])

    def __iter__(self):
        return iter(self._coords.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vector):
            return NotImplemented
        return bool(np.array_equal(self._coords, other._coords))

    def __hash__(self) -> int:
        return hash(self._coords.tobytes())

    def __repr__(self) -> str:
        return f"Vector({self._coords.tolist()})"


def as_array(v: ArrayLike) -> np.ndarray:
    """Return the coordinates of a Vector or array-like as a float ndarray."""
    if isinstance(v, Vector):
        return v.coords
    arr = np.asarray(v, dtype=float)
    return arr.reshape(-1) if arr.ndim != 1 else arr


def require_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise ContractError(f"dimension mismatch: {x.size} vs {y.size}")


def require_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"non-finite input: {x.tolist()}")


@dataclass(frozen=True)
class NormSpec:
    """Which norm to use: euclidean, p-norm (p >= 1) or max.

    ``NormSpec.pseudo(p)`` skips the p >= 1 check so that quasi-norms can be
    fed to the axiom checker as counterexamples.
    """

    kind: str = "euclidean"
    p: Optional[float] = None
    checked: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("euclidean", "p", "max"):
            raise ContractError(f"unknown norm kind: {self.kind!r}")
        if self.kind == "p":
            if self.p is None or not math.isfinite(self.p) or self.p <= 0:
                raise ContractError(f"p-norm needs a finite positive p, got {self.p}")
            if self.checked and self.p < 1:
                raise ContractError(f"p-norm needs p >= 1, got {self.p}")

    @classmethod
    def euclidean(cls) -> "NormSpec":
        return cls("euclidean")

    @classmethod
    def p_norm(cls, p: float) -> "NormSpec":
        return cls("p", float(p))

    @classmethod
    def max_norm(cls) -> "NormSpec":
        return cls("max")

    @classmethod
    def pseudo(cls, p: float) -> "NormSpec":
        return cls("p", float(p), checked=False)


EUCLIDEAN = NormSpec.euclidean()


def norm(v: ArrayLike, spec: NormSpec = EUCLIDEAN) -> float:
    """Return ||v|| under ``spec``."""
    x = as_array(v)
    require_finite(x)
    if spec.kind == "euclidean":
        return float(np.linalg.norm(x))
    if spec.kind == "max":
        return float(np.max(np.abs(x)))
    return float(np.sum(np.abs(x) ** spec.p) ** (1.0 / spec.p))


def metric(x: ArrayLike, y: ArrayLike, spec: NormSpec = EUCLIDEAN) -> float:
    """Return d(x, y) = ||x - y||."""
    a, b = as_array(x), as_array(y)
    require_same_dim(a, b)
    return norm(a - b, spec)


@dataclass(frozen=True)
class InnerProduct:
    """Inner product <x, y> = x^T G y for a symmetric positive-definite gram G."""

    gram: tuple[tuple[float, ...], ...]
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        g = np.array(self.gram, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
            raise ContractError(f"gram must be a square matrix, got shape {g.shape}")
        if not np.array_equal(g, g.T):
            raise ContractError("gram matrix is not symmetric")
        rng = np.random.default_rng(0)
        for _ in range(64):
            e = rng.standard_normal(g.shape[0])
            if float(e @ g @ e) <= 0.0:
                raise ContractError("gram matrix is not positive definite", {"witness": e.tolist()})
        g.setflags(write=False)
        object.__setattr__(self, "_matrix", g)

    @classmethod
    def identity(cls, n: int) -> "InnerProduct":
        return cls.from_matrix(np.eye(n))

    @classmethod
    def from_matrix(cls, g: np.ndarray) -> "InnerProduct":
        return cls(tuple(tuple(float(c) for c in row) for row in np.asarray(g, dtype=float)))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return int(self._matrix.shape[0])

    def induced_norm(self, x: ArrayLike) -> float:
        return math.sqrt(inner(x, x, self))


def inner(x: ArrayLike, y: ArrayLike, ip: Optional[InnerProduct] = None) -> float:
    """Return <x, y> (identity gram when ``ip`` is omitted)."""
    a, b = as_array(x), as_array(y)
    require_same_dim(a, b)
    if ip is None:
        return float(a @ b)
    if ip.dim != a.size:
        raise ContractError(f"gram has dimension {ip.dim}, vectors have {a.size}")
    return float(a @ ip.matrix @ b)


@dataclass(frozen=True)
class Violation:
    """One failed axiom instance with the witness that broke it."""

    axiom: str
    witness: dict
    detail: str


@dataclass
class AxiomReport:
    """Outcome of a seeded axiom battery."""

    subject: str
    trials: int
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "trials": self.trials,
            "ok": self.ok,
            "violations": [
                {"axiom": v.axiom, "detail": v.detail, "witness": v.witness}
                for v in self.violations
            ],
        }


def _close(lhs: float, rhs: float, rtol: float = AXIOM_RTOL) -> bool:
    return abs(lhs - rhs) <= rtol * max(1.0, abs(lhs), abs(rhs))


def _draw_pair(rng: np.random.Generator, dim: int, trial: int) -> tuple[np.ndarray, np.ndarray]:
    x = rng.standard_normal(dim)
    y = rng.standard_normal(dim)
    # Every other trial uses disjoint supports; quasi-norms fail there first.
    if trial % 2 == 1 and dim > 1:
        cut = int(rng.integers(1, dim))
        x[cut:] = 0.0
        y[:cut] = 0.0
    return x, y


def check_norm_axioms(
    spec: NormSpec, samples: int, seed: int, dim: int = 3
) -> AxiomReport:
    """Check N1 (definiteness), N2 (homogeneity), N3 (triangle) on random data."""
    if samples < 1:
        raise ContractError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    report = AxiomReport(subject=f"norm[{spec.kind}{'' if spec.p is None else spec.p}]", trials=samples)

    if norm(np.zeros(dim), spec) != 0.0:
        report.violations.append(Violation("N1", {"v": [0.0] * dim}, "norm of zero is not 0"))

    for trial in range(samples):
        x, y = _draw_pair(rng, dim, trial)
        lam = float(rng.uniform(-5.0, 5.0))
        nx, ny = norm(x, spec), norm(y, spec)

        if np.any(x != 0) and nx <= 0.0:
            report.violations.append(Violation("N1", {"v": x.tolist()}, f"nonzero vector has norm {nx}"))

        lhs, rhs = norm(lam * x, spec), abs(lam) * nx
        if not _close(lhs, rhs):
            report.violations.append(
                Violation("N2", {"v": x.tolist(), "lambda": lam}, f"||lv||={lhs!r} but |l|*||v||={rhs!r}")
            )

        nsum = norm(x + y, spec)
        if nsum > (nx + ny) * (1.0 + AXIOM_RTOL):
            report.violations.append(
                Violation("N3", {"x": x.tolist(), "y": y.tolist()}, f"||x+y||={nsum!r} > {nx + ny!r}")
            )
    return report


def check_metric_axioms(
    spec: NormSpec, samples: int, seed: int, dim: int = 3
) -> AxiomReport:
    """Check d1-d4 for the norm-induced metric, plus translation invariance and homogeneity."""
    if samples < 1:
        raise ContractError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    report = AxiomReport(subject=f"metric[{spec.kind}{'' if spec.p is None else spec.p}]", trials=samples)

    for trial in range(samples):
        x, y = _draw_pair(rng, dim, trial)
        z = rng.standard_normal(dim)
        a = rng.standard_normal(dim)
        lam = float(rng.uniform(-5.0, 5.0))
        dxy = metric(x, y, spec)

        if dxy < 0.0:
            report.violations.append(Violation("d1", {"x": x.tolist(), "y": y.tolist()}, f"d={dxy}"))
        if metric(x, x, spec) != 0.0 or (np.any(x != y) and dxy == 0.0):
            report.violations.append(Violation("d2", {"x": x.tolist(), "y": y.tolist()}, "coincidence fails"))
        if dxy != metric(y, x, spec):
            report.violations.append(Violation("d3", {"x": x.tolist(), "y": y.tolist()}, "d(x,y) != d(y,x)"))

        dxz, dyz = metric(x, z, spec), metric(y, z, spec)
        if dxz > (dxy + dyz) * (1.0 + AXIOM_RTOL):
            report.violations.append(
                Violation("d4", {"x": x.tolist(), "y": y.tolist(), "z": z.tolist()}, f"{dxz!r} > {dxy + dyz!r}")
            )

        shifted = metric(x + a, y + a, spec)
        if abs(shifted - dxy) > 1e-9 * (1.0 + norm(a, spec)):
            report.violations.append(
                Violation("translation", {"x": x.tolist(), "y": y.tolist(), "a": a.tolist()}, f"{shifted!r} != {dxy!r}")
            )
        if not _close(metric(lam * x, lam * y, spec), abs(lam) * dxy):
            report.violations.append(
                Violation("homogeneity", {"x": x.tolist(), "y": y.tolist(), "lambda": lam}, "d(lx,ly) != |l| d(x,y)")
            )
    return report
