"""Truncated jets: the number system the forward-mode engine runs on.

A jet carries a value and up to three tangent slots over numpy arrays:

    value  f(u)
    d1     Df(u).e1
    d2     Df(u).e2
    d12    D2f(u).(e1, e2) + Df(u).e3

which is a dual number nested inside a dual number (``eps1**2 = eps2**2 = 0``,
``eps1*eps2`` kept). Order 0 carries only the value, order 1 adds ``d1``,
order 2 carries all four slots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from dynbundle_cli.calculus.errors import ContractError


@dataclass(frozen=True)
class Jet:
    value: np.ndarray
    d1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None
    d12: Optional[np.ndarray] = None

    @property
    def order(self) -> int:
        if self.d1 is None:
            return 0
        if self.d2 is None:
            return 1
        return 2

    @property
    def dim(self) -> int:
        return int(self.value.size)

    @classmethod
    def seed(
        cls,
        u: np.ndarray,
        e1: Optional[np.ndarray] = None,
        e2: Optional[np.ndarray] = None,
        e3: Optional[np.ndarray] = None,
    ) -> "Jet":
        """Start a jet at ``u`` moving along the given directions."""
        if e1 is None:
            return cls(u)
        if e2 is None:
            return cls(u, e1)
        return cls(u, e1, e2, np.zeros_like(u) if e3 is None else e3)

    def constant_like(self, value: np.ndarray) -> "Jet":
        """A jet of the same order whose tangents vanish."""
        zero = np.zeros_like(value)
        if self.order == 0:
            return Jet(value)
        if self.order == 1:
            return Jet(value, zero)
        return Jet(value, zero, zero, zero)

    def map_linear(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Jet":
        """Apply a linear map slot by slot."""
        return Jet(
            fn(self.value),
            None if self.d1 is None else fn(self.d1),
            None if self.d2 is None else fn(self.d2),
            None if self.d12 is None else fn(self.d12),
        )

    def take(self, indices: tuple[int, ...]) -> "Jet":
        idx = list(indices)
        return self.map_linear(lambda a: a[idx])

    def slice(self, start: int, stop: int) -> "Jet":
        return self.map_linear(lambda a: a[start:stop])

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(
            self.value + other.value,
            _opt_add(self.d1, other.d1),
            _opt_add(self.d2, other.d2),
            _opt_add(self.d12, other.d12),
        )

    def scale(self, c: float) -> "Jet":
        return self.map_linear(lambda a: c * a)

    def __mul__(self, other: "Jet") -> "Jet":
        """Pointwise product; a one-dimensional factor broadcasts."""
        a, b = self, other
        value = a.value * b.value
        if a.order == 0:
            return Jet(value)
        d1 = a.d1 * b.value + a.value * b.d1
        if a.order == 1:
            return Jet(value, d1)
        d2 = a.d2 * b.value + a.value * b.d2
        d12 = a.d12 * b.value + a.d1 * b.d2 + a.d2 * b.d1 + a.value * b.d12
        return Jet(value, d1, d2, d12)

    def unary(
        self,
        g: Callable[[np.ndarray], np.ndarray],
        dg: Callable[[np.ndarray], np.ndarray],
        ddg: Callable[[np.ndarray], np.ndarray],
    ) -> "Jet":
        """Push a pointwise smooth function through the jet (chain rule to second order)."""
        a = self.value
        value = g(a)
        if self.order == 0:
            return Jet(value)
        slope = dg(a)
        d1 = slope * self.d1
        if self.order == 1:
            return Jet(value, d1)
        d2 = slope * self.d2
        d12 = slope * self.d12 + ddg(a) * self.d1 * self.d2
        return Jet(value, d1, d2, d12)

    def dot_self_norm(self) -> "Jet":
        """Euclidean norm of the whole vector as a one-dimensional jet."""
        a = self.value
        n = float(np.sqrt(a @ a))
        value = np.array([n])
        if self.order == 0:
            return Jet(value)
        s1 = float(a @ self.d1)
        d1 = np.array([s1 / n])
        if self.order == 1:
            return Jet(value, d1)
        s2 = float(a @ self.d2)
        d2 = np.array([s2 / n])
        d12 = np.array([(float(self.d1 @ self.d2) + float(a @ self.d12)) / n - s1 * s2 / n ** 3])
        return Jet(value, d1, d2, d12)

    def bilinear(self, tensor: np.ndarray, other: "Jet") -> "Jet":
        """B(a, b)_i = sum_jk T[i,j,k] a_j b_k, expanded by the Leibniz rule."""
        def B(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            return np.einsum("ijk,j,k->i", tensor, x, y)

        a, b = self, other
        value = B(a.value, b.value)
        if a.order == 0:
            return Jet(value)
        d1 = B(a.d1, b.value) + B(a.value, b.d1)
        if a.order == 1:
            return Jet(value, d1)
        d2 = B(a.d2, b.value) + B(a.value, b.d2)
        d12 = B(a.d12, b.value) + B(a.d1, b.d2) + B(a.d2, b.d1) + B(a.value, b.d12)
        return Jet(value, d1, d2, d12)


def concat(parts: list[Jet]) -> Jet:
    orders = {p.order for p in parts}
    if len(orders) != 1:
        raise ContractError(f"cannot concatenate jets of mixed orders {sorted(orders)}")
    order = orders.pop()

    def cat(slot: str) -> np.ndarray:
        return np.concatenate([getattr(p, slot) for p in parts])

    if order == 0:
        return Jet(cat("value"))
    if order == 1:
        return Jet(cat("value"), cat("d1"))
    return Jet(cat("value"), cat("d1"), cat("d2"), cat("d12"))


def _opt_add(a: Optional[np.ndarray], b: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if a is None or b is None:
        return None
    return a + b
