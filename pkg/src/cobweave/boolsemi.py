"""Linear algebra over the Boolean semiring ({0,1}, OR, AND)."""

from __future__ import annotations

import os

import numpy as np


class SizeError(ValueError):
    """A construction would exceed the configured size cap."""


class BudgetExceeded(RuntimeError):
    """A bounded search ran out of budget before reaching an answer."""


def entry_cap() -> int:
    """Maximum number of entries a dense matrix may hold."""
    env = os.environ.get("COBWEAVE_BUDGET")
    if env:
        try:
            return max(int(env), 1) * 4096
        except ValueError:
            pass
    return 1 << 16


# the smallest configurable cap; anything at or below it never needs a lookup
_FLOOR = 4096


def _check_size(a: np.ndarray) -> None:
    if a.size > _FLOOR and a.size > entry_cap():
        raise SizeError(f"matrix {a.shape} exceeds the entry cap {entry_cap()}")


class ShapeError(ValueError):
    pass


class BoolMat:
    """Dense Boolean matrix representing a map B^cols -> B^rows.

    Instances are immutable; the backing array is marked read-only.
    """

    __slots__ = ("_a",)

    def __init__(self, data):
        a = np.array(data, dtype=bool, copy=True)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got shape {a.shape}")
        _check_size(a)
        a.setflags(write=False)
        self._a = a

    @classmethod
    def _wrap(cls, a: np.ndarray) -> "BoolMat":
        _check_size(a)
        m = cls.__new__(cls)
        if a.dtype != np.bool_ or not a.flags.c_contiguous:
            a = np.ascontiguousarray(a, dtype=bool)
        a.setflags(write=False)
        m._a = a
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BoolMat":
        return cls._wrap(np.zeros((rows, cols), dtype=bool))

    @classmethod
    def identity(cls, n: int) -> "BoolMat":
        return cls._wrap(np.eye(n, dtype=bool))

    @classmethod
    def unit(cls, n: int, i: int) -> "BoolMat":
        """Column vector delta_i of dimension n."""
        a = np.zeros((n, 1), dtype=bool)
        a[i, 0] = True
        return cls._wrap(a)

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, idx):
        v = self._a[idx]
        return bool(v) if np.ndim(v) == 0 else v

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolMat):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.shape, self._a.tobytes()))

    def __or__(self, other: "BoolMat") -> "BoolMat":
        if self.shape != other.shape:
            raise ShapeError(f"cannot add shapes {self.shape} and {other.shape}")
        return BoolMat._wrap(self._a | other._a)

    def __and__(self, other: "BoolMat") -> "BoolMat":
        if self.shape != other.shape:
            raise ShapeError(f"cannot meet shapes {self.shape} and {other.shape}")
        return BoolMat._wrap(self._a & other._a)

    def __le__(self, other: "BoolMat") -> bool:
        return self.shape == other.shape and not bool(np.any(self._a & ~other._a))

    def __matmul__(self, other: "BoolMat") -> "BoolMat":
        return bmat_mul(self, other)

    def is_zero(self) -> bool:
        return not bool(self._a.any())

    def support(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._a))]

    def tolist(self) -> list[list[int]]:
        return self._a.astype(int).tolist()

    def __repr__(self) -> str:
        return f"BoolMat({self.tolist()})"


def bmat_mul(a: BoolMat, b: BoolMat) -> BoolMat:
    x, y = a._a, b._a
    if x.shape[1] != y.shape[0]:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    # numpy's boolean matmul is exactly OR-of-ANDs
    r = np.matmul(x, y)
    _check_size(r)
    r.setflags(write=False)
    out = BoolMat.__new__(BoolMat)
    out._a = r
    return out


def bmat_kron(a: BoolMat, b: BoolMat) -> BoolMat:
    rows, cols = a.rows * b.rows, a.cols * b.cols
    if rows * cols > entry_cap():
        raise SizeError(f"kron of {a.shape} and {b.shape} needs {rows * cols} entries")
    return BoolMat._wrap(np.kron(a.array, b.array).astype(bool))


def bmat_transpose(a: BoolMat) -> BoolMat:
    return BoolMat._wrap(a.array.T)


def bmat_chain(mats, dim: int) -> BoolMat:
    """Product mats[-1] @ ... @ mats[0]; the identity when mats is empty."""
    out = BoolMat.identity(dim)
    for m in mats:
        out = bmat_mul(m, out)
    return out


def vec(bits) -> BoolMat:
    """Column vector from a sequence of 0/1 values."""
    return BoolMat(np.array(list(bits), dtype=bool).reshape(-1, 1))


def all_vectors(n: int):
    """Every column vector of B^n, in binary counting order."""
    for code in range(1 << n):
        yield vec((code >> i) & 1 for i in range(n))
