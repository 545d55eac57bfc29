"""Bit-packed linear algebra over GF(2).

Vectors are arbitrary-precision Python integers read as little-endian bit
strings of a declared length, so xor of two vectors is a single operation on
the packed representation.  ``SpanBasis`` maintains an incrementally grown,
fully reduced row basis: every row's lowest set bit is its pivot, pivots are
strictly increasing, and no row has a set bit at another row's pivot.  Full
reduction makes membership testing a single reduction pass, which is what the
incremental image searches need.

Equality of vectors is value equality on (length, bit content); the word size
of the underlying integers is never visible through the interface.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DimensionError


@dataclass(frozen=True, slots=True)
class BitVec:
    """Immutable GF(2) vector of fixed length."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError("vector length must be nonnegative")
        if self.bits < 0 or self.bits >> self.length:
            raise DimensionError(
                f"bit content does not fit in {self.length} bits"
            )

    @classmethod
    def from_indices(cls, length: int, indices: Iterable[int]) -> "BitVec":
        bits = 0
        for i in indices:
            if not 0 <= i < length:
                raise DimensionError(f"bit index {i} out of range [0,{length})")
            bits ^= 1 << i
        return cls(length, bits)

    @classmethod
    def from01(cls, text: str) -> "BitVec":
        """Parse a 0/1 string; character i gives bit i."""
        bits = 0
        for i, ch in enumerate(text):
            if ch == "1":
                bits |= 1 << i
            elif ch != "0":
                raise ValueError(f"not a 0/1 string: {text!r}")
        return cls(len(text), bits)

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.length != other.length:
            raise DimensionError(
                f"length mismatch: {self.length} vs {other.length}"
            )
        return BitVec(self.length, self.bits ^ other.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def bit(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise DimensionError(f"bit index {i} out of range [0,{self.length})")
        return (self.bits >> i) & 1

    def support(self) -> tuple[int, ...]:
        """Indices of set bits, ascending."""
        out = []
        b = self.bits
        while b:
            low = b & -b
            out.append(low.bit_length() - 1)
            b ^= low
        return tuple(out)

    def popcount(self) -> int:
        return self.bits.bit_count()

    def to01(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))

    def __repr__(self) -> str:
        return f"BitVec({self.length}, 0b{self.to01()[::-1] or '0'})"


def _lowest_bit(bits: int) -> int:
    return (bits & -bits).bit_length() - 1


class SpanBasis:
    """Incrementally maintained, fully reduced basis of a GF(2) subspace.

    Single-writer: concurrent searches should each own a private instance and
    merge by re-inserting rows.
    """

    __slots__ = ("length", "_rows", "_pivots")

    def __init__(self, length: int):
        if length < 0:
            raise DimensionError("ambient dimension must be nonnegative")
        self.length = length
        self._rows: list[int] = []
        self._pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(self._pivots)

    def rows(self) -> tuple[BitVec, ...]:
        return tuple(BitVec(self.length, r) for r in self._rows)

    def row_bits(self) -> tuple[int, ...]:
        return tuple(self._rows)

    def copy(self) -> "SpanBasis":
        dup = SpanBasis(self.length)
        dup._rows = list(self._rows)
        dup._pivots = list(self._pivots)
        return dup

    def _check_length(self, v: BitVec) -> None:
        if v.length != self.length:
            raise DimensionError(
                f"vector length {v.length} != ambient dimension {self.length}"
            )

    def _reduce_bits(self, bits: int) -> int:
        # Rows are fully reduced, so one pass in increasing pivot order
        # eliminates every pivot position.
        for p, row in zip(self._pivots, self._rows):
            if (bits >> p) & 1:
                bits ^= row
        return bits

    def insert_bits(self, bits: int) -> bool:
        """Raw-integer insert; returns True iff the vector was independent."""
        bits = self._reduce_bits(bits)
        if bits == 0:
            return False
        p = _lowest_bit(bits)
        for k, row in enumerate(self._rows):
            if (row >> p) & 1:
                self._rows[k] = row ^ bits
        at = bisect.bisect_left(self._pivots, p)
        self._pivots.insert(at, p)
        self._rows.insert(at, bits)
        return True

    def insert(self, v: BitVec) -> bool:
        """Grow the span by v; returns True iff v was outside the old span."""
        self._check_length(v)
        return self.insert_bits(v.bits)

    def contains_bits(self, bits: int) -> bool:
        return self._reduce_bits(bits) == 0

    def contains(self, v: BitVec) -> bool:
        """True iff v reduces to zero against the basis rows."""
        self._check_length(v)
        return self.contains_bits(v.bits)


def mat_rank(rows: Sequence[BitVec]) -> int:
    """Rank over GF(2); equal to folding span insertion in any order."""
    rows = list(rows)
    if not rows:
        return 0
    length = rows[0].length
    basis = SpanBasis(length)
    for v in rows:
        basis.insert(v)
    return basis.rank


@dataclass(frozen=True, slots=True)
class F2Matrix:
    """Square GF(2) matrix stored column-major, each column a packed int."""

    n: int
    cols: tuple[int, ...]

    def __post_init__(self):
        if len(self.cols) != self.n:
            raise DimensionError(f"expected {self.n} columns, got {len(self.cols)}")
        for c in self.cols:
            if c < 0 or c >> self.n:
                raise DimensionError("column does not fit the declared size")

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "F2Matrix":
        n = len(rows)
        cols = [0] * n
        for i, row in enumerate(rows):
            if len(row) != n:
                raise DimensionError("matrix is not square")
            for j, e in enumerate(row):
                if e & 1:
                    cols[j] |= 1 << i
        return cls(n, tuple(cols))

    def entry(self, i: int, j: int) -> int:
        return (self.cols[j] >> i) & 1

    def mul_vec(self, bits: int) -> int:
        """Matrix-vector product M.v with v a packed column vector."""
        out = 0
        b = bits
        while b:
            low = b & -b
            out ^= self.cols[low.bit_length() - 1]
            b ^= low
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.n != other.n:
            raise DimensionError("size mismatch in matrix product")
        return F2Matrix(self.n, tuple(self.mul_vec(c) for c in other.cols))

    def transpose(self) -> "F2Matrix":
        rows = [[self.entry(j, i) for j in range(self.n)] for i in range(self.n)]
        return F2Matrix.from_rows(rows)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for i in range(self.n):
            yield tuple(self.entry(i, j) for j in range(self.n))
