"""Ground sets, element sets, fractional points and shared error types."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

MAX_ELEMENTS = 63


class McgError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(McgError, ValueError):
    """A document does not match the expected structure."""


class ValidationError(McgError, ValueError):
    """A well-formed value violates a domain invariant."""


class SizeError(McgError, ValueError):
    """An exhaustive routine was asked to enumerate too many subsets."""


class DomainError(McgError, ValueError):
    """An operation was applied outside the family it is defined for."""


@dataclass(frozen=True)
class GroundSet:
    n: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValidationError(f"n: expected an integer, got {self.n!r}")
        if not 1 <= self.n <= MAX_ELEMENTS:
            raise ValidationError(f"n: must lie in [1, {MAX_ELEMENTS}], got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.n:
                raise ValidationError(f"labels: expected {self.n} names, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise ValidationError("labels: names must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, s: int) -> str:
        return self.labels[s] if self.labels is not None else str(s)


@dataclass(frozen=True)
class ElementSet:
    """A subset of ``{0, ..., n-1}`` stored as a bitmask.

    Implements ``__index__`` so it can be passed wherever a plain integer
    mask is accepted.
    """

    mask: int
    n: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n:
            raise ValidationError(f"mask {self.mask:#x} has members outside [0, {self.n})")

    @classmethod
    def from_members(cls, members: Iterable[int], n: int) -> "ElementSet":
        mask = 0
        for s in members:
            if not 0 <= s < n:
                raise ValidationError(f"element {s} outside [0, {n})")
            mask |= 1 << s
        return cls(mask, n)

    def __index__(self) -> int:
        return self.mask

    def __contains__(self, s: int) -> bool:
        return bool(self.mask >> s & 1)

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self):
        return iter(members(self.mask))

    def add(self, s: int) -> "ElementSet":
        return ElementSet(self.mask | (1 << s), self.n)

    def remove(self, s: int) -> "ElementSet":
        return ElementSet(self.mask & ~(1 << s), self.n)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> list[int]:
    out = []
    s = 0
    while mask:
        if mask & 1:
            out.append(s)
        mask >>= 1
        s += 1
    return out


def mask_bits(masks, n: int) -> np.ndarray:
    """Expand an array of bitmasks into an ``(len(masks), n)`` boolean matrix."""
    masks = np.asarray(masks, dtype=np.uint64)
    shifts = np.arange(n, dtype=np.uint64)
    return ((masks[:, None] >> shifts) & np.uint64(1)).astype(bool)


def bits_to_masks(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint64)
    weights = np.uint64(1) << np.arange(bits.shape[-1], dtype=np.uint64)
    return (bits * weights).sum(axis=-1, dtype=np.uint64)


def all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.uint64)


class FractionalPoint:
    """A point of the unit cube; construction never clamps."""

    __slots__ = ("_coords",)

    def __init__(self, coords: Sequence[float]):
        arr = np.array(coords, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise ValidationError("coords: empty vector")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("coords: non-finite coordinate")
        bad = np.flatnonzero((arr < 0.0) | (arr > 1.0))
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"coords[{i}] = {arr[i]!r} outside [0, 1]")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def indicator(cls, mask: int, n: int) -> "FractionalPoint":
        return cls(mask_bits([int(mask)], n)[0].astype(np.float64))

    @classmethod
    def zeros(cls, n: int) -> "FractionalPoint":
        return cls(np.zeros(n))

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def n(self) -> int:
        return self._coords.size

    def __len__(self) -> int:
        return self._coords.size

    def __array__(self, dtype=None, copy=None):
        return self._coords if dtype is None else self._coords.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, FractionalPoint):
            return NotImplemented
        return np.array_equal(self._coords, other._coords)

    def __hash__(self):
        return hash(self._coords.tobytes())

    def __repr__(self):
        return f"FractionalPoint({self._coords.tolist()!r})"


def as_coords(x, n: Optional[int] = None) -> np.ndarray:
    """Return the coordinate array of ``x``, validating raw arrays on the way."""
    if isinstance(x, FractionalPoint):
        arr = x.coords
    else:
        arr = FractionalPoint(x).coords
    if n is not None and arr.size != n:
        raise ValidationError(f"point has {arr.size} coordinates, expected {n}")
    return arr


def canonical_json(obj) -> str:
    """Serialize ``obj`` with sorted keys and 17-significant-digit floats.

    Output is byte-stable for equal inputs, which the report files rely on.
    """
    parts: list[str] = []
    _emit(obj, parts)
    return "".join(parts) + "\n"


def _emit(obj, out: list[str]) -> None:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append("null" if obj is None else ("true" if obj else "false"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            raise ValueError(f"cannot serialize non-finite float {v!r}")
        out.append(format(v, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
