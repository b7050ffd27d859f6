"""Discrete measures on the real line.

A measure is a finite sum of weighted Dirac deltas. ``DiscreteMeasure`` keeps
non-negative masses on strictly increasing positions; ``SignedAtomList`` holds
the signed difference of two measures, which is all the distance algorithms
ever consume.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Atom",
    "DiscreteMeasure",
    "SignedAtomList",
    "MeasureError",
    "NonFiniteInput",
    "NegativeMass",
    "ParseError",
    "canonicalize",
    "difference",
    "total_mass",
    "radon_distance",
    "translate",
    "scale_mass",
    "parse_measure",
    "read_measure",
    "format_measure",
    "write_measure",
]


class MeasureError(ValueError):
    """Base class for invalid measure input."""


class NonFiniteInput(MeasureError):
    pass


class NegativeMass(MeasureError):
    pass


class ParseError(MeasureError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class Atom(NamedTuple):
    position: float
    mass: float


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.flags.writeable = False
    return arr


class _AtomArrays:
    """Shared storage for the two atom-list types: parallel position/mass arrays."""

    __slots__ = ("positions", "masses")

    positions: np.ndarray
    masses: np.ndarray

    def __init__(self, positions, masses):
        object.__setattr__(self, "positions", _frozen(positions))
        object.__setattr__(self, "masses", _frozen(masses))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __len__(self) -> int:
        return self.positions.shape[0]

    def __iter__(self) -> Iterator[Atom]:
        for x, m in zip(self.positions.tolist(), self.masses.tolist()):
            yield Atom(x, m)

    @property
    def atoms(self) -> list[Atom]:
        return list(self)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.positions, other.positions) and np.array_equal(
            self.masses, other.masses
        )

    def __hash__(self):
        return hash((self.positions.tobytes(), self.masses.tobytes()))

    def __repr__(self) -> str:
        inner = ", ".join(f"({x!r}, {m!r})" for x, m in self)
        return f"{type(self).__name__}([{inner}])"


class DiscreteMeasure(_AtomArrays):
    """Non-negative measure ``sum_i m_i * delta_{x_i}`` in canonical form.

    Positions are strictly increasing and every mass is positive. The empty
    measure (zero measure) is allowed. Build instances with :func:`canonicalize`
    or :meth:`from_arrays`; the constructor trusts its input.
    """

    __slots__ = ()

    @classmethod
    def from_arrays(cls, positions, masses) -> "DiscreteMeasure":
        return _canonical_arrays(np.asarray(positions, float), np.asarray(masses, float))

    @classmethod
    def empty(cls) -> "DiscreteMeasure":
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def dirac(cls, position: float, mass: float = 1.0) -> "DiscreteMeasure":
        return canonicalize([(position, mass)])

    @property
    def total_mass(self) -> float:
        return total_mass(self)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        return _canonical_arrays(
            np.concatenate([self.positions, other.positions]),
            np.concatenate([self.masses, other.masses]),
        )

    def __mul__(self, factor: float) -> "DiscreteMeasure":
        return scale_mass(self, factor)

    __rmul__ = __mul__


class SignedAtomList(_AtomArrays):
    """Signed atoms of ``mu - nu`` on strictly increasing positions, no zero masses."""

    __slots__ = ()

    def __neg__(self) -> "SignedAtomList":
        return SignedAtomList(self.positions, -self.masses)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.positions)

    @classmethod
    def from_arrays(cls, positions, masses) -> "SignedAtomList":
        """Sort and merge arbitrary signed atoms (used by tests and oracles)."""
        x = np.asarray(positions, float)
        m = np.asarray(masses, float)
        _check_finite(x, m)
        x, m = _merge_sorted(*_sort(x, m))
        keep = m != 0.0
        return cls(x[keep], m[keep])


def _check_finite(x: np.ndarray, m: np.ndarray) -> None:
    if x.shape != m.shape or x.ndim != 1:
        raise MeasureError("positions and masses must be 1-D arrays of equal length")
    if not (np.isfinite(x).all() and np.isfinite(m).all()):
        raise NonFiniteInput("positions and masses must be finite")


def _sort(x: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if x.size > 1 and not (np.diff(x) >= 0).all():
        order = np.argsort(x, kind="stable")
        return x[order], m[order]
    return x, m


def _merge_sorted(x: np.ndarray, m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # exact equality only, no epsilon snapping
    if x.size < 2:
        return x, m
    starts = np.flatnonzero(np.concatenate(([True], x[1:] != x[:-1])))
    if starts.size == x.size:
        return x, m
    return x[starts], np.add.reduceat(m, starts)


def _canonical_arrays(x: np.ndarray, m: np.ndarray) -> DiscreteMeasure:
    _check_finite(x, m)
    if (m < 0).any():
        raise NegativeMass("masses must be non-negative")
    x, m = _merge_sorted(*_sort(x, m))
    keep = m > 0.0
    return DiscreteMeasure(x[keep], m[keep])


def canonicalize(raw: Iterable[tuple[float, float]]) -> DiscreteMeasure:
    """Sort ``(position, mass)`` pairs, merge equal positions and drop zero masses.

    Raises :class:`NonFiniteInput` for NaN/inf values and :class:`NegativeMass`
    for negative masses.
    """
    pairs = [(float(p), float(w)) for p, w in raw]
    if not pairs:
        return DiscreteMeasure.empty()
    arr = np.array(pairs, dtype=np.float64)
    return _canonical_arrays(arr[:, 0].copy(), arr[:, 1].copy())


def difference(mu: DiscreteMeasure, nu: DiscreteMeasure) -> SignedAtomList:
    """Signed atoms of ``mu - nu`` over the union of both supports."""
    x = np.concatenate([mu.positions, nu.positions])
    m = np.concatenate([mu.masses, -nu.masses])
    if len(mu) and len(nu):
        order = np.argsort(x, kind="stable")
        x, m = x[order], m[order]
    x, m = _merge_sorted(x, m)
    keep = m != 0.0
    return SignedAtomList(x[keep], m[keep])


def total_mass(mu: DiscreteMeasure) -> float:
    return float(mu.masses.sum()) if len(mu) else 0.0


def radon_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Total variation of ``mu - nu``: the cost of pure creation/annihilation."""
    delta = difference(mu, nu)
    return float(np.abs(delta.masses).sum()) if len(delta) else 0.0


def translate(mu: DiscreteMeasure, t: float) -> DiscreteMeasure:
    if not math.isfinite(t):
        raise NonFiniteInput("translation must be finite")
    # shifting can collide neighbours after rounding, so re-merge
    return _canonical_arrays(mu.positions + t, mu.masses.copy())


def scale_mass(mu: DiscreteMeasure, factor: float) -> DiscreteMeasure:
    if not math.isfinite(factor):
        raise NonFiniteInput("scale factor must be finite")
    if factor < 0:
        raise NegativeMass("scale factor must be non-negative")
    if factor == 0:
        return DiscreteMeasure.empty()
    return _canonical_arrays(mu.positions.copy(), mu.masses * factor)


# --- text format -----------------------------------------------------------


def parse_measure(text: str, source: str | None = None) -> DiscreteMeasure:
    """Parse ``<position> <mass>`` lines; ``#`` starts a comment."""
    positions: list[float] = []
    masses: list[float] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        fields = body.split()
        if len(fields) != 2:
            raise ParseError(f"expected '<position> <mass>', got {line.strip()!r}", lineno, source)
        try:
            x, m = float(fields[0]), float(fields[1])
        except ValueError:
            raise ParseError(f"not a number in {line.strip()!r}", lineno, source) from None
        if not (math.isfinite(x) and math.isfinite(m)):
            raise ParseError("non-finite value", lineno, source)
        if m < 0:
            raise ParseError(f"negative mass {m!r}", lineno, source)
        positions.append(x)
        masses.append(m)
    return _canonical_arrays(np.array(positions, float), np.array(masses, float))


def read_measure(path: str | Path) -> DiscreteMeasure:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), source=str(path)) from None
    return parse_measure(text, source=str(path))


def format_measure(mu: DiscreteMeasure | Sequence[Atom]) -> str:
    return "".join(f"{x:.17g} {m:.17g}\n" for x, m in mu)


def write_measure(mu: DiscreteMeasure, path: str | Path, header: str | None = None) -> None:
    text = format_measure(mu)
    if header:
        text = "".join(f"# {line}\n" for line in header.splitlines()) + text
    Path(path).write_text(text, encoding="utf-8")
