"""Concave piecewise-linear functions and the four envelope operations.

An envelope is described by its value at the left end of its domain and a
list of segment start positions with the slope on each segment; the last
segment runs to ``end``. On ``[-1, 1]`` this is the (leftValue, {(v, p)})
description used by the flat-distance recursion, with ``end`` playing the
role of the ``(1, -inf)`` sentinel.

The functions here are straightforward numpy versions. They are the
reference the compiled backends are checked against, not the fast path.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConcaveEnvelope",
    "EnvelopeInvariantError",
    "env_max_filter",
    "env_clip_to_unit",
    "env_add_linear",
    "env_supremum",
    "format_trace_line",
    "parse_trace_line",
]


class EnvelopeInvariantError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class ConcaveEnvelope:
    left_value: float
    positions: np.ndarray
    slopes: np.ndarray
    end: float = 1.0

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64)
        slo = np.array(self.slopes, dtype=np.float64)
        if pos.ndim != 1 or pos.shape != slo.shape or pos.size == 0:
            raise ValueError("need matching, non-empty position and slope arrays")
        pos.flags.writeable = False
        slo.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "slopes", slo)
        object.__setattr__(self, "left_value", float(self.left_value))
        object.__setattr__(self, "end", float(self.end))

    @classmethod
    def zero(cls) -> "ConcaveEnvelope":
        """The zero function on [-1, 1]."""
        return cls(0.0, [-1.0], [0.0], 1.0)

    @classmethod
    def constant(cls, c: float) -> "ConcaveEnvelope":
        return cls(c, [-1.0], [0.0], 1.0)

    @classmethod
    def from_points(cls, xs, ys) -> "ConcaveEnvelope":
        """Interpolating envelope through ``(xs[i], ys[i])``; xs strictly increasing."""
        xs = np.asarray(xs, float)
        ys = np.asarray(ys, float)
        slopes = np.diff(ys) / np.diff(xs)
        return cls(ys[0], xs[:-1], slopes, xs[-1])

    @property
    def start(self) -> float:
        return float(self.positions[0])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.append(self.positions, self.end))

    def __len__(self) -> int:
        return self.slopes.shape[0]

    def knot_values(self) -> np.ndarray:
        """Function values at each segment start followed by the value at ``end``."""
        return self.left_value + np.concatenate(([0.0], np.cumsum(self.widths * self.slopes)))

    def __call__(self, x):
        """Evaluate on ``[start, end]`` (linear extrapolation outside)."""
        x = np.asarray(x, dtype=np.float64)
        vals = self.knot_values()
        idx = np.clip(np.searchsorted(self.positions, x, side="right") - 1, 0, len(self) - 1)
        return vals[idx] + (x - self.positions[idx]) * self.slopes[idx]

    def check(self, max_segments: int | None = None, unit_domain: bool = True) -> None:
        """Raise :class:`EnvelopeInvariantError` on structural violations."""
        if not np.all(np.diff(self.positions) > 0):
            raise EnvelopeInvariantError(f"positions not strictly increasing: {self.positions}")
        if not np.all(np.diff(self.slopes) < 0):
            raise EnvelopeInvariantError(f"slopes not strictly decreasing: {self.slopes}")
        if self.positions[-1] >= self.end:
            raise EnvelopeInvariantError("last segment has no width")
        if unit_domain and (self.positions[0] != -1.0 or self.end != 1.0):
            raise EnvelopeInvariantError(f"domain is [{self.positions[0]}, {self.end}]")
        if max_segments is not None and len(self) > max_segments:
            raise EnvelopeInvariantError(f"{len(self)} segments, expected <= {max_segments}")

    def allclose(self, other: "ConcaveEnvelope", atol: float = 1e-9, points: int = 257) -> bool:
        """Functional comparison on a grid plus all knots of both envelopes."""
        lo = max(self.start, other.start)
        hi = min(self.end, other.end)
        xs = np.concatenate(
            (np.linspace(lo, hi, points), self.positions, other.positions)
        )
        xs = xs[(xs >= lo) & (xs <= hi)]
        return bool(np.allclose(self(xs), other(xs), rtol=0.0, atol=atol))


def env_max_filter(env: ConcaveEnvelope, d: float) -> ConcaveEnvelope:
    """``x -> sup_{|y-x|<=d} env(y)``, with the domain widened by ``d`` on both sides."""
    if d < 0:
        raise ValueError("window half-width must be non-negative")
    if d == 0:
        return env
    pos = env.positions.copy()
    slo = env.slopes
    j = int(np.searchsorted(-slo, 0.0, side="left"))  # first slope <= 0
    pos[:j] -= d
    if j < len(slo) and slo[j] == 0.0:
        pos[j] -= d
        pos[j + 1 :] += d
    else:
        peak = pos[j] if j < len(slo) else env.end
        pos = np.concatenate((pos[:j], [peak - d], pos[j:] + d))
        slo = np.concatenate((slo[:j], [0.0], slo[j:]))
    return ConcaveEnvelope(env.left_value, pos, slo, env.end + d)


def env_clip_to_unit(env: ConcaveEnvelope) -> ConcaveEnvelope:
    """Restrict to ``[-1, 1]``; the left value moves to ``x = -1``."""
    pos, slo = env.positions, env.slopes
    nxt = np.append(pos[1:], env.end)
    gone = pos < -1.0
    left = env.left_value + float(
        np.sum((np.minimum(nxt[gone], -1.0) - pos[gone]) * slo[gone])
    )
    keep = (nxt > -1.0) & (pos < 1.0)
    keep[0] |= not keep.any()
    new_pos = np.maximum(pos[keep], -1.0)
    return ConcaveEnvelope(left, new_pos, slo[keep], 1.0)


def env_add_linear(env: ConcaveEnvelope, a: float) -> ConcaveEnvelope:
    """Add ``a*x``: every slope grows by ``a``, the left value by ``a*start``."""
    return ConcaveEnvelope(
        env.left_value + a * env.start, env.positions, env.slopes + a, env.end
    )


def env_supremum(env: ConcaveEnvelope) -> float:
    up = env.slopes > 0
    return env.left_value + float(np.sum(env.widths[up] * env.slopes[up]))


# --- trace lines: "iter k: leftValue; (v,p) (v,p) ..." ----------------------

_PAIR = re.compile(r"\(([^,()]+),([^,()]+)\)")


def format_trace_line(k: int, env: ConcaveEnvelope) -> str:
    pairs = " ".join(f"({v:.17g},{p:.17g})" for v, p in zip(env.positions, env.slopes))
    return f"iter {k}: {env.left_value:.17g}; {pairs} ({env.end:.17g},-inf)"


def parse_trace_line(line: str) -> tuple[int, ConcaveEnvelope]:
    head, _, rest = line.partition(":")
    k = int(head.split()[1])
    left, _, body = rest.partition(";")
    pairs = [(float(v), float(p)) for v, p in _PAIR.findall(body)]
    end = pairs.pop()[0]
    return k, ConcaveEnvelope(float(left), [v for v, _ in pairs], [p for _, p in pairs], end)
