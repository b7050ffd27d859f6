"""Envelope backends for the flat-distance recursion.

Both backends store a concave piecewise-linear function on an interval
``[start, end]`` as a value at ``start`` plus a sequence of segments with
strictly decreasing slopes, and implement the same four primitives:

* ``max_filter(d)``   -- sup over a window of half-width ``d``: rising segments
  move left by ``d``, falling ones right by ``d`` and a zero-slope plateau of
  width ``2d`` appears at the peak; the domain grows to ``[start-d, end+d]``;
* ``clip_to_unit()``  -- restrict back to ``[-1, 1]``;
* ``add_linear(a)``   -- add ``a*x``;
* ``supremum()``      -- maximum over the domain.

``ArrayBackend`` keeps absolute breakpoint positions in flat arrays; every
primitive walks the whole array, so a full run costs O(n^2).

``TreeBackend`` keeps a treap keyed by *stored* slope with the segment width
as payload. The true slope is ``key + p_mod`` for a global register
``p_mod``, so ``add_linear`` is O(1). Positions are never stored: a segment
starts at ``start`` plus the widths of all segments with larger slope. The
plateau of ``max_filter`` is therefore just an ordered insert at true slope
0, and clipping pops from the two ends of the key order, giving O(n log n).

The state of each backend is a tuple of numpy arrays so that the primitives
are plain ``numba.njit`` functions shared by the compiled main loop and the
Python wrappers (the latter are used for tracing and step-wise tests).
"""
from __future__ import annotations

from typing import NamedTuple

import numba
import numpy as np

from .envelope import ConcaveEnvelope

__all__ = ["ArrayBackend", "TreeBackend", "BACKENDS", "get_backend"]

_njit = numba.njit(cache=True, nogil=True)

# --- array backend -----------------------------------------------------------

# reg: [left_value, end]; size: [number of segments]
_A_LEFT, _A_END = 0, 1


class ArrayState(NamedTuple):
    v: np.ndarray
    p: np.ndarray
    reg: np.ndarray
    size: np.ndarray


def _array_state(capacity: int) -> ArrayState:
    capacity = max(int(capacity), 2)
    st = ArrayState(np.empty(capacity), np.empty(capacity), np.zeros(2), np.zeros(1, np.int64))
    st.v[0] = -1.0
    st.p[0] = 0.0
    st.reg[_A_END] = 1.0
    st.size[0] = 1
    return st


@_njit
def _array_max_filter(v, p, reg, size, d):
    if d <= 0.0:
        return
    k = size[0]
    j = 0
    while j < k and p[j] > 0.0:
        v[j] -= d
        j += 1
    if j < k and p[j] == 0.0:
        # existing plateau absorbs the widening
        v[j] -= d
        for i in range(j + 1, k):
            v[i] += d
    else:
        peak = v[j] if j < k else reg[_A_END]
        for i in range(k, j, -1):
            v[i] = v[i - 1] + d
            p[i] = p[i - 1]
        v[j] = peak - d
        p[j] = 0.0
        size[0] = k + 1
    reg[_A_END] += d


@_njit
def _array_clip(v, p, reg, size):
    k = size[0]
    # drop segments lying entirely left of -1, integrating their slopes
    i = 0
    left = reg[_A_LEFT]
    while i + 1 < k and v[i + 1] <= -1.0:
        left += (v[i + 1] - v[i]) * p[i]
        i += 1
    if v[i] < -1.0:
        left += (-1.0 - v[i]) * p[i]
        v[i] = -1.0
    reg[_A_LEFT] = left
    if i > 0:
        for t in range(i, k):
            v[t - i] = v[t]
            p[t - i] = p[t]
        k -= i
    while k > 1 and v[k - 1] >= 1.0:
        k -= 1
    reg[_A_END] = 1.0
    size[0] = k


@_njit
def _array_add_linear(v, p, reg, size, a):
    k = size[0]
    reg[_A_LEFT] += a * v[0]
    for i in range(k):
        p[i] += a


@_njit
def _array_supremum(v, p, reg, size):
    k = size[0]
    best = reg[_A_LEFT]
    for i in range(k):
        if p[i] <= 0.0:
            break
        nxt = v[i + 1] if i + 1 < k else reg[_A_END]
        best += (nxt - v[i]) * p[i]
    return best


@_njit
def _array_run(x, a):
    n = x.shape[0]
    cap = n + 2
    v = np.empty(cap)
    p = np.empty(cap)
    reg = np.zeros(2)
    size = np.zeros(1, np.int64)
    v[0] = -1.0
    p[0] = 0.0
    reg[_A_END] = 1.0
    size[0] = 1
    for i in range(n):
        if i > 0:
            _array_max_filter(v, p, reg, size, x[i] - x[i - 1])
            _array_clip(v, p, reg, size)
        _array_add_linear(v, p, reg, size, a[i])
    return _array_supremum(v, p, reg, size)


# --- tree backend ------------------------------------------------------------

# reg: [left_value, start, end, p_mod]
_T_LEFT, _T_START, _T_END, _T_PMOD = 0, 1, 2, 3
# meta: [root, allocated nodes, live nodes, rng state]
_T_ROOT, _T_ALLOC, _T_COUNT, _T_RNG = 0, 1, 2, 3
_NIL = -1


class TreeState(NamedTuple):
    key: np.ndarray
    width: np.ndarray
    prio: np.ndarray
    left: np.ndarray
    right: np.ndarray
    reg: np.ndarray
    meta: np.ndarray


@_njit
def _tree_init(key, width, prio, left, right, reg, meta):
    reg[_T_LEFT] = 0.0
    reg[_T_START] = -1.0
    reg[_T_END] = 1.0
    reg[_T_PMOD] = 0.0
    meta[_T_ROOT] = _NIL
    meta[_T_ALLOC] = 0
    meta[_T_COUNT] = 0
    meta[_T_RNG] = 0x2545F4914F6CDD1D
    _tree_insert(key, width, prio, left, right, meta, 0.0, 2.0)


def _tree_state(capacity: int) -> TreeState:
    capacity = max(int(capacity), 2)
    st = TreeState(
        np.empty(capacity),
        np.empty(capacity),
        np.empty(capacity, np.int64),
        np.empty(capacity, np.int64),
        np.empty(capacity, np.int64),
        np.zeros(4),
        np.zeros(4, np.int64),
    )
    _tree_init(*st)
    return st


@_njit
def _next_prio(meta):
    # xorshift64, kept positive
    s = meta[_T_RNG]
    s ^= s << 13
    s ^= (s >> 7) & 0x01FFFFFFFFFFFFFF
    s ^= s << 17
    meta[_T_RNG] = s
    return s & 0x7FFFFFFFFFFFFFFF


@_njit
def _tree_split(key, left, right, node, k):
    """Split the subtree at ``node`` into keys < k and keys > k (k absent)."""
    lroot = _NIL
    rroot = _NIL
    ltail = _NIL
    rtail = _NIL
    while node != _NIL:
        if key[node] < k:
            if ltail == _NIL:
                lroot = node
            else:
                right[ltail] = node
            ltail = node
            node = right[node]
        else:
            if rtail == _NIL:
                rroot = node
            else:
                left[rtail] = node
            rtail = node
            node = left[node]
    if ltail != _NIL:
        right[ltail] = _NIL
    if rtail != _NIL:
        left[rtail] = _NIL
    return lroot, rroot


@_njit
def _tree_insert(key, width, prio, left, right, meta, k, w):
    """Add ``w`` to the width stored under key ``k``, creating the node if needed."""
    node = meta[_T_ROOT]
    while node != _NIL:
        kn = key[node]
        if kn == k:
            width[node] += w
            return
        node = left[node] if k < kn else right[node]

    new = meta[_T_ALLOC]
    meta[_T_ALLOC] = new + 1
    meta[_T_COUNT] += 1
    pr = _next_prio(meta)
    key[new] = k
    width[new] = w
    prio[new] = pr

    parent = _NIL
    node = meta[_T_ROOT]
    while node != _NIL and prio[node] > pr:
        parent = node
        node = left[node] if k < key[node] else right[node]
    lo, hi = _tree_split(key, left, right, node, k)
    left[new] = lo
    right[new] = hi
    if parent == _NIL:
        meta[_T_ROOT] = new
    elif k < key[parent]:
        left[parent] = new
    else:
        right[parent] = new


@_njit
def _tree_extreme(left, right, meta, largest):
    """Return (node, parent) of the max-key (``largest``) or min-key node."""
    parent = _NIL
    node = meta[_T_ROOT]
    if largest:
        while right[node] != _NIL:
            parent = node
            node = right[node]
    else:
        while left[node] != _NIL:
            parent = node
            node = left[node]
    return node, parent


@_njit
def _tree_unlink(left, right, meta, node, parent, largest):
    child = left[node] if largest else right[node]
    if parent == _NIL:
        meta[_T_ROOT] = child
    elif largest:
        right[parent] = child
    else:
        left[parent] = child
    meta[_T_COUNT] -= 1


@_njit
def _tree_max_filter(key, width, prio, left, right, reg, meta, d):
    if d <= 0.0:
        return
    _tree_insert(key, width, prio, left, right, meta, -reg[_T_PMOD], 2.0 * d)
    reg[_T_START] -= d
    reg[_T_END] += d


@_njit
def _tree_clip(key, width, prio, left, right, reg, meta):
    pmod = reg[_T_PMOD]
    # left end: the largest slopes come first
    cut = -1.0 - reg[_T_START]
    acc = reg[_T_LEFT]
    while cut > 0.0 and meta[_T_COUNT] > 1:
        node, parent = _tree_extreme(left, right, meta, True)
        w = width[node]
        if w <= cut:
            acc += w * (key[node] + pmod)
            cut -= w
            _tree_unlink(left, right, meta, node, parent, True)
        else:
            acc += cut * (key[node] + pmod)
            width[node] = w - cut
            cut = 0.0
    if cut > 0.0:
        node, parent = _tree_extreme(left, right, meta, True)
        acc += cut * (key[node] + pmod)
        width[node] -= cut
    reg[_T_LEFT] = acc
    reg[_T_START] = -1.0
    # right end sits at 1 + d, so pop the smallest slopes
    cut = reg[_T_END] - 1.0
    while cut > 0.0 and meta[_T_COUNT] > 1:
        node, parent = _tree_extreme(left, right, meta, False)
        w = width[node]
        if w <= cut:
            cut -= w
            _tree_unlink(left, right, meta, node, parent, False)
        else:
            width[node] = w - cut
            cut = 0.0
    if cut > 0.0:
        node, parent = _tree_extreme(left, right, meta, False)
        width[node] -= cut
    reg[_T_END] = 1.0


@_njit
def _tree_add_linear(reg, a):
    reg[_T_LEFT] += a * reg[_T_START]
    reg[_T_PMOD] += a


@_njit
def _tree_inorder(key, width, left, right, meta, out_key, out_width):
    """Fill segments in position order (descending key); return their count."""
    stack = np.empty(meta[_T_COUNT] + 1, np.int64)
    top = 0
    node = meta[_T_ROOT]
    count = 0
    while top > 0 or node != _NIL:
        while node != _NIL:
            stack[top] = node
            top += 1
            node = right[node]
        top -= 1
        node = stack[top]
        out_key[count] = key[node]
        out_width[count] = width[node]
        count += 1
        node = left[node]
    return count


@_njit
def _tree_supremum(key, width, prio, left, right, reg, meta):
    pmod = reg[_T_PMOD]
    best = reg[_T_LEFT]
    # walk keys above -pmod (positive true slope) from the largest downwards
    stack = np.empty(meta[_T_COUNT] + 1, np.int64)
    top = 0
    node = meta[_T_ROOT]
    while top > 0 or node != _NIL:
        while node != _NIL:
            stack[top] = node
            top += 1
            node = right[node]
        top -= 1
        node = stack[top]
        slope = key[node] + pmod
        if slope <= 0.0:
            break
        best += width[node] * slope
        node = left[node]
    return best


@_njit
def _tree_run(x, a):
    n = x.shape[0]
    cap = n + 2
    key = np.empty(cap)
    width = np.empty(cap)
    prio = np.empty(cap, np.int64)
    left = np.empty(cap, np.int64)
    right = np.empty(cap, np.int64)
    reg = np.zeros(4)
    meta = np.zeros(4, np.int64)
    _tree_init(key, width, prio, left, right, reg, meta)
    for i in range(n):
        if i > 0:
            _tree_max_filter(key, width, prio, left, right, reg, meta, x[i] - x[i - 1])
            _tree_clip(key, width, prio, left, right, reg, meta)
        _tree_add_linear(reg, a[i])
    return _tree_supremum(key, width, prio, left, right, reg, meta)


# --- Python-facing wrappers --------------------------------------------------


class ArrayBackend:
    """Sorted-array envelope, O(size) per primitive."""

    name = "array"

    def __init__(self, capacity: int = 16):
        self._st = _array_state(capacity)

    @staticmethod
    def run(x: np.ndarray, a: np.ndarray) -> float:
        """Full recursion over sorted positions ``x`` with signed masses ``a``."""
        return float(_array_run(np.ascontiguousarray(x, float), np.ascontiguousarray(a, float)))

    def __len__(self) -> int:
        return int(self._st.size[0])

    def _reserve(self, extra: int) -> None:
        st = self._st
        need = int(st.size[0]) + extra
        if need <= st.v.shape[0]:
            return
        cap = max(need, 2 * st.v.shape[0])
        v, p = np.empty(cap), np.empty(cap)
        v[: st.v.shape[0]] = st.v
        p[: st.p.shape[0]] = st.p
        self._st = ArrayState(v, p, st.reg, st.size)

    def max_filter(self, d: float) -> None:
        self._reserve(1)
        _array_max_filter(*self._st, float(d))

    def clip_to_unit(self) -> None:
        _array_clip(*self._st)

    def add_linear(self, a: float) -> None:
        _array_add_linear(*self._st, float(a))

    def supremum(self) -> float:
        return float(_array_supremum(*self._st))

    def snapshot(self) -> ConcaveEnvelope:
        st = self._st
        k = int(st.size[0])
        return ConcaveEnvelope(
            float(st.reg[_A_LEFT]), st.v[:k].copy(), st.p[:k].copy(), float(st.reg[_A_END])
        )

    @classmethod
    def from_envelope(cls, env: ConcaveEnvelope) -> "ArrayBackend":
        k = len(env.slopes)
        b = cls(k + 2)
        st = b._st
        st.v[:k] = env.positions
        st.p[:k] = env.slopes
        st.reg[_A_LEFT] = env.left_value
        st.reg[_A_END] = env.end
        st.size[0] = k
        return b


class TreeBackend:
    """Treap keyed by slope with lazy slope offset, O(log size) per primitive."""

    name = "tree"

    def __init__(self, capacity: int = 16):
        self._st = _tree_state(capacity)

    @staticmethod
    def run(x: np.ndarray, a: np.ndarray) -> float:
        """Full recursion over sorted positions ``x`` with signed masses ``a``."""
        return float(_tree_run(np.ascontiguousarray(x, float), np.ascontiguousarray(a, float)))

    def __len__(self) -> int:
        return int(self._st.meta[_T_COUNT])

    @property
    def p_modifier(self) -> float:
        return float(self._st.reg[_T_PMOD])

    def _reserve(self, extra: int) -> None:
        st = self._st
        need = int(st.meta[_T_ALLOC]) + extra
        cap = st.key.shape[0]
        if need <= cap:
            return
        new_cap = max(need, 2 * cap)
        grown = []
        for arr in st[:5]:
            g = np.empty(new_cap, arr.dtype)
            g[:cap] = arr
            grown.append(g)
        self._st = TreeState(*grown, st.reg, st.meta)

    def max_filter(self, d: float) -> None:
        self._reserve(1)
        _tree_max_filter(*self._st, float(d))

    def clip_to_unit(self) -> None:
        _tree_clip(*self._st)

    def add_linear(self, a: float) -> None:
        _tree_add_linear(self._st.reg, float(a))

    def supremum(self) -> float:
        return float(_tree_supremum(*self._st))

    def snapshot(self) -> ConcaveEnvelope:
        st = self._st
        count = int(st.meta[_T_COUNT])
        keys = np.empty(count)
        widths = np.empty(count)
        _tree_inorder(st.key, st.width, st.left, st.right, st.meta, keys, widths)
        start = float(st.reg[_T_START])
        positions = start + np.concatenate(([0.0], np.cumsum(widths[:-1])))
        return ConcaveEnvelope(
            float(st.reg[_T_LEFT]), positions, keys + st.reg[_T_PMOD], float(st.reg[_T_END])
        )

    @classmethod
    def from_envelope(cls, env: ConcaveEnvelope) -> "TreeBackend":
        k = len(env.slopes)
        b = cls(k + 2)
        st = b._st
        st.meta[_T_ROOT] = _NIL
        st.meta[_T_ALLOC] = 0
        st.meta[_T_COUNT] = 0
        for p, w in zip(env.slopes.tolist(), env.widths.tolist()):
            _tree_insert(st.key, st.width, st.prio, st.left, st.right, st.meta, p, w)
        st.reg[_T_LEFT] = env.left_value
        st.reg[_T_START] = env.start
        st.reg[_T_END] = env.end
        st.reg[_T_PMOD] = 0.0
        return b


BACKENDS = {"array": ArrayBackend, "tree": TreeBackend}


def get_backend(name: str):
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(BACKENDS)}") from None
