"""Erasure decoding of balanced LDPC codewords.

The received word is a prefix-inverted codeword with erasures, and the
inversion index i is unknown.  The decoder peels erasures while maintaining
an inversion set I of indices still consistent with every fully observed
check: a check whose neighbors sit at positions p1 < p2 < ... partitions
{0..n} into alternating runs, and the check's observed parity says which
alternation class i must lie in.  A check with one unknown neighbor can fill
it once I is confined to a single class.  If peeling stalls, the residual I
is enumerated (up to a budget) with a fresh known-i peel per candidate, and
candidates must satisfy parity, balance, and index minimality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ERASURE
from .intervals import IntervalSet
from .ldpc import LdpcCode, _balancing_index_arr, syndrome
from .words import BitWord

UNIQUE = "unique"
AMBIGUOUS = "ambiguous"
FAILURE = "failure"


def check_interval_sets(positions, values, n: int) -> IntervalSet:
    """Inversion indices consistent with one fully observed check.

    positions are the check's variable indices (0-based, ascending); the
    boundary between "flipped" and "not flipped" for position p is at index
    p + 1.  Returns the alternation class matching the observed parity, a
    subset of {0, .., n}.
    """
    positions = [int(p) for p in positions]
    if sorted(positions) != positions:
        raise ValueError("positions must be ascending")
    values = [int(v) for v in values]
    if any(v not in (0, 1) for v in values):
        raise ValueError("all neighbor values must be known bits")
    parity = 0
    for v in values:
        parity ^= v
    bounds = [0] + [p + 1 for p in positions] + [n + 1]
    pairs = [(bounds[t], bounds[t + 1])
             for t in range(len(bounds) - 1) if t % 2 == parity]
    return IntervalSet.from_pairs(pairs)


def _prefix_flip(y: np.ndarray, i: int) -> np.ndarray:
    out = y.copy()
    head = out[:i]
    known = head != ERASURE
    head[known] ^= 1
    return out


def genie_peel(code: LdpcCode, y: np.ndarray, i: int) -> np.ndarray | None:
    """Standard peeling with the inversion index known; returns the codeword
    bits or None if a stopping set remains."""
    z = _prefix_flip(np.asarray(y, dtype=np.int8), i)
    unknown_per_check = np.array([(z[nbrs] == ERASURE).sum() for nbrs in code.check_nbrs])
    progress = True
    while progress and (z == ERASURE).any():
        progress = False
        for c in np.nonzero(unknown_per_check == 1)[0]:
            if unknown_per_check[c] != 1:
                continue  # an earlier fill in this sweep resolved it
            nbrs = code.check_nbrs[c]
            vals = z[nbrs]
            missing = nbrs[vals == ERASURE][0]
            z[missing] = np.sum(vals[vals != ERASURE]) % 2
            unknown_per_check[code.var_nbrs[missing]] -= 1
            progress = True
    if (z == ERASURE).any():
        return None
    return z.astype(np.uint8)


@dataclass(frozen=True)
class BecResult:
    status: str
    z: BitWord | None
    i: int | None
    candidates: tuple[tuple[BitWord, int], ...]
    residual_set_size: int      # |I| when propagation stopped
    erasures_left: int          # unfilled positions when propagation stopped
    budget_exceeded: bool


def _feasible_from_word(code: LdpcCode, x: np.ndarray, i: int) -> tuple[np.ndarray, int] | None:
    """Feasibility of index i once every position of x is known."""
    if 2 * int(x.sum()) != x.size:
        return None
    z = x.copy()
    z[:i] ^= 1
    if np.any(syndrome(code, z)):
        return None
    if _balancing_index_arr(z) != i:
        return None
    return z, i


def _feasible_from_peel(code: LdpcCode, y: np.ndarray, i: int) -> tuple[np.ndarray, int] | None:
    """Feasibility of index i via a fresh known-i peel of the raw word."""
    z = genie_peel(code, y, i)
    if z is None:
        return None
    x = z.copy()
    x[:i] ^= 1
    if 2 * int(x.sum()) != x.size:
        return None
    if np.any(syndrome(code, z)):
        return None
    if _balancing_index_arr(z) != i:
        return None
    return z, i


def bec_decode(code: LdpcCode, y, budget: int = 64) -> BecResult:
    """Decode an erased prefix-inverted codeword without knowing the index.

    Runs the joint peeling / interval-narrowing iteration; on termination the
    remaining candidates in I are tested for feasibility (peel completion,
    balance, and index minimality).  Returns UNIQUE only when enumeration was
    complete and exactly one codeword survives.
    """
    y = np.asarray(y, dtype=np.int8)
    if y.size != code.n:
        raise ValueError(f"received word length {y.size} != n = {code.n}")
    n = code.n
    x = y.copy()
    inv = IntervalSet.full(n)
    active = np.ones(code.r, dtype=bool)
    class_cache: dict[int, tuple[IntervalSet, IntervalSet]] = {}

    def classes(c: int) -> tuple[IntervalSet, IntervalSet]:
        if c not in class_cache:
            nbrs = code.check_nbrs[c]
            s0 = check_interval_sets(nbrs, np.zeros(code.b, dtype=np.int8), n)
            s1 = check_interval_sets(nbrs, np.concatenate(([1], np.zeros(code.b - 1, dtype=np.int8))), n)
            class_cache[c] = (s0, s1)
        return class_cache[c]

    progress = True
    while progress:
        progress = False
        # Fully observed checks pin down the alternation class of i.
        for c in np.nonzero(active)[0]:
            vals = x[code.check_nbrs[c]]
            if np.all(vals != ERASURE):
                inv = inv.intersect(check_interval_sets(code.check_nbrs[c], vals, n))
                active[c] = False
                progress = True
        # Checks missing one neighbor can fill it once the class is certain.
        for c in np.nonzero(active)[0]:
            nbrs = code.check_nbrs[c]
            vals = x[nbrs]
            unknown = nbrs[vals == ERASURE]
            if unknown.size != 1:
                continue
            s0, s1 = classes(int(c))
            known_xor = int(np.sum(vals[vals != ERASURE]) % 2)
            if inv.issubset(s0):
                fill = known_xor
            elif inv.issubset(s1):
                fill = known_xor ^ 1
            else:
                continue
            x[unknown[0]] = fill
            active[c] = False
            progress = True

    residual = inv.size
    erasures_left = int((x == ERASURE).sum())

    if inv.size == 0:
        return BecResult(status=FAILURE, z=None, i=None, candidates=(),
                         residual_set_size=residual, erasures_left=erasures_left,
                         budget_exceeded=False)
    if inv.size > budget:
        return BecResult(status=AMBIGUOUS, z=None, i=None, candidates=(),
                         residual_set_size=residual, erasures_left=erasures_left,
                         budget_exceeded=True)

    feasible: list[tuple[np.ndarray, int]] = []
    for i in inv.values():
        if i > n - 1:
            continue  # encoders only produce i < n
        if erasures_left == 0:
            hit = _feasible_from_word(code, x.astype(np.uint8), i)
        else:
            hit = _feasible_from_peel(code, y, i)
        if hit is not None:
            feasible.append(hit)

    if not feasible:
        return BecResult(status=FAILURE, z=None, i=None, candidates=(),
                         residual_set_size=residual, erasures_left=erasures_left,
                         budget_exceeded=False)
    candidates = tuple((BitWord.from_array(z), i) for z, i in feasible)
    distinct = {str(cw) for cw, _ in candidates}
    if len(distinct) == 1:
        z, i = feasible[0]
        return BecResult(status=UNIQUE, z=BitWord.from_array(z), i=i,
                         candidates=candidates, residual_set_size=residual,
                         erasures_left=erasures_left, budget_exceeded=False)
    return BecResult(status=AMBIGUOUS, z=None, i=None, candidates=candidates,
                     residual_set_size=residual, erasures_left=erasures_left,
                     budget_exceeded=False)
