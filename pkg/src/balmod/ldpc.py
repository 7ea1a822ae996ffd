"""Regular LDPC codes and balanced-codeword encoding/decoding.

Codes come from the regular (n, a, b) ensemble: the parity-check matrix is a
stack of a submatrices, each a random column permutation of a base matrix
with one 1 per column and b per row.  Encoding balances each codeword by a
minimal prefix inversion whose index i is NOT stored; decoders recover it
from the code's redundancy.

For symmetric channels, candidate inversion indices are ranked by a
shift score: the sum over checks of the product of tanh(m/2) over the
check's incoming variable messages after a fixed small number of
message-passing rounds.  At depth 1 the messages are the channel LLRs and
the score reduces exactly to (number of checks) - 2 * (unsatisfied checks).
Scores for all n prefix shifts are maintained incrementally: flipping one
more variable only re-propagates messages inside its depth-neighborhood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import make_rng
from .words import BalancedWord, BitWord

LLR_CLIP = 30.0
_ATANH_LIMIT = 1.0 - 1e-15


# ---------------------------------------------------------------------------
# GF(2) elimination


def gf2_rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); returns (rref, pivot columns)."""
    red = (np.asarray(m, dtype=np.uint8) % 2).copy()
    rows, cols = red.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(red[row:, col])[0]
        if hits.size == 0:
            continue
        pivot = row + int(hits[0])
        if pivot != row:
            red[[row, pivot]] = red[[pivot, row]]
        others = np.nonzero(red[:, col])[0]
        others = others[others != row]
        red[others] ^= red[row]
        pivots.append(col)
        row += 1
    return red, pivots


def _nullspace_basis(rref: np.ndarray, pivots: list[int], n: int) -> tuple[np.ndarray, list[int]]:
    """Basis of the null space, one column per free column of the rref."""
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((n, len(free)), dtype=np.uint8)
    for idx, f in enumerate(free):
        basis[f, idx] = 1
        for t, pc in enumerate(pivots):
            basis[pc, idx] = rref[t, f]
    return basis, free


# ---------------------------------------------------------------------------
# Code construction


@dataclass(frozen=True)
class LdpcCode:
    """Sparse parity-check matrix with its systematic generator and graph maps.

    k is the nominal dimension n - r; the Gallager construction always leaves
    at least a - 1 dependent rows, so the null space has a few more free
    columns than k and the extras are pinned to zero by the generator.
    Codewords stay in the original column order.
    """

    n: int
    k: int
    a: int
    b: int
    seed: int
    seed_used: int
    rank: int
    H: np.ndarray                # (r, n) uint8
    G: np.ndarray                # (n, k) uint8, H @ G = 0
    message_positions: np.ndarray  # (k,) columns where message bits sit verbatim
    check_nbrs: np.ndarray       # (r, b) variable indices per check, ascending
    var_nbrs: np.ndarray         # (n, a) check indices per variable, ascending
    edge_var: np.ndarray         # (r*b,) variable of each check-major edge
    var_edge_ids: np.ndarray     # (n, a) check-major edge ids per variable

    @property
    def r(self) -> int:
        return self.H.shape[0]


def _assemble(H: np.ndarray, a: int, b: int, seed: int, seed_used: int) -> LdpcCode:
    r, n = H.shape
    if n * a != r * b:
        raise ValueError("shape violates n * a = r * b")
    col_w = H.sum(axis=0)
    row_w = H.sum(axis=1)
    if not (np.all(col_w == a) and np.all(row_w == b)):
        raise ValueError("matrix is not (a, b)-regular")
    k = n - r
    if k <= 0:
        raise ValueError("code has no message bits: need a < b")

    rref, pivots = gf2_rref(H)
    basis, free = _nullspace_basis(rref, pivots, n)
    if len(free) < k:
        raise ValueError("rank too high for nominal dimension")
    G = basis[:, :k].copy()
    message_positions = np.array(free[:k], dtype=np.int64)

    check_nbrs = np.empty((r, b), dtype=np.int64)
    for c in range(r):
        check_nbrs[c] = np.nonzero(H[c])[0]
    var_nbrs = np.empty((n, a), dtype=np.int64)
    for v in range(n):
        var_nbrs[v] = np.nonzero(H[:, v])[0]
    edge_var = check_nbrs.reshape(-1)
    var_edge_ids = np.argsort(edge_var, kind="stable").reshape(n, a)

    return LdpcCode(n=n, k=k, a=a, b=b, seed=seed, seed_used=seed_used,
                    rank=len(pivots), H=H, G=G,
                    message_positions=message_positions,
                    check_nbrs=check_nbrs, var_nbrs=var_nbrs,
                    edge_var=edge_var, var_edge_ids=var_edge_ids)


def build_gallager(n: int, a: int, b: int, seed: int, max_retries: int = 32) -> LdpcCode:
    """Draw an (n, a, b) code: a stacked random column permutations of the
    base matrix.  The construction forces at least a - 1 dependent rows;
    draws with any further rank deficiency are rejected and redrawn with the
    next seed (bounded retries)."""
    if a < 2:
        raise ValueError("column weight a must be at least 2")
    if b < 2 or n % b:
        raise ValueError("n must be a positive multiple of the row weight b")
    rows_per = n // b
    base = np.zeros((rows_per, n), dtype=np.uint8)
    for i in range(rows_per):
        base[i, i * b:(i + 1) * b] = 1
    for attempt in range(max_retries):
        seed_used = seed + attempt
        rng = make_rng(seed_used)
        parts = [base] + [base[:, rng.permutation(n)] for _ in range(a - 1)]
        H = np.vstack(parts)
        code = _assemble(H, a, b, seed, seed_used)
        if (a * rows_per) - code.rank == a - 1:
            return code
    raise RuntimeError(
        f"no ({n},{a},{b}) draw with minimal rank deficit in {max_retries} tries from seed {seed}")


def syndrome(code: LdpcCode, bits) -> np.ndarray:
    word = np.asarray(bits, dtype=np.uint8)
    return code.H @ word % 2


def encode(code: LdpcCode, u) -> BitWord:
    """Codeword G @ u with message bits verbatim at message_positions."""
    msg = np.asarray([int(x) for x in u], dtype=np.uint8)
    if msg.size != code.k:
        raise ValueError(f"message length {msg.size} != k = {code.k}")
    z = code.G @ msg % 2
    return BitWord.from_array(z)


def _balancing_index_arr(bits: np.ndarray) -> int:
    """Minimal i with weight(first i bits inverted) == n / 2 (array fast path)."""
    n = bits.size
    target = n // 2
    walk = int(bits.sum()) + np.concatenate(([0], np.cumsum(1 - 2 * bits.astype(np.int64))))
    hits = np.nonzero(walk[:n] == target)[0]
    if hits.size == 0:
        raise ValueError("no balancing index; is the length even?")
    return int(hits[0])


def balanced_encode(code: LdpcCode, u) -> tuple[BalancedWord, int]:
    """Encode then invert the minimal prefix that balances the codeword.

    The index i is returned for instrumentation but is not part of the
    stored word.
    """
    if code.n % 2:
        raise ValueError("balancing needs even block length")
    z = encode(code, u).to_array()
    i = _balancing_index_arr(z)
    x = z.copy()
    x[:i] ^= 1
    return BalancedWord.from_array(x), i


# ---------------------------------------------------------------------------
# Belief propagation


@dataclass(frozen=True)
class BpResult:
    word: BitWord
    satisfied: bool
    iterations: int


def _loo_prod(t: np.ndarray) -> np.ndarray:
    """Leave-one-out products along the last axis via prefix/suffix scans."""
    pre = np.empty_like(t)
    pre[..., 0] = 1.0
    np.cumprod(t[..., :-1], axis=-1, out=pre[..., 1:])
    suf = np.empty_like(t)
    suf[..., -1] = 1.0
    suf[..., :-1] = np.cumprod(t[..., :0:-1], axis=-1)[..., ::-1]
    return pre * suf


def bsc_llr(y, p: float) -> np.ndarray:
    """Per-bit LLR log((1-p)/p) with sign set by the observation."""
    if not 0.0 < p < 0.5:
        raise ValueError("crossover probability must be in (0, 0.5)")
    mag = np.log((1.0 - p) / p)
    bits = np.asarray([int(v) for v in y], dtype=np.uint8)
    return np.where(bits == 0, mag, -mag)


def bp_decode(code: LdpcCode, llr, max_iter: int = 50) -> BpResult:
    """Flooding sum-product decoding; positive LLR favors bit 0.

    Stops once the hard decision satisfies every check, else after max_iter
    iterations with satisfied = False.  Messages are clipped to +-30 to keep
    tanh / arctanh stable.
    """
    L = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    if L.size != code.n:
        raise ValueError(f"llr length {L.size} != n = {code.n}")
    r, b = code.r, code.b
    vei = code.var_edge_ids
    m_vc = L[code.edge_var].copy()          # flat check-major edges
    hard = (L < 0).astype(np.uint8)
    for it in range(1, max_iter + 1):
        t = np.tanh(0.5 * m_vc.reshape(r, b))
        m_cv = 2.0 * np.arctanh(np.clip(_loo_prod(t), -_ATANH_LIMIT, _ATANH_LIMIT))
        inc = m_cv.reshape(-1)[vei]          # (n, a) check messages per variable
        post = L + inc.sum(axis=1)
        m_vc[vei] = np.clip(post[:, None] - inc, -LLR_CLIP, LLR_CLIP)
        hard = (post < 0).astype(np.uint8)
        if not np.any(syndrome(code, hard)):
            return BpResult(word=BitWord.from_array(hard), satisfied=True, iterations=it)
    return BpResult(word=BitWord.from_array(hard), satisfied=False, iterations=max_iter)


# ---------------------------------------------------------------------------
# Shift scores


class _ScoreState:
    """Message arrays for the shift score: m[l] are variable-to-check messages
    of round l, rc[l] the check replies computed from them, prod the per-check
    products entering the score."""

    __slots__ = ("mv", "m", "rc", "prod")

    def __init__(self, code: LdpcCode, mv: np.ndarray, depth: int):
        edges = code.r * code.b
        self.mv = mv
        self.m = {l: np.empty(edges) for l in range(1, depth + 1)}
        self.rc = {l: np.empty(edges) for l in range(1, depth)}
        self.prod = np.empty(code.r)


def _var_kernel(code: LdpcCode, st: _ScoreState, l: int, v: int) -> None:
    ids = code.var_edge_ids[v]
    if l == 1:
        st.m[1][ids] = st.mv[v]
        return
    inc = st.rc[l - 1][ids]
    csum = np.cumsum(inc)
    pre = np.concatenate(([0.0], csum[:-1]))
    suf = csum[-1] - csum
    st.m[l][ids] = np.clip(st.mv[v] + pre + suf, -LLR_CLIP, LLR_CLIP)


def _check_kernel(code: LdpcCode, st: _ScoreState, l: int, c: int) -> None:
    sl = slice(c * code.b, (c + 1) * code.b)
    t = np.tanh(0.5 * st.m[l][sl])
    st.rc[l][sl] = 2.0 * np.arctanh(np.clip(_loo_prod(t), -_ATANH_LIMIT, _ATANH_LIMIT))


def _prod_kernel(code: LdpcCode, st: _ScoreState, depth: int, c: int) -> None:
    sl = slice(c * code.b, (c + 1) * code.b)
    m = st.m[depth][sl]
    if depth == 1:
        st.prod[c] = np.prod(np.where(m >= 0, 1.0, -1.0))
    else:
        st.prod[c] = np.prod(np.tanh(0.5 * m))


def _score_full(code: LdpcCode, mv: np.ndarray, depth: int) -> _ScoreState:
    st = _ScoreState(code, mv, depth)
    for v in range(code.n):
        _var_kernel(code, st, 1, v)
    for l in range(1, depth):
        for c in range(code.r):
            _check_kernel(code, st, l, c)
        for v in range(code.n):
            _var_kernel(code, st, l + 1, v)
    for c in range(code.r):
        _prod_kernel(code, st, depth, c)
    return st


def _validate_depth(depth: int) -> None:
    if not 1 <= depth <= 3:
        raise ValueError("score depth must be 1, 2, or 3 (cost grows exponentially)")


def lambda_scores_scratch(code: LdpcCode, llr, depth: int) -> np.ndarray:
    """Reference scorer: recompute every prefix shift from scratch."""
    _validate_depth(depth)
    base = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    out = np.empty(code.n)
    for j in range(code.n):
        mv = base.copy()
        mv[:j] = -mv[:j]
        out[j] = float(np.sum(_score_full(code, mv, depth).prod))
    return out


def lambda_scores_incremental(code: LdpcCode, llr, depth: int) -> np.ndarray:
    """Scores for all n prefix shifts, updating one flipped variable at a time.

    Only messages within the flipped variable's depth-neighborhood are
    recomputed, with the same per-node kernels as the from-scratch path, so
    results are identical bit for bit.
    """
    _validate_depth(depth)
    mv = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP).copy()
    st = _score_full(code, mv, depth)
    out = np.empty(code.n)
    out[0] = float(np.sum(st.prod))
    for j in range(1, code.n):
        v0 = j - 1
        st.mv[v0] = -st.mv[v0]
        _var_kernel(code, st, 1, v0)
        affected = np.array([v0])
        checks = code.var_nbrs[v0]
        for l in range(1, depth):
            for c in checks:
                _check_kernel(code, st, l, int(c))
            affected = np.unique(np.concatenate(
                [affected, code.check_nbrs[checks].ravel()]))
            for v in affected:
                _var_kernel(code, st, l + 1, int(v))
            checks = np.unique(code.var_nbrs[affected].ravel())
        for c in checks:
            _prod_kernel(code, st, depth, int(c))
        out[j] = float(np.sum(st.prod))
    return out


def lambda_scores(code: LdpcCode, llr, depth: int) -> np.ndarray:
    """Production scorer: vectorized over all shifts at once.

    Same score as the incremental/scratch pair (used by tests as oracles);
    this path trades their per-node exactness discipline for speed.
    """
    _validate_depth(depth)
    base = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLIP, LLR_CLIP)
    n, r, b, a = code.n, code.r, code.b, code.a
    flip = np.arange(n)[None, :] < np.arange(n)[:, None]   # (shift, variable)
    shifted = np.where(flip, -base[None, :], base[None, :])
    if depth == 1:
        neg = shifted[:, code.edge_var] < 0
        parity = neg.reshape(n, r, b).sum(axis=2) % 2
        return (r - 2 * parity.sum(axis=1)).astype(np.float64)
    m = shifted[:, code.edge_var].reshape(n, r, b)
    vef = code.var_edge_ids.reshape(-1)
    for _ in range(1, depth):
        t = np.tanh(0.5 * m)
        rc = 2.0 * np.arctanh(np.clip(_loo_prod(t), -_ATANH_LIMIT, _ATANH_LIMIT))
        inc = rc.reshape(n, r * b)[:, vef].reshape(n, n, a)
        mv = np.clip(shifted[:, :, None] + inc.sum(axis=2, keepdims=True) - inc,
                     -LLR_CLIP, LLR_CLIP)
        m = np.empty((n, r * b))
        m[:, vef] = mv.reshape(n, n * a)
        m = m.reshape(n, r, b)
    return np.prod(np.tanh(0.5 * m), axis=2).sum(axis=1)


def candidate_inversions(scores, c: int) -> list[int]:
    """Up to c local maxima of the shift scores, best first.

    j is a local maximum when strictly above its left neighbor and at least
    its right neighbor; boundary shifts use only their existing neighbor.
    Ties rank the smaller shift first.
    """
    if c < 1:
        raise ValueError("need at least one candidate")
    lam = np.asarray(scores, dtype=np.float64)
    n = lam.size
    maxima = [j for j in range(n)
              if (j == 0 or lam[j] > lam[j - 1])
              and (j == n - 1 or lam[j] >= lam[j + 1])]
    maxima.sort(key=lambda j: (-lam[j], j))
    return maxima[:c]


# ---------------------------------------------------------------------------
# Balanced decoding for symmetric channels


@dataclass(frozen=True)
class BalancedDecodeResult:
    ok: bool
    u: BitWord | None
    z: BitWord | None
    i: int | None
    candidates: tuple[int, ...]
    score: float | None


def balanced_decode(code: LdpcCode, llr, depth: int = 2, num_candidates: int | None = 4,
                    max_iter: int = 50) -> BalancedDecodeResult:
    """Decode a balanced codeword observation given per-bit LLRs.

    Candidate inversion indices come from the shift scores (or all n shifts
    when num_candidates is None).  Each candidate j flips the sign of the
    first j LLRs and runs BP.  A parity-satisfying output z is re-paired with
    its own minimal balancing index fbi(z) rather than the shift that found
    it: a channel error at the prefix boundary makes the adjacent shift the
    better BP input, yet both decode to the same codeword.  Each surviving
    (z, fbi(z)) pair is scored by the correlation of its balanced form with
    the raw LLRs, which orders the pairs exactly by observation likelihood on
    a symmetric channel; the best pair wins.
    """
    base = np.asarray(llr, dtype=np.float64)
    if num_candidates is None:
        cands = list(range(code.n))
    else:
        cands = candidate_inversions(lambda_scores(code, base, depth), num_candidates)
    clipped = np.clip(base, -LLR_CLIP, LLR_CLIP)
    best_score = None
    best = None
    seen: set[bytes] = set()
    for j in cands:
        lj = base.copy()
        lj[:j] = -lj[:j]
        res = bp_decode(code, lj, max_iter=max_iter)
        if not res.satisfied:
            continue
        z = res.word.to_array()
        key = z.tobytes()
        if key in seen:
            continue
        seen.add(key)
        i_min = _balancing_index_arr(z)
        x_hat = z.copy()
        x_hat[:i_min] ^= 1
        corr = float(np.sum((1.0 - 2.0 * x_hat.astype(np.float64)) * clipped))
        if best_score is None or corr > best_score:
            best_score = corr
            best = (i_min, z)
    if best is None:
        return BalancedDecodeResult(ok=False, u=None, z=None, i=None,
                                    candidates=tuple(cands), score=None)
    i_min, z = best
    return BalancedDecodeResult(
        ok=True,
        u=BitWord.from_array(z[code.message_positions]),
        z=BitWord.from_array(z),
        i=i_min,
        candidates=tuple(cands),
        score=best_score,
    )


def balanced_decode_bsc(code: LdpcCode, y: BitWord, p: float, depth: int = 2,
                        num_candidates: int | None = 4, max_iter: int = 50) -> BalancedDecodeResult:
    """Hard-decision front end: constant-magnitude LLRs from the crossover p."""
    return balanced_decode(code, bsc_llr(y.to_array(), p), depth=depth,
                           num_candidates=num_candidates, max_iter=max_iter)


def balanced_decode_soft(code: LdpcCode, levels, params=None, depth: int = 2,
                         num_candidates: int | None = 4, max_iter: int = 50) -> BalancedDecodeResult:
    """Soft-decision front end: per-cell LLRs from a two-Gaussian mixture.

    Balanced codewords put equal mass on both levels, so the mixture can be
    fitted to the raw cell levels themselves when params is None.
    """
    from . import em
    if params is None:
        params = em.fit(levels).params
    return balanced_decode(code, em.per_cell_llr(levels, params), depth=depth,
                           num_candidates=num_candidates, max_iter=max_iter)


# ---------------------------------------------------------------------------
# Serialization


def save_code(code: LdpcCode, path) -> None:
    """Plain-text sparse listing of H (coordinate format, 1-based) with the
    ensemble parameters in the header so experiments can be replayed."""
    lines = [
        "%%MatrixMarket matrix coordinate pattern general",
        f"%gallager n={code.n} a={code.a} b={code.b} seed={code.seed} seed_used={code.seed_used}",
        f"{code.r} {code.n} {code.r * code.b}",
    ]
    for c in range(code.r):
        for v in code.check_nbrs[c]:
            lines.append(f"{c + 1} {int(v) + 1}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_code(path) -> LdpcCode:
    meta = {}
    entries = []
    shape = None
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("%"):
                if line.startswith("%gallager"):
                    for field in line.split()[1:]:
                        key, val = field.split("=")
                        meta[key] = int(val)
                continue
            nums = line.split()
            if shape is None:
                shape = (int(nums[0]), int(nums[1]))
                continue
            entries.append((int(nums[0]) - 1, int(nums[1]) - 1))
    if shape is None or not meta:
        raise ValueError(f"{path} is not a saved code listing")
    H = np.zeros(shape, dtype=np.uint8)
    for c, v in entries:
        H[c, v] = 1
    return _assemble(H, meta["a"], meta["b"], meta["seed"], meta["seed_used"])
