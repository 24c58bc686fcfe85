"""Spreading-code families and the layout that duplicates one code per block.

Codes are +/-1 chip rows of length equal to the frames per symbol. A code plan
assigns block positions to family rows; exactly one row appears twice, at
positions 0 and ``dup_gap``, which is what makes adjacent-symbol correlation
at the right delay non-zero and therefore makes blind timing recoverable.
Pairs are scored by the worst absolute prefix sum of their chip products,
and families are selected to minimize the worst pair score.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConfigurationError, UsageError


def hadamard_family(order: int) -> np.ndarray:
    """Rows of the Sylvester Hadamard matrix of the given power-of-two order."""
    if order < 1 or order & (order - 1):
        raise UsageError(f"Hadamard order must be a power of two, got {order}")
    h = np.array([[1]], dtype=np.int64)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def orthogonal_pn_family(length: int, count: int, rng_seed=0,
                         max_tries: int = 2_000_000) -> tuple[np.ndarray, int]:
    """Random +/-1 codes made pairwise orthogonal by accept/reject search.

    Returns ``(codes, residual)`` where residual is the worst pairwise
    |dot product| actually achieved: 0 for even lengths, 1 for odd lengths
    (an odd-length +/-1 dot product is odd, so 0 is unreachable).
    """
    if count > length:
        raise UsageError("cannot have more mutually orthogonal codes than chips")
    rng = np.random.default_rng(rng_seed)
    residual = 0 if length % 2 == 0 or count < 2 else 1
    rows: list[np.ndarray] = []
    tries = 0
    while len(rows) < count:
        c = rng.choice(np.array([-1, 1], dtype=np.int64), size=length)
        tries += 1
        if tries > max_tries:
            raise ConfigurationError(
                f"no {count}-code family of length {length} with residual {residual} found")
        if all(abs(int(np.dot(c, r))) <= residual for r in rows):
            rows.append(c)
    return np.array(rows), residual


def partial_correlation_score(a: np.ndarray, b: np.ndarray, signed: bool = False) -> int:
    """Worst prefix sum of the chip products of two equal-length codes.

    By default the maximum of |sum_{j<=j0} a_j b_j| over all prefix lengths;
    with ``signed=True`` the maximum of the signed prefix sums instead.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise UsageError("codes must have equal length")
    prefix = np.cumsum(a * b)
    return int(np.max(prefix) if signed else np.max(np.abs(prefix)))


@dataclass(frozen=True)
class CodePlan:
    """A code family plus the position-to-row assignment for one block.

    ``layout[p]`` is the family row spread onto block position p. Row 0 is the
    duplicated one, at positions 0 and ``dup_gap``; the remaining rows fill the
    other positions in index order.
    """

    family: np.ndarray
    layout: np.ndarray
    dup_gap: int
    max_pair_score: int
    orthogonality_residual: int = 0

    @property
    def block_size(self) -> int:
        return len(self.layout)

    @property
    def code_length(self) -> int:
        return self.family.shape[1]

    def code_for_position(self, position: int) -> np.ndarray:
        return self.family[self.layout[position % self.block_size]]


def _build_layout(block_size: int, dup_gap: int) -> np.ndarray:
    if not 1 <= dup_gap < block_size:
        raise ConfigurationError(f"dup_gap {dup_gap} outside [1, {block_size})")
    layout = np.full(block_size, -1, dtype=np.int64)
    layout[0] = 0
    layout[dup_gap] = 0
    nxt = 1
    for p in range(block_size):
        if layout[p] < 0:
            layout[p] = nxt
            nxt += 1
    return layout


def _max_pair_score(rows: np.ndarray, signed: bool = False) -> int:
    k = len(rows)
    if k < 2:
        return 0
    return max(partial_correlation_score(rows[i], rows[j], signed)
               for i in range(k) for j in range(i + 1, k))


def select_family(candidates: np.ndarray, block_size: int, dup_gap: int = 1,
                  signed: bool = False, orthogonality_residual: int = 0) -> CodePlan:
    """Pick the (block_size - 1)-subset of candidates with the smallest worst pair score.

    Subsets are scanned exhaustively in lexicographic index order and ties keep
    the earliest subset, so the result is deterministic.
    """
    candidates = np.asarray(candidates)
    need = block_size - 1
    if len(candidates) < need:
        raise ConfigurationError(f"need at least {need} candidate codes, got {len(candidates)}")
    k = len(candidates)
    score = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(i + 1, k):
            score[i, j] = partial_correlation_score(candidates[i], candidates[j], signed)
    best_idx = None
    best = None
    for sub in combinations(range(k), need):
        worst = max((score[i][j] for i, j in combinations(sub, 2)), default=0)
        if best is None or worst < best:
            best = worst
            best_idx = sub
    return CodePlan(candidates[list(best_idx)].copy(), _build_layout(block_size, dup_gap),
                    dup_gap, int(best), orthogonality_residual)


def random_code_plan(length: int, block_size: int, rng_seed=0, dup_gap: int = 1) -> CodePlan:
    """Plan built from plain random +/-1 codes (no orthogonalization, no selection).

    This is the unstructured baseline the designed families are compared against;
    only the duplicated-position layout is kept.
    """
    rng = np.random.default_rng(rng_seed)
    fam = rng.choice(np.array([-1, 1], dtype=np.int64), size=(block_size - 1, length))
    return CodePlan(fam, _build_layout(block_size, dup_gap), dup_gap,
                    _max_pair_score(fam), orthogonality_residual=length)
