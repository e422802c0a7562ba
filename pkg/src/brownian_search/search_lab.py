"""Desk-scale runs of the search algorithms whose costs ``cost_model`` prices.

All algorithms operate on a ``ToyFunction`` mapping ``[N] -> [N]`` with
``N = 2**domain_bits`` and are pure functions of their inputs and seed.
Workers are stepped round-robin in a fixed order, so "serial depth" is the
number of rounds and results are reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .walk_engine import (
    HittingStats,
    WalkParams,
    build_tree_chain,
    estimate_hitting_time,
)

MAX_GROVER_BITS = 20
_FUNCTION_STREAM = 0x746F_795F_666E  # "toy_fn"
_KINDS = ("random_function", "identity", "constant")


class VerificationError(AssertionError):
    """A claimed solution failed re-evaluation."""


@dataclass(frozen=True)
class ToyFunction:
    domain_bits: int
    seed: int = 0
    kind: str = "random_function"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}")
        if not 0 <= self.domain_bits <= 40:
            raise ValueError("domain_bits must lie in [0, 40]")

    @property
    def size(self) -> int:
        return 1 << self.domain_bits

    @property
    def _key(self) -> int:
        return rng.stream_key(self.seed, _FUNCTION_STREAM)

    def __call__(self, x: int) -> int:
        if self.kind == "identity":
            return x
        if self.kind == "constant":
            return 0
        return rng.draw(self._key, x) & (self.size - 1)

    def evaluate(self, xs) -> np.ndarray:
        """Vectorised evaluation; agrees with ``__call__`` elementwise."""
        xs = np.asarray(xs, dtype=np.uint64)
        if self.kind == "identity":
            return xs.astype(np.int64)
        if self.kind == "constant":
            return np.zeros(xs.shape, dtype=np.int64)
        out = rng.draw_array(self._key, xs) & np.uint64(self.size - 1)
        return out.astype(np.int64)


@dataclass
class SearchStats:
    algorithm: str
    oracle_queries: int
    serial_depth: int
    workers: int
    result: tuple | int | None
    wall_steps: int
    found: bool = True
    details: dict = field(default_factory=dict)


def verify_collision(f: ToyFunction, a: int, b: int) -> None:
    if a == b or f(a) != f(b):
        raise VerificationError(f"({a}, {b}) is not a collision")


def verify_preimage(f: ToyFunction, x: int, target: int) -> None:
    if f(x) != target:
        raise VerificationError(f"f({x}) = {f(x)} != {target}")


# ----------------------------------------------------------------------------
# van Oorschot-Wiener


def default_dp_bits(domain_bits: int, workers: int) -> int:
    """Distinguished-point bits giving chains of about sqrt(N)/M steps."""
    bits = math.ceil(domain_bits / 2 - math.log2(workers))
    return min(max(bits, 0), max(domain_bits - 1, 0))


def _locate(f: ToyFunction, a: int, a_len: int, b: int, b_len: int) -> tuple[tuple[int, int] | None, int, int]:
    """Re-walk two chains ending at one distinguished point to where they merge.

    Returns (collision or None, queries, serial steps).  None means one start
    lies on the other chain, so the chains share a suffix without colliding.
    """
    queries = 0
    if a_len < b_len:
        a, a_len, b, b_len = b, b_len, a, a_len
    for _ in range(a_len - b_len):
        a = f(a)
        queries += 1
    steps = a_len - b_len
    while a != b:
        fa, fb = f(a), f(b)
        queries += 2
        steps += 1
        if fa == fb:
            return (a, b), queries, steps
        a, b = fa, fb
    return None, queries, steps


def vow_collision(f: ToyFunction, workers: int, dp_bits: int | None = None, seed: int = 0,
                  max_queries: int | None = None) -> SearchStats:
    """Parallel collision search with distinguished points.

    Each worker iterates ``f`` from a random start until it lands on a point
    whose low ``dp_bits`` bits are zero, then records ``(start, length)`` under
    that point in a shared table and restarts.  A second chain arriving at a
    recorded point is re-walked against the first to extract the collision.
    Chains longer than ``20 * 2**dp_bits`` are abandoned (cycle without a
    distinguished point).  ``serial_depth`` counts search rounds;
    ``wall_steps`` adds the re-walk.
    """
    n = f.domain_bits
    N = f.size
    if N < 4:
        raise ValueError("vOW needs N >= 4")
    if not 1 <= workers <= math.isqrt(N):
        raise ValueError("workers must lie in [1, sqrt(N)]")
    if dp_bits is None:
        dp_bits = default_dp_bits(n, workers)
    if not 0 <= dp_bits < n:
        raise ValueError("dp_bits must lie in [0, domain_bits)")
    if max_queries is None:
        max_queries = 8 * N
    mask = (1 << dp_bits) - 1
    max_chain = 20 << dp_bits
    gen = np.random.Generator(np.random.Philox(seed))

    def fresh() -> list[int]:
        s = int(gen.integers(N))
        return [s, s, 0]  # start, current, length

    state = [fresh() for _ in range(workers)]
    table: dict[int, tuple[int, int]] = {}
    queries = rounds = 0
    discarded = 0
    while queries < max_queries:
        rounds += 1
        for w in range(workers):
            st = state[w]
            st[1] = f(st[1])
            st[2] += 1
            queries += 1
            if st[1] & mask == 0:
                hit = table.get(st[1])
                if hit is None:
                    table[st[1]] = (st[0], st[2])
                else:
                    pair, q, steps = _locate(f, hit[0], hit[1], st[0], st[2])
                    queries += q
                    if pair is not None:
                        verify_collision(f, *pair)
                        return SearchStats("vow", queries, rounds, workers, pair, rounds + steps,
                                           details={"dp_bits": dp_bits, "table_size": len(table),
                                                    "discarded": discarded})
                    discarded += 1
                state[w] = fresh()
            elif st[2] >= max_chain:
                discarded += 1
                state[w] = fresh()
    return SearchStats("vow", queries, rounds, workers, None, rounds, found=False,
                       details={"dp_bits": dp_bits, "table_size": len(table), "discarded": discarded})


# ----------------------------------------------------------------------------
# preimage search


def exhaustive_preimage(f: ToyFunction, target: int, workers: int) -> SearchStats:
    """Deterministic search with worker ``w`` testing keys ``w, w+M, w+2M, ...``.

    Round ``r`` covers the contiguous block ``[rM, (r+1)M)``, so the first hit
    is the least preimage.
    """
    N = f.size
    if not 0 <= target < N:
        raise ValueError("target outside the range of f")
    if not 1 <= workers <= N:
        raise ValueError("workers must lie in [1, N]")
    queries = 0
    rounds = 0
    for lo in range(0, N, workers):
        keys = np.arange(lo, min(lo + workers, N))
        rounds += 1
        vals = f.evaluate(keys)
        hits = np.flatnonzero(vals == target)
        if hits.size:
            x = int(keys[hits[0]])
            queries += keys.size
            verify_preimage(f, x, target)
            return SearchStats("exhaustive", queries, rounds, workers, x, rounds)
        queries += keys.size
    return SearchStats("exhaustive", queries, rounds, workers, None, rounds, found=False)


def brownian_preimage(f: ToyFunction, target: int, check_chain: int, trials: int,
                      seed: int = 0) -> SearchStats:
    """Unpowered walk over a binary tree of all N keys with an oracle chain on each leaf.

    The finish set is the chain end under every true preimage.  Building the
    graph evaluates ``f`` on the whole domain (``oracle_queries = N``);
    ``serial_depth`` is the root-to-finish path length ``h + l`` and
    ``wall_steps`` the rounded mean hitting time.
    """
    h = f.domain_bits
    if check_chain < 1:
        raise ValueError("check_chain must be >= 1")
    N = f.size
    preimages = np.flatnonzero(f.evaluate(np.arange(N)) == target)
    if preimages.size == 0:
        raise ValueError(f"target {target} has no preimage")
    for x in preimages:
        verify_preimage(f, int(x), target)
    graph = build_tree_chain(h, check_chain, marked_leaves=tuple(int(x) for x in preimages))
    stats: HittingStats = estimate_hitting_time(graph, WalkParams(), trials, seed)
    bound = graph.hitting_bound()
    return SearchStats(
        "brownian", N, h + check_chain, 1, int(preimages[0]), int(round(stats.mean)),
        details={"hitting": stats, "bound": bound, "bound_ok": stats.mean <= bound,
                 "graph": graph, "preimages": tuple(int(x) for x in preimages)},
    )


# ----------------------------------------------------------------------------
# Grover and BHT


def grover_iterations(N: int, k: int) -> int:
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    return math.floor(math.pi / 4 * math.sqrt(N / k))


def bht_predicted_queries(N: int, M: int) -> int:
    """Table fill (M queries) plus Grover over the M marked collision partners."""
    if not 1 <= M <= N:
        raise ValueError("need 1 <= M <= N")
    return M + grover_iterations(N, M)


def grover_closed_form(N: int, k: int, j: int) -> float:
    theta = math.asin(math.sqrt(k / N))
    return math.sin((2 * j + 1) * theta) ** 2


def _marked_mask(domain_bits: int, marked) -> np.ndarray:
    if domain_bits > MAX_GROVER_BITS:
        raise ValueError(f"state vector limited to {MAX_GROVER_BITS} qubits")
    N = 1 << domain_bits
    idx = np.unique(np.asarray(list(marked), dtype=np.int64))
    if idx.size == 0:
        raise ValueError("marked set is empty")
    if idx[0] < 0 or idx[-1] >= N:
        raise ValueError("marked values outside the domain")
    mask = np.zeros(N, dtype=bool)
    mask[idx] = True
    return mask


def grover_state(domain_bits: int, marked, iterations: int) -> np.ndarray:
    """Real amplitude vector after ``iterations`` phase-flip + diffusion rounds."""
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    mask = _marked_mask(domain_bits, marked)
    N = mask.size
    psi = np.full(N, 1.0 / math.sqrt(N))
    for _ in range(iterations):
        psi[mask] = -psi[mask]
        psi = 2.0 * psi.mean() - psi
        norm = float(psi @ psi)
        if abs(norm - 1.0) > 1e-10:
            raise ArithmeticError(f"state norm drifted to {norm!r}")
    return psi


def grover_simulate(domain_bits: int, marked, iterations: int) -> float:
    """Probability of measuring a marked value."""
    psi = grover_state(domain_bits, marked, iterations)
    mask = _marked_mask(domain_bits, marked)
    return float(np.sum(psi[mask] ** 2))


def bht_toy_run(f: ToyFunction, M: int, seed: int = 0, max_attempts: int = 64) -> SearchStats:
    """Serial BHT: tabulate M inputs, then Grover-search for an outside input
    whose image lands in the table.

    A measurement is sampled from the final state; on an unmarked outcome the
    Grover stage is repeated.  ``oracle_queries`` counts table fills plus one
    query per Grover iteration per attempt.
    """
    N = f.size
    if f.domain_bits > MAX_GROVER_BITS:
        raise ValueError(f"BHT toy runs need N <= 2^{MAX_GROVER_BITS}")
    if not 1 <= M <= math.isqrt(N):
        raise ValueError("M must lie in [1, sqrt(N)]")
    gen = np.random.Generator(np.random.Philox(seed))
    table = gen.choice(N, size=M, replace=False)
    table_vals = f.evaluate(table)
    owner = {int(v): int(x) for x, v in zip(table, table_vals)}
    values = f.evaluate(np.arange(N))
    outside = np.ones(N, dtype=bool)
    outside[table] = False
    marked = np.flatnonzero(outside & np.isin(values, table_vals))
    if marked.size == 0:
        return SearchStats("bht", M, M, 1, None, M, found=False,
                           details={"marked": 0, "success_probability": 0.0})
    j = grover_iterations(N, marked.size)
    psi = grover_state(f.domain_bits, marked, j)
    probs = psi * psi
    p_success = float(probs[marked].sum())
    probs /= probs.sum()
    is_marked = np.zeros(N, dtype=bool)
    is_marked[marked] = True
    queries = M
    for attempt in range(1, max_attempts + 1):
        queries += j
        x = int(gen.choice(N, p=probs))
        if is_marked[x]:
            pair = (x, owner[int(values[x])])
            verify_collision(f, *pair)
            return SearchStats("bht", queries, queries, 1, pair, queries,
                               details={"marked": int(marked.size), "iterations": j,
                                        "success_probability": p_success,
                                        "success": p_success >= 0.5, "attempts": attempt})
    return SearchStats("bht", queries, queries, 1, None, queries, found=False,
                       details={"marked": int(marked.size), "iterations": j,
                                "success_probability": p_success, "success": p_success >= 0.5,
                                "attempts": max_attempts})
