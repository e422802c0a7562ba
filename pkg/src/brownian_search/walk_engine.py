"""Random-walk model of (un)powered Brownian computation.

A computation is a walk on a small constant-degree graph: it starts at
``start`` and halts on first arrival in ``finish``.  Unpowered steps pick a
neighbour uniformly.  Powered steps only occur on the interior of sequential
(chain) segments, where the walker moves forward with probability
``p_fwd = e^x / (1 + e^x)``, ``x = epsilon / kT``.  Branching (tree) vertices are
always unbiased.

Builders cover the three shapes used in the analysis: a chain of ``l`` steps,
a complete binary tree of height ``h``, and a tree with a length-``l`` chain
hanging off every leaf.  Leaves are numbered left to right from 0; the
designated finish leaf defaults to the leftmost one.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numba
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import rng
from .rng import _mix64_nb

MAX_DEGREE = 10
MAX_EXACT_VERTICES = 16_384
BUDGET_FACTOR = 100


class GraphSizeError(ValueError):
    pass


@dataclass(frozen=True)
class WalkGraph:
    """Immutable computation graph.

    ``forward[v]`` is the forward neighbour of a chain-interior vertex and -1
    everywhere else; only those vertices feel the drive energy.
    """

    neighbors: tuple[tuple[int, ...], ...]
    start: int
    finish: frozenset[int]
    kind: tuple = ("custom",)
    forward: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.neighbors)
        if n == 0:
            raise ValueError("graph has no vertices")
        if not 0 <= self.start < n:
            raise ValueError(f"start {self.start} out of range")
        if not self.finish or any(not 0 <= v < n for v in self.finish):
            raise ValueError("finish must be a nonempty set of vertex indices")
        if self.start in self.finish and n > 1:
            raise ValueError("start lies in finish on a nontrivial graph")
        for v, nb in enumerate(self.neighbors):
            if len(nb) > MAX_DEGREE:
                raise ValueError(f"vertex {v} has degree {len(nb)} > {MAX_DEGREE}")
            for w in nb:
                if v not in self.neighbors[w]:
                    raise ValueError(f"edge {v}-{w} is not symmetric")
        if n > 1 and any(len(nb) == 0 for nb in self.neighbors):
            raise ValueError("isolated vertex")
        if len(self._reachable()) != n:
            raise ValueError("graph is not connected")
        fwd = self.forward if self.forward is not None else (-1,) * n
        if len(fwd) != n:
            raise ValueError("forward table has wrong length")
        for v, w in enumerate(fwd):
            if w >= 0 and (len(self.neighbors[v]) != 2 or w not in self.neighbors[v]):
                raise ValueError(f"vertex {v}: forward neighbour must be one of two neighbours")
        object.__setattr__(self, "forward", tuple(fwd))

    def _reachable(self) -> set[int]:
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            v = queue.popleft()
            for w in self.neighbors[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    @property
    def num_vertices(self) -> int:
        return len(self.neighbors)

    @property
    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.neighbors) // 2

    def step_table(self, biased: bool) -> np.ndarray:
        """Packed int32 transition table read by the walk kernel.

        Row ``v`` is ``[d, n_0, ..., n_{d-1}]``.  A neighbour that lies in the
        finish set is stored as its bitwise complement, so a negative entry
        means "halt".  With ``biased`` set, rows of vertices with a forward
        direction become ``[0, backward, forward]``.
        """
        return self._tables[bool(biased)]

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.num_vertices
        width = max(1, max(len(nb) for nb in self.neighbors))
        finish = self.finish

        def enc(w: int) -> int:
            return ~w if w in finish else w

        plain = np.zeros((n, width + 1), dtype=np.int32)
        for v, nb in enumerate(self.neighbors):
            plain[v, 0] = len(nb)
            plain[v, 1 : len(nb) + 1] = [enc(w) for w in nb]
        biased = plain.copy()
        for v, w in enumerate(self.forward):
            if w >= 0:
                nb = self.neighbors[v]
                back = nb[0] if nb[1] == w else nb[1]
                biased[v, :3] = (0, enc(back), enc(w))
        for t in (plain, biased):
            t.setflags(write=False)
        return plain, biased

    def hitting_bound(self) -> float:
        """Analytic upper bound on the unpowered expected hitting time."""
        tag = self.kind[0]
        n = self.num_vertices
        if tag == "chain":
            return float(self.kind[1] ** 2)
        if tag == "tree":
            return 2.0 * (n - 1) * self.kind[1]
        if tag == "tree_chain":
            return 2.0 * (n - 1) * (self.kind[1] + self.kind[2])
        # generic commute-time bound
        return 2.0 * self.num_edges * (n - 1)

    def default_budget(self) -> int:
        return max(1, int(math.ceil(BUDGET_FACTOR * self.hitting_bound())))

    def to_text(self) -> str:
        """One line per vertex: ``index<TAB>neighbours<TAB>flags``.

        Flags: ``S`` start, ``F`` finish, ``>w`` forward neighbour.
        """
        lines = [f"# kind={','.join(map(str, self.kind))}"]
        for v, nb in enumerate(self.neighbors):
            flags = []
            if v == self.start:
                flags.append("S")
            if v in self.finish:
                flags.append("F")
            if self.forward[v] >= 0:
                flags.append(f">{self.forward[v]}")
            lines.append(f"{v}\t{','.join(map(str, nb))}\t{' '.join(flags)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WalkGraph":
        kind: tuple = ("custom",)
        rows = []
        for line in text.splitlines():
            if line.startswith("# kind="):
                parts = line[len("# kind="):].split(",")
                kind = (parts[0], *(int(p) for p in parts[1:]))
                continue
            if not line.strip() or line.startswith("#"):
                continue
            idx, nb, *rest = line.split("\t")
            rows.append((int(idx), nb, rest[0] if rest else ""))
        rows.sort()
        neighbors, forward, finish, start = [], [], set(), None
        for expected, (idx, nb, flags) in enumerate(rows):
            if idx != expected:
                raise ValueError(f"missing vertex {expected}")
            neighbors.append(tuple(int(w) for w in nb.split(",") if w))
            fwd = -1
            for flag in flags.split():
                if flag == "S":
                    start = idx
                elif flag == "F":
                    finish.add(idx)
                elif flag.startswith(">"):
                    fwd = int(flag[1:])
            forward.append(fwd)
        if start is None:
            raise ValueError("no start vertex")
        return cls(tuple(neighbors), start, frozenset(finish), kind, tuple(forward))


@dataclass(frozen=True)
class WalkParams:
    epsilon: float = 0.0
    kT: float = 1.0
    epsilon_th: float = 0.0
    tau_max: int | None = None
    s_max: int = 1

    def __post_init__(self):
        if not self.epsilon >= 0:
            raise ValueError("epsilon must be >= 0")
        if not self.kT > 0:
            raise ValueError("kT must be > 0")
        if not self.epsilon_th >= 0:
            raise ValueError("epsilon_th must be >= 0")
        if self.tau_max is not None and self.tau_max < 1:
            raise ValueError("tau_max must be >= 1")
        if self.s_max < 1:
            raise ValueError("s_max must be >= 1")

    def budget_for(self, graph: WalkGraph) -> int:
        return self.tau_max if self.tau_max is not None else graph.default_budget()


@dataclass(frozen=True)
class WalkOutcome:
    steps: int
    finished: bool


@dataclass(frozen=True)
class HittingStats:
    mean: float
    variance: float
    trials: int
    ci95_half_width: float
    seed: int
    censored: int = 0

    @property
    def completed(self) -> int:
        return self.trials - self.censored

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.trials


# ----------------------------------------------------------------------------
# builders


def build_chain(length: int) -> WalkGraph:
    if length < 0:
        raise ValueError("length must be >= 0")
    n = length + 1
    neighbors = tuple(
        tuple(w for w in (v - 1, v + 1) if 0 <= w < n) for v in range(n)
    )
    forward = tuple(v + 1 if 0 < v < length else -1 for v in range(n))
    return WalkGraph(neighbors, 0, frozenset({length}), ("chain", length), forward)


def _tree_adjacency(height: int) -> list[list[int]]:
    n = 2 ** (height + 1) - 1
    adj: list[list[int]] = [[] for _ in range(n)]
    for v in range(1, n):
        parent = (v - 1) // 2
        adj[v].append(parent)
        adj[parent].append(v)
    return adj


def _check_leaves(height: int, marked_leaves: Iterable[int]) -> list[int]:
    leaves = sorted(set(marked_leaves))
    if not leaves or not all(0 <= j < 2**height for j in leaves):
        raise ValueError(f"marked leaves must lie in [0, {2**height})")
    return leaves


def build_tree(height: int, marked_leaves: Sequence[int] = (0,)) -> WalkGraph:
    """Complete binary tree in heap order; start at the root."""
    if height < 0:
        raise ValueError("height must be >= 0")
    leaves = _check_leaves(height, marked_leaves)
    first_leaf = 2**height - 1
    adj = _tree_adjacency(height)
    finish = frozenset(first_leaf + j for j in leaves)
    return WalkGraph(tuple(map(tuple, adj)), 0, finish, ("tree", height))


def build_tree_chain(height: int, tail: int, marked_leaves: Sequence[int] = (0,)) -> WalkGraph:
    """Binary tree with a ``tail``-step chain appended to every leaf.

    Finish vertices are the far ends of the chains below ``marked_leaves``.
    """
    if height < 0 or tail < 0:
        raise ValueError("height and tail must be >= 0")
    leaves = _check_leaves(height, marked_leaves)
    adj = _tree_adjacency(height)
    n_tree = len(adj)
    first_leaf = 2**height - 1
    forward = [-1] * n_tree
    ends = []
    for j in range(2**height):
        prev = first_leaf + j
        for pos in range(1, tail + 1):
            v = len(adj)
            adj.append([prev])
            adj[prev].append(v)
            forward.append(-1)
            if pos > 1:
                forward[prev] = v
            prev = v
        ends.append(prev)
    finish = frozenset(ends[j] for j in leaves)
    return WalkGraph(tuple(map(tuple, adj)), 0, finish, ("tree_chain", height, tail), tuple(forward))


# ----------------------------------------------------------------------------
# dynamics


def forward_bias(epsilon: float, kT: float) -> tuple[float, float]:
    """Forward/backward step probabilities with ratio ``exp(epsilon/kT)``."""
    if not kT > 0:
        raise ValueError("kT must be > 0")
    if not epsilon >= 0:
        raise ValueError("epsilon must be >= 0")
    x = epsilon / kT
    if x > 700.0:  # exp overflows; saturate
        return 1.0, 0.0
    e = math.exp(-x)
    return 1.0 / (1.0 + e), e / (1.0 + e)


_LANES = 4  # walks interleaved per kernel loop to overlap memory latency


@numba.njit(cache=True)
def _walk_many(table, start, threshold, keys, tau_max, out):
    """Run one walk per key; ``out[i]`` is the hitting step or -1 if censored.

    Step ``s`` (from 1) of trial ``i`` draws ``z = draw(keys[i], s - 1) >> 11``.
    An unbiased vertex of degree ``d`` moves to neighbour ``(z * d) >> 53``; a
    biased vertex moves forward iff ``z < threshold``.  Interleaving walks does
    not change any trial's result.
    """
    n = keys.shape[0]
    if n == 0:
        return
    if start < 0 or tau_max <= 0:
        # start < 0 encodes a start vertex inside the finish set
        for i in range(n):
            out[i] = 0 if start < 0 else -1
        return
    golden = np.uint64(rng.GOLDEN)
    shift53 = np.uint64(53)
    pos = np.empty(_LANES, np.int64)
    step = np.zeros(_LANES, np.int64)
    trial = np.full(_LANES, -1, np.int64)
    key = np.zeros(_LANES, np.uint64)
    nxt = 0
    active = 0
    for lane in range(_LANES):
        if nxt < n:
            pos[lane] = start
            trial[lane] = nxt
            key[lane] = keys[nxt]
            nxt += 1
            active += 1
    while active > 0:
        for lane in range(_LANES):
            t = trial[lane]
            if t < 0:
                continue
            v = pos[lane]
            s = step[lane] + 1
            z = _mix64_nb(key[lane] + np.uint64(s) * golden) >> np.uint64(11)
            d = table[v, 0]
            if d == 0:
                w = table[v, 2] if z < threshold else table[v, 1]
            else:
                w = table[v, 1 + ((z * np.uint64(d)) >> shift53)]
            if w < 0 or s >= tau_max:
                out[t] = s if w < 0 else -1
                if nxt < n:
                    pos[lane] = start
                    step[lane] = 0
                    trial[lane] = nxt
                    key[lane] = keys[nxt]
                    nxt += 1
                else:
                    trial[lane] = -1
                    active -= 1
            else:
                pos[lane] = w
                step[lane] = s


def forward_threshold(p_fwd: float) -> int:
    """Integer form of ``u < p_fwd`` for ``u = m / 2**53``: ``m < threshold``."""
    return math.ceil(p_fwd * 2.0**53)


def trial_keys(seed: int, trials: int, first: int = 0) -> np.ndarray:
    """Per-trial stream keys: trial ``i`` uses ``stream_key(seed, i)``."""
    base = np.uint64(rng.mix64(seed & rng.MASK64))
    idx = np.arange(first, first + trials, dtype=np.uint64)
    return rng.mix64_array(base ^ idx)


def _run(graph: WalkGraph, params: WalkParams, keys: np.ndarray) -> np.ndarray:
    biased = params.epsilon > 0
    p_fwd, _ = forward_bias(params.epsilon, params.kT)
    start = ~graph.start if graph.start in graph.finish else graph.start
    out = np.empty(keys.shape[0], dtype=np.int64)
    _walk_many(graph.step_table(biased), start, np.uint64(forward_threshold(p_fwd)), keys,
               params.budget_for(graph), out)
    return out


def simulate_walk(graph: WalkGraph, params: WalkParams, seed: int) -> WalkOutcome:
    """One walk; identical to trial 0 of ``estimate_hitting_time(..., seed)``."""
    tau = int(_run(graph, params, trial_keys(seed, 1))[0])
    if tau < 0:
        return WalkOutcome(params.budget_for(graph), False)
    return WalkOutcome(tau, True)


def hitting_samples(graph: WalkGraph, params: WalkParams, trials: int, seed: int) -> np.ndarray:
    """Raw per-trial hitting steps, -1 where the budget ran out."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return _run(graph, params, trial_keys(seed, trials))


def estimate_hitting_time(graph: WalkGraph, params: WalkParams, trials: int, seed: int = 0) -> HittingStats:
    """Monte Carlo estimate of the expected hitting time.

    Censored trials are dropped from the mean and counted separately; the
    confidence half-width uses the completed trials only.
    """
    samples = hitting_samples(graph, params, trials, seed)
    done = samples[samples >= 0].astype(np.float64)
    censored = trials - done.size
    if done.size == 0:
        return HittingStats(math.nan, math.nan, trials, math.nan, seed, censored)
    mean = float(done.sum() / done.size)
    var = float(((done - mean) ** 2).sum() / (done.size - 1)) if done.size > 1 else 0.0
    half = 1.96 * math.sqrt(var / done.size)
    return HittingStats(mean, var, trials, half, seed, censored)


def transition_matrix(graph: WalkGraph, params: WalkParams) -> sp.csr_matrix:
    p_fwd, p_bwd = forward_bias(params.epsilon, params.kT)
    biased = params.epsilon > 0
    rows, cols, vals = [], [], []
    for v, nb in enumerate(graph.neighbors):
        w_fwd = graph.forward[v]
        for w in nb:
            if biased and w_fwd >= 0:
                p = p_fwd if w == w_fwd else p_bwd
            else:
                p = 1.0 / len(nb)
            rows.append(v)
            cols.append(w)
            vals.append(p)
    n = graph.num_vertices
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def exact_hitting_time(graph: WalkGraph, params: WalkParams = WalkParams()) -> float:
    """Solve E[v] = 1 + sum_w P(v, w) E[w], E = 0 on finish, and return E[start]."""
    n = graph.num_vertices
    if n > MAX_EXACT_VERTICES:
        raise GraphSizeError(f"{n} vertices exceeds exact-solver limit {MAX_EXACT_VERTICES}")
    if graph.start in graph.finish:
        return 0.0
    transient = np.array([v for v in range(n) if v not in graph.finish])
    P = transition_matrix(graph, params)[transient][:, transient]
    A = (sp.identity(transient.size, format="csc") - P).tocsc()
    E = spla.spsolve(A, np.ones(transient.size))
    return float(np.atleast_1d(E)[np.searchsorted(transient, graph.start)])


# ----------------------------------------------------------------------------
# memory protection


def error_probability(params: WalkParams) -> float:
    """Union bound ``min(1, tau_max * s_max * exp(-epsilon_th / kT))``."""
    if params.tau_max is None:
        raise ValueError("error_probability needs an explicit tau_max")
    log_p = math.log(params.tau_max) + math.log(params.s_max) - params.epsilon_th / params.kT
    return math.exp(min(0.0, log_p))


def required_threshold(kT: float, tau_max: int, s_max: int, c0: float) -> float:
    """Barrier height that caps the error bound at ``exp(-c0)``."""
    if not kT > 0:
        raise ValueError("kT must be > 0")
    if tau_max * s_max < 1:
        raise ValueError("tau_max * s_max must be >= 1")
    if c0 < 0:
        raise ValueError("c0 must be >= 0")
    eth = kT * (math.log(tau_max) + math.log(s_max) + c0)
    # round up until the bound holds in floating point as well (a few ulps at most)
    target = math.exp(-c0)
    while error_probability(WalkParams(kT=kT, epsilon_th=eth, tau_max=tau_max, s_max=s_max)) > target:
        eth = math.nextafter(eth, math.inf)
    return eth
