"""Stable identifiers for every reported quantity.

CSV consumers key on these strings; never rename an entry, only add.
"""

FORMULAS: dict[str, str] = {
    # per-gate drive and fault tolerance
    "epsilon.min": "hbar * G / t",
    "barrier.height": "kT * ln((kT / eps) * G)",
    "latching.energy": "kT * ln(kT / eps)",
    "init.energy": "m0 * kT * ln((kT / eps) * G)",
    # collision and claw search
    "collision.energy.full": "hbar * g0 * m0 * d0 * N / (M * t)",
    "collision.per_gate.classical": "hbar * m0 * d0 * sqrt(N) / (M * t)",
    "collision.per_gate.quantum": "hbar * d0 * sqrt(m0 * N / (M * p)) / t",
    "claw.energy.quantum": "hbar * max(N1 * N2 / (M * t), N1 / t, N2 / t)",
    "claw.energy.classical": "hbar * (N1 + N2)^3 / (M^2 * t)",
    # preimage search
    "grover.energy.full": "hbar * g0 * d0 * N / t",
    "grover.per_gate.full": "hbar * d0 * sqrt(m0 * N / M) / t",
    "preimage.powered.energy.full": "hbar * g0 * m0 * d0 * N^2 / (M * t)",
    "preimage.powered.per_gate.full": "hbar * m0 * d0 * N / (M * t)",
    "preimage.unpowered.energy.full": "hbar * g0 * m0 * d0 * N / t",
    "preimage.unpowered.kT.full": "hbar * g0 * m0 * d0 * N / (M * t)",
    "preimage.unpowered.latching": "kT * ln(t * kT / hbar)",
    "fixed_pt.classical.time": "sqrt(hbar * g0 * m0 * d0 * N / P)",
    "fixed_pt.classical.memory": "sqrt(hbar * g0 * m0 * d0 * N * P) / kT",
    "fixed_pt.quantum.time": "sqrt(hbar * g0 * d0 * N / P)",
    "fixed_pt.quantum.memory": "hbar * m0 * d0 * P / (g0 * kT^2)",
    "oracle.kT": "hbar * g0 * d0 / t0",
    # technology scenarios
    "scenario.N_det": "E * sqrt(t / (hbar g0 m0 d0 kT)) * r^(-1/2)",
    "scenario.M_det": "N_det * sqrt(hbar g0 m0 d0 / (kT t)) * r^(-1/2)",
    "scenario.eps_ratio_det": "sqrt(hbar m0 d0 / (g0 kT t)) * r^(1/2)",
    "scenario.N_quant": "E * t / (hbar g0 d0) * (T_quant / T) / (gate_factor * depth_factor)",
    "scenario.N_cl": "E * t / (hbar g0 m0 d0) / r",
    "scenario.speedup_bits_quant": "log2(N_quant / N_det)",
    "scenario.speedup_bits_unpowered": "log2(N_cl / N_det)",
    "scenario.quantum_mem_check": "hbar m0 d0 / (g0 kT t) * mem * depth / gate * (T / T_quant_mem) * r",
    "earth.budget": "irradiance * span / (k * T)",
    "earth.atoms": "1e50",
    # walk and search outputs
    "walk.exact": "first-step linear system E[v] = 1 + sum_w P(v,w) E[w]",
    "walk.mc_mean": "mean hitting step over completed trials",
    "walk.mc_ci95": "1.96 * sqrt(var / completed)",
    "walk.censored": "fraction of trials that exhausted the step budget",
    "walk.bound": "l^2 | 2(|V|-1)h | 2(|V|-1)(h+l)",
    "walk.bound_ok": "1 if every estimate <= bound",
    "search.vow": "van Oorschot-Wiener distinguished-point collision search",
    "search.exhaustive": "strided parallel exhaustive preimage search",
    "search.brownian": "unpowered walk on tree+chain keyspace graph",
    "search.grover": "state-vector Grover success probability",
    "search.bht": "table fill + Grover over collision partners",
}

UNITS = frozenset({"J", "s", "bits", "K", "dimensionless", "bits_log2"})


def describe(formula_id: str) -> str:
    return FORMULAS[formula_id]
