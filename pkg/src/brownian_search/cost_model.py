"""Closed-form energy, time, memory and temperature costs of search in the
Brownian model.

Every asymptotic expression is evaluated with its hidden constant set to 1.
``hbar`` enters once wherever an action (J*s) is needed and Boltzmann's ``k``
wherever a temperature appears, so e.g. the per-gate drive energy for ``G``
serial gates in time ``t`` is ``hbar * G / t``.  Oracle queries are costed by
an ``OracleCost(m0, d0, g0)`` triple (width, depth, gate count); the unit
triple recovers the bare query-counting formulas.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields

from .registry import FORMULAS


@dataclass(frozen=True)
class PhysConstants:
    k: float = 1.380649e-23
    hbar: float = 1.054571817e-34
    seconds_per_year: float = 3.156e7


CONST = PhysConstants()
K_B = CONST.k
HBAR = CONST.hbar
YEAR = CONST.seconds_per_year

EARTH_IRRADIANCE_W = 174e15
EARTH_ATOMS = 1e50
DEFAULT_T_QUANT_MEM_K = 0.01


class DomainError(ValueError):
    """Input outside the regime where a formula applies."""


class RegimeWarning(UserWarning):
    """Inputs are valid but outside the regime the formula was derived for."""


def _positive(**kwargs: float) -> None:
    for name, value in kwargs.items():
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class OracleCost:
    m0: float = 1.0
    d0: float = 1.0
    g0: float = 1.0

    def __post_init__(self):
        if self.m0 < 1 or self.d0 < 1:
            raise DomainError("oracle width and depth must be >= 1")
        if self.g0 < self.d0:
            raise DomainError("a depth-d0 circuit has at least d0 gates")


UNIT_ORACLE = OracleCost()
GRASSL_ORACLE = OracleCost(m0=1e3, d0=1e5, g0=3e6)


@dataclass(frozen=True)
class TechProfile:
    """Technology cost factors.

    ``memcost_ratio`` is the price of one bit of memory in units of kT at the
    ambient temperature ``T``.  ``mem_factor``, ``depth_factor`` and
    ``gate_factor`` are the error-correction blow-ups of quantum width, depth
    and gate count.  ``T_quant`` is the quantum operating temperature.
    """

    memcost_ratio: float = 1.0
    mem_factor: float = 1.0
    depth_factor: float = 1.0
    gate_factor: float = 1.0
    T: float = 300.0
    T_quant: float = 300.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{f.name} must be positive, got {value!r}")
        for name in ("memcost_ratio", "mem_factor", "depth_factor", "gate_factor"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")
        if self.T_quant > self.T:
            raise DomainError("T_quant must not exceed T")

    @property
    def kT(self) -> float:
        return K_B * self.T


@dataclass(frozen=True)
class CostEstimate:
    """Evaluated resource tuple.  Fields a formula does not produce are None;
    ``temperature`` is in kelvin (see ``kT`` for the energy scale)."""

    formula_id: str
    energy: float | None = None
    per_gate_energy: float | None = None
    temperature: float | None = None
    time: float | None = None
    memory: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.formula_id not in FORMULAS:
            raise KeyError(f"unregistered formula id {self.formula_id!r}")
        for name in ("energy", "per_gate_energy", "temperature", "time", "memory"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name}={value!r} is not finite and non-negative")

    @property
    def kT(self) -> float | None:
        return None if self.temperature is None else K_B * self.temperature


# ----------------------------------------------------------------------------
# per-gate drive and fault tolerance


def epsilon_min(G: float, t: float) -> float:
    """Drive energy per gate to finish ``G`` serial gates in time ``t``."""
    if G < 1:
        raise DomainError("G must be >= 1")
    _positive(t=t)
    return HBAR * G / t


def _brownian_regime(kT: float, epsilon: float) -> None:
    _positive(kT=kT, epsilon=epsilon)
    if epsilon >= kT:
        raise DomainError("epsilon >= kT is outside the Brownian regime")


def barrier_height(kT: float, epsilon: float, G: float) -> float:
    _brownian_regime(kT, epsilon)
    if G < 1:
        raise DomainError("G must be >= 1")
    return kT * math.log((kT / epsilon) * G)


def latching_energy(kT: float, epsilon: float) -> float:
    _brownian_regime(kT, epsilon)
    return kT * math.log(kT / epsilon)


def init_energy(m0: float, kT: float, epsilon: float, G: float) -> float:
    if m0 < 1:
        raise DomainError("m0 must be >= 1")
    return m0 * barrier_height(kT, epsilon, G)


# ----------------------------------------------------------------------------
# collision and claw finding


def collision_energy(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE,
                     p: float | None = None) -> CostEstimate:
    """Energy of collision search on a range of size ``N`` with memory ``M``.

    The quantum (parallel BHT) and classical (van Oorschot-Wiener) algorithms
    cost the same, so both entry points are this function.  The processor
    count ``p`` cancels; it is only checked against ``p < M < (N p)^(1/3)``.
    """
    if N < 1 or M < 1:
        raise DomainError("N and M must be >= 1")
    _positive(t=t)
    if M > oracle.m0 * math.sqrt(N):
        warnings.warn(f"M={M:g} exceeds the useful memory m0*sqrt(N)={oracle.m0 * math.sqrt(N):g}",
                      RegimeWarning, stacklevel=2)
    if p is not None:
        _positive(p=p)
        if not p < M < (N * p) ** (1 / 3):
            warnings.warn(f"parallel BHT wants p < M < (N p)^(1/3); got p={p:g}, M={M:g}",
                          RegimeWarning, stacklevel=2)
    energy = HBAR * oracle.g0 * oracle.m0 * oracle.d0 * N / (M * t)
    return CostEstimate("collision.energy.full", energy=energy, time=t, memory=M)


collision_energy_quantum = collision_energy
collision_energy_classical = collision_energy


def collision_per_gate_classical(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE) -> float:
    _positive(N=N, M=M, t=t)
    return HBAR * oracle.m0 * oracle.d0 * math.sqrt(N) / (M * t)


def collision_per_gate_quantum(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE,
                               p: float = 1.0) -> float:
    _positive(N=N, M=M, t=t, p=p)
    return HBAR * oracle.d0 * math.sqrt(oracle.m0 * N / (M * p)) / t


def _claw_domain(N1: float, N2: float, M: float, t: float) -> None:
    if min(N1, N2, M) < 1:
        raise DomainError("N1, N2 and M must be >= 1")
    _positive(t=t)
    if not M < N1 + N2:
        raise DomainError("claw finding needs M < N1 + N2")


def claw_energy_quantum(N1: float, N2: float, M: float, t: float) -> float:
    _claw_domain(N1, N2, M, t)
    return HBAR * max(N1 * N2 / (M * t), N1 / t, N2 / t)


def claw_energy_classical(N1: float, N2: float, M: float, t: float) -> float:
    _claw_domain(N1, N2, M, t)
    return HBAR * (N1 + N2) ** 3 / (M**2 * t)


# ----------------------------------------------------------------------------
# preimage search


def _search_domain(N: float, M: float, t: float) -> None:
    if N < 1 or M < 1:
        raise DomainError("N and M must be >= 1")
    _positive(t=t)


def grover_cost(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE) -> CostEstimate:
    """Brownian Grover search; the total energy does not depend on ``M``."""
    _search_domain(N, M, t)
    per_gate = HBAR * oracle.d0 * math.sqrt(oracle.m0 * N / M) / t
    energy = HBAR * oracle.g0 * oracle.d0 * N / t
    return CostEstimate("grover.energy.full", energy=energy, per_gate_energy=per_gate, time=t, memory=M)


def powered_preimage_cost(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE) -> CostEstimate:
    """Deterministic classical search, each of M/m0 processes stepping through its share."""
    _search_domain(N, M, t)
    per_gate = HBAR * oracle.m0 * oracle.d0 * N / (M * t)
    energy = HBAR * oracle.g0 * oracle.m0 * oracle.d0 * (N * N) / (M * t)
    return CostEstimate("preimage.powered.energy.full", energy=energy, per_gate_energy=per_gate,
                        time=t, memory=M)


def unpowered_preimage_cost(N: float, M: float, t: float, oracle: OracleCost = UNIT_ORACLE) -> CostEstimate:
    """Unpowered random-walk search: thermal noise drives M processes through the keyspace.

    ``details`` carries the latching energy ``kT ln(t kT / hbar)`` (clipped at 0)
    and whether it is negligible, meaning no larger than the initialization
    energy ``M kT``; that holds once ``M >= ln(g0 m0 d0 N / M)``.
    """
    _search_domain(N, M, t)
    kT = HBAR * oracle.g0 * oracle.m0 * oracle.d0 * N / (M * t)
    energy = oracle.m0 * (HBAR * oracle.g0 * oracle.d0 * N / t)
    latch = kT * max(0.0, math.log(t * kT / HBAR))
    details = {"kT": kT, "latching_energy": latch, "latching_negligible": latch <= energy}
    return CostEstimate("preimage.unpowered.energy.full", energy=energy, temperature=kT / K_B,
                        time=t, memory=M, details=details)


def fixed_pt_classical(N: float, P: float, T: float, oracle: OracleCost = UNIT_ORACLE) -> tuple[float, float]:
    """(time, memory) for unpowered classical search at fixed power and temperature."""
    if N < 1:
        raise DomainError("N must be >= 1")
    _positive(P=P, T=T)
    work = HBAR * oracle.g0 * oracle.m0 * oracle.d0 * N
    return math.sqrt(work / P), math.sqrt(work * P) / (K_B * T)


def fixed_pt_quantum(N: float, P: float, T: float, oracle: OracleCost = UNIT_ORACLE) -> tuple[float, float]:
    """(time, memory) for Grover at fixed power and temperature, per-gate energy capped at kT."""
    if N < 1:
        raise DomainError("N must be >= 1")
    _positive(P=P, T=T)
    kT = K_B * T
    t = math.sqrt(HBAR * oracle.g0 * oracle.d0 * N / P)
    M = HBAR * oracle.m0 * oracle.d0 * P / (oracle.g0 * kT * kT)
    return t, M


def oracle_temperature(oracle: OracleCost, t0: float) -> float:
    """Thermal energy kT that diffuses through one oracle circuit in time ``t0``."""
    _positive(t0=t0)
    return HBAR * oracle.g0 * oracle.d0 / t0


# ----------------------------------------------------------------------------
# technology scenarios


@dataclass(frozen=True)
class ScenarioReport:
    E: float
    t: float
    N_det: float
    M_det: float
    eps_ratio_det: float
    N_quant: float
    N_cl: float
    speedup_bits_quant: float
    speedup_bits_unpowered: float
    quantum_mem_check: float
    T_quant_mem: float

    def rows(self) -> list[tuple[str, str, float, str]]:
        """(formula_id, name, value, units) in a fixed order."""
        return [
            ("scenario.N_det", "N_det", self.N_det, "dimensionless"),
            ("scenario.M_det", "M_det", self.M_det, "bits"),
            ("scenario.eps_ratio_det", "eps_ratio_det", self.eps_ratio_det, "dimensionless"),
            ("scenario.N_quant", "N_quant", self.N_quant, "dimensionless"),
            ("scenario.N_cl", "N_cl", self.N_cl, "dimensionless"),
            ("scenario.speedup_bits_quant", "speedup_bits_quant", self.speedup_bits_quant, "bits_log2"),
            ("scenario.speedup_bits_unpowered", "speedup_bits_unpowered", self.speedup_bits_unpowered, "bits_log2"),
            ("scenario.quantum_mem_check", "quantum_mem_check", self.quantum_mem_check, "dimensionless"),
        ]


def scenario_eval(tech: TechProfile, oracle: OracleCost = GRASSL_ORACLE, t: float = YEAR,
                  E: float = 1.0, T_quant_mem: float = DEFAULT_T_QUANT_MEM_K) -> ScenarioReport:
    """Largest searchable N for powered classical, Grover and unpowered classical
    search under the same energy ``E`` and time ``t``, memory priced at
    ``memcost * M <= E``.

    Every N is linear in E, so the speedups are E-independent.  The quantum
    memory check is evaluated at ``T_quant_mem`` rather than ``tech.T_quant``.
    """
    _positive(t=t, E=E, T_quant_mem=T_quant_mem)
    kT = tech.kT
    r = tech.memcost_ratio
    m0, d0, g0 = oracle.m0, oracle.d0, oracle.g0
    ln = math.log

    # logs throughout: N can be far outside float range for large E
    ln_N_det = ln(E) + 0.5 * (ln(t) - ln(HBAR * g0 * m0 * d0 * kT)) - 0.5 * ln(r)
    ln_M_det = ln_N_det + 0.5 * (ln(HBAR * g0 * m0 * d0) - ln(kT * t)) - 0.5 * ln(r)
    ln_N_quant = (ln(E) + ln(t) - ln(HBAR * g0 * d0) + ln(tech.T_quant / tech.T)
                  - ln(tech.gate_factor) - ln(tech.depth_factor))
    ln_N_cl = ln(E) + ln(t) - ln(HBAR * g0 * m0 * d0) - ln(r)

    eps_ratio = math.sqrt(HBAR * m0 * d0 / (g0 * kT * t)) * math.sqrt(r)
    mem_check = (HBAR * m0 * d0 / (g0 * kT * t) * tech.mem_factor * tech.depth_factor
                 / tech.gate_factor * (tech.T / T_quant_mem) * r)
    return ScenarioReport(
        E=E,
        t=t,
        N_det=math.exp(ln_N_det),
        M_det=math.exp(ln_M_det),
        eps_ratio_det=eps_ratio,
        N_quant=math.exp(ln_N_quant),
        N_cl=math.exp(ln_N_cl),
        speedup_bits_quant=(ln_N_quant - ln_N_det) / math.log(2),
        speedup_bits_unpowered=(ln_N_cl - ln_N_det) / math.log(2),
        quantum_mem_check=mem_check,
        T_quant_mem=T_quant_mem,
    )


def earth_budget(irradiance: float = EARTH_IRRADIANCE_W, T: float = 300.0, span: float = YEAR) -> float:
    """Energy received over ``span`` seconds, in units of kT."""
    _positive(irradiance=irradiance, T=T)
    if span < 0:
        raise DomainError("span must be >= 0")
    return irradiance * span / (K_B * T)


def earth_atoms() -> float:
    return EARTH_ATOMS
