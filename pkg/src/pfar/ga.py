"""Genetic-algorithm heuristic over route variables.

A chromosome holds one block of bits per flow, one bit per candidate path,
with at most one bit set per block. It is stored as one gene per flow: the
index of the chosen path, or -1 when the block is all zeros.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

from pfar.errors import ShapeMismatch
from pfar.exact import SolveResult
from pfar.model import DROP, CompiledInstance, PfarInstance, RouteAssignment, compile_instance, objective_value

NO_PATH = -1
MR_END = 0.9


@dataclass(frozen=True)
class Chromosome:
    genes: Tuple[int, ...]
    block_sizes: Tuple[int, ...]

    def __post_init__(self):
        if len(self.genes) != len(self.block_sizes):
            raise ShapeMismatch("one gene per flow is required")
        for g, size in zip(self.genes, self.block_sizes):
            if not (g == NO_PATH or 0 <= g < size):
                raise ValueError(f"gene {g} outside a block of {size} bits")

    @property
    def bits(self) -> str:
        """Concatenated per-flow bit blocks, e.g. ``"10000" "00100"``."""
        return "".join(
            "".join("1" if m == g else "0" for m in range(size))
            for g, size in zip(self.genes, self.block_sizes)
        )

    @classmethod
    def from_bits(cls, bits: str, block_sizes: Sequence[int]) -> "Chromosome":
        """Parse a bit string; a block with several set bits keeps the first."""
        if len(bits) != sum(block_sizes):
            raise ShapeMismatch(f"{len(bits)} bits for blocks totalling {sum(block_sizes)}")
        genes = []
        pos = 0
        for size in block_sizes:
            block = bits[pos : pos + size]
            genes.append(block.find("1"))
            pos += size
        return cls(tuple(genes), tuple(block_sizes))

    def __len__(self):
        return sum(self.block_sizes)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    time_budget: float = 10.0  # seconds
    init_path_prob: float = 0.0001
    mutation_path_prob: float = 0.0001
    cr_start: float = 0.9
    mr_start: float = 0.1
    seed: Optional[int] = None
    # When set, progress and termination count generations instead of wall time.
    max_generations: Optional[int] = None

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if self.time_budget <= 0:
            raise ValueError("time_budget must be positive")
        for name in ("init_path_prob", "mutation_path_prob", "cr_start", "mr_start"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not math.isclose(self.cr_start + self.mr_start, 1.0):
            raise ValueError("cr_start + mr_start must equal 1")
        if self.max_generations is not None and self.max_generations < 0:
            raise ValueError("max_generations must be >= 0")


class Rates(NamedTuple):
    mr: float
    cr: float


@dataclass
class GaStats:
    generations: int = 0
    best_fitness_per_generation: List[int] = field(default_factory=list)
    elapsed: float = 0.0
    terminated_by: str = ""
    # (generation, best_fitness, MR, CR, elapsed_ms)
    history: List[Tuple[int, int, float, float, float]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["generation,best_fitness,MR,CR,elapsed_ms"]
        lines += [f"{g},{b},{mr:.4f},{cr:.4f},{ms:.1f}" for g, b, mr, cr, ms in self.history]
        return "\n".join(lines) + "\n"


InstanceLike = Union[PfarInstance, CompiledInstance]


def _compiled(instance: InstanceLike) -> CompiledInstance:
    if isinstance(instance, CompiledInstance):
        return instance
    return compile_instance(instance)


def _block_sizes(ci: CompiledInstance) -> Tuple[int, ...]:
    return tuple(len(p) for p in ci.path_edges)


def greedy_assign(instance: PfarInstance) -> RouteAssignment:
    """Highest priority first; each flow takes its first path that still fits."""
    ci = compile_instance(instance)
    residual = list(ci.capacity)
    choice: List[Optional[int]] = [DROP] * len(ci.bandwidth)
    for i in sorted(range(len(ci.bandwidth)), key=lambda k: (-ci.priority[k], k)):
        bw = ci.bandwidth[i]
        for m, edges in enumerate(ci.path_edges[i]):
            if all(residual[e] >= bw for e in edges):
                for e in edges:
                    residual[e] -= bw
                choice[i] = m
                break
    return RouteAssignment(tuple(choice))


def encode(instance: InstanceLike, assignment: RouteAssignment) -> Chromosome:
    ci = _compiled(instance)
    if len(assignment.choice) != len(ci.bandwidth):
        raise ShapeMismatch("assignment and instance disagree on the flow count")
    genes = tuple(NO_PATH if m is DROP else m for m in assignment.choice)
    return Chromosome(genes, _block_sizes(ci))


def init_population(instance: PfarInstance, cfg: GaConfig, rng: Optional[random.Random] = None) -> List[Chromosome]:
    """Greedy individual first, the rest sparse random assignments."""
    rng = rng if rng is not None else random.Random(cfg.seed)
    ci = compile_instance(instance)
    sizes = _block_sizes(ci)
    population = [encode(ci, greedy_assign(instance))]
    p = cfg.init_path_prob
    for _ in range(cfg.population_size - 1):
        genes = tuple(
            rng.randrange(size) if size and rng.random() < p else NO_PATH
            for size in sizes
        )
        population.append(Chromosome(genes, sizes))
    return population[: cfg.population_size]


def fitness(instance: InstanceLike, chromosome: Chromosome) -> int:
    """Signed priority sum in flow index order.

    A flow whose chosen path fits the capacity left by earlier fitting flows
    adds its priority and reserves the bandwidth; one that does not fit
    subtracts its priority and reserves nothing.
    """
    ci = _compiled(instance)
    residual = list(ci.capacity)
    pe, bw, prio = ci.path_edges, ci.bandwidth, ci.priority
    total = 0
    for i, m in enumerate(chromosome.genes):
        if m < 0:
            continue
        b = bw[i]
        edges = pe[i][m]
        for e in edges:
            if residual[e] < b:
                total -= prio[i]
                break
        else:
            for e in edges:
                residual[e] -= b
            total += prio[i]
    return total


def repair(instance: InstanceLike, chromosome: Chromosome) -> RouteAssignment:
    """Keep placements that fit in flow index order, DROP the others."""
    ci = _compiled(instance)
    residual = list(ci.capacity)
    choice: List[Optional[int]] = []
    for i, m in enumerate(chromosome.genes):
        if m < 0:
            choice.append(DROP)
            continue
        b = ci.bandwidth[i]
        edges = ci.path_edges[i][m]
        if all(residual[e] >= b for e in edges):
            for e in edges:
                residual[e] -= b
            choice.append(m)
        else:
            choice.append(DROP)
    return RouteAssignment(tuple(choice))


def crossover(parent_a: Chromosome, parent_b: Chromosome, rng: random.Random) -> Chromosome:
    """Uniform crossover at flow-block granularity."""
    if parent_a.block_sizes != parent_b.block_sizes:
        raise ShapeMismatch("parents have different block layouts")
    n = len(parent_a.genes)
    mask = rng.getrandbits(n) if n else 0
    a, b = parent_a.genes, parent_b.genes
    genes = tuple(a[i] if (mask >> i) & 1 else b[i] for i in range(n))
    return Chromosome(genes, parent_a.block_sizes)


def mutate(chromosome: Chromosome, instance: InstanceLike, cfg: GaConfig, rng: random.Random) -> Chromosome:
    """Clear one random flow's block, then maybe give it a random path."""
    n = len(chromosome.genes)
    if n == 0:
        return chromosome
    i = rng.randrange(n)
    size = chromosome.block_sizes[i]
    gene = NO_PATH
    if size and rng.random() < cfg.mutation_path_prob:
        gene = rng.randrange(size)
    genes = list(chromosome.genes)
    genes[i] = gene
    return Chromosome(tuple(genes), chromosome.block_sizes)


def adapt_rates(elapsed: float, cfg: GaConfig) -> Rates:
    """Mutation rate grows linearly from ``mr_start`` to 0.9 over the budget."""
    frac = min(1.0, max(0.0, elapsed) / cfg.time_budget)
    mr = cfg.mr_start + (MR_END - cfg.mr_start) * frac
    return Rates(mr, 1.0 - mr)


def _floor(x: float) -> int:
    # guards against 100 * (1 - 0.9) == 9.999999999999998
    return int(math.floor(x + 1e-9))


def _tournament(fits: Sequence[int], rng: random.Random) -> int:
    a = rng.randrange(len(fits))
    b = rng.randrange(len(fits))
    return a if fits[a] >= fits[b] else b


def select_and_breed(
    population: Sequence[Chromosome],
    instance: InstanceLike,
    cfg: GaConfig,
    rates: Rates,
    rng: random.Random,
    fitnesses: Optional[Sequence[int]] = None,
) -> List[Chromosome]:
    """One generation step: elites, tournament crossover, then mutation.

    ``PS*(1-CR)`` elites (at least one) are copied unchanged; the remaining
    ``CS`` slots are crossover offspring, ``CS*MR`` of which are mutated.
    """
    ps = len(population)
    if fitnesses is None:
        ci = _compiled(instance)
        fitnesses = [fitness(ci, c) for c in population]
    ranked = sorted(range(ps), key=lambda k: -fitnesses[k])
    n_elite = min(ps, max(1, _floor(ps * (1.0 - rates.cr))))
    cs = ps - n_elite
    nxt = [population[k] for k in ranked[:n_elite]]
    offspring = [
        crossover(population[_tournament(fitnesses, rng)], population[_tournament(fitnesses, rng)], rng)
        for _ in range(cs)
    ]
    ms = min(cs, _floor(cs * rates.mr))
    for k in rng.sample(range(cs), ms):
        offspring[k] = mutate(offspring[k], instance, cfg, rng)
    return nxt + offspring


def run_ga(instance: PfarInstance, cfg: GaConfig = GaConfig()) -> Tuple[SolveResult, GaStats]:
    """Evolve until an individual reaches the all-admitted bound or the budget ends.

    The best individual is repaired (non-fitting placements become DROP), so
    the returned assignment is always feasible.
    """
    start = time.perf_counter()
    rng = random.Random(cfg.seed)
    ci = compile_instance(instance)
    bound = sum(ci.priority)
    population = init_population(instance, cfg, rng)
    fits = [fitness(ci, c) for c in population]
    cache = {c.genes: f for c, f in zip(population, fits)}
    stats = GaStats()

    def progress() -> float:
        if cfg.max_generations is not None:
            if cfg.max_generations == 0:
                return cfg.time_budget
            return stats.generations / cfg.max_generations * cfg.time_budget
        return time.perf_counter() - start

    while True:
        best = max(fits)
        elapsed = progress()
        rates = adapt_rates(elapsed, cfg)
        stats.best_fitness_per_generation.append(best)
        stats.history.append(
            (stats.generations, best, rates.mr, rates.cr, (time.perf_counter() - start) * 1000.0)
        )
        if best == bound:
            stats.terminated_by = "bound-reached"
            break
        if elapsed >= cfg.time_budget:
            stats.terminated_by = "time-exhausted" if cfg.max_generations is None else "generations-exhausted"
            break
        population = select_and_breed(population, ci, cfg, rates, rng, fits)
        fits = []
        for c in population:
            f = cache.get(c.genes)
            if f is None:
                f = fitness(ci, c)
                if len(cache) > 20000:
                    cache.clear()
                cache[c.genes] = f
            fits.append(f)
        stats.generations += 1

    best_idx = max(range(len(population)), key=lambda k: fits[k])
    assignment = repair(ci, population[best_idx])
    stats.elapsed = time.perf_counter() - start
    result = SolveResult(
        assignment,
        objective_value(instance, assignment),
        False,
        {"generations": stats.generations, "best_fitness": fits[best_idx], "terminated_by": stats.terminated_by},
    )
    return result, stats
