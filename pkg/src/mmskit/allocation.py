"""Randomized allocation pipeline for agents with subadditive valuations.

The procedure targets a multiplicative share guarantee of 1/(14*log2(n)) of
each agent's exact maximin share and runs in three steps:

  1. preprocess     -- while some agent values a single item above 4/(23t),
                       hand that item over and remove both; then recompute the
                       survivors' maximin shares and rescale any that rose
                       above one back to exactly one.
  2. tentative      -- encode everyone's maximin partitions as a fractional
                       bundle assignment (weight 1/n each) and round it
                       independently t = ceil((56/23)*log2(n)) times.
  3. resolution     -- every item held in at least one copy goes to the
                       holder of one uniformly chosen copy; unheld items are
                       parked in an unallocated pool.

All bookkeeping is exact (Fractions); randomness enters only through the
seeded generator, so identical (instance, params, seed) triples produce
identical allocations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Optional, Sequence

from .items import ItemSet
from .mms import MmsResult, exact_mms
from .rng import make_rng
from .valuations import Valuation, as_fraction, scale, valuation_from_json


class Agent(NamedTuple):
    id: str
    valuation: Valuation


@dataclass(frozen=True)
class Instance:
    """Allocation instance: m items, named agents, and the active item set.

    `items` defaults to the full universe; preprocessing returns reduced
    instances with a smaller active set.  Agent ids must be unique strings.
    """

    m: int
    agents: tuple[Agent, ...]
    items: Optional[ItemSet] = None

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be non-negative")
        agents = tuple(Agent(*a) for a in self.agents)
        object.__setattr__(self, "agents", agents)
        ids = [a.id for a in agents]
        if len(set(ids)) != len(ids):
            raise ValueError("agent ids must be unique")
        for a in agents:
            if not isinstance(a.id, str):
                raise ValueError("agent ids must be strings")
            if a.valuation.m != self.m:
                raise ValueError(
                    f"agent {a.id}: valuation arity {a.valuation.m} != instance m {self.m}"
                )
        if self.items is None:
            object.__setattr__(self, "items", ItemSet.full(self.m))
        elif self.items.universe_size != self.m:
            raise ValueError("active item set universe does not match m")

    @property
    def n(self) -> int:
        return len(self.agents)


def instance_to_json(inst: Instance) -> dict:
    return {
        "m": inst.m,
        "agents": [
            {"id": a.id, "valuation": a.valuation.to_json()} for a in inst.agents
        ],
    }


def instance_from_json(obj: dict) -> Instance:
    if not isinstance(obj, dict) or "m" not in obj or "agents" not in obj:
        raise ValueError("instance JSON must be an object with 'm' and 'agents'")
    agents = tuple(
        Agent(a["id"], valuation_from_json(a["valuation"])) for a in obj["agents"]
    )
    return Instance(m=int(obj["m"]), agents=agents)


def copy_count(n: int, log_base=2) -> int:
    """Number of independent rounding copies: ceil((56/23) * log(n)), min 1.

    For integer bases the ceiling is taken by exact integer comparison
    (smallest t with base^(23t) >= n^56), so boundary cases such as powers
    of two cannot drift with float rounding.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return 1
    if isinstance(log_base, int) and not isinstance(log_base, bool):
        if log_base < 2:
            raise ValueError("log base must be at least 2")
        target = n**56
        t = 1
        while log_base ** (23 * t) < target:
            t += 1
        return t
    lb = float(log_base)
    if lb <= 1.0:
        raise ValueError("log base must exceed 1")
    return max(1, math.ceil(56.0 * math.log(n) / (23.0 * math.log(lb)) - 1e-12))


# -- fractional bundle assignments ---------------------------------------------


class LpEntry(NamedTuple):
    agent: int
    bundle: ItemSet
    weight: Fraction


@dataclass(frozen=True)
class FractionalSolution:
    """Weighted bundle selection: x[agent, bundle] = weight."""

    universe_size: int
    entries: tuple[LpEntry, ...]

    def agent_indices(self) -> list[int]:
        return sorted({e.agent for e in self.entries})

    def agent_weight(self, agent: int) -> Fraction:
        return sum((e.weight for e in self.entries if e.agent == agent), Fraction(0))

    def item_weight(self, item: int) -> Fraction:
        return sum(
            (e.weight for e in self.entries if item in e.bundle), Fraction(0)
        )


def encode_mms_lp(inst: Instance, partitions: Sequence[MmsResult]) -> FractionalSolution:
    """Encode maximin partitions as a fractional solution with weights 1/n.

    Each agent contributes her n maximin bundles at weight 1/n, so her total
    weight is exactly 1 and every active item's total weight is exactly 1.
    """
    n = inst.n
    if n == 0:
        return FractionalSolution(inst.m, ())
    if len(partitions) != n:
        raise ValueError(f"need one partition per agent: got {len(partitions)} for n={n}")
    w = Fraction(1, n)
    entries = []
    for a_idx, res in enumerate(partitions):
        if len(res.partition) != n:
            raise ValueError(
                f"partition for agent index {a_idx} has {len(res.partition)} bundles, "
                f"expected {n}"
            )
        union = 0
        total_size = 0
        for bundle in res.partition:
            if bundle.universe_size != inst.m:
                raise ValueError("partition bundle universe does not match the instance")
            union |= bundle.bits
            total_size += len(bundle)
        if union != inst.items.bits or total_size != len(inst.items):
            raise ValueError(
                f"partition for agent index {a_idx} does not partition the active items"
            )
        for bundle in res.partition:
            entries.append(LpEntry(a_idx, bundle, w))
    return FractionalSolution(inst.m, tuple(entries))


def check_feasible(sol: FractionalSolution) -> list[str]:
    """LP feasibility violations (empty list = feasible).

    Checks non-negative weights, per-agent total weight <= 1, and per-item
    total weight <= 1, all with exact arithmetic.
    """
    violations = []
    agent_totals: dict[int, Fraction] = {}
    item_totals: dict[int, Fraction] = {}
    for idx, e in enumerate(sol.entries):
        if e.bundle.universe_size != sol.universe_size:
            violations.append(f"entry {idx}: bundle universe mismatch")
            continue
        if e.weight < 0:
            violations.append(f"entry {idx}: negative weight {e.weight}")
        agent_totals[e.agent] = agent_totals.get(e.agent, Fraction(0)) + e.weight
        for item in e.bundle:
            item_totals[item] = item_totals.get(item, Fraction(0)) + e.weight
    for agent in sorted(agent_totals):
        if agent_totals[agent] > 1:
            violations.append(
                f"agent {agent}: total weight {agent_totals[agent]} exceeds 1"
            )
    for item in sorted(item_totals):
        if item_totals[item] > 1:
            violations.append(f"item {item}: total weight {item_totals[item]} exceeds 1")
    return violations


# -- preprocessing --------------------------------------------------------------


def preprocess(inst: Instance, threshold) -> tuple[tuple[tuple[str, int], ...], Instance]:
    """Assign single items worth more than `threshold` and remove both sides.

    Precondition: agents are normalized to unit maximin share.  Ties break
    by lowest agent position, then highest item value, then lowest item
    index.  After the loop each survivor's maximin share (over surviving
    items, one bundle per surviving agent) is recomputed; values above one
    are rescaled back to exactly one, values at or below one are left alone.
    Removing equally many agents and items cannot push a maximin share below
    one, so survivors stay at unit share.
    """
    threshold = as_fraction(threshold)
    agents = list(inst.agents)
    active = inst.items.bits
    assignments: list[tuple[str, int]] = []
    while True:
        pick = None
        for pos, agent in enumerate(agents):
            best_item = None
            best_val = None
            rest = active
            while rest:
                low = rest & -rest
                e = low.bit_length() - 1
                rest ^= low
                val = agent.valuation.value_of_mask(low)
                if val > threshold and (best_val is None or val > best_val):
                    best_val = val
                    best_item = e
            if best_item is not None:
                pick = (pos, best_item)
                break
        if pick is None:
            break
        pos, e = pick
        assignments.append((agents[pos].id, e))
        del agents[pos]
        active &= ~(1 << e)

    n_rem = len(agents)
    survivors = []
    active_set = ItemSet(active, inst.m)
    for agent in agents:
        res = exact_mms(agent.valuation, inst.m, n_rem, items=active_set)
        if res.value > 1:
            survivors.append(Agent(agent.id, scale(agent.valuation, Fraction(1, 1) / res.value)))
        else:
            survivors.append(agent)
    return tuple(assignments), Instance(inst.m, tuple(survivors), items=active_set)


# -- rounding -------------------------------------------------------------------


def _round_uniform_requester(sol: FractionalSolution, rng) -> dict[int, ItemSet]:
    """Sample one bundle per agent by LP weight, then let each contested item
    keep a uniformly random requester (independently per item)."""
    per_agent: dict[int, list[tuple[int, Fraction]]] = {}
    for e in sol.entries:
        per_agent.setdefault(e.agent, []).append((e.bundle.bits, e.weight))
    chosen: dict[int, int] = {}
    for agent in sorted(per_agent):
        u = rng.random()
        cum = Fraction(0)
        for bits, w in per_agent[agent]:
            cum += w
            if u < cum:
                chosen[agent] = bits
                break
        # residual probability 1 - sum(weights): the agent samples no bundle
    requests: dict[int, list[int]] = {}
    for agent in sorted(chosen):
        rest = chosen[agent]
        while rest:
            low = rest & -rest
            requests.setdefault(low.bit_length() - 1, []).append(agent)
            rest ^= low
    for item in sorted(requests):
        requesters = requests[item]
        if len(requesters) >= 2:
            winner = requesters[int(rng.integers(len(requesters)))]
            bit = 1 << item
            for agent in requesters:
                if agent != winner:
                    chosen[agent] &= ~bit
    return {a: ItemSet(bits, sol.universe_size) for a, bits in chosen.items()}


ROUNDING_STRATEGIES: dict[str, Callable] = {
    "uniform-requester": _round_uniform_requester,
}


def round_one_copy(
    sol: FractionalSolution, rng, strategy: str = "uniform-requester"
) -> dict[int, ItemSet]:
    """One randomized rounding of the fractional solution.

    Returns per-agent bundles that are pairwise disjoint.  Strategies are
    pluggable by name via ROUNDING_STRATEGIES.
    """
    try:
        fn = ROUNDING_STRATEGIES[strategy]
    except KeyError:
        raise ValueError(
            f"unknown rounding strategy {strategy!r}; known: {sorted(ROUNDING_STRATEGIES)}"
        ) from None
    return fn(sol, rng)


@dataclass(frozen=True)
class TentativeAllocation:
    """Bundles held across t independent rounding copies.

    copies[k][agent] is the bundle agent holds in copy k; bundles within a
    copy must be pairwise disjoint.
    """

    universe_size: int
    active_items: ItemSet
    copies: tuple[dict[int, ItemSet], ...]

    def __post_init__(self):
        for k, copy in enumerate(self.copies):
            seen = 0
            for agent, bundle in copy.items():
                if bundle.universe_size != self.universe_size:
                    raise ValueError(f"copy {k}: bundle universe mismatch")
                if not bundle.is_subset_of(self.active_items):
                    raise ValueError(f"copy {k}: bundle leaves the active item set")
                if seen & bundle.bits:
                    raise ValueError(f"copy {k}: bundles overlap")
                seen |= bundle.bits

    def holders(self, item: int) -> tuple[tuple[int, int], ...]:
        """(copy index, agent) pairs holding `item`, in copy order."""
        out = []
        for k, copy in enumerate(self.copies):
            for agent in sorted(copy):
                if item in copy[agent]:
                    out.append((k, agent))
        return tuple(out)

    def multiplicity(self, item: int) -> int:
        """m(e): number of copies in which someone holds the item."""
        return len(self.holders(item))

    def prefix_count(self, agent: int, k: int, item: int) -> int:
        """m_i^k(e): times `agent` holds the item within the first k copies."""
        count = 0
        for copy in self.copies[:k]:
            bundle = copy.get(agent)
            if bundle is not None and item in bundle:
                count += 1
        return count


@dataclass(frozen=True)
class AllocationDiagnostics:
    """Per-agent accounting for one allocation, in original-valuation units."""

    values: dict
    mms: dict
    ratios: dict
    assignments: tuple[tuple[str, int], ...]
    copies: int
    threshold: Fraction
    copy_bundles: tuple[dict, ...]


@dataclass(frozen=True)
class Allocation:
    """Final bundles per agent plus the pool of unallocated items."""

    bundles: dict
    pool: ItemSet
    diagnostics: Optional[AllocationDiagnostics] = None


def resolve_uniform(tent: TentativeAllocation, rng) -> Allocation:
    """Resolve cross-copy contention uniformly.

    For each item held in at least one copy, one of those copies is selected
    uniformly at random (independently across items) and its holder receives
    the item.  Items held in no copy go to the unallocated pool.
    """
    agents = sorted({a for copy in tent.copies for a in copy})
    awarded = {a: 0 for a in agents}
    taken = 0
    for item in tent.active_items:
        hs = tent.holders(item)
        if not hs:
            continue
        if len(hs) == 1:
            _, agent = hs[0]
        else:
            _, agent = hs[int(rng.integers(len(hs)))]
        awarded[agent] |= 1 << item
        taken |= 1 << item
    bundles = {a: ItemSet(bits, tent.universe_size) for a, bits in awarded.items()}
    pool = ItemSet(tent.active_items.bits & ~taken, tent.universe_size)
    return Allocation(bundles=bundles, pool=pool, diagnostics=None)


# -- parameters and the full pipeline -------------------------------------------


@dataclass(frozen=True)
class AlgoParams:
    """Pipeline parameters; threshold is pinned to 4/(23*copies) exactly."""

    copies: int
    threshold: Fraction
    log_base: object = 2
    seed: int = 0
    rounding_strategy: str = "uniform-requester"

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("copies must be at least 1")
        if self.threshold != Fraction(4, 23 * self.copies):
            raise ValueError(
                f"threshold must equal 4/(23*copies) = {Fraction(4, 23 * self.copies)} exactly"
            )
        if self.rounding_strategy not in ROUNDING_STRATEGIES:
            raise ValueError(f"unknown rounding strategy {self.rounding_strategy!r}")

    @classmethod
    def for_instance(
        cls,
        n: int,
        *,
        seed: int = 0,
        copies: Optional[int] = None,
        log_base=2,
        rounding_strategy: str = "uniform-requester",
    ) -> "AlgoParams":
        t = copies if copies is not None else copy_count(n, log_base)
        if t < 1:
            raise ValueError("copies must be at least 1")
        return cls(
            copies=t,
            threshold=Fraction(4, 23 * t),
            log_base=log_base,
            seed=seed,
            rounding_strategy=rounding_strategy,
        )


@dataclass(frozen=True)
class PreparedInstance:
    """Deterministic part of the pipeline, reusable across seeded trials."""

    instance: Instance
    params: AlgoParams
    mms_original: dict
    single_agent: bool
    normalized: Optional[Instance]
    assignments: tuple[tuple[str, int], ...]
    reduced: Optional[Instance]
    partitions: tuple[MmsResult, ...]
    solution: Optional[FractionalSolution]


def prepare(inst: Instance, params: Optional[AlgoParams] = None) -> PreparedInstance:
    """Run the deterministic pipeline steps: normalize, preprocess, encode."""
    n = inst.n
    if n < 1:
        raise ValueError("instance needs at least one agent")
    if params is None:
        params = AlgoParams.for_instance(n)
    mms_original = {}
    for agent in inst.agents:
        res = exact_mms(agent.valuation, inst.m, n, items=inst.items)
        if res.value == 0:
            raise ValueError(
                f"agent {agent.id} has zero maximin share; the guarantee is vacuous "
                "and normalization is undefined"
            )
        mms_original[agent.id] = res.value
    if n == 1:
        return PreparedInstance(
            instance=inst,
            params=params,
            mms_original=mms_original,
            single_agent=True,
            normalized=None,
            assignments=(),
            reduced=None,
            partitions=(),
            solution=None,
        )
    normalized = Instance(
        inst.m,
        tuple(
            Agent(a.id, scale(a.valuation, Fraction(1, 1) / mms_original[a.id]))
            for a in inst.agents
        ),
        items=inst.items,
    )
    assignments, reduced = preprocess(normalized, params.threshold)
    partitions = tuple(
        exact_mms(a.valuation, inst.m, reduced.n, items=reduced.items)
        for a in reduced.agents
    )
    solution = encode_mms_lp(reduced, partitions)
    return PreparedInstance(
        instance=inst,
        params=params,
        mms_original=mms_original,
        single_agent=False,
        normalized=normalized,
        assignments=assignments,
        reduced=reduced,
        partitions=partitions,
        solution=solution,
    )


def allocate_prepared(prep: PreparedInstance, seed: Optional[int] = None) -> Allocation:
    """Run the randomized pipeline steps on a prepared instance."""
    params = prep.params
    inst = prep.instance
    rng = make_rng(params.seed if seed is None else seed)

    if prep.single_agent:
        agent = inst.agents[0]
        bundle = inst.items
        value = agent.valuation.value_of_mask(bundle.bits)
        mms_val = prep.mms_original[agent.id]
        diag = AllocationDiagnostics(
            values={agent.id: value},
            mms=dict(prep.mms_original),
            ratios={agent.id: value / mms_val},
            assignments=(),
            copies=params.copies,
            threshold=params.threshold,
            copy_bundles=(),
        )
        return Allocation(
            bundles={agent.id: bundle},
            pool=ItemSet.empty(inst.m),
            diagnostics=diag,
        )

    reduced = prep.reduced
    copies = tuple(
        round_one_copy(prep.solution, rng, params.rounding_strategy)
        for _ in range(params.copies)
    )
    tent = TentativeAllocation(
        universe_size=inst.m, active_items=reduced.items, copies=copies
    )
    base = resolve_uniform(tent, rng)

    bundles = {}
    for agent_id, item in prep.assignments:
        bundles[agent_id] = ItemSet.from_indices([item], inst.m)
    for idx, agent in enumerate(reduced.agents):
        bundles[agent.id] = base.bundles.get(idx, ItemSet.empty(inst.m))

    values = {}
    ratios = {}
    for agent in inst.agents:
        val = agent.valuation.value_of_mask(bundles[agent.id].bits)
        values[agent.id] = val
        ratios[agent.id] = val / prep.mms_original[agent.id]

    copy_bundles = tuple(
        {reduced.agents[idx].id: bundle for idx, bundle in copy.items()}
        for copy in copies
    )
    diag = AllocationDiagnostics(
        values=values,
        mms=dict(prep.mms_original),
        ratios=ratios,
        assignments=prep.assignments,
        copies=params.copies,
        threshold=params.threshold,
        copy_bundles=copy_bundles,
    )
    return Allocation(bundles=bundles, pool=base.pool, diagnostics=diag)


def allocate(inst: Instance, params: Optional[AlgoParams] = None) -> Allocation:
    """Full pipeline: normalize, preprocess, round t copies, resolve contention.

    Diagnostics report each agent's final value and value/MMS ratio in the
    units of her original valuation.
    """
    prep = prepare(inst, params)
    return allocate_prepared(prep)
