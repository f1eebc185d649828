"""Benchmark harness: pinned instance corpus, seeded trial loops, reports.

The corpus spans n in {2,3,4,8} agents, m in {8..12} items, and all four
random valuation classes (additive, xos, coverage, table).  Per-trial seeds
derive from (master seed, trial index) via rng.stream_seed, so a trial range
can be sharded and the merged statistics are identical whatever the split.

The success thresholds tracked per agent, as fractions of her exact original
maximin share, are:

  * 4/(23t)          -- what the per-agent failure lemma bounds by (3/4)^t,
  * 1/(14 log2 n)    -- the headline guarantee (vacuous at n = 1),
  * 1/2              -- the ideal-rounding target.

The lemma1 monitor records, for each surviving (post-preprocess) agent, how
often her copy-1 bundle is worth at least half her rescaled maximin share;
the contract Pr >= 1/2 is reported and flagged when missed, never asserted.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .allocation import AlgoParams, Agent, Instance, allocate_prepared, prepare
from .rng import make_rng, stream_seed
from .valuations import Additive, Coverage, Table, Valuation, Xos

DEFAULT_SIZES = tuple((n, m) for n in (2, 3, 4, 8) for m in range(8, 13))
CORPUS_CLASSES = ("additive", "xos", "coverage", "table")

REPORT_HEADER = (
    "instance_id,n,m,t,threshold,per_agent_fail_rate,bound_34_pow_t,"
    "full_success_rate,lemma1_monitor"
)

HIST_BINS = 21  # min-ratio bins [0,0.05), ..., [0.95,1.0), [1.0, inf)


@dataclass(frozen=True)
class CorpusSpec:
    """Deterministic corpus description; same spec -> same instances."""

    seed: int = 0
    sizes: tuple = DEFAULT_SIZES
    classes: tuple = CORPUS_CLASSES
    count: int = 1


def _random_weights(rng, m: int, denom: int = 65536) -> list[Fraction]:
    # strictly positive so maximin shares cannot degenerate to zero
    return [Fraction(int(rng.integers(1, denom + 1)), denom) for _ in range(m)]


def random_valuation(rng, cls: str, m: int) -> Valuation:
    """One random valuation of the given corpus class."""
    if cls == "additive":
        return Additive(_random_weights(rng, m))
    if cls == "xos":
        return Xos([_random_weights(rng, m) for _ in range(3)])
    if cls == "coverage":
        g = int(rng.integers(4, 13))
        weights = [Fraction(int(rng.integers(1, 257)), 256) for _ in range(g)]
        covers = []
        for _ in range(m):
            marks = rng.random(g)
            cover = [e for e in range(g) if marks[e] < 1.0 / 3.0]
            if not cover:
                cover = [int(rng.integers(g))]
            covers.append(cover)
        return Coverage(weights, covers)
    if cls == "table":
        x = Xos([_random_weights(rng, m) for _ in range(3)])
        nums, _den = x.int_table()
        peak = int(nums.max())
        values = [Fraction(int(v), peak) for v in nums]
        return Table(values, m=m, validate=False)
    raise ValueError(f"unknown corpus class {cls!r}")


def generate_corpus(spec: CorpusSpec) -> list[tuple[str, Instance]]:
    """The pinned corpus: list of (instance_id, Instance), order fixed."""
    out = []
    cell = 0
    for n, m in spec.sizes:
        for cls in spec.classes:
            for j in range(spec.count):
                rng = make_rng(stream_seed(spec.seed, cell))
                agents = tuple(
                    Agent(f"a{i}", random_valuation(rng, cls, m)) for i in range(n)
                )
                out.append((f"{cls}-n{n}-m{m}-{j}", Instance(m, agents)))
                cell += 1
    return out


def share_target(n: int):
    """1/(14 log2 n): exact Fraction when n is a power of two, else float.

    At n = 1 the guarantee is vacuous and the target is 0.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return Fraction(0)
    k = n.bit_length() - 1
    if 1 << k == n:
        return Fraction(1, 14 * k)
    return 1.0 / (14.0 * math.log2(n))


@dataclass
class TrialStats:
    """Aggregated success counts over seeded trials of one instance.

    Merging shards is order-independent: all fields are sums over trials.
    """

    instance_id: str
    n: int
    m: int
    copies: int
    threshold: Fraction
    ratio_target: object
    agent_ids: tuple
    surviving_ids: tuple
    trials: int
    success_threshold: dict
    success_ratio: dict
    success_half: dict
    full_success_threshold: int
    full_success_ratio: int
    full_success_half: int
    min_ratio_hist: list
    lemma1_counts: dict

    def merge(self, other: "TrialStats") -> "TrialStats":
        if (
            self.instance_id != other.instance_id
            or self.copies != other.copies
            or self.agent_ids != other.agent_ids
        ):
            raise ValueError("cannot merge stats from different configurations")
        return TrialStats(
            instance_id=self.instance_id,
            n=self.n,
            m=self.m,
            copies=self.copies,
            threshold=self.threshold,
            ratio_target=self.ratio_target,
            agent_ids=self.agent_ids,
            surviving_ids=self.surviving_ids,
            trials=self.trials + other.trials,
            success_threshold={
                a: self.success_threshold[a] + other.success_threshold[a]
                for a in self.agent_ids
            },
            success_ratio={
                a: self.success_ratio[a] + other.success_ratio[a]
                for a in self.agent_ids
            },
            success_half={
                a: self.success_half[a] + other.success_half[a] for a in self.agent_ids
            },
            full_success_threshold=self.full_success_threshold
            + other.full_success_threshold,
            full_success_ratio=self.full_success_ratio + other.full_success_ratio,
            full_success_half=self.full_success_half + other.full_success_half,
            min_ratio_hist=[
                a + b for a, b in zip(self.min_ratio_hist, other.min_ratio_hist)
            ],
            lemma1_counts={
                a: self.lemma1_counts[a] + other.lemma1_counts[a]
                for a in self.surviving_ids
            },
        )

    # -- derived report columns -------------------------------------------

    def per_agent_fail_rate(self) -> float:
        """Worst per-agent failure rate at the 4/(23t) threshold."""
        if self.trials == 0 or not self.agent_ids:
            return 0.0
        return max(
            1.0 - self.success_threshold[a] / self.trials for a in self.agent_ids
        )

    def full_success_rate(self) -> float:
        """Fraction of trials where every agent met 1/(14 log2 n)."""
        return self.full_success_ratio / self.trials if self.trials else 0.0

    def lemma1_monitor(self) -> Optional[float]:
        """Worst surviving agent's copy-1 half-share frequency (None if no
        agent survived preprocessing)."""
        if not self.surviving_ids or self.trials == 0:
            return None
        return min(self.lemma1_counts[a] / self.trials for a in self.surviving_ids)


def run_trials(
    inst: Instance,
    params: AlgoParams,
    trials: int,
    instance_id: str = "",
    trial_offset: int = 0,
) -> TrialStats:
    """Run seeded allocation trials and aggregate success statistics.

    Trial i uses the derived seed stream_seed(params.seed, trial_offset + i),
    so disjoint offset ranges shard the same experiment.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    prep = prepare(inst, params)
    target = share_target(inst.n)
    agent_ids = tuple(a.id for a in inst.agents)
    surviving = tuple(a.id for a in prep.reduced.agents) if prep.reduced else ()
    surviving_vals = (
        {a.id: a.valuation for a in prep.reduced.agents} if prep.reduced else {}
    )
    half = Fraction(1, 2)

    success_threshold = {a: 0 for a in agent_ids}
    success_ratio = {a: 0 for a in agent_ids}
    success_half = {a: 0 for a in agent_ids}
    full_threshold = full_ratio = full_half = 0
    hist = [0] * HIST_BINS
    lemma1 = {a: 0 for a in surviving}

    for i in range(trials):
        alloc = allocate_prepared(prep, seed=stream_seed(params.seed, trial_offset + i))
        ratios = alloc.diagnostics.ratios
        ok_thr = ok_ratio = ok_half = True
        min_ratio = None
        for a in agent_ids:
            r = ratios[a]
            if r >= params.threshold:
                success_threshold[a] += 1
            else:
                ok_thr = False
            if r >= target:
                success_ratio[a] += 1
            else:
                ok_ratio = False
            if r >= half:
                success_half[a] += 1
            else:
                ok_half = False
            if min_ratio is None or r < min_ratio:
                min_ratio = r
        full_threshold += ok_thr
        full_ratio += ok_ratio
        full_half += ok_half
        if min_ratio is not None:
            hist[min(int(float(min_ratio) * 20), HIST_BINS - 1)] += 1
        if alloc.diagnostics.copy_bundles:
            first_copy = alloc.diagnostics.copy_bundles[0]
            for a in surviving:
                bundle = first_copy.get(a)
                if bundle is not None and surviving_vals[a].value_of_mask(
                    bundle.bits
                ) >= half:
                    lemma1[a] += 1

    return TrialStats(
        instance_id=instance_id,
        n=inst.n,
        m=inst.m,
        copies=params.copies,
        threshold=params.threshold,
        ratio_target=target,
        agent_ids=agent_ids,
        surviving_ids=surviving,
        trials=trials,
        success_threshold=success_threshold,
        success_ratio=success_ratio,
        success_half=success_half,
        full_success_threshold=full_threshold,
        full_success_ratio=full_ratio,
        full_success_half=full_half,
        min_ratio_hist=hist,
        lemma1_counts=lemma1,
    )


# -- reports -------------------------------------------------------------------


def _report_row(stats: TrialStats) -> str:
    monitor = stats.lemma1_monitor()
    return ",".join(
        [
            stats.instance_id,
            str(stats.n),
            str(stats.m),
            str(stats.copies),
            str(stats.threshold),
            repr(stats.per_agent_fail_rate()),
            repr(0.75**stats.copies),
            repr(stats.full_success_rate()),
            "" if monitor is None else repr(monitor),
        ]
    )


def render_report_csv(stats_list: Sequence[TrialStats]) -> str:
    """Deterministic CSV report (fixed header, one row per instance)."""
    lines = [REPORT_HEADER]
    lines.extend(_report_row(s) for s in stats_list)
    return "\n".join(lines) + "\n"


def _svg_success_vs_copies(stats_list: Sequence[TrialStats]) -> str:
    """Minimal self-contained SVG: mean full-success rate against t."""
    groups: dict[int, list[float]] = {}
    for s in stats_list:
        groups.setdefault(s.copies, []).append(s.full_success_rate())
    pts = sorted((t, sum(v) / len(v)) for t, v in groups.items())
    width, height, margin = 640, 400, 60
    ts = [t for t, _ in pts] or [0, 1]
    t_lo, t_hi = min(ts), max(ts)
    span = max(t_hi - t_lo, 1)

    def xpos(t):
        return margin + (width - 2 * margin) * (t - t_lo) / span

    def ypos(r):
        return height - margin - (height - 2 * margin) * r

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width // 2}" y="{height - margin // 3}" text-anchor="middle" '
        f'font-size="14">rounding copies t</text>',
        f'<text x="{margin // 3}" y="{height // 2}" text-anchor="middle" '
        f'font-size="14" transform="rotate(-90 {margin // 3} {height // 2})">'
        f'mean full-success rate</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        y = ypos(frac)
        parts.append(
            f'<text x="{margin - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-size="12">{frac:.1f}</text>'
        )
    if pts:
        coords = " ".join(f"{xpos(t):.1f},{ypos(r):.1f}" for t, r in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>'
        )
        for t, r in pts:
            parts.append(
                f'<circle cx="{xpos(t):.1f}" cy="{ypos(r):.1f}" r="4" fill="steelblue"/>'
            )
            parts.append(
                f'<text x="{xpos(t):.1f}" y="{height - margin + 18}" '
                f'text-anchor="middle" font-size="12">{t}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(
    stats_list: Sequence[TrialStats],
    out_dir: str,
    csv_name: str = "bench.csv",
    svg_name: Optional[str] = None,
) -> list[str]:
    """Write the CSV report (and optionally an SVG chart); returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    csv_path = os.path.join(out_dir, csv_name)
    with open(csv_path, "w", newline="") as fh:
        fh.write(render_report_csv(stats_list))
    paths.append(csv_path)
    if svg_name:
        svg_path = os.path.join(out_dir, svg_name)
        with open(svg_path, "w") as fh:
            fh.write(_svg_success_vs_copies(stats_list))
        paths.append(svg_path)
    return paths


def bench_corpus(
    spec: CorpusSpec,
    trials: int,
    out_dir: Optional[str] = None,
    svg: bool = False,
) -> tuple[list[TrialStats], list[str]]:
    """Run the corpus end to end; each instance gets its own derived seed."""
    stats_list = []
    for idx, (instance_id, inst) in enumerate(generate_corpus(spec)):
        params = AlgoParams.for_instance(
            inst.n, seed=stream_seed(spec.seed, 1_000_000 + idx)
        )
        stats_list.append(run_trials(inst, params, trials, instance_id=instance_id))
    paths = []
    if out_dir is not None:
        paths = emit_report(
            stats_list,
            out_dir,
            svg_name="success_vs_t.svg" if svg else None,
        )
    return stats_list, paths
