"""Monte-Carlo experiment: how often does ancestral decomposition settle HTC-inconclusive graphs?

For every cell ``(n, p, q)`` of a grid, random graphs are drawn until
``target_count`` of them are neither HTC-identifiable nor HTC-unidentifiable.
The proportion of those that :func:`~trekid.identify.ancestral_identifiable`
proves identifiable is ``a``; ``b`` averages ``a`` over the ``p`` grid.

Graph ``i`` of a cell always comes from its own generator seeded by
``(master_seed, n, p, q, i)``, and graphs are consumed in index order, so the
output does not depend on how many worker processes do the screening.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import count as counter
from pathlib import Path

import numpy as np

from .errors import BudgetExhaustedError
from .formats import write_graph
from .graph import MixedGraph
from .graphgen import GenConfig, random_mixed_graph
from .identify import ancestral_identifiable, htc_identifiable, htc_unidentifiable

HTCI = "htci"
HTCU = "htcu"
INCONCLUSIVE = "inconclusive"

CELL_FIELDS = ("n", "p", "q", "seed", "generated", "htci", "htcu", "inconclusive", "alg1_yes", "a")
AGGREGATE_FIELDS = ("n", "q", "b")


@dataclass(frozen=True)
class SimConfig:
    n_values: tuple[int, ...]
    p_values: tuple[float, ...]
    q_values: tuple[float, ...]
    target_count: int
    master_seed: int = 0
    workers: int = 1
    max_attempts: int | None = None
    chunk_size: int = 500
    persist_dir: str | None = None

    def __post_init__(self) -> None:
        for name in ("n_values", "p_values", "q_values"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        if self.target_count < 1:
            raise ValueError(f"target_count must be at least 1, got {self.target_count}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        if self.chunk_size < 1:
            raise ValueError(f"chunk_size must be at least 1, got {self.chunk_size}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned value, got {self.master_seed}")
        for n in self.n_values:
            GenConfig(n, 0.0, 0.0)
        for p in self.p_values:
            GenConfig(1, p, 0.0)
        for q in self.q_values:
            GenConfig(1, 0.0, q)

    @property
    def budget(self) -> int:
        if self.max_attempts is not None:
            return self.max_attempts
        return 500 * self.target_count

    @classmethod
    def from_dict(cls, doc: dict) -> SimConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, path: str | Path) -> SimConfig:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        doc = asdict(self)
        for name in ("n_values", "p_values", "q_values"):
            doc[name] = list(doc[name])
        return doc


@dataclass(frozen=True)
class SimRecord:
    n: int
    p: float
    q: float
    seed: int
    generated: int
    htci: int
    htcu: int
    inconclusive: int
    alg1_yes: int
    exhausted: bool = False

    @property
    def a(self) -> float:
        return self.alg1_yes / self.inconclusive if self.inconclusive else math.nan


@dataclass(frozen=True)
class CellScreen:
    """Retained graphs of one cell with their sequence indices and ancestral-decomposition outcomes."""

    record: SimRecord
    indices: tuple[int, ...]
    graphs: tuple[MixedGraph, ...]
    alg1: tuple[bool, ...]


@dataclass(frozen=True)
class ExperimentResult:
    records: tuple[SimRecord, ...]
    aggregate: tuple[tuple[int, float, float], ...]
    failures: tuple[str, ...] = field(default=())


def graph_seed(master_seed: int, n: int, p: float, q: float, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([master_seed, n, round(p * 1e6), round(q * 1e6), index])


def cell_graph(master_seed: int, n: int, p: float, q: float, index: int) -> MixedGraph:
    """Graph number ``index`` of cell ``(n, p, q)``."""
    rng = np.random.default_rng(graph_seed(master_seed, n, p, q, index))
    return random_mixed_graph(GenConfig(n, p, q), rng)


def screen(G: MixedGraph) -> str:
    """``htci``, ``htcu`` or ``inconclusive``.

    The generated graphs have a connected bidirected part, so the per-component
    unidentifiability test sees the whole graph.
    """
    if htc_identifiable(G).identified:
        return HTCI
    if htc_unidentifiable(G).unidentifiable:
        return HTCU
    return INCONCLUSIVE


def _screen_chunk(args: tuple[int, int, float, float, int, int]) -> list[tuple[str, bool]]:
    master_seed, n, p, q, start, stop = args
    out = []
    for i in range(start, stop):
        outcome = screen(cell_graph(master_seed, n, p, q, i))
        if outcome == INCONCLUSIVE:
            # recomputed from the index by the parent, so only the verdict travels back
            out.append((outcome, ancestral_identifiable(cell_graph(master_seed, n, p, q, i)).identified))
        else:
            out.append((outcome, False))
    return out


def find_inconclusive(
    n: int,
    p: float,
    q: float,
    count: int,
    master_seed: int = 0,
    max_attempts: int | None = None,
    executor: Executor | None = None,
    workers: int = 1,
    chunk_size: int = 500,
) -> CellScreen:
    """Draw graphs until ``count`` are HTC-inconclusive.

    Raises:
        BudgetExhaustedError: after ``max_attempts`` draws (default ``500 * count``);
            its ``partial`` attribute holds the :class:`CellScreen` so far.
    """
    GenConfig(n, p, q)
    budget = 500 * count if max_attempts is None else max_attempts
    tallies = {HTCI: 0, HTCU: 0, INCONCLUSIVE: 0}
    indices: list[int] = []
    alg1: list[bool] = []
    generated = 0
    starts = counter(0, chunk_size)
    while len(indices) < count and generated < budget:
        batch = []
        for _ in range(workers if executor is not None else 1):
            start = next(starts)
            if start >= budget:
                break
            batch.append((master_seed, n, p, q, start, min(start + chunk_size, budget)))
        results = executor.map(_screen_chunk, batch) if executor is not None else map(_screen_chunk, batch)
        for (*_, start, _stop), chunk in zip(batch, results):
            for offset, (outcome, solved) in enumerate(chunk):
                if len(indices) == count:
                    break
                generated += 1
                tallies[outcome] += 1
                if outcome == INCONCLUSIVE:
                    indices.append(start + offset)
                    alg1.append(solved)
    exhausted = len(indices) < count
    record = SimRecord(
        n, p, q, master_seed, generated,
        tallies[HTCI], tallies[HTCU], tallies[INCONCLUSIVE], sum(alg1), exhausted,
    )
    result = CellScreen(
        record,
        tuple(indices),
        tuple(cell_graph(master_seed, n, p, q, i) for i in indices),
        tuple(alg1),
    )
    if exhausted:
        err = BudgetExhaustedError(
            f"cell n={n} p={p} q={q}: {len(indices)} of {count} inconclusive graphs "
            f"after {generated} draws"
        )
        err.partial = result
        raise err
    return result


def aggregate(records, p_values) -> tuple[tuple[int, float, float], ...]:
    """``b[n, q]``: mean of ``a`` over ``p_values`` (NaN if any cell is missing or empty)."""
    a = {(r.n, r.p, r.q): r.a for r in records}
    keys = sorted({(r.n, r.q) for r in records})
    out = []
    for n, q in keys:
        values = [a.get((n, p, q), math.nan) for p in p_values]
        out.append((n, q, sum(values) / len(values)))
    return tuple(out)


def _persist(screened: CellScreen, root: Path) -> None:
    r = screened.record
    cell_dir = root / f"n{r.n}_p{r.p:g}_q{r.q:g}"
    cell_dir.mkdir(parents=True, exist_ok=True)
    for index, G in zip(screened.indices, screened.graphs):
        write_graph(G, cell_dir / f"{index:08d}.graph")


def run_experiment(config: SimConfig) -> ExperimentResult:
    """Screen every cell of the grid; exhausted cells are reported, not fatal."""
    records = []
    failures = []
    executor = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
    try:
        for n in config.n_values:
            for p in config.p_values:
                for q in config.q_values:
                    try:
                        screened = find_inconclusive(
                            n, p, q, config.target_count, config.master_seed, config.budget,
                            executor, config.workers, config.chunk_size,
                        )
                    except BudgetExhaustedError as exc:
                        screened = exc.partial
                        failures.append(str(exc))
                    records.append(screened.record)
                    if config.persist_dir is not None:
                        _persist(screened, Path(config.persist_dir))
    finally:
        if executor is not None:
            executor.shutdown()
    return ExperimentResult(tuple(records), aggregate(records, config.p_values), tuple(failures))


def load_cell_corpus(directory: str | Path) -> list[MixedGraph]:
    """Graphs persisted for one cell, in sequence order."""
    from .formats import read_graph

    return [read_graph(path) for path in sorted(Path(directory).glob("*.graph"))]


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def write_cells_csv(records, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CELL_FIELDS)
        for r in records:
            w.writerow([r.n, repr(r.p), repr(r.q), r.seed, r.generated, r.htci, r.htcu,
                        r.inconclusive, r.alg1_yes, _fmt(r.a)])


def write_aggregate_csv(rows, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_FIELDS)
        for n, q, b in rows:
            w.writerow([n, repr(q), _fmt(b)])


def write_gnuplot(rows, path: str | Path) -> None:
    """One data block per ``n`` with columns ``q b``, blocks separated by two blank lines."""
    blocks = []
    for n in sorted({n for n, _, _ in rows}):
        lines = [f"# n={n}", "# q b"]
        lines += [f"{q!r} {_fmt(b)}" for m, q, b in rows if m == n]
        blocks.append("\n".join(lines))
    Path(path).write_text("\n\n\n".join(blocks) + "\n")


def write_outputs(result: ExperimentResult, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"cells": out / "cells.csv", "aggregate": out / "aggregate.csv", "gnuplot": out / "b.dat"}
    write_cells_csv(result.records, paths["cells"])
    write_aggregate_csv(result.aggregate, paths["aggregate"])
    write_gnuplot(result.aggregate, paths["gnuplot"])
    return paths
