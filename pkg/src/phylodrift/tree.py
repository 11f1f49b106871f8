"""Phylogenetic tree construction over simulated types, plus export and stats.

The core process never prescribes how a newborn attaches to the existing
types, and none of the persistence quantities depend on it.  Two natural
rules are provided: attach to the currently fittest type, or to an alive type
chosen uniformly at random.  Attachment consumes its own generator stream, so
building a tree (under either rule) cannot perturb the event/fitness stream
of the trajectory it decorates.

Edge lengths are a convention of this package, not a model quantity: the
branch to a child spans ``child.birth_time - parent.birth_time``.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import InvariantViolationError
from .population import EventLog, Ledger, SimResult, TypeRecord
from .seeding import derive_seed, make_generator

#: Stream key separating attachment draws from the trajectory's own stream.
TREE_STREAM_KEY = 0x74726565


def attachment_generator(trajectory_seed: int) -> np.random.Generator:
    """Generator for attachment draws, derived from the trajectory seed.

    Keeping attachment on its own stream means the same trajectory yields the
    same tree per rule, and building a tree can never perturb the core
    event/fitness stream.
    """
    return make_generator(derive_seed(trajectory_seed, TREE_STREAM_KEY))


class AttachmentRule(enum.Enum):
    MAX_FITNESS = "max"
    RANDOM_ALIVE = "random"


def attach(
    rule: AttachmentRule,
    alive: Sequence[TypeRecord],
    newborn: TypeRecord,
    rng: np.random.Generator,
) -> int:
    """Pick the parent for ``newborn`` among the types alive at its birth.

    ``alive`` must be nonempty and must not contain the newborn.  The random
    rule consumes exactly one draw, uniform over ``alive`` ordered by id.
    """
    if len(alive) == 0:
        raise ValueError("cannot attach to an empty alive set")
    if any(rec.id == newborn.id for rec in alive):
        raise ValueError("newborn must not be part of the alive set")
    if rule is AttachmentRule.MAX_FITNESS:
        best = max(alive, key=lambda rec: (rec.fitness, -rec.id))
        return best.id
    ordered = sorted(alive, key=lambda rec: rec.id)
    return ordered[int(rng.integers(0, len(ordered)))].id


@dataclass
class PhyloTree:
    """Tree over type records: one root (id 0), edges child -> parent."""

    nodes: dict[int, TypeRecord]
    parents: dict[int, int]
    root: int = 0

    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {i: [] for i in self.nodes}
        for child, parent in sorted(self.parents.items()):
            out[parent].append(child)
        return out

    def validate(self) -> None:
        """Structural checks: parentage respects birth order and lifespans."""
        if self.root != 0 or 0 not in self.nodes:
            raise InvariantViolationError("tree root must be type 0")
        for child, parent in self.parents.items():
            c, p = self.nodes[child], self.nodes[parent]
            if not parent < child:
                raise InvariantViolationError(f"parent id {parent} not below child id {child}")
            if not p.birth_time < c.birth_time:
                raise InvariantViolationError(
                    f"parent {parent} born at {p.birth_time} after child {child}"
                )
            if p.death_time is not None and p.death_time <= c.birth_time:
                raise InvariantViolationError(
                    f"parent {parent} was dead when child {child} was born"
                )
        for node_id in self.nodes:
            if node_id != self.root and node_id not in self.parents:
                raise InvariantViolationError(f"type {node_id} has no parent link")


def build_tree(
    source: SimResult | tuple[Ledger, EventLog],
    rule: AttachmentRule,
    rng: np.random.Generator,
) -> PhyloTree:
    """Replay a finished trajectory and attach every newborn per ``rule``.

    Pass the generator dedicated to attachment (derive it from the trajectory
    seed with a distinct stream key), never the trajectory's own.  For the
    max-fitness rule the parent is read off the running record holder, which
    equals the alive-set argmax because the record holder cannot die; a test
    pins that shortcut against per-birth :func:`attach` scans.
    """
    if isinstance(source, SimResult):
        if source.ledger is None or source.log is None:
            raise ValueError("tree construction needs both the ledger and the event log")
        ledger, log = source.ledger, source.log
    else:
        ledger, log = source

    nodes: dict[int, TypeRecord] = {0: ledger[0]}
    parents: dict[int, int] = {}
    alive_ids = [0]
    max_id = 0
    max_fitness = float(ledger.fitness[0])

    for i in range(len(log)):
        ev_time = float(log.times[i])
        type_id = int(log.type_ids[i])
        if log.kinds[i] == 0:  # birth
            if rule is AttachmentRule.MAX_FITNESS:
                parent = max_id
            else:
                parent = alive_ids[int(rng.integers(0, len(alive_ids)))]
            parents[type_id] = parent
            nodes[type_id] = replace(ledger[type_id], parent_id=parent)
            alive_ids.append(type_id)
            f = float(ledger.fitness[type_id])
            if f > max_fitness:
                max_fitness = f
                max_id = type_id
        else:
            pos = bisect_left(alive_ids, type_id)
            if pos >= len(alive_ids) or alive_ids[pos] != type_id:
                raise InvariantViolationError(
                    f"death of type {type_id} at t={ev_time} but it is not alive"
                )
            alive_ids.pop(pos)
    return PhyloTree(nodes=nodes, parents=parents)


def _format_length(x: float) -> str:
    return repr(float(x))


def export_newick(
    tree: PhyloTree,
    include_dead: bool = True,
    pendant_leaves: bool = False,
) -> str:
    """Serialize the tree as Newick text, labels ``t<id>``, lengths in model time.

    A type that has children appears as a labeled internal node (for example
    ``(t1:1.5)t0;``).  With ``pendant_leaves=True`` such a type is instead
    converted to the leaf-only standard form by hanging a zero-length pendant
    leaf under an unlabeled internal node.  With ``include_dead=False`` only
    alive types and their ancestors are kept.
    """
    keep = set(tree.nodes)
    if not include_dead:
        keep = set()
        for node_id, rec in tree.nodes.items():
            if rec.death_time is None:
                cursor = node_id
                while cursor not in keep:
                    keep.add(cursor)
                    if cursor == tree.root:
                        break
                    cursor = tree.parents[cursor]
    children = {i: [] for i in keep}
    for child, parent in sorted(tree.parents.items()):
        if child in keep:
            children[parent].append(child)

    rendered: dict[int, str] = {}
    # post-order over an explicit stack: trees can be deep
    stack: list[tuple[int, bool]] = [(tree.root, False)]
    while stack:
        node_id, expanded = stack.pop()
        if not expanded:
            stack.append((node_id, True))
            for child in children[node_id]:
                stack.append((child, False))
            continue
        label = f"t{node_id}"
        kids = children[node_id]
        if not kids:
            rendered[node_id] = label
        else:
            parts = [
                rendered[c]
                + ":"
                + _format_length(tree.nodes[c].birth_time - tree.nodes[node_id].birth_time)
                for c in kids
            ]
            if pendant_leaves:
                parts.append(f"{label}:0.0")
                rendered[node_id] = "(" + ",".join(parts) + ")"
            else:
                rendered[node_id] = "(" + ",".join(parts) + ")" + label
    return rendered[tree.root] + ";"


def write_newick(tree: PhyloTree, path, **kwargs) -> None:
    """One tree per file, UTF-8, trailing newline."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_newick(tree, **kwargs))
        fh.write("\n")


@dataclass(frozen=True)
class TreeStats:
    """Coexistence and dominance summary of one trajectory.

    ``mean_coexisting`` is the time average of the number of alive types over
    [0, horizon]; ``dwell_durations`` are the maximal intervals over which the
    record holder's identity stays constant, sorted ascending.  The dwells
    partition [0, horizon], so they sum to the horizon.
    """

    mean_coexisting: float
    dwell_durations: np.ndarray


def tree_stats(tree: PhyloTree, log: EventLog) -> TreeStats:
    """Compute :class:`TreeStats` for the trajectory the tree was built from."""
    if log.horizon is None:
        raise ValueError("event log must carry its horizon")
    horizon = float(log.horizon)

    # time average of n(t): n is 1 on [0, first event) and steps at events
    n = 1
    prev = 0.0
    area = 0.0
    for i in range(len(log)):
        te = float(log.times[i])
        area += n * (te - prev)
        prev = te
        n += 1 if log.kinds[i] == 0 else -1
    area += n * (horizon - prev)
    mean_coexisting = area / horizon if horizon > 0 else float(n)

    # record-holder switch times: births whose fitness beats the running max
    switch_times = []
    best = tree.nodes[0].fitness
    for node_id in sorted(tree.nodes):
        if node_id == 0:
            continue
        rec = tree.nodes[node_id]
        if rec.fitness > best:
            best = rec.fitness
            switch_times.append(rec.birth_time)
    bounds = [0.0] + switch_times + [horizon]
    dwells = np.diff(np.asarray(bounds))
    return TreeStats(
        mean_coexisting=float(mean_coexisting),
        dwell_durations=np.sort(dwells),
    )


def stats_to_csv(stats: TreeStats, path) -> None:
    """CSV rows: one ``mean_coexisting`` row then one row per dwell."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("statistic,value\n")
        fh.write(f"mean_coexisting,{stats.mean_coexisting!r}\n")
        for d in stats.dwell_durations:
            fh.write(f"dwell,{float(d)!r}\n")
