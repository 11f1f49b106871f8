"""Shared test helpers: independent replay oracles and a Newick reader.

Everything here re-derives quantities from raw logs/ledgers without touching
the engine's internal counters, so tests that use these helpers check the
simulator against independent bookkeeping.
"""

from __future__ import annotations

import math

import numpy as np
import pytest


def replay_alive_sets(log, ledger):
    """Yield (event index, time, kind, alive id set) stepping through a log.

    The alive set reflects the state immediately *after* each event.
    """
    alive = {0}
    for i in range(len(log)):
        kind = int(log.kinds[i])
        type_id = int(log.type_ids[i])
        if kind == 0:
            alive.add(type_id)
        else:
            alive.remove(type_id)
        yield i, float(log.times[i]), kind, set(alive)


def assert_record_holder_immortal(log, ledger):
    """Oracle: at every event, the alive argmax equals the ever-born argmax."""
    for i, t, kind, alive in replay_alive_sets(log, ledger):
        born = int(np.searchsorted(ledger.birth_times, t, side="right"))
        ever_argmax = int(np.argmax(ledger.fitness[:born]))
        alive_ids = sorted(alive)
        alive_argmax = alive_ids[int(np.argmax(ledger.fitness[alive_ids]))]
        assert alive_argmax == ever_argmax, f"record holder mismatch at event {i}"
        if kind == 1:
            assert int(log.type_ids[i]) != ever_argmax, (
                f"death event {i} killed the record holder"
            )


def parse_newick(text: str):
    """Minimal standard-conforming Newick reader.

    Returns nested ``(label, length, children)`` tuples; length is ``None``
    when absent.  Only the plain subset (labels, ``:length``, parentheses,
    commas, semicolon) is supported, which is all the exporter emits.
    """
    text = text.strip()
    if not text.endswith(";"):
        raise ValueError("newick text must end with ';'")
    pos = 0

    def parse_clade():
        nonlocal pos
        children = []
        if text[pos] == "(":
            pos += 1
            while True:
                children.append(parse_clade())
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise ValueError(f"unexpected character {text[pos]!r} at {pos}")
        start = pos
        while pos < len(text) and text[pos] not in ",():;":
            pos += 1
        label = text[start:pos] or None
        length = None
        if pos < len(text) and text[pos] == ":":
            pos += 1
            start = pos
            while pos < len(text) and text[pos] not in ",();":
                pos += 1
            length = float(text[start:pos])
        return (label, length, children)

    tree = parse_clade()
    if text[pos] != ";":
        raise ValueError("trailing content after the root clade")
    return tree


def newick_edge_set(parsed, parent_label=None):
    """Flatten a parsed Newick tree into {(parent_label, child_label, length)}."""
    label, length, children = parsed
    edges = set()
    if parent_label is not None:
        edges.add((parent_label, label, length))
    for child in children:
        edges |= newick_edge_set(child, label)
    return edges


@pytest.fixture
def rng():
    from phylodrift.seeding import make_generator

    return make_generator(20260809)
