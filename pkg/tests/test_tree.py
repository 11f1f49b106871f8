import math

import numpy as np
import pytest
from conftest import newick_edge_set, parse_newick

from phylodrift import SimConfig, TypeRecord, simulate
from phylodrift.seeding import derive_seed, make_generator
from phylodrift.tree import (
    AttachmentRule,
    PhyloTree,
    attach,
    attachment_generator,
    build_tree,
    export_newick,
    stats_to_csv,
    tree_stats,
    write_newick,
)


def rec(type_id, fitness, birth=0.0, death=None):
    return TypeRecord(id=type_id, fitness=fitness, birth_time=birth, death_time=death)


class TestAttach:
    def test_max_fitness_picks_argmax(self, rng):
        alive = [rec(3, 0.2), rec(5, 0.8)]
        newborn = rec(7, 0.4, birth=1.0)
        assert attach(AttachmentRule.MAX_FITNESS, alive, newborn, rng) == 5

    def test_singleton_either_rule(self, rng):
        alive = [rec(3, 0.2)]
        newborn = rec(7, 0.4, birth=1.0)
        assert attach(AttachmentRule.MAX_FITNESS, alive, newborn, rng) == 3
        assert attach(AttachmentRule.RANDOM_ALIVE, alive, newborn, rng) == 3

    def test_random_is_uniform(self, rng):
        alive = [rec(i, 0.1 * (i + 1)) for i in range(4)]
        newborn = rec(9, 0.5, birth=1.0)
        n = 10_000
        counts = np.zeros(4)
        for _ in range(n):
            counts[attach(AttachmentRule.RANDOM_ALIVE, alive, newborn, rng)] += 1
        se = math.sqrt(0.25 * 0.75 / n)
        assert np.all(np.abs(counts / n - 0.25) < 3 * se)

    def test_empty_alive_set_rejected(self, rng):
        with pytest.raises(ValueError):
            attach(AttachmentRule.MAX_FITNESS, [], rec(1, 0.5, birth=1.0), rng)

    def test_newborn_must_not_be_alive(self, rng):
        newborn = rec(1, 0.5, birth=1.0)
        with pytest.raises(ValueError):
            attach(AttachmentRule.RANDOM_ALIVE, [newborn], newborn, rng)


class TestBuildTree:
    @pytest.mark.parametrize("rule", list(AttachmentRule))
    @pytest.mark.parametrize("lam,horizon", [(0.8, 25.0), (2.0, 5.0)])
    def test_parents_alive_at_birth(self, rule, lam, horizon):
        res = simulate(SimConfig(lam=lam, horizon=horizon, seed=606))
        tree = build_tree(res, rule, attachment_generator(606))
        tree.validate()
        assert set(tree.nodes) == set(range(len(res.ledger)))

    def test_max_rule_equals_per_birth_attach_scan(self):
        # the running-record shortcut must match a literal argmax over the
        # alive set at every birth
        res = simulate(SimConfig(lam=1.5, horizon=8.0, seed=17))
        tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(17))
        alive = {0}
        expected = {}
        for i in range(len(res.log)):
            type_id = int(res.log.type_ids[i])
            if res.log.kinds[i] == 0:
                candidates = [res.ledger[j] for j in sorted(alive)]
                expected[type_id] = attach(
                    AttachmentRule.MAX_FITNESS,
                    candidates,
                    res.ledger[type_id],
                    make_generator(0),
                )
                alive.add(type_id)
            else:
                alive.remove(type_id)
        assert tree.parents == expected

    def test_same_seed_same_tree(self):
        res = simulate(SimConfig(lam=1.0, horizon=20.0, seed=9))
        t1 = build_tree(res, AttachmentRule.RANDOM_ALIVE, attachment_generator(9))
        t2 = build_tree(res, AttachmentRule.RANDOM_ALIVE, attachment_generator(9))
        assert t1.parents == t2.parents

    def test_attachment_stream_separate_from_core(self):
        # same trajectory seed, trees built under both rules: the trajectory
        # data is untouched, so any estimate computed from it cannot move
        cfg = SimConfig(lam=1.0, horizon=20.0, seed=9)
        res1 = simulate(cfg)
        build_tree(res1, AttachmentRule.MAX_FITNESS, attachment_generator(9))
        res2 = simulate(cfg)
        build_tree(res2, AttachmentRule.RANDOM_ALIVE, attachment_generator(9))
        assert res1.log.equals(res2.log)
        assert np.array_equal(res1.ledger.fitness, res2.ledger.fitness)

    def test_rejects_missing_ledger(self):
        res = simulate(SimConfig(lam=1.0, horizon=5.0, seed=9), keep_ledger=False)
        with pytest.raises(ValueError):
            build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(9))


class TestNewick:
    def test_root_only(self):
        tree = PhyloTree(nodes={0: rec(0, 0.5)}, parents={})
        assert export_newick(tree) == "t0;"

    def test_single_child(self):
        tree = PhyloTree(
            nodes={0: rec(0, 0.5), 1: rec(1, 0.7, birth=1.5)}, parents={1: 0}
        )
        assert export_newick(tree) == "(t1:1.5)t0;"

    def test_pendant_leaf_form(self):
        tree = PhyloTree(
            nodes={0: rec(0, 0.5), 1: rec(1, 0.7, birth=1.5)}, parents={1: 0}
        )
        assert export_newick(tree, pendant_leaves=True) == "(t1:1.5,t0:0.0);"

    def test_round_trip_against_independent_parser(self):
        res = simulate(SimConfig(lam=1.2, horizon=10.0, seed=23))
        tree = build_tree(res, AttachmentRule.RANDOM_ALIVE, attachment_generator(23))
        parsed = parse_newick(export_newick(tree))
        got = newick_edge_set(parsed)
        want = {
            (f"t{parent}", f"t{child}",
             tree.nodes[child].birth_time - tree.nodes[parent].birth_time)
            for child, parent in tree.parents.items()
        }
        assert got == want

    def test_terminates_with_semicolon_and_writes_file(self, tmp_path):
        res = simulate(SimConfig(lam=0.8, horizon=10.0, seed=41))
        tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(41))
        path = tmp_path / "tree.nwk"
        write_newick(tree, path)
        text = path.read_text(encoding="utf-8")
        assert text.endswith(";\n")

    def test_exclude_dead_keeps_alive_and_ancestors(self):
        res = simulate(SimConfig(lam=1.0, horizon=30.0, seed=77))
        tree = build_tree(res, AttachmentRule.RANDOM_ALIVE, attachment_generator(77))
        parsed = parse_newick(export_newick(tree, include_dead=False))
        labels = {lbl for (lbl, _len, _kids) in _walk(parsed)}
        alive = {f"t{i}" for i in res.ledger.alive_ids()}
        assert alive <= labels
        # everything kept is alive or has an alive descendant
        for label in labels:
            node_id = int(label[1:])
            assert _has_alive_descendant(tree, res, node_id)


def _walk(parsed):
    yield parsed
    for child in parsed[2]:
        yield from _walk(child)


def _has_alive_descendant(tree, res, node_id):
    children = tree.children()
    stack = [node_id]
    while stack:
        cur = stack.pop()
        if res.ledger[cur].death_time is None:
            return True
        stack.extend(children.get(cur, []))
    return False


class TestTreeStats:
    def test_no_births(self):
        res = simulate(SimConfig(lam=0.0001, horizon=5.0, seed=10))
        if len(res.log):
            pytest.skip("rare birth occurred")
        tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(10))
        stats = tree_stats(tree, res.log)
        assert stats.mean_coexisting == 1.0
        assert np.allclose(stats.dwell_durations, [5.0])

    @pytest.mark.parametrize("lam,horizon,seed", [(0.7, 40.0, 3), (2.0, 6.0, 3)])
    def test_dwells_partition_horizon(self, lam, horizon, seed):
        res = simulate(SimConfig(lam=lam, horizon=horizon, seed=seed))
        tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(seed))
        stats = tree_stats(tree, res.log)
        assert math.isclose(stats.dwell_durations.sum(), horizon, rel_tol=1e-12)

    def test_mean_coexisting_increases_with_lam(self):
        # paired seeds; the chain's upward drift is monotone in lam
        means = {}
        for lam in (0.5, 0.9):
            vals = []
            for k in range(40):
                cfg = SimConfig(lam=lam, horizon=40.0, seed=derive_seed(640, k))
                res = simulate(cfg)
                tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(k))
                vals.append(tree_stats(tree, res.log).mean_coexisting)
            means[lam] = np.mean(vals)
        assert means[0.5] < means[0.9]

    def test_longest_dwell_fraction_separates_regimes(self):
        # subcritical: the longest dwell stays a fixed fraction of the horizon;
        # supercritical: that fraction decays as the horizon grows
        def median_fraction(lam, horizons, master):
            out = []
            for horizon in horizons:
                fr = []
                for k in range(30):
                    cfg = SimConfig(lam=lam, horizon=horizon, seed=derive_seed(master, k))
                    res = simulate(cfg)
                    tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(k))
                    stats = tree_stats(tree, res.log)
                    fr.append(stats.dwell_durations[-1] / horizon)
                out.append(float(np.median(fr)))
            return out

        sub = median_fraction(0.5, [50.0, 100.0, 200.0], 11)
        assert min(sub) > 0.2
        sup = median_fraction(2.0, [5.0, 7.0, 9.0], 12)
        assert sup[0] > sup[1] > sup[2]

    def test_stats_csv(self, tmp_path):
        res = simulate(SimConfig(lam=1.0, horizon=10.0, seed=14))
        tree = build_tree(res, AttachmentRule.MAX_FITNESS, attachment_generator(14))
        stats = tree_stats(tree, res.log)
        path = tmp_path / "stats.csv"
        stats_to_csv(stats, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "statistic,value"
        assert lines[1].startswith("mean_coexisting,")
        assert len(lines) == 2 + stats.dwell_durations.size
