import math

import pytest

from plankforge.degrade import NoiseConfig, inject_noise, strip_hidden
from plankforge.program import resolve
from plankforge.projection import count_edges, hidden_fraction, project

from conftest import make_programs


def edges_by_view(d):
    return {v.name: set(v.edges) for v in d.views()}


class TestInjectNoise:
    def test_zero_ratio_identity(self, cabinet_program):
        d = project(resolve(cabinet_program))
        out = inject_noise(d, NoiseConfig(ratio=0.0, seed=1))
        assert edges_by_view(out) == edges_by_view(d)

    def test_full_delete_empties(self, cabinet_program):
        d = project(resolve(cabinet_program))
        out = inject_noise(d, NoiseConfig(ratio=1.0, delete_prob=1.0, seed=1))
        assert count_edges(out) == 0

    def test_exact_affected_count(self):
        # A 20-edge drawing with ratio 0.3 touches exactly ceil(6) = 6 edges.
        for prog in make_programs(30, seed=71):
            d = project(resolve(prog))
            if count_edges(d) == 20:
                break
        else:
            pytest.skip("no 20-edge sample in the batch")
        config = NoiseConfig(ratio=0.3, delete_prob=1.0, max_shift_frac=0.0, seed=9)
        out = inject_noise(d, config)
        assert count_edges(out) == 14
        again = inject_noise(d, config)
        assert edges_by_view(again) == edges_by_view(out)

    def test_determinism(self, cabinet_program):
        d = project(resolve(cabinet_program))
        config = NoiseConfig(ratio=0.4, seed=123)
        assert edges_by_view(inject_noise(d, config)) == edges_by_view(inject_noise(d, config))
        other = inject_noise(d, NoiseConfig(ratio=0.4, seed=124))
        assert edges_by_view(other) != edges_by_view(inject_noise(d, config))

    def test_perturbed_edges_stay_collinear(self, cabinet_program):
        d = project(resolve(cabinet_program))
        out = inject_noise(d, NoiseConfig(ratio=1.0, delete_prob=0.0, seed=5))
        originals = edges_by_view(d)
        for view in out.views():
            for e in view.edges:
                assert e.x1 == e.x2 or e.y1 == e.y2  # axis-aligned shifts only
                collinear = [
                    o
                    for o in originals[view.name]
                    if (o.x1 == o.x2 == e.x1 == e.x2) or (o.y1 == o.y2 == e.y1 == e.y2)
                ]
                assert collinear, e
                assert e.visible in {o.visible for o in collinear}

    def test_edge_budget_invariant(self, cabinet_program):
        d = project(resolve(cabinet_program))
        n = count_edges(d)
        out = inject_noise(d, NoiseConfig(ratio=0.5, delete_prob=0.5, seed=77))
        affected = math.ceil(0.5 * n)
        # |out| = |in| - deleted - degenerate; both are subsets of affected.
        assert n - affected <= count_edges(out) <= n

    def test_visibility_and_view_preserved(self, cabinet_program):
        d = project(resolve(cabinet_program))
        out = inject_noise(d, NoiseConfig(ratio=1.0, delete_prob=0.0, max_shift_frac=0.05, seed=3))
        for before, after in zip(d.views(), out.views()):
            assert before.name == after.name
            assert len(after.edges) <= len(before.edges)


class TestStripHidden:
    def test_single_cuboid_unchanged(self, unit_box):
        d = project([unit_box])
        assert edges_by_view(strip_hidden(d)) == edges_by_view(d)

    def test_drops_exactly_hidden(self, cabinet_program):
        d = project(resolve(cabinet_program))
        hidden = sum(1 for v in d.views() for e in v.edges if not e.visible)
        out = strip_hidden(d)
        assert count_edges(out) == count_edges(d) - hidden
        assert all(e.visible for v in out.views() for e in v.edges)

    def test_corpus_removal_fraction(self):
        fracs = []
        for prog in make_programs(10, seed=101):
            d = project(resolve(prog))
            out = strip_hidden(d)
            if count_edges(d):
                fracs.append(1 - count_edges(out) / count_edges(d))
            assert abs((1 - count_edges(out) / count_edges(d)) - hidden_fraction(d)) < 1e-12
        assert fracs
