import numpy as np
import pytest

from ididiv import (
    CandidateModelSet,
    SelectionConfig,
    builtin_tiger,
    canonical_encode,
    constant_tree,
    diversity_trace,
    generate_known_models,
    load_candidate_set,
    make_candidate_set,
    mdf,
    mdp,
    project_level0,
    save_candidate_set,
    select_topk,
    validate_tree,
)
from conftest import _det_model_2a


@pytest.fixture(scope="module")
def known3(tiger_j):
    return generate_known_models(tiger_j, 3, seed=0)


class TestConfig:
    def test_defaults(self):
        cfg = SelectionConfig()
        assert cfg.measure == "MDF"
        assert cfg.k_max == 10
        assert cfg.patience == 20

    def test_bad_measure(self):
        with pytest.raises(ValueError):
            SelectionConfig(measure="entropy")

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            SelectionConfig(k_max=0)
        with pytest.raises(ValueError):
            SelectionConfig(patience=0)
        with pytest.raises(ValueError):
            SelectionConfig(anchor_policy="spiral")


class TestCandidateSet:
    def test_defaults(self, fig_trees):
        cs = make_candidate_set(fig_trees, 2)
        assert cs.provenance == ("known",) * 4
        np.testing.assert_allclose(cs.prior, 0.25)
        assert cs.report.mdp_value == 7.5
        assert cs.measure is None
        assert cs.trace == ()

    def test_duplicate_trees_rejected(self, fig_trees):
        with pytest.raises(ValueError, match="duplicate"):
            make_candidate_set(fig_trees + [fig_trees[0]], 2)

    def test_bad_provenance(self, fig_trees):
        with pytest.raises(ValueError):
            make_candidate_set(fig_trees, 2, provenance=("known",) * 3)
        with pytest.raises(ValueError):
            make_candidate_set(fig_trees, 2, provenance=("stolen",) * 4)

    def test_bad_prior(self, fig_trees):
        with pytest.raises(ValueError):
            make_candidate_set(fig_trees, 2, prior=np.array([1.0, 0.0, 0.0]))
        with pytest.raises(ValueError):
            make_candidate_set(fig_trees, 2, prior=np.array([0.5, 0.5, 0.5, 0.5]))
        with pytest.raises(ValueError):
            make_candidate_set(fig_trees, 2, prior=np.array([-0.5, 0.5, 0.5, 0.5]))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            make_candidate_set([], 2)

    def test_prior_frozen(self, fig_trees):
        cs = make_candidate_set(fig_trees, 2)
        with pytest.raises(ValueError):
            cs.prior[0] = 1.0


class TestSelectTopk:
    def test_known_always_retained(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0))
        assert cs.trees[: len(known3)] == tuple(known3)
        assert cs.provenance[: len(known3)] == ("known",) * len(known3)
        assert all(p == "generated" for p in cs.provenance[len(known3):])

    def test_trees_valid_and_distinct(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0))
        encs = [canonical_encode(t) for t in cs.trees]
        assert len(set(encs)) == len(encs)
        for t in cs.trees:
            validate_tree(t, tiger_j.observations, depth=3, actions=tiger_j.actions)

    def test_trace_strictly_increasing(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0, k_max=12))
        vals = [v for _, v in cs.trace]
        sizes = [k for k, _ in cs.trace]
        assert sizes == list(range(len(known3), len(known3) + len(vals)))
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert cs.trace[0] == (len(known3), mdf(known3, 2))
        assert cs.trace[-1] == (len(cs.trees), mdf(list(cs.trees), 2))

    def test_pinned_regression_t3(self, tiger_j, known3):
        # Observed once under seed 0 and frozen as a determinism pin.  The
        # trace values are sums of small dyadic fractions, exact in floats.
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0, k_max=12))
        assert sum(1 for p in cs.provenance if p == "generated") == 3
        assert cs.trace == ((3, 7.25), (4, 7.5), (5, 7.75), (6, 9.5))

    def test_pinned_regression_t4(self):
        # Same pin at horizon 4, seed 4: four accepted additions.
        j = project_level0(builtin_tiger(4), "j")
        known = generate_known_models(j, 3, seed=4)
        cs = select_topk(known, j, SelectionConfig(seed=4, k_max=12))
        assert sum(1 for p in cs.provenance if p == "generated") == 4
        assert cs.trace[-1] == (7, 18.625)

    def test_k_max_cap(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=4, k_max=4))
        assert len(cs.trees) == 4

    def test_k_max_already_met(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0, k_max=3))
        assert cs.trees == tuple(known3)
        assert len(cs.trace) == 1

    def test_deterministic(self, tiger_j, known3):
        cfg = SelectionConfig(seed=8, k_max=9)
        a = select_topk(known3, tiger_j, cfg)
        b = select_topk(known3, tiger_j, cfg)
        assert a.trees == b.trees
        assert a.trace == b.trace

    def test_mdp_measure(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(measure="MDP", seed=0))
        assert cs.measure == "MDP"
        assert cs.trace[0] == (3, mdp(known3, 2))

    def test_uniform_anchor_policy(self, tiger_j, known3):
        cs = select_topk(
            known3, tiger_j, SelectionConfig(seed=0, anchor_policy="uniform")
        )
        assert len(cs.trees) >= 3

    def test_patience_stops_on_saturation(self):
        # One action: every sample duplicates the lone known tree, so the
        # loop must stop after exactly `patience` rejections.
        m = _det_model_2a()
        one = m.replace(
            actions=("a0",),
            transition=m.transition[:, :1],
            obs_fn=m.obs_fn[:, :1],
            reward=m.reward[:, :1],
        )
        known = [constant_tree("a0", one.observations, one.horizon)]
        cs = select_topk(known, one, SelectionConfig(seed=0, k_max=5, patience=3))
        assert cs.trees == tuple(known)
        assert cs.trace == ((1, mdf(known, 2)),)

    def test_duplicate_known_collapse(self, tiger_j, known3):
        cs = select_topk(list(known3) + [known3[0]], tiger_j, SelectionConfig(seed=0))
        assert cs.trees[:3] == tuple(known3)

    def test_empty_known_rejected(self, tiger_j):
        with pytest.raises(ValueError):
            select_topk([], tiger_j, SelectionConfig())

    def test_wrong_shape_known_rejected(self, tiger_j):
        bad = [constant_tree("Listen", tiger_j.observations, 2)]
        with pytest.raises(Exception):
            select_topk(bad, tiger_j, SelectionConfig())

    def test_diversity_trace_helper(self, tiger_j, known3):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0))
        assert diversity_trace(cs) == list(cs.trace)


class TestSaveLoad:
    def test_roundtrip(self, tiger_j, known3, tmp_path):
        cs = select_topk(known3, tiger_j, SelectionConfig(seed=0))
        p = save_candidate_set(cs, tmp_path / "set.json")
        back = load_candidate_set(p)
        assert back.trees == cs.trees
        assert back.provenance == cs.provenance
        np.testing.assert_array_equal(back.prior, cs.prior)
        assert back.measure == cs.measure
        assert back.trace == cs.trace
        assert back.report == cs.report

    def test_file_is_stable(self, fig_trees, tmp_path):
        cs = make_candidate_set(fig_trees, 2)
        p1 = save_candidate_set(cs, tmp_path / "a.json")
        p2 = save_candidate_set(cs, tmp_path / "b.json")
        assert p1.read_text() == p2.read_text()
