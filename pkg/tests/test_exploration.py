import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import connected_graphs, trees
from predsearch.errors import DisconnectedInstanceError, InputError, ModelViolationError, ProtocolViolation
from predsearch.experiments import beta_radius_factor, theorem1_bound, theorem2_ratio, theorem3_ratio
from predsearch.exploration import (ObservedState, SearchInstance, observed_matches_true, reveal, run_astar_order,
                                    run_beta_weighted, run_greedy, run_pruned_known_eps, run_smallest_prediction)
from predsearch.graph import Graph
from predsearch.instances import gen_lb_p3, gen_lb_planning_tree, gen_lb_relative_star, gen_lb_star
from predsearch.predictions import error_profile, gen_absolute_error, gen_admissible_error, gen_relative_error


def unit_path(n):
    return Graph(n, tuple((i, i + 1, 1.0) for i in range(n - 1)))


def perfect(g, root, goal, **kw):
    inst = SearchInstance(g, root, goal, np.zeros(g.n), **kw)
    return inst.with_predictions(inst.goal_distances)


@st.composite
def instances(draw, graphs, noise=None):
    g = draw(graphs)
    root = draw(st.integers(0, g.n - 1))
    goal = draw(st.integers(0, g.n - 1))
    inst = perfect(g, root, goal)
    if noise is not None:
        inst = inst.with_predictions(noise(draw, inst.goal_distances))
    return inst


def absolute_noise(draw, d):
    return gen_absolute_error(d, draw(st.floats(0, 60)), draw(st.integers(0, 2 ** 32 - 1)))


@st.composite
def digraphs(draw, max_n=9):
    """Directed graphs with a Hamiltonian cycle (so every goal is reachable)."""
    n = draw(st.integers(2, max_n))
    order = draw(st.permutations(range(n)))
    w = st.floats(0.1, 10)
    edges = {(order[i], order[(i + 1) % n]): draw(w) for i in range(n)}
    for _ in range(draw(st.integers(0, 2 * n))):
        u, v = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if u != v:
            edges[(u, v)] = draw(w)
    return Graph(n, tuple((u, v, x) for (u, v), x in edges.items()), directed=True)


class TestReveal:
    def test_star_start(self):
        s = ObservedState.start(gen_lb_star(5, 4).graph, 0)
        assert s.frontier == {1, 2, 3, 4}

    def test_path(self):
        s = ObservedState.start(unit_path(3), 0)
        assert s.frontier == {1}
        s = reveal(s, 1)
        assert s.frontier == {2} and s.visited == (0, 1)

    def test_planning_tree_start(self):
        inst = gen_lb_planning_tree(3, 4)
        s = ObservedState.start(inst.graph, 0)
        assert s.frontier == {1, 2, 3}
        assert s.observed_edges == {(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)}

    def test_not_on_frontier(self):
        s = ObservedState.start(unit_path(3), 0)
        with pytest.raises(ProtocolViolation):
            reveal(s, 2)

    def test_directed_frontier_uses_out_edges(self):
        g = Graph(3, ((0, 1, 1.0), (2, 0, 1.0)), directed=True)
        assert ObservedState.start(g, 0).frontier == {1}

    def test_observed_distance_dominates_true(self):
        # square 0-1-2-3-0 with a heavy edge 0-3; 3 is seen via the heavy edge first
        g = Graph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 10.0)))
        s = ObservedState.start(g, 0)
        assert s.distances_from(0)[0][3] == 10.0
        s = reveal(reveal(s, 1), 2)
        assert s.distances_from(0)[0][3] == 3.0


class TestGreedy:
    def test_perfect_path(self):
        t = run_greedy(perfect(unit_path(5), 0, 4))
        assert t.alg == t.opt == 4

    def test_p3_worst(self):
        worst, benign = gen_lb_p3(5)
        t = run_greedy(worst)
        assert t.visits == [1, 0, 2] and t.step_costs == [5, 10] and t.alg == 15
        assert t.alg == t.opt + error_profile(worst).e1_minus
        assert run_greedy(benign).alg == 5

    def test_star(self):
        inst = gen_lb_star(5, 4)
        t = run_greedy(inst)
        assert t.step_costs == [2, 4, 4, 4] and t.alg == 14
        assert t.alg == t.opt + (5 - 2) * error_profile(inst).einf_plus

    def test_disconnected(self):
        g = Graph(3, ((0, 1, 1.0),))
        inst = SearchInstance(g, 0, 2, np.zeros(3))
        with pytest.raises(DisconnectedInstanceError):
            run_greedy(inst)

    def test_root_is_goal(self):
        t = run_greedy(perfect(unit_path(3), 1, 1))
        assert t.alg == 0 and t.visits == [1]

    def test_pass_through_frontier_not_visited(self):
        # 1 and 2 both on the frontier of {0, 3}; the known route to 2 runs through 1
        g = Graph(4, ((0, 1, 1.0), (1, 2, 1.0), (0, 3, 1.0), (3, 1, 5.0)))
        inst = SearchInstance(g, 0, 2, np.array([9.0, 9.0, 0.0, 0.0]))
        t = run_greedy(inst)
        assert t.visits == [0, 3, 1, 2]
        t2 = run_greedy(inst, opportunistic=True)
        assert t2.visits[-1] == 2

    @settings(max_examples=80, deadline=None)
    @given(instances(connected_graphs(max_n=10), absolute_noise))
    def test_theorem1_undirected(self, inst):
        t = run_greedy(inst)
        p = error_profile(inst)
        assert t.alg <= theorem1_bound(t.opt, p.e1_minus, p.einf_plus, inst.graph.n) * (1 + 1e-9) + 1e-9
        assert t.alg >= t.opt - 1e-9
        assert sum(t.deltas) == pytest.approx(t.opt, abs=1e-9)
        assert len(set(t.visits)) == len(t.visits)

    @settings(max_examples=80, deadline=None)
    @given(instances(digraphs(), absolute_noise))
    def test_theorem1_directed(self, inst):
        t = run_greedy(inst)
        p = error_profile(inst)
        assert t.alg <= theorem1_bound(t.opt, p.e1_minus, p.einf_plus, inst.graph.n) * (1 + 1e-9) + 1e-9

    @settings(max_examples=80, deadline=None)
    @given(instances(connected_graphs(max_n=10)), st.floats(0, 1), st.integers(0, 2 ** 32 - 1))
    def test_corollary1(self, inst, frac, seed):
        d = inst.goal_distances
        inst = inst.with_predictions(gen_admissible_error(d, frac * d.sum(), seed))
        t = run_greedy(inst)
        assert t.alg <= (t.opt + error_profile(inst).e1) * (1 + 1e-9) + 1e-9

    @settings(max_examples=40, deadline=None)
    @given(instances(connected_graphs(max_n=10)))
    def test_perfect_is_optimal(self, inst):
        assert run_greedy(inst).alg == pytest.approx(inst.opt)


class TestPruned:
    def test_relative_star(self):
        inst = gen_lb_relative_star(6, 0.2)
        t = run_pruned_known_eps(inst, 0.2)
        assert t.alg == 11 and t.opt == 5 and t.ratio == 2.2

    def test_relative_star_worst_over_goal_placements(self):
        ratios = [run_pruned_known_eps(gen_lb_relative_star(6, 0.2, attach_to=a), 0.2).ratio for a in range(1, 5)]
        assert max(ratios) == 2.2
        assert ratios[0] == 1.0

    @pytest.mark.parametrize("n", [6, 7, 9, 12])
    def test_relative_star_formula(self, n):
        eps = 0.2
        t = run_pruned_known_eps(gen_lb_relative_star(n, eps), eps)
        assert t.ratio == pytest.approx((2 * (n - 3) + 1) * eps + (1 - eps))

    def test_ratio_tends_to_one(self):
        ratios = [run_pruned_known_eps(gen_lb_relative_star(6, e), e).ratio for e in (0.2, 0.02, 0.002)]
        assert ratios[0] > ratios[1] > ratios[2] and ratios[2] == pytest.approx(1 + 6 * 0.002)

    def test_model_violation(self):
        inst = SearchInstance(unit_path(3), 0, 2, np.array([0.1, 1.0, 0.0]))
        with pytest.raises(ModelViolationError):
            run_pruned_known_eps(inst, 0.1)

    def test_bad_eps(self):
        with pytest.raises(InputError):
            run_pruned_known_eps(gen_lb_relative_star(6, 0.2), 1.0)

    @settings(max_examples=60, deadline=None)
    @given(instances(trees(min_n=2, max_n=25)), st.sampled_from([0.05, 0.1, 0.2, 0.3]),
           st.integers(0, 2 ** 32 - 1))
    def test_theorem2_and_per_step(self, inst, eps, seed):
        inst = inst.with_predictions(gen_relative_error(inst.goal_distances, eps, seed))
        t = run_pruned_known_eps(inst, eps)
        n = inst.graph.n
        assert t.ratio <= theorem2_ratio(eps, n) * (1 + 1e-9)
        d = inst.goal_distances
        for c, delta, v in zip(t.step_costs, t.deltas, t.visits[1:]):
            assert (1 - eps) * c <= delta + 2 * eps * d[v] + 1e-9
        D = inst.distances.values
        for v in t.visits:
            assert D[inst.root, v] <= (1 + eps) / (1 - eps) * t.opt + 1e-9
        assert observed_matches_true(inst, t)

    @settings(max_examples=40, deadline=None)
    @given(instances(trees(min_n=2, max_n=20)))
    def test_perfect_is_optimal(self, inst):
        assert run_pruned_known_eps(inst, 0.3).alg == pytest.approx(inst.opt)


class TestBeta:
    @settings(max_examples=60, deadline=None)
    @given(instances(connected_graphs(max_n=10), absolute_noise))
    def test_beta_one_is_greedy(self, inst):
        a, b = run_beta_weighted(inst, 1.0), run_greedy(inst)
        assert a.visits == b.visits and a.step_costs == b.step_costs

    @settings(max_examples=40, deadline=None)
    @given(instances(trees(min_n=2, max_n=20)))
    def test_perfect_tree(self, inst):
        assert run_beta_weighted(inst).alg == pytest.approx(inst.opt)

    @settings(max_examples=60, deadline=None)
    @given(instances(trees(min_n=2, max_n=25)), st.sampled_from([0.05, 0.1, 0.2]), st.integers(0, 2 ** 32 - 1))
    def test_theorem3_and_radius(self, inst, eps, seed):
        inst = inst.with_predictions(gen_relative_error(inst.goal_distances, eps, seed))
        t = run_beta_weighted(inst)
        assert t.ratio <= theorem3_ratio(eps, inst.graph.n) * (1 + 1e-9)
        d = inst.goal_distances
        assert all(d[v] <= beta_radius_factor(eps, 2 / 3) * t.opt + 1e-9 for v in t.visits)

    def test_bad_beta(self):
        with pytest.raises(InputError):
            run_beta_weighted(gen_lb_star(5, 4), 0.0)


class TestBaselines:
    def test_smallest_prediction_examples(self):
        assert run_smallest_prediction(perfect(unit_path(5), 0, 4)).alg == 4
        assert run_smallest_prediction(gen_lb_p3(5)[0]).alg == 15

    def test_astar_perfect_path(self):
        t = run_astar_order(perfect(unit_path(5), 2, 4))
        assert t.alg == 2

    @settings(max_examples=60, deadline=None)
    @given(instances(connected_graphs(max_n=10), absolute_noise))
    def test_astar_goal_last(self, inst):
        t = run_astar_order(inst)
        assert t.visits[-1] == inst.goal and t.visits[0] == inst.root
        assert len(set(t.visits)) == len(t.visits)
        assert t.alg >= t.opt - 1e-9

    def test_astar_disconnected(self):
        with pytest.raises(DisconnectedInstanceError):
            run_astar_order(SearchInstance(Graph(2), 0, 1, np.zeros(2)))
