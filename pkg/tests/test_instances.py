import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import to_nx
from predsearch.embeddings import Embedding, path_graph
from predsearch.errors import GenerationError, GraphValidationError, InputError, InstanceFormatError
from predsearch.exploration import run_greedy
from predsearch.graph import is_connected, is_tree
from predsearch.instances import (InstanceSpec, circular_ladder, dumps_instance, erdos_renyi, gen_family,
                                  gen_instance, gen_lb_p3, gen_lb_planning_tree, gen_lb_relative_star, gen_lb_star,
                                  has_integer_distances, load_instance, loads_instance, random_lobster, random_tree,
                                  save_instance)
from predsearch.predictions import error_profile, satisfies_relative


class TestFamilies:
    def test_circular_ladder(self):
        g = circular_ladder(6)
        assert g.n == 6 and len(g.edges) == 9
        assert nx.is_isomorphic(to_nx(g), nx.circular_ladder_graph(3))

    @pytest.mark.parametrize("k", [3, 4, 10, 50])
    def test_circular_ladder_is_prism(self, k):
        assert nx.is_isomorphic(to_nx(circular_ladder(2 * k)), nx.circular_ladder_graph(k))

    def test_circular_ladder_needs_even(self):
        with pytest.raises(InputError):
            circular_ladder(7)

    def test_random_tree(self):
        g = random_tree(100, 5)
        assert len(g.edges) == 99 and is_tree(g)

    def test_random_tree_weights(self):
        g = random_tree(30, 1, weight_range=(2, 4))
        assert {w for _, _, w in g.edges} <= {2.0, 3.0, 4.0}
        assert has_integer_distances(g)

    def test_random_tree_is_uniform(self):
        # all 16 labelled trees on 4 vertices should show up about equally often
        counts = {}
        for s in range(3200):
            key = tuple(sorted((u, v) for u, v, _ in random_tree(4, s).edges))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 16
        assert max(counts.values()) < 1.5 * min(counts.values())

    @pytest.mark.parametrize("n", [1, 2, 5, 100, 301])
    def test_lobster(self, n):
        g = random_lobster(n, n)
        assert g.n == n and is_tree(g)
        h = to_nx(g)
        # removing leaves twice leaves a path (or nothing)
        for _ in range(2):
            h.remove_nodes_from([v for v in list(h) if h.degree(v) <= 1 and h.number_of_nodes() > 2])
        assert h.number_of_nodes() == 0 or max(dict(h.degree()).values(), default=0) <= 2

    def test_erdos_renyi_connected(self):
        for s in range(10):
            g = erdos_renyi(100, s)
            assert is_connected(g)

    def test_erdos_renyi_budget(self):
        with pytest.raises(GenerationError):
            erdos_renyi(60, 0, p=0.01, max_tries=3)

    @settings(max_examples=20, deadline=None)
    @given(st.sampled_from(["random_tree", "random_lobster", "erdos_renyi", "circular_ladder"]),
           st.integers(3, 40).map(lambda k: 2 * k), st.integers(0, 10 ** 6))
    def test_deterministic(self, fam, n, seed):
        spec = InstanceSpec(fam, {"n": n}, seed)
        assert gen_family(spec) == gen_family(spec)
        a, b = gen_instance(spec), gen_instance(spec)
        assert (a.root, a.goal) == (b.root, b.goal) and a.root != a.goal
        assert np.array_equal(a.f, a.goal_distances)

    def test_unknown_family(self):
        with pytest.raises(InputError):
            gen_family(InstanceSpec("hypercube", {"n": 8}))


class TestLowerBounds:
    def test_p3(self):
        worst, benign = gen_lb_p3(5)
        assert worst.opt == benign.opt == 5
        assert run_greedy(worst).alg == 15 and run_greedy(benign).alg == 5
        assert error_profile(worst).e1_minus == 10 and error_profile(worst).einf_plus == 0

    def test_star(self):
        inst = gen_lb_star(5, 4)
        assert inst.opt == 2 and inst.goal == 4
        p = error_profile(inst)
        assert p.einf_plus == 4 and p.e0 == 1
        assert run_greedy(inst).alg == 14

    def test_star_exhaustive_goal_placements(self):
        inst = gen_lb_star(5, 4)
        from predsearch.exploration import SearchInstance
        costs = [run_greedy(SearchInstance(inst.graph, 0, g, inst.f)).alg for g in range(1, 5)]
        assert costs == [2, 6, 10, 14]

    def test_relative_star(self):
        inst = gen_lb_relative_star(6, 0.2)
        assert inst.opt == 5
        assert satisfies_relative(inst.f, inst.goal_distances, 0.2)
        assert {w for _, _, w in inst.graph.edges} == {1.0, 4.0}

    @given(st.integers(6, 30), st.floats(0.01, 0.95))
    def test_relative_star_window(self, n, eps):
        inst = gen_lb_relative_star(n, eps)
        assert satisfies_relative(inst.f, inst.goal_distances, eps)

    def test_planning_tree(self):
        inst = gen_lb_planning_tree(3, 4)
        assert inst.graph.n == 2 * 9 - 3 + 1 == 16
        assert inst.opt == 6
        assert is_tree(inst.graph) and inst.graph.max_degree == 3
        assert error_profile(inst).e1 == 2 * 4 + 4 * 3 + 2

    @pytest.mark.parametrize("delta,w", [(2, 4), (3, 7), (4, 5), (5, 10)])
    def test_planning_tree_e1(self, delta, w):
        inst = gen_lb_planning_tree(delta, w)
        assert inst.graph.n == 2 * delta ** 2 - delta + 1
        assert inst.opt == w + 2
        assert error_profile(inst).e1 == 2 * w + 4 * delta + 2

    def test_planning_tree_levels_look_alike(self):
        inst = gen_lb_planning_tree(3, 4)
        D = inst.distances.values
        # every vertex's prediction equals the true distance from its mirror in the second subtree
        assert inst.f[1] == D[2, inst.goal] and inst.f[0] == D[0, inst.goal]

    def test_bad_params(self):
        with pytest.raises(InputError):
            gen_lb_star(3, 4)
        with pytest.raises(InputError):
            gen_lb_relative_star(6, 1.5)
        with pytest.raises(InputError):
            gen_lb_planning_tree(1, 4)


class TestFiles:
    @pytest.mark.parametrize("spec", [InstanceSpec("random_tree", {"n": 20}, 1),
                                      InstanceSpec("erdos_renyi", {"n": 30}, 2),
                                      InstanceSpec("lb_relative_star", {"n": 7, "eps": 0.3}),
                                      InstanceSpec("lb_planning_tree", {"delta": 3, "w": 4}),
                                      InstanceSpec("lb_p3", {"w": 2.5})])
    def test_round_trip(self, spec, tmp_path):
        inst = gen_instance(spec)
        path = tmp_path / "i.json"
        save_instance(inst, path)
        back = load_instance(path)
        assert back.graph == inst.graph and (back.root, back.goal) == (inst.root, inst.goal)
        assert np.array_equal(back.f, inst.f) and back.integer_distance == inst.integer_distance

    def test_round_trip_with_embedding(self):
        inst = gen_instance(InstanceSpec("random_tree", {"n": 5}, 3))
        inst.embedding = Embedding(inst.graph, path_graph(6, [1, 2, 3, 4, 5]), (5, 0, 2, 1, 3))
        back = loads_instance(dumps_instance(inst))
        assert back.embedding == inst.embedding

    def test_dangling_vertex(self):
        obj = json.loads(dumps_instance(gen_lb_p3(5)[0]))
        obj["edges"].append([0, 9, 1.0])
        with pytest.raises(InstanceFormatError, match=r"edges\[2\]"):
            loads_instance(json.dumps(obj))

    def test_negative_weight(self):
        obj = json.loads(dumps_instance(gen_lb_p3(5)[0]))
        obj["edges"][0][2] = -1
        with pytest.raises(GraphValidationError, match="edge 0"):
            loads_instance(json.dumps(obj))

    def test_malformed_json_reports_line(self):
        with pytest.raises(InstanceFormatError, match="line 2"):
            loads_instance('{"n": 3,\n "edges": [}')

    def test_missing_field(self):
        obj = json.loads(dumps_instance(gen_lb_p3(5)[0]))
        del obj["goal"]
        with pytest.raises(InstanceFormatError, match="'goal'"):
            loads_instance(json.dumps(obj))

    def test_prediction_length(self):
        obj = json.loads(dumps_instance(gen_lb_p3(5)[0]))
        obj["predictions"].pop()
        with pytest.raises(InstanceFormatError, match="predictions"):
            loads_instance(json.dumps(obj))
