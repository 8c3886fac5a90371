import random
from itertools import combinations

import pytest

import poishare as ps
from util import random_instance


def path3(social_edges=(), **kw):
    return ps.Instance(
        sensing=ps.SensingGraph(node_count=3, user_count=3, edges=((0, 1), (1, 2))),
        social=ps.SocialGraph(user_count=3, edges=tuple(social_edges)),
        **kw,
    )


def test_validate_minimal_instance():
    assert ps.validate(path3()) == []


def test_validate_user_count_mismatch():
    inst = ps.Instance(
        sensing=ps.SensingGraph(node_count=3, user_count=3, edges=()),
        social=ps.SocialGraph(user_count=5, edges=()),
    )
    violations = ps.validate(inst)
    assert len(violations) == 1
    assert "user_count mismatch" in violations[0]


def test_validate_preferences_must_include_incident_edges():
    prefs = ps.PreferenceProfile((frozenset(), frozenset({0, 1}), frozenset({1})))
    inst = path3(preferences=prefs)
    violations = ps.validate(inst)
    assert len(violations) == 1
    assert "user 0" in violations[0]


def test_validate_catches_duplicates_loops_and_ranges():
    inst = ps.Instance(
        sensing=ps.SensingGraph(node_count=3, user_count=3, edges=((0, 1), (1, 0), (2, 2), (0, 9))),
        social=ps.SocialGraph(user_count=3, edges=((0, 0), (1, 2), (1, 2))),
    )
    text = "\n".join(ps.validate(inst))
    assert "duplicate sensing edge" in text
    assert "self-loop" in text
    assert "out of range" in text
    assert "duplicate social edge" in text


def test_incident_edges_examples():
    g = path3().sensing
    assert ps.incident_edges(g, {1}) == {0, 1}
    assert ps.incident_edges(g, set()) == set()
    assert ps.incident_edges(g, {0, 2}) == {0, 1}
    with pytest.raises(ps.InputError):
        ps.incident_edges(g, {7})


def test_incident_edges_inclusion_exclusion_exhaustive():
    # E(A u B) = E(A) u E(B), so |E(A u B)| = |E(A)| + |E(B)| - |E(A) n E(B)|.
    # The intersection must be of the edge sets: E(A n B) is a strict subset
    # of E(A) n E(B) whenever an edge has one endpoint in A only and the
    # other in B only, so the node-intersection form of the identity fails.
    rng = random.Random(5)
    for _ in range(30):
        inst = random_instance(rng, max_users=5, max_extra_nodes=1)
        g = inst.sensing
        nodes = range(g.node_count)
        subsets = [set(c) for r in range(g.node_count + 1) for c in combinations(nodes, r)]
        for a in subsets:
            for b in subsets:
                ea, eb = ps.incident_edges(g, a), ps.incident_edges(g, b)
                assert ps.incident_edges(g, a | b) == ea | eb
                assert len(ea | eb) == len(ea) + len(eb) - len(ea & eb)
                assert ps.incident_edges(g, a & b) <= ea & eb


def test_incident_edges_monotone():
    rng = random.Random(6)
    for _ in range(100):
        inst = random_instance(rng, max_users=6, max_extra_nodes=2)
        g = inst.sensing
        a = {v for v in range(g.node_count) if rng.random() < 0.4}
        b = a | {v for v in range(g.node_count) if rng.random() < 0.4}
        assert ps.incident_edges(g, a) <= ps.incident_edges(g, b)


def test_social_neighborhood_examples():
    inst = path3(social_edges=((0, 1), (1, 2)))
    assert ps.social_neighborhood(inst, 0) == {1}
    inst2 = path3(social_edges=((0, 1), (1, 2)), social_hop_radius=2)
    assert ps.social_neighborhood(inst2, 0) == {1, 2}
    assert ps.social_neighborhood(path3(), 0) == set()
    with pytest.raises(ps.InputError):
        ps.social_neighborhood(inst, 3)


def test_social_neighborhood_radius_is_iterated_one_hop():
    rng = random.Random(7)
    for _ in range(50):
        inst = random_instance(rng, max_users=7)
        r = rng.randint(1, 3)
        inst_r = ps.Instance(inst.sensing, inst.social, social_hop_radius=r)
        inst_1 = ps.Instance(inst.sensing, inst.social, social_hop_radius=1)
        for u in range(inst.user_count):
            expanded = {u}
            for _ in range(r):
                expanded |= {
                    w for v in list(expanded) for w in ps.social_neighborhood(inst_1, v)
                }
            expanded.discard(u)
            assert ps.social_neighborhood(inst_r, u) == expanded


def test_selection_rejects_duplicates():
    with pytest.raises(ps.InputError):
        ps.Selection((1, 1))


def test_walkset_enforces_start_cap():
    w = ps.Walk((0, 1))
    with pytest.raises(ps.InputError):
        ps.WalkSet((w, w), augmentation=1)
    assert len(ps.WalkSet((w, w), augmentation=2)) == 2
    with pytest.raises(ps.InputError):
        ps.WalkSet((), augmentation=0)


def test_check_walk():
    inst = path3()
    ps.model.check_walk(inst, ps.Walk((0, 1, 2)), n=2)
    with pytest.raises(ps.InputError):
        ps.model.check_walk(inst, ps.Walk((0, 2)))  # not an edge
    with pytest.raises(ps.InputError):
        ps.model.check_walk(inst, ps.Walk((0, 1)), n=2)  # wrong length
    non_user = ps.Instance(
        sensing=ps.SensingGraph(node_count=3, user_count=1, edges=((0, 1), (1, 2))),
        social=ps.SocialGraph(user_count=1, edges=()),
    )
    with pytest.raises(ps.InputError):
        ps.model.check_walk(non_user, ps.Walk((1, 2)))  # start not a user


def test_instance_json_round_trip():
    rng = random.Random(8)
    for _ in range(50):
        inst = random_instance(
            rng, max_users=6, max_extra_nodes=2, with_prefs=rng.random() < 0.5,
            with_weights=rng.random() < 0.5, max_radius=2,
        )
        back = ps.loads_instance(ps.dumps_instance(inst))
        assert back == inst
        assert ps.dumps_instance(back) == ps.dumps_instance(inst)


def test_load_instance_rejects_garbage(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ps.InputError):
        ps.load_instance(p)
    p2 = tmp_path / "invalid.json"
    p2.write_text('{"node_count": 2, "user_count": 5, "sensing_edges": [], "social_edges": []}')
    with pytest.raises(ps.InputError):
        ps.load_instance(p2)
    assert ps.load_instance(p2, check=False).user_count == 5
