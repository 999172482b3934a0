import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netappraisal.errors import ParseError, ScenarioEditError
from netappraisal.netgraph import (
    NO_LINK,
    AddLink,
    AddNode,
    DirectCosts,
    Link,
    Network,
    RemoveLink,
    ScenarioDelta,
    SetField,
    apply_edits,
    apply_scenario,
    bpr_time,
    format_network,
    parse_network,
    parse_scenario,
    shortest_path_tree,
    validate_network,
)
from networks import braess, grid, parallel_links
from oracles import brute_force_costs

# --- validate_network ------------------------------------------------------


def test_braess_is_valid():
    assert validate_network(braess()) == []


def test_dangling_endpoint():
    base = braess()
    net = Network.build(list(base.links) + [Link(3, 99, 1.0, 1.0, 10.0)], [1, 2], [1, 2, 3, 4])
    defects = validate_network(net)
    assert len(defects) == 1
    assert defects[0].startswith("dangling endpoint")
    assert "99" in defects[0]


def test_unreachable_zone_pair():
    net = Network.build([Link(1, 3, 1.0, 1.0, 10.0), Link(2, 3, 1.0, 1.0, 10.0)], [1, 2], [1, 2, 3])
    defects = validate_network(net)
    assert len(defects) == 1
    assert defects[0].startswith("unreachable zone pair")


@pytest.mark.parametrize(
    "field,value,needle",
    [
        ("capacity", 0.0, "capacity must be > 0"),
        ("free_flow_time", 0.0, "free_flow_time must be > 0"),
        ("length", -1.0, "length must be >= 0"),
        ("vdf_beta", 0.5, "vdf_beta must be >= 1"),
    ],
)
def test_link_field_invariants(field, value, needle):
    net = braess()
    links = list(net.links)
    links[0] = dataclasses.replace(links[0], **{field: value})
    defects = validate_network(net.replace_links(links))
    assert len(defects) == 1 and defects[0].startswith(needle)
    assert "link #0" in defects[0]


def test_parallel_links_allowed():
    assert validate_network(parallel_links()) == []


# --- bpr_time --------------------------------------------------------------


def test_bpr_zero_flow():
    assert bpr_time(Link(1, 2, 1.0, 10.0, 100.0), 0.0) == 10.0


@pytest.mark.parametrize("flow,expected", [(100.0, 11.5), (200.0, 34.0)])
def test_bpr_values(flow, expected):
    link = Link(1, 2, 1.0, 10.0, 100.0, vdf_alpha=0.15, vdf_beta=4.0)
    assert bpr_time(link, flow) == pytest.approx(expected, rel=1e-12)


def test_bpr_rejects_negative_flow():
    with pytest.raises(ValueError):
        bpr_time(Link(1, 2, 1.0, 10.0, 100.0), -1.0)


@given(
    fft=st.floats(0.1, 100),
    cap=st.floats(1, 1e4),
    alpha=st.floats(0, 5),
    beta=st.floats(1, 8),
    f1=st.floats(0, 1e5),
    f2=st.floats(0, 1e5),
)
def test_bpr_monotone(fft, cap, alpha, beta, f1, f2):
    link = Link(1, 2, 1.0, fft, cap, alpha, beta)
    lo, hi = sorted((f1, f2))
    assert bpr_time(link, lo) <= bpr_time(link, hi)


# --- shortest_path_tree ----------------------------------------------------


def test_single_link_tree():
    net = Network.build([Link(1, 2, 1.0, 5.0, 10.0), Link(2, 1, 1.0, 5.0, 10.0)], [1, 2])
    tree = shortest_path_tree(net, 1, [5.0, 5.0])
    assert tree.cost[2] == 5.0
    assert tree.path_links(net, 2) == [0]
    assert tree.pred_link[1] == NO_LINK


def test_braess_tree_matches_enumeration():
    net = braess()
    costs = [lk.free_flow_time for lk in net.links]
    tree = shortest_path_tree(net, 1, costs)
    assert tree.cost == pytest.approx(brute_force_costs(net, 1, costs))


def test_tie_break_lowest_link_index():
    # two equal-cost routes 1->2: direct parallel links 0 and 1
    net = parallel_links(fft1=10.0, fft2=10.0)
    for _ in range(5):
        tree = shortest_path_tree(net, 1, [10.0, 10.0, 10.0])
        assert tree.pred_link[2] == 0
    # equal-cost two-hop routes through nodes 3 and 4
    links = [Link(1, 4, 1, 1, 1), Link(1, 3, 1, 1, 1), Link(4, 2, 1, 1, 1), Link(3, 2, 1, 1, 1), Link(2, 1, 1, 1, 1)]
    net = Network.build(links, [1, 2], [1, 2, 3, 4])
    tree = shortest_path_tree(net, 1, [1.0] * 5)
    assert tree.path_links(net, 2) == [0, 2]


def test_unreachable_is_flagged():
    net = Network.build([Link(1, 2, 1.0, 5.0, 10.0)], [1, 2])
    tree = shortest_path_tree(net, 2, [5.0])
    assert math.isinf(tree.cost[1])
    assert 1 in tree.unreachable
    assert tree.pred_link[1] == NO_LINK


def test_zero_cost_cycle_gives_acyclic_tree():
    links = [Link(1, 2, 0, 1, 1), Link(2, 3, 0, 1, 1), Link(3, 2, 0, 1, 1), Link(3, 1, 0, 1, 1)]
    net = Network.build(links, [1, 3])
    tree = shortest_path_tree(net, 1, [0.0, 0.0, 0.0, 0.0])
    assert tree.path_links(net, 3) == [0, 1]
    assert tree.path_links(net, 2) == [0]


@st.composite
def small_networks(draw):
    n = draw(st.integers(2, 7))
    pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=min(14, len(pairs)), unique=True))
    costs = draw(st.lists(st.integers(0, 20).map(float), min_size=len(chosen), max_size=len(chosen)))
    links = [Link(a, b, 1.0, 1.0, 1.0) for a, b in chosen]
    return Network.build(links, [1], range(1, n + 1)), costs


@settings(max_examples=200, deadline=None)
@given(small_networks())
def test_tree_matches_enumeration_and_bellman(case):
    net, costs = case
    tree = shortest_path_tree(net, 1, costs)
    ref = brute_force_costs(net, 1, costs)
    for node, c in ref.items():
        assert tree.cost[node] == pytest.approx(c, abs=1e-12) or (math.isinf(c) and math.isinf(tree.cost[node]))
    for li, lk in enumerate(net.links):
        assert tree.cost[lk.to_node] <= tree.cost[lk.from_node] + costs[li] + 1e-12
    for node in ref:
        if node != 1 and node not in tree.unreachable:
            path = tree.path_links(net, node)
            assert sum(costs[i] for i in path) == pytest.approx(tree.cost[node], abs=1e-12)


# --- scenarios ---------------------------------------------------------------


def test_empty_delta_is_identity():
    net = braess()
    assert apply_scenario(net, ScenarioDelta("null"), "operation") == net


def test_set_field_changes_only_that_field():
    net = braess()
    delta = ScenarioDelta("cap", operation=(SetField(1, 3, "capacity", 4.0),))
    new = apply_scenario(net, delta, "operation")
    assert new.links[0].capacity == 4.0
    assert dataclasses.replace(new.links[0], capacity=net.links[0].capacity) == net.links[0]
    assert new.links[1:] == net.links[1:]
    assert net.links[0].capacity == 2.0


def test_add_then_remove_is_bit_exact():
    net = braess(with_center=False)
    edits = [AddLink(Link(3, 4, 1.0, 2.0, 50.0)), RemoveLink(3, 4)]
    new, _ = apply_edits(net, edits)
    assert new == net
    assert format_network(new) == format_network(net)


def test_missing_link_edit_reports_index():
    net = braess()
    with pytest.raises(ScenarioEditError) as err:
        apply_edits(net, [SetField(1, 3, "capacity", 3.0), RemoveLink(4, 3)])
    assert err.value.index == 1


def test_phase_selection():
    net = braess(with_center=False)
    delta = ScenarioDelta(
        "d",
        construction=(SetField(1, 3, "capacity", 1.0),),
        operation=(AddLink(Link(3, 4, 1.0, 2.0, 50.0)),),
        direct_costs=DirectCosts(1.0, 2.0, 3.0),
    )
    assert apply_scenario(net, delta, "construction").links[0].capacity == 1.0
    assert apply_scenario(net, delta, "operation").n_links == net.n_links + 1
    with pytest.raises(ValueError):
        apply_scenario(net, delta, "design")


edit_strategy = st.one_of(
    st.builds(
        SetField,
        st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8]),
        st.sampled_from([1, 2, 3, 4, 5, 6, 7, 8]),
        st.sampled_from(["capacity", "length", "free_flow_time", "vdf_alpha"]),
        st.floats(0.1, 1000),
    ),
    st.builds(RemoveLink, st.integers(1, 8), st.integers(1, 8)),
    st.builds(
        AddLink,
        st.builds(Link, st.integers(1, 8), st.integers(1, 8), st.just(1.0), st.just(1.0), st.just(100.0)),
    ),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(edit_strategy, max_size=6))
def test_apply_then_inverse_is_identity(edits):
    net = grid(2, 4)
    snapshot = format_network(net)
    # keep only the prefix that applies cleanly
    ok = []
    for e in edits:
        try:
            apply_edits(net, ok + [e])
        except ScenarioEditError:
            continue
        ok.append(e)
    new, inverse = apply_edits(net, ok)
    restored, _ = apply_edits(new, inverse)
    assert restored == net
    assert [n.id for n in restored.nodes] == [n.id for n in net.nodes]
    assert format_network(net) == snapshot


def test_add_node_then_ramp_round_trip():
    net = braess()
    edits = [AddNode(50), AddLink(Link(3, 50, 0.2, 0.5, 20.0)), AddLink(Link(50, 2, 0.2, 0.5, 20.0))]
    new, inverse = apply_edits(net, edits)
    assert 50 in new.node_ids and validate_network(new) == []
    assert apply_edits(new, inverse)[0] == net


# --- file formats ------------------------------------------------------------

NET_TEXT = """<NUMBER OF ZONES> 2
<NUMBER OF NODES> 4
<NUMBER OF LINKS> 3
<END OF METADATA>
~ from to capacity length fft alpha beta acc ;
1 3 100 1.0 2.0 0.15 4 1.0 ;
3 2 100 1.0 2.0 ;
2 1 100 2.0 4.0 0.2 4 2.5 ;
"""


def test_parse_network():
    net = parse_network(NET_TEXT)
    assert net.zone_ids == (1, 2)
    assert net.node_ids == (1, 2, 3, 4)
    assert net.links[1].vdf_alpha == 0.15 and net.links[1].vdf_beta == 4.0
    assert net.links[2].accident_rate_multiplier == 2.5
    assert parse_network(format_network(net)) == net


def test_parse_network_error_position():
    bad = NET_TEXT.replace("3 2 100 1.0 2.0 ;", "3 2 1x0 1.0 2.0 ;")
    with pytest.raises(ParseError) as err:
        parse_network(bad, "net.txt")
    assert (err.value.line, err.value.column) == (7, 5)
    assert "net.txt:7:5" in str(err.value)


def test_parse_scenario():
    text = """name = directional
[construction]
set 1 3 capacity 50   # narrowed during works
[operation]
node 9
add 3 9 2400 0.4 0.3
remove 2 1
set 1 3 alpha 0.1
[costs]
construction = 40.3
acquisition = 16.4
maintenance = 0.55
"""
    delta = parse_scenario(text)
    assert delta.name == "directional"
    assert delta.construction == (SetField(1, 3, "capacity", 50.0),)
    assert delta.operation[0] == AddNode(9)
    assert delta.operation[1].link.capacity == 2400.0
    assert delta.operation[3] == SetField(1, 3, "vdf_alpha", 0.1)
    assert delta.direct_costs.construction == pytest.approx(40.3e6)
    assert delta.direct_costs.annual_maintenance == pytest.approx(0.55e6)


def test_parse_scenario_unknown_field():
    with pytest.raises(ParseError) as err:
        parse_scenario("[operation]\nset 1 2 lanes 3\n")
    assert err.value.line == 2 and err.value.column == 9
