import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from netappraisal.assign import (
    AssignmentOptions,
    all_or_nothing,
    beckmann,
    frank_wolfe,
    read_demand,
    relative_gap,
    skims,
    write_flows,
)
from netappraisal.errors import UnreachableError
from netappraisal.netgraph import Link, Network
from networks import BRAESS_DEMAND, braess, braess_od, grid, parallel_links
from oracles import bisection_two_link_split, od_time, path_equilibrium, simple_paths


def single_link():
    return Network.build([Link(1, 2, 3.0, 10.0, 100.0), Link(2, 1, 3.0, 10.0, 100.0)], [1, 2])


def node_balance(net, flows, od):
    """Inflow minus outflow per node, with zone demand added as sources/sinks."""
    bal = {n: 0.0 for n in net.node_ids}
    for lk, x in zip(net.links, flows):
        bal[lk.to_node] += x
        bal[lk.from_node] -= x
    off = np.array(od, dtype=float)
    np.fill_diagonal(off, 0.0)
    for i, z in enumerate(net.zone_ids):
        bal[z] += off[i].sum() - off[:, i].sum()
    return bal


# --- all_or_nothing ----------------------------------------------------------


def test_aon_single_link():
    net = single_link()
    flows = all_or_nothing(net, [[0, 10], [0, 0]], [10.0, 10.0])
    assert flows.tolist() == [10.0, 0.0]


def test_aon_zero_demand():
    net = braess()
    assert not all_or_nothing(net, np.zeros((2, 2)), [1.0] * net.n_links).any()


def test_aon_braess_matches_enumeration():
    net = braess()
    costs = [lk.free_flow_time for lk in net.links]
    flows = all_or_nothing(net, braess_od(), costs)
    paths = simple_paths(net, 1, 2)
    best = min(paths, key=lambda p: sum(costs[i] for i in p))
    expected = np.zeros(net.n_links)
    expected[best] = BRAESS_DEMAND
    assert flows.tolist() == expected.tolist()
    assert all(abs(b) < 1e-12 for b in node_balance(net, flows, braess_od()).values())


def test_aon_unreachable_names_pair():
    net = Network.build([Link(1, 2, 1.0, 1.0, 1.0)], [1, 2])
    with pytest.raises(UnreachableError) as err:
        all_or_nothing(net, [[0, 0], [5, 0]], [1.0])
    assert (err.value.origin, err.value.dest) == (2, 1)


# --- beckmann ----------------------------------------------------------------


def test_beckmann_zero():
    assert beckmann(braess(), np.zeros(6)) == 0.0


def test_beckmann_closed_form():
    net = Network.build([Link(1, 2, 1.0, 10.0, 100.0), Link(2, 1, 1.0, 10.0, 100.0)], [1, 2])
    assert beckmann(net, [100.0, 0.0]) == pytest.approx(1030.0, rel=1e-12)


def test_beckmann_matches_quadrature():
    from scipy.integrate import quad

    net = grid(2, 3)
    rng = np.random.default_rng(0)
    x = rng.uniform(0, 3000, net.n_links)
    a = net.arrays
    ref = sum(
        quad(lambda s, k=k: a.fft[k] * (1 + a.alpha[k] * (s / a.capacity[k]) ** a.beta[k]), 0, x[k])[0]
        for k in range(net.n_links)
    )
    assert beckmann(net, x) == pytest.approx(ref, rel=1e-10)


def test_beckmann_doubling_increases():
    net, od = braess(), braess_od()
    x = frank_wolfe(net, od).flows
    assert beckmann(net, 2 * x) > beckmann(net, x)


# --- relative_gap --------------------------------------------------------------


def test_gap_zero_on_single_path():
    net = single_link()
    od = [[0, 50], [0, 0]]
    assert relative_gap(net, [50.0, 0.0], od) == pytest.approx(0.0, abs=1e-15)


def test_gap_positive_when_all_on_worse_link():
    net = parallel_links()
    od = [[0, 150], [0, 0]]
    assert relative_gap(net, [0.0, 150.0, 0.0], od) > 0


def test_gap_at_oracle_equilibrium():
    net = braess()
    ref = path_equilibrium(net, {(1, 2): BRAESS_DEMAND})
    assert relative_gap(net, ref, braess_od()) < 1e-10


def test_gap_rejects_zero_cost():
    with pytest.raises(ValueError):
        relative_gap(braess(), np.zeros(6), braess_od())


# --- frank_wolfe -----------------------------------------------------------------


def test_fw_two_parallel_links():
    net = parallel_links()
    state = frank_wolfe(net, [[0, 150], [0, 0]])
    assert state.converged and state.relative_gap <= 1e-4
    x1 = bisection_two_link_split(net.links[0], net.links[1], 150.0)
    assert state.flows[0] == pytest.approx(x1, abs=1e-3)
    assert state.flows[1] == pytest.approx(150.0 - x1, abs=1e-3)
    # Wardrop: at 150 PCE the fast link costs 17.59 min < 20, so the slow link stays empty
    assert x1 == pytest.approx(150.0)
    assert state.times[0] <= state.times[1]


def test_fw_two_parallel_links_interior_split():
    net = parallel_links()
    state = frank_wolfe(net, [[0, 300], [0, 0]])
    x1 = bisection_two_link_split(net.links[0], net.links[1], 300.0)
    assert 0 < x1 < 300
    assert state.flows[0] == pytest.approx(x1, abs=1e-3)
    assert state.times[0] == pytest.approx(state.times[1], rel=1e-4)


def test_fw_braess_paradox():
    times = {}
    for center in (False, True):
        net = braess(center)
        state = frank_wolfe(net, braess_od())
        ref = path_equilibrium(net, {(1, 2): BRAESS_DEMAND})
        assert np.abs(state.flows - ref).max() < 1e-3
        times[center] = od_time(net, {(1, 2): BRAESS_DEMAND}, ref)[(1, 2)]
    assert times[True] > times[False]


def test_fw_zero_demand():
    state = frank_wolfe(braess(), np.zeros((2, 2)))
    assert not state.flows.any()
    assert state.gap_history == [0.0] and state.iterations == 1 and state.converged


def test_fw_msa_converges_loosely():
    state = frank_wolfe(braess(), braess_od(), AssignmentOptions(max_iterations=2000, relative_gap_target=1e-3, line_search="msa"))
    ref = path_equilibrium(braess(), {(1, 2): BRAESS_DEMAND})
    assert state.converged
    assert np.abs(state.flows - ref).max() < 0.05


def test_fw_nonconvergence_is_flagged_not_raised():
    net = grid(3, 3)
    od = np.full((9, 9), 400.0)
    state = frank_wolfe(net, od, AssignmentOptions(max_iterations=2, relative_gap_target=1e-9))
    assert not state.converged
    assert state.iterations == 2


def test_fw_deterministic_and_conserving():
    net = grid(3, 4)
    rng = np.random.default_rng(3)
    od = rng.uniform(0, 300, (12, 12))
    a = frank_wolfe(net, od)
    b = frank_wolfe(net, od)
    assert a.flows.tobytes() == b.flows.tobytes()
    assert a.gap_history == b.gap_history
    scale = od.sum()
    assert all(abs(v) <= 1e-9 * scale for v in node_balance(net, a.flows, od).values())
    assert all(g >= -1e-12 for g in a.gap_history)
    hist = a.beckmann_history
    assert all(hist[k + 1] <= hist[k] + 1e-12 for k in range(len(hist) - 1))


@st.composite
def oracle_cases(draw):
    """Connected networks with <= 8 nodes and <= 3 OD pairs."""
    n = draw(st.integers(3, 8))
    ring = [(k, k % n + 1) for k in range(1, n + 1)]
    extra_pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b and (a, b) not in ring]
    extra = draw(st.lists(st.sampled_from(extra_pairs), max_size=min(6, len(extra_pairs)), unique=True))
    links = []
    for a, b in ring + extra:
        fft = draw(st.floats(1.0, 10.0))
        cap = draw(st.floats(5.0, 30.0))
        links.append(Link(a, b, length=fft, free_flow_time=fft, capacity=cap))
    zones = draw(st.lists(st.integers(1, n), min_size=2, max_size=3, unique=True))
    zone_ids = sorted(zones)
    pairs = [(o, d) for o in zone_ids for d in zone_ids if o != d]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=3, unique=True))
    demands = {p: draw(st.floats(5.0, 40.0)) for p in chosen}
    net = Network.build(links, zone_ids, range(1, n + 1))
    return net, demands


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(oracle_cases())
def test_fw_matches_path_enumeration(case):
    net, demands = case
    pos = {z: k for k, z in enumerate(net.zone_ids)}
    od = np.zeros((net.n_zones, net.n_zones))
    for (o, d), q in demands.items():
        od[pos[o], pos[d]] = q
    state = frank_wolfe(net, od, AssignmentOptions(max_iterations=20000, relative_gap_target=1e-9))
    ref = path_equilibrium(net, demands)
    assert np.abs(state.flows - ref).max() < 1e-3


# --- skims -------------------------------------------------------------------------


def test_skims_free_flow_single_link():
    sk = skims(single_link(), [0.0, 0.0])
    assert sk.time[0, 1] == 10.0 and sk.distance[0, 1] == 3.0
    assert sk.unreachable == ()


def test_skims_congested():
    sk = skims(single_link(), [100.0, 0.0])
    assert sk.time[0, 1] == pytest.approx(11.5, rel=1e-12)
    assert sk.time[1, 0] == 10.0


def test_skims_symmetric_network():
    net = grid(3, 3)
    sk = skims(net, np.zeros(net.n_links))
    assert np.allclose(sk.time, sk.time.T, rtol=1e-12)
    assert np.allclose(sk.distance, sk.distance.T, rtol=1e-12)


def test_skims_unreachable_flagged():
    net = Network.build([Link(1, 2, 1.0, 1.0, 1.0)], [1, 2])
    sk = skims(net, [0.0])
    assert math.isinf(sk.time[1, 0]) and sk.unreachable == ((2, 1),)


# --- file I/O ----------------------------------------------------------------------


def test_demand_csv_and_tntp(tmp_path):
    net = braess()
    p = tmp_path / "d.csv"
    p.write_text("origin,dest,pce_per_hour\n1,2,6.0\n")
    assert read_demand(p, net).tolist() == [[0.0, 6.0], [0.0, 0.0]]
    q = tmp_path / "d.tntp"
    q.write_text("<NUMBER OF ZONES> 2\n<END OF METADATA>\n\nOrigin 1\n    1 : 0.0;    2 : 6.0;\nOrigin 2\n    1 : 1.5;\n")
    assert read_demand(q, net).tolist() == [[0.0, 6.0], [1.5, 0.0]]


def test_write_flows(tmp_path):
    net = single_link()
    state = frank_wolfe(net, [[0, 100], [0, 0]])
    p = tmp_path / "flows.csv"
    write_flows(net, state, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "from,to,flow,time,v_over_c"
    assert lines[1].split(",")[:2] == ["1", "2"]
    assert float(lines[1].split(",")[4]) == pytest.approx(1.0)
