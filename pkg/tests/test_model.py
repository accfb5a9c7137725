from fractions import Fraction
import pytest
from hybrid_sched.model import (
    Attachment, EdgeRef, FixedLink, Instance, Layer, Packet, ReconfigEdge,
    Topology, UnknownEdgeError, candidate_edges, horizon, integral_release,
    is_deliverable, make_chunks, path_delay, validate_instance,
    validate_topology
)


def _pair_topology(t_delay: int, r_delay: int, edge_delay: int) -> Topology:
    return Topology(
        {'s': Layer.SOURCE, 't': Layer.TRANSMITTER, 'r': Layer.RECEIVER,
         'd': Layer.DESTINATION},
        [Attachment('t', 's', t_delay), Attachment('r', 'd', r_delay)],
        [ReconfigEdge('t', 'r', edge_delay)],
    )


def test_mixed_routes_topology_is_valid(mixed_routes):
    topo = mixed_routes.topology
    assert validate_topology(topo) == []
    assert len(topo.nodes) == 12
    assert len(topo.nodes_of(Layer.TRANSMITTER)) == 3
    assert len(topo.nodes_of(Layer.RECEIVER)) == 4
    assert len(topo.edge_refs()) == 5
    assert topo.link_delay('s2', 'd3') == 4
    assert topo.link_delay('s1', 'd3') is None


def test_empty_topology_is_valid():
    assert validate_topology(Topology()) == []


def test_zero_delay_edge_is_reported():
    topo = _pair_topology(0, 0, 0)
    errors = validate_topology(topo)
    assert len(errors) == 1
    assert 'reconfig delay ≥ 1 required' in errors[0]


def test_topology_violations_are_collected():
    topo = Topology(
        {'s': Layer.SOURCE, 't': Layer.TRANSMITTER, 'u': Layer.TRANSMITTER,
         'r': Layer.RECEIVER, 'd': Layer.DESTINATION},
        [Attachment('t', 's', 0), Attachment('r', 'd', 0),
         Attachment('r', 'd', 0)],
        [ReconfigEdge('t', 'r', 1), ReconfigEdge('t', 'r', 2)],
        [FixedLink('s', 'd', 1), FixedLink('s', 'd', 2)],
    )
    errors = validate_topology(topo)
    assert any('transmitter u must be attached exactly once' in e
               for e in errors)
    assert any('receiver r must be attached exactly once' in e
               for e in errors)
    assert 'duplicate edge (t,r)' in errors
    assert 'duplicate link (s,d)' in errors


def test_dangling_attach():
    topo = Topology(
        {'s': Layer.SOURCE, 't': Layer.TRANSMITTER},
        [Attachment('t', 'x', 0)])
    assert any(e.startswith('dangling attach: t attached to x')
               for e in validate_topology(topo))


def test_candidate_edges_mixed_routes(mixed_routes):
    topo = mixed_routes.topology
    by_id = mixed_routes.by_id
    assert candidate_edges(topo, by_id['p1']) == (EdgeRef('t1', 'r1'),)
    # t1 and t2 both belong to s1, r2 and r3 both to d2
    assert candidate_edges(topo, by_id['p2']) == (
        EdgeRef('t1', 'r2'), EdgeRef('t2', 'r3'))
    assert candidate_edges(topo, by_id['p3']) == (EdgeRef('t3', 'r3'),)
    assert candidate_edges(topo, by_id['p5']) == (EdgeRef('t3', 'r4'),)


def test_candidate_edges_empty(mixed_routes):
    stray = Packet('x', 's2', 'd1', 1, Fraction(1))
    assert candidate_edges(mixed_routes.topology, stray) == ()
    assert not is_deliverable(mixed_routes.topology, stray)


def test_candidate_edges_monotone_under_edge_addition(mixed_routes):
    topo = mixed_routes.topology
    bigger = Topology(topo.node_records, topo.attachments,
                      topo.edges + (ReconfigEdge('t2', 'r1', 1),), topo.links)
    for p in mixed_routes.packets:
        assert set(candidate_edges(topo, p)) <= set(candidate_edges(bigger, p))
    assert EdgeRef('t2', 'r1') in candidate_edges(
        bigger, Packet('x', 's1', 'd1', 1, Fraction(1)))


@pytest.mark.parametrize('t_delay, r_delay, edge_delay, expected', [
    (0, 0, 1, 1),
    (1, 0, 2, 3),
    (3, 4, 5, 12),
])
def test_path_delay(t_delay, r_delay, edge_delay, expected):
    topo = _pair_topology(t_delay, r_delay, edge_delay)
    assert path_delay(topo, EdgeRef('t', 'r')) == expected


def test_path_delay_unknown_edge(mixed_routes):
    with pytest.raises(UnknownEdgeError):
        path_delay(mixed_routes.topology, EdgeRef('t2', 'r4'))


def test_chunks_partition_packet():
    p = Packet('p', 's', 'd', 1, Fraction(7, 3))
    chunks = make_chunks(p, EdgeRef('t', 'r'), 3)
    assert [c.index for c in chunks] == [1, 2, 3]
    assert sum(c.size for c in chunks) == 1
    assert sum(c.weight for c in chunks) == Fraction(7, 3)
    assert all(c.size * 3 == 1 for c in chunks)
    assert {c.edge for c in chunks} == {EdgeRef('t', 'r')}


def test_instance_stamps_input_order(mixed_routes):
    assert [p.seq for p in mixed_routes.packets] == [0, 1, 2, 3, 4]
    assert all(isinstance(p.weight, Fraction) for p in mixed_routes.packets)
    assert [p.id for p in mixed_routes.dispatch_order()] == \
        ['p1', 'p2', 'p3', 'p4', 'p5']


def test_validate_instance_packets(mixed_routes):
    packets = list(mixed_routes.packets) + [
        Packet('p1', 's1', 'd1', 1, Fraction(1)),
        Packet('q', 't1', 'd1', 1, Fraction(1)),
        Packet('z', 's1', 'd1', 1, Fraction(0)),
    ]
    errors = validate_instance(Instance(mixed_routes.topology, packets))
    assert 'duplicate packet p1' in errors
    assert 'packet q: unknown source t1' in errors
    assert 'packet z: weight must be > 0' in errors


def test_horizon(mixed_routes):
    # max release 2, five packets, longest path 1
    assert horizon(mixed_routes) == 2 + 5 * 1
    assert horizon(Instance(Topology(), [])) == 0


@pytest.mark.parametrize('time, expected', [
    (0, 0), (Fraction(1, 2), 1), (1, 1), (2.2, 3), (-1, 0),
])
def test_integral_release(time, expected):
    assert integral_release(time) == expected
