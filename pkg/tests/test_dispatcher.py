from fractions import Fraction
import pytest
from hybrid_sched.dispatcher import (
    ForcedDispatcher, NoRouteError, NotACandidateError, PendingView,
    classify_adjacent, compute_impact, dispatch
)
from hybrid_sched.model import (
    Attachment, EdgeRef, Layer, Packet, ReconfigEdge, Topology, make_chunks
)

T1R1, T1R2, T2R3 = EdgeRef('t1', 'r1'), EdgeRef('t1', 'r2'), EdgeRef('t2', 'r3')


def _star(delay: int = 1, t_attach: int = 0) -> Topology:
    ''' s -> t -> {r, q} -> d, plus u -> q on a second source. '''
    return Topology(
        {'s': Layer.SOURCE, 'v': Layer.SOURCE, 't': Layer.TRANSMITTER,
         'u': Layer.TRANSMITTER, 'r': Layer.RECEIVER, 'q': Layer.RECEIVER,
         'd': Layer.DESTINATION, 'e': Layer.DESTINATION},
        [Attachment('t', 's', t_attach), Attachment('u', 'v', 0),
         Attachment('r', 'd', 0), Attachment('q', 'e', 0)],
        [ReconfigEdge('t', 'r', delay), ReconfigEdge('t', 'q', 1),
         ReconfigEdge('u', 'q', 1)],
    )


def _pending(weight: int, edge: EdgeRef, pid: str, seq: int = 0):
    return make_chunks(Packet(pid, 's', 'd', 1, Fraction(weight), seq),
                       edge, 1)


def test_classify_adjacent_threshold():
    topo = _star(delay=1)
    chunks = _pending(4, EdgeRef('t', 'q'), 'a') \
        + _pending(3, EdgeRef('t', 'q'), 'b', 1) \
        + _pending(2, EdgeRef('u', 'q'), 'c', 2) \
        + _pending(9, EdgeRef('u', 'q'), 'far', 3)
    view = PendingView(topo, chunks[:3])
    p = Packet('p', 's', 'd', 1, Fraction(3), 5)
    heavier, lighter = classify_adjacent(p, EdgeRef('t', 'r'), view)
    # (u,q) shares no endpoint with (t,r)
    assert [c.packet for c in heavier] == ['a', 'b']
    assert lighter == ()
    heavier, lighter = classify_adjacent(p, EdgeRef('t', 'q'), PendingView(
        topo, chunks[:3]))
    assert [c.packet for c in heavier] == ['a', 'b']
    assert [c.packet for c in lighter] == ['c']
    assert PendingView(topo, chunks[3:]).adjacent(EdgeRef('t', 'r')) == []


def test_classify_adjacent_empty_view():
    p = Packet('p', 's', 'd', 1, Fraction(1))
    assert classify_adjacent(p, EdgeRef('t', 'r'), PendingView(_star())) \
        == ((), ())


def test_compute_impact_formula():
    # w=6, d(e)=2, attach delays (1, 0), adjacent weights {4, 2}
    topo = _star(delay=2, t_attach=1)
    chunks = _pending(4, EdgeRef('t', 'q'), 'a') \
        + _pending(2, EdgeRef('t', 'q'), 'b', 1)
    p = Packet('p', 's', 'd', 1, Fraction(6), 2)
    imp = compute_impact(p, EdgeRef('t', 'r'), PendingView(topo, chunks))
    assert imp.self_term == 6 * (1 + Fraction(3, 2))
    assert imp.heavier_count_term == 6
    assert imp.lighter_weight_term == 4
    assert imp.total == 25
    assert [c.packet for c in imp.heavier] == ['a']
    assert [c.packet for c in imp.lighter] == ['b']


def test_compute_impact_not_a_candidate():
    p = Packet('p', 's', 'd', 1, Fraction(1))
    with pytest.raises(NotACandidateError):
        compute_impact(p, EdgeRef('u', 'q'), PendingView(_star()))


def test_contended_impacts(contended_heavy):
    topo = contended_heavy.topology
    p1, p2, p3, p4 = contended_heavy.packets
    assert compute_impact(p1, T1R1, PendingView(topo)).total == 1
    pending = make_chunks(p1, T1R1, 1) + make_chunks(p2, T1R2, 1) \
        + make_chunks(p3, EdgeRef('t2', 'r2'), 1)
    imp = compute_impact(p4, T2R3, PendingView(topo, pending))
    assert imp.heavier == ()
    assert [c.packet for c in imp.lighter] == ['p3']
    assert imp.total == 7


def test_dispatch_edge_ties_by_transmitter(mixed_routes):
    topo = mixed_routes.topology
    p1, p2 = mixed_routes.by_id['p1'], mixed_routes.by_id['p2']
    empty = dispatch(p2, topo, PendingView(topo))
    assert empty.edge == T1R2
    # p1 waiting at t1 makes (t1,r2) more expensive
    busy = dispatch(p2, topo, PendingView(topo, make_chunks(p1, T1R1, 1)))
    assert busy.edge == T2R3
    assert busy.alpha == 1


def test_dispatch_prefers_cheap_edge_over_link(mixed_routes):
    topo = mixed_routes.topology
    p4, p5 = mixed_routes.by_id['p4'], mixed_routes.by_id['p5']
    view = PendingView(topo, make_chunks(p4, EdgeRef('t3', 'r3'), 1))
    a = dispatch(p5, topo, view)
    assert not a.is_fixed
    assert a.edge == EdgeRef('t3', 'r4')
    assert a.alpha == 2
    assert [c.packet for c in a.impact.heavier] == ['p4']


def test_dispatch_tie_goes_to_fixed_link(single_edge):
    instance = single_edge([1], link=1)
    a = dispatch(instance.packets[0], instance.topology,
                 PendingView(instance.topology))
    assert a.is_fixed
    assert a.alpha == 1
    assert a.chunks == ()


def test_dispatch_without_link(single_edge):
    instance = single_edge([2], edge_delay=3)
    a = dispatch(instance.packets[0], instance.topology,
                 PendingView(instance.topology))
    assert a.edge == EdgeRef('t', 'r')
    assert len(a.chunks) == 3
    assert all(c.size == Fraction(1, 3) for c in a.chunks)
    assert a.alpha == 2 * 2


def test_dispatch_no_route(mixed_routes):
    stray = Packet('x', 's2', 'd1', 1, Fraction(1))
    with pytest.raises(NoRouteError, match='no route for packet x'):
        dispatch(stray, mixed_routes.topology, PendingView(mixed_routes.topology))


def test_dispatch_is_deterministic(mixed_routes):
    topo = mixed_routes.topology
    p1, p2 = mixed_routes.by_id['p1'], mixed_routes.by_id['p2']
    view = PendingView(topo, make_chunks(p1, T1R1, 1))
    assert dispatch(p2, topo, view) == dispatch(p2, topo, view)


@pytest.mark.parametrize('k', [Fraction(1, 3), Fraction(2), Fraction(7, 2)])
def test_dispatch_scale_covariance(mixed_routes, k):
    topo = mixed_routes.topology

    def scaled(p):
        return p._replace(weight=p.weight * k)

    p1, p2, p4, p5 = (mixed_routes.by_id[x] for x in ('p1', 'p2', 'p4', 'p5'))
    for packet, pending in ((p2, make_chunks(p1, T1R1, 1)),
                            (p5, make_chunks(p4, EdgeRef('t3', 'r3'), 1))):
        base = dispatch(packet, topo, PendingView(topo, pending))
        pending_k = [c._replace(weight=c.weight * k) for c in pending]
        other = dispatch(scaled(packet), topo, PendingView(topo, pending_k))
        assert other.route.__class__ is base.route.__class__
        assert other.edge == base.edge
        assert other.alpha == k * base.alpha


def test_impact_monotone_in_view(mixed_routes):
    topo = mixed_routes.topology
    p1, p2, p3 = mixed_routes.by_id['p1'], mixed_routes.by_id['p2'], mixed_routes.by_id['p3']
    pending = []
    last = compute_impact(p2, T1R2, PendingView(topo)).total
    for chunk in make_chunks(p1, T1R1, 1) + make_chunks(
            p3, EdgeRef('t3', 'r3'), 1):
        pending.append(chunk)
        now = compute_impact(p2, T1R2, PendingView(topo, pending)).total
        assert now >= last
        last = now


def test_forced_dispatcher(mixed_routes):
    topo = mixed_routes.topology
    forced = ForcedDispatcher({'p2': T1R2, 'p5': None})
    p1, p2, p5 = mixed_routes.by_id['p1'], mixed_routes.by_id['p2'], mixed_routes.by_id['p5']
    view = PendingView(topo, make_chunks(p1, T1R1, 1))
    a = forced(p2, view)
    assert a.edge == T1R2
    assert a.alpha == 2  # self term 1 plus p1 in H
    assert forced(p5, PendingView(topo)).is_fixed
    # not in the table: regular dispatch
    assert forced(p1, PendingView(topo)).edge == T1R1
