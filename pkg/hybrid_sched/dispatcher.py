'''
Arrival-time routing. Each packet is committed either to its fixed link
or to one reconfigurable edge (split into chunks) and never moved again.
'''
from fractions import Fraction
import logging
from typing import (
    TYPE_CHECKING, Dict, List, Tuple, Optional, Union, Iterable, Iterator,
    NamedTuple
)
from .model import candidate_edges, make_chunks
if TYPE_CHECKING:
    from .model import Chunk, EdgeRef, Packet, Topology

logger = logging.getLogger(__name__)


class NotACandidateError(ValueError):
    def __init__(self, packet_id: str, edge: 'EdgeRef') -> None:
        super().__init__(packet_id, edge)
        self.packet_id = packet_id
        self.edge = edge

    def __str__(self) -> str:
        return f'edge {self.edge} is not a candidate of packet {self.packet_id}'


class NoRouteError(ValueError):
    ''' Neither a reconfigurable edge nor a fixed link serves the packet. '''

    def __init__(self, packet_id: str) -> None:
        super().__init__(packet_id)
        self.packet_id = packet_id

    def __str__(self) -> str:
        return f'no route for packet {self.packet_id}'


class PendingView:
    '''
    Snapshot of B(p): pending chunks of packets that arrived before the
    packet being dispatched.
    '''

    def __init__(self, topology: 'Topology', chunks: Iterable['Chunk'] = ()):
        self.topology = topology
        self.chunks = tuple(chunks)

    def adjacent(self, edge: 'EdgeRef') -> List['Chunk']:
        ''' A(p,e): chunks sharing the transmitter or the receiver of edge. '''
        return [c for c in self.chunks
                if c.edge.transmitter == edge.transmitter
                or c.edge.receiver == edge.receiver]

    def __iter__(self) -> Iterator['Chunk']:
        return iter(self.chunks)

    def __len__(self) -> int:
        return len(self.chunks)

    def __repr__(self) -> str:
        return f'<PendingView chunks={len(self.chunks)}>'


class ImpactBreakdown(NamedTuple):
    edge: 'EdgeRef'
    self_term: Fraction
    heavier_count_term: Fraction
    lighter_weight_term: Fraction
    heavier: Tuple['Chunk', ...]
    lighter: Tuple['Chunk', ...]

    @property
    def total(self) -> Fraction:
        return self.self_term + self.heavier_count_term \
            + self.lighter_weight_term


class FixedRoute(NamedTuple):
    delay: int


class ReconfigRoute(NamedTuple):
    edge: 'EdgeRef'
    chunks: Tuple['Chunk', ...]


Route = Union[FixedRoute, ReconfigRoute]


class Assignment(NamedTuple):
    packet: str
    route: Route
    alpha: Fraction  # worst-case impact estimated at dispatch time
    impact: Optional[ImpactBreakdown] = None

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.route, FixedRoute)

    @property
    def edge(self) -> Optional['EdgeRef']:
        return None if self.is_fixed else self.route.edge  # type: ignore

    @property
    def chunks(self) -> Tuple['Chunk', ...]:
        return () if self.is_fixed else self.route.chunks  # type: ignore


# -----------------------------------
#           Impact
# -----------------------------------

def classify_adjacent(packet: 'Packet', edge: 'EdgeRef', view: PendingView) \
        -> Tuple[Tuple['Chunk', ...], Tuple['Chunk', ...]]:
    '''
    Split A(p,e) into H (may delay p) and L (may be delayed by p).
    The view only holds earlier packets, so equal weight goes to H.
    '''
    threshold = packet.weight / view.topology.edge_delay(edge)
    heavier = []  # type: List[Chunk]
    lighter = []  # type: List[Chunk]
    for c in view.adjacent(edge):
        (heavier if c.weight >= threshold else lighter).append(c)
    return tuple(heavier), tuple(lighter)


def compute_impact(packet: 'Packet', edge: 'EdgeRef', view: PendingView) \
        -> ImpactBreakdown:
    ''' Imp(p,e) = self term + w_p·|H| + d(e)·W(L). '''
    topo = view.topology
    if edge not in candidate_edges(topo, packet):
        raise NotACandidateError(packet.id, edge)
    delay = topo.edge_delay(edge)
    heavier, lighter = classify_adjacent(packet, edge, view)
    own = topo.attach_delay(edge.transmitter) + Fraction(delay + 1, 2) \
        + topo.attach_delay(edge.receiver)
    return ImpactBreakdown(
        edge=edge,
        self_term=packet.weight * own,
        heavier_count_term=packet.weight * len(heavier),
        lighter_weight_term=delay * sum((c.weight for c in lighter),
                                        Fraction(0)),
        heavier=heavier,
        lighter=lighter,
    )


def fixed_alpha(packet: 'Packet', topology: 'Topology') -> Optional[Fraction]:
    ''' w_p·ℓ_p, or None if the packet has no fixed link. '''
    delay = topology.link_delay(packet.source, packet.dest)
    return None if delay is None else packet.weight * delay


def best_impact(packet: 'Packet', view: PendingView) \
        -> Optional[ImpactBreakdown]:
    ''' Minimum impact over all candidates, ties by (transmitter, receiver). '''
    best = None  # type: Optional[ImpactBreakdown]
    for edge in candidate_edges(view.topology, packet):
        imp = compute_impact(packet, edge, view)
        if best is None or imp.total < best.total:
            best = imp
    return best


def fixed_assignment(packet: 'Packet', topology: 'Topology') -> Assignment:
    delay = topology.link_delay(packet.source, packet.dest)
    if delay is None:
        raise NoRouteError(packet.id)
    return Assignment(packet.id, FixedRoute(delay), packet.weight * delay)


def reconfig_assignment(packet: 'Packet', edge: 'EdgeRef', view: PendingView) \
        -> Assignment:
    ''' Commit packet to edge, alpha is the impact against the view. '''
    imp = compute_impact(packet, edge, view)
    chunks = make_chunks(packet, edge, view.topology.edge_delay(edge))
    return Assignment(packet.id, ReconfigRoute(edge, chunks), imp.total, imp)


def dispatch(packet: 'Packet', topology: 'Topology', view: PendingView) \
        -> Assignment:
    '''
    Route to the fixed link if w_p·ℓ_p ≤ min Imp(p,e) (ties go to the
    link), otherwise to the impact-minimizing reconfigurable edge.
    '''
    if view.topology is not topology:
        view = PendingView(topology, view.chunks)
    best = best_impact(packet, view)
    link_cost = fixed_alpha(packet, topology)
    if best is None and link_cost is None:
        raise NoRouteError(packet.id)
    if link_cost is not None and (best is None or link_cost <= best.total):
        logger.debug('dispatch %s -> fixed link (%s)', packet.id, link_cost)
        return fixed_assignment(packet, topology)
    assert best is not None
    logger.debug('dispatch %s -> %s (impact %s)',
                 packet.id, best.edge, best.total)
    chunks = make_chunks(packet, best.edge, topology.edge_delay(best.edge))
    return Assignment(
        packet.id, ReconfigRoute(best.edge, chunks), best.total, best)


# -----------------------------------
#           Policies
# -----------------------------------

class Dispatcher:
    ''' Dispatch policy used by the engine. Called once per packet. '''
    name = 'alg'

    def __call__(self, packet: 'Packet', view: PendingView) -> Assignment:
        return dispatch(packet, view.topology, view)

    def __repr__(self) -> str:
        return f'<{type(self).__name__} name="{self.name}">'


class ForcedDispatcher(Dispatcher):
    '''
    Routes taken from a table: packet id -> edge, or None for the fixed
    link. Packets missing from the table are dispatched normally.
    '''
    name = 'forced'

    def __init__(self, routes: Dict[str, Optional['EdgeRef']]) -> None:
        self.routes = dict(routes)

    def __call__(self, packet: 'Packet', view: PendingView) -> Assignment:
        if packet.id not in self.routes:
            return super().__call__(packet, view)
        edge = self.routes[packet.id]
        if edge is None:
            return fixed_assignment(packet, view.topology)
        return reconfig_assignment(packet, edge, view)
