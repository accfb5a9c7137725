from enum import Enum
from fractions import Fraction
from math import ceil
from typing import (
    Dict, List, Tuple, Optional, Iterable, NamedTuple, Union
)
from .util import cached_property


class Layer(Enum):
    SOURCE = 'S'
    TRANSMITTER = 'T'
    RECEIVER = 'R'
    DESTINATION = 'D'


# the layer a transmitter / receiver must be attached to
OWNER_LAYER = {
    Layer.TRANSMITTER: Layer.SOURCE,
    Layer.RECEIVER: Layer.DESTINATION,
}


class EdgeRef(NamedTuple):
    transmitter: str
    receiver: str

    def __str__(self) -> str:
        return f'({self.transmitter},{self.receiver})'


class Packet(NamedTuple):
    id: str
    source: str
    dest: str
    release: int
    weight: Fraction
    seq: int = 0  # position in the input sequence, see Instance

    @property
    def order(self) -> Tuple[int, int]:
        ''' Dispatch order. Smaller means "arrived before". '''
        return (self.release, self.seq)


class Chunk(NamedTuple):
    packet: str
    index: int  # 1 .. d(e)
    size: Fraction
    weight: Fraction
    edge: EdgeRef
    release: int
    seq: int

    @property
    def order(self) -> Tuple[int, int]:
        return (self.release, self.seq)

    @property
    def label(self) -> str:
        return f'{self.packet}#{self.index}'

    def __repr__(self) -> str:
        return f'<Chunk {self.label} w={self.weight} edge={self.edge}>'


class Attachment(NamedTuple):
    node: str   # transmitter or receiver
    owner: str  # source or destination
    delay: int


class ReconfigEdge(NamedTuple):
    transmitter: str
    receiver: str
    delay: int

    @property
    def ref(self) -> EdgeRef:
        return EdgeRef(self.transmitter, self.receiver)


class FixedLink(NamedTuple):
    source: str
    dest: str
    delay: int


class UnknownEdgeError(KeyError):
    def __init__(self, edge: EdgeRef) -> None:
        super().__init__(edge)
        self.edge = edge

    def __str__(self) -> str:
        return f'unknown reconfigurable edge {self.edge}'


class InstanceError(ValueError):
    ''' Raised if an instance does not pass validation. '''

    def __init__(self, errors: List[str]) -> None:
        super().__init__(errors)
        self.errors = errors

    def __str__(self) -> str:
        return 'Invalid instance: ' + '; '.join(self.errors)


class Topology:
    '''
    The four-layer graph. Records are kept exactly as given (duplicates
    included) so that validate_topology() can report them, the lookup
    tables are derived lazily and keep the first occurrence.
    The object is never mutated after construction.
    '''

    def __init__(
        self,
        nodes: Union[Dict[str, Layer], Iterable[Tuple[str, Layer]]] = (),
        attach: Iterable[Attachment] = (),
        edges: Iterable[ReconfigEdge] = (),
        links: Iterable[FixedLink] = (),
    ) -> None:
        items = nodes.items() if isinstance(nodes, dict) else nodes
        self.node_records = tuple(
            (n, Layer(layer)) for n, layer in items)  # type: Tuple[Tuple[str, Layer], ...]
        self.attachments = tuple(Attachment(*x) for x in attach)
        self.edges = tuple(ReconfigEdge(*x) for x in edges)
        self.links = tuple(FixedLink(*x) for x in links)

    # -------------------
    #   Lookup tables
    # -------------------

    @cached_property
    def nodes(self) -> Dict[str, Layer]:
        rv = {}  # type: Dict[str, Layer]
        for node, layer in self.node_records:
            rv.setdefault(node, layer)
        return rv

    @cached_property
    def _attach(self) -> Dict[str, Attachment]:
        rv = {}  # type: Dict[str, Attachment]
        for a in self.attachments:
            rv.setdefault(a.node, a)
        return rv

    @cached_property
    def _edges(self) -> Dict[EdgeRef, int]:
        rv = {}  # type: Dict[EdgeRef, int]
        for e in self.edges:
            rv.setdefault(e.ref, e.delay)
        return rv

    @cached_property
    def _links(self) -> Dict[Tuple[str, str], int]:
        rv = {}  # type: Dict[Tuple[str, str], int]
        for link in self.links:
            rv.setdefault((link.source, link.dest), link.delay)
        return rv

    @cached_property
    def _by_pair(self) -> Dict[Tuple[str, str], Tuple[EdgeRef, ...]]:
        tmp = {}  # type: Dict[Tuple[str, str], List[EdgeRef]]
        for ref in self._edges:
            src = self._attach.get(ref.transmitter)
            dst = self._attach.get(ref.receiver)
            if src and dst:
                tmp.setdefault((src.owner, dst.owner), []).append(ref)
        return {k: tuple(sorted(v)) for k, v in tmp.items()}

    # -------------------
    #   Accessors
    # -------------------

    def layer(self, node: str) -> Optional[Layer]:
        return self.nodes.get(node)

    def nodes_of(self, layer: Layer) -> List[str]:
        return [n for n, lay in self.nodes.items() if lay is layer]

    def owner(self, node: str) -> str:
        ''' Source of a transmitter or destination of a receiver. '''
        return self._attach[node].owner

    def attach_delay(self, node: str) -> int:
        return self._attach[node].delay

    def has_edge(self, edge: EdgeRef) -> bool:
        return edge in self._edges

    def edge_delay(self, edge: EdgeRef) -> int:
        try:
            return self._edges[edge]
        except KeyError:
            raise UnknownEdgeError(edge)

    def edge_refs(self) -> List[EdgeRef]:
        return sorted(self._edges)

    def link_delay(self, source: str, dest: str) -> Optional[int]:
        ''' Delay of the fixed link, None if there is no such link. '''
        return self._links.get((source, dest))

    def max_path_delay(self) -> int:
        return max((path_delay(self, e) for e in self._edges), default=0)

    def __repr__(self) -> str:
        return '<Topology nodes={} edges={} links={}>'.format(
            len(self.nodes), len(self._edges), len(self._links))


class Instance:
    ''' A topology together with the packet sequence in input order. '''

    def __init__(self, topology: Topology, packets: Iterable[Packet]) -> None:
        self.topology = topology
        # stamp the input-sequence position, it breaks same-step ties
        self.packets = tuple(
            p._replace(seq=i, weight=Fraction(p.weight))
            for i, p in enumerate(packets))

    @cached_property
    def by_id(self) -> Dict[str, Packet]:
        return {p.id: p for p in self.packets}

    def dispatch_order(self) -> List[Packet]:
        return sorted(self.packets, key=lambda p: p.order)

    def __repr__(self) -> str:
        return f'<Instance {self.topology!r} packets={len(self.packets)}>'


# -----------------------------------
#           Operations
# -----------------------------------

def validate_topology(topology: Topology) -> List[str]:
    ''' Return all invariant violations, empty list if ok. '''
    errors = []  # type: List[str]
    seen = {}  # type: Dict[str, Layer]
    for node, layer in topology.node_records:
        if node in seen:
            errors.append(f'duplicate node {node}')
        seen[node] = layer

    attached = {}  # type: Dict[str, int]
    for a in topology.attachments:
        layer = seen.get(a.node)
        if layer not in OWNER_LAYER:
            errors.append(f'dangling attach: {a.node} is not a '
                          'transmitter or receiver')
            continue
        if seen.get(a.owner) is not OWNER_LAYER[layer]:
            errors.append(f'dangling attach: {a.node} attached to {a.owner}'
                          f' (expected a {OWNER_LAYER[layer].name.lower()})')
        if a.delay < 0:
            errors.append(f'attach delay of {a.node} must be ≥ 0')
        attached[a.node] = attached.get(a.node, 0) + 1

    for node, layer in seen.items():
        if layer in OWNER_LAYER and attached.get(node, 0) != 1:
            errors.append('{} {} must be attached exactly once (found {})'
                          .format(layer.name.lower(), node,
                                  attached.get(node, 0)))

    seen_edges = set()
    for e in topology.edges:
        if seen.get(e.transmitter) is not Layer.TRANSMITTER:
            errors.append(f'edge {e.ref}: {e.transmitter} is no transmitter')
        if seen.get(e.receiver) is not Layer.RECEIVER:
            errors.append(f'edge {e.ref}: {e.receiver} is no receiver')
        if e.delay < 1:
            errors.append(f'edge {e.ref}: reconfig delay ≥ 1 required')
        if e.ref in seen_edges:
            errors.append(f'duplicate edge {e.ref}')
        seen_edges.add(e.ref)

    seen_links = set()
    for link in topology.links:
        key = (link.source, link.dest)
        if seen.get(link.source) is not Layer.SOURCE \
                or seen.get(link.dest) is not Layer.DESTINATION:
            errors.append('link ({},{}) must connect a source with a '
                          'destination'.format(*key))
        if link.delay < 0:
            errors.append('link ({},{}): delay must be ≥ 0'.format(*key))
        if key in seen_links:
            errors.append('duplicate link ({},{})'.format(*key))
        seen_links.add(key)
    return errors


def validate_instance(instance: Instance) -> List[str]:
    ''' Topology violations plus per-packet violations. '''
    topo = instance.topology
    errors = validate_topology(topo)
    ids = set()
    for p in instance.packets:
        if p.id in ids:
            errors.append(f'duplicate packet {p.id}')
        ids.add(p.id)
        if topo.layer(p.source) is not Layer.SOURCE:
            errors.append(f'packet {p.id}: unknown source {p.source}')
        if topo.layer(p.dest) is not Layer.DESTINATION:
            errors.append(f'packet {p.id}: unknown destination {p.dest}')
        if not isinstance(p.release, int) or p.release < 0:
            errors.append(f'packet {p.id}: release must be an integer ≥ 0')
        if p.weight <= 0:
            errors.append(f'packet {p.id}: weight must be > 0')
    return errors


def candidate_edges(topology: Topology, packet: Packet) -> Tuple[EdgeRef, ...]:
    '''
    All reconfigurable edges from a transmitter of the packet source to
    a receiver of the packet destination, ordered by (transmitter, receiver).
    '''
    return topology._by_pair.get((packet.source, packet.dest), ())


def path_delay(topology: Topology, edge: EdgeRef) -> int:
    ''' D(e): attach delay + edge delay + attach delay. '''
    delay = topology.edge_delay(edge)
    return topology.attach_delay(edge.transmitter) + delay \
        + topology.attach_delay(edge.receiver)


def is_deliverable(topology: Topology, packet: Packet) -> bool:
    return bool(candidate_edges(topology, packet)) or \
        topology.link_delay(packet.source, packet.dest) is not None


def make_chunks(packet: Packet, edge: EdgeRef, delay: int) -> Tuple[Chunk, ...]:
    ''' Split a packet into `delay` chunks of size 1/delay. '''
    size = Fraction(1, delay)
    weight = packet.weight * size
    return tuple(
        Chunk(packet.id, i, size, weight, edge, packet.release, packet.seq)
        for i in range(1, delay + 1))


def horizon(instance: Instance) -> int:
    ''' No reasonable schedule leaves packets pending at or after this step. '''
    if not instance.packets:
        return 0
    last = max(p.release for p in instance.packets)
    return last + len(instance.packets) * instance.topology.max_path_delay()


def integral_release(time: Union[Fraction, float, int]) -> int:
    ''' An arrival in (τ-1, τ] is available at step τ. '''
    return max(0, ceil(time))
