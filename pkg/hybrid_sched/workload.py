'''
Instance files, the unit-size reduction and synthetic workloads.

File grammar, one record per line, `#` starts a comment line:

    topology
    node <id> <S|T|R|D>
    attach <t-or-r-id> <s-or-d-id> <delay>
    edge <t-id> <r-id> <delay ≥ 1>
    link <s-id> <d-id> <delay>
    packets
    packet <id> <s-id> <d-id> <release> <weight> [<size>]

Weights are `num/den` or bare integers. A packet with a size token is
replaced by that many unit packets (see split_to_unit).
'''
from fractions import Fraction
import logging
import re
from typing import (
    TYPE_CHECKING, Dict, Iterable, List, NamedTuple, Optional, Set, Tuple,
    Union
)
import numpy as np
from numpy.random import default_rng
from .model import (
    Attachment, FixedLink, Instance, Layer, Packet, ReconfigEdge, Topology,
    integral_release, is_deliverable
)
from .util import fmt_rational, parse_rational
if TYPE_CHECKING:
    from .config import GeneratorConfig

logger = logging.getLogger(__name__)


class ParseError(ValueError):
    def __init__(self, lineno: int, line: str, message: str) -> None:
        super().__init__(lineno, line, message)
        self.lineno = lineno
        self.line = line
        self.message = message

    def __str__(self) -> str:
        if not self.lineno:
            return self.message
        return f'line {self.lineno}: {self.message}  ({self.line.strip()})'


class SizedPacket(NamedTuple):
    packet: Packet
    size: Union[int, Fraction] = 1


# -----------------------------------
#        Unit-size reduction
# -----------------------------------

def split_to_unit(packets: Iterable[SizedPacket]) -> List[Packet]:
    '''
    A packet of size s and weight w becomes s unit packets of weight w/s,
    ids suffixed `.1` .. `.s`. Size 1 packets are kept as they are.
    '''
    rv = []  # type: List[Packet]
    for sp in packets:
        size = Fraction(sp.size)
        if size.denominator != 1 or size < 1:
            raise ValueError(
                f'size of packet {sp.packet.id} must be a positive integer,'
                f' got {fmt_rational(size)}')
        if size == 1:
            rv.append(sp.packet)
            continue
        weight = Fraction(sp.packet.weight) / size
        for k in range(1, int(size) + 1):
            rv.append(sp.packet._replace(id=f'{sp.packet.id}.{k}',
                                         weight=weight))
    return rv


# -----------------------------------
#           Parser
# -----------------------------------

_LAYERS = {x.value: x for x in Layer}
_UINT = re.compile(r'[0-9]+')


class _Parser:
    def __init__(self) -> None:
        self.section = None  # type: Optional[str]
        self.nodes = {}  # type: Dict[str, Layer]
        self.attach = []  # type: List[Attachment]
        self.edges = []  # type: List[ReconfigEdge]
        self.edge_keys = set()  # type: Set[Tuple[str, str]]
        self.links = []  # type: List[FixedLink]
        self.link_keys = set()  # type: Set[Tuple[str, str]]
        self.packets = []  # type: List[SizedPacket]
        self.packet_ids = set()  # type: Set[str]
        self.lineno = 0
        self.line = ''

    def fail(self, message: str) -> ParseError:
        return ParseError(self.lineno, self.line, message)

    def int_arg(self, value: str, what: str) -> int:
        if not _UINT.fullmatch(value):
            raise self.fail(f'{what} must be an integer ≥ 0')
        return int(value)

    def node_arg(self, node: str, *layers: Layer) -> str:
        if node not in self.nodes:
            raise self.fail(f'unknown node {node}')
        if self.nodes[node] not in layers:
            raise self.fail('{} is not a {}'.format(node, ' or '.join(
                x.name.lower() for x in layers)))
        return node

    def feed(self, lineno: int, line: str) -> None:
        self.lineno, self.line = lineno, line
        words = line.split()
        if not words or words[0].startswith('#'):
            return
        head, args = words[0], words[1:]
        if head in ('topology', 'packets'):
            if args:
                raise self.fail(f'unexpected arguments after {head}')
            if head == 'topology' and self.section is not None:
                raise self.fail('duplicate topology section')
            if head == 'packets' and self.section != 'topology':
                raise self.fail('packets section must follow topology')
            self.section = head
            return
        if self.section is None:
            raise self.fail('missing topology section')
        handler = getattr(self, f'_{self.section}_{head}', None)
        if handler is None:
            raise self.fail(f'unexpected record "{head}" in {self.section}')
        handler(args)

    def expect(self, args: List[str], *names: str) -> None:
        if len(args) != len(names):
            raise self.fail('expected {} argument(s): {}'.format(
                len(names), ' '.join(names)))

    # topology records

    def _topology_node(self, args: List[str]) -> None:
        self.expect(args, 'id', 'layer')
        node, layer = args
        if layer not in _LAYERS:
            raise self.fail(f'unknown layer {layer}, expected S, T, R or D')
        if node in self.nodes:
            raise self.fail(f'duplicate node {node}')
        self.nodes[node] = _LAYERS[layer]

    def _topology_attach(self, args: List[str]) -> None:
        self.expect(args, 'node', 'owner', 'delay')
        node = self.node_arg(args[0], Layer.TRANSMITTER, Layer.RECEIVER)
        owner = self.node_arg(args[1], Layer.SOURCE, Layer.DESTINATION)
        self.attach.append(Attachment(
            node, owner, self.int_arg(args[2], 'attach delay')))

    def _topology_edge(self, args: List[str]) -> None:
        self.expect(args, 'transmitter', 'receiver', 'delay')
        t = self.node_arg(args[0], Layer.TRANSMITTER)
        r = self.node_arg(args[1], Layer.RECEIVER)
        delay = self.int_arg(args[2], 'edge delay')
        if delay < 1:
            raise self.fail('edge delay must be ≥ 1')
        if (t, r) in self.edge_keys:
            raise self.fail(f'duplicate edge ({t},{r})')
        self.edge_keys.add((t, r))
        self.edges.append(ReconfigEdge(t, r, delay))

    def _topology_link(self, args: List[str]) -> None:
        self.expect(args, 'source', 'destination', 'delay')
        s = self.node_arg(args[0], Layer.SOURCE)
        d = self.node_arg(args[1], Layer.DESTINATION)
        if (s, d) in self.link_keys:
            raise self.fail(f'duplicate link ({s},{d})')
        self.link_keys.add((s, d))
        self.links.append(FixedLink(s, d, self.int_arg(args[2], 'link delay')))

    # packet records

    def _packets_packet(self, args: List[str]) -> None:
        if len(args) not in (5, 6):
            raise self.fail('expected 5 or 6 argument(s): '
                            'id source destination release weight [size]')
        pid = args[0]
        if pid in self.packet_ids:
            raise self.fail(f'duplicate packet {pid}')
        self.packet_ids.add(pid)
        source = self.node_arg(args[1], Layer.SOURCE)
        dest = self.node_arg(args[2], Layer.DESTINATION)
        release = self.int_arg(args[3], 'release')
        try:
            weight = parse_rational(args[4])
            size = parse_rational(args[5]) if len(args) == 6 else Fraction(1)
        except ValueError as e:
            raise self.fail(str(e))
        if weight <= 0:
            raise self.fail('weight must be > 0')
        if size.denominator != 1 or size < 1:
            raise self.fail('size must be a positive integer')
        self.packets.append(SizedPacket(
            Packet(pid, source, dest, release, weight), int(size)))

    def result(self) -> Instance:
        if self.section is None:
            raise ParseError(0, '', 'missing topology section')
        topology = Topology(self.nodes, self.attach, self.edges, self.links)
        packets = split_to_unit(self.packets)
        ids = set()  # type: Set[str]
        for p in packets:
            if p.id in ids:
                raise ParseError(0, '', f'duplicate packet {p.id} after '
                                 'splitting sized packets')
            ids.add(p.id)
        return Instance(topology, packets)


def parse_instance(text: str) -> Instance:
    ''' Parse an instance file. Raises ParseError with the line number. '''
    parser = _Parser()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parser.feed(lineno, line)
    return parser.result()


def serialize_instance(instance: Instance) -> str:
    ''' Inverse of parse_instance(). Packets are always written unit-size. '''
    topo = instance.topology
    lines = ['topology']
    lines += [f'node {n} {layer.value}' for n, layer in topo.node_records]
    lines += [f'attach {a.node} {a.owner} {a.delay}' for a in topo.attachments]
    lines += [f'edge {e.transmitter} {e.receiver} {e.delay}'
              for e in topo.edges]
    lines += [f'link {x.source} {x.dest} {x.delay}' for x in topo.links]
    lines.append('packets')
    lines += [f'packet {p.id} {p.source} {p.dest} {p.release} '
              f'{fmt_rational(p.weight)}' for p in instance.packets]
    return '\n'.join(lines) + '\n'


def load_instance(path: str) -> Instance:
    with open(path, encoding='utf-8') as fp:
        return parse_instance(fp.read())


# -----------------------------------
#        Synthetic workloads
# -----------------------------------

def arrival_times(
    rng: np.random.Generator, count: int, rate: float,
    burst_on: int = 1, burst_off: int = 0,
) -> List[int]:
    '''
    Poisson arrivals at `rate` per step of "on" time. Every `burst_on`
    steps of on time are followed by `burst_off` silent steps, so with
    burst_off = 0 the process is the plain uniform one.
    '''
    active = np.cumsum(rng.exponential(1.0 / rate, size=count))
    if burst_off > 0:
        active = active + burst_off * np.floor(active / burst_on)
    return [integral_release(float(t)) for t in active]


def pair_probabilities(count: int, skew: float) -> np.ndarray:
    ''' Zipf weights 1/rank^skew, normalized. skew 0 is uniform. '''
    ranks = np.arange(1, count + 1, dtype=float)
    weights = ranks ** -skew
    return weights / weights.sum()


def generate_topology(
    cfg: 'GeneratorConfig', rng: np.random.Generator
) -> Topology:
    sources = [f's{i}' for i in range(1, cfg.sources + 1)]
    dests = [f'd{i}' for i in range(1, cfg.destinations + 1)]
    nodes = {}  # type: Dict[str, Layer]
    attach = []  # type: List[Attachment]
    transmitters = []  # type: List[str]
    receivers = []  # type: List[str]

    def delay(bounds: Tuple[int, int]) -> int:
        return int(rng.integers(bounds[0], bounds[1] + 1))

    for s in sources:
        nodes[s] = Layer.SOURCE
        for _ in range(cfg.transmitters):
            t = f't{len(transmitters) + 1}'
            transmitters.append(t)
            nodes[t] = Layer.TRANSMITTER
            attach.append(Attachment(t, s, delay(cfg.attach_delay)))
    for d in dests:
        nodes[d] = Layer.DESTINATION
        for _ in range(cfg.receivers):
            r = f'r{len(receivers) + 1}'
            receivers.append(r)
            nodes[r] = Layer.RECEIVER
            attach.append(Attachment(r, d, delay(cfg.attach_delay)))
    edges = [ReconfigEdge(t, r, delay(cfg.edge_delay))
             for t in transmitters for r in receivers
             if rng.random() < cfg.edge_probability]
    links = [FixedLink(s, d, delay(cfg.link_delay))
             for s in sources for d in dests
             if rng.random() < cfg.link_probability]
    return Topology(nodes, attach, edges, links)


def generate(cfg: 'GeneratorConfig') -> Instance:
    ''' Deterministic instance from the config and its seed. '''
    cfg.validate()
    rng = default_rng(cfg.seed)
    topo = generate_topology(cfg, rng)
    pairs = [(s, d) for s in topo.nodes_of(Layer.SOURCE)
             for d in topo.nodes_of(Layer.DESTINATION)
             if is_deliverable(topo, Packet('', s, d, 0, Fraction(1)))]
    if not pairs:
        # nothing was drawn, connect the first pair directly
        s, d = topo.nodes_of(Layer.SOURCE)[0], topo.nodes_of(Layer.DESTINATION)[0]
        topo = Topology(topo.node_records, topo.attachments, topo.edges,
                        topo.links + (FixedLink(s, d, cfg.link_delay[1]),))
        pairs = [(s, d)]
        logger.debug('generate: no route drawn, added link (%s,%s)', s, d)

    if cfg.model == 'bursty-onoff':
        releases = arrival_times(rng, cfg.packets, cfg.rate,
                                 cfg.burst_on, cfg.burst_off)
    else:
        releases = arrival_times(rng, cfg.packets, cfg.rate)
    if cfg.model == 'zipf-skewed':
        picks = rng.choice(len(pairs), size=cfg.packets,
                           p=pair_probabilities(len(pairs), cfg.skew))
    else:
        picks = rng.choice(len(pairs), size=cfg.packets)
    if cfg.weights == 'integer':
        weights = [Fraction(int(w)) for w in
                   rng.integers(1, cfg.weight_max + 1, size=cfg.packets)]
    else:
        weights = [Fraction(1)] * cfg.packets

    packets = []
    for i, (release, pick, weight) in enumerate(
            zip(releases, picks, weights), start=1):
        s, d = pairs[int(pick)]
        packets.append(Packet(f'p{i}', s, d, release, weight))
    logger.info('generated %s instance: %d packets over %d pairs (seed=%d)',
                cfg.model, len(packets), len(pairs), cfg.seed)
    return Instance(topo, packets)
