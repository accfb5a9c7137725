from typing import (
    TYPE_CHECKING, Any, Callable, Dict, Iterable, Iterator, List, NamedTuple,
    Set, Tuple
)
from .model import UnknownEdgeError
if TYPE_CHECKING:
    from .engine import RunLog
    from .model import Chunk, Topology

PriorityKey = Callable[['Chunk'], Tuple[Any, ...]]


def weight_priority(c: 'Chunk') -> Tuple[Any, ...]:
    ''' Decreasing weight, then earlier packet, then lower chunk index. '''
    return (-c.weight, c.release, c.seq, c.index)


def fifo_priority(c: 'Chunk') -> Tuple[Any, ...]:
    ''' Earlier release first, then decreasing weight. '''
    return (c.release, -c.weight, c.seq, c.index)


PRIORITIES = {
    'weight': weight_priority,
    'fifo': fifo_priority,
}  # type: Dict[str, PriorityKey]


class BlockedPair(NamedTuple):
    chunk: 'Chunk'
    blocker: 'Chunk'


class Matching:
    ''' Chunks transmitted in one step. Endpoints are used at most once. '''

    def __init__(self, entries: Iterable['Chunk'] = ()) -> None:
        self.entries = tuple(entries)

    @property
    def transmitters(self) -> Set[str]:
        return {c.edge.transmitter for c in self.entries}

    @property
    def receivers(self) -> Set[str]:
        return {c.edge.receiver for c in self.entries}

    def labels(self) -> List[str]:
        return [c.label for c in self.entries]

    def __iter__(self) -> Iterator['Chunk']:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, chunk: object) -> bool:
        return chunk in self.entries

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matching) and \
            set(self.entries) == set(other.entries)

    def __hash__(self) -> int:
        return hash(frozenset(self.entries))

    def __repr__(self) -> str:
        return '<Matching {}>'.format(' '.join(self.labels()))


class StabilityViolation(NamedTuple):
    time: int
    chunk: 'Chunk'
    reason: str


def build_stable_matching(
    pending: Iterable['Chunk'],
    topology: 'Topology',
    priority: PriorityKey = weight_priority,
) -> Tuple[Matching, Tuple[BlockedPair, ...]]:
    '''
    Greedy: admit chunks in priority order while both endpoints are free.
    A rejected chunk is attributed to the chunk holding its transmitter,
    or its receiver if the transmitter is free.
    '''
    busy_t = {}  # type: Dict[str, Chunk]
    busy_r = {}  # type: Dict[str, Chunk]
    matched = []  # type: List[Chunk]
    blocked = []  # type: List[BlockedPair]
    for c in sorted(pending, key=priority):
        if not topology.has_edge(c.edge):
            raise UnknownEdgeError(c.edge)
        t, r = c.edge
        if t in busy_t:
            blocked.append(BlockedPair(c, busy_t[t]))
        elif r in busy_r:
            blocked.append(BlockedPair(c, busy_r[r]))
        else:
            busy_t[t] = busy_r[r] = c
            matched.append(c)
    return Matching(matched), tuple(blocked)


def verify_stability(log: 'RunLog') -> List[StabilityViolation]:
    '''
    Re-derive the pending set of every step from the log and check that
    (a) no endpoint is used twice and (b) every pending unmatched chunk
    has an adjacent matched chunk of greater or equal priority.
    '''
    priority = PRIORITIES[log.priority]
    violations = []  # type: List[StabilityViolation]
    for step in log.steps:
        used = set()  # type: Set[Tuple[str, str]]
        for c in step.matched:
            for end in (('t', c.edge.transmitter), ('r', c.edge.receiver)):
                if end in used:
                    violations.append(StabilityViolation(
                        step.time, c, f'endpoint {end[1]} used twice'))
                used.add(end)
        for c in log.pending_at(step.time):
            if c in step.matched:
                continue
            key = priority(c)
            if not any(priority(m) <= key for m in step.matched
                       if m.edge.transmitter == c.edge.transmitter
                       or m.edge.receiver == c.edge.receiver):
                violations.append(StabilityViolation(
                    step.time, c, 'no adjacent matched chunk of higher '
                    'or equal priority'))
    return violations
