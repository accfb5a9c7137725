from collections import deque
from fractions import Fraction
import logging
from typing import (
    TYPE_CHECKING, Deque, Dict, Iterator, List, NamedTuple, Optional, Tuple
)
from .dispatcher import Dispatcher, NoRouteError, PendingView
from .matching import PRIORITIES, Matching, build_stable_matching
from .model import (
    InstanceError, horizon, is_deliverable, validate_instance
)
if TYPE_CHECKING:
    from .dispatcher import Assignment
    from .matching import BlockedPair
    from .model import Chunk, Instance, Packet

logger = logging.getLogger(__name__)


class IncompleteLogError(RuntimeError):
    def __init__(self, missing: List[str]) -> None:
        super().__init__(missing)
        self.missing = missing

    def __str__(self) -> str:
        return 'run log is incomplete, undelivered: ' + ', '.join(self.missing)


class StepRecord(NamedTuple):
    time: int
    matched: Matching
    blocked: Tuple['BlockedPair', ...]


class FixedSend(NamedTuple):
    packet: str
    departure: int
    latency: Fraction  # w_p·ℓ_p


class RunLog:
    '''
    Transmission history of one run. Costs and dual variables are
    reconstructed from it, nothing else is needed.
    '''

    def __init__(
        self,
        instance: 'Instance',
        *,
        priority: str = 'weight',
        policy: str = 'alg',
    ) -> None:
        self.instance = instance
        self.topology = instance.topology
        self.priority = priority
        self.policy = policy
        self.steps = []  # type: List[StepRecord]
        self.fixed_sends = {}  # type: Dict[str, FixedSend]
        self.assignments = {}  # type: Dict[str, Assignment]
        self.transmitted = {}  # type: Dict[Chunk, int]
        self.deliveries = {}  # type: Dict[Chunk, int]

    # ------------
    #   Recording
    # ------------

    def record_assignment(self, packet: 'Packet', a: 'Assignment') -> None:
        self.assignments[packet.id] = a
        if a.is_fixed:
            self.fixed_sends[packet.id] = FixedSend(
                packet.id, packet.release,
                packet.weight * a.route.delay)  # type: ignore

    def record_step(
        self, time: int, matched: Matching, blocked: Tuple['BlockedPair', ...]
    ) -> StepRecord:
        rec = StepRecord(time, matched, blocked)
        self.steps.append(rec)
        for c in matched:
            self.transmitted[c] = time
            self.deliveries[c] = self.delivery_time(c, time)
        return rec

    def delivery_time(self, chunk: 'Chunk', time: int) -> int:
        ''' A chunk sent at step τ arrives at τ + 1 + d(s,t) + d(r,dest). '''
        return time + 1 + self.topology.attach_delay(chunk.edge.transmitter) \
            + self.topology.attach_delay(chunk.edge.receiver)

    # ------------
    #   Queries
    # ------------

    @property
    def packets(self) -> Tuple['Packet', ...]:
        return self.instance.packets

    def chunks(self) -> Iterator['Chunk']:
        ''' All chunks routed through the reconfigurable network. '''
        for a in self.assignments.values():
            yield from a.chunks

    def undelivered(self) -> List[str]:
        missing = [p.id for p in self.packets if p.id not in self.assignments]
        missing += [c.label for c in self.chunks() if c not in self.deliveries]
        return missing

    def is_complete(self) -> bool:
        return not self.undelivered()

    def ensure_complete(self) -> None:
        missing = self.undelivered()
        if missing:
            raise IncompleteLogError(missing)

    def pending_at(self, time: int) -> List['Chunk']:
        ''' Chunks dispatched by `time` and not transmitted before it. '''
        return [c for c in self.chunks() if c.release <= time
                and self.transmitted.get(c, time) >= time]

    def blockers(self) -> Dict[Tuple['Chunk', int], 'Chunk']:
        ''' (blocked chunk, step) -> blocking chunk. '''
        return {(b.chunk, step.time): b.blocker
                for step in self.steps for b in step.blocked}

    def completion(self, packet_id: str) -> int:
        a = self.assignments[packet_id]
        if a.is_fixed:
            send = self.fixed_sends[packet_id]
            return send.departure + a.route.delay  # type: ignore
        return max(self.deliveries[c] for c in a.chunks)

    @property
    def last_step(self) -> Optional[int]:
        return self.steps[-1].time if self.steps else None

    def __repr__(self) -> str:
        return '<RunLog policy="{}" packets={} steps={}>'.format(
            self.policy, len(self.packets), len(self.steps))


class Engine:
    '''
    Discrete-time simulation. At every step the arrivals are dispatched
    one by one, then the greedy stable matching over all pending chunks
    is transmitted. One full chunk per matched edge per step.
    '''

    def __init__(
        self,
        instance: 'Instance',
        dispatcher: Optional[Dispatcher] = None,
        *,
        priority: str = 'weight',
    ) -> None:
        errors = validate_instance(instance)
        if errors:
            raise InstanceError(errors)
        for p in instance.packets:
            if not is_deliverable(instance.topology, p):
                raise NoRouteError(p.id)
        self.instance = instance
        self.dispatcher = dispatcher or Dispatcher()
        self._priority = PRIORITIES[priority]
        self._arrivals = deque(instance.dispatch_order())  # type: Deque[Packet]
        self._pending = []  # type: List[Chunk]
        self.log = RunLog(instance, priority=priority,
                          policy=self.dispatcher.name)

    @property
    def done(self) -> bool:
        return not self._arrivals and not self._pending

    def dispatch_arrivals(self, time: int) -> None:
        ''' Handle every packet released by `time`, in input order. '''
        topo = self.instance.topology
        while self._arrivals and self._arrivals[0].release <= time:
            packet = self._arrivals.popleft()
            view = PendingView(topo, self._pending)
            assignment = self.dispatcher(packet, view)
            self.log.record_assignment(packet, assignment)
            self._pending.extend(assignment.chunks)

    def step(self, time: int) -> Optional[StepRecord]:
        ''' Dispatch arrivals, then transmit one stable matching. '''
        self.dispatch_arrivals(time)
        if not self._pending:
            return None
        matched, blocked = build_stable_matching(
            self._pending, self.instance.topology, self._priority)
        self._pending = [c for c in self._pending if c not in matched]
        logger.debug('step %d: matched %s, blocked %d',
                     time, matched.labels(), len(blocked))
        return self.log.record_step(time, matched, blocked)

    def run(self) -> RunLog:
        ''' Advance until every packet is delivered. '''
        if self.done:
            return self.log
        limit = horizon(self.instance)
        time = self._arrivals[0].release
        while not self.done:
            if not self._pending and self._arrivals[0].release > time:
                time = self._arrivals[0].release  # idle, skip ahead
            self.step(time)
            time += 1
            if self._pending and time >= limit:
                raise RuntimeError(f'pending chunks beyond horizon {limit}')
        logger.info('run finished: policy=%s packets=%d steps=%d',
                    self.log.policy, len(self.instance.packets),
                    len(self.log.steps))
        return self.log


def run(
    instance: 'Instance',
    dispatcher: Optional[Dispatcher] = None,
    *,
    priority: str = 'weight',
) -> RunLog:
    return Engine(instance, dispatcher, priority=priority).run()
