'''
Exhaustive offline optimum for desk-scale instances: unit reconfigurable
delays, non-preemptive, non-migratory, unit speed.
'''
from fractions import Fraction
from itertools import combinations
import logging
from typing import (
    TYPE_CHECKING, Dict, FrozenSet, Iterator, List, NamedTuple, Optional,
    Tuple
)
from .dispatcher import Assignment, FixedRoute, NoRouteError, ReconfigRoute
from .engine import RunLog
from .matching import Matching
from .model import (
    InstanceError, candidate_edges, horizon, is_deliverable, make_chunks,
    path_delay, validate_instance
)
if TYPE_CHECKING:
    from .model import EdgeRef, Instance, Packet

logger = logging.getLogger(__name__)

Send = Tuple[str, 'EdgeRef']
State = Tuple[int, FrozenSet[str]]


class OracleScaleError(ValueError):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason

    def __str__(self) -> str:
        return f'oracle scale exceeded: {self.reason}'


class OracleLimits(NamedTuple):
    max_packets: int = 8


class OracleResult(NamedTuple):
    cost: Fraction
    log: RunLog  # per-step matchings and fixed-link decisions
    explored_states: int


class _Choice(NamedTuple):
    fixed: Tuple[str, ...]
    sends: Tuple[Send, ...]


class BruteForce:
    '''
    Dynamic program over (step, waiting packets). At every step the newly
    released packets pick fixed link or waiting, then every matching of
    waiting packets to free edges is tried. Matchings leaving a packet
    idle next to a free edge at most one step slower than its fastest
    one are skipped, they are dominated by sending it right away.
    '''

    def __init__(self, instance: 'Instance', limits: OracleLimits) -> None:
        errors = validate_instance(instance)
        if errors:
            raise InstanceError(errors)
        topo = instance.topology
        if len(instance.packets) > limits.max_packets:
            raise OracleScaleError('{} packets > cap {}'.format(
                len(instance.packets), limits.max_packets))
        if any(e.delay != 1 for e in topo.edges):
            raise OracleScaleError('reconfigurable delays must all be 1')
        for p in instance.packets:
            if not is_deliverable(topo, p):
                raise NoRouteError(p.id)
        self.instance = instance
        self.limit = horizon(instance)
        self._packets = instance.by_id
        self._releases = {}  # type: Dict[int, List[Packet]]
        for p in instance.dispatch_order():
            self._releases.setdefault(p.release, []).append(p)
        self._edges = {p.id: candidate_edges(topo, p)
                       for p in instance.packets}
        self._delay = {e: path_delay(topo, e) for e in topo.edge_refs()}
        self._fastest = {pid: min((self._delay[e] for e in edges), default=0)
                         for pid, edges in self._edges.items()}
        self._memo = {}  # type: Dict[State, Tuple[Optional[Fraction], Optional[_Choice]]]

    @property
    def explored_states(self) -> int:
        return len(self._memo)

    def solve(self) -> OracleResult:
        if not self.instance.packets:
            return OracleResult(Fraction(0), RunLog(
                self.instance, policy='oracle'), 0)
        start = min(self._releases)
        cost = self._best(start, frozenset())
        assert cost is not None, 'every deliverable instance has a schedule'
        log = self._replay(start)
        logger.info('oracle: cost=%s explored=%d', cost, self.explored_states)
        return OracleResult(cost, log, self.explored_states)

    # ------------
    #   Search
    # ------------

    def _next_release(self, time: int) -> Optional[int]:
        return min((t for t in self._releases if t > time), default=None)

    def _continue(self, time: int, waiting: FrozenSet[str]) \
            -> Optional[Fraction]:
        if not waiting:
            nxt = self._next_release(time)
            return Fraction(0) if nxt is None else self._best(nxt, waiting)
        if time + 1 >= self.limit:
            return None
        return self._best(time + 1, waiting)

    def _best(self, time: int, waiting: FrozenSet[str]) -> Optional[Fraction]:
        key = (time, waiting)
        if key in self._memo:
            return self._memo[key][0]
        topo = self.instance.topology
        arrivals = self._releases.get(time, [])
        forced = [p for p in arrivals if not self._edges[p.id]]
        optional = [p for p in arrivals if self._edges[p.id]
                    and topo.link_delay(p.source, p.dest) is not None]
        best = None  # type: Optional[Fraction]
        best_choice = None  # type: Optional[_Choice]
        for k in range(len(optional) + 1):
            for subset in combinations(optional, k):
                fixed = forced + list(subset)
                fixed_cost = sum(
                    (p.weight * topo.link_delay(p.source, p.dest)  # type: ignore
                     for p in fixed), Fraction(0))
                fixed_ids = {p.id for p in fixed}
                pending = waiting | {p.id for p in arrivals
                                     if p.id not in fixed_ids}
                for sends in list(self._matchings(sorted(pending))):
                    now = sum((self._latency(pid, e, time)
                               for pid, e in sends), Fraction(0))
                    rest = pending - {pid for pid, _ in sends}
                    future = self._continue(time, rest)
                    if future is None:
                        continue
                    total = fixed_cost + now + future
                    if best is None or total < best:
                        best = total
                        best_choice = _Choice(
                            tuple(sorted(fixed_ids)), sends)
        self._memo[key] = (best, best_choice)
        return best

    def _latency(self, pid: str, edge: 'EdgeRef', time: int) -> Fraction:
        p = self._packets[pid]
        return p.weight * (time + self._delay[edge] - p.release)

    def _matchings(self, pending: List[str]) -> Iterator[Tuple[Send, ...]]:
        ''' Non-dominated matchings of the pending packets. '''
        def rec(i: int, used_t: FrozenSet[str], used_r: FrozenSet[str],
                acc: Tuple[Send, ...]) -> Iterator[Tuple[Send, ...]]:
            if i == len(pending):
                if not self._dominated(pending, acc, used_t, used_r):
                    yield acc
                return
            pid = pending[i]
            yield from rec(i + 1, used_t, used_r, acc)
            for e in self._edges[pid]:
                if e.transmitter not in used_t and e.receiver not in used_r:
                    yield from rec(i + 1, used_t | {e.transmitter},
                                   used_r | {e.receiver}, acc + ((pid, e),))
        return rec(0, frozenset(), frozenset(), ())

    def _dominated(self, pending: List[str], sends: Tuple[Send, ...],
                   used_t: FrozenSet[str], used_r: FrozenSet[str]) -> bool:
        sent = {pid for pid, _ in sends}
        for pid in pending:
            if pid in sent:
                continue
            for e in self._edges[pid]:
                if e.transmitter not in used_t and e.receiver not in used_r \
                        and self._delay[e] <= self._fastest[pid] + 1:
                    return True
        return False

    # ------------
    #   Schedule
    # ------------

    def _replay(self, start: int) -> RunLog:
        ''' Follow the memoized decisions and record them as a RunLog. '''
        topo = self.instance.topology
        log = RunLog(self.instance, policy='oracle')
        time, waiting = start, frozenset()  # type: Tuple[int, FrozenSet[str]]
        while True:
            _, choice = self._memo[(time, waiting)]
            assert choice is not None
            for pid in choice.fixed:
                p = self._packets[pid]
                delay = topo.link_delay(p.source, p.dest)
                log.record_assignment(p, Assignment(
                    pid, FixedRoute(delay), p.weight * delay))  # type: ignore
            chunks = []
            for pid, e in choice.sends:
                p = self._packets[pid]
                route = ReconfigRoute(e, make_chunks(p, e, 1))
                log.record_assignment(p, Assignment(
                    pid, route, self._latency(pid, e, time)))
                chunks.extend(route.chunks)
            if chunks:
                log.record_step(time, Matching(chunks), ())
            arrived = {p.id for p in self._releases.get(time, [])}
            rest = (waiting | arrived) - set(choice.fixed) \
                - {pid for pid, _ in choice.sends}
            if rest:
                time, waiting = time + 1, frozenset(rest)
                continue
            nxt = self._next_release(time)
            if nxt is None:
                return log
            time, waiting = nxt, frozenset()


def brute_force_opt(
    instance: 'Instance', limits: OracleLimits = OracleLimits()
) -> OracleResult:
    ''' Minimum weighted latency over all unit-speed schedules. '''
    return BruteForce(instance, limits).solve()
