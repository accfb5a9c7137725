'''
Comparison policies. They share the engine with the impact dispatcher and
only swap the routing rule or the chunk priority.
'''
from fractions import Fraction
import logging
from typing import TYPE_CHECKING, Dict, Type
from numpy.random import default_rng
from .dispatcher import (
    Dispatcher, fixed_assignment, reconfig_assignment
)
from .engine import Engine
from .model import candidate_edges
if TYPE_CHECKING:
    from .dispatcher import Assignment, PendingView
    from .engine import RunLog
    from .model import Instance, Packet

logger = logging.getLogger(__name__)


class UnknownPolicyError(ValueError):
    def __init__(self, policy: str) -> None:
        super().__init__(policy)
        self.policy = policy

    def __str__(self) -> str:
        return 'unknown policy "{}", expected one of: {}'.format(
            self.policy, ', '.join(POLICIES))


class RandomDispatcher(Dispatcher):
    ''' Uniformly random candidate edge, fixed link only if there is none. '''
    name = 'random-dispatch'

    def __init__(self, seed: int = 0) -> None:
        self.seed = seed
        self.rng = default_rng(seed)

    def __call__(self, packet: 'Packet', view: 'PendingView') -> 'Assignment':
        edges = candidate_edges(view.topology, packet)
        if not edges:
            return fixed_assignment(packet, view.topology)
        edge = edges[int(self.rng.integers(len(edges)))]
        return reconfig_assignment(packet, edge, view)


class LeastLoadedDispatcher(Dispatcher):
    '''
    Candidate edge with the least pending weight at its endpoints. Ties go
    to the first edge in (transmitter, receiver) order.
    '''
    name = 'least-loaded'

    def __call__(self, packet: 'Packet', view: 'PendingView') -> 'Assignment':
        edges = candidate_edges(view.topology, packet)
        if not edges:
            return fixed_assignment(packet, view.topology)
        edge = min(edges, key=lambda e: sum(
            (c.weight for c in view.adjacent(e)), Fraction(0)))
        return reconfig_assignment(packet, edge, view)


# policy name -> (dispatcher class, chunk priority)
POLICIES = {
    'alg': (Dispatcher, 'weight'),
    'fifo-priority': (Dispatcher, 'fifo'),
    'random-dispatch': (RandomDispatcher, 'weight'),
    'least-loaded': (LeastLoadedDispatcher, 'weight'),
    'least-loaded-dispatch': (LeastLoadedDispatcher, 'weight'),
}  # type: Dict[str, tuple]


def make_dispatcher(policy: str, seed: int = 0) -> Dispatcher:
    try:
        cls = POLICIES[policy][0]  # type: Type[Dispatcher]
    except KeyError:
        raise UnknownPolicyError(policy)
    if cls is RandomDispatcher:
        return RandomDispatcher(seed)
    return cls()


def baseline_run(
    instance: 'Instance', policy: str, seed: int = 0
) -> 'RunLog':
    ''' Run the engine under a named policy. Deterministic given seed. '''
    dispatcher = make_dispatcher(policy, seed)
    priority = POLICIES[policy][1]
    logger.info('baseline %s (seed=%s)', policy, seed)
    log = Engine(instance, dispatcher, priority=priority).run()
    log.policy = policy
    return log
