from fractions import Fraction
from math import ceil
from typing import (
    TYPE_CHECKING, Dict, List, NamedTuple, Optional, Tuple
)
from .model import candidate_edges, path_delay
if TYPE_CHECKING:
    from .engine import RunLog
    from .model import EdgeRef, Instance

XKey = Tuple[str, 'EdgeRef', int]  # (packet, edge, step)


class Violation(NamedTuple):
    constraint: str
    lhs: Fraction
    rhs: Fraction

    @property
    def slack(self) -> Fraction:
        return self.rhs - self.lhs


class FeasibilityReport(NamedTuple):
    constraints_checked: int
    violations: List[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations


class FractionalSchedule:
    '''
    x: fraction of packet p sent over edge e starting at step τ.
    y: fraction of packet p sent over its fixed link.
    '''

    def __init__(
        self,
        x: Optional[Dict[XKey, Fraction]] = None,
        y: Optional[Dict[str, Fraction]] = None,
    ) -> None:
        self.x = dict(x or {})  # type: Dict[XKey, Fraction]
        self.y = dict(y or {})  # type: Dict[str, Fraction]

    def add_x(self, packet: str, edge: 'EdgeRef', time: int,
              amount: Fraction) -> None:
        key = (packet, edge, time)
        self.x[key] = self.x.get(key, Fraction(0)) + amount

    def __repr__(self) -> str:
        return f'<FractionalSchedule x={len(self.x)} y={len(self.y)}>'


# -----------------------------------
#           Run costs
# -----------------------------------

def reconfig_cost(log: 'RunLog') -> Fraction:
    ''' Weighted latency of the traffic sent through the reconfigurable part. '''
    log.ensure_complete()
    return sum((c.weight * (log.deliveries[c] - c.release)
                for c in log.chunks()), Fraction(0))


def run_cost(log: 'RunLog') -> Fraction:
    ''' Total weighted fractional latency of a complete run. '''
    fixed = sum((s.latency for s in log.fixed_sends.values()), Fraction(0))
    return reconfig_cost(log) + fixed


def accrued_cost(log: 'RunLog') -> Fraction:
    '''
    Same quantity as run_cost(), accrued step by step: every undelivered
    fraction of a packet pays its weight in every step.
    '''
    log.ensure_complete()
    per_step = {}  # type: Dict[int, Fraction]

    def accrue(start: int, end: int, weight: Fraction) -> None:
        for tau in range(start, end):
            per_step[tau] = per_step.get(tau, Fraction(0)) + weight

    for c in log.chunks():
        accrue(c.release, log.deliveries[c], c.weight)
    for send in log.fixed_sends.values():
        a = log.assignments[send.packet]
        weight = log.instance.by_id[send.packet].weight
        accrue(send.departure, send.departure + a.route.delay,  # type: ignore
               weight)
    return sum(per_step.values(), Fraction(0))


def packet_latency(log: 'RunLog', packet_id: str) -> Fraction:
    ''' Weighted latency of a single packet. '''
    a = log.assignments[packet_id]
    if a.is_fixed:
        return log.fixed_sends[packet_id].latency
    return sum((c.weight * (log.deliveries[c] - c.release) for c in a.chunks),
               Fraction(0))


# -----------------------------------
#        Fractional schedules
# -----------------------------------

def primal_cost(schedule: FractionalSchedule, instance: 'Instance') -> Fraction:
    ''' Objective of the primal LP for the given variable assignment. '''
    topo = instance.topology
    total = Fraction(0)
    for (pid, edge, tau), amount in schedule.x.items():
        p = instance.by_id[pid]
        total += p.weight * amount * (tau + path_delay(topo, edge) - p.release)
    for pid, amount in schedule.y.items():
        p = instance.by_id[pid]
        link = topo.link_delay(p.source, p.dest)
        if link is not None:
            total += p.weight * amount * link
    return total


def check_primal_feasible(
    schedule: FractionalSchedule, instance: 'Instance', epsilon: Fraction
) -> FeasibilityReport:
    '''
    Coverage of every packet and the per-step transmitter / receiver load
    bound 1/(2+ε). Variables outside their domain are reported as well.
    '''
    epsilon = Fraction(epsilon)
    if epsilon < 0:
        raise ValueError('epsilon must be ≥ 0')
    topo = instance.topology
    bound = 1 / (2 + epsilon)
    violations = []  # type: List[Violation]
    checked = 0
    covered = {p.id: Fraction(0) for p in instance.packets}
    load_t = {}  # type: Dict[Tuple[str, int], Fraction]
    load_r = {}  # type: Dict[Tuple[str, int], Fraction]

    for (pid, edge, tau), amount in sorted(schedule.x.items()):
        p = instance.by_id[pid]
        checked += 1
        if amount < 0:
            violations.append(Violation(f'x[{pid},{edge},{tau}] ≥ 0',
                                        -amount, Fraction(0)))
        if tau < p.release or edge not in candidate_edges(topo, p):
            violations.append(Violation(
                f'x[{pid},{edge},{tau}] outside domain', amount, Fraction(0)))
            continue
        covered[pid] += amount
        load = topo.edge_delay(edge) * amount
        key_t, key_r = (edge.transmitter, tau), (edge.receiver, tau)
        load_t[key_t] = load_t.get(key_t, Fraction(0)) + load
        load_r[key_r] = load_r.get(key_r, Fraction(0)) + load

    for pid, amount in sorted(schedule.y.items()):
        p = instance.by_id[pid]
        checked += 1
        if amount < 0:
            violations.append(Violation(f'y[{pid}] ≥ 0', -amount, Fraction(0)))
        if topo.link_delay(p.source, p.dest) is None:
            violations.append(Violation(
                f'y[{pid}] outside domain', amount, Fraction(0)))
            continue
        covered[pid] += amount

    for pid, total in covered.items():
        checked += 1
        if total < 1:
            violations.append(Violation(f'coverage {pid}', total, Fraction(1)))

    for name, loads in (('transmitter', load_t), ('receiver', load_r)):
        for (node, tau), load in sorted(loads.items()):
            checked += 1
            if load > bound:
                violations.append(Violation(
                    f'{name} {node} load at {tau}', load, bound))
    return FeasibilityReport(checked, violations)


def dilation_factor(epsilon: Fraction) -> int:
    ''' Smallest integer m with m ≥ 2+ε. '''
    return int(ceil(2 + Fraction(epsilon)))


def dilate_run(log: 'RunLog', epsilon: Fraction) -> FractionalSchedule:
    '''
    Slow a unit-speed run down by m = ⌈2+ε⌉: a chunk sent at step τ is
    spread evenly over the steps mτ .. mτ+m-1. The result is a feasible
    primal solution at speed 1/(2+ε).
    '''
    epsilon = Fraction(epsilon)
    if epsilon < 0:
        raise ValueError('epsilon must be ≥ 0')
    log.ensure_complete()
    m = dilation_factor(epsilon)
    schedule = FractionalSchedule()
    for c, tau in log.transmitted.items():
        mass = c.size / m
        for k in range(m):
            schedule.add_x(c.packet, c.edge, m * tau + k, mass)
    for pid in log.fixed_sends:
        schedule.y[pid] = Fraction(1)
    return schedule
