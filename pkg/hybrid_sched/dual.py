'''
Dual fitting on concrete runs. The dual solution (alpha, beta) is rebuilt
from a RunLog and every inequality the competitive analysis relies on is
evaluated exactly, constraint by constraint.
'''
from fractions import Fraction
import logging
from typing import (
    TYPE_CHECKING, Dict, Iterable, List, NamedTuple, Optional, Tuple
)
from .dispatcher import PendingView, compute_impact
from .matching import verify_stability
from .metrics import (
    Violation, check_primal_feasible, dilate_run, primal_cost,
    reconfig_cost, run_cost
)
from .model import candidate_edges, horizon, path_delay
if TYPE_CHECKING:
    from .engine import RunLog
    from .model import Chunk, Packet

logger = logging.getLogger(__name__)

NodeStep = Tuple[str, int]


class MissingBlockerError(RuntimeError):
    def __init__(self, chunk: 'Chunk', time: int) -> None:
        super().__init__(chunk, time)
        self.chunk = chunk
        self.time = time

    def __str__(self) -> str:
        return (f'chunk {self.chunk.label} waited at step {self.time} '
                'without a recorded blocker')


class DualSolution:
    '''
    alpha per packet, beta per (transmitter, step) and (receiver, step).
    beta is sparse: only steps where some chunk is active are stored.
    '''

    def __init__(
        self,
        alpha: Dict[str, Fraction],
        beta_t: Dict[NodeStep, Fraction],
        beta_r: Dict[NodeStep, Fraction],
        epsilon: Fraction,
    ) -> None:
        self.alpha = alpha
        self.beta_t = beta_t
        self.beta_r = beta_r
        self.epsilon = epsilon
        self.beta_t_total = sum(beta_t.values(), Fraction(0))
        self.beta_r_total = sum(beta_r.values(), Fraction(0))
        self.objective = sum(alpha.values(), Fraction(0)) \
            - (self.beta_t_total + self.beta_r_total) / (2 + epsilon)

    @property
    def lower_bound(self) -> Fraction:
        ''' Halved objective, a lower bound on the speed-limited optimum. '''
        return self.objective / 2

    def beta(self, transmitter: str, receiver: str, time: int) -> Fraction:
        return self.beta_t.get((transmitter, time), Fraction(0)) \
            + self.beta_r.get((receiver, time), Fraction(0))

    def __repr__(self) -> str:
        return '<DualSolution eps={} objective={}>'.format(
            self.epsilon, self.objective)


class Charge(NamedTuple):
    packet: str  # the packet receiving the charge
    chunk: Optional['Chunk']  # None for fixed-link latency
    time: int
    kind: str  # fixed, self, sibling, blocked-by-earlier, blocks-earlier
    amount: Fraction


class ChargeLedger:
    ''' Every accrued unit of weighted latency, charged to one packet. '''

    def __init__(self, entries: Iterable[Charge], packets: Iterable[str]):
        self.entries = list(entries)
        self.charges = {p: Fraction(0) for p in packets}  # type: Dict[str, Fraction]
        for x in self.entries:
            self.charges[x.packet] += x.amount

    @property
    def total(self) -> Fraction:
        return sum(self.charges.values(), Fraction(0))

    def by_kind(self, packet: str) -> Dict[str, Fraction]:
        rv = {}  # type: Dict[str, Fraction]
        for x in self.entries:
            if x.packet == packet:
                rv[x.kind] = rv.get(x.kind, Fraction(0)) + x.amount
        return rv

    def __getitem__(self, packet: str) -> Fraction:
        return self.charges[packet]


class CheckReport(NamedTuple):
    check: str
    constraints_checked: int
    violations: List[Violation]
    lhs_max: Optional[Fraction] = None
    rhs_min: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        return 'ok' if self.ok else 'FAIL'


class RatioReport(NamedTuple):
    alg_cost: Fraction
    dual_objective: Fraction
    lower_bound: Fraction  # objective / 2
    factor: Fraction  # 2·(2/ε + 1)
    bound_holds: bool


class _Sweep:
    ''' Collects `lhs ≤ rhs` constraints into a CheckReport. '''

    def __init__(self, check: str) -> None:
        self.check = check
        self.count = 0
        self.violations = []  # type: List[Violation]
        self.lhs_max = None  # type: Optional[Fraction]
        self.rhs_min = None  # type: Optional[Fraction]

    def add(self, subject: str, lhs: Fraction, rhs: Fraction,
            holds: Optional[bool] = None, count: int = 1) -> None:
        self.count += count
        if self.lhs_max is None or lhs > self.lhs_max:
            self.lhs_max = lhs
        if self.rhs_min is None or rhs < self.rhs_min:
            self.rhs_min = rhs
        if not (lhs <= rhs if holds is None else holds):
            self.violations.append(Violation(subject, lhs, rhs))

    def report(self) -> CheckReport:
        for v in self.violations:
            logger.warning('%s violated: %s (%s > %s)',
                           self.check, v.constraint, v.lhs, v.rhs)
        return CheckReport(self.check, self.count, self.violations,
                           self.lhs_max, self.rhs_min)


# -----------------------------------
#           Dual solution
# -----------------------------------

def build_dual(log: 'RunLog', epsilon: Fraction) -> DualSolution:
    ''' alpha from dispatch-time impacts, beta from active chunk weights. '''
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError('epsilon must be > 0')
    log.ensure_complete()
    alpha = {pid: a.alpha for pid, a in log.assignments.items()}
    beta_t = {}  # type: Dict[NodeStep, Fraction]
    beta_r = {}  # type: Dict[NodeStep, Fraction]
    for c in log.chunks():
        t, r = c.edge
        for tau in range(c.release, log.deliveries[c]):
            beta_t[t, tau] = beta_t.get((t, tau), Fraction(0)) + c.weight
            beta_r[r, tau] = beta_r.get((r, tau), Fraction(0)) + c.weight
    return DualSolution(alpha, beta_t, beta_r, epsilon)


def check_beta_identity(log: 'RunLog', dual: DualSolution) -> CheckReport:
    ''' Σβ_t = Σβ_r = reconfig latency ≤ total cost, exactly. '''
    reconfig = reconfig_cost(log)
    total = run_cost(log)
    sweep = _Sweep('beta_identity')
    sweep.add('sum beta_t = reconfig latency', dual.beta_t_total, reconfig,
              holds=dual.beta_t_total == reconfig)
    sweep.add('sum beta_r = reconfig latency', dual.beta_r_total, reconfig,
              holds=dual.beta_r_total == reconfig)
    sweep.add('reconfig latency ≤ run cost', reconfig, total)
    return sweep.report()


# -----------------------------------
#           Charging
# -----------------------------------

def build_charges(log: 'RunLog') -> ChargeLedger:
    '''
    Charge every round of every chunk. Transmission and propagation rounds
    and rounds blocked by a sibling go to the chunk's own packet. A round
    blocked by another packet goes to whichever of the two arrived later.
    '''
    log.ensure_complete()
    packets = log.instance.by_id
    blockers = log.blockers()
    entries = []  # type: List[Charge]
    for send in log.fixed_sends.values():
        p = packets[send.packet]
        entries.append(
            Charge(p.id, None, send.departure, 'fixed', send.latency))
    for c in log.chunks():
        owner = packets[c.packet]
        sent = log.transmitted[c]
        for tau in range(c.release, sent):
            blocker = blockers.get((c, tau))
            if blocker is None:
                raise MissingBlockerError(c, tau)
            if blocker.packet == c.packet:
                entries.append(Charge(owner.id, c, tau, 'sibling', c.weight))
                continue
            other = packets[blocker.packet]
            if other.order > owner.order:
                entries.append(
                    Charge(other.id, c, tau, 'blocks-earlier', c.weight))
            else:
                entries.append(
                    Charge(owner.id, c, tau, 'blocked-by-earlier', c.weight))
        for tau in range(sent, log.deliveries[c]):
            entries.append(Charge(owner.id, c, tau, 'self', c.weight))
    return ChargeLedger(entries, packets)


def check_charge_conservation(log: 'RunLog', ledger: ChargeLedger) \
        -> CheckReport:
    ''' Σ c_p equals the cost of the run. '''
    total = run_cost(log)
    sweep = _Sweep('charge_conservation')
    sweep.add('sum of charges = run cost', ledger.total, total,
              holds=ledger.total == total)
    return sweep.report()


def check_alpha_bound(ledger: ChargeLedger, dual: DualSolution) \
        -> CheckReport:
    ''' c_p ≤ α_p for every packet. '''
    sweep = _Sweep('alpha_bound')
    for pid, charged in ledger.charges.items():
        sweep.add(f'c[{pid}] ≤ alpha[{pid}]', charged, dual.alpha[pid])
    return sweep.report()


# -----------------------------------
#           Constraint sweeps
# -----------------------------------

def pending_before(log: 'RunLog', packet: 'Packet') -> PendingView:
    ''' Rebuild B(p): chunks of earlier packets still pending at r_p. '''
    chunks = [c for c in log.chunks() if c.order < packet.order
              and log.transmitted[c] >= packet.release]
    return PendingView(log.topology, chunks)


def _last_active(dual: DualSolution) -> Dict[str, int]:
    ''' Last step with a non-zero beta, per transmitter / receiver. '''
    rv = {}  # type: Dict[str, int]
    for node, tau in list(dual.beta_t) + list(dual.beta_r):
        rv[node] = max(rv.get(node, tau), tau)
    return rv


def _sweep_steps(
    release: int, last_active: int, limit: int
) -> Tuple[range, Optional[int], int]:
    '''
    Split [release, limit) into the explicitly evaluated steps and a
    tail where beta vanishes. In the tail the left-hand side is constant
    and the right-hand side grows, so its first step stands for all.
    '''
    end = min(limit, max(release, last_active + 1))
    if end >= limit:
        return range(release, limit), None, 0
    return range(release, end), end, limit - end


def check_imp_bound(log: 'RunLog', dual: DualSolution) -> CheckReport:
    '''
    Imp(p,e) - d(e)·(β_t,τ + β_r,τ) ≤ 2·w_p·(τ + D(e) - r_p) for every
    packet, candidate edge and step below the horizon.
    '''
    topo = log.topology
    limit = horizon(log.instance)
    last = _last_active(dual)
    sweep = _Sweep('imp_bound')
    for p in log.instance.dispatch_order():
        view = pending_before(log, p)
        for e in candidate_edges(topo, p):
            imp = compute_impact(p, e, view).total
            d, big_d = topo.edge_delay(e), path_delay(topo, e)
            active = max(last.get(e.transmitter, -1), last.get(e.receiver, -1))
            steps, tail, tail_count = _sweep_steps(p.release, active, limit)
            for tau in steps:
                lhs = imp - d * dual.beta(e.transmitter, e.receiver, tau)
                rhs = 2 * p.weight * (tau + big_d - p.release)
                sweep.add(f'p={p.id} e={e} tau={tau}', lhs, rhs)
            if tail is not None:
                rhs = 2 * p.weight * (tail + big_d - p.release)
                sweep.add(f'p={p.id} e={e} tau≥{tail}', imp, rhs,
                          count=tail_count)
    return sweep.report()


def check_halved_feasible(log: 'RunLog', dual: DualSolution) -> CheckReport:
    '''
    Both dual constraint families with every variable halved, plus the
    unhalved α_p ≤ w_p·ℓ_p which the dispatcher guarantees.
    '''
    topo = log.topology
    limit = horizon(log.instance)
    last = _last_active(dual)
    sweep = _Sweep('halved_feasible')
    for p in log.instance.dispatch_order():
        half = dual.alpha[p.id] / 2
        for e in candidate_edges(topo, p):
            d, big_d = topo.edge_delay(e), path_delay(topo, e)
            active = max(last.get(e.transmitter, -1), last.get(e.receiver, -1))
            steps, tail, tail_count = _sweep_steps(p.release, active, limit)
            for tau in steps:
                lhs = half - d * dual.beta(e.transmitter, e.receiver, tau) / 2
                rhs = p.weight * (tau + big_d - p.release)
                sweep.add(f'p={p.id} e={e} tau={tau}', lhs, rhs)
            if tail is not None:
                rhs = p.weight * (tail + big_d - p.release)
                sweep.add(f'p={p.id} e={e} tau≥{tail}', half, rhs,
                          count=tail_count)
        link = topo.link_delay(p.source, p.dest)
        if link is not None:
            sweep.add(f'alpha[{p.id}]/2 ≤ w·l', half, p.weight * link)
            sweep.add(f'alpha[{p.id}] ≤ w·l', dual.alpha[p.id],
                      p.weight * link)
    return sweep.report()


# -----------------------------------
#           Ratio & duality
# -----------------------------------

def check_ratio(log: 'RunLog', dual: DualSolution) -> RatioReport:
    ''' ALG ≤ (2+ε)/ε · D, i.e. ALG ≤ 2·(2/ε+1) · D/2. '''
    eps = dual.epsilon
    cost = run_cost(log)
    holds = cost <= (2 + eps) / eps * dual.objective
    report = RatioReport(cost, dual.objective, dual.lower_bound,
                         2 * (2 / eps + 1), holds)
    if not holds:
        logger.warning('ratio bound violated: %s', report)
    return report


def ratio_check_report(report: RatioReport) -> CheckReport:
    sweep = _Sweep('ratio')
    sweep.add('alg cost ≤ 2(2/eps+1)·objective/2', report.alg_cost,
              report.factor * report.lower_bound, holds=report.bound_holds)
    return sweep.report()


def check_weak_duality(
    dual: DualSolution, witness: 'RunLog'
) -> CheckReport:
    '''
    The halved dual objective never exceeds the cost of a feasible primal
    solution. The witness run (any schedule of the same instance) is
    slowed down by dilate_run() to make it feasible at speed 1/(2+ε).
    '''
    schedule = dilate_run(witness, dual.epsilon)
    feasible = check_primal_feasible(schedule, witness.instance, dual.epsilon)
    sweep = _Sweep('weak_duality')
    sweep.count = feasible.constraints_checked
    sweep.violations.extend(
        v._replace(constraint='witness ' + v.constraint)
        for v in feasible.violations)
    cost = primal_cost(schedule, witness.instance)
    sweep.add('objective/2 ≤ primal cost of dilated witness',
              dual.lower_bound, cost)
    return sweep.report()


def check_stability(log: 'RunLog') -> CheckReport:
    sweep = _Sweep('stability')
    for step in log.steps:
        sweep.count += len(log.pending_at(step.time))
    for v in verify_stability(log):
        sweep.violations.append(Violation(
            f'step {v.time} {v.chunk.label}: {v.reason}',
            Fraction(0), Fraction(0)))
    return sweep.report()


def certify(
    log: 'RunLog',
    epsilon: Fraction,
    *,
    all_lemmas: bool = True,
    witness: Optional['RunLog'] = None,
) -> List[CheckReport]:
    '''
    Evaluate every check on one run. The constraint sweeps (imp bound,
    halved feasibility, weak duality) only run with `all_lemmas`.
    '''
    dual = build_dual(log, epsilon)
    ledger = build_charges(log)
    reports = [
        check_stability(log),
        check_beta_identity(log, dual),
        check_charge_conservation(log, ledger),
        check_alpha_bound(ledger, dual),
        ratio_check_report(check_ratio(log, dual)),
    ]
    if all_lemmas:
        reports += [
            check_imp_bound(log, dual),
            check_halved_feasible(log, dual),
            check_weak_duality(dual, witness or log),
        ]
    failed = [r.check for r in reports if not r.ok]
    logger.info('certification eps=%s: %d checks, %s', epsilon, len(reports),
                'all ok' if not failed else 'failed: ' + ', '.join(failed))
    return reports
