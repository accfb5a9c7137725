'''
CSV and text output. Every number is written twice, as exact `num/den`
and as a decimal approximation for plotting.
'''
import csv
from fractions import Fraction
import logging
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, TextIO
from .baselines import baseline_run
from .dual import build_dual
from .metrics import packet_latency, run_cost
from .oracle import OracleLimits, OracleScaleError, brute_force_opt
from .util import fmt_decimal, fmt_rational
if TYPE_CHECKING:
    from .dual import CheckReport
    from .engine import RunLog
    from .model import Instance
    from .oracle import OracleResult

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

PACKET_FIELDS = [
    'packet_id', 'route', 'edge', 'alpha', 'alpha_decimal', 'release',
    'completion', 'weighted_latency', 'weighted_latency_decimal',
]
CERTIFICATION_FIELDS = [
    'check', 'constraints_checked', 'violations', 'lhs_max',
    'lhs_max_decimal', 'rhs_min', 'rhs_min_decimal', 'status',
]
COMPARISON_FIELDS = [
    'policy', 'cost', 'cost_decimal', 'dual_objective', 'dual_lower_bound',
    'dual_lower_bound_decimal', 'oracle_cost', 'ratio_to_oracle',
    'ratio_to_oracle_decimal',
]
ORACLE_FIELDS = ['cost', 'cost_decimal', 'explored_states']

COMPARED_POLICIES = ('alg', 'fifo-priority', 'random-dispatch',
                     'least-loaded')


def _opt(value: Optional[Fraction], fmt: Any = fmt_rational) -> str:
    return '' if value is None else fmt(value)


def write_csv(fp: TextIO, fields: List[str], rows: Iterable[Row]) -> None:
    writer = csv.DictWriter(fp, fieldnames=fields, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)


# -----------------------------------
#           Per packet
# -----------------------------------

def packet_rows(log: 'RunLog') -> List[Row]:
    log.ensure_complete()
    rows = []
    for p in log.packets:
        a = log.assignments[p.id]
        latency = packet_latency(log, p.id)
        rows.append({
            'packet_id': p.id,
            'route': 'fixed' if a.is_fixed else 'reconfig',
            'edge': '' if a.is_fixed else str(a.edge),
            'alpha': fmt_rational(a.alpha),
            'alpha_decimal': fmt_decimal(a.alpha),
            'release': p.release,
            'completion': log.completion(p.id),
            'weighted_latency': fmt_rational(latency),
            'weighted_latency_decimal': fmt_decimal(latency),
        })
    return rows


def write_packets(fp: TextIO, log: 'RunLog') -> None:
    write_csv(fp, PACKET_FIELDS, packet_rows(log))


# -----------------------------------
#           Certification
# -----------------------------------

def certification_rows(reports: Iterable['CheckReport']) -> List[Row]:
    return [{
        'check': r.check,
        'constraints_checked': r.constraints_checked,
        'violations': len(r.violations),
        'lhs_max': _opt(r.lhs_max),
        'lhs_max_decimal': _opt(r.lhs_max, fmt_decimal),
        'rhs_min': _opt(r.rhs_min),
        'rhs_min_decimal': _opt(r.rhs_min, fmt_decimal),
        'status': r.status,
    } for r in reports]


def write_certification(fp: TextIO, reports: Iterable['CheckReport']) -> None:
    write_csv(fp, CERTIFICATION_FIELDS, certification_rows(reports))


# -----------------------------------
#           Oracle
# -----------------------------------

def oracle_rows(result: 'OracleResult') -> List[Row]:
    return [{
        'cost': fmt_rational(result.cost),
        'cost_decimal': fmt_decimal(result.cost),
        'explored_states': result.explored_states,
    }]


def write_oracle(fp: TextIO, result: 'OracleResult') -> None:
    write_csv(fp, ORACLE_FIELDS, oracle_rows(result))


# -----------------------------------
#           Comparison
# -----------------------------------

def comparison_rows(
    instance: 'Instance',
    epsilon: Fraction,
    *,
    seed: int = 0,
    limits: OracleLimits = OracleLimits(),
) -> List[Row]:
    '''
    One row per policy. The dual columns come from the ALG run, the
    oracle columns stay empty if the instance is too large for it.
    '''
    logs = {policy: baseline_run(instance, policy, seed)
            for policy in COMPARED_POLICIES}
    dual = build_dual(logs['alg'], epsilon)
    try:
        oracle = brute_force_opt(instance, limits).cost  # type: Optional[Fraction]
    except OracleScaleError as e:
        logger.info('compare: %s, oracle columns left empty', e)
        oracle = None
    rows = []
    for policy, log in logs.items():
        cost = run_cost(log)
        ratio = cost / oracle if oracle else None
        rows.append({
            'policy': policy,
            'cost': fmt_rational(cost),
            'cost_decimal': fmt_decimal(cost),
            'dual_objective': fmt_rational(dual.objective),
            'dual_lower_bound': fmt_rational(dual.lower_bound),
            'dual_lower_bound_decimal': fmt_decimal(dual.lower_bound),
            'oracle_cost': _opt(oracle),
            'ratio_to_oracle': _opt(ratio),
            'ratio_to_oracle_decimal': _opt(ratio, fmt_decimal),
        })
    return rows


def write_comparison(fp: TextIO, rows: Iterable[Row]) -> None:
    write_csv(fp, COMPARISON_FIELDS, rows)


# -----------------------------------
#           Run log
# -----------------------------------

def format_runlog(log: 'RunLog') -> str:
    ''' Human readable, deterministic transcript of a run. '''
    lines = ['# policy={} priority={} packets={} steps={}'.format(
        log.policy, log.priority, len(log.packets), len(log.steps))]
    for p in log.instance.dispatch_order():
        a = log.assignments.get(p.id)
        if a is None:
            continue
        route = 'fixed' if a.is_fixed else str(a.edge)
        lines.append('assign {} release={} route={} alpha={}'.format(
            p.id, p.release, route, fmt_rational(a.alpha)))
    for step in log.steps:
        line = 'step {}: sent {}'.format(step.time, ', '.join(
            f'{c.label} {c.edge}' for c in step.matched))
        if step.blocked:
            line += '; blocked {}'.format(', '.join(
                f'{b.chunk.label} by {b.blocker.label}' for b in step.blocked))
        lines.append(line)
    return '\n'.join(lines) + '\n'
