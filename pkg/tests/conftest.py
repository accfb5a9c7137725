import os
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Optional
import pytest
from numpy.random import default_rng
from hybrid_sched.config import MODELS, GeneratorConfig
from hybrid_sched.model import (
    Attachment, EdgeRef, FixedLink, Instance, Layer, Packet, ReconfigEdge,
    Topology
)
from hybrid_sched.workload import generate, load_instance

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line(
        'markers', 'slow: full random-corpus sweeps, deselect with -m "not slow"')


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture
def mixed_routes() -> Instance:
    return load_instance(fixture_path('mixed_routes.txt'))


@pytest.fixture
def mixed_routes_table() -> Dict[str, Optional[EdgeRef]]:
    ''' Routes of the feasible (cost 9) schedule, None = fixed link. '''
    return {
        'p1': EdgeRef('t1', 'r1'),
        'p2': EdgeRef('t1', 'r2'),
        'p3': EdgeRef('t3', 'r3'),
        'p4': EdgeRef('t3', 'r3'),
        'p5': None,
    }


@pytest.fixture
def contended() -> Instance:
    return load_instance(fixture_path('contended.txt'))


@pytest.fixture
def contended_heavy() -> Instance:
    return load_instance(fixture_path('contended_heavy.txt'))


def corpus_config(seed: int, *, unit_edges: bool = False,
                  max_packets: int = 50) -> GeneratorConfig:
    ''' Small random topology: ≤ 6 transmitters, ≤ 6 receivers. '''
    rng = default_rng(10_000 + seed)
    return GeneratorConfig.from_dict('corpus', dict(
        model=MODELS[seed % len(MODELS)],
        seed=seed,
        sources=int(rng.integers(1, 4)),
        destinations=int(rng.integers(1, 4)),
        transmitters=int(rng.integers(1, 3)),
        receivers=int(rng.integers(1, 3)),
        packets=int(rng.integers(1, max_packets + 1)),
        edge_probability=0.7,
        link_probability=0.4,
        edge_delay=(1, 1) if unit_edges else (1, 3),
        attach_delay=(0, 1),
        link_delay=(1, 6),
        weights='integer',
        weight_max=5,
        rate=float(rng.uniform(0.5, 3.0)),
        burst_on=3,
        burst_off=2,
    ))


@pytest.fixture
def corpus() -> Callable[..., Iterator[Instance]]:
    ''' corpus(n, **kw) yields n seeded random instances. '''
    def make(n: int, **kwargs: object) -> Iterator[Instance]:
        for seed in range(n):
            yield generate(corpus_config(seed, **kwargs))  # type: ignore
    return make


def single_edge_instance(
    weights: List[int], *, edge_delay: int = 1, release: int = 1,
    attach: int = 0, link: int = -1,
) -> Instance:
    ''' One source, one destination, one edge, optional fixed link. '''
    topo = Topology(
        {'s': Layer.SOURCE, 't': Layer.TRANSMITTER, 'r': Layer.RECEIVER,
         'd': Layer.DESTINATION},
        [Attachment('t', 's', attach), Attachment('r', 'd', 0)],
        [ReconfigEdge('t', 'r', edge_delay)],
        [FixedLink('s', 'd', link)] if link >= 0 else [],
    )
    return Instance(topo, [
        Packet(f'p{i}', 's', 'd', release, Fraction(w))
        for i, w in enumerate(weights, start=1)])


@pytest.fixture
def single_edge() -> Callable[..., Instance]:
    return single_edge_instance
