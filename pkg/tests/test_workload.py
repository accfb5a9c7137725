from collections import Counter
from fractions import Fraction
import pytest
from inifile import IniFile
from numpy.random import default_rng
from hybrid_sched.config import ConfigError, GeneratorConfig, parse_range
from hybrid_sched.model import Packet, is_deliverable, validate_instance
from hybrid_sched.workload import (
    ParseError, SizedPacket, arrival_times, generate, parse_instance,
    serialize_instance, split_to_unit
)

from conftest import fixture_path

HEADER = '''topology
node s S
node t T
node r R
node d D
attach t s 0
attach r d 0
'''


def _same(a, b):
    assert a.packets == b.packets
    ta, tb = a.topology, b.topology
    assert ta.node_records == tb.node_records
    assert ta.attachments == tb.attachments
    assert ta.edges == tb.edges
    assert ta.links == tb.links


# -----------------------------------
#           Parsing
# -----------------------------------

def test_parse_mixed_routes(mixed_routes):
    assert len(mixed_routes.topology.nodes) == 12
    assert len(mixed_routes.topology.edges) == 5
    assert len(mixed_routes.topology.links) == 1
    assert len(mixed_routes.packets) == 5
    assert mixed_routes.by_id['p4'].release == 2
    assert validate_instance(mixed_routes) == []


def test_serialize_parse_identity(mixed_routes):
    text = serialize_instance(mixed_routes)
    _same(parse_instance(text), mixed_routes)
    with open(fixture_path('mixed_routes.txt'), encoding='utf-8') as fp:
        original = [x for x in fp.read().splitlines()
                    if x and not x.startswith('#')]
    assert text.splitlines() == original


def test_rational_weights_survive():
    text = HEADER + 'edge t r 1\npackets\npacket p s d 0 7/3\n'
    instance = parse_instance(text)
    assert instance.packets[0].weight == Fraction(7, 3)
    assert instance.packets[0].release == 0
    assert 'packet p s d 0 7/3' in serialize_instance(instance)


def test_empty_file():
    with pytest.raises(ParseError, match='missing topology section'):
        parse_instance('')


def test_records_before_topology():
    with pytest.raises(ParseError) as exc:
        parse_instance('# comment\nnode s S\n')
    assert exc.value.lineno == 2
    assert exc.value.message == 'missing topology section'


@pytest.mark.parametrize('tail, lineno, message', [
    ('edge t r 0\n', 8, 'edge delay must be ≥ 1'),
    ('edge t x 1\n', 8, 'unknown node x'),
    ('edge t r 1\nedge t r 2\n', 9, 'duplicate edge (t,r)'),
    ('edge r t 1\n', 8, 'r is not a transmitter'),
    ('link s d -1\n', 8, 'link delay must be an integer ≥ 0'),
    ('edge t r\n', 8, 'expected 3 argument(s)'),
    ('bogus 1 2\n', 8, 'unexpected record "bogus" in topology'),
    ('packets\npacket p s d 1 0.5\n', 9, 'not a rational literal'),
    ('packets\npacket p s d 1 0\n', 9, 'weight must be > 0'),
    ('packets\npacket p s d 1 1 3/2\n', 9, 'size must be a positive integer'),
    ('packets\npacket p s d 1 1\npacket p s d 2 1\n', 10, 'duplicate packet p'),
    ('packets\nnode x S\n', 9, 'unexpected record "node" in packets'),
    ('attach t s ²\n', 8, 'attach delay must be an integer ≥ 0'),
    ('edge t r ٣\n', 8, 'edge delay must be an integer ≥ 0'),
    ('packets\npacket p s d ¹ 1\n', 9, 'release must be an integer ≥ 0'),
])
def test_parse_errors(tail, lineno, message):
    with pytest.raises(ParseError) as exc:
        parse_instance(HEADER + tail)
    assert exc.value.lineno == lineno
    assert message in exc.value.message
    assert str(exc.value).startswith(f'line {lineno}: ')


def test_size_token_is_split():
    text = HEADER + 'edge t r 1\npackets\npacket a s d 1 6 3\npacket b s d 2 1\n'
    instance = parse_instance(text)
    assert [(p.id, p.weight) for p in instance.packets] == [
        ('a.1', 2), ('a.2', 2), ('a.3', 2), ('b', 1)]
    assert [p.seq for p in instance.packets] == [0, 1, 2, 3]


# -----------------------------------
#           Unit-size reduction
# -----------------------------------

def test_split_to_unit():
    p = Packet('p', 's', 'd', 3, Fraction(6))
    parts = split_to_unit([SizedPacket(p, 3)])
    assert [x.id for x in parts] == ['p.1', 'p.2', 'p.3']
    assert {x.weight for x in parts} == {2}
    assert {(x.source, x.dest, x.release) for x in parts} == {('s', 'd', 3)}
    assert split_to_unit([SizedPacket(p, 1)]) == [p]


def test_split_to_unit_conserves_weight():
    rng = default_rng(5)
    sized = [SizedPacket(Packet(f'p{i}', 's', 'd', i,
                                Fraction(int(rng.integers(1, 20)), 7)),
                         int(rng.integers(1, 6)))
             for i in range(200)]
    parts = split_to_unit(sized)
    assert len(parts) == sum(sp.size for sp in sized)
    assert sum(x.weight for x in parts) == sum(sp.packet.weight for sp in sized)


@pytest.mark.parametrize('size', [Fraction(3, 2), 0])
def test_split_to_unit_rejects_size(size):
    with pytest.raises(ValueError):
        split_to_unit([SizedPacket(Packet('p', 's', 'd', 1, Fraction(1)),
                                   size)])


# -----------------------------------
#           Generators
# -----------------------------------

def _config(**kwargs):
    cfg = dict(sources=2, destinations=2, packets=10, seed=7)
    cfg.update(kwargs)
    return GeneratorConfig.from_dict('test', cfg)


def test_generate_is_deterministic():
    a, b = generate(_config()), generate(_config())
    _same(a, b)
    assert len(a.packets) == 10
    assert serialize_instance(a) == serialize_instance(b)
    assert serialize_instance(generate(_config(seed=8))) != \
        serialize_instance(a)


def test_generated_packets_are_deliverable():
    for model in ('uniform', 'zipf-skewed', 'bursty-onoff'):
        for seed in range(20):
            instance = generate(_config(
                model=model, seed=seed, edge_probability=0.3,
                link_probability=0.2, edge_delay='1..3', weights='integer'))
            assert validate_instance(instance) == []
            assert all(is_deliverable(instance.topology, p)
                       for p in instance.packets)
            releases = [p.release for p in instance.packets]
            assert releases == sorted(releases)


def test_zipf_skew():
    instance = generate(_config(model='zipf-skewed', skew=1.5,
                                packets=1000, edge_probability=1.0))
    counts = sorted(Counter((p.source, p.dest)
                            for p in instance.packets).values())
    assert len(counts) == 4
    assert counts[-1] > counts[len(counts) // 2]


def test_bursty_without_off_phase_is_uniform():
    uniform = generate(_config(model='uniform', packets=50))
    bursty = generate(_config(model='bursty-onoff', packets=50,
                              burst_on=3, burst_off=0))
    _same(uniform, bursty)


def test_bursty_inserts_gaps():
    rng_a, rng_b = default_rng(1), default_rng(1)
    plain = arrival_times(rng_a, 100, 2.0)
    bursty = arrival_times(rng_b, 100, 2.0, burst_on=4, burst_off=6)
    assert all(b >= a for a, b in zip(plain, bursty))
    assert bursty[-1] > plain[-1]


# -----------------------------------
#           Configuration
# -----------------------------------

def test_parse_range():
    assert parse_range('1..3') == (1, 3)
    assert parse_range('2') == (2, 2)
    assert parse_range((0, 4)) == (0, 4)


@pytest.mark.parametrize('values, field', [
    (dict(model='poisson'), 'model'),
    (dict(sources=0), 'sources'),
    (dict(edge_delay='0..2'), 'edge_delay'),
    (dict(attach_delay='3..1'), 'attach_delay'),
    (dict(rate=0), 'rate'),
    (dict(edge_probability=1.5), 'edge_probability'),
    (dict(edge_probability=0, link_probability=0), 'link_probability'),
])
def test_inconsistent_config(values, field):
    with pytest.raises(ConfigError) as exc:
        generate(_config(**values))
    assert exc.value.field == field
    assert str(exc.value).startswith(f'Invalid config for [test.{field}]')


def test_config_type_errors():
    with pytest.raises(ConfigError) as exc:
        _config(packets='many')
    assert exc.value.field == 'packets'
    with pytest.raises(ConfigError, match='unknown option'):
        _config(colour='red')


def test_config_from_ini(tmp_path):
    path = tmp_path / 'gen.ini'
    path.write_text(
        '[workload]\nmodel = bursty-onoff\nseed = 3\npackets = 25\n'
        'weights = integer\n'
        '[workload.delay]\nedge = 1..2\nlink = 5\n'
        '[workload.burst]\non = 4\noff = 2\n', encoding='utf-8')
    cfg = GeneratorConfig.from_any('workload', IniFile(str(path)))
    assert cfg.model == 'bursty-onoff'
    assert (cfg.seed, cfg.packets) == (3, 25)
    assert cfg.edge_delay == (1, 2)
    assert cfg.link_delay == (5, 5)
    assert (cfg.burst_on, cfg.burst_off) == (4, 2)
    assert cfg.updated({'packets': 5, 'seed': None}).packets == 5
    assert cfg.updated({'seed': None}).seed == 3
    assert len(generate(cfg).packets) == 25
