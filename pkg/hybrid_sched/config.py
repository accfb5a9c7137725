from inifile import IniFile
from typing import Any, Callable, Dict, Optional, Tuple, Union
from .util import split_strip

AnyConfig = Union['GeneratorConfig', IniFile, Dict]
Range = Tuple[int, int]

MODELS = ('uniform', 'zipf-skewed', 'bursty-onoff')
WEIGHTS = ('unit', 'integer')


class ConfigError(Exception):
    ''' Raised for any invalid generator setting. '''

    def __init__(
        self, key: str, field: str, expr: Any, error: Union[Exception, str]
    ):
        self.key = key
        self.field = field
        self.expr = expr
        self.error = error

    def __str__(self) -> str:
        return 'Invalid config for [{}.{}] = "{}"  –  Error: {}'.format(
            self.key, self.field, self.expr, repr(self.error))


def parse_range(value: Union[str, int, Range]) -> Range:
    ''' "1..3" -> (1, 3), "2" -> (2, 2). Tuples are passed through. '''
    if isinstance(value, int):
        return (value, value)
    if isinstance(value, (tuple, list)):
        lo, hi = value
        return (int(lo), int(hi))
    parts = split_strip(value, '..')
    if len(parts) == 1:
        return (int(parts[0]), int(parts[0]))
    if len(parts) != 2:
        raise ValueError(f'expected "min..max", got {value!r}')
    return (int(parts[0]), int(parts[1]))


def _parse_float(value: Any) -> float:
    return float(value)


# field -> (converter, default)
FIELDS = {
    'model': (str, 'uniform'),
    'seed': (int, 0),
    'sources': (int, 2),
    'transmitters': (int, 1),  # per source
    'receivers': (int, 1),  # per destination
    'destinations': (int, 2),
    'packets': (int, 10),
    'edge_probability': (_parse_float, 1.0),
    'link_probability': (_parse_float, 0.5),
    'edge_delay': (parse_range, (1, 1)),
    'attach_delay': (parse_range, (0, 0)),
    'link_delay': (parse_range, (2, 4)),
    'weights': (str, 'unit'),
    'weight_max': (int, 4),
    'skew': (_parse_float, 1.0),
    'rate': (_parse_float, 1.0),  # mean arrivals per step while "on"
    'burst_on': (int, 5),
    'burst_off': (int, 0),
}  # type: Dict[str, Tuple[Callable[[Any], Any], Any]]


class GeneratorConfig:
    '''
    Parameters of a synthetic workload. Same config, same instance.

    Available attributes: see FIELDS.
    '''

    def __init__(self, key: str = 'generator', **values: Any) -> None:
        self.key = key
        for field, (convert, default) in FIELDS.items():
            raw = values.pop(field, None)
            if raw is None:
                setattr(self, field, default)
                continue
            try:
                setattr(self, field, convert(raw))
            except (TypeError, ValueError) as e:
                raise ConfigError(key, field, raw, e)
        if values:
            field = sorted(values)[0]
            raise ConfigError(key, field, values[field], 'unknown option')

    # type hints for the dynamic attributes
    model = 'uniform'  # type: str
    seed = 0  # type: int
    sources = transmitters = receivers = destinations = packets = 0  # type: int
    edge_probability = link_probability = skew = rate = 0.0  # type: float
    edge_delay = attach_delay = link_delay = (0, 0)  # type: Range
    weights = 'unit'  # type: str
    weight_max = burst_on = burst_off = 0  # type: int

    def validate(self) -> None:
        ''' Raise ConfigError for the first inconsistent setting. '''
        def fail(field: str, error: str) -> None:
            raise ConfigError(self.key, field, getattr(self, field), error)

        if self.model not in MODELS:
            fail('model', 'expected one of ' + ', '.join(MODELS))
        if self.weights not in WEIGHTS:
            fail('weights', 'expected one of ' + ', '.join(WEIGHTS))
        for field in ('sources', 'transmitters', 'receivers', 'destinations',
                      'weight_max', 'burst_on'):
            if getattr(self, field) < 1:
                fail(field, 'must be ≥ 1')
        for field in ('packets', 'burst_off', 'skew'):
            if getattr(self, field) < 0:
                fail(field, 'must be ≥ 0')
        for field in ('edge_probability', 'link_probability'):
            if not 0 <= getattr(self, field) <= 1:
                fail(field, 'must be within [0, 1]')
        if self.rate <= 0:
            fail('rate', 'must be > 0')
        for field, lowest in (('edge_delay', 1), ('attach_delay', 0),
                              ('link_delay', 0)):
            lo, hi = getattr(self, field)
            if lo < lowest or lo > hi:
                fail(field, f'need {lowest} ≤ min ≤ max')
        if self.edge_probability == 0 and self.link_probability == 0:
            fail('link_probability', 'no packet could ever be delivered')

    def as_dict(self) -> Dict[str, Any]:
        return {field: getattr(self, field) for field in FIELDS}

    def updated(self, values: Dict[str, Any]) -> 'GeneratorConfig':
        ''' Copy with some values replaced. None values are ignored. '''
        cfg = self.as_dict()
        cfg.update({k: v for k, v in values.items() if v is not None})
        return GeneratorConfig.from_dict(self.key, cfg)

    def __repr__(self) -> str:
        txt = f'<GeneratorConfig key="{self.key}"'
        for x in ['model', 'seed', 'packets', 'weights']:
            txt += ' {}="{}"'.format(x, getattr(self, x))
        return txt + '>'

    @staticmethod
    def from_dict(key: str, cfg: Dict[str, Any]) -> 'GeneratorConfig':
        ''' Keys are the FIELDS names, values either typed or strings. '''
        return GeneratorConfig(key, **{k.replace('-', '_').replace('.', '_'): v
                                       for k, v in cfg.items()})

    @staticmethod
    def from_ini(key: str, ini: IniFile) -> 'GeneratorConfig':
        '''
        Read section [key]. Delay ranges may also be given in [key.delay]
        (edge, attach, link) and burst lengths in [key.burst] (on, off).
        '''
        # dotted keys belong to the sub-sections read below
        cfg = {k: v for k, v in ini.section_as_dict(key).items()
               if '.' not in k}  # type: Dict[str, Any]
        for name in ('edge', 'attach', 'link'):
            value = ini.get(f'{key}.delay.{name}')  # type: Optional[str]
            if value is not None:
                cfg[f'{name}_delay'] = value
        for name in ('on', 'off'):
            value = ini.get(f'{key}.burst.{name}')
            if value is not None:
                cfg[f'burst_{name}'] = value
        return GeneratorConfig.from_dict(key, cfg)

    @staticmethod
    def from_any(key: str, config: AnyConfig) -> 'GeneratorConfig':
        assert isinstance(config, (GeneratorConfig, IniFile, Dict))
        if isinstance(config, GeneratorConfig):
            return config
        elif isinstance(config, IniFile):
            return GeneratorConfig.from_ini(key, config)
        return GeneratorConfig.from_dict(key, config)
