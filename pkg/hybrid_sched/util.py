from fractions import Fraction
import re
from typing import List, Callable, Any, Union, Generic, TypeVar

T = TypeVar('T')

_RATIONAL = re.compile(r'^(0|[1-9][0-9]*)(?:/([1-9][0-9]*))?$')


def split_strip(data: str, delimiter: str = ',') -> List[str]:
    ''' Split by delimiter and strip each str separately. Omit if empty. '''
    ret = []
    for x in data.split(delimiter):
        x = x.strip()
        if x:
            ret.append(x)
    return ret


def parse_rational(text: str) -> Fraction:
    '''
    Parse `num/den` or a bare integer. Decimal floats are rejected,
    otherwise exactness would be lost on the way in.
    '''
    match = _RATIONAL.match(text.strip())
    if not match:
        raise ValueError(f'not a rational literal: {text!r}')
    num, den = match.groups()
    return Fraction(int(num), int(den or 1))


def fmt_rational(value: Union[Fraction, int]) -> str:
    ''' Inverse of parse_rational(). Integers are written without `/1`. '''
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def fmt_decimal(value: Union[Fraction, int], digits: int = 6) -> str:
    ''' Decimal approximation for plotting. Not used in any assertion. '''
    return format(float(value), f'.{digits}f')


class cached_property(Generic[T]):
    ''' Calculate complex property only once. '''

    def __init__(self, fn: Callable[[Any], T]) -> None:
        self.fn = fn

    def __get__(self, obj: object, typ: Union[type, None] = None) -> T:
        if obj is None:
            return self  # type: ignore
        ret = obj.__dict__[self.fn.__name__] = self.fn(obj)
        return ret
