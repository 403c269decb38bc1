"""
This module contains various definitions and constants used throughout tarepair
namely:
- constants TOOL_NAME, TOOL_VERSION and ABS_CLOCK (the reserved absolute clock)
- enum Relation, the comparison operators of clock guards
- class ArgumentParserNoExit(argparse.ArgumentParser)
  which raises an error rather than exit.
- functions to_fraction and format_fraction to read and write exact rationals
- function lcm_of_denominators
- function trim to pretty-print docstrings
"""

import argparse
import enum
import math
import re
from fractions import Fraction
from typing import Iterable, NoReturn, Union

TOOL_NAME = "tarepair"
TOOL_VERSION = "1.0.0"

# never reset, never declared, implicitly available in every guard
ABS_CLOCK = "x_abs"

REGEX_RATIONAL: str = r"-?[0-9]+(?:/[0-9]+|\.[0-9]+)?"

Number = Union[int, Fraction, str]


@enum.unique
class Relation(enum.Enum):
    """Comparison operators: left <rel> right"""

    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"

    @staticmethod
    def from_symbol(symbol: str) -> "Relation":
        """parses a relation symbol, accepts unicode and == variants
        raises ValueError on unknown symbols"""
        aliases = {"==": "=", "≤": "<=", "≥": ">=", "=<": "<=", "=>": ">="}
        symbol = aliases.get(symbol.strip(), symbol.strip())
        for rel in Relation:
            if rel.value == symbol:
                return rel
        raise ValueError("unknown relation '{}'".format(symbol))

    def mirror(self: "Relation") -> "Relation":
        """relation obtained by swapping both sides (a < b iff b > a)"""
        return _MIRRORED[self]

    def holds(self: "Relation", left: Fraction, right: Fraction) -> bool:
        """evaluates left <self> right"""
        if self is Relation.LT:
            return left < right
        if self is Relation.LE:
            return left <= right
        if self is Relation.EQ:
            return left == right
        if self is Relation.GE:
            return left >= right
        return left > right


_MIRRORED = {
    Relation.LT: Relation.GT,
    Relation.LE: Relation.GE,
    Relation.EQ: Relation.EQ,
    Relation.GE: Relation.LE,
    Relation.GT: Relation.LT,
}


class ArgumentParserNoExit(argparse.ArgumentParser):
    """subclass of argparse.ArgumentParser which
    raises an error rather than exiting when parsing fails"""

    def error(self, message: str) -> NoReturn:
        raise argparse.ArgumentError(None, message)


def is_rational(string: str) -> bool:
    """returns True if string can safely be converted
    to a Fraction with to_fraction(string)"""
    return re.fullmatch(REGEX_RATIONAL, string.strip().replace(" ", "")) is not None


def to_fraction(value: Number) -> Fraction:
    """converts an int, a Fraction or a string ("5/2", "3", "0.25") to a Fraction
    floats are refused, they are not exact
    raises ValueError on invalid input"""
    if isinstance(value, bool):
        raise ValueError("boolean is not a rational: {}".format(value))
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not is_rational(value):
            raise ValueError("invalid rational '{}'".format(value))
        return Fraction(value.strip().replace(" ", ""))
    raise ValueError("invalid rational {!r} (use an integer or a 'num/den' string)".format(value))


def format_fraction(value: Fraction) -> str:
    """writes a fraction as "num/den", or "num" when integral"""
    if value.denominator == 1:
        return str(value.numerator)
    return "{}/{}".format(value.numerator, value.denominator)


def json_number(value: Fraction) -> Union[int, str]:
    """JSON form of a rational: plain int when integral, "num/den" otherwise"""
    if value.denominator == 1:
        return value.numerator
    return format_fraction(value)


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    """least common multiple of the denominators, 1 for an empty iterable"""
    lcm = 1
    for value in values:
        lcm = lcm * value.denominator // math.gcd(lcm, value.denominator)
    return lcm


def trim(docstring: str) -> str:
    """trim a docstring before display"""
    if not docstring:
        return ""
    # Convert tabs to spaces (following the normal Python rules)
    # and split into a list of lines:
    lines = docstring.expandtabs().splitlines()
    # Determine minimum indentation (first line doesn't count):
    indent = 1000  # a large integer
    for line in lines[1:]:
        stripped = line.lstrip()
        if stripped:
            indent = min(indent, len(line) - len(stripped))
    # Remove indentation (first line is special):
    trimmed = [lines[0].strip()]
    if indent < 1000:
        for line in lines[1:]:
            trimmed.append(line[indent:].rstrip())
    # Strip off trailing and leading blank lines:
    while trimmed and not trimmed[-1]:
        trimmed.pop()
    while trimmed and not trimmed[0]:
        trimmed.pop(0)
    # Return a single string:
    return "\n".join(trimmed)
