"""Node function sets: boolean gates and protected real arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import ConfigurationError

DIV_EPSILON = 1e-10


def _and(a: int, b: int) -> int:
    return a & b


def _nand(a: int, b: int) -> int:
    return 1 - (a & b)


def _or(a: int, b: int) -> int:
    return a | b


def _nor(a: int, b: int) -> int:
    return 1 - (a | b)


def protected_div(a: float, b: float) -> float:
    if abs(b) < DIV_EPSILON:
        return 1.0
    return a / b


def _add(a: float, b: float) -> float:
    return a + b


def _sub(a: float, b: float) -> float:
    return a - b


def _mul(a: float, b: float) -> float:
    return a * b


@dataclass(frozen=True)
class FunctionSet:
    id: str
    domain: str
    names: tuple[str, ...]
    functions: tuple[Callable, ...]

    def __len__(self) -> int:
        return len(self.functions)


BOOLEAN = FunctionSet(
    "boolean", "boolean", ("AND", "NAND", "OR", "NOR"), (_and, _nand, _or, _nor)
)
REAL = FunctionSet(
    "real", "real", ("ADD", "SUB", "MUL", "DIV"), (_add, _sub, _mul, protected_div)
)

FUNCTION_SETS = {fs.id: fs for fs in (BOOLEAN, REAL)}

# Opcode order shared by the scalar and vectorised interpreters.
AND, NAND, OR, NOR = range(4)
ADD, SUB, MUL, DIV = range(4)


def get_function_set(set_id: str) -> FunctionSet:
    try:
        return FUNCTION_SETS[set_id]
    except KeyError:
        raise ConfigurationError(
            f"unknown function set {set_id!r}; expected one of {sorted(FUNCTION_SETS)}"
        ) from None


def apply_function(fs: FunctionSet, index: int, a, b):
    """Apply function ``index`` of ``fs`` to a single pair of values.

    Boolean values are 0/1 ints. Real results are not checked for finiteness;
    infinities and NaNs propagate to the fitness function.
    """
    if not 0 <= index < len(fs):
        raise IndexError(f"function index {index} out of range for {fs.id!r}")
    return fs.functions[index](a, b)
