"""Colourings of the positive integers.

The staged colouring assigns colours class by class: every ``m`` lies in
exactly one class ``2^(n-1) mod 2^n`` (``n = v2(m) + 1``). Classes 1 and 2 are
blue except for the single red members 1 and 2; every later class gets the
colour opposite to that of ``n`` itself.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence, Union


class Colour(enum.IntEnum):
    RED = 0
    BLUE = 1

    @property
    def letter(self) -> str:
        return "R" if self is Colour.RED else "B"

    def opposite(self) -> "Colour":
        return Colour.BLUE if self is Colour.RED else Colour.RED


def two_adic_valuation(m: int) -> int:
    """Largest ``k`` with ``2**k`` dividing ``m``; ``m`` must be positive."""
    if m < 1:
        raise ValueError(f"2-adic valuation needs a positive integer, got {m}")
    return (m & -m).bit_length() - 1


def _check_positive(m: int) -> None:
    if m < 1:
        raise ValueError(f"colourings are defined on positive integers only, got {m}")


@lru_cache(maxsize=4096)
def _staged(m: int) -> Colour:
    n = two_adic_valuation(m) + 1
    if n <= 2:
        return Colour.RED if m == n else Colour.BLUE
    # n < 2^(n-1) <= m, so the recursion shrinks fast.
    return _staged(n).opposite()


def staged_colour(m: int) -> Colour:
    _check_positive(m)
    return _staged(m)


def class_colour(n: int) -> Colour:
    """Colour of the generic members of the class ``2^(n-1) mod 2^n``."""
    _check_positive(n)
    if n <= 2:
        return Colour.BLUE
    return staged_colour(n).opposite()


class UncolouredError(RuntimeError):
    pass


def stage_simulation(value_limit: int, stage_limit: int) -> list[Colour]:
    """Replay the stages literally, in order, on ``1..value_limit``.

    Stage 1 colours 1 red and the other odd numbers blue; stage 2 colours 2 red
    and the rest of ``2 mod 4`` blue; stage ``n >= 3`` looks up the colour
    already given to ``n`` and paints ``2^(n-1) mod 2^n`` the other colour.
    Only the table is consulted, never :func:`staged_colour`.
    """
    _check_positive(value_limit)
    table: dict[int, Colour] = {}
    for n in range(1, stage_limit + 1):
        step = 1 << n
        start = 1 << (n - 1)
        if start > value_limit:
            continue
        if n == 1 or n == 2:
            for m in range(start, value_limit + 1, step):
                table[m] = Colour.RED if m == n else Colour.BLUE
            continue
        if n not in table:
            raise UncolouredError(f"stage {n}: {n} has not been coloured yet")
        paint = table[n].opposite()
        for m in range(start, value_limit + 1, step):
            table[m] = paint
    missing = [m for m in range(1, value_limit + 1) if m not in table]
    if missing:
        raise UncolouredError(
            f"{len(missing)} values left uncoloured after {stage_limit} stages "
            f"(first: {missing[0]})"
        )
    return [table[m] for m in range(1, value_limit + 1)]


@dataclass(frozen=True)
class Staged2Adic:
    pass


@dataclass(frozen=True)
class ResidueTable:
    """Colour ``m`` by ``table[m mod modulus]`` unless ``m`` is an exception."""

    modulus: int
    table: tuple[int, ...]
    exceptions: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        table = self.table
        if isinstance(table, Mapping):
            keys = {int(k) for k in table}
            if keys != set(range(self.modulus)):
                raise ValueError("residue table must cover every residue 0..modulus-1")
            table = [table[k] if k in table else table[str(k)] for k in range(self.modulus)]
        table = tuple(int(c) for c in table)
        if len(table) != self.modulus:
            raise ValueError("residue table must cover every residue 0..modulus-1")
        exceptions = tuple((int(v), int(c)) for v, c in self.exceptions)
        values = [v for v, _ in exceptions]
        if len(set(values)) != len(values):
            raise ValueError("exception values must be distinct")
        if any(v < 1 for v in values):
            raise ValueError("exception values must be positive")
        if any(c < 0 for c in table) or any(c < 0 for _, c in exceptions):
            raise ValueError("colour indices must be nonnegative")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "exceptions", exceptions)
        object.__setattr__(self, "_lookup", dict(exceptions))

    @classmethod
    def from_json(cls, obj: Mapping) -> "ResidueTable":
        return cls(
            int(obj["modulus"]),
            obj["table"],
            tuple(tuple(e) for e in obj.get("exceptions", ())),
        )

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "table": list(self.table),
            "exceptions": [list(e) for e in self.exceptions],
        }

    @classmethod
    def explicit(cls, colours: Sequence[int]) -> "ResidueTable":
        """Colour ``1..len(colours)`` as given; everything beyond gets colour 0."""
        return cls(1, (0,), tuple((m, c) for m, c in enumerate(colours, 1)))


ColouringSpec = Union[Staged2Adic, ResidueTable]
STAGED = Staged2Adic()


def colour_of(spec: ColouringSpec, m: int) -> int:
    _check_positive(m)
    if isinstance(spec, Staged2Adic):
        return _staged(m)
    hit = spec._lookup.get(m)
    if hit is not None:
        return hit
    return spec.table[m % spec.modulus]


def load_spec(text: str) -> ColouringSpec:
    obj = json.loads(text)
    if obj == "staged" or (isinstance(obj, dict) and obj.get("variant") == "staged"):
        return STAGED
    return ResidueTable.from_json(obj)


def colour_name(c: int) -> str:
    """``R``/``B`` for the two colours, decimal index otherwise."""
    if isinstance(c, Colour):
        return c.letter
    return str(int(c))
