"""Coefficient congruences and finite truncations of the two counterexample systems.

System ``X`` (the plain one) has expression rows

    E_n = x_{n1} + ... + x_{nn} + c_n y,

followed by one row per variable ``x_{ij}`` and a final row ``y``. System ``Z``
is the same system after substituting ``x_{ij} = 2^i z_{ij}``. A depth-``d``
truncation keeps ``E_1..E_d`` and every variable they mention.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Sequence

from .colouring import two_adic_valuation
from .linalg import ExactMatrix, format_matrix, parse_matrix


def is_power_of_two(m: int) -> bool:
    return m > 0 and m & (m - 1) == 0


def modular_inverse(a: int, modulus: int) -> int:
    """Inverse of odd ``a`` modulo a power of two, in ``[1, modulus]``.

    Newton iteration ``b <- b(2 - ab)`` doubles the number of correct low bits
    each round, starting from ``b = a`` which is already right mod 8.
    """
    if a % 2 == 0:
        raise ValueError(f"{a} is even, so it has no inverse modulo a power of two")
    if not is_power_of_two(modulus) or modulus < 2:
        raise ValueError(f"modulus must be 2**m with m >= 1, got {modulus}")
    b = a % modulus
    bits = 3
    while bits < modulus.bit_length():
        b = b * (2 - a * b) % modulus
        bits *= 2
    return b % modulus


def solve_coefficient(n: int) -> int:
    """Least positive ``c`` with ``c*n == 2**(n-1) (mod 2**n)``.

    Writing ``n = 2**k * p`` with ``p`` odd, the congruence is equivalent to
    ``c*p == 2**(n-k-1) (mod 2**(n-k))``, and ``k < n`` always.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    k = two_adic_valuation(n)
    p = n >> k
    mod = 1 << (n - k)
    c = ((1 << (n - k - 1)) * modular_inverse(p, mod)) % mod
    return c or mod


def coefficient_sequence(depth: int) -> tuple[int, ...]:
    """Canonical ``c_1..c_depth``."""
    return tuple(solve_coefficient(n) for n in range(1, depth + 1))


def coefficient_congruence_holds(n: int, c: int) -> bool:
    return (c * n) % (1 << n) == 1 << (n - 1)


class SystemKind(str, enum.Enum):
    PLAIN_X = "1"
    SCALED_Z = "2"

    @property
    def prefix(self) -> str:
        return "x" if self is SystemKind.PLAIN_X else "z"

    @classmethod
    def parse(cls, value) -> "SystemKind":
        if isinstance(value, cls):
            return value
        aliases = {"1": cls.PLAIN_X, "x": cls.PLAIN_X, "2": cls.SCALED_Z, "z": cls.SCALED_Z}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown system kind {value!r}; use 1/x or 2/z") from None


def variable_index(depth: int) -> list[tuple[int, int]]:
    """``(i, j)`` pairs in label order: row by row, ``1 <= j <= i <= depth``."""
    return [(i, j) for i in range(1, depth + 1) for j in range(1, i + 1)]


@dataclass(frozen=True)
class SystemInstance:
    kind: SystemKind
    depth: int
    coefficients: tuple[int, ...]
    matrix: ExactMatrix
    variable_labels: tuple[str, ...]
    divisibility: tuple[int, ...]

    @property
    def num_variables(self) -> int:
        return len(self.variable_labels)

    def sidecar(self) -> dict:
        return {
            "kind": self.kind.value,
            "depth": self.depth,
            "coefficients": list(self.coefficients),
            "variable_labels": list(self.variable_labels),
            "divisibility": list(self.divisibility),
        }

    def dumps(self) -> tuple[str, str]:
        """Matrix text and JSON sidecar."""
        return format_matrix(self.matrix), json.dumps(self.sidecar(), indent=2) + "\n"

    @classmethod
    def loads(cls, matrix_text: str, sidecar_text: str) -> "SystemInstance":
        meta = json.loads(sidecar_text)
        m = parse_matrix(matrix_text)
        labels = tuple(meta["variable_labels"])
        if m.col_count != len(labels) or len(meta["divisibility"]) != len(labels):
            raise ValueError("sidecar does not match matrix columns")
        return cls(
            SystemKind.parse(meta["kind"]),
            int(meta["depth"]),
            tuple(int(c) for c in meta["coefficients"]),
            m.with_labels(col_labels=labels),
            labels,
            tuple(int(d) for d in meta["divisibility"]),
        )


def build_system(kind, depth: int, coeffs: Sequence[int] | None = None) -> SystemInstance:
    """Depth-``depth`` truncation of system X or Z.

    Rows: ``E_1..E_depth``, then one row per variable in label order, then ``y``.
    Any integer coefficients are accepted; ``None`` means the canonical ones.
    """
    kind = SystemKind.parse(kind)
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    if coeffs is None:
        coeffs = coefficient_sequence(depth)
    if len(coeffs) < depth:
        raise ValueError(f"need {depth} coefficients, got {len(coeffs)}")
    coeffs = tuple(int(c) for c in coeffs[:depth])

    idx = variable_index(depth)
    n_vars = len(idx) + 1
    y = n_vars - 1
    scaled = kind is SystemKind.SCALED_Z

    def weight(i: int) -> int:
        return 1 << i if scaled else 1

    rows = []
    for n in range(1, depth + 1):
        r = [0] * n_vars
        for col, (i, _) in enumerate(idx):
            if i == n:
                r[col] = weight(i)
        r[y] = coeffs[n - 1]
        rows.append(r)
    for col, (i, _) in enumerate(idx):
        r = [0] * n_vars
        r[col] = weight(i)
        rows.append(r)
    rows.append([0] * y + [1])

    labels = tuple(f"{kind.prefix}{i}_{j}" for i, j in idx) + ("y",)
    row_labels = tuple(f"E{n}" for n in range(1, depth + 1)) + labels
    if scaled:
        divisibility = (1,) * n_vars
    else:
        divisibility = tuple(1 << i for i, _ in idx) + (1,)
    matrix = ExactMatrix.from_rows(rows, row_labels, labels, col_count=n_vars)
    return SystemInstance(kind, depth, coeffs, matrix, labels, divisibility)


def column_weights(depth: int) -> list[int]:
    """Diagonal ``2^i`` per ``x_{ij}`` column, ``1`` for ``y``."""
    return [1 << i for i, _ in variable_index(depth)] + [1]


def scale_to_second(system: SystemInstance) -> SystemInstance:
    """Apply ``x_{ij} = 2^i z_{ij}``: right-multiply the matrix by the column weights."""
    if system.kind is not SystemKind.PLAIN_X:
        raise ValueError("scale_to_second expects a kind-1 (plain x) system")
    labels = tuple("z" + lab[1:] if lab != "y" else lab for lab in system.variable_labels)
    row_labels = tuple(
        "z" + lab[1:] if lab.startswith("x") else lab for lab in system.matrix.row_labels
    )
    matrix = system.matrix.scale_columns(column_weights(system.depth)).with_labels(
        row_labels, labels
    )
    return SystemInstance(
        SystemKind.SCALED_Z,
        system.depth,
        system.coefficients,
        matrix,
        labels,
        (1,) * system.num_variables,
    )
