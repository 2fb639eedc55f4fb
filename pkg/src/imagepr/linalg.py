"""Exact rational linear algebra over ``fractions.Fraction``.

Everything here is exact; there is no floating point anywhere. Matrices are
small, dense and immutable, and carry row/column labels so that dependence
matrices can be read back in terms of the rows they came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

Rational = Fraction


def _as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass int, Fraction or 'p/q' strings")
    return Fraction(value)


@dataclass(frozen=True)
class ExactMatrix:
    """Dense rectangular matrix of rationals, stored row-major."""

    row_count: int
    col_count: int
    entries: tuple[Fraction, ...]
    row_labels: tuple[str, ...] = field(default=())
    col_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.row_count < 0 or self.col_count < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        entries = tuple(_as_rational(e) for e in self.entries)
        if len(entries) != self.row_count * self.col_count:
            raise ValueError(
                f"expected {self.row_count * self.col_count} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)
        rl = tuple(self.row_labels) or tuple(f"r{i}" for i in range(self.row_count))
        cl = tuple(self.col_labels) or tuple(f"c{j}" for j in range(self.col_count))
        if len(rl) != self.row_count or len(cl) != self.col_count:
            raise ValueError("label lists must match matrix dimensions")
        object.__setattr__(self, "row_labels", rl)
        object.__setattr__(self, "col_labels", cl)

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence],
        row_labels: Sequence[str] = (),
        col_labels: Sequence[str] = (),
        col_count: int | None = None,
    ) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if col_count is None:
            col_count = len(rows[0]) if rows else len(col_labels)
        if any(len(r) != col_count for r in rows):
            raise ValueError("ragged rows")
        flat = [e for r in rows for e in r]
        return cls(len(rows), col_count, tuple(flat), tuple(row_labels), tuple(col_labels))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], col_count=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.row_count and 0 <= j < self.col_count):
            raise IndexError(index)
        return self.entries[i * self.col_count + j]

    @property
    def shape(self) -> tuple[int, int]:
        return self.row_count, self.col_count

    def row(self, i: int) -> tuple[Fraction, ...]:
        start = i * self.col_count
        return self.entries[start : start + self.col_count]

    def rows(self) -> list[tuple[Fraction, ...]]:
        return [self.row(i) for i in range(self.row_count)]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[i * self.col_count + j] for i in range(self.row_count))

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.col_count)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows(
            self.columns(), self.col_labels, self.row_labels, col_count=self.row_count
        )

    def select_columns(self, cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix.from_rows(
            [[r[j] for j in cols] for r in self.rows()],
            self.row_labels,
            [self.col_labels[j] for j in cols],
            col_count=len(cols),
        )

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if other.row_count != self.row_count:
            raise ValueError("row counts differ")
        return ExactMatrix.from_rows(
            [a + b for a, b in zip(self.rows(), other.rows())],
            self.row_labels,
            self.col_labels + other.col_labels,
            col_count=self.col_count + other.col_count,
        )

    def scale_columns(self, factors: Sequence) -> "ExactMatrix":
        """Right-multiply by ``diag(factors)``."""
        if len(factors) != self.col_count:
            raise ValueError("need one factor per column")
        fs = [_as_rational(f) for f in factors]
        return ExactMatrix.from_rows(
            [[e * f for e, f in zip(r, fs)] for r in self.rows()],
            self.row_labels,
            self.col_labels,
            col_count=self.col_count,
        )

    def with_labels(self, row_labels=None, col_labels=None) -> "ExactMatrix":
        return ExactMatrix(
            self.row_count,
            self.col_count,
            self.entries,
            tuple(row_labels) if row_labels is not None else self.row_labels,
            tuple(col_labels) if col_labels is not None else self.col_labels,
        )

    def matvec(self, vector: Sequence) -> list[Fraction]:
        if len(vector) != self.col_count:
            raise ValueError("vector length does not match column count")
        v = [_as_rational(x) for x in vector]
        return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows()]

    def same_entries(self, other: "ExactMatrix") -> bool:
        """Entrywise equality ignoring labels."""
        return self.shape == other.shape and self.entries == other.entries

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries)


def rref(m: ExactMatrix) -> tuple[ExactMatrix, list[tuple[int, int]]]:
    """Reduced row echelon form by Gauss-Jordan elimination.

    Returns the reduced matrix and its pivot positions ``(row, col)`` in
    ascending row order.
    """
    a = [list(r) for r in m.rows()]
    n_rows, n_cols = m.shape
    pivots: list[tuple[int, int]] = []
    pr = 0
    for pc in range(n_cols):
        if pr == n_rows:
            break
        found = next((i for i in range(pr, n_rows) if a[i][pc] != 0), None)
        if found is None:
            continue
        a[pr], a[found] = a[found], a[pr]
        inv = 1 / a[pr][pc]
        a[pr] = [e * inv for e in a[pr]]
        for i in range(n_rows):
            if i != pr and a[i][pc] != 0:
                f = a[i][pc]
                a[i] = [x - f * y for x, y in zip(a[i], a[pr])]
        pivots.append((pr, pc))
        pr += 1
    reduced = ExactMatrix.from_rows(a, m.row_labels, m.col_labels, col_count=n_cols)
    return reduced, pivots


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


@dataclass(frozen=True)
class DependenceResult:
    """Greedy maximal independent row set and the dependences of the rest.

    ``coefficients[k]`` expresses row ``dependent_indices[k]`` as a combination
    of the rows in ``basis_indices``, in that order.
    """

    basis_indices: tuple[int, ...]
    dependent_indices: tuple[int, ...]
    coefficients: tuple[tuple[Fraction, ...], ...]


def row_basis(m: ExactMatrix) -> DependenceResult:
    """Scan rows top to bottom, keeping each row independent of those kept so far.

    Kept rows are stored in echelon form together with the combination of
    original basis rows that produced them, so a dependent row's remainder
    tracks its exact coefficient vector.
    """
    basis: list[int] = []
    # (pivot col, reduced vector, combination over basis positions)
    echelon: list[tuple[int, list[Fraction], list[Fraction]]] = []
    dependent: list[int] = []
    coeffs: list[tuple[Fraction, ...]] = []

    for idx, row in enumerate(m.rows()):
        v = list(row)
        combo = [Fraction(0)] * len(basis)  # v_original = v + Σ combo·r
        for pc, w, t in echelon:
            f = v[pc]
            if f == 0:
                continue
            v = [a - f * b for a, b in zip(v, w)]
            for k, tk in enumerate(t):
                combo[k] += f * tk
        pc = next((j for j, e in enumerate(v) if e != 0), None)
        if pc is None:
            dependent.append(idx)
            coeffs.append(tuple(combo))
            continue
        # New echelon vector w = (row - Σ combo·r) / v[pc].
        scale = v[pc]
        w = [e / scale for e in v]
        t = [-c / scale for c in combo] + [1 / scale]
        for _, _, old_t in echelon:
            old_t.append(Fraction(0))
        basis.append(idx)
        echelon.append((pc, w, t))

    n_basis = len(basis)
    padded = tuple(tuple(c) + (Fraction(0),) * (n_basis - len(c)) for c in coeffs)
    return DependenceResult(tuple(basis), tuple(dependent), padded)


def dependence_matrix(m: ExactMatrix) -> ExactMatrix:
    """Build B(A): one row per dependent row of ``m``.

    Columns are the basis rows (in basis order) followed by the dependent rows
    (in dependent order); the dependent row itself gets ``-1``. When the rows
    of ``m`` are independent the result has zero rows.
    """
    dep = row_basis(m)
    order = dep.basis_indices + dep.dependent_indices
    n_dep = len(dep.dependent_indices)
    out_rows = []
    for k, c in enumerate(dep.coefficients):
        out_rows.append(list(c) + [Fraction(-1) if kk == k else Fraction(0) for kk in range(n_dep)])
    return ExactMatrix.from_rows(
        out_rows,
        [m.row_labels[j] for j in dep.dependent_indices],
        [m.row_labels[i] for i in order],
        col_count=len(order),
    )


def column_space_equal(a: ExactMatrix, b: ExactMatrix) -> bool:
    """True iff the rational spans of the columns of ``a`` and ``b`` coincide."""
    if a.row_count != b.row_count:
        raise ValueError(f"row counts differ: {a.row_count} vs {b.row_count}")
    ra, rb = rank(a), rank(b)
    return ra == rb == rank(a.hstack(b))


def solve_in_span(vectors: Sequence[Sequence], target: Sequence) -> list[Fraction] | None:
    """Coefficients ``c`` with ``Σ c_k vectors[k] = target``, or None.

    Free coefficients are set to zero, so the answer is deterministic.
    """
    target = [_as_rational(t) for t in target]
    n = len(target)
    cols = [list(v) for v in vectors]
    if any(len(v) != n for v in cols):
        raise ValueError("vector lengths differ")
    aug = ExactMatrix.from_rows(
        [[v[i] for v in cols] + [target[i]] for i in range(n)], col_count=len(cols) + 1
    )
    reduced, pivots = rref(aug)
    if any(pc == len(cols) for _, pc in pivots):
        return None
    sol = [Fraction(0)] * len(cols)
    for pr, pc in pivots:
        sol[pc] = reduced[pr, len(cols)]
    return sol


# -- text format -------------------------------------------------------------


def format_matrix(m: ExactMatrix, labels: bool = True) -> str:
    """Serialize to the plain-text matrix format.

    Labels travel in ``# row_labels:`` / ``# col_labels:`` comment lines, which
    readers that ignore comments can skip safely.
    """
    lines = []
    if labels:
        lines.append("# col_labels: " + " ".join(m.col_labels))
        lines.append("# row_labels: " + " ".join(m.row_labels))
    lines.append(f"{m.row_count} {m.col_count}")
    for r in m.rows():
        lines.append(" ".join(str(e) for e in r))
    return "\n".join(lines) + "\n"


class MatrixFormatError(ValueError):
    pass


def parse_matrix(text: str) -> ExactMatrix:
    header = None
    rows: list[list[Fraction]] = []
    row_labels: list[str] = []
    col_labels: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("row_labels:"):
                row_labels = body.split(":", 1)[1].split()
            elif body.startswith("col_labels:"):
                col_labels = body.split(":", 1)[1].split()
            continue
        try:
            if header is None:
                parts = line.split()
                if len(parts) != 2:
                    raise MatrixFormatError(f"line {lineno}: header must be 'rows cols'")
                header = (int(parts[0]), int(parts[1]))
                if header[0] < 0 or header[1] < 0:
                    raise MatrixFormatError(f"line {lineno}: negative dimension")
                continue
            if any(c in line for c in ".eE"):
                raise MatrixFormatError(f"line {lineno}: only integers and p/q are allowed")
            rows.append([Fraction(tok) for tok in line.split()])
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, MatrixFormatError):
                raise
            raise MatrixFormatError(f"line {lineno}: {exc}") from None
    if header is None:
        raise MatrixFormatError("missing 'rows cols' header")
    n_rows, n_cols = header
    if len(rows) != n_rows:
        raise MatrixFormatError(f"expected {n_rows} rows, found {len(rows)}")
    for i, r in enumerate(rows):
        if len(r) != n_cols:
            raise MatrixFormatError(f"row {i} has {len(r)} entries, expected {n_cols}")
    if row_labels and len(row_labels) != n_rows or col_labels and len(col_labels) != n_cols:
        raise MatrixFormatError("label comment does not match dimensions")
    return ExactMatrix.from_rows(rows, row_labels, col_labels, col_count=n_cols)


def read_matrix(fp: TextIO) -> ExactMatrix:
    return parse_matrix(fp.read())


def matrix_to_json(m: ExactMatrix) -> dict:
    return {
        "rows": m.row_count,
        "cols": m.col_count,
        "entries": [[str(e) for e in r] for r in m.rows()],
        "row_labels": list(m.row_labels),
        "col_labels": list(m.col_labels),
    }


def matrix_from_json(obj: dict) -> ExactMatrix:
    return ExactMatrix.from_rows(
        [[Fraction(e) for e in r] for r in obj["entries"]],
        obj.get("row_labels", ()),
        obj.get("col_labels", ()),
        col_count=obj["cols"],
    )

