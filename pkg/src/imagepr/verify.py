"""Finite checks: bounded monochromatic-image search and the verifiers built on it."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .colouring import STAGED, ColouringSpec, ResidueTable, class_colour, colour_of, staged_colour
from .linalg import (
    ExactMatrix,
    column_space_equal,
    dependence_matrix,
    solve_in_span,
)
from .systems import (
    SystemInstance,
    SystemKind,
    build_system,
    coefficient_congruence_holds,
    coefficient_sequence,
    scale_to_second,
    variable_index,
)

SCHUR_MATRIX = ExactMatrix.from_rows(
    [[1, 0], [0, 1], [1, 1]], ("x", "y", "x+y"), ("x", "y")
)


# -- search outcomes -----------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    assignment: dict[str, int]
    image: tuple[int, ...]
    colour: int | None

    def key(self) -> tuple[int, ...]:
        return tuple(self.assignment.values())

    def to_json(self) -> dict:
        return {
            "outcome": "witness",
            "assignment": dict(self.assignment),
            "image": list(self.image),
            "colour": None if self.colour is None else int(self.colour),
        }


@dataclass(frozen=True)
class Exhausted:
    y_bound: int
    var_bound: int | tuple[int, ...]
    divisibility: tuple[int, ...]

    def to_json(self) -> dict:
        vb = self.var_bound if isinstance(self.var_bound, int) else list(self.var_bound)
        return {
            "outcome": "exhausted",
            "y_bound": self.y_bound,
            "var_bound": vb,
            "divisibility": list(self.divisibility),
        }


SearchOutcome = Union[Witness, Exhausted]


def outcome_from_json(obj: dict) -> SearchOutcome:
    if obj["outcome"] == "witness":
        return Witness(dict(obj["assignment"]), tuple(obj["image"]), obj["colour"])
    vb = obj["var_bound"]
    return Exhausted(
        obj["y_bound"], vb if isinstance(vb, int) else tuple(vb), tuple(obj["divisibility"])
    )


# -- the search ----------------------------------------------------------------


def _entry(e: Fraction):
    return e.numerator if e.denominator == 1 else e


@dataclass
class _Problem:
    """Search data in plain picklable form; ints wherever the matrix is integral."""

    rows_by_depth: list[list[list[tuple[int, object]]]]
    dead: bool  # some row is identically zero, so its image entry can never be positive
    candidates: list[list[int]]
    spec: ColouringSpec
    image_max: int | None


def _prepare(matrix, divisibility, spec, y_bound, var_bound, image_max) -> _Problem:
    n = matrix.col_count
    by_depth: list[list] = [[] for _ in range(n)]
    dead = False
    for r in matrix.rows():
        terms = [(j, _entry(e)) for j, e in enumerate(r) if e != 0]
        if not terms:
            dead = True
            continue
        by_depth[terms[-1][0]].append(terms)
    if isinstance(var_bound, int):
        bounds = [var_bound] * (n - 1)
    else:
        bounds = list(var_bound)
        if len(bounds) != n - 1:
            raise ValueError(f"need {n - 1} per-variable bounds, got {len(bounds)}")
    bounds.append(y_bound)
    candidates = [list(range(d, b + 1, d)) for d, b in zip(divisibility, bounds)]
    return _Problem(by_depth, dead, candidates, spec, image_max)


def _dfs(p: _Problem) -> tuple[tuple[int, ...], int | None] | None:
    if p.dead or any(not c for c in p.candidates):
        return None
    n = len(p.candidates)
    values = [0] * n
    spec, cap = p.spec, p.image_max

    def check(t: int, colour):
        for terms in p.rows_by_depth[t]:
            val = sum(c * values[j] for j, c in terms)
            if isinstance(val, Fraction):
                if val.denominator != 1:
                    return False, colour
                val = val.numerator
            if val <= 0 or (cap is not None and val > cap):
                return False, colour
            cv = colour_of(spec, val)
            if colour is None:
                colour = cv
            elif cv != colour:
                return False, colour
        return True, colour

    def walk(t: int, colour):
        for v in p.candidates[t]:
            values[t] = v
            ok, c = check(t, colour)
            if not ok:
                continue
            if t == n - 1:
                return tuple(values), c
            found = walk(t + 1, c)
            if found is not None:
                return found
        return None

    if n == 0:
        return None
    return walk(0, None)


def _split(seq: list[int], parts: int) -> list[list[int]]:
    return [seq[i::parts] for i in range(parts) if seq[i::parts]]


def _run_chunk(args) -> tuple[tuple[int, ...], int | None] | None:
    p, ys = args
    p.candidates[-1] = ys
    return _dfs(p)


def find_monochromatic_image(
    system: SystemInstance | ExactMatrix,
    spec: ColouringSpec,
    y_bound: int,
    var_bound: int | Sequence[int],
    *,
    divisibility: Sequence[int] | None = None,
    image_max: int | None = None,
    workers: int = 1,
) -> SearchOutcome:
    """Lexicographically first assignment whose image is monochromatic.

    Variables are enumerated in column order; the last column plays the role
    of ``y`` and is bounded by ``y_bound``, every other variable by
    ``var_bound`` (a single bound or one per variable). Each variable ranges
    over the positive multiples of its modulus. A partial assignment is dropped
    as soon as a fully determined image entry is non-positive, non-integral,
    above ``image_max`` or of a different colour from the earlier ones.

    With ``workers > 1`` the ``y`` values are dealt out to worker processes and
    the least witness is kept, so the answer matches the serial one.
    """
    if isinstance(system, SystemInstance):
        matrix = system.matrix
        if divisibility is None:
            divisibility = system.divisibility
    else:
        matrix = system
    if divisibility is None:
        divisibility = (1,) * matrix.col_count
    divisibility = tuple(int(d) for d in divisibility)
    if len(divisibility) != matrix.col_count:
        raise ValueError("need one divisibility modulus per variable")
    if any(d < 1 for d in divisibility):
        raise ValueError("divisibility moduli must be positive")
    bounds = [y_bound] + ([var_bound] if isinstance(var_bound, int) else list(var_bound))
    if any(b < 1 for b in bounds):
        raise ValueError("search bounds must be positive")
    if workers < 1:
        raise ValueError("workers must be positive")

    problem = _prepare(matrix, divisibility, spec, y_bound, var_bound, image_max)
    if workers == 1 or len(problem.candidates[-1]) < 2:
        found = _dfs(problem)
    else:
        chunks = _split(problem.candidates[-1], workers)
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            results = [r for r in pool.map(_run_chunk, [(problem, ys) for ys in chunks]) if r]
        found = min(results, key=lambda r: r[0]) if results else None

    if found is None:
        vb = var_bound if isinstance(var_bound, int) else tuple(var_bound)
        return Exhausted(y_bound, vb, divisibility)
    values, colour = found
    image = tuple(int(v) for v in matrix.matvec(values))
    return Witness(dict(zip(matrix.col_labels, values)), image, colour)


def validate_witness(
    system: SystemInstance | ExactMatrix,
    spec: ColouringSpec,
    witness: Witness,
    divisibility: Sequence[int] | None = None,
    image_max: int | None = None,
) -> bool:
    """Recheck a witness from scratch: image, positivity, divisibility, colours."""
    if isinstance(system, SystemInstance):
        matrix, divisibility = system.matrix, divisibility or system.divisibility
    else:
        matrix = system
        divisibility = divisibility or (1,) * matrix.col_count
    if list(witness.assignment) != list(matrix.col_labels):
        return False
    values = list(witness.assignment.values())
    if any(v < 1 or v % d for v, d in zip(values, divisibility)):
        return False
    image = matrix.matvec(values)
    if tuple(image) != tuple(Fraction(v) for v in witness.image):
        return False
    if any(v.denominator != 1 or v <= 0 for v in image):
        return False
    if image_max is not None and any(v > image_max for v in image):
        return False
    colours = {colour_of(spec, int(v)) for v in image}
    return colours <= {witness.colour} and len(colours) <= 1


# -- the obstruction -----------------------------------------------------------


@dataclass(frozen=True)
class ObstructionRow:
    n: int
    c_n: int
    congruence_holds: bool
    class_opposite: bool
    min_expression_value: int
    exception_cleared: bool

    @property
    def passed(self) -> bool:
        return self.congruence_holds and self.class_opposite and self.exception_cleared


@dataclass(frozen=True)
class ObstructionReport:
    range_limit: int
    rows: tuple[ObstructionRow, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def failures(self) -> list[ObstructionRow]:
        return [r for r in self.rows if not r.passed]

    def to_json(self) -> dict:
        return {
            "range_limit": self.range_limit,
            "passed": self.passed,
            "rows": [
                {
                    "n": r.n,
                    "c_n": str(r.c_n),
                    "congruence_holds": r.congruence_holds,
                    "class_opposite": r.class_opposite,
                    "min_expression_value": str(r.min_expression_value),
                    "exception_cleared": r.exception_cleared,
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ObstructionReport":
        rows = tuple(
            ObstructionRow(
                r["n"],
                int(r["c_n"]),
                r["congruence_holds"],
                r["class_opposite"],
                int(r["min_expression_value"]),
                r["exception_cleared"],
            )
            for r in obj["rows"]
        )
        return cls(obj["range_limit"], rows)


def verify_obstruction(range_limit: int, coefficients: Sequence[int] | None = None) -> ObstructionReport:
    """Check, for each ``n <= range_limit``, why ``y = n`` is impossible.

    With every ``x_{nj}`` a positive multiple of ``2^n`` and ``y = n``, the
    expression ``E_n`` is at least ``n 2^n + c_n n`` and lies in the class
    ``2^(n-1) mod 2^n``. It therefore takes that class's generic colour, which
    must differ from the colour of ``n``.
    """
    if range_limit < 1:
        raise ValueError("range_limit must be positive")
    if coefficients is None:
        coefficients = coefficient_sequence(range_limit)
    if len(coefficients) < range_limit:
        raise ValueError("not enough coefficients for the requested range")
    rows = []
    for n in range(1, range_limit + 1):
        c = int(coefficients[n - 1])
        min_value = n * (1 << n) + c * n
        rows.append(
            ObstructionRow(
                n=n,
                c_n=c,
                congruence_holds=coefficient_congruence_holds(n, c),
                class_opposite=class_colour(n) != staged_colour(n),
                min_expression_value=min_value,
                exception_cleared=n >= 3 or min_value > n,
            )
        )
    return ObstructionReport(range_limit, tuple(rows))


def truncated_obstruction_searches(
    depth: int, var_bound: int = 32, y_bound: int | None = None, workers: int = 1
) -> tuple[SearchOutcome, SearchOutcome]:
    """Run the truncated obstruction search on both systems.

    The ``z`` search uses per-variable bounds ``var_bound // 2^i`` so that
    ``x_{ij} = 2^i z_{ij}`` maps its search space exactly onto the ``x`` one.
    """
    if y_bound is None:
        y_bound = depth
    first = build_system(SystemKind.PLAIN_X, depth)
    second = scale_to_second(first)
    z_bounds = [var_bound >> i for i, _ in variable_index(depth)]
    out1 = find_monochromatic_image(first, STAGED, y_bound, var_bound, workers=workers)
    if any(b < 1 for b in z_bounds):
        # some z variable has no admissible value at all
        out2: SearchOutcome = Exhausted(y_bound, tuple(z_bounds), second.divisibility)
    else:
        out2 = find_monochromatic_image(second, STAGED, y_bound, z_bounds, workers=workers)
    return out1, out2


# -- B(A) and images over Q ------------------------------------------------------


def dependence_matrices_agree(a: ExactMatrix, b: ExactMatrix) -> bool:
    return dependence_matrix(a).same_entries(dependence_matrix(b))


def verify_B_equality(depth: int) -> bool:
    if depth < 1:
        raise ValueError("depth must be positive")
    first = build_system(SystemKind.PLAIN_X, depth)
    second = build_system(SystemKind.SCALED_Z, depth)
    return dependence_matrices_agree(first.matrix, second.matrix)


def verify_image_equality_over_Q(depth: int) -> bool:
    if depth < 1:
        raise ValueError("depth must be positive")
    first = build_system(SystemKind.PLAIN_X, depth)
    second = build_system(SystemKind.SCALED_Z, depth)
    return column_space_equal(first.matrix, second.matrix)


# -- columns condition -----------------------------------------------------------

DEFAULT_COLUMN_LIMIT = 10


@dataclass(frozen=True)
class ColumnsCertificate:
    """Ordered column blocks; ``combinations[k]`` writes the sum of block ``k+1``
    as ``(column, coefficient)`` pairs over the columns of earlier blocks."""

    blocks: tuple[tuple[int, ...], ...]
    combinations: tuple[tuple[tuple[int, Fraction], ...], ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "satisfied": True,
            "blocks": [list(b) for b in self.blocks],
            "combinations": [[[j, str(c)] for j, c in comb] for comb in self.combinations],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ColumnsCertificate":
        return cls(
            tuple(tuple(b) for b in obj["blocks"]),
            tuple(tuple((j, Fraction(c)) for j, c in comb) for comb in obj["combinations"]),
        )


def _col_sum(cols, members) -> list[Fraction]:
    n = len(cols[0]) if cols else 0
    return [sum((cols[j][i] for j in members), Fraction(0)) for i in range(n)]


def columns_condition(m: ExactMatrix, limit: int = DEFAULT_COLUMN_LIMIT) -> ColumnsCertificate | None:
    """Search for an ordered column partition witnessing the columns condition.

    Each block is the first subset of the unused columns, in ascending bitmask
    order, that qualifies (zero sum for the first block, sum in the span of the
    used columns afterwards). Taking any qualifying block never blocks a later
    completion, so the greedy search is exact. Returns None when no partition
    exists.
    """
    n = m.col_count
    if n > limit:
        raise ValueError(f"{n} columns exceeds the columns-condition limit of {limit}")
    cols = m.columns()
    if n == 0:
        return ColumnsCertificate(())
    full = (1 << n) - 1

    def members(mask: int) -> list[int]:
        return [j for j in range(n) if mask >> j & 1]

    first = next(
        (s for s in range(1, full + 1) if all(v == 0 for v in _col_sum(cols, members(s)))),
        None,
    )
    if first is None:
        return None
    used = first
    blocks = [tuple(members(first))]
    combos = []
    while used != full:
        base = members(used)
        for s in range(1, full + 1):
            if s & used:
                continue
            sol = solve_in_span([cols[j] for j in base], _col_sum(cols, members(s)))
            if sol is not None:
                blocks.append(tuple(members(s)))
                combos.append(tuple(zip(base, sol)))
                used |= s
                break
        else:
            return None
    return ColumnsCertificate(tuple(blocks), tuple(combos))


def validate_certificate(m: ExactMatrix, cert: ColumnsCertificate) -> bool:
    cols = m.columns()
    flat = [j for b in cert.blocks for j in b]
    if sorted(flat) != list(range(m.col_count)) or any(not b for b in cert.blocks):
        return False
    if m.col_count == 0:
        return True
    if any(v != 0 for v in _col_sum(cols, cert.blocks[0])):
        return False
    if len(cert.combinations) != len(cert.blocks) - 1:
        return False
    earlier = set(cert.blocks[0])
    for block, comb in zip(cert.blocks[1:], cert.combinations):
        if any(j not in earlier for j, _ in comb):
            return False
        target = _col_sum(cols, block)
        got = [sum((c * cols[j][i] for j, c in comb), Fraction(0)) for i in range(m.row_count)]
        if got != target:
            return False
        earlier.update(block)
    return True


# -- Schur -----------------------------------------------------------------------

DEFAULT_ENUMERATION_LIMIT = 1 << 20


def schur_exhaustive(n: int, k: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> bool:
    """Does every ``k``-colouring of ``1..n`` contain a monochromatic ``x, y, x+y``?"""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if k**n > limit:
        raise ValueError(f"{k}**{n} colourings exceeds the enumeration limit of {limit}")
    for colours in itertools.product(range(k), repeat=n):
        spec = ResidueTable.explicit(colours)
        out = find_monochromatic_image(SCHUR_MATRIX, spec, n, n, image_max=n)
        if isinstance(out, Exhausted):
            return False
    return True

