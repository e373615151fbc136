"""Standard Taguchi orthogonal arrays.

The catalog is literal data: L4(2^3), L8(2^7), L9(3^4), L12(2^11),
L16(2^15), L18(2^1 3^7) and L27(3^13). Level indices are 1-based.
"""
from __future__ import annotations

import csv
import io
import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NoFittingArrayError, PlanError, UnknownArrayError

_RAW = {
    "L4": """
    1 1 1
    1 2 2
    2 1 2
    2 2 1
""",
    "L8": """
    1 1 1 1 1 1 1
    1 1 1 2 2 2 2
    1 2 2 1 1 2 2
    1 2 2 2 2 1 1
    2 1 2 1 2 1 2
    2 1 2 2 1 2 1
    2 2 1 1 2 2 1
    2 2 1 2 1 1 2
""",
    "L9": """
    1 1 1 1
    1 2 2 2
    1 3 3 3
    2 1 2 3
    2 2 3 1
    2 3 1 2
    3 1 3 2
    3 2 1 3
    3 3 2 1
""",
    "L12": """
    1 1 1 1 1 1 1 1 1 1 1
    1 1 1 1 1 2 2 2 2 2 2
    1 1 2 2 2 1 1 1 2 2 2
    1 2 1 2 2 1 2 2 1 1 2
    1 2 2 1 2 2 1 2 1 2 1
    1 2 2 2 1 2 2 1 2 1 1
    2 1 2 2 1 1 2 2 1 2 1
    2 1 2 1 2 2 2 1 1 1 2
    2 1 1 2 2 2 1 2 2 1 1
    2 2 2 1 1 1 1 2 2 1 2
    2 2 1 2 1 2 1 1 1 2 2
    2 2 1 1 2 1 2 1 2 2 1
""",
    "L16": """
    1 1 1 1 1 1 1 1 1 1 1 1 1 1 1
    1 1 1 1 1 1 1 2 2 2 2 2 2 2 2
    1 1 1 2 2 2 2 1 1 1 1 2 2 2 2
    1 1 1 2 2 2 2 2 2 2 2 1 1 1 1
    1 2 2 1 1 2 2 1 1 2 2 1 1 2 2
    1 2 2 1 1 2 2 2 2 1 1 2 2 1 1
    1 2 2 2 2 1 1 1 1 2 2 2 2 1 1
    1 2 2 2 2 1 1 2 2 1 1 1 1 2 2
    2 1 2 1 2 1 2 1 2 1 2 1 2 1 2
    2 1 2 1 2 1 2 2 1 2 1 2 1 2 1
    2 1 2 2 1 2 1 1 2 1 2 2 1 2 1
    2 1 2 2 1 2 1 2 1 2 1 1 2 1 2
    2 2 1 1 2 2 1 1 2 2 1 1 2 2 1
    2 2 1 1 2 2 1 2 1 1 2 2 1 1 2
    2 2 1 2 1 1 2 1 2 2 1 2 1 1 2
    2 2 1 2 1 1 2 2 1 1 2 1 2 2 1
""",
    "L18": """
    1 1 1 1 1 1 1 1
    1 1 2 2 2 2 2 2
    1 1 3 3 3 3 3 3
    1 2 1 1 2 2 3 3
    1 2 2 2 3 3 1 1
    1 2 3 3 1 1 2 2
    1 3 1 2 1 3 2 3
    1 3 2 3 2 1 3 1
    1 3 3 1 3 2 1 2
    2 1 1 3 3 2 2 1
    2 1 2 1 1 3 3 2
    2 1 3 2 2 1 1 3
    2 2 1 2 3 1 3 2
    2 2 2 3 1 2 1 3
    2 2 3 1 2 3 2 1
    2 3 1 3 2 3 1 2
    2 3 2 1 3 1 2 3
    2 3 3 2 1 2 3 1
""",
    "L27": """
    1 1 1 1 1 1 1 1 1 1 1 1 1
    1 1 1 1 2 2 2 2 2 2 2 2 2
    1 1 1 1 3 3 3 3 3 3 3 3 3
    1 2 2 2 1 1 1 2 2 2 3 3 3
    1 2 2 2 2 2 2 3 3 3 1 1 1
    1 2 2 2 3 3 3 1 1 1 2 2 2
    1 3 3 3 1 1 1 3 3 3 2 2 2
    1 3 3 3 2 2 2 1 1 1 3 3 3
    1 3 3 3 3 3 3 2 2 2 1 1 1
    2 1 2 3 1 2 3 1 2 3 1 2 3
    2 1 2 3 2 3 1 2 3 1 2 3 1
    2 1 2 3 3 1 2 3 1 2 3 1 2
    2 2 3 1 1 2 3 2 3 1 3 1 2
    2 2 3 1 2 3 1 3 1 2 1 2 3
    2 2 3 1 3 1 2 1 2 3 2 3 1
    2 3 1 2 1 2 3 3 1 2 2 3 1
    2 3 1 2 2 3 1 1 2 3 3 1 2
    2 3 1 2 3 1 2 2 3 1 1 2 3
    3 1 3 2 1 3 2 1 3 2 1 3 2
    3 1 3 2 2 1 3 2 1 3 2 1 3
    3 1 3 2 3 2 1 3 2 1 3 2 1
    3 2 1 3 1 3 2 2 1 3 3 2 1
    3 2 1 3 2 1 3 3 2 1 1 3 2
    3 2 1 3 3 2 1 1 3 2 2 1 3
    3 3 2 1 1 3 2 3 2 1 2 1 3
    3 3 2 1 2 1 3 1 3 2 3 2 1
    3 3 2 1 3 2 1 2 1 3 1 3 2
""",
}


@dataclass(frozen=True, eq=False)
class OrthogonalArray:
    """A run x column matrix of 1-based level indices."""

    name: str
    matrix: np.ndarray
    levels: tuple[int, ...] = ()

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
            raise PlanError(f"array {self.name!r} must be a non-empty 2-D matrix")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        levels = tuple(int(v) for v in self.levels) or tuple(
            int(v) for v in matrix.max(axis=0))
        if len(levels) != matrix.shape[1]:
            raise PlanError(f"array {self.name!r}: {len(levels)} level counts "
                            f"for {matrix.shape[1]} columns")
        if any(v < 2 for v in levels):
            raise PlanError(f"array {self.name!r}: every column needs >= 2 levels")
        object.__setattr__(self, "levels", levels)

    @property
    def num_runs(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_columns(self) -> int:
        return self.matrix.shape[1]

    def column(self, index: int) -> np.ndarray:
        """Column by 1-based index."""
        if not 1 <= index <= self.num_columns:
            raise IndexError(f"{self.name} has columns 1..{self.num_columns}")
        return self.matrix[:, index - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["run"] + [f"c{j}" for j in range(1, self.num_columns + 1)])
        for run, row in enumerate(self.matrix, start=1):
            writer.writerow([run] + [int(v) for v in row])
        return buf.getvalue()

    def __repr__(self):
        return (f"OrthogonalArray({self.name!r}, runs={self.num_runs}, "
                f"levels={self.levels})")


@dataclass
class VerificationReport:
    name: str
    balanced: dict[int, bool] = field(default_factory=dict)
    orthogonal: dict[tuple[int, int], bool] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _parse(name, text):
    rows = [[int(tok) for tok in line.split()] for line in text.strip().splitlines()]
    return OrthogonalArray(name, np.array(rows))


@lru_cache(maxsize=None)
def _catalog() -> dict[str, OrthogonalArray]:
    return {name: _parse(name, text) for name, text in _RAW.items()}


def available() -> list[str]:
    """Catalog names ordered by run count."""
    return sorted(_RAW, key=lambda n: _catalog()[n].num_runs)


def lookup(name: str) -> OrthogonalArray:
    key = str(name).strip().upper()
    try:
        return _catalog()[key]
    except KeyError:
        raise UnknownArrayError(
            f"unknown array {name!r}; available: {', '.join(available())}") from None


def assign_columns(oa: OrthogonalArray, factor_levels) -> list[int] | None:
    """First-fit, lowest-index column assignment; None if the array cannot host."""
    used = set()
    columns = []
    for levels in factor_levels:
        for j, col_levels in enumerate(oa.levels, start=1):
            if j not in used and col_levels == levels:
                used.add(j)
                columns.append(j)
                break
        else:
            return None
    return columns


def select_array(factor_levels) -> OrthogonalArray:
    """Smallest catalog array with enough matching columns for every factor."""
    factor_levels = [int(v) for v in factor_levels]
    if not factor_levels:
        raise PlanError("select_array needs at least one factor")
    if any(v < 2 for v in factor_levels):
        raise PlanError(f"every factor needs >= 2 levels (got {factor_levels})")
    for name in available():
        oa = _catalog()[name]
        if assign_columns(oa, factor_levels) is not None:
            return oa
    need = Counter(factor_levels)
    raise NoFittingArrayError(
        "no catalog array hosts "
        + ", ".join(f"{n} factor(s) at {lv} levels" for lv, n in sorted(need.items())))


def verify(oa: OrthogonalArray) -> VerificationReport:
    """Check level range, per-column balance and pairwise orthogonality."""
    report = VerificationReport(oa.name)
    n = oa.num_runs
    for j, lv in enumerate(oa.levels, start=1):
        col = oa.column(j)
        bad = col[(col < 1) | (col > lv)]
        if bad.size:
            report.violations.append(
                f"column {j}: entries {sorted(set(bad.tolist()))} outside 1..{lv}")
        counts = Counter(col.tolist())
        balanced = n % lv == 0 and all(counts.get(L, 0) == n // lv
                                       for L in range(1, lv + 1))
        report.balanced[j] = balanced
        if not balanced:
            report.violations.append(
                f"column {j}: level counts {dict(sorted(counts.items()))} "
                f"are not {n}/{lv} each")
    for i, j in itertools.combinations(range(1, oa.num_columns + 1), 2):
        li, lj = oa.levels[i - 1], oa.levels[j - 1]
        pairs = Counter(zip(oa.column(i).tolist(), oa.column(j).tolist()))
        expected, rem = divmod(n, li * lj)
        ok = rem == 0 and all(pairs.get((a, b), 0) == expected
                              for a in range(1, li + 1) for b in range(1, lj + 1))
        report.orthogonal[(i, j)] = ok
        if not ok:
            report.violations.append(f"columns ({i}, {j}) are not orthogonal")
    return report
