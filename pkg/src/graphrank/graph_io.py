"""Edge-list parsing and the column-stochastic transition matrix.

The convention throughout this package is column-stochastic: entry
(i, j) is the probability of stepping to node i from node j, so every
column sums to one and ``matvec`` maps stochastic vectors to stochastic
vectors. Much of the ranking literature uses the row convention instead;
everything here is written for the column one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "GraphEdges",
    "StochasticVector",
    "TransitionMatrix",
    "parse_edge_list",
    "load_edge_list",
    "build_transition",
    "matvec",
]

# Node indices must stay comfortably inside int64 column codes (src * n + dst).
_MAX_NODE_INDEX = 2**31 - 1

_UNIT_MASS_TOL = 1e-12


@dataclass(frozen=True)
class GraphEdges:
    """Directed weighted edge list over dense 0-based node indices.

    Parallel edges and self-loops are allowed; weights must be finite and
    nonnegative, and a nonempty edge list needs at least one positive
    weight (an all-zero graph has no usable transition structure).
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if not isinstance(self.node_count, int) or self.node_count < 0:
            raise ValidationError("node_count must be a nonnegative integer")
        normalized = tuple((int(s), int(d), float(w)) for s, d, w in self.edges)
        object.__setattr__(self, "edges", normalized)
        any_positive = not normalized
        for src, dst, weight in normalized:
            if not (0 <= src < self.node_count and 0 <= dst < self.node_count):
                raise ValidationError(
                    f"edge ({src}, {dst}) outside valid node range 0..{self.node_count - 1}"
                )
            if not (math.isfinite(weight) and weight >= 0.0):
                raise ValidationError(f"edge ({src}, {dst}) has invalid weight {weight!r}")
            any_positive = any_positive or weight > 0.0
        if not any_positive:
            raise ValidationError("edge list carries no positive-weight edge")


@dataclass(frozen=True)
class StochasticVector:
    """Nonnegative vector with unit L1 mass (tolerance 1e-12)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ValidationError("stochastic vector must be 1-D and nonempty")
        if not np.all(np.isfinite(values)):
            raise ValidationError("stochastic vector has non-finite entries")
        if values.min() < 0.0:
            raise ValidationError("stochastic vector has negative entries")
        if abs(values.sum() - 1.0) > _UNIT_MASS_TOL:
            raise ValidationError(
                f"stochastic vector mass {values.sum()!r} is not 1 within {_UNIT_MASS_TOL}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    @classmethod
    def uniform(cls, n: int) -> "StochasticVector":
        if n < 1:
            raise ValidationError("uniform vector needs at least one entry")
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def from_weights(cls, weights) -> "StochasticVector":
        """Normalize nonnegative weights to unit mass."""
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("weights must be 1-D and nonempty")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights have non-finite entries")
        if w.min() < 0.0:
            raise ValidationError("weights must be nonnegative")
        total = w.sum()
        if total <= 0.0:
            raise ValidationError("weights sum to zero; cannot normalize")
        return cls(w / total)


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-compressed sparse column-stochastic matrix.

    ``dangling_columns`` records which columns had zero out-weight and
    were replaced by the teleport vector during construction. All arrays
    are frozen read-only; instances are safe to share across threads.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    dangling_columns: frozenset[int]
    _entry_col: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("transition matrix dimension must be at least 1")
        indptr = np.array(self.indptr, dtype=np.int64)
        indices = np.array(self.indices, dtype=np.int64)
        data = np.array(self.data, dtype=np.float64)
        if indptr.shape != (self.n + 1,) or indptr[0] != 0 or indptr[-1] != data.size:
            raise ValidationError("inconsistent column pointers")
        if np.any(np.diff(indptr) < 0):
            raise ValidationError("column pointers must be nondecreasing")
        if indices.shape != data.shape:
            raise ValidationError("row indices and values differ in length")
        if data.size and (indices.min() < 0 or indices.max() >= self.n):
            raise ValidationError("row index out of range")
        if not np.all(np.isfinite(data)) or (data.size and data.min() < 0.0):
            raise ValidationError("stored entries must be finite and nonnegative")
        entry_col = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(indptr))
        sums = np.bincount(entry_col, weights=data, minlength=self.n)
        if np.max(np.abs(sums - 1.0), initial=0.0) > _UNIT_MASS_TOL:
            raise ValidationError("every column must sum to 1 within 1e-12")
        for arr in (indptr, indices, data, entry_col):
            arr.flags.writeable = False
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dangling_columns", frozenset(int(j) for j in self.dangling_columns))
        object.__setattr__(self, "_entry_col", entry_col)

    @property
    def nnz(self) -> int:
        return int(self.data.size)

    def column_sums(self) -> np.ndarray:
        return np.bincount(self._entry_col, weights=self.data, minlength=self.n)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        np.add.at(dense, (self.indices, self._entry_col), self.data)
        return dense


def _parse_index(token: str, line: int) -> int:
    # int() accepts underscore separators; the file format does not.
    if "_" in token:
        raise ParseError(f"malformed node index {token!r}", line)
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"malformed node index {token!r}", line) from None
    if value < 0:
        raise ValidationError(f"line {line}: negative node index {value}")
    if value > _MAX_NODE_INDEX:
        raise ValidationError(f"line {line}: node index {value} overflows the supported range")
    return value


def _parse_weight(token: str, line: int) -> float:
    if "_" in token:
        raise ParseError(f"malformed weight {token!r}", line)
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"malformed weight {token!r}", line) from None
    if not math.isfinite(value):
        raise ValidationError(f"line {line}: weight {token!r} is not finite")
    if value < 0.0:
        raise ValidationError(f"line {line}: negative weight {value}")
    return value


def parse_edge_list(text: str | Iterable[str]) -> GraphEdges:
    """Parse ``src dst [weight]`` lines into a :class:`GraphEdges`.

    ``#`` starts a comment (anywhere on a line), blank lines are skipped,
    and an optional ``%nodes N`` header pins the node count; the larger of
    the header and ``1 + max index seen`` wins. Accepts a string or any
    iterable of lines, so an open text file works directly. Missing
    weights default to 1.0.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    edges: list[tuple[int, int, float]] = []
    header_nodes = 0
    max_index = -1
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0].startswith("%"):
            if tokens[0] != "%nodes" or len(tokens) != 2:
                raise ParseError(f"unknown directive {line!r}", line_no)
            header_nodes = max(header_nodes, _parse_index(tokens[1], line_no))
            continue
        if len(tokens) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {line!r}", line_no)
        src = _parse_index(tokens[0], line_no)
        dst = _parse_index(tokens[1], line_no)
        weight = _parse_weight(tokens[2], line_no) if len(tokens) == 3 else 1.0
        edges.append((src, dst, weight))
        max_index = max(max_index, src, dst)
    return GraphEdges(node_count=max(header_nodes, max_index + 1), edges=tuple(edges))


def load_edge_list(path: str | Path) -> GraphEdges:
    """Read an edge-list file (UTF-8, LF or CRLF)."""
    with open(path, encoding="utf-8") as handle:
        return parse_edge_list(handle)


def build_transition(graph: GraphEdges, teleport: StochasticVector) -> TransitionMatrix:
    """Build the column-stochastic transition matrix of a graph.

    Column j holds ``weight(j -> i) / outweight(j)`` at row i; parallel
    edges accumulate. Any column with zero out-weight (a dangling node)
    is replaced by the teleport vector and recorded in
    ``dangling_columns``.
    """
    n = graph.node_count
    if n < 1:
        raise ValidationError("cannot build a transition matrix for an empty graph")
    if len(teleport) != n:
        raise ValidationError(f"teleport vector has length {len(teleport)}, graph has {n} nodes")

    if graph.edges:
        srcs = np.array([e[0] for e in graph.edges], dtype=np.int64)
        dsts = np.array([e[1] for e in graph.edges], dtype=np.int64)
        ws = np.array([e[2] for e in graph.edges], dtype=np.float64)
    else:
        srcs = np.zeros(0, dtype=np.int64)
        dsts = np.zeros(0, dtype=np.int64)
        ws = np.zeros(0, dtype=np.float64)

    out_weight = np.bincount(srcs, weights=ws, minlength=n)

    # Merge parallel edges; np.unique sorts codes, giving column-major order.
    codes = srcs * n + dsts
    unique_codes, inverse = np.unique(codes, return_inverse=True)
    merged = np.bincount(inverse, weights=ws) if codes.size else np.zeros(0)
    keep = merged > 0.0
    entry_cols = (unique_codes // n)[keep]
    entry_rows = (unique_codes % n)[keep]
    entry_vals = merged[keep]

    starts = np.searchsorted(entry_cols, np.arange(n), side="left")
    ends = np.searchsorted(entry_cols, np.arange(n), side="right")
    tele_rows = np.flatnonzero(teleport.values > 0.0).astype(np.int64)
    tele_vals = teleport.values[tele_rows]

    chunks_rows: list[np.ndarray] = []
    chunks_vals: list[np.ndarray] = []
    counts = np.zeros(n, dtype=np.int64)
    dangling: list[int] = []
    for j in range(n):
        if out_weight[j] == 0.0:
            dangling.append(j)
            rows_j, vals_j = tele_rows, tele_vals
        else:
            window = slice(starts[j], ends[j])
            rows_j = entry_rows[window]
            vals_j = entry_vals[window] / out_weight[j]
        counts[j] = rows_j.size
        chunks_rows.append(rows_j)
        chunks_vals.append(vals_j)

    indptr = np.concatenate(([0], np.cumsum(counts)))
    indices = np.concatenate(chunks_rows)
    data = np.concatenate(chunks_vals)
    return TransitionMatrix(
        n=n, indptr=indptr, indices=indices, data=data, dangling_columns=frozenset(dangling)
    )


def matvec(matrix: TransitionMatrix, vector) -> np.ndarray:
    """Sparse product ``matrix @ vector``.

    Accumulation order is fixed (ascending column, ascending row inside a
    column) so repeated runs produce identical results bit for bit.
    """
    v = vector.values if isinstance(vector, StochasticVector) else np.asarray(vector, dtype=np.float64)
    if v.shape != (matrix.n,):
        raise ValidationError(f"vector has shape {v.shape}, expected ({matrix.n},)")
    contrib = matrix.data * v[matrix._entry_col]
    return np.bincount(matrix.indices, weights=contrib, minlength=matrix.n)


def _as_start_values(vector, n: int) -> np.ndarray:
    """Validate a start/teleport argument and return its value array."""
    vec = vector if isinstance(vector, StochasticVector) else StochasticVector(np.asarray(vector, dtype=np.float64))
    if len(vec) != n:
        raise ValidationError(f"vector has length {len(vec)}, expected {n}")
    return vec.values
