"""Immutable sparse matrices over an exact coefficient ring.

Zero entries are never stored and every coefficient is canonical for its
ring, so two equal matrices compare equal as dataclasses.  Vectors are
column matrices (shape n x 1); there is no separate vector type.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rings import Ring


@dataclass(frozen=True)
class SparseMatrix:
    ring: Ring
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        assert self.rows >= 0 and self.cols >= 0
        for (r, c), v in self.entries.items():
            assert 0 <= r < self.rows and 0 <= c < self.cols, (r, c, self.rows, self.cols)
            assert v == self.ring.canon(v)
            assert not self.ring.is_zero(v)

    # -- construction -------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring, rows: int, cols: int) -> "SparseMatrix":
        return cls(ring, rows, cols, {})

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "SparseMatrix":
        one = ring.one()
        return cls(ring, n, n, {(i, i): one for i in range(n)})

    @classmethod
    def from_dense(cls, ring: Ring, dense) -> "SparseMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        entries = {}
        for r, row in enumerate(dense):
            assert len(row) == cols
            for c, v in enumerate(row):
                v = ring.canon(v)
                if not ring.is_zero(v):
                    entries[(r, c)] = v
        return cls(ring, rows, cols, entries)

    @classmethod
    def from_triples(cls, ring: Ring, rows: int, cols: int, triples) -> "SparseMatrix":
        entries = {}
        for r, c, v in triples:
            v = ring.canon(v)
            if not ring.is_zero(v):
                assert (r, c) not in entries
                entries[(r, c)] = v
        return cls(ring, rows, cols, entries)

    @classmethod
    def from_cols(cls, ring: Ring, rows: int, cols) -> "SparseMatrix":
        """Build from a list of columns, each a dict {row: coeff}."""
        entries = {}
        for c, col in enumerate(cols):
            for r, v in col.items():
                v = ring.canon(v)
                if not ring.is_zero(v):
                    entries[(r, c)] = v
        return cls(ring, rows, len(cols), entries)

    @classmethod
    def unit_vector(cls, ring: Ring, n: int, i: int) -> "SparseMatrix":
        return cls(ring, n, 1, {(i, 0): ring.one()})

    # -- access -------------------------------------------------------

    def get(self, r: int, c: int):
        assert 0 <= r < self.rows and 0 <= c < self.cols
        return self.entries.get((r, c), self.ring.zero())

    def triples(self):
        return sorted((r, c, v) for (r, c), v in self.entries.items())

    def column(self, j: int) -> dict:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def to_dense(self):
        out = [[self.ring.zero()] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @property
    def is_zero_matrix(self) -> bool:
        return not self.entries

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __repr__(self):
        return f"SparseMatrix({self.ring.token()}, {self.rows}x{self.cols}, nnz={len(self.entries)})"

    # -- arithmetic ---------------------------------------------------

    def _like(self, entries: dict) -> "SparseMatrix":
        return SparseMatrix(self.ring, self.rows, self.cols, entries)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        assert self.ring == other.ring and self.shape == other.shape
        ring = self.ring
        entries = dict(self.entries)
        for key, v in other.entries.items():
            s = ring.add(entries.get(key, ring.zero()), v)
            if ring.is_zero(s):
                entries.pop(key, None)
            else:
                entries[key] = s
        return self._like(entries)

    def __neg__(self) -> "SparseMatrix":
        ring = self.ring
        return self._like({k: ring.neg(v) for k, v in self.entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, factor) -> "SparseMatrix":
        ring = self.ring
        factor = ring.canon(factor)
        if ring.is_zero(factor):
            return SparseMatrix.zero(ring, self.rows, self.cols)
        entries = {}
        for k, v in self.entries.items():
            w = ring.mul(factor, v)
            if not ring.is_zero(w):
                entries[k] = w
        return self._like(entries)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        assert self.ring == other.ring
        assert self.cols == other.rows, (self.shape, other.shape)
        ring = self.ring
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc = {}
        for (r, k), a in self.entries.items():
            for c, b in by_row.get(k, ()):
                key = (r, c)
                s = ring.add(acc.get(key, ring.zero()), ring.mul(a, b))
                if ring.is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        return SparseMatrix(ring, self.rows, other.cols, acc)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.ring, self.cols, self.rows,
            {(c, r): v for (r, c), v in self.entries.items()})

    # -- selection and assembly ---------------------------------------

    def row_select(self, indices) -> "SparseMatrix":
        pos = {r: i for i, r in enumerate(indices)}
        entries = {}
        for (r, c), v in self.entries.items():
            if r in pos:
                entries[(pos[r], c)] = v
        return SparseMatrix(self.ring, len(pos), self.cols, entries)

    def col_select(self, indices) -> "SparseMatrix":
        pos = {c: i for i, c in enumerate(indices)}
        entries = {}
        for (r, c), v in self.entries.items():
            if c in pos:
                entries[(r, pos[c])] = v
        return SparseMatrix(self.ring, self.rows, len(pos), entries)


def hstack(blocks) -> SparseMatrix:
    blocks = list(blocks)
    assert blocks
    ring, rows = blocks[0].ring, blocks[0].rows
    entries, off = {}, 0
    for b in blocks:
        assert b.ring == ring and b.rows == rows
        for (r, c), v in b.entries.items():
            entries[(r, off + c)] = v
        off += b.cols
    return SparseMatrix(ring, rows, off, entries)


def vstack(blocks) -> SparseMatrix:
    blocks = list(blocks)
    assert blocks
    ring, cols = blocks[0].ring, blocks[0].cols
    entries, off = {}, 0
    for b in blocks:
        assert b.ring == ring and b.cols == cols
        for (r, c), v in b.entries.items():
            entries[(off + r, c)] = v
        off += b.rows
    return SparseMatrix(ring, off, cols, entries)


def block_diag(blocks) -> SparseMatrix:
    blocks = list(blocks)
    assert blocks
    ring = blocks[0].ring
    entries, roff, coff = {}, 0, 0
    for b in blocks:
        assert b.ring == ring
        for (r, c), v in b.entries.items():
            entries[(roff + r, coff + c)] = v
        roff += b.rows
        coff += b.cols
    return SparseMatrix(ring, roff, coff, entries)


def block_matrix(ring: Ring, grid) -> SparseMatrix:
    """Assemble from a 2d grid of blocks; None means a zero block.

    Row heights and column widths are inferred, so each grid row needs at
    least one non-None block and likewise each grid column.
    """
    nrows = len(grid)
    ncols = len(grid[0]) if nrows else 0
    heights = [None] * nrows
    widths = [None] * ncols
    for i, row in enumerate(grid):
        assert len(row) == ncols
        for j, b in enumerate(row):
            if b is None:
                continue
            assert b.ring == ring
            assert heights[i] in (None, b.rows)
            assert widths[j] in (None, b.cols)
            heights[i] = b.rows
            widths[j] = b.cols
    assert None not in heights and None not in widths
    roffs = [sum(heights[:i]) for i in range(nrows)]
    coffs = [sum(widths[:j]) for j in range(ncols)]
    entries = {}
    for i, row in enumerate(grid):
        for j, b in enumerate(row):
            if b is None:
                continue
            for (r, c), v in b.entries.items():
                entries[(roffs[i] + r, coffs[j] + c)] = v
    return SparseMatrix(ring, sum(heights), sum(widths), entries)
