"""Smith normal form with invertible row and column operation records.

smith_normal_form(A) produces D = U @ A @ V with U, V invertible and
their inverses tracked alongside.  Over Z the diagonal is the chain of
positive invariant factors, each dividing the next; over a field it is a
run of ones of length rank(A).  Pivot selection is deterministic (least
absolute value over Z, first nonzero position over a field), so repeated
runs give the identical decomposition.

The op records are what the rest of the package consumes: kernel bases
are trailing columns of V, particular solutions come from U, and
membership tests reduce through Vinv.
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrices import SparseMatrix
from .rings import Ring


@dataclass(frozen=True)
class SNFResult:
    ring: Ring
    rows: int
    cols: int
    U: SparseMatrix
    Uinv: SparseMatrix
    V: SparseMatrix
    Vinv: SparseMatrix
    diag: tuple

    @property
    def rank(self) -> int:
        return len(self.diag)

    @property
    def D(self) -> SparseMatrix:
        return SparseMatrix.from_triples(
            self.ring, self.rows, self.cols,
            [(i, i, d) for i, d in enumerate(self.diag)])

    def kernel_basis(self) -> SparseMatrix:
        """Columns span ker(A); over Z they generate the full saturated
        kernel lattice, not a finite-index sublattice."""
        return self.V.col_select(range(self.rank, self.cols))

    def kernel_coords(self, v: SparseMatrix) -> SparseMatrix:
        """Coordinates of a kernel vector v in the kernel_basis columns."""
        assert v.rows == self.cols and v.cols == 1
        w = self.Vinv @ v
        for i in range(self.rank):
            assert self.ring.is_zero(w.get(i, 0)), "vector is not in the kernel"
        return w.row_select(range(self.rank, self.cols))

    def solve(self, b: SparseMatrix):
        """One x with A @ x == b, or None when b is outside the image."""
        assert b.rows == self.rows and b.cols == 1
        ring = self.ring
        y = self.U @ b
        z = {}
        for (i, _), v in y.entries.items():
            if i >= self.rank:
                return None
            d = self.diag[i]
            if not ring.divides(d, v):
                return None
            z[(i, 0)] = ring.exact_div(v, d)
        return self.V @ SparseMatrix(ring, self.cols, 1, z)

    def solve_matrix(self, B: SparseMatrix):
        """One X with A @ X == B, or None; columns solved independently."""
        assert B.rows == self.rows
        cols = []
        for j in range(B.cols):
            x = self.solve(SparseMatrix(self.ring, self.rows, 1,
                                        {(r, 0): v for r, v in B.column(j).items()}))
            if x is None:
                return None
            cols.append(x.column(0))
        return SparseMatrix.from_cols(self.ring, self.cols, cols)


def smith_normal_form(A: SparseMatrix) -> SNFResult:
    ring = A.ring
    m, n = A.rows, A.cols
    W = A.to_dense()
    U = SparseMatrix.identity(ring, m).to_dense()
    Uinv = SparseMatrix.identity(ring, m).to_dense()
    V = SparseMatrix.identity(ring, n).to_dense()
    Vinv = SparseMatrix.identity(ring, n).to_dense()
    zero = ring.zero()

    def row_swap(M, i, j):
        M[i], M[j] = M[j], M[i]

    def col_swap(M, i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]

    def row_addmul(M, i, j, c):
        M[i] = [ring.add(a, ring.mul(c, b)) for a, b in zip(M[i], M[j])]

    def col_addmul(M, j, i, c):
        for row in M:
            row[j] = ring.add(row[j], ring.mul(c, row[i]))

    def row_scale(M, i, u):
        M[i] = [ring.mul(u, a) for a in M[i]]

    def col_scale(M, j, u):
        for row in M:
            row[j] = ring.mul(u, row[j])

    def swap_rows(i, j):
        row_swap(W, i, j)
        row_swap(U, i, j)
        col_swap(Uinv, i, j)

    def swap_cols(i, j):
        col_swap(W, i, j)
        col_swap(V, i, j)
        row_swap(Vinv, i, j)

    def add_row(i, j, c):
        # row i += c * row j
        row_addmul(W, i, j, c)
        row_addmul(U, i, j, c)
        col_addmul(Uinv, j, i, ring.neg(c))

    def add_col(j, i, c):
        # col j += c * col i
        col_addmul(W, j, i, c)
        col_addmul(V, j, i, c)
        row_addmul(Vinv, i, j, ring.neg(c))

    def scale_row(i, u):
        row_scale(W, i, u)
        row_scale(U, i, u)
        col_scale(Uinv, i, ring.inv(u))

    def find_pivot(t):
        best = None
        for r in range(t, m):
            for c in range(t, n):
                v = W[r][c]
                if not ring.is_zero(v):
                    key = ring.pivot_key(v, r, c)
                    if best is None or key < best[0]:
                        best = (key, r, c)
        return best

    t = 0
    while t < min(m, n):
        best = find_pivot(t)
        if best is None:
            break
        _, pr, pc = best
        if pr != t:
            swap_rows(t, pr)
        if pc != t:
            swap_cols(t, pc)

        if ring.is_field:
            piv = W[t][t]
            if piv != ring.one():
                scale_row(t, ring.inv(piv))
            for r in range(t + 1, m):
                if not ring.is_zero(W[r][t]):
                    add_row(r, t, ring.neg(W[r][t]))
            for c in range(t + 1, n):
                if not ring.is_zero(W[t][c]):
                    add_col(c, t, ring.neg(W[t][c]))
            t += 1
            continue

        # Z: Euclidean sweeps shrink the pivot until its row and column
        # clear, then a divisibility pass widens the scope to the minor.
        while True:
            if W[t][t] < 0:
                scale_row(t, -1)
            piv = W[t][t]
            dirty = False
            for r in range(t + 1, m):
                v = W[r][t]
                if v != zero:
                    q = v // piv
                    if q:
                        add_row(r, t, -q)
                    if W[r][t] != zero:
                        dirty = True
            for c in range(t + 1, n):
                v = W[t][c]
                if v != zero:
                    q = v // piv
                    if q:
                        add_col(c, t, -q)
                    if W[t][c] != zero:
                        dirty = True
            if dirty:
                _, pr, pc = find_pivot(t)
                if pr != t:
                    swap_rows(t, pr)
                if pc != t:
                    swap_cols(t, pc)
                continue
            bad = None
            for r in range(t + 1, m):
                for c in range(t + 1, n):
                    if W[r][c] % piv != 0:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        t += 1

    diag = tuple(W[i][i] for i in range(t))
    for i in range(1, len(diag)):
        assert ring.divides(diag[i - 1], diag[i])
    return SNFResult(
        ring, m, n,
        SparseMatrix.from_dense(ring, U), SparseMatrix.from_dense(ring, Uinv),
        SparseMatrix.from_dense(ring, V), SparseMatrix.from_dense(ring, Vinv),
        diag)


def invariant_factors(A: SparseMatrix) -> tuple:
    return smith_normal_form(A).diag


def rank(A: SparseMatrix) -> int:
    return smith_normal_form(A).rank
