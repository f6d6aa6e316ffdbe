"""Chain complexes of finitely generated free modules and their maps.

A complex stores ranks and sparse differentials indexed by degree; the
relation d(n) . d(n+1) = 0 is asserted on construction, so every value
in circulation is a genuine complex.  Connective complexes live in
degrees >= 0 and their loop-type operations go through good truncation
(the degree-0 term becomes a free presentation of the cycle module),
which makes shift(shift(X, 1), -1) literally X.

Also here: homology in invariant-factor form, induced maps on homology
with an exact isomorphism test, mapping cones, tensor products, direct
sums, kernel subcomplexes, contracting homotopies of acyclic complexes,
and a deterministic Gaussian-elimination reduction that shrinks a
complex to quasi-isomorphic size (the workhorse that keeps replacement
towers small).
"""

from __future__ import annotations

from dataclasses import dataclass

from .matrices import SparseMatrix, block_matrix, hstack
from .rings import CONNECTIVE, UNBOUNDED, Backend
from .snf import SNFResult, smith_normal_form


class ChainComplex:
    def __init__(self, backend: Backend, ranks: dict, differentials: dict):
        self.backend = backend
        self.ranks = {n: r for n, r in ranks.items() if r > 0}
        if backend.connective:
            assert all(n >= 0 for n in self.ranks), "connective complex with negative degree"
        diffs = {}
        for n, d in differentials.items():
            assert isinstance(d, SparseMatrix) and d.ring == backend.ring
            assert d.shape == (self.rank(n - 1), self.rank(n)), \
                (n, d.shape, self.rank(n - 1), self.rank(n))
            if not d.is_zero_matrix:
                diffs[n] = d
        self.differentials = diffs
        for n in list(diffs):
            if n + 1 in diffs:
                assert (diffs[n] @ diffs[n + 1]).is_zero_matrix, f"d.d != 0 at degree {n + 1}"

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def diff(self, n: int) -> SparseMatrix:
        d = self.differentials.get(n)
        if d is None:
            return SparseMatrix.zero(self.backend.ring, self.rank(n - 1), self.rank(n))
        return d

    @property
    def support(self):
        if not self.ranks:
            return None
        return (min(self.ranks), max(self.ranks))

    @property
    def is_zero(self) -> bool:
        return not self.ranks

    def degrees(self):
        return sorted(self.ranks)

    def total_rank(self) -> int:
        return sum(self.ranks.values())

    def __eq__(self, other):
        return (isinstance(other, ChainComplex)
                and self.backend == other.backend
                and self.ranks == other.ranks
                and self.differentials == other.differentials)

    def __repr__(self):
        return f"ChainComplex({self.backend.token()}, ranks={dict(sorted(self.ranks.items()))})"


def zero_complex(backend: Backend) -> ChainComplex:
    return ChainComplex(backend, {}, {})


def sphere(backend: Backend, k: int, ring_rank: int = 1) -> ChainComplex:
    """Free rank-1 (by default) complex concentrated in degree k."""
    return ChainComplex(backend, {k: ring_rank}, {})


def moore(backend: Backend, m: int, k: int) -> ChainComplex:
    """Two-term complex [degree k+1] --m--> [degree k]."""
    d = SparseMatrix.from_triples(backend.ring, 1, 1, [(0, 0, backend.ring.canon(m))])
    return ChainComplex(backend, {k: 1, k + 1: 1}, {k + 1: d})


class ChainMap:
    def __init__(self, source: ChainComplex, target: ChainComplex, components: dict):
        assert source.backend == target.backend, "backend mismatch"
        self.source = source
        self.target = target
        comps = {}
        for n, m in components.items():
            assert isinstance(m, SparseMatrix) and m.ring == source.backend.ring
            assert m.shape == (target.rank(n), source.rank(n)), \
                (n, m.shape, target.rank(n), source.rank(n))
            if not m.is_zero_matrix:
                comps[n] = m
        self.components = comps
        degs = set(source.ranks) | set(target.ranks)
        for n in degs:
            lhs = target.diff(n) @ self.component(n)
            rhs = self.component(n - 1) @ source.diff(n)
            assert lhs == rhs, f"not a chain map at degree {n}"

    def component(self, n: int) -> SparseMatrix:
        m = self.components.get(n)
        if m is None:
            return SparseMatrix.zero(self.source.backend.ring,
                                     self.target.rank(n), self.source.rank(n))
        return m

    @property
    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other):
        return (isinstance(other, ChainMap)
                and self.source == other.source
                and self.target == other.target
                and self.components == other.components)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        # self . other, so other is applied first
        assert other.target == self.source
        degs = set(other.components) | set(self.components)
        comps = {n: self.component(n) @ other.component(n) for n in degs}
        return ChainMap(other.source, self.target, comps)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        assert self.source == other.source and self.target == other.target
        degs = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target,
                        {n: self.component(n) + other.component(n) for n in degs})

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {n: -m for n, m in self.components.items()})

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)


def identity_map(c: ChainComplex) -> ChainMap:
    I = {n: SparseMatrix.identity(c.backend.ring, r) for n, r in c.ranks.items()}
    return ChainMap(c, c, I)


def zero_map(source: ChainComplex, target: ChainComplex) -> ChainMap:
    return ChainMap(source, target, {})


def is_isomorphism(f: ChainMap) -> bool:
    """Degreewise invertibility over the ring."""
    for n in set(f.source.ranks) | set(f.target.ranks):
        if f.source.rank(n) != f.target.rank(n):
            return False
        res = smith_normal_form(f.component(n))
        if res.rank != f.source.rank(n):
            return False
        if not all(f.source.backend.ring.is_unit(d) for d in res.diag):
            return False
    return True


def inverse_map(f: ChainMap) -> ChainMap:
    """Inverse of a degreewise isomorphism: x = V D^{-1} U per degree."""
    ring = f.source.backend.ring
    comps = {}
    for n in set(f.source.ranks) | set(f.target.ranks):
        res = smith_normal_form(f.component(n))
        assert res.rank == f.source.rank(n) == f.target.rank(n)
        dinv = SparseMatrix.from_triples(
            ring, res.rank, res.rank,
            [(i, i, ring.inv(d)) for i, d in enumerate(res.diag)])
        comps[n] = res.V @ dinv @ res.U
    return ChainMap(f.target, f.source, comps)


# -- direct sums ---------------------------------------------------------


@dataclass(frozen=True)
class SumResult:
    complex: ChainComplex
    inclusions: tuple
    projections: tuple


def direct_sum(parts) -> SumResult:
    parts = list(parts)
    assert parts
    backend = parts[0].backend
    ring = backend.ring
    assert all(p.backend == backend for p in parts)
    degs = sorted(set().union(*[set(p.ranks) for p in parts])) if parts else []
    ranks = {n: sum(p.rank(n) for p in parts) for n in degs}
    diffs = {}
    for n in degs:
        if any(p.rank(n) and p.rank(n - 1) for p in parts):
            diffs[n] = block_matrix(ring, [
                [p.diff(n) if i == j else
                 SparseMatrix.zero(ring, q.rank(n - 1), p.rank(n))
                 for j, p in enumerate(parts)]
                for i, q in enumerate(parts)])
    total = ChainComplex(backend, ranks, diffs)
    incls, projs = [], []
    for i, p in enumerate(parts):
        ic, pc = {}, {}
        for n in p.ranks:
            off = sum(q.rank(n) for q in parts[:i])
            ic[n] = SparseMatrix.from_triples(
                ring, total.rank(n), p.rank(n),
                [(off + k, k, ring.one()) for k in range(p.rank(n))])
            pc[n] = ic[n].transpose()
        incls.append(ChainMap(p, total, ic))
        projs.append(ChainMap(total, p, pc))
    return SumResult(total, tuple(incls), tuple(projs))


def sum_map(maps, source_sum: SumResult, target_sum: SumResult) -> ChainMap:
    """Block-diagonal map between direct sums, one component per part."""
    maps = list(maps)
    acc = zero_map(source_sum.complex, target_sum.complex)
    for f, incl, proj in zip(maps, target_sum.inclusions, source_sum.projections):
        acc = acc + (incl @ f @ proj)
    return acc


# -- shift, truncation, cone --------------------------------------------


def good_truncation(c: ChainComplex):
    """tau_{>=0}: degree 0 becomes a free presentation of the 0-cycles.

    Returns (connective truncation, inclusion into c as a map in c's
    backend, SNF of d_0 for corestricting maps that land in cycles).
    When c has nothing in degree -1 the truncation copies degrees >= 0
    verbatim.
    """
    ring = c.backend.ring
    res = smith_normal_form(c.diff(0))
    K = res.kernel_basis()
    ranks = {n: r for n, r in c.ranks.items() if n >= 1}
    if K.cols:
        ranks[0] = K.cols
    diffs = {n: d for n, d in c.differentials.items() if n >= 2}
    d1 = c.diff(1)
    if not d1.is_zero_matrix:
        cols = [res.kernel_coords(SparseMatrix(ring, d1.rows, 1,
                                               {(r, 0): v for r, v in d1.column(j).items()})).column(0)
                for j in range(d1.cols)]
        diffs[1] = SparseMatrix.from_cols(ring, K.cols, cols)
    tc = ChainComplex(Backend(ring, CONNECTIVE), ranks, diffs)
    view = ChainComplex(c.backend, ranks, diffs)
    comps = {n: SparseMatrix.identity(ring, r) for n, r in ranks.items() if n >= 1}
    if K.cols:
        comps[0] = K
    return tc, ChainMap(view, c, comps), res


def shift(c: ChainComplex, k: int) -> ChainComplex:
    """Degree shift with the sign convention d[k] = (-1)^k d.

    Unbounded: pure reindexing.  Connective with k < 0: good truncation
    of the reindexed complex, so homology in positive degrees shifts
    exactly and degree 0 carries the cycle module.
    """
    if k == 0 or c.is_zero:
        return c
    sign = c.backend.ring.canon(-1 if k % 2 else 1)
    ranks = {n + k: r for n, r in c.ranks.items()}
    diffs = {n + k: (d if k % 2 == 0 else d.scale(sign))
             for n, d in c.differentials.items()}
    if not c.backend.connective or min(ranks) >= 0:
        return ChainComplex(c.backend, ranks, diffs)
    ambient = ChainComplex(Backend(c.backend.ring, UNBOUNDED), ranks, diffs)
    tc, _, _ = good_truncation(ambient)
    return tc


@dataclass(frozen=True)
class ConeResult:
    complex: ChainComplex
    inclusion: ChainMap       # target -> cone
    projection: ChainMap      # cone -> shift(source, 1)


def cone(f: ChainMap) -> ConeResult:
    """cone(f)_n = Y_n + X_{n-1} with differential [[d_Y, f], [0, -d_X]]."""
    X, Y = f.source, f.target
    backend = X.backend
    ring = backend.ring
    degs = set()
    for n in X.ranks:
        degs.add(n + 1)
    degs |= set(Y.ranks)
    ranks = {n: Y.rank(n) + X.rank(n - 1) for n in degs}
    diffs = {}
    for n in sorted(degs | {n + 1 for n in degs}):
        if ranks.get(n, 0) and ranks.get(n - 1, 0):
            diffs[n] = block_matrix(ring, [
                [Y.diff(n), f.component(n - 1)],
                [SparseMatrix.zero(ring, X.rank(n - 2), Y.rank(n)), -X.diff(n - 1)]])
    cc = ChainComplex(backend, ranks, diffs)
    incl = ChainMap(Y, cc, {
        n: SparseMatrix.from_triples(ring, cc.rank(n), Y.rank(n),
                                     [(i, i, ring.one()) for i in range(Y.rank(n))])
        for n in Y.ranks})
    sx = shift(X, 1)
    proj = ChainMap(cc, sx, {
        n: SparseMatrix.from_triples(ring, sx.rank(n), cc.rank(n),
                                     [(i, Y.rank(n) + i, ring.one())
                                      for i in range(X.rank(n - 1))])
        for n in sx.ranks})
    return ConeResult(cc, incl, proj)


# -- homology ------------------------------------------------------------


@dataclass(frozen=True)
class HomologyGroup:
    free_rank: int
    torsion: tuple

    def __post_init__(self):
        assert self.free_rank >= 0
        assert all(t > 1 for t in self.torsion)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


ZERO_GROUP = HomologyGroup(0, ())


def group_from_presentation(generators: int, pres_snf: SNFResult) -> HomologyGroup:
    """Z^generators modulo the column span of the presented matrix."""
    free = generators - pres_snf.rank
    torsion = tuple(d for d in pres_snf.diag
                    if not pres_snf.ring.is_unit(d))
    assert all(not pres_snf.ring.is_zero(d) for d in pres_snf.diag)
    return HomologyGroup(free, tuple(int(t) for t in torsion))


class HomologyData:
    """Everything needed to present H_n(c) and map into or out of it.

    kernel columns form a basis of the n-cycles; pres expresses the
    (n+1)-boundaries in that basis, so H_n = coker(pres).
    """

    def __init__(self, c: ChainComplex, n: int):
        ring = c.backend.ring
        self.complex = c
        self.degree = n
        self.cycle_snf = smith_normal_form(c.diff(n))
        self.kernel = self.cycle_snf.kernel_basis()
        d_next = c.diff(n + 1)
        self.pres = SparseMatrix.from_cols(
            ring, self.kernel.cols,
            [self.cycle_coords_vec(SparseMatrix(ring, d_next.rows, 1,
                                                {(r, 0): v for r, v in d_next.column(j).items()})).column(0)
             for j in range(d_next.cols)])
        self.pres_snf = smith_normal_form(self.pres)
        self.group = group_from_presentation(self.kernel.cols, self.pres_snf)

    def cycle_coords_vec(self, v: SparseMatrix) -> SparseMatrix:
        return self.cycle_snf.kernel_coords(v)

    def cycle_coords(self, m: SparseMatrix) -> SparseMatrix:
        cols = [self.cycle_coords_vec(
            SparseMatrix(m.ring, m.rows, 1,
                         {(r, 0): v for r, v in m.column(j).items()})).column(0)
            for j in range(m.cols)]
        return SparseMatrix.from_cols(m.ring, self.kernel.cols, cols)


def homology(c: ChainComplex, n: int) -> HomologyGroup:
    if c.rank(n) == 0:
        return ZERO_GROUP
    return HomologyData(c, n).group


def homology_table(c: ChainComplex) -> dict:
    return {n: homology(c, n) for n in c.degrees() if not homology(c, n).is_zero}


def is_acyclic(c: ChainComplex) -> bool:
    return all(homology(c, n).is_zero for n in c.degrees())


def induced_map(f: ChainMap, n: int,
                source_data: HomologyData = None,
                target_data: HomologyData = None):
    """Matrix of H_n(f) in the cycle bases, with the two presentations."""
    sd = source_data or HomologyData(f.source, n)
    td = target_data or HomologyData(f.target, n)
    T = td.cycle_coords(f.component(n) @ sd.kernel)
    return T, sd, td


def presented_iso(T: SparseMatrix, sd: HomologyData, td: HomologyData) -> bool:
    """Is T: coker(sd.pres) -> coker(td.pres) an isomorphism?

    Surjective iff [T | pres_D] covers all generators by units;
    injective iff every kernel-lattice generator of [T, -pres_D]
    projects into the column span of pres_C.
    """
    ring = T.ring
    stacked = hstack([T, td.pres]) if td.pres.cols else T
    s = smith_normal_form(stacked)
    if s.rank != td.kernel.cols or not all(ring.is_unit(d) for d in s.diag):
        return False
    rel = hstack([T, -td.pres]) if td.pres.cols else T
    N = smith_normal_form(rel).kernel_basis()
    xpart = N.row_select(range(T.cols))
    for j in range(xpart.cols):
        v = SparseMatrix(ring, T.cols, 1,
                         {(r, 0): w for r, w in xpart.column(j).items()})
        if sd.pres_snf.solve(v) is None:
            return False
    return True


def is_iso_on_homology(f: ChainMap, n: int) -> bool:
    if f.source.rank(n) == 0 and f.target.rank(n) == 0:
        return True
    return presented_iso(*induced_map(f, n))


def is_quasi_iso(f: ChainMap) -> bool:
    """True iff cone(f) is acyclic in every degree of its support."""
    return is_acyclic(cone(f).complex)


# -- tensor product ------------------------------------------------------


def _kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    ring = a.ring
    entries = {}
    for (ra, ca), va in a.entries.items():
        for (rb, cb), vb in b.entries.items():
            entries[(ra * b.rows + rb, ca * b.cols + cb)] = ring.mul(va, vb)
    return SparseMatrix(ring, a.rows * b.rows, a.cols * b.cols, entries)


def tensor(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Graded tensor product with the Koszul sign on the second factor.

    Degree-n basis is grouped by blocks (p, q), p + q = n, sorted by p;
    within a block indices pair lexicographically.
    """
    assert c.backend == d.backend, "backend mismatch"
    ring = c.backend.ring
    if c.is_zero or d.is_zero:
        return zero_complex(c.backend)

    def blocks(n):
        return [(p, n - p) for p in sorted(c.ranks) if d.rank(n - p) > 0]

    degs = sorted({p + q for p in c.ranks for q in d.ranks})
    ranks = {n: sum(c.rank(p) * d.rank(q) for p, q in blocks(n)) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0) == 0:
            continue
        src, tgt = blocks(n), blocks(n - 1)
        tpos = {pq: i for i, pq in enumerate(tgt)}
        grid = [[None] * len(src) for _ in tgt]
        for j, (p, q) in enumerate(src):
            left = _kron(c.diff(p), SparseMatrix.identity(ring, d.rank(q)))
            if (p - 1, q) in tpos and not left.is_zero_matrix:
                grid[tpos[(p - 1, q)]][j] = left
            sign = ring.canon(-1 if p % 2 else 1)
            right = _kron(SparseMatrix.identity(ring, c.rank(p)), d.diff(q)).scale(sign)
            if (p, q - 1) in tpos and not right.is_zero_matrix:
                grid[tpos[(p, q - 1)]][j] = right
        # fill missing blocks with explicit zeros so shapes are fixed
        for i, (tp, tq) in enumerate(tgt):
            for j, (sp, sq) in enumerate(src):
                if grid[i][j] is None:
                    grid[i][j] = SparseMatrix.zero(ring, c.rank(tp) * d.rank(tq),
                                                   c.rank(sp) * d.rank(sq))
        diffs[n] = block_matrix(ring, grid)
    return ChainComplex(c.backend, ranks, diffs)


def tensor_map(f: ChainMap, g: ChainMap) -> ChainMap:
    """f tensor g between the tensor complexes, block layout as in tensor.

    Both maps have degree 0, so no Koszul signs appear on components.
    """
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    ring = src.backend.ring

    def blocks(c, d, n):
        return [(p, n - p) for p in sorted(c.ranks) if d.rank(n - p) > 0]

    comps = {}
    for n in src.ranks:
        if not tgt.rank(n):
            continue
        sblk = blocks(f.source, g.source, n)
        tblk = blocks(f.target, g.target, n)
        tpos = {pq: i for i, pq in enumerate(tblk)}
        grid = [[SparseMatrix.zero(ring, f.target.rank(tp) * g.target.rank(tq),
                                   f.source.rank(sp) * g.source.rank(sq))
                 for (sp, sq) in sblk] for (tp, tq) in tblk]
        for j, (p, q) in enumerate(sblk):
            if (p, q) in tpos:
                grid[tpos[(p, q)]][j] = _kron(f.component(p), g.component(q))
        comps[n] = block_matrix(ring, grid)
    return ChainMap(src, tgt, comps)


# -- kernel subcomplex ---------------------------------------------------


class KernelComplex:
    """The degreewise kernel of h as a subcomplex of its source.

    Over Z the kernel bases are saturated (trailing SNF columns), so the
    induced differentials are exact and corestriction stays integral.
    """

    def __init__(self, h: ChainMap):
        X = h.source
        ring = X.backend.ring
        self.ambient = X
        self.snfs = {n: smith_normal_form(h.component(n)) for n in X.ranks}
        bases = {n: self.snfs[n].kernel_basis() for n in X.ranks}
        self._dims = {n: b.cols for n, b in bases.items()}
        ranks = {n: c for n, c in self._dims.items() if c}
        diffs = {}
        for n in ranks:
            if ranks.get(n - 1, 0):
                img = X.diff(n) @ bases[n]
                diffs[n] = self._coords(n - 1, img)
        self.complex = ChainComplex(X.backend, ranks, diffs)
        self.inclusion = ChainMap(self.complex, X, {n: bases[n] for n in ranks})

    def _coords(self, n: int, m: SparseMatrix) -> SparseMatrix:
        ring = m.ring
        res = self.snfs[n]
        cols = [res.kernel_coords(
            SparseMatrix(ring, m.rows, 1,
                         {(r, 0): v for r, v in m.column(j).items()})).column(0)
            for j in range(m.cols)]
        return SparseMatrix.from_cols(ring, self._dims[n], cols)

    def corestrict(self, f: ChainMap) -> ChainMap:
        """Factor f: S -> ambient through the kernel; f must land in it."""
        assert f.target == self.ambient
        comps = {n: self._coords(n, f.component(n))
                 for n in f.components if self._dims.get(n)}
        return ChainMap(f.source, self.complex, comps)


def kernel_complex(h: ChainMap):
    k = KernelComplex(h)
    return k.complex, k.inclusion


# -- contracting homotopy ------------------------------------------------


def contracting_homotopy(c: ChainComplex) -> dict:
    """s with d s + s d = id for an acyclic complex; {} when c is zero.

    Splits each degree into cycles plus a complement via the SNF column
    record; s sends a cycle to its unique preimage in the complement one
    degree up and kills the complement.
    """
    ring = c.backend.ring
    snfs = {n: smith_normal_form(c.diff(n)) for n in c.ranks}
    s = {}
    for n in c.ranks:
        res = snfs[n]
        K = res.kernel_basis()
        if K.cols == 0:
            continue
        up = snfs.get(n + 1)
        assert up is not None, f"H_{n} nonzero: no candidates above degree {n}"
        compl = up.V.col_select(range(up.rank))
        M = c.diff(n + 1) @ compl
        U = smith_normal_form(M).solve_matrix(K)
        assert U is not None, f"complex is not acyclic at degree {n}"
        # project onto kernel coordinates, lift back through the complement
        kcoords = res.Vinv.row_select(range(res.rank, c.rank(n)))
        sn = compl @ U @ kcoords
        if not sn.is_zero_matrix:
            s[n] = sn
    # verify the homotopy identity degreewise
    for n in c.ranks:
        I = SparseMatrix.identity(ring, c.rank(n))
        sn = s.get(n, SparseMatrix.zero(ring, c.rank(n + 1), c.rank(n)))
        sm = s.get(n - 1, SparseMatrix.zero(ring, c.rank(n), c.rank(n - 1)))
        assert c.diff(n + 1) @ sn + sm @ c.diff(n) == I, f"homotopy fails at {n}"
    return s


# -- Gaussian-elimination reduction -------------------------------------


@dataclass(frozen=True)
class Reduction:
    complex: ChainComplex     # the reduced model
    inclusion: ChainMap       # reduced -> original, quasi-iso
    projection: ChainMap      # original -> reduced, quasi-iso, proj . incl = id
    homotopy: dict            # degree n -> matrix orig_n -> orig_{n+1}

    def homotopy_at(self, n: int) -> SparseMatrix:
        """Witness h for id - incl.proj = d h + h d on the original complex."""
        m = self.homotopy.get(n)
        if m is None:
            ring = self.inclusion.target.backend.ring
            c = self.inclusion.target
            return SparseMatrix.zero(ring, c.rank(n + 1), c.rank(n))
        return m


def _first_unit(c: ChainComplex):
    ring = c.backend.ring
    for n in c.degrees():
        d = c.differentials.get(n)
        if d is None:
            continue
        for (i, j, v) in d.triples():
            if ring.is_unit(v):
                return n, i, j, v
    return None


def reduce_complex(c: ChainComplex) -> Reduction:
    """Cancel unit pivots in the differentials until none remain.

    The result is quasi-isomorphic with inclusion/projection witnesses
    and proj . incl = id.  Over a field it reaches zero differentials
    (minimal model); over Z the surviving differentials have no unit
    entries, so ranks match homology-presentation size.
    """
    ring = c.backend.ring
    cur = c
    incl = identity_map(c)
    proj = identity_map(c)
    homot = {}
    while True:
        hit = _first_unit(cur)
        if hit is None:
            break
        n, i, j, u = hit
        uinv = ring.inv(u)
        # step homotopy u^-1 E_{j,i} : cur_{n-1} -> cur_n, conjugated back
        # to the original basis before incl/proj absorb this step
        step_h = SparseMatrix(ring, cur.rank(n), cur.rank(n - 1), {(j, i): uinv})
        contrib = incl.component(n) @ step_h @ proj.component(n - 1)
        if not contrib.is_zero_matrix:
            prev = homot.get(n - 1)
            homot[n - 1] = contrib if prev is None else prev + contrib
        d = cur.diff(n)
        rows_keep = [r for r in range(d.rows) if r != i]
        cols_keep = [cc for cc in range(d.cols) if cc != j]
        col_j = d.col_select([j]).row_select(rows_keep)      # c
        row_i = d.row_select([i]).col_select(cols_keep)      # rho
        new_dn = d.row_select(rows_keep).col_select(cols_keep) \
            - col_j.scale(uinv) @ row_i
        ranks = dict(cur.ranks)
        ranks[n] -= 1
        ranks[n - 1] -= 1
        diffs = dict(cur.differentials)
        for key in (n, n + 1, n - 1):
            diffs.pop(key, None)
        if not new_dn.is_zero_matrix:
            diffs[n] = new_dn
        up = cur.diff(n + 1).row_select(cols_keep)
        if not up.is_zero_matrix:
            diffs[n + 1] = up
        down = cur.diff(n - 1).col_select(rows_keep)
        if not down.is_zero_matrix:
            diffs[n - 1] = down
        nxt = ChainComplex(cur.backend, ranks, diffs)
        # step inclusion: embed kept basis, correct the cancelled column
        step_i = {}
        for m in nxt.ranks:
            if m == n:
                ent = {(cols_keep[a], a): ring.one() for a in range(len(cols_keep))}
                for (_, a), v in row_i.entries.items():
                    ent[(j, a)] = ring.neg(ring.mul(uinv, v))
                step_i[m] = SparseMatrix(ring, cur.rank(n), nxt.rank(n), ent)
            elif m == n - 1:
                step_i[m] = SparseMatrix(
                    ring, cur.rank(m), nxt.rank(m),
                    {(rows_keep[a], a): ring.one() for a in range(len(rows_keep))})
            else:
                step_i[m] = SparseMatrix.identity(ring, nxt.rank(m))
        step_p = {}
        for m in nxt.ranks:
            if m == n:
                step_p[m] = SparseMatrix(
                    ring, nxt.rank(n), cur.rank(n),
                    {(a, cols_keep[a]): ring.one() for a in range(len(cols_keep))})
            elif m == n - 1:
                ent = {(a, rows_keep[a]): ring.one() for a in range(len(rows_keep))}
                for (r, _), v in col_j.entries.items():
                    ent[(r, i)] = ring.neg(ring.mul(uinv, v))
                step_p[m] = SparseMatrix(ring, nxt.rank(n - 1), cur.rank(n - 1), ent)
            else:
                step_p[m] = SparseMatrix.identity(ring, nxt.rank(m))
        si = ChainMap(nxt, cur, step_i)
        sp = ChainMap(cur, nxt, step_p)
        incl = incl @ si
        proj = sp @ proj
        cur = nxt
    red = Reduction(cur, incl, proj, homot)
    assert (proj @ incl) == identity_map(cur)
    for m in c.ranks:
        lhs = SparseMatrix.identity(ring, c.rank(m)) - incl.component(m) @ proj.component(m)
        rhs = c.diff(m + 1) @ red.homotopy_at(m) + red.homotopy_at(m - 1) @ c.diff(m)
        assert lhs == rhs, f"reduction homotopy fails at degree {m}"
    return red
