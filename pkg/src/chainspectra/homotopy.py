"""Homotopy pushouts and pullbacks with their canonical squares.

The pushout is the double mapping cylinder Y + Z + X[1], the pullback
the double mapping path space Y + Z + W[-1]; in the connective backend
the pullback-type constructions pass through good truncation so the
results stay in degrees >= 0 with exact degree-0 homology.

Canonical on-the-nose commuting squares are produced through a mapping
cylinder (pushout side) or a mapping path space (pullback side), since
the naive corner inclusions only commute up to homotopy.  Also here:
single path spaces, honest loop objects as kernels of double path
spaces, and the square classifier.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (ChainComplex, ChainMap, KernelComplex, direct_sum,
                        good_truncation, is_quasi_iso)
from .matrices import SparseMatrix, block_matrix, vstack
from .rings import UNBOUNDED, Backend


class Tau:
    """Transport layer for good truncation.

    Wraps an ambient complex (built by a pullback-type formula, possibly
    with a degree -1 part) and rewrites degreewise components of maps in
    and out of it through the degree-0 cycle presentation.  For the
    unbounded backend it is the identity wrapper.
    """

    def __init__(self, ambient: ChainComplex, target_backend: Backend):
        self.ambient = ambient
        if not target_backend.connective:
            assert ambient.backend == target_backend
            self.complex = ambient
            self.K0 = None
            self.snf0 = None
            return
        tc, incl, snf = good_truncation(ambient)
        self.complex = tc
        self.K0 = incl.component(0)
        self.snf0 = snf

    def _coords0(self, m: SparseMatrix) -> SparseMatrix:
        ring = m.ring
        cols = [self.snf0.kernel_coords(
            SparseMatrix(ring, m.rows, 1,
                         {(r, 0): v for r, v in m.column(j).items()})).column(0)
            for j in range(m.cols)]
        return SparseMatrix.from_cols(ring, self.complex.rank(0), cols)

    def map_out(self, target: ChainComplex, raw: dict) -> ChainMap:
        if self.K0 is None:
            return ChainMap(self.complex, target, raw)
        comps = {n: m for n, m in raw.items() if n >= 1}
        if 0 in raw and self.K0.cols:
            comps[0] = raw[0] @ self.K0
        return ChainMap(self.complex, target, comps)

    def map_in(self, source: ChainComplex, raw: dict) -> ChainMap:
        if self.K0 is None:
            return ChainMap(source, self.complex, raw)
        comps = {n: m for n, m in raw.items() if n >= 1}
        if 0 in raw:
            comps[0] = self._coords0(raw[0])
        return ChainMap(source, self.complex, comps)

    def map_between(self, other: "Tau", raw: dict) -> ChainMap:
        if other.K0 is None:
            return self.map_out(other.complex, raw)
        comps = {n: m for n, m in raw.items() if n >= 1}
        if 0 in raw:
            m0 = raw[0] @ self.K0 if self.K0 is not None else raw[0]
            comps[0] = other._coords0(m0)
        return ChainMap(self.complex, other.complex, comps)


def _ambient_backend(backend: Backend) -> Backend:
    return backend if not backend.connective else Backend(backend.ring, UNBOUNDED)


# -- homotopy pushout ----------------------------------------------------


@dataclass(frozen=True)
class PushoutResult:
    complex: ChainComplex
    incl_left: ChainMap      # Y -> P
    incl_right: ChainMap     # Z -> P
    f: ChainMap              # X -> Y, kept for the comparison map
    g: ChainMap              # X -> Z

    def compare(self, u: ChainMap, v: ChainMap) -> ChainMap:
        """The map P -> T for a cocone (u: Y -> T, v: Z -> T) commuting
        on the nose with f and g."""
        assert u @ self.f == v @ self.g, "cocone does not commute"
        T = u.target
        ring = T.backend.ring
        comps = {}
        for n in self.complex.ranks:
            comps[n] = block_matrix(ring, [[
                u.component(n), v.component(n),
                SparseMatrix.zero(ring, T.rank(n), self.f.source.rank(n - 1))]])
        return ChainMap(self.complex, T, comps)


def homotopy_pushout(f: ChainMap, g: ChainMap) -> PushoutResult:
    """Double mapping cylinder of X -f-> Y, X -g-> Z.

    P_n = Y_n + Z_n + X_{n-1}, d(y, z, x) = (dy + fx, dz - gx, -dx).
    """
    assert f.source == g.source, "pushout needs a common source"
    X, Y, Zc = f.source, f.target, g.target
    backend = X.backend
    ring = backend.ring
    degs = set(Y.ranks) | set(Zc.ranks) | {n + 1 for n in X.ranks}
    ranks = {n: Y.rank(n) + Zc.rank(n) + X.rank(n - 1) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0):
            z = SparseMatrix.zero
            diffs[n] = block_matrix(ring, [
                [Y.diff(n), z(ring, Y.rank(n - 1), Zc.rank(n)), f.component(n - 1)],
                [z(ring, Zc.rank(n - 1), Y.rank(n)), Zc.diff(n), -g.component(n - 1)],
                [z(ring, X.rank(n - 2), Y.rank(n)), z(ring, X.rank(n - 2), Zc.rank(n)),
                 -X.diff(n - 1)]])
    P = ChainComplex(backend, ranks, diffs)
    il = {n: SparseMatrix.from_triples(
        ring, P.rank(n), Y.rank(n), [(i, i, ring.one()) for i in range(Y.rank(n))])
        for n in Y.ranks}
    ir = {n: SparseMatrix.from_triples(
        ring, P.rank(n), Zc.rank(n),
        [(Y.rank(n) + i, i, ring.one()) for i in range(Zc.rank(n))])
        for n in Zc.ranks}
    return PushoutResult(P, ChainMap(Y, P, il), ChainMap(Zc, P, ir), f, g)


# -- homotopy pullback ---------------------------------------------------


@dataclass(frozen=True)
class PullbackResult:
    complex: ChainComplex
    proj_left: ChainMap      # Q -> Y
    proj_right: ChainMap     # Q -> Z
    f: ChainMap              # Y -> W
    g: ChainMap              # Z -> W
    tau: Tau

    def compare(self, t: ChainMap, s: ChainMap) -> ChainMap:
        """The map V -> Q for a cone (t: V -> Y, s: V -> Z) commuting
        on the nose with f and g."""
        assert self.f @ t == self.g @ s, "cone does not commute"
        V = t.source
        ring = V.backend.ring
        raw = {}
        for n in self.tau.ambient.ranks:
            raw[n] = vstack([
                t.component(n), s.component(n),
                SparseMatrix.zero(ring, self.f.target.rank(n + 1), V.rank(n))])
        return self.tau.map_in(V, raw)


def homotopy_pullback(f: ChainMap, g: ChainMap) -> PullbackResult:
    """Double mapping path space of Y -f-> W <-g- Z.

    Q_n = Y_n + Z_n + W_{n+1}, d(y, z, u) = (dy, dz, gz - fy - du);
    good-truncated at 0 in the connective backend.
    """
    assert f.target == g.target, "pullback needs a common target"
    Y, Zc, W = f.source, g.source, f.target
    backend = Y.backend
    ring = backend.ring
    degs = set(Y.ranks) | set(Zc.ranks) | {n - 1 for n in W.ranks}
    ranks = {n: Y.rank(n) + Zc.rank(n) + W.rank(n + 1) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0):
            z = SparseMatrix.zero
            diffs[n] = block_matrix(ring, [
                [Y.diff(n), z(ring, Y.rank(n - 1), Zc.rank(n)),
                 z(ring, Y.rank(n - 1), W.rank(n + 1))],
                [z(ring, Zc.rank(n - 1), Y.rank(n)), Zc.diff(n),
                 z(ring, Zc.rank(n - 1), W.rank(n + 1))],
                [-f.component(n), g.component(n), -W.diff(n + 1)]])
    ambient = ChainComplex(_ambient_backend(backend), ranks, diffs)
    tau = Tau(ambient, backend)
    pl = {n: block_matrix(ring, [[
        SparseMatrix.identity(ring, Y.rank(n)),
        SparseMatrix.zero(ring, Y.rank(n), Zc.rank(n)),
        SparseMatrix.zero(ring, Y.rank(n), W.rank(n + 1))]])
        for n in ambient.ranks if Y.rank(n)}
    pr = {n: block_matrix(ring, [[
        SparseMatrix.zero(ring, Zc.rank(n), Y.rank(n)),
        SparseMatrix.identity(ring, Zc.rank(n)),
        SparseMatrix.zero(ring, Zc.rank(n), W.rank(n + 1))]])
        for n in ambient.ranks if Zc.rank(n)}
    return PullbackResult(tau.complex, tau.map_out(Y, pl), tau.map_out(Zc, pr),
                          f, g, tau)


# -- cylinders and path spaces ------------------------------------------


@dataclass(frozen=True)
class CylinderResult:
    complex: ChainComplex
    incl_source: ChainMap    # X -> Cyl, a cofibration
    incl_target: ChainMap    # Z -> Cyl, a quasi-iso
    retraction: ChainMap     # Cyl -> Z, retraction . incl_source = g


def mapping_cylinder(g: ChainMap) -> CylinderResult:
    """Cyl(g)_n = Z_n + X_n + X_{n-1}, d(z, x, w) = (dz - gw, dx + w, -dw)."""
    X, Zc = g.source, g.target
    backend = X.backend
    ring = backend.ring
    degs = set(Zc.ranks) | set(X.ranks) | {n + 1 for n in X.ranks}
    ranks = {n: Zc.rank(n) + X.rank(n) + X.rank(n - 1) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0):
            z = SparseMatrix.zero
            diffs[n] = block_matrix(ring, [
                [Zc.diff(n), z(ring, Zc.rank(n - 1), X.rank(n)), -g.component(n - 1)],
                [z(ring, X.rank(n - 1), Zc.rank(n)), X.diff(n),
                 SparseMatrix.identity(ring, X.rank(n - 1))],
                [z(ring, X.rank(n - 2), Zc.rank(n)), z(ring, X.rank(n - 2), X.rank(n)),
                 -X.diff(n - 1)]])
    cyl = ChainComplex(backend, ranks, diffs)
    isrc = {n: SparseMatrix.from_triples(
        ring, cyl.rank(n), X.rank(n),
        [(Zc.rank(n) + i, i, ring.one()) for i in range(X.rank(n))])
        for n in X.ranks}
    itgt = {n: SparseMatrix.from_triples(
        ring, cyl.rank(n), Zc.rank(n),
        [(i, i, ring.one()) for i in range(Zc.rank(n))])
        for n in Zc.ranks}
    retr = {n: block_matrix(ring, [[
        SparseMatrix.identity(ring, Zc.rank(n)), g.component(n),
        SparseMatrix.zero(ring, Zc.rank(n), X.rank(n - 1))]])
        for n in cyl.ranks if Zc.rank(n)}
    return CylinderResult(cyl, ChainMap(X, cyl, isrc), ChainMap(Zc, cyl, itgt),
                          ChainMap(cyl, Zc, retr))


@dataclass(frozen=True)
class PathSpaceResult:
    complex: ChainComplex
    section: ChainMap        # Z -> P(g), a quasi-iso
    evaluation: ChainMap     # P(g) -> W, a fibration
    proj_source: ChainMap    # P(g) -> Z, retraction of the section
    tau: Tau


def mapping_path_space(g: ChainMap) -> PathSpaceResult:
    """P(g)_n = Z_n + W_n + W_{n+1}, d(z, w, t) = (dz, dw, gz - w - dt)."""
    Zc, W = g.source, g.target
    backend = Zc.backend
    ring = backend.ring
    degs = set(Zc.ranks) | set(W.ranks) | {n - 1 for n in W.ranks}
    ranks = {n: Zc.rank(n) + W.rank(n) + W.rank(n + 1) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0):
            z = SparseMatrix.zero
            diffs[n] = block_matrix(ring, [
                [Zc.diff(n), z(ring, Zc.rank(n - 1), W.rank(n)),
                 z(ring, Zc.rank(n - 1), W.rank(n + 1))],
                [z(ring, W.rank(n - 1), Zc.rank(n)), W.diff(n),
                 z(ring, W.rank(n - 1), W.rank(n + 1))],
                [g.component(n), -SparseMatrix.identity(ring, W.rank(n)),
                 -W.diff(n + 1)]])
    ambient = ChainComplex(_ambient_backend(backend), ranks, diffs)
    tau = Tau(ambient, backend)
    sec_raw = {n: vstack([SparseMatrix.identity(ring, Zc.rank(n)),
                          g.component(n),
                          SparseMatrix.zero(ring, W.rank(n + 1), Zc.rank(n))])
               for n in Zc.ranks}
    ev_raw = {n: block_matrix(ring, [[
        SparseMatrix.zero(ring, W.rank(n), Zc.rank(n)),
        SparseMatrix.identity(ring, W.rank(n)),
        SparseMatrix.zero(ring, W.rank(n), W.rank(n + 1))]])
        for n in ambient.ranks if W.rank(n)}
    pz_raw = {n: block_matrix(ring, [[
        SparseMatrix.identity(ring, Zc.rank(n)),
        SparseMatrix.zero(ring, Zc.rank(n), W.rank(n)),
        SparseMatrix.zero(ring, Zc.rank(n), W.rank(n + 1))]])
        for n in ambient.ranks if Zc.rank(n)}
    return PathSpaceResult(tau.complex, tau.map_in(Zc, sec_raw),
                           tau.map_out(W, ev_raw), tau.map_out(Zc, pz_raw), tau)


# -- squares -------------------------------------------------------------


@dataclass(frozen=True)
class SquareOfComplexes:
    """X -top-> Y, X -left-> Z, Y -right-> W, Z -bottom-> W, commuting
    on the nose."""
    X: ChainComplex
    Y: ChainComplex
    Z: ChainComplex
    W: ChainComplex
    top: ChainMap
    left: ChainMap
    right: ChainMap
    bottom: ChainMap

    def __post_init__(self):
        assert self.top.source == self.X and self.top.target == self.Y
        assert self.left.source == self.X and self.left.target == self.Z
        assert self.right.source == self.Y and self.right.target == self.W
        assert self.bottom.source == self.Z and self.bottom.target == self.W
        assert self.right @ self.top == self.bottom @ self.left, "square must commute"


def classify_square(s: SquareOfComplexes):
    """(is_homotopy_cartesian, is_homotopy_cocartesian)."""
    po = homotopy_pushout(s.top, s.left)
    cocart = is_quasi_iso(po.compare(s.right, s.bottom))
    pb = homotopy_pullback(s.right, s.bottom)
    cart = is_quasi_iso(pb.compare(s.top, s.left))
    return cart, cocart


def pushout_square(f: ChainMap, g: ChainMap):
    """Canonical coCartesian square for X -f-> Y, X -g-> Z: replace Z by
    the cylinder of g so the square commutes on the nose.

    Returns (square, PushoutResult)."""
    po = homotopy_pushout(f, g)
    cyl = mapping_cylinder(g)
    X, Y = f.source, f.target
    ring = X.backend.ring
    P = po.complex
    comps = {}
    for n in cyl.complex.ranks:
        z = SparseMatrix.zero
        comps[n] = block_matrix(ring, [
            [z(ring, Y.rank(n), g.target.rank(n)), f.component(n),
             z(ring, Y.rank(n), X.rank(n - 1))],
            [SparseMatrix.identity(ring, g.target.rank(n)),
             z(ring, g.target.rank(n), X.rank(n)),
             z(ring, g.target.rank(n), X.rank(n - 1))],
            [z(ring, X.rank(n - 1), g.target.rank(n)),
             z(ring, X.rank(n - 1), X.rank(n)),
             SparseMatrix.identity(ring, X.rank(n - 1))]])
    to_po = ChainMap(cyl.complex, P, comps)
    sq = SquareOfComplexes(X, Y, cyl.complex, P,
                           f, cyl.incl_source, po.incl_left, to_po)
    return sq, po


def pullback_square(f: ChainMap, g: ChainMap):
    """Canonical Cartesian square for Y -f-> W <-g- Z: replace Z by the
    path space of g so the square commutes on the nose.

    Returns (square, PullbackResult)."""
    pb = homotopy_pullback(f, g)
    pg = mapping_path_space(g)
    Y, Zc, W = f.source, g.source, f.target
    ring = Y.backend.ring
    raw = {}
    for n in pb.tau.ambient.ranks:
        z = SparseMatrix.zero
        raw[n] = block_matrix(ring, [
            [z(ring, Zc.rank(n), Y.rank(n)),
             SparseMatrix.identity(ring, Zc.rank(n)),
             z(ring, Zc.rank(n), W.rank(n + 1))],
            [f.component(n), z(ring, W.rank(n), Zc.rank(n)),
             z(ring, W.rank(n), W.rank(n + 1))],
            [z(ring, W.rank(n + 1), Y.rank(n)),
             z(ring, W.rank(n + 1), Zc.rank(n)),
             SparseMatrix.identity(ring, W.rank(n + 1))]])
    to_pg = pb.tau.map_between(pg.tau, raw)
    sq = SquareOfComplexes(pb.complex, Y, pg.complex, W,
                           pb.proj_left, to_pg, f, pg.evaluation)
    return sq, pb


# -- path spaces and loops of a single complex ---------------------------


@dataclass(frozen=True)
class PathObject:
    complex: ChainComplex
    evaluation: ChainMap     # PA -> A, surjective with acyclic source
    tau: Tau

    def into(self, c0: ChainMap, homotopy: dict) -> ChainMap:
        """Map S -> PA from a null-homotopy of c0: S -> A.

        homotopy[n]: S_n -> A_{n+1} must satisfy d h + h d = c0; the
        chain-map validation of the result enforces it.
        """
        A = self.evaluation.target
        S = c0.source
        ring = S.backend.ring
        raw = {}
        for n in self.tau.ambient.ranks:
            top = c0.component(n)
            bot = homotopy.get(n, SparseMatrix.zero(ring, A.rank(n + 1), S.rank(n)))
            raw[n] = vstack([top, bot])
        m = self.tau.map_in(S, raw)
        assert self.evaluation @ m == c0
        return m


def path_space(A: ChainComplex) -> PathObject:
    """PA_n = A_n + A_{n+1}, d(a, u) = (da, a - du); acyclic, fibers A."""
    backend = A.backend
    ring = backend.ring
    degs = set(A.ranks) | {n - 1 for n in A.ranks}
    ranks = {n: A.rank(n) + A.rank(n + 1) for n in degs}
    diffs = {}
    for n in degs:
        if ranks.get(n - 1, 0):
            z = SparseMatrix.zero
            diffs[n] = block_matrix(ring, [
                [A.diff(n), z(ring, A.rank(n - 1), A.rank(n + 1))],
                [SparseMatrix.identity(ring, A.rank(n)), -A.diff(n + 1)]])
    ambient = ChainComplex(_ambient_backend(backend), ranks, diffs)
    tau = Tau(ambient, backend)
    ev_raw = {n: block_matrix(ring, [[
        SparseMatrix.identity(ring, A.rank(n)),
        SparseMatrix.zero(ring, A.rank(n), A.rank(n + 1))]])
        for n in ambient.ranks if A.rank(n)}
    return PathObject(tau.complex, tau.map_out(A, ev_raw), tau)


@dataclass(frozen=True)
class LoopObject:
    complex: ChainComplex    # the honest pullback PA x_A PA
    path: PathObject
    kernel: KernelComplex
    proj0: ChainMap          # L -> PA
    proj1: ChainMap
    evaluation: ChainMap     # L -> A, the common ev composite
    pair_sum: object         # direct sum PA + PA the kernel lives in

    def into(self, c0: ChainMap, h0: dict, h1: dict) -> ChainMap:
        """Map S -> L from two null-homotopies of the same c0: S -> A."""
        m0 = self.path.into(c0, h0)
        m1 = self.path.into(c0, h1)
        s = self.pair_sum
        comb = (s.inclusions[0] @ m0) + (s.inclusions[1] @ m1)
        return self.kernel.corestrict(comb)


def loop_object(A: ChainComplex) -> LoopObject:
    """L(A) = PA x_A PA as a degreewise kernel; quasi-isomorphic to the
    loops on A (homology shifts down by one)."""
    pa = path_space(A)
    s = direct_sum([pa.complex, pa.complex])
    h = (pa.evaluation @ s.projections[0]) - (pa.evaluation @ s.projections[1])
    ker = KernelComplex(h)
    p0 = s.projections[0] @ ker.inclusion
    p1 = s.projections[1] @ ker.inclusion
    return LoopObject(ker.complex, pa, ker, p0, p1, pa.evaluation @ p0, s)
