"""Projective model structure on chain complexes.

Cofibrations are degreewise split injections with free cokernel,
fibrations are degreewise surjections (in positive degrees for the
connective backend), weak equivalences are quasi-isomorphisms.  Both
class deciders run on Smith normal forms, so they are exact over Z as
well as over the field backends.

Factorizations are explicit: the mapping cylinder realizes
(cofibration, trivial fibration) and the mapping path space realizes
(trivial cofibration, fibration).  Lifts against a trivial fibration
are produced by solving one sparse linear system for all degrees of
the filler at once.

Hom complexes land in the unbounded backend; their degree-0 homology
is the group of chain-homotopy classes of maps.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import ChainComplex, ChainMap, is_quasi_iso
from .homotopy import mapping_cylinder, mapping_path_space
from .matrices import SparseMatrix
from .rings import UNBOUNDED, Backend
from .snf import smith_normal_form

MODE_COF_TRIVFIB = "cof,triv-fib"
MODE_TRIVCOF_FIB = "triv-cof,fib"


def _split_injective(m: SparseMatrix) -> bool:
    res = smith_normal_form(m)
    return res.rank == m.cols and all(m.ring.is_unit(v) for v in res.diag)


def _surjective(m: SparseMatrix) -> bool:
    res = smith_normal_form(m)
    return res.rank == m.rows and all(m.ring.is_unit(v) for v in res.diag)


def is_cofibration(f: ChainMap) -> bool:
    """Degreewise split injection with free cokernel; over Z this means
    every invariant factor of every component is a unit."""
    return all(_split_injective(f.component(n)) for n in f.source.ranks)


def is_fibration(f: ChainMap) -> bool:
    """Degreewise surjection; degree 0 is exempt in the connective
    backend."""
    degs = [n for n in f.target.ranks
            if not (f.source.backend.connective and n <= 0)]
    return all(_surjective(f.component(n)) for n in degs)


def is_weak_equivalence(f: ChainMap) -> bool:
    return is_quasi_iso(f)


@dataclass(frozen=True)
class FactorizationResult:
    middle: ChainComplex
    first: ChainMap
    second: ChainMap
    mode: str


def factorize(f: ChainMap, mode: str) -> FactorizationResult:
    """Factor f = second . first through an explicit middle complex.

    mode "cof,triv-fib": through the mapping cylinder; first is the
    front inclusion, second the surjective deformation retraction.
    mode "triv-cof,fib": through the mapping path space; first is the
    graph section, second the evaluation.
    """
    if mode == MODE_COF_TRIVFIB:
        cyl = mapping_cylinder(f)
        out = FactorizationResult(cyl.complex, cyl.incl_source,
                                  cyl.retraction, mode)
    elif mode == MODE_TRIVCOF_FIB:
        ps = mapping_path_space(f)
        out = FactorizationResult(ps.complex, ps.section, ps.evaluation, mode)
    else:
        raise ValueError(f"unknown factorization mode {mode!r}")
    assert out.second @ out.first == f
    return out


# -- lifting -------------------------------------------------------------


def construct_lift(i: ChainMap, p: ChainMap, top: ChainMap,
                   bottom: ChainMap):
    """Filler h with h.i = top and p.h = bottom, or None.

    The unknown components h_n: B_n -> X_n for the square

        A --top--> X
        |i         |p
        B -bottom-> Y

    are stacked into one vector; the chain condition and the two
    triangle conditions become one sparse linear system solved by SNF.
    A solution exists whenever i is a cofibration and p a trivial
    fibration, but the solver itself makes no such assumption.
    """
    assert p @ top == bottom @ i, "lifting square must commute"
    A, B = i.source, i.target
    X, Y = p.source, p.target
    ring = B.backend.ring

    slots = {}
    off = 0
    for n in sorted(B.ranks):
        r, s = X.rank(n), B.rank(n)
        if r and s:
            slots[n] = (r, s, off)
            off += r * s
    nvars = off

    def enc(n, a, b):
        r, s, o = slots[n]
        return o + a * s + b

    entries = {}
    rhs = {}
    row = 0

    def add(r, c, v):
        v = ring.canon(v)
        if not ring.is_zero(v):
            key = (r, c)
            cur = ring.add(entries.get(key, ring.zero()), v)
            if ring.is_zero(cur):
                entries.pop(key, None)
            else:
                entries[key] = cur

    # chain condition d_X h_n = h_{n-1} d_B at every degree it bites
    for n in sorted(set(B.ranks) | {m + 1 for m in B.ranks}):
        rX, cB = X.rank(n - 1), B.rank(n)
        if not (rX and cB):
            continue
        dX = X.diff(n)
        dB = B.diff(n)
        base = row
        row += rX * cB
        if n in slots:
            for (r, k), v in dX.entries.items():
                for c in range(cB):
                    add(base + r * cB + c, enc(n, k, c), v)
        if n - 1 in slots:
            for (k, c), v in dB.entries.items():
                for r in range(rX):
                    add(base + r * cB + c, enc(n - 1, r, k), ring.neg(v))
    # h i = top
    for n in sorted(A.ranks):
        rX, cA = X.rank(n), A.rank(n)
        tn = top.component(n)
        if not rX:
            if not tn.is_zero_matrix:
                return None
            continue
        base = row
        row += rX * cA
        if n in slots:
            for (k, c), v in i.component(n).entries.items():
                for r in range(rX):
                    add(base + r * cA + c, enc(n, r, k), v)
        for (r, c), v in tn.entries.items():
            rhs[base + r * cA + c] = v
    # p h = bottom
    for n in sorted(B.ranks):
        rY, cB = Y.rank(n), B.rank(n)
        bn = bottom.component(n)
        if n not in slots:
            if not bn.is_zero_matrix:
                return None
            continue
        if not rY:
            continue
        base = row
        row += rY * cB
        for (r, k), v in p.component(n).entries.items():
            for c in range(cB):
                add(base + r * cB + c, enc(n, k, c), v)
        for (r, c), v in bn.entries.items():
            rhs[base + r * cB + c] = v

    sys_m = SparseMatrix(ring, row, nvars, entries)
    sys_b = SparseMatrix(ring, row, 1, {(r, 0): v for r, v in rhs.items()})
    x = smith_normal_form(sys_m).solve(sys_b)
    if x is None:
        return None
    comps = {}
    for n, (r, s, o) in slots.items():
        vals = {}
        for a in range(r):
            for b in range(s):
                v = x.get(o + a * s + b, 0)
                if not ring.is_zero(v):
                    vals[(a, b)] = v
        if vals:
            comps[n] = SparseMatrix(ring, r, s, vals)
    h = ChainMap(B, X, comps)
    assert h @ i == top and p @ h == bottom
    return h


# -- hom complexes -------------------------------------------------------


def _hom_layout(c: ChainComplex, d: ChainComplex, n: int):
    """Block layout of Hom_n = sum_k Hom(C_k, D_{k+n}): list of
    (k, rows, cols, offset) plus the total rank."""
    blocks = []
    off = 0
    for k in sorted(c.ranks):
        r, s = d.rank(k + n), c.rank(k)
        if r and s:
            blocks.append((k, r, s, off))
            off += r * s
    return blocks, off


def hom_complex(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Hom(C, D) in the unbounded backend over the common ring.

    Degree n holds the degree-n graded maps; the differential is
    phi -> d_D phi - (-1)^n phi d_C, so cycles in degree 0 are chain
    maps and H_0 is chain-homotopy classes.
    """
    ring = c.backend.ring
    assert ring == d.backend.ring, "hom needs a common coefficient ring"
    backend = Backend(ring, UNBOUNDED)
    if not c.ranks or not d.ranks:
        return ChainComplex(backend, {}, {})
    lo = min(d.ranks) - max(c.ranks)
    hi = max(d.ranks) - min(c.ranks)
    layouts = {n: _hom_layout(c, d, n) for n in range(lo, hi + 1)}
    ranks = {n: total for n, (_, total) in layouts.items() if total}
    diffs = {}
    for n in ranks:
        if not ranks.get(n - 1, 0):
            continue
        tgt = {k: (r, s, o) for k, r, s, o in layouts[n - 1][0]}
        sign = ring.canon(-1 if n % 2 == 0 else 1)
        entries = {}

        def add(r, c2, v):
            if not ring.is_zero(v):
                cur = ring.add(entries.get((r, c2), ring.zero()), v)
                if ring.is_zero(cur):
                    entries.pop((r, c2), None)
                else:
                    entries[(r, c2)] = cur

        for k, r, s, o in layouts[n][0]:
            # post-compose with d_D: stays in block k
            if k in tgt:
                r1, s1, o1 = tgt[k]
                for (rr, i), v in d.diff(k + n).entries.items():
                    for j in range(s):
                        add(o1 + rr * s1 + j, o + i * s + j, v)
            # pre-compose with d_C: lands in block k + 1
            if k + 1 in tgt:
                r1, s1, o1 = tgt[k + 1]
                for (j, c2), v in c.diff(k + 1).entries.items():
                    for i in range(r):
                        add(o1 + i * s1 + c2, o + i * s + j,
                            ring.mul(sign, v))
        if entries:
            diffs[n] = SparseMatrix(ring, ranks[n - 1], ranks[n], entries)
    return ChainComplex(backend, ranks, diffs)


def hom_postcompose(c: ChainComplex, g: ChainMap) -> ChainMap:
    """Hom(C, X) -> Hom(C, Y) induced by g: X -> Y, phi -> g . phi."""
    hx = hom_complex(c, g.source)
    hy = hom_complex(c, g.target)
    ring = c.backend.ring
    comps = {}
    for n in hx.ranks:
        if not hy.rank(n):
            continue
        src_blocks, _ = _hom_layout(c, g.source, n)
        tgt = {k: (r, s, o) for k, r, s, o in _hom_layout(c, g.target, n)[0]}
        entries = {}
        for k, _, s, o in src_blocks:
            if k not in tgt:
                continue
            _, s1, o1 = tgt[k]
            for (rr, i), v in g.component(k + n).entries.items():
                for j in range(s):
                    entries[(o1 + rr * s1 + j, o + i * s + j)] = v
        if entries:
            comps[n] = SparseMatrix(ring, hy.rank(n), hx.rank(n), entries)
    return ChainMap(hx, hy, comps)
