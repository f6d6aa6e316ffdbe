"""Seeded random instance generators.

Random complexes are built constructively (sums of spheres, then cones
attached along random cycles), never by rejection sampling, so d.d = 0
holds by construction.  Random chain maps come from the exact kernel of
the chain-map condition, random commuting squares from the kernel of
the commutation constraint; both are therefore uniform over small
coefficient boxes inside the true solution lattice.
"""

from __future__ import annotations

from .complexes import (ChainComplex, ChainMap, cone, direct_sum,
                        identity_map, moore, sphere, zero_map)
from .spectra import (Bispectrum, bispectrum_sum, corepresented_diagram,
                      shift_diagram, suspension_replace)
from .tangent import ParamBispectrum, make_retractive
from .matrices import SparseMatrix
from .rings import Backend
from .snf import smith_normal_form


def random_complex(rng, backend: Backend, lo: int = 0, max_degree: int = 4,
                   max_total_rank: int = 8, cone_steps: int = 2) -> ChainComplex:
    if backend.connective:
        lo = max(lo, 0)
    degs = list(range(lo, max_degree + 1))
    parts = [sphere(backend, rng.choice(degs)) for _ in range(rng.randint(1, 3))]
    c = direct_sum(parts).complex
    for _ in range(rng.randint(0, cone_steps)):
        if c.total_rank() >= max_total_rank:
            break
        n = rng.choice(c.degrees())
        if n + 1 > max_degree:
            continue
        K = smith_normal_form(c.diff(n)).kernel_basis()
        if K.cols == 0:
            continue
        w = SparseMatrix.from_triples(
            backend.ring, K.cols, 1,
            [(i, 0, rng.randint(-2, 2)) for i in range(K.cols)])
        col = K @ w
        f = ChainMap(sphere(backend, n), c,
                     {n: col} if not col.is_zero_matrix else {})
        c = cone(f).complex
    return c


def random_moore_or_sphere(rng, backend: Backend, max_degree: int = 4) -> ChainComplex:
    if rng.random() < 0.5:
        return sphere(backend, rng.randint(0, max_degree))
    return moore(backend, rng.choice([2, 3, 4]), rng.randint(0, max_degree - 1))


def _chain_map_lattice(c: ChainComplex, d: ChainComplex):
    """Kernel basis of the chain-map condition on degreewise matrices.

    Returns (slots, basis) where slots fixes the flattening order
    [(degree, rows, cols, offset), ...] and each basis column encodes
    one chain map c -> d.
    """
    ring = c.backend.ring
    slots = []
    off = 0
    for n in sorted(set(c.ranks) & set(d.ranks)):
        rows, cols = d.rank(n), c.rank(n)
        slots.append((n, rows, cols, off))
        off += rows * cols
    nvars = off
    pos = {n: (rows, cols, o) for n, rows, cols, o in slots}
    eq_entries = []
    eq_rows = 0
    degs = sorted(set(c.ranks) | set(d.ranks))
    for n in degs:
        # d_n^D f_n - f_{n-1} d_n^C = 0, an equation per (target row, source col)
        h, w = d.rank(n - 1), c.rank(n)
        if h == 0 or w == 0:
            continue
        base = eq_rows
        dd = d.diff(n)
        if n in pos:
            rows, cols, o = pos[n]
            for (r, k), v in dd.entries.items():
                for col in range(cols):
                    eq_entries.append((base + r * w + col, o + k * cols + col, v))
        dc = c.diff(n)
        if n - 1 in pos:
            rows1, cols1, o1 = pos[n - 1]
            for (k, col), v in dc.entries.items():
                for r in range(h):
                    eq_entries.append((base + r * w + col, o1 + r * cols1 + k,
                                       ring.neg(v)))
        eq_rows += h * w

    acc = {}
    for r, cidx, v in eq_entries:
        key = (r, cidx)
        s = ring.add(acc.get(key, ring.zero()), v)
        if ring.is_zero(s):
            acc.pop(key, None)
        else:
            acc[key] = s
    A = SparseMatrix(ring, eq_rows, nvars, acc)
    return slots, smith_normal_form(A).kernel_basis()


def _unflatten(c: ChainComplex, d: ChainComplex, slots, flat: SparseMatrix) -> ChainMap:
    ring = c.backend.ring
    comps = {}
    for n, rows, cols, off in slots:
        ent = {}
        for (idx, _), v in flat.entries.items():
            if off <= idx < off + rows * cols:
                k = idx - off
                ent[(k // cols, k % cols)] = v
        if ent:
            comps[n] = SparseMatrix(ring, rows, cols, ent)
    return ChainMap(c, d, comps)


def random_chain_map(rng, c: ChainComplex, d: ChainComplex, span: int = 2) -> ChainMap:
    slots, K = _chain_map_lattice(c, d)
    if K.cols == 0:
        return ChainMap(c, d, {})
    w = SparseMatrix.from_triples(
        c.backend.ring, K.cols, 1,
        [(i, 0, rng.randint(-span, span)) for i in range(K.cols)])
    return _unflatten(c, d, slots, K @ w)


def random_quasi_iso_source(rng, c: ChainComplex) -> ChainMap:
    """A quasi-iso onto c: the projection of c + cone(id of something)."""
    pad = random_complex(rng, c.backend, max_degree=3, max_total_rank=4, cone_steps=0)
    acyc = cone(ChainMap(pad, pad, {n: SparseMatrix.identity(c.backend.ring, r)
                                    for n, r in pad.ranks.items()})).complex
    return direct_sum([c, acyc]).projections[0]


def random_commuting_square(rng, backend: Backend, lo: int = 0,
                            max_degree: int = 3):
    """(f: X->Y, g: X->Z, u: Y->W, v: Z->W) with u f = v g on the nose.

    u and v are drawn jointly from the kernel of the commutation
    constraint, so the square commutes exactly.
    """
    ring = backend.ring
    X = random_complex(rng, backend, lo, max_degree, max_total_rank=5, cone_steps=1)
    Y = random_complex(rng, backend, lo, max_degree, max_total_rank=5, cone_steps=1)
    Z = random_complex(rng, backend, lo, max_degree, max_total_rank=5, cone_steps=1)
    W = random_complex(rng, backend, lo, max_degree, max_total_rank=5, cone_steps=1)
    f = random_chain_map(rng, X, Y)
    g = random_chain_map(rng, X, Z)
    slots_u, Ku = _chain_map_lattice(Y, W)
    slots_v, Kv = _chain_map_lattice(Z, W)
    # joint constraint: u f - v g = 0 in every degree, over the product
    # of the two chain-map lattices
    cols = []
    for j in range(Ku.cols):
        u = _unflatten(Y, W, slots_u, Ku.col_select([j]))
        uf = u @ f
        cols.append(("u", j, uf))
    for j in range(Kv.cols):
        v = _unflatten(Z, W, slots_v, Kv.col_select([j]))
        vg = v @ g
        cols.append(("v", j, vg))
    degs = sorted(set(X.ranks) & set().union(set(W.ranks)))
    slot_off = {}
    off = 0
    for n in degs:
        if W.rank(n) and X.rank(n):
            slot_off[n] = off
            off += W.rank(n) * X.rank(n)
    entries = {}
    for cidx, (tag, j, m) in enumerate(cols):
        sgn = ring.one() if tag == "u" else ring.neg(ring.one())
        for n, o in slot_off.items():
            comp = m.component(n)
            for (r, k), v in comp.entries.items():
                entries[(o + r * X.rank(n) + k, cidx)] = ring.mul(sgn, v)
    A = SparseMatrix(ring, off, len(cols), entries)
    Kj = smith_normal_form(A).kernel_basis()
    if Kj.cols == 0:
        u = ChainMap(Y, W, {})
        v = ChainMap(Z, W, {})
        return f, g, u, v
    w = SparseMatrix.from_triples(
        ring, Kj.cols, 1,
        [(i, 0, rng.randint(-2, 2)) for i in range(Kj.cols)])
    sol = Kj @ w
    uflat = SparseMatrix.zero(ring, Ku.rows, 1)
    vflat = SparseMatrix.zero(ring, Kv.rows, 1)
    for (idx, _), val in sol.entries.items():
        tag, j, _ = cols[idx]
        if tag == "u":
            uflat = uflat + Ku.col_select([j]).scale(val)
        else:
            vflat = vflat + Kv.col_select([j]).scale(val)
    u = _unflatten(Y, W, slots_u, uflat)
    v = _unflatten(Z, W, slots_v, vflat)
    assert (u @ f) == (v @ g)
    return f, g, u, v


# -- diagram-level generators --------------------------------------------


def random_acyclic(rng, backend: Backend, max_degree: int = 3,
                   max_total_rank: int = 4) -> ChainComplex:
    pad = random_complex(rng, backend, max_degree=max_degree,
                         max_total_rank=max_total_rank, cone_steps=0)
    return cone(identity_map(pad)).complex


def _lane_diagram(backend: Backend, stage: int, chain, steps, axis) -> Bispectrum:
    """Diagram constant along one axis: entry (i, j) = chain[i] (axis 0)
    or chain[j] (axis 1), with identities along the constant axis."""
    pick = (lambda i, j: i) if axis == 0 else (lambda i, j: j)
    ents = {(i, j): chain[pick(i, j)] for i in range(stage + 1)
            for j in range(stage + 1)}
    hor = {}
    ver = {}
    for i in range(stage + 1):
        for j in range(stage):
            hor[(i, j)] = steps[j] if axis == 1 else identity_map(chain[i])
    for i in range(stage):
        for j in range(stage + 1):
            ver[(i, j)] = steps[i] if axis == 0 else identity_map(chain[j])
    return Bispectrum(backend, stage, ents, hor, ver)


def random_bispectrum(rng, backend: Backend, stage: int, max_degree: int = 3,
                      max_total_rank: int = 4) -> Bispectrum:
    """Seeded raw diagram, not a pre-spectrum in general: the sum of a
    row-constant and a column-constant lane, whose squares commute
    strictly by construction."""
    lanes = []
    for axis in (0, 1):
        chain = [random_complex(rng, backend, max_degree=max_degree,
                                max_total_rank=max_total_rank, cone_steps=1)
                 for _ in range(stage + 1)]
        steps = [random_chain_map(rng, chain[n], chain[n + 1])
                 for n in range(stage)]
        lanes.append(_lane_diagram(backend, stage, chain, steps, axis))
    return bispectrum_sum(lanes).diagram


def random_prespectrum(rng, backend: Backend, stage: int, max_degree: int = 3,
                       max_total_rank: int = 5):
    """Seeded pre-spectrum: a suspension tower on a random complex,
    possibly summed with a second shifted tower and an acyclic
    corepresented blanket.  All three summands are pre-spectra with
    strict squares, so the sum is one too."""
    lo = 0 if backend.connective else rng.choice([-2, -1, 0])
    parts = [suspension_replace(
        random_complex(rng, backend, lo=lo, max_degree=max_degree,
                       max_total_rank=max_total_rank, cone_steps=1),
        stage)[0]]
    if stage >= 2 and rng.random() < 0.5:
        # pad k zero rows/columns in front; the inner tower needs
        # stage - k >= k for the shift to stay within its own bound
        k = rng.randint(1, stage // 2)
        inner, _ = suspension_replace(
            random_moore_or_sphere(rng, backend, max_degree=max(1, max_degree - 1)),
            stage - k)
        parts.append(shift_diagram(inner, -k))
    if rng.random() < 0.4:
        n = rng.randint(0, stage)
        m = rng.randint(0, stage)
        parts.append(corepresented_diagram(backend, stage, n, m,
                                           random_acyclic(rng, backend)))
    if len(parts) == 1:
        return parts[0]
    return bispectrum_sum(parts).diagram


def random_levelwise_qis_map(rng, b):
    """b into b + (constant acyclic blanket): a levelwise quasi-iso."""
    pad = corepresented_diagram(b.backend, b.stage, 0, 0,
                                random_acyclic(rng, b.backend))
    return bispectrum_sum([b, pad]).inclusions[0]


def random_pi_changing_map(rng, b):
    """b into b + a second tower with visible homology, so the stable
    homotopy groups of source and target differ somewhere."""
    extra, _ = suspension_replace(
        random_moore_or_sphere(rng, b.backend, max_degree=2), b.stage)
    return bispectrum_sum([b, extra]).inclusions[0]


def random_retractive(rng, backend: Backend, max_degree: int = 3,
                      max_total_rank: int = 4):
    """Seeded retractive object with a twisted retraction: the total is
    a literal sum base + fiber, but the retraction subtracts a random
    correction through the fiber, so the splitting genuinely has to be
    recomputed."""
    a = random_complex(rng, backend, max_degree=max_degree,
                       max_total_rank=max_total_rank, cone_steps=1)
    k = random_complex(rng, backend, max_degree=max_degree,
                       max_total_rank=max_total_rank, cone_steps=1)
    s = direct_sum([a, k])
    twist = random_chain_map(rng, k, a)
    return make_retractive(a, s.complex, s.inclusions[0],
                           s.projections[0] - twist @ s.projections[1])


def twisted_family(rng, a: ChainComplex, b: Bispectrum) -> ParamBispectrum:
    """b glued over the base a with a random twist folded into every
    retraction and structure map; reduces to b up to the twist."""
    sums = {cell: direct_sum([a, e]) for cell, e in b.entries.items()}
    tw = {cell: random_chain_map(rng, e, a) for cell, e in b.entries.items()}
    ents = {cell: make_retractive(a, s.complex, s.inclusions[0],
                                  s.projections[0] - tw[cell] @ s.projections[1])
            for cell, s in sums.items()}

    def step(src, tgt, f):
        s, t = sums[src], sums[tgt]
        # upper-triangular so the twisted retractions stay natural
        return (t.inclusions[0]
                @ (s.projections[0] + (tw[tgt] @ f - tw[src]) @ s.projections[1])
                + t.inclusions[1] @ f @ s.projections[1])

    hor = {cell: step(cell, (cell[0], cell[1] + 1), f)
           for cell, f in b.horiz.items()}
    ver = {cell: step(cell, (cell[0] + 1, cell[1]), f)
           for cell, f in b.vert.items()}
    return ParamBispectrum(a, b.stage, ents, hor, ver)


def random_param_prespectrum(rng, backend: Backend, stage: int,
                             max_degree: int = 2,
                             max_total_rank: int = 3) -> ParamBispectrum:
    """Seeded fiberwise pre-spectrum over a random base."""
    a = random_complex(rng, backend, max_degree=max_degree,
                       max_total_rank=max_total_rank, cone_steps=1)
    e = random_prespectrum(rng, backend, stage, max_degree=max_degree,
                           max_total_rank=max_total_rank)
    return twisted_family(rng, a, e)


def random_split_param(rng, backend: Backend, stage: int, max_degree: int = 2,
                       block_rank: int = 2) -> ParamBispectrum:
    """Seeded diagram whose structure maps are summand inclusions of
    prefix sums, so every latching colimit stays levelwise free."""
    blocks = [random_complex(rng, backend, max_degree=max_degree,
                             max_total_rank=block_rank, cone_steps=0)
              for _ in range(2 * stage + 1)]
    a = random_complex(rng, backend, max_degree=max_degree,
                       max_total_rank=block_rank, cone_steps=0)
    sums = {(i, j): direct_sum([a] + blocks[:i + j + 1])
            for i in range(stage + 1) for j in range(stage + 1)}
    ents = {cell: make_retractive(a, s.complex, s.inclusions[0],
                                  s.projections[0])
            for cell, s in sums.items()}

    def grow(src, tgt):
        f = zero_map(sums[src].complex, sums[tgt].complex)
        for m in range(len(sums[src].inclusions)):
            f = f + sums[tgt].inclusions[m] @ sums[src].projections[m]
        return f

    hor = {(i, j): grow((i, j), (i, j + 1))
           for i in range(stage + 1) for j in range(stage)}
    ver = {(i, j): grow((i, j), (i + 1, j))
           for i in range(stage) for j in range(stage + 1)}
    return ParamBispectrum(a, stage, ents, hor, ver)
