"""Independent brute-force oracles used to pin expected values in tests.

Everything here works on plain dense lists and deliberately shares no
code with the package: invariant factors come from k x k minor gcds,
a second dense diagonalization uses fixed top-left pivoting with no op
records, homology goes through the classical rank/invariant-factor
formula, and finitely generated abelian groups are handled by primary
decomposition.  Agreement between these and the package is what the
test-suite asserts; the oracles themselves are validated against each
other on small inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product


# -- determinants and minor gcds -----------------------------------------


def det_fraction(rows):
    """Exact determinant via Fraction Gaussian elimination."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    m = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def det_mod_p(rows, p):
    n = len(rows)
    if n == 0:
        return 1 % p
    m = [[x % p for x in row] for row in rows]
    det = 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c] % p != 0:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = (-det) % p
        det = (det * m[c][c]) % p
        inv = pow(m[c][c], -1, p)
        for r in range(c + 1, n):
            if m[r][c] % p != 0:
                f = (m[r][c] * inv) % p
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[c])]
    return det % p


def minor_gcd_invariant_factors(dense, kind="Z", p=None):
    """Invariant factors from scratch: d_k = gcd of all k x k minors,
    f_k = d_k / d_{k-1}.  Over a field the answer is rank-many ones.

    Exponential in matrix size; keep inputs at 5 x 5 or below.
    """
    rows = len(dense)
    cols = len(dense[0]) if rows else 0
    maxk = min(rows, cols)
    factors = []
    prev = 1
    for k in range(1, maxk + 1):
        g = 0
        for rset in combinations(range(rows), k):
            for cset in combinations(range(cols), k):
                sub = [[dense[r][c] for c in cset] for r in rset]
                if kind == "Z":
                    d = int(det_fraction(sub))
                    g = math.gcd(g, d)
                elif kind == "Q":
                    if det_fraction(sub) != 0:
                        g = 1
                else:
                    if det_mod_p(sub, p) != 0:
                        g = 1
                if g == 1 and kind != "Z":
                    break
            if g == 1 and kind != "Z":
                break
        if g == 0:
            break
        factors.append(g // prev if kind == "Z" else 1)
        prev = g if kind == "Z" else 1
    return factors


# -- a second, records-free dense diagonalization ------------------------


def dense_snf_diag(dense, kind="Z", p=None):
    """Diagonal of the Smith form by always-top-left pivoting.

    Independent of the package implementation: dense lists, no op
    records, gcd-accumulation pivot strategy.
    """
    m = [list(row) for row in dense]
    rows, cols = len(m), len(m[0]) if m else 0
    if kind == "Q":
        m = [[Fraction(x) for x in row] for row in m]
    if kind == "Fp":
        m = [[x % p for x in row] for row in m]

    def is_zero(v):
        return v == 0

    diag = []
    t = 0
    while t < min(rows, cols):
        # move any nonzero entry of the minor to (t, t)
        pos = None
        for r in range(t, rows):
            for c in range(t, cols):
                if not is_zero(m[r][c]):
                    pos = (r, c)
                    break
            if pos:
                break
        if pos is None:
            break
        r0, c0 = pos
        m[t], m[r0] = m[r0], m[t]
        for row in m:
            row[t], row[c0] = row[c0], row[t]
        if kind != "Z":
            piv = m[t][t]
            inv = (Fraction(1) / piv) if kind == "Q" else pow(piv, -1, p)
            for r in range(t + 1, rows):
                f = m[r][t] * inv
                if kind == "Fp":
                    f %= p
                if not is_zero(f):
                    m[r] = [a - f * b for a, b in zip(m[r], m[t])]
                    if kind == "Fp":
                        m[r] = [a % p for a in m[r]]
            for c in range(t + 1, cols):
                f = m[t][c] * inv
                if kind == "Fp":
                    f %= p
                if not is_zero(f):
                    for r in range(rows):
                        m[r][c] = m[r][c] - f * m[r][t]
                        if kind == "Fp":
                            m[r][c] %= p
            diag.append(1)
            t += 1
            continue
        # integer case: Euclid until the pivot divides its row, column,
        # and the whole remaining minor
        while True:
            if m[t][t] < 0:
                m[t] = [-a for a in m[t]]
            piv = m[t][t]
            dirty = False
            for r in range(t + 1, rows):
                if m[r][t]:
                    q = m[r][t] // piv
                    if q:
                        m[r] = [a - q * b for a, b in zip(m[r], m[t])]
                    if m[r][t]:
                        dirty = True
            for c in range(t + 1, cols):
                if m[t][c]:
                    q = m[t][c] // piv
                    if q:
                        for r in range(rows):
                            m[r][c] -= q * m[r][t]
                    if m[t][c]:
                        dirty = True
            if dirty:
                # smallest surviving entry becomes the next pivot
                best = None
                for r in range(t, rows):
                    for c in range(t, cols):
                        v = m[r][c]
                        if v and (best is None or abs(v) < abs(best[0])):
                            best = (v, r, c)
                _, r0, c0 = best
                m[t], m[r0] = m[r0], m[t]
                for row in m:
                    row[t], row[c0] = row[c0], row[t]
                continue
            bad = None
            for r in range(t + 1, rows):
                for c in range(t + 1, cols):
                    if m[r][c] % piv:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            m[t] = [a + b for a, b in zip(m[t], m[bad])]
        diag.append(m[t][t])
        t += 1
    return diag


def dense_rank(dense, kind="Z", p=None):
    return len(dense_snf_diag(dense, kind, p))


# -- homology by the classical formula -----------------------------------


def oracle_homology(ranks, diffs, n, kind="Z", p=None):
    """H_n of a free chain complex as (free_rank, sorted torsion list).

    Uses only ranks and the two adjacent differentials: the free part is
    rank C_n - rank d_n - rank d_{n+1}; the torsion is the list of
    invariant factors of d_{n+1} exceeding 1 (trivial over fields).
    ranks maps degree -> count, diffs maps degree -> dense matrix of
    shape ranks[n-1] x ranks[n].
    """
    rn = ranks.get(n, 0)
    if rn == 0:
        return (0, [])

    def rank_of(k):
        d = diffs.get(k)
        if d is None or not d or not d[0]:
            return 0
        return dense_rank(d, kind, p)

    free = rn - rank_of(n) - rank_of(n + 1)
    torsion = []
    if kind == "Z":
        d = diffs.get(n + 1)
        if d and d[0]:
            torsion = [f for f in dense_snf_diag(d, "Z") if f > 1]
    return (free, sorted(torsion))


# -- finitely generated abelian groups -----------------------------------


def _prime_power_parts(m):
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def normalize_group(free, torsion):
    """Invariant-factor form of Z^free + sum of Z/t for t in torsion."""
    primary = {}
    for t in torsion:
        for (q, e) in _prime_power_parts(t):
            primary.setdefault(q, []).append(e)
    for q in primary:
        primary[q].sort(reverse=True)
    depth = max((len(v) for v in primary.values()), default=0)
    factors = []
    for i in range(depth):
        f = 1
        for q, exps in primary.items():
            if i < len(exps):
                f *= q ** exps[i]
        factors.append(f)
    return (free, sorted(f for f in factors if f > 1))


def hom_group(g, h):
    """Hom(G, H) for f.g. abelian groups given as (free, torsion list)."""
    gf, gt = g
    hf, ht = h
    free = gf * hf
    torsion = []
    torsion += [t for t in ht for _ in range(gf)]
    torsion += [math.gcd(a, b) for a in gt for b in ht]
    return normalize_group(free, [t for t in torsion if t > 1])


def ext_group(g, h):
    """Ext^1(G, H) for f.g. abelian groups."""
    gf, gt = g
    hf, ht = h
    torsion = [t for t in gt for _ in range(hf)]
    torsion += [math.gcd(a, b) for a in gt for b in ht]
    return normalize_group(0, [t for t in torsion if t > 1])


def group_sum(groups):
    free = sum(g[0] for g in groups)
    torsion = [t for g in groups for t in g[1]]
    return normalize_group(free, torsion)


def oracle_hom_complex_homology(cranks, cdiffs, dranks, ddiffs, n,
                                kind="Z", p=None):
    """H_n of Hom(C, D) via universal coefficients:
    sum_k Hom(H_k C, H_{k+n} D) + sum_k Ext(H_k C, H_{k+n+1} D)."""
    degs_c = sorted(k for k, r in cranks.items() if r)
    parts = []
    for k in degs_c:
        hc = oracle_homology(cranks, cdiffs, k, kind, p)
        hd = oracle_homology(dranks, ddiffs, k + n, kind, p)
        parts.append(hom_group(hc, hd))
        if kind == "Z":
            hd1 = oracle_homology(dranks, ddiffs, k + n + 1, kind, p)
            parts.append(ext_group(hc, hd1))
    return group_sum(parts)


# -- exhaustive F_2 chain-map and homotopy enumeration -------------------


def _f2_matrices(rows, cols):
    if rows * cols == 0:
        yield tuple()
        return
    for bits in product((0, 1), repeat=rows * cols):
        yield tuple(bits)


def _mat_get(flat, rows, cols, r, c):
    return flat[r * cols + c] if rows and cols else 0


def _compose_f2(a, ar, ac, b, br, bc):
    # a: ar x ac, b: br x bc with ac == br; result flat ar x bc
    assert ac == br
    out = []
    for r in range(ar):
        for c in range(bc):
            s = 0
            for k in range(ac):
                s ^= _mat_get(a, ar, ac, r, k) & _mat_get(b, br, bc, k, c)
            out.append(s)
    return tuple(out)


def brute_homotopy_classes_f2(cranks, cdiffs, dranks, ddiffs):
    """Number of chain-homotopy classes of maps C -> D over F_2 by full
    enumeration of degreewise matrices.  Total entry count must stay
    small (about 16 bits) or this will not terminate in sensible time.
    """
    degs = sorted(set(cranks) | set(dranks))
    lo, hi = (min(degs), max(degs)) if degs else (0, 0)

    def cr(n):
        return cranks.get(n, 0)

    def dr(n):
        return dranks.get(n, 0)

    def cd(n):
        d = cdiffs.get(n)
        if d is None:
            return tuple([0] * (cr(n - 1) * cr(n)))
        return tuple(x % 2 for row in d for x in row)

    def dd(n):
        d = ddiffs.get(n)
        if d is None:
            return tuple([0] * (dr(n - 1) * dr(n)))
        return tuple(x % 2 for row in d for x in row)

    f_bits = sum(cr(n) * dr(n) for n in range(lo, hi + 1))
    s_bits = sum(cr(n) * dr(n + 1) for n in range(lo, hi + 1))
    assert f_bits <= 16 and s_bits <= 16, "instance too large to enumerate"

    def split(bits, sizes):
        out, i = [], 0
        for s in sizes:
            out.append(tuple(bits[i:i + s]))
            i += s
        return out

    f_sizes = [cr(n) * dr(n) for n in range(lo, hi + 1)]
    chain_maps = set()
    for bits in product((0, 1), repeat=f_bits):
        comps = split(bits, f_sizes)
        ok = True
        for idx, n in enumerate(range(lo, hi + 1)):
            # want d_n^D f_n == f_{n-1} d_n^C
            fn = comps[idx]
            fprev = comps[idx - 1] if idx > 0 else tuple([0] * (cr(n - 1) * dr(n - 1)))
            left = _compose_f2(dd(n), dr(n - 1), dr(n), fn, dr(n), cr(n)) \
                if dr(n - 1) * cr(n) else tuple([0] * (dr(n - 1) * cr(n)))
            right = _compose_f2(fprev, dr(n - 1), cr(n - 1), cd(n), cr(n - 1), cr(n)) \
                if dr(n - 1) * cr(n) else tuple([0] * (dr(n - 1) * cr(n)))
            if left != right:
                ok = False
                break
        if ok:
            chain_maps.add(bits)

    s_sizes = [cr(n) * dr(n + 1) for n in range(lo, hi + 1)]
    boundaries = set()
    for bits in product((0, 1), repeat=s_bits):
        comps = split(bits, s_sizes)
        total = []
        for idx, n in enumerate(range(lo, hi + 1)):
            sn = comps[idx]
            sprev = comps[idx - 1] if idx > 0 else tuple([0] * (cr(n - 1) * dr(n)))
            a = _compose_f2(dd(n + 1), dr(n), dr(n + 1), sn, dr(n + 1), cr(n)) \
                if dr(n) * cr(n) else tuple()
            b = _compose_f2(sprev, dr(n), cr(n - 1), cd(n), cr(n - 1), cr(n)) \
                if dr(n) * cr(n) else tuple()
            total.extend(x ^ y for x, y in zip(a, b))
        boundaries.add(tuple(total))
    assert len(chain_maps) % len(boundaries) == 0
    return len(chain_maps) // len(boundaries)
