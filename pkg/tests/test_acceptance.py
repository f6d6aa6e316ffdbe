"""Full acceptance battery: one property per test, desk scale.

Seeded instances are capped at ranks <= 8, degrees <= 6, stage <= 6; seed
streams are disjoint per test so failures reproduce in isolation.
"""

import random

from chainspectra.complexes import (direct_sum, homology, homology_table,
                                    is_quasi_iso, moore, shift, sphere,
                                    zero_complex, zero_map)
from chainspectra.generators import (random_acyclic, random_chain_map,
                                     random_commuting_square, random_complex,
                                     random_levelwise_qis_map,
                                     random_param_prespectrum,
                                     random_pi_changing_map,
                                     random_prespectrum,
                                     random_quasi_iso_source,
                                     random_split_param)
from chainspectra.homotopy import SquareOfComplexes, classify_square
from chainspectra.matrices import SparseMatrix
from chainspectra.rings import CONNECTIVE, UNBOUNDED, Backend, Fp, Q, Z
from chainspectra.snf import smith_normal_form
from chainspectra.spectra import (derived_unit_check, inclusion_truncation,
                                  is_local, is_stable_equivalence,
                                  localization_test_maps, omega_replace,
                                  spectrum_report, stable_pi,
                                  suspension_replace)
from chainspectra.tangent import (base_change_pull, base_change_pull_map,
                                  base_change_push, base_change_push_map,
                                  identity_param_map, latching_object,
                                  pull_counit, push_unit, quillen_cohomology,
                                  reduced_diagram, sphere_spectrum_over,
                                  trivial_family)

from oracles import (dense_snf_diag, ext_group, group_sum, hom_group,
                     minor_gcd_invariant_factors, oracle_homology)

CONN = Backend(Z, CONNECTIVE)
UNB = Backend(Z, UNBOUNDED)


def pair(g):
    return (g.free_rank, sorted(g.torsion))


def test_criterion_01_stabilization_is_homology():
    """The stage-6 suspension tower of c has stable_pi(k) = H_k(c), with
    the stabilized flag set, for -2 <= k <= 4."""
    cases = [sphere(CONN, d) for d in range(5)]
    cases += [sphere(UNB, d) for d in range(-2, 5)]
    for m in (2, 3, 4):
        cases += [moore(CONN, m, k) for k in range(4)]
        cases.append(moore(UNB, m, -1))
    for seed in range(200):
        rng = random.Random(seed)
        be = CONN if seed % 2 else UNB
        lo = 0 if be.connective else -2
        cases.append(random_complex(rng, be, lo=lo, max_degree=6,
                                    max_total_rank=8))
    for c in cases:
        tower, _ = suspension_replace(c, 6)
        for k in range(-2, 5):
            group, settled = stable_pi(tower, k)
            assert settled
            assert group == homology(c, k)


def test_criterion_02_omega_replacement():
    """omega_replace on 200 seeded pre-spectra at stage 6: the result is
    an omega-spectrum through level 4 and every stable group survives."""
    for seed in range(200):
        rng = random.Random(1000 + seed)
        be = CONN if seed % 2 else UNB
        if seed % 10 == 3:
            be = Backend(Fp(5), be.variant)
        elif seed % 10 == 7:
            be = Backend(Q, be.variant)
        big = seed % 5 == 4
        b = random_prespectrum(rng, be, 6,
                               max_degree=3 if big else 2,
                               max_total_rank=4 if big else 3)
        out, _ = omega_replace(b)
        assert set(range(5)) <= spectrum_report(out).omega_at
        degrees = range(0, 5) if be.connective else range(-2, 5)
        for k in degrees:
            assert stable_pi(out, k)[0] == stable_pi(b, k)[0]


def test_criterion_03_suspension_replacement():
    """Stage-6 suspension towers: every diagonal square coCartesian,
    entry (0,0) equal to the input, entry (n,n) with the homology of the
    n-fold shift."""
    cases = [sphere(CONN, 0), moore(CONN, 2, 1), moore(UNB, 3, -1)]
    for seed in range(200):
        rng = random.Random(2000 + seed)
        be = CONN if seed % 2 else UNB
        lo = 0 if be.connective else -2
        cases.append(random_complex(rng, be, lo=lo, max_degree=6,
                                    max_total_rank=8))
    for c in cases:
        tower, _ = suspension_replace(c, 6)
        assert spectrum_report(tower).suspension_at == frozenset(range(6))
        assert tower.entry(0, 0) == c
        for n in range(7):
            assert homology_table(tower.entry(n, n)) == homology_table(shift(c, n))


def test_criterion_04_stability_dichotomy():
    """Unbounded squares are homotopy Cartesian iff coCartesian; the
    connective witness (0, 0, 0, S0) is Cartesian but not coCartesian."""
    for seed in range(200):
        rng = random.Random(3000 + seed)
        f, g, u, v = random_commuting_square(rng, UNB, lo=-2, max_degree=2)
        sq = SquareOfComplexes(f.source, f.target, g.target, u.target,
                               f, g, u, v)
        cart, cocart = classify_square(sq)
        assert cart == cocart
    zc = zero_complex(CONN)
    s0 = sphere(CONN, 0)
    witness = SquareOfComplexes(zc, zc, zc, s0,
                                zero_map(zc, zc), zero_map(zc, zc),
                                zero_map(zc, s0), zero_map(zc, s0))
    assert classify_square(witness) == (True, False)


def test_criterion_05_localization_characterization():
    """Locality against the emitted test maps agrees with the report's
    omega-spectrum verdict, both directions, on 50 diagrams."""
    total = 0
    for be, degs in ((CONN, range(0, 6)), (UNB, range(-3, 6))):
        maps = localization_test_maps(be, 2, degs)
        verdicts = []
        for seed in range(13):
            rng = random.Random(4000 + seed)
            z = random_prespectrum(rng, be, 2, max_degree=2, max_total_rank=4)
            diagrams = [z]
            if seed < 12:
                diagrams.append(omega_replace(z)[0])
            for w in diagrams:
                rep = spectrum_report(w)
                verdict = rep.is_prespectrum and rep.omega_at == frozenset({0, 1})
                assert all(is_local(w, f) for f in maps) == verdict
                verdicts.append(verdict)
                total += 1
        assert True in verdicts and False in verdicts
    assert total == 50


def test_criterion_06_latching_formula():
    """Brute-force based latching colimits equal the basepoint-pushout
    formula at every index up to (3, 3) on 100 seeded diagrams (the
    comparison inside latching_object asserts the isomorphism)."""
    for seed in range(100):
        rng = random.Random(5000 + seed)
        be = (CONN, Backend(Fp(3), CONNECTIVE), UNB)[seed % 3]
        p = random_split_param(rng, be, 3)
        data = latching_object(p, "*")
        assert data.object.total_rank() == 0
        for i in range(4):
            for j in range(4):
                data = latching_object(p, (i, j))
                assert data.comparison.target == p.entries[(i, j)].total


def test_criterion_07_base_change_adjunction():
    """Triangle identities for push/pull hold as literal matrix
    identities; base change along a quasi-iso preserves the fiberwise
    stable groups.  100 fiberwise-split instances."""
    for seed in range(100):
        rng = random.Random(6000 + seed)
        be = CONN if seed % 2 else UNB
        if seed % 7 == 0:
            be = Backend(Fp(5), be.variant)
        p = random_param_prespectrum(rng, be, 2)
        b = random_complex(rng, be, max_degree=2, max_total_rank=3)
        f = random_chain_map(rng, p.base, b)
        fp = base_change_push(f, p)
        left = pull_counit(f, fp) @ base_change_push_map(f, push_unit(f, p))
        assert left == identity_param_map(fp)

        q = random_param_prespectrum(rng, be, 2)
        g = random_chain_map(rng, b, q.base)
        gq = base_change_pull(g, q)
        right = base_change_pull_map(g, pull_counit(g, q)) @ push_unit(g, gq)
        assert right == identity_param_map(gq)

        pad = direct_sum([p.base, random_acyclic(rng, be)])
        gi = pad.inclusions[0]
        h = random_quasi_iso_source(rng, q.base)
        assert is_quasi_iso(gi) and is_quasi_iso(h)
        red0, _ = reduced_diagram(p)
        red1, _ = reduced_diagram(base_change_push(gi, p))
        red2, _ = reduced_diagram(q)
        red3, _ = reduced_diagram(base_change_pull(h, q))
        for k in (0, 1):
            assert stable_pi(red0, k) == stable_pi(red1, k)
            assert stable_pi(red2, k) == stable_pi(red3, k)


def test_criterion_08_stable_equivalence_soundness():
    """Levelwise quasi-isos are accepted, maps that move some stable
    group are rejected, and between omega-spectra acceptance coincides
    with being a levelwise quasi-iso."""
    for seed in range(70):
        rng = random.Random(7000 + seed)
        b = random_prespectrum(rng, CONN if seed % 2 else UNB, 2)
        assert is_stable_equivalence(random_levelwise_qis_map(rng, b))
    for seed in range(70):
        rng = random.Random(7100 + seed)
        b = random_prespectrum(rng, CONN if seed % 2 else UNB, 2)
        bad = random_pi_changing_map(rng, b)
        assert any(stable_pi(bad.source, k)[0] != stable_pi(bad.target, k)[0]
                   for k in range(0, 4))
        assert not is_stable_equivalence(bad)
    for seed in range(30):
        rng = random.Random(7200 + seed)
        out, _ = omega_replace(random_prespectrum(rng, CONN if seed % 2 else UNB, 2))
        cells = [(i, j) for i in range(out.stage + 1)
                 for j in range(out.stage + 1)]
        for make in (random_levelwise_qis_map, random_pi_changing_map):
            m = make(rng, out)
            levelwise = all(is_quasi_iso(m.component(i, j)) for i, j in cells)
            assert is_stable_equivalence(m) == levelwise


def test_criterion_09_derived_unit():
    """The inclusion-truncation derived unit is a stable equivalence on
    every seeded connective pre-spectrum."""
    adj = inclusion_truncation(Z)
    for seed in range(200):
        rng = random.Random(8000 + seed)
        b = random_prespectrum(rng, CONN, 2)
        assert derived_unit_check(adj, b)


def test_criterion_10_quillen_cohomology_oracle():
    """quillen_cohomology matches the Hom/Ext oracle on 50 seeded
    (base, coefficients, degree) triples, plus the two pinned values."""
    s0 = sphere(CONN, 0)
    assert pair(quillen_cohomology(s0, sphere_spectrum_over(s0, 4), 0)) == (1, [])
    m2 = moore(CONN, 2, 0)
    assert pair(quillen_cohomology(m2, sphere_spectrum_over(m2, 4), 1)) == (0, [2])

    for seed in range(50):
        rng = random.Random(9000 + seed)
        n = rng.randint(0, 3)
        if seed % 5 == 4:
            be = Backend(Q if seed % 2 else Fp(2), CONNECTIVE)
            a = random_complex(rng, be, max_degree=3, max_total_rank=5)
            got = pair(quillen_cohomology(a, sphere_spectrum_over(a, 4), n))
            assert got == (homology(a, n).free_rank, [])
        else:
            a = random_complex(rng, CONN, max_degree=3, max_total_rank=5)
            m = rng.choice([None, 2, 3, 4])
            core = sphere(CONN, 0) if m is None else moore(CONN, m, 0)
            fam = trivial_family(a, suspension_replace(core, 4)[0])
            coeff = (1, []) if m is None else (0, [m])
            want = group_sum([hom_group(pair(homology(a, n)), coeff),
                              ext_group(pair(homology(a, n - 1)), coeff)])
            assert pair(quillen_cohomology(a, fam, n)) == want


def test_criterion_11_oracle_layer():
    """smith_normal_form and homology agree with independent dense
    brute-force implementations on 500 seeded matrices and complexes."""
    for seed in range(250):
        rng = random.Random(10000 + seed)
        rows, cols = rng.randint(0, 6), rng.randint(0, 6)
        dense = [[rng.randint(-7, 7) for _ in range(cols)] for _ in range(rows)]
        kind, ring, p = (("Z", Z, None), ("Q", Q, None),
                         ("Fp", Fp(3), 3))[seed % 3]
        res = smith_normal_form(SparseMatrix.from_dense(ring, dense))
        assert list(res.diag) == dense_snf_diag(dense, kind=kind, p=p)
        if kind == "Z":
            assert list(res.diag) == minor_gcd_invariant_factors(dense)
    for seed in range(250):
        rng = random.Random(11000 + seed)
        kind, ring, p = (("Z", Z, None), ("Q", Q, None),
                         ("Fp", Fp(3), 3))[seed % 3]
        be = Backend(ring, CONNECTIVE if seed % 2 else UNBOUNDED)
        lo = 0 if be.connective else -2
        c = random_complex(rng, be, lo=lo, max_degree=5, max_total_rank=8)
        diffs = {n: c.diff(n).to_dense() for n in c.differentials}
        for n in c.degrees():
            want = oracle_homology(dict(c.ranks), diffs, n, kind=kind, p=p)
            assert pair(homology(c, n)) == want
