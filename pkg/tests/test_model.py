"""Class deciders, factorizations, lifting, hom complexes."""

import random

import pytest

from chainspectra.complexes import (ChainMap, HomologyGroup, direct_sum,
                                    homology, identity_map, is_quasi_iso,
                                    moore, sphere, zero_complex, zero_map)
from chainspectra.generators import (random_chain_map, random_complex,
                                     random_quasi_iso_source)
from chainspectra.model import (MODE_COF_TRIVFIB, MODE_TRIVCOF_FIB,
                                construct_lift, factorize, hom_complex,
                                is_cofibration, is_fibration,
                                is_weak_equivalence)
from chainspectra.matrices import SparseMatrix
from chainspectra.rings import CONNECTIVE, UNBOUNDED, Backend, Fp, Q, Z

from oracles import brute_homotopy_classes_f2, oracle_hom_complex_homology

CONN = Backend(Z, CONNECTIVE)
UNB = Backend(Z, UNBOUNDED)


def doubling(backend):
    s = sphere(backend, 0)
    two = SparseMatrix.from_dense(backend.ring, [[backend.ring.canon(2)]])
    return ChainMap(s, s, {0: two})


def test_cofibration_examples():
    rng = random.Random(30)
    x = random_complex(rng, CONN, max_degree=3, max_total_rank=6)
    assert is_cofibration(identity_map(x))
    assert is_cofibration(zero_map(zero_complex(CONN), x))
    assert not is_cofibration(doubling(CONN))
    assert not is_cofibration(doubling(UNB))


def test_fibration_examples():
    x = moore(CONN, 3, 1)
    assert is_fibration(zero_map(x, zero_complex(CONN)))
    # a degree-0-only failure of surjectivity is forgiven connectively
    assert is_fibration(doubling(CONN))
    assert not is_fibration(doubling(UNB))


def test_factorize_outputs_pass_class_deciders():
    rng = random.Random(31)
    backends = [CONN, UNB, Backend(Fp(2), CONNECTIVE), Backend(Q, UNBOUNDED)]
    for backend in backends:
        for _ in range(6):
            x = random_complex(rng, backend, max_degree=3, max_total_rank=6)
            y = random_complex(rng, backend, max_degree=3, max_total_rank=6)
            f = random_chain_map(rng, x, y)

            r = factorize(f, MODE_COF_TRIVFIB)
            assert r.second @ r.first == f
            assert is_cofibration(r.first)
            assert is_fibration(r.second) and is_quasi_iso(r.second)

            r = factorize(f, MODE_TRIVCOF_FIB)
            assert r.second @ r.first == f
            assert is_cofibration(r.first) and is_quasi_iso(r.first)
            assert is_fibration(r.second)


def test_factorize_identity_keeps_homotopy_type():
    x = moore(CONN, 2, 1)
    for mode in (MODE_COF_TRIVFIB, MODE_TRIVCOF_FIB):
        r = factorize(identity_map(x), mode)
        assert is_quasi_iso(r.first) and is_quasi_iso(r.second)


def test_factorize_rejects_unknown_mode():
    x = sphere(CONN, 0)
    with pytest.raises(ValueError):
        factorize(identity_map(x), "both")


def test_two_out_of_three():
    rng = random.Random(32)
    for backend in (CONN, UNB):
        for _ in range(10):
            c = random_complex(rng, backend, max_degree=3, max_total_rank=6)
            d = random_complex(rng, backend, max_degree=3, max_total_rank=6)
            q = random_quasi_iso_source(rng, c)
            g = random_chain_map(rng, c, d)
            assert is_weak_equivalence(q)
            # q is a weak equivalence, so g.q is one exactly when g is
            assert is_weak_equivalence(g @ q) == is_weak_equivalence(g)
            q2 = random_quasi_iso_source(rng, q.source)
            assert is_weak_equivalence(q @ q2)


def test_lift_exists_against_trivial_fibration():
    rng = random.Random(33)
    for backend in (CONN, UNB):
        for _ in range(6):
            a = random_complex(rng, backend, max_degree=2, max_total_rank=4)
            s = random_complex(rng, backend, max_degree=2, max_total_rank=3)
            sm = direct_sum([a, s])
            i = sm.inclusions[0]
            assert is_cofibration(i)

            x0 = random_complex(rng, backend, max_degree=2, max_total_rank=4)
            y0 = random_complex(rng, backend, max_degree=2, max_total_rank=4)
            p = factorize(random_chain_map(rng, x0, y0), MODE_COF_TRIVFIB).second
            assert is_fibration(p) and is_quasi_iso(p)

            top = random_chain_map(rng, a, p.source)
            rest = random_chain_map(rng, s, p.target)
            bottom = (p @ top) @ sm.projections[0] + rest @ sm.projections[1]
            assert bottom @ i == p @ top

            h = construct_lift(i, p, top, bottom)
            assert h is not None
            assert h @ i == top and p @ h == bottom


def test_lift_unsolvable_returns_none():
    s = sphere(UNB, 0)
    z = zero_complex(UNB)
    i = zero_map(z, s)
    h = construct_lift(i, doubling(UNB), zero_map(z, s), identity_map(s))
    assert h is None


def test_hom_complex_endomorphisms_of_unit():
    s = sphere(CONN, 0)
    h = hom_complex(s, s)
    assert not h.backend.connective
    assert homology(h, 0) == HomologyGroup(1, ())
    assert homology(h, 1).is_zero and homology(h, -1).is_zero


def test_hom_complex_moore_to_sphere_is_ext():
    m = moore(CONN, 2, 0)
    s = sphere(CONN, 0)
    h = hom_complex(m, s)
    assert homology(h, 0).is_zero
    assert homology(h, -1) == HomologyGroup(0, (2,))


def test_hom_complex_zero_source():
    x = moore(CONN, 5, 2)
    assert hom_complex(zero_complex(CONN), x).is_zero
    assert hom_complex(x, zero_complex(CONN)).is_zero


def dense_data(c):
    return dict(c.ranks), {n: c.diff(n).to_dense() for n in c.differentials}


def test_hom_homology_matches_universal_coefficients():
    rng = random.Random(34)
    for kind, backend, p in (("Z", UNB, None), ("Z", CONN, None),
                             ("Fp", Backend(Fp(3), CONNECTIVE), 3)):
        for _ in range(8):
            c = random_complex(rng, backend, max_degree=3, max_total_rank=5)
            d = random_complex(rng, backend, max_degree=3, max_total_rank=5)
            h = hom_complex(c, d)
            cr, cd = dense_data(c)
            dr, dd = dense_data(d)
            for n in range(-4, 5):
                got = homology(h, n)
                want = oracle_hom_complex_homology(cr, cd, dr, dd, n, kind, p)
                assert (got.free_rank, sorted(got.torsion)) == \
                    (want[0], sorted(want[1]))


def test_hom_h0_counts_homotopy_classes_f2():
    rng = random.Random(35)
    backend = Backend(Fp(2), CONNECTIVE)
    for _ in range(6):
        c = random_complex(rng, backend, max_degree=2, max_total_rank=3)
        d = random_complex(rng, backend, max_degree=2, max_total_rank=3)
        h = hom_complex(c, d)
        cr, cd = dense_data(c)
        dr, dd = dense_data(d)
        classes = brute_homotopy_classes_f2(
            cr, {n: [[v % 2 for v in row] for row in m] for n, m in cd.items()},
            dr, {n: [[v % 2 for v in row] for row in m] for n, m in dd.items()})
        assert 2 ** homology(h, 0).free_rank == classes
