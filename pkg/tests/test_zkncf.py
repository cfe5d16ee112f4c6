import numpy as np
import pytest

from psucentre import gfp
from psucentre.commalg import Subspace, loewy_profile, radical_basis, radical_powers
from psucentre.zkncf import (BasisLabel, CaseAnalysisError, check_model, closed_bases, class_size,
                             crosscheck, gamma_of, label_element, lmn, lmn_bruteforce, loewy_closed,
                             mult_table, n_classes, presentation, prime_power, psi_cube_fact, reps)

from helpers import field, normalizer

Q16 = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
Q32 = Q16 + [17, 19, 23, 25, 27, 29, 31, 32]

D0 = BasisLabel("D", 0)
T1 = BasisLabel("T", 0)


@pytest.fixture(scope="module", params=Q16)
def model(request):
    return mult_table(request.param)


def test_prime_power():
    assert prime_power(8) == (2, 3) and prime_power(25) == (5, 2) and prime_power(7) == (7, 1)
    for bad in (1, 6, 12, 0):
        with pytest.raises(ValueError):
            prime_power(bad)


@pytest.mark.parametrize("q,count", [(4, 21), (8, 27), (2, 5), (64, 4161)])
def test_label_counts(q, count):
    assert len(reps(q)) == n_classes(q) == count


def test_label_counts_by_kind():
    ls = reps(2)
    assert [sum(l.kind == k for l in ls) for k in "DTU"] == [1, 1, 3]
    assert str(ls[0]) == "D[0]"


def test_class_sizes():
    assert class_size(4, BasisLabel("U", 0)) == 60
    assert class_size(4, T1) == 3
    for q in Q16:
        assert class_size(q, D0) == 1
        sizes = [class_size(q, l) for l in reps(q)]
        assert sum(sizes) == q**3 * (q * q - 1) // gamma_of(q)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8])
def test_class_sizes_match_brute_force(q):
    from helpers import classes
    got = sorted(classes("N", q).sizes.tolist())
    assert got == sorted(class_size(q, l) for l in reps(q))


@pytest.mark.parametrize("q,want", [(8, (8, 6, 9)), (2, (0, 0, 1)), (5, (3, 2, 4)), (11, (15, 12, 16))])
def test_lmn_values(q, want):
    assert lmn(q) == want


@pytest.mark.parametrize("q", [q for q in Q32 if gamma_of(q) == 3])
def test_lmn_against_field_scan(q):
    l, m, n = lmn(q)
    assert lmn_bruteforce(field(q)) == (l, m, n)
    assert n == l + 1 and n + 2 * m == (q * q - 1) // 3


def test_lmn_undefined_when_gamma_one():
    with pytest.raises(ValueError):
        lmn(4)
    with pytest.raises(ValueError):
        lmn_bruteforce(field(4))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 11, 17])
def test_psi_cube_fact(q):
    assert psi_cube_fact(field(q))


# -- table identities ----------------------------------------------------------------

def test_table_identities(model):
    checks = check_model(model, associativity=True)
    assert checks == {"commutative": True, "unital": True, "augmentation": True, "associative": True}


@pytest.mark.parametrize("q", [q for q in Q32 if q > 16])
def test_table_augmentation_up_to_32(q):
    checks = check_model(mult_table(q), associativity=False)
    assert all(checks.values())


def test_check_model_detects_corruption():
    m = mult_table(4)
    I, J, K, C = m.entries
    C = C.copy()
    C[len(C) // 2] += 1
    bad = type(m)(q=m.q, p=m.p, r=m.r, gamma=m.gamma, labels=m.labels, sizes=m.sizes,
                  entries=(I, J, K, C))
    checks = check_model(bad, associativity=True)
    assert not all(checks.values())


def test_specific_products_q4():
    m = mult_table(4)
    assert m.product(T1, T1) == {D0: 3, T1: 2}
    U = BasisLabel("U", 0)
    assert m.product(U, U) == {D0: 60, T1: 60, U: 56}


def test_specific_products_q8():
    m = mult_table(8)
    U = [l for l in m.labels if l.kind == "U"]
    for x in U:
        others = [y for y in U if y != x]
        want = {D0: 168, T1: 168, x: 64}
        want.update({y: 48 for y in others})
        assert m.product(x, x) == want


def test_products_with_T1(model):
    q = model.q
    for lab in model.labels:
        got = model.product(T1, lab)
        if lab.kind == "U":
            assert got == {lab: q - 1}
        if lab.kind == "D" and lab.log % (q - 1) == 0 and lab.log:
            assert got == {BasisLabel("T", lab.log): 1}


def test_dense_refuses_large():
    with pytest.raises(MemoryError):
        mult_table(31).dense()


def test_large_q_without_dense_table():
    m = mult_table(64)
    assert m.dim == 4161
    assert int(m.sizes.sum()) == 64**3 * (64 * 64 - 1)


# -- Loewy structure ------------------------------------------------------------------

@pytest.mark.parametrize("q,want", [(4, (21, 20, 4)), (8, (27, 26, 2)), (2, (5, 4, 0))])
def test_loewy_closed_values(q, want):
    assert loewy_closed(q) == want


def test_loewy_closed_matches_computed(model):
    d, j1, j2 = loewy_closed(model.q)
    want = (d, j1) + ((j2,) if j2 else ()) + (0,)
    assert loewy_profile(model.algebra()).dims == want


def test_closed_bases_span_the_radical_powers(model):
    A = model.algebra()
    p = A.p
    Jb, J2b = closed_bases(model)
    powers = radical_powers(A)
    J = Subspace.span(Jb, p, A.dim)
    assert J == radical_basis(A)
    J2 = Subspace.span(J2b, p, A.dim) if len(J2b) else Subspace.zero(A.dim)
    assert J2 == powers[1]


def test_J2_generator_step(model):
    q, p = model.q, model.p
    A = model.algebra()
    one = np.eye(A.dim, dtype=np.int64)
    T = (one[0] + one[model.index[T1]]) % p
    for lab in model.labels:
        if lab.kind == "D" and lab.log and lab.log % (q - 1) == 0:
            x = model.index[lab]
            want = (one[x] + one[model.index[BasisLabel("T", lab.log)]]) % p
            assert np.array_equal(A.mul(one[x], T), want)
    # (T_1 + 1)^2 = 0
    assert not A.mul(T, T).any()


def test_presentation(model):
    pres = presentation(model.q, model=model)
    failed = [r["relation"] for r in pres["relations"] if not r["vanishes"]]
    assert failed == []
    assert pres["rank_of_images"] == pres["dimension"] == model.dim
    assert pres["verified"]


def test_presentation_rejects_wrong_characteristic():
    with pytest.raises(ValueError):
        presentation(4, 3)


# -- crosscheck -------------------------------------------------------------------------

@pytest.mark.parametrize("q", [2, 3, 4, 5, 8])
def test_crosscheck(q):
    rep = crosscheck(field(q))
    assert rep["bijection"] and rep["sizes_match"]
    assert rep["mismatch_count"] == 0 and rep["match"]
    assert rep["pairs_compared"] == n_classes(q) * (n_classes(q) + 1) // 2


def test_crosscheck_reports_mismatch(monkeypatch):
    import psucentre.zkncf as z
    real = z.mult_table

    def perturbed(q):
        m = real(q)
        I, J, K, C = m.entries
        C = C.copy()
        hit = np.flatnonzero((I == 1) & (J == 1))[0]
        C[hit] += 1
        return type(m)(q=m.q, p=m.p, r=m.r, gamma=m.gamma, labels=m.labels, sizes=m.sizes,
                       entries=(I, J, K, C))

    monkeypatch.setattr(z, "mult_table", perturbed)
    rep = z.crosscheck(field(3))
    assert not rep["match"] and rep["mismatch_count"] == 1
    assert rep["mismatches"][0]["pair"] == [str(reps(3)[1])] * 2


@pytest.mark.parametrize("q", [2, 3, 4])
def test_label_elements_lie_in_N_and_represent_distinct_classes(q):
    from helpers import classes
    N = normalizer(q)
    cd = classes("N", q)
    seen = set()
    for lab in reps(q):
        i = N.lookup_matrix(label_element(field(q), lab))
        assert i >= 0
        seen.add(int(cd.class_of[i]))
        assert int(cd.sizes[cd.class_of[i]]) == class_size(q, lab)
    assert len(seen) == cd.n_classes


def test_case_analysis_error_is_an_assertion():
    assert issubclass(CaseAnalysisError, AssertionError)


def test_rank_of_dense_model_mod_p():
    m = mult_table(3)
    assert gfp.rank(m.algebra().sc.reshape(m.dim, -1), 3) == m.dim
