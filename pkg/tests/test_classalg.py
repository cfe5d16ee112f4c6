import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psucentre.classalg import (TensorError, StructTensor, check_tensor, centre_mod_p, default_threads,
                                dump_constants, structure_constants, structure_constants_reference)
from psucentre.commalg import loewy_profile, radical_basis
from psucentre.unitary import build_normalizer, conjugacy_classes, cyclic_group, permutation_group

from helpers import centre, classes, field, normalizer, psu, tensor


def s3():
    return permutation_group([(1, 0, 2), (1, 2, 0)], name="S3")


def brute_force_tensor(table, class_of, n, reps):
    """m[i, j, k] by scanning every ordered pair of group elements."""
    m = np.zeros((n, n, n), dtype=np.int64)
    where = {int(r): k for k, r in enumerate(reps)}
    for x, y in itertools.product(range(len(table)), repeat=2):
        z = int(table[x, y])
        if z in where:
            m[class_of[x], class_of[y], where[z]] += 1
    return m


def test_s3_products():
    G = s3()
    cd = conjugacy_classes(G)
    st_ = structure_constants(G, cd)
    sizes = cd.sizes.tolist()
    assert sizes == [1, 2, 3]
    e, c, t = 0, sizes.index(2), sizes.index(3)

    def vec(**coef):
        v = [0, 0, 0]
        for name, k in (("e", e), ("c", c), ("t", t)):
            v[k] = coef.get(name, 0)
        return v

    assert st_.product(t, t).tolist() == vec(e=3, c=3)
    assert st_.product(c, c).tolist() == vec(e=2, c=1)
    assert st_.product(t, c).tolist() == vec(t=2)
    for x in range(3):
        assert st_.product(e, x).tolist() == np.eye(3, dtype=int)[x].tolist()
    assert np.array_equal(st_.m, brute_force_tensor(G.table, cd.class_of, 3, cd.rep_index))


@pytest.mark.parametrize("perms", [
    [(1, 2, 3, 0)],
    [(1, 0, 2, 3), (1, 2, 3, 0)],
    [(1, 2, 0, 3), (0, 2, 3, 1)],
    [(1, 0, 3, 2), (2, 3, 0, 1)],
    [(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)],
])
def test_generic_groups_against_pair_scan(perms):
    G = permutation_group(perms)
    cd = conjugacy_classes(G)
    st_ = structure_constants(G, cd, threads=2)
    assert np.array_equal(st_.m, brute_force_tensor(G.table, cd.class_of, cd.n_classes, cd.rep_index))
    check_tensor(st_, associativity=True)


@st.composite
def small_perm_groups(draw):
    n = draw(st.integers(2, 5))
    k = draw(st.integers(1, 2))
    perms = [tuple(draw(st.permutations(range(n)))) for _ in range(k)]
    return permutation_group(perms)


@settings(max_examples=25)
@given(small_perm_groups())
def test_tensor_identities_on_random_permutation_groups(G):
    cd = conjugacy_classes(G)
    st_ = structure_constants(G, cd)
    assert np.array_equal(st_.m, structure_constants_reference(G, cd).m)
    checks = check_tensor(st_, associativity=True)
    assert all(checks.values())
    A = centre_mod_p(st_, 2)
    A.check()


@pytest.mark.parametrize("kind,q", [("N", 2), ("N", 3), ("N", 4), ("N", 5), ("G", 2)])
def test_sweep_equals_double_loop(kind, q):
    H = psu(q) if kind == "G" else normalizer(q)
    ref = structure_constants_reference(H, classes(kind, q))
    assert np.array_equal(ref.m, tensor(kind, q).m)


@pytest.mark.parametrize("kind,q", [("N", 2), ("N", 3), ("N", 4), ("N", 5), ("N", 8),
                                    ("G", 2), ("G", 3), ("G", 4), ("G", 5)])
def test_class_sum_identities(kind, q):
    st_ = tensor(kind, q)
    checks = check_tensor(st_, associativity=st_.n_classes <= 30)
    assert set(checks) >= {"nonnegative", "symmetry", "inversion", "scaling", "row_sums", "identity"}
    assert all(checks.values())
    # augmentation multiplicative over Z
    s = st_.class_sizes
    assert np.array_equal(np.einsum("ijk,k->ij", st_.m, s), np.outer(s, s))


def test_check_tensor_names_failure():
    st_ = tensor("N", 3)
    bad = st_.m.copy()
    bad[1, 2, 3] += 1
    with pytest.raises(TensorError, match="symmetry"):
        check_tensor(StructTensor(bad, st_.class_sizes, st_.inverse_class))


def test_threads_do_not_change_result():
    H = normalizer(4)
    cd = classes("N", 4)
    a = structure_constants(H, cd, threads=1)
    b = structure_constants(H, cd, threads=4)
    assert np.array_equal(a.m, b.m) and a.checksum() == b.checksum()


def test_thread_env(monkeypatch):
    monkeypatch.setenv("PSUCENTRE_THREADS", "3")
    assert default_threads() == 3


def test_backends_agree():
    from psucentre.kernels import BACKENDS
    F = field(4)
    results = []
    for backend in sorted(BACKENDS):
        N = build_normalizer(F, backend=backend)
        cd = conjugacy_classes(N)
        results.append(structure_constants(N, cd).m)
    assert all(np.array_equal(results[0], r) for r in results)


def test_centre_mod_p_metadata():
    st_ = tensor("G", 4)
    A = centre_mod_p(st_, 2)
    assert A.dim == 22
    assert A.unit.tolist() == [1] + [0] * 21
    assert np.array_equal(A.aug, st_.class_sizes % 2)
    A.check()


def test_maschke_cyclic():
    G = cyclic_group(3)
    A = centre_mod_p(structure_constants(G, conjugacy_classes(G)), 2)
    assert radical_basis(A).dim == 0


def test_normalizer_q3_radical():
    A = centre("N", 3)
    assert A.dim == 13 and radical_basis(A).dim == 12


def test_normalizer_q4_profile():
    assert loewy_profile(centre("N", 4)).dims == (21, 20, 4, 0)


def test_dump_constants(tmp_path):
    st_ = tensor("N", 2)
    path = tmp_path / "m.csv"
    rows = dump_constants(st_, path)
    text = path.read_text().splitlines()
    header = [l for l in text if l.startswith("#")]
    assert len(header) == st_.n_classes and "size=1" in header[0]
    body = text[len(header):]
    assert body[0] == "i,j,k,m" and len(body) - 1 == rows == int((st_.m != 0).sum())
    rebuilt = np.zeros_like(st_.m)
    for line in body[1:]:
        i, j, k, v = map(int, line.split(","))
        rebuilt[i, j, k] = v
    assert np.array_equal(rebuilt, st_.m)
