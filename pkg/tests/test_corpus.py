import itertools

import numpy as np
import pytest

from adjcalc.arens import associativity_residual, is_tri_derivation
from adjcalc.corpus import (
    SHIPPED_GROUPS,
    CayleyTable,
    conv_trilinear,
    row_algebra_example,
    group_algebra,
    load_cayley,
    matrix_algebra,
    parse_cayley,
    random_tensor,
    random_triderivation,
    shipped_group,
    structure_constants,
)
from adjcalc.errors import CayleyError, InputError, StructureError
from adjcalc.tensor import is_regular

ORDERS = {"Z2": 2, "Z3": 3, "Z4": 4, "Klein": 4, "S3": 6}


def cyclic(n):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def test_cyclic_tables_match_modular_addition():
    for name, n in [("Z2", 2), ("Z3", 3), ("Z4", 4)]:
        assert shipped_group(name).table.tolist() == cyclic(n)


def test_klein_is_xor():
    assert shipped_group("Klein").table.tolist() == [[i ^ j for j in range(4)] for i in range(4)]


def test_s3_matches_permutation_composition():
    perms = list(itertools.permutations(range(3)))
    idx = {p: i for i, p in enumerate(perms)}
    want = [[idx[tuple(p[q[x]] for x in range(3))] for q in perms] for p in perms]
    g = shipped_group("S3")
    assert g.table.tolist() == want
    assert not g.is_abelian()


@pytest.mark.parametrize("name", SHIPPED_GROUPS)
def test_every_single_entry_mutation_is_rejected(name):
    table = shipped_group(name).table
    n = table.shape[0]
    for i, j in itertools.product(range(n), repeat=2):
        for v in range(n):
            if v == table[i, j]:
                continue
            bad = table.copy()
            bad[i, j] = v
            with pytest.raises(CayleyError) as exc:
                CayleyTable(bad)
            assert exc.value.axioms


def test_violation_witnesses():
    bad = np.array(cyclic(3))
    bad[1, 1] = 1  # 1+1 should be 2
    with pytest.raises(CayleyError) as exc:
        CayleyTable(bad)
    axioms = exc.value.axioms
    assert "latin_rows" in axioms and "latin_columns" in axioms
    with pytest.raises(CayleyError, match="range"):
        CayleyTable([[0, 5], [5, 0]])


def test_non_associative_latin_square_rejected():
    # a loop of order 5 that is not a group
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(CayleyError) as exc:
        CayleyTable(loop)
    assert exc.value.axioms == ["associativity"]


def test_parse_cayley_round_trip_and_errors(tmp_path):
    g = shipped_group("S3")
    assert parse_cayley(g.to_text()).table.tolist() == g.table.tolist()
    path = tmp_path / "g.txt"
    path.write_text("# comment\n2\n0 1 # row\n1 0\n")
    assert load_cayley(path).order == 2
    with pytest.raises(InputError, match="expected 2 table rows"):
        parse_cayley("2\n0 1\n")
    with pytest.raises(InputError, match="line 3"):
        parse_cayley("2\n0 1\n1 x\n")
    with pytest.raises(InputError, match="empty"):
        parse_cayley("# nothing\n")
    with pytest.raises(InputError):
        shipped_group("Z7")


@pytest.mark.parametrize("name", SHIPPED_GROUPS)
def test_group_algebra(name):
    g = shipped_group(name)
    alg = group_algebra(g)
    assert alg.dim == ORDERS[name]
    assert associativity_residual(alg.product) == 0.0
    # delta_i * delta_j = delta_{ij}
    for i, j in itertools.product(range(g.order), repeat=2):
        assert np.argmax(alg.product.values[i, j]) == g.mul(i, j)
    r = is_regular(conv_trilinear(g))
    assert r and r.residual == 0.0


def test_matrix_algebra_constants():
    alg = matrix_algebra(2)
    p = alg.product.values
    # E_ij E_kl = delta_jk E_il
    for i, j, k, l in itertools.product(range(2), repeat=4):
        want = np.zeros(4)
        if j == k:
            want[2 * i + l] = 1.0
        assert p[2 * i + j, 2 * k + l].tolist() == want.tolist()


def test_structure_constants_requires_closure():
    with pytest.raises(StructureError):
        structure_constants(np.array([[[0.0, 1.0], [1.0, 0.0]]]))


def test_random_tensor_seeded():
    a = random_tensor(3, (2, 3, 2, 2))
    assert a == random_tensor(3, (2, 3, 2, 2))
    assert a != random_tensor(4, (2, 3, 2, 2))
    ints = random_tensor(3, (2, 2, 2, 2), integer=True)
    assert np.array_equal(ints.values, np.round(ints.values))
    with pytest.raises(InputError):
        random_tensor(0, (2,))


def test_random_triderivations_on_row_algebra():
    alg, _ = row_algebra_example()
    seen = set()
    for seed in range(20):
        cand = random_triderivation(seed, alg)
        assert is_tri_derivation(cand, alg)
        seen.add(cand.D.values.tobytes())
    assert len(seen) == 20
    assert random_triderivation(5, alg).D == random_triderivation(5, alg).D
