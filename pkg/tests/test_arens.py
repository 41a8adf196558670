import numpy as np
import pytest

from adjcalc.arens import (
    AlgebraStruct,
    ArensCase,
    ModuleStruct,
    TargetKind,
    TriDerivationCandidate,
    associativity_residual,
    dual_module,
    first_arens,
    fourth_adjoint_check,
    is_tri_derivation,
    second_arens,
    self_module,
    membership_conditions,
    triderivation_basis,
)
from adjcalc.corpus import (
    row_algebra_example,
    group_algebra,
    inner_triderivation,
    leibniz_perturbation,
    matrix_algebra,
    random_triderivation,
    shipped_group,
)
from adjcalc.errors import InputError, StructureError
from adjcalc.tensor import MultiTensor, SpaceRef, flip, max_abs_difference

U = np.array([[1.0, 0.0], [0.0, 0.0]])
V = np.array([[0.0, 1.0], [0.0, 0.0]])


def row(x):
    """Matrix of the row-algebra element with coordinates x in the (u, v) basis."""
    return x[0] * U + x[1] * V


def coords(m):
    assert m[1, 0] == 0 and m[1, 1] == 0
    return np.array([m[0, 0], m[0, 1]])


def test_row_algebra_example_product_table():
    alg, _ = row_algebra_example()
    p = alg.product.values
    # uu = u, uv = v, vu = 0, vv = 0
    assert p[0, 0].tolist() == [1, 0]
    assert p[0, 1].tolist() == [0, 1]
    assert p[1, 0].tolist() == [0, 0]
    assert p[1, 1].tolist() == [0, 0]


def test_row_algebra_example_values_from_matrices():
    _, cand = row_algebra_example()
    for idx in np.ndindex(2, 2, 2):
        mats = [row(np.eye(2)[i]) for i in idx]
        abc = mats[0] @ mats[1] @ mats[2]
        want = coords(V @ abc - abc @ V)
        assert cand.D.values[idx].tolist() == want.tolist()
    assert cand.D.values[0, 0, 0].tolist() == [0, -1]  # D(u,u,u) = -v


def test_row_algebra_example_first_identity_at_uuuu():
    # D(uu,u,u) and D(u,u,u)u + uD(u,u,u) both equal -v
    alg, cand = row_algebra_example()
    D, u = cand.D.values, np.array([1.0, 0.0])
    uu = alg.multiply(u, u)
    lhs = np.einsum("abct,a,b,c->t", D, uu, u, u)
    duuu = D[0, 0, 0]
    rhs = alg.multiply(duuu, u) + alg.multiply(u, duuu)
    assert lhs.tolist() == [0, -1]
    assert rhs.tolist() == [0, -1]


def test_row_algebra_example_is_tri_derivation():
    alg, cand = row_algebra_example()
    res = is_tri_derivation(cand, alg)
    assert res and res.residuals == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("identity", [1, 2, 3])
def test_perturbations_break_target_identity(identity):
    alg, cand = row_algebra_example()
    bad = leibniz_perturbation(alg, cand, identity)
    res = is_tri_derivation(bad, alg)
    assert not res
    assert res.residuals[identity - 1] >= 0.05


def test_inner_triderivation_closed_form():
    alg, _ = row_algebra_example()
    a, b, d = 2.0, 5.0, -1.0
    cand = inner_triderivation(alg, [[a, b], [0.0, d]])
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y, z = (rng.integers(-3, 4, 2).astype(float) for _ in range(3))
        got = np.einsum("abct,a,b,c->t", cand.D.values, x, y, z)
        # [m, xyz] on row matrices
        want = np.array([0.0, (a - d) * x[0] * y[0] * z[1] - b * x[0] * y[0] * z[0]])
        assert got.tolist() == want.tolist()


def test_inner_triderivation_rejects_noncentral_full_matrix():
    with pytest.raises(StructureError):
        inner_triderivation(matrix_algebra(2), [[0.0, 1.0], [0.0, 0.0]])
    assert inner_triderivation(matrix_algebra(2), np.eye(2)).D.values.any() == False  # noqa: E712


def test_arens_products_equal_product_in_finite_dims():
    for alg in (matrix_algebra(2), group_algebra(shipped_group("S3")), row_algebra_example()[0]):
        pi = alg.product
        assert max_abs_difference(first_arens(pi), pi) == 0.0
        assert max_abs_difference(second_arens(pi), pi) == 0.0


def test_algebra_rejects_nonassociative():
    s = SpaceRef("A", 0, 2)
    vals = np.zeros((2, 2, 2))
    vals[0, 0, 1] = 1.0
    vals[1, 1, 0] = 1.0  # e0e0 = e1, e1e1 = e0
    t = MultiTensor((s, s), s, vals)
    assert associativity_residual(t) > 0
    with pytest.raises(StructureError, match="associative"):
        AlgebraStruct(s, t)


def test_dual_module_of_self_module_satisfies_axioms():
    alg = matrix_algebra(2)
    m = dual_module(self_module(alg))
    assert all(v == 0.0 for v in m.axiom_residuals().values())
    assert m.space.dual_level == 1


def test_module_rejects_bad_actions():
    alg = matrix_algebra(2)
    s = alg.space
    with pytest.raises(StructureError):
        ModuleStruct(alg, s, alg.product, flip(alg.product))


def test_candidate_space_checks():
    alg, cand = row_algebra_example()
    with pytest.raises(InputError):
        is_tri_derivation(cand, matrix_algebra(2))
    with pytest.raises(InputError):
        is_tri_derivation(TriDerivationCandidate(cand.D, TargetKind.MODULE), alg)


def test_arens_case_table():
    assert ArensCase(1).choices == ("□", "□", "□")
    assert ArensCase(8).choices == ("◇", "◇", "◇")
    assert len({c.choices for c in ArensCase.all()}) == 8
    with pytest.raises(InputError):
        ArensCase(9)


def _basis_combo(basis, seed):
    rng = np.random.default_rng(seed)
    vals = sum(c * b.values for c, b in zip(rng.integers(-2, 3, len(basis)), basis))
    return MultiTensor(basis[0].arg_spaces, basis[0].result_space, vals)


@pytest.mark.parametrize("target", ["algebra", "module", "dual"])
def test_triderivation_basis_elements_pass_everything(target):
    alg, _ = row_algebra_example()
    # the row algebra has no tri-derivations into A*, so the dual target uses X = A*
    mod = self_module(alg) if target == "module" else dual_module(self_module(alg))
    struct = alg if target == "algebra" else mod
    basis = triderivation_basis(struct, target)
    assert basis
    cand = TriDerivationCandidate(_basis_combo(basis, 3), TargetKind(target))
    assert is_tri_derivation(cand, struct, 1e-9)
    for case in ArensCase.all():
        assert fourth_adjoint_check(cand, struct, case, 1e-9)
        assert all(v.holds for v in membership_conditions(case, cand, struct, 1e-9))


def test_triderivation_space_dimension_on_row_algebra():
    alg, _ = row_algebra_example()
    assert len(triderivation_basis(alg, "algebra")) == 8


def test_full_matrix_algebra_has_only_zero_inner_triderivation():
    cand = random_triderivation(7, matrix_algebra(2))
    assert not cand.D.values.any()


def test_condition_counts_per_case():
    alg, cand = row_algebra_example()
    counts = [len(membership_conditions(k, cand, alg)) for k in range(1, 9)]
    assert counts == [5, 4, 3, 6, 5, 5, 5, 6]
