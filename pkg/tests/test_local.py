import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from filiaut.algebra import FAMILIES, AlgebraFamily, Family
from filiaut.automorphisms import (
    build_automorphism,
    family_algebra,
    is_automorphism,
    random_automorphism,
)
from filiaut.linalg import Matrix
from filiaut.local import (
    SHAPES,
    WitnessError,
    counterexample,
    is_local_automorphism,
    local_shape,
    matches_local_shape,
    random_local_matrix,
    random_vector,
    sample_vectors,
    shape_discrepancy_report,
    solve_witness,
)
from filiaut.scalars import Q, close, to_complex

import oracle


def fam(tag, n):
    return AlgebraFamily(Family.parse(tag), n)


# --- shapes ------------------------------------------------------------------


def test_mu0_lower_triangular_passes():
    rows = [[Q(0)] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i + 1):
            rows[i][j] = Q(i + j + 1)
    assert matches_local_shape(fam("mu0", 4), Matrix(rows))


def test_mu11_entry_above_diagonal_fails():
    m = Matrix.identity(5).with_entry(2, 3, Q(1))
    v = matches_local_shape(fam("mu11", 5), m)
    assert not v and v.detail["position"] == [3, 4]


def test_mu14_corner_must_be_one():
    m = Matrix.identity(5).with_entry(4, 4, Q(2))
    for variant in SHAPES:
        v = matches_local_shape(fam("mu14", 5), m, variant)
        assert not v and v.detail["position"] == [5, 5]


def test_zero_diagonal_rejected():
    v = matches_local_shape(fam("mu0", 3), Matrix.diag([1, 0, 1]))
    assert not v and v.detail["position"] == [2, 2]


def test_filiform_row_n_pattern():
    m = Matrix.identity(5).with_entry(4, 2, Q(1))
    assert not matches_local_shape(fam("mu13", 5), m)
    assert matches_local_shape(fam("mu13", 5), Matrix.identity(5).with_entry(4, 0, Q(3)))
    assert matches_local_shape(fam("mu13", 5), Matrix.identity(5).with_entry(3, 4, Q(3)))


def test_derived_frees_entry_above_the_corner_for_mu12_mu14():
    for tag in ("mu12", "mu14"):
        m = Matrix.identity(5).with_entry(2, 4, Q(-3))
        assert matches_local_shape(fam(tag, 5), m, "derived")
        assert not matches_local_shape(fam(tag, 5), m, "literal")


@pytest.mark.parametrize("tag", FAMILIES)
@pytest.mark.parametrize("n", range(4, 7))
def test_automorphisms_have_local_shape(tag, n):
    f = fam(tag, n)
    for seed in range(100):
        m = build_automorphism(random_automorphism(f, seed=seed))
        assert matches_local_shape(f, m, "derived"), seed


@pytest.mark.parametrize("tag", FAMILIES)
@pytest.mark.parametrize("variant", SHAPES)
def test_generated_matrices_fit_their_shape(tag, variant):
    for n in (4, 5, 6):
        f = fam(tag, n)
        for seed in range(20):
            assert matches_local_shape(f, random_local_matrix(f, seed=seed, variant=variant), variant)


def test_shape_variant_validated():
    with pytest.raises(ValueError):
        local_shape(fam("mu0", 3), "sideways")


# --- witnesses ---------------------------------------------------------------


def test_witness_example_branch_1():
    r = solve_witness(fam("mu0", 3), Matrix.diag([1, 2, 1]), (1, 1, 0))
    assert r.branch == 1 and r.mode == "exact" and r.residual == 0
    assert r.params.a == (1, 1, -2)
    assert build_automorphism(r.params).col(0) == (1, 1, -2)


def test_witness_identity():
    for n in (2, 3, 5):
        r = solve_witness(fam("mu0", n), Matrix.identity(n), sample_vectors(n, n, 3)[n - 1])
        assert r.params.a == (1,) + (0,) * (n - 1) and r.residual == 0


def test_witness_example_branch_2_irrational():
    phi = Matrix.diag([1.0, 2.0, 1.0])
    r = solve_witness(fam("mu0", 3), phi, (0.0, 1.0, 0.0))
    assert r.branch == 2 and r.mode == "approx"
    assert abs(to_complex(r.params.a[0]) - 2**0.5) < 1e-9
    assert r.residual <= 1e-9
    # exact input: the root is rounded to a nearby rational, reported as approx
    r = solve_witness(fam("mu0", 3), Matrix.diag([1, 2, 1]), (0, 1, 0))
    assert r.mode == "approx" and r.residual <= 1e-9
    assert abs(float(r.params.a[0]) ** 2 - 2) < 1e-9


def test_witness_zero_vector_rejected():
    with pytest.raises(WitnessError):
        solve_witness(fam("mu0", 3), Matrix.identity(3), (0, 0, 0))


def test_witness_shape_violation_rejected():
    with pytest.raises(WitnessError, match="shape"):
        solve_witness(fam("mu0", 3), Matrix.identity(3).with_entry(0, 1, Q(1)), (1, 0, 0))


def test_witness_report_json():
    r = solve_witness(fam("mu11", 4), counterexample("mu11", 4), (0, 1, 2, 3))
    out = r.to_json()
    assert set(out) == {"x", "branch", "residual", "mode", "params"}
    assert out["x"] == ["0", "1", "2", "3"] and out["branch"] == 2


def _check_report(f, phi, x, r):
    assert r.branch == next(i + 1 for i, t in enumerate(x) if t != 0)
    m = r.branch
    a1 = r.params.a[0]
    want = phi[m - 1, m - 1]
    hard = f.tag is Family.MU0 or m < f.n - 2 or x[f.n - 1] == 0
    if hard:
        # branch m forces a_1^m = b(m, m) (sqrt(a_1)^{2m} for mu12)
        if r.mode == "exact":
            assert a1**m == want
        else:
            assert close(to_complex(a1) ** m, to_complex(want), 1e-9)
    w = r.matrix
    if r.mode == "exact":
        assert oracle.mat_vec(w.rows, x) == oracle.mat_vec(phi.rows, x)
        assert oracle.is_automorphism(f.tag.value, f.n, w.rows)
    else:
        assert r.residual <= 1e-9
        assert is_automorphism(family_algebra(f), w)


@given(st.sampled_from(FAMILIES), st.integers(4, 6), st.integers(0, 10**6), st.data())
def test_witness_validity(tag, n, seed, data):
    f = fam(tag, n)
    phi = random_local_matrix(f, seed=seed)
    branch = data.draw(st.integers(1, n))
    x = random_vector(random.Random(seed), n, branch)
    _check_report(f, phi, x, solve_witness(f, phi, x))


@pytest.mark.parametrize("tag", FAMILIES)
def test_every_branch_solved(tag):
    for n in (4, 5, 6):
        f = fam(tag, n)
        for seed in range(5):
            phi = random_local_matrix(f, seed=seed)
            for x in sample_vectors(n, 4 * n, seed):
                _check_report(f, phi, x, solve_witness(f, phi, x))


def test_gaussian_witness_is_exact_like():
    # a_1^2 = -1 needs i; the witness stays exact over Q(i)
    f = fam("mu0", 3)
    r = solve_witness(f, Matrix.diag([1, -1, 1]), (0, 1, 0))
    assert r.mode == "exact"
    assert r.params.a[0] ** 2 == -1
    assert oracle.is_automorphism("mu0", 3, r.matrix.rows)


# --- local verdicts and counterexamples --------------------------------------


def test_automorphisms_are_local():
    for tag in FAMILIES:
        f = fam(tag, 5)
        m = build_automorphism(random_automorphism(f, seed=1))
        assert is_local_automorphism(f, m, samples=50)


def test_local_examples_mu0():
    f = fam("mu0", 3)
    m = Matrix.diag([1, 2, 1])
    assert is_local_automorphism(f, m, samples=60)
    assert not is_automorphism(family_algebra(f), m)
    v = is_local_automorphism(f, Matrix.identity(3).with_entry(0, 1, Q(1)))
    assert not v and v.detail["shape"] == "fail"


def test_counterexample_mu0_n3():
    assert counterexample("mu0", 3) == Matrix.diag([1, 2, 1])


def test_counterexample_mu11_fails_at_pair_1_1():
    m = counterexample("mu11", 5)
    assert m == Matrix.identity(5).with_entry(1, 1, Q(2))
    v = is_automorphism(family_algebra(fam("mu11", 5)), m)
    assert not v and v.detail["pair"] == [1, 1]
    assert oracle.first_hom_failure("mu11", 5, m.rows) == (1, 1)


@pytest.mark.parametrize("tag", FAMILIES)
@pytest.mark.parametrize("n", range(4, 7))
def test_counterexample_duality(tag, n):
    f = fam(tag, n)
    m = counterexample(f)
    assert not oracle.is_automorphism(tag.value, n, m.rows)
    v = is_local_automorphism(f, m, samples=1000, seed=n)
    assert v, v.reason
    assert len(v.detail["witnesses"]) == 1000


@pytest.mark.parametrize("n", range(4, 7))
def test_mu14_scaled_diagonal_is_not_local(n):
    """Identity with (3, 3) = 2 is not a local automorphism of mu14.

    Every mu14 automorphism has a_1 = 1, hence coefficient 1 of e_3 in phi(e_3);
    Phi(e_3) = 2 e_3 cannot be matched.
    """
    f = fam("mu14", n)
    m = Matrix.identity(n).with_entry(2, 2, Q(2))
    e3 = tuple(Q(int(i == 2)) for i in range(n))
    for seed in range(30):
        w = build_automorphism(random_automorphism(f, seed=seed))
        assert oracle.mat_vec(w.rows, e3)[2] == 1
    with pytest.raises(WitnessError):
        solve_witness(f, m, e3, shape="literal")
    assert not is_local_automorphism(f, m, samples=50, shape="literal")


def test_mu12_generic_diagonal_is_not_local():
    """(2, 2) = 2 clashes with (n, n) = 1 at points mixing e_2 and e_n."""
    f = fam("mu12", 5)
    m = Matrix.identity(5).with_entry(1, 1, Q(2))
    with pytest.raises(WitnessError):
        solve_witness(f, m, (0, 1, 0, 0, 1), shape="literal")
    assert not matches_local_shape(f, m, "derived")


def test_local_verdict_lists_failures():
    f = fam("mu13", 5)
    m = Matrix.identity(5).with_entry(1, 1, Q(3))
    v = is_local_automorphism(f, m, samples=25, shape="literal")
    assert not v and v.detail["failures"]
    assert all("x" in item and "reason" in item for item in v.detail["failures"])


# --- shape comparison --------------------------------------------------------


def test_discrepancy_report_mu14():
    rep = shape_discrepancy_report(fam("mu14", 5), count=10, per_branch=2)
    assert rep["certified_shapes"] == ["derived"]
    assert rep["variants"]["derived"]["disagreements"] == []
    lit = rep["variants"]["literal"]
    assert lit["disagreements"] and not lit["certified"]
    for d in lit["disagreements"]:
        assert d["shape_says"] != d["witnesses"]
        if d["witnesses"] == "fail":
            assert "failing_x" in d


def test_discrepancy_report_mu0_both_agree():
    rep = shape_discrepancy_report(fam("mu0", 4), count=5, per_branch=2)
    assert rep["certified_shapes"] == list(SHAPES)
