import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score

from overlaymap.factors import FactorError, assign_factors, factor_analysis, varimax
from overlaymap.synthetic import block_similarity


def exact_blocks(sizes):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return (labels[:, None] == labels[None, :]).astype(float), labels


@pytest.mark.parametrize("sizes", [[3, 3], [4, 2], [5, 7]])
def test_two_exact_blocks(sizes):
    sim, labels = exact_blocks(sizes)
    # the leading eigenvectors of an all-ones block matrix are the block indicators
    evals = np.sort(np.linalg.eigvalsh(sim))[::-1]
    assert evals[:2] == pytest.approx(sorted(sizes, reverse=True))
    model = factor_analysis(sim, 2)
    fa = assign_factors(model)
    assert adjusted_rand_score(labels, fa.assignment) == 1.0
    for i, f in enumerate(fa.assignment):
        row = np.abs(model.loadings[i])
        assert row[f] == pytest.approx(1.0)
        assert row[1 - f] == pytest.approx(0.0, abs=1e-9)


def test_identity_equal_variance():
    model = factor_analysis(np.eye(6), 6)
    np.testing.assert_allclose(model.explained_variance, np.ones(6), atol=1e-12)


def test_single_factor():
    rng = np.random.default_rng(0)
    sim, _ = block_similarity([4, 5], rng)
    fa = assign_factors(factor_analysis(sim, 1))
    assert set(fa.assignment) == {0}


def test_columns_sorted_by_variance():
    rng = np.random.default_rng(1)
    sim, _ = block_similarity([3, 9, 5], rng)
    ev = factor_analysis(sim, 3).explained_variance
    assert list(ev) == sorted(ev, reverse=True)


def test_errors():
    with pytest.raises(FactorError, match="symmetric"):
        factor_analysis(np.array([[1.0, 0.2], [0.5, 1.0]]), 1)
    with pytest.raises(FactorError):
        factor_analysis(np.eye(3), 4)
    with pytest.raises(FactorError):
        factor_analysis(np.eye(3), 0)


@pytest.mark.parametrize(
    "row, expected, tie",
    [((0.9, 0.1), 0, False), ((0.5, -0.8), 1, False), ((0.5, 0.5), 0, True)],
)
def test_assign_examples(row, expected, tie):
    fa = assign_factors(np.array([row]))
    assert fa.assignment == (expected,)
    assert (fa.ties == (0,)) is tie


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 30), st.integers(2, 6), st.integers(0, 2**32 - 1), st.booleans())
def test_varimax_preserves_communalities(n, f, seed, normalize):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, f))
    B, R = varimax(A, normalize=normalize)
    np.testing.assert_allclose((B**2).sum(axis=1), (A**2).sum(axis=1), atol=1e-9, rtol=0)
    np.testing.assert_allclose(R.T @ R, np.eye(f), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_exact_block_recovery(k, seed):
    rng = np.random.default_rng(seed)
    sizes = [int(s) for s in rng.integers(1, 9, size=k)]
    sim, labels = exact_blocks(sizes)
    fa = assign_factors(factor_analysis(sim, len(sizes)))
    assert adjusted_rand_score(labels, fa.assignment) == 1.0
