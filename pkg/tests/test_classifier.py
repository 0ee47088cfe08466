import numpy as np
import pytest

from meanherd import embedding as emb
from meanherd.classifier import (
    MeanClassifier,
    fit,
    kde_score,
    margin_for_error,
    margin_risk,
    mean_norm,
    mmd,
    select_kernel,
)
from meanherd.data import DiscreteDistribution, LabeledSample, synth_blobs
from meanherd.errors import InputError
from meanherd.kernels import KernelSpec, cross_gram


def toy_sample() -> LabeledSample:
    return LabeledSample(
        np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
        np.array([1, 1, -1, -1]),
    )


def test_fit_scores_match_kernel_sum():
    S = toy_sample()
    spec = KernelSpec("gaussian", bandwidth=1.0)
    clf = fit(S, spec)
    x = np.array([0.3, 0.2])
    expected = float(
        np.mean(S.labels * cross_gram(spec, x[np.newaxis], S.instances)[0])
    )
    assert clf.score(x) == pytest.approx(expected, abs=1e-15)


def test_fit_distribution_uses_probabilities():
    P = DiscreteDistribution(
        support=(((1.0,), 1), ((-1.0,), -1)), probabilities=np.array([0.9, 0.1])
    )
    clf = fit(P, KernelSpec("linear"))
    # score(x) = 0.9 * x - 0.1 * (-1) * (-x) ... = 0.9 x + 0.1 x = x
    assert clf.score(np.array([2.0])) == pytest.approx(2.0, abs=1e-15)


def test_predict_sign_and_abstention():
    S = LabeledSample(np.array([[1.0], [-1.0]]), np.array([1, -1]))
    clf = fit(S, KernelSpec("linear"))
    assert clf.label(np.array([0.5])) == 1
    assert clf.label(np.array([-0.5])) == -1
    assert clf.label(np.array([0.0])) == 0


def test_weights_validation():
    with pytest.raises(InputError):
        MeanClassifier(
            kernel=KernelSpec("linear"),
            alphas=np.array([0.5, 0.6]),
            labels=np.array([1, -1]),
            points=np.array([[0.0], [1.0]]),
        )


def test_json_roundtrip_deterministic():
    clf = fit(toy_sample(), KernelSpec("gaussian", bandwidth=2.0))
    text = clf.to_json()
    assert text == clf.to_json()
    back = MeanClassifier.from_json(text)
    x = np.array([0.1, -0.7])
    assert back.score(x) == pytest.approx(clf.score(x), abs=1e-15)


# ---------------------------------------------------------------------------
# Geometry


def test_mean_norm_linear_kernel_matches_feature_space():
    S = toy_sample()
    geo = mean_norm(S, KernelSpec("linear"))
    explicit = np.mean(S.labels[:, np.newaxis] * S.instances, axis=0)
    assert geo.norm == pytest.approx(np.linalg.norm(explicit), abs=1e-12)
    assert geo.min_linear_loss == pytest.approx(1.0 - geo.norm, abs=1e-15)


def test_mean_norm_bounded_kernel_in_unit_interval():
    S = synth_blobs(40, 2, 3.0, seed=1)
    geo = mean_norm(S, KernelSpec("gaussian", bandwidth=1.0))
    assert 0.0 <= geo.norm <= 1.0
    assert 0.0 <= geo.min_linear_loss <= 1.0


def test_mean_norm_cancelling_sample_is_zero():
    S = LabeledSample(np.array([[1.0], [1.0]]), np.array([1, -1]))
    geo = mean_norm(S, KernelSpec("gaussian", bandwidth=1.0))
    assert geo.norm == 0.0


def test_select_kernel_lowest_index_tie_break():
    S = toy_sample()
    k = KernelSpec("gaussian", bandwidth=1.0)
    sel = select_kernel(S, [k, k])
    assert sel.index == 0
    assert sel.min_losses[0] == sel.min_losses[1]


def test_select_kernel_prefers_separating_space():
    # XOR-style labels: linear mean cancels, gaussian does not
    S = LabeledSample(
        np.array([[1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]]),
        np.array([1, 1, -1, -1]),
    )
    sel = select_kernel(
        S, [KernelSpec("linear", normalized=True), KernelSpec("gaussian", bandwidth=0.8)]
    )
    assert sel.index == 1


# ---------------------------------------------------------------------------
# MMD


def test_mmd_matches_embedding_difference():
    S = toy_sample()
    spec = KernelSpec("gaussian", bandwidth=1.0)
    value = mmd(S.instances[S.labels == 1], S.instances[S.labels == -1], spec)
    e_pos = emb.Embedding(S.instances[S.labels == 1], np.array([0.5, 0.5]))
    e_neg = emb.Embedding(S.instances[S.labels == -1], np.array([0.5, 0.5]))
    expected = 0.5 * emb.norm(spec, emb.combine((1.0, e_pos), (-1.0, e_neg)))
    assert value == pytest.approx(expected, abs=1e-15)


def test_mmd_identical_sets_is_zero():
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert mmd(X, X, KernelSpec("gaussian", bandwidth=1.0)) == 0.0


def test_mmd_equals_mean_norm_for_balanced_sample():
    # with equal class counts, ||omega_S|| = (1/2)||mu_+ - mu_-|| = mmd
    S = synth_blobs(60, 2, 3.0, seed=2)
    spec = KernelSpec("gaussian", bandwidth=1.0)
    value = mmd(S.instances[S.labels == 1], S.instances[S.labels == -1], spec)
    assert value == pytest.approx(mean_norm(S, spec).norm, abs=1e-12)


# ---------------------------------------------------------------------------
# Margins


def test_margin_for_error_and_margin_risk():
    P = DiscreteDistribution(
        support=(((1.0,), 1), ((0.2,), 1), ((-1.0,), -1)),
        probabilities=np.array([0.4, 0.2, 0.4]),
    )
    f = lambda x: x[0]  # noqa: E731
    gamma = margin_for_error(P, f)
    assert gamma == pytest.approx(0.2, abs=1e-15)
    assert margin_risk(P, f, 0.0) == 0.0
    assert margin_risk(P, f, gamma) == 0.0  # strict inequality at the margin
    assert margin_risk(P, f, 0.21) == pytest.approx(0.2, abs=1e-15)


def test_margin_for_error_no_positive_margin():
    P = DiscreteDistribution(support=(((1.0,), -1),), probabilities=np.array([1.0]))
    assert margin_for_error(P, lambda x: x[0]) == 0.0


# ---------------------------------------------------------------------------
# Generative view


def test_kde_score_equals_mean_score():
    S = synth_blobs(30, 2, 2.0, seed=3)
    spec = KernelSpec("gaussian", bandwidth=0.9)
    clf = fit(S, spec)
    for x in [np.array([0.0, 0.0]), np.array([1.5, -0.3])]:
        assert kde_score(S, spec, x) == pytest.approx(clf.score(x), abs=1e-15)


def test_kde_score_requires_positive_kernel():
    S = toy_sample()
    with pytest.raises(InputError):
        kde_score(S, KernelSpec("linear"), np.array([0.0, 0.0]))
