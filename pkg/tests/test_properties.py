"""Property-based checks over randomized inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from meanherd import embedding as emb
from meanherd.data import DiscreteDistribution, flip_symmetric
from meanherd.kernels import KernelSpec, cross_gram
from meanherd.losses import correct_sln, hinge_loss, linear_loss

finite = st.floats(-5.0, 5.0, allow_nan=False, allow_infinity=False)


def distributions():
    def build(points, labels, weights):
        atoms = []
        seen = set()
        for (a, b), y in zip(points, labels):
            key = ((a, b), y)
            if key not in seen:
                seen.add(key)
                atoms.append(key)
        w = np.asarray(weights[: len(atoms)], dtype=float) + 1e-3
        w = w / w.sum()
        return DiscreteDistribution(support=tuple(atoms), probabilities=w)

    return st.builds(
        build,
        st.lists(st.tuples(finite, finite), min_size=1, max_size=5),
        st.lists(st.sampled_from((-1, 1)), min_size=5, max_size=5),
        st.lists(st.floats(0.0, 1.0), min_size=5, max_size=5),
    )


@settings(max_examples=60, deadline=None)
@given(distributions(), st.floats(0.0, 0.49))
def test_flip_symmetric_conserves_mass(P, sigma):
    P_s = flip_symmetric(P, sigma)
    assert abs(P_s.probabilities.sum() - 1.0) <= 1e-12
    assert np.all(P_s.probabilities >= 0)


@settings(max_examples=60, deadline=None)
@given(distributions(), st.floats(0.01, 0.49))
def test_noise_scaling_property(P, sigma):
    spec = KernelSpec("gaussian", bandwidth=1.0)
    diff = emb.combine(
        (1.0, emb.Embedding.from_distribution(flip_symmetric(P, sigma))),
        (-(1.0 - 2.0 * sigma), emb.Embedding.from_distribution(P)),
    )
    assert emb.norm(spec, diff) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(finite, finite), min_size=1, max_size=6),
    st.floats(0.1, 3.0),
)
def test_gaussian_gram_bounded_and_unit_diagonal(points, bandwidth):
    spec = KernelSpec("gaussian", bandwidth=bandwidth)
    X = np.asarray(points, dtype=float)
    K = cross_gram(spec, X, X)
    assert np.all(K <= 1.0 + 1e-12)
    assert np.all(K >= 0.0)
    assert np.allclose(np.diag(K), 1.0)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from((-1, 1)), finite, st.floats(0.0, 0.45))
def test_corrected_loss_pointwise_unbiased(y, v, sigma):
    for loss in (linear_loss, hinge_loss):
        corrected = correct_sln(loss, sigma)
        noisy = (1 - sigma) * float(corrected(y, v)) + sigma * float(corrected(-y, v))
        assert abs(noisy - float(loss(y, v))) <= 1e-10
