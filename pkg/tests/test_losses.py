import itertools

import numpy as np
import pytest

from meanherd.data import DiscreteDistribution
from meanherd.errors import InputError
from meanherd.losses import (
    EvaluationGrid,
    balanced_error,
    cc_ratio_check,
    correct_cc,
    correct_sln,
    hinge_loss,
    linear_loss,
    linearity_slopes,
    logistic_loss,
    margin_loss,
    order_equivalence_fit,
    parse_loss,
    risk,
    sln_robustness_check,
    zero_one_loss,
)


def test_builtin_loss_values():
    assert linear_loss(1, 0.3) == pytest.approx(0.7, abs=1e-15)
    assert linear_loss(-1, 0.3) == pytest.approx(1.3, abs=1e-15)
    assert hinge_loss(1, 2.0) == 0.0
    assert hinge_loss(-1, 0.5) == pytest.approx(1.5, abs=1e-15)
    assert logistic_loss(1, 0.0) == pytest.approx(np.log(2.0), abs=1e-15)
    assert zero_one_loss(1, -0.1) == 1.0
    assert zero_one_loss(1, 0.1) == 0.0
    # abstention convention: v = 0 is an error for both labels
    assert zero_one_loss(1, 0.0) == 1.0
    assert zero_one_loss(-1, 0.0) == 1.0


def test_margin_loss():
    m = margin_loss(0.5)
    assert m(1, 0.4) == 1.0
    assert m(1, 0.6) == 0.0
    z = margin_loss(0.0)
    v = np.linspace(-2, 2, 41)
    assert np.array_equal(z(1, v), zero_one_loss(1, v))


def test_label_validation():
    with pytest.raises(InputError):
        linear_loss(0, 0.5)


# ---------------------------------------------------------------------------
# Robustness characterization


def test_robustness_verdicts():
    v = sln_robustness_check(linear_loss)
    assert v.is_robust and v.constant == pytest.approx(2.0, abs=1e-12)
    v = sln_robustness_check(zero_one_loss)
    assert v.is_robust and v.constant == pytest.approx(1.0, abs=1e-12)
    assert not sln_robustness_check(hinge_loss).is_robust
    assert not sln_robustness_check(logistic_loss).is_robust


def test_margin_loss_not_robust_for_positive_margin():
    # l(1, v) + l(-1, v) = 2 inside |v| < gamma but 1 outside
    assert not sln_robustness_check(margin_loss(0.5)).is_robust


def test_convex_robust_loss_is_affine_in_score():
    s_pos, s_neg, residual = linearity_slopes(linear_loss)
    assert s_pos == pytest.approx(-1.0, abs=1e-12)
    assert s_neg == pytest.approx(1.0, abs=1e-12)
    assert residual <= 1e-10


# ---------------------------------------------------------------------------
# Corrected losses


def two_atom_distributions():
    """Enumerated two-atom score-label distributions for unbiasedness audits."""
    scores = (-1.7, -0.4, 0.2, 0.9, 2.3)
    out = []
    for (v1, y1), (v2, y2) in itertools.combinations(
        itertools.product(scores, (-1, 1)), 2
    ):
        out.append((((v1, y1), (v2, y2)), (0.3, 0.7)))
    return out[:100]


@pytest.mark.parametrize("sigma", [0.1, 0.25, 0.4])
@pytest.mark.parametrize(
    "loss", [linear_loss, hinge_loss, logistic_loss, zero_one_loss],
    ids=lambda l: l.name,
)
def test_sln_correction_unbiased(loss, sigma):
    corrected = correct_sln(loss, sigma)
    for atoms, probs in two_atom_distributions():
        clean = sum(p * float(loss(y, v)) for (v, y), p in zip(atoms, probs))
        noisy = sum(
            p
            * (
                (1 - sigma) * float(corrected(y, v))
                + sigma * float(corrected(-y, v))
            )
            for (v, y), p in zip(atoms, probs)
        )
        assert noisy == pytest.approx(clean, abs=1e-12)


def test_sln_correction_sigma_zero_is_identity():
    corrected = correct_sln(hinge_loss, 0.0)
    v = np.linspace(-3, 3, 61)
    assert np.allclose(corrected(1, v), hinge_loss(1, v), atol=1e-15)


def test_cc_correction_unbiased():
    sn, sp = 0.2, 0.3
    corrected = correct_cc(hinge_loss, sn, sp)
    for atoms, probs in two_atom_distributions()[:30]:
        clean = sum(p * float(hinge_loss(y, v)) for (v, y), p in zip(atoms, probs))
        noisy = 0.0
        for (v, y), p in zip(atoms, probs):
            s = sp if y == 1 else sn
            noisy += p * ((1 - s) * float(corrected(y, v)) + s * float(corrected(-y, v)))
        assert noisy == pytest.approx(clean, abs=1e-12)


def test_sln_corrected_robust_loss_is_affine_image():
    fit = order_equivalence_fit(linear_loss, correct_sln(linear_loss, 0.3))
    assert fit.order_equivalent
    assert fit.alpha > 0


def test_order_equivalence_rejects_unrelated():
    fit = order_equivalence_fit(linear_loss, logistic_loss)
    assert not fit.order_equivalent


def test_cc_ratio_check():
    # for linear loss, s_pos l(-1,v) + s_neg l(1,v) is constant iff s_pos = s_neg
    assert cc_ratio_check(linear_loss, 0.2, 0.2).holds
    r = cc_ratio_check(linear_loss, 0.2, 0.2)
    assert r.fit is not None and r.fit.order_equivalent
    assert not cc_ratio_check(linear_loss, 0.1, 0.3).holds


# ---------------------------------------------------------------------------
# Risks


def test_risk_and_balanced_error():
    P = DiscreteDistribution(
        support=(((0.0,), 1), ((1.0,), -1)), probabilities=np.array([0.5, 0.5])
    )
    f = lambda x: 1.0  # noqa: E731
    assert risk(zero_one_loss, P, f) == pytest.approx(0.5, abs=1e-15)
    assert risk(linear_loss, P, f) == pytest.approx(1.0, abs=1e-15)


def test_evaluation_grid_is_symmetric_and_covers_tails():
    v = EvaluationGrid().values
    assert np.array_equal(v, -v[::-1])
    assert v.max() == 3.0
    assert 0.0 in v


# ---------------------------------------------------------------------------
# Name grammar


def test_parse_loss_grammar():
    assert parse_loss("linear") is linear_loss
    assert parse_loss("margin:0.5").name == "margin:0.5"
    c = parse_loss("sln-corrected:hinge:0.2")
    assert c.name == "sln-corrected:hinge:0.2"
    c = parse_loss("cc-corrected:linear:0.1:0.2")
    assert c.name == "cc-corrected:linear:0.1:0.2"
    with pytest.raises(InputError):
        parse_loss("huber")
    with pytest.raises(InputError):
        parse_loss("sln-corrected:hinge:0.6")


def test_balanced_error_equal_class_weighting():
    from meanherd.data import InstanceDistribution

    P_pos = InstanceDistribution(((1.0,),), np.array([1.0]))
    P_neg = InstanceDistribution(((-1.0,),), np.array([1.0]))
    f = lambda x: x[0]  # noqa: E731
    # both classes perfectly classified: linear loss 0 on each
    assert balanced_error(linear_loss, P_pos, P_neg, f) == pytest.approx(0.0, abs=1e-15)
    g = lambda x: -x[0]  # noqa: E731
    assert balanced_error(linear_loss, P_pos, P_neg, g) == pytest.approx(2.0, abs=1e-15)
