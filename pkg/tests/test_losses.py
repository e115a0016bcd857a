"""
손실 함수 테스트 (닫힌 형태 값, 고정점, 기울기 검증)
"""
import itertools
import math

import numpy as np
import pytest

from app.core.exceptions import (
    EmptyPositiveSetError,
    LabelRangeError,
    SimplexViolationError,
    TransferMatrixError,
)
from app.core.gradcheck import finite_diff_grad, max_relative_error
from app.core.losses import (
    ContrastiveBatch,
    LocalViews,
    LossWeights,
    _supcon_terms,
    collaborative_loss,
    cross_entropy,
    dcl_regularizer,
    jsd_consistency,
    kl_divergence,
    kl_term_counts,
    local_loss,
    similarity_distribution,
    supcon_loss,
)
from app.core.model import Model, ModelSpec, backward
from app.core.tensor import Tensor, parameter, softmax

GRAD_TOLERANCE = 1e-4
INSTANCES = 20


def _max_error(build, arrays):
    params = [parameter(a) for a in arrays]
    build(*params).backward()
    analytic = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]
    numeric = finite_diff_grad(lambda: build(*[Tensor(p.data) for p in params]).item(), [p.data for p in params])
    return max_relative_error(analytic, numeric, floor=1e-4)


def _labels_with_pairs(rng, b, c):
    return rng.integers(0, c, size=b)


# ---- 닫힌 형태 값 ----
def test_jsd_closed_form():
    value = jsd_consistency(Tensor([1.0, 0.0]), Tensor([0.0, 1.0]), Tensor([0.5, 0.5])).item()
    assert value == pytest.approx(2 * math.log(2) / 3, abs=1e-9)


def test_kl_closed_form():
    assert kl_divergence(Tensor([1.0, 0.0]), Tensor([0.5, 0.5])).item() == pytest.approx(math.log(2), abs=1e-9)


def test_supcon_identical_features_b2():
    same = Tensor(np.tile([[0.6, 0.8]], (2, 1)))
    batch = ContrastiveBatch(same, same, same, np.array([0, 1]))
    assert supcon_loss(batch, tau_c=0.2).item() == pytest.approx(4 * math.log(3), abs=1e-9)


@pytest.mark.parametrize("b", [1, 2, 5])
def test_local_loss_identical_features_closed_form(b, rng):
    """ℓ_local = ℓ_ce + 2B·ln(2B-1) (모든 특징 동일, DCL 항 0)"""
    features = Tensor(np.ones((b, 4)))
    logits = Tensor(rng.normal(size=(b, 3)))
    labels = rng.integers(0, 3, size=b)
    views = LocalViews(logits=logits, features=features, complex_features=features, simple_features=features)
    weights = LossWeights(contrastive_reduction="sum")
    result = local_loss(views, labels, weights, aug_enabled=False, dcl_enabled=True)
    expected = cross_entropy(logits, labels).item() + (2 * b * math.log(2 * b - 1) if b > 1 else 0.0)
    assert result.total.item() == pytest.approx(expected, abs=1e-9)
    assert result.dcl == 0.0


# ---- 고정점 ----
def test_zero_fixed_points():
    p = Tensor([[0.25, 0.75], [0.5, 0.5]])
    assert kl_divergence(p, p).item() == 0.0
    assert jsd_consistency(p, p, p).item() == 0.0


def test_dcl_zero_when_views_coincide(rng):
    feats = rng.normal(size=(4, 5))
    batch = ContrastiveBatch.from_raw(Tensor(rng.normal(size=(4, 5))), Tensor(feats), Tensor(feats), [0, 1, 0, 1])
    assert dcl_regularizer(batch, tau_d=0.2).item() == 0.0


# ---- 오류 ----
def test_cross_entropy_label_range(rng):
    with pytest.raises(LabelRangeError):
        cross_entropy(Tensor(rng.normal(size=(2, 3))), [0, 3])


def test_kl_rejects_non_simplex():
    with pytest.raises(SimplexViolationError):
        kl_divergence(Tensor([0.7, 0.7]), Tensor([0.5, 0.5]))


def test_supcon_terms_reject_anchor_without_positive():
    views = Tensor(np.eye(3))
    with pytest.raises(EmptyPositiveSetError):
        _supcon_terms(views, np.array([0, 1, 1]), 0.2)


def test_contrastive_batch_requires_unit_rows(rng):
    raw = Tensor(rng.normal(size=(2, 3)) * 5.0)
    with pytest.raises(ValueError):
        ContrastiveBatch(raw, raw, raw, np.array([0, 1]))


def test_collaborative_row_length_mismatch(rng):
    outputs = [softmax(Tensor(rng.normal(size=(3, 4)))) for _ in range(3)]
    with pytest.raises(TransferMatrixError):
        collaborative_loss(0, outputs, [0, 1])


# ---- 구조적 성질 ----
def test_similarity_distribution_support_excludes_own_simple_view(rng):
    batch = ContrastiveBatch.from_raw(*(Tensor(rng.normal(size=(3, 4))) for _ in range(3)), [0, 1, 2])
    probs = similarity_distribution(batch.complex_features[1], batch, anchor_index=1, tau_d=0.2)
    assert probs.shape == (5,)
    assert probs.data.sum() == pytest.approx(1.0, abs=1e-12)


def test_dcl_gradient_flows_only_to_complex_view(rng):
    original, simple, complex_ = (parameter(rng.normal(size=(4, 5))) for _ in range(3))
    batch = ContrastiveBatch.from_raw(original, simple, complex_, [0, 1, 0, 2])
    dcl_regularizer(batch, tau_d=0.2).backward()
    assert original.grad is None and simple.grad is None
    assert np.abs(complex_.grad).sum() > 0


def test_collaborative_loss_skips_zero_flags_and_self(rng):
    outputs = [softmax(Tensor(rng.normal(size=(6, 4)))) for _ in range(4)]
    result = collaborative_loss(1, outputs, [1, 1, 0, 1])
    assert result.kl_terms == 2
    assert collaborative_loss(0, outputs, [0, 0, 0, 0]).value.item() == 0.0
    assert kl_term_counts(np.array([[0, 1, 1], [0, 0, 0], [0, 1, 0]])) == [2, 0, 1]


def test_collaborative_loss_does_not_touch_sources(rng):
    learner = parameter(rng.normal(size=(5, 3)))
    sources = [parameter(rng.normal(size=(5, 3))) for _ in range(2)]
    outputs = [softmax(sources[0]), softmax(learner), softmax(sources[1])]
    collaborative_loss(1, outputs, [1, 0, 1], learner_output=softmax(learner)).value.backward()
    assert all(source.grad is None for source in sources)
    assert learner.grad is not None


def test_aug_and_dcl_disabled_is_plain_cross_entropy(rng):
    logits = Tensor(rng.normal(size=(4, 3)))
    labels = [0, 2, 1, 0]
    views = LocalViews(logits=logits, features=Tensor(rng.random((4, 5))))
    result = local_loss(views, labels, LossWeights(), aug_enabled=False, dcl_enabled=False)
    assert result.total.item() == cross_entropy(logits, labels).item()
    assert result.jsd == result.supcon == result.dcl == 0.0


# ---- 기울기 검증 (무작위 소형 인스턴스) ----
@pytest.mark.parametrize("seed", range(INSTANCES))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    b = int(rng.integers(1, 9))
    d = int(rng.integers(2, 17))
    c = int(rng.integers(2, 6))
    labels = _labels_with_pairs(rng, b, c)
    logits = [rng.normal(size=(b, c)) for _ in range(3)]
    feats = [rng.normal(size=(b, d)) for _ in range(3)]

    assert _max_error(lambda z: cross_entropy(z, labels), logits[:1]) <= GRAD_TOLERANCE
    assert _max_error(
        lambda z0, z1, z2: jsd_consistency(softmax(z0), softmax(z1), softmax(z2)), logits
    ) <= GRAD_TOLERANCE
    assert _max_error(
        lambda f0, f1: supcon_loss(ContrastiveBatch.from_raw(f0, f1, f1, labels), 0.2, "mean"), feats[:2]
    ) <= GRAD_TOLERANCE
    fixed = [Tensor(f) for f in feats[:2]]
    assert _max_error(
        lambda f2: dcl_regularizer(ContrastiveBatch.from_raw(fixed[0], fixed[1], f2, labels), 0.2), feats[2:]
    ) <= GRAD_TOLERANCE

    others = [softmax(Tensor(rng.normal(size=(b, c)))) for _ in range(2)]
    assert _max_error(
        lambda z: collaborative_loss(1, [others[0], softmax(z), others[1]], [1, 0, 1], softmax(z)).value,
        logits[:1],
    ) <= GRAD_TOLERANCE

    weights = LossWeights(gamma=0.0)

    def _local(z0, z1, z2, f0, f1):
        views = LocalViews(logits=z0, features=f0, complex_logits=[z1, z2], complex_features=f1, simple_features=f1)
        return local_loss(views, labels, weights).total

    assert _max_error(_local, logits + feats[:2]) <= GRAD_TOLERANCE


@pytest.mark.parametrize("seed", range(5))
def test_local_loss_gradients_with_dcl_regularizer(seed):
    """γ>0, 복합 뷰 특징이 단순 뷰와 다를 때 ℓ_local 전체 기울기 검증"""
    rng = np.random.default_rng(100 + seed)
    b, d, c = 4, 8, 3
    labels = rng.integers(0, c, size=b)
    fixed_original, fixed_simple = Tensor(rng.normal(size=(b, d))), Tensor(rng.normal(size=(b, d)))
    weights = LossWeights(gamma=1.0)

    def _local(z0, z1, z2, f_complex):
        views = LocalViews(
            logits=z0,
            features=fixed_original,
            complex_logits=[z1, z2],
            complex_features=f_complex,
            simple_features=fixed_simple,
        )
        result = local_loss(views, labels, weights)
        assert result.dcl > 0.0
        return result.total

    arrays = [rng.normal(size=(b, c)) for _ in range(3)] + [rng.normal(size=(b, d))]
    assert _max_error(_local, arrays) <= GRAD_TOLERANCE


def test_zero_feature_row_keeps_gradients_finite():
    """ReLU 출력이 전부 0인 특징 행이 있어도 기울기는 유한"""
    rng = np.random.default_rng(8)
    model = Model.initialize(ModelSpec(input_dim=3, hidden_dims=(4,), num_classes=2), rng)
    x = np.array([[1.0, 0.5, -0.2], [0.0, 0.0, 0.0]])
    out = model.forward(x)
    assert not out.features.data[1].any()

    views = LocalViews(
        logits=out.logits,
        features=out.features,
        complex_logits=[out.logits, out.logits],
        complex_features=model.forward(x * 0.9).features,
        simple_features=model.forward(x * 1.1).features,
    )
    result = local_loss(views, [0, 1], LossWeights(), dcl_enabled=True)
    grads = backward(model, result.total)
    assert np.isfinite(result.total.item())
    assert all(np.isfinite(g).all() for g in grads)


# ---- 예시 값 ----
def test_supcon_orthogonal_features_b2():
    eye = Tensor(np.eye(2))
    batch = ContrastiveBatch(eye, eye, eye, np.array([0, 1]))
    value = supcon_loss(batch, tau_c=0.2).item()
    assert value == pytest.approx(4 * math.log1p(2 * math.exp(-5.0)), abs=1e-12)
    assert value == pytest.approx(0.05358, abs=1e-4)


def test_supcon_ignores_scale_and_rotation(rng):
    raw = [rng.normal(size=(3, 5)) for _ in range(3)]
    labels = [0, 1, 0]
    base = supcon_loss(ContrastiveBatch.from_raw(*(Tensor(r) for r in raw), labels), 0.2).item()

    scaled = supcon_loss(ContrastiveBatch.from_raw(*(Tensor(7.0 * r) for r in raw), labels), 0.2).item()
    rotation, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    rotated = supcon_loss(ContrastiveBatch.from_raw(*(Tensor(r @ rotation) for r in raw), labels), 0.2).item()
    assert scaled == pytest.approx(base, abs=1e-9)
    assert rotated == pytest.approx(base, abs=1e-9)


def test_jsd_is_symmetric_in_its_arguments(rng):
    rows = [softmax(Tensor(rng.normal(size=(3, 4)))) for _ in range(3)]
    base = jsd_consistency(*rows).item()
    for order in itertools.permutations(range(3)):
        assert jsd_consistency(*(rows[i] for i in order)).item() == pytest.approx(base, abs=1e-12)


def test_jsd_is_bounded_by_log_three():
    rng = np.random.default_rng(3)
    bound = math.log(3) + 1e-9
    for _ in range(1000):
        c = int(rng.integers(2, 6))
        triple = [Tensor(rng.dirichlet(np.full(c, 0.3))) for _ in range(3)]
        assert -1e-12 <= jsd_consistency(*triple).item() <= bound
    vertices = [Tensor(row) for row in np.eye(3)]
    assert jsd_consistency(*vertices).item() == pytest.approx(math.log(3), abs=1e-9)


def test_kl_floor_keeps_value_finite():
    value = kl_divergence(Tensor([0.5, 0.5]), Tensor([1.0, 0.0])).item()
    expected = 0.5 * math.log(0.5 / 1.0) + 0.5 * math.log(0.5 / 1e-12)
    assert value == pytest.approx(expected, abs=1e-9)


def test_collaborative_loss_composes_kl_terms():
    phi = [Tensor([[0.2, 0.8], [0.6, 0.4]]), Tensor([[0.6, 0.4], [0.3, 0.7]]), Tensor([[0.5, 0.5], [0.9, 0.1]])]
    result = collaborative_loss(1, phi, [1, 0, 1])
    expected = kl_divergence(phi[0], phi[1]).item() + kl_divergence(phi[2], phi[1]).item()
    assert result.value.item() == pytest.approx(expected, abs=1e-12)
    assert result.kl_terms == 2


def _hand_batch():
    original = Tensor([[1.0, 0.0, 0.0], [0.0, 0.6, 0.8]])
    simple = Tensor([[0.8, 0.6, 0.0], [0.0, 0.0, 1.0]])
    complex_ = Tensor([[0.0, 1.0, 0.0], [0.6, 0.0, 0.8]])
    return ContrastiveBatch(original, simple, complex_, np.array([0, 1]))


def test_similarity_distribution_matches_brute_force():
    batch = _hand_batch()
    members = np.vstack([batch.original_features.data, batch.simple_features.data])
    for i in range(2):
        anchor = batch.complex_features.data[i]
        support = [j for j in range(4) if j != 2 + i]
        weights = [math.exp(float(anchor @ members[j]) / 0.2) for j in support]
        expected = np.array(weights) / sum(weights)
        probs = similarity_distribution(batch.complex_features[i], batch, anchor_index=i, tau_d=0.2)
        np.testing.assert_allclose(probs.data, expected, rtol=0.0, atol=1e-12)


def test_dcl_equals_sum_of_row_divergences():
    batch = _hand_batch()
    expected = 0.0
    for i in range(2):
        target = similarity_distribution(batch.simple_features[i], batch, anchor_index=i, tau_d=0.2)
        learner = similarity_distribution(batch.complex_features[i], batch, anchor_index=i, tau_d=0.2)
        expected += kl_divergence(target, learner).item()
    assert dcl_regularizer(batch, tau_d=0.2).item() == pytest.approx(expected, abs=1e-12)
