"""
클라이언트 학습 서비스 테스트
"""
import numpy as np
import pytest

from app.core.augment import MixConfig
from app.core.exceptions import UnlabeledDatasetError
from app.core.losses import LossWeights, cross_entropy
from app.core.model import Model, ModelSpec, backward
from app.core.optim import AdamState, adam_step
from app.core.synthetic import make_synthetic_dataset
from app.models.client import ClientState
from app.models.dataset import Dataset
from app.services.client_service import TrainingOptions, evaluate, local_update, pretrain
from app.services.protocol_monitor import ProtocolMonitor

SPEC = ModelSpec(input_dim=64, hidden_dims=(16,), num_classes=4)


def _client(dataset, monitor=None, local_epochs=1):
    model = Model.initialize(SPEC, np.random.default_rng(0))
    return ClientState.create(
        client_id=0,
        arch_name="mlp_16",
        model=model,
        private_data=dataset,
        local_epochs=local_epochs,
        learning_rate=0.01,
        rng=np.random.default_rng(1),
        monitor=monitor,
    )


def _options(**kwargs):
    return TrainingOptions(weights=LossWeights(), mix=MixConfig(num_sequences=2), batch_size=8, **kwargs)


def test_pretrain_zero_epochs_is_noop(small_dataset, rng):
    client = _client(small_dataset)
    before = client.model.state()
    assert pretrain(client, 0, _options(), rng) == []
    for old, new in zip(before, client.model.state()):
        np.testing.assert_array_equal(old, new)


def test_pretrain_rejects_negative_epochs(small_dataset, rng):
    with pytest.raises(ValueError):
        pretrain(_client(small_dataset), -1, _options(), rng)


def test_local_update_without_aug_matches_plain_cross_entropy(small_dataset):
    client = _client(small_dataset)
    twin = client.model.clone()
    adam = AdamState.for_params([p.data for p in twin.parameters()], 0.01)

    history = local_update(client, LossWeights(), False, False, np.random.default_rng(5), batch_size=8, epochs=2)
    assert len(history) == 2
    assert all(epoch.jsd == 0.0 and epoch.supcon == 0.0 and epoch.dcl == 0.0 for epoch in history)

    rng = np.random.default_rng(5)
    labels = small_dataset.require_labels()
    for _ in range(2):
        order = rng.permutation(len(small_dataset))
        for start in range(0, len(order), 8):
            idx = order[start:start + 8]
            loss = cross_entropy(twin.forward(small_dataset.flat(idx)).logits, labels[idx])
            grads = backward(twin, loss)
            adam_step(adam, [p.data for p in twin.parameters()], grads)

    for expected, actual in zip(twin.state(), client.model.state()):
        np.testing.assert_allclose(actual, expected, rtol=1e-12, atol=1e-14)


def test_full_local_loss_with_batch_size_one(small_dataset, rng):
    client = _client(small_dataset.subset(range(4)))
    history = local_update(client, LossWeights(), True, True, rng, mix=MixConfig(num_sequences=2), batch_size=1)
    assert len(history) == 1
    epoch = history[0]
    assert np.isfinite([epoch.total, epoch.ce, epoch.jsd, epoch.supcon, epoch.dcl]).all()
    assert epoch.supcon > 0.0


@pytest.mark.parametrize("mode", ["dcl", "supcon"])
def test_local_update_changes_parameters(small_dataset, rng, mode):
    client = _client(small_dataset)
    before = client.model.state()
    local_update(client, LossWeights(), True, True, rng, mix=MixConfig(num_sequences=2),
                 batch_size=8, contrastive_mode=mode)
    assert any(not np.array_equal(old, new) for old, new in zip(before, client.model.state()))


def test_local_update_is_reproducible(small_dataset):
    first, second = _client(small_dataset), _client(small_dataset)
    for client in (first, second):
        local_update(client, LossWeights(), True, True, np.random.default_rng(3),
                     mix=MixConfig(num_sequences=2), batch_size=8)
    for a, b in zip(first.model.state(), second.model.state()):
        np.testing.assert_array_equal(a, b)


def test_private_reads_are_owner_only(small_dataset, rng):
    monitor = ProtocolMonitor()
    client = _client(small_dataset, monitor=monitor, local_epochs=2)
    local_update(client, LossWeights(), False, False, rng, batch_size=8)
    assert monitor.private_reads[(0, 0)] == 1
    assert monitor.cross_client_private_reads == 0


def test_evaluate_zero_model_predicts_first_class(small_dataset):
    accuracy = evaluate(Model.zeros(SPEC), small_dataset)
    expected = float(np.mean(small_dataset.labels == 0))
    assert accuracy == pytest.approx(expected)


def test_evaluate_requires_labels(small_dataset):
    with pytest.raises(UnlabeledDatasetError):
        evaluate(Model.zeros(SPEC), small_dataset.without_labels())


def test_random_model_accuracy_is_near_chance(rng):
    labels = rng.permutation(np.arange(2000) % 4)
    data = Dataset(images=rng.random((2000, 8, 8, 1)), labels=labels, num_classes=4)
    accuracy = evaluate(Model.initialize(SPEC, np.random.default_rng(2)), data)
    assert 0.20 <= accuracy <= 0.30


def test_pretrain_loss_decreases(small_dataset, rng):
    history = pretrain(_client(small_dataset), 5, _options(), rng)
    assert history[0].total > history[-1].total
    assert all(epoch.supcon == 0.0 and epoch.dcl == 0.0 for epoch in history)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_full_local_loss_decreases(seed):
    data = make_synthetic_dataset(n=64, num_classes=4, side=8, seed=seed)
    client = _client(data)
    history = local_update(client, LossWeights(), True, True, np.random.default_rng(seed),
                           mix=MixConfig(num_sequences=2), batch_size=8, epochs=5)
    assert history[0].total > history[-1].total


def test_augmentation_uses_client_stream(small_dataset):
    """증강 난수는 클라이언트의 증강 스트림에서만 뽑힌다"""
    first, second = _client(small_dataset), _client(small_dataset)
    first.augment_rng = np.random.default_rng(10)
    second.augment_rng = np.random.default_rng(20)
    for client in (first, second):
        local_update(client, LossWeights(), True, True, np.random.default_rng(3),
                     mix=MixConfig(num_sequences=2), batch_size=8)
    assert any(not np.array_equal(a, b) for a, b in zip(first.model.state(), second.model.state()))

    third = _client(small_dataset)
    third.augment_rng = np.random.default_rng(10)
    local_update(third, LossWeights(), True, True, np.random.default_rng(3),
                 mix=MixConfig(num_sequences=2), batch_size=8)
    for a, b in zip(first.model.state(), third.model.state()):
        np.testing.assert_array_equal(a, b)
