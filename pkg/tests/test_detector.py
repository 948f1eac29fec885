import math

import numpy as np
import pytest

from fairage.detector import (
    AUC_IMPROVEMENT_EPS,
    DEFAULT_HP,
    HyperParams,
    adam_step,
    bce_with_logits,
    forward_logits,
    init_adam,
    init_params,
    load_model,
    loss_and_grads,
    predict,
    save_model,
    train,
    write_history,
)
from fairage.errors import MissingInputError, SingleClassError, ValidationError


# ---------------------------------------------------------------- hyperparams


@pytest.mark.parametrize(
    "kwargs",
    [
        {"learning_rate": 0.0},
        {"weight_decay": -1e-6},
        {"epsilon": 0.0},
        {"batch_size": 0},
        {"max_epochs": 0},
        {"patience": 0},
        {"patience": 5, "max_epochs": 4},
        {"beta1": 1.0},
        {"beta2": 0.0},
        {"hidden_layers": (4, 0)},
    ],
)
def test_hyperparams_rejects_bad_values(kwargs):
    with pytest.raises(ValidationError):
        HyperParams(**kwargs)


# ---------------------------------------------------------------- loss


def test_bce_zero_logit_is_ln2():
    assert bce_with_logits(0.0, 1.0) == pytest.approx(math.log(2.0), abs=1e-15)
    assert bce_with_logits(0.0, 0.0) == pytest.approx(math.log(2.0), abs=1e-15)


def test_bce_matches_naive_formula_on_moderate_logits():
    rng = np.random.default_rng(0)
    z = rng.uniform(-8, 8, size=40)
    y = rng.integers(0, 2, size=40).astype(float)
    p = 1.0 / (1.0 + np.exp(-z))
    want = float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))))
    assert bce_with_logits(z, y) == pytest.approx(want, rel=1e-12)


def test_bce_is_stable_for_extreme_logits():
    assert bce_with_logits(1000.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert bce_with_logits(-1000.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert bce_with_logits(-1000.0, 1.0) == pytest.approx(1000.0, rel=1e-12)


# ---------------------------------------------------------------- init


def test_init_params_shapes_bounds_and_zero_bias():
    params = init_params(6, (5, 3), seed=42)
    dims = [(6, 5), (5, 3), (3, 1)]
    assert [(w.shape, b.shape) for w, b in params] == [((i, o), (o,)) for i, o in dims]
    for (w, b), (fan_in, _) in zip(params, dims):
        bound = 1.0 / math.sqrt(fan_in)
        assert np.all(np.abs(w) <= bound)
        assert np.all(b == 0.0)


def test_init_params_deterministic_per_seed():
    a = init_params(4, (), seed=7)
    b = init_params(4, (), seed=7)
    c = init_params(4, (), seed=8)
    assert np.array_equal(a[0][0], b[0][0])
    assert not np.array_equal(a[0][0], c[0][0])


def test_init_params_rejects_bad_dim():
    with pytest.raises(ValidationError):
        init_params(0, (), seed=1)


# ---------------------------------------------------------------- forward


def test_forward_linear_is_affine_map():
    w = np.array([[2.0], [-1.0], [0.5]])
    b = np.array([0.25])
    x = np.array([[1.0, 2.0, 4.0], [0.0, 0.0, 0.0]])
    got = forward_logits([(w, b)], x)
    assert np.allclose(got, [1.0 * 2 + 2 * -1 + 4 * 0.5 + 0.25, 0.25], atol=1e-15)


def test_forward_relu_clips_hidden_activations():
    w1 = np.array([[1.0, -1.0]])
    b1 = np.zeros(2)
    w2 = np.array([[1.0], [1.0]])
    b2 = np.zeros(1)
    x = np.array([[3.0], [-2.0]])
    # x=3: hidden (3, 0) -> 3; x=-2: hidden (0, 2) -> 2
    got = forward_logits([(w1, b1), (w2, b2)], x)
    assert np.allclose(got, [3.0, 2.0], atol=1e-15)


# ---------------------------------------------------------------- gradients


def finite_diff_grads(params, x, y, h=1e-6):
    out = []
    for li, (w, b) in enumerate(params):
        gw = np.zeros_like(w)
        gb = np.zeros_like(b)
        for arr, garr in ((w, gw), (b, gb)):
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = arr[idx]
                arr[idx] = orig + h
                lp = loss_and_grads(params, x, y)[0]
                arr[idx] = orig - h
                lm = loss_and_grads(params, x, y)[0]
                arr[idx] = orig
                garr[idx] = (lp - lm) / (2 * h)
        out.append((gw, gb))
    return out


def relu_margin(params, x):
    """Smallest |preactivation| over hidden layers; inf for linear models."""
    worst = math.inf
    a = x
    for w, b in params[:-1]:
        z = a @ w + b
        worst = min(worst, float(np.min(np.abs(z))))
        a = np.maximum(z, 0.0)
    return worst


def test_analytic_gradients_match_central_differences():
    rng = np.random.default_rng(99)
    checked = 0
    attempts = 0
    while checked < 12 and attempts < 200:
        attempts += 1
        dim = int(rng.integers(2, 5))
        hidden = () if checked % 2 == 0 else (int(rng.integers(2, 4)),)
        n = int(rng.integers(3, 7))
        x = rng.normal(size=(n, dim))
        y = rng.integers(0, 2, size=n).astype(np.float64)
        params = init_params(dim, hidden, seed=int(rng.integers(0, 10**6)))
        params = [(w + rng.normal(scale=0.3, size=w.shape), b + rng.normal(scale=0.1, size=b.shape)) for w, b in params]
        if relu_margin(params, x) < 5e-4:
            continue
        _, analytic = loss_and_grads(params, x, y)
        fd = finite_diff_grads(params, x, y)
        for (aw, ab), (fw, fb) in zip(analytic, fd):
            assert np.all(np.abs(aw - fw) <= 1e-6 * np.maximum(1.0, np.abs(fw)))
            assert np.all(np.abs(ab - fb) <= 1e-6 * np.maximum(1.0, np.abs(fb)))
        checked += 1
    assert checked == 12


def test_loss_and_grads_returns_batch_mean_loss():
    params = init_params(3, (), seed=5)
    x = np.zeros((4, 3))
    y = np.array([1.0, 0.0, 1.0, 0.0])
    loss, _ = loss_and_grads(params, x, y)
    assert loss == pytest.approx(math.log(2.0), abs=1e-15)


# ---------------------------------------------------------------- adam


def test_adam_first_step_magnitude_is_learning_rate():
    hp = HyperParams(learning_rate=0.01, weight_decay=0.0)
    w = np.array([[1.0], [2.0]])
    b = np.array([0.5])
    g = ([(np.array([[0.3], [-0.7]]), np.array([0.2]))])
    state = init_adam([(w, b)])
    new, state2 = adam_step([(w, b)], g, state, hp)
    delta_w = new[0][0] - w
    # first step: m-hat/sqrt(v-hat) = g/|g|, so each delta is -lr * sign(g) (up to eps)
    assert np.allclose(np.abs(delta_w), hp.learning_rate, rtol=1e-6)
    assert np.all(np.sign(delta_w) == -np.sign(g[0][0]))
    assert state2.t == 1


def test_adam_zero_grad_decoupled_decay_shrinks_weights_exactly():
    hp = HyperParams(learning_rate=0.1, weight_decay=0.01)
    w = np.array([[4.0], [-2.0]])
    b = np.array([8.0])
    zero = [(np.zeros_like(w), np.zeros_like(b))]
    new, _ = adam_step([(w, b)], zero, init_adam([(w, b)]), hp)
    factor = 1.0 - hp.learning_rate * hp.weight_decay
    assert np.array_equal(new[0][0], w * factor)
    assert np.array_equal(new[0][1], b * factor)


def test_adam_coupled_decay_adds_decay_to_gradient():
    hp = HyperParams(learning_rate=0.1, weight_decay=0.5, decoupled_weight_decay=False)
    w = np.array([[2.0]])
    b = np.array([0.0])
    zero = [(np.zeros_like(w), np.zeros_like(b))]
    new, _ = adam_step([(w, b)], zero, init_adam([(w, b)]), hp)
    g = hp.weight_decay * 2.0  # effective gradient
    want = 2.0 - hp.learning_rate * g / (g + hp.epsilon)
    assert new[0][0][0, 0] == pytest.approx(want, rel=1e-12)


def test_adam_rejects_non_finite_gradient():
    w = np.array([[1.0]])
    b = np.array([0.0])
    bad = [(np.array([[math.nan]]), np.zeros(1))]
    with pytest.raises(ValidationError, match="non-finite"):
        adam_step([(w, b)], bad, init_adam([(w, b)]), DEFAULT_HP)


# ---------------------------------------------------------------- training


def blobs(rng, n_per, dim=4, gap=3.0):
    pos = rng.normal(loc=gap / 2, size=(n_per, dim))
    neg = rng.normal(loc=-gap / 2, size=(n_per, dim))
    x = np.vstack([pos, neg])
    y = np.array([1] * n_per + [0] * n_per)
    return x, y


def plateau_sets():
    """Validation rows with identical features and opposite labels pin the
    validation AUC at 0.5 for any parameters."""
    rng = np.random.default_rng(21)
    tx, ty = blobs(rng, 8)
    vx = np.zeros((2, 4))
    vy = np.array([1, 0])
    return tx, ty, vx, vy


def test_train_stops_exactly_at_patience_on_plateau():
    tx, ty, vx, vy = plateau_sets()
    hp = HyperParams(max_epochs=20, patience=3, seed=1)
    model = train(tx, ty, vx, vy, hp)
    assert model.stopped_epoch == 1 + hp.patience
    assert model.best_epoch == 1
    assert len(model.history) == 4
    assert all(s.val_auc == 0.5 for s in model.history)


def test_train_caps_at_max_epochs_without_trigger():
    tx, ty, vx, vy = plateau_sets()
    hp = HyperParams(max_epochs=2, patience=2, seed=1)
    model = train(tx, ty, vx, vy, hp)
    assert model.stopped_epoch == 2
    assert len(model.history) == 2


def test_train_learns_separable_blobs():
    rng = np.random.default_rng(2)
    tx, ty = blobs(rng, 40)
    vx, vy = blobs(rng, 15)
    hp = HyperParams(learning_rate=0.05, max_epochs=20, patience=3, seed=3)
    model = train(tx, ty, vx, vy, hp)
    assert model.best_val_auc >= 0.99
    from fairage.evaluation import auc

    assert auc(predict(model, vx), vy) == model.best_val_auc


def test_train_returns_best_epoch_weights():
    rng = np.random.default_rng(4)
    tx, ty = blobs(rng, 30)
    vx, vy = blobs(rng, 12)
    hp = HyperParams(learning_rate=0.05, max_epochs=15, patience=3, seed=5)
    model = train(tx, ty, vx, vy, hp)
    assert model.best_val_auc == max(s.val_auc for s in model.history)
    recorded = [s for s in model.history if s.epoch == model.best_epoch]
    assert recorded and recorded[0].val_auc == model.best_val_auc


def test_train_improvement_needs_margin():
    # second epoch equal to first is not an improvement
    tx, ty, vx, vy = plateau_sets()
    model = train(tx, ty, vx, vy, HyperParams(max_epochs=8, patience=4, seed=9))
    assert model.best_epoch == 1
    assert model.stopped_epoch == 5
    assert AUC_IMPROVEMENT_EPS > 0.0


def test_train_bit_identical_for_fixed_seed():
    rng = np.random.default_rng(6)
    tx, ty = blobs(rng, 20)
    vx, vy = blobs(rng, 8)
    hp = HyperParams(learning_rate=0.02, max_epochs=6, patience=3, seed=11)
    m1 = train(tx, ty, vx, vy, hp)
    m2 = train(tx, ty, vx, vy, hp)
    assert [(s.epoch, repr(s.train_loss), repr(s.val_auc)) for s in m1.history] == [
        (s.epoch, repr(s.train_loss), repr(s.val_auc)) for s in m2.history
    ]
    for (w1, b1), (w2, b2) in zip(m1.params, m2.params):
        assert np.array_equal(w1, w2) and np.array_equal(b1, b2)


def test_train_seed_changes_trajectory():
    rng = np.random.default_rng(8)
    tx, ty = blobs(rng, 20, gap=1.0)
    vx, vy = blobs(rng, 8, gap=1.0)
    hp_a = HyperParams(max_epochs=4, patience=3, seed=1)
    hp_b = HyperParams(max_epochs=4, patience=3, seed=2)
    h_a = train(tx, ty, vx, vy, hp_a).history
    h_b = train(tx, ty, vx, vy, hp_b).history
    assert [s.train_loss for s in h_a] != [s.train_loss for s in h_b]


def test_train_rejects_single_class_validation():
    rng = np.random.default_rng(10)
    tx, ty = blobs(rng, 10)
    with pytest.raises(SingleClassError):
        train(tx, ty, tx[:4], np.ones(4, dtype=int), DEFAULT_HP)


def test_train_validates_inputs():
    rng = np.random.default_rng(12)
    tx, ty = blobs(rng, 10)
    vx, vy = blobs(rng, 4)
    with pytest.raises(ValidationError, match="dimensions differ"):
        train(tx, ty, vx[:, :2], vy, DEFAULT_HP)
    with pytest.raises(ValidationError, match="labels"):
        train(tx, np.array([2] * 20), vx, vy, DEFAULT_HP)
    with pytest.raises(ValidationError, match="finite"):
        train(np.full_like(tx, np.nan), ty, vx, vy, DEFAULT_HP)


def test_train_mlp_smoke():
    rng = np.random.default_rng(14)
    tx, ty = blobs(rng, 30)
    vx, vy = blobs(rng, 10)
    hp = HyperParams(learning_rate=0.05, max_epochs=15, patience=3, seed=15, hidden_layers=(6,))
    model = train(tx, ty, vx, vy, hp)
    assert len(model.params) == 2
    assert model.best_val_auc >= 0.99


# ---------------------------------------------------------------- predict/io


def test_predict_rejects_wrong_width():
    tx, ty, vx, vy = plateau_sets()
    model = train(tx, ty, vx, vy, HyperParams(max_epochs=4, patience=3))
    with pytest.raises(ValidationError, match="shape"):
        predict(model, np.zeros((3, 7)))


def test_model_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(16)
    tx, ty = blobs(rng, 20)
    vx, vy = blobs(rng, 8)
    hp = HyperParams(learning_rate=0.03, max_epochs=6, patience=3, seed=17, hidden_layers=(5,))
    model = train(tx, ty, vx, vy, hp)
    path = tmp_path / "model.txt"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.hp == model.hp
    assert loaded.feature_dim == model.feature_dim
    assert loaded.stopped_epoch == model.stopped_epoch
    assert loaded.best_epoch == model.best_epoch
    assert repr(loaded.best_val_auc) == repr(model.best_val_auc)
    probe = rng.normal(size=(9, 4))
    assert np.array_equal(predict(loaded, probe), predict(model, probe))


def test_load_model_errors(tmp_path):
    with pytest.raises(MissingInputError):
        load_model(tmp_path / "absent.txt")
    bad = tmp_path / "bad.txt"
    bad.write_text("not-a-model 9\n")
    with pytest.raises(ValidationError, match="header"):
        load_model(bad)
    trunc = tmp_path / "trunc.txt"
    trunc.write_text("fairage-model 1\nfeature_dim 3\n")
    with pytest.raises(ValidationError):
        load_model(trunc)


def test_write_history_format(tmp_path):
    tx, ty, vx, vy = plateau_sets()
    model = train(tx, ty, vx, vy, HyperParams(max_epochs=5, patience=3, seed=19))
    path = tmp_path / "history.csv"
    write_history(model, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "epoch,train_loss,val_auc"
    assert len(lines) == 1 + len(model.history)
    for line, stats in zip(lines[1:], model.history):
        epoch, loss, auc_v = line.split(",")
        assert int(epoch) == stats.epoch
        assert float(loss) == stats.train_loss
        assert float(auc_v) == stats.val_auc
