import json

import numpy as np
import pytest

from prodchan import channels as chn
from prodchan import corpus, linalg, states
from prodchan.errors import NotCPError, NotTPError, ShapeError
from oracles import brute_apply, brute_choi


def qubit_states(n, seed):
    rng = np.random.default_rng(seed)
    return [states.random_density(2, int(rng.integers(1, 3)), rng) for _ in range(n)]


def test_apply_identity(rng):
    s = states.random_density(3, 2, rng)
    assert np.allclose(chn.apply(chn.identity_channel(3), s).mat, s.mat)


def test_apply_full_depolarizing():
    ch = corpus.noise_zoo("depolarizing", 2, 1.0)
    for s in qubit_states(5, 0):
        assert np.allclose(chn.apply(ch, s).mat, np.eye(2) / 2, atol=1e-14)


def test_apply_amplitude_damping():
    ch = corpus.noise_zoo("amplitude_damping", 2, 0.3)
    out = chn.apply(ch, states.DensityMatrix(np.diag([0.0, 1.0])))
    assert np.allclose(out.mat, np.diag([0.3, 0.7]), atol=1e-15)


def test_apply_shape_error():
    with pytest.raises(ShapeError):
        chn.apply(chn.identity_channel(2), states.maximally_mixed(3))


def test_apply_propagates_split():
    ch = chn.identity_channel(6, (2, 3))
    assert chn.apply(ch, states.maximally_mixed(6)).split == (2, 3)


def test_kraus_shape_checked():
    with pytest.raises(ShapeError):
        chn.KrausChannel((np.eye(2), np.eye(3)), 2, 2)
    with pytest.raises(ShapeError):
        chn.KrausChannel((), 2, 2)
    with pytest.raises(ShapeError):
        chn.KrausChannel((np.eye(4),), 4, 4, (3, 2))


def test_choi_identity():
    c = chn.choi(chn.identity_channel(2))
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 1
    assert np.array_equal(c.mat, expected)


def test_choi_matches_loop_definition():
    ch = corpus.random_channel(2, 3, 2, 5)
    assert np.allclose(chn.choi(ch).mat, brute_choi(ch.kraus, 2))


def test_choi_of_contractive():
    omega = states.random_density(3, 2, 4)
    c = chn.choi(chn.contractive_channel(omega, 2))
    assert np.allclose(c.mat, np.kron(np.eye(2), omega.mat), atol=1e-14)


@pytest.mark.parametrize("dims", [(2, 2, 3), (3, 2, 2), (4, 4, 1), (2, 5, 1)])
def test_choi_kraus_round_trip(dims):
    d_in, d_out, k = dims
    ch = corpus.random_channel(d_in, d_out, max(k, -(-d_in // d_out)), 17)
    back = chn.choi_to_kraus(chn.choi(ch))
    assert chn.channel_distance(back, ch) < 1e-9
    assert chn.choi_distance(chn.choi(back), chn.choi(ch)) < 1e-9


def test_choi_to_kraus_errors():
    bad = chn.ChoiMatrix(np.diag([1.5, -0.5, 1.0, 0.0]), 2, 2)
    with pytest.raises(NotCPError) as exc:
        chn.choi_to_kraus(bad)
    assert exc.value.code == "not-cp"
    not_tp = chn.ChoiMatrix(2 * chn.choi(chn.identity_channel(2)).mat, 2, 2)
    with pytest.raises(NotTPError) as exc:
        chn.choi_to_kraus(not_tp)
    assert exc.value.code == "not-tp"


def test_apply_via_choi_agrees_with_kraus(rng):
    for seed in range(10):
        ch = corpus.random_channel(3, 2, 3, seed)
        s = states.random_density(3, 3, rng)
        via_choi = chn.apply_via_choi(chn.choi(ch), s.mat)
        assert linalg.trace_norm(via_choi - chn.apply(ch, s).mat) < 1e-9


def test_validate_examples():
    assert max(chn.validate(chn.identity_channel(3))) < 1e-12
    assert chn.validate(chn.KrausChannel.from_kraus([np.eye(2)])).tp_defect == 0
    report = chn.validate(chn.KrausChannel.from_kraus([0.9 * np.eye(2)]))
    # ||0.81 I - I||_1 = 2 * 0.19
    assert report.tp_defect == pytest.approx(0.38, abs=1e-12)
    assert not report.accepted


def test_validate_cp_defect_vanishes_for_kraus_maps():
    # a Kraus sum is CP by construction, so only rounding can show up
    for seed in range(10):
        assert chn.validate(corpus.random_channel(4, 3, 3, seed)).cp_defect < 1e-12


def test_tensor_channel_factorizes(rng):
    a = corpus.noise_zoo("depolarizing", 2, 0.4)
    b = corpus.noise_zoo("amplitude_damping", 2, 0.3)
    ab = chn.tensor_channel(a, b)
    assert len(ab.kraus) == len(a.kraus) * len(b.kraus)
    assert ab.split_in == ab.split_out == (2, 2)
    for _ in range(100):
        rho, delta = states.random_density(2, 2, rng), states.random_density(2, 1, rng)
        out = chn.apply(ab, states.product_state(rho, delta)).mat
        expected = np.kron(chn.apply(a, rho).mat, chn.apply(b, delta).mat)
        assert linalg.trace_norm(out - expected) < 1e-10


def test_tensor_of_identities():
    ch = chn.tensor_channel(chn.identity_channel(2), chn.identity_channel(3))
    assert chn.channel_distance(ch, chn.identity_channel(6, (2, 3))) < 1e-14


def test_flip_of_identities_swaps(rng):
    sw = chn.flip_channel(chn.identity_channel(2), chn.identity_channel(2))
    rho, delta = states.random_density(2, 2, rng), states.random_density(2, 2, rng)
    out = chn.apply(sw, states.product_state(rho, delta)).mat
    assert np.allclose(out, np.kron(delta.mat, rho.mat))
    twice = chn.compose(sw, sw)
    assert chn.channel_distance(twice, chn.identity_channel(4)) < 1e-12


@pytest.mark.parametrize("d_a,d_b", [(2, 2), (2, 3), (3, 2)])
def test_flip_channel_factorizes(rng, d_a, d_b):
    psi_a = corpus.random_channel(d_a, d_b, 2, 1)
    psi_b = corpus.random_channel(d_b, d_a, 2, 2)
    ch = chn.flip_channel(psi_a, psi_b)
    assert ch.split_in == (d_a, d_b) and ch.split_out == (d_a, d_b)
    for _ in range(100):
        rho = states.random_density(d_a, d_a, rng)
        delta = states.random_density(d_b, 1, rng)
        out = chn.apply(ch, states.product_state(rho, delta)).mat
        expected = np.kron(chn.apply(psi_b, delta).mat, chn.apply(psi_a, rho).mat)
        assert linalg.trace_norm(out - expected) < 1e-10


def test_contractive_channel(rng):
    omega = states.random_density(3, 2, 8)
    ch = chn.contractive_channel(omega, 4)
    assert max(chn.validate(ch)) < 1e-10
    for p in states.probe_basis(4):
        assert linalg.trace_norm(chn.apply(ch, p).mat - omega.mat) < 1e-10


def test_fixed_a_with_partial_trace(rng):
    sigma = states.random_density(2, 2, 3)
    ch = chn.fixed_a_channel(sigma, chn.partial_trace_channel(2, 3, keep="b"))
    rho, delta = states.random_density(2, 2, rng), states.random_density(3, 2, rng)
    out = chn.apply(ch, states.product_state(rho, delta)).mat
    assert np.allclose(out, np.kron(sigma.mat, delta.mat))


def test_fixed_channels_on_bell():
    sigma = states.random_density(2, 1, 4)
    lam = corpus.random_channel(4, 2, 2, 6)
    out = chn.apply(chn.fixed_a_channel(sigma, lam), states.bell_state())
    assert states.product_distance(out) < 1e-12
    assert np.allclose(states.marginals(out)[0].mat, sigma.mat)
    tau = states.random_density(2, 2, 5)
    out = chn.apply(chn.fixed_b_channel(lam, tau), states.bell_state())
    assert states.product_distance(out) < 1e-12
    assert np.allclose(states.marginals(out)[1].mat, tau.mat)


def test_fixed_channel_shape_errors():
    with pytest.raises(ShapeError):
        chn.fixed_a_channel(states.maximally_mixed(2), corpus.random_channel(5, 3, 2, 0))
    with pytest.raises(ShapeError):
        chn.fixed_b_channel(corpus.random_channel(5, 2, 3, 0), states.maximally_mixed(3))


@pytest.mark.parametrize("keep,d_out", [("a", 2), ("b", 3)])
def test_partial_trace_channel(rng, keep, d_out):
    ch = chn.partial_trace_channel(2, 3, keep=keep)
    assert max(chn.validate(ch)) < 1e-12
    s = states.random_density(6, 4, rng, split=(2, 3))
    ref = linalg.partial_trace_b(s.mat, 2, 3) if keep == "a" else linalg.partial_trace_a(s.mat, 2, 3)
    assert ref.shape == (d_out, d_out)
    assert np.allclose(chn.apply(ch, s).mat, ref)


def test_compose():
    ch = corpus.random_channel(3, 2, 2, 1)
    assert chn.channel_distance(chn.compose(chn.identity_channel(2), ch), ch) < 1e-10
    assert chn.channel_distance(ch, ch) == pytest.approx(0, abs=1e-14)
    with pytest.raises(ShapeError):
        chn.compose(ch, ch)
    g = corpus.random_channel(2, 3, 2, 2)
    fg = chn.compose(ch, g)
    s = states.random_density(2, 2, 3)
    assert np.allclose(chn.apply(fg, s).mat, chn.apply(ch, chn.apply(g, s)).mat)
    assert np.allclose(chn.apply(fg, s).mat, brute_apply(ch.kraus, brute_apply(g.kraus, s.mat)))


def test_depolarizing_distance_grid():
    # J_dep - J_id = p (I/2 (x) I - J_id), whose spectrum is p * {-3/2, 1/2, 1/2, 1/2}
    ident = chn.identity_channel(2)
    dists = [chn.channel_distance(ident, corpus.noise_zoo("depolarizing", 2, p)) for p in (0, 0.25, 0.5, 1)]
    assert np.allclose(dists, [0, 0.75, 1.5, 3.0], atol=1e-12)
    assert all(x < y for x, y in zip(dists, dists[1:]))


def test_channel_distance_shape_error():
    with pytest.raises(ShapeError):
        chn.channel_distance(chn.identity_channel(2), chn.identity_channel(3))


def test_constructors_pass_validate(rng):
    for seed in range(20):
        r = np.random.default_rng(seed)
        a, b = corpus.random_channel(2, 2, 2, r), corpus.random_channel(3, 3, 3, r)
        sigma, tau = states.random_density(2, 2, r), states.random_density(3, 1, r)
        built = [
            chn.tensor_channel(a, b),
            chn.flip_channel(corpus.random_channel(2, 3, 2, r), corpus.random_channel(3, 2, 2, r)),
            chn.fixed_a_channel(sigma, corpus.random_channel(6, 3, 2, r)),
            chn.fixed_b_channel(corpus.random_channel(6, 2, 3, r), tau),
            chn.contractive_channel(states.product_state(sigma, tau), 6),
        ]
        for ch in built:
            assert chn.validate(ch).accepted


def test_channel_json_round_trip():
    ch = chn.fixed_a_channel(states.random_density(2, 2, 0), corpus.random_channel(6, 3, 2, 0))
    obj = json.loads(json.dumps(chn.channel_to_json(ch)))
    assert obj["split_in"] == [2, 3] and obj["dim_out"] == 6
    back = chn.channel_from_json(obj)
    assert back.split_out == (2, 3)
    assert chn.channel_distance(back, ch) == 0.0
    with pytest.raises(ShapeError):
        chn.channel_from_json({"dim_in": 2})
