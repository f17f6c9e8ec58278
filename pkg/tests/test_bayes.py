import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bcd_log_posterior_direct
from pathclust.changepoint import ChangePointError, bcd_posterior, bcd_segment, local_maxima
from pathclust.changepoint.bayes import log_evidence


def test_two_flat_regimes():
    x = np.r_[np.zeros(20), np.full(20, 10.0)]
    post = bcd_posterior(x)
    assert post.argmax == 20
    assert post.curve[20] > 0.999
    assert post.changepoints.positions == (20,)
    assert post.curve.sum() == pytest.approx(1)


def test_argmax_is_least_residual_split():
    x = np.r_[np.zeros(20), np.full(20, 10.0)]
    t = np.arange(40)
    resid = {}
    for theta in range(5, 36):
        r = 0.0
        for seg, ts in ((x[:theta], t[:theta]), (x[theta:], t[theta:])):
            c = np.polyfit(ts, seg, 1)
            r += ((seg - np.polyval(c, ts)) ** 2).sum()
        resid[theta] = r
    assert min(resid, key=resid.get) == bcd_posterior(x).argmax


def test_white_noise_rarely_fires():
    fired = sum(len(bcd_posterior(np.random.default_rng(s).normal(size=100)).changepoints) > 0 for s in range(100))
    assert fired <= 10


def test_ramp_is_diffuse():
    x = np.arange(60) * 0.5 + np.random.default_rng(0).normal(0, 0.3, 60)
    assert bcd_posterior(x).curve.max() < 0.5


@settings(max_examples=25, deadline=None)
@given(st.integers(12, 40), st.integers(0, 10_000))
def test_log_evidence_matches_design_matrix(n, seed):
    x = np.random.default_rng(seed).normal(size=n)
    le = log_evidence(x, min_size=2)
    for theta in range(2, n - 1):
        assert le[theta] == pytest.approx(bcd_log_posterior_direct(x, theta), rel=1e-8, abs=1e-8)
    assert np.isneginf(le[:2]).all() and np.isneginf(le[n - 1:]).all()


def test_local_maxima():
    assert local_maxima(np.array([0, 1, 0, 2, 2, 1, 3])) == [1, 3, 6]
    assert local_maxima(np.array([1.0, 1.0])) == [0]


def test_short_sequence_rejected():
    with pytest.raises(ChangePointError):
        bcd_posterior([1.0, 2.0, 3.0])


def test_recursive_segmentation():
    x = np.r_[np.zeros(40), np.full(40, 8.0), np.full(40, 2.0)] + np.random.default_rng(4).normal(0, 0.3, 120)
    cps = bcd_segment(x)
    assert cps.positions == (40, 80)
    assert all(s > 0.5 for s in cps.scores)


@pytest.mark.parametrize("seed", range(10))
def test_posterior_normalised_and_affine_invariant(seed):
    rng = np.random.default_rng(seed)
    x = np.r_[rng.normal(0, 1, 40), rng.normal(3, 1, 50)]
    post = bcd_posterior(x)
    assert post.curve.sum() == pytest.approx(1, abs=1e-9)
    assert ((post.curve >= 0) & (post.curve <= 1)).all()
    for a, b in ((2.5, -7.0), (-0.3, 100.0)):
        assert bcd_posterior(a * x + b).argmax == post.argmax
