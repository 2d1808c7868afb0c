import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from ldpcount import (
    PrivacyBudget,
    ValidationError,
    assemble_obfuscated,
    check_budget,
    derive_seed,
    gen_er,
    laplace_query,
    project_mu,
    randomize_response_row,
    sample_laplace,
    substream,
    unbias,
    unbias_span,
    unbias_variance,
)
from ldpcount.mechanisms import laplace_quantile, rr_keep_probability

INF = math.inf


# ---------------------------------------------------------------- Laplace


def test_laplace_quantile_fixed_points():
    assert laplace_quantile(0.5, 3.0) == 0.0
    assert laplace_quantile(0.25, 1.0) == pytest.approx(-math.log(2))
    assert laplace_quantile(0.75, 1.0) == pytest.approx(math.log(2))
    # symmetric
    assert laplace_quantile(0.1, 2.0) == pytest.approx(-laplace_quantile(0.9, 2.0))
    # u=0 stays finite thanks to the tiny-float clamp
    assert np.isfinite(laplace_quantile(0.0, 1.0))


def test_sample_laplace_variance_and_abs_mean():
    rng = substream(123, "laplace")
    x = sample_laplace(2.0, rng, size=10**6)
    assert abs(np.var(x) / 8.0 - 1.0) < 0.05  # Var = 2 b^2
    eps0 = 0.5
    y = sample_laplace(1.0 / eps0, substream(123, "laplace2"), size=10**6)
    # |x| is exponential with mean 1/eps0
    assert abs(np.mean(np.abs(y)) / (1.0 / eps0) - 1.0) < 0.05


def test_sample_laplace_ks():
    x = sample_laplace(1.5, substream(7, "ks"), size=10**5)
    assert sps.kstest(x, sps.laplace(scale=1.5).cdf).pvalue > 0.01


def test_sample_laplace_rejects_bad_scale():
    with pytest.raises(ValidationError):
        sample_laplace(0.0, substream(0))
    with pytest.raises(ValidationError):
        sample_laplace(-1.0, substream(0))


def test_laplace_query_no_noise_mode_is_exact():
    assert laplace_query(5.0, 1.0, INF) == 5.0


def test_laplace_query_validates():
    with pytest.raises(ValidationError):
        laplace_query(1.0, 0.0, 1.0, substream(0))
    with pytest.raises(ValidationError):
        laplace_query(1.0, 1.0, -2.0, substream(0))


def test_laplace_query_tail_probability():
    # P(|out - value| >= ln(n/zeta)/eps) = zeta/n for sensitivity 1
    n, zeta, eps = 100, 0.1, 1.0
    thr = math.log(n / zeta) / eps
    rng = substream(11, "tail")
    devs = np.abs(sample_laplace(1.0 / eps, rng, size=10**6))
    emp = np.mean(devs >= thr)
    expected = zeta / n
    sigma = math.sqrt(expected * (1 - expected) / 10**6)
    assert abs(emp - expected) <= 4 * sigma


# ------------------------------------------------------ randomized response


def test_rr_keep_probability_values():
    assert rr_keep_probability(math.log(3)) == pytest.approx(0.75)
    assert rr_keep_probability(INF) == 1.0


def test_rr_flip_frequencies():
    rng = substream(5, "rr")
    ones = np.ones(10**5, dtype=np.uint8)
    kept = randomize_response_row(ones, math.log(3), rng).mean()
    assert abs(kept - 0.75) <= 0.01
    zeros = np.zeros(10**5, dtype=np.uint8)
    raised = randomize_response_row(zeros, 1.0, substream(5, "rr0")).mean()
    assert abs(raised - 1.0 / (1.0 + math.e)) <= 0.01


def test_rr_identity_at_infinite_budget():
    bits = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
    out = randomize_response_row(bits, INF)
    assert np.array_equal(out, bits)


def test_rr_flip_probability_uniform_across_positions():
    # chi-square over per-position flip counts
    width, rows = 20, 5000
    rng = substream(9, "chi")
    flips = np.zeros(width)
    for _ in range(rows):
        out = randomize_response_row(np.zeros(width, dtype=np.uint8), 1.0, rng)
        flips += out
    assert sps.chisquare(flips).pvalue > 0.01


# ------------------------------------------------------------------ unbias


def test_unbias_exact_values():
    assert unbias(1, math.log(3)) == pytest.approx(1.5)
    assert unbias(0, math.log(3)) == pytest.approx(-0.5)
    assert unbias(1, INF) == 1.0
    assert unbias(0, INF) == 0.0


def test_unbias_span_and_variance():
    assert unbias_span(math.log(3)) == pytest.approx(2.0)
    assert unbias_span(INF) == 1.0
    assert unbias_variance(1.0) == pytest.approx(math.e / (math.e - 1) ** 2)
    assert unbias_variance(INF) == 0.0


@settings(max_examples=60, deadline=None)
@given(eps=st.floats(0.05, 8.0), a=st.integers(0, 1))
def test_unbias_is_exactly_unbiased(eps, a):
    # E[unbias(RR(a))] = unbias(1) p + unbias(0) (1-p) with p = P(tilde=1|a)
    keep = rr_keep_probability(eps)
    p_one = keep if a == 1 else 1.0 - keep
    mean = unbias(1, eps) * p_one + unbias(0, eps) * (1.0 - p_one)
    assert mean == pytest.approx(a, abs=1e-9)


def test_unbias_empirical_mean_and_variance():
    eps = 1.0
    rng = substream(21, "ub")
    bits = randomize_response_row(np.ones(10**5, dtype=np.uint8), eps, rng)
    vals = np.where(bits == 1, unbias(1, eps), unbias(0, eps))
    assert abs(vals.mean() - 1.0) <= 0.02
    assert abs(vals.var() / unbias_variance(eps) - 1.0) <= 0.05


# ------------------------------------------------------------- obfuscation


def test_assemble_symmetric_zero_diagonal():
    rng = substream(3, "asm")
    rows = [rng.integers(0, 2, size=i).astype(np.uint8) for i in range(6)]
    obf = assemble_obfuscated(rows, 1.0)
    assert np.array_equal(obf.bits, obf.bits.T)
    assert np.all(np.diag(obf.bits) == 0)


def test_assemble_rejects_missing_rows():
    with pytest.raises(ValidationError, match="user 1"):
        assemble_obfuscated([np.zeros(0, np.uint8), np.zeros(3, np.uint8)], 1.0)


def test_assemble_identity_matches_adjacency():
    g = gen_er(12, 0.4, seed=8)
    rows = []
    for i in range(g.n):
        bits = np.zeros(i, dtype=np.uint8)
        for j in g.adj[i]:
            if j < i:
                bits[j] = 1
        rows.append(randomize_response_row(bits, INF))
    obf = assemble_obfuscated(rows, INF)
    assert np.array_equal(obf.bits, g.adjacency_matrix)
    assert np.array_equal(obf.unbiased, g.adjacency_matrix.astype(float))


def test_unbiased_matrix_takes_two_values_off_diagonal():
    rng = substream(4, "two")
    rows = [rng.integers(0, 2, size=i).astype(np.uint8) for i in range(8)]
    obf = assemble_obfuscated(rows, 1.3)
    off = obf.unbiased[~np.eye(8, dtype=bool)]
    assert set(np.round(off, 12)) <= {
        round(unbias(0, 1.3), 12),
        round(unbias(1, 1.3), 12),
    }


# -------------------------------------------------------------- projection


def test_project_mu_examples():
    assert project_mu([1, 3, 4], 2) == (1, 3)
    assert project_mu([1, 3, 4], 10) == (1, 3, 4)
    assert project_mu([1, 3, 4], 0) == ()
    assert project_mu([1, 3, 4], -2) == ()


@settings(max_examples=60, deadline=None)
@given(
    neigh=st.lists(st.integers(0, 50), unique=True, max_size=20).map(sorted),
    d=st.integers(0, 25),
)
def test_project_mu_idempotent_and_shrinking(neigh, d):
    neigh = tuple(neigh)
    once = project_mu(neigh, d)
    assert len(once) <= len(neigh)
    assert project_mu(once, d) == once
    assert once == neigh[: max(d, 0)]


# ------------------------------------------------------------------ budget


def test_budget_validation():
    with pytest.raises(ValidationError):
        PrivacyBudget(0.0, 1.0, 1.0, 0.1)
    with pytest.raises(ValidationError):
        PrivacyBudget(1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        PrivacyBudget(1.0, 1.0, 1.0, 1.5)
    b = PrivacyBudget(0.5, 1.0, 0.5, 0.05)
    assert b.total == 2.0
    assert PrivacyBudget.from_json_dict(b.to_json_dict()) == b


def test_check_budget_examples():
    assert check_budget(PrivacyBudget(0.5, 1.0, 0.5, 0.1), 2.0)
    assert not check_budget(PrivacyBudget(1.0, 1.0, 1.0, 0.1), 2.0)
    for eps in (0.1, 1.0, 8.0):
        assert check_budget(PrivacyBudget(eps / 3, eps / 3, eps / 3, 0.1), eps)


# --------------------------------------------------------------- substream


def test_substream_deterministic_and_path_sensitive():
    a = substream(42, 0, 1, 2).random(4)
    b = substream(42, 0, 1, 2).random(4)
    c = substream(42, 0, 1, 3).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert derive_seed(42, 0, 1, 2) == derive_seed(42, 0, 1, 2)
    assert derive_seed(42, 0, 12) != derive_seed(42, 0, 1, 2)
    assert derive_seed(42, "x") != derive_seed(42, "y")
