from math import comb, ceil
import numpy as np
import pytest

from lpembed.exceptions import (
    DimensionMismatchError,
    InvalidInputError,
    ProvenanceError,
    UnsupportedPError,
)
from lpembed.models.embedding import Embedding
from lpembed.models.subspace import Subspace
from lpembed.services.embedder import (
    apply_embedding,
    capacity,
    certify,
    embed,
    empirical_distortion,
    inner_accuracy,
    realized_capacity_constant,
    sample_coordinates,
    size_bound,
)
from lpembed.services.lift import build_lift
from lpembed.services.subspace_io import gen_subspace


def lp_norm(x, p):
    return np.sum(np.asarray(x) ** p, axis=-1) ** (1.0 / p)


def identity_embedding(m, p, k=1, D=1, r=1):
    return Embedding(p=p, eps=0.5, eps_inner=0.5, theta=0.2, sigma=np.arange(m),
                     weights=np.ones(m), cert_lower=1.0, cert_upper=1.0,
                     k=k, m=m, D=D, r=r)


@pytest.fixture(scope="module")
def small_instance():
    sub = gen_subspace('gaussian', 2, 500, seed=2024)
    return sub, embed(sub, 4, 0.5)


def test_inner_accuracy():
    assert inner_accuracy(4, 0.5) == pytest.approx((0.5, 0.2))
    assert inner_accuracy(2, 0.25) == pytest.approx((0.125, 0.125 / 2.125))
    # ε'' limitado a 1/2
    assert inner_accuracy(8, 0.9)[0] == 0.5


def test_size_bound_example():
    assert size_bound(2, 4, 0.5) == 75
    assert size_bound(4, 2, 0.25) == 4 * 289


@pytest.mark.parametrize("k,p,eps", [(2, 4, 0.5), (3, 4, 0.25), (2, 6, 0.5), (4, 2, 0.25)])
def test_embedding_guarantee(k, p, eps):
    sub = gen_subspace('gaussian', k, 500, seed=k * 10 + p)
    emb = embed(sub, p, eps)

    eps_inner, theta = inner_accuracy(p, eps)
    q = p // 2
    assert emb.cert_upper <= 1 + eps
    assert emb.cert_lower >= 1 - 1e-9
    assert emb.n <= ceil((2 + eps_inner) ** 2 / eps_inner**2 * comb(k + q - 1, q) - 1e-9)
    assert emb.n <= min(emb.m, ceil(emb.r / theta**2 - 1e-9))
    assert emb.D == comb(k + q - 1, q)


def test_small_instance_size(small_instance):
    _, emb = small_instance
    assert emb.n <= 75
    assert emb.cert_upper <= 1.5


def test_certificate_dominates_angular_grid(small_instance):
    sub, emb = small_instance
    angles = np.linspace(0.0, np.pi, 100_000, endpoint=False)
    for chunk in np.array_split(angles, 20):
        X = np.column_stack([np.cos(chunk), np.sin(chunk)]) @ sub.basis.T
        ratios = lp_norm(apply_embedding(emb, X), 4) / lp_norm(X, 4)

        assert ratios.min() >= emb.cert_lower - 1e-9
        assert ratios.max() <= emb.cert_upper + 1e-9


def test_certificate_dominates_samples(small_instance):
    sub, emb = small_instance
    report = empirical_distortion(emb, sub, trials=10_000, seed=1)

    assert report.within_cert
    assert emb.cert_lower - 1e-9 <= report.min_ratio <= report.max_ratio <= emb.cert_upper + 1e-9
    assert report.max_ratio >= 1.0


def test_empirical_distortion_is_seeded(small_instance):
    sub, emb = small_instance
    first = empirical_distortion(emb, sub, trials=500, seed=3)
    second = empirical_distortion(emb, sub, trials=500, seed=3, batch_size=97)
    assert first.min_ratio == pytest.approx(second.min_ratio, rel=1e-12)
    assert first.max_ratio == pytest.approx(second.max_ratio, rel=1e-12)


def test_certify_matches_eigen_oracle(small_instance):
    sub, emb = small_instance
    lifted = build_lift(sub, 4)
    lambda_min, lambda_max, lower, upper = certify(emb, lifted)

    rows = lifted.ortho[emb.sigma]
    lam = np.linalg.eigvalsh(rows.T @ np.diag(emb.weights) @ rows)
    assert lambda_min == pytest.approx(1.0, abs=1e-9)
    assert lambda_max == pytest.approx(lam[-1], rel=1e-10)
    assert (lower, upper) == pytest.approx((emb.cert_lower, emb.cert_upper), abs=1e-12)


def test_certify_identity_sampling():
    sub = gen_subspace('gaussian', 2, 30, seed=8)
    lifted = build_lift(sub, 4)
    emb = identity_embedding(30, 4, k=2, D=lifted.D, r=lifted.r)

    assert certify(emb, lifted) == pytest.approx((1.0, 1.0, 1.0, 1.0), abs=1e-10)


def test_certify_rejects_foreign_lift(small_instance):
    _, emb = small_instance
    other = build_lift(gen_subspace('gaussian', 3, 500, seed=1), 4)
    with pytest.raises(ProvenanceError):
        certify(emb, other)


@pytest.mark.parametrize("p", [2, 4, 6])
def test_coordinate_subspace_selects_support(p):
    sub = gen_subspace('coordinate', 3, 10)
    emb = embed(sub, p, 0.5)

    assert emb.sigma.tolist() == [0, 1, 2]
    assert emb.cert_upper <= 1.5


def test_p2_matches_direct_coordinate_sampling():
    sub = gen_subspace('gaussian', 3, 300, seed=77)
    eps = 0.5
    emb = embed(sub, 2, eps)
    direct = sample_coordinates(sub.basis, eps / 2)

    assert np.array_equal(emb.sigma, direct.sigma)
    assert np.array_equal(emb.weights, direct.weights)
    assert emb.n <= 9 * sub.k / (eps / 2) ** 2


def test_sample_coordinates_guarantee():
    sub = gen_subspace('gaussian', 3, 200, seed=4)
    eps = 0.3
    weights = sample_coordinates(sub.basis, eps)
    rng = np.random.default_rng(0)
    X = rng.standard_normal((2000, 3)) @ sub.basis.T
    ratios = np.sqrt(np.sum(weights.weights * X[:, weights.sigma] ** 2, axis=1)) / np.linalg.norm(X, axis=1)

    assert ratios.min() >= 1 - 1e-9
    assert ratios.max() <= 1 + eps + 1e-9


@pytest.mark.parametrize("alpha", [2.0, 0.25])
def test_scale_invariance(alpha):
    sub = gen_subspace('gaussian', 2, 200, seed=12)
    scaled = Subspace(basis=alpha * sub.basis)

    base = embed(sub, 4, 0.5)
    other = embed(scaled, 4, 0.5)
    # Potências de 2 normalizam para a mesma base: resultado idêntico
    assert np.array_equal(base.sigma, other.sigma)
    assert np.array_equal(base.weights, other.weights)
    assert (other.cert_lower, other.cert_upper) == (base.cert_lower, base.cert_upper)


def test_apply_embedding_examples():
    emb = Embedding(p=4, eps=0.5, eps_inner=0.5, theta=0.2, sigma=[0], weights=[2.0],
                    cert_lower=1.0, cert_upper=1.0, k=1, m=2, D=1, r=1)
    assert apply_embedding(emb, np.array([5.0, 7.0])) == pytest.approx([2 ** 0.25 * 5])

    x = np.array([1.0, -2.0, 3.5])
    for p in (2, 4, 6):
        assert np.array_equal(apply_embedding(identity_embedding(3, p), x), x)


def test_apply_embedding_is_linear(small_instance):
    sub, emb = small_instance
    x = sub.basis @ np.array([0.3, -1.2])
    assert np.allclose(apply_embedding(emb, -3 * x), -3 * apply_embedding(emb, x))


def test_apply_embedding_dimension_mismatch(small_instance):
    _, emb = small_instance
    with pytest.raises(DimensionMismatchError):
        apply_embedding(emb, np.ones(emb.m + 1))


def test_identity_sampling_distortion():
    sub = gen_subspace('gaussian', 2, 30, seed=5)
    emb = identity_embedding(30, 4, k=2, D=3, r=3)
    report = empirical_distortion(emb, sub, trials=200, seed=0)

    assert report.min_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)


def test_embed_validation():
    sub = gen_subspace('gaussian', 2, 50, seed=0)
    with pytest.raises(UnsupportedPError):
        embed(sub, 3, 0.5)
    for eps in (0.0, 1.0, -0.1):
        with pytest.raises(InvalidInputError):
            embed(sub, 4, eps)


def test_capacity_below_minimum():
    assert capacity(size_bound(1, 4, 0.5) - 1, 4, 0.5) == 0
    assert capacity(size_bound(1, 4, 0.5), 4, 0.5) == 1


def test_capacity_matches_brute_force_scan():
    for n in (100, 500, 2_000, 10_000):
        k = 0
        while size_bound(k + 1, 2, 0.5) <= n:
            k += 1
        assert capacity(n, 2, 0.5) == k


def test_capacity_is_monotone():
    for p in (2, 4, 6):
        previous = 0
        for n in np.unique(np.geomspace(100, 100_000, 25).astype(int)):
            k = capacity(int(n), p, 0.5)
            assert k >= previous
            assert capacity(2 * int(n), p, 0.5) >= k
            previous = k


def test_realized_capacity_constant_is_positive():
    assert realized_capacity_constant(10_000, 4, 0.5) > 0


@pytest.mark.parametrize("alpha", [1e-90, 1e160])
def test_extreme_scale_embedding_and_distortion(alpha):
    sub = gen_subspace('gaussian', 2, 200, seed=12)
    scaled = Subspace(basis=alpha * sub.basis)

    emb = embed(scaled, 4, 0.5)
    report = empirical_distortion(emb, scaled, trials=50, seed=0)

    assert emb.passes
    assert emb.n <= size_bound(2, 4, 0.5)
    assert report.within_cert
    assert report.max_ratio == pytest.approx(
        empirical_distortion(emb, sub, trials=50, seed=0).max_ratio, rel=1e-9)


def test_empirical_distortion_rejects_negative_seed(small_instance):
    sub, emb = small_instance
    with pytest.raises(InvalidInputError):
        empirical_distortion(emb, sub, trials=10, seed=-1)


def test_small_instance_pinned_values(small_instance, pinned_values):
    sub, emb = small_instance
    report = empirical_distortion(emb, sub, trials=10_000, seed=1)

    pinned_values('small_instance', {
        'n': emb.n,
        'cert_lower': emb.cert_lower,
        'cert_upper': emb.cert_upper,
        'empirical_min_ratio': report.min_ratio,
        'empirical_max_ratio': report.max_ratio,
    })
