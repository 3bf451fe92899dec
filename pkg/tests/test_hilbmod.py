import numpy as np
import pytest

from fockmod.cstar import CStarAlgebra, uniform_trace_state
from fockmod.hilbmod import (augment, direct_sum, element_to_vector,
                             gns_bimodule, gram_schmidt, interior_tensor,
                             localize, make_bimodule, projection_from_basis,
                             submodule_projection, tensor_embed,
                             trivial_module, unnormalized_trace_state,
                             vector_to_element)
from fockmod.instances import random_algebra, random_bimodule

RNG = np.random.default_rng(23)


def small_module():
    B = CStarAlgebra((1, 2))
    return make_bimodule(B, (2, 3), [(0, 1), (1, 1)], rng=RNG)


def test_inner_product_sesquilinear_and_positive():
    H = small_module()
    x, y = H.random_vector(RNG), H.random_vector(RNG)
    b = H.base.random_element(RNG)
    g = H.inner(x, y.rmul(b)) - H.inner(x, y) * b
    assert g.norm() < 1e-12
    g = H.inner(x.rmul(b), y) - b.adjoint() * H.inner(x, y)
    assert g.norm() < 1e-12
    assert H.inner(x, x).min_eigenvalue() > -1e-12


def test_left_action_is_adjointable_homomorphism():
    H = small_module()
    a = H.base.random_element(RNG)
    b = H.base.random_element(RNG)
    La, Lb = H.left_matrix(a), H.left_matrix(b)
    assert np.linalg.norm(H.left_matrix(a * b) - La @ Lb) < 1e-12
    x, y = H.random_vector(RNG), H.random_vector(RNG)
    g = H.inner(H.left(a.adjoint(), x), y) - H.inner(x, H.left(a, y))
    assert g.norm() < 1e-12


def test_left_and_right_actions_commute():
    H = small_module()
    a = H.base.random_element(RNG)
    b = H.base.random_element(RNG)
    x = H.random_vector(RNG)
    g = H.left(a, x.rmul(b)) - H.left(a, x).rmul(b)
    assert g.norm() < 1e-12


def test_trivial_module_round_trip():
    B = CStarAlgebra((2, 1))
    T = trivial_module(B)
    b = B.random_element(RNG)
    assert (vector_to_element(element_to_vector(T, b)) - b).norm() < 1e-13
    x = element_to_vector(T, b)
    assert (T.inner(x, x) - b.adjoint() * b).norm() < 1e-12


def test_gram_schmidt_orthonormal_minimal_projections():
    H = small_module()
    vectors = [H.random_vector(RNG) for _ in range(3)]
    basis = gram_schmidt(vectors)
    for i, v in enumerate(basis):
        g = H.inner(v, v)
        assert (g * g - g).norm() < 1e-9
        assert abs(g.trace() - 1.0) < 1e-9
        for w in basis[i + 1:]:
            assert H.inner(v, w).norm() < 1e-9


def test_projection_from_basis_reproduces_span():
    H = small_module()
    vecs = [H.random_vector(RNG) for _ in range(2)]
    span = submodule_projection(vecs)
    Q = span.projection
    assert np.linalg.norm(Q @ Q - Q) < 1e-10
    assert np.linalg.norm(Q - Q.conj().T) < 1e-10
    for v in vecs:
        assert np.linalg.norm(Q @ v.flat - v.flat) < 1e-9
    b = H.base.random_element(RNG)
    for v in vecs:
        w = v.rmul(b)
        assert np.linalg.norm(Q @ w.flat - w.flat) < 1e-9


def test_submodule_projection_dimension():
    H = small_module()
    span = submodule_projection(H.basis())
    assert abs(span.complex_dim - H.dim) < 1e-9


def test_interior_tensor_inner_products():
    B = CStarAlgebra((1, 1))
    H = make_bimodule(B, (1, 1), [(0, 1), (1, 0)])
    _, step = interior_tensor(H, H)
    x1, y1 = H.random_vector(RNG), H.random_vector(RNG)
    x2, y2 = H.random_vector(RNG), H.random_vector(RNG)
    t1 = tensor_embed(step, x1, y1)
    t2 = tensor_embed(step, x2, y2)
    want = step.module.inner(t1, t2)
    got = H.inner(y1, H.left(H.inner(x1, x2), y2))
    assert (want - got).norm() < 1e-10


def test_tensor_balancing_over_base():
    B = CStarAlgebra((1, 1))
    H = make_bimodule(B, (1, 1), [(0, 1), (1, 0)])
    _, step = interior_tensor(H, H)
    x, y = H.random_vector(RNG), H.random_vector(RNG)
    b = B.random_element(RNG)
    lhs = tensor_embed(step, x.rmul(b), y)
    rhs = tensor_embed(step, x, H.left(b, y))
    assert (lhs - rhs).norm() < 1e-10


def test_direct_sum_embeddings_are_isometric():
    B = CStarAlgebra((1, 1))
    H = make_bimodule(B, (1, 1), [(0, 1), (1, 0)])
    K = trivial_module(B)
    ds = direct_sum(H, K)
    x = H.random_vector(RNG)
    y = K.random_vector(RNG)
    ex = ds.module.from_flat(ds.embed_first @ x.flat)
    ey = ds.module.from_flat(ds.embed_second @ y.flat)
    assert (ds.module.inner(ex, ex) - H.inner(x, x)).norm() < 1e-12
    assert (ds.module.inner(ex, ey)).norm() < 1e-12
    assert (ds.module.inner(ey, ey) - K.inner(y, y)).norm() < 1e-12


def test_augmented_module_unit_vector():
    H = small_module()
    aug = augment(H)
    xi = aug.xi
    g = aug.module.inner(xi, xi)
    assert (g - aug.module.base.identity()).norm() < 1e-12
    b = H.base.random_element(RNG)
    g = aug.module.left(b, xi) - xi.rmul(b)
    assert g.norm() < 1e-12


def test_gns_bimodule_inner_matches_state():
    B = CStarAlgebra((2,))
    rho = uniform_trace_state(B)
    H, xi = gns_bimodule(B, rho)
    b = B.random_element(RNG)
    g = H.inner(xi, H.left(b, xi)) - B.scalar(rho(b))
    assert g.norm() < 1e-10


def test_localization_adjoint_is_conjugate_transpose():
    H = small_module()
    tau = unnormalized_trace_state(H.base)
    loc = localize(H, tau)
    M = RNG.standard_normal((H.dim, H.dim)) \
        + 1j * RNG.standard_normal((H.dim, H.dim))
    assert np.linalg.norm(loc.adjoint(M) - M.conj().T) < 1e-12


def test_random_bimodule_respects_row_constraint():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        B = random_algebra(rng)
        H = random_bimodule(rng, B)
        for j, r in enumerate(H.right_mult):
            total = sum(c * n for c, n in
                        zip(H.left_mult[j], B.block_sizes))
            assert total == r
