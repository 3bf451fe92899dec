"""Seeded generators of algebras, bimodules, states, automorphisms, group
actions, and twisted linear maps, plus constructors from plain-dict
descriptors shared with the command line interface."""

import itertools

import numpy as np

from .cstar import (AlgebraAutomorphism, CStarAlgebra, PreconditionError,
                    StateFunctional, flip_automorphism, haar_unitary_matrix,
                    identity_automorphism)
from .hilbmod import HilbertBimodule, make_bimodule, submodule_projection
from .crossed import FiniteGroup, GroupAction
from .freeprod import BaseExpectation
from .bogoliubov import BogoliubovMap


# -- seeded random generators ------------------------------------------------

def random_algebra(rng, max_blocks=2, max_size=3) -> CStarAlgebra:
    k = int(rng.integers(1, max_blocks + 1))
    sizes = tuple(int(rng.integers(1, max_size + 1)) for _ in range(k))
    return CStarAlgebra(sizes)


def random_bimodule(rng, base: CStarAlgebra, max_copies=2,
                    dim_cap=144) -> HilbertBimodule:
    """Random left-multiplicity matrix with unitary basis changes; retries
    until the underlying dimension is positive and under the cap."""
    sizes = base.block_sizes
    for _ in range(50):
        left = [tuple(int(rng.integers(0, max_copies + 1)) for _ in sizes)
                for _ in sizes]
        right = tuple(sum(c * n for c, n in zip(row, sizes)) for row in left)
        dim = sum(r * n for r, n in zip(right, sizes))
        acts_everywhere = all(any(row[k] for row in left)
                              for k in range(len(sizes)))
        if 0 < dim <= dim_cap and acts_everywhere:
            unitaries = [haar_unitary_matrix(rng, r) if r else
                         np.zeros((0, 0), complex) for r in right]
            return make_bimodule(base, right, left, unitaries, rng=rng)
    raise PreconditionError("no bimodule found under the dimension cap")


def random_state(rng, algebra: CStarAlgebra, faithful=True) -> StateFunctional:
    densities = []
    for n in algebra.block_sizes:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        d = z @ z.conj().T
        if faithful:
            d = d + 0.2 * np.eye(n)
        densities.append(d)
    total = sum(np.trace(d).real for d in densities)
    return StateFunctional(algebra, [d / total for d in densities])


def random_automorphism(rng, algebra: CStarAlgebra) -> AlgebraAutomorphism:
    """Random size-preserving block permutation combined with inner parts."""
    sizes = algebra.block_sizes
    source = np.arange(len(sizes))
    by_size = {}
    for j, n in enumerate(sizes):
        by_size.setdefault(n, []).append(j)
    for group in by_size.values():
        source[group] = rng.permutation(group)
    unitaries = [haar_unitary_matrix(rng, n) for n in sizes]
    return AlgebraAutomorphism(algebra, source=[int(s) for s in source],
                               unitaries=unitaries)


# -- criterion instance suites ----------------------------------------------

def creation_instances(seed, count=20):
    """(bimodule, truncation) pairs with bases up to blocks (2,3), underlying
    dimension at most 12, truncation at most 4."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        base = random_algebra(rng, max_blocks=2, max_size=3)
        try:
            H = random_bimodule(rng, base, max_copies=2, dim_cap=12)
        except PreconditionError:
            continue
        N = int(rng.integers(2, 5))
        out.append((H, N))
    return out


def vector_families(seed, count=50, max_vectors=4):
    """(module, vectors) pairs for orthogonalization and projection laws."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        base = random_algebra(rng, max_blocks=2, max_size=3)
        try:
            H = random_bimodule(rng, base, max_copies=2, dim_cap=24)
        except PreconditionError:
            continue
        m = int(rng.integers(1, max_vectors + 1))
        out.append((H, [H.random_vector(rng) for _ in range(m)]))
    return out


def amalg_instances(seed):
    """Three structurally distinct (phi1, phi2) pairs over a common base."""
    rng = np.random.default_rng(seed)
    out = []
    for sizes1, sizes2 in (((1, 1), (2,)), ((2,), (1, 1)), ((1, 1), (1, 1, 1))):
        A1, A2 = CStarAlgebra(sizes1), CStarAlgebra(sizes2)
        phi1 = BaseExpectation.from_state(random_state(rng, A1))
        phi2 = BaseExpectation.from_state(random_state(rng, A2))
        out.append((phi1, phi2))
    return out


def crossed_instances(seed):
    """(group, algebra, action) triples for Z/2, Z/3 and the symmetric group
    on three letters, each acting by permuting equal central summands."""
    rng = np.random.default_rng(seed)
    out = []
    z2 = FiniteGroup.cyclic(2)
    a2 = CStarAlgebra((2, 2))
    out.append((z2, a2, permutation_action(z2, a2,
                                           lambda g: _cyclic_perm(2, g))))
    z3 = FiniteGroup.cyclic(3)
    a3 = CStarAlgebra((1, 1, 1))
    out.append((z3, a3, permutation_action(z3, a3,
                                           lambda g: _cyclic_perm(3, g))))
    s3 = FiniteGroup.symmetric(3)
    a6 = CStarAlgebra((2, 2, 2))
    perms = list(itertools.permutations(range(3)))
    out.append((s3, a6, permutation_action(s3, a6, lambda g: perms[g])))
    return out


def _cyclic_perm(n, g):
    return [(i + g) % n for i in range(n)]


def permutation_action(group: FiniteGroup, algebra: CStarAlgebra,
                       perm_of) -> GroupAction:
    """The action alpha_g(x)_j = x_{p_g^{-1}(j)} moving block i of x to block
    p_g(i), for a homomorphism g -> p_g into block permutations."""
    maps = []
    for g in range(group.order):
        p = list(perm_of(g))
        inv = [0] * len(p)
        for i, pi in enumerate(p):
            inv[pi] = i
        maps.append(AlgebraAutomorphism(algebra, source=inv))
    return GroupAction(group, algebra, maps)


def flip_twisted_module():
    """The two-point base with the block-swapping bimodule, the swap map on
    it, and the flip automorphism it twists by."""
    B = CStarAlgebra((1, 1))
    H = make_bimodule(B, (1, 1), [(0, 1), (1, 0)])
    U = BogoliubovMap(H, np.array([[0, 1], [1, 0]], complex),
                      flip_automorphism(B))
    return H, U


def multiplicity_shift_instance(copies=3, block=2):
    """A matrix-block base with a bimodule of several copies of it, a growth
    subspace spanning one copy, and the map cyclically shifting the copies.

    Returns (H, K span, U); the tower dimensions grow linearly in p until
    saturation at p = copies."""
    B = CStarAlgebra((block,))
    H = make_bimodule(B, (copies * block,), [(copies,)])
    shift = np.kron(np.roll(np.eye(copies), 1, axis=0),
                    np.eye(block * block))
    U = BogoliubovMap(H, shift, identity_automorphism(B))
    gens = [H.from_flat(col) for col in
            np.eye(H.dim, dtype=complex)[:, :block * block].T]
    K = submodule_projection(gens)
    return H, K, U


def random_bogoliubov(rng, base_sizes=(2,), copies=2):
    """A random twisted map on the canonical multiplicity-form bimodule with
    an inner companion automorphism beta = Ad(v).

    Component j acts as x -> A_j x v_j* with A_j = (+)_k (w_jk (x) v_k), a
    choice that makes both defining equations hold for any unitaries w_jk."""
    B = CStarAlgebra(tuple(base_sizes))
    left = [tuple(copies for _ in base_sizes) for _ in base_sizes]
    right = tuple(sum(copies * n for n in base_sizes) for _ in base_sizes)
    H = make_bimodule(B, right, left, rng=rng)
    v = [haar_unitary_matrix(rng, n) for n in base_sizes]
    beta = AlgebraAutomorphism(B, unitaries=v)
    comp_blocks = []
    for j in range(len(base_sizes)):
        A_j = _direct_sum_mats(
            [np.kron(haar_unitary_matrix(rng, copies), v[k])
             for k in range(len(base_sizes))])
        comp_blocks.append(np.kron(A_j, v[j].conj()))
    U = _direct_sum_mats(comp_blocks)
    return BogoliubovMap(H, U, beta)


def _direct_sum_mats(mats):
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total), complex)
    off = 0
    for m in mats:
        out[off:off + m.shape[0], off:off + m.shape[0]] = m
        off += m.shape[0]
    return out


# -- descriptor constructors (shared with the command line) ------------------

def complex_array(data):
    """Nested lists with [re, im] leaves into a complex ndarray."""
    arr = np.asarray(data, float)
    if arr.shape and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def encode_complex(arr):
    """Complex ndarray into nested lists with [re, im] leaves."""
    arr = np.asarray(arr, complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def algebra_from_descriptor(d) -> CStarAlgebra:
    return CStarAlgebra(tuple(int(n) for n in d["blocks"]))


def bimodule_from_descriptor(d, base: CStarAlgebra) -> HilbertBimodule:
    right = tuple(int(r) for r in d["right_multiplicities"])
    left = [tuple(int(c) for c in row) for row in d["left_multiplicities"]]
    unitaries = None
    if "unitaries" in d:
        unitaries = [complex_array(u) for u in d["unitaries"]]
    return make_bimodule(base, right, left, unitaries)


def state_from_descriptor(d, algebra: CStarAlgebra) -> StateFunctional:
    return StateFunctional(algebra,
                           [complex_array(blk) for blk in d["densities"]])


def automorphism_from_descriptor(d, algebra) -> AlgebraAutomorphism:
    source = [int(s) for s in d["source"]] if "source" in d else None
    unitaries = None
    if "unitaries" in d:
        unitaries = [complex_array(u) for u in d["unitaries"]]
    return AlgebraAutomorphism(algebra, source=source, unitaries=unitaries)


def group_from_descriptor(d) -> FiniteGroup:
    return FiniteGroup(np.asarray(d["table"], int))


def action_from_descriptor(d, group, algebra) -> GroupAction:
    maps = [automorphism_from_descriptor(m, algebra)
            for m in d["automorphisms"]]
    return GroupAction(group, algebra, maps)


def bogoliubov_from_descriptor(d, module, beta) -> BogoliubovMap:
    return BogoliubovMap(module, complex_array(d["matrix"]), beta)
