"""Hilbert B,B-bimodules over finite-dimensional C*-algebras.

Canonical form: over B = M_{n_1} + ... + M_{n_k}, component j of a right
module is the space of r_j x n_j complex matrices with inner product
<x,y>_j = x_j^* y_j; the left action is a unital *-homomorphism in
multiplicity + unitary form.  Vectors flatten row-major, component by
component, which makes the unnormalized-block-trace localization the plain
Euclidean inner product on flat coordinates.
"""

from __future__ import annotations

import warnings

import numpy as np

from .cstar import (AlgebraElement, CStarAlgebra, PreconditionError,
                    StateFunctional, StructureError, block_diag_matrix,
                    DEFAULT_TOL)

RANK_CUTOFF = 1e-10


class HilbertBimodule:
    def __init__(self, base: CStarAlgebra, right_mult, left_mult, left_unitaries=None):
        self.base = base
        self.right_mult = tuple(int(r) for r in right_mult)
        if len(self.right_mult) != len(base.block_sizes):
            raise StructureError("one right multiplicity per base block required")
        if any(r < 0 for r in self.right_mult):
            raise StructureError("negative right multiplicity")
        self.left_mult = [tuple(int(c) for c in row) for row in left_mult]
        if len(self.left_mult) != len(base.block_sizes):
            raise StructureError("one left-multiplicity row per component required")
        for j, (r_j, row) in enumerate(zip(self.right_mult, self.left_mult)):
            if len(row) != len(base.block_sizes):
                raise StructureError("left-multiplicity row length mismatch")
            if sum(c * n for c, n in zip(row, base.block_sizes)) != r_j:
                raise StructureError(
                    f"multiplicity equation sum_k c[{j}][k] n_k = r_{j} fails")
        if left_unitaries is None:
            left_unitaries = [np.eye(r, dtype=complex) for r in self.right_mult]
        self.left_unitaries = []
        for r, u in zip(self.right_mult, left_unitaries):
            u = np.asarray(u, complex)
            if u.shape != (r, r):
                raise StructureError("left-action basis change has wrong shape")
            if r and np.linalg.norm(u.conj().T @ u - np.eye(r)) > DEFAULT_TOL * max(1, r):
                raise StructureError("left-action basis change is not unitary")
            self.left_unitaries.append(u)
        self.comp_dims = tuple(r * n for r, n in zip(self.right_mult, base.block_sizes))
        self.offsets = np.cumsum([0] + list(self.comp_dims))
        self.dim = int(self.offsets[-1])

    def __repr__(self):
        return (f"HilbertBimodule(base={self.base.block_sizes}, "
                f"right={self.right_mult}, dim={self.dim})")

    # -- vectors -----------------------------------------------------------

    def vector(self, comps):
        return ModuleVector(self, comps)

    def zero_vector(self):
        return ModuleVector(self, [np.zeros((r, n), complex)
                                   for r, n in zip(self.right_mult, self.base.block_sizes)])

    def from_flat(self, vec):
        vec = np.asarray(vec, complex).ravel()
        if vec.size != self.dim:
            raise StructureError(f"flat length {vec.size}, expected {self.dim}")
        comps = []
        for j, (r, n) in enumerate(zip(self.right_mult, self.base.block_sizes)):
            comps.append(vec[self.offsets[j]:self.offsets[j + 1]].reshape(r, n))
        return ModuleVector(self, comps)

    def basis(self):
        eye = np.eye(self.dim, dtype=complex)
        return [self.from_flat(eye[:, i]) for i in range(self.dim)]

    def random_vector(self, rng, scale=1.0):
        return self.from_flat(scale * (rng.standard_normal(self.dim)
                                       + 1j * rng.standard_normal(self.dim)))

    # -- actions as flat matrices -----------------------------------------

    def right_matrix(self, b: AlgebraElement):
        """Flat matrix of x -> x.b  (vec(X b) = (I x b^T) vec X, row-major)."""
        blocks = [np.kron(np.eye(r), bj.T)
                  for r, bj in zip(self.right_mult, b.blocks)]
        return block_diag_matrix(blocks, self.dim)

    def left_rep_block(self, j, b: AlgebraElement):
        """lambda_j(b): the left action on the row index of component j."""
        row = self.left_mult[j]
        pieces = []
        for k, c in enumerate(row):
            if c:
                pieces.append(np.kron(np.eye(c), b.blocks[k]))
        diag = block_diag_matrix(pieces, self.right_mult[j]) if pieces \
            else np.zeros((self.right_mult[j],) * 2, complex)
        u = self.left_unitaries[j]
        return u @ diag @ u.conj().T

    def left_matrix(self, b: AlgebraElement):
        blocks = [np.kron(self.left_rep_block(j, b), np.eye(n))
                  for j, n in enumerate(self.base.block_sizes)]
        return block_diag_matrix(blocks, self.dim)

    def left(self, b, x: "ModuleVector"):
        comps = [self.left_rep_block(j, b) @ xj for j, xj in enumerate(x.comps)]
        return ModuleVector(self, comps)

    def inner(self, x: "ModuleVector", y: "ModuleVector") -> AlgebraElement:
        """B-valued inner product, conjugate-linear in the first slot."""
        if x.parent is not self or y.parent is not self:
            raise StructureError("vectors belong to a different bimodule")
        return AlgebraElement(self.base, [xj.conj().T @ yj
                                          for xj, yj in zip(x.comps, y.comps)])

    def annihilated_central_summands(self):
        k = len(self.base.block_sizes)
        return [kk for kk in range(k)
                if all(row[kk] == 0 for row in self.left_mult)]

    @property
    def left_action_injective(self):
        return not self.annihilated_central_summands()


class ModuleVector:
    def __init__(self, parent: HilbertBimodule, comps):
        self.parent = parent
        self.comps = []
        for (r, n), c in zip(zip(parent.right_mult, parent.base.block_sizes), comps):
            c = np.asarray(c, complex)
            if c.shape != (r, n):
                raise StructureError(f"component shape {c.shape}, expected ({r},{n})")
            self.comps.append(c)

    @property
    def flat(self):
        if not self.comps:
            return np.zeros(0, complex)
        return np.concatenate([c.ravel() for c in self.comps])

    def __add__(self, other):
        return ModuleVector(self.parent, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return ModuleVector(self.parent, [a - b for a, b in zip(self.comps, other.comps)])

    def __mul__(self, z):
        return ModuleVector(self.parent, [a * z for a in self.comps])

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def rmul(self, b: AlgebraElement):
        return ModuleVector(self.parent, [c @ bj for c, bj in zip(self.comps, b.blocks)])

    def lmul(self, b: AlgebraElement):
        return self.parent.left(b, self)

    def norm(self):
        """Module norm ||<x,x>||^(1/2)."""
        return float(np.sqrt(max(0.0, self.parent.inner(self, self).norm())))

    def flat_norm(self):
        return float(np.linalg.norm(self.flat))

    def __repr__(self):
        return f"ModuleVector(dim={self.parent.dim}, norm={self.norm():.4g})"


class ModuleOperator:
    """Adjointable B-linear operator, stored on flat coordinates."""

    def __init__(self, parent: HilbertBimodule, matrix):
        matrix = np.asarray(matrix, complex)
        if matrix.shape != (parent.dim, parent.dim):
            raise StructureError("operator shape does not match the module")
        self.parent = parent
        self.matrix = matrix

    def __call__(self, x: ModuleVector) -> ModuleVector:
        return self.parent.from_flat(self.matrix @ x.flat)

    def adjoint(self):
        # trace localization is Euclidean, so the adjoint is the conjugate
        # transpose; for B-linear operators it is also the B-valued adjoint
        return ModuleOperator(self.parent, self.matrix.conj().T)

    def b_linearity_residual(self):
        res = 0.0
        for e in self.parent.base.basis():
            R = self.parent.right_matrix(e)
            res = max(res, np.linalg.norm(self.matrix @ R - R @ self.matrix, 2))
        return res / max(1.0, np.linalg.norm(self.matrix, 2))


# -- building blocks -------------------------------------------------------

def trivial_module(base: CStarAlgebra) -> HilbertBimodule:
    """B as a bimodule over itself: component j is n_j x n_j, both actions
    are multiplication, <x,y> = x* y."""
    k = len(base.block_sizes)
    left = [[1 if i == j else 0 for i in range(k)] for j in range(k)]
    return HilbertBimodule(base, base.block_sizes, left)


def element_to_vector(module: HilbertBimodule, b: AlgebraElement) -> ModuleVector:
    if module.right_mult != module.base.block_sizes:
        raise StructureError("module is not B viewed as a bimodule over itself")
    return ModuleVector(module, [blk.copy() for blk in b.blocks])


def vector_to_element(x: ModuleVector) -> AlgebraElement:
    return AlgebraElement(x.parent.base, [c.copy() for c in x.comps])


def make_bimodule(base, right_mult, left_mult, left_unitaries=None,
                  rng=None, tol=DEFAULT_TOL) -> HilbertBimodule:
    """Validated construction; checks the bimodule laws on a seeded sample."""
    module = HilbertBimodule(base, right_mult, left_mult, left_unitaries)
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(3):
        b = base.random_element(rng)
        c = base.random_element(rng)
        x = module.random_vector(rng)
        y = module.random_vector(rng)
        scale = max(1.0, b.norm() * x.norm() * y.norm())
        res = (module.inner(x.lmul(b), y)
               - module.inner(x, y.lmul(b.adjoint()))).norm()
        if res > tol * scale:
            raise StructureError(f"<b.x, y> = <x, b*.y> fails: residual {res:.2e}")
        res = (module.left(b * c, x) - module.left(b, module.left(c, x))).flat_norm()
        if res > tol * max(1.0, b.norm() * c.norm() * x.flat_norm()):
            raise StructureError("left action is not multiplicative")
        gram = module.inner(x, x)
        if not gram.is_positive():
            raise StructureError("<x,x> is not positive")
    if not module.left_action_injective:
        warnings.warn("left action annihilates a central summand "
                      f"{module.annihilated_central_summands()}", stacklevel=2)
    return module


# -- Gram-Schmidt and complemented projections -----------------------------

def gram_schmidt(X, drop_tol=None):
    """Orthogonalize a finite family of module vectors.

    Returns V with the same generated submodule, pairwise <v,w> = 0 and each
    <v,v> a minimal projection of B.  Inputs are first split along the
    minimal projections of the base, then orthogonalized recursively with a
    second re-orthogonalization pass for numerical stability.
    """
    X = [x for x in X]
    if not X:
        return []
    module = X[0].parent
    base = module.base
    scale = max([x.norm() for x in X] + [1.0])
    if drop_tol is None:
        drop_tol = 1e-8 * scale
    pieces = []
    for x in X:
        for (j, q) in base.minimal_projection_indices():
            pieces.append((x.rmul(base.matrix_unit(j, q, q)), j, q))
    V = []
    for w, j, q in pieces:
        for _ in range(2):
            for v in V:
                w = w - v.rmul(module.inner(v, w))
        t = w.comps[j][:, q]
        length = float(np.linalg.norm(t))
        # w = w.e_{qq}, so <w,w> = |col|^2 e_qq and the module norm is |col|
        if length <= drop_tol:
            continue
        V.append(w * (1.0 / length))
    return V


class SubmoduleSpan:
    """Finitely generated submodule with its orthogonal basis and projection."""

    def __init__(self, parent, generators, basis, projection):
        self.parent = parent
        self.generators = generators
        self.basis = basis
        self.projection = projection

    @property
    def complex_dim(self):
        return int(round(np.trace(self.projection).real))

    def __repr__(self):
        return f"SubmoduleSpan(dim_C={self.complex_dim}, of {self.parent!r})"


def projection_from_basis(module, V):
    """P h = sum_v v<v,h> as a flat matrix."""
    P = np.zeros((module.dim, module.dim), complex)
    for v in V:
        blocks = [np.kron(vj @ vj.conj().T, np.eye(n))
                  for vj, n in zip(v.comps, module.base.block_sizes)]
        P += block_diag_matrix(blocks, module.dim)
    return P


def submodule_projection(X, drop_tol=None) -> SubmoduleSpan:
    if not X:
        raise StructureError("submodule_projection of an empty family: "
                             "pass the parent module explicitly via empty_span")
    module = X[0].parent
    V = gram_schmidt(X, drop_tol=drop_tol)
    return SubmoduleSpan(module, list(X), V, projection_from_basis(module, V))


def empty_span(module) -> SubmoduleSpan:
    return SubmoduleSpan(module, [], [], np.zeros((module.dim, module.dim), complex))


def complex_rank(flat_vectors, cutoff=RANK_CUTOFF):
    """Rank of the complex span of flat vectors, relative singular cutoff."""
    A = np.array([np.asarray(v).ravel() for v in flat_vectors])
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > cutoff * s[0]))


# -- canonicalization of abstract quotient modules -------------------------

def canonicalize(base, gram, right_apply, left_apply, rank_cutoff=RANK_CUTOFF):
    """Quotient an abstract semi-inner-product module and recover canonical form.

    gram: the trace-localized scalar Gram matrix on an abstract spanning
    family (size m); the unnormalized block trace is faithful, so its kernel
    is exactly the B-valued null space.
    right_apply(unit_index, X): raw right action of a matrix unit applied to
    columns of X (m x cols); left_apply likewise for the left action.

    Returns (module, C) where C maps raw coordinates to canonical flat
    coordinates, preserving inner products.
    """
    m = gram.shape[0]
    gram = 0.5 * (gram + gram.conj().T)
    lam, E = np.linalg.eigh(gram)
    top = max(lam.max(initial=0.0), 0.0)
    if top == 0.0:
        raise StructureError("zero inner product: nothing to canonicalize")
    if lam.min() < -1e-8 * top:
        raise PreconditionError(
            f"semi-inner product fails positivity: min eigenvalue {lam.min():.3e}")
    keep = lam > rank_cutoff * top
    lam_k, E_k = lam[keep], E[:, keep]
    d = int(keep.sum())
    Z = np.sqrt(lam_k)[:, None] * E_k.conj().T          # d x m, G-orthonormal coords
    Zp = E_k * (1.0 / np.sqrt(lam_k))[None, :]          # m x d, right inverse of Z

    def rq(unit):
        return Z @ right_apply(unit, Zp)

    def lq(unit):
        return Z @ left_apply(unit, Zp)

    k = len(base.block_sizes)
    range_bases = []
    right_r = []
    for j in range(k):
        P = rq((j, 0, 0))
        P = 0.5 * (P + P.conj().T)
        vals, vecs = np.linalg.eigh(P)
        sel = vals > 0.5
        range_bases.append(vecs[:, sel])
        right_r.append(int(sel.sum()))
    if sum(r * n for r, n in zip(right_r, base.block_sizes)) != d:
        raise StructureError(
            "component dimensions do not sum to the quotient dimension "
            f"({right_r} vs {d}); the right action is inconsistent")

    # unitary change of coordinates: quotient -> canonical flat
    rows = []
    for j, n in enumerate(base.block_sizes):
        W = range_bases[j]
        shift = {0: np.eye(d, dtype=complex)}
        for q in range(1, n):
            shift[q] = rq((j, q, 0))
        for p in range(right_r[j]):
            for q in range(n):
                rows.append(W[:, p].conj() @ shift[q])
    M = np.array(rows)
    C = M @ Z

    # left action restricted to each component, decomposed into canonical form
    left_mult = []
    left_unitaries = []
    lq_cache = {}

    def lq_c(unit):
        if unit not in lq_cache:
            lq_cache[unit] = lq(unit)
        return lq_cache[unit]

    for j in range(k):
        W = range_bases[j]
        r_j = right_r[j]
        row = []
        cols = []
        for kk, n_k in enumerate(base.block_sizes):
            A11 = W.conj().T @ lq_c((kk, 0, 0)) @ W
            c = int(round(np.trace(A11).real))
            row.append(c)
            if c == 0:
                continue
            vals, vecs = np.linalg.eigh(0.5 * (A11 + A11.conj().T))
            anchors = vecs[:, np.argsort(vals)[::-1][:c]]
            for t in range(c):
                for q in range(n_k):
                    Aq1 = A11 if q == 0 else W.conj().T @ lq_c((kk, q, 0)) @ W
                    cols.append(Aq1 @ anchors[:, t])
        if sum(c * n for c, n in zip(row, base.block_sizes)) != r_j:
            raise StructureError(
                f"left action on component {j} is not a unital homomorphism")
        U = np.array(cols).T if cols else np.zeros((r_j, 0), complex)
        # exact arithmetic gives orthonormal columns; polish numerically
        if U.size:
            Uq, _ = np.linalg.qr(U)
            ip = np.einsum("ij,ij->j", Uq.conj(), U)
            U = Uq * (ip / np.abs(ip))[None, :]
        left_mult.append(row)
        left_unitaries.append(U if U.size else np.eye(r_j, dtype=complex))

    module = HilbertBimodule(base, right_r, left_mult, left_unitaries)
    return module, C


# -- interior tensor products ----------------------------------------------

class TensorStep:
    """Structural presentation of T = H (x)_B K in canonical form.

    Component j of T has rows indexed by triples (k, t, a): base block k,
    copy index t below the left multiplicity of K at (j, k), and a row index
    a of component k of H.  A simple tensor lands there as
    T_j[(k,t,a), q] = sum_p h_k[a, p] (U_j^K^* k_j)[(k,t,p), q], which
    preserves the balanced inner product and both actions.
    """

    def __init__(self, H: HilbertBimodule, K: HilbertBimodule):
        base = H.base
        if K.base != base:
            raise StructureError("tensor factors over different base algebras")
        self.H, self.K = H, K
        sizes = base.block_sizes
        nb = len(sizes)
        rho = tuple(sum(K.left_mult[j][k] * H.right_mult[k]
                        for k in range(nb)) for j in range(nb))
        left = [tuple(sum(K.left_mult[j][k] * H.left_mult[k][s]
                          for k in range(nb)) for s in range(nb))
                for j in range(nb)]
        unitaries = []
        for j in range(nb):
            Q = np.zeros((rho[j], rho[j]), complex)
            row_base = []
            off = 0
            for k in range(nb):
                for t in range(K.left_mult[j][k]):
                    rk = H.right_mult[k]
                    Q[off:off + rk, off:off + rk] = H.left_unitaries[k]
                    row_base.append((k, t, off))
                    off += rk
            sigma = np.zeros(rho[j], dtype=int)
            i_can = 0
            for s in range(nb):
                n_s = sizes[s]
                for k, t, rb in row_base:
                    offs_H = _canon_offsets(H.left_mult[k], sizes)
                    for ts in range(H.left_mult[k][s]):
                        for p in range(n_s):
                            sigma[i_can] = rb + offs_H[s] + ts * n_s + p
                            i_can += 1
            perm = np.zeros((rho[j], rho[j]), complex)
            perm[sigma, np.arange(rho[j])] = 1.0
            unitaries.append(Q @ perm)
        self.module = HilbertBimodule(base, rho, left, unitaries)
        self._UKd = [u.conj().T for u in K.left_unitaries]

    def apply(self, h_flat):
        """Matrix of k -> class(h (x) k), shape (dim T, dim K)."""
        h = self.H.from_flat(h_flat)
        base = self.H.base
        nb = len(base.block_sizes)
        out = np.zeros((self.module.dim, self.K.dim), complex)
        for j, n_j in enumerate(base.block_sizes):
            rho_j = self.module.right_mult[j]
            rK_j = self.K.right_mult[j]
            if rho_j == 0 or rK_j == 0:
                continue
            M = np.zeros((rho_j, rK_j), complex)
            row = col = 0
            for k in range(nb):
                n_k = base.block_sizes[k]
                for _ in range(self.K.left_mult[j][k]):
                    M[row:row + H_rows(h, k), col:col + n_k] = h.comps[k]
                    row += H_rows(h, k)
                    col += n_k
            B = M @ self._UKd[j]
            out[self.module.offsets[j]:self.module.offsets[j + 1],
                self.K.offsets[j]:self.K.offsets[j + 1]] = \
                np.kron(B, np.eye(n_j))
        return out

    def embed(self, x: ModuleVector, y: ModuleVector) -> ModuleVector:
        return self.module.from_flat(self.apply(x.flat) @ y.flat)

    @property
    def matrix(self):
        """Dense map kron(flat H, flat K) -> flat T (built on demand)."""
        if not hasattr(self, "_matrix"):
            dH, dK = self.H.dim, self.K.dim
            C = np.zeros((self.module.dim, dH * dK), complex)
            eye = np.eye(dH)
            for i in range(dH):
                C[:, i * dK:(i + 1) * dK] = self.apply(eye[:, i])
            self._matrix = C
        return self._matrix


def H_rows(h: ModuleVector, k):
    return h.comps[k].shape[0]


def interior_tensor(H: HilbertBimodule, K: HilbertBimodule):
    """H (x)_B K with <h1(x)k1, h2(x)k2> = <k1, <h1,h2>.k2>, in canonical
    form.  Returns (module, step) with step a TensorStep embedding simple
    tensors."""
    step = TensorStep(H, K)
    return step.module, step


def tensor_embed(step: TensorStep, x: ModuleVector, y: ModuleVector,
                 target=None):
    """Class of the simple tensor x (x) y in a built interior tensor product."""
    return step.embed(x, y)


# -- direct sums and augmentation ------------------------------------------

class DirectSum:
    def __init__(self, module, embed_first, embed_second):
        self.module = module
        self.embed_first = embed_first      # dim(sum) x dim(H) matrix
        self.embed_second = embed_second    # dim(sum) x dim(K) matrix


def direct_sum(H: HilbertBimodule, K: HilbertBimodule) -> DirectSum:
    base = H.base
    if K.base != base:
        raise StructureError("direct sum over different base algebras")
    nblocks = len(base.block_sizes)
    right = tuple(rh + rk for rh, rk in zip(H.right_mult, K.right_mult))
    left = [tuple(ch + ck for ch, ck in zip(H.left_mult[j], K.left_mult[j]))
            for j in range(nblocks)]
    unitaries = []
    for j in range(nblocks):
        rH, rK = H.right_mult[j], K.right_mult[j]
        # permutation aligning blkdiag(D_H, D_K) with the merged canonical order
        sigma = np.zeros(rH + rK, dtype=int)
        offs_H, offs_K = _canon_offsets(H.left_mult[j], base.block_sizes), \
            _canon_offsets(K.left_mult[j], base.block_sizes)
        i_sum = 0
        for k, n_k in enumerate(base.block_sizes):
            cH, cK = H.left_mult[j][k], K.left_mult[j][k]
            for t in range(cH + cK):
                for q in range(n_k):
                    if t < cH:
                        sigma[i_sum] = offs_H[k] + t * n_k + q
                    else:
                        sigma[i_sum] = rH + offs_K[k] + (t - cH) * n_k + q
                    i_sum += 1
        perm = np.zeros((rH + rK, rH + rK), complex)
        perm[sigma, np.arange(rH + rK)] = 1.0
        blk = block_diag_matrix([H.left_unitaries[j], K.left_unitaries[j]], rH + rK)
        unitaries.append(blk @ perm)
    module = HilbertBimodule(base, right, left, unitaries)
    embed_H = np.zeros((module.dim, H.dim), complex)
    embed_K = np.zeros((module.dim, K.dim), complex)
    for j, n in enumerate(base.block_sizes):
        rH = H.right_mult[j]
        rK = K.right_mult[j]
        so = module.offsets[j]
        embed_H[so:so + rH * n, H.offsets[j]:H.offsets[j + 1]] = np.eye(rH * n)
        embed_K[so + rH * n:so + (rH + rK) * n,
                K.offsets[j]:K.offsets[j + 1]] = np.eye(rK * n)
    return DirectSum(module, embed_H, embed_K)


def _canon_offsets(mult_row, block_sizes):
    offs = []
    acc = 0
    for c, n in zip(mult_row, block_sizes):
        offs.append(acc)
        acc += c * n
    return offs


class AugmentedModule:
    """H~ = H + B with the distinguished unit vector xi = 0 + 1_B."""

    def __init__(self, H: HilbertBimodule):
        vac = trivial_module(H.base)
        ds = direct_sum(H, vac)
        self.plain = H
        self.module = ds.module
        self.embed_module = ds.embed_first
        self.embed_base = ds.embed_second
        self.xi = self.module.from_flat(
            self.embed_base @ element_to_vector(vac, H.base.identity()).flat)

    def embed_vector(self, x: ModuleVector) -> ModuleVector:
        return self.module.from_flat(self.embed_module @ x.flat)


def augment(H: HilbertBimodule) -> AugmentedModule:
    return AugmentedModule(H)


# -- GNS and CP-map bimodules ----------------------------------------------

def _pair_quotient(A: CStarAlgebra, inner_unit_fn):
    """Quotient of A (x) A by the null space of a semi-inner product given
    on algebra basis pairs via inner_unit_fn(s_idx, t_idx) -> AlgebraElement."""
    mod_A = trivial_module(A)
    dA = A.dim
    units = list(A.unit_index_iter())
    lmat = {u: mod_A.left_matrix(A.matrix_unit(*u)) for u in units}

    gram = np.zeros((dA * dA, dA * dA), complex)
    for s in range(dA):
        for t in range(dA):
            z = inner_unit_fn(s, t)
            gram[s * dA:(s + 1) * dA, t * dA:(t + 1) * dA] = \
                sum(z.blocks[j][p, q] * lmat[(j, p, q)]
                    for (j, p, q) in units
                    if z.blocks[j][p, q] != 0) \
                if z.norm() > 0 else 0.0

    def right_apply(unit, X):
        R = mod_A.right_matrix(A.matrix_unit(*unit))
        Xr = X.reshape(dA, dA, -1)
        return np.einsum("ab,xbc->xac", R, Xr).reshape(dA * dA, -1)

    def left_apply(unit, X):
        L = lmat[unit]
        Xr = X.reshape(dA, dA, -1)
        return np.einsum("ax,xbc->abc", L, Xr).reshape(dA * dA, -1)

    module, C = canonicalize(A, gram, right_apply, left_apply)
    one = A.identity().flat
    xi = module.from_flat(C @ np.kron(one, one))
    return module, xi, C


def gns_bimodule(B: CStarAlgebra, rho: StateFunctional):
    """L^2(B, rho) (x) B: quotient of B (x) B under
    <a(x)b, a'(x)b'> = b* rho(a* a') b'.  Returns (module, xi) with xi the
    class of 1 (x) 1, satisfying <xi, b.xi> = rho(b) 1."""
    if rho.algebra != B:
        raise StructureError("state on a different algebra")
    if not rho.has_faithful_gns:
        warnings.warn("state annihilates a central summand; the quotient "
                      "bimodule has a non-injective left action", stacklevel=2)
    basis = B.basis()

    def inner_unit(s, t):
        return B.scalar(rho(basis[s].adjoint() * basis[t]))

    module, xi, _ = _pair_quotient(B, inner_unit)
    return module, xi


def cp_bimodule(A: CStarAlgebra, eta):
    """Bimodule of a completely positive map: quotient of A (x) A under
    <a1(x)a2, a1'(x)a2'> = a2* eta(a1* a1') a2'.  Rejects maps for which the
    localized semi-inner product fails positivity (eta not CP)."""
    if eta.domain != A or eta.codomain != A:
        raise StructureError("eta must map the algebra to itself")
    basis = A.basis()

    def inner_unit(s, t):
        return eta(basis[s].adjoint() * basis[t])

    try:
        module, xi, C = _pair_quotient(A, inner_unit)
    except PreconditionError as exc:
        raise PreconditionError(
            "semi-inner product a2* eta(a1* a1') a2' is not positive; "
            "eta is not completely positive") from exc
    return module, xi


# -- localization ----------------------------------------------------------

class Localization:
    """Hilbert-space data from a faithful state: Gram form, factor, adjoints."""

    def __init__(self, module: HilbertBimodule, tau: StateFunctional):
        if tau.algebra != module.base:
            raise StructureError("localizing state on a different algebra")
        if not tau.is_faithful:
            raise PreconditionError("localizing state is not faithful")
        self.module = module
        self.tau = tau
        blocks = [np.kron(np.eye(r), d.T)
                  for r, d in zip(module.right_mult, tau.densities)]
        self.gram = block_diag_matrix(blocks, module.dim)
        self.factor = np.linalg.cholesky(self.gram)

    def inner(self, x: ModuleVector, y: ModuleVector) -> complex:
        return complex(x.flat.conj() @ (self.gram @ y.flat))

    def norm(self, x: ModuleVector) -> float:
        return float(np.sqrt(max(0.0, self.inner(x, x).real)))

    def adjoint(self, T):
        """G^-1 T^dagger G; agrees with the B-valued adjoint for B-linear T."""
        M = T.matrix if isinstance(T, ModuleOperator) else np.asarray(T, complex)
        return np.linalg.solve(self.gram, M.conj().T @ self.gram)


def localize(module, tau) -> Localization:
    return Localization(module, tau)


def unnormalized_trace_state(B: CStarAlgebra) -> StateFunctional:
    """The normalized version of the block trace (densities I_n / dim)."""
    total = sum(B.block_sizes)
    return StateFunctional(B, [np.eye(n) / total for n in B.block_sizes])
