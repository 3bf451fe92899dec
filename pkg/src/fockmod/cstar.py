"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra is described by its ordered block sizes (n_1, ..., n_k); elements
are lists of complex square matrices, one per block.  Flat coordinates
concatenate the blocks row-major; with respect to the unnormalized block
trace this identification is isometric, which the module layer relies on.
"""

from __future__ import annotations

import numpy as np

from .report import VerificationReport

DEFAULT_TOL = 1e-9
PSD_CUTOFF = 1e-10


class StructureError(ValueError):
    """Shape or algebraic-structure mismatch between operands."""


class PreconditionError(ValueError):
    """An operation's stated precondition does not hold."""


class ResourceCapError(PreconditionError):
    """A configured dimension or time budget would be exceeded."""


class CStarAlgebra:
    def __init__(self, block_sizes):
        block_sizes = tuple(int(n) for n in block_sizes)
        if not block_sizes or any(n < 1 for n in block_sizes):
            raise StructureError(f"block sizes must be positive: {block_sizes}")
        self.block_sizes = block_sizes
        self.dim = sum(n * n for n in block_sizes)
        self._offsets = np.cumsum([0] + [n * n for n in block_sizes])

    def __repr__(self):
        return f"CStarAlgebra{self.block_sizes}"

    def __eq__(self, other):
        return isinstance(other, CStarAlgebra) and self.block_sizes == other.block_sizes

    def __hash__(self):
        return hash(self.block_sizes)

    # -- constructors ------------------------------------------------------

    def element(self, blocks):
        return AlgebraElement(self, blocks)

    def zero(self):
        return AlgebraElement(self, [np.zeros((n, n), complex) for n in self.block_sizes])

    def identity(self):
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.block_sizes])

    def scalar(self, z):
        return AlgebraElement(self, [z * np.eye(n, dtype=complex) for n in self.block_sizes])

    def matrix_unit(self, j, p, q):
        blocks = [np.zeros((n, n), complex) for n in self.block_sizes]
        blocks[j][p, q] = 1.0
        return AlgebraElement(self, blocks)

    def unit_index_iter(self):
        for j, n in enumerate(self.block_sizes):
            for p in range(n):
                for q in range(n):
                    yield (j, p, q)

    def basis(self):
        return [self.matrix_unit(j, p, q) for (j, p, q) in self.unit_index_iter()]

    def central_projection(self, j):
        blocks = [np.zeros((n, n), complex) for n in self.block_sizes]
        blocks[j] = np.eye(self.block_sizes[j], dtype=complex)
        return AlgebraElement(self, blocks)

    def from_flat(self, vec):
        vec = np.asarray(vec, complex).ravel()
        if vec.size != self.dim:
            raise StructureError(f"flat vector of length {vec.size}, expected {self.dim}")
        blocks = []
        for j, n in enumerate(self.block_sizes):
            blocks.append(vec[self._offsets[j]:self._offsets[j + 1]].reshape(n, n))
        return AlgebraElement(self, blocks)

    def random_element(self, rng, scale=1.0):
        return AlgebraElement(self, [
            scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            for n in self.block_sizes])

    def random_hermitian(self, rng, scale=1.0):
        x = self.random_element(rng, scale)
        return 0.5 * (x + x.adjoint())

    def random_unitary(self, rng):
        return AlgebraElement(self, [haar_unitary_matrix(rng, n) for n in self.block_sizes])

    # -- structural pieces -------------------------------------------------

    def minimal_projections(self):
        """Diagonal matrix units of every block: pairwise orthogonal, sum 1."""
        return [self.matrix_unit(j, q, q)
                for j, n in enumerate(self.block_sizes) for q in range(n)]

    def minimal_projection_indices(self):
        return [(j, q) for j, n in enumerate(self.block_sizes) for q in range(n)]

    def trace_vector(self):
        """Flat coordinates of the unnormalized block trace functional."""
        return self.identity().flat.conj()


class AlgebraElement:
    def __init__(self, algebra, blocks):
        if len(blocks) != len(algebra.block_sizes):
            raise StructureError("block count does not match the algebra")
        self.algebra = algebra
        self.blocks = []
        for n, b in zip(algebra.block_sizes, blocks):
            b = np.asarray(b, complex)
            if b.shape != (n, n):
                raise StructureError(f"block shape {b.shape}, expected ({n},{n})")
            self.blocks.append(b)

    @property
    def flat(self):
        return np.concatenate([b.ravel() for b in self.blocks])

    def _same(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise StructureError("operands belong to different algebras")
        return other

    def __add__(self, other):
        other = self._same(other)
        return AlgebraElement(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        other = self._same(other)
        return AlgebraElement(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-a for a in self.blocks])

    def __mul__(self, other):
        if np.isscalar(other):
            return AlgebraElement(self.algebra, [a * other for a in self.blocks])
        other = self._same(other)
        return AlgebraElement(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __rmul__(self, other):
        if np.isscalar(other):
            return AlgebraElement(self.algebra, [other * a for a in self.blocks])
        return NotImplemented

    def adjoint(self):
        return AlgebraElement(self.algebra, [a.conj().T for a in self.blocks])

    def trace(self):
        return sum(np.trace(b) for b in self.blocks)

    def norm(self):
        """Operator norm: max over blocks of the largest singular value."""
        return max(np.linalg.norm(b, 2) for b in self.blocks)

    def hs_norm(self):
        return float(np.linalg.norm(self.flat))

    def is_hermitian(self, tol=DEFAULT_TOL):
        return (self - self.adjoint()).norm() <= tol * max(1.0, self.norm())

    def is_positive(self, tol=PSD_CUTOFF):
        if not self.is_hermitian(max(tol, DEFAULT_TOL)):
            return False
        scale = max(1.0, self.norm())
        h = 0.5 * (self + self.adjoint())
        return all(np.linalg.eigvalsh(b).min() >= -tol * scale for b in h.blocks)

    def min_eigenvalue(self):
        h = 0.5 * (self + self.adjoint())
        return min(np.linalg.eigvalsh(b).min() for b in h.blocks)

    def __repr__(self):
        return f"AlgebraElement({self.algebra.block_sizes}, norm={self.norm():.4g})"


def haar_unitary_matrix(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# -- states ----------------------------------------------------------------

class StateFunctional:
    """Positive unital functional rho(x) = sum_j tr(density_j x_j)."""

    def __init__(self, algebra, density_blocks, tol=DEFAULT_TOL):
        self.algebra = algebra
        self.densities = []
        total = 0.0
        for n, d in zip(algebra.block_sizes, density_blocks):
            d = np.asarray(d, complex)
            if d.shape != (n, n):
                raise StructureError(f"density shape {d.shape}, expected ({n},{n})")
            if np.linalg.norm(d - d.conj().T) > tol * max(1.0, np.linalg.norm(d)):
                raise PreconditionError("density block is not Hermitian")
            if np.linalg.eigvalsh(d).min() < -PSD_CUTOFF * max(1.0, np.linalg.norm(d, 2)):
                raise PreconditionError("density block is not positive semidefinite")
            total += np.trace(d).real
            self.densities.append(d)
        if abs(total - 1.0) > tol:
            raise PreconditionError(f"total trace {total}, expected 1")

    @property
    def has_faithful_gns(self):
        """Faithful GNS representation: no central summand is annihilated."""
        return all(np.linalg.norm(d) > 0 for d in self.densities)

    @property
    def is_faithful(self):
        """Faithful as a state: every density block positive definite."""
        return all(np.linalg.eigvalsh(d).min() > PSD_CUTOFF for d in self.densities)

    def __call__(self, x):
        if x.algebra != self.algebra:
            raise StructureError("element belongs to a different algebra")
        return complex(sum(np.trace(d @ b) for d, b in zip(self.densities, x.blocks)))


def state_from_density(algebra, densities):
    return StateFunctional(algebra, densities)


def uniform_trace_state(algebra):
    """Normalized trace: densities I/(total dimension of the identity)."""
    total = sum(algebra.block_sizes)
    return StateFunctional(algebra, [np.eye(n) / total for n in algebra.block_sizes])


def block_weighted_state(algebra, weights):
    """State with density w_j I_{n_j} per block; weights must sum to 1 after
    multiplying by the block sizes."""
    dens = [w * np.eye(n) for w, n in zip(weights, algebra.block_sizes)]
    return StateFunctional(algebra, dens)


# -- linear and completely positive maps -----------------------------------

class CPLinearMap:
    """Linear map between algebras, stored as a matrix on flat coordinates."""

    def __init__(self, domain, codomain, matrix):
        matrix = np.asarray(matrix, complex)
        if matrix.shape != (codomain.dim, domain.dim):
            raise StructureError(
                f"action matrix {matrix.shape}, expected ({codomain.dim},{domain.dim})")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @classmethod
    def from_callable(cls, domain, codomain, fn):
        cols = [fn(e).flat for e in domain.basis()]
        return cls(domain, codomain, np.array(cols).T)

    def __call__(self, x):
        if x.algebra != self.domain:
            raise StructureError("element outside the map's domain")
        return self.codomain.from_flat(self.matrix @ x.flat)

    def compose(self, other: "CPLinearMap"):
        if other.codomain != self.domain:
            raise StructureError("composition domains do not match")
        return CPLinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    def choi_matrix(self):
        """Choi matrix of the map extended to the full matrix algebra
        containing the domain block-diagonally (extension by the block
        compression, which is completely positive both ways)."""
        dA = sum(self.domain.block_sizes)
        dC = sum(self.codomain.block_sizes)
        choi = np.zeros((dA * dC, dA * dC), complex)
        row_off = np.cumsum([0] + list(self.domain.block_sizes))
        for (j, p, q) in self.domain.unit_index_iter():
            out = self(self.domain.matrix_unit(j, p, q))
            sigma = block_diag_matrix(out.blocks, dC)
            P, Q = row_off[j] + p, row_off[j] + q
            # kron ordering: (codomain) x (domain index pair)
            for r in range(dC):
                for s in range(dC):
                    choi[r * dA + P, s * dA + Q] += sigma[r, s]
        return choi

    def min_choi_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.choi_matrix()).min())

    def is_completely_positive(self, tol=None):
        scale = max(1.0, np.linalg.norm(self.matrix, 2))
        cutoff = PSD_CUTOFF * scale if tol is None else tol
        return self.min_choi_eigenvalue() >= -cutoff

    def is_unital(self, tol=DEFAULT_TOL):
        return (self(self.domain.identity()) - self.codomain.identity()).norm() <= tol


def block_diag_matrix(blocks, total=None):
    sizes = [b.shape[0] for b in blocks]
    if total is None:
        total = sum(sizes)
    out = np.zeros((total, total), complex)
    off = 0
    for b in blocks:
        n = b.shape[0]
        out[off:off + n, off:off + n] = b
        off += n
    return out


def validate_cp(cpmap: CPLinearMap, unital=True, tol=DEFAULT_TOL) -> VerificationReport:
    report = VerificationReport(suite="cp-map")
    lam = cpmap.min_choi_eigenvalue()
    scale = max(1.0, np.linalg.norm(cpmap.matrix, 2))
    report.add("choi-positivity", "Choi(eta) >= 0",
               max(0.0, -lam) / scale, PSD_CUTOFF * 10,
               min_choi_eigenvalue=lam)
    if unital:
        res = (cpmap(cpmap.domain.identity()) - cpmap.codomain.identity()).norm()
        report.add("unitality", "eta(1) = 1", res, tol)
    return report


# -- homomorphisms, embeddings, automorphisms ------------------------------

class UnitalHomomorphism:
    """Unital *-homomorphism B -> A in multiplicity + unitary canonical form.

    For each block i of A:  iota(b)_i = U_i (oplus_k  I_{c[i][k]} x b_k) U_i*,
    with sum_k c[i][k] n_k = m_i.
    """

    def __init__(self, domain, codomain, multiplicities, unitaries=None):
        self.domain = domain
        self.codomain = codomain
        self.multiplicities = [tuple(int(c) for c in row) for row in multiplicities]
        if len(self.multiplicities) != len(codomain.block_sizes):
            raise StructureError("one multiplicity row per codomain block required")
        for i, (m_i, row) in enumerate(zip(codomain.block_sizes, self.multiplicities)):
            if len(row) != len(domain.block_sizes):
                raise StructureError("multiplicity row length mismatch")
            if any(c < 0 for c in row):
                raise StructureError("negative multiplicity")
            if sum(c * n for c, n in zip(row, domain.block_sizes)) != m_i:
                raise StructureError(
                    f"multiplicity equation fails on codomain block {i}")
        if unitaries is None:
            unitaries = [np.eye(m, dtype=complex) for m in codomain.block_sizes]
        self.unitaries = []
        for m_i, u in zip(codomain.block_sizes, unitaries):
            u = np.asarray(u, complex)
            if u.shape != (m_i, m_i):
                raise StructureError("unitary shape mismatch")
            if np.linalg.norm(u.conj().T @ u - np.eye(m_i)) > DEFAULT_TOL * m_i:
                raise StructureError("basis change is not unitary")
            self.unitaries.append(u)

    def block_image(self, i, x):
        """Image of element x in codomain block i, as an m_i x m_i matrix."""
        row = self.multiplicities[i]
        diag = block_diag_matrix(
            [m for k, c in enumerate(row) for m in [x.blocks[k]] * c],
            self.codomain.block_sizes[i])
        u = self.unitaries[i]
        return u @ diag @ u.conj().T

    def __call__(self, x):
        if x.algebra != self.domain:
            raise StructureError("element outside the embedding's domain")
        return AlgebraElement(self.codomain,
                              [self.block_image(i, x)
                               for i in range(len(self.codomain.block_sizes))])

    def as_linear_map(self):
        return CPLinearMap.from_callable(self.domain, self.codomain, self)

    def annihilated_central_summands(self):
        """Domain blocks killed by the homomorphism (nonempty iff not injective)."""
        k = len(self.domain.block_sizes)
        return [j for j in range(k)
                if all(row[j] == 0 for row in self.multiplicities)]

    @property
    def is_injective(self):
        return not self.annihilated_central_summands()


class AlgebraAutomorphism:
    """Automorphism in permutation + inner canonical form.

    beta(x)_j = u_j x_{source[j]} u_j*, where source is a permutation of the
    block indices preserving block sizes.
    """

    def __init__(self, algebra, source=None, unitaries=None):
        self.algebra = algebra
        k = len(algebra.block_sizes)
        if source is None:
            source = tuple(range(k))
        source = tuple(int(s) for s in source)
        if sorted(source) != list(range(k)):
            raise StructureError("block map is not a permutation")
        for j, s in enumerate(source):
            if algebra.block_sizes[j] != algebra.block_sizes[s]:
                raise StructureError(
                    "permutation maps between blocks of unequal size")
        self.source = source
        if unitaries is None:
            unitaries = [np.eye(n, dtype=complex) for n in algebra.block_sizes]
        self.unitaries = []
        for n, u in zip(algebra.block_sizes, unitaries):
            u = np.asarray(u, complex)
            if u.shape != (n, n):
                raise StructureError("unitary shape mismatch")
            if np.linalg.norm(u.conj().T @ u - np.eye(n)) > DEFAULT_TOL * n:
                raise StructureError("u*u = 1 fails")
            self.unitaries.append(u)

    def __call__(self, x):
        if x.algebra != self.algebra:
            raise StructureError("element belongs to a different algebra")
        blocks = [u @ x.blocks[s] @ u.conj().T
                  for u, s in zip(self.unitaries, self.source)]
        return AlgebraElement(self.algebra, blocks)

    def inverse(self):
        k = len(self.source)
        target = [0] * k
        for j, s in enumerate(self.source):
            target[s] = j
        inv_unitaries = [self.unitaries[target[s]].conj().T for s in range(k)]
        # (beta^-1 x)_s = u_{t}* x_{t} u_{t} with t = target[s]
        return AlgebraAutomorphism(self.algebra, tuple(target), inv_unitaries)

    def compose(self, other: "AlgebraAutomorphism"):
        """self after other."""
        if other.algebra != self.algebra:
            raise StructureError("automorphisms of different algebras")
        source = tuple(other.source[s] for s in self.source)
        unitaries = [u @ other.unitaries[s]
                     for u, s in zip(self.unitaries, self.source)]
        return AlgebraAutomorphism(self.algebra, source, unitaries)

    def as_linear_map(self):
        return CPLinearMap.from_callable(self.algebra, self.algebra, self)

    def distance_to(self, other: "AlgebraAutomorphism"):
        """Max norm difference on the matrix-unit basis."""
        return max((self(e) - other(e)).norm() for e in self.algebra.basis())


def identity_automorphism(algebra):
    return AlgebraAutomorphism(algebra)


def flip_automorphism(algebra):
    """Swap of two equal-size central summands (canonical instance on C + C)."""
    k = len(algebra.block_sizes)
    if k != 2 or algebra.block_sizes[0] != algebra.block_sizes[1]:
        raise StructureError("flip needs exactly two equal-size blocks")
    return AlgebraAutomorphism(algebra, (1, 0))


def apply_automorphism(beta, x):
    return beta(x)


# -- conditional expectations ---------------------------------------------

class ConditionalExpectation:
    """Trace-preserving conditional expectation onto an embedded subalgebra.

    Orthogonal projection onto iota(B) with respect to the unnormalized block
    trace of A, read back in B coordinates.  Unital, bimodular, completely
    positive, and faithful because the trace is.
    """

    def __init__(self, embedding: UnitalHomomorphism):
        self.embedding = embedding
        self.algebra = embedding.codomain
        self.subalgebra = embedding.domain
        M = np.array([embedding(e).flat for e in self.subalgebra.basis()]).T
        gram = M.conj().T @ M
        self._solve = np.linalg.solve(gram, M.conj().T)

    def __call__(self, a):
        if a.algebra != self.algebra:
            raise StructureError("element outside the expectation's domain")
        return self.subalgebra.from_flat(self._solve @ a.flat)

    def as_linear_map(self):
        return CPLinearMap.from_callable(self.algebra, self.subalgebra, self)

    def validate(self, rng, samples=5, tol=DEFAULT_TOL) -> VerificationReport:
        report = VerificationReport(suite="conditional-expectation")
        ident_res = (self(self.embedding(self.subalgebra.identity()))
                     - self.subalgebra.identity()).norm()
        report.add("unitality", "phi(1) = 1", ident_res, tol)
        res = 0.0
        for _ in range(samples):
            b1 = self.subalgebra.random_element(rng)
            b2 = self.subalgebra.random_element(rng)
            a = self.algebra.random_element(rng)
            lhs = self(self.embedding(b1) * a * self.embedding(b2))
            rhs = b1 * self(a) * b2
            res = max(res, (lhs - rhs).norm()
                      / max(1.0, b1.norm() * a.norm() * b2.norm()))
        report.add("bimodularity", "phi(b1 a b2) = b1 phi(a) b2", res, tol)
        idem = 0.0
        for _ in range(samples):
            b = self.subalgebra.random_element(rng)
            idem = max(idem, (self(self.embedding(b)) - b).norm() / max(1.0, b.norm()))
        report.add("idempotence", "phi . iota = id", idem, tol)
        lam = self.as_linear_map().min_choi_eigenvalue()
        report.add("complete-positivity", "Choi(phi) >= 0", max(0.0, -lam), 1e-8)
        return report


def scalar_embedding(algebra):
    """The unital embedding of C into an arbitrary finite-dimensional algebra."""
    scalars = CStarAlgebra((1,))
    mults = [(n,) for n in algebra.block_sizes]
    return UnitalHomomorphism(scalars, algebra, mults)


def state_as_conditional_expectation(state: StateFunctional):
    """A state rho, viewed as the conditional expectation onto C subset A.

    Only trace-like states yield a bimodular expectation in general; for
    arbitrary states this is still a UCP map onto the scalars and that is all
    the free-product constructions require when B = C.
    """
    algebra = state.algebra
    scalars = CStarAlgebra((1,))

    def fn(a):
        return scalars.element([np.array([[state(a)]])])
    return CPLinearMap.from_callable(algebra, scalars, fn)


# -- spec-level operation wrappers ----------------------------------------

def minimal_projections(algebra: CStarAlgebra):
    return algebra.minimal_projections()
