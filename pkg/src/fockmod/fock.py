"""Truncated full Fock spaces over a bimodule, creation operators, vacuum and
gauge expectations, words, the balanced-word filtration and its ideals, and
the tensor-regrouping factorization of the Fock module.

Truncation semantics: creation is compressed at the top level N (level N maps
to 0), annihilation is its adjoint.  Identities are checked either as
operator identities with the forced (1 - E_N) correction, or on the
overflow-free domain: vectors whose images under every factor of a word stay
below level N, determined by degree bookkeeping.
"""

from __future__ import annotations

import numpy as np

from .cstar import (AlgebraElement, PreconditionError, ResourceCapError,
                    StructureError,
                    block_diag_matrix, DEFAULT_TOL)
from .hilbmod import (HilbertBimodule, ModuleVector, complex_rank,
                      element_to_vector, interior_tensor, trivial_module,
                      vector_to_element)
from .report import VerificationReport

DEFAULT_DIM_CAP = 20000


def tensor_power_chain(module: HilbertBimodule, m: int, dim_cap=DEFAULT_DIM_CAP):
    """Iterated left-nested interior tensor powers.

    Returns (levels, maps): levels[i] is the i-fold power for 1 <= i <= m and
    maps[i] sends kron(flat module, flat levels[i]) to flat levels[i+1].
    """
    levels = {1: module}
    maps = {}
    total = module.dim
    for i in range(1, m):
        nxt, step = interior_tensor(module, levels[i])
        levels[i + 1] = nxt
        maps[i] = step
        total += nxt.dim
        if total > dim_cap:
            raise ResourceCapError(
                f"localized dimension {total} exceeds the cap {dim_cap}")
    return levels, maps


class _BaseStep:
    """Level 0 to 1 creation data: b -> h.b on the vacuum copy of B."""

    def __init__(self, H: HilbertBimodule):
        self.H = H
        vac = trivial_module(H.base)
        self._right_units = [
            H.right_matrix(vector_to_element(vac.from_flat(col)))
            for col in np.eye(vac.dim)]

    def apply(self, h_flat):
        return np.column_stack([R @ h_flat for R in self._right_units])


class FockSpace:
    """B + H + H(x)H + ... truncated at level N."""

    def __init__(self, H: HilbertBimodule, N: int, dim_cap=DEFAULT_DIM_CAP):
        if N < 0:
            raise PreconditionError("truncation level must be nonnegative")
        self.bimodule = H
        self.base = H.base
        self.N = N
        vac = trivial_module(self.base)
        self.levels = [vac]
        self.maps = []          # maps[k]: H (x) level k  ->  level k+1
        if N >= 1:
            chain_levels, chain_maps = tensor_power_chain(H, N, dim_cap)
            for i in range(1, N + 1):
                self.levels.append(chain_levels[i])
            # level 0 -> 1 is the right action h (x) b -> h.b
            self.maps.append(_BaseStep(H))
            for i in range(1, N):
                self.maps.append(chain_maps[i])
        self.level_dims = tuple(lv.dim for lv in self.levels)
        self.offsets = np.cumsum([0] + list(self.level_dims))
        self.dim = int(self.offsets[-1])
        if self.dim > dim_cap:
            raise ResourceCapError(
                f"localized dimension {self.dim} exceeds the cap {dim_cap}")

    def __repr__(self):
        return f"FockSpace(N={self.N}, level_dims={self.level_dims})"

    # -- slicing helpers ---------------------------------------------------

    def level_slice(self, k):
        return slice(int(self.offsets[k]), int(self.offsets[k + 1]))

    def embed_level(self, k, flat_vec):
        out = np.zeros(self.dim, complex)
        out[self.level_slice(k)] = flat_vec
        return out

    def vacuum_vector(self, b: AlgebraElement = None):
        if b is None:
            b = self.base.identity()
        return self.embed_level(0, element_to_vector(self.levels[0], b).flat)

    def level_projection(self, ks):
        """Diagonal projection onto a set of levels (int, iterable, or slice
        meaning levels <= n via up_to_projection)."""
        if isinstance(ks, int):
            ks = [ks]
        P = np.zeros((self.dim, self.dim))
        for k in ks:
            s = self.level_slice(k)
            P[s, s] = np.eye(self.level_dims[k])
        return P

    def up_to_projection(self, n):
        return self.level_projection(range(min(n, self.N) + 1))

    def top_projection(self):
        return self.level_projection(self.N)

    # -- algebra actions ---------------------------------------------------

    def left_matrix(self, b: AlgebraElement):
        return block_diag_matrix([lv.left_matrix(b) for lv in self.levels],
                                 self.dim)

    def right_matrix(self, b: AlgebraElement):
        return block_diag_matrix([lv.right_matrix(b) for lv in self.levels],
                                 self.dim)

    # -- operators ---------------------------------------------------------

    def creation_matrix(self, h: ModuleVector):
        if h.parent is not self.bimodule:
            raise StructureError("vector outside the base bimodule")
        T = np.zeros((self.dim, self.dim), complex)
        for k in range(self.N):
            T[self.level_slice(k + 1), self.level_slice(k)] = \
                self.maps[k].apply(h.flat)
        return T

    def creation(self, h: ModuleVector) -> "FockOperator":
        return FockOperator(self, self.creation_matrix(h))

    def identity_matrix(self):
        return np.eye(self.dim, dtype=complex)

    def vacuum_expectation(self, T) -> AlgebraElement:
        """Compression to level 0, read as an element of B."""
        M = asmatrix(T)
        s = self.level_slice(0)
        one = element_to_vector(self.levels[0], self.base.identity()).flat
        return vector_to_element(self.levels[0].from_flat(M[s, s] @ one))

    def gauge_expectation(self, T):
        """Exact projection onto the degree-0 part: keep diagonal level blocks."""
        M = asmatrix(T).copy()
        out = np.zeros_like(M)
        for k in range(self.N + 1):
            s = self.level_slice(k)
            out[s, s] = M[s, s]
        return FockOperator(self, out) if isinstance(T, FockOperator) else out


class FockOperator:
    """Operator on the truncated Fock space; adjoints via the Euclidean
    localization, which agrees with the B-valued adjoint for B-linear maps."""

    def __init__(self, space: FockSpace, matrix):
        matrix = np.asarray(matrix, complex)
        if matrix.shape != (space.dim, space.dim):
            raise StructureError("operator shape does not match the Fock space")
        self.space = space
        self.matrix = matrix

    def __matmul__(self, other):
        return FockOperator(self.space, self.matrix @ asmatrix(other))

    def __rmatmul__(self, other):
        return FockOperator(self.space, asmatrix(other) @ self.matrix)

    def __add__(self, other):
        return FockOperator(self.space, self.matrix + asmatrix(other))

    def __sub__(self, other):
        return FockOperator(self.space, self.matrix - asmatrix(other))

    def __mul__(self, z):
        return FockOperator(self.space, self.matrix * z)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1)

    def adjoint(self):
        return FockOperator(self.space, self.matrix.conj().T)

    def norm(self):
        return float(np.linalg.norm(self.matrix, 2))

    def level_block(self, i, j):
        return self.matrix[self.space.level_slice(i), self.space.level_slice(j)]

    def nonzero_degrees(self, tol=1e-12):
        degs = set()
        scale = max(1.0, np.linalg.norm(self.matrix))
        for i in range(self.space.N + 1):
            for j in range(self.space.N + 1):
                if np.linalg.norm(self.level_block(i, j)) > tol * scale:
                    degs.add(i - j)
        return sorted(degs)


def asmatrix(T):
    return T.matrix if isinstance(T, FockOperator) else np.asarray(T, complex)


# -- words ------------------------------------------------------------------

CREATE = "create"
ANNIHILATE = "annihilate"


class WordSpec:
    """Alternating word b_0 l(h_1)^g1 b_1 ... l(h_m)^gm b_m."""

    def __init__(self, coeffs, factors):
        self.coeffs = list(coeffs)
        self.factors = list(factors)
        if len(self.coeffs) != len(self.factors) + 1:
            raise StructureError("need one more coefficient than factors")
        for h, g in self.factors:
            if g not in (CREATE, ANNIHILATE):
                raise StructureError(f"unknown factor kind {g!r}")

    @property
    def degrees(self):
        return [1 if g == CREATE else -1 for _, g in self.factors]

    @property
    def net_degree(self):
        return sum(self.degrees)

    def max_prefix_climb(self):
        """Largest level reached when applied to a vacuum-level vector."""
        best = level = 0
        for d in reversed(self.degrees):
            level += d
            best = max(best, level)
        return best

    @property
    def is_balanced(self):
        return self.net_degree == 0


def word(F: FockSpace, spec: WordSpec) -> FockOperator:
    M = F.left_matrix(spec.coeffs[0])
    for (h, g), b in zip(spec.factors, spec.coeffs[1:]):
        c = F.creation_matrix(h)
        M = M @ (c if g == CREATE else c.conj().T) @ F.left_matrix(b)
    return FockOperator(F, M)


def overflow_margin(specs, N):
    """Largest input level on which a product of words avoids truncation."""
    climb = sum(s.max_prefix_climb() if isinstance(s, WordSpec) else int(s)
                for s in specs)
    return N - climb


# -- verification operations ------------------------------------

def masked_norm(F: FockSpace, M, max_level):
    """Norm of an operator restricted to inputs from levels <= max_level.

    Uses the Frobenius norm, which dominates the operator norm, so residual
    checks only get stricter."""
    if max_level < 0:
        raise PreconditionError("no overflow-free room at this truncation")
    cut = int(F.offsets[min(max_level, F.N) + 1])
    return float(np.linalg.norm(asmatrix(M)[:, :cut]))


def creation_relations_check(F: FockSpace, rng, samples=5,
                             tol=DEFAULT_TOL) -> VerificationReport:
    """l(h)*l(g) = <h,g>(1 - E_N) and b1 l(h) b2 = l(b1 h b2)."""
    report = VerificationReport(suite="creation-relations")
    H = F.bimodule
    EN = F.top_projection()
    res_ls = res_bimod = 0.0
    for _ in range(samples):
        h = H.random_vector(rng)
        g = H.random_vector(rng)
        b1 = F.base.random_element(rng)
        b2 = F.base.random_element(rng)
        lh, lg = F.creation_matrix(h), F.creation_matrix(g)
        lhs = lh.conj().T @ lg
        rhs = F.left_matrix(H.inner(h, g)) @ (np.eye(F.dim) - EN)
        res_ls = max(res_ls, np.linalg.norm(lhs - rhs, 2)
                     / max(1.0, h.norm() * g.norm()))
        lhs2 = F.left_matrix(b1) @ lh @ F.left_matrix(b2)
        rhs2 = F.creation_matrix(h.lmul(b1).rmul(b2))
        res_bimod = max(res_bimod, np.linalg.norm(lhs2 - rhs2, 2)
                        / max(1.0, b1.norm() * h.norm() * b2.norm()))
    report.add("creation-adjoint-relation", "l(h)* l(g) = <h,g> (1 - E_N)",
               res_ls, tol)
    report.add("creation-bimodularity", "b1 l(h) b2 = l(b1 h b2)",
               res_bimod, tol)
    return report


def expectation_properties_check(F: FockSpace, rng, samples=4,
                                 tol=DEFAULT_TOL) -> VerificationReport:
    """Vacuum expectation E and gauge expectation Phi: idempotent, unital,
    compatible (E = E . Phi), Phi kills unbalanced words and fixes balanced
    ones."""
    report = VerificationReport(suite="expectations")
    H = F.bimodule
    one = F.identity_matrix()
    res = (F.vacuum_expectation(one) - F.base.identity()).norm()
    report.add("vacuum-unital", "E(1) = 1", res, tol)
    h = H.random_vector(rng)
    report.add("vacuum-kills-creation", "E(l(h)) = 0",
               F.vacuum_expectation(F.creation_matrix(h)).norm()
               / max(1.0, h.norm()), tol)
    g = H.random_vector(rng)
    lhs = F.vacuum_expectation(F.creation_matrix(h).conj().T @ F.creation_matrix(g))
    report.add("vacuum-pairing", "E(l(h)* l(g)) = <h,g>",
               (lhs - H.inner(h, g)).norm() / max(1.0, h.norm() * g.norm()), tol)
    res_idem = res_ephi = 0.0
    for _ in range(samples):
        T = rng.standard_normal((F.dim, F.dim)) + 1j * rng.standard_normal((F.dim, F.dim))
        PT = F.gauge_expectation(T)
        res_idem = max(res_idem, np.linalg.norm(F.gauge_expectation(PT) - PT)
                       / max(1.0, np.linalg.norm(T)))
        res_ephi = max(res_ephi,
                       (F.vacuum_expectation(T) - F.vacuum_expectation(PT)).norm()
                       / max(1.0, np.linalg.norm(T)))
    report.add("gauge-idempotent", "Phi . Phi = Phi", res_idem, 1e-12)
    report.add("vacuum-gauge-compatible", "E = E . Phi", res_ephi, 1e-12)
    if F.N >= 1:
        report.add("gauge-kills-creation", "Phi(l(h)) = 0",
                   np.linalg.norm(F.gauge_expectation(F.creation_matrix(h)))
                   / max(1.0, h.norm()), tol)
        lw = F.creation_matrix(h) @ F.creation_matrix(g).conj().T
        report.add("gauge-fixes-balanced", "Phi(l(h) l(g)*) = l(h) l(g)*",
                   np.linalg.norm(F.gauge_expectation(lw) - lw)
                   / max(1.0, h.norm() * g.norm()), 1e-12)
    return report


def random_word_spec(F: FockSpace, rng, m, balanced=False, vectors=None):
    H = F.bimodule
    kinds = []
    if balanced:
        kinds = [CREATE] * (m // 2) + [ANNIHILATE] * (m - m // 2)
    else:
        kinds = [CREATE if rng.random() < 0.5 else ANNIHILATE for _ in range(m)]
    coeffs = [F.base.random_element(rng) for _ in range(m + 1)]
    if vectors is None:
        factors = [(H.random_vector(rng), g) for g in kinds]
    else:
        factors = [(vectors[rng.integers(len(vectors))], g) for g in kinds]
    return WordSpec(coeffs, factors)


def ideal_structure_check(F: FockSpace, n, rng, samples=4,
                          tol=DEFAULT_TOL) -> VerificationReport:
    """Generators of the n-th ideal of the balanced-word filtration:
    they kill levels below n, restrict to explicit finite-rank operators on
    level n, and absorb products of balanced words."""
    if F.N < n:
        raise PreconditionError("truncation below the requested filtration level")
    report = VerificationReport(suite="ideal-structure")
    H = F.bimodule
    res_kill = res_rank = res_prod = 0.0
    for _ in range(samples):
        coeffs = [F.base.random_element(rng) for _ in range(2 * n + 1)]
        hs = [H.random_vector(rng) for _ in range(2 * n)]
        spec = WordSpec(coeffs, [(h, CREATE) for h in hs[:n]]
                        + [(h, ANNIHILATE) for h in hs[n:]])
        x = word(F, spec)
        scale = max(1.0, np.prod([c.norm() for c in coeffs])
                    * np.prod([h.norm() for h in hs]))
        res_kill = max(res_kill,
                       masked_norm(F, x.matrix, n - 1) / scale)
        # explicit finite-rank form on level n: x w = u <v, w>
        prefix = F.left_matrix(coeffs[0]).copy()
        for i in range(n):
            prefix = prefix @ F.creation_matrix(hs[i]) @ F.left_matrix(coeffs[i + 1])
        u_flat = prefix @ F.vacuum_vector()
        suffix_adj = F.identity_matrix()
        for i in range(n):
            suffix_adj = F.left_matrix(coeffs[n + 1 + i].adjoint()) \
                @ F.creation_matrix(hs[n + i]) @ suffix_adj
        v_flat = suffix_adj @ F.vacuum_vector()
        lev = F.levels[n]
        u = lev.from_flat(u_flat[F.level_slice(n)])
        v = lev.from_flat(v_flat[F.level_slice(n)])
        rank_one = block_diag_matrix(
            [np.kron(uj @ vj.conj().T, np.eye(nb))
             for uj, vj, nb in zip(u.comps, v.comps, F.base.block_sizes)],
            lev.dim)
        res_rank = max(res_rank,
                       np.linalg.norm(x.level_block(n, n) - rank_one, 2) / scale)
        # ideal property: (balanced word) . x still kills levels < n
        a = word(F, random_word_spec(F, rng, 2, balanced=True))
        res_prod = max(res_prod, masked_norm(F, asmatrix(a) @ x.matrix, n - 1)
                       / (scale * max(1.0, a.norm())))
    report.add("ideal-kills-lower-levels",
               "x in I_n  =>  x|_{F_{n-1}} = 0", res_kill, tol, n=n)
    report.add("ideal-finite-rank-form",
               "x|_{level n} = u<v,.>", res_rank, tol, n=n)
    report.add("ideal-absorbs-products",
               "A_n . I_n subset I_n (vanishing on F_{n-1})", res_prod, tol, n=n)
    return report


def quotient_dimension_check(F: FockSpace, n, rng, words_per_length=6,
                             tol=DEFAULT_TOL) -> VerificationReport:
    """The quotient of the depth-n word span by the n-th ideal is realized by
    compression to levels below n, and agrees there with the depth-(n-1)
    span."""
    report = VerificationReport(suite="filtration-quotient")
    if F.N < n:
        raise PreconditionError("truncation below the requested level")
    P = F.up_to_projection(n - 1)

    def compressed_span(depth):
        mats = []
        for m in range(0, depth + 1):
            for _ in range(words_per_length):
                spec = random_word_spec(F, rng, 2 * m, balanced=True)
                mats.append((P @ word(F, spec).matrix @ P).ravel())
        return mats

    res = 0.0
    for _ in range(words_per_length):
        coeffs = [F.base.random_element(rng) for _ in range(2 * n + 1)]
        hs = [F.bimodule.random_vector(rng) for _ in range(2 * n)]
        x = word(F, WordSpec(coeffs, [(h, CREATE) for h in hs[:n]]
                             + [(h, ANNIHILATE) for h in hs[n:]]))
        scale = max(1.0, np.prod([c.norm() for c in coeffs])
                    * np.prod([h.norm() for h in hs]))
        res = max(res, np.linalg.norm(P @ x.matrix @ P, 2) / scale)
    report.add("ideal-in-quotient-kernel",
               "I_n compresses to 0 on F_{n-1}", res, tol, n=n)
    r_n = complex_rank(compressed_span(n))
    r_lower = complex_rank(compressed_span(n - 1))
    report.add_bool("quotient-rank",
                    "A_n and A_{n-1} have equal rank compressed to F_{n-1}",
                    r_n == r_lower, rank_n=r_n, rank_lower=r_lower, n=n)
    return report


def fock_factorization_check(M: HilbertBimodule, n, k, j, rng, samples=None,
                             tol=DEFAULT_TOL,
                             dim_cap=DEFAULT_DIM_CAP) -> VerificationReport:
    """Tensor-regrouping factorization: the (k(n+1)+j)-fold power of a
    bimodule is isometrically the j-fold power tensored with the k-fold power
    of the (n+1)-fold power."""
    if not (0 <= j <= n):
        raise PreconditionError("need 0 <= j <= n")
    m = k * (n + 1) + j
    if m < 1:
        raise PreconditionError("empty regrouping")
    report = VerificationReport(suite="fock-factorization",
                                parameters={"n": n, "k": k, "j": j})
    levels, maps = tensor_power_chain(M, max(m, n + 1), dim_cap)

    def fold(h_list):
        v = h_list[-1].flat
        for i, h in enumerate(reversed(h_list[:-1])):
            v = maps[i + 1].apply(h.flat) @ v
        return v

    left_mod = levels[m]
    # right side: levels[j] (x) ( levels[n+1] )^{(x) k}
    Y = levels[n + 1]
    pow_levels, pow_maps = ({1: Y}, {}) if k <= 1 else tensor_power_chain(Y, k, dim_cap)
    if k >= 1:
        Ypow = pow_levels[k]
    if k == 0:
        right_mod = levels[j]
    elif j == 0:
        right_mod = Ypow
    else:
        right_mod, cross_step = interior_tensor(levels[j], Ypow)

    def embed_right(h_list):
        groups = [h_list[j + i * (n + 1): j + (i + 1) * (n + 1)] for i in range(k)]
        ys = [fold(g) for g in groups]
        if k >= 1:
            y = ys[-1]
            for i in range(k - 2, -1, -1):
                y = pow_maps[k - 1 - i].apply(ys[i]) @ y
        if k == 0:
            return fold(h_list[:j])
        if j == 0:
            return y
        return cross_step.apply(fold(h_list[:j])) @ y

    report.add_bool("dimension-equality",
                    "dim of the regrouped power equals dim of the plain power",
                    left_mod.dim == right_mod.dim,
                    left=left_mod.dim, right=right_mod.dim)
    if samples is None:
        samples = left_mod.dim + 8
    lefts, rights = [], []
    for _ in range(samples):
        hs = [M.random_vector(rng) for _ in range(m)]
        lefts.append(left_mod.from_flat(fold(hs)))
        rights.append(right_mod.from_flat(embed_right(hs)))
    res = 0.0
    pairs = min(samples, 25)
    for s in range(pairs):
        for t in range(s, pairs):
            gl = left_mod.inner(lefts[s], lefts[t])
            gr = right_mod.inner(rights[s], rights[t])
            res = max(res, (gl - gr).norm()
                      / max(1.0, lefts[s].norm() * lefts[t].norm()))
    report.add("gram-equality",
               "regrouping preserves the B-valued inner product", res, tol)
    rank_l = complex_rank([v.flat for v in lefts])
    report.add_bool("span-coverage",
                    "sampled simple tensors span the regrouped power",
                    rank_l == left_mod.dim, rank=rank_l, dim=left_mod.dim)
    return report


def isometric_vector(H: HilbertBimodule, rng) -> ModuleVector:
    """Random h with <h,h> = 1, so l(h) is a truncated isometry."""
    comps = []
    for r, n, raw in zip(H.right_mult, H.base.block_sizes,
                         H.random_vector(rng).comps):
        if r < n:
            raise PreconditionError(
                "no isometric vector: a component is too small")
        q, _ = np.linalg.qr(raw)
        comps.append(q[:, :n])
    return H.vector(comps)


def toeplitz_endomorphism(F: FockSpace, a, L, rng=None, tol=DEFAULT_TOL):
    """Psi(a) = L a L* for degree-0 a; returns (operator, report)."""
    report = VerificationReport(suite="toeplitz-endomorphism")
    aM = asmatrix(a)
    if np.linalg.norm(asmatrix(F.gauge_expectation(aM)) - aM) \
            > tol * max(1.0, np.linalg.norm(aM)):
        raise PreconditionError("argument is not in the degree-0 part")
    LM = asmatrix(L)
    out = LM @ aM @ LM.conj().T
    report.add("shifted-vacuum", "E(L a L*) = 0",
               F.vacuum_expectation(out).norm() / max(1.0, np.linalg.norm(aM, 2)),
               tol)
    if rng is not None:
        res_iso = np.linalg.norm(LM.conj().T @ LM
                                 - (np.eye(F.dim) - F.top_projection()), 2)
        report.add("truncated-isometry", "L* L = 1 - E_N", res_iso, tol)
        res = 0.0
        for _ in range(3):
            x = F.gauge_expectation(rng.standard_normal((F.dim, F.dim))
                                    + 1j * rng.standard_normal((F.dim, F.dim)))
            y = F.gauge_expectation(rng.standard_normal((F.dim, F.dim))
                                    + 1j * rng.standard_normal((F.dim, F.dim)))
            lhs = LM @ asmatrix(x) @ asmatrix(y) @ LM.conj().T
            rhs = (LM @ asmatrix(x) @ LM.conj().T) @ (LM @ asmatrix(y) @ LM.conj().T)
            # difference is L x E_N y L*: vanishes below the truncation rim
            res = max(res, masked_norm(F, lhs - rhs, F.N - 1)
                      / max(1.0, np.linalg.norm(asmatrix(x))
                            * np.linalg.norm(asmatrix(y))))
        report.add("multiplicative-on-degree-zero",
                   "Psi(xy) = Psi(x)Psi(y) on the overflow-free domain",
                   res, 1e-7)
    return FockOperator(F, out), report


def endomorphism_injectivity_check(F: FockSpace, L, n, rng,
                                   words_per_length=5) -> VerificationReport:
    """Rank preservation of x -> L x L* on spans of balanced words."""
    report = VerificationReport(suite="endomorphism-injectivity")
    if n > F.N - 1:
        raise PreconditionError("need n <= N - 1 for overflow-free words")
    LM = asmatrix(L)
    mats = []
    for m in range(0, n + 1):
        for _ in range(words_per_length):
            mats.append(word(F, random_word_spec(F, rng, 2 * m, balanced=True)).matrix)
    r_in = complex_rank([m.ravel() for m in mats])
    r_out = complex_rank([(LM @ m @ LM.conj().T).ravel() for m in mats])
    report.add_bool("rank-preserved",
                    "x -> L x L* preserves the rank of balanced-word spans",
                    r_in == r_out, rank_in=r_in, rank_out=r_out)
    return report
