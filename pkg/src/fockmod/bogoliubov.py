"""Inner-product-twisting linear maps on bimodules, their second-quantized
extensions on the truncated Fock space, growth subspaces K_p, the compression
channels onto their Fock towers, and the rank-growth report."""

import numpy as np

from .cstar import (AlgebraAutomorphism, AlgebraElement, CStarAlgebra,
                    PreconditionError, StructureError, identity_automorphism)
from .hilbmod import (AugmentedModule, HilbertBimodule, ModuleVector,
                      SubmoduleSpan, augment, element_to_vector,
                      submodule_projection, vector_to_element)
from .fock import FockOperator, FockSpace, asmatrix
from .report import VerificationReport

DEFAULT_TOL = 1e-9


class BogoliubovMap:
    """A complex-linear map U on a bimodule together with the base
    automorphism beta it twists by:

        <U h1, U h2> = beta(<h1, h2>),   U(b1 h b2) = beta(b1) U(h) beta(b2).
    """

    def __init__(self, module: HilbertBimodule, matrix,
                 beta: AlgebraAutomorphism):
        matrix = np.asarray(matrix, complex)
        if matrix.shape != (module.dim, module.dim):
            raise StructureError(
                f"map shape {matrix.shape}, expected square of {module.dim}")
        if beta.algebra != module.base:
            raise StructureError("automorphism of a different base algebra")
        self.module = module
        self.matrix = matrix
        self.beta = beta

    def __call__(self, x: ModuleVector) -> ModuleVector:
        if x.parent is not self.module:
            raise StructureError("vector outside the map's bimodule")
        return self.module.from_flat(self.matrix @ x.flat)

    def power(self, k):
        return np.linalg.matrix_power(self.matrix, k)


def identity_bogoliubov(module: HilbertBimodule) -> BogoliubovMap:
    return BogoliubovMap(module, np.eye(module.dim),
                         identity_automorphism(module.base))


def validate_bogoliubov(bog: BogoliubovMap, rng=None, samples=4,
                        tol=DEFAULT_TOL) -> VerificationReport:
    """Both defining equations, on a vector basis and on random algebra
    coefficients.  A violation is an error in the map, not a warning."""
    H, beta = bog.module, bog.beta
    report = VerificationReport(suite="twisted-linear-map")
    basis = H.basis()
    images = [bog(e) for e in basis]
    res_inner = 0.0
    for i, ei in enumerate(basis):
        for j in range(i, len(basis)):
            lhs = H.inner(images[i], images[j])
            rhs = beta(H.inner(ei, basis[j]))
            res_inner = max(res_inner, (lhs - rhs).norm())
    report.add("inner-twist", "<U h1, U h2> = beta(<h1, h2>)",
               res_inner, tol)
    if rng is None:
        rng = np.random.default_rng(0)
    res_act = 0.0
    for _ in range(samples):
        b1 = H.base.random_element(rng)
        b2 = H.base.random_element(rng)
        scale = max(1.0, b1.norm()) * max(1.0, b2.norm())
        for e, ue in zip(basis, images):
            lhs = bog(e.lmul(b1).rmul(b2))
            rhs = ue.lmul(beta(b1)).rmul(beta(b2))
            res_act = max(res_act, (lhs - rhs).norm() / scale)
    report.add("bimodule-twist", "U(b1 h b2) = beta(b1) U(h) beta(b2)",
               res_act, tol)
    return report


def augmented_bogoliubov(aug: AugmentedModule, bog: BogoliubovMap):
    """Extension to H + B acting as U on H and as beta on the unit summand;
    it fixes the distinguished vector xi."""
    if bog.module is not aug.plain:
        raise StructureError("map lives on a different bimodule")
    EH, EB = aug.embed_module, aug.embed_base
    beta_vac = _linear_matrix_of_beta(bog.beta)
    Ut = EH @ bog.matrix @ EH.conj().T + EB @ beta_vac @ EB.conj().T
    return BogoliubovMap(aug.module, Ut, bog.beta)


def _linear_matrix_of_beta(beta: AlgebraAutomorphism):
    """beta as a complex-linear matrix on the flat coordinates of the base
    algebra viewed as the trivial bimodule over itself."""
    from .hilbmod import trivial_module
    vac = trivial_module(beta.algebra)
    cols = []
    for col in np.eye(vac.dim):
        b = vector_to_element(vac.from_flat(col))
        cols.append(element_to_vector(vac, beta(b)).flat)
    return np.column_stack(cols)


def fock_extension(F: FockSpace, bog: BogoliubovMap, xi: ModuleVector = None,
                   tol=DEFAULT_TOL):
    """Levelwise second quantization beta + U + (U x U) + ... on the
    truncation, obtained by solving the simple-tensor recursion

        F_{k+1}(h (x) y) = (U h) (x) F_k(y).

    Verifies well-definedness of each level solve and the intertwining
    F(U) l(h) = l(U h) F(U) on basis vectors.  If the distinguished unit
    vector xi of an augmented bimodule is supplied, additionally verifies
    U xi = xi and that F(U) commutes with l(xi).

    Returns (FockOperator, VerificationReport)."""
    if bog.module is not F.bimodule:
        raise StructureError("map lives on a different bimodule")
    H = F.bimodule
    report = VerificationReport(suite="second-quantization",
                                parameters={"N": F.N})
    level_maps = [_linear_matrix_of_beta(bog.beta)]
    if F.N >= 1:
        level_maps.append(bog.matrix.copy())
    res_solve = 0.0
    eyeH = np.eye(H.dim)
    for k in range(1, F.N):
        step = F.maps[k]
        Fk = level_maps[k]
        S = np.hstack([step.apply(eyeH[:, i]) for i in range(H.dim)])
        Sp = np.hstack([step.apply(bog.matrix @ eyeH[:, i]) @ Fk
                        for i in range(H.dim)])
        Fk1, *_ = np.linalg.lstsq(S.conj().T, Sp.conj().T, rcond=None)
        Fk1 = Fk1.conj().T
        res_solve = max(res_solve, float(np.linalg.norm(Fk1 @ S - Sp))
                        / max(1.0, float(np.linalg.norm(Sp))))
        level_maps.append(Fk1)
    report.add("tensor-consistency",
               "F_{k+1}(h (x) y) = (U h) (x) F_k(y)", res_solve, tol)
    M = np.zeros((F.dim, F.dim), complex)
    for k, blk in enumerate(level_maps):
        s = F.level_slice(k)
        M[s, s] = blk
    res_int = 0.0
    for e in H.basis():
        lhs = M @ F.creation_matrix(e)
        rhs = F.creation_matrix(bog(e)) @ M
        res_int = max(res_int, float(np.linalg.norm(lhs - rhs)))
    report.add("creation-intertwining", "F(U) l(h) = l(U h) F(U)",
               res_int, tol)
    if xi is not None:
        report.add("fixed-unit-vector", "U xi = xi",
                   (bog(xi) - xi).norm(), tol)
        L = F.creation_matrix(xi)
        report.add("fixed-creation", "F(U) l(xi) = l(xi) F(U)",
                   float(np.linalg.norm(M @ L - L @ M)), tol)
    return FockOperator(F, M), report


def kp_subspace(bog: BogoliubovMap, K: SubmoduleSpan, p, tol=DEFAULT_TOL):
    """K_p = K + U(K) + ... + U^{p-1}(K) as a span with its projection.

    Returns (SubmoduleSpan, VerificationReport) verifying the dimension
    inequality dim_C(K_p) <= p dim_C(K) and that K_p is closed under both
    algebra actions."""
    if p < 1:
        raise PreconditionError("power count must be at least 1")
    if K.parent is not bog.module:
        raise StructureError("span lives on a different bimodule")
    H = bog.module
    gens = []
    for i in range(p):
        Ui = bog.power(i)
        gens.extend(H.from_flat(Ui @ g.flat) for g in K.generators)
    span = submodule_projection(gens)
    report = VerificationReport(suite="growth-subspace",
                                parameters={"p": p})
    report.add_bool("dimension-inequality", "dim_C(K_p) <= p dim_C(K)",
                    span.complex_dim <= p * K.complex_dim,
                    dim=span.complex_dim, cap=p * K.complex_dim)
    Q = span.projection
    one = np.eye(H.dim)
    res_left = res_right = 0.0
    for b in H.base.basis():
        res_left = max(res_left, float(np.linalg.norm(
            (one - Q) @ H.left_matrix(b) @ Q)))
        res_right = max(res_right, float(np.linalg.norm(
            (one - Q) @ H.right_matrix(b) @ Q)))
    report.add("left-closure", "b . K_p inside K_p", res_left, tol)
    report.add("right-closure", "K_p . b inside K_p", res_right, tol)
    return span, report


def _fock_level_spans(F: FockSpace, n, span: SubmoduleSpan):
    """Per-level orthogonal bases of B + K_p + K_p (x) K_p + ... inside the
    levels of F, for levels 0..n.  Level 0 is all of B."""
    if span.parent is not F.bimodule:
        raise StructureError("span lives outside the Fock bimodule")
    level_bases = [[F.levels[0].from_flat(col)
                    for col in np.eye(F.levels[0].dim)]]
    if n >= 1:
        vs = [F.levels[1].from_flat(v.flat) for v in span.basis]
        level_bases.append(submodule_projection(vs).basis if vs else [])
    for k in range(1, n):
        prev = level_bases[k]
        if not prev or not span.basis:
            level_bases.append([])
            continue
        vs = [F.levels[k + 1].from_flat(F.maps[k].apply(g.flat) @ v.flat)
              for g in span.basis for v in prev]
        level_bases.append(submodule_projection(vs).basis)
    return level_bases


def _tower_projection(F: FockSpace, level_bases):
    from .hilbmod import projection_from_basis
    Q = np.zeros((F.dim, F.dim), complex)
    for k, basis in enumerate(level_bases):
        s = F.level_slice(k)
        if k == 0:
            # the tower always contains the whole vacuum copy of B
            Q[s, s] = np.eye(F.level_dims[0])
        elif basis:
            Q[s, s] = projection_from_basis(F.levels[k], basis)
    return Q


class OperatorChannels:
    """The compress / restrict / re-expand triple for the Fock tower of a
    growth subspace inside the ambient truncated Fock space."""

    def __init__(self, F: FockSpace, n, span: SubmoduleSpan):
        self.F = F
        self.n = n
        self.span = span
        self.level_bases = _fock_level_spans(F, n, span)
        self.Q = _tower_projection(F, self.level_bases)
        self.Pn = F.up_to_projection(n)

    @property
    def tower_dim(self):
        return int(round(np.trace(self.Q).real))

    def compress(self, x):
        """P_n x P_n: cut the ambient operator to levels <= n."""
        return self.Pn @ asmatrix(x) @ self.Pn

    def restrict(self, y):
        """Q y Q: cut further to the subspace tower."""
        return self.Q @ asmatrix(y) @ self.Q

    def expand(self, y):
        """Q y Q + (vacuum part of y acting on the left) (P_n - Q)."""
        y = asmatrix(y)
        b = self.F.vacuum_expectation(y)
        return self.Q @ y @ self.Q \
            + self.F.left_matrix(b) @ (self.Pn - self.Q)


def sample_word(F: FockSpace, span: SubmoduleSpan, m, rng):
    """A word l(h_1)...l(h_m) l(h_{m+1})*...l(h_{2m})* with all vectors
    random combinations over the span basis.  Returns (matrix, scale)."""
    def rand_vec():
        coeffs = rng.standard_normal(len(span.basis)) \
            + 1j * rng.standard_normal(len(span.basis))
        flat = sum(c * v.flat for c, v in zip(coeffs, span.basis))
        return span.parent.from_flat(flat)

    x = np.eye(F.dim, dtype=complex)
    scale = 1.0
    for _ in range(m):
        h = rand_vec()
        scale *= max(1.0, h.norm())
        x = x @ F.creation_matrix(h)
    for _ in range(m):
        h = rand_vec()
        scale *= max(1.0, h.norm())
        x = x @ F.creation_matrix(h).conj().T
    return x, scale


def compression_channels(F: FockSpace, n, span: SubmoduleSpan, rng,
                         samples=4, tol=DEFAULT_TOL):
    """Builds the channels around the Fock tower of a growth subspace and
    verifies their structure:

      - the tower projection is an adjointable projection commuting with the
        left algebra action,
      - compressed annihilation does not leak: Q l(h)* (P_n - Q) = 0 for h
        in the subspace,
      - reconstruction on vectors: restrict(compress(x)) v = x v for sampled
        words x over the subspace and vectors v in the tower up to level n-1.

    Returns (OperatorChannels, VerificationReport)."""
    if n > F.N:
        raise PreconditionError("compression level exceeds the truncation")
    if n < 1:
        raise PreconditionError("compression level must be at least 1")
    ch = OperatorChannels(F, n, span)
    Q, Pn = ch.Q, ch.Pn
    report = VerificationReport(suite="compression-channels",
                                parameters={"n": n,
                                            "tower_dim": ch.tower_dim})
    report.add("projection-idempotent", "Q^2 = Q",
               float(np.linalg.norm(Q @ Q - Q)), tol)
    report.add("projection-selfadjoint", "Q = Q*",
               float(np.linalg.norm(Q - Q.conj().T)), tol)
    res_comm = 0.0
    for b in F.base.basis():
        lb = F.left_matrix(b)
        res_comm = max(res_comm, float(np.linalg.norm(Q @ lb - lb @ Q)))
    report.add("left-action-commutes", "Q (b . ) = (b . ) Q", res_comm, tol)
    res_leak = 0.0
    for h in span.basis:
        ann = F.creation_matrix(h).conj().T
        res_leak = max(res_leak,
                       float(np.linalg.norm(Q @ ann @ (Pn - Q))))
    report.add("no-annihilation-leak", "Q l(h)* (1 - Q) = 0 for h in K_p",
               res_leak, tol)
    low = [v for k, basis in enumerate(ch.level_bases[:n]) for v in
           (F.embed_level(k, b.flat) for b in basis)]
    res_rec = 0.0
    for _ in range(samples):
        m = int(rng.integers(1, n + 1))
        x, scale = sample_word(F, span, m, rng)
        y = ch.restrict(ch.compress(x))
        for v in low:
            res_rec = max(res_rec,
                          float(np.linalg.norm((y - x) @ v)) / scale)
    report.add("vector-reconstruction",
               "Q P_n x P_n Q v = x v on the tower below level n",
               res_rec, tol)
    return ch, report


def localized_tensor_dim(module: HilbertBimodule, vectors, cutoff=1e-10):
    """dim of (span of the vectors) (x)_B V with V the defining
    representation: per central block, the rank of the stacked component
    columns, summed over blocks."""
    total = 0
    for j in range(len(module.base.block_sizes)):
        cols = [v.comps[j] for v in vectors if v.comps[j].size]
        if not cols:
            continue
        A = np.hstack(cols)
        s = np.linalg.svd(A, compute_uv=False)
        if s.size and s[0] > 0:
            total += int(np.sum(s > cutoff * s[0]))
    return total


class EntropyBoundReport:
    """Growth table of the tower dimensions against the coarse bound
    n p^n dim(V) dim_C(K)^n, with the log(dim)/p ratio column."""

    def __init__(self, n, dimK, dimV, threshold=DEFAULT_TOL):
        self.n = n
        self.dimK = dimK
        self.dimV = dimV
        self.threshold = threshold
        self.rows = []          # (p, dim K_p, measured, bound, ratio)
        self.containment_residual = 0.0
        self.note = ""

    @property
    def bound_satisfied(self):
        return all(measured <= bound
                   for (_, _, measured, bound, _) in self.rows)

    @property
    def ratios(self):
        return [r for (_, _, _, _, r) in self.rows]

    @property
    def eventually_nonincreasing(self):
        """True when the ratio column never increases after its maximum."""
        ratios = self.ratios
        if len(ratios) <= 1:
            return True
        peak = int(np.argmax(ratios))
        return all(ratios[i] >= ratios[i + 1] - 1e-12
                   for i in range(peak, len(ratios) - 1))

    def to_report(self) -> VerificationReport:
        report = VerificationReport(
            suite="rank-growth",
            parameters={"n": self.n, "dim_C(K)": self.dimK,
                        "dim(V)": self.dimV})
        table = {f"p={p}": {"dim_Kp": dk, "measured": m, "bound": b,
                            "log_dim_over_p": round(r, 6)}
                 for (p, dk, m, b, r) in self.rows}
        report.add_bool("dimension-bound",
                        "dim(F_n(K_p) (x)_B V) <= n p^n dim(V) dim_C(K)^n",
                        self.bound_satisfied, table=table)
        report.add("word-containment",
                   "conjugated words stay inside the tower of K_p",
                   self.containment_residual, self.threshold)
        report.add_bool("ratio-trend",
                        "log(dim)/p non-increasing past its peak",
                        self.eventually_nonincreasing,
                        ratios=[round(r, 6) for r in self.ratios],
                        note=self.note)
        return report


def entropy_bound_report(F: FockSpace, bog: BogoliubovMap, K: SubmoduleSpan,
                         n, p_max, rng, samples=3,
                         tol=DEFAULT_TOL) -> EntropyBoundReport:
    """For p = 1..p_max, builds K_p, measures the dimension of its Fock
    tower tensored with the defining representation, compares against the
    coarse bound, and checks that vectors of conjugated sample words stay
    inside K_p.  The subexponential trend is reported, not asserted."""
    if n > F.N:
        raise PreconditionError("tower level exceeds the truncation")
    H = F.bimodule
    dimV = sum(H.base.block_sizes)
    out = EntropyBoundReport(n, K.complex_dim, dimV, threshold=tol)
    sample_flats = []
    for _ in range(samples):
        coeffs = rng.standard_normal(len(K.basis)) \
            + 1j * rng.standard_normal(len(K.basis))
        sample_flats.append(sum(c * v.flat
                                for c, v in zip(coeffs, K.basis)))
    for p in range(1, p_max + 1):
        span, _ = kp_subspace(bog, K, p, tol=tol)
        level_bases = _fock_level_spans(F, n, span)
        measured = sum(localized_tensor_dim(F.levels[k], basis)
                       for k, basis in enumerate(level_bases))
        bound = n * p ** n * dimV * K.complex_dim ** n
        ratio = np.log(measured) / p if measured > 0 else 0.0
        out.rows.append((p, span.complex_dim, measured, bound, ratio))
        Qp = span.projection
        one = np.eye(H.dim)
        for j in range(p):
            Uj = bog.power(j)
            for flat in sample_flats:
                v = Uj @ flat
                out.containment_residual = max(
                    out.containment_residual,
                    float(np.linalg.norm((one - Qp) @ v))
                    / max(1.0, float(np.linalg.norm(v))))
    out.note = ("saturating growth subspace" if out.rows and
                out.rows[-1][1] < p_max * K.complex_dim else
                "growth subspace still expanding at p_max")
    return out
