"""Free-product verification gadgets: the Toeplitz subalgebra generated by a
single creation operator and its scalar expectation, semicircular moments,
an approximate Haar unitary, moment-level freeness checks, and the
two-algebra amalgamated construction with its swap operator W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cstar import (AlgebraElement, CPLinearMap, CStarAlgebra,
                    ConditionalExpectation, PreconditionError, StateFunctional,
                    StructureError, UnitalHomomorphism, scalar_embedding,
                    DEFAULT_TOL, PSD_CUTOFF)
from .fock import FockSpace, masked_norm, asmatrix
from .hilbmod import (cp_bimodule, element_to_vector, gns_bimodule,
                      vector_to_element)
from .report import VerificationReport


def product_vacuum_expectation(F: FockSpace, factors) -> AlgebraElement:
    """Vacuum expectation of a product, evaluated on thin vacuum columns so
    the factors are never multiplied out."""
    d0 = F.level_dims[0]
    y = np.zeros((F.dim, d0), complex)
    y[:d0] = np.eye(d0)
    for M in reversed(list(factors)):
        y = asmatrix(M) @ y
    one = element_to_vector(F.levels[0], F.base.identity()).flat
    return vector_to_element(F.levels[0].from_flat(y[:d0] @ one))


class BaseExpectation:
    """Conditional expectation phi: A -> B, presented by a unital embedding of
    B into A together with the B-valued coordinate map."""

    def __init__(self, embedding: UnitalHomomorphism, to_base):
        self.embedding = embedding
        self.algebra = embedding.codomain
        self.base = embedding.domain
        self._to_base = to_base

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        return self._to_base(a)

    def embed(self, b: AlgebraElement) -> AlgebraElement:
        return self.embedding(b)

    @classmethod
    def from_state(cls, rho: StateFunctional):
        emb = scalar_embedding(rho.algebra)
        scalars = emb.domain

        def to_base(a):
            return scalars.scalar(rho(a))

        return cls(emb, to_base)

    @classmethod
    def trace_preserving(cls, embedding: UnitalHomomorphism):
        ce = ConditionalExpectation(embedding)
        return cls(embedding, ce)

    def gns_gram(self):
        basis = self.algebra.basis()
        n = len(basis)
        K = np.zeros((n, n), complex)
        for u in range(n):
            for v in range(n):
                val = self(basis[u].adjoint() * basis[v])
                K[u, v] = sum(np.trace(blk) for blk in val.blocks)
        return K

    @property
    def has_faithful_gns(self):
        lam = np.linalg.eigvalsh((self.gns_gram()
                                  + self.gns_gram().conj().T) / 2)
        return lam.min() > PSD_CUTOFF * max(1.0, lam.max())

    def validate(self, rng, samples=5, tol=DEFAULT_TOL) -> VerificationReport:
        report = VerificationReport(suite="base-expectation")
        report.add("unitality", "phi(1) = 1",
                   (self(self.algebra.identity())
                    - self.base.identity()).norm(), tol)
        res_bi = res_idem = 0.0
        for _ in range(samples):
            b1 = self.base.random_element(rng)
            b2 = self.base.random_element(rng)
            a = self.algebra.random_element(rng)
            lhs = self(self.embed(b1) * a * self.embed(b2))
            res_bi = max(res_bi, (lhs - b1 * self(a) * b2).norm()
                         / max(1.0, b1.norm() * a.norm() * b2.norm()))
            res_idem = max(res_idem, (self(self.embed(b1)) - b1).norm()
                           / max(1.0, b1.norm()))
        report.add("bimodularity", "phi(b1 a b2) = b1 phi(a) b2", res_bi, tol)
        report.add("idempotence", "phi . iota = id", res_idem, tol)
        lam = CPLinearMap.from_callable(
            self.algebra, self.base, self).min_choi_eigenvalue()
        report.add("complete-positivity", "Choi(phi) >= 0",
                   max(0.0, -lam), 1e-8)
        report.add_bool("faithful-gns", "phi(a* a) = 0 implies a = 0",
                        self.has_faithful_gns)
        return report


# -- Toeplitz subalgebra of a single creation operator ---------------------

def scalar_fit(b: AlgebraElement):
    """Best scalar s with b ~ s 1, plus the residual of the fit."""
    total = sum(algebra_blk.shape[0] for algebra_blk in b.blocks)
    s = sum(np.trace(blk) for blk in b.blocks) / total
    return s, (b - b.algebra.identity() * s).norm()


def toeplitz_state_check(B: CStarAlgebra, rho: StateFunctional, N, rng,
                         samples=6, tol=DEFAULT_TOL) -> VerificationReport:
    """The creation operator of the cyclic vector of the bimodule of a state:
    l(xi)* b l(xi) = rho(b) 1, the vacuum expectation is scalar on words in
    l(xi), and the scalar state is supported on 1 - l(xi) l(xi)*."""
    if not rho.has_faithful_gns:
        raise PreconditionError("state annihilates a central summand")
    module, xi = gns_bimodule(B, rho)
    F = FockSpace(module, N)
    L = F.creation_matrix(xi)
    report = VerificationReport(suite="toeplitz-state",
                                parameters={"N": N, "blocks": list(B.block_sizes)})
    res = 0.0
    for _ in range(samples):
        b = B.random_element(rng)
        diff = L.conj().T @ F.left_matrix(b) @ L \
            - rho(b) * np.eye(F.dim)
        res = max(res, masked_norm(F, diff, N - 1) / max(1.0, b.norm()))
    report.add("compressed-state", "l(xi)* b l(xi) = rho(b) 1", res, tol)

    def random_toeplitz_word(max_len):
        m = int(rng.integers(1, max_len + 1))
        word = np.eye(F.dim, dtype=complex)
        climb = level = 0
        for _ in range(m):
            if rng.random() < 0.5:
                word = L @ word
                level += 1
                climb = max(climb, level)
            else:
                word = L.conj().T @ word
                level -= 1
        return word, climb

    res_scalar = 0.0
    support = np.eye(F.dim) - L @ L.conj().T
    res_support = 0.0
    for _ in range(2 * samples):
        w, climb = random_toeplitz_word(N)
        if climb > N:
            continue
        e = F.vacuum_expectation(w)
        _, fit = scalar_fit(e)
        res_scalar = max(res_scalar, fit)
        e2 = F.vacuum_expectation(support @ w @ support)
        res_support = max(res_support, (e - e2).norm())
    report.add("scalar-expectation",
               "E(w) is a scalar multiple of 1 for words w in C*(l(xi))",
               res_scalar, tol)
    report.add("support-projection",
               "E(w) = E((1 - l l*) w (1 - l l*)): the state lives on "
               "1 - l(xi) l(xi)*", res_support, tol)
    s, fit = scalar_fit(F.vacuum_expectation(support))
    report.add("support-mass", "psi(1 - l(xi) l(xi)*) = 1",
               abs(s - 1.0) + fit, tol)
    return report


# -- scalar Fock space: semicircular element and Haar unitary ---------------

def scalar_creation(N):
    """Creation matrix on the N-truncated Fock space of the scalar bimodule."""
    return np.diag(np.ones(N), -1).astype(complex)


def semicircular_moments(N, orders=None):
    """Vacuum moments of s = l + l*; even moments are Catalan numbers."""
    if orders is None:
        orders = range(N + 1)
    orders = list(orders)
    if any(m > N for m in orders):
        raise PreconditionError(
            "moment order beyond the truncation would be corrupted")
    l = scalar_creation(N)
    s = l + l.conj().T
    out = []
    power = np.eye(N + 1)
    k = 0
    for m in sorted(orders):
        while k < m:
            power = power @ s
            k += 1
        out.append(float(power[0, 0].real))
    return out


def catalan(k):
    from math import comb
    return comb(2 * k, k) // (k + 1)


def semicircle_cdf(t):
    t = np.clip(t, -2.0, 2.0)
    return 0.5 + (t * np.sqrt(4.0 - t * t) + 4.0 * np.arcsin(t / 2.0)) \
        / (4.0 * np.pi)


def haar_unitary(N, k_max=6, tol=DEFAULT_TOL):
    """u = exp(2 pi i F(s)) for the semicircle distribution function F,
    applied to the truncated semicircular element by functional calculus.

    Returns (u, report); the report carries |psi(u^k)| for 1 <= k <= k_max."""
    l = scalar_creation(N)
    s = l + l.conj().T
    lam, V = np.linalg.eigh(s)
    u = (V * np.exp(2j * np.pi * semicircle_cdf(lam))) @ V.conj().T
    report = VerificationReport(suite="haar-unitary", parameters={"N": N})
    report.add("unitarity", "u* u = 1",
               float(np.linalg.norm(u.conj().T @ u - np.eye(N + 1))), tol)
    moments = {}
    power = np.eye(N + 1, dtype=complex)
    worst = 0.0
    for k in range(1, k_max + 1):
        power = power @ u
        moments[k] = abs(complex(power[0, 0]))
        worst = max(worst, moments[k])
    report.add_bool("moment-decay-data",
                    "psi(u^k) = 0 for k != 0 (approximately, improving in N)",
                    True, moments={str(k): v for k, v in moments.items()},
                    max_abs=worst)
    return u, report


def haar_moment_magnitude(N, k_max=6):
    u, report = haar_unitary(N, k_max)
    for c in report.checks:
        if c.name == "moment-decay-data":
            return c.details["max_abs"]
    raise StructureError("missing moment data")


# -- generic moment-level freeness ------------------------------------------

@dataclass
class MomentReport:
    budget: int
    threshold: float
    table: dict = field(default_factory=dict)
    note: str = ""

    @property
    def max_residual(self):
        return max(self.table.values()) if self.table else 0.0

    @property
    def passed(self):
        return self.max_residual <= self.threshold

    def to_report(self, suite, anchor) -> VerificationReport:
        report = VerificationReport(suite=suite,
                                    parameters={"budget": self.budget})
        report.add(suite + "-max-moment", anchor, self.max_residual,
                   self.threshold, table=self.table, note=self.note)
        return report


def alternating_patterns(n_families, budget):
    out = []

    def extend(pat):
        if pat:
            out.append(tuple(pat))
        if len(pat) == budget:
            return
        for f in range(n_families):
            if not pat or pat[-1] != f:
                extend(pat + [f])

    extend([])
    return out


def freeness_check(families, expectation, embed, budget, rng,
                   samples_per_pattern=4, threshold=DEFAULT_TOL,
                   note="") -> MomentReport:
    """Max norm of expectations of alternating products of centered samples.

    families: list of callables rng -> operator matrix; expectation: list of
    factor matrices -> element with a norm; embed: value -> matrix.  Products
    are kept as factor lists and evaluated on the vacuum."""
    if len(families) < 2:
        return MomentReport(budget=budget, threshold=threshold,
                            note="single family: vacuously free")
    report = MomentReport(budget=budget, threshold=threshold, note=note)
    for pat in alternating_patterns(len(families), budget):
        if len(pat) < 2:
            continue
        worst = 0.0
        for _ in range(samples_per_pattern):
            factors = []
            scale = 1.0
            for f in pat:
                x = families[f](rng)
                x = x - embed(expectation([x]))
                scale *= max(1.0, np.linalg.norm(x))
                factors.append(x)
            worst = max(worst, expectation(factors).norm() / scale)
        report.table["-".join(str(f) for f in pat)] = worst
    return report


# -- amalgamated two-algebra construction -----------------------------------

class AmalgSetup:
    """A = A1 + A2, D = B + B inside A, the swap-twisted expectation eta,
    the eta-creation operator L on the truncated Fock space of the bimodule
    of eta, and the derived operators P and W."""

    def __init__(self, phi1: BaseExpectation, phi2: BaseExpectation, N,
                 dim_cap=20000):
        if phi1.base.block_sizes != phi2.base.block_sizes:
            raise PreconditionError("expectations target different bases")
        if not (phi1.has_faithful_gns and phi2.has_faithful_gns):
            raise PreconditionError("expectation without faithful GNS")
        self.phi1, self.phi2 = phi1, phi2
        self.B = phi1.base
        self.A1, self.A2 = phi1.algebra, phi2.algebra
        self.A = CStarAlgebra(tuple(self.A1.block_sizes)
                              + tuple(self.A2.block_sizes))
        self.D = CStarAlgebra(tuple(self.B.block_sizes) * 2)
        self.N = N
        nb = len(self.B.block_sizes)
        n1 = len(self.A1.block_sizes)
        mults = []
        unitaries = []
        for j, row in enumerate(phi1.embedding.multiplicities):
            mults.append(tuple(row) + (0,) * nb)
            unitaries.append(phi1.embedding.unitaries[j])
        for j, row in enumerate(phi2.embedding.multiplicities):
            mults.append((0,) * nb + tuple(row))
            unitaries.append(phi2.embedding.unitaries[j])
        self.embed_D = UnitalHomomorphism(self.D, self.A, mults, unitaries)
        self._n1 = n1
        from .cstar import AlgebraAutomorphism
        self.alpha = AlgebraAutomorphism(
            self.D, tuple(range(nb, 2 * nb)) + tuple(range(nb)))
        self.eta_map = CPLinearMap.from_callable(self.A, self.A, self.eta)
        self.H, self.xi = cp_bimodule(self.A, self.eta_map)
        self.F = FockSpace(self.H, N, dim_cap=dim_cap)
        self.L = self.F.creation_matrix(self.xi)

    # element plumbing ------------------------------------------------------

    def pair(self, a1: AlgebraElement, a2: AlgebraElement) -> AlgebraElement:
        return self.A.element(list(a1.blocks) + list(a2.blocks))

    def split(self, a: AlgebraElement):
        return (self.A1.element(a.blocks[:self._n1]),
                self.A2.element(a.blocks[self._n1:]))

    def dpair(self, b1: AlgebraElement, b2: AlgebraElement) -> AlgebraElement:
        return self.D.element(list(b1.blocks) + list(b2.blocks))

    def dsplit(self, d: AlgebraElement):
        nb = len(self.B.block_sizes)
        return (self.B.element(d.blocks[:nb]), self.B.element(d.blocks[nb:]))

    def phi(self, a: AlgebraElement) -> AlgebraElement:
        a1, a2 = self.split(a)
        return self.dpair(self.phi1(a1), self.phi2(a2))

    def eta_D(self, a: AlgebraElement) -> AlgebraElement:
        a1, a2 = self.split(a)
        return self.dpair(self.phi2(a2), self.phi1(a1))

    def eta(self, a: AlgebraElement) -> AlgebraElement:
        return self.embed_D(self.eta_D(a))

    # operators on the Fock space -------------------------------------------

    def op(self, a: AlgebraElement):
        return self.F.left_matrix(a)

    def op_d(self, d: AlgebraElement):
        return self.F.left_matrix(self.embed_D(d))

    def psi(self, x) -> AlgebraElement:
        """The D-valued expectation phi . E."""
        return self.phi(self.F.vacuum_expectation(asmatrix(x)))

    def psi_factors(self, factors) -> AlgebraElement:
        """psi of a product given as its list of factors."""
        return self.phi(product_vacuum_expectation(self.F, factors))

    @property
    def P(self):
        L = self.L
        return np.eye(self.F.dim) - L @ L @ L.conj().T @ L.conj().T

    @property
    def W(self):
        P = self.P
        return P @ (self.L + self.L.conj().T) @ P


def amalg_setup(phi1: BaseExpectation, phi2: BaseExpectation, N, rng,
                samples=5, tol=DEFAULT_TOL, dim_cap=20000):
    """Builds the amalgamated gadget stack and verifies its defining
    identities.  Returns (AmalgSetup, VerificationReport)."""
    S = AmalgSetup(phi1, phi2, N, dim_cap=dim_cap)
    report = VerificationReport(suite="amalgamated-setup",
                                parameters={"N": N})
    report.merge(phi1.validate(rng, tol=tol))
    report.merge(phi2.validate(rng, tol=tol))
    res_ep = res_d = 0.0
    for _ in range(samples):
        a = S.A.random_element(rng)
        res_ep = max(res_ep,
                     (S.eta(S.embed_D(S.phi(a))) - S.eta(a)).norm()
                     / max(1.0, a.norm()))
        d = S.D.random_element(rng)
        res_d = max(res_d, (S.eta_D(S.embed_D(d)) - S.alpha(d)).norm()
                    / max(1.0, d.norm()))
    report.add("eta-phi-compatibility", "eta . phi = eta", res_ep, tol)
    report.add("eta-on-subalgebra", "eta(d) = alpha(d) for d in D",
               res_d, tol)
    res_inner = res_comp = 0.0
    for _ in range(samples):
        a = S.A.random_element(rng)
        res_inner = max(res_inner,
                        (S.H.inner(S.xi, S.xi.lmul(a)) - S.eta(a)).norm()
                        / max(1.0, a.norm()))
        diff = S.L.conj().T @ S.op(a) @ S.L - S.op(S.eta(a))
        res_comp = max(res_comp, masked_norm(S.F, diff, N - 1)
                       / max(1.0, a.norm()))
    report.add("cyclic-vector", "<xi, a xi> = eta(a)", res_inner, tol)
    report.add("eta-compression", "L* a L = eta(a)", res_comp, tol)
    return S, report


def build_W(setup: AmalgSetup, tol=DEFAULT_TOL):
    """P = 1 - L^2 (L*)^2 and W = P (L + L*) P with their algebraic laws on
    the overflow-free domain (input levels <= N - 2).

    Returns (P, W, VerificationReport)."""
    if setup.N < 3:
        raise PreconditionError(
            "need truncation at least 3 for overflow-free room")
    F, L = setup.F, setup.L
    P, W = setup.P, setup.W
    dom = setup.N - 2
    report = VerificationReport(suite="swap-operator",
                                parameters={"N": setup.N, "domain_level": dom})
    report.add("P-idempotent", "P^2 = P",
               masked_norm(F, P @ P - P, dom), tol)
    report.add("P-selfadjoint", "P = P*",
               float(np.linalg.norm(P - P.conj().T, 2)), tol)
    expansion = L + L.conj().T \
        - L @ L.conj().T @ L.conj().T - L @ L @ L.conj().T
    report.add("W-expansion", "W = L + L* - L(L*)^2 - L^2 L*",
               masked_norm(F, W - expansion, dom), tol)
    report.add("W-selfadjoint", "W = W*",
               float(np.linalg.norm(W - W.conj().T, 2)), tol)
    report.add("W-squared", "W^2 = P",
               masked_norm(F, W @ W - P, dom), tol)
    report.add("W-kills-complement", "W (1 - P) = 0",
               masked_norm(F, W @ (np.eye(F.dim) - P), dom), tol)
    report.add("W-expectation", "psi(W) = 0", setup.psi(W).norm(), tol)
    return P, W, report


def swap_commutation(setup: AmalgSetup, tol=DEFAULT_TOL) -> VerificationReport:
    """L d = alpha(d) L and its consequences, for d over a basis of D."""
    F, L = setup.F, setup.L
    P, W = setup.P, setup.W
    dom = setup.N - 2
    res_l = res_ls = res_p = res_w = 0.0
    for d in setup.D.basis():
        dm = setup.op_d(d)
        am = setup.op_d(setup.alpha(d))
        res_l = max(res_l, masked_norm(F, L @ dm - am @ L, dom))
        res_ls = max(res_ls,
                     masked_norm(F, L.conj().T @ dm - am @ L.conj().T, dom))
        res_p = max(res_p, masked_norm(F, P @ dm - dm @ P, dom))
        res_w = max(res_w, masked_norm(F, W @ dm - am @ W, dom))
    report = VerificationReport(suite="swap-commutation")
    report.add("L-twist", "L d = alpha(d) L", res_l, tol)
    report.add("Lstar-twist", "L* d = alpha(d) L*", res_ls, tol)
    report.add("P-commutes", "P d = d P", res_p, tol)
    report.add("W-twist", "W d = alpha(d) W", res_w, tol)
    return report


def wunitary_vanishing(setup: AmalgSetup, budget, rng, samples=6,
                       tol=DEFAULT_TOL) -> VerificationReport:
    """The family of vanishing moments that kills 1 - P in the expectation
    representation, plus the swapped-corner expectation identities."""
    if budget > setup.N:
        raise PreconditionError("word budget exceeds the truncation")
    F, W, P = setup.F, setup.W, setup.P
    one = np.eye(F.dim)
    report = VerificationReport(suite="swap-unitary-moments",
                                parameters={"budget": budget})
    worst = 0.0
    table = {}
    for k in range(budget + 1):
        for el in range(budget + 1 - k):
            pat = 0.0
            for _ in range(samples):
                qs = [int(rng.integers(1, 3)) for _ in range(k)]
                qps = [int(rng.integers(1, 3)) for _ in range(el)]
                if sum(qs) + sum(qps) > setup.N:
                    continue
                scale = 1.0

                def coeff():
                    nonlocal scale
                    a = setup.A.random_element(rng)
                    scale *= max(1.0, a.norm())
                    return setup.op(a)

                factors = [coeff()]
                for q in qs:
                    factors.extend([W] * q)
                    factors.append(coeff())
                factors.append(one - P)
                for q in reversed(qps):
                    factors.append(coeff())
                    factors.extend([W] * q)
                factors.append(coeff())
                pat = max(pat, setup.psi_factors(factors).norm() / scale)
            table[f"k={k},l={el}"] = pat
            worst = max(worst, pat)
    report.add("complement-moments",
               "psi(a1 W^q1 ... a_{k+1} (1-P) a'_{l+1} W^q'_l ... a'_1) = 0",
               worst, tol, table=table)
    res_centered = res_corner = 0.0
    for _ in range(samples):
        a2 = setup.A2.random_element(rng)
        centered = a2 - setup.phi2.embed(setup.phi2(a2))
        res_centered = max(res_centered, setup.psi_factors(
            [W, setup.op(setup.pair(setup.A1.zero(), centered)), W]).norm()
            / max(1.0, a2.norm()))
        val = setup.psi_factors(
            [W, setup.op(setup.pair(setup.A1.zero(),
                                    setup.phi2.embed(setup.phi2(a2)))), W])
        target = setup.dpair(setup.phi2(a2), setup.B.zero())
        res_corner = max(res_corner, (val - target).norm()
                         / max(1.0, a2.norm()))
    report.add("swapped-corner-centered", "psi(W (0, a2 - phi2(a2)) W) = 0",
               res_centered, tol)
    report.add("swapped-corner-value", "psi(W (0, phi2(a2)) W) = (phi2(a2), 0)",
               res_corner, tol)
    q = setup.op_d(setup.dpair(setup.B.identity(), setup.B.zero()))
    report.add("corner-swap", "W q W = alpha(q) P",
               masked_norm(F, W @ q @ W - (one - q) @ P, setup.N - 2), tol)
    return report


def la_freeness_check(setup: AmalgSetup, budget, rng, samples=4,
                      threshold=DEFAULT_TOL) -> MomentReport:
    """Moment freeness of {L, L*} and the coefficient algebra over D."""
    F, L = setup.F, setup.L

    def family_toeplitz(r):
        words = [L, L.conj().T, L @ L.conj().T, L.conj().T @ L,
                 L + L.conj().T]
        return words[int(r.integers(len(words)))].copy()

    def family_coeff(r):
        return setup.op(setup.A.random_element(r))

    def embed(d):
        return setup.op_d(d)

    return freeness_check([family_toeplitz, family_coeff],
                          setup.psi_factors, embed,
                          budget, rng, samples_per_pattern=samples,
                          threshold=threshold,
                          note="families: words in {L, L*}; coefficients")


def corner_freeness_check(setup: AmalgSetup, budget, rng, samples=4,
                          threshold=DEFAULT_TOL) -> MomentReport:
    """Moment freeness of the two corner copies: products of centered
    (a1, 0) and W (0, a2) W factors alternate to zero expectation."""
    if 2 * budget > setup.N:
        raise PreconditionError("word budget exceeds the truncation")
    W = setup.W
    report = MomentReport(budget=budget, threshold=threshold,
                          note="corner copies of the two amalgamands")
    for pat in alternating_patterns(2, budget):
        if len(pat) < 2:
            continue
        worst = 0.0
        for _ in range(samples):
            factors = []
            scale = 1.0
            for f in pat:
                if f == 0:
                    a1 = setup.A1.random_element(rng)
                    a1 = a1 - setup.phi1.embed(setup.phi1(a1))
                    scale *= max(1.0, a1.norm())
                    factors.append(setup.op(setup.pair(a1, setup.A2.zero())))
                else:
                    a2 = setup.A2.random_element(rng)
                    a2 = a2 - setup.phi2.embed(setup.phi2(a2))
                    scale *= max(1.0, a2.norm())
                    factors.extend([W, setup.op(
                        setup.pair(setup.A1.zero(), a2)), W])
            worst = max(worst, setup.psi_factors(factors).norm() / scale)
        report.table["-".join("12"[f] for f in pat)] = worst
    return report


def alpha_beta_conditions(setup: AmalgSetup, rng, samples=5,
                          tol=DEFAULT_TOL) -> VerificationReport:
    """The two distributional conditions characterizing L over psi: vanishing
    of unmatched words and the compressed-expectation formula."""
    F, L = setup.F, setup.L
    report = VerificationReport(suite="creation-distribution")
    worst = 0.0
    for k in range(1, min(3, setup.N) + 1):
        for _ in range(samples):
            scale = 1.0

            def coeff():
                nonlocal scale
                a = setup.A.random_element(rng)
                scale *= max(1.0, a.norm())
                return setup.op(a)

            factors = [coeff()]
            for _ in range(k):
                factors.extend([L, coeff()])
            worst = max(worst,
                        setup.psi_factors(factors).norm() / scale)
    report.add("unmatched-words", "psi(a1 L a2 ... L a_{k+1}) = 0",
               worst, tol)
    res = 0.0
    for _ in range(samples):
        a = setup.A.random_element(rng)
        diff = L.conj().T @ setup.op(a) @ L \
            - setup.op_d(setup.eta_D(setup.embed_D(setup.psi(setup.op(a)))))
        res = max(res, masked_norm(F, diff, setup.N - 1) / max(1.0, a.norm()))
    report.add("compressed-expectation", "L* a L = eta(psi(a))", res, tol)
    return report
