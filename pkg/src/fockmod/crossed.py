"""Reduced crossed products of a finite-dimensional C*-algebra by a finite
group, realized on l2(G) tensor the defining representation space, with
lifted automorphisms and the averaging channel over near-invariant subsets.
"""

from __future__ import annotations

import itertools

import numpy as np

from .cstar import (AlgebraAutomorphism, AlgebraElement, CPLinearMap,
                    CStarAlgebra, PreconditionError, StructureError,
                    block_diag_matrix, DEFAULT_TOL)
from .report import VerificationReport


class FiniteGroup:
    """Multiplication table with a designated identity; rows and columns are
    indexed by element number, table[g, h] = g*h."""

    def __init__(self, table, identity=0, labels=None):
        table = np.asarray(table, dtype=int)
        n = table.shape[0]
        if table.shape != (n, n):
            raise StructureError("multiplication table must be square")
        if table.min() < 0 or table.max() >= n:
            raise StructureError("table entries out of range")
        e = int(identity)
        if any(table[e, g] != g or table[g, e] != g for g in range(n)):
            raise StructureError("designated identity is not an identity")
        inv = np.full(n, -1)
        for g in range(n):
            hits = np.flatnonzero(table[g] == e)
            if hits.size != 1 or table[hits[0], g] != e:
                raise StructureError(f"element {g} has no two-sided inverse")
            inv[g] = hits[0]
        for g in range(n):
            for h in range(n):
                if not np.array_equal(table[table[g, h]], table[g][table[h]]):
                    raise StructureError("table is not associative")
        self.table = table
        self.identity = e
        self.inverse = inv
        self.order = n
        self.labels = list(labels) if labels else [str(g) for g in range(n)]

    def mul(self, g, h):
        return int(self.table[g, h])

    def inv(self, g):
        return int(self.inverse[g])

    def elements(self):
        return range(self.order)

    @staticmethod
    def trivial():
        return FiniteGroup([[0]])

    @staticmethod
    def cyclic(n):
        table = [[(g + h) % n for h in range(n)] for g in range(n)]
        return FiniteGroup(table, labels=[f"r{g}" for g in range(n)])

    @staticmethod
    def symmetric(n):
        perms = list(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        table = [[index[tuple(p[q[i]] for i in range(n))] for q in perms]
                 for p in perms]
        return FiniteGroup(table, identity=index[tuple(range(n))],
                           labels=["".join(map(str, p)) for p in perms])


class GroupAction:
    """Action of a finite group on a block algebra by automorphisms."""

    def __init__(self, group: FiniteGroup, algebra: CStarAlgebra, autos,
                 tol=DEFAULT_TOL):
        if len(autos) != group.order:
            raise StructureError("need one automorphism per group element")
        self.group = group
        self.algebra = algebra
        self.autos = list(autos)
        e = group.identity
        from .cstar import identity_automorphism
        if self.autos[e].distance_to(identity_automorphism(algebra)) > tol:
            raise StructureError("identity element must act as the identity")
        for g in group.elements():
            for h in group.elements():
                comp = self.autos[g].compose(self.autos[h])
                if comp.distance_to(self.autos[group.mul(g, h)]) > tol:
                    raise StructureError(
                        "action is not a homomorphism: "
                        f"alpha_{g} . alpha_{h} != alpha_{group.mul(g, h)}")

    def apply(self, g, a: AlgebraElement) -> AlgebraElement:
        return self.autos[g](a)


def defining_rep(algebra: CStarAlgebra, a: AlgebraElement):
    """sigma(a): block-diagonal matrix on V = sum of the block column spaces."""
    dimV = sum(algebra.block_sizes)
    return block_diag_matrix(list(a.blocks), dimV)


def rep_unitary(beta: AlgebraAutomorphism):
    """Unitary on V with V sigma(a) V* = sigma(beta(a))."""
    sizes = beta.algebra.block_sizes
    offs = np.cumsum([0] + list(sizes))
    dimV = offs[-1]
    V = np.zeros((dimV, dimV), complex)
    for j, src in enumerate(beta.source):
        V[offs[j]:offs[j + 1], offs[src]:offs[src + 1]] = beta.unitaries[j]
    return V


class CrossedProduct:
    """pi and lambda on l2(G) tensor V; (pi(a) xi)(h) = sigma(alpha_{h^-1}(a)) xi(h),
    (lambda_g xi)(h) = xi(g^-1 h)."""

    def __init__(self, action: GroupAction):
        self.action = action
        self.group = action.group
        self.algebra = action.algebra
        self.dimV = sum(self.algebra.block_sizes)
        self.dim = self.group.order * self.dimV

    def _slice(self, h):
        return slice(h * self.dimV, (h + 1) * self.dimV)

    def pi(self, a: AlgebraElement):
        M = np.zeros((self.dim, self.dim), complex)
        for h in self.group.elements():
            s = self._slice(h)
            M[s, s] = defining_rep(self.algebra,
                                   self.action.apply(self.group.inv(h), a))
        return M

    def lam(self, g):
        M = np.zeros((self.dim, self.dim), complex)
        for h in self.group.elements():
            M[self._slice(h), self._slice(self.group.mul(self.group.inv(g), h))] \
                = np.eye(self.dimV)
        return M

    def element(self, coeffs):
        """Sum of pi(a_g) lambda_g over a dict {g: AlgebraElement}."""
        M = np.zeros((self.dim, self.dim), complex)
        for g, a in coeffs.items():
            M += self.pi(a) @ self.lam(g)
        return M

    def coefficient(self, M, g) -> AlgebraElement:
        """Read a_g from sum pi(a_g) lambda_g: the (e, g^-1)-block is sigma(a_g)."""
        e = self.group.identity
        blk = M[self._slice(e), self._slice(self.group.inv(g))]
        offs = np.cumsum([0] + list(self.algebra.block_sizes))
        return self.algebra.element(
            [blk[offs[j]:offs[j + 1], offs[j]:offs[j + 1]]
             for j in range(len(self.algebra.block_sizes))])

    def spanning_words(self, rng, per_g=2):
        out = []
        for g in self.group.elements():
            for _ in range(per_g):
                out.append((self.algebra.random_element(rng), g))
        return out


def crossed_product(algebra: CStarAlgebra, action: GroupAction,
                    rng=None, tol=DEFAULT_TOL):
    """Builds the crossed product and verifies covariance and unitarity.

    Returns (CrossedProduct, VerificationReport)."""
    if algebra is not action.algebra:
        raise PreconditionError("action is defined on a different algebra")
    C = CrossedProduct(action)
    report = VerificationReport(suite="crossed-product")
    G = action.group
    rng = rng or np.random.default_rng(0)
    res_unit = res_rep = 0.0
    for g in G.elements():
        L = C.lam(g)
        res_unit = max(res_unit,
                       np.linalg.norm(L @ L.conj().T - np.eye(C.dim)))
        for h in G.elements():
            res_rep = max(res_rep, np.linalg.norm(
                L @ C.lam(h) - C.lam(G.mul(g, h))))
    report.add("lambda-unitary", "lambda_g lambda_g* = 1", res_unit, tol)
    report.add("lambda-representation", "lambda_g lambda_h = lambda_{gh}",
               res_rep, tol)
    res_cov = res_hom = 0.0
    for g in G.elements():
        L = C.lam(g)
        for _ in range(3):
            a = algebra.random_element(rng)
            res_cov = max(res_cov, np.linalg.norm(
                L @ C.pi(a) @ L.conj().T - C.pi(action.apply(g, a)), 2)
                / max(1.0, a.norm()))
            b = algebra.random_element(rng)
            res_hom = max(res_hom, np.linalg.norm(
                C.pi(a) @ C.pi(b) - C.pi(a * b), 2)
                / max(1.0, a.norm() * b.norm()))
    report.add("covariance", "lambda_g pi(a) lambda_g* = pi(alpha_g(a))",
               res_cov, tol)
    report.add("pi-homomorphism", "pi(a) pi(b) = pi(ab)", res_hom, tol)
    return C, report


def lift_automorphism(C: CrossedProduct, beta: AlgebraAutomorphism,
                      rng=None, tol=DEFAULT_TOL):
    """Lifts a beta commuting with the action to the crossed product via
    conjugation by 1 tensor V_beta.

    Returns (matrix V implementing the lift by conjugation, report)."""
    G = C.group
    for g in G.elements():
        d = beta.compose(C.action.autos[g]).distance_to(
            C.action.autos[g].compose(beta))
        if d > tol:
            raise PreconditionError(
                f"beta does not commute with the action at group element {g}")
    Vb = rep_unitary(beta)
    V = np.kron(np.eye(G.order), Vb)
    report = VerificationReport(suite="lifted-automorphism")
    rng = rng or np.random.default_rng(0)
    res_word = res_mult = res_adj = 0.0

    def hat(M):
        return V @ M @ V.conj().T

    words = C.spanning_words(rng, per_g=2)
    for a, g in words:
        lhs = hat(C.pi(a) @ C.lam(g))
        rhs = C.pi(beta(a)) @ C.lam(g)
        res_word = max(res_word,
                       np.linalg.norm(lhs - rhs, 2) / max(1.0, a.norm()))
    for (a, g), (b, h) in zip(words[::2], words[1::2]):
        x = C.pi(a) @ C.lam(g)
        y = C.pi(b) @ C.lam(h)
        res_mult = max(res_mult, np.linalg.norm(hat(x @ y) - hat(x) @ hat(y), 2)
                       / max(1.0, a.norm() * b.norm()))
        res_adj = max(res_adj, np.linalg.norm(hat(x.conj().T) - hat(x).conj().T, 2)
                      / max(1.0, a.norm()))
    report.add("lift-on-words", "betahat(pi(a) lambda_g) = pi(beta(a)) lambda_g",
               res_word, tol)
    report.add("lift-multiplicative", "betahat(xy) = betahat(x) betahat(y)",
               res_mult, tol)
    report.add("lift-star", "betahat(x*) = betahat(x)*", res_adj, tol)
    return V, report


def folner_defect(G: FiniteGroup, F):
    """max_g (|F| - |F meet gF|) / |F|."""
    F = sorted(set(F))
    worst = 0.0
    for g in G.elements():
        gF = {G.mul(g, t) for t in F}
        worst = max(worst, (len(F) - len(gF.intersection(F))) / len(F))
    return worst


def folner_average(C: CrossedProduct, F, m: CPLinearMap, rng=None,
                   tol=1e-12, words=None) -> VerificationReport:
    """Averaging channel pi(a) lambda_g -> (1/|F|) sum over t in F meet gF of
    pi(alpha_t(m(alpha_{t^-1}(a)))) lambda_g.

    With m the identity and F the whole group the channel is the identity on
    spanning words; in general the deviation is bounded by eta (norm(a) + 1)
    where eta dominates both the averaging-set defect and the defect of m on
    the orbit of a."""
    if not F:
        raise PreconditionError("averaging set must be nonempty")
    F = sorted(set(int(t) for t in F))
    G = C.group
    report = VerificationReport(suite="folner-channel",
                                parameters={"F": F, "size": len(F)})
    rng = rng or np.random.default_rng(0)
    if words is None:
        words = C.spanning_words(rng, per_g=2)
    set_defect = folner_defect(G, F)
    res_exact = 0.0
    any_exact = False
    bound_ok = True
    worst_ratio = 0.0
    for a, g in words:
        gF = {G.mul(g, t) for t in F}
        terms = np.zeros((C.dim, C.dim), complex)
        m_defect = 0.0
        for t in sorted(gF.intersection(F)):
            at = C.action.apply(G.inv(t), a)
            mat = m(at)
            m_defect = max(m_defect, (mat - at).norm())
            terms += C.pi(C.action.apply(t, mat))
        out = (terms / len(F)) @ C.lam(g)
        dev = np.linalg.norm(out - C.pi(a) @ C.lam(g), 2)
        eta = max(set_defect, m_defect)
        if eta == 0.0:
            any_exact = True
            res_exact = max(res_exact, dev / max(1.0, a.norm()))
        else:
            bound = eta * (a.norm() + 1.0)
            worst_ratio = max(worst_ratio, dev / bound)
            bound_ok = bound_ok and dev <= bound * (1 + 1e-9)
    if any_exact:
        report.add("exact-recovery",
                   "m = id and F = G recover pi(a) lambda_g exactly",
                   res_exact, tol)
    if worst_ratio:
        report.add_bool("deviation-bound",
                        "norm(channel(pi(a) lambda_g) - pi(a) lambda_g) "
                        "<= eta (norm(a) + 1)",
                        bound_ok, worst_ratio=worst_ratio)
    return report


def smearing_map(algebra: CStarAlgebra, eps, state=None) -> CPLinearMap:
    """Unital CP map (1 - eps) id + eps rho(.) 1; defect on a is
    eps * norm(a - rho(a) 1)."""
    from .cstar import uniform_trace_state
    rho = state or uniform_trace_state(algebra)

    def act(a):
        return a * (1 - eps) + algebra.identity() * (eps * rho(a))

    return CPLinearMap.from_callable(algebra, algebra, act)
