"""Command line runner: instance ingestion, suite orchestration, seeded
default instances, and report emission in text or JSON."""

import argparse
import json
import sys
import time

import jsonschema
import numpy as np

from . import bogoliubov as bg
from . import crossed as cr
from . import fock as fk
from . import freeprod as fp
from . import instances as ins
from .cstar import (CPLinearMap, CStarAlgebra, PreconditionError,
                    ResourceCapError, StructureError, identity_automorphism)
from .hilbmod import augment, submodule_projection
from .report import VerificationReport

SUITES = ("fock", "ideal", "factorization", "toeplitz", "crossed", "free",
          "amalg", "bog")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3

_COMPLEX = {"type": "array", "minItems": 2, "maxItems": 2,
            "items": {"type": "number"}}
_CVECTOR = {"type": "array", "items": _COMPLEX}
_CMATRIX = {"type": "array", "items": _CVECTOR}
_NAME = {"type": "string", "minLength": 1}
_AUTOMORPHISM = {
    "type": "object",
    "properties": {
        "source": {"type": "array", "items": {"type": "integer",
                                              "minimum": 0}},
        "unitaries": {"type": "array", "items": _CMATRIX},
    },
    "additionalProperties": False,
}

INSTANCE_SCHEMA = {
    "type": "object",
    "properties": {
        "name": _NAME,
        "parameters": {
            "type": "object",
            "properties": {
                "truncation": {"type": "integer", "minimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer", "minimum": 0},
                "max_word_length": {"type": "integer", "minimum": 1},
                "dim_cap": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "algebras": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["blocks"],
                "properties": {
                    "blocks": {"type": "array", "minItems": 1,
                               "items": {"type": "integer", "minimum": 1}},
                },
                "additionalProperties": False,
            },
        },
        "bimodules": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["base", "right_multiplicities",
                             "left_multiplicities"],
                "properties": {
                    "base": _NAME,
                    "right_multiplicities": {
                        "type": "array",
                        "items": {"type": "integer", "minimum": 0}},
                    "left_multiplicities": {
                        "type": "array",
                        "items": {"type": "array",
                                  "items": {"type": "integer",
                                            "minimum": 0}}},
                    "unitaries": {"type": "array", "items": _CMATRIX},
                },
                "additionalProperties": False,
            },
        },
        "states": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["algebra", "densities"],
                "properties": {
                    "algebra": _NAME,
                    "densities": {"type": "array", "items": _CMATRIX},
                },
                "additionalProperties": False,
            },
        },
        "groups": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["table"],
                "properties": {
                    "table": {"type": "array",
                              "items": {"type": "array",
                                        "items": {"type": "integer",
                                                  "minimum": 0}}},
                },
                "additionalProperties": False,
            },
        },
        "actions": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["group", "algebra", "automorphisms"],
                "properties": {
                    "group": _NAME,
                    "algebra": _NAME,
                    "automorphisms": {"type": "array",
                                      "items": _AUTOMORPHISM},
                },
                "additionalProperties": False,
            },
        },
        "amalgamated": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["state1", "state2"],
                "properties": {
                    "state1": _NAME,
                    "state2": _NAME,
                },
                "additionalProperties": False,
            },
        },
        "bogoliubov": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["bimodule", "matrix"],
                "properties": {
                    "bimodule": _NAME,
                    "matrix": _CMATRIX,
                    "beta": _AUTOMORPHISM,
                    "subspace": {"type": "array", "items": _CVECTOR},
                    "n": {"type": "integer", "minimum": 1},
                    "p_max": {"type": "integer", "minimum": 1},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}


class InstanceError(Exception):
    """Schema violations or unresolved references, with their paths."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def parse_instance(path):
    """Load and validate an instance file; returns the raw dict."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InstanceError([f"cannot read {path}: {exc}"])
    except json.JSONDecodeError as exc:
        raise InstanceError([f"malformed JSON in {path}: {exc}"])
    validator = jsonschema.Draft7Validator(INSTANCE_SCHEMA)
    errors = [f"{'/'.join(str(p) for p in e.absolute_path) or '<root>'}: "
              f"{e.message}"
              for e in validator.iter_errors(data)]
    if errors:
        raise InstanceError(sorted(errors))
    return data


def build_instance(data):
    """Construct the declared objects; unresolved names or invalid structures
    become InstanceError."""
    ctx = {"parameters": dict(data.get("parameters", {})),
           "name": data.get("name", "instance"),
           "algebras": {}, "bimodules": {}, "states": {}, "groups": {},
           "actions": {}, "amalgamated": {}, "bogoliubov": {}}
    errors = []

    def resolve(kind, name, path):
        if name not in ctx[kind]:
            errors.append(f"{path}: unresolved {kind[:-1]} '{name}'")
            return None
        return ctx[kind][name]

    for name, d in data.get("algebras", {}).items():
        ctx["algebras"][name] = ins.algebra_from_descriptor(d)
    for name, d in data.get("bimodules", {}).items():
        base = resolve("algebras", d["base"], f"bimodules/{name}/base")
        if base is None:
            continue
        try:
            ctx["bimodules"][name] = ins.bimodule_from_descriptor(d, base)
        except (StructureError, PreconditionError) as exc:
            errors.append(f"bimodules/{name}: {exc}")
    for name, d in data.get("states", {}).items():
        alg = resolve("algebras", d["algebra"], f"states/{name}/algebra")
        if alg is None:
            continue
        try:
            ctx["states"][name] = ins.state_from_descriptor(d, alg)
        except (StructureError, PreconditionError) as exc:
            errors.append(f"states/{name}: {exc}")
    for name, d in data.get("groups", {}).items():
        try:
            ctx["groups"][name] = ins.group_from_descriptor(d)
        except StructureError as exc:
            errors.append(f"groups/{name}: {exc}")
    for name, d in data.get("actions", {}).items():
        group = resolve("groups", d["group"], f"actions/{name}/group")
        alg = resolve("algebras", d["algebra"], f"actions/{name}/algebra")
        if group is None or alg is None:
            continue
        try:
            ctx["actions"][name] = ins.action_from_descriptor(d, group, alg)
        except (StructureError, PreconditionError) as exc:
            errors.append(f"actions/{name}: {exc}")
    for name, d in data.get("amalgamated", {}).items():
        rho1 = resolve("states", d["state1"], f"amalgamated/{name}/state1")
        rho2 = resolve("states", d["state2"], f"amalgamated/{name}/state2")
        if rho1 is None or rho2 is None:
            continue
        ctx["amalgamated"][name] = (fp.BaseExpectation.from_state(rho1),
                                    fp.BaseExpectation.from_state(rho2))
    for name, d in data.get("bogoliubov", {}).items():
        module = resolve("bimodules", d["bimodule"],
                         f"bogoliubov/{name}/bimodule")
        if module is None:
            continue
        try:
            beta = (ins.automorphism_from_descriptor(d["beta"], module.base)
                    if "beta" in d else identity_automorphism(module.base))
            bog = ins.bogoliubov_from_descriptor(d, module, beta)
            span = None
            if "subspace" in d:
                vs = [module.from_flat(ins.complex_array(v))
                      for v in d["subspace"]]
                span = submodule_projection(vs)
            ctx["bogoliubov"][name] = {
                "map": bog, "subspace": span,
                "n": int(d.get("n", 2)), "p_max": int(d.get("p_max", 4))}
        except (StructureError, PreconditionError) as exc:
            errors.append(f"bogoliubov/{name}: {exc}")
    if errors:
        raise InstanceError(errors)
    return ctx


# -- suite runners -----------------------------------------------------------

class Settings:
    def __init__(self, truncation=None, tol=1e-9, seed=0, max_word_length=5,
                 dim_cap=20000):
        self.truncation = truncation
        self.tol = tol
        self.seed = seed
        self.max_word_length = max_word_length
        self.dim_cap = dim_cap

    def rng(self):
        return np.random.default_rng(self.seed)

    def N(self, default):
        return default if self.truncation is None else self.truncation


def _fock_bimodules(ctx, st):
    if ctx and ctx["bimodules"]:
        N = st.N(3)
        return [(H, N) for H in ctx["bimodules"].values()]
    return ins.creation_instances(st.seed, count=5)


def run_fock(ctx, st):
    rng = st.rng()
    reports = []
    for H, N in _fock_bimodules(ctx, st):
        F = fk.FockSpace(H, st.N(N), dim_cap=st.dim_cap)
        rep = fk.creation_relations_check(F, rng, tol=st.tol)
        rep.merge(fk.expectation_properties_check(F, rng, tol=st.tol))
        rep.parameters.update({"N": F.N, "dim": F.dim})
        rep.seed = st.seed
        reports.append(rep)
    return reports


def run_ideal(ctx, st):
    rng = st.rng()
    reports = []
    for H, _ in _fock_bimodules(ctx, st)[:3]:
        N = st.N(4)
        F = fk.FockSpace(H, max(N, 3), dim_cap=st.dim_cap)
        for n in (1, 2):
            if n + 1 > F.N:
                continue
            rep = fk.ideal_structure_check(F, n, rng, tol=st.tol)
            rep.merge(fk.quotient_dimension_check(F, n, rng))
            rep.parameters.update({"N": F.N, "n": n})
            rep.seed = st.seed
            reports.append(rep)
    return reports


def run_factorization(ctx, st):
    rng = st.rng()
    reports = []
    for H, _ in _fock_bimodules(ctx, st)[:2]:
        for n in range(0, st.max_word_length):
            for k in range(0, st.max_word_length):
                for j in range(0, n + 1):
                    if k * (n + 1) + j > st.max_word_length:
                        continue
                    if k * (n + 1) + j == 0:
                        continue
                    rep = fk.fock_factorization_check(
                        H, n, k, j, rng, tol=st.tol)
                    rep.seed = st.seed
                    reports.append(rep)
    return reports


def run_toeplitz(ctx, st):
    rng = st.rng()
    candidates = [H for H, _ in _fock_bimodules(ctx, st)
                  if all(r >= n for r, n in
                         zip(H.right_mult, H.base.block_sizes))]
    if not candidates:
        B = CStarAlgebra((2,))
        candidates = [ins.random_bimodule(rng, B, max_copies=1, dim_cap=16)]
    reports = []
    for H in candidates[:2]:
        F = fk.FockSpace(H, st.N(3), dim_cap=st.dim_cap)
        L = F.creation(fk.isometric_vector(H, rng))
        spec = fk.random_word_spec(F, rng, 2, balanced=True)
        a = F.gauge_expectation(fk.word(F, spec).matrix)
        _, rep = fk.toeplitz_endomorphism(F, a, L, rng=rng, tol=st.tol)
        rep.merge(fk.endomorphism_injectivity_check(F, L, F.N - 1, rng))
        rep.parameters.update({"N": F.N, "dim": F.dim})
        rep.seed = st.seed
        reports.append(rep)
    if ctx and ctx["states"]:
        pairs = [(rho.algebra, rho) for rho in ctx["states"].values()]
    else:
        B = CStarAlgebra((1, 1))
        pairs = [(B, ins.random_state(rng, B))]
    for B, rho in pairs[:2]:
        rep = fp.toeplitz_state_check(B, rho, st.N(4), rng, tol=st.tol)
        rep.seed = st.seed
        reports.append(rep)
    return reports


def run_crossed(ctx, st):
    rng = st.rng()
    if ctx and ctx["actions"]:
        triples = [(a.group, a.algebra, a) for a in ctx["actions"].values()]
    else:
        triples = ins.crossed_instances(st.seed)
    reports = []
    for group, algebra, action in triples:
        C, rep = cr.crossed_product(algebra, action, rng, tol=st.tol)
        rep.seed = st.seed
        reports.append(rep)
        _, lift_rep = cr.lift_automorphism(
            C, identity_automorphism(algebra), rng, tol=st.tol)
        lift_rep.seed = st.seed
        reports.append(lift_rep)
        ident = CPLinearMap.from_callable(algebra, algebra, lambda a: a)
        exact_rep = cr.folner_average(C, list(group.elements()), ident,
                                      rng=rng)
        exact_rep.seed = st.seed
        reports.append(exact_rep)
        smear = cr.smearing_map(algebra, 0.25)
        smear_rep = cr.folner_average(C, list(group.elements())[:-1] or [0],
                                      smear, rng=rng)
        smear_rep.seed = st.seed
        reports.append(smear_rep)
    return reports


def run_free(ctx, st):
    rng = st.rng()
    N = max(8, st.N(8))
    report = VerificationReport(suite="scalar-semicircular",
                                parameters={"N": N}, seed=st.seed)
    moments = fp.semicircular_moments(N, orders=range(0, 9))
    res_even = max(abs(moments[2 * k] - fp.catalan(k)) for k in range(0, 5))
    res_odd = max(abs(moments[2 * k + 1]) for k in range(0, 4))
    report.add("even-moments", "psi(s^{2k}) = catalan(k)", res_even, st.tol)
    report.add("odd-moments", "psi(s^{2k+1}) = 0", res_odd, 1e-12)
    _, haar_rep = fp.haar_unitary(N)
    haar_rep.seed = st.seed
    B = CStarAlgebra((1,))
    rho = ins.random_state(rng, B)
    toep = fp.toeplitz_state_check(B, rho, min(st.N(4), 6), rng, tol=st.tol)
    toep.seed = st.seed
    return [report, haar_rep, toep]


def run_amalg(ctx, st, deep_first_only=True):
    rng = st.rng()
    if ctx and ctx["amalgamated"]:
        pairs = list(ctx["amalgamated"].values())
    else:
        pairs = ins.amalg_instances(st.seed)
    N = max(st.N(5), 3)
    budget = min(st.max_word_length, 4)
    reports = []
    for i, (phi1, phi2) in enumerate(pairs):
        setup, rep = fp.amalg_setup(phi1, phi2, N, rng, tol=st.tol,
                                    dim_cap=st.dim_cap)
        rep.seed = st.seed
        reports.append(rep)
        _, _, wrep = fp.build_W(setup, tol=st.tol)
        wrep.seed = st.seed
        reports.append(wrep)
        screp = fp.swap_commutation(setup, tol=st.tol)
        screp.seed = st.seed
        reports.append(screp)
        if deep_first_only and i > 0:
            continue
        wvrep = fp.wunitary_vanishing(setup, min(budget, 2), rng, tol=st.tol)
        wvrep.seed = st.seed
        reports.append(wvrep)
        la = fp.la_freeness_check(setup, budget, rng, threshold=st.tol)
        reports.append(la.to_report(
            "toeplitz-coefficient-freeness",
            "psi of alternating centered words in {L, L*} and A vanishes"))
        cf = fp.corner_freeness_check(setup, min(budget, N // 2), rng,
                                      threshold=st.tol)
        reports.append(cf.to_report(
            "corner-freeness",
            "psi of alternating centered corner words vanishes"))
        ab = fp.alpha_beta_conditions(setup, rng, tol=st.tol)
        ab.seed = st.seed
        reports.append(ab)
    return reports


def run_bog(ctx, st):
    rng = st.rng()
    reports = []
    if ctx and ctx["bogoliubov"]:
        entries = list(ctx["bogoliubov"].values())
    else:
        H, K, U = ins.multiplicity_shift_instance()
        n_top = min(3, st.N(3))
        entries = [{"map": U, "subspace": K, "n": n_top, "p_max": 6,
                    "levels": list(range(1, n_top + 1))}]
        entries.append({"map": ins.random_bogoliubov(rng), "subspace": None,
                        "n": 2, "p_max": 3})
        Hf, Uf = ins.flip_twisted_module()
        entries.append({"map": Uf, "subspace": None, "n": 1, "p_max": 2})
    for entry in entries:
        bog = entry["map"]
        rep = bg.validate_bogoliubov(bog, rng, tol=st.tol)
        rep.seed = st.seed
        reports.append(rep)
        if not rep.passed:
            continue
        n = entry["n"]
        F = fk.FockSpace(bog.module, max(n, st.N(n)), dim_cap=st.dim_cap)
        _, erep = bg.fock_extension(F, bog, tol=st.tol)
        erep.seed = st.seed
        reports.append(erep)
        aug = augment(bog.module)
        bog_t = bg.augmented_bogoliubov(aug, bog)
        Ft = fk.FockSpace(aug.module, min(F.N, 3), dim_cap=st.dim_cap)
        _, arep = bg.fock_extension(Ft, bog_t, xi=aug.xi, tol=st.tol)
        arep.seed = st.seed
        reports.append(arep)
        span = entry["subspace"]
        if span is None:
            span = submodule_projection(
                [bog.module.basis()[0], bog.module.basis()[-1]])
        _, krep = bg.kp_subspace(bog, span, entry["p_max"], tol=st.tol)
        krep.seed = st.seed
        reports.append(krep)
        if n <= F.N:
            spanp, _ = bg.kp_subspace(bog, span, min(2, entry["p_max"]),
                                      tol=st.tol)
            _, crep = bg.compression_channels(F, n, spanp, rng, tol=st.tol)
            crep.seed = st.seed
            reports.append(crep)
        for level in entry.get("levels", [n]):
            er = bg.entropy_bound_report(F, bog, span, level,
                                         entry["p_max"], rng, tol=st.tol)
            grep = er.to_report()
            grep.seed = st.seed
            reports.append(grep)
    return reports


RUNNERS = {
    "fock": run_fock,
    "ideal": run_ideal,
    "factorization": run_factorization,
    "toeplitz": run_toeplitz,
    "crossed": run_crossed,
    "free": run_free,
    "amalg": run_amalg,
    "bog": run_bog,
}


def run_suites(ctx, names, st):
    reports = []
    for name in names:
        reports.extend(RUNNERS[name](ctx, st))
    return reports


def emit(reports, fmt, out, elapsed):
    passed = all(r.passed for r in reports)
    if fmt == "json":
        payload = {"passed": passed, "elapsed_seconds": round(elapsed, 3),
                   "reports": [r.as_dict() for r in reports]}
        text = json.dumps(payload, indent=2, default=_jsonable)
    else:
        blocks = [r.to_text() for r in reports]
        blocks.append(f"overall: {'PASS' if passed else 'FAIL'}"
                      f" ({len(reports)} reports, {elapsed:.1f}s)")
        text = "\n\n".join(blocks)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return passed


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    try:
        return float(obj)
    except (TypeError, ValueError):
        return str(obj)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fockmod",
        description="Verify bimodule, Fock-space, crossed-product, "
                    "free-product and twisted-map identities numerically.")
    parser.add_argument("--instance", help="JSON instance file")
    parser.add_argument("--suite", default="all",
                        choices=SUITES + ("all",),
                        help="which verification suite to run")
    parser.add_argument("--truncation", type=int, default=None,
                        help="Fock truncation level override")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="residual tolerance")
    parser.add_argument("--seed", type=int, default=0,
                        help="random seed for sampled checks")
    parser.add_argument("--max-word-length", type=int, default=5,
                        help="word length budget for moment checks")
    parser.add_argument("--format", dest="fmt", default="text",
                        choices=("text", "json"), help="report format")
    parser.add_argument("--out", help="write the report to this path")
    args = parser.parse_args(argv)

    try:
        ctx = None
        st = Settings(truncation=args.truncation, tol=args.tol,
                      seed=args.seed, max_word_length=args.max_word_length)
        if args.instance:
            data = parse_instance(args.instance)
            ctx = build_instance(data)
            params = ctx["parameters"]
            if args.truncation is None and "truncation" in params:
                st.truncation = int(params["truncation"])
            st.tol = float(params.get("tol", st.tol))
            if "seed" in params and args.seed == 0:
                st.seed = int(params["seed"])
            st.max_word_length = int(params.get("max_word_length",
                                                st.max_word_length))
            st.dim_cap = int(params.get("dim_cap", st.dim_cap))
        names = SUITES if args.suite == "all" else (args.suite,)
        t0 = time.time()
        reports = run_suites(ctx, names, st)
        passed = emit(reports, args.fmt, args.out, time.time() - t0)
        return EXIT_PASS if passed else EXIT_FAIL
    except InstanceError as exc:
        for line in exc.errors:
            print(f"instance error: {line}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PreconditionError, StructureError) as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
