"""The five verification suites behind `qmink check` and `qmink report-all`.

Suites are pure given their parameters and seed; `run_all` executes them
concurrently (they share only immutable presentations) and emits them in a
fixed order so reports are byte-stable.
"""

from __future__ import annotations

import math
import random
import time
from concurrent.futures import ThreadPoolExecutor

from . import cocycle as cc
from . import coact, oplab
from .dsl import builtin
from .ncalg import NCPolynomial, check_local_confluence, check_termination
from .reports import CheckResult, ReportBundle, SuiteReport

ACCEPTANCE_S_VALUES = (0.3, 0.7, 1.1)
ACCEPTANCE_PQ_PAIRS = ((1.0, 1.0), (2.0, 3.0), (0.5, math.e))
DEFAULT_TOL = 1e-12


def timed(fn):
    start = time.perf_counter()
    report = fn()
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report


def _symbolic_check(name, report) -> CheckResult:
    """Fold a MorphismReport (exact residual polynomials) into a CheckResult."""
    failures = report.failures()
    if not failures:
        return CheckResult(name, True, detail="exact")
    worst = failures[0]
    return CheckResult(name, False,
                       detail=f"{len(failures)} nonzero residuals; "
                              f"first at {worst.label}: {worst.rendered}")


def dual_strategy_agreement(pres, samples: int, seed: int, max_len: int = 8):
    """Normalize random words with the deterministic and a seeded random
    strategy; confluent presentations must agree exactly."""
    rng = random.Random(seed)
    n = len(pres.generators)
    mismatches = 0
    for k in range(samples):
        word = tuple(rng.randrange(n) for _ in range(rng.randint(0, max_len)))
        poly = NCPolynomial.word(word)
        nf_det = pres.normalize(poly)
        nf_rand = pres.normalize(poly, rng=random.Random(seed * 1000003 + k))
        if nf_det != nf_rand:
            mismatches += 1
    return mismatches


def run_presentation_suite(samples: int = 1000, seed: int = 0,
                           max_len: int = 8, presentations=None) -> SuiteReport:
    """Termination, local confluence, and the dual-strategy oracle.

    By default runs on the builtin quantum presentations; pass a dict of
    presentations (e.g. from a parsed user file) to check those instead.
    """
    if presentations is None:
        presentations = {name: builtin(name).presentation(name)
                         for name in ("lorentz", "minkowski")}
    checks = []
    for name, pres in presentations.items():
        term = check_termination(pres)
        checks.append(CheckResult(f"{name}: termination", term.ok,
                                  detail=f"{len(pres.rules)} rules"))
        pairs = check_local_confluence(pres)
        checks.append(CheckResult(f"{name}: local confluence", not pairs,
                                  detail=f"{len(pairs)} unresolved critical pairs"))
        bad = dual_strategy_agreement(pres, samples, seed, max_len)
        checks.append(CheckResult(
            f"{name}: dual-strategy normal forms", bad == 0,
            detail=f"{bad} disagreements over {samples} random words"))
    return SuiteReport("presentation", {"samples": samples, "max_len": max_len},
                       seed, checks)


def run_hopf_suite() -> SuiteReport:
    bundle = builtin("lorentz")
    delta = bundle.morphism("Delta")
    classical = builtin("classical").morphism("Delta")
    checks = [
        _symbolic_check("comultiplication preserves relations",
                        coact.check_relations_preserved(delta)),
        _symbolic_check("coassociativity on generators",
                        coact.check_cocommutativity_square(
                            delta, delta, ("a", "b", "c", "d"))),
        _symbolic_check("star-equivariance",
                        coact.check_star_equivariance(delta)),
        _symbolic_check("classical limit q = 1",
                        coact.classical_limit_compare(delta, classical)),
    ]
    return SuiteReport("hopf", {"algebra": "lorentz", "morphism": "Delta"},
                       None, checks)


def run_coaction_suite() -> SuiteReport:
    bundle = builtin("coaction")
    delta_h = bundle.morphism("DeltaH")
    delta = bundle.morphism("Delta")
    classical = builtin("classical").morphism("DeltaH")
    checks = [
        _symbolic_check("coaction preserves relations",
                        coact.check_relations_preserved(delta_h)),
        _symbolic_check("coaction identity on x, y, w",
                        coact.check_cocommutativity_square(
                            delta_h, delta, ("x", "y", "w"))),
        _symbolic_check("star-equivariance",
                        coact.check_star_equivariance(delta_h)),
        _symbolic_check("classical limit q = 1",
                        coact.classical_limit_compare(delta_h, classical)),
    ]
    return SuiteReport("coaction", {"algebra": "minkowski", "morphism": "DeltaH"},
                       None, checks)


def run_cocycle_suite(s_values=ACCEPTANCE_S_VALUES, samples: int = 10000,
                      seed: int = 0, tol: float = DEFAULT_TOL,
                      radius: float = 2.0) -> SuiteReport:
    checks = []
    for s in s_values:
        params = cc.CocycleParams(s)
        for result in (cc.check_cocycle_identity(params, samples, seed, radius),
                       cc.check_sumup(params, samples, seed, radius),
                       cc.check_omega_identity(params, samples, seed, radius)):
            for part, residual in result.parts:
                checks.append(CheckResult(f"{result.name}[{part}] (s={s})",
                                          residual < tol, residual=residual))
    return SuiteReport("cocycle",
                       {"s_values": list(s_values), "samples": samples,
                        "radius": radius, "tol": tol},
                       seed, checks)


def run_pq_suite(pairs=ACCEPTANCE_PQ_PAIRS, samples: int = 1000, seed: int = 0,
                 tol: float = DEFAULT_TOL, convention: str = "plain",
                 s_values=ACCEPTANCE_S_VALUES, box: float = 4.0) -> SuiteReport:
    checks = []
    for p, q in pairs:
        model = oplab.build_pq_pair(p, q)
        label = f"p={p:g}, q={q:g}"
        for result in (oplab.check_def_mu2(model, samples, seed, box),
                       oplab.check_QQstar(model, samples, seed, box),
                       oplab.check_twrs(model, samples, seed, box)):
            for ident, residual in result.residuals:
                checks.append(CheckResult(f"{result.name}: {ident} ({label})",
                                          residual < tol, residual=residual))
        contraction = max(
            oplab.op_norm_sample(oplab.z_transform(model.R), samples=samples,
                                 seed=seed, box=box),
            oplab.op_norm_sample(oplab.z_transform(model.S), samples=samples,
                                 seed=seed, box=box))
        checks.append(CheckResult(f"z-transform contraction ({label})",
                                  contraction < 1.0, residual=contraction))
    for s in s_values:
        result = oplab.check_symbolic_consistency(
            s, convention=convention, samples=samples, seed=seed, box=box)
        for ident, residual in result.residuals:
            checks.append(CheckResult(
                f"symbolic consistency: {ident} (s={s}, {convention})",
                residual < tol, residual=residual))
    return SuiteReport("pq",
                       {"pairs": [[p, q] for p, q in pairs], "samples": samples,
                        "tol": tol, "convention": convention, "box": box,
                        "s_values": list(s_values)},
                       seed, checks)


def run_all(samples: int = 1000, cocycle_samples: int = 10000, seed: int = 0,
            tol: float = DEFAULT_TOL, convention: str = "plain") -> ReportBundle:
    """Run the five suites (concurrently; deterministic emission order)."""
    jobs = (
        lambda: run_presentation_suite(samples=samples, seed=seed),
        run_hopf_suite,
        run_coaction_suite,
        lambda: run_cocycle_suite(samples=cocycle_samples, seed=seed, tol=tol),
        lambda: run_pq_suite(samples=samples, seed=seed, tol=tol,
                             convention=convention),
    )
    with ThreadPoolExecutor(max_workers=len(jobs)) as pool:
        futures = [pool.submit(timed, job) for job in jobs]
        reports = [f.result() for f in futures]
    return ReportBundle(reports, seed=seed)
