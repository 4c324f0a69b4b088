"""Evaluators and checkers for the facet-count bounds and their ingredients.

Large bounds are carried as base-10 logarithms (:class:`LogValue`); the main
facet bound overflows a double near n = 100.  Hypothesis failures come back as
reports with verdict ``"skipped"``; only direct evaluator calls raise
:class:`HypothesisViolated`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import polytope as pt
from .covering import CoveringBounds, CoveringCertificate
from .rng import RngStream, map_ordered, worker_count
from .sphere import (
    AEpsilonSpec,
    a_epsilon_lower_bound,
    cone_complement_radial,
    exact_cap_measure,
    in_A_epsilon,
    lemma5_bound_log10,
    sphere_block,
    union_lower_bound,
)

TAU = 1e-9
MIN_ACCEPTANCE = 1e-3
PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


class HypothesisViolated(ValueError):
    def __init__(self, condition: str, message: str | None = None):
        super().__init__(message or f"hypothesis violated: {condition}")
        self.condition = condition


class DegenerateRadius(HypothesisViolated):
    pass


class CertificateNotCertified(ValueError):
    pass


class SamplingAborted(RuntimeError):
    pass


@dataclass(frozen=True)
class LogValue:
    """A positive quantity stored as its base-10 logarithm."""

    log10: float

    @property
    def value(self) -> float | None:
        """The value as a float, or None when it is outside the double range."""
        if self.log10 > 308 or self.log10 < -307:
            return None
        return 10.0**self.log10


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    values: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, **self.values}


@dataclass
class VerificationReport:
    claim_id: str
    paper_anchor: str
    hypotheses: list[HypothesisCheck]
    lhs: Any
    rhs_log10: float | None
    verdict: str
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        out = {
            "id": self.claim_id,
            "paper_anchor": self.paper_anchor,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "lhs": self.lhs,
            "rhs_log10": self.rhs_log10,
            "verdict": self.verdict,
        }
        out.update(self.details)
        return out


def _log10_count(count) -> float:
    return math.log10(count) if count > 0 else -math.inf


# --------------------------------------------------------- theorem bound


def theorem_hypotheses(n: int, N, r: float) -> list[HypothesisCheck]:
    r_min = 3.0 * math.sqrt(3.0) / math.sqrt(n) if n > 0 else math.inf
    return [
        HypothesisCheck("n >= 3", n >= 3, {"n": n}),
        HypothesisCheck("3*sqrt(3)/sqrt(n) <= r <= 1", r_min <= r <= 1.0, {"r": r, "r_min": r_min}),
        HypothesisCheck("N >= 3", N >= 3, {"N": N}),
        HypothesisCheck("N < exp(n/8)", N >= 1 and math.log(N) < n / 8.0,
                        {"log_N": math.log(N) if N >= 1 else None, "n_over_8": n / 8.0}),
    ]


def _raise_failed(checks: list[HypothesisCheck]):
    for c in checks:
        if not c.passed:
            raise HypothesisViolated(c.name)


def epsilon_choice(n: int, N) -> float:
    """sqrt(4 log N / n), which lies in (0, 1/sqrt 2) when 3 <= N < e^{n/8}."""
    _raise_failed([c for c in theorem_hypotheses(n, N, 1.0) if c.name.startswith("N")])
    return math.sqrt(4.0 * math.log(N) / n)


def _theorem_rhs_log10(n: int, N, r: float) -> float:
    eps2 = 4.0 * math.log(N) / n
    h = r * math.sqrt(1.0 - eps2)
    return -0.5 * (n - 1) * math.log10(2.0 * (1.0 - h))


def theorem_rhs(n: int, N, r: float) -> LogValue:
    """(1 / (2 (1 - r sqrt(1 - 4 log N / n))))^{(n-1)/2}."""
    _raise_failed(theorem_hypotheses(n, N, r))
    return LogValue(_theorem_rhs_log10(n, N, r))


def assembly_bound(n: int, N, r: float) -> LogValue:
    """Intermediate facet bound (1 - 2/N) * h sqrt(n-1) / (2(1-h))^{(n-1)/2}, h = r sqrt(1-eps^2)."""
    eps = epsilon_choice(n, N)
    h = r * math.sqrt(1.0 - eps * eps)
    a_measure = 1.0 - 2.0 * math.exp(math.log(N) - 0.5 * n * eps * eps)
    return LogValue(math.log10(a_measure) - lemma5_bound_log10(n, h))


def proof_step_values(n: int, N) -> tuple[float, float]:
    """(1 - 2 e^{log N - n eps^2/2}, 1 - 2/N) at eps = epsilon_choice(n, N)."""
    eps = epsilon_choice(n, N)
    return 1.0 - 2.0 * math.exp(math.log(N) - 0.5 * n * eps * eps), 1.0 - 2.0 / N


def check_theorem_inputs(n: int, facet_count, r: float, n_low, n_up, provenance: str = "bounds") -> VerificationReport:
    """Compare a facet count with the bound at N_up (implied form) and at N_low (stronger)."""
    hyps = theorem_hypotheses(n, n_up, r)
    abstract_ok = 0.5 < r <= 1.0 and n_up >= 1 and math.log(n_up) <= n / 8.0
    details: dict[str, Any] = {
        "n": n,
        "r": r,
        "n_low": n_low,
        "n_up": n_up,
        "N_provenance": provenance,
        "abstract_form_hypotheses": abstract_ok,
        "lhs_log10": _log10_count(facet_count),
    }
    if not all(h.passed for h in hyps):
        return VerificationReport("theorem", "Theorem 1", hyps, facet_count, None, SKIPPED, details)
    rhs = _theorem_rhs_log10(n, n_up, r)
    lhs10 = _log10_count(facet_count)
    verdict = PASS if lhs10 > rhs else FAIL
    if n_low is not None and all(h.passed for h in theorem_hypotheses(n, n_low, r)):
        low = _theorem_rhs_log10(n, n_low, r)
        details["rhs_log10_at_n_low"] = low
        details["holds_at_n_low_stronger_than_claimed"] = lhs10 > low
    details["evaluated_at"] = "n_up"
    return VerificationReport("theorem", "Theorem 1", hyps, facet_count, rhs, verdict, details)


def check_theorem(P: pt.Polytope, N_bounds) -> VerificationReport:
    if isinstance(N_bounds, CoveringBounds):
        n_low, n_up = N_bounds.n_low, N_bounds.n_up
    else:
        n_low, n_up = N_bounds
    if n_up is None:
        hyp = HypothesisCheck("certified covering number", False, {"n_low": n_low})
        return VerificationReport("theorem", "Theorem 1", [hyp], len(P.facets), None, SKIPPED, {"n_low": n_low})
    provenance = "exact" if n_low == n_up else "bounds"
    return check_theorem_inputs(P.dim, len(P.facets), pt.inradius_at_origin(P), n_low, n_up, provenance)


# ------------------------------------------------ sandwich facet bound


def prop1_hypotheses(n: int, r: float, R: float = 1.0, tau: float = TAU) -> list[HypothesisCheck]:
    r_min = 1.0 / math.sqrt(n - 1) if n > 1 else math.inf
    return [
        HypothesisCheck("n >= 3", n >= 3, {"n": n}),
        HypothesisCheck("P inside B (circumradius <= 1)", R <= 1.0 + tau, {"circumradius": R}),
        HypothesisCheck("1/sqrt(n-1) <= r", r >= r_min, {"r": r, "r_min": r_min}),
        HypothesisCheck("r < 1", r < 1.0, {"r": r}),
    ]


def prop1_bound(n: int, r: float) -> LogValue:
    """(1 / (2 (1 - r)))^{(n-1)/2}."""
    if r >= 1.0:
        raise DegenerateRadius("r < 1", "bound is undefined at r >= 1")
    _raise_failed([h for h in prop1_hypotheses(n, r) if h.name != "r < 1"])
    return LogValue(-0.5 * (n - 1) * math.log10(2.0 * (1.0 - r)))


def check_prop1(P: pt.PolytopeV, tau: float = TAU) -> VerificationReport:
    """min(|F|, |V|) against the sandwich bound, plus the dual body r P°."""
    n = P.dim
    r = pt.inradius_at_origin(P)
    R = pt.circumradius_at_origin(P)
    F = len(P.facets)
    V = len(P.extreme_points)
    hyps = prop1_hypotheses(n, r, R, tau)
    details: dict[str, Any] = {"n": n, "r": r, "circumradius": R, "facets": F, "vertices": V}
    if not all(h.passed for h in hyps):
        return VerificationReport("prop1", "Prop 1", hyps, min(F, V), None, SKIPPED, details)
    bound = prop1_bound(n, r).log10
    lhs10 = _log10_count(min(F, V))
    cap = exact_cap_measure(n, r)
    details["vertex_union_bound"] = V * cap
    details["vertex_union_bound_holds"] = V * cap >= 1.0 - tau
    # the facets of P are the vertices of Q = r P°, and rB ⊂ Q ⊂ B
    Q = pt.scale(pt.polar_dual(P.h), r)
    q_vertices = len(Q.extreme_points)
    details["dual_vertices"] = q_vertices
    details["dual_inradius"] = pt.inradius_at_origin(Q)
    details["dual_circumradius"] = pt.circumradius_at_origin(Q)
    dual_ok = (
        q_vertices == F
        and details["dual_circumradius"] <= 1.0 + 1e3 * tau
        and details["dual_inradius"] >= r - 1e3 * tau
    )
    details["dual_sandwich_holds"] = dual_ok
    ok = lhs10 >= bound - 1e-12 and details["vertex_union_bound_holds"] and dual_ok
    return VerificationReport("prop1", "Prop 1", hyps, min(F, V), bound, PASS if ok else FAIL, details)


# ---------------------------------------------------- sampled checks


def _sample_A_epsilon(
    spec: AEpsilonSpec,
    target: int,
    stream: RngStream,
    per_block: Callable[[np.ndarray, np.ndarray], dict],
) -> tuple[list[dict], int, int]:
    """Draw blocks until ``target`` directions fall in A_eps; reject the rest.

    Blocks are processed in index order and the stop rule looks only at the
    ordered prefix, so the result does not depend on the worker count.
    """
    workers = worker_count()
    stats: list[dict] = []
    drawn = accepted = 0
    k = 0
    while accepted < target:
        batch = list(range(k, k + workers))

        def run(i):
            theta = sphere_block(spec.dim, stream, i)
            mask = in_A_epsilon(theta, spec)
            return per_block(theta, mask)

        for s in map_ordered(run, batch, workers):
            stats.append(s)
            drawn += s["drawn"]
            accepted += s["accepted"]
            k += 1
            if accepted >= target:
                break
            if drawn >= target and accepted < MIN_ACCEPTANCE * drawn:
                raise SamplingAborted(
                    f"acceptance rate {accepted / drawn:.2e} below {MIN_ACCEPTANCE:g}; A_eps too thin"
                )
    return stats, drawn, accepted


def _first_witness(stats: list[dict], key: str = "witness"):
    for s in stats:
        if s.get(key) is not None:
            return s[key]
    return None


def _measure_checks(spec: AEpsilonSpec, n_centers: int, in_a: int, drawn: int, hyps_extra: dict) -> dict:
    n, eps = spec.dim, spec.epsilon
    mean = in_a / drawn
    stderr = math.sqrt(mean * (1.0 - mean) / drawn)
    union = union_lower_bound(n_centers, n, eps)
    eq2 = a_epsilon_lower_bound(n_centers, n, eps)
    out = {
        "sigma_A_eps": {"mean": mean, "stderr": stderr, "samples": drawn},
        "union_bound": union.value,
        "union_bound_vacuous": union.vacuous,
        "eq2_bound": eq2.value,
        "eq2_bound_vacuous": eq2.vacuous,
    }
    out["union_bound_holds"] = None if union.vacuous else mean >= union.value - 3.0 * stderr
    out["eq2_bound_holds"] = None if eq2.vacuous else mean >= eq2.value - 3.0 * stderr
    out.update(hyps_extra)
    return out


def _require_certified(cert: CoveringCertificate):
    if not cert.certified:
        raise CertificateNotCertified(f"covering certificate status is {cert.status!r}")


def check_prop3(K: pt.Polytope, cert: CoveringCertificate, eps: float, samples: int, stream: RngStream,
                tau: float = TAU) -> VerificationReport:
    """Radial function at most 1/sqrt(1-eps^2) on A_eps, and its measure bound.

    Only the cover matters here, not convexity of the covered set.
    """
    _require_certified(cert)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    H = K.h if isinstance(K, pt.PolytopeV) else K
    pt._require_origin_interior(H, tau)
    spec = AEpsilonSpec.from_centers(cert.centers, eps, dim=K.dim)
    limit = cone_complement_radial(eps)

    def per_block(theta, mask):
        rho = pt.radial(H, theta)
        bad = mask & (rho > limit + tau)
        return {
            "drawn": len(theta),
            "accepted": int(mask.sum()),
            "violations": int(bad.sum()),
            "max_radial_in_A": float(rho[mask].max()) if mask.any() else None,
            "small_radial": int(np.count_nonzero(rho <= limit)),
            "witness": theta[np.argmax(bad)].tolist() if bad.any() else None,
        }

    stats, drawn, accepted = _sample_A_epsilon(spec, samples, stream, per_block)
    violations = sum(s["violations"] for s in stats)
    max_rho = max((s["max_radial_in_A"] for s in stats if s["max_radial_in_A"] is not None), default=None)
    small = sum(s["small_radial"] for s in stats)
    frac = small / drawn
    frac_se = math.sqrt(frac * (1.0 - frac) / drawn)
    measure_bound = a_epsilon_lower_bound(len(cert.centers), K.dim, eps)

    hyps = [
        HypothesisCheck("covering certified", True, {"centers": len(cert.centers)}),
        HypothesisCheck("0 in int(K)", True, {"inradius": pt.inradius_at_origin(H)}),
        HypothesisCheck("0 < eps < 1", True, {"eps": eps}),
    ]
    details = _measure_checks(spec, len(cert.centers), accepted, drawn, {})
    details.update({
        "radial_limit": limit,
        "accepted_samples": accepted,
        "pointwise_violations": violations,
        "max_radial_in_A": max_rho,
        "witness": _first_witness(stats),
        "fraction_small_radial": {"mean": frac, "stderr": frac_se, "samples": drawn},
        "measure_bound": measure_bound.value,
        "measure_bound_vacuous": measure_bound.vacuous,
        "seed": stream.seed,
        "stream": stream.name,
    })
    measure_ok = measure_bound.vacuous or frac >= measure_bound.value - 3.0 * frac_se
    details["measure_check"] = "skipped (vacuous bound)" if measure_bound.vacuous else measure_ok
    ok = violations == 0 and measure_ok
    for key in ("union_bound_holds", "eq2_bound_holds"):
        ok = ok and details[key] is not False
    return VerificationReport("prop3", "Prop 3", hyps, max_rho, math.log10(limit), PASS if ok else FAIL, details)


def check_prop4(P: pt.Polytope, cert: CoveringCertificate, eps: float, samples: int, stream: RngStream,
                tau: float = TAU) -> VerificationReport:
    """Normal of the facet hit along theta lies in the cap of height r sqrt(1-eps^2) about theta.

    Also checks the net form: the facet normals' caps at that height cover
    every sampled direction of A_eps.
    """
    _require_certified(cert)
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    H = P.h if isinstance(P, pt.PolytopeV) else P
    pt._require_origin_interior(H, tau)
    r = pt.inradius_at_origin(H)
    height = r * math.sqrt((1.0 - eps) * (1.0 + eps))
    normals = np.array([f.normal for f in P.facets])
    spec = AEpsilonSpec.from_centers(cert.centers, eps, dim=P.dim)

    def per_block(theta, mask):
        th = theta[mask]
        if len(th) == 0:
            return {"drawn": len(theta), "accepted": 0, "violations": 0, "net_violations": 0,
                    "min_inner": None, "witness": None}
        idx = pt.facet_index_at_direction(P, th)
        proj = th @ normals.T
        inner = proj[np.arange(len(th)), idx]
        bad = inner < height - tau
        net_bad = proj.max(axis=1) < height - tau
        return {
            "drawn": len(theta),
            "accepted": len(th),
            "violations": int(bad.sum()),
            "net_violations": int(net_bad.sum()),
            "min_inner": float(inner.min()),
            "witness": th[np.argmax(bad)].tolist() if bad.any() else None,
        }

    stats, drawn, accepted = _sample_A_epsilon(spec, samples, stream, per_block)
    violations = sum(s["violations"] for s in stats)
    net_violations = sum(s["net_violations"] for s in stats)
    min_inner = min((s["min_inner"] for s in stats if s["min_inner"] is not None), default=None)
    hyps = [
        HypothesisCheck("covering certified", True, {"centers": len(cert.centers)}),
        HypothesisCheck("r B inside P, r > 0", r > tau, {"r": r}),
        HypothesisCheck("0 < eps < 1", True, {"eps": eps}),
    ]
    details = _measure_checks(spec, len(cert.centers), accepted, drawn, {})
    details.update({
        "cap_height": height,
        "accepted_samples": accepted,
        "pointwise_violations": violations,
        "net_violations": net_violations,
        "min_inner_product": min_inner,
        "witness": _first_witness(stats),
        "facets": len(normals),
        "seed": stream.seed,
        "stream": stream.name,
    })
    ok = violations == 0 and net_violations == 0
    for key in ("union_bound_holds", "eq2_bound_holds"):
        ok = ok and details[key] is not False
    return VerificationReport("prop4", "Prop 4", hyps, min_inner, None, PASS if ok else FAIL, details)


# ----------------------------------------------- r = 1 simplification


def remark6_bound(n: int, N) -> LogValue:
    """(n / (8 log N))^{(n-1)/2}, the r = 1 simplification."""
    _raise_failed([c for c in theorem_hypotheses(n, N, 1.0) if c.name.startswith("N")])
    return LogValue(0.5 * (n - 1) * math.log10(n / (8.0 * math.log(N))))


def remark6_asymptotic(n: int, N, delta: float) -> LogValue:
    """(1 / (2 delta + 4 log N / n))^{(n-1)/2} for inradius r = 1 - delta."""
    return LogValue(-0.5 * (n - 1) * math.log10(2.0 * delta + 4.0 * math.log(N) / n))


def remark6_consistency(n: int, N) -> VerificationReport:
    hyps = [c for c in theorem_hypotheses(n, N, 1.0) if c.name.startswith("N")]
    details = {"n": n, "N": N}
    if not all(h.passed for h in hyps):
        return VerificationReport("remark6", "Remark 6", hyps, None, None, SKIPPED, details)
    lhs = remark6_bound(n, N).log10
    rhs = _theorem_rhs_log10(n, N, 1.0)
    details["remark6_log10"] = lhs
    verdict = PASS if lhs <= rhs + 1e-12 else FAIL
    return VerificationReport("remark6", "Remark 6", hyps, lhs, rhs, verdict, details)
