from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from . import __version__
from .currents import monomial
from .errors import BadSpec, EngineError, PreconditionViolated
from .lelong import lelong_number, theta_independence_check
from .monge_ampere import ProductFactor, bracket_power, generalized_product, ma_power
from .oracle import OracleCheck, OracleRow, OracleSettings, compare_to_symbolic
from .projective import (
    MetricSpec,
    chern_current,
    degeneracy_locus,
    induced_weight,
    naive_segre_current,
    segre_current,
    segre_product,
    smooth_segre_check,
)
from .scenario import INDUCED_WEIGHT, Request, ScenarioFile, render_request, render_scenario
from .types import Current, NamedForm, ThetaSym
from .weights import Weight

LOGGER = logging.getLogger(__name__)


@dataclass
class RequestResult:
    label: str
    status: str  # ok | fail | error
    output: str = ""
    rule: str = ""
    oracle: Optional[OracleRow] = None


@dataclass
class Report:
    engine_version: str
    scenario_echo: str
    results: List[RequestResult] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r.status != "ok" for r in self.results)

    @property
    def oracle_rows(self) -> List[OracleRow]:
        return [r.oracle for r in self.results if r.oracle is not None]


def run_scenario(scenario: ScenarioFile, settings: Optional[OracleSettings] = None) -> Report:
    runner = _Runner(scenario, settings or OracleSettings())
    report = Report(engine_version=__version__, scenario_echo=render_scenario(scenario))
    for req in scenario.requests:
        report.results.append(runner.run(req))
    return report


class _Runner:
    def __init__(self, scenario: ScenarioFile, settings: OracleSettings) -> None:
        self.s = scenario
        self.settings = settings
        self.names = scenario.coord_names

    def run(self, req: Request) -> RequestResult:
        label = render_request(req, self.names)
        LOGGER.info("running %s", label)
        try:
            return self._dispatch(req, label)
        except EngineError as exc:
            LOGGER.debug("%s failed: %s", label, exc)
            return RequestResult(label=label, status="error", output=str(exc), rule=exc.rule)

    def _dispatch(self, req: Request, label: str) -> RequestResult:
        if req.kind == "lelong":
            assert req.target is not None and req.point is not None
            value = lelong_number(self.evaluate(req.target), req.point)
            return RequestResult(label, "ok", str(value))
        if req.kind == "oracle":
            return self._oracle(req, label)
        if req.kind == "theta_check":
            return self._theta_check(req, label)
        if req.kind == "smooth_check":
            return self._smooth_check(req, label)
        if req.kind == "degeneracy":
            locus = degeneracy_locus(self._metric())
            if not locus:
                text = "empty"
            elif locus[0].is_trivial():
                text = "whole base"
            else:
                text = " | ".join(c.render(self.names) for c in locus)
            return RequestResult(label, "ok", text)
        return RequestResult(label, "ok", self.evaluate(req).render(self.names))

    # currents

    def evaluate(self, req: Request) -> Current:
        s = self.s
        if req.kind == "ma":
            return ma_power(self._weight(req.weights[0]), req.k)
        if req.kind == "product":
            return generalized_product(self._product_factors(req))
        if req.kind == "bracket":
            u = self._weight(req.weights[0])
            return bracket_power(u, self._alpha(req.alpha, u), req.k)
        if req.kind == "segre":
            return segre_current(req.k, self._metric(), s.rules)
        if req.kind == "chern":
            return chern_current(req.k, self._metric(), s.rules)
        if req.kind == "segre_product":
            return segre_product(req.ks, self._metric(), s.rules)
        if req.kind == "naive_segre":
            return naive_segre_current(req.k, self._metric(), s.rules)
        raise BadSpec(f"{req.kind} does not produce a current")

    def _metric(self) -> MetricSpec:
        if self.s.metric is None:
            raise PreconditionViolated("the scenario declares no metric")
        return self.s.metric

    def _weight(self, name: str) -> Weight:
        if name == INDUCED_WEIGHT:
            metric = self._metric()
            return induced_weight(metric, 1, metric.ambient(1))
        return self.s.weights[name]

    def _product_factors(self, req: Request) -> List[ProductFactor]:
        weights = [self._weight(w) for w in req.weights]
        factors = max(w.ambient.factors for w in weights)
        ambient = self.s.ambient(factors)
        lifted = [w if w.ambient == ambient else w.lift(ambient) for w in weights]
        # written outer first; the recursion applies the innermost factor first
        return list(reversed(list(zip(lifted, req.sets))))

    def _alpha(self, alpha: Optional[str], u: Weight) -> Current:
        if alpha is None:
            alpha = self.s.theta_tag
        if alpha in (self.s.theta_tag, self.s.alt_theta_tag):
            return monomial(u.ambient, 1, smooth=[ThetaSym(1, alpha)])
        degree = self.s.forms[alpha]
        if degree != 1:
            raise BadSpec(f"alpha must be a (1,1) form; {alpha} has degree {degree}")
        return monomial(u.ambient, 1, smooth=[NamedForm(alpha, 1)])

    # checks

    def _oracle(self, req: Request, label: str) -> RequestResult:
        target = req.target
        assert target is not None and req.tolerance is not None
        if target.kind == "ma":
            u = self._weight(target.weights[0])
            check = OracleCheck(label, "ma", (u,), target.k, ma_power(u, target.k))
        elif target.kind == "product":
            factors = self._product_factors(target)
            if any(U is not None for _w, U in factors):
                raise PreconditionViolated("the slicing oracle only checks products over the default sets")
            check =OracleCheck(label, "product", tuple(w for w, _U in factors), len(factors), generalized_product(factors))
        else:
            metric = self._metric()
            if metric.kind != "conformal":
                raise PreconditionViolated("the Segre oracle needs a conformal metric e^{-w} Id")
            check = OracleCheck(
                label, "segre", (metric.weight,), target.k, segre_current(target.k, metric, self.s.rules), rank=metric.rank
            )
        row = compare_to_symbolic(check, req.tolerance, self.settings)
        text = (
            f"{'pass' if row.passed else 'FAIL'} numeric={row.value:.4f} error={row.error_estimate:.4f} "
            f"symbolic={row.symbolic_value} epsilon={row.epsilon:.3g} grid={row.grid}"
        )
        return RequestResult(label, "ok" if row.passed else "fail", text, oracle=row)

    def _theta_check(self, req: Request, label: str) -> RequestResult:
        alt = self.s.alt_rules
        if alt is None:
            raise PreconditionViolated("theta_check needs an alt_theta declaration")
        report = theta_independence_check(self._metric(), self.s.rules, alt, req.k)
        if report.ok:
            points = len({p for _q, p in report.values})
            return RequestResult(label, "ok", f"independent for k <= {req.k} at {points} points")
        text = "; ".join(
            f"{m.quantity} at {m.point.render(self.names)}: {m.value_a} vs {m.value_b}" for m in report.mismatches
        )
        return RequestResult(label, "fail", text)

    def _smooth_check(self, req: Request, label: str) -> RequestResult:
        report = smooth_segre_check(self._metric(), self.s.rules, req.k)
        parts = [f"s_{k} = {c.render(self.names)}" for k, c in enumerate(report.segre) if k]
        parts += [f"c_{k} = {c.render(self.names)}" for k, c in enumerate(report.chern) if k]
        if report.ok:
            return RequestResult(label, "ok", "; ".join(parts + ["identities hold"]))
        broken = [f"degree {k}: {c.render(self.names)}" for k, c in report.failures]
        broken += [f"decomposition m={m}: {c.render(self.names)}" for m, c in report.decomposition_failures]
        return RequestResult(label, "fail", "; ".join(parts + broken))
