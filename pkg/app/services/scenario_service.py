"""Service for running scenarios, sweeps and the demo."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from pydantic import ValidationError
from tqdm import tqdm

from app import config
from app.core.errors import HypothesisUnmetError, InputError, ScenarioError
from app.core.functions import GridFunction, make_ball_family, make_lagrange_family, sample
from app.db.models import (
    BallFamilySpec,
    InequalitySpec,
    LagrangeFamilySpec,
    QuadratureConfig,
    Scenario,
)
from app.scenario.loader import load_scenario, set_path, validate
from app.services.hypothesis_service import HypothesisService
from app.services.inequality_service import InequalityService
from app.services.search_service import SearchService
from app.utils.formatting import CSV_COLUMNS, csv_row, to_csv, to_json, write_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_HYPOTHESIS_UNMET = 2
EXIT_INPUT_ERROR = 3

DEMO_SCENARIO: Dict[str, Any] = {
    "schema_version": 1,
    "name": "demo: phi(t) = exp(-t) on [0, 1], complex suite",
    "interval": {"a": 0.0, "b": 1.0},
    "family": {
        "family": "lagrange",
        "psi": {"kind": "linear", "coefficients": [0.0, 1.0]},
        "theta": 0.0,
        "Theta": 1.0,
    },
    "hypotheses": [{"kind": "pairwise-gammaGamma", "gamma": 1.0, "Gamma": math.e}],
    "inequalities": [{"id": "complex_suite"}],
}


@dataclass
class Overrides:
    """Per-invocation settings from the command line."""

    grid: Optional[int] = None
    tol_ineq: Optional[float] = None
    tol_hyp: Optional[float] = None
    format: Optional[str] = None
    out: Optional[str] = None
    seed: Optional[int] = None


@dataclass
class RunResult:
    exit_code: int
    report: Dict[str, Any]


def _outcome(entry: Dict[str, Any]) -> str:
    return "satisfied" if entry["satisfied"] else "violated"


class ScenarioService:
    """Service for executing declarative scenarios."""

    def __init__(self, show_progress: Optional[bool] = None):
        self.show_progress = config.SHOW_PROGRESS if show_progress is None else show_progress

    # Construction

    def build_function(self, scenario: Scenario, N: int) -> Tuple[GridFunction, Dict[str, Any]]:
        """Sample the family and collect the parameter defaults it implies."""
        family = scenario.family
        a, b = scenario.interval.a, scenario.interval.b
        if isinstance(family, LagrangeFamilySpec):
            f, gamma, Gamma = make_lagrange_family(family, N)
            return f, {"m": gamma, "M": Gamma, "gamma": gamma, "Gamma": Gamma, "e": [1.0]}
        if isinstance(family, BallFamilySpec):
            return make_ball_family(family, a, b, N), {"e": family.e, "rho": family.rho}
        return sample(family, a, b, N), {}

    @staticmethod
    def _with_defaults(spec, defaults: Dict[str, Any], fields: Tuple[str, ...]):
        update = {k: v for k, v in defaults.items() if k in fields and getattr(spec, k, None) is None}
        return spec.model_copy(update=update) if update else spec

    def _quadrature(self, scenario: Scenario, overrides: Overrides) -> QuadratureConfig:
        N = overrides.grid if overrides.grid is not None else scenario.grid.N
        try:
            return QuadratureConfig(rule=scenario.grid.rule, N=N)
        except ValidationError as e:
            raise InputError(f"Invalid grid: {e.errors()[0]['msg']}")

    # Scenario execution

    def run(self, scenario: Scenario, overrides: Optional[Overrides] = None) -> RunResult:
        """Build the family, check hypotheses, evaluate inequalities and run the search.

        Exit code: 0 all satisfied, 1 some violated, 2 some hypothesis unmet;
        input errors propagate to the caller.
        """
        overrides = overrides or Overrides()
        cfg = self._quadrature(scenario, overrides)
        tol_hyp = overrides.tol_hyp if overrides.tol_hyp is not None else scenario.tolerances.tol_hyp
        tol_ineq = overrides.tol_ineq if overrides.tol_ineq is not None else scenario.tolerances.tol_ineq
        hypotheses = HypothesisService(tol_hyp)
        inequalities = InequalityService(tol_ineq, hypotheses)

        logger.info(f"Running scenario {scenario.name or '<unnamed>'} with N={cfg.N}, rule={cfg.rule}")
        f, defaults = self.build_function(scenario, cfg.N)
        exit_code = EXIT_OK

        hypothesis_entries = []
        for spec in scenario.hypotheses:
            spec = self._with_defaults(spec, defaults, ("e",))
            report = hypotheses.check(f, spec)
            hypothesis_entries.append(report.model_dump())
            if not report.holds:
                logger.info(f"Declared hypothesis {spec.kind} fails (worst margin {report.worst_margin:.3e})")
                exit_code = max(exit_code, EXIT_HYPOTHESIS_UNMET)

        entries: Dict[str, Dict[str, Any]] = {}
        for spec in scenario.inequalities:
            spec = self._with_defaults(spec, defaults, tuple(InequalitySpec.model_fields))
            try:
                reports = inequalities.evaluate(f, spec, cfg)
            except HypothesisUnmetError as e:
                entries[self._key(entries, spec.id)] = {
                    "id": spec.id, "outcome": "hypothesis-unmet", "hypothesis": e.report.model_dump(),
                }
                exit_code = max(exit_code, EXIT_HYPOTHESIS_UNMET)
                continue
            for report in reports:
                entry = report.model_dump()
                entry["outcome"] = _outcome(entry)
                entries[self._key(entries, report.id)] = entry
                if not report.satisfied:
                    exit_code = max(exit_code, EXIT_VIOLATED)

        search_entry = None
        if scenario.search is not None:
            search_spec = scenario.search
            if overrides.seed is not None:
                search_spec = search_spec.model_copy(update={"seed": overrides.seed})
            searcher = SearchService(inequalities, self.show_progress)
            result = searcher.maximize_relative_gap(search_spec, cfg, scenario.interval.a, scenario.interval.b)
            search_entry = result.model_dump()

        report = {
            "schema_version": 1,
            "name": scenario.name,
            "interval": scenario.interval.model_dump(),
            "grid": {"N": cfg.N, "rule": cfg.rule},
            "tolerances": {"tol_hyp": tol_hyp, "tol_ineq": tol_ineq},
            "hypotheses": hypothesis_entries,
            "inequalities": entries,
            "search": search_entry,
            "exit_code": exit_code,
        }
        logger.info(f"Scenario finished with exit code {exit_code}")
        return RunResult(exit_code, report)

    @staticmethod
    def _key(entries: Dict[str, Any], inequality_id: str) -> str:
        key, n = inequality_id, 2
        while key in entries:
            key = f"{inequality_id}#{n}"
            n += 1
        return key

    def render(self, report: Dict[str, Any], fmt: str) -> str:
        if fmt == "json":
            return to_json(report)
        rows = [csv_row(entry) for entry in report["inequalities"].values()]
        return to_csv(rows)

    def run_scenario(self, path: str, overrides: Optional[Overrides] = None) -> int:
        """Load, run and emit one scenario. Returns the process exit code."""
        overrides = overrides or Overrides()
        _, scenario = load_scenario(path)
        result = self.run(scenario, overrides)
        fmt = overrides.format or scenario.output.format
        write_output(self.render(result.report, fmt), overrides.out or scenario.output.path)
        return result.exit_code

    def sweep(self, path: str, overrides: Optional[Overrides] = None) -> int:
        """Run a scenario once per value of its single sweep parameter, in ascending order."""
        overrides = overrides or Overrides()
        raw, scenario = load_scenario(path)
        if len(scenario.sweep) != 1:
            raise ScenarioError(f"sweep needs exactly one sweep parameter, got {len(scenario.sweep)}", path)
        sweep = scenario.sweep[0]
        if not sweep.values:
            raise ScenarioError(f"sweep {sweep.name} has an empty range", path)

        exit_code = EXIT_OK
        rows = []
        runs = []
        base = {k: v for k, v in raw.items() if k != "sweep"}
        for value in tqdm(sorted(sweep.values), desc=sweep.name, disable=not self.show_progress):
            point = base
            for target in sweep.targets:
                point = set_path(point, target, value)
            result = self.run(validate(point, path), overrides)
            exit_code = max(exit_code, result.exit_code)
            runs.append({"value": value, "report": result.report})
            rows.extend(csv_row(entry, prefix=[value]) for entry in result.report["inequalities"].values())

        fmt = overrides.format or scenario.output.format
        if fmt == "json":
            text = to_json({"sweep": sweep.name, "targets": sweep.targets, "runs": runs, "exit_code": exit_code})
        else:
            text = to_csv(rows, header=[sweep.name] + CSV_COLUMNS)
        write_output(text, overrides.out or scenario.output.path)
        return exit_code

    def demo(self, overrides: Optional[Overrides] = None) -> int:
        """Lagrange family psi(u) = u on [0, 1] through the complex suite.

        Prints a summary on stdout and writes the JSON report. Below the
        default grid the inequality tolerance grows like (N_default / N)^4.
        """
        overrides = overrides or Overrides()
        scenario = validate(DEMO_SCENARIO, "<demo>")
        N = overrides.grid if overrides.grid is not None else config.DEFAULT_GRID_N
        tol_ineq = overrides.tol_ineq if overrides.tol_ineq is not None else config.TOL_INEQ
        if N < config.DEFAULT_GRID_N:
            tol_ineq *= (config.DEFAULT_GRID_N / N) ** 4
            logger.info(f"Coarse demo grid N={N}: tol_ineq scaled to {tol_ineq:.3g}")
        run_overrides = Overrides(grid=N, tol_ineq=tol_ineq, tol_hyp=overrides.tol_hyp)
        result = self.run(scenario, run_overrides)

        print(self.summary(result))
        out = overrides.out or str(Path(config.REPORT_DIR) / "demo_report.json")
        write_output(to_json(result.report), out)
        return result.exit_code

    @staticmethod
    def summary(result: RunResult) -> str:
        report = result.report
        lines = [
            f"{report['name']}",
            f"grid N={report['grid']['N']} ({report['grid']['rule']}), tol_ineq={report['tolerances']['tol_ineq']:.3g}",
        ]
        for key, entry in report["inequalities"].items():
            if entry["outcome"] == "hypothesis-unmet":
                lines.append(f"  {key:<28} hypothesis-unmet")
                continue
            lines.append(
                f"  {key:<28} lhs={entry['lhs']:.10f} rhs={entry['rhs']:.10f} "
                f"rel_gap={entry['rel_gap']:.3e} {entry['outcome']}"
            )
            for note in entry.get("notes", []):
                lines.append(f"    note: {note}")
        lines.append(f"exit code {result.exit_code}")
        return "\n".join(lines)
