"""Main service for the inequality toolkit."""

import logging
from typing import Optional

from app import config
from app.services.hypothesis_service import HypothesisService
from app.services.inequality_service import InequalityService
from app.services.scenario_service import ScenarioService
from app.services.search_service import SearchService

logger = logging.getLogger(__name__)


class MainService:
    """Main service wiring the checkers, evaluators, search and scenario runner."""

    def __init__(self, tol_hyp: Optional[float] = None, tol_ineq: Optional[float] = None,
                 show_progress: Optional[bool] = None):
        """Initialize the main service.

        Args:
            tol_hyp: Hypothesis tolerance; defaults to INEQ_TOL_HYP
            tol_ineq: Inequality tolerance; defaults to INEQ_TOL_INEQ
            show_progress: tqdm bars for sweeps and search; defaults to INEQ_SHOW_PROGRESS
        """
        self.tol_hyp = config.TOL_HYP if tol_hyp is None else tol_hyp
        self.tol_ineq = config.TOL_INEQ if tol_ineq is None else tol_ineq
        self.show_progress = config.SHOW_PROGRESS if show_progress is None else show_progress

        # Initialize services
        self._hypothesis_service = None
        self._inequality_service = None
        self._search_service = None
        self._scenario_service = None

    @property
    def hypothesis_service(self) -> HypothesisService:
        """Get the hypothesis service.

        Returns:
            HypothesisService instance
        """
        if not self._hypothesis_service:
            self._hypothesis_service = HypothesisService(self.tol_hyp)
        return self._hypothesis_service

    @property
    def inequality_service(self) -> InequalityService:
        """Get the inequality service, sharing the hypothesis service.

        Returns:
            InequalityService instance
        """
        if not self._inequality_service:
            self._inequality_service = InequalityService(self.tol_ineq, self.hypothesis_service)
        return self._inequality_service

    @property
    def search_service(self) -> SearchService:
        """Get the search service.

        Returns:
            SearchService instance
        """
        if not self._search_service:
            self._search_service = SearchService(self.inequality_service, self.show_progress)
        return self._search_service

    @property
    def scenario_service(self) -> ScenarioService:
        """Get the scenario service.

        Returns:
            ScenarioService instance
        """
        if not self._scenario_service:
            self._scenario_service = ScenarioService(self.show_progress)
        return self._scenario_service
