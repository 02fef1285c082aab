from app.services.hypothesis_service import HypothesisService
from app.services.inequality_service import InequalityService
from app.services.search_service import SearchService
from app.services.scenario_service import ScenarioService
from app.services.main_service import MainService
