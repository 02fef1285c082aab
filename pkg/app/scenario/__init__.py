from app.scenario.loader import load_scenario, parse_json, set_path, validate
