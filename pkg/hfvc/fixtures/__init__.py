from pathlib import Path

FIXTURES_DIR = Path(__file__).parent


def fixture_path(name: str) -> Path:
	"""Path of a bundled scene fixture, e.g. ``fixture_path("diamond_lift")``."""
	return FIXTURES_DIR / f"{name}.json"
