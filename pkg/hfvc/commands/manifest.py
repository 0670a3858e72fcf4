from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import hfvc
from hfvc.utils import content_hash, dump_json


def now() -> str:
	return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class RunManifest:
	"""Provenance of one command run; written next to every artifact it produced."""

	command: str
	config_path: str | None = None
	seed: int | None = None
	version: str = hfvc.__version__
	config_hash: str | None = None
	started_at: str = field(default_factory=now)
	finished_at: str | None = None

	@classmethod
	def begin(cls, command: str, config_path=None, seed=None, config_hash=None, input_path=None) -> "RunManifest":
		if config_hash is None and input_path is not None:
			config_hash = file_hash(input_path)
		return cls(
			command=command,
			config_path=str(config_path) if config_path else None,
			seed=seed,
			config_hash=config_hash,
		)

	def finish(self) -> "RunManifest":
		self.finished_at = now()
		return self

	def to_dict(self) -> dict:
		return asdict(self)

	def to_json(self) -> str:
		return dump_json(self.to_dict())

	def write(self, path) -> Path:
		path = Path(path)
		path.write_text(self.to_json() + "\n")
		return path


def file_hash(path) -> str | None:
	try:
		return content_hash(Path(path).read_bytes())
	except OSError:
		return None
