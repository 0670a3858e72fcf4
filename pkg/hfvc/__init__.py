import logging
import os
import sys

__version__ = "1.0.0"
__title__ = "hfvc"

LOG_LEVEL_ENV = "HFVC_LOG_LEVEL"

_configured = False


def _configure_logging():
	global _configured
	if _configured:
		return

	root = logging.getLogger(__title__)
	level = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
	root.setLevel(getattr(logging, level, logging.WARNING))

	handler = logging.StreamHandler(sys.stderr)
	handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
	root.addHandler(handler)
	root.propagate = False
	_configured = True


def logger(module: str | None = None) -> logging.Logger:
	"""
	Return the package logger for `module`.

	:param module: short module name, e.g. "bench"; defaults to the package logger
	"""
	_configure_logging()
	name = f"{__title__}.{module}" if module else __title__
	return logging.getLogger(name)


def log_error(message: str, title: str | None = None):
	"""Record an error entry, optionally under a title."""
	entry = f"[{title}] {message}" if title else message
	logger("error").error(entry)


def throw(msg: str, exc: type[Exception] | None = None, **attrs):
	"""Raise `exc` (ValidationError by default) with `msg` and extra attributes set on the instance."""
	from hfvc.exceptions import ValidationError

	exc = exc or ValidationError
	error = exc(msg)
	for key, value in attrs.items():
		setattr(error, key, value)
	raise error
