import datetime
import logging
from dataclasses import asdict
from logging.handlers import RotatingFileHandler

from .configuration import config


class FakeLog:
    """Like a log object, but does nothing"""

    def fake_function(cls, *args, **kwargs):
        return

    def __getattr__(self, attr):
        return self.fake_function


def get_logger(name, level=logging.INFO):
    """Logger writing to a new rotating file ``<name>-<timestamp>.log`` in ``config.logs_dir``.

    Handlers left over from an earlier logger with the same name are closed first."""
    filename = "{}-{}.log".format(
        name,
        datetime.datetime.now().strftime("%Y%m%d-%H%M%S-%f"),
    )
    handler = RotatingFileHandler(
        config.logs_dir / filename,
        maxBytes=1e6,
        encoding="utf-8",
        backupCount=10,
    )
    handler.setFormatter(
        logging.Formatter("%(asctime)s %(levelname)s %(processName)s %(message)s")
    )
    logger = logging.getLogger(name)
    close_log(logger)
    logger.propagate = False
    logger.setLevel(level)
    logger.addHandler(handler)
    return logger


def log_parameters(log, params, init):
    """Record the complete model and initial-population settings of a run or sweep."""
    model = asdict(params)
    model["survival"] = params.survival.as_config()
    log.info("Model parameters: %s", model)
    log.info("Initial population: %s", asdict(init))


def close_log(log):
    """Detach log handlers; flush to disk"""
    handlers = log.handlers[:]
    for handler in handlers:
        handler.close()
        log.removeHandler(handler)
