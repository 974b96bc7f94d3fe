import os
from pathlib import Path

from platformdirs import PlatformDirs

from .filesystem import create_dir


class Config:
    """A singleton that stores process-wide configuration settings"""

    seed_variable = "FOXPOP_SEED"
    dir_variable = "FOXPOP_DIR"
    fallback_seed = 42
    is_test = False
    _logs_dir = None

    @property
    def default_seed(self):
        """Seed used when none is given on the command line.

        Read from the ``FOXPOP_SEED`` environment variable; default is ``42``."""
        seed = self.env_seed
        return self.fallback_seed if seed is None else seed

    @property
    def env_seed(self):
        """Seed from ``FOXPOP_SEED``, or ``None`` if unset."""
        value = os.getenv(self.seed_variable)
        if value is None or not value.strip():
            return None
        try:
            seed = int(value)
        except ValueError:
            raise ValueError(
                "{} must be an unsigned integer, got '{}'".format(
                    self.seed_variable, value
                )
            )
        if not 0 <= seed < 2**64:
            raise ValueError(
                "{} must fit in 64 unsigned bits, got {}".format(
                    self.seed_variable, seed
                )
            )
        return seed

    @property
    def workers(self):
        """Default size of the worker pool for sweeps and calibration."""
        return os.cpu_count() or 1

    @property
    def logs_dir(self):
        """Directory for log files. Created if missing.

        ``FOXPOP_DIR`` takes precedence over the platform user log directory."""
        if self._logs_dir is None:
            envvar = os.getenv(self.dir_variable)
            if envvar:
                self._logs_dir = Path(envvar).absolute() / "logs"
            else:
                self._logs_dir = Path(PlatformDirs("foxpop", "foxpop").user_log_dir)
        create_dir(self._logs_dir)
        return self._logs_dir

    def set_logs_dir(self, dirpath):
        self._logs_dir = Path(dirpath)


config = Config()
