import atexit
import shutil
import tempfile
import unittest
from pathlib import Path

import wrapt

from .configuration import config


def _use_tempdir():
    config.is_test = True
    tempdir = Path(tempfile.mkdtemp())
    config.set_logs_dir(tempdir / "logs")
    atexit.register(shutil.rmtree, tempdir, True)
    return tempdir


class FoxPopTest(unittest.TestCase):
    _multiprocess_can_split_ = True

    def setUp(self):
        self.tempdir = _use_tempdir()
        self.extra_setup()

    def extra_setup(self):
        pass

    def test_setup_clean(self):
        self.assertTrue(config.is_test)
        self.assertEqual(config.logs_dir, self.tempdir / "logs")


@wrapt.decorator
def foxpoptest(wrapped, instance, args, kwargs):
    _use_tempdir()
    return wrapped(*args, **kwargs)
