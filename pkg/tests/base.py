from foxpop import config
from foxpop.engine import InitParams, ModelParams
from foxpop.logs import FakeLog, close_log, get_logger, log_parameters
from foxpop.survival import SurvivalTable
from foxpop.tests import FoxPopTest, foxpoptest


@foxpoptest
def test_foxpoptest_decorator():
    assert config.is_test
    assert config.logs_dir.is_dir()


@foxpoptest
def test_logger_writes_to_logs_dir():
    log = get_logger("foxpop-test")
    log.info("hello")
    close_log(log)
    files = list(config.logs_dir.glob("foxpop-test-*.log"))
    assert len(files) == 1
    assert "hello" in files[0].read_text()


@foxpoptest
def test_log_parameters():
    log = get_logger("foxpop-params")
    log_parameters(log, ModelParams(SurvivalTable.uniform(0.5)), InitParams())
    close_log(log)
    (path,) = config.logs_dir.glob("foxpop-params-*.log")
    text = path.read_text()
    assert "'cub_f': 0.5" in text
    assert "'n0': 120" in text


@foxpoptest
def test_get_logger_replaces_handlers():
    first = get_logger("foxpop-twice")
    second = get_logger("foxpop-twice")
    assert first is second
    assert len(second.handlers) == 1
    close_log(second)
    assert second.handlers == []


def test_fake_log_swallows_calls():
    log = FakeLog()
    assert log.info("anything", 1, 2) is None
    assert log.warning("anything") is None


class FoxPopTestCaseTest(FoxPopTest):
    def extra_setup(self):
        self.extra = True

    def test_extra_setup_called(self):
        self.assertTrue(self.extra)
