import pytest

from qsplit import fileio
from qsplit.cli import resolve_path


@pytest.fixture(scope="session")
def load_conn():
    return lambda name: fileio.load_connection(resolve_path(name))


@pytest.fixture(scope="session")
def load_mat():
    return lambda name: fileio.load_matrix(resolve_path(name))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
