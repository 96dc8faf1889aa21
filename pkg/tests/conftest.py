import copy
import sys

import pytest

from adfd.model import load_diagram, load_specification

from generators import DATA, load_fixture_documents


@pytest.fixture(scope="session")
def documents():
    return load_fixture_documents()


@pytest.fixture
def spec_doc(documents):
    return copy.deepcopy(documents[0])


@pytest.fixture
def model_doc(documents):
    return copy.deepcopy(documents[1])


@pytest.fixture(scope="session")
def spec(documents):
    return load_specification(documents[0])


@pytest.fixture(scope="session")
def diagram(documents, spec):
    return load_diagram(documents[1], spec)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda text: int(text.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
