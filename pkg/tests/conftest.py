import pytest

from teleo.models import sport_lab, sport_lab_confounded, stove_water
from teleo.specfmt import serialize_graph_spec


@pytest.fixture(scope="session")
def sport_doc():
    return sport_lab()


@pytest.fixture(scope="session")
def sport_model(sport_doc):
    return sport_doc.bind()


@pytest.fixture(scope="session")
def confounded_doc():
    return sport_lab_confounded()


@pytest.fixture(scope="session")
def stove_graph():
    return stove_water()


@pytest.fixture(scope="session")
def sport_spec_path(tmp_path_factory, sport_doc):
    path = tmp_path_factory.mktemp("specs") / "sport.spec"
    path.write_text(serialize_graph_spec(sport_doc), encoding="utf-8")
    return path
