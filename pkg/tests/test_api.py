"""Тесты для API endpoints"""
from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

from app.config import Settings
from app.main import app

pytestmark = pytest.mark.integration

client = TestClient(app)

EXAMPLE_PARAMETERS = {"a": "1,1,0", "kappa": "0,0,0,1,0,2"}


@pytest.fixture
def example_document():
    """Документ Y(3, (1,1,0)) с κ = (0,0,0,1,0,2)"""
    response = client.post("/construct/bundle-yk", json={"parameters": EXAMPLE_PARAMETERS})
    assert response.status_code == 200
    return response.json()


@pytest.fixture
def blown_document(example_document):
    response = client.post("/blowup", json={"polytope": example_document, "face": ["F2", "F4", "G1"]})
    assert response.status_code == 200
    return response.json()


def test_health_check():
    """Тест health check endpoint"""
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert "timestamp" in data
    assert data["service"] == "masslinear-toolkit-api"


def test_construct(example_document):
    assert example_document["dim"] == 4
    assert len(example_document["facets"]) == 6
    assert example_document["facets"][4]["label"] == "G1"


def test_construct_accepts_kappa_symbol():
    parameters = {"a": "1,1,0", "κ": "0,0,0,1,0,2"}
    response = client.post("/construct/bundle-yk", json={"parameters": parameters})
    assert response.status_code == 200
    assert [f["kappa"] for f in response.json()["facets"]] == ["0", "0", "0", "1", "0", "2"]


def test_construct_unknown_family():
    response = client.post("/construct/dodecahedron", json={"parameters": {}})
    assert response.status_code == 422
    assert response.json()["error"] == "validation_error"


def test_construct_outside_chamber():
    parameters = {"a": "1,1,0", "kappa": "0,0,0,1,0,0"}
    response = client.post("/construct/bundle-yk", json={"parameters": parameters})
    assert response.status_code == 422
    assert response.json()["error"] == "outside_chamber"


def test_check_example(example_document):
    """H = (0,2,2,0): γ = (1,−1,−1,1,0,0), несущественна"""
    response = client.post("/check", json={"polytope": example_document, "functional": [0, 2, 2, 0]})
    assert response.status_code == 200
    report = response.json()
    assert report["mass_linear"]
    assert report["gamma"] == ["1", "-1", "-1", "1", "0", "0"]
    assert report["inessential"]
    assert report["classification"] is None


def test_check_with_classification(blown_document):
    request = {"polytope": blown_document, "functional": [0, 2, 2, 0], "classify": True}
    response = client.post("/check", json=request)
    assert response.status_code == 200
    report = response.json()
    assert report["inessential"] is False
    assert report["classification"]["type"] == "b"
    assert report["classification"]["trace"][0]["tag"] == "edge_type_Fij_G"


def test_check_non_smooth_polygon():
    """Вершина x = 0, x + 2y = 2 имеет определитель −2"""
    polytope = {
        "dim": 2,
        "facets": [
            {"normal": [-1, 0], "kappa": "0"},
            {"normal": [0, -1], "kappa": "0"},
            {"normal": [1, 2], "kappa": "2"},
        ],
    }
    response = client.post("/check", json={"polytope": polytope, "functional": [1, 0]})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "non_smooth"
    assert body["details"]["facets"]


def test_check_dimension_mismatch(example_document):
    response = client.post("/check", json={"polytope": example_document, "functional": [1, 0]})
    assert response.status_code == 422
    assert response.json()["error"] == "validation_error"


def test_classify(blown_document):
    response = client.post("/classify", json={"polytope": blown_document, "functional": [0, 2, 2, 0]})
    assert response.status_code == 200
    result = response.json()
    assert result["type"] == "b"
    assert result["terminal_essential"] is False


def test_barycenters():
    trapezoid = client.post("/construct/trapezoid", json={}).json()
    response = client.post("/barycenters", json={"polytope": trapezoid, "functional": [1, -1]})
    assert response.status_code == 200
    result = response.json()
    assert len(result["barycenters"]) == 3
    assert result["fully_mass_linear"]


def test_blowup_and_blowdown(blown_document):
    assert blown_document["facets"][-1]["label"] == "E1"
    response = client.post("/blowdown", json={"polytope": blown_document, "facet": "E1"})
    assert response.status_code == 200
    result = response.json()
    assert result["success"]
    assert result["face"] == ["F2", "F4", "G1"]
    assert len(result["polytope"]["facets"]) == 6


def test_blowdown_fails_on_fiber_facet(example_document):
    response = client.post("/blowdown", json={"polytope": example_document, "facet": 0})
    assert response.status_code == 200
    result = response.json()
    assert not result["success"]
    assert result["violation"]


def test_blowup_of_facet_is_rejected(example_document):
    response = client.post("/blowup", json={"polytope": example_document, "face": ["F1"]})
    assert response.status_code == 422


def test_mlspace():
    response = client.post("/mlspace/bundle-yk", json={"parameters": {"a": "1,1,0"}})
    assert response.status_code == 200
    space = response.json()
    assert space["family"] == "bundle-yk"
    assert len(space["basis"]) == 3


def test_mlspace_unknown_family():
    response = client.post("/mlspace/simplex", json={"parameters": {"n": "3"}})
    assert response.status_code == 422
    assert response.json()["error"] == "validation_error"


def test_facet_limit(example_document):
    """Многогранник с числом фасет больше MAX_FACETS отклоняется до проверки"""
    with patch("app.services.get_settings", return_value=Settings(MAX_FACETS=4)):
        response = client.post("/check", json={"polytope": example_document, "functional": [0, 2, 2, 0]})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "validation_error"
    assert body["details"] == {"facets": 6, "max_facets": 4}
