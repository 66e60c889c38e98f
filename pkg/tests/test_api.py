import json

import pytest
from fastapi.testclient import TestClient

from conftest import FIXTURES, load_fixture
from toriclab.main import app
from toriclab.schemas.complements import certificate_to_json
from toriclab.services.complement import local_complement


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def germ_json(name: str) -> dict:
    return json.loads((FIXTURES / "germs" / f"{name}.json").read_text(encoding="utf-8"))


def test_health(client):
    res = client.get("/meta/health")
    assert res.status_code == 200
    assert res.json()["status"] == "ok"


def test_limits(client):
    assert "cap_cells" in client.get("/meta/limits").json()


def test_validate(client):
    res = client.post("/germs/validate", json={"germ": germ_json("p1xa1")})
    assert res.status_code == 200
    body = res.json()
    assert body["dim"] == 2 and body["base_dim"] == 1
    assert body["cones"] == 2
    assert body["affine"] is False


def test_mld(client):
    res = client.post("/germs/mld", json={"germ": germ_json("cyclic_5_12")})
    assert res.json() == {"scope": "fiber", "mld": "3/5", "minimizer": ["1/5", "2/5"]}


def test_check_ct(client):
    res = client.post("/germs/check-ct", json={"germ": germ_json("p1xa1"), "t": "3/2"})
    assert res.status_code == 200
    assert res.json()["witness"] == ["0", "1"]


def test_discrepancy(client):
    res = client.post("/germs/discrepancy", json={"germ": germ_json("p1xa1"), "e": ["1", "1"]})
    assert res.json() == {"e": ["1", "1"], "value": "2", "over_fiber": True}


def test_base_is_point(client):
    res = client.post("/germs/base-is-point", json={"germ": germ_json("p2_point")})
    assert res.json() == {"base_is_point": True}


def test_reduce_and_hyperplane(client):
    body = {"germ": germ_json("p1xa1"), "t": "1"}
    cert = client.post("/reductions/reduce", json=body).json()
    assert cert["kind"] == "reduction"
    res = client.post("/complements/hyperplane", json={**body, "certificate": cert})
    assert res.status_code == 200
    assert res.json()[0]["gamma_h"] == "1"


def test_alc(client):
    res = client.post("/reductions/alc", json={"germ": germ_json("cyclic_2_11")})
    assert res.status_code == 200
    assert res.json()["mld"] == "1"


def test_verify(client):
    cert = certificate_to_json(local_complement(load_fixture("p1xa1"), 1))
    res = client.post("/complements/verify", json={"germ": germ_json("p1xa1"), "certificate": cert})
    assert res.json() == {"kind": "complement", "ok": True, "clause": None}


# ============================================================
# CODES HTTP
# ============================================================

def test_input_error_is_422(client):
    res = client.post("/germs/check-ct", json={"germ": germ_json("p1xa1"), "t": "0"})
    assert res.status_code == 422
    assert res.json()["detail"]["code"] == "NONPOSITIVE_T"


def test_float_is_422(client):
    res = client.post("/germs/check-ct", json={"germ": germ_json("p1xa1"), "t": 0.5})
    assert res.status_code == 422


def test_invalid_germ_is_422(client):
    germ = germ_json("p1xa1")
    germ["pi"] = [[1, 0]]
    res = client.post("/germs/validate", json={"germ": germ})
    assert res.status_code == 422
    assert res.json()["detail"]["code"] == "SUPPORT_MISMATCH"


def test_negative_answer_is_409(client):
    res = client.post("/complements/local", json={"germ": germ_json("p1xa1"), "t": "3/2"})
    assert res.status_code == 409
    assert res.json()["detail"]["code"] == "CT_FAILS"


def test_cap_is_413(client):
    res = client.post("/complements/global", json={"germ": germ_json("p1_point"), "t": "1/2", "cap_index": 1})
    assert res.status_code == 413
