from datetime import datetime, timedelta

import pytest
from fastapi.testclient import TestClient

import job_status
import main

EVEN_WEIGHT = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
FRAMED = [[0, 0], [0, 1], [1, 1]]


@pytest.fixture
def client(store):
    with TestClient(main.app) as client:
        yield client


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["schema_version"] == "1.0"


def test_verify_frameproof_code(client):
    response = client.post("/api/verify", json={"words": EVEN_WEIGHT})
    assert response.status_code == 200
    body = response.json()
    assert body["frameproof"] is True
    assert body["structural"]["ok"] is True


def test_verify_reports_witnesses(client):
    body = client.post("/api/verify", json={"words": FRAMED}).json()
    assert body["frameproof"] is False
    assert body["direct"]["coalition"] == [1, 3]
    assert body["direct"]["framed"] == 2
    assert body["structural"]["index"] == 2
    assert body["structural"]["reason"] == "covering"


def test_verify_general_t_skips_structural(client):
    body = client.post("/api/verify", json={"words": EVEN_WEIGHT, "t": 3}).json()
    assert body["frameproof"] is False
    assert body["structural"] is None


def test_verify_rejects_bad_symbols(client):
    response = client.post("/api/verify", json={"words": [[0, 0], [0, 2]]})
    assert response.status_code == 400
    assert response.json()["detail"].startswith("Invalid code")


def test_verify_upload(client):
    content = b"# framed\n2 2 3\n0 0\n0 1\n1 1\n"
    response = client.post("/api/verify/upload", files={"file": ("code.txt", content, "text/plain")})
    assert response.status_code == 200
    assert response.json()["frameproof"] is False


def test_verify_upload_parse_error(client):
    response = client.post("/api/verify/upload",
                           files={"file": ("bad.txt", b"2 2 2\n0 0\n0 2\n", "text/plain")})
    assert response.status_code == 400
    assert "line 3, column 3" in response.json()["detail"]


def test_verify_upload_non_ascii(client):
    response = client.post("/api/verify/upload",
                           files={"file": ("bad.txt", b"2 2 2\n0 0\n0 \xe9\n", "text/plain")})
    assert response.status_code == 400
    assert response.json()["detail"] == "bad.txt: line 3, column 3: non-ASCII byte 0xe9"


def test_analyze(client):
    body = client.post("/api/analyze", json={"words": [[0, 0, 0], [0, 1, 1], [1, 0, 1]]}).json()
    assert body["frameproof"] is True
    assert (body["d"], body["pivot"]) == (0, 1)
    assert len(body["profiles"]) == 3


def test_bounds(client):
    body = client.get("/api/bounds", params={"start": 7, "end": 8}).json()
    assert [row["best"] for row in body["rows"]] == [28, 53]
    assert client.get("/api/bounds", params={"start": 9, "end": 2}).status_code == 400


def test_chain_decomposition(client):
    body = client.get("/api/scd/1").json()
    assert body["chains"] == [[[], [1]]]
    assert client.get("/api/scd/17").status_code == 400


def test_search_job(client):
    job = client.post("/api/search", json={"n": 3, "q": 2, "budget": 10_000}).json()
    status = client.get(f"/api/search/status/{job['job_id']}").json()
    assert status["status"] == "completed"
    assert status["result"]["size"] == 4
    assert status["result"]["status"] == "optimal"


def test_failed_search_job(client):
    job = client.post("/api/search", json={"n": 30, "q": 2}).json()
    status = client.get(f"/api/search/status/{job['job_id']}").json()
    assert status["status"] == "failed"
    assert status["result"] is None


def test_starting_a_search_drops_stale_jobs(client):
    stale = job_status.create_job_status("search", {})
    job_status._status_store[stale]["created_at"] = (datetime.now() - timedelta(hours=30)).isoformat()
    client.post("/api/search", json={"n": 2, "q": 2, "budget": 1_000})
    assert client.get(f"/api/search/status/{stale}").status_code == 404


def test_unknown_job(client):
    assert client.get("/api/search/status/nope").status_code == 404


def test_certificate_lifecycle(client):
    stored = client.post("/api/oracles/maxfam/3").json()
    assert stored["optimum"] == 3
    assert stored["kind"] == "max-non2cov-sperner"
    certificate_id = stored["id"]

    assert client.get(f"/api/certificates/{certificate_id}").json()["optimum"] == 3
    assert [c["id"] for c in client.get("/api/certificates", params={"n": 3}).json()] == [certificate_id]
    assert client.get("/api/certificates", params={"kind": "max-code"}).json() == []

    assert client.delete(f"/api/certificates/{certificate_id}").json() == {"deleted": certificate_id}
    assert client.get(f"/api/certificates/{certificate_id}").status_code == 404
    assert client.delete(f"/api/certificates/{certificate_id}").status_code == 404


def test_maxfam_out_of_range(client):
    assert client.post("/api/oracles/maxfam/13").status_code == 400
