from __future__ import annotations

import math

import pytest
from fastapi.testclient import TestClient

from waylimit.main import app


@pytest.fixture
def client() -> TestClient:
    return TestClient(app)


class TestService:
    def test_health_reports_tolerances(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["bound_slack"] == pytest.approx(1e-7)
        assert body["fidelity_grid"] == [64, 128]

    def test_root_lists_endpoints(self, client):
        assert "verify" in client.get("/").json()["endpoints"]

    def test_requests_are_logged(self, client, capsys):
        client.get("/health")
        err = capsys.readouterr().err
        assert "INFO: http request" in err
        assert "'path': '/health'" in err
        assert "'status_code': 200" in err

    def test_client_errors_log_a_warning(self, client, capsys):
        client.post("/bounds", json={"theta": 4.0, "psi": 1.0, "sigma": 1.0})
        err = capsys.readouterr().err
        assert "WARNING: http request" in err
        assert "'status_code': 422" in err


class TestBoundsRoutes:
    def test_report(self, client):
        response = client.post("/bounds", json={"theta": math.pi, "psi": math.pi / 4, "sigma": 1.0})
        assert response.status_code == 200
        assert response.json()["bound_main"] == pytest.approx(0.125)

    def test_rejects_angle_out_of_range(self, client):
        response = client.post("/bounds", json={"theta": 4.0, "psi": 1.0, "sigma": 1.0})
        assert response.status_code == 422

    def test_sweep(self, client):
        response = client.post("/bounds/sweep", json={"theta": 1.0, "sigma": 0.5, "points": 3})
        assert response.status_code == 200
        assert [row["psi"] for row in response.json()] == pytest.approx([0.0, math.pi / 4, math.pi / 2])

    def test_sweep_needs_two_points(self, client):
        response = client.post("/bounds/sweep", json={"theta": 1.0, "sigma": 0.5, "points": 1})
        assert response.status_code == 422


class TestVerifyRoutes:
    def test_runs_suite(self, client):
        response = client.post("/verify", json={"suite": "normformula", "samples": 3, "seed": 2})
        assert response.status_code == 200
        body = response.json()
        assert body["passed"] is True
        assert len(body["checks"]) == 4

    def test_unknown_suite(self, client):
        response = client.post("/verify", json={"suite": "nonsense"})
        assert response.status_code == 422
