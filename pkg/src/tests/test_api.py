import unittest
from unittest.mock import patch

from fastapi.testclient import TestClient

from inelastic_maxwell.config.config import API_VERSION
from inelastic_maxwell.service.api import create_app
from inelastic_maxwell.service.service import ExperimentService


class TestAPI(unittest.TestCase):
    """Test the JSON API."""

    def setUp(self):
        self.client = TestClient(create_app(ExperimentService()))

    def test_health(self):
        response = self.client.get("/")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json(), {"status": "healthy", "version": API_VERSION})

    def test_coeffs(self):
        response = self.client.post("/coeffs", json={"e": 0.5})
        self.assertEqual(response.status_code, 200)
        self.assertAlmostEqual(response.json()["coefficients"]["cooling_rate"], -1.75, places=12)

    def test_coeffs_without_arguments(self):
        response = self.client.post("/coeffs", json={})
        self.assertEqual(response.status_code, 400)

    def test_w2(self):
        response = self.client.post(
            "/w2", json={"points_a": [[0.0, 0.0, 0.0]], "points_b": [[3.0, 4.0, 0.0]]}
        )
        self.assertEqual(response.status_code, 200)
        self.assertAlmostEqual(response.json()["w2"], 5.0, places=12)

    def test_w2_shape_mismatch(self):
        response = self.client.post(
            "/w2", json={"points_a": [[0.0, 0.0, 0.0]], "points_b": [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]}
        )
        self.assertEqual(response.status_code, 400)

    def test_moments(self):
        response = self.client.post("/moments", json={"e": 0.5, "m4_0": 15.0, "taus": [0.0]})
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertAlmostEqual(body["m4"][0], 15.0, places=12)
        self.assertAlmostEqual(body["fixed_point"], 135.0 / 7.0, places=10)

    def test_moments_validation(self):
        response = self.client.post("/moments", json={"e": 1.0, "m4_0": 15.0, "taus": [0.0]})
        self.assertEqual(response.status_code, 422)

    def test_unhealthy_service(self):
        with patch("inelastic_maxwell.service.api.ExperimentService", side_effect=Exception("boom")):
            client = TestClient(create_app())
        self.assertEqual(client.get("/").json()["status"], "unhealthy")
        self.assertEqual(client.post("/coeffs", json={"e": 0.5}).status_code, 500)


if __name__ == "__main__":
    unittest.main()
