from __future__ import annotations

import json

import pytest
import requests

from goalbench.model import canonical_serialize
from goalbench.server import create_server, parse_bind, start_background


@pytest.fixture(scope="module")
def service(signage):
    server = create_server(signage, "127.0.0.1", 0)
    start_background(server)
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


@pytest.fixture(scope="module")
def nfr_service(signage_nfr):
    server = create_server(signage_nfr, "127.0.0.1", 0)
    start_background(server)
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    server.server_close()


def test_model_endpoint_is_canonical_and_stable(service, signage):
    first = requests.get(f"{service}/api/model")
    second = requests.get(f"{service}/api/model")
    assert first.status_code == 200
    assert first.content == second.content
    assert first.content.decode() == canonical_serialize(signage)


def test_layout_endpoint(service):
    response = requests.get(f"{service}/api/layout")
    assert response.status_code == 200
    payload = response.json()
    assert {n["id"] for n in payload["nodes"]} >= {"T1", "G1", "G2", "G4"}


def test_propagate_endpoint_matches_oracle(service):
    response = requests.post(
        f"{service}/api/propagate",
        json={"profile": "Normal", "assignments": {"T1": "ToBe"}},
    )
    assert response.status_code == 200
    assert '"G2": {"attained_level": 82' in response.text
    payload = response.json()
    assert payload["nodes"]["G4"]["attained_level"] == pytest.approx(3.45)
    assert payload["nodes"]["G2"]["satisfied"] is True


def test_propagate_identical_requests_identical_bytes(service):
    body = {"profile": "Normal", "assignments": {"T1": "ToBe"}}
    first = requests.post(f"{service}/api/propagate", json=body)
    second = requests.post(f"{service}/api/propagate", json=body)
    assert first.content == second.content


def test_propagate_unknown_task_is_400(service):
    response = requests.post(
        f"{service}/api/propagate",
        json={"profile": "Normal", "assignments": {"T9": "ToBe"}},
    )
    assert response.status_code == 400
    assert response.json()["error"]["code"] == "invalid-scenario"


def test_propagate_out_of_domain_level_is_422(nfr_service):
    response = requests.post(
        f"{nfr_service}/api/propagate",
        json={"profile": "Normal", "assignments": {"T1N": 400}},
    )
    assert response.status_code == 422
    assert response.json()["error"]["code"] == "domain-violation"


def test_malformed_json_is_400(service):
    response = requests.post(
        f"{service}/api/propagate",
        data=b"{not json",
        headers={"Content-Type": "application/json"},
    )
    assert response.status_code == 400


def test_whatif_endpoint(service):
    response = requests.post(
        f"{service}/api/whatif",
        json={
            "base": {"profile": "Normal", "assignments": {"T1": "AsIs"}},
            "changed": {"profile": "Normal", "assignments": {"T1": "ToBe"}},
        },
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["nodes"]["G2"]["delta"] == pytest.approx(-18.0)


def test_montecarlo_endpoint_deterministic(service):
    body = {"profile": "Normal", "assignments": {"T1": "ToBe"}, "runs": 50, "seed": 3}
    first = requests.post(f"{service}/api/montecarlo", json=body)
    second = requests.post(f"{service}/api/montecarlo", json=body)
    assert first.status_code == 200
    assert first.content == second.content
    assert first.json()["runs"] == 50


def test_montecarlo_zero_runs_is_422(service):
    response = requests.post(
        f"{service}/api/montecarlo",
        json={"profile": "Normal", "assignments": {}, "runs": 0, "seed": 1},
    )
    assert response.status_code == 422


def test_duplicates_endpoint(service):
    response = requests.get(f"{service}/api/duplicates", params={"threshold": 0.2})
    assert response.status_code == 200
    payload = response.json()
    assert payload["threshold"] == 0.2
    assert all(pair["score"] >= 0.2 for pair in payload["pairs"])


def test_duplicates_bad_threshold_is_422(service):
    response = requests.get(f"{service}/api/duplicates", params={"threshold": 0})
    assert response.status_code == 422


def test_utility_endpoint(service):
    response = requests.get(
        f"{service}/api/utility",
        params={"profile": "Normal", "assignments": "T1=ToBe"},
    )
    assert response.status_code == 200
    payload = response.json()
    assert payload["aggregate"] == pytest.approx(0.69)


def test_unknown_endpoint_404(service):
    assert requests.get(f"{service}/api/nothing").status_code == 404
    assert requests.post(f"{service}/api/nothing", json={}).status_code == 404


def test_options_preflight(service):
    response = requests.options(f"{service}/api/propagate")
    assert response.status_code == 204
    assert response.headers["Access-Control-Allow-Origin"] == "*"


def test_index_fallback_page(service):
    response = requests.get(f"{service}/")
    assert response.status_code == 200
    assert "goalbench" in response.text


def test_create_server_rejects_invalid_model():
    from goalbench.model import ModelError
    from graphgen import seeded_defect_graphs

    with pytest.raises(ModelError, match="validation errors"):
        create_server(seeded_defect_graphs()["cycle"], "127.0.0.1", 0)


def test_parse_bind():
    assert parse_bind("0.0.0.0:9000") == ("0.0.0.0", 9000)
    assert parse_bind(None) == ("127.0.0.1", 8347)
    from goalbench.model import ScenarioError

    with pytest.raises(ScenarioError):
        parse_bind("nonsense")


def test_bind_env_var_overrides_default(monkeypatch):
    monkeypatch.setenv("GOALBENCH_BIND", "0.0.0.0:7001")
    assert parse_bind(None) == ("0.0.0.0", 7001)
    assert parse_bind("127.0.0.1:7002") == ("127.0.0.1", 7002)  # explicit flag wins


def test_cli_and_api_propagate_agree(service, signage_path):
    import subprocess
    import sys

    cli = subprocess.run(
        [sys.executable, "-m", "goalbench", "propagate", str(signage_path),
         "--profile", "Normal", "--set", "T1=ToBe"],
        capture_output=True,
    )
    api = requests.post(
        f"{service}/api/propagate",
        json={"profile": "Normal", "assignments": {"T1": "ToBe"}},
    )
    assert json.loads(cli.stdout) == api.json()


def test_static_ui_directory_served(signage, tmp_path):
    (tmp_path / "index.html").write_text("<html>ui-root</html>")
    (tmp_path / "dist").mkdir()
    (tmp_path / "dist" / "main.js").write_text("export {};")
    server = create_server(signage, "127.0.0.1", 0, ui_dir=str(tmp_path))
    start_background(server)
    try:
        base = f"http://127.0.0.1:{server.server_address[1]}"
        assert "ui-root" in requests.get(f"{base}/").text
        js = requests.get(f"{base}/dist/main.js")
        assert js.status_code == 200
        assert js.headers["Content-Type"].startswith("text/javascript")
        assert requests.get(f"{base}/../etc/passwd").status_code == 404
        assert requests.get(f"{base}/api/model").status_code == 200
    finally:
        server.shutdown()
        server.server_close()
