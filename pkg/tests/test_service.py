import csv
import io
import json

import pytest
from fastapi.testclient import TestClient

from limsym import __version__
from limsym.cli import main
from limsym.service.app import app
from limsym.service.handlers import ConfigError, parse_nm, parse_point, run
from limsym.service.schemas import RunConfig


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200 and r.json() == {"status": "ok", "version": __version__}


def test_cosets_endpoint(client):
    r = client.post("/cosets", json={"group": "gamma0:11"})
    body = r.json()
    assert r.status_code == 200
    assert body["result"]["index"] == body["result"]["index_formula"] == 12
    assert "threads" not in body["config"]


def test_bad_group_is_422(client):
    assert client.post("/cosets", json={"group": "nonsense"}).status_code == 422


def test_bad_point_is_422(client):
    r = client.post("/encode", json={"group": "full", "point": "quad:1,1"})
    assert r.status_code == 422 and "three integers" in r.json()["detail"]


def test_http_matches_in_process(client):
    cfg = {"group": "gamma0:11", "point": "silver", "nmax": 20}
    http = client.post("/lms", json=cfg).json()
    local = run("lms", RunConfig(**cfg))
    assert json.loads(json.dumps(local)) == http


def test_parse_nm_and_point():
    assert parse_nm(None, 2) == ((1, 1), (0, 0))
    assert parse_nm("1,2:3,4", 2) == ((1, 2), (3, 4))
    with pytest.raises(ConfigError):
        parse_nm("1:2", 2)
    pts = parse_point("random:3,4", 30)
    assert len(pts) == 4 and all(p.e1 == 0 for p in pts)
    assert parse_point("golden@2")[0].e1 == 2
    with pytest.raises(ConfigError):
        parse_point("quad:0,1,3")  # sqrt 3 > 1
    with pytest.raises(ConfigError):
        parse_point("bogus:1")


def test_cli_json(capsys):
    assert main(["encode", "--group", "full", "--point", "golden", "--nmax", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["result"]["words"][0]["word"] == [[-1, 0], [1, 0], [-1, 0], [1, 0]]


def test_cli_csv_lms(capsys):
    assert main(["lms", "--group", "gamma0:11", "--point", "silver", "--nmax", "5", "--format", "csv"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["point", "n", "q_n", "lambda_n", "L_0", "L_1", "L_2", "delta_n"]
    assert len(rows) == 6


def test_cli_out_file(tmp_path):
    out = tmp_path / "c.json"
    assert main(["cosets", "--group", "gamma0:2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["index"] == 3


def test_cli_errors(capsys):
    assert main(["encode", "--point", "digits:-2,3", "--nmax", "9"]) == 2
    assert "rational" in capsys.readouterr().err
    assert main(["cosets", "--group", "gamma0:0"]) == 2
    assert main(["pair", "--group", "gamma0:5", "--weight", "0"]) == 2


def test_cli_lyapunov_exact(capsys):
    assert main(["lyapunov", "--point", "golden", "--nmax", "200"]) == 0
    s = json.loads(capsys.readouterr().out)["result"]["samples"][0]
    assert s["abs_error"] < 5e-3


def test_cli_pair_delta(capsys):
    assert main(["pair", "--group", "full", "--weight", "10"]) == 0
    res = json.loads(capsys.readouterr().out)["result"]
    assert res["pairing_rank"] == res["cuspidal_dim"] == 2
    assert res["relations_vanish"]
    assert res["cocycles"]["two_term"] < 1e-8


def test_lyapunov_threads_do_not_change_report():
    a = run("lyapunov", RunConfig(point="random:5,20", nmax=50, threads=1))
    b = run("lyapunov", RunConfig(point="random:5,20", nmax=50, threads=4))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
