"""CLI commands, exit codes, file determinism, and the serve endpoint."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from lampbot.cli import EXIT_INVALID_INPUT, EXIT_OK, EXIT_UNREACHABLE, main
from lampbot.serialize import digest_file, dumps_canonical, load_json
from lampbot.server import make_server


def run(*argv):
    return main(list(argv))


class TestPlanCommand:
    def test_writes_both_documents(self, tmp_path):
        out = tmp_path / "rw.json"
        code = run(
            "plan", "--scenario", "remind_water", "--variant", "E",
            "--gamma", "1", "--out", str(out),
        )
        assert code == EXIT_OK
        metrics = load_json(tmp_path / "rw.metrics.json")
        assert metrics["scenario"] == "remind_water"
        assert metrics["variant"] == "E"
        assert metrics["trajectory_digest"] == digest_file(out)
        assert metrics["report"]["E"] > 0

    def test_rerun_is_byte_identical(self, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert run(
                "plan", "--scenario", "play_music", "--variant", "E",
                "--gamma", "1", "--seed", "7", "--out", str(out),
            ) == EXIT_OK
            outs.append(out)
        assert outs[0].read_bytes() == outs[1].read_bytes()
        assert digest_file(outs[0]) == digest_file(outs[1])

    def test_unreachable_goal_still_writes_attempt(self, tmp_path, capsys):
        out = tmp_path / "fi.json"
        code = run("plan", "--scenario", "failure_indication", "--variant", "F", "--out", str(out))
        assert code == EXIT_UNREACHABLE
        assert out.exists()
        doc = load_json(out)
        assert doc["meta"]["variant"] == "F"
        assert "out of reach" in capsys.readouterr().err

    def test_negative_gamma_writes_nothing(self, tmp_path):
        out = tmp_path / "no.json"
        code = run("plan", "--scenario", "remind_water", "--gamma", "-1", "--out", str(out))
        assert code == EXIT_INVALID_INPUT
        assert not out.exists()

    def test_unknown_scenario(self, tmp_path):
        code = run("plan", "--scenario", "juggle", "--out", str(tmp_path / "x.json"))
        assert code == EXIT_INVALID_INPUT

    def test_missing_chain_config(self, tmp_path):
        code = run(
            "plan", "--scenario", "remind_water", "--chain", "no_such_chain.json",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == EXIT_INVALID_INPUT

    def test_chain_resolved_from_config_dir(self, tmp_path, monkeypatch):
        from lampbot.kinematics import default_chain, save_chain

        save_chain(default_chain(), tmp_path / "desk.json")
        monkeypatch.setenv("LAMPBOT_CONFIG_DIR", str(tmp_path))
        out = tmp_path / "rw.json"
        assert run(
            "plan", "--scenario", "remind_water", "--chain", "desk.json", "--out", str(out)
        ) == EXIT_OK


class TestCompareCommand:
    def test_invariants_hold_for_scripted_pair(self, capsys):
        assert run("compare", "--scenario", "social_conversation", "--gamma", "1") == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("social_conversation F:")
        assert lines[1].startswith("social_conversation E:")

    def test_searched_gamma_zero_collapses(self, capsys):
        assert run(
            "compare", "--scenario", "photograph_light", "--gamma", "0", "--mode", "searched"
        ) == EXIT_OK
        out = capsys.readouterr().out
        totals = [line.split("total=")[1].split()[0] for line in out.strip().splitlines()]
        assert totals[0] == totals[1]


class TestSweepCommand:
    def test_monotone_table(self, capsys):
        assert run(
            "sweep", "--scenario", "photograph_light", "--gammas", "0,1", "--search", "beam"
        ) == EXIT_OK
        out = capsys.readouterr().out
        assert "gamma" in out and "(baseline)" in out

    def test_empty_gamma_list_rejected(self):
        assert run("sweep", "--scenario", "photograph_light", "--gammas", ",") == EXIT_INVALID_INPUT

    def test_bad_gamma_list_rejected(self):
        assert run("sweep", "--scenario", "photograph_light", "--gammas", "0,fast") == EXIT_INVALID_INPUT


@pytest.fixture(scope="module")
def endpoint():
    server = make_server("127.0.0.1", 0)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{port}"
    server.shutdown()
    server.server_close()


def http_get(url):
    with urllib.request.urlopen(url) as r:
        return r.status, json.loads(r.read())


def http_post(url, body):
    req = urllib.request.Request(
        url,
        data=json.dumps(body).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read())


class TestServe:
    def test_scenarios_listing(self, endpoint):
        status, doc = http_get(endpoint + "/scenarios")
        assert status == 200
        ids = [s["id"] for s in doc["scenarios"]]
        assert len(ids) == 6
        assert "play_music" in ids
        assert all("scripted_plan" in s and "world" in s for s in doc["scenarios"])

    def test_catalog_serves_schemas(self, endpoint):
        status, doc = http_get(endpoint + "/catalog")
        assert status == 200
        assert len(doc["kinds"]) == 15
        nod = doc["kinds"]["Nod"]
        assert nod["amplitude"]["low"] == 0.0
        assert doc["anchors"] == ["pre", "mid", "post", "terminal-"]

    def test_plan_matches_cli_file_bytes(self, endpoint, tmp_path):
        out = tmp_path / "pm.json"
        assert run(
            "plan", "--scenario", "play_music", "--variant", "E",
            "--gamma", "1", "--seed", "3", "--out", str(out),
        ) == EXIT_OK
        status, resp = http_post(
            endpoint + "/plan",
            {"scenario": "play_music", "variant": "E", "gamma": 1.0, "seed": 3},
        )
        assert status == 200
        assert dumps_canonical(resp["trajectory"]).encode() == out.read_bytes()
        assert resp["digest"] == digest_file(out)

    def test_plan_returns_render_geometry(self, endpoint):
        status, resp = http_post(endpoint + "/plan", {"scenario": "social_conversation"})
        assert status == 200
        render = resp["render"]
        n = len(resp["trajectory"]["samples"])
        assert len(render["times"]) == n
        assert len(render["links"]) == n
        assert len(render["links"][0][0]) == 3
        assert len(render["facings"]) == n
        assert len(render["tools"]) == n

    def test_override_changes_digest(self, endpoint):
        _, base = http_post(endpoint + "/plan", {"scenario": "remind_water"})
        status, edited = http_post(
            endpoint + "/plan",
            {"scenario": "remind_water", "overrides": [{"index": 2, "params": {"peak": 0.9}}]},
        )
        assert status == 200
        assert edited["digest"] != base["digest"]

    def test_unknown_scenario_404(self, endpoint):
        status, doc = http_post(endpoint + "/plan", {"scenario": "juggle"})
        assert status == 404
        assert doc["error"]["code"] == "unknown_scenario"

    def test_malformed_body_400(self, endpoint):
        req = urllib.request.Request(
            endpoint + "/plan", data=b"{nope", headers={"Content-Type": "application/json"},
            method="POST",
        )
        with pytest.raises(urllib.error.HTTPError) as err:
            urllib.request.urlopen(req)
        assert err.value.code == 400

    def test_invalid_override_400(self, endpoint):
        status, doc = http_post(
            endpoint + "/plan",
            {"scenario": "remind_water", "overrides": [{"index": 0, "params": {"standoff": 99}}]},
        )
        assert status == 400
        assert doc["error"]["code"] == "invalid_input"

    def test_unknown_fields_rejected(self, endpoint):
        status, doc = http_post(endpoint + "/plan", {"scenario": "remind_water", "model": "x"})
        assert status == 400
