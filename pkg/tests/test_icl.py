import json
import re
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from frsicl.config import WorldConfig
from frsicl.env import init_world, observe, run_episode
from frsicl.icl import (BackendError, CompletionRequest, ExperiencePool,
                        ExperienceRecord, HttpBackend, IclConfig, IclPolicy,
                        MockBackend, ParseError, build_step_prompt,
                        build_system_prompt, icl_decide, make_backend,
                        parse_action, similarity)
from frsicl.icl.backends import _parse_step_prompt
from frsicl.icl.parsing import (MISSING_FIELD, NO_OBJECT, NON_NUMERIC,
                                SENSOR_OUT_OF_RANGE)
from frsicl.policies import max_aoi_decide, nearest_neighbor_decide
from frsicl.states import Action, Observation, ObsRow

from oracles import brute_force_top_k

CFG = WorldConfig()


def make_obs(aois, path_losses=None, eligible=None, t_s=0.0):
    n = len(aois)
    path_losses = path_losses or [80.0 + i for i in range(n)]
    eligible = eligible if eligible is not None else [True] * n
    rows = tuple(
        ObsRow(id=i + 1, aoi_s=float(aois[i]), path_loss_db=float(path_losses[i]),
               snr_db=20.0 - path_losses[i] - (-90.0), queue_len=0,
               battery_j=50.0, eligible=eligible[i],
               distance_m=float(path_losses[i]))
        for i in range(n))
    return Observation(t_s=t_s, uav_pos=(85.0, 50.0, 10.0), rows=rows)


def make_record(features, sensor=1, velocity=7.5, outcome=3.0, step=0):
    return ExperienceRecord(features=np.asarray(features, dtype=np.float64),
                            action=Action(sensor=sensor, velocity_mps=velocity),
                            outcome_avg_aoi=outcome, step=step)


class TestPrompts:
    def test_system_prompt_states_bounds(self):
        text = build_system_prompt(CFG)
        assert "1..10" in text
        assert "0..15" in text

    def test_system_prompt_five_sections_once(self):
        text = build_system_prompt(CFG)
        for title in ("Objective:", "Input Schema:", "Operational Constraints:",
                      "Output Requirements:", "Feedback Mechanism:"):
            assert text.count(title) == 1

    def test_system_prompt_byte_stable(self):
        assert build_system_prompt(CFG) == build_system_prompt(CFG)

    def test_step_prompt_has_one_row_per_sensor(self):
        obs = make_obs([1, 2, 3, 4, 5])
        text = build_step_prompt(obs, [], CFG.replace(n_sensors=5))
        rows, _ = _parse_step_prompt(text)
        assert [r["id"] for r in rows] == [1, 2, 3, 4, 5]

    def test_step_prompt_round_trips_through_mock_parser(self):
        obs = make_obs([3.0, 7.0], path_losses=[82.4, 91.1],
                       eligible=[True, False])
        rows, v_max = _parse_step_prompt(
            build_step_prompt(obs, [], CFG.replace(n_sensors=2)))
        assert rows == [
            {"id": 1, "aoi_s": 3.0, "path_loss_db": 82.4, "eligible": True},
            {"id": 2, "aoi_s": 7.0, "path_loss_db": 91.1, "eligible": False},
        ]
        assert v_max == 15.0

    def test_step_prompt_shows_remaining_time(self):
        obs = make_obs([0.0] * 10, t_s=12.0)
        assert "remaining=18.0 s" in build_step_prompt(obs, [], CFG)

    def test_step_prompt_pure(self):
        obs = make_obs([1, 2, 3])
        cfg = CFG.replace(n_sensors=3)
        examples = [make_record(np.zeros(10), step=4)]
        assert build_step_prompt(obs, examples, cfg) == \
            build_step_prompt(obs, examples, cfg)


class TestSimilarity:
    def test_three_four_five(self):
        assert similarity(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == -5.0

    def test_symmetric_and_self(self):
        a, b = np.array([1.0, 2.0, 3.0]), np.array([0.5, 2.5, -1.0])
        assert similarity(a, b) == similarity(b, a)
        assert similarity(a, a) == 0.0

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError, match="mismatch"):
            similarity(np.zeros(3), np.zeros(4))


class TestExperiencePool:
    def test_empty_retrieve(self):
        assert ExperiencePool(8).retrieve(np.zeros(2), 4) == []

    def test_k_larger_than_size_returns_all(self):
        pool = ExperiencePool(8)
        for i in range(3):
            pool.add(make_record([float(i), 0.0], step=i))
        assert len(pool.retrieve(np.zeros(2), 10)) == 3

    def test_exact_match_retrieved(self):
        pool = ExperiencePool(8)
        for i in range(5):
            pool.add(make_record([float(i + 1), 0.0], sensor=i + 1, step=i))
        got = pool.retrieve(np.array([3.0, 0.0]), 1)
        assert got[0].action.sensor == 3

    def test_tie_goes_to_newer_result_chronological(self):
        pool = ExperiencePool(8)
        pool.add(make_record([1.0, 0.0], sensor=1, step=0))
        pool.add(make_record([-1.0, 0.0], sensor=2, step=1))  # same distance
        pool.add(make_record([5.0, 0.0], sensor=3, step=2))
        got = pool.retrieve(np.zeros(2), 1)
        assert got[0].action.sensor == 2
        two = pool.retrieve(np.zeros(2), 2)
        assert [r.action.sensor for r in two] == [1, 2]  # chronological

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(17)
        pool = ExperiencePool(64)
        feats = rng.normal(size=(40, 6))
        for i, f in enumerate(feats):
            pool.add(make_record(f, sensor=(i % 10) + 1, step=i))
        query = rng.normal(size=6)
        got = pool.retrieve(query, 5)
        expected = brute_force_top_k(list(pool.records), query, 5)
        assert [tuple(r.features) for r in got] == \
            [tuple(r.features) for r in expected]

    def test_ring_evicts_oldest(self):
        pool = ExperiencePool(4)
        for i in range(5):
            pool.add(make_record([float(i)], sensor=(i % 10) + 1, step=i))
        assert len(pool) == 4
        assert [r.step for r in pool.records] == [1, 2, 3, 4]

    def test_json_round_trip(self):
        pool = ExperiencePool(8)
        rng = np.random.default_rng(3)
        for i in range(6):
            pool.add(make_record(rng.normal(size=4), sensor=i + 1,
                                 velocity=1.5 * i, outcome=float(i), step=i))
        restored = ExperiencePool.from_json(pool.to_json())
        query = rng.normal(size=4)
        assert [r.action for r in restored.retrieve(query, 3)] == \
            [r.action for r in pool.retrieve(query, 3)]
        assert len(restored) == len(pool)

    def test_rejects_negative_outcome(self):
        with pytest.raises(ValueError):
            ExperiencePool(4).add(make_record([0.0], outcome=-1.0))


class TestParseAction:
    def test_plain_object(self):
        action = parse_action('{"sensor": 3, "velocity": 10.5}', CFG)
        assert action == Action(sensor=3, velocity_mps=10.5)

    def test_object_embedded_in_prose(self):
        raw = 'Sure! Here is my choice:\n{"sensor": 7, "velocity": 15}\nDone.'
        assert parse_action(raw, CFG).sensor == 7

    def test_skips_unparseable_braces(self):
        raw = '{oops} then {"sensor": 2, "velocity": 0}'
        assert parse_action(raw, CFG).sensor == 2

    def test_braces_inside_strings_ignored(self):
        raw = '{"note": "unbalanced { inside", "sensor": 4, "velocity": 5}'
        assert parse_action(raw, CFG).sensor == 4

    def test_velocity_clamped(self):
        assert parse_action('{"sensor": 1, "velocity": 99}', CFG).velocity_mps == 15.0
        assert parse_action('{"sensor": 1, "velocity": -3}', CFG).velocity_mps == 0.0

    @pytest.mark.parametrize("raw,tag", [
        ("no json here at all", NO_OBJECT),
        ('{"sensor": 1}', MISSING_FIELD),
        ('{"velocity": 5}', MISSING_FIELD),
        ('{"sensor": 0, "velocity": 5}', SENSOR_OUT_OF_RANGE),
        ('{"sensor": 11, "velocity": 5}', SENSOR_OUT_OF_RANGE),
        ('{"sensor": 2.5, "velocity": 5}', NON_NUMERIC),
        ('{"sensor": true, "velocity": 5}', NON_NUMERIC),
        ('{"sensor": 2, "velocity": "fast"}', NON_NUMERIC),
    ])
    def test_error_tags(self, raw, tag):
        with pytest.raises(ParseError) as err:
            parse_action(raw, CFG)
        assert err.value.tag == tag

    def test_fuzz_only_parse_errors(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            raw = bytes(rng.integers(0, 256, rng.integers(0, 200))).decode(
                "utf-8", errors="replace")
            try:
                action = parse_action(raw, CFG)
            except ParseError:
                continue
            assert 1 <= action.sensor <= CFG.n_sensors
            assert 0.0 <= action.velocity_mps <= CFG.v_max_mps


class TestMockBackends:
    def request_for(self, obs, cfg):
        return CompletionRequest(model="m", system="s",
                                 user=build_step_prompt(obs, [], cfg),
                                 temperature=0.0, max_tokens=64)

    def test_max_aoi_mock_matches_greedy_baseline(self):
        cfg = CFG.replace(n_sensors=6)
        backend = MockBackend("max-aoi")
        rng = np.random.default_rng(4)
        for _ in range(20):
            obs = make_obs(list(rng.integers(0, 40, 6).astype(float)),
                           eligible=list(rng.random(6) > 0.3))
            action = parse_action(backend.complete(self.request_for(obs, cfg)), cfg)
            assert action.sensor == max_aoi_decide(obs, cfg.v_max_mps).sensor

    def test_nearest_mock_matches_nearest_baseline(self):
        cfg = CFG.replace(n_sensors=5)
        backend = MockBackend("nearest")
        rng = np.random.default_rng(5)
        for _ in range(20):
            # path loss strictly increasing in distance: same argmin
            losses = [round(x, 1) for x in rng.uniform(70, 110, 5)]
            obs = make_obs([1.0] * 5, path_losses=losses)
            action = parse_action(backend.complete(self.request_for(obs, cfg)), cfg)
            assert action.sensor == nearest_neighbor_decide(obs, cfg.v_max_mps).sensor

    def test_invalid_mock_never_parses(self):
        backend = MockBackend("invalid")
        raw = backend.complete(self.request_for(make_obs([1.0] * 10), CFG))
        with pytest.raises(ParseError):
            parse_action(raw, CFG)

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError, match="unknown mock strategy"):
            MockBackend("wizard")

    def test_make_backend_specs(self):
        assert isinstance(make_backend("mock:nearest", None, 1.0), MockBackend)
        assert isinstance(make_backend("http", "http://x", 1.0), HttpBackend)
        with pytest.raises(ValueError):
            make_backend("http", None, 1.0)
        with pytest.raises(ValueError):
            make_backend("carrier-pigeon", None, 1.0)


class TestIclDecide:
    def test_happy_path_single_exchange(self):
        cfg = CFG.replace(n_sensors=4)
        log = []
        obs = make_obs([5, 9, 2, 9])
        action = icl_decide(obs, ExperiencePool(8), MockBackend("max-aoi"),
                            cfg, IclConfig(), log, step_index=0)
        assert action.sensor == 2  # highest AoI, lowest id on the tie
        assert len(log) == 1 and log[0].parse_result == "ok"

    def test_invalid_backend_falls_back_after_retries(self):
        cfg = CFG.replace(n_sensors=4)
        icl_cfg = IclConfig(max_retries=2)
        log = []
        obs = make_obs([5, 9, 2, 3])
        action = icl_decide(obs, ExperiencePool(8), MockBackend("invalid"),
                            cfg, icl_cfg, log, step_index=3)
        assert action == max_aoi_decide(obs, cfg.v_max_mps)
        assert len(log) == icl_cfg.max_retries + 1
        assert all(e.parse_result == NO_OBJECT for e in log)
        assert all(e.step == 3 for e in log)

    def test_deterministic_at_zero_temperature(self):
        cfg = CFG.replace(n_sensors=4)
        obs = make_obs([5, 9, 2, 3])
        a = icl_decide(obs, ExperiencePool(8), MockBackend("max-aoi"),
                       cfg, IclConfig(), [], step_index=0)
        b = icl_decide(obs, ExperiencePool(8), MockBackend("max-aoi"),
                       cfg, IclConfig(), [], step_index=0)
        assert a == b

    def test_config_validation(self):
        with pytest.raises(ValueError):
            IclConfig(max_retries=-1)
        with pytest.raises(ValueError):
            IclConfig(top_k_examples=100, pool_capacity=10)


class TestIclPolicyEpisode:
    def test_full_episode_with_feedback(self, tmp_path):
        world = init_world(CFG, seed=1)
        policy = IclPolicy(CFG, IclConfig(backend="mock:max-aoi"))
        summary = run_episode(world, policy)
        assert summary.n_steps == 30
        assert len(policy.pool) == 30
        assert len(policy.exchanges) == 30
        path = tmp_path / "exchanges.log"
        policy.write_exchange_log(str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 30
        for line in lines:
            entry = json.loads(line)
            assert entry["parse_result"] == "ok"

    def test_invalid_strategy_episode_never_crashes(self):
        world = init_world(CFG, seed=2)
        policy = IclPolicy(CFG, IclConfig(backend="mock:invalid"))
        run_episode(world, policy)
        # every step fell back: 3 failed attempts logged per step
        assert len(policy.exchanges) == 30 * 3
        assert all(e.parse_result == NO_OBJECT for e in policy.exchanges)
        for rec in world.log:
            assert 0.0 <= rec.action.velocity_mps <= CFG.v_max_mps

    def test_examples_appear_in_later_prompts(self):
        world = init_world(CFG, seed=3)
        policy = IclPolicy(CFG, IclConfig(backend="mock:max-aoi"))

        captured = []
        inner = policy.backend

        class Spy:
            def complete(self, request):
                captured.append(request.user)
                return inner.complete(request)

        policy.backend = Spy()
        run_episode(world, policy)
        assert "example 1:" not in captured[0]
        assert "example 1:" in captured[-1]
        assert captured[-1].count("example ") == IclConfig().top_k_examples


class _StubHandler(BaseHTTPRequestHandler):
    behavior = "ok"
    seen = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append({"path": self.path, "body": body,
                                "auth": self.headers.get("Authorization")})
        if self.behavior == "slow":
            time.sleep(1.0)
        if self.behavior == "error":
            self.send_response(500)
            self.end_headers()
            return
        if self.behavior == "malformed":
            payload = b'{"unexpected": true}'
        else:
            payload = json.dumps({"choices": [{"message": {
                "content": '{"sensor": 4, "velocity": 11.25}'}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


class _QuietServer(ThreadingHTTPServer):
    def handle_error(self, request, client_address):
        pass  # the timeout test disconnects mid-response on purpose


@pytest.fixture
def stub_server():
    _StubHandler.seen = []
    server = _QuietServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
    thread.join(timeout=5)


REQUEST = CompletionRequest(model="test-model", system="sys", user="usr",
                            temperature=0.0, max_tokens=64)


class TestHttpBackend:
    def test_success_extracts_content(self, stub_server):
        _StubHandler.behavior = "ok"
        raw = HttpBackend(stub_server).complete(REQUEST)
        assert raw == '{"sensor": 4, "velocity": 11.25}'
        sent = _StubHandler.seen[0]
        assert sent["path"] == "/v1/chat/completions"
        assert sent["body"]["model"] == "test-model"
        assert sent["body"]["messages"][0]["role"] == "system"
        assert sent["body"]["temperature"] == 0.0

    def test_bearer_header_from_env(self, stub_server, monkeypatch):
        _StubHandler.behavior = "ok"
        monkeypatch.setenv("FRSICL_API_KEY", "sk-test-123")
        HttpBackend(stub_server).complete(REQUEST)
        assert _StubHandler.seen[0]["auth"] == "Bearer sk-test-123"

    def test_non_2xx_raises(self, stub_server):
        _StubHandler.behavior = "error"
        with pytest.raises(BackendError, match="status 500"):
            HttpBackend(stub_server).complete(REQUEST)

    def test_malformed_body_raises(self, stub_server):
        _StubHandler.behavior = "malformed"
        with pytest.raises(BackendError, match="malformed"):
            HttpBackend(stub_server).complete(REQUEST)

    def test_timeout_enforced(self, stub_server):
        _StubHandler.behavior = "slow"
        backend = HttpBackend(stub_server, timeout_s=0.2)
        started = time.perf_counter()
        with pytest.raises(BackendError, match="timeout|transport"):
            backend.complete(REQUEST)
        assert time.perf_counter() - started < 0.8

    def test_unreachable_endpoint_raises(self):
        backend = HttpBackend("http://127.0.0.1:9", timeout_s=0.5)
        with pytest.raises(BackendError):
            backend.complete(REQUEST)
