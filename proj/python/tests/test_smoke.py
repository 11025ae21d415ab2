import json

import pytest

import minisocial


def door(**extra):
    return minisocial.config(experiment_names=["envs_door"], num_agents=[[0, 2]], seed=3, **extra)


def test_reset_and_step_until_done():
    env = minisocial.Env(door())
    obs = env.reset(0)
    assert len(obs) == 2
    assert all(len(o) == env.observation_size for o in obs)
    out = None
    while not env.done:
        out = env.step({i: "GO" for i in env.live_agents})
    assert out["done"]
    assert out["reason"] in {"success", "collision", "stall", "max_steps"}
    for terms in out["reward_terms"].values():
        assert "existence" in terms


def test_log_round_trips_through_metrics():
    env = minisocial.Env(door())
    env.reset(0)
    while not env.done:
        env.step({i: "GO" for i in env.live_agents})
    row = minisocial.compute_metrics(env.log_jsonl())
    assert row["k"] == 2 and row["trials"] == 1


def test_step_contract():
    env = minisocial.Env(door())
    env.reset(0)
    with pytest.raises(minisocial.ContractError):
        env.step({0: "GO"})


def test_unknown_config_key():
    with pytest.raises(minisocial.ConfigError):
        minisocial.Env(json.dumps({"no_such_key": 1}))


def test_evaluate_is_deterministic():
    a = minisocial.evaluate("only_local", door(), trials=3, k=[2])
    b = minisocial.evaluate("only_local", door(), trials=3, k=[2])
    assert a["logs"] == b["logs"]
    assert a["csv"] == b["csv"]
    assert len(a["rows"]) == 1 and a["rows"][0]["trials"] == 3


def test_open_two_agents_succeed():
    cfg = minisocial.config(experiment_names=["open"], seed=0)
    row = minisocial.evaluate("only_local", cfg, trials=5, k=[2])["rows"][0]
    assert row["success"] == 100.0


def test_train_then_evaluate_checkpoint():
    ckpt = minisocial.train(door(), steps=300)
    assert isinstance(ckpt, str) and ckpt
    res = minisocial.evaluate_checkpoint(ckpt, door(), trials=2, k=[2], sample=True)
    assert res["rows"][0]["policy"] == "learned"
