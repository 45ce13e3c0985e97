import json
import math

import numpy as np
import pytest

from cachenoma import cli, sim
from cachenoma.model import capacity


def test_defaults_follow_the_reference_setup():
    cfg = sim.ScenarioConfig()
    assert (cfg.cell_radius_km, cfg.r_i_km, cfg.r_j_km) == (2.0, 0.2, 0.6)
    assert cfg.bandwidth_hz == 5e6 and cfg.tx_power_dbm == 35
    assert cfg.v_a_bits == cfg.v_b_bits == 500 * 8e6
    assert (cfg.c_ia, cfg.c_ib, cfg.c_ja, cfg.c_jb) == (0.2, 0.8, 0.8, 0.2)
    assert 10 * math.log10(cfg.noise_power_w * 1e3) == pytest.approx(-105.61, abs=5e-3)
    assert cfg.power_w == pytest.approx(3.162, abs=1e-3)


def test_pathloss():
    cfg = sim.ScenarioConfig()
    assert sim.pathloss_db(1.0, cfg) == pytest.approx(128.1)
    assert sim.pathloss_db(0.0, cfg) == sim.pathloss_db(1e-3, cfg)


def test_config_validation(tmp_path):
    with pytest.raises(sim.ConfigError):
        sim.ScenarioConfig(placement="square")
    with pytest.raises(sim.ConfigError):
        sim.ScenarioConfig(r_j_km=3.0)
    with pytest.raises(sim.ConfigError):
        sim.ScenarioConfig(drops=0)
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"r_j_km": 1.0, "drops": 7}))
    cfg = sim.ScenarioConfig.from_json(str(path), seed=3)
    assert (cfg.r_j_km, cfg.drops, cfg.seed) == (1.0, 7, 3)
    path.write_text(json.dumps({"rj": 1.0}))
    with pytest.raises(sim.ConfigError):
        sim.ScenarioConfig.from_json(str(path))
    with pytest.raises(sim.ConfigError):
        sim.ScenarioConfig.from_json(str(tmp_path / "missing.json"))


def test_drops_are_labelled_and_placed():
    cfg = sim.ScenarioConfig()
    swaps = 0
    for k in range(200):
        d = sim.gen_drop(cfg, sim.drop_rng(5, k))
        assert d.channel.alpha_i < d.channel.alpha_j
        assert max(d.d_i_km, d.d_j_km) <= cfg.r_j_km
        swaps += d.swapped
        if d.swapped:
            assert d.cache == cfg.cache().swapped()
    assert 0 < swaps < 200


def test_ring_placement_sits_on_the_edge():
    cfg = sim.ScenarioConfig(placement="ring", r_i_km=0.2, r_j_km=1.0)
    d = sim.gen_drop(cfg, sim.drop_rng(1, 0))
    assert sorted((d.d_i_km, d.d_j_km)) == [0.2, 1.0]


def test_drop_streams_are_shared_across_rj():
    a = sim.gen_drop(sim.ScenarioConfig(r_j_km=0.5), sim.drop_rng(9, 4))
    b = sim.gen_drop(sim.ScenarioConfig(r_j_km=1.0), sim.drop_rng(9, 4))
    if not (a.swapped or b.swapped):
        assert b.d_j_km == pytest.approx(2 * a.d_j_km)
        assert b.channel.alpha_i == a.channel.alpha_i


def test_parse_sweep():
    assert sim.parse_sweep("0.2:2.0:10")[0] == 0.2
    assert sim.parse_sweep("0.2:2.0:10")[-1] == pytest.approx(2.0)
    assert sim.parse_sweep("1:1:1") == [1.0]
    with pytest.raises(sim.ConfigError):
        sim.parse_sweep("0.2-2")


def test_montecarlo_is_deterministic_across_workers():
    cfg = sim.ScenarioConfig(drops=4, seed=11)
    one = sim.write_csv(sim.run_montecarlo(cfg, [0.3, 0.9]), sim.MC_HEADER)
    again = sim.write_csv(sim.run_montecarlo(cfg, [0.3, 0.9]), sim.MC_HEADER)
    two = sim.write_csv(sim.run_montecarlo(cfg, [0.3, 0.9], workers=2), sim.MC_HEADER)
    assert one == again == two
    lines = one.split("\n")
    assert lines[0] == "r_j_km,scheme,mean_t_s,ci95_s"
    assert "\r" not in one
    assert len(lines) == 2 + 2 * len(sim.SCHEMES)
    # full double precision survives the round trip
    rj, scheme, mean, ci = lines[1].split(",")
    assert float(repr(float(mean))) == float(mean)


def test_montecarlo_requires_seed():
    with pytest.raises(sim.ConfigError):
        sim.simulate(sim.ScenarioConfig(drops=1))


def test_region_sweep_csv():
    rows = sim.run_region_sweep(1e-3, 1e-2, 10.0, grid=20)
    text = sim.write_csv(rows, sim.REGION_HEADER)
    assert text.startswith("scheme,r_i,r_j\n")
    assert {r[0] for r in rows} == {"oma", "noma", "proposed"}
    oma = [(a, b) for s, a, b in rows if s == "oma"]
    ci, cj = capacity(1e4), capacity(1e3)
    for t, (a, b) in zip(np.linspace(0, 1, 20), oma):
        assert (a, b) == pytest.approx((t * ci, (1 - t) * cj))


def test_verify_report_is_reproducible():
    a = sim.run_verify(150, seed=2).render()
    b = sim.run_verify(150, seed=2).render()
    assert a == b
    assert "closed form achievable, oracle not: 0" in a


def test_verify_catches_corrupted_bound():
    rep = sim.run_verify(300, seed=2, corrupt=True)
    assert len(rep.closed_only) > 0
    # the hook restores the table afterwards
    assert len(sim.run_verify(300, seed=2).closed_only) == 0


# -- command line ----------------------------------------------------------

def test_cli_region(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = cli.main(["region", "--alpha-i", "1e-3", "--alpha-j", "1e-2", "--power", "10",
                     "--grid", "10", "--out", str(out)])
    assert code == 0
    assert out.read_text().startswith("scheme,r_i,r_j\n")


def test_cli_config_errors(tmp_path, capsys):
    assert cli.main(["region", "--alpha-i", "1e-2", "--alpha-j", "1e-3", "--power", "10"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["delivery", "--config", str(bad)]) == 2
    empty = tmp_path / "empty.json"
    empty.write_text("{}")
    assert cli.main(["delivery", "--config", str(empty)]) == 2
    assert cli.main(["mc", "--rj-sweep", "0.2:5:3", "--drops", "1", "--seed", "1"]) == 2


def test_cli_delivery(tmp_path, capsys):
    cfg = tmp_path / "d.json"
    cfg.write_text(json.dumps({"alpha_i": 1e-3, "alpha_j": 5e-2}))
    out = tmp_path / "d.txt"
    assert cli.main(["delivery", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    for key in ("T*", "region", "order", "p*", "r*"):
        assert key in text


def test_cli_mc(tmp_path):
    out = tmp_path / "mc.csv"
    assert cli.main(["mc", "--rj-sweep", "0.4:0.8:2", "--drops", "2", "--seed", "5",
                     "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "r_j_km,scheme,mean_t_s,ci95_s"


def test_cli_verify_exit_status(capsys, monkeypatch):
    code = cli.main(["verify", "--samples", "200", "--seed", "3"])
    rep = sim.run_verify(200, 3)
    assert code == (3 if rep.disagreements else 0)
    monkeypatch.setattr(sim, "run_verify", lambda *a, **k: sim.VerifyReport(1, 1, 0, 1))
    assert cli.main(["verify", "--samples", "1", "--seed", "3"]) == 0
