import json
import math

import pytest

import wuigraph

QUICK = {
    "gnn": {"heads": 2, "head_dim": 8, "mlp_hidden1": 8, "mlp_hidden2": 4, "epochs": 30, "patience": 10, "lr": 0.01},
    "gbdt": {"n_trees": 20, "max_depth": 3},
}


def test_flame_angle_matches_albini_form():
    expected = math.atan(math.sqrt(1.5 * 22.2**2 / (9.81 * 10.0)))
    assert wuigraph.flame_angle(10.0) == pytest.approx(expected, abs=1e-12)


def test_physics_helpers():
    assert wuigraph.wind_correlation(45.0, 45.0) == pytest.approx(1.0)
    assert wuigraph.wind_correlation(0.0, 180.0) == 0.0
    p = wuigraph.total_probability(0.5, 0.5, 0.5)
    assert p == pytest.approx(0.875)
    assert wuigraph.incident_flux(10.0, 5.0, 1200.0, 300.0) > 0.0


def test_metrics_and_auc():
    m = wuigraph.metrics_from_counts(40, 10, 45, 5)
    assert m["accuracy"] == pytest.approx(0.85)
    assert wuigraph.roc_auc([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8]) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        wuigraph.roc_auc([1, 1], [0.2, 0.3])


def test_stacker_and_triage():
    # Each input pair appears with both labels, so the likelihood has a finite optimum.
    g = [0.2, 0.2, 0.2, 0.8, 0.8, 0.8, 0.5, 0.5, 0.3, 0.3, 0.7, 0.7]
    x = [0.3, 0.3, 0.3, 0.6, 0.6, 0.6, 0.4, 0.4, 0.7, 0.7, 0.2, 0.2]
    y = [0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 0]
    fit = wuigraph.fit_stacker(g, x, y)
    assert fit["converged"] and not fit["separation_warning"]
    p = wuigraph.stack_predict(fit["beta0"], fit["beta_gnn"], fit["beta_xgb"], 0.7, 0.6)
    assert 0.0 < p < 1.0
    assert wuigraph.triage(0.9, 0.9) != wuigraph.triage(0.1, 0.1)


def test_unknown_config_key_is_value_error(tmp_path):
    with pytest.raises(ValueError):
        wuigraph.build_graph(tmp_path, tmp_path / "g.json", config={"gnn": {"nope": 1}})


def test_synth_graph_and_pipeline(tmp_path):
    scen = tmp_path / "scen"
    truth = wuigraph.synth(scen, seed=3, n_buildings=200, extent=900.0)
    assert 0.5 < truth["bayes_auc"] <= 1.0

    summary = wuigraph.build_graph(scen, tmp_path / "graph.json", seed=3)
    assert summary
    graph = json.loads((tmp_path / "graph.json").read_text())
    assert graph

    cent = wuigraph.centrality(tmp_path / "graph.json")
    assert len(cent["ids"]) == len(cent["degree"])
    assert all(0.0 <= v <= 1.0 for v in cent["degree"])
    if cent["eigenvector"] is not None:
        assert len(cent["eigenvector"]) == len(cent["ids"])
        assert all(v >= 0.0 for v in cent["eigenvector"])

    out = tmp_path / "eval"
    result = wuigraph.eval_all(scen, out, config=QUICK, seed=3)
    assert result["test_size"] > 0
    assert sum(result["triage_counts"].values()) == result["test_size"]
    assert (out / "metrics.json").exists()
    assert (out / "triage.geojson").exists()


def test_cli_exit_codes(tmp_path):
    assert wuigraph.run_cli(["--quiet", "synth", "--out", str(tmp_path / "s"), "--n-buildings", "50"]) in (0, 1)
    assert wuigraph.run_cli(["--quiet", "predict"]) == 1
    assert wuigraph.run_cli(["--quiet", "build-graph", "--scenario", str(tmp_path / "missing"),
                             "--out", str(tmp_path / "g.json")]) != 0
