from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cdfmr.scenario import Scenario, ScenarioError, format_scenario, parse_scenario, sweep_points
from test_cli import BASIC


def test_parse_basic():
    sc = parse_scenario(BASIC)
    assert sc.clusters == (3, 2)
    assert sc.topology.n_clusters == 2
    assert sc.budget_model == "unbalanced"
    assert sc.delta == 4.0
    assert sc.gamma_d_grid_db() == [0.0, 10.0, 20.0]
    assert sc.samples == 100_000 and sc.seed == 7
    assert sc.outputs == ("outage", "capacity", "ser", "snr_gain")


def test_parse_full():
    text = (
        "clusters=2,2,2\nbudget_model =explicit\nexplicit_gammas_db = 10, 3.5, 0, -1\n"
        "gamma_d_sweep_db = -5, 5, 2.5\nmodulation = mqam, 16\nmu_sweep = 0.5, 2, 0.5\n"
        "outputs = ser, outage\n"
    )
    sc = parse_scenario(text)
    assert sc.explicit_gammas_db == (10.0, 3.5, 0.0, -1.0)
    assert sc.modulation == ("MQAM", 16)
    assert sc.mod.alpha == pytest.approx(1.5)
    assert sc.mu_grid() == [0.5, 1.0, 1.5, 2.0]
    assert sc.outputs == ("outage", "ser")
    budget = sc.budget(5.0)
    assert budget.hop_avg_snr == pytest.approx(tuple(10 ** ((5 + g) / 10) for g in (10, 3.5, 0, -1)))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("clusters = \nbudget_model = balanced\n", "clusters"),
        ("clusters = 2,\nbudget_model = balanced\n", "clusters"),
        ("clusters = 2\nbudget_model = lopsided\n", "budget_model"),
        ("clusters = 2\nbudget_model = balanced\nfoo = 1\n", "foo"),
        ("clusters = 2\nbudget_model = balanced\ndelta\n", "line 3"),
        ("clusters = 2\nbudget_model = explicit\n", "explicit_gammas_db"),
        ("clusters = 2\nbudget_model = balanced\nexplicit_gammas_db = 1, 2\n", "explicit_gammas_db"),
        ("clusters = 2\nbudget_model = explicit\nexplicit_gammas_db = 1\n", "explicit_gammas_db"),
        ("clusters = 2\nbudget_model = balanced\ngamma_d_sweep_db = 0, 10, 0\n", "gamma_d_sweep_db"),
        ("clusters = 2\nbudget_model = balanced\ngamma_d_sweep_db = 0, 10\n", "gamma_d_sweep_db"),
        ("clusters = 2\nbudget_model = balanced\nmodulation = MQAM\n", "modulation"),
        ("clusters = 2\nbudget_model = balanced\noutputs = outage, goodput\n", "outputs"),
        ("clusters = 2\nbudget_model = balanced\nsamples = 0\n", "samples"),
        ("clusters = 2\nbudget_model = balanced\nsamples = 1e6\n", "samples"),
        ("budget_model = balanced\n", "clusters"),
        ("clusters = 70\nbudget_model = balanced\n", "clusters"),
    ],
)
def test_parse_errors_name_the_key(text, fragment):
    with pytest.raises(ScenarioError, match=fragment):
        parse_scenario(text)


def test_duplicate_key_reports_both_lines():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario("clusters = 2\n# note\nbudget_model = balanced\nclusters = 3\n")
    msg = str(exc.value)
    assert "clusters" in msg and "1" in msg and "4" in msg


def test_sweep_points_inclusive():
    assert sweep_points((0, 30, 2)) == [float(x) for x in range(0, 31, 2)]
    assert sweep_points((0, 0.9, 0.3)) == [0.0, 0.3, 0.6, 0.9]
    assert sweep_points((5, 5, 1)) == [5.0]


scenarios = st.builds(
    Scenario,
    clusters=st.lists(st.integers(1, 8), min_size=1, max_size=5).map(tuple),
    budget_model=st.sampled_from(["balanced", "unbalanced"]),
    delta=st.floats(0, 6),
    gamma_d_sweep_db=st.tuples(st.floats(-20, 0), st.floats(0, 40), st.floats(0.25, 5)),
    rate_threshold=st.floats(0, 3),
    modulation=st.sampled_from([("BPSK", None), ("MPSK", 8), ("MQAM", 64), ("MPAM", 4)]),
    mu_sweep=st.none() | st.tuples(st.floats(0, 1), st.floats(1, 10), st.floats(0.5, 2)),
    samples=st.integers(1, 10**7),
    seed=st.integers(0, 2**64 - 1),
    outputs=st.sampled_from([("outage",), ("capacity", "ser"), ("outage", "capacity", "ser", "snr_gain")]),
)


@given(scenarios)
def test_scenario_round_trip(sc):
    assert parse_scenario(format_scenario(sc)) == sc


def test_round_trip_explicit():
    sc = parse_scenario("clusters = 1\nbudget_model = explicit\nexplicit_gammas_db = 3.25, -0.1\n")
    assert parse_scenario(format_scenario(sc)) == sc


@pytest.mark.parametrize("name", ["three_hop.cfg", "explicit_mu.cfg"])
def test_shipped_scenarios_parse(name):
    sc = parse_scenario((Path(__file__).parents[1] / "scenarios" / name).read_text())
    assert sc.budget(sc.gamma_d_grid_db()[0]).check(sc.topology) is None
