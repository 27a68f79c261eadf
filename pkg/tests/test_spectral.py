import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nbwalk.errors import BipartiteOrDisconnected, DegreeTooSmall, HorizonExceeded, NegativeInput
from nbwalk.graph import GraphGenSpec, build_from_edge_list, girth, named_graph, pairwise_distance, random_regular
from nbwalk.spectral import (
    adjacency_matrix,
    decay_slope,
    deviation_sequence,
    fine_mixing_time_tau,
    mixing_rate_rho,
    nbrw_edge_distribution,
    nbrw_k_step_vertex_distribution,
    psi,
    rho_upper_bound,
    second_eigenvalue,
    short_return_mass_M,
    tau_from_dev,
)

from oracles import nb_path_law


@pytest.mark.parametrize("name, lam", [("k4", 1.0), ("petersen", 2.0), ("k33", 3.0), ("q3", 3.0)])
def test_second_eigenvalue_named(name, lam):
    g = named_graph(name)
    s = second_eigenvalue(g)
    assert s.lam == pytest.approx(lam, abs=1e-9)
    assert second_eigenvalue(g, tol=1e-12, method="power").lam == pytest.approx(lam, abs=1e-6)


def test_petersen_full_spectrum(petersen):
    ev = np.sort(np.linalg.eigvalsh(adjacency_matrix(petersen)))
    assert np.allclose(ev, [-2] * 4 + [1] * 5 + [3])


@settings(max_examples=10, deadline=None)
@given(st.integers(6, 40).map(lambda x: 2 * x), st.integers(3, 5), st.integers(0, 1000))
def test_dense_and_power_agree(n, d, seed):
    g = random_regular(GraphGenSpec(n, d, seed=seed))
    dense = second_eigenvalue(g, method="dense").lam
    power = second_eigenvalue(g, tol=1e-12, method="power").lam
    assert power == pytest.approx(dense, abs=1e-5)


def test_power_iteration_used_for_large_graphs():
    g = random_regular(GraphGenSpec(600, 3, seed=3))
    s = second_eigenvalue(g, tol=1e-8)
    assert s.method == "power"
    assert 2 * math.sqrt(2) - 0.2 < s.lam < 3


def test_psi():
    assert psi(0.5) == 1
    assert psi(1) == 1
    assert psi(1.25) == 2
    with pytest.raises(NegativeInput):
        psi(-0.1)


def test_rho_values():
    assert mixing_rate_rho(3, 2) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert mixing_rate_rho(5, 4) == pytest.approx(0.5, abs=1e-15)
    for d in range(3, 8):
        assert mixing_rate_rho(d, 0) == pytest.approx(1 / math.sqrt(d - 1))
        assert rho_upper_bound(d, 0) == pytest.approx(1 / math.sqrt(d - 1))
    assert rho_upper_bound(5, 4) == pytest.approx(0.8)
    assert rho_upper_bound(3, 2) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(DegreeTooSmall):
        mixing_rate_rho(2, 1)
    with pytest.raises(DegreeTooSmall):
        rho_upper_bound(2, 1)


@settings(max_examples=300)
@given(st.integers(3, 40), st.floats(0, 1))
def test_rho_below_upper_bound(d, frac):
    lam = frac * d
    assert mixing_rate_rho(d, lam) <= rho_upper_bound(d, lam) * (1 + 1e-12)


@settings(max_examples=300)
@given(st.integers(3, 40), st.floats(0, 1))
def test_rho_matches_psi_form(d, frac):
    lam = frac * d
    via_psi = psi(lam / (2 * math.sqrt(d - 1))) / math.sqrt(d - 1)
    assert mixing_rate_rho(d, lam) == pytest.approx(via_psi, rel=1e-12)


@pytest.mark.parametrize("d", range(3, 12))
def test_rho_is_one_without_gap(d):
    assert mixing_rate_rho(d, d) == 1.0


def test_k4_laws(k4):
    assert np.allclose(nbrw_k_step_vertex_distribution(k4, 0, 0), [1, 0, 0, 0])
    assert np.allclose(nbrw_k_step_vertex_distribution(k4, 0, 1), [0, 1 / 3, 1 / 3, 1 / 3])
    assert np.allclose(nbrw_k_step_vertex_distribution(k4, 0, 2), [0, 1 / 3, 1 / 3, 1 / 3])
    assert np.allclose(nbrw_k_step_vertex_distribution(k4, 0, 3), [1 / 2, 1 / 6, 1 / 6, 1 / 6])


@pytest.mark.parametrize("name", ["k4", "petersen", "k33", "q3"])
def test_laws_match_path_enumeration(name):
    g = named_graph(name)
    for start in range(g.n):
        for k in range(0, 9):
            exact = np.array([float(p) for p in nb_path_law(g.n, g.edges(), start, k)])
            assert np.abs(nbrw_k_step_vertex_distribution(g, start, k) - exact).max() <= 1e-12


@pytest.mark.parametrize("name", ["k4", "petersen", "k33", "q3"])
def test_stochastic_and_supported(name):
    g = named_graph(name)
    gi = girth(g)
    for k in range(0, 60):
        edge = nbrw_edge_distribution(g, 0, k) if k >= 1 else None
        if edge is not None:
            assert edge.min() >= 0
            assert abs(edge.sum() - 1) <= 1e-12
        law = nbrw_k_step_vertex_distribution(g, 0, k)
        assert abs(law.sum() - 1) <= 1e-12
        for v in range(g.n):
            if v == 0 and 1 <= k < gi:
                assert law[v] == 0
            if v != 0 and k < pairwise_distance(g, 0, v):
                assert law[v] == 0


def test_horizon_and_degree_checks():
    c6 = build_from_edge_list(6, [(i, (i + 1) % 6) for i in range(6)])
    assert np.allclose(nbrw_k_step_vertex_distribution(c6, 0, 1), [0, 0.5, 0, 0, 0, 0.5])
    with pytest.raises(DegreeTooSmall):
        nbrw_k_step_vertex_distribution(c6, 0, 2)
    with pytest.raises(HorizonExceeded):
        nbrw_k_step_vertex_distribution(named_graph("k4"), 0, 50, horizon=10)


def test_k33_refused(k33):
    with pytest.raises(BipartiteOrDisconnected):
        fine_mixing_time_tau(k33)


def test_k4_mixing(k4):
    rep = fine_mixing_time_tau(k4, cap=200)
    assert rep.tau is not None
    assert rep.dev[rep.tau] <= 1 / 16
    assert rep.rho == pytest.approx(1 / math.sqrt(2))
    assert rep.dev[0] == pytest.approx(0.75)
    assert tau_from_dev(rep.dev, 4) == rep.tau


def test_petersen_mixing(petersen):
    rep = fine_mixing_time_tau(petersen, cap=200)
    assert rep.tau is not None
    assert np.all(rep.dev >= 0)
    assert np.all(rep.dev[rep.tau :] <= 1 / 100)
    assert rep.dev[rep.tau - 1] > 1 / 100
    # geometric decay at rate rho before the deviation reaches 1/n^2
    slope = decay_slope(rep.dev, 0, rep.tau - 1)
    assert abs(slope / math.log(rep.rho) - 1) <= 0.15


@pytest.mark.parametrize("name", ["k4", "petersen"])
def test_deviation_decays(name):
    g = named_graph(name)
    dev = deviation_sequence(g, 400)
    assert dev[-1] < 1e-12


def test_mixing_report_serialisation(petersen):
    rep = fine_mixing_time_tau(petersen, cap=30)
    obj = json.loads(rep.dumps())
    assert set(obj) == {"rho", "tau", "dev"}
    assert len(obj["dev"]) == 31
    rows = rep.dev_csv().splitlines()
    assert rows[0] == "k,dev" and len(rows) == 32


def test_tau_none_when_cap_too_small(petersen):
    rep = fine_mixing_time_tau(petersen, cap=5)
    assert rep.tau is None


def test_tau_from_dev_rule():
    assert tau_from_dev(np.array([1.0, 0.5, 0.0, 0.0]), 2) == 2
    assert tau_from_dev(np.array([1.0, 0.1, 0.5, 0.1]), 2) == 3
    assert tau_from_dev(np.array([1.0, 0.1, 0.1, 0.5]), 2) is None


def test_short_return_mass(k4, petersen):
    assert short_return_mass_M(petersen, [0], 5) == 0
    assert short_return_mass_M(k4, [0], 4) == pytest.approx(0.5)
    assert short_return_mass_M(k4, [0, 1], 1) == 0
    # two targets on K4: the (0,1) entry sums P^(1..3) = 1/3 + 1/3 + 1/6
    assert short_return_mass_M(k4, [0, 1], 4) == pytest.approx(5 / 6)


@pytest.mark.parametrize("name", ["k4", "petersen"])
def test_short_return_mass_by_enumeration(name):
    g = named_graph(name)
    targets = [0, g.n - 1]
    L = 7
    best = 0.0
    for a in targets:
        laws = [nb_path_law(g.n, g.edges(), a, k) for k in range(1, L)]
        for b in targets:
            best = max(best, float(sum(law[b] for law in laws)))
    assert short_return_mass_M(g, targets, L) == pytest.approx(best, abs=1e-12)
