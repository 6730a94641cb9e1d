import math

import numpy as np
import pytest
from scipy.integrate import quad

from problems import E1, E2, T0, T1
from retarded_sl.integrate import PRECISE_CONTROL
from retarded_sl.nodal import find_nodes, nodal_asymptotic, node_index_fn, t_factor
from retarded_sl.spectrum import find_eigenvalue


@pytest.fixture(scope="module")
def nodes():
    out = {}
    for name, spec in (("E1", E1), ("E2", E2)):
        for n in (20, 40):
            out[name, n] = find_nodes(spec, find_eigenvalue(spec, n))
    return out


def test_t0_nodes():
    ns = find_nodes(T0, find_eigenvalue(T0, 40, control=PRECISE_CONTROL), PRECISE_CONTROL)
    assert ns.count == 39
    exact = (np.arange(1, 40) - 0.5) * math.pi / 39
    assert np.max(np.abs(ns.nodes - exact)) <= 1e-9
    assert abs(ns.nodes[0] - math.pi / 78) <= 1e-9


def test_t1_nodes():
    rec = find_eigenvalue(T1, 11, control=PRECISE_CONTROL)
    assert rec.root == pytest.approx(math.sqrt(99), abs=1e-8)
    ns = find_nodes(T1, rec, PRECISE_CONTROL)
    assert ns.count == 10
    assert np.allclose(ns.nodes, (np.arange(1, 11) - 0.5) * math.pi / 10, atol=1e-9)


def test_example2_count_and_spacing(nodes):
    ns = nodes["E2", 40]
    assert ns.count in (38, 39, 40)
    assert np.max(np.diff(ns.nodes)) < 1.2 * math.pi / ns.mu


@pytest.mark.parametrize("key", [("E1", 20), ("E1", 40), ("E2", 20), ("E2", 40)])
def test_interlacing_and_residuals(nodes, key):
    ns = nodes[key]
    gaps = np.diff(ns.nodes) * ns.mu / math.pi
    assert np.all((gaps > 0.8) & (gaps < 1.2))
    assert np.all(ns.residuals <= 1e-8 * (1 + ns.mu))


def test_rejects_complex_root():
    from retarded_sl.spectrum import EigenvalueRecord
    from retarded_sl.indices import SpectralIndex
    rec = EigenvalueRecord(SpectralIndex(1, 5), 4.0, 4.0, 4.0 + 0.1j, 0.0, "complex-secant", 0)
    with pytest.raises(ValueError):
        find_nodes(T0, rec)


def test_t_factor_examples():
    assert t_factor(T0, 39.0, 1.3) == 39.0
    assert t_factor(E2, 39.0, math.pi) == pytest.approx(277.8515652, abs=1e-7)
    with pytest.raises(ValueError):
        t_factor(E2, 0.0, 1.0)


def test_t_factor_example1_vs_quad():
    mu, t = 39.0, 1.0
    ic = quad(lambda s: s * math.cos(mu * s / 2), 0, t, limit=200, epsabs=1e-13)[0]
    is_ = quad(lambda s: s * math.sin(mu * s / 2), 0, t, limit=200, epsabs=1e-13)[0]
    ref = (mu * E1.a2p + E1.a2m - E1.a2p / 2 * is_ - E1.a2m / (2 * mu) * is_
           + E1.a1p / (2 * mu) * ic)
    assert t_factor(E1, mu, t) == pytest.approx(ref, abs=1e-9)


def test_nodal_asymptotic_t0():
    for j in (1, 20, 39):
        assert nodal_asymptotic(T0, 40, j) == pytest.approx((j - 0.5) * math.pi / 39, abs=1e-15)
    with pytest.raises(ValueError):
        nodal_asymptotic(T0, 40, 41)


def test_nodal_asymptotic_examples(nodes):
    assert abs(nodal_asymptotic(E2, 40, 35) - nodes["E2", 40].nodes[34]) <= 5e-3
    assert abs(nodal_asymptotic(E1, 40, 5) - nodes["E1", 40].nodes[4]) <= 5e-3


def _max_gap(spec, ns, n, signs="printed"):
    k = min(ns.count, n)
    return max(abs(ns.nodes[j - 1] - nodal_asymptotic(spec, n, j, signs)) for j in range(1, k + 1))


@pytest.mark.parametrize("name,spec", [("E1", E1), ("E2", E2)])
def test_nodal_agreement_decays(nodes, name, spec):
    assert _max_gap(spec, nodes[name, 40], 40) < 0.5 * _max_gap(spec, nodes[name, 20], 20)


def test_initial_data_signs_tighter(nodes):
    # with signs matching the initial data the n = 40 gap is an order smaller
    printed = _max_gap(E2, nodes["E2", 40], 40)
    consistent = _max_gap(E2, nodes["E2", 40], 40, "initial-data")
    assert consistent < printed / 10


def test_node_index_fn():
    ns = find_nodes(T0, find_eigenvalue(T0, 40))
    assert node_index_fn(ns, 0.05) == 1
    assert node_index_fn(ns, 0.0) == 0
    assert node_index_fn(ns, math.pi) == ns.count
    with pytest.raises(ValueError):
        node_index_fn(ns, -0.1)
