import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wrobust import reduction as red
from wrobust.channels import apply_all, dephasing
from wrobust.linalg import partial_trace, permute_qubits, projector
from wrobust.measures import Bipartition, concurrence_mixed_2q, generalized_concurrence_pure, global_tangle_sum, negativity
from wrobust.states import WLikeSpec, w

P_GRID = [round(0.1 * i, 10) for i in range(11)]
S2 = 2**-0.5


def test_cutspec_validation():
    assert red.CutSpec(5, 2).bipartition.side_a == {1, 2}
    for n, k in ((4, 0), (4, 4), (1, 1)):
        with pytest.raises(ValueError):
            red.CutSpec(n, k)


def test_w2_state_examples():
    np.testing.assert_allclose(red.w2_state(red.CutSpec(6, 3)), [0, S2, S2, 0], atol=1e-15)
    np.testing.assert_allclose(red.w2_state(red.CutSpec(4, 1)), [0, math.sqrt(0.75), 0.5, 0], atol=1e-15)
    for n in range(2, 9):
        for k in range(1, n):
            assert abs(np.linalg.norm(red.w2_state(red.CutSpec(n, k))) - 1) < 1e-15


def test_reduced_model_ad_limits():
    cut = red.CutSpec(5, 2)
    np.testing.assert_allclose(red.reduced_model_ad(cut, 0), projector(red.w2_state(cut)), atol=1e-15)
    one = red.reduced_model_ad(cut, 1)
    np.testing.assert_allclose(one, np.diag([1, 0, 0, 0]), atol=1e-15)
    assert negativity(one, Bipartition({1}, 2)) == 0.0


def test_reduced_dephasing_limits():
    cut = red.CutSpec(5, 2)
    pure = negativity(red.w2_state(cut), Bipartition({1}, 2))
    assert abs(red.reduced_entanglement_dephasing(cut, 0, "negativity") - pure) < 1e-15
    assert red.reduced_entanglement_dephasing(cut, 1, "concurrence") == 0


@pytest.mark.parametrize("n", range(3, 8))
def test_side_local_gates_leave_boundary_model(n):
    """In the boundary frame the evolved state is (two-qubit model) x vacuum."""
    for k in range(1, n):
        cut = red.CutSpec(n, k)
        for p in (0.0, 0.35, 0.8):
            framed = red.to_boundary_frame(red.evolved_w(n, p, "ad"), cut)
            pair, residual = red.split_boundary(framed, cut)
            assert residual < 1e-12
            np.testing.assert_allclose(pair, red.reduced_model_ad(cut, p), atol=1e-12)


def test_to_boundary_frame_preserves_negativity():
    cut = red.CutSpec(6, 2)
    rho = red.evolved_w(6, 0.3, "dephasing")
    framed = red.to_boundary_frame(rho, cut)
    assert abs(negativity(rho, cut.bipartition) - negativity(framed, cut.bipartition)) < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_povm_completeness(m):
    a1, a2 = red.povm_elements(m)
    np.testing.assert_allclose(a1.conj().T @ a1 + a2.conj().T @ a2, np.eye(2**m), atol=1e-15)
    np.testing.assert_allclose(a1 @ a1, a1, atol=1e-15)


@pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (5, 2), (6, 3)])
def test_povm_branches(n, k):
    """A1 leaves a separable (diagonal) boundary state; A2 keeps p' E(W2) in total."""
    p = 0.45
    cut = red.CutSpec(n, k)
    framed = red.to_boundary_frame(red.evolved_w(n, p, "dephasing"), cut)
    order = [k, k + 1] + [q for q in range(1, n + 1) if q not in (k, k + 1)]
    moved = permute_qubits(framed, order, n)
    a1, a2 = red.povm_elements(n - 2)
    b1 = np.kron(np.eye(4), a1) @ moved @ np.kron(np.eye(4), a1)
    pair1 = partial_trace(b1, [1, 2], n)
    np.testing.assert_allclose(pair1, np.diag(np.diag(pair1)), atol=1e-13)
    assert negativity(b1, Bipartition({1}, n)) == 0.0
    b2 = np.kron(np.eye(4), a2) @ moved @ np.kron(np.eye(4), a2)
    pair2 = partial_trace(b2, [1, 2], n)
    prob = np.trace(pair2).real
    want = (1 - p) ** 2 * concurrence_mixed_2q(projector(red.w2_state(cut)))
    assert abs(prob * concurrence_mixed_2q(pair2 / prob) - want) < 1e-12


def test_closed_form_examples():
    for n in (2, 4, 6, 10, 500):
        assert red.neg_dephasing(0, n, n // 2) == 0.5
        assert abs(red.neg_ad(0, n, n // 2) - 0.5) < 1e-15
    assert abs(red.neg_ad(0.5, 4, 1) - (-0.25 + math.sqrt(7) / 8)) < 1e-15
    for n, k in ((3, 1), (7, 3)):
        assert red.neg_ad(1, n, k) == 0
    assert red.conc_dephasing(0, 2, 1) == 1
    for n in (3, 8, 50):
        for k in range(1, n):
            for p in (0.1, 0.55, 0.9):
                assert red.conc_ad(p, n, k) / red.conc_ad(0, n, k) == pytest.approx(1 - p, abs=1e-15)
    cut = red.CutSpec(6, 2)
    assert abs(red.conc_ad(0.3, 6, 2) - concurrence_mixed_2q(red.reduced_model_ad(cut, 0.3))) < 1e-10


def test_brute_negativity_spot_value():
    rho = red.evolved_w(4, 0.5, "ad")
    assert abs(oracles.negativity(rho, {1}, 4) - 0.0807189138830738) < 1e-12


def test_decay_factors():
    for n in (4, 10, 100):
        f = red.decay_factors(0.5, n, n // 2)
        assert abs(f["epsilon_AD"] - (-0.5 + math.sqrt(0.5))) < 1e-12
    f = red.decay_factors(0, 5, 2)
    assert f["epsilon_D"] == 1 and f["delta_AD"] == 1 and f["epsilon_AD"] == 1
    ratio = red.epsilon_ad(0.5, 100, 1) * 10 / (red.epsilon_ad(0.5, 400, 1) * 20)
    assert abs(ratio - 1) < 0.03
    for p in P_GRID:
        values = {(red.decay_factors(p, n, k)["delta_AD"], red.decay_factors(p, n, k)["epsilon_D"]) for n in range(2, 12) for k in range(1, n)}
        assert values == {(1 - p, (1 - p) ** 2)}
    with pytest.raises(ValueError):
        red.decay_factors(0.2, 4, 4)


def test_closed_forms_positive_before_full_decay():
    for n in (2, 5, 40):
        for k in range(1, n):
            for p in np.linspace(0, 0.99, 12):
                for label in ("amplitude_damping", "dephasing"):
                    for m in ("negativity", "concurrence"):
                        assert red.closed_form(label, m, p, n, k) > 0


def test_initial_negativity_decreases_with_n():
    values = [red.neg_ad(0, n, 1) for n in range(2, 60)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_closed_form_rejects_unknown_measure():
    with pytest.raises(ValueError):
        red.closed_form("ad", "mw", 0.1, 4, 1)


@pytest.mark.parametrize("channel", ["amplitude_damping", "dephasing"])
@pytest.mark.parametrize("measure", ["negativity", "concurrence"])
def test_cross_check_small_grid(channel, measure):
    for n in range(2, 7):
        for k in range(1, n):
            for p in (0.0, 0.3, 0.7, 1.0):
                report = red.cross_check(n, k, p, channel, measure)
                assert report.max_abs_error < 1e-8
                assert set(report.timings) == {"closed", "reduced", "brute"}


def test_cross_check_examples():
    r = red.cross_check(6, 2, 0.4, "ad", "negativity")
    assert abs(r.brute_force - r.closed_form) < 1e-8
    red.cross_check(5, 1, 0.7, "dephasing", "concurrence")
    for n, k in ((5, 2), (7, 3)):
        r = red.cross_check(n, k, 0.0, "ad", "negativity")
        assert abs(r.brute_force - math.sqrt(k * (n - k)) / n) < 1e-12


def test_cross_check_refuses_large_n():
    with pytest.raises(ValueError, match="n <= 10"):
        red.cross_check(11, 1, 0.1, "ad", "negativity")
    with pytest.raises(ValueError):
        red.brute_force("ad", "negativity", 0.1, 11, 1)


def test_cross_check_reports_disagreement(monkeypatch):
    monkeypatch.setitem(red.CLOSED_FORMS, ("amplitude_damping", "negativity"), lambda p, n, k: 0.123)
    with pytest.raises(red.CrossCheckError):
        red.cross_check(4, 1, 0.2, "ad", "negativity")


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), p=st.floats(0, 1), label=st.sampled_from(["amplitude_damping", "dephasing"]))
def test_mw_decay_law(seed, n, p, label):
    spec = WLikeSpec.random(n, np.random.default_rng(seed))
    brute = global_tangle_sum(red.evolved_w_like(spec, p, label))
    assert abs(brute - red.mw_closed(spec, p, label)) < 1e-9


def test_mw_closed_examples():
    spec = WLikeSpec.uniform(3)
    assert abs(red.mw_closed(spec, 0, "ad") - 8 / 9) < 1e-15
    assert abs(red.mw_closed(spec, 0.5, "ad") - 2 / 9) < 1e-15
    with pytest.raises(ValueError):
        red.mw_closed(spec, 0.5, "depolarizing")


def test_generalized_concurrence_decay():
    for n in range(2, 7):
        g0 = generalized_concurrence_pure(w(n))
        for p in (0.0, 0.25, 0.6):
            assert abs(red.generalized_concurrence_decayed(n, p, "ad") - (1 - p) * g0) < 1e-12
            assert abs(red.generalized_concurrence_decayed(n, p, "dephasing") - (1 - p) ** 2 * g0) < 1e-12
            for label in ("ad", "dephasing"):
                a = red.generalized_concurrence_decayed(n, p, label, route="reduced")
                b = red.generalized_concurrence_decayed(n, p, label, route="closed")
                assert abs(a - b) < 1e-12
    with pytest.raises(ValueError):
        red.generalized_concurrence_decayed(4, 0.1, "ad", route="nope")
    with pytest.raises(ValueError):
        red.generalized_concurrence_decayed(red.GCONC_SUBSET_MAX_N + 1, 0.1, "ad")


def test_dephasing_brute_matches_literal_channel():
    """The brute route uses the same state as applying the Kraus set qubit by qubit."""
    n = 4
    rho = projector(w(n))
    for q in range(1, n + 1):
        rho = oracles.apply_kraus_full(dephasing(0.3).kraus_ops, rho, q, n)
    np.testing.assert_allclose(red.evolved_w(n, 0.3, "dephasing"), rho, atol=1e-14)
    np.testing.assert_allclose(apply_all(dephasing(0.3), projector(w(n))), rho, atol=1e-14)


def test_negativity_reduction_any_side_choice():
    """Which qubits sit on each side does not matter for W states."""
    n, p = 5, 0.4
    rho = red.evolved_w(n, p, "ad")
    want = red.neg_ad(p, n, 2)
    for side in itertools.combinations(range(1, n + 1), 2):
        assert abs(negativity(rho, Bipartition(side, n)) - want) < 1e-10

