import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wrobust import protocols as pr
from wrobust.channels import apply_all, check_density, make_channel
from wrobust.linalg import projector
from wrobust.measures import Bipartition, negativity
from wrobust.reduction import neg_ad
from wrobust.states import decode_unitary, excitation, ghz, w, w_asymmetric, zeros

P_GRID = [round(0.1 * i, 10) for i in range(11)]
seeds = st.integers(0, 2**32 - 1)


def assert_same_ray(a, b, atol=1e-10):
    np.testing.assert_allclose(projector(a), projector(b), atol=atol)


def random_input(rng):
    return pr.InputQubit.from_vector(oracles.haar_pure_qubit(rng))


def test_protocol_run_validation():
    with pytest.raises(ValueError):
        pr.ProtocolRun("cluster", 3, 0.1)
    with pytest.raises(ValueError):
        pr.ProtocolRun("ghz", 3, 0.1, stage="relay")
    with pytest.raises(ValueError):
        pr.ProtocolRun("ghz", 1, 0.1)
    with pytest.raises(ValueError):
        pr.ProtocolRun("ghz", 10, 0.1)
    with pytest.raises(ValueError):
        pr.ProtocolRun("wa", 3, 1.2)
    assert pr.ProtocolRun("wa", 3, 0.1, "ad").channel == "amplitude_damping"


def test_input_qubit_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(10):
        v = oracles.haar_pure_qubit(rng)
        assert_same_ray(pr.InputQubit.from_vector(v).vector, v, atol=1e-14)
    np.testing.assert_allclose(pr.InputQubit(0, 0).vector, [1, 0])


def test_pauli_states_form_a_2_design():
    # second moment of a 2-design equals the Haar value (I + SWAP) / 6
    m = sum(np.kron(projector(v), projector(v)) for v in pr.PAULI_STATES) / 6
    np.testing.assert_allclose(m, (np.eye(4) + pr.SWAP) / 6, atol=1e-15)


def test_bell_measure_textbook_teleportation():
    rng = np.random.default_rng(1)
    psi = oracles.haar_pure_qubit(rng)
    rho = projector(np.kron(psi, pr.BELL["phi+"][0]))
    branches = pr.bell_measure(rho, (1, 2), 3)
    assert [b.bell_index for b in branches] == ["phi+", "phi-", "psi+", "psi-"]
    for b in branches:
        assert abs(b.probability - 0.25) < 1e-12
        c = pr._correction(b.a1, b.a2)
        fixed = c @ b.conditional_state @ c.conj().T
        assert abs(psi.conj() @ fixed @ psi - 1) < 1e-12


def test_bell_measure_degenerate_branch():
    rho = projector(np.kron(pr.BELL["phi+"][0], [1, 0]))
    branches = pr.bell_measure(rho, (1, 2), 3)
    assert branches[0].probability == pytest.approx(1)
    assert all(b.conditional_state is None and b.probability == 0 for b in branches[1:])


def _post_states(resource, nb, psi):
    rho = np.kron(projector(psi), projector(pr.resource_state(resource, nb)))
    return {b.bell_index: b for b in pr.bell_measure(rho, (1, 2), nb + 2)}


@pytest.mark.parametrize("nb", [2, 3, 4])
def test_ghz_post_measurement_states(nb):
    a, b = 0.6, 0.8j
    zero, one = zeros(nb), np.flip(zeros(nb))
    out = _post_states("ghz", nb, np.array([a, b]))
    want = {
        "phi+": a * zero + b * one,
        "phi-": a * zero - b * one,
        "psi+": a * one + b * zero,
        "psi-": a * one - b * zero,
    }
    for name, vec in want.items():
        assert abs(out[name].probability - 0.25) < 1e-12
        np.testing.assert_allclose(out[name].conditional_state, projector(vec), atol=1e-12)


@pytest.mark.parametrize("nb", [2, 3, 4])
def test_wa_post_measurement_states(nb):
    a, b = 0.6, 0.8j
    zero, wn = zeros(nb), w(nb)
    out = _post_states("wa", nb, np.array([a, b]))
    want = {
        "phi+": a * zero + b * wn,
        "phi-": a * zero - b * wn,
        "psi+": a * wn + b * zero,
        "psi-": a * wn - b * zero,
    }
    for name, vec in want.items():
        np.testing.assert_allclose(out[name].conditional_state, projector(vec), atol=1e-12)


def test_resource_states():
    np.testing.assert_allclose(pr.resource_state("ghz", 3), ghz(4))
    wa = pr.resource_state("wa", 3)
    assert_same_ray(wa, (np.kron([0, 1], w(3)) + zeros(4)) / np.sqrt(2))
    with pytest.raises(ValueError):
        pr.resource_state("cluster", 3)


@settings(max_examples=20, deadline=None)
@given(seed=seeds, nb=st.integers(2, 4), resource=st.sampled_from(["ghz", "wa"]), stage=st.sampled_from(["teleport", "split"]))
def test_perfect_resource_is_perfect(seed, nb, resource, stage):
    inp = random_input(np.random.default_rng(seed))
    run = pr.ProtocolRun(resource, nb, 0.0, "ad", stage)
    f = pr.run_teleport(run, inp) if stage == "teleport" else pr.run_split(run, inp)
    assert abs(f - 1) < 1e-10


def test_average_fidelity_examples():
    run = pr.ProtocolRun("wa", 3, 0.3, "ad", "teleport")
    assert abs(pr.avg_fidelity(run) - 2.49 / 3) < 1e-12
    for resource in ("ghz", "wa"):
        for stage in ("teleport", "split"):
            for nb in (2, 3):
                f = pr.avg_fidelity(pr.ProtocolRun(resource, nb, 1.0, "ad", stage))
                assert abs(f - 2 / 3) < 1e-12


@pytest.mark.parametrize("resource,stage", [("ghz", "teleport"), ("wa", "teleport"), ("ghz", "split")])
@pytest.mark.parametrize("nb", [2, 3, 4])
def test_simulation_matches_closed_form(resource, stage, nb):
    for p in P_GRID:
        run = pr.ProtocolRun(resource, nb, p, "ad", stage)
        assert abs(pr.avg_fidelity(run) - pr.f_closed(resource, stage, p, nb)) < 1e-9


@pytest.mark.parametrize("nb", [2, 3, 4])
def test_wa_split_equals_wa_teleport(nb):
    """Decoding is an isometry on span{|0..0>, |W>}, where AD keeps the Bobs' support."""
    for p in P_GRID:
        split = pr.avg_fidelity(pr.ProtocolRun("wa", nb, p, "ad", "split"))
        assert abs(split - pr.f_closed("wa", "teleport", p, nb)) < 1e-12


def test_wa_split_literal_formula_values():
    assert pr.f_closed("wa", "split", 0.0, 3) == 1
    assert abs(pr.f_closed("wa", "split", 0.6, 3) - 0.8) < 1e-15


@pytest.mark.parametrize("resource,stage", [("ghz", "split"), ("wa", "split"), ("wa", "teleport")])
def test_receiver_choice_is_immaterial(resource, stage):
    nb, p = 3, 0.35
    run = pr.ProtocolRun(resource, nb, p, "ad", stage)
    ref = pr.avg_fidelity(run, receiver=1)
    for r in (2, 3):
        assert abs(pr.avg_fidelity(run, receiver=r) - ref) < 1e-12
    with pytest.raises(ValueError):
        pr.avg_fidelity(run, receiver=4)


@pytest.mark.parametrize("resource,stage", [("ghz", "teleport"), ("wa", "split")])
def test_monte_carlo_agrees_with_design_average(resource, stage):
    run = pr.ProtocolRun(resource, 3, 0.4, "ad", stage)
    samples = pr.haar_fidelity_samples(run, 100_000, np.random.default_rng(7))
    sigma = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - pr.avg_fidelity(run)) < 3 * sigma


def test_process_map_reproduces_direct_fidelity():
    run = pr.ProtocolRun("ghz", 2, 0.25, "ad", "split")
    m = pr.process_map(run)
    rng = np.random.default_rng(3)
    for _ in range(5):
        inp = random_input(rng)
        v = inp.vector
        out = np.einsum("i,j,ijab->ab", v, v.conj(), m)
        assert abs((v.conj() @ out @ v).real - pr.run_split(run, inp)) < 1e-12


@pytest.mark.parametrize("nb", [2, 3])
def test_ghz_split_branches(nb):
    run = pr.ProtocolRun("ghz", nb, 0.3, "ad", "split")
    inp = random_input(np.random.default_rng(nb))
    branches = pr.ghz_split_branches(run, inp)
    assert len(branches) == 4 * 2 ** (nb - 1)
    assert abs(sum(b.probability for b in branches) - 1) < 1e-10
    f = 0.0
    for b in branches:
        if b.conditional_state is not None:
            check_density(b.conditional_state)
            f += b.probability * (inp.vector.conj() @ b.conditional_state @ inp.vector).real
    assert abs(f - pr.run_split(run, inp)) < 1e-12
    with pytest.raises(ValueError):
        pr.ghz_split_branches(pr.ProtocolRun("wa", nb, 0.3), inp)


@settings(max_examples=15, deadline=None)
@given(seed=seeds, p=st.floats(0, 1), resource=st.sampled_from(["ghz", "wa"]))
def test_bell_branches_are_valid(seed, p, resource):
    run = pr.ProtocolRun(resource, 3, p, "ad")
    inp = random_input(np.random.default_rng(seed))
    rho = np.kron(projector(inp.vector), pr.noisy_resource(run))
    branches = pr.bell_measure(rho, (1, 2), 5)
    assert abs(sum(b.probability for b in branches) - 1) < 1e-10
    for b in branches:
        if b.conditional_state is not None:
            check_density(b.conditional_state)


@settings(max_examples=15, deadline=None)
@given(p=st.floats(0, 1), resource=st.sampled_from(["ghz", "wa"]), stage=st.sampled_from(["teleport", "split"]), channel=st.sampled_from(["ad", "dephasing"]))
def test_average_fidelity_in_unit_interval(p, resource, stage, channel):
    f = pr.avg_fidelity(pr.ProtocolRun(resource, 2, p, channel, stage))
    assert -1e-12 <= f <= 1 + 1e-12


def test_closed_form_examples():
    for n in (2, 10, 49):
        assert abs(pr.f_closed("ghz", "teleport", 1.0, n) - 2 / 3) < 1e-15
    assert abs(pr.f_closed("ghz", "teleport", 0.5, 49) - 1 / 3) < 1e-6
    assert pr.f_closed("wa", "teleport", 0.0, 5) == 1
    with pytest.raises(ValueError):
        pr.f_closed("ghz", "relay", 0.5, 3)
    with pytest.raises(ValueError):
        pr.f_closed("ghz", "teleport", 1.5, 3)


def test_ghz_dips_below_classical_wa_never_does():
    grid = np.linspace(0, 1, 101)
    for n in (10, 20, 49):
        assert min(pr.f_closed("ghz", "teleport", p, n) for p in grid) < 2 / 3
    for n in (2, 10, 49):
        assert min(pr.f_closed("wa", "teleport", p, n) for p in grid) >= 2 / 3 - 1e-15


def test_fmax_bound():
    assert pr.fmax_bound(0.5) == 1
    assert abs(pr.fmax_bound(0.0) - 2 / 3) < 1e-15
    with pytest.raises(ValueError):
        pr.fmax_bound(-0.1)


@pytest.mark.parametrize("nb", [2, 3, 4, 5])
def test_wa_teleport_saturates_bound(nb):
    for p in P_GRID:
        run = pr.ProtocolRun("wa", nb, p, "ad", "teleport")
        bound = pr.fmax_bound(pr.resource_negativity(run))
        assert abs(bound - pr.avg_fidelity(run)) < 1e-8
        assert abs(bound - pr.f_closed("wa", "teleport", p, nb)) < 1e-9


def test_printed_wa_negativity_decay():
    """The printed resource (|0>|W> + |1>|0..0>) decays like the balanced AD cut."""
    for nb in (2, 3, 4):
        for p in P_GRID:
            rho = apply_all(make_channel("ad", p), projector(w_asymmetric(nb)))
            assert abs(negativity(rho, Bipartition({1}, nb + 1)) - neg_ad(p, 4, 2)) < 1e-10


def test_wa_decoded_state_lands_on_receiver():
    nb = 3
    a, b = 0.6, 0.8
    vec = a * zeros(nb) + b * w(nb)
    assert_same_ray(decode_unitary(nb) @ vec, a * zeros(nb) + b * excitation(nb, 1))
