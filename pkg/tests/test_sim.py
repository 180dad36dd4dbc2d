"""Pauli-frame simulator: circuit structure, propagation, determinism and
bound dominance."""
import random

import numpy as np
import pytest

from artifact.engine import (
    NoiseModel,
    NoiseParams,
    NoiseProfile,
    build_profile,
    measurement_error_bound,
)
from artifact.sim import (
    Mode,
    build_bp_circuit,
    build_cnot_gadget,
    build_purification_circuit,
    propagate_faults,
    run_trials,
)

DEPOL = NoiseModel.IndependentDepolarizing


def params(eps):
    return NoiseParams(epsilon=eps, model=DEPOL)


# ---------------------------------------------------------------------------
# Circuit structure


def test_bp0_has_three_operations():
    circuit = build_bp_circuit(0)
    assert circuit.op_count == 3
    assert len(circuit.out_blocks) == 2


def test_bp1_operation_count_is_72():
    circuit = build_bp_circuit(1)
    assert circuit.op_count == 72
    # 12 base Bell pairs (24 preparations + 12 CNOTs) plus 20 block-level
    # CNOTs and 16 measurements.
    own = [op for op in circuit.ops if op[0] != "decode"]
    assert sum(1 for op in own if op[0] == "cnot") == 12 + 20
    assert sum(1 for op in own if op[0].startswith("measure")) == 16
    assert sum(1 for op in own if op[0].startswith("prep")) == 24


def test_bp2_uses_twelve_level1_subpreps():
    circuit = build_bp_circuit(2)
    assert len(circuit.sub_preps) == 12
    assert all(sp.circuit.j == 1 for sp in circuit.sub_preps)
    assert circuit.op_count == 144 + 12 * 72


def test_bp_rejects_unsupported_level():
    with pytest.raises(ValueError):
        build_bp_circuit(4)


def test_gadget_structure():
    circuit = build_cnot_gadget(1)
    assert len(circuit.sub_preps) == 4
    assert all(sp.circuit.j == 1 for sp in circuit.sub_preps)
    roles = sorted(t.role for t in circuit.teleports)
    assert roles == ["lead_c", "lead_t", "trail_c", "trail_t"]
    with pytest.raises(ValueError):
        build_cnot_gadget(3)


def test_gadget_measured_qubit_cnot_load():
    # Each measured qubit sees at most 2 gadget-level CNOTs before its
    # measurement (the 3-epsilon accounting).
    circuit = build_cnot_gadget(1)
    own = [op for op in circuit.ops if op[0] != "decode"]
    measured = {op[1] for op in own if op[0].startswith("measure")}
    for q in measured:
        touches = sum(1 for op in own if op[0] == "cnot" and q in op[1:])
        assert touches <= 2


# ---------------------------------------------------------------------------
# Zero noise and determinism


@pytest.mark.parametrize(
    "circuit",
    [build_bp_circuit(0), build_bp_circuit(1), build_cnot_gadget(1),
     build_purification_circuit()],
    ids=["bp0", "bp1", "gadget1", "purify"],
)
def test_zero_noise_trivial(circuit):
    mode = Mode.GadgetAccept if circuit.kind == "gadget" else Mode.PostselectBP
    stats = run_trials(circuit, params(0.0), 500, seed=1, mode=mode)
    assert stats.rates["acceptance"][0] == 1.0
    for name, (rate, _) in stats.rates.items():
        if name != "acceptance":
            assert rate == 0.0


def test_run_trials_rejects_zero_trials():
    with pytest.raises(ValueError):
        run_trials(build_bp_circuit(1), params(1e-3), 0, seed=1)


def test_determinism_and_seed_sensitivity():
    circuit = build_bp_circuit(1)
    a = run_trials(circuit, params(3e-3), 20_000, seed=42)
    b = run_trials(circuit, params(3e-3), 20_000, seed=42)
    c = run_trials(circuit, params(3e-3), 20_000, seed=43)
    assert a == b
    assert a.rates != c.rates


def test_csv_schema():
    stats = run_trials(build_bp_circuit(0), params(1e-3), 1000, seed=5)
    lines = stats.csv_lines()
    assert lines[0] == "circuit,j,epsilon,trials,accepted,rate-name,rate,halfwidth"
    assert any(line.split(",")[5] == "acceptance" for line in lines[1:])


# ---------------------------------------------------------------------------
# Propagation correctness


def reference_propagation(ops, faults):
    """Independent fold of the conjugation rules over the op list."""
    xs, zs = set(), set()
    per_op = {}
    for idx, typ, slot in faults:
        per_op.setdefault(idx, []).append((typ, slot))
    for idx, op in enumerate(ops):
        if op[0] == "cnot":
            _, c, t = op
            if c in xs:
                xs ^= {t}
            if t in zs:
                zs ^= {c}
        elif op[0].startswith("prep"):
            xs.discard(op[1])
            zs.discard(op[1])
        for typ, slot in per_op.get(idx, ()):
            q = op[1 + slot]
            (xs if typ == "x" else zs).symmetric_difference_update({q})
    return xs, zs


def test_single_fault_propagation_exhaustive():
    circuit = build_bp_circuit(1)
    ops = circuit.ops
    for idx, op in enumerate(ops):
        if op[0] == "decode":
            continue
        slots = range(2) if op[0] == "cnot" else range(1)
        for slot in slots:
            for typ in ("x", "z"):
                xf, zf = propagate_faults(circuit, [(idx, typ, slot)])
                xs, zs = reference_propagation(ops, [(idx, typ, slot)])
                assert set(np.flatnonzero(xf)) == xs
                assert set(np.flatnonzero(zf)) == zs


def test_frame_linearity():
    circuit = build_bp_circuit(1)
    ops = circuit.ops
    rng = random.Random(9)
    locations = [
        (idx, typ, slot)
        for idx, op in enumerate(ops)
        if op[0] != "decode"
        for slot in (range(2) if op[0] == "cnot" else range(1))
        for typ in ("x", "z")
    ]
    for _ in range(50):
        sample = rng.sample(locations, 6)
        a, b = sample[:3], sample[3:]
        xa, za = propagate_faults(circuit, a)
        xb, zb = propagate_faults(circuit, b)
        xu, zu = propagate_faults(circuit, a + b)
        assert np.array_equal(xu, xa ^ xb)
        assert np.array_equal(zu, za ^ zb)


# ---------------------------------------------------------------------------
# Analytic-bound dominance (smoke scale; the full grid runs in the
# acceptance suite)


def bp_bounds(j, eps):
    profiles = build_profile(params(eps), j)
    profile, acceptance = profiles[j]
    meas = measurement_error_bound(profile)
    lower = NoiseProfile(
        level_j=j,
        strengths={m: profile.strengths[m][:-1] + [0.0] for m in ("x", "z")},
    )
    meas_lower = measurement_error_bound(lower)
    floor = (1 - eps) ** 72 if j == 1 else acceptance
    return profile, floor, meas, meas_lower


def three_sigma(stats, name):
    return 3.0 * stats.rates[name][1] / 1.96


def test_bp1_dominance_smoke():
    eps = 1e-2
    stats = run_trials(build_bp_circuit(1), params(eps), 60_000, seed=7)
    profile, floor, meas, meas_lower = bp_bounds(1, eps)
    assert stats.rates["acceptance"][0] >= floor - three_sigma(stats, "acceptance")
    for m in ("x", "z"):
        name = f"bell_err_{m}"
        assert stats.rates[name][0] <= 2 * meas[m] + three_sigma(stats, name)
        joint = f"joint_{m}"
        bound = meas_lower[m] * 2 * profile.strengths[m][-1]
        assert stats.rates[joint][0] <= bound + three_sigma(stats, joint)


def test_purification_rates():
    eps = 1e-2
    stats = run_trials(build_purification_circuit(), params(eps), 100_000, seed=3)
    acc = stats.rates["acceptance"]
    assert acc[0] >= 1 - 3 * eps - 3 * acc[1] / 1.96
    rate, hw = stats.rates["cond_x_rate"]
    assert rate <= 8 / 15 * eps + 5 * eps ** 2 + 3 * hw / 1.96


def test_gadget_fail_bounded():
    from artifact.engine import gadget_noise

    eps = 3e-3
    stats = run_trials(
        build_cnot_gadget(1), params(eps), 40_000, seed=17, mode=Mode.GadgetAccept
    )
    profile, _ = build_profile(params(eps), 1)[1]
    eps_css, _ = gadget_noise(profile, params(eps))
    rate, hw = stats.rates["gadget_fail"]
    assert rate <= eps_css + 3 * hw / 1.96
