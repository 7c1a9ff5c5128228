import math

import pytest

import tpad

ADDER = """.inputs a0 a1 b0 b1
.outputs s0 s1 c
s0 = XOR(a0, b0)
g0 = AND(a0, b0)
p1 = XOR(a1, b1)
s1 = XOR(p1, g0)
g1 = AND(a1, b1)
t1 = AND(p1, g0)
c = OR(g1, t1)
"""

STAGE2 = """.inputs p q r
.outputs u v
u = AND(p, q)
v = XOR(q, r)
"""


def test_parity_code_shape_and_determinism():
    h = tpad.sample_parity_code(10, 4, seed=3)
    assert (h.k, h.r) == (10, 4)
    assert len(h.rows()) == 4 and all(len(row) == 10 for row in h.rows())
    assert h == tpad.sample_parity_code(10, 4, seed=3)
    assert tpad.read_matrix(h.write()) == h


def test_uniform_weight_detection_near_closed_form():
    detected, trials = tpad.uniform_weight_detection(100, 4, 20000, seed=2)
    assert abs(detected / trials - (1 - 2**-4)) < 0.01


def test_analytic_helpers():
    assert tpad.cp_attack_probability(0.1, 64) == pytest.approx(0.9**64)
    assert tpad.per_sb_attack_probability(0.5, 64) == pytest.approx(2**-64)
    assert tpad.destructive_detection_probability(10000, 1, 9901) >= 0.99
    assert tpad.destructive_detection_probability(10000, 1, 9900) < 0.99


def test_half_precision_fft():
    assert tpad.half_bits(1.0) == 0x3C00
    assert tpad.half_value(0x7BFF) == 65504.0
    out = tpad.fft([1, 0, 0, 0, 0, 0, 0, 0])
    assert out == [1 + 0j] * 8
    with pytest.raises(tpad.TpadError):
        tpad.fft([1, 2, 3])


def test_fft_campaign_permutations_and_selftest():
    rep = tpad.fft_campaign(32, "permutation", trials=100, calibration=300)
    assert rep["rate"] == 1.0
    assert rep["false_positives"] == 0
    assert rep["selftest"] == "checker alive"
    zeroed = tpad.fft_campaign(32, "permutation", trials=50, calibration=300, zeroed=True)
    assert zeroed["detected"] == 0
    assert zeroed["selftest"] == "checker compromised"


def test_chip_campaigns(tmp_path):
    chip = tpad.build_chip(ADDER, r=4, t=1, seed=5)
    assert (chip.inputs, chip.outputs, chip.r) == (4, 3, 4)
    assert chip.campaign("none", trials=50)["detected"] == 0
    # Single-output flips are always caught; multi-output flips can land on a
    # codeword of this small code.
    assert chip.campaign("logic flip gate=f:s1 trigger=at_cycle:2", trials=50, cycles=4)["rate"] == 1.0
    assert chip.campaign("logic", trials=100)["rate"] > 0.5
    chip.save(str(tmp_path / "b"))
    again = tpad.load_chip(str(tmp_path / "b"))
    assert again.h_logic == chip.h_logic


def test_pipeline_localizes_logic_attack():
    rep = tpad.run_pipeline([ADDER, STAGE2], r=4, cycles=200, seed=2,
                            attacks=[(1, "logic flip gate=f:u trigger=at_cycle:40")])
    (outcome,) = rep["attacks"]
    assert outcome["first_detect"] == 40
    assert outcome["detected_by"] == ["chip1"]
    clean = tpad.run_pipeline([ADDER, STAGE2], r=4, cycles=2000, seed=2)
    assert clean["total_reports"] == 0
    assert len(clean["config_digest"]) == 64


def test_sweep_csv():
    csv = tpad.run_sweep("experiment = cp\nsweep = theta\nvalues = 0.05, 0.1\nx = 64\n")
    rows = [line.split(",") for line in csv.splitlines() if not line.startswith("#")]
    assert rows[0][:2] == ["theta", "value"]
    assert math.isclose(float(rows[1][1]), 0.95**64, rel_tol=1e-9)
    with pytest.raises(tpad.TpadError):
        tpad.run_sweep("experiment = cp\n")


def test_attack_format_round_trip():
    assert tpad.format_attack("pin flip pin=check:1") == "pin flip pin=check0:1"
