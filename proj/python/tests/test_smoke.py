import json

import numpy as np
import pytest

import edrlab


def centered(n, dx, sigma):
    return edrlab.GridSpec(n, dx).gaussian(0.0, 0.0, sigma)


def test_von_neumann_saturates_predictive_bound():
    proc = edrlab.model("vonneumann", n=64, dx=0.4, obj_dx=1 / 32, sigma=1.0)
    r = proc.report(centered(64, 1 / 32, 0.125))
    assert r["epsilon"] == pytest.approx(1.0, abs=1e-9)
    assert r["delta"] == pytest.approx(r["epsilon"], abs=1e-12)
    assert r["prod_delta_eta"] == pytest.approx(0.5, rel=1e-8)
    assert r["deficit"] < 1e-8


def test_swap_is_error_free_and_born():
    proc = edrlab.model("swap", n=8, dx=0.5, sigma=0.5)
    psi = centered(8, 0.5, 0.5)
    assert proc.epsilon(psi) < 1e-10
    deviation, is_born = proc.born_check()
    assert is_born and deviation < 1e-8


def test_povm_is_complete_and_positive():
    proc = edrlab.model("haar", n=4, seed=7)
    elements = [e for _, e in proc.povm()]
    total = sum(elements)
    assert np.allclose(total, np.eye(4), atol=1e-10)
    for e in elements:
        assert np.linalg.eigvalsh(e).min() > -1e-10
    rng = np.random.default_rng(1)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    assert sum(proc.probabilities(psi)) == pytest.approx(1.0, abs=1e-10)


def test_identity_process_cannot_be_unbiased():
    sol = edrlab.model("identity", n=4, sigma=0.5).solve_unbiased_f()
    assert not sol["feasible"]
    assert sol["residual"] > 1.0


def test_min_delta_matches_conditional_mean():
    proc = edrlab.model("vonneumann", n=64, dx=0.4, obj_dx=1 / 32, sigma=1.0)
    out = proc.min_delta_f(centered(64, 1 / 32, 0.125))
    expected = 0.125 / np.sqrt(1 + 0.125**2)
    assert out["delta_min"] == pytest.approx(expected, rel=1e-3)


def test_json_round_trip(tmp_path):
    proc = edrlab.model("haar", n=4, seed=3)
    path = tmp_path / "proc.json"
    proc.save(path)
    doc = json.loads(path.read_text())
    assert doc["format"] == "edrlab-process"
    again = edrlab.load(path)
    assert np.allclose(again.unitary(), proc.unitary(), atol=0)


def test_errors_are_raised():
    with pytest.raises(edrlab.EdrlabError, match="DIM_MISMATCH"):
        edrlab.model("swap", n=8, obj_n=4)
    proc = edrlab.model("swap", n=8, dx=0.5, sigma=0.5)
    with pytest.raises(edrlab.EdrlabError, match="UNNORMALIZED"):
        proc.epsilon(np.ones(8, dtype=complex))


def test_cli_entry_point():
    code, out, _ = edrlab.run_cli(
        ["report", "--model", "swap", "--grid-n", "8", "--dx", "0.5",
         "--probe-sigma", "0.5", "--psi", "0,0,0.5", "--format", "json"])
    assert code == 0
    row = json.loads(out)["rows"][0]
    assert row["epsilon[length]"] < 1e-10
    code, _, err = edrlab.run_cli(["report", "--model", "swap", "--grid-n", "4", "--obj-n", "8"])
    assert code == 3 and "DIM_MISMATCH" in err
