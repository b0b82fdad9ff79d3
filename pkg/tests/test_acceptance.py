"""Every acceptance criterion at its stated size and tolerance.

Each test prints one [PASS]/[FAIL] line; the lines are repeated in the
pytest terminal summary. Run directly (``python3 tests/test_acceptance.py``)
for just the lines.
"""
from spacetime_qlbm import validation as v
from spacetime_qlbm.spacetime import enumerate_vicinity


def test_criterion_01_cbs_nogo(report_line):
    r = report_line(v.check_cbs_nogo)
    assert abs(r.values["in"]) <= 1e-12
    assert abs(r.values["out"] - 0.5) <= 1e-12
    assert r.values["seconds"] < 1.0
    assert r.passed


def test_criterion_02_amplitude_nogo(report_line):
    r = report_line(v.check_amplitude_nogo, samples=100)
    assert r.values["worst"] <= 1e-12
    assert r.passed


def test_criterion_03_qubit_count(report_line):
    r = report_line(v.check_qubit_count, nt_max=8)
    assert r.values["n1"] == 20
    assert [enumerate_vicinity("D2Q4", n).num_qubits for n in range(9)] == [8 * n * n + 8 * n + 4 for n in range(9)]
    assert r.passed


def test_criterion_04_collision_unitarity(report_line):
    r = report_line(v.check_collision_unitarity, samples=50)
    assert r.values["worst"] <= 1e-12
    assert r.passed


def test_criterion_05_step_counts(report_line):
    assert report_line(v.check_step_counts, nt_max=6).passed


def test_criterion_06_streaming_oracle(report_line):
    r = report_line(v.check_streaming_oracle, windows=1000, nt_max=4)
    assert r.values["failures"] == 0
    assert r.passed


def test_criterion_07_deterministic_run(report_line):
    r = report_line(v.check_deterministic_run, windows=1000, nts=(1, 2, 3))
    assert r.values["failures"] == 0
    assert r.values["seconds"] < 60
    assert r.passed


def test_criterion_08_superposed_ensemble(report_line):
    r = report_line(v.check_superposed_ensemble, nts=(1, 2), max_events=8)
    assert r.values["worst"] <= 1e-9
    assert r.passed


def test_criterion_09_full_grid_figures(report_line):
    assert report_line(v.check_full_grid_figures).passed


def test_criterion_10_depth_bound(report_line):
    assert report_line(v.check_depth_bound, nt_max=8).passed


def test_criterion_11_engine_crossvalidation(report_line):
    r = report_line(v.check_engine_crossvalidation, circuits=500, max_qubits=12)
    assert r.values["worst"] <= 1e-10
    assert r.passed


if __name__ == "__main__":
    for res in v.run_checks():
        print(res.line())
