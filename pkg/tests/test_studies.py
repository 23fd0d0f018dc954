import json
import math

import numpy as np
import pytest

from raddirac.potentials import Coulomb, GaussianNucleus, Harmonic, Hellmann, Morse, PhysicsConstants, Yukawa
from raddirac.studies import (
    HELLMANN_REFERENCE,
    StudyReport,
    benchmark_tables,
    convergence_study,
    count_matches,
    default_interface,
    glof_projection_error,
    log_linear_slope,
    max_relative_error,
    operator_comparison,
    pollution_study,
    reference_levels,
    resolution_count,
    screened_ground_energy,
    solve_states,
)

CONSTS = PhysicsConstants()


def test_report_serialization(tmp_path):
    rep = StudyReport("converge", {"kind": "coulomb", "Z": 1.0}, {"N2": [10, 20]},
                      rows=[{"N2": 10, "err": 1e-3, "energies": [-0.5, -0.125]}, {"N2": 20, "err": math.inf}],
                      provenance={"timestamp": "2026-01-02T03:04:05+00:00"})
    rec = json.loads(rep.to_json())
    assert rec["schema"] == 1 and rec["rows"][1]["err"] == "inf"
    csv = rep.to_csv()
    assert csv.splitlines()[0] == "N2,err,energies"
    assert csv.splitlines()[1] == "10,0.001,-0.5;-0.125"
    np_rep = StudyReport("converge", {"kind": "coulomb"}, {}, rows=[{"e": np.array([-0.5, -0.125]), "n": np.int64(3)}])
    assert np_rep.to_csv().splitlines()[1] == "-0.5;-0.125,3"
    assert rep.stem() == "converge-coulomb-20260102T030405+0000"
    paths = rep.write(tmp_path)
    assert sorted(p.suffix for p in paths) == [".csv", ".json"]
    assert rep.ok
    rep.checks["x"] = False
    assert not rep.ok


def test_helpers():
    assert max_relative_error([-1.0, -2.0], [-1.0, -2.2]) == pytest.approx(0.2 / 2.2)
    assert max_relative_error([-1.0], [-1.0, -2.0]) == math.inf
    x = np.arange(10)
    assert log_linear_slope(x, 10.0 ** (-0.5 * x), floor=1e-20) == pytest.approx(-0.5)
    assert math.isnan(log_linear_slope([1, 2], [1e-20, 1e-20]))
    assert count_matches([-0.5, -0.125, -0.3], [-0.5, -0.125, -0.0555], 1e-6) == 2
    assert count_matches([], [-0.5], 1e-6) == 0


def test_default_interface():
    assert default_interface(Coulomb(1.0)) == 1.0
    assert default_interface(Coulomb(92.0)) == pytest.approx(2.5 / 92)
    assert default_interface(GaussianNucleus(100.0, 1e-4)) == pytest.approx(0.025)
    assert default_interface(Harmonic()) == 0.1
    m = Morse(0.17, 1.4, 1.0)
    assert 0.7 <= default_interface(m, PhysicsConstants(mass=918.0)) < 1.4


def test_reference_levels():
    assert reference_levels(Hellmann(3.0, 0.0, 0.1), -1, 2) == reference_levels(Coulomb(3.0), -1, 2)
    assert reference_levels(Yukawa(2.0, 0.0), -1, 1) == reference_levels(Coulomb(2.0), -1, 1)
    assert reference_levels(Yukawa(2.0, 0.1), -1, 1) is None


def test_solve_states_rejects_supercritical():
    with pytest.raises(ValueError):
        solve_states(Coulomb(200.0), -1, 1)


def test_solve_states_lower_block_size():
    s = solve_states(Coulomb(1.0), -1, 2, N1=20, N2=20, beta=1.0, lower=(10, 10))
    assert s.layout.k_lower == 21 and s.layout.n_upper == 41


def test_convergence_study_small():
    rep = convergence_study(Coulomb(92.0), -1, "allsm", [80], [10, 15, 20], n_states=3)
    errs = [r["max_rel_error"] for r in rep.rows]
    assert errs[-1] < errs[0]
    assert rep.summary["slope_N1=80"] < 0
    assert all(r["reference"] == "closed-form" for r in rep.rows)
    assert rep.ok


def test_convergence_internal_reference():
    rep = convergence_study(Yukawa(2.0, 0.5), -1, "llsm", [20], [20], n_states=1, reference_basis=(40, 30))
    assert rep.rows[0]["reference"].startswith("internal")
    assert rep.rows[0]["max_rel_error"] < 1e-6


def test_convergence_free_case_is_empty():
    rep = convergence_study(Yukawa(0.0, 1.0), -1, "allsm", [10], [10], reference_basis=(20, 20))
    assert rep.rows == [] and rep.summary["note"] == "no bound states"


def test_convergence_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        convergence_study(Coulomb(1.0), -1, "fem", [10], [10])


def test_pollution_directions():
    raw = pollution_study(k_lower=(30, 60), mode="raw")
    idom = pollution_study(k_lower=(30, 60), mode="idom")
    assert raw.summary["spurious_by_K"][30] >= 1
    assert raw.summary["spurious_by_K"][60] == 0
    assert all(v == 0 for v in idom.summary["spurious_by_K"].values())
    with pytest.raises(ValueError):
        pollution_study(Harmonic())


def test_operator_comparison_folding():
    rep = operator_comparison(N_list=(40, 50))
    assert rep.summary["idom_levels"][0] == pytest.approx(2.49997504, abs=1e-6)
    sd = next(r for r in rep.rows if r["mode"] == "sdom" and r["N"] == 50)
    assert "folded" in sd["flags"]


def test_resolution_count_small():
    leg = resolution_count("legendre-truncated", [40, 80], L_list=(30.0,))
    counts = [r["count"] for r in leg.rows]
    assert counts[0] >= 1 and counts[1] >= counts[0]
    lag = resolution_count("laguerre", [8, 50])
    assert [r["count"] for r in lag.rows][0] == 0
    assert lag.rows[1]["count"] > counts[1]
    with pytest.raises(ValueError):
        resolution_count("chebyshev", [10])


def test_screened_energy_direction():
    lam = 0.595
    deep, _ = screened_ground_energy(Yukawa(1.0, lam))
    shallow, _ = screened_ground_energy(Yukawa(1.0, 1.0))
    assert deep < shallow < 0
    none, _ = screened_ground_energy(Yukawa(1.0, 1.3))
    assert none is None


def test_benchmark_selector():
    rep = benchmark_tables("harmonic", kappas=[-1])
    assert max(abs(r["delta"]) for r in rep.rows) < 1e-6
    with pytest.raises(ValueError):
        benchmark_tables("lennard-jones")


def test_hellmann_reference_shape():
    cells = sum(len(refs) for per in HELLMANN_REFERENCE.values() for refs in per.values())
    assert cells == len(HELLMANN_REFERENCE) * 3 * 3


@pytest.mark.parametrize("N", [5, 8, 10, 20, 40])
def test_glof_projection_rate(N):
    R = abs(0.7 - 1) / (0.7 + 4)
    err = glof_projection_error(0.7, N)
    assert err <= 0.05 * math.sqrt(N) * R**N + 2e-15
