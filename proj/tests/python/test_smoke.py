import json
import math

import pytest
import torusric


def test_constants():
    assert (torusric.EXIT_PASS, torusric.EXIT_CONFIG, torusric.EXIT_INFEASIBLE, torusric.EXIT_POSITIVITY) == (0, 1, 2, 3)
    assert torusric.CSV_SCHEMA == 1


def test_k1_root():
    eps, delta, nu = 0.1, 0.15, 0.05
    k1 = torusric.solve_k1(eps, delta, nu)
    assert 0 < k1 < math.pi / (2 * (eps + delta))
    # C^1 matching at eps: G'/G agrees from both sides.
    left, right = torusric.profile([eps - 1e-7, eps + 1e-7], epsilon=eps, delta=delta, nu=nu)
    assert abs(left[1] / left[0] - right[1] / right[0]) < 1e-5


def test_profile_continuous():
    eps = 0.1
    rows = torusric.profile([eps - 1e-9, eps + 1e-9, 0.0, 0.05])
    assert abs(rows[0][0] - rows[1][0]) < 1e-6
    for g, dg, ddg, k in rows:
        assert g > 0
        assert math.isfinite(dg) and math.isfinite(ddg) and math.isfinite(k)


def test_validate_disk():
    v = torusric.validate_disk(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)])
    assert v["pass"] and v["free_action"] and v["simply_connected"]
    assert v["kernel_rank"] == 2
    bad = torusric.validate_disk(3, [(2, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)])
    assert not bad["pass"]


def test_small_case():
    assert torusric.small_case(2, 2)[0] == "S^4"
    assert torusric.small_case(4, 4)[0] == "S^3 x S^3"
    with pytest.raises(ValueError):
        torusric.small_case(5, 3)


def test_config_errors():
    c = torusric.default_config()
    c["params"]["nu"] = 0.0
    with pytest.raises(ValueError, match="nu"):
        torusric.validate(c)


def test_build_and_certify(tmp_path):
    c = torusric.default_config()
    c["output"]["dir"] = str(tmp_path)
    rep = torusric.build(c)
    assert rep["exit_code"] == torusric.EXIT_PASS
    gb = next(s for s in rep["stages"] if s["name"] == "gauss-bonnet")
    assert gb["status"] == "pass"
    assert abs(gb["details"]["k2"] - 40.0) < 1e-12

    c["params"]["branch"] = "principal"
    assert torusric.build(c)["exit_code"] == torusric.EXIT_INFEASIBLE

    c["params"]["branch"] = "shifted"
    rep = torusric.certify(c, write_files=True)
    assert rep["exit_code"] == torusric.EXIT_POSITIVITY
    assert (tmp_path / "report.json").exists() and (tmp_path / "samples.csv").exists()
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk["exit_code"] == rep["exit_code"]
