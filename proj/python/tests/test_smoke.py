import json
import math

import pytest

import driftev


def test_dirichlet_baseline():
    lam = driftev.lambda1("const", l=1.0, p=0.0, n=4001)
    assert abs(lam / (math.pi**2 / 4) - 1) < 1e-5


def test_constant_drift_shift():
    base = driftev.lambda1("const", c=1.0, p=0.0, n=2001)
    shifted = driftev.lambda1("const", c=1.0, p=10.0, n=2001)
    assert shifted - base == pytest.approx(25.0, rel=1e-4)


def test_pencil_and_pairs():
    pot = driftev.build_potential_1d(driftev.PotentialSpec.from_id("quartic"), driftev.Grid1D(1.6, 801))
    pairs = driftev.eigs_bisection(driftev.assemble_pencil(pot, 20.0), 3)
    assert [pr.index for pr in pairs] == [1, 2, 3]
    assert pairs[0].lambda_ < pairs[1].lambda_ <= pairs[2].lambda_
    assert min(pairs[0].u) > 0
    assert max(pairs[0].u) == 1.0


def test_asymptotics_in_logs():
    pot = driftev.build_potential_1d(driftev.PotentialSpec.from_id("power"), driftev.Grid1D(1.0, 2001))
    v = driftev.product_formula(pot, 1e6)
    assert math.isfinite(v.log_lambda)
    closed = driftev.closed_form(driftev.PotentialSpec.from_id("power"), 1.0, 100.0)
    assert abs(driftev.product_formula(pot, 100.0).log_lambda - closed.log_lambda) < 0.03 * abs(closed.log_lambda)
    exact = math.log(math.sqrt(math.pi) * math.erf(10.0) / 20.0)
    assert driftev.laplace_integral(lambda x: x * x, 1.0, 2.0, 100.0) == pytest.approx(exact, rel=1e-10)


def test_wells_and_sweep():
    pot = driftev.build_potential_1d(driftev.PotentialSpec.from_id("power"), driftev.Grid1D(1.0, 401))
    assert driftev.detect_wells(pot)["b0"] == pytest.approx(0.5)
    res = driftev.run_sweep(driftev.PotentialSpec.from_id("power"), 1.0, [10, 20, 30, 40], n=2001)
    assert res["fit"]["applicable"]
    assert res["fit"]["b0"] == pytest.approx(0.5, rel=0.05)
    assert [r["p"] for r in res["rows"]] == [10, 20, 30, 40]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        driftev.PotentialSpec.from_id("zigzag")
    pot = driftev.build_potential_1d(driftev.PotentialSpec.from_id("power"), driftev.Grid1D(1.0, 101))
    with pytest.raises(driftev.NumericalError, match="asym"):
        driftev.assemble_pencil(pot, 2000.0)


def test_decay_rate_2d():
    field = driftev.build_field_2d(driftev.FieldSpec.from_id("const"), driftev.Grid2D(1.0, 1.0, 39, 39))
    rate = driftev.decay_rate(field, 0.0, t_end=0.5, tau=1e-3)
    assert rate == pytest.approx(math.pi**2 / 2, rel=0.05)


def test_cli_in_process(tmp_path):
    code, out, err = driftev.run_cli(["eig1d", "--p", "10", "--n", "801", "--out", str(tmp_path)])
    assert code == 0 and err == ""
    assert json.loads(out)["lambda"] == pytest.approx(0.153, rel=1e-2)
    assert (tmp_path / "eigen.json").exists()
    code, _, err = driftev.run_cli(["eig1d", "--p", "2000"])
    assert code == 3
    assert json.loads(err)["error"]["kind"] == "numerical"
