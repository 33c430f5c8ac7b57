import json
from fractions import Fraction

import numpy as np
import pytest

import hiw


def test_builtin_forms():
    assert set(hiw.builtin_form_names()) >= {"theta_delta", "eta8_cubed"}
    f = hiw.builtin_form("eta8_cubed", 100)
    assert f.truncation == 100
    assert (f.twice_weight, f.level) == (3, 64)
    assert [f.coeff(n) for n in (1, 9, 25, 49, 81)] == [1, -3, 5, -7, 9]
    a = f.normalized()
    assert isinstance(a, np.ndarray) and a.shape == (101,)
    assert a[0] == 0.0
    assert a[25] == pytest.approx(5 / 25 ** 0.25)


def test_theta_delta_is_exact():
    f = hiw.builtin_form("theta_delta", 50)
    assert f.coeff(1) == 1
    # theta * Delta: c(2) = tau(2) + 2 tau(1) = -24 + 2
    assert f.coeff(2) == -22
    assert all(isinstance(c, int) for c in f.coeffs())


def test_series_round_trip(tmp_path):
    f = hiw.Series([0, 1, -2, 3, 10**30], twice_weight=25, level=4)
    assert f.coeff(4) == 10**30
    path = tmp_path / "s.qexp"
    f.write(str(path))
    assert hiw.read_qexp(str(path)) == f
    with pytest.raises(ValueError):
        f.coeff(5)


def test_modular_arithmetic():
    assert hiw.legendre(2, 7) == 1
    assert hiw.legendre(3, 7) == -1
    assert pow(hiw.sqrt_mod(10, 13), 2, 13) == 10
    for u, v in [(1, 1), (2, 5), (3, 11)]:
        assert abs(hiw.salie_closed(u, v, 13) - hiw.salie_direct(u, v, 13)) < 1e-12
    with pytest.raises(ValueError):
        hiw.salie_closed(13, 1, 13)


def test_progression_report():
    f = hiw.builtin_form("theta_delta", 10000)
    r = hiw.progression_e(f, 10000, 157)
    assert r["p"] == 157
    e = np.array(r["e_values"])
    assert len(e) == 157
    assert r["m2"] == pytest.approx(np.sum(e[1:] ** 2) / 157, rel=1e-12)
    assert r["abs_m1"] == pytest.approx(np.sum(np.abs(e[1:])) / 157, rel=1e-12)
    assert r["abs_m1"] >= r["m2"] ** 1.5 / np.sqrt(r["m4"]) - 1e-12
    cf = hiw.estimate_cf(f, [1000, 10000])
    assert cf["estimates"][-1] == pytest.approx(0.2377, abs=1e-3)


def test_hecke_and_shimura():
    f = hiw.builtin_form("eta8_cubed", 5000)
    r = hiw.extract_eigenvalue(f, 3)
    assert r["lambda"] == Fraction(-4)
    assert r["is_eigen"]
    assert hiw.apply_tp2(f, 5).truncation == 200
    s = hiw.shimura_relation_check(f, [2, 3, 5, 7, 11, 13], t=1, n_max=15)
    assert s["max_residual"] == 0.0
    m = hiw.fourth_moment_exponent(hiw.builtin_form("eta8_cubed", 100000), [1e3, 1e4, 1e5])
    assert m["exponent"] == pytest.approx(1.5, abs=0.05)


def test_sign_statistics():
    f = hiw.builtin_form("theta_delta", 10000)
    counts = hiw.sign_counts(f, 10000, 0.23, 7)
    assert len(counts["per_class_plus"]) == 7
    survey = hiw.class_survey(f, 10000, 157, 0.23, cf=0.2376)
    assert survey["fraction_classes_hit"] >= 0.01
    cor = hiw.corollary_count(f, 10000, 0.02, cf=0.2376)
    assert cor["pass"]
    with pytest.raises(ValueError):
        hiw.class_survey(f, 10000, 157, 0.5, cf=0.2376)


def test_voronoi():
    r = hiw.voronoi_check(1, 3, 50.0, dual_truncation=10000)
    assert r["rel_residual"] < 1e-5


def test_cli_in_process():
    code, out, err = hiw.cli(["hecke", "--form", "eta8_cubed", "--p", "3"])
    assert code == 0, err
    assert json.loads(out)["report"]["results"][0]["lambda"] == "-4"
    code, _, err = hiw.cli(["survey", "--x", "10000", "--alpha", "0.5"])
    assert code == 2
    assert "--alpha" in err
