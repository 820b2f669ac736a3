import math
import os
import pathlib

import pytest

import rovib

DATA = pathlib.Path(os.environ.get("ROVIB_DATA", pathlib.Path(__file__).parents[2] / "data"))
AMU = 1822.888486209


@pytest.fixture(scope="module")
def toy():
    return rovib.Molecule(rovib.load_system(str(DATA / "morse_toy.cfg")))


def test_version_and_units():
    assert rovib.__version__ == "0.3.0"
    assert rovib.hartree_to_cm1(rovib.cm1_to_hartree(1234.5)) == pytest.approx(1234.5, rel=1e-15)


def test_morse_levels_closed_form(toy):
    de = rovib.cm1_to_hartree(5000.0)
    w = 0.9 * math.sqrt(2 * de / (7.0 * AMU))
    levels = toy.levels("X", 0)
    assert len(levels) > 5
    for lvl in levels[:5]:
        x = w * (lvl.v + 0.5)
        exact = -de + x - x * x / (4 * de)
        assert rovib.cm1_to_hartree(lvl.energy_cm1) == pytest.approx(exact, abs=1e-9)
    r, psi = toy.wavefunction(levels[2])
    h = r[1] - r[0]
    assert sum(p * p for p in psi) * h == pytest.approx(1.0, abs=1e-6)


def test_select_errors(toy):
    with pytest.raises(rovib.InvalidQuantumNumbers):
        toy.select("X", 0, 10_000)
    with pytest.raises(rovib.RovibError):
        toy.levels("nope", 0)


def test_fcf_rows_sum_to_one(toy):
    m = rovib.fcf_matrix(toy, "A", "X", 0, 0)
    assert m.quantity
    row = m.values[0]
    assert 0.9 < sum(row) <= 1.0 + 1e-9


def test_polarizability_scan(toy):
    g = toy.select("X", 0, 0)
    opts = rovib.PolarizabilityOptions()
    opts.include_continuum = False
    opts.natural_widths = False
    model = rovib.PolarizabilityModel(toy, g, opts)
    assert model.poles
    a = model(1000.0)
    assert a.real > 0
    spec = rovib.scan(model, 900.0, 901.0, 0.25)
    assert len(spec.nu) == 4
    with pytest.raises(rovib.OnResonance):
        model(model.poles[0].nu)


def test_sensitivity_and_budget(toy):
    reps = rovib.mu_sensitivities(toy.system, "X", 0)
    assert reps[0].dE_dlnmu < 0
    pick = rovib.select_anchor_sensor(reps)
    assert abs(pick.anchor.dE_dlnmu) <= min(abs(r.dE_dlnmu) for r in reps) + 1e-15
    with pytest.raises(rovib.DegeneratePair):
        rovib.interval_sensitivity(reps[0], reps[0])
    b = rovib.precision_budget(1e13)
    assert b.at(100.0) == pytest.approx(b.fractional_instability_at_1s / 10.0)


def test_wigner3j():
    assert rovib.wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3))
