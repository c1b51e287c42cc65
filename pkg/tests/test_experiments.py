import math

import pytest

from optoswap import experiments as ex
from optoswap.phasespace import Grid


def test_epsilon_of_thin_line_setting():
    assert 2 * ex.THIN_LINES.epsilon * math.sqrt(1 / (1 + ex.THIN_LINES.epsilon**2)) == pytest.approx(2.24e-7)
    assert ex.IDEAL.epsilon == 0.0


@pytest.mark.parametrize("alpha_sq", [0.1, 0.25])
def test_imaginary_alpha_mirrors_squeezing(alpha_sq):
    grid = Grid(6, 128)
    xr, fr = ex.kitten_optimum(math.sqrt(alpha_sq), grid=grid)
    xi, fi = ex.kitten_optimum(1j * math.sqrt(alpha_sq), grid=grid)
    assert xi == pytest.approx(-xr, abs=1e-5)
    assert fi == pytest.approx(fr, rel=1e-4, abs=1e-9)


def test_lossy_kitten_worse_than_ideal():
    grid = Grid(6, 128)
    _, ideal = ex.kitten_optimum(0.5, ex.IDEAL, grid)
    _, lossy = ex.kitten_optimum(0.5, ex.THIN_LINES, grid)
    assert lossy > ideal


def test_fock_transfer_summary():
    _, info = ex.fock_transfer(1, 1e7, grid=Grid(6, 128))
    assert 0 < info["infidelity"] < 1
    assert info["wigner_min"] < 0


def test_closed_form_error_small():
    import numpy as np

    assert ex.closed_form_error(np.random.default_rng(0), draws=50) < 1e-10


def test_tolerance_table_columns():
    cols = ex.tolerance_table([1e-7, 1e-6])
    assert cols["width_numeric"][1] > cols["width_numeric"][0]
    assert cols["q_m"][0] == pytest.approx(5e6, rel=1e-9)
