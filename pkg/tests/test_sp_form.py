# tests/test_sp_form.py

import os
import sys

import pytest

# Ensure project root is on sys.path
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(ROOT_DIR)

from correlation.sp_form import SpForm, sp_decompose  # noqa: E402


def test_two_term_sums_and_differences():
    heights = (1, 4, 20)
    plus = sp_decompose(24, heights, s_max=0, p_max=4)
    assert plus.indices == (3, 2) and plus.signs == (1, 1) and plus.residual == 0
    minus = sp_decompose(16, heights, s_max=0, p_max=4)
    assert minus.indices == (3, 2) and minus.signs == (1, -1)
    assert minus.format() == "h3 - h2"


def test_residual_bound_decides():
    heights = (5, 40, 320)
    assert sp_decompose(322, heights, s_max=1, p_max=4) is None
    form = sp_decompose(322, heights, s_max=2, p_max=4)
    assert form.indices == (3,) and form.residual == 2
    assert form.format() == "h3 + 2"


def test_term_bound_decides():
    heights = (1, 10, 100, 1000)
    m = 1000 + 100 + 10 + 1
    assert sp_decompose(m, heights, s_max=0, p_max=4).p == 4
    assert sp_decompose(m, heights, s_max=0, p_max=3) is None
    assert sp_decompose(m, heights, s_max=1, p_max=3).p == 3


def test_every_form_reconstructs():
    heights = (2, 9, 50, 301, 1900)
    for m in range(1, 2400):
        form = sp_decompose(m, heights, s_max=2, p_max=5)
        if form is not None:
            assert form.reconstruct(heights) == m
            assert abs(form.residual) <= 2
            assert form.p <= 5


def test_bad_inputs():
    with pytest.raises(ValueError):
        sp_decompose(0, (1, 2), 0, 1)
    with pytest.raises(ValueError):
        sp_decompose(3, (2, 2), 0, 1)
    with pytest.raises(ValueError):
        SpForm(indices=(1, 2), signs=(1, 1), residual=0)
    with pytest.raises(ValueError):
        SpForm(indices=(2,), signs=(-1,), residual=0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
