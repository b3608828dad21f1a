"""Acceptance gate: one test per criterion, each printing its PASS/FAIL line.

The measured values and their tolerances come from the checks module, which
is also what `catenary-lab check --suite all` runs.
"""

import pytest

from catenarylab.checks import SUITES
from catenarylab.cli import EXIT_OK, main


def _run(name):
    result = SUITES[name]()
    print(result.line())
    assert result.passed, result.detail
    return result


def test_criterion_01_el_residual_suite():
    _run("el-residual")


def test_criterion_02_conservation():
    _run("conservation")


def test_criterion_03_g_polynomial_exactness():
    _run("g-polynomial")


def test_criterion_04_periodic_inner_suite():
    _run("periodic-suite")


def test_criterion_05_blowup_suite():
    _run("blowup-suite")


def test_criterion_06_orthogonal_hit_suite():
    _run("orthogonal-suite")


def test_criterion_07_inversion_duality():
    _run("inversion")


def test_criterion_08_equilibrium_dichotomy():
    _run("equilibrium")


def test_criterion_09_stationarity():
    _run("stationarity")


def test_criterion_10_limit_trend():
    _run("limit-trend")


def test_criterion_11_cli_and_roundtrip(capsys):
    _run("io-roundtrip")
    rc = main(["check", "--suite", "all"])
    out = capsys.readouterr().out
    print(out)
    assert rc == EXIT_OK
    assert "FAIL" not in out
