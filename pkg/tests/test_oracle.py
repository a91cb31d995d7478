"""A module for testing the exact optimum oracle and approximation ratios.

Typical usage example:
    !pytest test_oracle.py::<TEST_NAME>
"""

import pytest
import numpy as np

from pipalter.core.errors import NodeLimitError, TooLargeError
from pipalter.instances.bases import PipInstance
from pipalter.instances.generators import mis_to_pip
from pipalter.instances.graphs import complete_graph, path_graph
from pipalter.instances.normalization import normalize
from pipalter.rounding.regimes import Regime, select_regime
from pipalter.solvers.oracle import (approx_ratio, brute_force_opt,
                                     exhaustive_opt)
from pipalter.solvers.simplex import solve_lp


def test_brute_force_examples():
    """Test the oracle on small hand checked instances."""

    result = brute_force_opt(PipInstance.from_dense([[1, 1]], [2], [3, 4]))
    assert result.value == 7
    assert result.argmax.tolist() == [True, True]

    result = brute_force_opt(PipInstance.from_dense([[1, 1]], [2], [0, 0]))
    assert result.value == 0

    assert brute_force_opt(mis_to_pip(complete_graph(3))).value == 1
    assert brute_force_opt(mis_to_pip(path_graph(3))).value == 2


def test_result_contract(small_random):
    """Test that the argmax is feasible and attains the value."""

    for inst in small_random:
        result = brute_force_opt(inst)
        assert inst.is_feasible(result.argmax)
        assert np.isclose(result.value, inst.c @ result.argmax, atol=1e-9)
        assert result.nodes_explored >= 1


def test_matches_enumeration(small_random, suite):
    """Test branch and bound against plain enumeration for n <= 12."""

    instances = list(small_random)
    instances += [inst for _, inst in suite if inst.n <= 12]
    for inst in instances:
        searched = brute_force_opt(inst)
        enumerated = exhaustive_opt(inst)
        assert np.isclose(searched.value, enumerated.value, atol=1e-9)
        assert enumerated.nodes_explored == 2 ** inst.n


@pytest.mark.slow
def test_matches_enumeration_twenty(suite):
    """Test branch and bound against enumeration on 20 item instances."""

    for _, inst in suite:
        if inst.n == 20:
            searched = brute_force_opt(inst)
            enumerated = exhaustive_opt(inst)
            assert np.isclose(searched.value, enumerated.value, atol=1e-9)


def test_ip_below_lp(small_random, suite):
    """Test that the integer optimum never exceeds the LP optimum."""

    instances = list(small_random)
    instances += [inst for _, inst in suite if inst.n <= 12]
    for inst in instances:
        ip = brute_force_opt(inst).value
        lp = solve_lp(normalize(inst)).objective
        assert ip <= lp + 1e-7


def test_limits():
    """Test the size and node limits of the oracles."""

    big = PipInstance.from_dense(np.ones((1, 31)), [40], np.ones(31))
    with pytest.raises(TooLargeError):
        brute_force_opt(big)

    wide = PipInstance.from_dense(np.ones((1, 21)), [40], np.ones(21))
    with pytest.raises(TooLargeError):
        exhaustive_opt(wide)

    with pytest.raises(NodeLimitError):
        brute_force_opt(mis_to_pip(complete_graph(6)), limit=2)


def test_approx_ratio_integral_lp():
    """Test that both ratios agree when the LP optimum is integral."""

    inst = normalize(PipInstance.from_dense([[1, 1]], [2], [1, 1]))
    report = approx_ratio(inst, select_regime(inst), 200, seed=0)
    assert report.ip_opt == 2
    assert np.isclose(report.lp_opt, 2)
    assert np.isclose(report.ratio_vs_ip, report.ratio_vs_lp)
    assert report.trials == 200


def test_approx_ratio_guarantee(normalized_suite):
    """Test the empirical ratio against alpha (1 - gamma) on a width >= 2
    member and a small width member."""

    for index in (0, 16):
        _, inst = normalized_suite[index]
        cfg = select_regime(inst)
        report = approx_ratio(inst, cfg, 2000, seed=4)
        slack = 3 * report.stderr / report.lp_opt
        assert report.ratio_vs_lp >= cfg.guarantee - slack
        assert report.ratio_vs_ip >= report.ratio_vs_lp - 1e-12
        assert report.ip_opt <= report.lp_opt + 1e-7

    assert select_regime(normalized_suite[16][1]).regime is \
            Regime.SMALL_WIDTH
