"""A module for testing independent rounding, both alteration schemes and
the round-and-alter loop.

Typical usage example:
    !pytest test_rounding.py::<TEST_NAME>
"""

import itertools

import pytest
import numpy as np

from pipalter.core import streams
from pipalter.core.errors import EpsOutOfRangeError, RegimeMismatchError
from pipalter.instances.bases import PipInstance
from pipalter.instances.normalization import normalize
from pipalter.rounding.alteration import (SMALL_WIDTH, SORTING, alter_batch,
                                          alter_by_sorting, alter_small_width,
                                          independent_round, round_batch)
from pipalter.rounding.framework import TRIAL_COLUMNS, round_and_alter
from pipalter.rounding.regimes import Regime, config_for, select_regime
from pipalter.solvers.simplex import solve_lp


def one_row(coeffs, W, c=None):
    """Returns a normalized single constraint instance."""

    c = np.ones(len(coeffs)) if c is None else c
    return normalize(PipInstance.from_dense([coeffs], [W], c))


def rejection_counts(inst, rejected):
    """Returns a trials x n array counting the rows rejecting each item."""

    counts = np.zeros((rejected[0].shape[0], inst.n), dtype=int)
    for i, arr in enumerate(rejected):
        cols, _ = inst.base.row(i)
        counts[:, cols] += arr
    return counts


def test_round_extremes():
    """Test rounding of the zero and all-ones vectors."""

    rng = np.random.default_rng(0)
    assert not independent_round(np.zeros(50), 0.7, rng).any()
    assert independent_round(np.ones(50), 1.0, rng).all()
    with pytest.raises(ValueError):
        independent_round(np.ones(5), 0, rng)


def test_round_binomial():
    """Test that rounding (0.5, ..., 0.5) with alpha = 0.5 rounds about a
    quarter of the items over repeated seeds."""

    x = np.full(1000, 0.5)
    counts = [independent_round(x, 0.5, streams.trial_stream(seed, 0)).sum()
              for seed in range(20)]
    assert abs(np.mean(counts) - 250) <= 3 * np.sqrt(1000 * 0.25 * 0.75)


def test_round_batch_matches_streams():
    """Test that batch rounding equals per-trial rounding of each stream."""

    x = np.linspace(0, 1, 17)
    uniforms = streams.batch_uniforms(5, 10, 30, x.size)
    batch = round_batch(x, 0.6, uniforms)
    for row, trial in enumerate(range(10, 30)):
        single = independent_round(x, 0.6, streams.trial_stream(5, trial))
        assert np.array_equal(batch[row], single)


def test_sorting_feasible_unchanged():
    """Test that a feasible rounded vector passes unaltered."""

    inst = one_row([1, 0.5, 0.25], 2)
    outcome = alter_by_sorting(inst, [1, 1, 1])
    assert np.array_equal(outcome.x_doubleprime, outcome.x_prime)
    assert outcome.rejections == frozenset()


def test_sorting_example():
    """Test the sorted prefix rule on coefficients (1.0, 0.9, 0.8)."""

    inst = one_row([1.0, 0.9, 0.8], 2)
    outcome = alter_by_sorting(inst, [1, 1, 1])
    assert outcome.x_doubleprime.tolist() == [False, True, True]
    assert outcome.rejections == frozenset({(0, 0)})
    assert outcome.num_rounded == 3
    assert outcome.num_rejected == 1
    assert np.isclose(outcome.value, 2)


def test_sorting_inclusive_boundary():
    """Test that two unit items exactly filling W = 2 are both kept."""

    inst = one_row([1.0, 1.0], 2)
    assert alter_by_sorting(inst, [1, 1]).x_doubleprime.all()


def test_sorting_ties_by_index():
    """Test that equal coefficients are kept in index order."""

    inst = one_row([1.0, 1.0, 1.0], 2)
    outcome = alter_by_sorting(inst, [1, 1, 1])
    assert outcome.x_doubleprime.tolist() == [True, True, False]


def test_unordered_baseline():
    """Test that the unsorted baseline packs in index order."""

    inst = one_row([1.0, 0.9, 0.8], 2)
    outcome = alter_by_sorting(inst, [1, 1, 1], ordered=False)
    assert outcome.x_doubleprime.tolist() == [True, True, False]


def test_cascading():
    """Test that an item rejected by one row is invisible to later rows."""

    A = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0]]
    inst = normalize(PipInstance.from_dense(A, [1, 1], [1, 1, 1]))
    outcome = alter_by_sorting(inst, [1, 1, 1])
    assert outcome.rejections == frozenset({(0, 1), (1, 2)})
    assert outcome.x_doubleprime.tolist() == [True, False, False]

    # row 0 drops item 0 so row 1 only sees item 2
    A = [[1.0, 0.5, 0.0], [0.5, 0.0, 1.0]]
    inst = normalize(PipInstance.from_dense(A, [1, 1], [1, 1, 1]))
    outcome = alter_by_sorting(inst, [1, 1, 1])
    assert outcome.rejections == frozenset({(0, 0)})
    assert outcome.x_doubleprime.tolist() == [False, True, True]


def test_small_width_examples():
    """Test the small/big split alteration with eps = 0.5."""

    inst = one_row([1.0, 0.9, 0.8, 0.25, 0.25, 0.25], 1.5)
    outcome = alter_small_width(inst, 0.5, [0, 1, 1, 1, 1, 1])
    assert outcome.x_doubleprime.tolist() == [False, False, True, True, True,
                                              False]
    assert outcome.rejections == frozenset({(0, 1), (0, 5)})

    outcome = alter_small_width(inst, 0.5, [0, 0, 0, 1, 1, 0])
    assert outcome.rejections == frozenset()
    assert np.array_equal(outcome.x_doubleprime, outcome.x_prime)

    outcome = alter_small_width(inst, 0.5, [1, 0, 0, 0, 0, 0])
    assert outcome.x_doubleprime.tolist() == [True] + [False] * 5


def test_small_width_errors():
    """Test eps range and width matching of the small width scheme."""

    inst = one_row([1.0, 0.2], 1.5)
    with pytest.raises(EpsOutOfRangeError):
        alter_small_width(inst, 0, [1, 1])
    with pytest.raises(EpsOutOfRangeError):
        alter_small_width(inst, 1.5, [1, 1])
    with pytest.raises(RegimeMismatchError):
        alter_small_width(inst, 0.4, [1, 1])
    with pytest.raises(ValueError):
        alter_batch(inst, np.ones((2, 2), dtype=bool), SMALL_WIDTH)
    with pytest.raises(ValueError):
        alter_batch(inst, np.ones((2, 2), dtype=bool), 'greedy')


def test_length_mismatch():
    """Test that a rounded vector of the wrong length is rejected."""

    with pytest.raises(ValueError):
        alter_by_sorting(one_row([1.0, 0.5], 2), [1, 1, 1])


def test_sorted_prefix_is_max_cardinality():
    """Test by brute force that the kept prefix of a single constraint is
    a maximum cardinality feasible subset of the rounded items."""

    rng = np.random.default_rng(3)
    for _ in range(40):
        k = int(rng.integers(2, 13))
        coeffs = rng.random(k)
        coeffs[rng.integers(k)] = 1
        W = float(rng.uniform(1, 4))
        inst = one_row(coeffs, W)
        x_prime = rng.random(k) < 0.8

        kept = alter_by_sorting(inst, x_prime).x_doubleprime.sum()
        rounded = np.flatnonzero(x_prime)
        best = 0
        for size in range(len(rounded) + 1):
            for subset in itertools.combinations(rounded, size):
                if coeffs[list(subset)].sum() <= W + 1e-9:
                    best = size
                    break
        assert kept == best


def test_batch_matches_single(normalized_suite):
    """Test that batch alteration equals per-vector alteration."""

    rng = np.random.default_rng(11)
    for _, inst in normalized_suite[:16]:
        x_prime = rng.random((25, inst.n)) < 0.4
        batch = alter_batch(inst, x_prime)
        for t in range(25):
            single = alter_by_sorting(inst, x_prime[t])
            assert np.array_equal(batch.x_doubleprime[t],
                                  single.x_doubleprime)


def test_alteration_invariants(normalized_suite):
    """Test feasibility, monotone damage and single rejectors on random
    rounded batches of every suite instance."""

    rng = np.random.default_rng(12)
    for _, inst in normalized_suite:
        W = inst.W
        if 1 < W < 2:
            scheme, eps = SMALL_WIDTH, W - 1
        else:
            scheme, eps = SORTING, None
        x_prime = rng.random((400, inst.n)) < 0.5
        batch = alter_batch(inst, x_prime, scheme, eps)
        x_dp = batch.x_doubleprime

        loads = (inst.A @ x_dp.T.astype(float)).T
        assert np.all(loads <= W + 1e-9)
        assert np.all(x_dp <= x_prime)

        counts = rejection_counts(inst, batch.rejected)
        assert counts.max() <= 1
        assert np.array_equal(counts == 1, x_prime & ~x_dp)


def test_outcome_rejections(normalized_suite):
    """Test that every recorded rejection removed a rounded item."""

    rng = np.random.default_rng(13)
    for _, inst in normalized_suite[:10]:
        x_prime = rng.random(inst.n) < 0.6
        outcome = alter_by_sorting(inst, x_prime)
        for _, j in outcome.rejections:
            assert outcome.x_prime[j] and not outcome.x_doubleprime[j]


def test_round_and_alter_feasible(normalized_suite):
    """Test that all 10200 trials over the suite end feasible."""

    for _, inst in normalized_suite:
        cfg = select_regime(inst, force_heuristic=True)
        lp = solve_lp(inst)
        best, stats = round_and_alter(inst, cfg, 340, seed=1, lp=lp)
        assert len(stats) == 340
        assert stats.feasible.all()
        assert inst.base.is_feasible(best.x_doubleprime)
        assert np.all(best.x_doubleprime <= best.x_prime)
        assert set(np.flatnonzero(best.x_prime)) <= set(lp.support)
        assert np.isclose(best.value, stats.values.max())
        assert best.seed == 1
        assert np.isclose(best.value, stats.values[best.trial])


def test_round_and_alter_deterministic(normalized_suite):
    """Test that equal seeds give identical trials for any batch size."""

    inst = normalized_suite[3][1]
    cfg = select_regime(inst)
    first, stats = round_and_alter(inst, cfg, 100, seed=42)
    second, again = round_and_alter(inst, cfg, 100, seed=42, chunksize=7)
    assert np.array_equal(stats.values, again.values)
    assert first.value == second.value
    assert np.array_equal(first.x_doubleprime, second.x_doubleprime)

    _, other = round_and_alter(inst, cfg, 100, seed=43)
    assert not np.array_equal(stats.values, other.values)


def test_round_and_alter_tiny_alpha():
    """Test that an empty solution is a valid outcome."""

    inst = one_row([1.0, 1.0, 1.0], 3)
    cfg = config_for(inst, Regime.WEAK_W2)
    lp = solve_lp(inst)
    tiny = type(lp)(lp.x * 1e-12, lp.objective, lp.status, lp.iterations,
                    lp.duals, lp.dual_objective, lp.basis)
    best, stats = round_and_alter(inst, cfg, 1, seed=0, lp=tiny)
    assert best.value == 0
    assert stats.feasible.all()


def test_round_and_alter_errors():
    """Test argument validation of round_and_alter."""

    inst = one_row([1.0, 1.0], 3)
    cfg = select_regime(inst)
    with pytest.raises(ValueError):
        round_and_alter(inst, cfg, 0, seed=0)

    other = select_regime(one_row([1.0, 1.0], 4))
    with pytest.raises(RegimeMismatchError):
        round_and_alter(inst, other, 10, seed=0)


def test_zero_columns_always_packed():
    """Test that items consuming no capacity are set in every trial."""

    inst = normalize(PipInstance.from_dense([[1, 0, 1]], [2], [1, 5, 1]))
    cfg = select_regime(inst)
    best, stats = round_and_alter(inst, cfg, 50, seed=0)
    assert best.x_doubleprime[1]
    assert np.all(stats.values >= 5)


def test_trial_csv(tmp_path):
    """Test the per-trial CSV layout."""

    inst = one_row([1.0, 0.5, 0.5], 2)
    _, stats = round_and_alter(inst, select_regime(inst), 5, seed=9)
    path = tmp_path.joinpath('trials.csv')
    stats.to_csv(path)
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == ','.join(TRIAL_COLUMNS)
    assert len(lines) == 6
    assert lines[1].split(',')[:2] == ['0', '9']
    assert lines[1].split(',')[-1] == '1'


@pytest.mark.slow
def test_mean_value_guarantee(normalized_suite):
    """Test that the mean value on width >= 2 random instances is at
    least alpha (1 - gamma) times the LP optimum up to sampling error."""

    for name, inst in normalized_suite:
        if not name.endswith(('w2', 'w3', 'w4', 'w8')):
            continue
        cfg = select_regime(inst)
        _, stats = round_and_alter(inst, cfg, 20000, seed=5)
        floor = cfg.guarantee * stats.lp_objective - 3 * stats.stderr
        assert stats.mean >= floor


def test_large_width_mean_value(normalized_suite):
    """Test the (1 - eps)(1 - e eps) value floor on a width 68 instance."""

    name, inst = normalized_suite[22]
    assert name.endswith('random-w68')
    cfg = select_regime(inst, eps_hint=0.25)
    assert cfg.regime is Regime.LARGE_W
    assert np.isclose(cfg.guarantee, 0.75 * (1 - np.e * 0.25))

    _, stats = round_and_alter(inst, cfg, 2000, seed=6)
    floor = cfg.guarantee * stats.lp_objective - 3 * stats.stderr
    assert stats.mean >= floor


@pytest.mark.slow
def test_large_width_mean_value_suite(normalized_suite):
    """Test the large width value floor on every width 68 member."""

    members = [inst for name, inst in normalized_suite
               if name.endswith('random-w68')]
    assert len(members) == 4
    for inst in members:
        assert inst.delta1 <= 2 + 1e-9
        cfg = select_regime(inst, eps_hint=0.25)
        _, stats = round_and_alter(inst, cfg, 20000, seed=7)
        floor = cfg.guarantee * stats.lp_objective - 3 * stats.stderr
        assert stats.mean >= floor
