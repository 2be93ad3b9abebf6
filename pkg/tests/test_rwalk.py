import math
from fractions import Fraction

import numpy as np
import pytest

from haarwords import freegroup as fg
from haarwords import rwalk
from haarwords.errors import UnsupportedSizeError, ValidationError
from haarwords.freegroup import Word


def test_measure_flags():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    assert mu.symmetric and mu.generating and not mu.contains_identity
    assert not mu.reasonable
    lazy = rwalk.WalkMeasure.lazy_uniform(2)
    assert lazy.reasonable
    half = Fraction(1, 2)
    non_gen = rwalk.WalkMeasure({Word((1,), 2): half, Word((-1,), 2): half}, rank=2)
    assert non_gen.symmetric and not non_gen.generating
    asym = rwalk.WalkMeasure({Word((1,), 2): half, Word((2,), 2): half}, rank=2)
    assert not asym.symmetric


def test_generating_detection_for_longer_words():
    # {ab, ba} generates a proper subgroup of F_2; adding a generator fixes it
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    ab, ba = fg.parse_word("ab"), fg.parse_word("ba")
    m1 = rwalk.WalkMeasure({ab: quarter, ab.inverse(): quarter,
                            ba: quarter, ba.inverse(): quarter}, rank=2)
    assert not m1.generating
    a = fg.parse_word("a")
    m2 = rwalk.WalkMeasure({ab: quarter, ab.inverse(): quarter,
                            a: quarter, a.inverse(): quarter}, rank=2)
    assert m2.generating


def test_measure_validation():
    with pytest.raises(ValidationError):
        rwalk.WalkMeasure({Word((1,), 1): Fraction(1, 2)})
    with pytest.raises(ValidationError):
        rwalk.WalkMeasure({Word((1,), 1): Fraction(3, 2),
                           Word((-1,), 1): Fraction(-1, 2)})


def test_return_probability_examples():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    assert rwalk.return_probability(mu, 2) == Fraction(1, 4)
    assert rwalk.return_probability(mu, 4) == Fraction(7, 64)
    assert rwalk.return_probability(mu, 3) == 0
    assert rwalk.return_probability(mu, 0) == 1


def test_return_probability_radial_vs_convolution():
    cases = [(rwalk.WalkMeasure.uniform_generators(2), 8),
             (rwalk.WalkMeasure.lazy_uniform(2), 8),
             (rwalk.WalkMeasure.uniform_generators(1), 12),
             (rwalk.WalkMeasure.lazy_uniform(1), 12)]
    for measure, max_steps in cases:
        hist = rwalk._convolve_distribution(measure, max_steps)
        e = Word((), measure.rank)
        for steps in range(max_steps + 1):
            assert rwalk.return_probability(measure, steps) == \
                hist[steps].get(e, Fraction(0))


def test_return_probability_caps():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    with pytest.raises(UnsupportedSizeError):
        rwalk.return_probability(mu, 41)
    q = Fraction(1, 4)
    ab, ba = fg.parse_word("ab"), fg.parse_word("ba")
    general = rwalk.WalkMeasure({ab: q, ab.inverse(): q, ba: q, ba.inverse(): q},
                                rank=2)
    with pytest.raises(UnsupportedSizeError):
        rwalk.return_probability(general, 21)


def test_submultiplicativity_of_returns():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    probs = rwalk._radial_return_probabilities(mu, 40)
    for m1 in range(1, 10):
        for m2 in range(1, 10):
            assert probs[2 * (m1 + m2)] >= probs[2 * m1] * probs[2 * m2]


def test_spectral_radius_kesten():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    bracket = rwalk.spectral_radius(mu)
    kesten = math.sqrt(3) / 2
    assert bracket.lower <= kesten <= bracket.upper
    assert bracket.width() < 0.05
    probs = rwalk._radial_return_probabilities(mu, 40)
    for n in range(41):
        assert float(probs[n]) <= bracket.upper ** n + 1e-12


def test_spectral_radius_point_mass():
    mu = rwalk.WalkMeasure({Word((), 2): Fraction(1)}, rank=2)
    bracket = rwalk.spectral_radius(mu)
    assert bracket.lower > 0.999 and bracket.upper <= 1.0 + 1e-9


def test_spectral_radius_general_measure_brackets():
    q = Fraction(1, 4)
    ab, ba = fg.parse_word("ab"), fg.parse_word("ba")
    general = rwalk.WalkMeasure({ab: q, ab.inverse(): q, ba: q, ba.inverse(): q},
                                rank=2)
    bracket = rwalk.spectral_radius(general)
    assert 0 < bracket.lower <= bracket.upper <= 1.0 + 1e-9


def test_ball_compression_monotone():
    a_map = {fg.parse_word(s): 1.0 for s in ("a", "A", "b", "B")}
    values = [rwalk._compressed_norm(a_map, 2, radius) for radius in (2, 4, 6, 8)]
    for lo, hi in zip(values, values[1:]):
        assert hi >= lo - 1e-9
    assert values[-1] <= 2 * math.sqrt(3) + 1e-6


def test_haagerup_check_examples():
    rec = rwalk.haagerup_check({fg.parse_word("a"): 1.0})
    assert abs(rec["l2"] - 1) < 1e-12
    assert abs(rec["upper"] - 6) < 1e-12
    assert rec["lower"] <= 1.0 + 1e-9 and rec["lower"] > 0.99
    rec = rwalk.haagerup_check({Word(()): 1.0})
    assert rec["upper"] == 3.0 and abs(rec["lower"] - 1.0) < 1e-9
    gens = {fg.parse_word(s): 1.0 for s in ("a", "A", "b", "B")}
    rec = rwalk.haagerup_check(gens, radius=9)
    assert rec["lower"] > 3.25
    assert rec["lower"] <= 2 * math.sqrt(3) + 1e-6
    assert rec["lower"] <= rec["upper"]


def test_proper_power_stats_first_step_zero():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    stats = rwalk.proper_power_stats(mu, steps=4, samples=2000, seed=5)
    assert stats.rows[0]["phat"] == 0.0
    assert stats.parity_locked


def test_proper_power_stats_matches_exact_enumeration():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    hist = rwalk._convolve_distribution(mu, 6)
    exact = []
    for t in range(1, 7):
        p = sum(prob for w, prob in hist[t].items()
                if fg.is_proper_power(w) is not None)
        exact.append(float(p))
    stats = rwalk.proper_power_stats(mu, steps=6, samples=40000, seed=11)
    for t, row in enumerate(stats.rows):
        se = math.sqrt(max(exact[t] * (1 - exact[t]), 1e-12) / stats.samples)
        assert abs(row["phat"] - exact[t]) <= 5 * se + 1e-9


def test_vectorized_proper_power_against_reference():
    rng = np.random.default_rng(3)
    words = []
    for _ in range(300):
        length = rng.integers(0, 12)
        w = Word(tuple(int(x) for x in rng.choice([1, -1, 2, -2], size=length)), 2)
        words.append(w)
    width = 16
    buf = np.zeros((len(words), width), dtype=np.int8)
    lengths = np.zeros(len(words), dtype=np.int64)
    for i, w in enumerate(words):
        lengths[i] = len(w)
        buf[i, :len(w)] = w.letters
    mask = rwalk._vectorized_proper_power(buf, lengths)
    for i, w in enumerate(words):
        assert mask[i] == (fg.is_proper_power(w) is not None)


def test_proper_power_stats_generic_support():
    q = Fraction(1, 4)
    ab, ba = fg.parse_word("ab"), fg.parse_word("ba")
    a = fg.parse_word("a")
    m = rwalk.WalkMeasure({ab: q, ab.inverse(): q, a: q, a.inverse(): q}, rank=2)
    stats = rwalk.proper_power_stats(m, steps=5, samples=300, seed=2)
    assert len(stats.rows) == 5


def test_slope_of_proper_power_decay():
    mu = rwalk.WalkMeasure.uniform_generators(2)
    stats = rwalk.proper_power_stats(mu, steps=30, samples=30000, seed=13)
    log_rho = math.log(math.sqrt(3) / 2)
    assert abs(stats.slope - log_rho) < 0.05
