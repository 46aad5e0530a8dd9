import math

import numpy as np
import pytest

from dabawgn import (
    AwgnChannel,
    FinitePmf,
    equilattice,
    equilattice_rate,
    mutual_information,
    pmf_mean,
    pmf_power,
    shannon_capacity_bits,
)

from conftest import mi_trapezoid


class TestShannonCapacity:
    def test_values(self):
        assert shannon_capacity_bits(0.0) == 0.0
        assert shannon_capacity_bits(3.0) == 1.0
        assert shannon_capacity_bits(10 ** 2.9) == pytest.approx(
            0.5 * math.log2(1 + 10 ** 2.9), abs=1e-15
        )

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            shannon_capacity_bits(-0.5)


class TestEquilattice:
    def test_two_point(self):
        pmf = equilattice(2, 1.0)
        np.testing.assert_allclose(pmf.locations, [-1.0, 1.0])
        np.testing.assert_allclose(pmf.probabilities, [0.5, 0.5])

    def test_four_pam(self):
        pmf = equilattice(4, 5.0)
        np.testing.assert_allclose(pmf.locations, [-3.0, -1.0, 1.0, 3.0])
        np.testing.assert_allclose(pmf.probabilities, [0.25] * 4)

    def test_three_point(self):
        pmf = equilattice(3, 2.0 / 3.0)
        np.testing.assert_allclose(pmf.locations, [-1.0, 0.0, 1.0], atol=1e-15)

    @pytest.mark.parametrize("card", [2, 3, 5, 8, 17, 32])
    def test_power_exact_and_centered(self, card):
        pmf = equilattice(card, 1.7)
        assert pmf_power(pmf) == pytest.approx(1.7, abs=1e-12)
        assert pmf_mean(pmf) == pytest.approx(0.0, abs=1e-15)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            equilattice(1, 1.0)
        with pytest.raises(ValueError):
            equilattice(4, 0.0)


class TestEquilatticeRate:
    def test_two_point_is_bpsk(self):
        ch = AwgnChannel(0.4)
        bpsk = FinitePmf([-1.0, 1.0], [0.5, 0.5])
        assert equilattice_rate(2, ch, 1.0) == pytest.approx(
            mutual_information(bpsk, ch), abs=1e-12
        )

    def test_matches_trapezoid_oracle(self):
        ch = AwgnChannel(0.1)
        got = equilattice_rate(8, ch, 1.0)
        want = mi_trapezoid(equilattice(8, 1.0), 0.1)
        assert got == pytest.approx(want, abs=1e-6)

    def test_shaping_loss_approaches_asymptote(self):
        # The uniform-input loss grows with SNR toward 0.5*log2(pi*e/6),
        # about 0.2546 bits; with 64 points it is already inside [0.2, 0.3]
        # by 25 dB.  (At 20 dB the loss is still ~0.187: the asymptote has
        # not been reached yet, which the acceptance suite records.)
        asymptote = 0.5 * math.log2(math.pi * math.e / 6.0)
        gaps = []
        for snr_db in (20.0, 25.0, 30.0, 33.0):
            noise = 10.0 ** (-snr_db / 10.0)
            gap = shannon_capacity_bits(1.0 / noise) - equilattice_rate(
                64, AwgnChannel(noise), 1.0
            )
            gaps.append(gap)
            assert gap <= asymptote + 1e-3
        assert all(b > a for a, b in zip(gaps, gaps[1:]))
        assert 0.20 <= gaps[1] <= 0.30
        assert gaps[-1] == pytest.approx(asymptote, abs=0.02)

    @pytest.mark.parametrize("card,snr_db", [(2, 5.0), (4, 10.0), (8, 18.0)])
    def test_rate_ceilings(self, card, snr_db):
        ch = AwgnChannel(10 ** (-snr_db / 10.0))
        rate = equilattice_rate(card, ch, 1.0)
        assert rate <= shannon_capacity_bits(1.0 / ch.noise_power) + 1e-9
        assert rate <= math.log2(card) + 1e-9

    def test_approaches_log_cardinality(self):
        ch = AwgnChannel(1e-5)
        assert equilattice_rate(4, ch, 1.0) == pytest.approx(2.0, abs=1e-6)
