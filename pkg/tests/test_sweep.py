import math

import numpy as np
import pytest

from dabawgn import (
    BracketInvalid,
    NoSatisfyingCardinality,
    ac_sweep,
    min_cardinality_selection,
    pc_sweep,
)
from dabawgn.sweep import PcSweepRecord, _pc_record_from_dict, _pc_record_to_dict
from dabawgn import FinitePmf, detect_transition


class TestAcSweep:
    def test_binary_region(self):
        records = ac_sweep(0.0, 4.0, delta_s=1.0)
        assert len(records) == 5
        for rec in records:
            assert rec.cardinality == 2
            np.testing.assert_allclose(rec.pmf.locations, [-1.0, 1.0])
            np.testing.assert_allclose(rec.pmf.probabilities, [0.5, 0.5], atol=1e-9)
            assert rec.true_snr_db == pytest.approx(rec.peak_snr_db, abs=1e-9)

    def test_evolution_across_transitions(self):
        records = ac_sweep(3.0, 12.0, delta_s=0.25)
        cards = [r.cardinality for r in records]
        assert cards[0] == 2 and cards[-1] == 4
        assert all(b >= a for a, b in zip(cards, cards[1:]))
        caps = [r.capacity for r in records]
        assert all(b >= a - 1e-9 for a, b in zip(caps, caps[1:]))
        for rec in records:
            assert rec.true_snr_db <= rec.peak_snr_db + 1e-9
            assert rec.capacity <= rec.pc_capacity_at_true_snr + 1e-6
            if rec.cardinality > 2:
                assert rec.true_snr_db < rec.peak_snr_db

    def test_checkpoint_resume(self, tmp_path):
        path = str(tmp_path / "ac_chain.json")
        full = ac_sweep(0.0, 2.0, delta_s=0.5)
        partial = ac_sweep(0.0, 1.0, delta_s=0.5, checkpoint_path=path)
        assert len(partial) == 3
        resumed = ac_sweep(0.0, 2.0, delta_s=0.5, checkpoint_path=path)
        assert len(resumed) == len(full)
        for a, b in zip(resumed, full):
            assert a.capacity == pytest.approx(b.capacity, abs=1e-9)


class TestDetectTransition:
    def test_bracket_validation(self):
        with pytest.raises(BracketInvalid):
            detect_transition(3.0, 4.0, 2)  # binary optimal on both ends
        with pytest.raises(BracketInvalid):
            detect_transition(5.0, 6.0, 2)  # ternary already wins at 5 dB


class TestPcSweep:
    def test_card_two_row_saturates(self):
        records = pc_sweep([0.0, 10.0, 20.0], [2])
        rates = [r.rate for r in records]
        assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))
        assert rates[-1] == pytest.approx(1.0, abs=1e-3)
        for rec in records:
            assert rec.rate <= min(1.0, rec.rate + rec.gap_to_capacity) + 1e-9
            assert rec.gap_to_capacity >= -1e-9

    def test_rate_monotone_in_cardinality(self):
        records = pc_sweep([8.0], [2, 3, 4])
        rates = {r.cardinality: r.rate for r in records}
        assert rates[2] <= rates[3] + 1e-6 <= rates[4] + 2e-6

    def test_gap_stop_prunes_cards(self):
        records = pc_sweep([0.0], [2, 3, 4, 8, 16], gap_stop=0.01)
        cards = sorted({r.cardinality for r in records})
        assert cards[-1] < 16  # low SNR satisfied long before 16 points

    def test_checkpoint_resume(self, tmp_path):
        records = pc_sweep([2.0, 5.0], [2, 3], checkpoint_dir=str(tmp_path))
        resumed = pc_sweep([2.0, 5.0], [2, 3], checkpoint_dir=str(tmp_path))
        assert len(resumed) == len(records)
        for a, b in zip(resumed, records):
            assert a.rate == b.rate  # byte-identical via checkpoint round trip

    def test_record_round_trip(self):
        rec = PcSweepRecord(
            snr_db=5.0,
            cardinality=2,
            rate=0.5,
            gap_to_capacity=0.1,
            pmf=FinitePmf([-1.0, 1.0], [0.5, 0.5]),
            converged_by="delta_i",
        )
        back = _pc_record_from_dict(_pc_record_to_dict(rec))
        assert back == rec


class TestMinCardinalitySelection:
    def test_trivial_gap_target(self):
        records = pc_sweep([0.0], [2])
        selections = min_cardinality_selection(records, gap_target=1.0)
        assert len(selections) == 1
        assert selections[0].cardinality == 2
        assert selections[0].log2_cardinality_minus_capacity == pytest.approx(
            1.0 - selections[0].capacity, abs=1e-12
        )

    def test_picks_smallest_satisfying(self):
        records = pc_sweep([5.0], [2, 3, 4, 5], gap_stop=0.01)
        selections = min_cardinality_selection(records, gap_target=0.01)
        chosen = selections[0].cardinality
        worse = [r for r in records if r.cardinality < chosen]
        assert all(r.gap_to_capacity > 0.01 for r in worse)
        assert selections[0].gap <= 0.01

    def test_raises_when_unsatisfied(self):
        records = pc_sweep([15.0], [2])
        with pytest.raises(NoSatisfyingCardinality):
            min_cardinality_selection(records, gap_target=0.01)

    def test_selection_nondecreasing_in_snr(self):
        records = pc_sweep([0.0, 5.0], [2, 3, 4, 5], gap_stop=0.01)
        selections = min_cardinality_selection(records, gap_target=0.01)
        cards = [s.cardinality for s in selections]
        assert cards == sorted(cards)
