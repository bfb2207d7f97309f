"""Trial-record parsing and paired-comparison statistics.

scipy appears here only as an independent oracle; the package itself never
imports it.
"""

from __future__ import annotations

import math
import random

import pytest
from scipy import stats as sps

from huecap import stats
from huecap.cvd_model import CvdProfile, CvdType
from huecap.errors import DegenerateData, DomainError, ParseError, ValidationError

HEADER = "participant_id,desktop_type,desktop_severity,ar_type,ar_severity,pre_score,post_score\n"


def write_csv(tmp_path, body, name="trials.csv", header=HEADER):
    path = tmp_path / name
    path.write_text(header + body, encoding="utf-8")
    return path


class TestBundledDataset:
    def test_loads_ten_records(self):
        records = stats.load_reference_trials()
        assert len(records) == 10
        assert [r.participant_id for r in records] == [str(i) for i in range(1, 11)]

    def test_first_record_fields(self):
        first = stats.load_reference_trials()[0]
        assert first.desktop_profile == CvdProfile(CvdType.PROTAN, 0.30)
        assert first.ar_profile == CvdProfile(CvdType.PROTAN, 0.50)
        assert (first.pre_score, first.post_score) == (14, 24)

    def test_no_desktop_cvd_rows(self):
        records = stats.load_reference_trials()
        without = [r.participant_id for r in records if r.desktop_profile is None]
        assert without == ["2", "4", "7"]

    def test_subgroup_selector(self):
        records = stats.load_reference_trials()
        cvd = stats.subgroup(records, stats.has_desktop_cvd)
        assert [r.participant_id for r in cvd] == ["1", "3", "5", "6", "8", "9", "10"]

    def test_path_exists(self):
        assert stats.reference_trials_path().is_file()


class TestCsvParsing:
    def test_minimal_file(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,protan,50,10,20\n")
        (record,) = stats.load_trials(path)
        assert record.participant_id == "a"
        assert record.desktop_profile is None
        assert record.ar_profile == CvdProfile(CvdType.PROTAN, 0.50)

    def test_blank_rows_skipped(self, tmp_path):
        path = write_csv(tmp_path, "\na,none,0,protan,50,10,20\n\n")
        assert len(stats.load_trials(path)) == 1

    def test_bad_header_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,protan,50,10,20\n",
                         header="id,pre,post\n")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_header_only_rejected(self, tmp_path):
        path = write_csv(tmp_path, "")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_duplicate_ids_rejected(self, tmp_path):
        path = write_csv(tmp_path,
                         "a,none,0,protan,50,10,20\na,none,0,protan,50,11,21\n")
        with pytest.raises(ValidationError):
            stats.load_trials(path)

    def test_score_out_of_range(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,protan,50,10,26\n")
        with pytest.raises(ValidationError) as err:
            stats.load_trials(path)
        assert "row 2" in str(err.value)

    def test_error_reports_offending_row_number(self, tmp_path):
        path = write_csv(tmp_path,
                         "a,none,0,protan,50,10,20\nb,none,0,protan,50,-1,20\n")
        with pytest.raises(ValidationError) as err:
            stats.load_trials(path)
        assert "row 3" in str(err.value)

    def test_non_integer_score(self, tmp_path):
        # unreadable text is a parse failure, not a range violation
        path = write_csv(tmp_path, "a,none,0,protan,50,ten,20\n")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_severity_above_100_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,protan,150,10,20\n")
        with pytest.raises(ValidationError):
            stats.load_trials(path)

    def test_none_with_nonzero_severity_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,none,30,protan,50,10,20\n")
        with pytest.raises(ValidationError):
            stats.load_trials(path)

    def test_headset_type_none_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,none,0,10,20\n")
        with pytest.raises(ValidationError):
            stats.load_trials(path)

    def test_unknown_type_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,purple,30,protan,50,10,20\n")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_wrong_column_count_rejected(self, tmp_path):
        path = write_csv(tmp_path, "a,none,0,protan,50,10\n")
        with pytest.raises(ParseError):
            stats.load_trials(path)

    def test_record_constructor_validates(self):
        with pytest.raises(ValidationError):
            stats.TrialRecord("x", None, CvdProfile(CvdType.PROTAN, 0.5), 10, 30)
        with pytest.raises(ValidationError):
            stats.TrialRecord("x", None, CvdProfile(CvdType.PROTAN, 0.5), -1, 20)
        with pytest.raises(ValidationError):
            stats.TrialRecord("", None, CvdProfile(CvdType.PROTAN, 0.5), 10, 20)


class TestPairedComparison:
    def test_reference_dataset_all_participants(self):
        result = stats.paired_t_from_records(stats.load_reference_trials())
        assert result.n == 10 and result.df == 9
        assert result.mean_diff == pytest.approx(8.2, abs=1e-12)
        assert result.sd_diff == pytest.approx(3.326660, abs=1e-5)
        assert result.t == pytest.approx(7.7948, abs=1e-4)
        assert result.p == pytest.approx(2.723e-05, rel=1e-3)
        assert result.ci_low == pytest.approx(5.8203, abs=1e-4)
        assert result.ci_high == pytest.approx(10.5797, abs=1e-4)
        assert result.cohens_d == pytest.approx(2.4649, abs=1e-4)

    def test_reference_dataset_desktop_cvd_subgroup(self):
        records = stats.subgroup(stats.load_reference_trials(),
                                 stats.has_desktop_cvd)
        result = stats.paired_t_from_records(records)
        assert result.n == 7 and result.df == 6
        assert result.mean_diff == pytest.approx(9.2857, abs=1e-4)
        assert result.t == pytest.approx(9.1317, abs=1e-4)
        assert result.p == pytest.approx(9.699e-05, rel=1e-3)
        assert result.ci_low == pytest.approx(6.7975, abs=1e-4)
        assert result.ci_high == pytest.approx(11.7739, abs=1e-4)
        assert result.cohens_d == pytest.approx(3.4515, abs=1e-4)

    def test_direction_is_post_minus_pre(self):
        result = stats.paired_t([10, 10], [12, 14])
        assert result.mean_diff == 3.0

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            stats.paired_t([1, 2], [1])

    def test_too_few_pairs(self):
        with pytest.raises(DomainError):
            stats.paired_t([1], [2])

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            stats.paired_t([1.0, float("nan")], [2.0, 3.0])

    def test_constant_differences_degenerate(self):
        with pytest.raises(DegenerateData):
            stats.paired_t([1, 2, 3], [4, 5, 6])

    def test_confidence_bounds(self):
        for bad in (0.0, 1.0, -0.5, 1.5, float("nan")):
            with pytest.raises(DomainError):
                stats.paired_t([1, 2, 3], [2, 4, 7], confidence=bad)

    def test_identities(self):
        pre = [3, 7, 1, 9, 4, 6]
        post = [8, 9, 6, 11, 12, 7]
        r = stats.paired_t(pre, post)
        assert r.df == r.n - 1
        assert r.cohens_d * math.sqrt(r.n) == pytest.approx(r.t, abs=1e-12)
        assert r.ci_low < r.mean_diff < r.ci_high
        mid = (r.ci_low + r.ci_high) / 2
        assert mid == pytest.approx(r.mean_diff, abs=1e-12)

    def test_shift_invariance_of_t(self):
        pre = [3, 7, 1, 9, 4, 6]
        post = [8, 9, 6, 11, 12, 7]
        r1 = stats.paired_t(pre, post)
        r2 = stats.paired_t([p + 5 for p in pre], [q + 5 for q in post])
        assert r2.t == pytest.approx(r1.t, abs=1e-12)
        assert r2.mean_diff == pytest.approx(r1.mean_diff, abs=1e-12)

    def test_sign_antisymmetry(self):
        pre = [3, 7, 1, 9, 4, 6]
        post = [8, 9, 6, 11, 12, 7]
        fwd = stats.paired_t(pre, post)
        rev = stats.paired_t(post, pre)
        assert rev.t == pytest.approx(-fwd.t, abs=1e-12)
        assert rev.p == pytest.approx(fwd.p, rel=1e-12)

    def test_ci_width_grows_with_confidence(self):
        pre = [3, 7, 1, 9, 4, 6]
        post = [8, 9, 6, 11, 12, 7]
        widths = [
            stats.paired_t(pre, post, confidence=c).ci_high
            - stats.paired_t(pre, post, confidence=c).ci_low
            for c in (0.80, 0.90, 0.95, 0.99)
        ]
        assert widths == sorted(widths)

    def test_against_scipy_over_random_datasets(self):
        rng = random.Random(20240817)
        for _ in range(1000):
            n = rng.randint(3, 40)
            pre = [rng.gauss(10, 4) for _ in range(n)]
            post = [p + rng.gauss(2, 3) for p in pre]
            diffs = [q - p for p, q in zip(pre, post)]
            if len(set(diffs)) == 1:
                continue
            ours = stats.paired_t(pre, post)
            ref = sps.ttest_rel(post, pre)
            assert ours.t == pytest.approx(ref.statistic, abs=1e-9)
            assert ours.p == pytest.approx(ref.pvalue, abs=1e-9)
            half = sps.t.ppf(0.975, n - 1) * ours.sd_diff / math.sqrt(n)
            assert ours.ci_low == pytest.approx(ours.mean_diff - half, abs=1e-9)
            assert ours.ci_high == pytest.approx(ours.mean_diff + half, abs=1e-9)


class TestDistributionHelpers:
    @pytest.mark.parametrize(
        "confidence,df,expected",
        [(0.95, 9, 2.262), (0.95, 6, 2.447), (0.95, 1, 12.706),
         (0.99, 9, 3.250), (0.90, 20, 1.725)],
    )
    def test_critical_values_match_tables(self, confidence, df, expected):
        assert stats.t_critical(confidence, df) == pytest.approx(expected, abs=1e-3)

    def test_critical_matches_scipy(self):
        for df in (1, 2, 5, 9, 30, 120):
            for conf in (0.8, 0.9, 0.95, 0.99, 0.999):
                want = sps.t.ppf(0.5 + conf / 2, df)
                assert stats.t_critical(conf, df) == pytest.approx(want, abs=1e-8)

    def test_two_tailed_p_matches_scipy(self):
        for df in (1, 2, 5, 9, 30, 120):
            for t in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, -3.0):
                want = 2 * sps.t.sf(abs(t), df)
                got = stats.t_two_tailed_p(t, df)
                assert got == pytest.approx(want, abs=1e-8)

    def test_p_at_zero_is_one(self):
        assert stats.t_two_tailed_p(0.0, 9) == pytest.approx(1.0, abs=1e-12)

    def test_reported_effect_size_constant(self):
        assert stats.ORIGINALLY_REPORTED_SUBGROUP_D == 1.45
