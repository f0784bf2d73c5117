import pytest
from hypothesis import given, strategies as st

from citetree.domain import (
    AuthorRecord,
    ClassLabel,
    JournalStats,
    MCQ_YEARS,
    SubjectClass,
    SubjectHistory,
    class_of_level,
    compute_claper,
    compute_mcq,
    derive_author_block,
    level_of_citations,
)
from citetree.errors import MalformedRecordError, UndefinedQuotientError


def journal(c, n, book=False, cito=0):
    return JournalStats(dict(zip(MCQ_YEARS, c)), dict(zip(MCQ_YEARS, n)), cito, book)


@pytest.mark.parametrize("c, level", [(0, 0), (1, 1), (2, 2), (5, 2), (6, 3), (7, 3), (10, 3),
                                      (11, 4), (30, 4), (31, 5), (1000, 5)])
def test_level_bins(c, level):
    assert level_of_citations(c) == level


@pytest.mark.parametrize("bad", [-1, 2.5])
def test_level_rejects_bad_counts(bad):
    with pytest.raises(MalformedRecordError):
        level_of_citations(bad)


@pytest.mark.parametrize("level, label", [(0, ClassLabel.LOW), (1, ClassLabel.LOW), (2, ClassLabel.MEDIAN),
                                          (3, ClassLabel.MEDIAN), (4, ClassLabel.HIGH), (5, ClassLabel.HIGH)])
def test_class_of_level(level, label):
    assert class_of_level(level) is label


def test_class_of_level_out_of_range():
    with pytest.raises(MalformedRecordError):
        class_of_level(6)


def test_class_order():
    assert ClassLabel.LOW < ClassLabel.MEDIAN < ClassLabel.HIGH
    assert len(ClassLabel) == 3


@given(st.integers(0, 500), st.integers(0, 500))
def test_binning_monotone(a, b):
    lo, hi = sorted((a, b))
    assert level_of_citations(lo) <= level_of_citations(hi)
    assert class_of_level(level_of_citations(lo)) <= class_of_level(level_of_citations(hi))


def test_author_block_single_newcomer():
    assert derive_author_block([AuthorRecord(2009, "JP", "a")], 2009) == (1, 1.0, 0.0, 1, 1, 1.0)


def test_author_block_mixed_pair():
    authors = [AuthorRecord(1999, "JP", "a"), AuthorRecord(2009, "FR", "a")]
    assert derive_author_block(authors, 2009) == (2, 0.5, 5.0, 1, 2, 0.5)


def test_author_block_foreign_trio():
    authors = [AuthorRecord(2004, "US", i) for i in "abc"]
    assert derive_author_block(authors, 2009) == (3, 0.0, 5.0, 3, 1, 0.0)


def test_author_block_home_country_parameter():
    authors = [AuthorRecord(2004, "FR", "a"), AuthorRecord(2004, "US", "b")]
    assert derive_author_block(authors, 2009, home_country="FR")[5] == 0.5


def test_author_block_errors():
    with pytest.raises(MalformedRecordError):
        derive_author_block([], 2009)
    with pytest.raises(MalformedRecordError):
        derive_author_block([AuthorRecord(2010, "JP", "a")], 2009)


_COUNTRIES = ["JP", "US", "FR"]
authors_st = st.lists(
    st.tuples(st.integers(1960, 2009), st.sampled_from(_COUNTRIES), st.integers(0, 4)),
    min_size=1, max_size=8,
).map(lambda xs: [AuthorRecord(y, c, f"{c}-{i}") for y, c, i in xs])


@given(authors_st)
def test_author_block_invariants(authors):
    aut, rfstp, avacag, inst, nati, jpper = derive_author_block(authors, 2009)
    assert nati <= inst <= aut
    assert 0 <= rfstp <= 1 and 0 <= jpper <= 1
    assert avacag >= 0
    assert (avacag == 0) == (rfstp == 1)
    assert abs(rfstp * aut - round(rfstp * aut)) < 1e-9
    assert abs(jpper * aut - round(jpper * aut)) < 1e-9


def test_mcq_examples():
    assert compute_mcq(journal([9] * 5, [9] * 5, book=True)) == 0.0
    assert compute_mcq(journal([1] * 5, [2] * 5)) == 0.5
    assert compute_mcq(journal([0] * 5, [5] * 5)) == 0.0


def test_mcq_zero_publications_is_an_error():
    with pytest.raises(UndefinedQuotientError):
        compute_mcq(journal([0] * 5, [0] * 5))


def test_mcq_missing_year():
    j = JournalStats({2004: 1}, {2004: 1}, 0)
    with pytest.raises(MalformedRecordError):
        compute_mcq(j)


@given(st.lists(st.integers(0, 50), min_size=5, max_size=5),
       st.lists(st.integers(1, 50), min_size=5, max_size=5), st.integers(1, 20))
def test_mcq_scale_invariant(c, n, k):
    assert compute_mcq(journal(c, n)) == pytest.approx(compute_mcq(journal([k * x for x in c], [k * x for x in n])),
                                                       rel=1e-12, abs=1e-15)


def test_claper_examples():
    assert compute_claper(SubjectHistory.from_counts({SubjectClass.ALGEBRA: 12}), SubjectClass.ALGEBRA) == 1.0
    h = SubjectHistory.from_counts({SubjectClass.ANALYSIS: 30, SubjectClass.ALGEBRA: 70})
    assert compute_claper(h, SubjectClass.ANALYSIS) == pytest.approx(0.3, abs=1e-12)
    assert compute_claper(h, SubjectClass.LOGIC) == 0.0


def test_claper_empty_history():
    with pytest.raises(UndefinedQuotientError):
        compute_claper(SubjectHistory({}, 0), SubjectClass.LOGIC)


@given(st.dictionaries(st.sampled_from(list(SubjectClass)), st.integers(1, 100), min_size=1),
       st.integers(1, 20), st.sampled_from(list(SubjectClass)))
def test_claper_scale_invariant(counts, k, s):
    a = compute_claper(SubjectHistory.from_counts(counts), s)
    b = compute_claper(SubjectHistory.from_counts({key: k * v for key, v in counts.items()}), s)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


def test_subject_tokens_round_trip():
    assert len(SubjectClass) == 8
    for s in SubjectClass:
        assert SubjectClass.from_token(s.value) is s
        assert SubjectClass.from_code(s.code) is s
    with pytest.raises(MalformedRecordError):
        SubjectClass.from_token("topology")
