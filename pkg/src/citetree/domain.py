"""Domain types, citation binning and the formulas behind the 13 predictors.

Predictors are grouped in three families: authors (aut, rfstp, avacag, inst,
nati, jpper), article (ref, pg, rt, msccla, claper) and journal (mcq,
cito2009).  Fractions are plain doubles; callers comparing them should use a
1e-9 tolerance.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import MalformedRecordError, UndefinedQuotientError

DEFAULT_HOME_COUNTRY = "JP"
MCQ_YEARS = tuple(range(2004, 2009))

# (level, lowest citation count, highest citation count or None for unbounded)
LEVEL_BINS = (
    (0, 0, 0),
    (1, 1, 1),
    (2, 2, 5),
    (3, 6, 10),
    (4, 11, 30),
    (5, 31, None),
)
LEVELS = tuple(b[0] for b in LEVEL_BINS)


class ClassLabel(enum.IntEnum):
    """Three-way response; the integer value doubles as the class index."""

    LOW = 0
    MEDIAN = 1
    HIGH = 2

    @property
    def token(self) -> str:
        return self.name.lower()

    @classmethod
    def from_token(cls, token: str) -> "ClassLabel":
        try:
            return cls[token.strip().upper()]
        except KeyError:
            raise MalformedRecordError(f"unknown class label {token!r}") from None


N_CLASSES = len(ClassLabel)


class SubjectClass(enum.Enum):
    """Combined 8-way subject classification.  Values are the CSV tokens."""

    LOGIC = "logic"
    ALGEBRA = "algebra"
    GEOMETRY = "geometry"
    ANALYSIS = "analysis"
    PROBABILITY = "probability"
    COMPUTER_SCIENCE = "computer-science"
    APPLICATIONS = "applications"
    OTHERS = "others"

    @property
    def code(self) -> int:
        return _SUBJECT_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "SubjectClass":
        return SUBJECTS[int(code)]

    @classmethod
    def from_token(cls, token: str) -> "SubjectClass":
        try:
            return cls(token.strip().lower())
        except ValueError:
            allowed = ", ".join(s.value for s in cls)
            raise MalformedRecordError(
                f"unknown subject {token!r}; expected one of: {allowed}"
            ) from None


SUBJECTS: tuple[SubjectClass, ...] = tuple(SubjectClass)
_SUBJECT_CODES = {s: i for i, s in enumerate(SUBJECTS)}


@dataclass(frozen=True)
class AuthorRecord:
    first_publication_year: int
    country: str
    institute_id: str


@dataclass(frozen=True)
class JournalStats:
    """Per-journal counts used for mcq and cito2009.

    ``citations_by_year[i]`` is the number of citations appearing in the
    evaluation year to papers the journal published in year ``i``.
    """

    citations_by_year: Mapping[int, int]
    publications_by_year: Mapping[int, int]
    accumulated_citations_to_2009: int
    is_book_or_thesis: bool = False

    def __post_init__(self):
        counts = [*self.citations_by_year.values(), *self.publications_by_year.values()]
        if any(c < 0 for c in counts) or self.accumulated_citations_to_2009 < 0:
            raise MalformedRecordError("journal counts must be non-negative")


@dataclass(frozen=True)
class SubjectHistory:
    counts_by_subject_2004_2008: Mapping[SubjectClass, int]
    total_2004_2008: int

    def __post_init__(self):
        if sum(self.counts_by_subject_2004_2008.values()) != self.total_2004_2008:
            raise MalformedRecordError("subject counts do not sum to the stated total")

    @classmethod
    def from_counts(cls, counts: Mapping[SubjectClass, int]) -> "SubjectHistory":
        return cls(dict(counts), sum(counts.values()))


@dataclass(frozen=True)
class PaperRecord:
    publication_year: int
    authors: Sequence[AuthorRecord]
    references: int
    pages: int
    has_review_text: bool
    subject: SubjectClass
    journal: JournalStats
    citations: int

    def __post_init__(self):
        if not self.authors:
            raise MalformedRecordError("paper has no authors")
        if self.pages < 1:
            raise MalformedRecordError(f"pages must be >= 1, got {self.pages}")
        if self.references < 0:
            raise MalformedRecordError(f"references must be >= 0, got {self.references}")
        if self.citations < 0:
            raise MalformedRecordError(f"citations must be >= 0, got {self.citations}")


@dataclass(frozen=True)
class PredictorVector:
    aut: int
    rfstp: float
    avacag: float
    inst: int
    nati: int
    jpper: float
    ref: int
    pg: int
    rt: int
    msccla: SubjectClass
    claper: float
    mcq: float
    cito2009: int

    def as_tuple(self) -> tuple[float, ...]:
        """Numeric encoding in schema order; the subject becomes its code."""
        return tuple(
            getattr(self, name).code if name == "msccla" else float(getattr(self, name))
            for name in PREDICTOR_NAMES
        )


PREDICTOR_NAMES: tuple[str, ...] = tuple(
    f.name for f in PredictorVector.__dataclass_fields__.values()
)


def level_of_citations(c: int) -> int:
    """Map a citation count onto the six citation levels (0..5)."""
    if c < 0 or int(c) != c:
        raise MalformedRecordError(f"citation count must be a non-negative integer, got {c!r}")
    for level, lo, hi in LEVEL_BINS:
        if c >= lo and (hi is None or c <= hi):
            return level
    raise AssertionError("unreachable")


def class_of_level(level: int) -> ClassLabel:
    if level in (0, 1):
        return ClassLabel.LOW
    if level in (2, 3):
        return ClassLabel.MEDIAN
    if level in (4, 5):
        return ClassLabel.HIGH
    raise MalformedRecordError(f"level must be in 0..5, got {level!r}")


def class_of_citations(c: int) -> ClassLabel:
    return class_of_level(level_of_citations(c))


def derive_author_block(
    authors: Sequence[AuthorRecord],
    pub_year: int,
    home_country: str = DEFAULT_HOME_COUNTRY,
) -> tuple[int, float, float, int, int, float]:
    """Return ``(aut, rfstp, avacag, inst, nati, jpper)`` for one paper.

    ``rfstp`` counts authors whose first publication falls in ``pub_year``;
    ``avacag`` averages ``pub_year - first_publication_year``.
    """
    if not authors:
        raise MalformedRecordError("paper has no authors")
    for a in authors:
        if a.first_publication_year > pub_year:
            raise MalformedRecordError(
                f"first publication year {a.first_publication_year} is after "
                f"the paper's publication year {pub_year}"
            )
    aut = len(authors)
    newcomers = sum(1 for a in authors if a.first_publication_year == pub_year)
    age_sum = sum(pub_year - a.first_publication_year for a in authors)
    home = sum(1 for a in authors if a.country == home_country)
    inst = len({a.institute_id for a in authors})
    nati = len({a.country for a in authors})
    return aut, newcomers / aut, age_sum / aut, inst, nati, home / aut


def compute_mcq(j: JournalStats) -> float:
    """Citations in the evaluation year per publication over 2004..2008.

    Books and theses get 0 by convention.  A journal with no publications in
    the window has no defined quotient and raises rather than returning 0.
    """
    if j.is_book_or_thesis:
        return 0.0
    missing = [y for y in MCQ_YEARS
               if y not in j.citations_by_year or y not in j.publications_by_year]
    if missing:
        raise MalformedRecordError(f"journal stats missing years {missing}")
    cites = sum(j.citations_by_year[y] for y in MCQ_YEARS)
    pubs = sum(j.publications_by_year[y] for y in MCQ_YEARS)
    if pubs == 0:
        raise UndefinedQuotientError("mcq undefined: journal has no publications in 2004-2008")
    return cites / pubs


def compute_cito2009(j: JournalStats) -> int:
    return 0 if j.is_book_or_thesis else j.accumulated_citations_to_2009


def compute_claper(h: SubjectHistory, s: SubjectClass) -> float:
    if h.total_2004_2008 <= 0:
        raise UndefinedQuotientError("claper undefined: empty subject history")
    return h.counts_by_subject_2004_2008.get(s, 0) / h.total_2004_2008


def derive_predictors(
    paper: PaperRecord,
    history: SubjectHistory,
    home_country: str = DEFAULT_HOME_COUNTRY,
) -> PredictorVector:
    aut, rfstp, avacag, inst, nati, jpper = derive_author_block(
        paper.authors, paper.publication_year, home_country
    )
    return PredictorVector(
        aut=aut,
        rfstp=rfstp,
        avacag=avacag,
        inst=inst,
        nati=nati,
        jpper=jpper,
        ref=paper.references,
        pg=paper.pages,
        rt=int(bool(paper.has_review_text)),
        msccla=paper.subject,
        claper=compute_claper(history, paper.subject),
        mcq=compute_mcq(paper.journal),
        cito2009=compute_cito2009(paper.journal),
    )
