"""Datasets: CSV parsing/emission, stratified sampling and synthetic corpora."""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import domain
from .domain import (
    AuthorRecord,
    ClassLabel,
    JournalStats,
    PaperRecord,
    PredictorVector,
    SubjectClass,
    SubjectHistory,
    SUBJECTS,
)
from .errors import ConfigError, DataError, MalformedRecordError, SchemaError
from .rng import make_rng, partial_shuffle

CITATIONS_COLUMN = "citations"


class Kind(str, enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    BINARY = "binary"


@dataclass(frozen=True)
class Predictor:
    name: str
    kind: Kind = Kind.NUMERIC
    integer: bool = False
    n_categories: int = 0

    def __post_init__(self):
        if self.kind is Kind.CATEGORICAL and self.n_categories < 2:
            raise SchemaError(f"categorical predictor {self.name!r} needs >= 2 categories")


Schema = tuple  # tuple[Predictor, ...]

_INTEGER_PREDICTORS = {"aut", "inst", "nati", "ref", "pg", "cito2009"}


def _standard_predictor(name: str) -> Predictor:
    if name == "msccla":
        return Predictor(name, Kind.CATEGORICAL, integer=True, n_categories=len(SUBJECTS))
    if name == "rt":
        return Predictor(name, Kind.BINARY, integer=True)
    return Predictor(name, Kind.NUMERIC, integer=name in _INTEGER_PREDICTORS)


STANDARD_SCHEMA: Schema = tuple(_standard_predictor(n) for n in domain.PREDICTOR_NAMES)


def schema_names(schema: Schema) -> tuple[str, ...]:
    return tuple(p.name for p in schema)


class Dataset:
    """Column-oriented sample: predictor matrix, class indices, citations.

    ``X`` stores every predictor as float64; categorical predictors hold their
    integer code (subjects are coded in ``SubjectClass`` declaration order).
    ``citations`` is optional so that hand-built datasets with arbitrary
    schemas can be used directly by the tree learner.
    """

    def __init__(self, schema: Schema, X, y, citations=None):
        self.schema = tuple(schema)
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1 and len(self.schema) == 1:
            X = X.reshape(-1, 1)
        if X.size == 0:
            X = X.reshape(0, len(self.schema))
        y = np.asarray(y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[1] != len(self.schema):
            raise SchemaError(f"X has shape {X.shape}, schema has {len(self.schema)} predictors")
        if X.shape[0] != y.shape[0]:
            raise SchemaError("X and y have different row counts")
        if y.size and (y.min() < 0 or y.max() >= domain.N_CLASSES):
            raise DataError("class indices must lie in 0..2")
        if citations is not None:
            citations = np.asarray(citations, dtype=np.int64).reshape(-1)
            if citations.shape != y.shape:
                raise SchemaError("citations and y have different row counts")
            if citations.size and citations.min() < 0:
                raise DataError("citations must be non-negative")
            derived = np.array([domain.class_of_citations(int(c)) for c in citations], dtype=np.int64)
            if not np.array_equal(derived, y):
                raise DataError("class labels disagree with citation counts")
        for j, p in enumerate(self.schema):
            col = X[:, j]
            if not np.all(np.isfinite(col)):
                raise DataError(f"column {p.name!r} has non-finite values")
            if p.kind is Kind.BINARY and not np.all((col == 0) | (col == 1)):
                raise DataError(f"column {p.name!r} must be 0 or 1")
            if p.kind is Kind.CATEGORICAL and not np.all(
                (col == np.round(col)) & (col >= 0) & (col < p.n_categories)
            ):
                raise DataError(f"column {p.name!r} has codes outside 0..{p.n_categories - 1}")
        X.setflags(write=False)
        y.setflags(write=False)
        if citations is not None:
            citations.setflags(write=False)
        self.X = X
        self.y = y
        self.citations = citations

    @classmethod
    def from_vectors(cls, vectors: Sequence[PredictorVector], citations: Sequence[int]) -> "Dataset":
        X = np.array([v.as_tuple() for v in vectors], dtype=np.float64).reshape(-1, len(STANDARD_SCHEMA))
        cites = np.asarray(list(citations), dtype=np.int64)
        y = np.array([domain.class_of_citations(int(c)) for c in cites], dtype=np.int64)
        return cls(STANDARD_SCHEMA, X, y, cites)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        same_cites = (
            (self.citations is None and other.citations is None)
            or (self.citations is not None and other.citations is not None
                and np.array_equal(self.citations, other.citations))
        )
        return (self.schema == other.schema and np.array_equal(self.X, other.X)
                and np.array_equal(self.y, other.y) and same_cites)

    def __repr__(self) -> str:
        return f"Dataset(N={len(self)}, predictors={list(self.names)})"

    @property
    def names(self) -> tuple[str, ...]:
        return schema_names(self.schema)

    @property
    def levels(self) -> np.ndarray:
        if self.citations is None:
            raise DataError("dataset carries no citation counts")
        return np.array([domain.level_of_citations(int(c)) for c in self.citations], dtype=np.int64)

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.index_of(name)]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"unknown predictor {name!r}") from None

    def take(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.int64)
        cites = None if self.citations is None else self.citations[indices]
        return Dataset(self.schema, self.X[indices], self.y[indices], cites)

    def with_column(self, j: int, values) -> "Dataset":
        X = self.X.copy()
        X[:, j] = values
        return Dataset(self.schema, X, self.y, self.citations)

    def vector(self, i: int) -> PredictorVector:
        if self.schema != STANDARD_SCHEMA:
            raise SchemaError("predictor vectors exist only for the standard schema")
        return _vector_from_row(self.X[i])

    def rows(self) -> list[tuple[PredictorVector, ClassLabel, int, int]]:
        if self.citations is None:
            raise DataError("dataset carries no citation counts")
        return [
            (self.vector(i), ClassLabel(int(self.y[i])), int(c), domain.level_of_citations(int(c)))
            for i, c in enumerate(self.citations)
        ]


def _vector_from_row(row) -> PredictorVector:
    values = {}
    for p, v in zip(STANDARD_SCHEMA, row):
        if p.kind is Kind.CATEGORICAL:
            values[p.name] = SubjectClass.from_code(int(v))
        elif p.integer:
            values[p.name] = int(v)
        else:
            values[p.name] = float(v)
    return PredictorVector(**values)


# -- CSV -------------------------------------------------------------------

def _format_value(p: Predictor, v: float) -> str:
    if p.kind is Kind.CATEGORICAL and p.n_categories == len(SUBJECTS):
        return SubjectClass.from_code(int(v)).value
    if p.integer or p.kind is Kind.BINARY:
        return str(int(v))
    return repr(float(v))


def _parse_value(p: Predictor, token: str, line: int) -> float:
    token = token.strip()
    where = f"line {line}, column {p.name!r}"
    if token == "":
        raise DataError(f"{where}: missing value")
    if p.kind is Kind.CATEGORICAL:
        if p.n_categories == len(SUBJECTS):
            try:
                return float(SubjectClass.from_token(token).code)
            except MalformedRecordError as exc:
                raise DataError(f"{where}: {exc}") from None
        if not token.isdigit() or int(token) >= p.n_categories:
            raise DataError(f"{where}: category code {token!r} out of range")
        return float(token)
    try:
        v = float(token)
    except ValueError:
        raise DataError(f"{where}: non-numeric value {token!r}") from None
    if not np.isfinite(v):
        raise DataError(f"{where}: non-finite value {token!r}")
    if p.kind is Kind.BINARY and v not in (0.0, 1.0):
        raise DataError(f"{where}: {p.name} must be 0 or 1, got {token!r}")
    if p.integer and v != int(v):
        raise DataError(f"{where}: expected an integer, got {token!r}")
    return v


def parse_dataset_csv(stream: TextIO, schema: Schema = STANDARD_SCHEMA) -> Dataset:
    """Read a predictor CSV (header required) into a :class:`Dataset`.

    Columns are matched by name; every schema predictor and ``citations``
    must be present and nothing else is allowed.
    """
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise SchemaError("empty input: header row required") from None
    expected = [*schema_names(schema), CITATIONS_COLUMN]
    unknown = [h for h in header if h not in expected]
    if unknown:
        raise SchemaError(f"unknown column(s): {', '.join(unknown)}")
    missing = [e for e in expected if e not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    if len(set(header)) != len(header):
        raise SchemaError("duplicate column names in header")
    pos = {h: i for i, h in enumerate(header)}
    X, cites = [], []
    for line, record in enumerate(reader, start=2):
        if not record or all(not t.strip() for t in record):
            continue
        if len(record) != len(header):
            raise DataError(f"line {line}: expected {len(header)} fields, got {len(record)}")
        X.append([_parse_value(p, record[pos[p.name]], line) for p in schema])
        c = _parse_value(Predictor(CITATIONS_COLUMN, integer=True), record[pos[CITATIONS_COLUMN]], line)
        if c < 0:
            raise DataError(f"line {line}: citations must be non-negative")
        cites.append(int(c))
    y = [domain.class_of_citations(c) for c in cites]
    return Dataset(schema, np.array(X, dtype=np.float64).reshape(-1, len(schema)), y, cites)


def write_dataset_csv(d: Dataset, stream: TextIO) -> None:
    if d.citations is None:
        raise DataError("cannot emit a dataset without citation counts")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([*d.names, CITATIONS_COLUMN])
    for row, c in zip(d.X, d.citations):
        writer.writerow([*(_format_value(p, v) for p, v in zip(d.schema, row)), int(c)])


def dataset_to_csv(d: Dataset) -> str:
    buf = io.StringIO()
    write_dataset_csv(d, buf)
    return buf.getvalue()


# -- raw paper records -----------------------------------------------------

RAW_COLUMNS = (
    "publication_year", "authors", "references", "pages", "rt", "subject",
    "journal_citations", "journal_publications", "cito2009", "book", CITATIONS_COLUMN,
)


def _int_field(record: dict, name: str, line: int) -> int:
    token = record[name].strip()
    try:
        return int(token)
    except ValueError:
        raise DataError(f"line {line}, column {name!r}: expected an integer, got {token!r}") from None


def _year_counts(token: str, name: str, line: int) -> dict[int, int]:
    parts = token.split(";")
    if len(parts) != len(domain.MCQ_YEARS):
        raise DataError(f"line {line}, column {name!r}: expected {len(domain.MCQ_YEARS)} ';'-separated counts")
    try:
        return {y: int(p) for y, p in zip(domain.MCQ_YEARS, parts)}
    except ValueError:
        raise DataError(f"line {line}, column {name!r}: non-integer count in {token!r}") from None


def _parse_authors(token: str, line: int) -> list[AuthorRecord]:
    authors = []
    for chunk in filter(None, (c.strip() for c in token.split(";"))):
        parts = chunk.split("/")
        if len(parts) != 3 or not parts[0].strip().isdigit():
            raise DataError(f"line {line}, column 'authors': expected year/country/institute, got {chunk!r}")
        authors.append(AuthorRecord(int(parts[0]), parts[1].strip(), parts[2].strip()))
    return authors


def parse_paper_records(stream: TextIO) -> list[PaperRecord]:
    """Read raw per-paper records.

    ``authors`` is ``year/country/institute`` entries joined by ``;``;
    ``journal_citations`` and ``journal_publications`` are five ``;``-joined
    counts for 2004..2008.
    """
    reader = csv.DictReader(stream)
    header = reader.fieldnames or []
    missing = [c for c in RAW_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"missing required column(s): {', '.join(missing)}")
    unknown = [c for c in header if c not in RAW_COLUMNS]
    if unknown:
        raise SchemaError(f"unknown column(s): {', '.join(unknown)}")
    records = []
    for line, rec in enumerate(reader, start=2):
        if any(rec[c] is None for c in RAW_COLUMNS):
            raise DataError(f"line {line}: too few fields")
        rt = _int_field(rec, "rt", line)
        book = _int_field(rec, "book", line)
        if rt not in (0, 1) or book not in (0, 1):
            raise DataError(f"line {line}: rt and book must be 0 or 1")
        journal = JournalStats(
            _year_counts(rec["journal_citations"], "journal_citations", line),
            _year_counts(rec["journal_publications"], "journal_publications", line),
            _int_field(rec, "cito2009", line),
            bool(book),
        )
        try:
            records.append(PaperRecord(
                publication_year=_int_field(rec, "publication_year", line),
                authors=_parse_authors(rec["authors"], line),
                references=_int_field(rec, "references", line),
                pages=_int_field(rec, "pages", line),
                has_review_text=bool(rt),
                subject=SubjectClass.from_token(rec["subject"]),
                journal=journal,
                citations=_int_field(rec, CITATIONS_COLUMN, line),
            ))
        except MalformedRecordError as exc:
            raise MalformedRecordError(f"line {line}: {exc}") from None
    return records


def write_paper_records(records: Iterable[PaperRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RAW_COLUMNS)
    for r in records:
        j = r.journal
        writer.writerow([
            r.publication_year,
            ";".join(f"{a.first_publication_year}/{a.country}/{a.institute_id}" for a in r.authors),
            r.references, r.pages, int(r.has_review_text), r.subject.value,
            ";".join(str(j.citations_by_year[y]) for y in domain.MCQ_YEARS),
            ";".join(str(j.publications_by_year[y]) for y in domain.MCQ_YEARS),
            j.accumulated_citations_to_2009, int(j.is_book_or_thesis), r.citations,
        ])


def parse_subject_history(stream: TextIO) -> SubjectHistory:
    """Two-column CSV ``subject,count`` with a header row."""
    reader = csv.reader(stream)
    header = [h.strip() for h in next(reader, [])]
    if header != ["subject", "count"]:
        raise SchemaError("subject history header must be: subject,count")
    counts: dict[SubjectClass, int] = {}
    for line, rec in enumerate(reader, start=2):
        if not rec:
            continue
        subject = SubjectClass.from_token(rec[0])
        try:
            counts[subject] = counts.get(subject, 0) + int(rec[1])
        except (ValueError, IndexError):
            raise DataError(f"line {line}: bad count in subject history") from None
    return SubjectHistory.from_counts(counts)


def derive_dataset(records: Sequence[PaperRecord], history: SubjectHistory,
                   home_country: str = domain.DEFAULT_HOME_COUNTRY) -> Dataset:
    vectors = [domain.derive_predictors(r, history, home_country) for r in records]
    return Dataset.from_vectors(vectors, [r.citations for r in records])


# -- stratified sampling ---------------------------------------------------

@dataclass(frozen=True)
class Stratum:
    level: int
    population: int
    sample: int

    def __post_init__(self):
        if self.sample < 0 or self.population < 0:
            raise ConfigError(f"stratum {self.level}: sizes must be non-negative")
        if self.sample > self.population:
            raise ConfigError(f"stratum {self.level}: sample {self.sample} exceeds population {self.population}")

    @property
    def citation_range(self) -> tuple[int, int | None]:
        _, lo, hi = domain.LEVEL_BINS[self.level]
        return lo, hi


@dataclass(frozen=True)
class StratumSpec:
    strata: tuple[Stratum, ...]

    def __post_init__(self):
        levels = [s.level for s in self.strata]
        if len(set(levels)) != len(levels) or any(l not in domain.LEVELS for l in levels):
            raise ConfigError("strata must name distinct levels in 0..5")

    @property
    def total_sample(self) -> int:
        return sum(s.sample for s in self.strata)

    @property
    def total_population(self) -> int:
        return sum(s.population for s in self.strata)

    @classmethod
    def parse(cls, stream: TextIO) -> "StratumSpec":
        """CSV with header ``level,population,sample``."""
        reader = csv.DictReader(stream)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["level", "population", "sample"]:
            raise ConfigError("stratum spec header must be: level,population,sample")
        try:
            strata = tuple(Stratum(int(r["level"]), int(r["population"]), int(r["sample"])) for r in reader)
        except (TypeError, ValueError):
            raise ConfigError("stratum spec entries must be integers") from None
        return cls(strata)


REFERENCE_STRATA = StratumSpec((
    Stratum(5, 54, 4),
    Stratum(4, 298, 23),
    Stratum(3, 413, 23),
    Stratum(2, 1008, 91),
    Stratum(1, 628, 48),
    Stratum(0, 1506, 116),
))


def stratified_sample(d: Dataset, spec: StratumSpec, seed: int) -> Dataset:
    """Simple random sample without replacement inside each citation level.

    Output is ordered by level, highest first, then by draw order.  Each
    stratum draws from its own stream keyed by ``(seed, level)``.
    """
    levels = d.levels
    chosen = []
    for stratum in sorted(spec.strata, key=lambda s: -s.level):
        members = np.flatnonzero(levels == stratum.level)
        if len(members) < stratum.sample:
            raise DataError(
                f"stratum level {stratum.level} is underfull: requested {stratum.sample}, "
                f"dataset has {len(members)}"
            )
        picks = partial_shuffle(len(members), stratum.sample, make_rng(seed, stratum.level))
        chosen.append(members[picks])
    idx = np.concatenate(chosen) if chosen else np.array([], dtype=np.int64)
    return d.take(idx)


# -- synthetic corpora -----------------------------------------------------

_OPS = ("<=", ">=", "==", "<", ">", "in")


@dataclass(frozen=True)
class Condition:
    predictor: str
    op: str
    value: float | frozenset

    def mask(self, column: np.ndarray) -> np.ndarray:
        if self.op == "in":
            return np.isin(column, sorted(self.value))
        return {
            "<": column < self.value, "<=": column <= self.value,
            ">": column > self.value, ">=": column >= self.value,
            "==": column == self.value,
        }[self.op]

    def interval(self) -> tuple[float, bool, float, bool]:
        """(low, low_closed, high, high_closed) of a numeric condition."""
        inf = float("inf")
        v = float(self.value)
        return {
            "<": (-inf, False, v, False), "<=": (-inf, False, v, True),
            ">": (v, False, inf, False), ">=": (v, True, inf, False),
            "==": (v, True, v, True),
        }[self.op]


@dataclass(frozen=True)
class Region:
    conditions: tuple[Condition, ...]
    probs: tuple[float, float, float]

    def mask(self, d: Dataset) -> np.ndarray:
        m = np.ones(len(d), dtype=bool)
        for c in self.conditions:
            m &= c.mask(d.column(c.predictor))
        return m


_COND_RE = re.compile(r"^\s*([a-z0-9_]+)\s*(<=|>=|==|<|>|\bin\b)\s*(.+?)\s*$")


def parse_condition(text: str) -> Condition:
    m = _COND_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse condition {text!r}")
    name, op, raw = m.groups()
    if name not in domain.PREDICTOR_NAMES:
        raise ConfigError(f"unknown predictor {name!r} in condition {text!r}")
    if op == "in":
        if name != "msccla":
            raise ConfigError("'in' conditions apply only to msccla")
        tokens = raw.strip().strip("{}").split(",")
        try:
            value = frozenset(SubjectClass.from_token(t).code for t in tokens if t.strip())
        except MalformedRecordError as exc:
            raise ConfigError(str(exc)) from None
        return Condition(name, op, value)
    if name == "msccla":
        raise ConfigError("msccla supports only 'in' conditions")
    try:
        return Condition(name, op, float(raw))
    except ValueError:
        raise ConfigError(f"non-numeric threshold in condition {text!r}") from None


def parse_probs(text: str) -> tuple[float, float, float]:
    try:
        probs = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse class probabilities {text!r}") from None
    if len(probs) != 3:
        raise ConfigError("class probabilities need three entries (low,median,high)")
    return probs  # type: ignore[return-value]


def parse_region(text: str) -> Region:
    """Parse ``cond [& cond ...] -> p_low,p_median,p_high``.

    >>> parse_region("ref > 20 -> 0,0,1").conditions[0].value
    20.0
    """
    if "->" not in text:
        raise ConfigError(f"region {text!r} lacks '->'")
    lhs, rhs = text.split("->", 1)
    conds = tuple(parse_condition(c) for c in lhs.split("&"))
    return Region(conds, parse_probs(rhs))


def _regions_overlap(a: Region, b: Region) -> bool:
    by_name: dict[str, list[Condition]] = {}
    for c in (*a.conditions, *b.conditions):
        by_name.setdefault(c.predictor, []).append(c)
    for name, conds in by_name.items():
        if name == "msccla":
            allowed = frozenset(range(len(SUBJECTS)))
            for c in conds:
                allowed &= c.value
            if not allowed:
                return False
            continue
        lo, lo_c, hi, hi_c = -float("inf"), False, float("inf"), False
        for c in conds:
            clo, clo_c, chi, chi_c = c.interval()
            if clo > lo or (clo == lo and not clo_c):
                lo, lo_c = clo, clo_c
            if chi < hi or (chi == hi and not chi_c):
                hi, hi_c = chi, chi_c
        if lo > hi or (lo == hi and not (lo_c and hi_c)):
            return False
    return True


@dataclass(frozen=True)
class SynthConfig:
    """Planted-rule corpus description.

    A row takes the class distribution of the region it falls in, or
    ``default`` when it falls in none.  With probability ``noise`` the class
    is then replaced by a uniformly random one.
    """

    rows: int
    seed: int
    regions: tuple[Region, ...] = ()
    default: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    noise: float = 0.0
    home_country: str = domain.DEFAULT_HOME_COUNTRY

    def __post_init__(self):
        if self.rows < 0:
            raise ConfigError("row count must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not 0.0 <= self.noise <= 1.0:
            raise ConfigError(f"noise must lie in [0, 1], got {self.noise}")
        for probs in (self.default, *(r.probs for r in self.regions)):
            if len(probs) != 3 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-9:
                raise ConfigError(f"class probabilities {probs} must be non-negative and sum to 1")
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1:]:
                if not np.allclose(a.probs, b.probs, atol=1e-12) and _regions_overlap(a, b):
                    raise ConfigError("overlapping regions with conflicting class probabilities")


_FOREIGN = ("US", "FR", "CN", "DE", "KR", "GB")
_SUBJECT_WEIGHTS = np.array([0.04, 0.18, 0.16, 0.28, 0.12, 0.07, 0.11, 0.04])


def _synthetic_journals(rng: np.random.Generator, n: int = 40) -> list[JournalStats]:
    journals = []
    for _ in range(n):
        pubs = {y: int(rng.integers(20, 200)) for y in domain.MCQ_YEARS}
        quality = rng.gamma(2.0, 0.12)
        cites = {y: int(rng.poisson(quality * pubs[y])) for y in domain.MCQ_YEARS}
        journals.append(JournalStats(cites, pubs, int(rng.integers(100, 40000))))
    zeros = {y: 0 for y in domain.MCQ_YEARS}
    journals.append(JournalStats(zeros, zeros, 0, is_book_or_thesis=True))
    return journals


def _synthetic_authors(rng: np.random.Generator, year: int, home: str) -> list[AuthorRecord]:
    aut = int(rng.choice(np.arange(1, 7), p=[0.33, 0.35, 0.18, 0.08, 0.04, 0.02]))
    authors = []
    for _ in range(aut):
        age = 0 if rng.random() < 0.12 else int(rng.integers(1, 41))
        country = home if rng.random() < 0.7 else str(rng.choice(_FOREIGN))
        authors.append(AuthorRecord(year - age, country, f"{country}-{int(rng.integers(0, 12))}"))
    return authors


def _draw_citations(rng: np.random.Generator, label: int) -> int:
    if label == ClassLabel.LOW:
        return int(rng.integers(0, 2))
    if label == ClassLabel.MEDIAN:
        return int(rng.integers(2, 11))
    return int(rng.integers(11, 31)) if rng.random() < 0.85 else int(rng.integers(31, 81))


def _planted_labels(cfg: SynthConfig, d: Dataset, rng: np.random.Generator) -> np.ndarray:
    probs = np.tile(np.asarray(cfg.default, dtype=float), (len(d), 1))
    for region in cfg.regions:
        probs[region.mask(d)] = region.probs
    u = rng.random(len(d))
    labels = (u[:, None] >= np.cumsum(probs, axis=1)[:, :2]).sum(axis=1)
    flip = rng.random(len(d)) < cfg.noise
    labels[flip] = rng.integers(0, 3, size=int(flip.sum()))
    return labels


def generate_synthetic_records(cfg: SynthConfig) -> tuple[list[PaperRecord], SubjectHistory]:
    """Raw paper records plus the subject history used to derive claper."""
    rng = make_rng(cfg.seed)
    year = 2009
    history = SubjectHistory.from_counts(
        {s: int(c) for s, c in zip(SUBJECTS, rng.multinomial(200_000, _SUBJECT_WEIGHTS))}
    )
    journals = _synthetic_journals(rng)
    records = []
    for _ in range(cfg.rows):
        journal = journals[-1] if rng.random() < 0.08 else journals[int(rng.integers(0, len(journals) - 1))]
        records.append(PaperRecord(
            publication_year=year,
            authors=_synthetic_authors(rng, year, cfg.home_country),
            references=int(rng.integers(0, 61)),
            pages=int(rng.integers(1, 61)),
            has_review_text=bool(rng.random() < 0.85),
            subject=SUBJECTS[int(rng.choice(len(SUBJECTS), p=_SUBJECT_WEIGHTS))],
            journal=journal,
            citations=0,
        ))
    provisional = derive_dataset(records, history, cfg.home_country)
    labels = _planted_labels(cfg, provisional, rng)
    records = [dataclasses.replace(r, citations=_draw_citations(rng, int(lab)))
               for r, lab in zip(records, labels)]
    return records, history


def generate_synthetic(cfg: SynthConfig) -> Dataset:
    records, history = generate_synthetic_records(cfg)
    return derive_dataset(records, history, cfg.home_country)
