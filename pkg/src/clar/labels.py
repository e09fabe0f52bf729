"""Label space: CoNLL-2009 ingestion, label frequencies, weight-matrix I/O.

Labels are namespaced by a language tag so that source and target label
sets can share one table without collisions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateInputError, FormatError, ParseError

NULL_LABEL = "_"
MIN_CONLL_COLUMNS = 14
FILLPRED_COLUMN = 12
FIRST_ARG_COLUMN = 14


@dataclass(frozen=True, order=True)
class LabelId:
    language: str
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("label name must be non-empty")

    def __str__(self):
        return f"{self.language}:{self.name}"


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    predicate_index: int
    labels: tuple[LabelId | None, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must be non-empty")
        if len(self.labels) != len(self.tokens):
            raise ValueError("labels and tokens differ in length")
        if not 0 <= self.predicate_index < len(self.tokens):
            raise ValueError("predicate index out of range")

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    language: str

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


@dataclass(frozen=True)
class FrequencyTable:
    counts: Mapping[LabelId, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative label count")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_tsv(self) -> str:
        lines = [f"{lab.language}\t{lab.name}\t{n}" for lab, n in sorted(self.counts.items())]
        lines.append(f"TOTAL\t{self.total}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "FrequencyTable":
        counts: dict[LabelId, int] = {}
        declared = None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            cols = line.split("\t")
            try:
                if cols[0] == "TOTAL" and len(cols) == 2:
                    declared = int(cols[1])
                    continue
                if len(cols) != 3:
                    raise FormatError(f"expected 3 columns, got {len(cols)}", lineno)
                lab = LabelId(cols[0], cols[1])
                if lab in counts:
                    raise FormatError(f"duplicate label {lab}", lineno)
                counts[lab] = int(cols[2])
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
            if counts.get(lab, 0) < 0:
                raise FormatError("negative count", lineno)
        table = cls(counts)
        if declared is not None and declared != table.total:
            raise FormatError(f"TOTAL {declared} does not match sum {table.total}")
        return table


@dataclass(frozen=True, eq=False)
class LabeledMatrix:
    """Per-label row vectors, e.g. the rows of a softmax head."""

    labels: tuple[LabelId, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D matrix")
        if rows.shape[0] != len(self.labels):
            raise ValueError(f"{rows.shape[0]} rows for {len(self.labels)} labels")
        if rows.shape[1] < 1:
            raise ValueError("row dimension must be >= 1")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def __len__(self):
        return len(self.labels)

    def index(self, label: LabelId) -> int:
        return self.labels.index(label)

    def select(self, labels: Sequence[LabelId]) -> "LabeledMatrix":
        lookup = {lab: i for i, lab in enumerate(self.labels)}
        idx = [lookup[lab] for lab in labels]
        return LabeledMatrix(tuple(labels), self.rows[idx])

    def __eq__(self, other):
        if not isinstance(other, LabeledMatrix):
            return NotImplemented
        return (self.labels == other.labels and self.rows.shape == other.rows.shape
                and bool(np.array_equal(self.rows, other.rows)))


def parse_conll(text: str, language: str) -> list[Sentence]:
    """Read CoNLL-2009 columns into one Sentence per marked predicate.

    Columns used: 1 (ID), 2 (FORM), 13 (FILLPRED), 15+ (APREDs). Other
    columns are read but ignored.
    """
    sentences: list[Sentence] = []
    block: list[tuple[int, list[str]]] = []

    def flush():
        if block:
            sentences.extend(_frames(block, language))
            block.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) < MIN_CONLL_COLUMNS:
            raise ParseError(f"expected >= {MIN_CONLL_COLUMNS} columns, got {len(cols)}", lineno)
        block.append((lineno, cols))
    flush()
    return sentences


def _frames(block: list[tuple[int, list[str]]], language: str) -> list[Sentence]:
    first_line = block[0][0]
    width = len(block[0][1])
    for lineno, cols in block:
        if len(cols) != width:
            raise ParseError("inconsistent column count within sentence", lineno)
    for pos, (lineno, cols) in enumerate(block, 1):
        try:
            idx = int(cols[0])
        except ValueError:
            raise ParseError(f"token index {cols[0]!r} is not an integer", lineno) from None
        if idx != pos:
            raise ParseError(f"non-contiguous token index {idx}, expected {pos}", lineno)

    tokens = tuple(cols[1] for _, cols in block)
    predicates = [i for i, (_, cols) in enumerate(block) if cols[FILLPRED_COLUMN] == "Y"]
    n_args = width - FIRST_ARG_COLUMN
    if len(predicates) != n_args:
        raise ParseError(
            f"sentence has {len(predicates)} predicates but {n_args} argument columns", first_line)

    frames = []
    for k, pred in enumerate(predicates):
        col = FIRST_ARG_COLUMN + k
        labels = tuple(
            None if cols[col] == NULL_LABEL else LabelId(language, cols[col]) for _, cols in block)
        frames.append(Sentence(tokens, pred, labels))
    return frames


def write_conll(sentences: Iterable[Sentence]) -> str:
    """Render sentences (one predicate each) in the format parse_conll reads."""
    blocks = []
    for sent in sentences:
        rows = []
        for i, (tok, lab) in enumerate(zip(sent.tokens, sent.labels)):
            is_pred = i == sent.predicate_index
            cols = [str(i + 1), tok, tok, tok, "_", "_", "_", "_", "0", "0", "_", "_",
                    "Y" if is_pred else "_", f"{tok}.01" if is_pred else "_",
                    NULL_LABEL if lab is None else lab.name]
            rows.append("\t".join(cols))
        blocks.append("\n".join(rows))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def count_label_frequencies(corpus: Corpus | Iterable[Sentence]) -> FrequencyTable:
    counts = Counter(lab for sent in corpus for lab in sent.labels if lab is not None)
    return FrequencyTable(dict(counts))


def filter_frequent_labels(freqs: FrequencyTable, threshold: float = 0.01) -> set[LabelId]:
    """Labels whose share of all argument occurrences strictly exceeds ``threshold``."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    total = freqs.total
    if total == 0:
        raise DegenerateInputError("frequency table is empty")
    return {lab for lab, n in freqs.counts.items() if n / total > threshold}


def save_weight_matrix(m: LabeledMatrix) -> str:
    lines = []
    for lab, row in zip(m.labels, m.rows):
        values = "\t".join(f"{v:.17g}" for v in row)
        lines.append(f"{lab.language}\t{lab.name}\t{values}")
    return "\n".join(lines) + "\n"


def load_weight_matrix(text: str) -> LabeledMatrix:
    labels: list[LabelId] = []
    rows: list[list[float]] = []
    seen: set[LabelId] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) < 3:
            raise FormatError("expected language, name and at least one value", lineno)
        try:
            lab = LabelId(cols[0], cols[1])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if lab in seen:
            raise FormatError(f"duplicate label {lab}", lineno)
        try:
            values = [float(v) for v in cols[2:]]
        except ValueError as exc:
            raise FormatError(f"unparseable real: {exc}", lineno) from None
        if rows and len(values) != len(rows[0]):
            raise FormatError(f"dimension {len(values)} differs from {len(rows[0])}", lineno)
        seen.add(lab)
        labels.append(lab)
        rows.append(values)
    if not rows:
        raise FormatError("no rows")
    return LabeledMatrix(tuple(labels), np.array(rows, dtype=float))
