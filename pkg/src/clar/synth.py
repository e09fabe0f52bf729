"""Synthetic bilingual tagging task with a known label correspondence.

A set of proto-labels is shared by both "languages". Each proto-label owns
a block of latent tokens it emits and a fixed offset from the predicate
where it appears; label frequency follows a Zipf law over proto-label
rank. Sentences are rendered into two disjoint surface vocabularies and
two label namings, so the languages share structure but no symbols.

With a merge map, the proto-labels are the fine target labels and the
source names several of them with one coarse label.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import ConfigError
from .labels import Corpus, LabelId, Sentence

SPLITS = {"source": 0, "target": 1, "dev": 2, "test": 3}


@dataclass(frozen=True)
class SynthConfig:
    num_labels: int = 12
    vocab_size: int = 240
    sentence_length: tuple[int, int] = (10, 18)
    source_sentences: int = 400
    target_sentences: int = 100
    dev_sentences: int = 100
    test_sentences: int = 300
    # target proto-label -> source proto-label; num_labels counts source labels
    label_merge_map: Mapping[int, int] | None = None
    noise: float = 0.05
    zipf_exponent: float = 1.2
    args_per_sentence: float = 2.5
    # probability an argument emits from its own block rather than the shared argument pool
    label_emission_share: float = 0.3
    source_language: str = "src"
    target_language: str = "tgt"
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.sentence_length
        if self.num_labels < 2:
            raise ConfigError("num_labels must be >= 2")
        if not 1 <= lo <= hi:
            raise ConfigError("sentence_length must satisfy 1 <= min <= max")
        if self.target_sentences < 1 or self.source_sentences < 0:
            raise ConfigError("target_sentences >= 1 and source_sentences >= 0 required")
        if min(self.dev_sentences, self.test_sentences) < 0:
            raise ConfigError("split sizes must be non-negative")
        if not 0 <= self.noise < 1:
            raise ConfigError("noise must lie in [0, 1)")
        if not 0 <= self.label_emission_share <= 1:
            raise ConfigError("label_emission_share must lie in [0, 1]")
        if self.zipf_exponent < 0 or self.args_per_sentence <= 0:
            raise ConfigError("zipf_exponent >= 0 and args_per_sentence > 0 required")
        if self.source_language == self.target_language:
            raise ConfigError("source and target languages must differ")
        if self.label_merge_map is not None:
            m = dict(self.label_merge_map)
            if sorted(m) != list(range(len(m))) or len(m) < 2:
                raise ConfigError("merge map keys must be target proto-labels 0..n-1")
            if not set(m.values()) <= set(range(self.num_labels)):
                raise ConfigError("merge map values must be source proto-labels")
        if self.vocab_size < self.n_proto * 2 + 4:
            raise ConfigError(f"vocab_size too small for {self.n_proto} proto-labels")

    @property
    def n_proto(self) -> int:
        return len(self.label_merge_map) if self.label_merge_map else self.num_labels


@dataclass(frozen=True)
class GroundTruth:
    correspondence: Mapping[LabelId, LabelId]   # target -> source
    source_tally: Mapping[LabelId, int] = field(default_factory=dict)
    target_tally: Mapping[LabelId, int] = field(default_factory=dict)

    def is_bijection(self) -> bool:
        values = list(self.correspondence.values())
        return len(set(values)) == len(values)

    def to_tsv(self) -> str:
        return "".join(f"{t.language}\t{t.name}\t{s.language}\t{s.name}\n"
                       for t, s in sorted(self.correspondence.items()))

    @classmethod
    def from_tsv(cls, text: str) -> "GroundTruth":
        corr = {}
        for line in text.splitlines():
            if line.strip():
                tl, tn, sl, sn = line.split("\t")
                corr[LabelId(tl, tn)] = LabelId(sl, sn)
        return cls(corr)


class SynthTask(NamedTuple):
    source: Corpus
    target: Corpus
    truth: GroundTruth


@dataclass(frozen=True)
class _Structure:
    offsets: np.ndarray         # per proto-label offset from the predicate
    weights: np.ndarray         # per proto-label Zipf probability
    blocks: list[np.ndarray]    # per proto-label latent token ids
    predicate_block: np.ndarray
    filler_block: np.ndarray
    argument_pool: np.ndarray
    surface: dict[str, list[str]]             # language role -> latent id -> token
    label_names: dict[str, list[LabelId]]     # role -> proto-label -> label


def zipf_weights(n: int, exponent: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float) ** -exponent
    return w / w.sum()


def proto_offsets(n: int) -> np.ndarray:
    """+1, -1, +2, -2, ... : frequent labels sit next to the predicate."""
    return np.array([(k // 2 + 1) * (1 if k % 2 == 0 else -1) for k in range(n)])


def _structure(cfg: SynthConfig) -> _Structure:
    rng = np.random.default_rng([cfg.seed, 0xC1A5])
    n = cfg.n_proto
    V = cfg.vocab_size
    n_pred = max(2, V // 20)
    n_fill = max(2, V // 4)
    n_pool = max(2, V // 10)
    per_label = (V - n_pred - n_fill - n_pool) // n
    latent = rng.permutation(V)
    predicate_block = latent[:n_pred]
    filler_block = latent[n_pred:n_pred + n_fill]
    argument_pool = latent[n_pred + n_fill:n_pred + n_fill + n_pool]
    start = n_pred + n_fill + n_pool
    blocks = [latent[start + i * per_label: start + (i + 1) * per_label] for i in range(n)]

    surface = {}
    for role, lang in (("source", cfg.source_language), ("target", cfg.target_language)):
        names = rng.permutation(V)
        surface[role] = [f"{lang}{names[i]}" for i in range(V)]

    n_src = cfg.num_labels
    src_perm = rng.permutation(n_src)
    tgt_perm = rng.permutation(n)
    src_labels = [LabelId(cfg.source_language, f"{cfg.source_language.upper()}-A{src_perm[i]}")
                  for i in range(n_src)]
    tgt_labels = [LabelId(cfg.target_language, f"{cfg.target_language.upper()}-A{tgt_perm[i]}")
                  for i in range(n)]
    merge = dict(cfg.label_merge_map) if cfg.label_merge_map else {i: i for i in range(n)}
    return _Structure(
        offsets=proto_offsets(n),
        weights=zipf_weights(n, cfg.zipf_exponent),
        blocks=blocks,
        predicate_block=predicate_block,
        filler_block=filler_block,
        argument_pool=argument_pool,
        surface=surface,
        label_names={"source": [src_labels[merge[i]] for i in range(n)], "target": tgt_labels},
    )


def _sentences(cfg: SynthConfig, st: _Structure, role: str, count: int, split: str,
               tally: Counter) -> list[Sentence]:
    rng = np.random.default_rng([cfg.seed, SPLITS[split]])
    lo, hi = cfg.sentence_length
    include = np.minimum(1.0, cfg.args_per_sentence * st.weights)
    words = st.surface[role]
    names = st.label_names[role]
    out = []
    for _ in range(count):
        n = int(rng.integers(lo, hi + 1))
        pred = int(rng.integers(n))
        proto = np.full(n, -1)
        draws = rng.random(len(st.offsets))
        for f, (off, p_inc) in enumerate(zip(st.offsets, include)):
            pos = pred + off
            if 0 <= pos < n and draws[f] < p_inc:
                proto[pos] = f
        latent = np.empty(n, dtype=int)
        own = rng.random(n) < cfg.label_emission_share
        for i in range(n):
            if i == pred:
                block = st.predicate_block
            elif proto[i] >= 0:
                block = st.blocks[proto[i]] if own[i] else st.argument_pool
            else:
                block = st.filler_block
            latent[i] = block[rng.integers(len(block))]
        resample = rng.random(n) < cfg.noise
        latent[resample] = rng.integers(cfg.vocab_size, size=int(resample.sum()))
        labels = tuple(names[f] if f >= 0 else None for f in proto)
        tally.update(lab for lab in labels if lab is not None)
        out.append(Sentence(tuple(words[t] for t in latent), pred, labels))
    return out


def generate_task(cfg: SynthConfig) -> SynthTask:
    """Source and target training corpora plus the true label correspondence."""
    st = _structure(cfg)
    src_tally: Counter = Counter()
    tgt_tally: Counter = Counter()
    source = Corpus(tuple(_sentences(cfg, st, "source", cfg.source_sentences, "source", src_tally)),
                    cfg.source_language)
    target = Corpus(tuple(_sentences(cfg, st, "target", cfg.target_sentences, "target", tgt_tally)),
                    cfg.target_language)
    corr = {t: s for t, s in zip(st.label_names["target"], st.label_names["source"])}
    return SynthTask(source, target, GroundTruth(corr, dict(src_tally), dict(tgt_tally)))


def generate_heldout(cfg: SynthConfig, split: str = "test", count: int | None = None) -> Corpus:
    """Held-out target-language sentences from the same generative structure."""
    if split not in ("dev", "test"):
        raise ConfigError(f"unknown split {split!r}")
    if count is None:
        count = cfg.dev_sentences if split == "dev" else cfg.test_sentences
    st = _structure(cfg)
    return Corpus(tuple(_sentences(cfg, st, "target", count, split, Counter())),
                  cfg.target_language)


def expected_label_shares(cfg: SynthConfig) -> np.ndarray:
    """Exact expected share of each proto-label among argument occurrences.

    Enumerates sentence length and predicate position, both uniform.
    """
    offsets = proto_offsets(cfg.n_proto)
    include = np.minimum(1.0, cfg.args_per_sentence * zipf_weights(cfg.n_proto, cfg.zipf_exponent))
    lo, hi = cfg.sentence_length
    expected = np.zeros(cfg.n_proto)
    for n in range(lo, hi + 1):
        for pred in range(n):
            in_bounds = (pred + offsets >= 0) & (pred + offsets < n)
            expected += in_bounds * include / (n * (hi - lo + 1))
    return expected / expected.sum()
