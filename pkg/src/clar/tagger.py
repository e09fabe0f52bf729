"""Polyglot window tagger with per-language softmax heads.

Each token is represented by the word and predicate-flag embeddings of the
(2w+1)-token window around it. A shared rectified linear layer maps the
window to a hidden vector a, and the language's softmax head produces
label probabilities softmax(H a + c). Row 0 of every head is the
no-argument class O.

Gradients are computed by hand; training is plain mini-batch gradient
descent. In ``clar`` mode the head rows named by a frozen pairing are tied
by the affine alignment penalty after the warm-up epochs.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError, NumericError
from .labels import (Corpus, LabeledMatrix, LabelId, Sentence, count_label_frequencies,
                     load_weight_matrix, save_weight_matrix)
from .matcher import MatchConfig, Pairing, match_labels
from .regularizer import AffineTransform, clar_gradients, clar_penalty

log = logging.getLogger(__name__)

O_LABEL = "O"
PAD, UNK = "<pad>", "<unk>"
MODES = ("monolingual", "polyglot", "clar")
SOURCE, TARGET = "source", "target"
INIT_SCALE = 0.1


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    warmup_epochs: int = 3
    learning_rate: float = 0.05
    lam: float = 0.1
    window: int = 2
    emb_dim: int = 8
    flag_dim: int = 4
    hidden_dim: int = 16
    batch_size: int = 8
    patience: int = 5
    mode: str = "clar"
    match: MatchConfig = field(default_factory=MatchConfig)
    seed: int = 0
    rematch_every: int = 0
    transform_learning_rate: float | None = None  # None: same as learning_rate

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 <= self.warmup_epochs < self.epochs:
            raise ConfigError("need 0 <= warmup_epochs < epochs")
        if min(self.emb_dim, self.flag_dim, self.hidden_dim, self.batch_size) < 1:
            raise ConfigError("dimensions and batch size must be >= 1")
        if self.window < 0 or self.learning_rate <= 0 or self.lam < 0:
            raise ConfigError("window >= 0, learning_rate > 0 and lam >= 0 required")
        if self.transform_learning_rate is not None and self.transform_learning_rate < 0:
            raise ConfigError("transform_learning_rate must be non-negative")
        if self.patience < 1 or self.rematch_every < 0:
            raise ConfigError("patience >= 1 and rematch_every >= 0 required")


@dataclass
class TaggerModel:
    languages: dict[str, str]              # language tag -> role
    vocab: dict[str, dict[str, int]]       # role -> token index (0 PAD, 1 UNK)
    labels: dict[str, tuple[LabelId, ...]]  # role -> head labels, O first
    window: int
    params: dict[str, np.ndarray]
    rng_seed: int = 0

    def role(self, language: str) -> str:
        try:
            return self.languages[language]
        except KeyError:
            raise ConfigError(f"unknown language {language!r}") from None

    def language_of(self, role: str) -> str:
        return next(lang for lang, r in self.languages.items() if r == role)

    def head(self, language: str, include_o: bool = True) -> LabeledMatrix:
        role = self.role(language)
        rows = self.params[f"head:{role}"]
        labels = self.labels[role]
        start = 0 if include_o else 1
        return LabeledMatrix(labels[start:], rows[start:])

    @property
    def transform(self) -> AffineTransform:
        return AffineTransform(self.params["psi"], self.params["b"])

    def n_parameters(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy(self) -> "TaggerModel":
        return copy.deepcopy(self)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    counts: Mapping[str, tuple[int, int, int]]  # label -> (correct, predicted, gold)

    @staticmethod
    def from_counts(counts: Mapping[str, tuple[int, int, int]],
                    only: set[str] | None = None) -> "Metrics":
        keep = {k: v for k, v in counts.items() if only is None or k in only}
        correct = sum(v[0] for v in keep.values())
        predicted = sum(v[1] for v in keep.values())
        gold = sum(v[2] for v in keep.values())
        p = correct / predicted if predicted else 0.0
        r = correct / gold if gold else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return Metrics(p, r, f, dict(sorted(keep.items())))

    def restricted(self, labels: set[str]) -> "Metrics":
        return Metrics.from_counts(self.counts, labels)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss_s: float
    loss_t: float
    penalty: float
    dev_f1: float


@dataclass
class TrainResult:
    model: TaggerModel
    pairing: Pairing | None
    history: list[EpochRecord]
    best_epoch: int

    def __iter__(self):
        return iter((self.model, self.pairing, self.history))


# -- construction ---------------------------------------------------------------------------

def build_vocab(corpus: Corpus | None) -> dict[str, int]:
    vocab = {PAD: 0, UNK: 1}
    if corpus is not None:
        for tok in sorted({t for s in corpus for t in s.tokens}):
            vocab[tok] = len(vocab)
    return vocab


def collect_labels(corpus: Corpus | None, language: str) -> list[LabelId]:
    if corpus is None:
        return []
    return sorted({lab for s in corpus for lab in s.labels if lab is not None})


def init_model(cfg: TrainConfig, vocab_s: Mapping[str, int] | None, vocab_t: Mapping[str, int],
               labels_s: Sequence[LabelId] | None, labels_t: Sequence[LabelId],
               seed: int | None = None, languages: tuple[str, str] | None = None) -> TaggerModel:
    """Randomly initialised model, uniform on [-0.1, 0.1]; transform starts at identity.

    The source side may be omitted (``vocab_s=None``) for a monolingual model.
    """
    seed = cfg.seed if seed is None else seed
    has_source = vocab_s is not None
    if not vocab_t or not labels_t or (has_source and (not vocab_s or not labels_s)):
        raise ConfigError("vocabularies and label sets must be non-empty")
    if languages is None:
        languages = ((labels_s[0].language if has_source else None), labels_t[0].language)
    src_lang, tgt_lang = languages
    if has_source and src_lang == tgt_lang:
        raise ConfigError("source and target languages must differ")

    roles = {tgt_lang: TARGET}
    vocab = {TARGET: dict(vocab_t)}
    labels = {TARGET: (LabelId(tgt_lang, O_LABEL),) + tuple(labels_t)}
    if has_source:
        roles = {src_lang: SOURCE, tgt_lang: TARGET}
        vocab[SOURCE] = dict(vocab_s)
        labels[SOURCE] = (LabelId(src_lang, O_LABEL),) + tuple(labels_s)

    e, f, h, w = cfg.emb_dim, cfg.flag_dim, cfg.hidden_dim, cfg.window
    width = (2 * w + 1) * (e + f)
    rng = np.random.default_rng(seed)

    def uniform(*shape):
        return rng.uniform(-INIT_SCALE, INIT_SCALE, size=shape)

    params: dict[str, np.ndarray] = {}
    for role in (SOURCE, TARGET):
        if role in vocab:
            params[f"emb:{role}"] = uniform(len(vocab[role]), e)
    params["flag"] = uniform(2, f)
    params["enc_w"] = uniform(h, width)
    params["enc_b"] = uniform(h)
    for role in (SOURCE, TARGET):
        if role in labels:
            params[f"head:{role}"] = uniform(len(labels[role]), h)
            params[f"bias:{role}"] = uniform(len(labels[role]))
    params["psi"] = np.eye(h)
    params["b"] = np.zeros(h)
    return TaggerModel(roles, vocab, labels, w, params, seed)


def parameter_count(cfg: TrainConfig, n_vocab_s: int, n_vocab_t: int, k_s: int, k_t: int) -> int:
    """Closed-form parameter count; vocab sizes include PAD/UNK, k excludes O."""
    e, f, h = cfg.emb_dim, cfg.flag_dim, cfg.hidden_dim
    return ((n_vocab_s + n_vocab_t) * e + 2 * f + h * (2 * cfg.window + 1) * (e + f) + h
            + (k_s + 1) * (h + 1) + (k_t + 1) * (h + 1) + h * h + h)


# -- forward / backward ----------------------------------------------------------------------

@dataclass(frozen=True)
class Batch:
    words: np.ndarray   # (n, 2w+1) token indices
    flags: np.ndarray   # (n, 2w+1) predicate indicator, 0 outside the sentence
    gold: np.ndarray    # (n,) head row index, -1 when the label is not in the head
    role: str

    def __len__(self):
        return self.gold.shape[0]


def encode(model: TaggerModel, sentences: Sequence[Sentence], language: str) -> Batch:
    role = model.role(language)
    vocab = model.vocab[role]
    label_index = {lab.name: i for i, lab in enumerate(model.labels[role])}
    w = model.window
    words, flags, gold = [], [], []
    for sent in sentences:
        n = len(sent)
        ids = np.array([vocab.get(t, vocab[UNK]) for t in sent.tokens])
        padded = np.concatenate([np.zeros(w, int), ids, np.zeros(w, int)])
        is_pred = np.zeros(n + 2 * w, int)
        is_pred[sent.predicate_index + w] = 1
        offsets = np.arange(n)[:, None] + np.arange(2 * w + 1)[None, :]
        words.append(padded[offsets])
        flags.append(is_pred[offsets])
        gold.append([label_index[O_LABEL] if lab is None else label_index.get(lab.name, -1)
                     for lab in sent.labels])
    if not words:
        shape = (0, 2 * w + 1)
        return Batch(np.zeros(shape, int), np.zeros(shape, int), np.zeros(0, int), role)
    return Batch(np.vstack(words), np.vstack(flags), np.concatenate(gold).astype(int), role)


def _hidden(params, batch: Batch):
    emb = params[f"emb:{batch.role}"]
    x = np.concatenate([emb[batch.words], params["flag"][batch.flags]], axis=2)
    x = x.reshape(len(batch), -1)
    z = x @ params["enc_w"].T + params["enc_b"]
    return x, z, np.maximum(z, 0.0)


def _logits(params, batch: Batch, a: np.ndarray) -> np.ndarray:
    return a @ params[f"head:{batch.role}"].T + params[f"bias:{batch.role}"]


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    ex = np.exp(shifted)
    return ex / ex.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def forward(model: TaggerModel, sentence: Sentence | Sequence[Sentence], language: str) -> np.ndarray:
    """Per-token label distributions over the language's head, shape (n_tokens, k+1)."""
    sentences = [sentence] if isinstance(sentence, Sentence) else list(sentence)
    batch = encode(model, sentences, language)
    _, _, a = _hidden(model.params, batch)
    return softmax(_logits(model.params, batch, a))


def base_loss(model: TaggerModel, batch: Batch | Sequence[Sentence], language: str | None = None) -> float:
    """Mean negative log-probability of the gold labels."""
    if not isinstance(batch, Batch):
        batch = encode(model, batch, language)
    return loss_and_grads(model.params, batch)[0]


def loss_and_grads(params: Mapping[str, np.ndarray], batch: Batch,
                   pairs: tuple[np.ndarray, np.ndarray] | None = None, lam: float = 0.0,
                   need_grads: bool = True) -> tuple[float, float, dict[str, np.ndarray]]:
    """Base loss, weighted penalty, and gradients of their sum.

    ``pairs`` holds (source head rows, target head rows) tied by the
    penalty; the penalty is weighted by ``lam`` and not by batch size.
    """
    n = len(batch)
    if n == 0:
        raise ValueError("empty batch")
    if np.any(batch.gold < 0):
        raise ValueError("batch contains labels outside the head")
    x, z, a = _hidden(params, batch)
    logp = log_softmax(_logits(params, batch, a))
    loss = -float(logp[np.arange(n), batch.gold].mean())

    penalty = 0.0
    grads: dict[str, np.ndarray] = {}
    if pairs is not None:
        src_rows, tgt_rows = pairs
        U_p = params[f"head:{SOURCE}"][src_rows]
        V_p = params[f"head:{TARGET}"][tgt_rows]
        t = AffineTransform(params["psi"], params["b"])
        penalty = lam * clar_penalty(U_p, V_p, t)
    if not need_grads:
        return loss, penalty, grads

    role = batch.role
    dlogits = np.exp(logp)
    dlogits[np.arange(n), batch.gold] -= 1.0
    dlogits /= n
    grads[f"head:{role}"] = dlogits.T @ a
    grads[f"bias:{role}"] = dlogits.sum(axis=0)
    da = dlogits @ params[f"head:{role}"]
    dz = da * (z > 0)
    grads["enc_w"] = dz.T @ x
    grads["enc_b"] = dz.sum(axis=0)
    dx = (dz @ params["enc_w"]).reshape(n, batch.words.shape[1], -1)
    e = params[f"emb:{role}"].shape[1]
    demb = np.zeros_like(params[f"emb:{role}"])
    np.add.at(demb, batch.words, dx[:, :, :e])
    dflag = np.zeros_like(params["flag"])
    np.add.at(dflag, batch.flags, dx[:, :, e:])
    grads[f"emb:{role}"] = demb
    grads["flag"] = dflag

    if pairs is not None:
        g = clar_gradients(U_p, V_p, t)
        for role_, rows, dg in ((SOURCE, src_rows, g.u), (TARGET, tgt_rows, g.v)):
            key = f"head:{role_}"
            acc = grads[key] if key in grads else np.zeros_like(params[key])
            np.add.at(acc, rows, lam * dg)
            grads[key] = acc
        grads["psi"] = lam * g.psi
        grads["b"] = lam * g.b
    return loss, penalty, grads


def predict(model: TaggerModel, sentences: Sequence[Sentence], language: str) -> np.ndarray:
    batch = encode(model, sentences, language)
    _, _, a = _hidden(model.params, batch)
    return np.argmax(_logits(model.params, batch, a), axis=1)


# -- evaluation ------------------------------------------------------------------------------

def evaluate(model: TaggerModel, corpus: Corpus | Sequence[Sentence], language: str,
             combine: Mapping[str, str] | None = None) -> Metrics:
    """Micro-averaged argument P/R/F1 of the model's argmax predictions."""
    sentences = list(corpus)
    if not sentences:
        return Metrics.from_counts({})
    names = [lab.name for lab in model.labels[model.role(language)]]
    pred = [names[i] for i in predict(model, sentences, language)]
    gold = [lab.name if lab is not None else O_LABEL for s in sentences for lab in s.labels]
    return score(gold, pred, combine)


def score(gold: Sequence[str], pred: Sequence[str],
          combine: Mapping[str, str] | None = None) -> Metrics:
    """Micro-averaged P/R/F1 over label names; O predictions and O gold are not scored.

    ``combine`` renames labels (gold and predicted alike) before scoring,
    e.g. to merge several target labels mapped onto one source label.
    """
    if len(gold) != len(pred):
        raise ValueError("gold and predicted sequences differ in length")
    combine = combine or {}
    counts: dict[str, list[int]] = {}
    for g_name, p_name in zip(gold, pred):
        p_name = combine.get(p_name, p_name)
        g_name = combine.get(g_name, g_name)
        if p_name != O_LABEL:
            counts.setdefault(p_name, [0, 0, 0])[1] += 1
        if g_name != O_LABEL:
            slot = counts.setdefault(g_name, [0, 0, 0])
            slot[2] += 1
            if p_name == g_name:
                slot[0] += 1
    return Metrics.from_counts({k: tuple(v) for k, v in counts.items()})


def combine_map(pairing: Pairing) -> dict[str, str]:
    """Target label renaming that merges all targets paired with one source label."""
    groups: dict[LabelId, list[str]] = {}
    for p in pairing:
        groups.setdefault(p.source, []).append(p.target.name)
    mapping = {}
    for members in groups.values():
        rep = min(members)
        for name in members:
            mapping[name] = rep
    return mapping


def merged_labels(pairing: Pairing) -> set[str]:
    """Target label names that share their source label with another target."""
    groups: dict[LabelId, list[str]] = {}
    for p in pairing:
        groups.setdefault(p.source, []).append(p.target.name)
    return {name for members in groups.values() if len(members) > 1 for name in members}


# -- training --------------------------------------------------------------------------------

def _batches(n: int, size: int, rng: np.random.Generator) -> list[np.ndarray]:
    order = rng.permutation(n)
    return [order[i:i + size] for i in range(0, n, size)]


def _interleave(n_s: int, n_t: int) -> list[str]:
    """Deterministic round-robin weighted by the number of batches per language."""
    out, i_s, i_t = [], 0, 0
    while i_s < n_s or i_t < n_t:
        take_s = i_t >= n_t or (i_s < n_s and (i_s + 0.5) / n_s <= (i_t + 0.5) / n_t)
        if take_s:
            out.append(SOURCE)
            i_s += 1
        else:
            out.append(TARGET)
            i_t += 1
    return out


def _pair_rows(model: TaggerModel, pairing: Pairing) -> tuple[np.ndarray, np.ndarray]:
    src_index = {lab: i for i, lab in enumerate(model.labels[SOURCE])}
    tgt_index = {lab: i for i, lab in enumerate(model.labels[TARGET])}
    return (np.array([src_index[p.source] for p in pairing], dtype=int),
            np.array([tgt_index[p.target] for p in pairing], dtype=int))


def run_matching(model: TaggerModel, corpus_s: Corpus, corpus_t: Corpus,
                 cfg: MatchConfig) -> Pairing:
    """Match the current argument rows (O excluded) of the two heads."""
    U = model.head(corpus_s.language, include_o=False)
    V = model.head(corpus_t.language, include_o=False)
    return match_labels(U, V, count_label_frequencies(corpus_s), count_label_frequencies(corpus_t), cfg)


def train(corpus_s: Corpus | None, corpus_t: Corpus, cfg: TrainConfig,
          dev_t: Corpus | None = None) -> TrainResult:
    """Train in the configured mode with early stopping on target dev F1.

    Returns the parameters of the best dev epoch, the frozen pairing (clar
    mode) and the per-epoch history.
    """
    if cfg.mode != "monolingual" and corpus_s is None:
        raise ConfigError(f"mode {cfg.mode} needs a source corpus")
    if not len(corpus_t) or (corpus_s is not None and not len(corpus_s)):
        raise ConfigError("training corpora must be non-empty")
    dev_t = dev_t if dev_t is not None else corpus_t
    langs = (corpus_s.language if corpus_s is not None else None, corpus_t.language)
    model = init_model(
        cfg, build_vocab(corpus_s) if corpus_s is not None else None, build_vocab(corpus_t),
        collect_labels(corpus_s, langs[0]), collect_labels(corpus_t, langs[1]),
        seed=cfg.seed, languages=langs)

    data = {TARGET: encode_per_sentence(model, corpus_t)}
    if cfg.mode != "monolingual":
        data[SOURCE] = encode_per_sentence(model, corpus_s)

    rng = np.random.default_rng([cfg.seed, 1])
    transform_lr = (cfg.learning_rate if cfg.transform_learning_rate is None
                    else cfg.transform_learning_rate)
    pairing: Pairing | None = None
    pair_rows = None
    history: list[EpochRecord] = []
    best = (-1.0, model.copy(), 0, None)
    stale = 0
    if cfg.mode == "clar" and cfg.warmup_epochs == 0:
        pairing = run_matching(model, corpus_s, corpus_t, cfg.match)
        pair_rows = _pair_rows(model, pairing)

    for epoch in range(1, cfg.epochs + 1):
        order = {role: _batches(len(data[role]), cfg.batch_size, rng)
                 for role in (SOURCE, TARGET) if role in data}
        schedule = _interleave(len(order.get(SOURCE, [])), len(order[TARGET]))
        cursor = {SOURCE: 0, TARGET: 0}
        sums = {SOURCE: [0.0, 0], TARGET: [0.0, 0]}
        penalty_sum, steps = 0.0, 0
        for role in schedule:
            idx = order[role][cursor[role]]
            cursor[role] += 1
            batch = _concat([data[role][i] for i in idx], role)
            use_pen = pair_rows is not None
            with np.errstate(over="ignore", invalid="ignore"):
                loss, pen, grads = loss_and_grads(model.params, batch,
                                                  pair_rows if use_pen else None, cfg.lam)
            if not (math.isfinite(loss) and math.isfinite(pen)):
                raise NumericError(
                    f"non-finite loss at epoch {epoch}, step {steps}: base={loss}, penalty={pen}")
            for key, g in grads.items():
                model.params[key] -= (transform_lr if key in ("psi", "b") else cfg.learning_rate) * g
            sums[role][0] += loss
            sums[role][1] += 1
            penalty_sum += pen
            steps += 1

        if cfg.mode == "clar" and (epoch == cfg.warmup_epochs or (
                cfg.rematch_every and epoch > cfg.warmup_epochs
                and (epoch - cfg.warmup_epochs) % cfg.rematch_every == 0)):
            pairing = run_matching(model, corpus_s, corpus_t, cfg.match)
            pair_rows = _pair_rows(model, pairing)
            log.info("epoch %d: matched %d label pairs", epoch, len(pairing))

        dev_f1 = evaluate(model, dev_t, corpus_t.language).f1
        record = EpochRecord(
            epoch,
            sums[SOURCE][0] / sums[SOURCE][1] if sums[SOURCE][1] else 0.0,
            sums[TARGET][0] / sums[TARGET][1],
            penalty_sum / steps,
            dev_f1)
        history.append(record)
        log.debug("%s", record)
        if dev_f1 > best[0]:
            best = (dev_f1, model.copy(), epoch, pairing)
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break

    _, best_model, best_epoch, _ = best
    return TrainResult(best_model, pairing, history, best_epoch)


def encode_per_sentence(model: TaggerModel, corpus: Corpus) -> list[Batch]:
    return [encode(model, [s], corpus.language) for s in corpus]


def _concat(parts: Sequence[Batch], role: str) -> Batch:
    return Batch(np.vstack([p.words for p in parts]), np.vstack([p.flags for p in parts]),
                 np.concatenate([p.gold for p in parts]), role)


def history_tsv(history: Sequence[EpochRecord]) -> str:
    lines = ["epoch\tloss_s\tloss_t\tpenalty\tdev_f1"]
    lines += [f"{r.epoch}\t{r.loss_s:.17g}\t{r.loss_t:.17g}\t{r.penalty:.17g}\t{r.dev_f1:.17g}"
              for r in history]
    return "\n".join(lines) + "\n"


# -- serialization ---------------------------------------------------------------------------

def save_model(model: TaggerModel) -> str:
    """One ``[block]`` section per parameter block, rows in weight-matrix format."""
    sections = [f"[meta]\nwindow\t{model.window}\t{model.rng_seed}\n", "[languages]\n"]
    for lang, role in sorted(model.languages.items(), key=lambda kv: kv[1]):
        sections.append(f"{role}\t{lang}\n")
    for key, value in model.params.items():
        sections.append(f"[{key}]\n" + save_weight_matrix(_block_matrix(model, key, value)))
    return "".join(sections)


def _block_matrix(model: TaggerModel, key: str, value: np.ndarray) -> LabeledMatrix:
    kind, _, role = key.partition(":")
    rows = np.atleast_2d(value)
    if kind == "emb":
        lang = model.language_of(role)
        labels = [LabelId(lang, tok) for tok in model.vocab[role]]
    elif kind == "head":
        labels = list(model.labels[role])
    else:
        labels = [LabelId(key.upper(), str(i)) for i in range(rows.shape[0])]
    return LabeledMatrix(tuple(labels), rows)


def load_model(text: str) -> TaggerModel:
    sections: dict[str, list[str]] = {}
    current = None
    for line in text.splitlines():
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    _, window, seed = sections.pop("meta")[0].split("\t")
    languages = {}
    for line in sections.pop("languages"):
        role, lang = line.split("\t")
        languages[lang] = role
    vocab, labels, params = {}, {}, {}
    for key, lines in sections.items():
        m = load_weight_matrix("\n".join(lines))
        kind, _, role = key.partition(":")
        if kind == "emb":
            vocab[role] = {lab.name: i for i, lab in enumerate(m.labels)}
        if kind == "head":
            labels[role] = m.labels
        params[key] = m.rows[0] if kind in ("enc_b", "bias", "b") else m.rows
    return TaggerModel(languages, vocab, labels, int(window), params, int(seed))


def with_mode(cfg: TrainConfig, mode: str, **overrides) -> TrainConfig:
    return replace(cfg, mode=mode, **overrides)
