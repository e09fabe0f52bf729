import numpy as np
import pytest

from clar.labels import Corpus, LabelId, Sentence
from clar.matcher import ALL, MatchConfig
from clar.synth import SynthConfig
from clar.tagger import TrainConfig

# The synthetic task and tagger settings used by the acceptance suite and configs/.
TASK = SynthConfig(num_labels=12, vocab_size=120, source_sentences=400, target_sentences=100,
                   noise=0.05)
TRAINING = TrainConfig(epochs=20, warmup_epochs=3, learning_rate=0.5, transform_learning_rate=0.0,
                       lam=0.05, window=6, emb_dim=8, flag_dim=8, hidden_dim=32, batch_size=2,
                       patience=5, match=MatchConfig(cardinality=ALL))


def lab(name, lang="en"):
    return LabelId(lang, name)


def sentence(tokens, pred, labels, lang="en"):
    return Sentence(tuple(tokens), pred, tuple(None if x is None else LabelId(lang, x) for x in labels))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_corpora():
    src = Corpus((
        sentence(["a", "b", "c"], 1, ["A0", None, "A1"], "s"),
        sentence(["b", "c", "a", "d"], 2, [None, "A0", None, "A1"], "s"),
    ), "s")
    tgt = Corpus((
        sentence(["x", "y"], 0, [None, "B0"], "t"),
        sentence(["y", "z", "x"], 1, ["B1", None, "B0"], "t"),
    ), "t")
    return src, tgt


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
