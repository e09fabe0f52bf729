"""Command-line driver: ``clar <subcommand>``.

Every subcommand writes its outputs under ``--output-dir`` together with a
``manifest-<subcommand>.json`` recording the configuration, seed, input
digests, output digests and wall-clock duration. Outputs other than the
manifest are a pure function of the inputs and the seed.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .analysis import manifold_report, matrix_tsv, pair_segments, svd_project
from .errors import ClarError, ConfigError, ParseError
from .labels import (Corpus, FrequencyTable, count_label_frequencies,
                     load_weight_matrix, parse_conll, save_weight_matrix, write_conll)
from .matcher import ALL, HALF, MatchConfig, Pairing, match_labels, pairing_rows
from .regularizer import AffineTransform
from .synth import SynthConfig, generate_heldout, generate_task
from .tagger import (TrainConfig, combine_map, evaluate, history_tsv, load_model,
                     merged_labels, save_model, train)

log = logging.getLogger("clar")

EXIT_CODES = {"config": 2, "parse": 3, "format": 4, "infeasible": 5, "numeric": 6, "io": 7}


# -- run bookkeeping -------------------------------------------------------------------------


class Run:
    """Collects inputs and outputs of one subcommand and writes its manifest."""

    def __init__(self, command: str, output_dir: Path, seed: int | None):
        self.command = command
        self.output_dir = output_dir
        self.seed = seed
        self.config: dict[str, Any] = {}
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.started = time.time()

    def read(self, path: str | Path) -> str:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None
        self.inputs[str(path)] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return text

    def write(self, name: str, text: str) -> Path:
        path = self.output_dir / name
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None
        self.outputs[name] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return path

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(self.started)),
            "duration_s": round(time.time() - self.started, 6),
        }
        path = self.output_dir / f"manifest-{self.command}.json"
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


class IOFailure(ClarError):
    category = "io"


# -- config files ----------------------------------------------------------------------------

def read_config(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` and ``;`` start comments."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return dict(parser["run"])


def _optional_float(v: str) -> float | None:
    return None if v.lower() in ("", "none") else float(v)


def _int_pair(v: str) -> tuple[int, int]:
    lo, hi = (int(x) for x in v.replace(" ", "").split(","))
    return lo, hi


def _merge_map(v: str) -> dict[int, int] | None:
    if v.lower() in ("", "none"):
        return None
    return {int(k): int(s) for k, s in (item.split(":") for item in v.replace(" ", "").split(","))}


def _cardinality(v: str) -> int | str | None:
    v = v.strip().lower()
    if v in ("", "none", "default"):
        return None
    if v in (ALL, HALF):
        return v
    return int(v)


def _coerce(keys: dict[str, Callable[[str], Any]], raw: dict[str, str], what: str) -> dict[str, Any]:
    out = {}
    for key, value in raw.items():
        if key not in keys:
            raise ConfigError(f"unknown {what} key {key!r}")
        try:
            out[key] = keys[key](value)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from None
    return out


def _converter(default: Any) -> Callable[[str], Any]:
    if isinstance(default, bool):
        return lambda v: v.lower() in ("1", "true", "yes")
    if isinstance(default, (int, float, str)):
        return type(default)
    raise TypeError(default)


SYNTH_KEYS: dict[str, Callable[[str], Any]] = {
    f.name: _converter(f.default) for f in dataclasses.fields(SynthConfig)
    if f.name not in ("sentence_length", "label_merge_map")}
SYNTH_KEYS.update(sentence_length=_int_pair, label_merge_map=_merge_map)

TRAIN_KEYS: dict[str, Callable[[str], Any]] = {
    f.name: _converter(f.default) for f in dataclasses.fields(TrainConfig)
    if f.name not in ("match", "transform_learning_rate")}
TRAIN_KEYS.update(transform_learning_rate=_optional_float, match_threshold=float,
                  match_cardinality=_cardinality, match_capacity=int)
CORPUS_KEYS = {"source": str, "target": str, "dev": str, "test": str,
               "source_language": str, "target_language": str}


def synth_config(raw: dict[str, str], seed: int | None) -> SynthConfig:
    values = _coerce(SYNTH_KEYS, raw, "synth")
    if seed is not None:
        values["seed"] = seed
    return SynthConfig(**values)


def train_config(raw: dict[str, str], seed: int | None) -> tuple[TrainConfig, dict[str, str]]:
    corpus = {k: raw[k] for k in CORPUS_KEYS if k in raw}
    values = _coerce(TRAIN_KEYS, {k: v for k, v in raw.items() if k not in CORPUS_KEYS}, "train")
    if seed is not None:
        values["seed"] = seed
    try:
        match = MatchConfig(frequency_threshold=values.pop("match_threshold", 0.01),
                            cardinality=values.pop("match_cardinality", None),
                            source_capacity=values.pop("match_capacity", 1))
        return TrainConfig(match=match, **values), corpus
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def config_snapshot(cfg) -> dict[str, Any]:
    def plain(v):
        if dataclasses.is_dataclass(v):
            return {k: plain(x) for k, x in dataclasses.asdict(v).items()}
        if isinstance(v, dict):
            return {str(k): plain(x) for k, x in v.items()}
        if isinstance(v, tuple):
            return list(v)
        return v
    return plain(cfg)


# -- subcommands -----------------------------------------------------------------------------

def load_corpus(run: Run, path: str, language: str) -> Corpus:
    text = run.read(path)
    sentences = parse_conll(text, language)
    if not sentences:
        raise ParseError(f"{path}: no predicate-argument structures found")
    return Corpus(tuple(sentences), language)


def cmd_freq(args, run: Run):
    corpus = load_corpus(run, args.input, args.language)
    run.config = {"language": args.language}
    run.write(args.output, count_label_frequencies(corpus).to_tsv())


def cmd_match(args, run: Run):
    cfg = MatchConfig(args.threshold, _cardinality(args.cardinality), args.capacity)
    run.config = config_snapshot(cfg)
    U = load_weight_matrix(run.read(args.source_weights))
    V = load_weight_matrix(run.read(args.target_weights))
    fs = FrequencyTable.from_tsv(run.read(args.source_freq))
    ft = FrequencyTable.from_tsv(run.read(args.target_freq))
    run.write(args.output, match_labels(U, V, fs, ft, cfg).to_tsv())


def cmd_synth(args, run: Run):
    cfg = synth_config(read_config(run.read(args.config)), args.seed)
    run.seed = cfg.seed
    run.config = config_snapshot(cfg)
    task = generate_task(cfg)
    run.write("source.conll", write_conll(task.source))
    run.write("target.conll", write_conll(task.target))
    if cfg.dev_sentences:
        run.write("dev.conll", write_conll(generate_heldout(cfg, "dev")))
    if cfg.test_sentences:
        run.write("test.conll", write_conll(generate_heldout(cfg, "test")))
    run.write("ground_truth.tsv", task.truth.to_tsv())


def cmd_train(args, run: Run):
    cfg_path = Path(args.config)
    cfg, corpus = train_config(read_config(run.read(cfg_path)), args.seed)
    run.seed = cfg.seed
    run.config = {**config_snapshot(cfg), **corpus}
    base = cfg_path.parent

    def resolve(key):
        return str(base / corpus[key]) if key in corpus else None

    src_lang = corpus.get("source_language", "src")
    tgt_lang = corpus.get("target_language", "tgt")
    if resolve("target") is None:
        raise ConfigError("config needs a 'target' corpus path")
    target = load_corpus(run, resolve("target"), tgt_lang)
    source = None
    if cfg.mode != "monolingual":
        if resolve("source") is None:
            raise ConfigError(f"mode {cfg.mode} needs a 'source' corpus path")
        source = load_corpus(run, resolve("source"), src_lang)
    dev = load_corpus(run, resolve("dev"), tgt_lang) if "dev" in corpus else None

    result = train(source, target, cfg, dev)
    model = result.model
    run.write("model.txt", save_model(model))
    run.write("history.tsv", history_tsv(result.history))
    run.write("head_target.tsv", save_weight_matrix(model.head(tgt_lang, include_o=False)))
    if source is not None:
        run.write("head_source.tsv", save_weight_matrix(model.head(src_lang, include_o=False)))
        run.write("freq_source.tsv", count_label_frequencies(source).to_tsv())
    run.write("freq_target.tsv", count_label_frequencies(target).to_tsv())
    if result.pairing is not None:
        run.write("pairing.tsv", result.pairing.to_tsv())
        run.write("transform.tsv", save_weight_matrix(model.transform.to_matrix()))
    if "test" in corpus:
        test = load_corpus(run, resolve("test"), tgt_lang)
        run.write("metrics.tsv", metrics_tsv(evaluate(model, test, tgt_lang)))


def metrics_tsv(m) -> str:
    lines = [f"precision\t{m.precision:.17g}", f"recall\t{m.recall:.17g}", f"f1\t{m.f1:.17g}"]
    lines += [f"label\t{name}\t{c}\t{p}\t{g}" for name, (c, p, g) in m.counts.items()]
    return "\n".join(lines) + "\n"


def cmd_evaluate(args, run: Run):
    model = load_model(run.read(args.model))
    corpus = load_corpus(run, args.corpus, args.language)
    run.config = {"language": args.language, "combine_mapped": args.combine_mapped}
    metrics = evaluate(model, corpus, args.language)
    run.write(args.output, metrics_tsv(metrics))
    if args.combine_mapped:
        if not args.pairing:
            raise ConfigError("--combine-mapped needs --pairing")
        pairing = Pairing.from_tsv(run.read(args.pairing))
        merged = merged_labels(pairing)
        mapping = combine_map(pairing)
        combined = evaluate(model, corpus, args.language, combine=mapping)
        reps = {mapping[name] for name in merged}
        run.write("metrics_combined.tsv", metrics_tsv(combined))
        run.write("metrics_merged.tsv",
                  f"uncombined_f1\t{metrics.restricted(merged).f1:.17g}\n"
                  f"combined_f1\t{combined.restricted(reps).f1:.17g}\n")


def cmd_analyze(args, run: Run):
    U = load_weight_matrix(run.read(args.source_weights))
    V = load_weight_matrix(run.read(args.target_weights))
    pairing = Pairing.from_tsv(run.read(args.pairing))
    transform = None
    if args.transform:
        transform = AffineTransform.from_matrix(load_weight_matrix(run.read(args.transform)))
    run.config = {"k": args.k, "transformed": transform is not None}
    run.write("projection_source.tsv", svd_project(U, args.k).to_tsv())
    run.write("projection_target.tsv", svd_project(V, args.k).to_tsv())
    U_p, V_p = pairing_rows(U, V, pairing)
    report = manifold_report(U_p, V_p, transform)
    run.write("manifold.tsv", report.summary_tsv())
    run.write("dist_source.tsv", matrix_tsv(pairing.sources, report.dist_source))
    run.write("dist_target.tsv", matrix_tsv(pairing.targets, report.dist_target))
    run.write("segments.tsv", pair_segments(U, V, [(p.source, p.target) for p in pairing], args.k))


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="clar", description="Cross-lingual label matching and alignment experiments.")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--output-dir", default=".", help="directory for outputs and manifest")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("freq", help="count argument labels in a CoNLL file")
    s.add_argument("input")
    s.add_argument("--language", required=True)
    s.add_argument("--output", default="freq.tsv")
    s.set_defaults(func=cmd_freq)

    s = sub.add_parser("match", help="pair source and target label rows")
    for name in ("source-weights", "target-weights", "source-freq", "target-freq"):
        s.add_argument(f"--{name}", required=True)
    s.add_argument("--threshold", type=float, default=0.01)
    s.add_argument("--cardinality", default="default",
                   help="integer, 'all', 'half' or 'default'")
    s.add_argument("--capacity", type=int, default=1, help="targets per source label")
    s.add_argument("--output", default="pairing.tsv")
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("synth", help="generate a synthetic bilingual task")
    s.add_argument("config")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("train", help="train a tagger from a config file")
    s.add_argument("config")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("evaluate", help="score a trained model on a corpus")
    s.add_argument("--model", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--language", required=True)
    s.add_argument("--combine-mapped", action="store_true",
                   help="also score with targets sharing a source label merged")
    s.add_argument("--pairing")
    s.add_argument("--output", default="metrics.tsv")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("analyze", help="projection and distance diagnostics")
    s.add_argument("--source-weights", required=True)
    s.add_argument("--target-weights", required=True)
    s.add_argument("--pairing", required=True)
    s.add_argument("--transform", help="compare transformed target rows")
    s.add_argument("--k", type=int, default=2)
    s.set_defaults(func=cmd_analyze)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.output_dir)
    run = Run(args.command, out, args.seed)
    try:
        out.mkdir(parents=True, exist_ok=True)
        args.func(args, run)
        run.finish()
    except ClarError as exc:
        print(f"error [{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_CODES["io"]
    except ValueError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return EXIT_CODES["config"]
    return 0


if __name__ == "__main__":
    sys.exit(main())
