"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run with pytest (lines are repeated in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""

import functools
import shutil
import statistics
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from clar.analysis import manifold_report
from clar.cli import main as cli_main
from clar.matcher import (MatchConfig, brute_force_matching, matching_cost, pairing_rows,
                          solve_matching)
from clar.regularizer import clar_gradients, clar_penalty, fit_affine_least_squares, AffineTransform
from clar.synth import SynthConfig, generate_heldout, generate_task
from clar.tagger import (build_vocab, collect_labels, combine_map, encode, evaluate, history_tsv,
                         init_model, loss_and_grads, merged_labels, train, TrainConfig)

from conftest import TASK, TRAINING
from gradcheck import numeric_grad, relative_error

SEEDS = range(5)
MERGE = {0: 0, 1: 0, 2: 1, 3: 1, 4: 2, 5: 2, 6: 3, 7: 4}   # 8 target proto-labels onto 5 source
RESULTS: list[str] = []


def report(number: int, name: str, passed: bool, detail: str) -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return passed


# -- shared training runs --------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def task_run(seed: int):
    cfg = replace(TASK, seed=seed)
    task = generate_task(cfg)
    dev, test = generate_heldout(cfg, "dev"), generate_heldout(cfg, "test")
    out = {"task": task}
    for mode in ("monolingual", "polyglot", "clar"):
        res = train(task.source if mode != "monolingual" else None, task.target,
                    replace(TRAINING, seed=seed, mode=mode), dev)
        out[mode] = res
        out[f"f1_{mode}"] = 100 * evaluate(res.model, test, cfg.target_language).f1
    return out


# -- criteria --------------------------------------------------------------------------------

def check_matcher_exactness() -> bool:
    start = time.perf_counter()
    mismatches = cases = 0
    for seed in range(200):
        rng = np.random.default_rng(seed)
        rows, cols = (int(x) for x in rng.integers(1, 7, size=2))
        cost = rng.integers(0, 100, size=(rows, cols)).astype(float)
        for cap in (1, 2):
            for k in range(1, min(cols, cap * rows) + 1):
                cases += 1
                fast = matching_cost(cost, solve_matching(cost, k, cap))
                slow = matching_cost(cost, brute_force_matching(cost, k, cap))
                mismatches += fast != slow
    elapsed = time.perf_counter() - start
    return report(1, "matcher exactness", mismatches == 0 and elapsed < 10.0,
                  f"{cases} solves, {mismatches} total-cost mismatches, {elapsed:.2f}s (< 10s)")


def check_gradient_fidelity() -> bool:
    worst_pen = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        K, d = int(rng.integers(1, 9)), int(rng.integers(1, 7))
        U, V = rng.normal(size=(K, d)), rng.normal(size=(K, d))
        t = AffineTransform(rng.normal(size=(d, d)), rng.normal(size=d))
        g = clar_gradients(U, V, t)
        f = lambda: clar_penalty(U, V, t)
        for analytic, x in ((g.u, U), (g.v, V), (g.psi, t.psi), (g.b, t.b)):
            worst_pen = max(worst_pen, relative_error(analytic, numeric_grad(f, x, 1e-5)))

    worst_net = 0.0
    cfg = TrainConfig(window=1, emb_dim=2, flag_dim=2, hidden_dim=3)
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        task = generate_task(SynthConfig(num_labels=3, vocab_size=10, source_sentences=3,
                                         target_sentences=3, sentence_length=(3, 6), seed=seed))
        m = init_model(cfg, build_vocab(task.source), build_vocab(task.target),
                       collect_labels(task.source, "src"), collect_labels(task.target, "tgt"),
                       seed=seed, languages=("src", "tgt"))
        p = m.params
        p["psi"] += rng.normal(scale=0.3, size=p["psi"].shape)
        p["b"] += rng.normal(scale=0.3, size=p["b"].shape)
        k = min(len(m.labels["source"]), len(m.labels["target"])) - 1
        pairs = (np.arange(1, k + 1), np.arange(k, 0, -1))
        for corpus in (task.source, task.target):
            batch = encode(m, list(corpus), corpus.language)
            _, _, grads = loss_and_grads(p, batch, pairs, 0.5)

            def total():
                loss, pen, _ = loss_and_grads(p, batch, pairs, 0.5, need_grads=False)
                return loss + pen

            for key, g in grads.items():
                worst_net = max(worst_net, relative_error(g, numeric_grad(total, p[key], 1e-5)))
    ok = worst_pen < 1e-5 and worst_net < 1e-4
    return report(2, "gradient fidelity", ok,
                  f"penalty max rel err {worst_pen:.2e} (< 1e-5), "
                  f"end-to-end max rel err {worst_net:.2e} (< 1e-4)")


def _gradient_descent_fit(U, V, steps=10_000):
    K, d = V.shape
    X = np.hstack([V, np.ones((K, 1))])
    lr = 1.0 / (2.0 * np.linalg.eigvalsh(X.T @ X).max())
    t = AffineTransform.identity(d)
    for _ in range(steps):
        g = clar_gradients(U, V, t)
        t = AffineTransform(t.psi - lr * g.psi, t.b - lr * g.b)
    return t


def check_oracle_agreement() -> bool:
    worst_gap = -np.inf
    for seed in range(50):
        rng = np.random.default_rng(seed)
        K, d = 20, 4
        U, V = rng.normal(size=(K, d)), rng.normal(size=(K, d))
        closed = clar_penalty(U, V, fit_affine_least_squares(U, V))
        descent = clar_penalty(U, V, _gradient_descent_fit(U, V))
        worst_gap = max(worst_gap, closed - descent)
    worst_res = 0.0
    for seed in range(20):
        rng = np.random.default_rng(500 + seed)
        d = int(rng.integers(2, 7))
        q, r = np.linalg.qr(rng.normal(size=(d, d)))
        Q, c = q * np.sign(np.diag(r)), rng.normal(size=d)
        U = rng.normal(size=(3 * d, d))
        V = (U - c) @ Q
        t = fit_affine_least_squares(U, V, ridge=0.0)
        worst_res = max(worst_res, np.abs(t.psi - Q).max(), np.abs(t.b - c).max(),
                        np.sqrt(clar_penalty(U, V, t)))
    ok = worst_gap <= 1e-6 and worst_res < 1e-8
    return report(3, "least-squares oracle agreement", ok,
                  f"max(closed - descent) {worst_gap:.2e} (<= 1e-6), "
                  f"rotation recovery residual {worst_res:.2e} (< 1e-8)")


def check_correspondence_recovery() -> bool:
    recovered, times = [], []
    for seed in SEEDS:
        cfg = replace(TASK, seed=seed)
        task = generate_task(cfg)
        start = time.perf_counter()
        # warm-up epochs only; the pairing is computed at the end of the last one
        short = replace(TRAINING, seed=seed, epochs=TRAINING.warmup_epochs + 1, patience=99)
        res = train(task.source, task.target, short, generate_heldout(cfg, "dev"))
        times.append(time.perf_counter() - start)
        truth = task.truth.correspondence
        recovered.append(sum(truth.get(p.target) == p.source for p in res.pairing))
    med = statistics.median(recovered)
    ok = med >= 10 and max(times) < 120
    return report(4, "correspondence recovery", ok,
                  f"correct pairs per seed {recovered}, median {med} (>= 10 of 12), "
                  f"slowest seed {max(times):.1f}s (< 120s)")


def check_cross_lingual_gain() -> bool:
    runs = [task_run(s) for s in SEEDS]
    mono = statistics.median(r["f1_monolingual"] for r in runs)
    poly = statistics.median(r["f1_polyglot"] for r in runs)
    clar = statistics.median(r["f1_clar"] for r in runs)
    ok = clar >= poly + 0.5 and poly >= mono
    return report(5, "cross-lingual gain", ok,
                  f"median target F1 monolingual {mono:.2f}, polyglot {poly:.2f}, clar {clar:.2f} "
                  f"(need clar >= polyglot + 0.5 and polyglot >= monolingual)")


def check_polyglot_equivalence() -> bool:
    cfg = replace(TASK, seed=0)
    task = generate_task(cfg)
    dev = generate_heldout(cfg, "dev")
    zero = replace(TRAINING, lam=0.0, seed=0)
    a = train(task.source, task.target, replace(zero, mode="clar"), dev)
    b = train(task.source, task.target, replace(zero, mode="polyglot"), dev)
    same = history_tsv(a.history).encode() == history_tsv(b.history).encode()
    return report(6, "polyglot equivalence at lambda 0", same and a.pairing is not None,
                  f"{len(a.history)} epochs, histories byte-identical: {same}")


def check_manifold_congruence() -> bool:
    correlations = []
    for seed in SEEDS:
        res = task_run(seed)["clar"]
        U, V = res.model.head("src", False), res.model.head("tgt", False)
        correlations.append(manifold_report(*pairing_rows(U, V, res.pairing)).pearson)
    med = statistics.median(correlations)
    worst_r, worst_f = 0.0, 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 8))
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        u = rng.normal(size=(10, d))
        r = manifold_report(u, u @ q.T + rng.normal(size=d))
        worst_r = max(worst_r, abs(r.pearson - 1.0))
        worst_f = max(worst_f, r.frobenius_sq_diff)
    ok = med > 0.9 and worst_r <= 1e-9 and worst_f <= 1e-9
    return report(7, "manifold congruence", ok,
                  f"trained Pearson per seed {[round(c, 4) for c in correlations]}, median "
                  f"{med:.4f} (> 0.9); rigid fixtures |r-1| {worst_r:.1e}, frobenius {worst_f:.1e}")


def check_many_to_one() -> bool:
    edge_rates, uncombined, combined = [], [], []
    for seed in SEEDS:
        cfg = replace(TASK, num_labels=5, label_merge_map=MERGE, seed=seed)
        task = generate_task(cfg)
        dev, test = generate_heldout(cfg, "dev"), generate_heldout(cfg, "test")
        tcfg = replace(TRAINING, seed=seed, match=MatchConfig(source_capacity=2))
        res = train(task.source, task.target, tcfg, dev)
        truth = task.truth.correspondence
        edge_rates.append(sum(truth.get(p.target) == p.source for p in res.pairing) / len(truth))
        merged = merged_labels(res.pairing)
        mapping = combine_map(res.pairing)
        plain = evaluate(res.model, test, cfg.target_language)
        joined = evaluate(res.model, test, cfg.target_language, combine=mapping)
        uncombined.append(100 * plain.restricted(merged).f1)
        combined.append(100 * joined.restricted({mapping[n] for n in merged}).f1)
    rate = statistics.median(edge_rates)
    f_plain, f_joined = statistics.median(uncombined), statistics.median(combined)
    ok = rate >= 0.8 and f_joined >= f_plain
    return report(8, "many-to-one matching", ok,
                  f"edge recovery per seed {[round(r, 3) for r in edge_rates]}, median {rate:.3f} "
                  f"(>= 0.8); merged-label F1 combined {f_joined:.2f} vs uncombined {f_plain:.2f}")


def check_determinism() -> bool:
    def pipeline(root: Path) -> dict[str, bytes]:
        (root / "synth.conf").write_text(
            "num_labels = 6\nvocab_size = 60\nsource_sentences = 60\ntarget_sentences = 15\n"
            "dev_sentences = 15\ntest_sentences = 30\n")
        (root / "train.conf").write_text(
            "source = data/source.conll\ntarget = data/target.conll\ndev = data/dev.conll\n"
            "test = data/test.conll\nepochs = 5\nwarmup_epochs = 2\nlearning_rate = 0.3\n"
            "batch_size = 2\nwindow = 3\nmatch_cardinality = all\n")
        codes = [
            cli_main(["--seed", "11", "--output-dir", str(root / "data"), "synth",
                      str(root / "synth.conf")]),
            cli_main(["--seed", "11", "--output-dir", str(root / "out"), "train",
                      str(root / "train.conf")]),
            cli_main(["--output-dir", str(root / "ana"), "analyze",
                      "--source-weights", str(root / "out/head_source.tsv"),
                      "--target-weights", str(root / "out/head_target.tsv"),
                      "--pairing", str(root / "out/pairing.tsv")]),
            cli_main(["--output-dir", str(root / "ev"), "evaluate", "--model",
                      str(root / "out/model.txt"), "--corpus", str(root / "data/test.conll"),
                      "--language", "tgt", "--combine-mapped", "--pairing",
                      str(root / "out/pairing.tsv")]),
        ]
        assert codes == [0, 0, 0, 0], codes
        return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*"))
                if p.is_file() and not p.name.startswith("manifest")}

    dirs = [Path(tempfile.mkdtemp()) for _ in range(2)]
    try:
        first, second = (pipeline(d) for d in dirs)
    finally:
        for d in dirs:
            shutil.rmtree(d, ignore_errors=True)
    same = first == second
    return report(9, "CLI determinism", same,
                  f"{len(first)} non-manifest files over synth/train/analyze/evaluate, "
                  f"byte-identical on re-run: {same}")


CHECKS = [check_matcher_exactness, check_gradient_fidelity, check_oracle_agreement,
          check_correspondence_recovery, check_cross_lingual_gain, check_polyglot_equivalence,
          check_manifold_congruence, check_many_to_one, check_determinism]


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__[6:] for c in CHECKS])
def test_criterion(check):
    assert check(), RESULTS[-1]


if __name__ == "__main__":
    results = [check() for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
