"""Command-line interface.

Typical pipeline on synthetic data:

    negood synth --config synth.json --out bench/
    negood select --corpus bench/wild.emb --alpha 50 --top 1000 --groups 20 --out sel/
    negood synth-positives --id bench/id_texts.emb --sigma 0.001 --seed 7 --out positives.emb
    negood score --id bench/id_texts.emb --wild bench/wild.emb --groups sel/groups.csv \\
        --positives positives.emb --images bench/id_images.emb --method grouped --out id_scores.csv
    negood eval --id-scores id_scores.csv --ood-scores ood_scores.csv --out report.json

groups.csv row indices refer to the file passed as --wild, so pass the
same corpus file that `select` consumed. Without --groups, `score`
treats every row of --wild as a single group.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .core import ScoreConfig, load_emb1, write_emb1
from .metrics import evaluate
from .positives import synthesize_bank
from .scoring import build_context, compute_scores, score_mcm
from .selection import GROUPING_RANDOM, GROUPING_ROUND_ROBIN, select_and_partition
from .similarity import affinity_matrix
from .synthetic import ClusterSpreads, build_benchmark
from .verify import run_bias_experiment, run_expansion_suite


def _cmd_select(args) -> int:
    corpus = load_emb1(args.corpus)
    config = ScoreConfig(L=args.top, B=args.groups, alpha=args.alpha, seed=args.seed)
    result = select_and_partition(corpus, config, grouping=args.grouping)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_emb1(corpus.take(result.selected), out / "selected.emb")
    with (out / "order.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "corpus_index", "rep_score"])
        for rank, idx in enumerate(result.order):
            w.writerow([rank, int(idx), f"{result.rep_scores[idx]:.17g}"])
    with (out / "groups.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["group_id", "corpus_index"])
        for gid, group in enumerate(result.groups):
            for idx in group:
                w.writerow([gid, int(idx)])
    print(f"selected {len(result.selected)} of {corpus.rows} rows "
          f"into {len(result.groups)} groups -> {out}")
    return 0


def _cmd_synth_positives(args) -> int:
    id_texts = load_emb1(args.id)
    bank = synthesize_bank(id_texts, sigma=args.sigma, seed=args.seed)
    write_emb1(bank.vectors, args.out)
    print(f"wrote {bank.vectors.rows} positives -> {args.out}")
    return 0


def _read_groups(path) -> list[np.ndarray]:
    by_group: dict[int, list[int]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["group_id", "corpus_index"]:
            raise ValueError(f"{path}: expected header group_id,corpus_index")
        for row in reader:
            by_group.setdefault(int(row[0]), []).append(int(row[1]))
    return [np.array(by_group[g], dtype=np.int64) for g in sorted(by_group)]


def _cmd_score(args) -> int:
    config = ScoreConfig.from_json(args.config) if args.config else ScoreConfig()
    images = load_emb1(args.images)
    id_texts = load_emb1(args.id)

    method = {"grouped": "grouped-debiased"}.get(args.method, args.method)
    if method == "mcm":
        scores = score_mcm(affinity_matrix(images, id_texts, config.kappa))
        clamp_count = 0
    else:
        if not args.wild:
            raise SystemExit(f"--wild is required for method {args.method}")
        wild = load_emb1(args.wild)
        groups = _read_groups(args.groups) if args.groups else [np.arange(wild.rows)]
        positives = load_emb1(args.positives) if args.positives else None
        if positives is None and config.tau > 0 and method in ("debiased", "grouped-debiased"):
            raise SystemExit(f"--positives is required for {args.method} unless tau = 0")
        ctx = build_context(images, id_texts, wild, positives, groups, config)
        report = compute_scores(ctx, method)
        scores, clamp_count = report.scores, report.clamp_count

    with Path(args.out).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "score"])
        for i, s in enumerate(np.atleast_1d(scores)):
            w.writerow([i, f"{s:.9g}"])
    print(f"scored {images.rows} inputs with {method} "
          f"(clamp_count={clamp_count}) -> {args.out}")
    return 0


def _read_scores_csv(path) -> np.ndarray:
    values = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[-1] == "score":
                continue
            values.append(float(row[-1]))
    return np.array(values)


def _cmd_eval(args) -> int:
    report = evaluate(
        _read_scores_csv(args.id_scores),
        _read_scores_csv(args.ood_scores),
        tpr_target=args.tpr,
    )
    if args.out:
        report.write_json(args.out)
    print(json.dumps(report.to_dict()))
    return 0


def _cmd_synth(args) -> int:
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    spreads = ClusterSpreads(**cfg.pop("spreads", {}))
    bench = build_benchmark(spreads=spreads, **cfg)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_emb1(bench.id_texts, out / "id_texts.emb")
    write_emb1(bench.id_images, out / "id_images.emb")
    write_emb1(bench.ood_images, out / "ood_images.emb")
    write_emb1(bench.wild_corpus, out / "wild.emb")
    with (out / "wild_truth.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "tag"])
        for i, tag in enumerate(bench.wild_truth):
            w.writerow([i, tag])
    meta = {
        "true_tau": bench.true_tau,
        "requested_tau": cfg.get("tau"),
        "seed": cfg.get("seed", 0),
        "spreads": spreads.to_dict(),
        "separation": cfg.get("separation", 0.1),
        "dim": cfg.get("dim"),
        "K": cfg.get("K"),
        "T": cfg.get("T"),
    }
    (out / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"wrote benchmark (T={bench.wild_corpus.rows}, "
          f"true_tau={bench.true_tau:.4f}) -> {out}")
    return 0


def _cmd_verify(args) -> int:
    if args.experiment == "oracle-expansion":
        worst = run_expansion_suite(n_spaces=args.spaces, seed=args.seed)
        print(f"max |exact - expansion| over {args.spaces} spaces: {worst:.3e}")
        return 0 if worst <= 1e-10 else 1

    # bias-bound
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    kappa = cfg.get("kappa", 0.01)
    tau = cfg.get("tau", 0.5)
    seed = cfg.get("seed", args.seed)
    rng = np.random.default_rng(seed)
    from .oracle import random_space

    space = random_space(rng, n_labels=cfg.get("n_labels", 4), dim=cfg.get("dim", 8), tau=tau)
    x = rng.standard_normal(space.embeddings.dim)
    x /= np.linalg.norm(x)
    x_aff = kappa * (space.embeddings.data.astype(np.float64) @ x)
    id_aff = kappa * (2.0 * rng.random(cfg.get("K", 3)) - 1.0)
    report = run_bias_experiment(
        space, x_aff, id_aff,
        grid=cfg.get("grid", [[100, 100000], [1000, 100000], [10000, 100000], [100000, 100000]]),
        trials=cfg.get("trials", 1000),
        lam=cfg.get("lambda", 1.0),
        seed=seed,
        kappa=kappa,
    )
    if args.out:
        report.write_json(args.out)
    print(json.dumps(report.to_dict()))
    ok = bool(np.all(report.mean_delta <= report.bound))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="negood", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="rank a wild corpus and keep the top L in B groups")
    p.add_argument("--corpus", required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grouping", choices=[GROUPING_ROUND_ROBIN, GROUPING_RANDOM],
                   default=GROUPING_ROUND_ROBIN)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("synth-positives", help="synthesize positive-label embeddings")
    p.add_argument("--id", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth_positives)

    p = sub.add_parser("score", help="score test inputs with one method")
    p.add_argument("--id", required=True)
    p.add_argument("--wild")
    p.add_argument("--groups")
    p.add_argument("--positives")
    p.add_argument("--images", required=True)
    p.add_argument("--config")
    p.add_argument("--method", required=True,
                   choices=["mcm", "neglabel", "debiased", "grouped"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("eval", help="AUROC / FPR95 from two score CSVs")
    p.add_argument("--id-scores", required=True)
    p.add_argument("--ood-scores", required=True)
    p.add_argument("--tpr", type=float, default=0.95)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic benchmark")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("verify", help="run a verification experiment")
    p.add_argument("--experiment", required=True, choices=["oracle-expansion", "bias-bound"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spaces", type=int, default=50)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
