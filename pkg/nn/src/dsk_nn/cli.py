"""nn-train: train the seeded ensemble on a manifest's train split and
emit per-seed prediction CSVs plus the voted test-set labels."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np


def load_manifest_labels(path) -> list[dict]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    samples = payload["samples"]
    for rec in samples:
        if rec.get("group") not in ("AD", "HC"):
            raise ValueError(f"sample {rec.get('id')!r}: unknown group")
        if rec.get("split") not in ("train", "test"):
            raise ValueError(f"sample {rec.get('id')!r}: unknown split")
    return samples


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nn-train")
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--texts", required=True, help="directory of <id>.txt files")
    parser.add_argument("--embeddings", required=True)
    parser.add_argument("--seeds", type=int, default=25)
    parser.add_argument("--out", required=True)
    parser.add_argument("--epochs", type=int, default=30)
    parser.add_argument("--batch-size", type=int, default=10)
    parser.add_argument("--max-len", type=int, default=250)
    parser.add_argument(
        "--vote-mode", choices=["per-model", "average"], default="per-model"
    )
    args = parser.parse_args(argv)

    if args.vote_mode == "per-model" and args.seeds % 2 == 0:
        print("error: per-model voting needs an odd --seeds count", file=sys.stderr)
        return 1

    # keras import is slow; keep it out of --help
    from dsk_nn.embeddings import load_embeddings
    from dsk_nn.network import NetConfig, predict_probs, train_one, vote

    try:
        samples = load_manifest_labels(args.manifest)
        texts_dir = Path(args.texts)
        texts = {}
        for rec in samples:
            texts[rec["id"]] = (texts_dir / f"{rec['id']}.txt").read_text(
                encoding="utf-8"
            )
        table = load_embeddings(args.embeddings)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    train_recs = [r for r in samples if r["split"] == "train"]
    test_recs = [r for r in samples if r["split"] == "test"]
    if not train_recs or not test_recs:
        print("error: manifest needs both train and test samples", file=sys.stderr)
        return 1
    train_texts = [texts[r["id"]] for r in train_recs]
    y_train = np.array([1 if r["group"] == "AD" else 0 for r in train_recs])
    test_ids = [r["id"] for r in test_recs]
    test_texts = [texts[i] for i in test_ids]

    config = NetConfig(
        max_len=args.max_len, batch_size=args.batch_size, epochs=args.epochs
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    probs = []
    for seed in range(args.seeds):
        model = train_one(train_texts, y_train, seed, table, config)
        p = predict_probs(model, test_texts, table, config)
        probs.append(p)
        with open(out / f"predictions_seed_{seed:02d}.csv", "w", encoding="utf-8") as fh:
            fh.write("id,prob,label\n")
            for sid, prob in zip(test_ids, p):
                fh.write(f"{sid},{float(prob)!r},{int(prob >= 0.5)}\n")
        print(f"seed {seed}: trained and scored {len(test_ids)} test samples")

    labels = vote(np.stack(probs), args.vote_mode)
    with open(out / "voted_labels.csv", "w", encoding="utf-8") as fh:
        fh.write("id,label\n")
        for sid, label in zip(test_ids, labels):
            fh.write(f"{sid},{int(label)}\n")
    print(f"voted labels -> {out / 'voted_labels.csv'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
