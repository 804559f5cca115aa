#!/usr/bin/env python3
"""Full symbol-recognition experiment: generate presses through the pipeline,
train the 9-32-16-8-4 network, report held-out and inference metrics."""

import argparse
import time

from neurotactile.mlp import TrainConfig, accuracy, macro_recall, save_model, train
from neurotactile.symbols import gen_symbol_dataset, split_dataset


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-per-class", type=int, default=400)
    parser.add_argument("--noise", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--epochs", type=int, default=150)
    parser.add_argument("--model-out")
    args = parser.parse_args()

    t0 = time.time()
    dataset = gen_symbol_dataset(seed=args.seed, n_per_class=args.n_per_class,
                                 noise=args.noise)
    print(f"generated {len(dataset.samples)} samples in {time.time() - t0:.1f}s")
    (tx, ty), (hx, hy) = split_dataset(dataset, 0.2, seed=4)
    model, history = train(tx, ty, TrainConfig(epochs=args.epochs, seed=0), val=(hx, hy))
    for stats in history[:: max(1, args.epochs // 10)]:
        print(f"epoch {stats.epoch:>3}: loss {stats.loss:.4f} "
              f"train acc {stats.train_accuracy:.3f} val acc {stats.val_accuracy:.3f}")
    print(f"held-out: accuracy {accuracy(model, hx, hy):.3f} "
          f"macro recall {macro_recall(model, hx, hy):.3f}")

    inference = gen_symbol_dataset(seed=args.seed + 12, n_per_class=50, noise=args.noise)
    ix, iy = inference.arrays()
    print(f"inference set: accuracy {accuracy(model, ix, iy):.3f}")
    if args.model_out:
        save_model(model, args.model_out)
        print(f"model saved to {args.model_out}")


if __name__ == "__main__":
    main()
