#!/usr/bin/env python3
"""Write a synthetic, separable training set in the prove-features format.

    python scripts/make_synthetic_features.py features.jsonl [n] [seed]

Labels follow a fixed threshold rule on the top evidence slot: SUPP when its
support probability reaches 0.6, REF when its refute probability does, NEI
otherwise. Handy for exercising 'prove train' without annotated data.
"""

from __future__ import annotations

import random
import sys

from prove.verification import FEATURE_COUNT, FeatureVector, save_feature_file


def make_dataset(n: int, seed: int) -> list[tuple[FeatureVector, str]]:
    rng = random.Random(seed)
    dataset = []
    for i in range(n):
        kind = i % 3
        rho0 = rng.uniform(0.2, 1.0)
        if kind == 0:
            supp = rng.uniform(0.7, 0.95)
            ref = rng.uniform(0.0, (1.0 - supp) / 2)
            label = "SUPP"
        elif kind == 1:
            ref = rng.uniform(0.7, 0.95)
            supp = rng.uniform(0.0, (1.0 - ref) / 2)
            label = "REF"
        else:
            supp = rng.uniform(0.0, 0.45)
            ref = rng.uniform(0.0, min(0.45, 1.0 - supp))
            label = "NEI"
        values = [rho0, supp, ref, 1.0 - supp - ref, rng.uniform(0.02, 1.0)]
        rho = rho0
        for _ in range(4):
            if rng.random() < 0.4:
                values.extend([0.0] * 5)
                continue
            rho = rng.uniform(-1.0, rho)
            raw = [rng.random() for _ in range(3)]
            total = sum(raw)
            values.extend([rho, *(v / total for v in raw), rng.uniform(0.02, 1.0)])
        assert len(values) == FEATURE_COUNT
        dataset.append((FeatureVector(values=tuple(values)), label))
    return dataset


def main() -> None:
    if len(sys.argv) < 2:
        raise SystemExit(__doc__)
    out = sys.argv[1]
    n = int(sys.argv[2]) if len(sys.argv) > 2 else 300
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
    dataset = make_dataset(n, seed)
    save_feature_file(dataset, out)
    counts = {label: 0 for label in ("SUPP", "REF", "NEI")}
    for _, label in dataset:
        counts[label] += 1
    print(f"wrote {n} samples to {out}: {counts}")


if __name__ == "__main__":
    main()
