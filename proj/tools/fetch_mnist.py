#!/usr/bin/env python3
# Copyright 2026 The hlsim Authors
# SPDX-License-Identifier: Apache-2.0
"""Build MNIST IDX files for hlsim from the `mnist` npm package.

The package ships 10,000 MNIST digits as JSON (pixel/255 rounded to three
decimals, which maps back to the original bytes exactly). They are split
into a class-balanced validation set of 300 digits per class and a training
pool with the remaining 7,000.

Usage: tools/fetch_mnist.py [--out data/mnist] [--package-dir DIR]
"""

import argparse
import json
import random
import struct
import subprocess
import sys
import tarfile
import tempfile
from pathlib import Path

PACKAGE = "mnist@1.1.0"
VAL_PER_CLASS = 300
SEED = 0


def fetch_package(work: Path) -> Path:
    out = subprocess.run(["npm", "pack", PACKAGE, "--silent"], cwd=work, check=True,
                         capture_output=True, text=True).stdout.strip().splitlines()[-1]
    with tarfile.open(work / out) as tar:
        tar.extractall(work)
    return work / "package"


def load_digits(package: Path):
    samples = []
    for label in range(10):
        data = json.loads((package / "src" / "digits" / f"{label}.json").read_text())["data"]
        if len(data) % 784:
            sys.exit(f"{label}.json: {len(data)} values is not a whole number of 28x28 images")
        for i in range(0, len(data), 784):
            px = bytes(min(255, max(0, round(v * 255))) for v in data[i:i + 784])
            samples.append((px, label))
    return samples


def write_idx(path_prefix: Path, samples):
    images = path_prefix.with_name(path_prefix.name + "-images-idx3-ubyte")
    labels = path_prefix.with_name(path_prefix.name + "-labels-idx1-ubyte")
    with open(images, "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(samples), 28, 28))
        for px, _ in samples:
            f.write(px)
    with open(labels, "wb") as f:
        f.write(struct.pack(">II", 0x801, len(samples)))
        f.write(bytes(label for _, label in samples))
    return images, labels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "mnist"))
    ap.add_argument("--package-dir", help="already extracted npm package directory")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        package = Path(args.package_dir) if args.package_dir else fetch_package(Path(tmp))
        samples = load_digits(package)

    rng = random.Random(SEED)
    by_class = [[s for s in samples if s[1] == c] for c in range(10)]
    val, pool = [], []
    for rows in by_class:
        rng.shuffle(rows)
        val += rows[:VAL_PER_CLASS]
        pool += rows[VAL_PER_CLASS:]
    rng.shuffle(val)
    rng.shuffle(pool)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", pool), ("val", val)):
        images, labels = write_idx(out / name, part)
        print(f"{name}: {len(part)} samples -> {images.name}, {labels.name}")


if __name__ == "__main__":
    main()
