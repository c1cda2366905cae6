#!/usr/bin/env python3
"""Build the bundled MNIST IDX files from the `mnist` npm package.

The npm package (https://www.npmjs.com/package/mnist, v1.1.0) ships 10000
MNIST digits as per-class JSON arrays of pixel/255 rounded to three decimals,
which is enough to recover every original byte exactly. The digits are
shuffled with a fixed seed and split 8000/2000 into train/test IDX files.

Usage:
  npm pack mnist && tar xzf mnist-1.1.0.tgz
  python3 tools/make_bundled_mnist.py package/src/digits data/
"""
import gzip
import json
import pathlib
import random
import struct
import sys

SEED = 20240101
TRAIN_COUNT = 8000


def recover_bytes(values):
    out = bytearray()
    for v in values:
        b = round(v * 255)
        if not 0 <= b <= 255 or abs(b / 255 - v) > 6e-4:
            raise ValueError(f"pixel {v} is not a rounded byte/255")
        out.append(b)
    return bytes(out)


def write_gz(path, payload):
    with open(path, "wb") as raw, gzip.GzipFile("", "wb", fileobj=raw, mtime=0) as f:
        f.write(payload)


def write_split(dst, prefix, samples):
    images = b"".join(s[0] for s in samples)
    labels = bytes(s[1] for s in samples)
    write_gz(dst / f"{prefix}-images-idx3-ubyte.gz",
             struct.pack(">IIII", 0x803, len(samples), 28, 28) + images)
    write_gz(dst / f"{prefix}-labels-idx1-ubyte.gz",
             struct.pack(">II", 0x801, len(samples)) + labels)


def main():
    src = pathlib.Path(sys.argv[1])
    dst = pathlib.Path(sys.argv[2])
    samples = []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        for i in range(0, len(data), 784):
            samples.append((recover_bytes(data[i:i + 784]), digit))
    random.Random(SEED).shuffle(samples)
    train, test = samples[:TRAIN_COUNT], samples[TRAIN_COUNT:]
    write_split(dst, "train", train)
    write_split(dst, "t10k", test)


if __name__ == "__main__":
    main()
