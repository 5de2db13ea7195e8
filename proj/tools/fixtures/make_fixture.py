#!/usr/bin/env python3
# Copyright 2026 The sepq Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the committed test fixtures under tests/fixtures/.

Trains a five-layer CNN on a synthetic 10-class 8x8 dataset with PyTorch and
writes:
  weights.fmap           conv/dense weights and biases
  model.json             layer description referencing weights.fmap
  dataset.fmap           held-out evaluation set ("images", "labels")
  features.fmap          post-activation maps of each quantizable layer for
                         n sampled training images (labels in metadata)
  reference_logits.fmap  framework logits on dataset.fmap
  profile.json           per-layer weight parameter and MAC counts

Usage: make_fixture.py [--out tests/fixtures] [--seed 42] [-n 32]
"""

import argparse
import json
import os
import struct

import numpy as np
import torch
import torch.nn as nn

MAGIC = b"FMAP\x00\x01"
NUM_CLASSES = 10
SIDE = 8


def write_fmap(path, tensors, metadata):
    entries, blobs, offset = [], [], 0
    for name, array in tensors:
        array = np.ascontiguousarray(array, dtype="<f4")
        blob = array.tobytes()
        entries.append({"name": name, "shape": list(array.shape),
                        "byte_offset": offset, "byte_length": len(blob)})
        blobs.append(blob)
        offset += len(blob)
    manifest = json.dumps({"format_version": 1, "entries": entries,
                           "metadata": metadata},
                          separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<Q", len(manifest)))
        f.write(manifest)
        for blob in blobs:
            f.write(blob)


def make_dataset(rng, prototypes, count):
    labels = rng.integers(0, NUM_CLASSES, size=count)
    images = np.empty((count, 1, SIDE, SIDE), dtype=np.float32)
    for i, c in enumerate(labels):
        img = np.roll(prototypes[c], shift=tuple(rng.integers(-1, 2, size=2)), axis=(0, 1))
        img = img * rng.uniform(0.7, 1.3) + rng.normal(0.0, 0.6, size=img.shape)
        images[i, 0] = img
    return images, labels.astype(np.float32)


class Net(nn.Module):
    def __init__(self):
        super().__init__()
        self.conv1 = nn.Conv2d(1, 8, 3, stride=1, padding=1)
        self.conv2 = nn.Conv2d(8, 16, 3, stride=2, padding=1)
        self.conv3 = nn.Conv2d(16, 16, 3, stride=1, padding=1)
        self.fc1 = nn.Linear(16, 32)
        self.fc2 = nn.Linear(32, NUM_CLASSES)

    def forward(self, x, record=None):
        def keep(name, t):
            if record is not None:
                record[name] = t if t.dim() == 4 else t[:, :, None, None]
            return t
        x = keep("conv1", torch.relu(self.conv1(x)))
        x = keep("conv2", torch.relu(self.conv2(x)))
        x = keep("conv3", torch.relu(self.conv3(x)))
        x = x.mean(dim=(2, 3))
        x = keep("fc1", torch.relu(self.fc1(x)))
        return keep("fc2", self.fc2(x))


LAYERS = [
    {"type": "conv2d", "name": "conv1", "in_channels": 1, "out_channels": 8,
     "kernel": 3, "stride": 1, "padding": 1},
    {"type": "relu"},
    {"type": "conv2d", "name": "conv2", "in_channels": 8, "out_channels": 16,
     "kernel": 3, "stride": 2, "padding": 1},
    {"type": "relu"},
    {"type": "conv2d", "name": "conv3", "in_channels": 16, "out_channels": 16,
     "kernel": 3, "stride": 1, "padding": 1},
    {"type": "relu"},
    {"type": "global_avgpool"},
    {"type": "flatten"},
    {"type": "dense", "name": "fc1", "in_features": 16, "out_features": 32},
    {"type": "relu"},
    {"type": "dense", "name": "fc2", "in_features": 32, "out_features": NUM_CLASSES},
]


def profile(net):
    # MACs = output elements x weights per output element.
    out_hw = {"conv1": 8 * 8, "conv2": 4 * 4, "conv3": 4 * 4, "fc1": 1, "fc2": 1}
    layers = []
    for name, hw in out_hw.items():
        w = getattr(net, name).weight
        params = w.numel()
        layers.append({"layer_id": name, "param_count": params,
                       "mac_count": hw * params})
    return {"format": "sepq.profile", "version": 1, "layers": layers}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__),
                                                  "..", "..", "tests", "fixtures"))
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("-n", type=int, default=32)
    ap.add_argument("--epochs", type=int, default=40)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    torch.manual_seed(args.seed)
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)
    rng = np.random.default_rng(args.seed)

    prototypes = rng.normal(0.0, 1.0, size=(NUM_CLASSES, SIDE, SIDE)).astype(np.float32)
    train_x, train_y = make_dataset(rng, prototypes, 2000)
    test_x, test_y = make_dataset(rng, prototypes, 500)

    net = Net()
    opt = torch.optim.Adam(net.parameters(), lr=3e-3)
    xt, yt = torch.from_numpy(train_x), torch.from_numpy(train_y).long()
    for _ in range(args.epochs):
        perm = torch.randperm(len(xt))
        for i in range(0, len(xt), 64):
            idx = perm[i:i + 64]
            opt.zero_grad()
            loss = nn.functional.cross_entropy(net(xt[idx]), yt[idx])
            loss.backward()
            opt.step()
    net.eval()

    tensors, layers = [], []
    for spec in LAYERS:
        spec = dict(spec)
        if "name" in spec:
            mod = getattr(net, spec["name"])
            spec["weight"] = spec["name"] + ".weight"
            spec["bias"] = spec["name"] + ".bias"
            tensors.append((spec["weight"], mod.weight.detach().numpy()))
            tensors.append((spec["bias"], mod.bias.detach().numpy()))
        layers.append(spec)
    write_fmap(os.path.join(args.out, "weights.fmap"), tensors, {"seed": args.seed})
    model = {"format": "sepq.model", "version": 1, "input_shape": [1, SIDE, SIDE],
             "weights": "weights.fmap", "layers": layers}
    with open(os.path.join(args.out, "model.json"), "w") as f:
        json.dump(model, f, indent=2)
        f.write("\n")

    write_fmap(os.path.join(args.out, "dataset.fmap"),
               [("images", test_x), ("labels", test_y)],
               {"classes": NUM_CLASSES, "seed": args.seed})

    with torch.no_grad():
        logits = net(torch.from_numpy(test_x)).numpy()
        top1 = float((logits.argmax(axis=1) == test_y).mean())
        sample = rng.choice(len(train_x), size=args.n, replace=False)
        record = {}
        net(torch.from_numpy(train_x[sample]), record)
    write_fmap(os.path.join(args.out, "reference_logits.fmap"), [("logits", logits)],
               {"top1": top1})
    names = ["conv1", "conv2", "conv3", "fc1", "fc2"]
    write_fmap(os.path.join(args.out, "features.fmap"),
               [(k, record[k].numpy()) for k in names],
               {"layers": names, "n": args.n, "seed": args.seed,
                "image_ids": [int(i) for i in sample],
                "labels": [int(train_y[i]) for i in sample]})
    with open(os.path.join(args.out, "profile.json"), "w") as f:
        json.dump(profile(net), f, indent=2)
        f.write("\n")
    print(f"float top-1 on {len(test_y)} held-out images: {top1:.4f}")


if __name__ == "__main__":
    main()
