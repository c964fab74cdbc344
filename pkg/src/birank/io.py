"""File formats: PGM images, CSV arrays, subband trees, families, reports."""

from __future__ import annotations

import json
import os
from typing import Tuple

import numpy as np

from .latin import HaarFamily
from .transform import SubbandLevel, SubbandTree

SCHEMA = 1


# -- PGM -------------------------------------------------------------------


def _pgm_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos + 1  # a single whitespace byte ends the header


def read_pgm(path) -> Tuple[np.ndarray, int]:
    """Binary (P5) PGM as an integer array and its maxval."""
    with open(path, "rb") as fh:
        data = fh.read()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    n = w * h * dtype.itemsize
    if len(data) - pos < n:
        raise ValueError(f"{path}: truncated pixel data")
    img = np.frombuffer(data, dtype=dtype, count=w * h, offset=pos).reshape(h, w)
    return img.astype(np.int64), maxval


def write_pgm(path, img, maxval: int | None = None) -> None:
    """Write integers in ``[0, maxval]`` as P5; 16-bit samples are big-endian."""
    img = np.asarray(img)
    if maxval is None:
        maxval = 255 if img.max(initial=0) <= 255 else 65535
    if img.min(initial=0) < 0 or img.max(initial=0) > maxval:
        raise ValueError("pixel values outside [0, maxval]")
    dtype = ">u2" if maxval > 255 else "u1"
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n{maxval}\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=dtype).tobytes())


def heatmap(values, bits: int = 16) -> np.ndarray:
    """Linear min-max scaling to ``[0, 2**bits - 1]``.

    A constant array maps to black when it is zero and to mid-gray otherwise.
    """
    v = np.asarray(values, dtype=float)
    top = 2**bits - 1
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        level = 0 if lo == 0 else (top + 1) // 2
        return np.full(v.shape, level, dtype=np.int64)
    return np.rint((v - lo) / (hi - lo) * top).astype(np.int64)


# -- CSV -------------------------------------------------------------------


def write_csv_array(path, arr) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(arr, dtype=float)), delimiter=",", fmt="%.17g")


def read_csv_array(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=float, comments="#"))


def write_matrix_csv(path, samples, nodes) -> None:
    """Complex matrices, one ``# xi1,xi2`` section per node; each row holds
    interleaved ``re,im`` entries."""
    samples = np.asarray(samples, dtype=complex)
    with open(path, "w") as fh:
        for (x1, x2), M in zip(nodes, samples):
            fh.write(f"# {x1:.17g},{x2:.17g}\n")
            for row in M:
                fh.write(",".join(f"{z.real:.17g},{z.imag:.17g}" for z in row) + "\n")


def read_matrix_csv(path):
    nodes, mats, cur = [], [], None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                x1, x2 = (float(t) for t in line[1:].split(","))
                nodes.append((x1, x2))
                cur = []
                mats.append(cur)
                continue
            vals = [float(t) for t in line.split(",")]
            cur.append([complex(r, i) for r, i in zip(vals[::2], vals[1::2])])
    return np.array(nodes), np.array(mats, dtype=complex)


# -- JSON ------------------------------------------------------------------


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# -- subband trees ---------------------------------------------------------


def _band_files(tree: SubbandTree):
    yield "approx.csv", tree.approx
    for k, lv in enumerate(tree.levels, 1):
        for kind, bands in (("detail_a", lv.detail_a), ("detail_b", lv.detail_b), ("wavelet", lv.wavelet)):
            for i, b in enumerate(bands, 1):
                yield f"level{k}_{kind}_{i}.csv", b


def write_subband_tree(directory, tree: SubbandTree, extra: dict | None = None) -> None:
    os.makedirs(directory, exist_ok=True)
    shapes = []
    for name, band in _band_files(tree):
        write_csv_array(os.path.join(directory, name), band)
    shapes = [list(lv.shape) for lv in tree.levels]
    manifest = {
        "schema": SCHEMA,
        "alpha": tree.alpha,
        "beta": tree.beta,
        "depth": tree.depth,
        "shapes": {"input": list(tree.shape), "levels": shapes, "approx": list(tree.approx.shape)},
    }
    manifest.update(tree.meta)
    if extra:
        manifest.update(extra)
    write_json(os.path.join(directory, "manifest.json"), manifest)


def read_subband_tree(directory) -> SubbandTree:
    man = read_json(os.path.join(directory, "manifest.json"))
    a, b, depth = int(man["alpha"]), int(man["beta"]), int(man["depth"])
    shapes = man["shapes"]

    def load(name, shape):
        arr = read_csv_array(os.path.join(directory, name)).reshape(shape)
        return arr

    levels = []
    for k in range(1, depth + 1):
        shape = tuple(shapes["levels"][k - 1])
        levels.append(
            SubbandLevel(
                [load(f"level{k}_detail_a_{i}.csv", shape) for i in range(1, a)],
                [load(f"level{k}_detail_b_{j}.csv", shape) for j in range(1, b)],
                [load(f"level{k}_wavelet_{i}.csv", shape) for i in range(1, (a - 1) * (b - 1) + 1)],
            )
        )
    approx = load("approx.csv", tuple(shapes["approx"]))
    meta = {k: v for k, v in man.items() if k not in ("schema", "alpha", "beta", "depth", "shapes")}
    return SubbandTree(a, b, tuple(shapes["input"]), levels, approx, meta)


# -- families --------------------------------------------------------------


def write_family_dir(directory, fam: HaarFamily, extra: dict | None = None) -> dict:
    """One CSV grid per family function plus ``manifest.json``."""
    os.makedirs(directory, exist_ok=True)
    files = {}
    for name, g in zip(fam.names, fam.grids):
        fname = f"{name}.csv"
        write_csv_array(os.path.join(directory, fname), g)
        files[name] = fname
    manifest = {"schema": SCHEMA, "alpha": fam.alpha, "beta": fam.beta, "files": files}
    if extra:
        manifest.update(extra)
    write_json(os.path.join(directory, "manifest.json"), manifest)
    return manifest


def read_family_dir(directory) -> HaarFamily:
    man = read_json(os.path.join(directory, "manifest.json"))
    a, b = int(man["alpha"]), int(man["beta"])
    files = man["files"]
    names = (
        ["phi"]
        + [f"detail_a_{i}" for i in range(1, a)]
        + [f"detail_b_{j}" for j in range(1, b)]
        + [f"wavelet_{k}" for k in range(1, (a - 1) * (b - 1) + 1)]
    )
    rows = []
    for n in names:
        g = read_csv_array(os.path.join(directory, files[n]))
        if g.shape != (a, b):
            raise ValueError(f"{files[n]}: expected a {a}x{b} grid, got {g.shape}")
        rows.append(g.reshape(-1))
    return HaarFamily.from_matrix(a, b, np.array(rows))
