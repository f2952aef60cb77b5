#!/usr/bin/env python3
"""Generate the shape x method trace-error fixtures and their manifest.

Each trajectory walks the ground-truth outline at constant speed, sampled at
30 Hz, displaced along the outline normal by smooth seeded noise. The noise
amplitude is bisected so the mean point-to-outline error lands on a reference
magnitude. Stored reports are written afterwards by `dronepaint metrics
--manifest ... --out`.
"""

import argparse
import json
import math
from pathlib import Path

import numpy as np

RATE_HZ = 30.0
CENTER = (0.0, 1.5)

# shape, method, mean error (cm), drawing time (s)
COLUMNS = [
    ("square", "H", 6.45, 15.50),
    ("square", "M", 3.69, 5.52),
    ("circle", "H", 6.33, 13.47),
    ("circle", "M", 3.29, 4.89),
    ("triangle", "H", 4.13, 12.04),
    ("triangle", "M", 2.19, 4.50),
]


def outline(kind):
    cx, cz = CENTER
    if kind == "square":
        h = 0.5
        pts = [(-h, h), (h, h), (h, -h), (-h, -h)]
    elif kind == "circle":
        pts = [(0.5 * math.cos(2 * math.pi * k / 720), 0.5 * math.sin(2 * math.pi * k / 720)) for k in range(720)]
    else:
        r = 1.0 / math.sqrt(3.0)
        pts = [(r * math.cos(math.radians(d)), r * math.sin(math.radians(d))) for d in (90, 210, 330)]
    pts = [(cx + x, cz + z) for x, z in pts]
    pts.append(pts[0])
    return np.array(pts)


def walk(poly, n):
    seg = np.diff(poly, axis=0)
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = np.linspace(0.0, cum[-1], n)
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    u = (s - cum[idx]) / lengths[idx]
    pts = poly[idx] + u[:, None] * seg[idx]
    tangent = seg[idx] / lengths[idx][:, None]
    normal = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1)
    return pts, normal, s / cum[-1]


def distances(points, poly):
    a = poly[:-1]
    ab = poly[1:] - a
    ap = points[:, None, :] - a[None, :, :]
    u = np.clip((ap * ab).sum(-1) / (ab * ab).sum(-1), 0.0, 1.0)
    foot = a[None] + u[..., None] * ab[None]
    return np.hypot(*(points[:, None, :] - foot).transpose(2, 0, 1)).min(axis=1)


def smooth_noise(rng, phase, harmonics=12):
    out = np.zeros_like(phase)
    for k in range(1, harmonics + 1):
        out += rng.normal() / k * np.sin(2 * math.pi * k * phase + rng.uniform(0, 2 * math.pi))
    out += 0.15 * rng.normal(size=phase.shape)
    return out / np.sqrt(np.mean(out**2))


def make(kind, mean_cm, duration, seed):
    rng = np.random.default_rng(seed)
    poly = outline(kind)
    n = int(round(duration * RATE_HZ)) + 1
    base, normal, phase = walk(poly, n)
    noise = smooth_noise(rng, phase)
    target = mean_cm / 100.0

    def drawn(scale):
        return np.round(base + (scale * noise)[:, None] * normal, 6)

    lo, hi = 0.0, 10 * target
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if distances(drawn(mid), poly).mean() < target:
            lo = mid
        else:
            hi = mid
    pts = drawn(0.5 * (lo + hi))
    t = np.round(np.linspace(0.0, duration, n), 6)
    return pts, t


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests/fixtures/error_grid"))
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    columns = []
    for i, (kind, method, mean_cm, duration) in enumerate(COLUMNS):
        pts, t = make(kind, mean_cm, duration, args.seed + i)
        name = f"{kind}_{method}"
        with open(out / f"{name}.csv", "w") as f:
            f.write("x,y,t\n")
            for (x, z), ti in zip(pts, t):
                f.write(f"{x:.6f},{z:.6f},{ti:.6f}\n")
        shape = {"kind": kind, "center": list(CENTER)}
        shape["radius" if kind == "circle" else "side"] = 0.5 if kind == "circle" else 1.0
        columns.append({"shape": shape, "method": method, "file": f"{name}.csv", "report": f"{name}.report.json"})

    manifest = {"format": "dronepaint-table", "version": 1, "seed": args.seed, "columns": columns}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


if __name__ == "__main__":
    main()
