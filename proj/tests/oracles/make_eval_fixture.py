#!/usr/bin/env python3
"""Builds the 10-image evaluation fixture and its golden report.

The golden numbers are computed here with numpy only, from the values as
they were written to disk, so the C++ metric engine is checked against an
implementation that shares no code with it.

usage: make_eval_fixture.py <output_dir>
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

CAMERA = dict(w=640, h=480, fx=500.0, fy=505.0, cx=319.5, cy=239.5,
              k1=-0.05, k2=0.01, p1=0.001, p2=-0.0005)

# (position error m, rotation error deg) per image; none sits on a threshold.
ERRORS = [(0.05, 0.5), (0.2, 1.5), (0.3, 1.0), (0.2, 3.0), (0.45, 4.5),
          (1.0, 2.0), (4.0, 9.0), (6.0, 3.0), (0.1, 12.0), (0.01, 0.05)]

# Which images fall inside each uncertainty source.
INSIDE = {
    ("sampling", 0.5): {0, 1, 2, 3, 5, 8, 9},       # 7 of 10
    ("sampling", 0.3): {0, 1, 2, 3, 4, 5, 8, 9},    # 8 of 10
    ("sampling", 0.1): {0, 1, 2, 3, 4, 5, 6, 8, 9},  # 9 of 10
    ("first-order", 1.0): {4, 9},                    # 2 of 10
}

POSE_THRESHOLDS = [(0.25, 2.0), (0.5, 5.0), (5.0, 10.0)]
REPROJ_THRESHOLDS = [10.0, 20.0, 50.0, 100.0]


def rot_exp(w):
    theta = np.linalg.norm(w)
    if theta < 1e-15:
        return np.eye(3)
    k = w / theta
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(theta) * kx + (1 - math.cos(theta)) * kx @ kx


def quat_from_rot(r):
    # Shepperd's method, returns (w, x, y, z) with w >= 0.
    t = np.trace(r)
    if t > 0:
        s = math.sqrt(t + 1.0) * 2
        q = [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s,
             (r[1, 0] - r[0, 1]) / s]
    elif r[0, 0] > r[1, 1] and r[0, 0] > r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2
        q = [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s,
             (r[0, 2] + r[2, 0]) / s]
    elif r[1, 1] > r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2
        q = [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s,
             (r[1, 2] + r[2, 1]) / s]
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2
        q = [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s,
             (r[1, 2] + r[2, 1]) / s, 0.25 * s]
    q = np.array(q)
    q /= np.linalg.norm(q)
    return q if q[0] >= 0 else -q


def rot_from_quat(q):
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)]])


def fmt(v):
    return repr(float(v))


def pose_line(name, r_c2w, center):
    # Files store world-to-camera: p_cam = R^T p - R^T c.
    q = quat_from_rot(r_c2w.T)
    t = -r_c2w.T @ center
    return " ".join([name] + [fmt(v) for v in (*q, *t)])


def read_poses(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0] == "poses-v1 convention=w2c"
    poses = {}
    for line in lines[1:]:
        tok = line.split()
        q = np.array([float(v) for v in tok[1:5]])
        t = np.array([float(v) for v in tok[5:8]])
        r_w2c = rot_from_quat(q)
        poses[tok[0]] = (r_w2c.T, -r_w2c.T @ t)  # camera-to-world, center
    return poses


def project(point, pose):
    r, c = pose
    pc = r.T @ (point - c)
    if pc[2] <= 1e-6:
        return None
    x, y = pc[0] / pc[2], pc[1] / pc[2]
    r2 = x * x + y * y
    radial = 1 + CAMERA["k1"] * r2 + CAMERA["k2"] * r2 * r2
    xd = x * radial + 2 * CAMERA["p1"] * x * y + CAMERA["p2"] * (r2 + 2 * x * x)
    yd = y * radial + CAMERA["p1"] * (r2 + 2 * y * y) + 2 * CAMERA["p2"] * x * y
    return np.array([CAMERA["fx"] * xd + CAMERA["cx"],
                     CAMERA["fy"] * yd + CAMERA["cy"]])


def pose_error(ref, est):
    pos = float(np.linalg.norm(ref[1] - est[1]))
    cos = (np.trace(ref[0].T @ est[0]) - 1) / 2
    rot = math.degrees(math.acos(min(1.0, max(-1.0, cos))))
    return pos, rot


def source_label(method, ratio):
    return f"sampling-{ratio:g}" if method == "sampling" else method


def main(out):
    out = Path(out)
    (out / "inliers").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(2024)
    names = [f"img{i:02d}" for i in range(len(ERRORS))]

    ref_lines, est_lines = [], []
    for name, (dpos, drot) in zip(names, ERRORS):
        r_ref = rot_exp(rng.normal(size=3) * 0.2)
        c_ref = rng.normal(size=3) * 2.0
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        r_est = r_ref @ rot_exp(axis * math.radians(drot))
        c_est = c_ref + dpos * direction
        ref_lines.append(pose_line(name, r_ref, c_ref))
        est_lines.append(pose_line(name, r_est, c_est))

        # Inlier points in front of the reference camera at 3-30 m, inside
        # the image.
        lines = [f"corr-v1 {name}"]
        while len(lines) < 41:
            z = rng.uniform(3.0, 30.0)
            u = rng.uniform(20, CAMERA["w"] - 20)
            v = rng.uniform(20, CAMERA["h"] - 20)
            pc = np.array([(u - CAMERA["cx"]) / CAMERA["fx"] * z,
                           (v - CAMERA["cy"]) / CAMERA["fy"] * z, z])
            p = r_ref @ pc + c_ref
            # Keep points that the estimate also sees in front.
            if (r_est.T @ (p - c_est))[2] <= 0.5:
                continue
            pix = project(p, (r_ref, c_ref))
            lines.append(" ".join(fmt(v) for v in (*pix, *p)))
        (out / "inliers" / f"{name}.txt").write_text("\n".join(lines) + "\n")

    (out / "reference.txt").write_text(
        "poses-v1 convention=w2c\n" + "\n".join(ref_lines) + "\n")
    (out / "estimate.txt").write_text(
        "poses-v1 convention=w2c\n" + "\n".join(est_lines) + "\n")
    c = CAMERA
    (out / "cameras.txt").write_text(
        f"camera-v1 * PINHOLE_RT {c['w']} {c['h']} " +
        " ".join(fmt(c[k]) for k in
                 ("fx", "fy", "cx", "cy", "k1", "k2", "p1", "p2")) + "\n")

    # Metrics from the files as written.
    ref = read_poses(out / "reference.txt")
    est = read_poses(out / "estimate.txt")
    errors = [pose_error(ref[n], est[n]) for n in names]

    unc_lines = ["uncertainty-v1"]
    uncertainties = {}
    for (method, ratio), inside in INSIDE.items():
        label = source_label(method, ratio)
        for i, name in enumerate(names):
            pos, rot = errors[i]
            scale = 1.5 if i in inside else 0.5
            upos, urot = pos * scale + 1e-3 * (i in inside), rot * scale
            uncertainties.setdefault(label, []).append((upos, urot))
            samples = 50 if method == "sampling" else 1000
            unc_lines.append(f"{name} {method} {fmt(ratio)} {fmt(upos)} "
                             f"{fmt(urot)} {samples}")
    (out / "uncertainty.txt").write_text("\n".join(unc_lines) + "\n")

    # Read the uncertainties back so the golden sees the parsed values.
    parsed = {}
    for line in (out / "uncertainty.txt").read_text().splitlines()[1:]:
        tok = line.split()
        label = source_label(tok[1], float(tok[2]))
        parsed.setdefault(label, {})[tok[0]] = (float(tok[3]), float(tok[4]))

    r_inf = []
    for name in names:
        worst = 0.0
        for line in (out / "inliers" / f"{name}.txt").read_text().splitlines()[1:]:
            p = np.array([float(v) for v in line.split()[2:5]])
            a, b = project(p, ref[name]), project(p, est[name])
            if a is None or b is None:
                worst = math.inf
                break
            worst = max(worst, float(np.linalg.norm(a - b)))
        r_inf.append(worst)

    n = len(names)
    pose_acc = [100.0 * sum(1 for p, r in errors if p < tp and r < tr) / n
                for tp, tr in POSE_THRESHOLDS]
    reproj_acc = [100.0 * sum(1 for v in r_inf if v < t) / n
                  for t in REPROJ_THRESHOLDS]
    order = ["sampling-0.5", "sampling-0.3", "sampling-0.1", "first-order"]
    per_image = []
    for label in order:
        inside = [errors[i][0] < parsed[label][name][0] and
                  errors[i][1] < parsed[label][name][1]
                  for i, name in enumerate(names)]
        per_image.append({"source": label,
                          "percentage": 100.0 * sum(inside) / n,
                          "headline": label.startswith("sampling-")})
    golden = {
        "pose_error_accuracy": pose_acc,
        "per_image_threshold_accuracy": per_image,
        "reprojection_accuracy": reproj_acc,
        "images": [{"name": name, "position_err_m": errors[i][0],
                    "rotation_err_deg": errors[i][1],
                    "max_reprojection_diff_px": r_inf[i]}
                   for i, name in enumerate(names)],
    }
    (out / "golden_report.json").write_text(json.dumps(golden, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
