"""Scalar-curvature error of the round sphere versus grid resolution.

    python3 scripts/convergence_study.py --n 3 --resolutions 12 16 24 32
"""
import argparse
from dataclasses import dataclass

import numpy as np

from cvlab.geom import build_round_sphere, curvature_pack


@dataclass(frozen=True)
class StudyConfig:
    n: int = 3
    lam: float = 1.0
    resolutions: tuple[int, ...] = (12, 16, 24, 32)
    order: int = 12


def run(cfg: StudyConfig) -> list[tuple[int, float]]:
    exact = cfg.n * (cfg.n - 1) * cfg.lam
    rows = []
    for res in cfg.resolutions:
        _, g = build_round_sphere(cfg.n, cfg.lam, res, cfg.order)
        err = float(np.max(np.abs(curvature_pack(g, keep_riemann=False).scalar - exact)))
        rows.append((res, err))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--resolutions", type=int, nargs="+", default=[12, 16, 24, 32])
    ap.add_argument("--order", type=int, default=12)
    a = ap.parse_args()
    rows = run(StudyConfig(a.n, a.lam, tuple(a.resolutions), a.order))
    print(f"{'N':>4}  {'max |R - R0|':>14}  order")
    prev = None
    for res, err in rows:
        order = "" if prev is None else f"{np.log(prev[1] / err) / np.log(res / prev[0]):.2f}"
        print(f"{res:>4}  {err:14.3e}  {order}")
        prev = (res, err)


if __name__ == "__main__":
    main()
