"""Sweep the comparison experiment over a family g = c^2 g0 (or bg + t h).

    python3 scripts/comparison_sweep.py --scales 0.8 0.9 1.0 1.1 --spec 3 2 1 2 1
"""
import argparse
from dataclasses import dataclass

from cvlab.funlab import FunctionalSpec, comparison_experiment
from cvlab.geom import build_round_sphere, curvature_pack
from cvlab.symcomb import IndexTuple
from cvlab.vary import perturbation


@dataclass(frozen=True)
class SweepConfig:
    spec: tuple[int, int, int, int, int] = (3, 2, 1, 2, 1)
    lam: float = 1.0
    resolution: int | None = None
    direction: str = "scaling"
    scales: tuple[float, ...] = (0.9, 0.95, 1.0, 1.05)


def run(cfg: SweepConfig):
    spec = FunctionalSpec(IndexTuple(*cfg.spec), cfg.lam)
    _, bg = build_round_sphere(spec.indices.n, cfg.lam, cfg.resolution)
    pack = curvature_pack(bg, keep_riemann=False)
    h = perturbation(cfg.direction, bg, pack)
    rows = []
    for c in cfg.scales:
        # the scaling direction reaches c^2 bg at t = c^2 - 1
        t = c * c - 1.0 if cfg.direction == "scaling" else c
        rows.append((c, t, comparison_experiment(spec, bg, h, t, pack, label=cfg.direction).checks[0]))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", type=int, nargs=5, default=[3, 2, 1, 2, 1], metavar=("N", "K", "L", "P", "Q"))
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--direction", default="scaling",
                    help="for directions other than scaling the sweep values are t, not c")
    ap.add_argument("--scales", type=float, nargs="+", default=[0.9, 0.95, 1.0, 1.05])
    a = ap.parse_args()
    rows = run(SweepConfig(tuple(a.spec), a.lam, a.grid, a.direction, tuple(a.scales)))
    print(f"{'value':>7} {'t':>8} {'hyp':>5} {'concl':>6} {'integral':>12} {'background':>12}")
    for c, t, rec in rows:
        e = rec.extra
        print(f"{c:7.3f} {t:8.4f} {str(e['hypothesis_holds']):>5} {str(e['conclusion_holds']):>6} "
              f"{e['conclusion_integral']:12.6f} {e['background_integral']:12.6f}")


if __name__ == "__main__":
    main()
