"""Profile t -> H(g + t h) - H(g) along library directions and print the cubic fits.

    python3 scripts/local_max_profile.py --spec 3 2 1 2 1 --directions scaling harmonic1 harmonic2
"""
import argparse
from dataclasses import dataclass

from cvlab.funlab import DEFAULT_T_GRID, FunctionalSpec, local_max_scan
from cvlab.geom import build_round_sphere, curvature_pack
from cvlab.symcomb import IndexTuple
from cvlab.vary import perturbation


@dataclass(frozen=True)
class ProfileConfig:
    spec: tuple[int, int, int, int, int] = (3, 2, 1, 2, 1)
    lam: float = 1.0
    resolution: int | None = None
    directions: tuple[str, ...] = ("scaling", "harmonic1", "harmonic2")
    t_grid: tuple[float, ...] = DEFAULT_T_GRID


def run(cfg: ProfileConfig):
    spec = FunctionalSpec(IndexTuple(*cfg.spec), cfg.lam)
    _, bg = build_round_sphere(spec.indices.n, cfg.lam, cfg.resolution)
    pack = curvature_pack(bg, keep_riemann=False)
    dirs = {d: perturbation(d, bg, pack) for d in cfg.directions}
    return local_max_scan(spec, bg, dirs, cfg.t_grid, equality={"scaling", "harmonic1"}, pack=pack)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", type=int, nargs=5, default=[3, 2, 1, 2, 1], metavar=("N", "K", "L", "P", "Q"))
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--grid", type=int)
    ap.add_argument("--directions", nargs="+", default=["scaling", "harmonic1", "harmonic2"])
    a = ap.parse_args()
    rep = run(ProfileConfig(tuple(a.spec), a.lam, a.grid, tuple(a.directions)))
    for rec in rep.checks:
        H = rec.extra["H"]
        cubic = ", ".join(f"{c / H:+.3e}" for c in rec.extra["cubic_fit"])
        print(f"{rec.name}: cubic fit / H (t^3..t^0) = [{cubic}]  {'ok' if rec.passed else 'FAIL'}")
        for t, dH in zip(rec.extra["profile"]["t"], rec.extra["profile"]["delta_H"]):
            print(f"    t = {t:+.4f}  dH/H = {dH / H:+.3e}")


if __name__ == "__main__":
    main()
