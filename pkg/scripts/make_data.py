#!/usr/bin/env python3
"""Regenerate the JSON inputs under data/ from the built-in constructions."""
import argparse
import pathlib

from symgf import LieStructure, PolyMap, PolyPoisson, cotangent_lift, symplectic_monoid
from symgf.serialize import dump, genfun_to_dict, poisson_to_dict, structure_to_dict


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    default_dir = pathlib.Path(__file__).resolve().parent.parent / "data"
    ap.add_argument("--dir", type=pathlib.Path, default=default_dir)
    args = ap.parse_args()
    args.dir.mkdir(parents=True, exist_ok=True)

    so3 = LieStructure.so3()
    heis = LieStructure.heisenberg()
    files = {
        "so3.json": structure_to_dict(so3),
        "heisenberg.json": structure_to_dict(heis),
        "alpha_so3_linear.json": poisson_to_dict(PolyPoisson.linear_from_structure(so3)),
        "alpha_quadratic_d2.json": poisson_to_dict(PolyPoisson(2, {
            (0, 1): {(0, 0): 0.4, (1, 0): 0.3, (2, 0): 0.25},
        })),
        "monoid_symplectic_d2.json": genfun_to_dict(symplectic_monoid(2)),
        "lift_shear_d2.json": genfun_to_dict(
            cotangent_lift(PolyMap.linear([[1.0, 1.0], [0.0, 1.0]]))),
    }
    for name, doc in files.items():
        path = args.dir / name
        dump(doc, path)
        print("wrote", path)


if __name__ == "__main__":
    main()
