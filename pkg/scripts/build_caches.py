#!/usr/bin/env python3
"""Pre-build the basis and reference-solution caches used by the presets.

Usage:
    python3 scripts/build_caches.py [--full]

Populates $SB_CACHE_DIR (default ~/.cache/stressbasis) so subsequent preset
runs skip the eigensolves. The 48x48 rectangle presets share one cached basis;
the annulus presets each get their own. With --full the example1 full-scale
basis (1024 elements, 500 modes) is built as well.
"""
import argparse
import sys
import time

from stressbasis.experiments import (PRESET_NAMES, _build_domain, _build_mesh,
                                     cache_dir, get_basis, get_preset)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()

    seen = set()
    for name in PRESET_NAMES:
        cfg = get_preset(name)
        if args.full and cfg.full:
            cfg = cfg.at_full_scale()
        mesh = _build_mesh(_build_domain(cfg.domain), cfg.mesh)
        key = (mesh.mesh_hash(), str(sorted(cfg.basis.items())))
        if key in seen:
            continue
        seen.add(key)
        t0 = time.perf_counter()
        basis = get_basis(mesh, cfg.basis, use_cache=True)
        print(f"{name}: {len(basis)} modes ready "
              f"({time.perf_counter() - t0:.1f}s)")
    print(f"cache directory: {cache_dir()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
