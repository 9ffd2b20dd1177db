"""
Run `rv spr-tree` over a batch of seeded random trees.

Each tree has n <= 200 vertices and 2 <= k <= 40 random terminals; every run
must exit 0 (distortion within the bound, partition valid).

Usage:
    python scripts/batch_spr_trees.py --count 100 --seed 0 --out results/batch
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from cli.rv_cli import main as rv_main
from relaxed_voronoi.logger import get_logger
from relaxed_voronoi.magnitudes import derive_seed, make_rng

logger = get_logger(__name__)


def batch_arguments(count: int, seed: int, out_dir: Optional[Path] = None) -> list[list[str]]:
    """Command lines for ``count`` trees derived from ``seed``."""
    rng = make_rng(derive_seed(seed, "batch"))
    sizes = rng.integers(2, 201, size=count)
    runs = []
    for i, n in enumerate(sizes.tolist()):
        k = int(rng.integers(2, min(40, n) + 1))
        args = [
            "spr-tree",
            "--gen", f"tree:{n}",
            "--terminals", f"random:{k}",
            "--seed", str(derive_seed(seed, "tree", i)),
            "--quiet",
        ]
        if out_dir is not None:
            args += ["--json", str(out_dir / f"tree_{i:04d}.json")]
        runs.append(args)
    return runs


def run_batch(count: int, seed: int, out_dir: Optional[Path] = None) -> list[int]:
    """Run the batch and return one exit code per tree."""
    codes = []
    for args in batch_arguments(count, seed, out_dir):
        code = rv_main(args)
        if code != 0:
            logger.error(f"exit {code}: rv {' '.join(args)}")
        codes.append(code)
    return codes


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = argparse.ArgumentParser(description="Batch tree Steiner point removal")
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, help="directory for per-tree JSON reports")
    args = parser.parse_args(argv)

    codes = np.asarray(run_batch(args.count, args.seed, args.out))
    failures = int(np.count_nonzero(codes))
    logger.info(f"{args.count} trees, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
