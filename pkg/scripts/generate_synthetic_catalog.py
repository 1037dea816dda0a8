#!/usr/bin/env python3
"""Write a deterministic synthetic catalog JSON for scale testing."""

import argparse
import sys
from pathlib import Path

from nl2promql.catalog import catalog_stats, dump_catalog
from nl2promql.synth import generate_catalog


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--total", type=int, default=2000, help="number of metrics")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--gpu-total", type=int, default=60,
                        help="metrics in the gpu_ai category")
    parser.add_argument("--gpu-high", type=int, default=30,
                        help="High-priority metrics in gpu_ai")
    parser.add_argument("--high-per-category", type=int, default=20,
                        help="High-priority metrics in every other category")
    parser.add_argument("--out", type=Path, default=Path("synthetic_catalog.json"))
    args = parser.parse_args(argv)

    catalog = generate_catalog(
        total=args.total,
        seed=args.seed,
        gpu_total=args.gpu_total,
        gpu_high=args.gpu_high,
        high_per_category=args.high_per_category,
    )
    args.out.write_text(dump_catalog(catalog) + "\n", encoding="utf-8")
    stats = catalog_stats(catalog)
    print(f"wrote {args.out} ({stats.total_metrics} metrics, "
          f"{stats.per_priority.get('High', 0)} High priority)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
