"""
Success rate against n
======================

Run the comb pipeline over a seed sweep and print the success rate per n.
The CSV is byte-identical across reruns and thread counts.
"""

import sys

from combforge.experiment import ExperimentConfig, run, success_rates

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 5
cfg = ExperimentConfig("comb_sqrt", (400, 900, 1600), seeds=seeds, profile="desk", threads=2)
text = run(cfg)
for (n, k), rate in success_rates(text).items():
    print(f"n={n:5d}  teeth={k:3d}  success={rate:.2f}")

# the proof's own constants are far too small at this scale
low = run(ExperimentConfig("comb_sqrt", (400, 900), seeds=seeds, profile="asymptotic"))
for (n, k), rate in success_rates(low).items():
    print(f"asymptotic profile n={n:5d}  success={rate:.2f}")
