"""
Instance files, traces and the command line
===========================================

Instances are JSON files with one channel row per line.  Solver traces are CSV
files with 17 significant digits.  The ``augustin`` command wraps solve, gen,
bench and check.
"""

# %%
import os
import tempfile

from augustin import gen_instance, parse_instance, write_instance
from augustin.cli import main

tmp = tempfile.mkdtemp()
path = os.path.join(tmp, "inst.json")
write_instance(gen_instance(64, 4, seed=3), path, {"note": "demo"})
print(open(path).read()[:300])
print(parse_instance(path) == gen_instance(64, 4, seed=3))

# %%
# equivalent to: augustin solve --instance inst.json --alpha 2 --trace trace.csv
trace = os.path.join(tmp, "trace.csv")
code = main(["solve", "--instance", path, "--alpha", "2", "--trace", trace])
print("exit code", code)
print("".join(open(trace).readlines()[:3]))

# %%
# equivalent to: augustin bench --alpha 3 --m 1024 --n 16 --out bench/
out = os.path.join(tmp, "bench")
main(["bench", "--alpha", "3", "--m", "1024", "--n", "16", "--out", out])
print(open(os.path.join(out, "summary.csv")).read())
