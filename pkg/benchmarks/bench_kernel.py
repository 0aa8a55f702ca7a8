#!/usr/bin/env python3
"""Compare the pure-Python and compiled expansion kernels on enumeration
workloads. Run from the repository root:

    python3 benchmarks/bench_kernel.py
"""

import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

import igkit._expand_py as pure  # noqa: E402
from igkit import fixture_text, kernel  # noqa: E402
from igkit.engine import Budget, enumerate_language  # noqa: E402
from igkit.grammar import parse_grammar  # noqa: E402

try:
    import igkit._speedups as compiled
except ImportError:
    compiled = None

WORKLOADS = [
    ("twin grammar to length 19", "twin.ig", 19, Budget(max_steps=120, max_stack=4)),
    ("twin grammar to length 25", "twin.ig", 25, Budget(max_steps=160, max_stack=5)),
    ("ramp grammar to length 19", "ramp.ig", 19,
     Budget(max_steps=200, max_width=5, max_stack=6)),
    ("a^n b^n c^n to length 18", "anbncn.ig", 18, Budget(max_steps=160, max_stack=8)),
]


def run(impl, name, max_len, budget, repeats=3):
    g = parse_grammar(fixture_text(name))
    kernel.expand = impl.expand
    best = float("inf")
    words = forms = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = enumerate_language(g, max_len, budget)
        best = min(best, time.perf_counter() - t0)
        words, forms = len(res.words), res.forms_seen
    return best, words, forms


def main():
    if compiled is None:
        print("compiled kernel unavailable; build with `python3 setup.py build_ext --inplace`")
        return 1
    print(f"{'workload':<32}{'pure (s)':>10}{'compiled (s)':>14}{'speedup':>9}  forms")
    for label, name, max_len, budget in WORKLOADS:
        t_pure, w1, f1 = run(pure, name, max_len, budget)
        t_comp, w2, f2 = run(compiled, name, max_len, budget)
        assert (w1, f1) == (w2, f2), "kernels disagree"
        print(f"{label:<32}{t_pure:>10.3f}{t_comp:>14.3f}{t_pure / t_comp:>8.1f}x  {f1}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
