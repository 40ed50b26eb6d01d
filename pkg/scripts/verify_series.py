"""Exact verification of the perfect-form series for a range of dimensions.

Usage: python3 scripts/verify_series.py [N ...]   (default 6 7 8 9)
"""

from __future__ import annotations

import sys
import time

from covmax import series


def main(argv: list[str]) -> int:
    dims = [int(a) for a in argv] or [6, 7, 8, 9]
    bad = 0
    print(f"{'n':>3} {'mu_P':>8} {'V_n':>10} {'verdict':<24} {'secs':>7}")
    for n in dims:
        t0 = time.perf_counter()
        inst = series.build(n)
        rep = series.verify(inst)
        dt = time.perf_counter() - t0
        status = rep.verdict if not rep.failures else "FAILED: " + "; ".join(rep.failures)
        bad += bool(rep.failures)
        print(f"{n:>3} {str(inst.mu_P):>8} {str(inst.V):>10} {status:<24} {dt:>7.1f}", flush=True)
    return 2 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
