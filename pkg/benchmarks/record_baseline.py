"""Time a single-threaded count to 1e8 and store it as the regression baseline.

Run from the repository root:  python benchmarks/record_baseline.py
"""

import json
import platform
import time
from pathlib import Path

from carmichael_image.engine import PrimeSource, available_cpus, count_up_to

X = 10**8


def main() -> None:
    source = PrimeSource.up_to(X + 1)
    count_up_to(10**6, source=source)  # compile and warm caches
    seconds = float("inf")
    for _ in range(2):
        t0 = time.perf_counter()
        v = count_up_to(X, workers=1, source=source).last.v_lambda
        seconds = min(seconds, time.perf_counter() - t0)
    out = {"x": X, "v_lambda": v, "seconds_1_thread": round(seconds, 2),
           "cpus": available_cpus(), "machine": platform.machine(), "python": platform.python_version()}
    path = Path(__file__).with_name("baseline.json")
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out))


if __name__ == "__main__":
    main()
