"""Time the numba and numpy kernel backends on figure-sized inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed (numba compiles on first use, or loads
from its cache), then the best of ``--repeat`` runs is reported.
"""
import argparse
import time

import numpy as np

from jcpurity import coherent_state, initial_joint, EXCITED
from jcpurity.kernels import BACKENDS


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    field = coherent_state(49.0)
    state = initial_joint(EXCITED, field)
    x = np.ascontiguousarray(state.rot_plus)
    y = np.ascontiguousarray(np.append(state.rot_minus[1:], 0.0))
    gts = np.linspace(0.0, 50.0, 5000)
    return {
        "log_hermite (n=2000)": ("log_hermite", (2000, 3.7)),
        "rotate_observables (5000 x 118)": ("rotate_observables", (x, y, complex(state.rot_minus[0]), gts)),
        "series_sums (5000 x 117)": ("series_sums", (np.ascontiguousarray(field.probs), gts)),
        "design_log_weights (n=5000)": ("design_log_weights", (0.524, 0.0, 5000, 1e-3)),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    names = sorted(BACKENDS)
    print(f"{'kernel':34s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, (kernel, kargs) in cases().items():
        row = {n: best_of(BACKENDS[n][kernel], kargs, args.repeat) for n in names}
        line = f"{label:34s}" + "".join(f"{row[n] * 1e3:10.3f}ms" for n in names)
        if "numba" in row:
            line += f"{row['numpy'] / row['numba']:11.1f}x"
        print(line)
    if "numba" not in BACKENDS:
        print("numba is not installed; only the numpy backend was timed")


if __name__ == "__main__":
    main()
