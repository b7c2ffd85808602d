"""Time the compiled and fallback kernels on the default double well.

    python3 benchmarks/bench_kernels.py [--energies 20000] [--step 1e-4] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from dwpoles import kernels
from dwpoles.potential import DEFAULT_PARAMS, build_double_well


def cases(args):
    spec = build_double_well(DEFAULT_PARAMS)
    w, v = list(spec.widths), list(spec.heights)
    re = np.linspace(1.0, 4.0, int(np.sqrt(args.energies)))
    im = np.linspace(-1.0, 0.0, int(np.sqrt(args.energies)))
    grid = (re[None, :] + 1j * im[:, None]).ravel()

    def transfer(mod):
        return lambda: mod.transfer(w, v, grid)

    def transfer_deriv(mod):
        return lambda: mod.transfer(w, v, grid, derivative=True)

    def scalar_calls(mod):
        # refine/winding evaluate one energy at a time
        pts = grid[:500]
        return lambda: [mod.transfer(w, v, np.array([z])) for z in pts]

    def numerov(mod):
        return lambda: mod.numerov(w, v, 2.5, args.step)

    return [
        (f"transfer, {grid.size} energies", transfer),
        (f"transfer+dE, {grid.size} energies", transfer_deriv),
        ("transfer, 500 scalar calls", scalar_calls),
        (f"numerov, h={args.step:g}", numerov),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--energies", type=int, default=20000)
    ap.add_argument("--step", type=float, default=1e-4)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; timing the fallback only")
    header = f"{'kernel':34s}" + "".join(f"{b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for name, make in cases(args):
        times = []
        for b in backends:
            fn = make(kernels.load(name.split(",")[0].split("+")[0], b))
            fn()
            times.append(min(timeit.repeat(fn, number=1, repeat=args.repeat)))
        line = f"{name:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
