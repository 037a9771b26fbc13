"""Compare the compiled Cython kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times each kernel on representative inputs and one end-to-end signature
computation, with both backends swapped in through ``geomod._kernels``.
"""
import argparse
import contextlib
import timeit

import numpy as np

from geomod import _kernels
from geomod.chen import Path, panel_rule, path_signature
from geomod.formbank import builtin_letters

KERNELS = ("qseries", "chen_product", "panel_signature")


@contextlib.contextmanager
def backend(impl):
    saved = {name: getattr(_kernels, name) for name in KERNELS}
    try:
        for name in KERNELS:
            setattr(_kernels, name, getattr(impl, name))
        yield
    finally:
        for name, fn in saved.items():
            setattr(_kernels, name, fn)


def cases(rng):
    def cplx(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    rule = panel_rule()
    dim, order = 3, 3
    n = _kernels.level_offsets(dim, order)[-1]
    a, b = cplx(n), cplx(n)
    F = cplx(dim, rule.x.shape[0])
    coeffs = cplx(512)
    q = 0.5 * np.exp(2j * np.pi * rng.uniform(size=16))
    letters = builtin_letters("gamma0_11")
    path = Path((0.1 + 0.3j, -0.4 + 0.12j, 0.3 + 0.5j, -0.2 + 0.9j))
    return {
        "qseries (512 coeffs, 16 pts)": lambda: _kernels.qseries(coeffs, q),
        "chen_product (dim 3, order 3)": lambda: _kernels.chen_product(a, b, dim, order),
        "panel_signature (dim 3, order 3)": lambda: _kernels.panel_signature(F, rule.Q, rule.w, order),
        "path_signature (3 segments, end to end)": lambda: path_signature(path, letters, 3, 1e-12),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels.compiled is None:
        print("compiled core not built; only the numpy fallback is available")
    impls = [("numpy", _kernels.fallback)] + ([("cython", _kernels.compiled)] if _kernels.compiled else [])
    rng = np.random.default_rng(0)
    print(f"{'kernel':<42}" + "".join(f"{name:>14}" for name, _ in impls) + ("    speedup" if len(impls) == 2 else ""))
    for label, fn in cases(rng).items():
        times = []
        for _, impl in impls:
            with backend(impl):
                number = max(1, int(0.2 / max(timeit.timeit(fn, number=1), 1e-7)))
                best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:<42}" + "".join(f"{t * 1e6:>11.1f} us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>10.1f}x"
        print(row)


if __name__ == "__main__":
    main()
