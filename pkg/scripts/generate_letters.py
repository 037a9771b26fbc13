"""Regenerate ``src/geomod/data/letters.json``.

Exact integer/rational arithmetic throughout:

* ``f``  : eta(z)^2 eta(11 z)^2 expanded as a truncated product.
* ``E``  : (E2(z) - 11 E2(11 z)) / (-10), constant term 1.
* ``w0`` : dlambda/lambda = 2 pi i (theta_4^4 / 2) dz, series in q^(1/2).
* ``w1`` : dlambda/(lambda - 1) = 2 pi i (-theta_2^4 / 2) dz, series in q^(1/2).

Usage: python scripts/generate_letters.py [N]
"""
import json
import sys
from fractions import Fraction
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "geomod" / "data" / "letters.json"


def sigma(n):
    return sum(d for d in range(1, n + 1) if n % d == 0)


def series_mul(a, b, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def eta_product_11(n):
    # q * prod (1 - q^k)^2 (1 - q^{11k})^2, truncated to n coefficients
    p = [1] + [0] * (n - 1)
    for k in range(1, n):
        for step, power in ((k, 2), (11 * k, 2)):
            if step >= n:
                continue
            for _ in range(power):
                for i in range(n - 1, step - 1, -1):
                    p[i] -= p[i - step]
    return [0] + p[: n - 1]


def eisenstein_11(n):
    c = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for k in range(1, n):
        v = Fraction(24 * sigma(k), 10)
        if k % 11 == 0:
            v -= Fraction(11 * 24 * sigma(k // 11), 10)
        c[k] = v
    return c


def r4(k):
    return 8 * sigma(k) - (32 * sigma(k // 4) if k % 4 == 0 else 0)


def record(label, kind, group, step, coeffs):
    return {
        "label": label,
        "kind": kind,
        "group": group,
        "step": str(step),
        "coefficients": [[float(Fraction(c)), 0.0] for c in coeffs],
    }


def main(n=512):
    f = eta_product_11(n)
    w0 = [Fraction((-1) ** k * (r4(k) if k else 1), 2) for k in range(n)]
    w1 = [Fraction(-16 * sigma(k), 2) if k % 2 else Fraction(0) for k in range(n)]
    letters = [
        record("f", "holomorphic-cusp", "gamma0_11", 1, f),
        record("fbar", "antiholomorphic-cusp", "gamma0_11", 1, f),
        record("E", "eisenstein", "gamma0_11", 1, eisenstein_11(n)),
        record("w0", "eisenstein", "gamma2", Fraction(1, 2), w0),
        record("w1", "eisenstein", "gamma2", Fraction(1, 2), w1),
    ]
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"n_trunc": n, "letters": letters}) + "\n")
    print(f"wrote {len(letters)} letters with {n} coefficients to {OUT}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 512)
