"""Smoke test for the `charsum` extension module.

Build and run from the repository root:

    cargo build --release -p charsum-py --features extension-module
    cp target/release/libcharsum_py.so python/charsum.so
    python3 python/smoke_test.py
"""

import cmath
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import charsum


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    chi = charsum.DirichletCharacter(1009, 4)
    assert (chi.p, chi.order, chi.index) == (1009, 4, 1)
    assert chi(0) == 0 and chi(1) == 1
    close(abs(chi.gauss_sum()), math.sqrt(1009), 1e-9)
    k = 17
    close(chi.eval_f(k / 1009), chi(k).conjugate() * chi.gauss_sum(), 1e-9)

    mid = charsum.midpoint_spectrum(chi)
    arc = charsum.arc_max_spectrum(chi, grid=8)
    assert len(mid) == len(arc) == 1009
    assert all(a >= m - 1e-12 for a, m in zip(arc, mid))
    close(sum(v * v for v in mid) / 1009, 1008 / 1009, 1e-9)

    g = charsum.midpoint_g(chi)
    close(abs(g[3] - charsum.g_aux(chi, 3, 0.5)[0]), 0.0, 1e-9)
    phi, counts = charsum.tail(mid, [0.0, 1.0, 2.0])
    assert phi[0] == 1.0 and counts[0] == 1009 and phi[1] >= phi[2]

    c2 = charsum.constants(2)
    close(c2["hat_c_d"], 0.1029, 5e-4)
    assert c2["c_tilde_odd"] is None and not c2["exploratory"]
    assert charsum.constants(3)["exploratory"]
    close(charsum.limit_constant()["value"], -0.1722, 5e-4)
    close(charsum.alpha(2, 0.0), 0.0, 1e-15)

    lo = charsum.predict_tail(2.0, 2, "lower")
    hi = charsum.predict_tail(2.0, 2, "upper")
    assert 0 < lo <= hi <= 1
    constant, rate = charsum.envelope(2)
    close(rate, math.pi / 2, 1e-15)
    assert charsum.saddle_s(3.0, 2) > charsum.saddle_s(2.0, 2)

    est = charsum.empirical_laplace(1009, 2, 1.0, 20000, seed=3)
    exact = math.exp(charsum.exact_log_laplace(1009, 2, 1.0))
    assert abs(est["value"] - exact) <= 4 * est["std_error"], (est, exact)
    assert est == charsum.empirical_laplace(1009, 2, 1.0, 20000, seed=3)
    theo = charsum.theoretical_laplace(1009, 2, 0.0)
    assert theo["value"] == 1.0
    m = charsum.exact_moments(1009, 2, 4)
    assert m[0] == 1.0 and abs(m[1]) < 1e-15

    samples = charsum.random_model_samples(101, 3, 5, seed=1)
    assert len(samples) == 5 and all(isinstance(z, complex) for z in samples)
    a0, a1 = charsum.arithmetic_laplace(charsum.DirichletCharacter.legendre(1009), [0.0, 0.01])
    assert a0 <= 1.0 and a1 > 0

    for bad in (lambda: charsum.DirichletCharacter(1009, 5),
                lambda: charsum.DirichletCharacter(100, 2),
                lambda: charsum.predict_tail(1.0, 3, "lower")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")
    try:
        charsum.empirical_laplace(101, 2, 1000.0, 10)
    except OverflowError:
        pass
    else:
        raise AssertionError("expected OverflowError")

    print(f"charsum {charsum.__version__}: python smoke test passed")


if __name__ == "__main__":
    main()
