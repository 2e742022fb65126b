#!/usr/bin/env python3
"""Smoke test for the cohen_ramanujan_py extension module.

Builds the cdylib with cargo, stages it under an importable name, and
checks a handful of known values end to end.

Usage: python3 python/smoke_test.py
"""

import fractions
import pathlib
import shutil
import subprocess
import sys
import tempfile

REPO = pathlib.Path(__file__).resolve().parent.parent


def build_and_import():
    subprocess.run(
        ["cargo", "build", "-p", "cohen-ramanujan-py"],
        cwd=REPO,
        check=True,
    )
    built = REPO / "target" / "debug" / "libcohen_ramanujan_py.so"
    if not built.exists():  # macOS
        built = REPO / "target" / "debug" / "libcohen_ramanujan_py.dylib"
    stage = pathlib.Path(tempfile.mkdtemp(prefix="cr-py-"))
    shutil.copy2(built, stage / "cohen_ramanujan_py.so")
    sys.path.insert(0, str(stage))
    import cohen_ramanujan_py

    return cohen_ramanujan_py


def frac(pair):
    return fractions.Fraction(pair[0], pair[1])


def main():
    cr = build_and_import()
    checks = 0

    def check(cond, label):
        nonlocal checks
        assert cond, label
        checks += 1
        print(f"ok {label}")

    # multiplicative toolbox
    check(cr.factor(360) == [(2, 3), (3, 2), (5, 1)], "factor(360)")
    check(cr.mobius(30) == -1 and cr.mobius(12) == 0, "mobius")
    check(cr.divisors(12) == [1, 2, 3, 4, 6, 12], "divisors(12)")
    check(cr.gcd_s(8, 24, 3) == 8, "gcd_3(8, 24)")
    check(cr.tau_s(4, 2) == 2, "tau_2(4)")
    check(cr.sigma_k(6, 1) == 12, "sigma_1(6)")
    check(cr.jordan_totient(12, 1) == 4, "J_1(12) = phi(12)")
    z2, err = cr.zeta(2)
    check(abs(z2 - 1.6449340668482264) < 1e-12 and err < 1e-11, "zeta(2)")

    # Cohen-Ramanujan sums
    check(cr.cr_sum(2, 2, 4) == 3, "c_2^2(4)")
    check(cr.cr_sum(12, 1, 0) == 4, "c_12(0) = phi(12)")
    check(
        cr.cr_sum_batch(36, 2, 6)
        == [cr.cr_sum(r, 2, 36) for r in range(1, 7)],
        "batch vs pointwise",
    )
    real, imag = cr.cr_sum_oracle(6, 2, 36)
    check(abs(real - cr.cr_sum(6, 2, 36)) < 1e-6 and abs(imag) < 1e-6, "oracle")
    check(cr.cr_identity_check(40, 100, 2), "summatory identity")
    check(cr.cr_bound(4, 2) == 5, "sigma_{1,2}(4) bound")

    # expansions
    r = cr.eval_expansion("tau", 4, s=2)
    check(abs(r["value"] - 2.0) < 0.05, "tau_2 expansion at 4")
    check(abs(r["value"] - cr.tau_s(4, 2)) <= r["tail_bound"], "tau tail bound")

    r = cr.eval_expansion("sigma", 6, k=1, s=2, terms=2000)
    target = cr.sigma_k(6, 2) / 36
    check(abs(r["value"] - target) <= r["tail_bound"], "sigma_12 expansion at 6")

    r = cr.eval_expansion("omega", 12, p_max=97)
    check(abs(r["value"] - 2.0) < 0.1, "omega expansion at 12")
    check(frac(cr.coefficient("omega", 9)) == 0, "ghat_omega(9) = 0")
    check(
        frac(cr.coefficient("omega", 5)) == fractions.Fraction(1, 25),
        "ghat_omega(5) = 1/25",
    )

    # duality round trip on a custom family
    table = {1: (1, 2), 2: (-3, 1), 4: (5, 7)}
    gamma = {a: cr.gamma_from_ghat("custom", a, table=table, s=2)[0] for a in range(1, 17)}
    recovered = cr.ghat_from_gamma(lambda a: gamma[a], 2, 16, s=2)
    check(frac(recovered) == fractions.Fraction(-3, 1), "duality round trip")
    rep = cr.verify_equivalence("custom", a_max=8, table=table, s=2)
    check(rep["exact_everywhere"], "equivalence exact for finite support")

    results = cr.run_selftest(quick=True)
    check(all(passed for _, passed, _ in results), "selftest")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
