"""Acceptance suite: the six exit criteria, one test per criterion.

Every check is exact (integer equality) except the two wall-clock
budgets, which are generous by design.  Each test prints a single
summary line; run with `pytest tests/test_acceptance.py -v -s` to see
them.
"""

import math
import re
import time
from itertools import product
from pathlib import Path

import numpy as np

from chowcert.certificate import format_certificate
from chowcert.field import PrimeModulus, SeededRng
from chowcert.geometry import (
    hessian_at,
    sample_point,
    scaling_fiber_directions,
    terracini_matrix,
)
from chowcert.matrix import FfMatrix, null_vector
from chowcert.pipeline import certify, rank_table, sweep, verify, verify_text
from chowcert.poly import (
    LinearForm,
    Poly,
    contract,
    expand_product,
    monomial_basis,
)
from chowcert.sff import (
    classify_component,
    contraction_value,
    special_normal_form,
    gh_build,
    gh_check,
    sff_component,
    tangent_monomial_indices,
)

DATA = Path(__file__).parent / "data"
REFERENCE = DATA / "reference_certificate_n5.txt"


def report(criterion: int, detail: str) -> None:
    print(f"\nACCEPTANCE {criterion}: PASS - {detail}")


def test_criterion_1_reference_certificate_replay():
    start = time.perf_counter()
    result = verify(REFERENCE)
    elapsed = time.perf_counter() - start
    assert result.ok, result.failures
    cert = result.certificate
    assert (cert.n, cert.r, cert.prime) == (5, 3, 20201)
    assert result.tangent_recomputed == 48
    assert cert.tangent_rank == 48 and cert.tangent_expected == 48
    assert result.hessian_recomputed == 15
    assert cert.hessian_rank == 15 and cert.hessian_expected == 15
    assert cert.verdict is True
    assert elapsed < 1.0, f"verification took {elapsed:.3f}s"
    report(1, f"reference certificate replays 48/48 and 15/15 in {elapsed * 1e3:.1f}ms")


def test_criterion_2_sweep_to_n30():
    basis = monomial_basis(102, 3)
    assert basis.dim == 187460  # the largest case is touched via indexing only
    exps = [0] * 103
    exps[100] = 3
    assert basis.exponents_of(basis.index_of(exps)) == tuple(exps)

    start = time.perf_counter()
    rows = sweep(2, 30, prime=20201, seed=20260811)
    elapsed = time.perf_counter() - start
    assert [row.n for row in rows] == list(range(2, 31))
    for row in rows:
        assert row.verdict, f"n={row.n} failed"
        assert row.tangent_rank == (3 * row.n + 1) * row.r, f"n={row.n}"
        assert row.hessian_rank == 3 * row.n, f"n={row.n}"
    assert elapsed < 600, f"sweep took {elapsed:.1f}s"
    report(2, f"29 cases all TRUE with full ranks in {elapsed:.1f}s")


def test_criterion_3_rank_table_to_n103():
    rows = rank_table(1, 103)
    for row in rows:
        assert row.r_gen == math.ceil(
            math.comb(row.n + 3, 3) / (3 * row.n + 1)
        ), f"n={row.n}"
    assert [row.n for row in rows if row.perfect] == [1, 3, 13]
    threshold = [row.n for row in rows if row.reduction_applies]
    assert threshold and threshold[0] == 103
    assert all(not row.reduction_applies for row in rows if row.n < 103)
    report(3, "r_gen exact for n=1..103, perfect cases {1,3,13}, threshold at 103")


def test_criterion_4_closed_form_tables():
    mod = PrimeModulus(20201)
    tuples_checked = 0
    for d, n_range in ((3, range(3, 7)), (4, range(4, 7))):
        for n in n_range:
            normal = special_normal_form(d, n, mod)
            basis = monomial_basis(n, d)
            for idx in tangent_monomial_indices(d, n):
                t = Poly.monomial(basis, basis.exponents_of(idx), mod)
                assert contract(t, normal).value == 0
            for k, l, i, j in product(
                range(d), range(d), range(n + 1), range(n + 1)
            ):
                computed = sff_component(d, n, k, i, l, j, mod)
                case = classify_component(d, n, k, i, l, j, mod)
                assert computed == case.predicted, (d, n, k, i, l, j, case.label)
                got = contract(computed, normal).value
                assert got == contraction_value(d, k, i, l, j), (d, n, k, i, l, j)
                tuples_checked += 1
    gh_cases = 0
    for d in range(3, 7):
        for n in range(d - 1, d + 5):
            rep = gh_check(gh_build(d, n, mod))
            assert rep.assembly_ok, (d, n, rep.mismatches)
            assert rep.g_annihilated and rep.h_annihilated, (d, n)
            assert rep.g_rank == rep.g_order == d * (d - 1), (d, n)
            assert rep.h_rank == rep.h_order == d * (n + 1 - d), (d, n)
            gh_cases += 1
    report(
        4,
        f"{tuples_checked} component tuples match the closed form; "
        f"{gh_cases} structured-block cases pass assembly/spectrum/rank",
    )


class TestCriterion5Properties:
    def test_field_axioms(self):
        rng = np.random.default_rng(1001)
        for p in (7, 8191, 20201, 202001):
            mod = PrimeModulus(p)
            raw = rng.integers(0, p, (10_000, 3))
            for a, b, c in raw:
                x, y, z = mod.element(int(a)), mod.element(int(b)), mod.element(int(c))
                assert (x + y).value == (a + b) % p
                assert ((x + y) + z).value == (x + (y + z)).value
                assert (x * y).value == (y * x).value
                assert ((x * y) * z).value == (x * (y * z)).value
                assert (x * (y + z)).value == (x * y + x * z).value
                if x.value:
                    assert (x * x.inv()).value == 1
        report(5, "field axioms hold on 10^4 triples per prime (part 1/5)")

    def test_rref_and_null_vectors(self):
        rng = np.random.default_rng(1002)
        mod = PrimeModulus(20201)
        for trial in range(100):
            rows = int(rng.integers(1, 101))
            cols = int(rng.integers(1, 151))
            data = rng.integers(0, mod.value, (rows, cols))
            if trial % 4 == 0 and rows >= 3:
                data[rows // 2] = (2 * data[0] + 3 * data[1]) % mod.value
            mat = FfMatrix(data, mod)
            res = mat.rref()
            again = res.echelon.rref()
            assert again.echelon == res.echelon
            assert again.pivot_cols == res.pivot_cols
            c = cols - res.rank
            if c:
                f0 = rng.integers(0, mod.value, c)
                normal = null_vector(res, f0)
                assert not (mat.data @ normal % mod.value).any()
        report(5, "rref idempotence and kernel annihilation on 100 matrices (2/5)")

    def test_fast_vs_naive_matrix_kernels(self):
        rng = np.random.default_rng(1003)
        mod = PrimeModulus(20201)
        for size in (8, 33, 64, 129, 256):
            a = FfMatrix(rng.integers(0, mod.value, (size, size)), mod)
            b = FfMatrix(rng.integers(0, mod.value, (size, size)), mod)
            assert a.matmul(b) == a.matmul(b, naive=True)
            naive = a.rref(naive=True)
            fast = a.rref()
            assert fast.rank == naive.rank
            assert fast.echelon == naive.echelon
        report(5, "fast and naive kernels agree exactly up to 256x256 (3/5)")

    def test_expand_product_properties(self):
        mod = PrimeModulus(20201)
        rng = SeededRng(1004)
        for _ in range(1000):
            n = 1 + rng.below(5)
            forms = [
                LinearForm(rng.vector(mod, n + 1), mod) for _ in range(4)
            ]
            if any(f.is_zero() for f in forms):
                continue
            a, b, f2, f3 = forms
            base = expand_product([a, f2, f3])
            assert expand_product([f2, a, f3]) == base
            assert expand_product([f3, f2, a]) == base
            apb = LinearForm((a.coords + b.coords) % mod.value, mod)
            assert expand_product([apb, f2, f3]) == base + expand_product(
                [b, f2, f3]
            )
        report(5, "expansion symmetry and multilinearity on 10^3 inputs (4/5)")

    def test_certified_hessian_structure(self):
        mod = PrimeModulus(20201)
        rng = SeededRng(1005)
        cases = 0
        while cases < 100:
            n = 2 + rng.below(4)
            dim = math.comb(n + 3, 3)
            r_max = (dim - 1) // (3 * n + 1)
            r = 1 + rng.below(r_max)
            points = [sample_point(n, mod, rng) for _ in range(r)]
            mat = terracini_matrix(points)
            res = mat.rref()
            if res.rank != (3 * n + 1) * r:
                continue
            f0 = rng.vector(mod, mat.cols - res.rank)
            normal = Poly(monomial_basis(n, 3), null_vector(res, f0), mod)
            h = hessian_at(points[0], normal).entries.data
            assert np.array_equal(h, h.T)
            w = n + 1
            for k in range(3):
                assert not h[k * w : (k + 1) * w, k * w : (k + 1) * w].any()
            for direction in scaling_fiber_directions(points[0]):
                assert not (h @ direction % mod.value).any()
            cases += 1
        report(5, "hessian symmetry/diagonal/kernel on 100 certified runs (5/5)")


def test_criterion_6_tamper_detection():
    cert = certify(5, 3, seed=987654321)
    text = format_certificate(cert)
    assert verify_text(text).ok

    lines = text.splitlines()
    eligible = []  # (line index, token span)
    for li, line in enumerate(lines):
        key = line.split("=")[0].strip()
        if key in ("seconds", "check"):
            continue
        for match in re.finditer(r"\d+", line):
            eligible.append((li, match.span()))
    assert len(eligible) > 75  # all recorded integers are in play

    rng = np.random.default_rng(1006)
    detected = 0
    for trial in range(50):
        li, (a, b) = eligible[int(rng.integers(0, len(eligible)))]
        original = lines[li][a:b]
        while True:
            replacement = str(int(rng.integers(0, 1_000_000)))
            if replacement != original:
                break
        corrupted = list(lines)
        corrupted[li] = lines[li][:a] + replacement + lines[li][b:]
        result = verify_text("\n".join(corrupted) + "\n")
        assert not result.ok, (
            f"trial {trial}: corrupting {lines[li][:12]!r} {original}->{replacement} "
            f"was not detected"
        )
        assert result.failures
        detected += 1
    report(6, f"{detected}/50 single-integer corruptions detected")
