"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_orthogonal, random_symmetric_system  # noqa: E402

from convalg import abelian, cli, cnn, graph, lattice, multishift, recovery  # noqa: E402
from convalg.abelian import FiniteAbelianGroup, GroupSignal  # noqa: E402

RESULTS: list[str] = []


def record(number: int, title: str, passed: bool, detail: str):
    line = f"{'PASS' if passed else 'FAIL'} [{number}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def complex_signal(rng, g):
    return GroupSignal(g, rng.normal(size=g.size) + 1j * rng.normal(size=g.size))


def test_1_dft_gsp_equivalence():
    worst = 0.0
    with Timer() as t:
        for n in range(2, 17):
            sys_ = graph.build_shift(graph.Graph.cycle(n), "adjacency")
            g = FiniteAbelianGroup((n,))
            rng = np.random.default_rng(n)
            for x in (np.eye(n)[0], rng.normal(size=n), rng.normal(size=n) + 1j * rng.normal(size=n)):
                lhs = abelian.fourier(GroupSignal(g, x)).values
                worst = max(worst, float(np.abs(lhs - np.sqrt(n) * graph.gft(sys_, x)).max()))
    ok = worst <= 1e-9 and t.seconds < 1.0
    record(1, "DFT/GSP equivalence", ok, f"max deviation {worst:.3e} (tol 1e-9), {t.seconds:.3f}s (limit 1s)")


def test_2_convolution_theorem():
    groups = [FiniteAbelianGroup((8,)), FiniteAbelianGroup((2, 3)), FiniteAbelianGroup((4, 5))]
    rng = np.random.default_rng(2)
    thm = laws = 0.0
    with Timer() as t:
        for g in groups:
            for _ in range(200):
                f, h, k = (complex_signal(rng, g) for _ in range(3))
                fh = abelian.convolve(f, h)
                rhs = abelian.fourier(f).values * abelian.fourier(h).values
                thm = max(thm, float(np.abs(abelian.fourier(fh).values - rhs).max()) / max(1.0, np.abs(rhs).max()))
                comm = np.abs(fh.values - abelian.convolve(h, f).values).max()
                assoc = np.abs(
                    abelian.convolve(fh, k).values - abelian.convolve(f, abelian.convolve(h, k)).values
                ).max()
                scale = max(1.0, np.abs(abelian.convolve(fh, k).values).max())
                sub = max(0.0, abelian.l1_norm(fh) - abelian.l1_norm(f) * abelian.l1_norm(h))
                laws = max(laws, comm / scale, assoc / scale, sub)
    ok = thm <= 1e-9 and laws <= 1e-9 and t.seconds < 5.0
    record(
        2,
        "Convolution theorem",
        ok,
        f"theorem {thm:.3e}, algebra laws {laws:.3e} (tol 1e-9) over 600 pairs, {t.seconds:.3f}s (limit 5s)",
    )


def test_3_plancherel():
    groups = [FiniteAbelianGroup(o) for o in ((8,), (2, 3), (4, 5), (3, 3, 2), (16,))]
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(100):
        _, _, gap = abelian.plancherel(complex_signal(rng, groups[i % len(groups)]))
        worst = max(worst, gap)
    record(3, "Plancherel", worst <= 1e-9, f"max relative gap {worst:.3e} over 100 signals (tol 1e-9)")


def test_4_polynomial_filter_theorem():
    rng = np.random.default_rng(4)
    fit = comm_ok = 0.0
    distinct = rejected = 0
    with Timer() as t:
        for _ in range(50):
            n = int(rng.integers(2, 13))
            s = random_symmetric_system(rng, n)
            distinct += graph.has_distinct_spectrum(s)
            x = rng.normal(size=n)
            p = graph.fit_polynomial(s, x)
            fit = max(fit, float(np.abs(graph.poly_eval_matrix(s.S, p) - graph.filter_matrix(s, x)).max()))
            q = graph.PolynomialFilter(rng.normal(size=int(rng.integers(1, n + 1))))
            res = graph.is_shift_invariant(s, graph.poly_eval_matrix(s.S, q))
            comm_ok = max(comm_ok, res.commutator_norm if res.invariant else np.inf)
            m = rng.normal(size=(n, n))
            far = np.abs(m @ s.S - s.S @ m).max() > 1e-3
            rejected += far and not graph.is_shift_invariant(s, m).invariant
    ok = distinct == 50 and fit <= 1e-6 and comm_ok <= 1e-9 and rejected == 50 and t.seconds < 10.0
    record(
        4,
        "Polynomial-filter theorem",
        ok,
        f"{distinct}/50 distinct spectra, fit residual {fit:.3e} (tol 1e-6), "
        f"polynomial commutator {comm_ok:.3e} (tol 1e-9), {rejected}/50 random matrices rejected, "
        f"{t.seconds:.3f}s (limit 10s)",
    )


def test_5_character_recovery():
    rng = np.random.default_rng(5)
    dist = idem = rebuilt = 0.0
    with Timer() as t:
        for i in range(20):
            n = 4 + i % 7
            u = random_orthogonal(rng, n)
            oracle = recovery.spectral_oracle(u)
            k = recovery.recover_kernel(oracle, seed=i)
            dist = max(dist, recovery.match_columns(k.columns, u)[0])
            idem = max(idem, recovery.verify_idempotents(oracle, k).max_deviation)
            again = recovery.rebuild_oracle(k)
            for _ in range(100):
                x, y = rng.uniform(-1, 1, size=(2, n))
                rebuilt = max(rebuilt, float(np.abs(again(x, y) - oracle(x, y)).max()))
    ok = max(dist, idem, rebuilt) <= 1e-6 and t.seconds < 10.0
    record(
        5,
        "Character recovery",
        ok,
        f"column distance {dist:.3e}, idempotent deviation {idem:.3e}, rebuilt oracle {rebuilt:.3e} "
        f"(tol 1e-6), {t.seconds:.3f}s (limit 10s)",
    )


def test_6_lattice_diagonalization():
    lats = {"chain(8)": lattice.chain(8), "subsets{1,2,3}": lattice.subset_lattice(3), "divisors(36)": lattice.divisor_lattice(36)}
    violations = failures = identities = 0
    exact = True
    with Timer() as t:
        for lat in lats.values():
            violations += len(lattice.check_commutation(lat).violations)
            pair = lattice.diagonalize_shifts(lat)
            exact &= np.issubdtype(pair.zeta.dtype, np.integer) and np.issubdtype(pair.moebius.dtype, np.integer)
            for a in range(lat.n):
                lhs = pair.moebius @ lattice.shift_operator(lat, a) @ pair.zeta
                identities += 1
                failures += not np.array_equal(lhs, np.diag(lat.leq[:, a].astype(int)))
    ok = violations == 0 and failures == 0 and exact and t.seconds < 1.0
    record(
        6,
        "Lattice diagonalization",
        ok,
        f"{violations} commutation violations, {identities - failures}/{identities} integer conjugation "
        f"identities, {t.seconds:.3f}s (limit 1s)",
    )


def test_7_cnn_equivalence():
    rng = np.random.default_rng(7)
    disc = 0
    equivariant = True
    with Timer() as t:
        for _ in range(50):
            h, w = rng.integers(1, 9, size=2)
            img = cnn.LatticeFunction((0, 0), rng.integers(-20, 21, size=(h, w)))
            k = cnn.kernel3x3(rng.integers(-9, 10, size=9))
            disc = max(disc, cnn.cnn_equivalence_check(img, k).discrepancy)
            shift = tuple(rng.integers(-5, 6, size=2))
            lhs = cnn.group_convolve_2d(cnn.translate(img, shift), k)
            rhs = cnn.translate(cnn.group_convolve_2d(img, k), shift)
            equivariant &= lhs.offset == rhs.offset and np.array_equal(lhs.values, rhs.values)
    ok = disc == 0 and equivariant and t.seconds < 1.0
    record(
        7,
        "CNN equivalence",
        ok,
        f"max discrepancy {disc} (must be 0), translation equivariance {'exact' if equivariant else 'broken'}, "
        f"{t.seconds:.3f}s (limit 1s)",
    )


def test_8_degrees_of_freedom():
    d = graph.dof_report(graph.build_shift(graph.Graph(0), "adjacency"), 1)
    code, rep = cli.run(["graph", "dof", "--degree", "1"])
    printed = "polynomial: 2, stencil3x3: 9" in rep.lines
    ok = code == 0 and d["polynomial"] == 2 and d["stencil3x3"] == 9 and printed
    record(8, "Degrees of freedom", ok, f"polynomial {d['polynomial']} (expect 2), stencil {d['stencil3x3']} (expect 9)")


def test_9_multi_shift_characters():
    rng = np.random.default_rng(9)
    mult = 0.0
    exact = True
    gram_min = np.inf
    for suite in range(10):
        systems = tuple(random_symmetric_system(rng, 5) for _ in range(3))
        ms = multishift.MultiShiftSystem(5, systems, rng.dirichlet(np.ones(3)) if suite else [0.2, 0.3, 0.5])
        for _ in range(100):
            M, N = rng.normal(size=(2, 5, 3))
            lhs = multishift.all_characters(ms, multishift.multi_convolve(ms, M, N))
            rhs = multishift.all_characters(ms, M) * multishift.all_characters(ms, N)
            mult = max(mult, float(np.abs(lhs - rhs).max()))
            x = rng.normal(size=5)
            exact &= np.array_equal(multishift.phi2(ms, multishift.phi1(ms, x)), x)
        gram_min = min(gram_min, multishift.composite_transform(ms, rng.normal(size=5)).gram_deviation)
    ok = mult <= 1e-9 and exact and gram_min > 1e-6
    record(
        9,
        "Multi-shift characters",
        ok,
        f"15 characters multiplicative to {mult:.3e} (tol 1e-9) on 10 suites x 100 pairs, "
        f"phi2(phi1(x)) {'exact' if exact else 'inexact'}, min Gram deviation {gram_min:.3e} (flag > 1e-6)",
    )


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
