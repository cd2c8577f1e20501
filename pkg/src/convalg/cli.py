"""Command-line front end.

    convalg <domain> <verb> [--in FILE]... [--out FILE] [--seed N] [--tol X] [--report FILE]

Exit status: 0 when every check passes, 1 when any check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import abelian, cnn, graph, lattice, multishift, recovery
from . import io as cio
from .errors import ConvAlgError, DegenerateProbeError, LatticeError
from .numeric import dft_matrix, max_abs


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tol: float


@dataclass
class RunReport:
    command: str
    inputs: list[str] = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)

    def check(self, name: str, value: float, tol: float, passed: bool | None = None) -> bool:
        ok = bool(value <= tol) if passed is None else passed
        self.checks.append(Check(name, ok, float(value), float(tol)))
        return ok

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": [
                {"name": c.name, "passed": c.passed, "value": c.value, "tol": c.tol} for c in self.checks
            ],
            "status": "pass" if self.ok else "fail",
        }

    def render(self) -> str:
        out = [self.command, *self.lines]
        for c in self.checks:
            out.append(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.6g} (tol {c.tol:.6g})")
        return "\n".join(out)


class UsageError(ConvAlgError):
    pass


def _digest(path: str) -> str:
    data = Path(path).read_bytes()
    return f"{Path(path).name}:sha256:{hashlib.sha256(data).hexdigest()[:16]}"


def _need(args, count: int, what: str) -> list:
    files = args.inputs or []
    if len(files) < count:
        raise UsageError(f"{args.domain} {args.verb} needs {count} --in file(s): {what}")
    return [cio.load_json(p) for p in files[:count]]


def _h(x) -> str:
    arr = np.asarray(x)
    if np.iscomplexobj(arr):
        return "[" + ", ".join(f"{v.real:.6g}{v.imag:+.6g}j" for v in arr.ravel()) + "]"
    return "[" + ", ".join(f"{v:.6g}" for v in arr.ravel()) + "]"


# -- group ----------------------------------------------------------------------


def cmd_group(args, rep: RunReport):
    tol = args.tol if args.tol is not None else 1e-9
    if args.verb in ("dft", "idft", "plancherel"):
        (obj,) = _need(args, 1, "group signal")
        f = cio.parse_group_signal(obj)
        if args.verb == "plancherel":
            lhs, rhs, gap = abelian.plancherel(f)
            rep.outputs = {"energy": lhs, "spectral_energy": rhs, "relative_gap": gap}
            rep.lines.append(f"sum|f|^2 = {lhs:.6g}, sum|f_hat|^2/|A| = {rhs:.6g}")
            rep.check("plancherel_relative_gap", gap, tol)
            return
        fwd = args.verb == "dft"
        out = abelian.fourier(f) if fwd else abelian.inverse_fourier(f)
        back = abelian.inverse_fourier(out) if fwd else abelian.fourier(out)
        rep.check("round_trip", max_abs(back.values - f.values), max(tol, 1e-10) * max(1.0, max_abs(f.values)))
    else:
        a, b = _need(args, 2, "two group signals")
        f, h = cio.parse_group_signal(a), cio.parse_group_signal(b)
        out = abelian.convolve(f, h)
        lhs = abelian.fourier(out).values
        rhs = abelian.fourier(f).values * abelian.fourier(h).values
        rep.check("convolution_theorem", max_abs(lhs - rhs), tol * max(1.0, max_abs(rhs)))
    rep.outputs = cio.encode_group_signal(out)
    rep.lines.append(f"values = {_h(out.values)}")


# -- graph ----------------------------------------------------------------------


def _system(args, obj):
    return cio.parse_shift_system(obj, args.shift)


def cmd_graph(args, rep: RunReport):
    verb = args.verb
    if verb == "dof":
        files = [cio.load_json(p) for p in args.inputs or []]
        sys_ = _system(args, files[0]) if files else graph.build_shift(graph.Graph(0), "adjacency")
        d = graph.dof_report(sys_, args.degree)
        rep.outputs = d
        rep.lines.append(f"polynomial: {d['polynomial']}, stencil3x3: {d['stencil3x3']}")
        if files:
            rep.lines.append(f"local kernel on this graph: {d['local_kernel_min']}..{d['local_kernel_max']}")
        return
    tol = args.tol if args.tol is not None else 1e-9
    if verb in ("gft", "igft"):
        g, x = _need(args, 2, "graph, signal")
        sys_ = _system(args, g)
        x = cio.parse_signal(x)
        out = graph.gft(sys_, x) if verb == "gft" else graph.igft(sys_, x)
        back = graph.igft(sys_, out) if verb == "gft" else graph.gft(sys_, out)
        rep.check("round_trip", max_abs(back - x), tol * max(1.0, max_abs(x)))
        rep.outputs = {"values": cio.encode_array(out)}
        rep.lines.append(f"values = {_h(out)}")
        if verb == "gft":
            rep.lines.append(f"|values| = {_h(np.abs(out))}")
    elif verb == "conv":
        g, x, y = _need(args, 3, "graph, x, y")
        sys_ = _system(args, g)
        x, y = cio.parse_signal(x), cio.parse_signal(y)
        out = graph.spectral_convolve(sys_, x, y)
        rep.check("commutativity", max_abs(out - graph.spectral_convolve(sys_, y, x)), tol)
        rep.outputs = {"values": cio.encode_array(out)}
        rep.lines.append(f"values = {_h(out)}")
    elif verb == "fit-poly":
        g, x = _need(args, 2, "graph, signal")
        sys_ = _system(args, g)
        x = cio.parse_signal(x)
        fm = graph.filter_matrix(sys_, x)
        tol = args.tol if args.tol is not None else graph.FIT_TOL
        try:
            p = graph.fit_polynomial(sys_, x)
        except ConvAlgError as exc:
            rep.lines.append(f"fit failed: {exc}")
            rep.check("fit_residual", getattr(exc, "residual", np.inf), tol, passed=False)
            return
        resid = max_abs(graph.poly_eval_matrix(sys_.S, p) - fm)
        rep.outputs = {"coeffs": cio.encode_array(p.coeffs), "residual": resid}
        rep.lines.append(f"coeffs (lowest first) = {_h(p.coeffs)}")
        rep.lines.append(f"residual = {resid:.6g}")
        rep.check("fit_residual", resid, tol)
    elif verb == "shift-invariant":
        g, m = _need(args, 2, "graph, matrix")
        sys_ = _system(args, g)
        res = graph.is_shift_invariant(sys_, cio.parse_matrix_file(m), tol)
        rep.outputs = {
            "invariant": res.invariant,
            "commutator_norm": res.commutator_norm,
            "certificate": None if res.certificate is None else cio.encode_array(res.certificate.coeffs),
        }
        if res.certificate is not None:
            rep.lines.append(f"certificate (lowest first) = {_h(res.certificate.coeffs)}")
        rep.check("commutator", res.commutator_norm, tol)
    elif verb == "gcn":
        g, X, P, W = _need(args, 4, "graph, X, filter, W")
        sys_ = _system(args, g)
        X, W = cio.parse_matrix_file(X), cio.parse_matrix_file(W)
        P = cio.parse_filter(P)
        out = graph.gcn_layer(sys_, X, P, W)
        rep.outputs = {"matrix": cio.encode_array(out)}
        rep.lines.append(f"output shape = {out.shape[0]}x{out.shape[1]}")
    else:  # pragma: no cover - argparse restricts verbs
        raise UsageError(verb)


# -- recover --------------------------------------------------------------------


def _oracle_for(args):
    kind = args.verb
    files = [cio.load_json(p) for p in args.inputs or []]
    if kind == "hadamard":
        if args.n is None:
            raise UsageError("recover hadamard needs --n")
        return recovery.hadamard_oracle(args.n), np.eye(args.n)
    if kind == "group":
        if files:
            g = cio.parse_group(files[0])
        elif args.n is not None:
            g = abelian.FiniteAbelianGroup((args.n,))
        else:
            raise UsageError("recover group needs --n or a group file")
        generator = dft_matrix(g.size) if g.rank == 1 else None
        return recovery.group_oracle(g), generator
    if kind == "graph":
        if not files:
            raise UsageError("recover graph needs a graph --in file")
        sys_ = _system(args, files[0])
        return recovery.graph_oracle(sys_), sys_.U
    if kind == "multishift":
        if not files:
            raise UsageError("recover multishift needs a multi-system --in file")
        ms = cio.parse_multi_system(files[0])
        return multishift.multi_oracle(ms), ms.kernel_vectors()
    raise UsageError(kind)  # pragma: no cover


def cmd_recover(args, rep: RunReport):
    oracle, generator = _oracle_for(args)
    if args.noise:
        oracle = recovery.corrupted_oracle(oracle, args.noise, args.seed)
    tol = args.tol if args.tol is not None else 1e-6
    worst = recovery.spot_check(oracle, args.seed)
    for name, value in worst.items():
        rep.check(f"oracle_{name}", value, recovery.SPOT_CHECK_TOL)
    try:
        kernel = recovery.recover_kernel(oracle, args.seed, validate=False)
    except DegenerateProbeError as exc:
        rep.lines.append(str(exc))
        rep.check("probe_simple_spectrum", np.inf, 0.0, passed=False)
        return
    idem = recovery.verify_idempotents(oracle, kernel, tol)
    rep.lines.append(f"idempotent deviation = {idem.max_deviation:.6g} at pair {idem.worst_pair}")
    rep.check("idempotents", idem.max_deviation, tol)
    rng = np.random.default_rng(args.seed + 1)
    mult = 0.0
    for _ in range(50):
        x, y = rng.uniform(-1, 1, size=(2, oracle.n))
        lhs = kernel.characters(oracle(x, y))
        rhs = kernel.characters(x) * kernel.characters(y)
        mult = max(mult, max_abs(lhs - rhs) / (1.0 + max_abs(rhs)))
    rep.check("multiplicativity", mult, tol)
    rep.outputs = {
        "columns": cio.encode_array(kernel.columns),
        "scales": cio.encode_array(kernel.scales),
        "redraws": kernel.redraws,
        "idempotent_deviation": idem.max_deviation,
    }
    if generator is not None:
        dist, assigned = recovery.match_columns(kernel.columns, generator)
        rep.outputs["generator_distance"] = dist
        rep.outputs["assignment"] = assigned.tolist()
        rep.lines.append(f"distance to generating kernel = {dist:.6g}")
        rep.check("generator_distance", dist, tol)


# -- lattice --------------------------------------------------------------------


def cmd_lattice(args, rep: RunReport):
    if args.verb == "validate":
        (obj,) = _need(args, 1, "lattice")
        try:
            lat = cio.parse_lattice(obj)
        except LatticeError as exc:
            rep.lines.append(f"invalid: {exc} (witness {tuple(exc.witness)})")
            rep.outputs = {"valid": False, "witness": list(exc.witness), "reason": str(exc)}
            rep.check("meet_semilattice", 1.0, 0.0, passed=False)
            return
        rep.outputs = {"valid": True, "n": lat.n, "order": list(lat.order), "meet": lat.meet.tolist()}
        rep.check("meet_semilattice", 0.0, 0.0)
        return
    objs = _need(args, 1 if args.verb != "conv" else 3, "lattice" if args.verb != "conv" else "lattice, h, s")
    lat = cio.parse_lattice(objs[0])
    if args.verb == "shifts":
        report = lattice.check_commutation(lat)
        rep.outputs = {
            "shifts": [lattice.shift_operator(lat, a).tolist() for a in range(lat.n)],
            "violations": [list(v) for v in report.violations],
        }
        rep.check("commutation_violations", len(report.violations), 0)
    elif args.verb == "diagonalize":
        pair = lattice.diagonalize_shifts(lat)
        report = lattice.check_diagonalization(lat, pair)
        ok = report.identities_checked - len(report.failures)
        rep.outputs = {
            "order": list(pair.order),
            "zeta": pair.zeta.tolist(),
            "moebius": pair.moebius.tolist(),
            "responses": pair.responses.tolist(),
        }
        rep.lines.append(f"{ok}/{report.identities_checked} conjugation identities hold")
        rep.check("zeta_inverse_exact", 0 if report.inverse_exact else 1, 0)
        rep.check("conjugation_failures", len(report.failures), 0)
    else:
        h, s = cio.parse_signal(objs[1]), cio.parse_signal(objs[2])
        out = lattice.lattice_convolve(lat, h, s)
        rep.outputs = {"values": cio.encode_array(out)}
        rep.lines.append(f"values = {_h(out)}")


# -- cnn ------------------------------------------------------------------------


def cmd_cnn(args, rep: RunReport):
    a, b = _need(args, 2, "image, kernel")
    f = cio.parse_lattice_function(a)
    g = cio.parse_kernel_or_image(b)
    if args.verb == "conv":
        out = cnn.group_convolve_2d(f, g).trimmed()
        rep.outputs = cio.encode_lattice_function(out)
        rep.lines.append(f"offset = {list(out.offset)}, size = {out.width}x{out.height}")
    else:
        report = cnn.cnn_equivalence_check(f, g)
        rep.outputs = {
            "discrepancy": report.discrepancy,
            "group": cio.encode_lattice_function(report.group_result),
        }
        rep.lines.append(f"max discrepancy = {report.discrepancy:.6g}")
        rep.check("discrepancy", report.discrepancy, args.tol if args.tol is not None else 0.0)


# -- multi ----------------------------------------------------------------------


def cmd_multi(args, rep: RunReport):
    tol = args.tol if args.tol is not None else 1e-9
    if args.verb == "conv":
        s, M, N = _need(args, 3, "multi-system, M, N")
        ms = cio.parse_multi_system(s)
        M, N = cio.parse_matrix_file(M), cio.parse_matrix_file(N)
        out = multishift.multi_convolve(ms, M, N)
        lhs = multishift.all_characters(ms, out)
        rhs = multishift.all_characters(ms, M) * multishift.all_characters(ms, N)
        rep.check("character_multiplicativity", max_abs(lhs - rhs), tol * max(1.0, max_abs(rhs)))
        rep.outputs = {"matrix": cio.encode_array(out)}
    else:
        s, x = _need(args, 2, "multi-system, signal")
        ms = cio.parse_multi_system(s)
        res = multishift.composite_transform(ms, cio.parse_signal(x))
        rep.outputs = {
            "values": cio.encode_array(res.values),
            "gram_deviation": res.gram_deviation,
            "orthogonal": res.orthogonal,
        }
        rep.lines.append(f"values = {_h(res.values)}")
        rep.lines.append(
            f"gram deviation = {res.gram_deviation:.6g} ({'orthogonal' if res.orthogonal else 'NOT an orthogonal base change'})"
        )


VERBS = {
    "group": (cmd_group, ["dft", "idft", "conv", "plancherel"]),
    "graph": (cmd_graph, ["gft", "igft", "conv", "fit-poly", "shift-invariant", "gcn", "dof"]),
    "recover": (cmd_recover, ["group", "graph", "hadamard", "multishift"]),
    "lattice": (cmd_lattice, ["validate", "shifts", "diagonalize", "conv"]),
    "cnn": (cmd_cnn, ["conv", "equiv"]),
    "multi": (cmd_multi, ["conv", "composite"]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="convalg", description=__doc__.strip().splitlines()[0])
    domains = parser.add_subparsers(dest="domain", required=True)
    for domain, (_, verbs) in VERBS.items():
        dp = domains.add_parser(domain)
        vp = dp.add_subparsers(dest="verb", required=True)
        for verb in verbs:
            p = vp.add_parser(verb)
            p.add_argument("--in", dest="inputs", action="append", metavar="FILE")
            p.add_argument("--out", metavar="FILE")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--tol", type=float)
            p.add_argument("--report", metavar="FILE")
            if domain in ("graph", "recover"):
                p.add_argument("--shift", choices=[k.value for k in graph.ShiftKind])
            if domain == "graph":
                p.add_argument("--degree", type=int, default=1)
            if domain == "recover":
                p.add_argument("--n", type=int)
                p.add_argument("--noise", type=float, default=0.0)
    return parser


def run(argv=None) -> tuple[int, RunReport | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = RunReport(f"{args.domain} {args.verb}")
    handler = VERBS[args.domain][0]
    try:
        rep.inputs = [_digest(p) for p in args.inputs or []]
        handler(args, rep)
    except (ConvAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    print(rep.render())
    if args.out:
        cio.write_json(args.out, rep.outputs)
    if args.report:
        cio.write_json(args.report, rep.to_dict())
    return (0 if rep.ok else 1), rep


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
