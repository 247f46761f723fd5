"""Command-line front end.

Exit codes: 0 equivalent / success, 1 not equivalent / verification failed,
2 inconclusive, 64 usage error, 65 malformed or invalid input data,
66 input file missing, 73 output cannot be written.
"""
import argparse
import json
import math
import sys
import time
from dataclasses import asdict, replace

from . import kernels
from .config import SearchConfig, Tolerances
from .errors import LUError
from .fileio import MatrixFileError, doc_to_matrix, matrix_to_doc, read_json, read_matrix, write_json, write_matrix
from .realign import realign
from .state import degeneracy_profile, spectral_decompose, validate_density
from .verdict import decide, edge_state, gen_lu_pair, verify_witness

EX_OK, EX_NOT_EQUIVALENT, EX_INCONCLUSIVE = 0, 1, 2
EX_USAGE, EX_DATAERR, EX_NOINPUT, EX_CANTCREAT = 64, 65, 66, 73

_VERDICT_EXIT = {"equivalent": EX_OK, "not_equivalent": EX_NOT_EQUIVALENT, "inconclusive": EX_INCONCLUSIVE}


class UsageError(Exception):
    pass


class OutputError(Exception):
    pass


def _out(writer, path, *args):
    try:
        writer(path, *args)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _dims_arg(text):
    try:
        m, n = text.lower().split("x")
        m, n = int(m), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MxN, got {text!r}") from None
    if m < 1 or n < 1:
        raise argparse.ArgumentTypeError(f"dims must be positive, got {text!r}")
    return m, n


def _load(path, dims_flag):
    mat, dims = read_matrix(path)
    if dims_flag is not None:
        if dims is not None and tuple(dims) != tuple(dims_flag):
            raise UsageError(f"--dims {dims_flag} disagrees with dims {dims} in {path}")
        dims = tuple(dims_flag)
    if dims is None:
        raise UsageError(f"{path} has no dims field; pass --dims MxN")
    if mat.shape != (dims[0] * dims[1], dims[0] * dims[1]):
        raise UsageError(f"dims {dims[0]}x{dims[1]} do not match a {mat.shape[0]}x{mat.shape[1]} matrix")
    return mat, dims


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _search_config(args):
    tol = replace(
        Tolerances(),
        gap=args.gap_tol, spectra=args.spectra_tol, verify=args.verify_tol,
    )
    return SearchConfig(
        restarts=args.restarts, max_iters=args.max_iters, rank_tol=args.rank_tol,
        seed=args.seed, workers=args.workers, tol=tol,
    )


def certificate_doc(cert):
    doc = {"kind": cert.kind}
    doc.update({k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(cert).items()})
    return doc


def verdict_report(v, cfg, dims, elapsed):
    doc = {
        "verdict": v.kind,
        "dims": list(dims),
        "tolerances": asdict(cfg.tol),
        "search": {k: v_ for k, v_ in asdict(cfg).items() if k != "tol"},
        "seed": cfg.seed,
        "backend": kernels.BACKEND,
        "timing_s": elapsed,
    }
    if v.kind == "equivalent":
        w = v.witness
        doc["witness"] = {
            "u1": matrix_to_doc(w.u1),
            "u2": matrix_to_doc(w.u2),
            "decomposition_residual": w.decomposition_residual,
            "unitarity_defect": w.unitarity_defect,
        }
        doc["verification_residual"] = v.verification_residual
        doc["f_best"] = _finite(v.f_best)
        doc["theta"] = None if v.theta is None else [float(t) for t in v.theta]
        doc["degenerate"] = v.degenerate
    elif v.kind == "not_equivalent":
        doc["certificate"] = certificate_doc(v.certificate)
    else:
        doc["reason"] = v.reason
        doc["f_best"] = _finite(v.best_f)
    return doc


def cmd_check(args):
    cfg = _search_config(args)
    m, dims = _load(args.rho, args.dims)
    mp, dims_p = _load(args.rho_prime, args.dims)
    if dims != dims_p:
        raise UsageError(f"dims differ: {dims} vs {dims_p}")
    rho = validate_density(m, *dims, cfg.tol)
    rho_p = validate_density(mp, *dims, cfg.tol)
    t0 = time.perf_counter()
    v = decide(rho, rho_p, cfg)
    elapsed = time.perf_counter() - t0
    report = verdict_report(v, cfg, dims, elapsed)
    if args.report:
        _out(write_json, args.report, report)
    if not args.quiet:
        line = {"equivalent": f"equivalent (residual {report.get('verification_residual', 0):.3e})",
                "not_equivalent": "not equivalent",
                "inconclusive": f"inconclusive ({report.get('reason')})"}[v.kind]
        print(line)
        if v.kind == "not_equivalent":
            print(json.dumps(report["certificate"]))
    return _VERDICT_EXIT[v.kind]


def cmd_realign(args):
    mat, dims = _load(args.path, args.dims)
    R = realign(mat, *dims)
    doc = matrix_to_doc(R)
    if args.out:
        _out(write_json, args.out, doc)
    else:
        print(json.dumps(doc))
    return EX_OK


def cmd_spectrum(args):
    m, dims = _load(args.path, args.dims)
    tol = replace(Tolerances(), gap=args.gap_tol)
    rho = validate_density(m, *dims, tol)
    sd = spectral_decompose(rho, tol=tol)
    prof = degeneracy_profile(sd.eigenvalues, tol.gap)
    print(json.dumps({
        "eigenvalues": [float(x) for x in sd.eigenvalues],
        "multiplicities": [[rep, n] for rep, n in prof.multiplicities],
        "nondegenerate": prof.is_nondegenerate,
        "original_trace": rho.original_trace,
    }))
    return EX_OK


def cmd_gen_pair(args):
    M, N = args.dims
    rho, rho_p, u1, u2 = gen_lu_pair(M, N, args.seed)
    p = args.out_prefix
    _out(write_matrix, f"{p}rho.json", rho.mat, (M, N))
    _out(write_matrix, f"{p}rhop.json", rho_p.mat, (M, N))
    _out(write_matrix, f"{p}u1.json", u1)
    _out(write_matrix, f"{p}u2.json", u2)
    print(json.dumps({"rho": f"{p}rho.json", "rho_prime": f"{p}rhop.json",
                      "u1": f"{p}u1.json", "u2": f"{p}u2.json"}))
    return EX_OK


def cmd_gen_edge(args):
    rho = edge_state(args.a, args.b, args.c)
    _out(write_matrix, args.out, rho.mat, rho.dims)
    print(json.dumps({"out": args.out, "nondegenerate": rho.metadata["nondegenerate"],
                      "original_trace": rho.original_trace}))
    return EX_OK


def cmd_verify(args):
    m, dims = _load(args.rho, args.dims)
    mp, _ = _load(args.rho_prime, dims)
    if args.report:
        rep = read_json(args.report)
        try:
            w = rep["witness"]
            u1, _ = doc_to_matrix(w["u1"])
            u2, _ = doc_to_matrix(w["u2"])
        except (KeyError, TypeError):
            raise MatrixFileError("witness", f"{args.report} carries no witness") from None
    elif args.u1 and args.u2:
        u1, _ = read_matrix(args.u1)
        u2, _ = read_matrix(args.u2)
    else:
        raise UsageError("give U1 and U2 files or --report")
    if u1.shape != (dims[0], dims[0]) or u2.shape != (dims[1], dims[1]):
        raise UsageError(f"witness shapes {u1.shape}, {u2.shape} do not fit dims {dims}")
    rho = validate_density(m, *dims)
    rho_p = validate_density(mp, *dims)
    r = verify_witness(rho, rho_p, (u1, u2))
    ok = r <= args.verify_tol
    print(json.dumps({"residual": r, "tolerance": args.verify_tol, "ok": ok}))
    return EX_OK if ok else EX_NOT_EQUIVALENT


def build_parser():
    d = SearchConfig()
    t = Tolerances()
    p = _Parser(prog="luequiv", description="Local unitary equivalence of bipartite mixed states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide equivalence of two density matrices")
    c.add_argument("rho")
    c.add_argument("rho_prime")
    c.add_argument("--dims", type=_dims_arg)
    c.add_argument("--restarts", type=int, default=d.restarts)
    c.add_argument("--max-iters", type=int, default=d.max_iters)
    c.add_argument("--rank-tol", type=float, default=d.rank_tol)
    c.add_argument("--gap-tol", type=float, default=t.gap)
    c.add_argument("--spectra-tol", type=float, default=t.spectra)
    c.add_argument("--verify-tol", type=float, default=t.verify)
    c.add_argument("--seed", type=int, default=d.seed)
    c.add_argument("--workers", type=int, default=d.workers)
    c.add_argument("--report", help="write a JSON report here")
    c.add_argument("--quiet", action="store_true")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("realign", help="print the realigned matrix")
    r.add_argument("path")
    r.add_argument("--dims", type=_dims_arg)
    r.add_argument("--out")
    r.set_defaults(func=cmd_realign)

    s = sub.add_parser("spectrum", help="print sorted eigenvalues and degeneracy profile")
    s.add_argument("path")
    s.add_argument("--dims", type=_dims_arg)
    s.add_argument("--gap-tol", type=float, default=t.gap)
    s.set_defaults(func=cmd_spectrum)

    g = sub.add_parser("gen-pair", help="write a random LU-equivalent pair and its unitaries")
    g.add_argument("--dims", type=_dims_arg, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out-prefix", required=True)
    g.set_defaults(func=cmd_gen_pair)

    e = sub.add_parser("gen-edge", help="write the 2x4 edge state for parameters a, b, c")
    e.add_argument("--a", type=float, required=True)
    e.add_argument("--b", type=float, required=True)
    e.add_argument("--c", type=float, required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_gen_edge)

    v = sub.add_parser("verify", help="residual of a witness (U1, U2)")
    v.add_argument("rho")
    v.add_argument("rho_prime")
    v.add_argument("u1", nargs="?")
    v.add_argument("u2", nargs="?")
    v.add_argument("--report", help="take the witness from a check report")
    v.add_argument("--dims", type=_dims_arg)
    v.add_argument("--verify-tol", type=float, default=t.verify)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"luequiv: usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except OutputError as exc:
        print(f"luequiv: {exc}", file=sys.stderr)
        return EX_CANTCREAT
    except FileNotFoundError as exc:
        print(f"luequiv: {exc}", file=sys.stderr)
        return EX_NOINPUT
    except (MatrixFileError, LUError) as exc:
        print(f"luequiv: invalid input: {exc}", file=sys.stderr)
        return EX_DATAERR
    except OSError as exc:
        print(f"luequiv: cannot read input: {exc}", file=sys.stderr)
        return EX_NOINPUT


if __name__ == "__main__":
    sys.exit(main())
