"""Command-line front end and the plain-text tensor/decomposition formats.

Tensor file::

    symtensor <n+1> <m> uptri|terms
    <re> <im>                 (uptri: one line per entry, upper triangular order)
    <a_1> ... <a_n> <re> <im> (terms: entry F_alpha; missing alpha are 0)

Decomposition file::

    decomposition <n+1> <m> <r> <error>
    <re> <im> ... <re> <im>   (one line per vector u_i, n+1 pairs)

Numbers are written with 17 significant digits so files round-trip exactly.
Blank lines and lines starting with ``#`` are ignored on input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import fixtures
from .catalecticant import cat_rank, dimension_gap, generic_rank
from .decompose import (
    Decomposition,
    decompose_all,
    decompose_numeric,
    decomposition_error,
    reduce_length,
)
from .errors import DomainError, InconsistentSystem, NoConvergence
from .genmat import parameterize
from .symtensor import SymTensor, from_uptri, monomial_index, norm

__all__ = [
    "FileFormatError",
    "format_decomposition",
    "format_tensor",
    "main",
    "parse_decomposition",
    "parse_tensor",
    "read_decomposition",
    "read_tensor",
    "write_decomposition",
    "write_tensor",
]

log = logging.getLogger(__name__)

SEED_ENV = "GPSTD_SEED"
EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_INCONSISTENT = 0, 1, 2, 3
VERIFY_TOL = 1e-8


class FileFormatError(ValueError):
    """A tensor or decomposition file does not parse."""


def _num(x: float) -> str:
    return f"{x:.16e}"


def _pair(z: complex) -> str:
    return f"{_num(z.real)} {_num(z.imag)}"


def _lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line.split())
    return out


def _int(tok: str, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FileFormatError(f"{what} must be an integer, got {tok!r}") from None


def _complex(re: str, im: str) -> complex:
    try:
        return complex(float(re), float(im))
    except ValueError:
        raise FileFormatError(f"bad number pair {re!r} {im!r}") from None


# -- tensors ------------------------------------------------------------------

def format_tensor(F: SymTensor, fmt: str = "uptri") -> str:
    """Canonical text of ``F``; ``terms`` lists the nonzero entries only."""
    if fmt == "uptri":
        body = [_pair(z) for z in F.data]
    elif fmt == "terms":
        body = [" ".join(str(a) for a in alpha) + " " + _pair(z)
                for alpha, z in zip(F.alphas, F.data) if z != 0]
    else:
        raise ValueError(f"unknown tensor format {fmt!r}")
    return "\n".join([f"symtensor {F.n + 1} {F.m} {fmt}"] + body) + "\n"


def parse_tensor(text: str) -> SymTensor:
    rows = _lines(text)
    if not rows or rows[0][0] != "symtensor" or len(rows[0]) != 4:
        raise FileFormatError("expected header 'symtensor <n+1> <m> uptri|terms'")
    n = _int(rows[0][1], "n+1") - 1
    m = _int(rows[0][2], "m")
    fmt = rows[0][3]
    if n < 0 or m < 0:
        raise FileFormatError("n+1 must be positive and m nonnegative")
    body = rows[1:]
    if fmt == "uptri":
        if any(len(r) != 2 for r in body):
            raise FileFormatError("uptri lines must hold 're im'")
        vals = [_complex(*r) for r in body]
        try:
            return from_uptri(n, m, vals)
        except ValueError as exc:
            raise FileFormatError(str(exc)) from None
    if fmt == "terms":
        index = monomial_index(n, m)
        data = np.zeros(len(index), dtype=complex)
        for r in body:
            if len(r) != n + 2:
                raise FileFormatError(f"terms lines need {n} exponents and 're im'")
            alpha = tuple(_int(a, "exponent") for a in r[:n])
            if alpha not in index:
                raise FileFormatError(f"exponent {alpha} is not in degree <= {m}")
            data[index[alpha]] = _complex(*r[n:])
        return SymTensor(n, m, data)
    raise FileFormatError(f"unknown tensor format {fmt!r}")


def read_tensor(path) -> SymTensor:
    return parse_tensor(Path(path).read_text())


def write_tensor(path, F: SymTensor, fmt: str = "uptri") -> None:
    Path(path).write_text(format_tensor(F, fmt))


# -- decompositions -----------------------------------------------------------

def format_decomposition(dec: Decomposition, n: int, m: int) -> str:
    head = f"decomposition {n + 1} {m} {len(dec)} {_num(dec.error)}"
    body = [" ".join(_pair(z) for z in u) for u in dec.vectors]
    return "\n".join([head] + body) + "\n"


def parse_decomposition(text: str):
    """Returns ``(n, m, Decomposition)``."""
    rows = _lines(text)
    if not rows or rows[0][0] != "decomposition" or len(rows[0]) != 5:
        raise FileFormatError("expected header 'decomposition <n+1> <m> <r> <error>'")
    n1 = _int(rows[0][1], "n+1")
    m = _int(rows[0][2], "m")
    r = _int(rows[0][3], "r")
    try:
        err = float(rows[0][4])
    except ValueError:
        raise FileFormatError("error must be a real number") from None
    body = rows[1:]
    if len(body) != r:
        raise FileFormatError(f"header says r={r} but {len(body)} vectors follow")
    vecs = np.zeros((r, n1), dtype=complex)
    for i, row in enumerate(body):
        if len(row) != 2 * n1:
            raise FileFormatError(f"vector {i + 1} needs {n1} 're im' pairs")
        vecs[i] = [_complex(row[2 * j], row[2 * j + 1]) for j in range(n1)]
    return n1 - 1, m, Decomposition(vecs, err, "numeric")


def read_decomposition(path):
    return parse_decomposition(Path(path).read_text())


def write_decomposition(path, dec: Decomposition, n: int, m: int) -> None:
    Path(path).write_text(format_decomposition(dec, n, m))


# -- commands -----------------------------------------------------------------

def _indexed(path: Path, k: int) -> Path:
    return path.with_name(f"{path.stem}_{k}{path.suffix}")


def _emit(dec: Decomposition, F: SymTensor, out) -> None:
    text = format_decomposition(dec, F.n, F.m)
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config(args, restarts_default: int):
    from .syssolve import SolveConfig

    return SolveConfig(seed=args.seed, error_tol=args.tol,
                       max_restarts=args.restarts or restarts_default)


def _run_numeric(F, r, args):
    cfg = _config(args, 10)
    dec = decompose_numeric(F, r, cfg, transform=args.transform)
    if args.reduce:
        dec = reduce_length(F, dec, cfg)
    return dec


def cmd_decompose(args) -> int:
    F = read_tensor(args.input)
    r = generic_rank(F.n, F.m) if args.rank == "auto" else int(args.rank)
    target = args.tol * norm(F)
    for attempt in range(args.grow + 1):
        try:
            try:
                ell = parameterize(F, r).omega_len
            except InconsistentSystem:
                if not args.transform:
                    raise
                ell = "n/a"  # only the transformed tensor is parameterized
            print(f"r = {r}, d = {dimension_gap(F.n, F.m, r)}, ell = {ell}")
            if args.mode == "all":
                cfg = _config(args, 500)
                decs = decompose_all(F, r, cfg)
                if args.reduce:
                    decs = [reduce_length(F, d, cfg) for d in decs]
                print(f"found {len(decs)} decomposition(s)")
                for k, dec in enumerate(decs, 1):
                    print(f"  #{k}: length {len(dec)}, error {dec.error:.3e}")
                    if args.output is None:
                        _emit(dec, F, None)
                    else:
                        _emit(dec, F, _indexed(Path(args.output), k))
                return EXIT_OK if decs else EXIT_NOCONV
            dec = _run_numeric(F, r, args)
            print(f"length {len(dec)}, error {dec.error:.3e}")
            _emit(dec, F, args.output)
            return EXIT_OK if dec.error <= target else EXIT_NOCONV
        except InconsistentSystem as exc:
            print(f"inconsistent at r = {r}: {exc}", file=sys.stderr)
            if attempt == args.grow:
                print("the rank is probably larger than r; increase the value of r", file=sys.stderr)
                return EXIT_INCONSISTENT
        except NoConvergence as exc:
            print(f"no convergence at r = {r}: {exc}", file=sys.stderr)
            if attempt == args.grow:
                if exc.decomposition is not None:
                    _emit(exc.decomposition, F, args.output)
                return EXIT_NOCONV
        r += 1
    return EXIT_NOCONV


def cmd_verify(args) -> int:
    F = read_tensor(args.tensor)
    n, m, dec = read_decomposition(args.decomposition)
    if (n, m) != (F.n, F.m):
        print(f"shape mismatch: tensor is ({F.n + 1}, {F.m}), decomposition is ({n + 1}, {m})",
              file=sys.stderr)
        return EXIT_INPUT
    err = decomposition_error(F, dec.vectors)
    fn = norm(F)
    rel = err / fn if fn > 0 else err
    print(f"error {err:.6e}  relative {rel:.6e}")
    return EXIT_OK if rel <= VERIFY_TOL else EXIT_NOCONV


def cmd_catrank(args) -> int:
    F = read_tensor(args.tensor)
    print(cat_rank(F, tol=args.tol))
    return EXIT_OK


def cmd_genrank(args) -> int:
    n, m = args.n_plus_1 - 1, args.m
    r = generic_rank(n, m)
    at = args.rank if args.rank is not None else r
    print(f"generic rank {r}")
    print(f"dimension gap at r = {at}: {dimension_gap(n, m, at)}")
    return EXIT_OK


def cmd_fixture(args) -> int:
    if args.name is None:
        print("\n".join(fixtures.NAMES))
        return EXIT_OK
    text = format_tensor(fixtures.build(args.name))
    if args.output is None:
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return EXIT_OK


# Example runs: (fixture, mode, r, options)
REPRODUCE = {
    "example_1_3": ("numeric", 3, {}),
    "example_5_1": ("all", 4, {"max_restarts": 500}),
    "example_5_2": ("all", 6, {"max_restarts": 500}),
    "unique_s3c4": ("all", 5, {"max_restarts": 20}),
    "unique_s5c3": ("all", 7, {"max_restarts": 20}),
    "quartic": ("reduce", 6, {"transform": True}),
    "bcmt_quintic": ("reduce", 7, {}),
    "determinantal": ("numeric", 11, {"transform": True}),
}


def cmd_reproduce(args) -> int:
    from .syssolve import SolveConfig

    names = fixtures.NAMES if args.name == "all" else [args.name]
    status = EXIT_OK
    for name in names:
        mode, r, opts = REPRODUCE[name]
        opts = dict(opts)
        F = fixtures.load(name)
        transform = opts.pop("transform", False)
        cfg = SolveConfig(seed=args.seed, **opts)
        t0 = time.perf_counter()
        try:
            if mode == "all":
                decs = decompose_all(F, r, cfg)
                summary = (f"{len(decs)} decomposition(s), max error "
                           f"{max((d.error for d in decs), default=float('nan')):.2e}")
            else:
                dec = decompose_numeric(F, r, cfg, transform=transform)
                if mode == "reduce":
                    dec = reduce_length(F, dec, cfg)
                summary = f"length {len(dec)}, error {dec.error:.2e}"
        except (InconsistentSystem, NoConvergence) as exc:
            summary = f"failed: {exc}"
            status = EXIT_NOCONV
        print(f"{name:14s} r={r:<3d} {summary}  ({time.perf_counter() - t0:.1f} s)")
    return status


def _rank_arg(text: str):
    if text == "auto":
        return text
    try:
        r = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("rank must be a positive integer or 'auto'") from None
    if r < 1:
        raise argparse.ArgumentTypeError("rank must be at least 1")
    return r


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get(SEED_ENV, "0"))
    p = argparse.ArgumentParser(prog="gpstd", description="Symmetric tensor decompositions "
                                "via generating polynomials.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="decompose a tensor file")
    d.add_argument("input")
    d.add_argument("--rank", type=_rank_arg, default="auto")
    d.add_argument("--mode", choices=("numeric", "all"), default="numeric")
    d.add_argument("--seed", type=int, default=default_seed,
                   help=f"random seed (default from ${SEED_ENV}, else 0)")
    d.add_argument("--tol", type=float, default=1e-8, help="relative error target")
    d.add_argument("--restarts", type=int, default=None)
    d.add_argument("--reduce", action="store_true", help="try to shorten the result")
    d.add_argument("--transform", action="store_true",
                   help="work on a random unitary transform of the tensor")
    d.add_argument("--grow", type=int, default=0, metavar="K",
                   help="on failure retry with r+1, ..., r+K")
    d.add_argument("-o", "--output", default=None)
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="error of a decomposition file")
    v.add_argument("tensor")
    v.add_argument("decomposition")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catrank", help="rank of the catalecticant matrix")
    c.add_argument("tensor")
    c.add_argument("--tol", type=float, default=1e-8)
    c.set_defaults(func=cmd_catrank)

    g = sub.add_parser("genrank", help="generic rank and dimension gap")
    g.add_argument("n_plus_1", type=int)
    g.add_argument("m", type=int)
    g.add_argument("--rank", type=int, default=None)
    g.set_defaults(func=cmd_genrank)

    f = sub.add_parser("fixture", help="write a bundled example tensor")
    f.add_argument("name", nargs="?", choices=fixtures.NAMES)
    f.add_argument("-o", "--output", default=None)
    f.set_defaults(func=cmd_fixture)

    r = sub.add_parser("reproduce", help="run the bundled examples")
    r.add_argument("name", choices=fixtures.NAMES + ("all",))
    r.add_argument("--seed", type=int, default=default_seed)
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, FileFormatError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
