"""``splitmps`` command line: convert, analyze and wire.

Inputs are tensor files or fixture ids. Reports are plain text with fixed
formatting so repeated runs produce identical bytes.

Exit codes: 0 success, 2 unreadable input, 3 conversion failure,
4 unsupported operation, 5 internal error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path
from typing import TextIO

import numpy as np

from . import symmetry as sym
from . import wire
from .errors import (
    InvalidInput,
    NoGauge,
    NonUnique,
    NotFound,
    NotInvertible,
    RankZero,
    SplitMpsError,
    TooLarge,
    UnsupportedBoundary,
)
from .fixtures import fixture_path
from .linalg import StateVector, fidelity
from .mps import Mps, mps_evaluate_pbc, mps_normality, transfer_spectrum
from .pauli import PauliString
from .simps import (
    Simps,
    simps_evaluate_pbc,
    simps_from_mps,
    simps_normality,
    simps_to_mps,
    solve_gauge,
)
from .tensorfile import ParseError, dumps, read_file, write_file

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONVERT = 3
EXIT_UNSUPPORTED = 4
EXIT_INTERNAL = 5

VERIFY_SIZES = (3, 4, 5, 6)
STRING_SEPARATIONS = (2, 3, 4)
MAX_LISTED_PATTERNS = 16


class _Exit(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """Fixed twelve-digit rendering, with negative zero cleaned up."""
    text = f"{x:.12f}"
    return text[1:] if text.startswith("-") and float(text) == 0.0 else text


def fmt_complex(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 5e-13:
        return fmt(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}j"


def _bits(table: np.ndarray) -> str:
    return "/".join("".join(str(int(x)) for x in row) for row in table)


def load_input(spec: str, fixture_dir: str | None) -> tuple[Mps | Simps, dict[str, str], str]:
    """Read a tensor file, falling back to a fixture id when no such file exists."""
    path = Path(spec)
    if not path.exists():
        try:
            path = fixture_path(spec, fixture_dir)
        except NotFound:
            raise _Exit(EXIT_PARSE, f"{spec}: no such file or fixture") from None
    try:
        obj, meta = read_file(path)
    except ParseError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc}") from exc
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc.strerror or exc}") from exc
    return obj, meta, str(path)


def _as_simps(obj: Mps | Simps) -> Simps:
    if isinstance(obj, Simps):
        return obj
    try:
        return simps_from_mps(obj)
    except (RankZero, InvalidInput) as exc:
        raise _Exit(EXIT_CONVERT, f"cannot convert to split-index form: {exc}") from exc


def _evaluate(obj: Mps | Simps, n: int) -> StateVector:
    return mps_evaluate_pbc(obj, n) if isinstance(obj, Mps) else simps_evaluate_pbc(obj, n)


def _bond(obj: Mps | Simps) -> str:
    return str(obj.bond_dim) if isinstance(obj, Mps) else "(" + ", ".join(str(c) for c in obj.chi) + ")"


# convert


def cmd_convert(args: argparse.Namespace, out: TextIO) -> int:
    obj, meta, source = load_input(args.input, args.fixture_dir)
    target = args.to or ("simps" if isinstance(obj, Mps) else "mps")
    try:
        if target == "simps":
            conv: Mps | Simps = obj if isinstance(obj, Simps) else simps_from_mps(obj)
        else:
            conv = obj if isinstance(obj, Mps) else simps_to_mps(obj)
    except (RankZero, InvalidInput) as exc:
        raise _Exit(EXIT_CONVERT, f"conversion failed: {exc}") from exc

    fids = []
    for n in VERIFY_SIZES:
        f = fidelity(_evaluate(obj, n), _evaluate(conv, n))
        fids.append((n, f))
    worst = min(f for _, f in fids)
    lines = [
        "[verification]",
        f"source: {source}",
        f"input: {'mps' if isinstance(obj, Mps) else 'simps'} bond {_bond(obj)}",
        f"output: {target} bond {_bond(conv)}",
    ]
    lines += [f"fidelity N={n}: {fmt(f)}" for n, f in fids]
    status = "ok" if worst >= 1.0 - 1e-9 else "FAILED"
    lines.append(f"status: {status}")

    if args.compare is not None:
        ref, _, ref_path = load_input(args.compare, args.fixture_dir)
        if not isinstance(conv, Simps) or not isinstance(ref, Simps):
            lines.append("gauge comparison: SKIPPED (needs two split-index tensors)")
        else:
            try:
                sol = solve_gauge(conv, ref)
                lines.append(f"gauge comparison with {ref_path}: residual {sol.residual:.3e}, null space {sol.null_dim}")
            except (NoGauge, SplitMpsError) as exc:
                lines.append(f"gauge comparison with {ref_path}: FAILED ({exc})")

    new_meta = dict(meta)
    new_meta["converted_from"] = Path(source).name
    new_meta["verification"] = "; ".join(f"N={n} fidelity {fmt(f)}" for n, f in fids)
    if args.output is not None:
        write_file(args.output, conv, new_meta)
        out.write("\n".join(lines) + "\n")
    else:
        out.write(dumps(conv, new_meta))
        sys.stderr.write("\n".join(lines) + "\n")
    return EXIT_OK if status == "ok" else EXIT_CONVERT


# analyze


def _section_normality(obj: Mps | Simps) -> list[str]:
    if isinstance(obj, Mps):
        rep = mps_normality(obj)
        lines = [f"mps: {rep.describe()}"]
    else:
        rep = simps_normality(obj)
        lines = [f"simps: {rep.describe()}"]
        try:
            m = simps_to_mps(obj)
            lines.append(f"equivalent mps bond dimension: {m.bond_dim}")
            lines.append(f"equivalent mps: {mps_normality(m).describe()}")
        except RankZero as exc:
            lines.append(f"equivalent mps: SKIPPED ({exc})")
    lines.append("span dimensions: " + ", ".join(f"L={n}:{k}" for n, k in rep.span_dims))
    return lines


def _section_spectrum(obj: Mps | Simps) -> list[str]:
    try:
        m = obj if isinstance(obj, Mps) else simps_to_mps(obj)
    except RankZero as exc:
        return [f"SKIPPED ({exc})"]
    rep = mps_normality(m)
    if not rep.is_normal:
        return [f"SKIPPED (tensor is {rep.describe()})"]
    try:
        vals = transfer_spectrum(m)
    except NonUnique as exc:
        return [f"SKIPPED ({exc})"]
    return [", ".join(fmt(v) for v in vals)]


def _section_symmetries(obj: Mps | Simps) -> list[str]:
    s = _as_simps(obj)
    lines = []
    try:
        found = sym.discover_z2_symmetries(s)
    except TooLarge as exc:
        return [f"SKIPPED ({exc})"]
    k = int(np.log2(len(found))) if found else 0
    lines.append(f"sign-pattern symmetries: {len(found)} (2^{k})")
    for u in found[:MAX_LISTED_PATTERNS]:
        lines.append(f"  {_bits(u.sign_bits())}")
    if len(found) > MAX_LISTED_PATTERNS:
        lines.append(f"  ... {len(found) - MAX_LISTED_PATTERNS} more")
    data = sym.as_psi_ab(s)
    if data is None:
        lines.append("pauli family: no")
        return lines
    ua, ub = sym.ab_symmetries(data)
    lines.append(f"pauli family: a={_bits(data.a)} b={_bits(data.b)}")
    for name, u in (("U^a", ua), ("U^b", ub)):
        try:
            g = solve_gauge(sym.apply_diagonal_symmetry(s, u), s)
            rep = PauliString.proportional_from_matrix(g.gauges[0])[0].label
        except (SplitMpsError, InvalidInput) as exc:
            rep = f"unavailable ({exc})"
        lines.append(f"{name} phases {_bits(u.sign_bits())}, virtual {rep}")
    return lines


def _ring_size(obs: sym.StringObservable) -> int:
    return max(8, obs.span)


def _section_string_order(obj: Mps | Simps) -> list[str]:
    s = _as_simps(obj)
    data = sym.as_psi_ab(s)
    if data is None:
        return ["SKIPPED (tensors are not Pauli matrices)"]
    ua, ub = sym.ab_symmetries(data)
    lines = []
    for name, u in (("S^a", ua), ("S^b", ub)):
        for sep in STRING_SEPARATIONS:
            try:
                obs = sym.string_observable(s, u, 0, sep)
            except (NotInvertible, SplitMpsError) as exc:
                lines.append(f"{name} r-l={sep}: SKIPPED ({exc})")
                continue
            n = _ring_size(obs)
            try:
                val = sym.string_order_expectation(s, obs, n)
                bare = sym.bare_string_expectation(s, u, 0, sep, n)
            except TooLarge as exc:
                lines.append(f"{name} r-l={sep}: SKIPPED ({exc})")
                continue
            lines.append(
                f"{name} r-l={sep} N={n} windows {len(obs.left_window)}+{len(obs.right_window)}: "
                f"{fmt_complex(val)} (bare {fmt_complex(bare)})"
            )
    return lines


SECTIONS = (
    ("normality", _section_normality),
    ("spectrum", _section_spectrum),
    ("symmetries", _section_symmetries),
    ("string-order", _section_string_order),
)


def cmd_analyze(args: argparse.Namespace, out: TextIO) -> int:
    obj, _, source = load_input(args.input, args.fixture_dir)
    chosen = [name for name, _ in SECTIONS if getattr(args, name.replace("-", "_"))]
    if not chosen:
        chosen = [name for name, _ in SECTIONS]
    kind = "mps" if isinstance(obj, Mps) else "simps"
    lines = [f"source: {source}", f"kind: {kind}, d={obj.d}, bond {_bond(obj)}"]
    for name, fn in SECTIONS:
        if name not in chosen:
            continue
        lines.append(f"[{name}]")
        try:
            lines += fn(obj)
        except _Exit as exc:
            lines.append(f"SKIPPED ({exc})")
        except UnsupportedBoundary as exc:
            lines.append(f"SKIPPED ({exc})")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


# wire


def parse_state(text: str) -> np.ndarray:
    """Comma-separated complex amplitudes such as ``1,1j`` or ``0.6,0.8``."""
    try:
        vec = np.array([complex(p.strip().replace(" ", "")) for p in text.split(",")], dtype=np.complex128)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, f"cannot parse input state {text!r}") from exc
    if np.linalg.norm(vec) == 0:
        raise _Exit(EXIT_PARSE, "input state is zero")
    return vec / np.linalg.norm(vec)


def _byproduct_text(b: PauliString | np.ndarray | None) -> str:
    if b is None:
        return "undefined"
    if isinstance(b, PauliString):
        return b.label
    rows = ["[" + ", ".join(fmt_complex(z) for z in row) + "]" for row in b]
    return "[" + ", ".join(rows) + "]"


def cmd_wire(args: argparse.Namespace, out: TextIO) -> int:
    obj, _, source = load_input(args.input, args.fixture_dir)
    s = _as_simps(obj)
    if s.uniform_chi is None:
        raise _Exit(EXIT_UNSUPPORTED, f"wire simulation needs uniform chi, got {s.chi}")
    if args.outcomes is not None:
        rec = wire.MeasurementRecord.from_string(args.outcomes)
        if args.n is not None and args.n != len(rec):
            raise _Exit(EXIT_PARSE, f"--n {args.n} does not match {len(rec)} outcomes")
        if any(x >= s.d for x in rec.outcomes):
            raise _Exit(EXIT_PARSE, f"outcomes must lie in 0..{s.d - 1}")
    else:
        n = args.n if args.n is not None else 8
        if n < 2:
            raise _Exit(EXIT_PARSE, "--n must be at least 2")
        seed = args.sample if args.sample is not None else 0
        rec = wire.sample_outcomes(s, n, seed)
    chi = s.uniform_chi
    if args.input_state is not None:
        vec = parse_state(args.input_state)
        if vec.shape != (chi,):
            raise _Exit(EXIT_PARSE, f"input state needs {chi} amplitudes")
    else:
        vec = np.zeros(chi, dtype=np.complex128)
        vec[0] = 1.0

    res = wire.measure_bulk(s, rec)
    lines = [
        f"source: {source}",
        f"outcomes: {rec}",
        f"probability: {fmt(res.probability)}",
    ]
    if not res.defined:
        lines.append("byproduct: undefined (zero-probability outcome)")
        lines.append("teleportation fidelity: SKIPPED (zero-probability outcome)")
        out.write("\n".join(lines) + "\n")
        return EXIT_OK
    lines.append(f"byproduct: {_byproduct_text(res.byproduct)}")
    lines.append(
        "decoded bits: " + (f"x={res.decoded_bits[0]} z={res.decoded_bits[1]}" if res.decoded_bits else "n/a")
    )
    lines.append(f"boundary entanglement (bits): {fmt(res.entanglement_bits())}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        _, fid = wire.teleport(s, vec, rec)
    if caught:
        lines.append(f"warning: {caught[0].message}")
    lines.append(f"teleportation fidelity: {fmt(fid)}")
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitmps", description=__doc__.splitlines()[0])
    parser.add_argument("--fixture-dir", default=None, help="directory searched for fixture ids")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert between MPS and split-index form")
    p.add_argument("input", help="tensor file or fixture id")
    p.add_argument("--to", choices=("mps", "simps"), default=None)
    p.add_argument("-o", "--output", default=None, help="write the converted file here")
    p.add_argument("--compare", default=None, help="split-index file or fixture to gauge-compare against")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("analyze", help="normality, spectrum, symmetry and string-order report")
    p.add_argument("input", help="tensor file or fixture id")
    for name, _ in SECTIONS:
        p.add_argument(f"--{name}", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("wire", help="simulate bulk measurement and teleportation")
    p.add_argument("input", help="tensor file or fixture id")
    p.add_argument("--n", type=int, default=None, help="number of measured sites")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--outcomes", default=None, help='outcome string such as "0110"')
    group.add_argument("--sample", type=int, default=None, metavar="SEED", help="sample outcomes with this seed")
    p.add_argument("--input-state", default=None, help="comma-separated amplitudes, default |0>")
    p.set_defaults(func=cmd_wire)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except _Exit as exc:
        sys.stderr.write(f"splitmps: {exc}\n")
        return exc.code
    except (UnsupportedBoundary, TooLarge) as exc:
        sys.stderr.write(f"splitmps: {exc}\n")
        return EXIT_UNSUPPORTED
    except InvalidInput as exc:
        sys.stderr.write(f"splitmps: {exc}\n")
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001
        sys.stderr.write(f"splitmps: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
