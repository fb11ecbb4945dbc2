"""Command-line front end.

    lfsl --spec model.json spectrum
    lfsl --model decaying_driven_qubit --param Omega=1 --param g=0.5 --param gamma=0.2 sicpovm
    lfsl frustration --alpha1 0.5 --alpha2 0.5

Exit status is 0 on success, 2 for malformed input and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from . import _format
from .errors import LfslError, NumericalFailure
from .frustration import MIN_GRID, frustration_scan
from .hilbert import HilbertSpace, OperatorMatrix
from .lattice import export_dot, export_json, extract
from .liouville import Jump, LindbladModel, Superket, build_liouvillian
from .models import build_zoo
from .representations import (
    bloch_frame,
    bloch_generator,
    bloch_vector,
    builtin_sic_qubit,
    sic_from_fiducials,
    sic_generator,
    sic_steady,
)
from .spectral import DEFAULT_NULL_TOL, decompose, expectation, purity
from .symmetry import SYMMETRY_TOL, classify, classify_discrete

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3
STATE_TOL = 1e-10
NEGATIVITY_TOL = 1e-8


class SpecError(LfslError, ValueError):
    """Malformed input file or flag, addressed by line or field."""


@dataclass(frozen=True)
class LoadedModel:
    model: LindbladModel
    observables: Mapping[str, OperatorMatrix]


# -- input parsing --------------------------------------------------------------


def _read_json(path: str, what: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{what} {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _complex_matrix(value: Any, field: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise SpecError(f"field {field}: expected a non-empty list of rows")
    n = dim if dim is not None else len(value)
    if len(value) != n:
        raise SpecError(f"field {field}: expected {n} rows, got {len(value)}")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise SpecError(f"field {field}[{i}]: expected a row of {n} [re, im] pairs")
        for j, z in enumerate(row):
            out[i, j] = _complex(z, f"{field}[{i}][{j}]")
    return out


def _complex(z: Any, field: str) -> complex:
    if (not isinstance(z, list) or len(z) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)):
        raise SpecError(f"field {field}: expected an [re, im] pair of numbers")
    return complex(z[0], z[1])


def _number(value: Any, field: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise SpecError(f"field {field}: expected a number")
    return float(value)


def parse_spec(data: Any) -> LoadedModel:
    """Turn a decoded spec document into a model and its named observables."""
    if not isinstance(data, dict):
        raise SpecError("top level: expected a JSON object")
    keys = set(data) & {"zoo", "custom"}
    if len(keys) != 1:
        raise SpecError('top level: expected exactly one of "zoo" or "custom"')
    if "zoo" in data:
        name = data["zoo"]
        if not isinstance(name, str):
            raise SpecError("field zoo: expected a model name")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise SpecError("field params: expected an object")
        entry = build_zoo(name, params)
        return LoadedModel(entry.model, dict(entry.observables))
    return _parse_custom(data["custom"])


def _parse_custom(c: Any) -> LoadedModel:
    if not isinstance(c, dict):
        raise SpecError("field custom: expected an object")
    if "dim" not in c:
        raise SpecError("field custom.dim: missing")
    dim = c["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise SpecError("field custom.dim: expected a positive integer")
    if "hamiltonian" not in c:
        raise SpecError("field custom.hamiltonian: missing")
    space = HilbertSpace.generic(dim)
    h = _complex_matrix(c["hamiltonian"], "custom.hamiltonian", dim)
    jumps_in = c.get("jumps", [])
    if not isinstance(jumps_in, list):
        raise SpecError("field custom.jumps: expected a list")
    jumps = []
    for k, j in enumerate(jumps_in):
        field = f"custom.jumps[{k}]"
        if not isinstance(j, dict) or "matrix" not in j or "rate" not in j:
            raise SpecError(f"field {field}: expected an object with matrix and rate")
        op = _complex_matrix(j["matrix"], f"{field}.matrix", dim)
        rate = _number(j["rate"], f"{field}.rate")
        label = str(j.get("label", f"L{k}"))
        jumps.append(Jump(OperatorMatrix(space, op, label), rate, label))
    observables = {}
    for name, mat in (c.get("observables") or {}).items():
        observables[name] = OperatorMatrix(space, _complex_matrix(mat, f"custom.observables.{name}", dim), name)
    model = LindbladModel(space, OperatorMatrix(space, h, "H"), tuple(jumps), str(c.get("name", "custom")))
    model.validate()
    return LoadedModel(model, observables)


def _param_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_model(args) -> LoadedModel:
    if args.spec and args.model:
        raise SpecError("give either --spec or --model, not both")
    if args.spec:
        return parse_spec(_read_json(args.spec, "spec file"))
    if args.model:
        params = {}
        for item in args.param or []:
            key, sep, value = item.partition("=")
            if not sep or not key:
                raise SpecError(f"--param {item!r}: expected key=value")
            params[key] = _param_value(value)
        return parse_spec({"zoo": args.model, "params": params})
    raise SpecError("this command needs a model: pass --spec FILE or --model NAME")


def named_state(name: str, model: LindbladModel) -> Superket:
    space = model.space
    d = space.total_dim
    if name == "maximally-mixed":
        return Superket(space, (np.eye(d) / d).reshape(-1))
    if name == "plus":
        v = np.ones(d) / np.sqrt(d)
        return Superket(space, np.outer(v, v).reshape(-1))
    if name == "ground":
        _, vecs = np.linalg.eigh(model.hamiltonian.entries)
        v = vecs[:, 0]
        return Superket(space, np.outer(v, v.conj()).reshape(-1))
    if name.startswith("fock:"):
        try:
            idx = tuple(int(x) for x in name[5:].split(","))
        except ValueError as exc:
            raise SpecError(f"--rho0 {name!r}: indices must be integers") from exc
        if len(idx) != len(space.dims) or any(not 0 <= i < n for i, n in zip(idx, space.dims)):
            raise SpecError(f"--rho0 {name!r}: expected {len(space.dims)} indices within {space.dims}")
        k = space.ravel(idx)
        rho = np.zeros((d, d), dtype=complex)
        rho[k, k] = 1
        return Superket(space, rho.reshape(-1))
    raise SpecError(f"--rho0 {name!r}: unknown state; use fock:n[,m], ground, maximally-mixed, plus or a file")


def load_state(text: str, model: LindbladModel) -> Superket:
    if os.path.isfile(text):
        rho = _complex_matrix(_read_json(text, "state file"), "rho0", model.space.total_dim)
        ket = Superket(model.space, rho.reshape(-1))
    else:
        ket = named_state(text, model)
    check_physical(ket)
    return ket


def check_physical(rho: Superket) -> None:
    m = rho.matrix()
    if abs(rho.trace() - 1) > STATE_TOL:
        raise SpecError(f"initial state has trace {rho.trace():.12g}, expected 1")
    if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
        raise SpecError("initial state is not Hermitian")
    low = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    if low < -NEGATIVITY_TOL:
        raise SpecError(f"initial state has a negative eigenvalue {low:.3g}")


# -- output helpers -------------------------------------------------------------


def _dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _real_list(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return [_format.clean(x) for x in a]
    return [_real_list(row) for row in a]


def _sorted_eigenvalues(w: np.ndarray) -> list:
    pairs = [_format.pair(z) for z in w]
    return sorted(pairs, key=lambda p: (-p[0], p[1]))


# -- commands -------------------------------------------------------------------


def cmd_spectrum(args) -> str:
    loaded = load_model(args)
    L = build_liouvillian(loaded.model)
    dec = decompose(L, args.tol or DEFAULT_NULL_TOL)
    return _dumps({
        "model": loaded.model.name,
        "dim": L.dim,
        "eigenvalues": _sorted_eigenvalues(dec.eigenvalues),
        "steady_dim": dec.steady_dim,
        "conserved_dim": dec.conserved_dim,
    })


def cmd_lattice(args) -> str:
    L = build_liouvillian(load_model(args).model)
    if args.threshold is None:
        g = extract(L)
    else:
        if args.threshold < 0:
            raise SpecError("--threshold must be non-negative")
        g = extract(L, args.threshold, relative=False)
    return export_dot(g) if args.format == "dot" else export_json(g)


def cmd_evolve(args) -> str:
    loaded = load_model(args)
    model = loaded.model
    L = build_liouvillian(model)
    if args.t < 0 or not np.isfinite(args.t):
        raise SpecError("--t must be a finite non-negative time")
    if args.steps < 1:
        raise SpecError("--steps must be at least 1")
    rho = load_state(args.rho0, model)
    names = sorted(loaded.observables) if args.observables is None else [
        s for s in args.observables.split(",") if s
    ]
    for n in names:
        if n not in loaded.observables:
            raise SpecError(f"--observables: unknown observable {n!r}; known: {', '.join(sorted(loaded.observables))}")
    dec = decompose(L, args.tol or DEFAULT_NULL_TOL)
    conserved = [u.entries for u in dec.null_left]

    header = ["t", "trace", "purity"]
    for n in names:
        header += [f"{n}_re", f"{n}_im"]
    for k in range(len(conserved)):
        header += [f"J{k}_re", f"J{k}_im"]

    steps = 1 if args.t == 0 else args.steps
    times = [0.0] if args.t == 0 else [args.t * k / steps for k in range(steps + 1)]
    step = scipy.linalg.expm(L.entries * (args.t / steps)) if args.t else None

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    state = rho.entries
    for k, t in enumerate(times):
        if k:
            state = step @ state
        ket = Superket(model.space, state)
        tr = ket.trace()
        if abs(tr - 1) > STATE_TOL:
            raise NumericalFailure("evolution lost trace", {"t": t, "trace": tr})
        row = [_format.text(t), _format.text(tr.real), _format.text(purity(ket))]
        for n in names:
            z = expectation(loaded.observables[n], ket)
            row += [_format.text(z.real), _format.text(z.imag)]
        for u in conserved:
            z = np.vdot(u, state)
            row += [_format.text(z.real), _format.text(z.imag)]
        w.writerow(row)
    return buf.getvalue()


def _povm_for(args, dim: int):
    if args.fiducials:
        raw = _read_json(args.fiducials, "fiducial file")
        if not isinstance(raw, list):
            raise SpecError("fiducial file: expected a list of state vectors")
        vecs = []
        for i, v in enumerate(raw):
            if not isinstance(v, list):
                raise SpecError(f"field fiducials[{i}]: expected a list of [re, im] pairs")
            vecs.append([_complex(z, f"fiducials[{i}][{j}]") for j, z in enumerate(v)])
        povm = sic_from_fiducials(vecs)
        if povm.dim != dim:
            raise SpecError(f"fiducials have dimension {povm.dim}, the model has {dim}")
        return povm
    if dim != 2:
        raise SpecError(f"no built-in SIC-POVM for dimension {dim}; pass --fiducials FILE")
    return builtin_sic_qubit()


def cmd_sicpovm(args) -> str:
    L = build_liouvillian(load_model(args).model)
    povm = _povm_for(args, L.dim)
    M, m = sic_generator(L, povm)
    st = sic_steady(M, m, povm, L)
    out = {"M": _real_list(M), "m": _real_list(m)}
    if st.degenerate:
        out["p_ss"] = "degenerate"
        out["steady_basis"] = [_real_list(p) for p in st.basis]
    else:
        out["p_ss"] = _real_list(st.probabilities)
    return _dumps(out)


def cmd_bloch(args) -> str:
    L = build_liouvillian(load_model(args).model)
    frame = bloch_frame(L.dim)
    gen = bloch_generator(L, frame)
    dec = decompose(L, args.tol or DEFAULT_NULL_TOL)
    return _dumps({
        "dim": L.dim,
        "generator": _real_list(gen),
        "steady_states": [_real_list(bloch_vector(v, frame)) for v in dec.steady_states()],
    })


def cmd_symmetry(args) -> str:
    loaded = load_model(args)
    model = loaded.model
    build_liouvillian(model)
    if args.generator_file:
        op = OperatorMatrix(model.space, _complex_matrix(_read_json(args.generator_file, "generator file"),
                                                         "generator", model.space.total_dim), "S")
    elif args.generator:
        if args.generator not in loaded.observables:
            raise SpecError(f"--generator: unknown observable {args.generator!r}; "
                            f"known: {', '.join(sorted(loaded.observables))}")
        op = loaded.observables[args.generator]
    else:
        raise SpecError("pass --generator NAME or --generator-file FILE")
    tol = args.tol or SYMMETRY_TOL
    if args.discrete:
        rep = classify_discrete(model, op, tol)
        return _dumps({
            "generator": args.generator or "file",
            "kind": "discrete",
            "classification": rep.classification,
            "phases": [_format.clean(p) for p in rep.phases],
            "hamiltonian_residual": _format.clean(rep.hamiltonian_residual),
            "jump_residuals": [_format.clean(r) for r in rep.residuals],
        })
    rep = classify(model, op, tol)
    return _dumps({
        "generator": args.generator or "file",
        "kind": "continuous",
        "classification": rep.classification,
        "alphas": [_format.pair(a) for a in rep.alphas],
        "hamiltonian_residual": _format.clean(rep.hamiltonian_residual),
        "jump_residuals": [_format.clean(r) for r in rep.commutator_residuals],
        "conserved_residual": _format.clean(rep.conserved_residual),
    })


def cmd_frustration(args) -> str:
    if args.grid < MIN_GRID:
        raise SpecError(f"--grid must be at least {MIN_GRID}")
    rep = frustration_scan(args.alpha1, args.alpha2, args.grid)
    d = rep.to_dict()
    for k in ("min_per_term_residual", "min_total_residual", "threshold"):
        d[k] = _format.clean(d[k])
    d["alphas"] = [_format.clean(a) for a in d["alphas"]]
    d["argmin_phases"] = [_format.clean(a) for a in d["argmin_phases"]]
    return _dumps(d)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "lattice": cmd_lattice,
    "evolve": cmd_evolve,
    "sicpovm": cmd_sicpovm,
    "bloch": cmd_bloch,
    "symmetry": cmd_symmetry,
    "frustration": cmd_frustration,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SpecError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", metavar="FILE", default=argparse.SUPPRESS, help="JSON model spec")
    common.add_argument("--model", metavar="NAME", default=argparse.SUPPRESS, help="zoo model name")
    common.add_argument("--param", metavar="KEY=VALUE", action="append", default=argparse.SUPPRESS,
                        help="zoo model parameter (repeatable)")
    common.add_argument("--out", metavar="FILE", default=argparse.SUPPRESS, help="write output here")
    common.add_argument("--tol", metavar="REAL", type=float, default=argparse.SUPPRESS,
                        help="null-space or symmetry tolerance")

    p = _Parser(prog="lfsl", description="Liouville Fock state lattice tools", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("spectrum", parents=[common], help="eigenvalues and null-space dimensions")

    s = sub.add_parser("lattice", parents=[common], help="export the lattice graph")
    s.add_argument("--format", choices=("dot", "json"), default="dot")
    s.add_argument("--threshold", type=float, default=None, help="absolute edge cut (default relative 1e-12)")

    s = sub.add_parser("evolve", parents=[common], help="time evolution as CSV")
    s.add_argument("--rho0", required=True, help="state file or fock:n[,m], ground, maximally-mixed, plus")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--steps", type=int, default=10)
    s.add_argument("--observables", default=None, help="comma-separated observable names (default: all)")

    s = sub.add_parser("sicpovm", parents=[common], help="SIC-POVM transition matrix and steady state")
    s.add_argument("--fiducials", metavar="FILE", default=None, help="JSON list of d² fiducial vectors")

    sub.add_parser("bloch", parents=[common], help="real Bloch-frame generator")

    s = sub.add_parser("symmetry", parents=[common], help="classify a symmetry generator")
    s.add_argument("--generator", default=None, help="name of a model observable")
    s.add_argument("--generator-file", default=None, metavar="FILE")
    s.add_argument("--discrete", action="store_true", help="treat the generator as a unitary")

    s = sub.add_parser("frustration", parents=[common], help="unit-cell frustration scan")
    s.add_argument("--alpha1", type=float, required=True)
    s.add_argument("--alpha2", type=float, required=True)
    s.add_argument("--grid", type=int, default=64)
    return p


def _threads() -> int | None:
    raw = os.environ.get("LFSL_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise SpecError(f"LFSL_THREADS={raw!r} is not an integer") from exc
    if n < 1:
        raise SpecError("LFSL_THREADS must be at least 1")
    return n


def run(argv: Sequence[str] | None = None) -> tuple[int, str, str]:
    """Run one command and return ``(status, stdout_text, stderr_text)``."""
    try:
        args = build_parser().parse_args(argv)
        for name in ("spec", "model", "param", "out", "tol"):
            if not hasattr(args, name):
                setattr(args, name, None)
        with threadpool_limits(limits=_threads()):
            text = COMMANDS[args.command](args)
    except NumericalFailure as exc:
        detail = "".join(f" {k}={v}" for k, v in sorted(exc.diagnostics.items()))
        return EXIT_NUMERICAL, "", f"lfsl: numerical failure: {exc}{detail}\n"
    except (LfslError, ValueError) as exc:
        return EXIT_INPUT, "", f"lfsl: error: {exc}\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            return EXIT_INPUT, "", f"lfsl: error: cannot write {args.out}: {exc.strerror}\n"
        return EXIT_OK, "", ""
    return EXIT_OK, text, ""


def main(argv: Sequence[str] | None = None) -> int:
    try:
        status, out, err = run(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
