"""Batch command-line front end.

Matrix documents are JSON objects with a ``kind`` tag (state, effect,
povm, kraus, choi, ket), dimensions, and row-major entries as [re, im]
pairs.  Output is canonical JSON (or CSV for flat tables) printed with
12 significant digits; identical seeds and flags give byte-identical
output.  Exit codes: 0 success, 2 validation failure, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .linalg import ATOL, NumericError
from . import linalg
from .channels import ChoiMatrix, KrausChannel, certify, qubit_cp_check
from .discrimination import helstrom, unambiguous_two_pure
from .entanglement import (
    BipartiteState,
    chsh_value,
    max_entangled_fraction,
    ppt,
    reduction_criterion,
    werner_report,
)
from .protocols import (
    b92,
    bb84,
    mean_king,
    private_quantum_channel,
    probabilistic_processor,
    superdense,
    teleport,
)
from .rand import haar_unitary
from .states import State

TOL_ENV_VAR = "QITOOLS_TOL"


class ValidationError(ValueError):
    """Malformed input document or invariant violation."""


# ---------------------------------------------------------------------------
# Matrix documents
# ---------------------------------------------------------------------------

def _entries_to_array(entries, rows: int, cols: int, path: str) -> np.ndarray:
    if len(entries) != rows * cols:
        raise ValidationError(f"{path}: expected {rows * cols} entries, got {len(entries)}")
    flat = []
    for i, pair in enumerate(entries):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ValidationError(f"{path}[{i}]: entries must be [re, im] pairs")
        flat.append(complex(pair[0], pair[1]))
    return np.array(flat, dtype=complex).reshape(rows, cols)


def _array_to_entries(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=complex).reshape(-1)]


def load_document(doc: dict, tol: float = ATOL):
    """Parse a matrix document into a toolkit object, or raise ValidationError."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("document must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "state":
            d = int(doc["dims"])
            m = _entries_to_array(doc["entries"], d, d, "entries")
            state = State(m)
            if "bipartite_dims" in doc:
                da, db = (int(x) for x in doc["bipartite_dims"])
                return BipartiteState(state, da, db)
            return state
        if kind == "ket":
            d = int(doc["dims"])
            v = _entries_to_array(doc["entries"], d, 1, "entries")
            n = np.linalg.norm(v)
            if abs(n - 1) > 1e-6:
                raise ValidationError(f"entries: ket norm is {n}, not 1")
            return v
        if kind == "effect":
            d = int(doc["dims"])
            m = _entries_to_array(doc["entries"], d, d, "entries")
            from .observables import Effect

            return Effect(m)
        if kind == "povm":
            d = int(doc["dims"])
            effs = [
                _entries_to_array(e, d, d, f"effects[{i}]")
                for i, e in enumerate(doc["effects"])
            ]
            outs = tuple(doc.get("outcomes", range(len(effs))))
            from .observables import Povm

            return Povm(outs, tuple(effs))
        if kind == "kraus":
            dims = doc["dims"]
            out_d, in_d = (int(dims[0]), int(dims[1])) if isinstance(dims, list) else (int(dims), int(dims))
            ops = [
                _entries_to_array(op, out_d, in_d, f"operators[{i}]")
                for i, op in enumerate(doc["operators"])
            ]
            return KrausChannel(tuple(ops))
        if kind == "choi":
            dims = doc["dims"]
            out_d, in_d = (int(dims[0]), int(dims[1])) if isinstance(dims, list) else (int(dims), int(dims))
            m = _entries_to_array(doc["entries"], out_d * in_d, out_d * in_d, "entries")
            return ChoiMatrix(m, in_d, out_d)
    except ValidationError:
        raise
    except (KeyError, TypeError) as err:
        raise ValidationError(f"missing or malformed field: {err}") from err
    except ValueError as err:
        raise ValidationError(f"{kind}: {err}") from err
    raise ValidationError(f"unknown document kind {kind!r}")


def dump_document(obj) -> dict:
    from .observables import Effect, Povm

    if isinstance(obj, State):
        return {"kind": "state", "dims": obj.dim, "entries": _array_to_entries(obj.matrix)}
    if isinstance(obj, Effect):
        return {"kind": "effect", "dims": obj.dim, "entries": _array_to_entries(obj.matrix)}
    if isinstance(obj, Povm):
        return {
            "kind": "povm",
            "dims": obj.dim,
            "outcomes": [str(x) for x in obj.outcomes],
            "effects": [_array_to_entries(e.matrix) for e in obj.effects],
        }
    if isinstance(obj, BipartiteState):
        doc = dump_document(obj.state)
        doc["bipartite_dims"] = [obj.dA, obj.dB]
        return doc
    if isinstance(obj, KrausChannel):
        return {
            "kind": "kraus",
            "dims": [obj.out_dim, obj.in_dim],
            "operators": [_array_to_entries(a) for a in obj.kraus_ops],
        }
    if isinstance(obj, ChoiMatrix):
        return {
            "kind": "choi",
            "dims": [obj.out_dim, obj.in_dim],
            "entries": _array_to_entries(obj.matrix),
        }
    if isinstance(obj, np.ndarray) and obj.ndim == 2 and obj.shape[1] == 1:
        return {"kind": "ket", "dims": obj.shape[0], "entries": _array_to_entries(obj)}
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as err:
        raise ValidationError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ValidationError(f"{path}: malformed JSON ({err})") from err


# ---------------------------------------------------------------------------
# Output formatting
# ---------------------------------------------------------------------------

def _round_sig(x: float) -> float:
    if x == 0 or not np.isfinite(x):
        return float(x)
    return float(f"{x:.12g}")


def _canonicalize(obj):
    if isinstance(obj, dict):
        return {str(k): _canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round_sig(float(obj))
    if isinstance(obj, complex):
        return [_round_sig(obj.real), _round_sig(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _canonicalize(obj.tolist())
    return obj


def emit(payload: dict, fmt: str) -> str:
    payload = _canonicalize(payload)
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        flat = _flatten(payload)
        writer.writerow(["key", "value"])
        for key, value in flat:
            writer.writerow([key, value])
        return buf.getvalue().rstrip("\n")
    raise ValidationError(f"unknown format {fmt!r}")


def _flatten(payload, prefix=""):
    rows = []
    if isinstance(payload, dict):
        for k in sorted(payload):
            rows.extend(_flatten(payload[k], f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(payload, list):
        if all(not isinstance(v, (dict, list)) for v in payload):
            rows.append((prefix.rstrip("."), json.dumps(payload)))
        else:
            for i, v in enumerate(payload):
                rows.extend(_flatten(v, f"{prefix}{i}."))
    else:
        rows.append((prefix.rstrip("."), payload))
    return rows


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_certify_channel(args) -> dict:
    doc = _read_json(args.infile)
    obj = load_document(doc)
    if args.rep == "kraus" and not isinstance(obj, KrausChannel):
        raise ValidationError("document does not hold a Kraus channel")
    if args.rep == "choi" and not isinstance(obj, ChoiMatrix):
        raise ValidationError("document does not hold a Choi matrix")
    report = certify(obj, tol=args.tol)
    return report


def _cmd_entanglement(args) -> dict:
    doc = _read_json(args.infile)
    obj = load_document(doc)
    da, db = (int(x) for x in args.dims.split(","))
    if isinstance(obj, State):
        obj = BipartiteState(obj, da, db)
    elif isinstance(obj, np.ndarray):
        obj = BipartiteState(State.from_ket(obj), da, db)
    if not isinstance(obj, BipartiteState):
        raise ValidationError("entanglement tests need a state document")
    tests = args.tests.split(",") if args.tests else ["ppt", "reduction"]
    out = {}
    for test in tests:
        if test == "ppt":
            is_ppt, min_eig = ppt(obj, tol=args.tol)
            out["ppt"] = {"is_ppt": is_ppt, "pt_min_eig": min_eig}
        elif test == "reduction":
            detected, e1, e2 = reduction_criterion(obj, tol=args.tol)
            out["reduction"] = {"detected": detected, "min_eigs": [e1, e2]}
        elif test == "mef":
            value = max_entangled_fraction(obj, rng=args.seed)
            out["mef"] = {"value": value, "entangled": value > 1 / obj.dA + 1e-6}
        elif test == "chsh":
            s2 = 1 / np.sqrt(2)
            value = chsh_value(obj, (1, 0, 0), (0, 1, 0), (s2, s2, 0), (s2, -s2, 0))
            out["chsh"] = {"value": value, "entangled": value < -args.tol}
        else:
            raise ValidationError(f"unknown entanglement test {test!r}")
    return out


def _cmd_discriminate(args) -> dict:
    obj1 = load_document(_read_json(args.s1))
    obj2 = load_document(_read_json(args.s2))
    if args.mode == "minerror":
        rho1 = obj1 if isinstance(obj1, State) else State.from_ket(obj1)
        rho2 = obj2 if isinstance(obj2, State) else State.from_ket(obj2)
        result = helstrom(rho1, rho2, eta=args.eta)
    else:
        if not (isinstance(obj1, np.ndarray) and isinstance(obj2, np.ndarray)):
            raise ValidationError("unambiguous discrimination expects ket documents")
        result = unambiguous_two_pure(obj1, obj2, eta=args.eta)
    return {
        "mode": args.mode,
        "eta": args.eta,
        "p_success": result.p_success,
        "p_error": result.p_error,
        "outcomes": [str(x) for x in result.povm.outcomes],
        "effects": [_array_to_entries(e.matrix) for e in result.povm.effects],
    }


def _cmd_werner(args) -> dict:
    return werner_report(args.d, args.mu, tol=args.tol)


def _cmd_qubit_channel(args) -> dict:
    lmbda = [float(x) for x in args.lmbda.split(",")]
    t = [float(x) for x in args.t.split(",")]
    if len(lmbda) != 3 or len(t) != 3:
        raise ValidationError("--lambda and --t both need three comma-separated reals")
    report = qubit_cp_check(lmbda, t)
    return {
        "cp": report["cp"],
        "choi_min_eig": report["choi_min_eig"],
        "inequalities": report["inequalities"],
    }


def _cmd_demo(args) -> dict:
    name = args.name
    if name == "teleport":
        report = teleport(State.maximally_mixed(args.d), rng=args.seed)
    elif name == "superdense":
        report = superdense(args.message, rng=args.seed)
    elif name == "bb84":
        eve = "intercept_resend" if args.eve else "none"
        report = bb84(args.rounds, eve=eve, rng=args.seed)
    elif name == "b92":
        report = b92(args.rounds, args.overlap, rng=args.seed)
    elif name == "pqc":
        report = private_quantum_channel(args.d, args.rounds, rng=args.seed)
    elif name == "meanking":
        report = mean_king(rng=args.seed)
    elif name == "processor":
        target = haar_unitary(args.d, np.random.default_rng(args.seed))
        report = probabilistic_processor(args.d, target, rng=args.seed)
    else:
        raise ValidationError(f"unknown demo {name!r}")
    return report.to_dict()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qitools", description=__doc__)
    parser.add_argument("--tol", type=float, default=None, help="numerical tolerance")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify-channel", help="CP/TP/unitality report for a channel")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rep", choices=["kraus", "choi"], default=None)
    p.set_defaults(func=_cmd_certify_channel)

    p = sub.add_parser("entanglement", help="entanglement tests on a bipartite state")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--dims", required=True, help="dA,dB")
    p.add_argument("--tests", default=None, help="comma list: ppt,reduction,mef,chsh")
    p.set_defaults(func=_cmd_entanglement)

    p = sub.add_parser("discriminate", help="two-state discrimination schemes")
    p.add_argument("--s1", required=True)
    p.add_argument("--s2", required=True)
    p.add_argument("--mode", choices=["minerror", "unambiguous"], required=True)
    p.add_argument("--eta", type=float, default=0.5)
    p.set_defaults(func=_cmd_discriminate)

    p = sub.add_parser("werner", help="full report on a Werner state")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.set_defaults(func=_cmd_werner)

    p = sub.add_parser("demo", help="protocol simulations")
    p.add_argument(
        "name",
        choices=["teleport", "superdense", "bb84", "b92", "pqc", "meanking", "processor"],
    )
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--eve", action="store_true")
    p.add_argument("--overlap", type=float, default=0.5)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--message", type=int, default=0)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("qubit-channel", help="CP check for a diagonal qubit map")
    p.add_argument("--lambda", dest="lmbda", required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(func=_cmd_qubit_channel)

    return parser


def _merge_value_flags(argv):
    """Join flags with values that start with '-' (e.g. --lambda -1,-1,-1)."""
    merged = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in ("--lambda", "--t") and i + 1 < len(argv):
            merged.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            merged.append(token)
    return merged


def run(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(_merge_value_flags(list(argv)))
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    if args.tol is None:
        # Flag takes precedence; the environment variable is the fallback.
        args.tol = float(os.environ.get(TOL_ENV_VAR, ATOL))
    try:
        payload = args.func(args)
        print(emit(payload, args.format))
        return 0
    except ValidationError as err:
        print(json.dumps({"error": "validation", "detail": str(err)}), file=sys.stderr)
        return 2
    except ValueError as err:
        print(json.dumps({"error": "validation", "detail": str(err)}), file=sys.stderr)
        return 2
    except NumericError as err:
        print(json.dumps({"error": "numeric", "detail": str(err)}), file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as err:
        print(json.dumps({"error": "numeric", "detail": str(err)}), file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
