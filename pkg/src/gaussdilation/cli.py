"""Batch command-line interface with deterministic reports.

Subcommands: ``analyze``, ``dilate``, ``purify``, ``verify``, ``choi`` and
``random``.  Channel files are JSON with an explicit ``"ordering": "qqpp"``
tag so the coordinate convention is load-bearing rather than implicit.  All
reports are emitted on standard output in a canonical serialization (sorted
keys, 17-significant-digit reals, row-major matrices), so identical inputs
and flags produce byte-identical output.

Exit codes: 0 success, 2 channel fails complete positivity, 3 parse or usage
error, 4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import (
    GaussianChannel,
    kernel_checks,
    mode_counts,
    random_channel,
    validate_cp,
)
from .dilation import Dilation, choi_covariance, mixed_dilation, pure_dilation, qmin_via_choi, verify_dilation
from .errors import InvalidChannelError, ToleranceError, VerificationError
from .matcore import Tolerance, williamson
from .purify import minimal_purification

__all__ = ["FileFormatError", "Report", "parse_channel_file", "parse_covariance_file",
           "parse_dilation_file", "emit_report", "run", "main"]


class FileFormatError(ValueError):
    """Input file is malformed: bad JSON, wrong shapes, or wrong ordering tag."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


@dataclass
class Report:
    """One emitted report: command, input digest, tolerance echo, payload, status."""

    command: str
    input_digest: str
    tolerance: Tolerance
    payload: dict
    status: str


# ---------------------------------------------------------------------------
# Canonical serialization
# ---------------------------------------------------------------------------


def _canonical_json(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not np.isfinite(value):
            raise ValueError("reports must not contain non-finite numbers")
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _canonical_json(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical_json(item) for item in obj) + "]"
    if isinstance(obj, dict):
        parts = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            parts.append(json.dumps(key) + ":" + _canonical_json(obj[key]))
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _text_value(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _flatten_payload(prefix: str, value, lines: list[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten_payload(prefix + key + ".", value[key], lines)
        return
    name = prefix[:-1]
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, list) and value and isinstance(value[0], list):
        lines.append(f"{name}: {len(value)}x{len(value[0])} matrix")
    elif isinstance(value, list):
        lines.append(f"{name} = [{', '.join(_text_value(v) for v in value)}]")
    elif value is None:
        lines.append(f"{name} = n/a")
    else:
        lines.append(f"{name} = {_text_value(value)}")


def emit_report(report: Report, fmt: str = "json") -> str:
    """Render a report deterministically as canonical JSON or fixed-layout text."""
    if fmt == "json":
        doc = {
            "command": report.command,
            "input_digest": report.input_digest,
            "tolerance": {
                "rank_rel": report.tolerance.rank_rel,
                "psd_abs": report.tolerance.psd_abs,
                "residual": report.tolerance.residual,
            },
            "payload": report.payload,
            "status": report.status,
        }
        return _canonical_json(doc) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    tol = report.tolerance
    lines = [
        f"command: {report.command}",
        f"status: {report.status}",
        f"input_digest: {report.input_digest}",
        f"tolerance: rank_rel={tol.rank_rel:g} psd_abs={tol.psd_abs:g} residual={tol.residual:g}",
    ]
    payload_lines: list[str] = []
    for key in sorted(report.payload):
        _flatten_payload(key + ".", report.payload[key], payload_lines)
    return "\n".join(lines + payload_lines) + "\n"


# ---------------------------------------------------------------------------
# Input parsing
# ---------------------------------------------------------------------------


def _load_json(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FileFormatError("top-level JSON value must be an object")
    return obj


def _read_source(source) -> str:
    text = str(source)
    if text == "-":
        return sys.stdin.read()
    if text.lstrip().startswith("{"):
        return text
    path = Path(text)
    if not path.exists():
        raise FileFormatError(f"no such file: {text}")
    return path.read_text(encoding="utf-8")


def _matrix_field(obj: dict, key: str, shape: tuple[int, int]) -> np.ndarray:
    if key not in obj:
        raise FileFormatError(f"missing field {key!r}")
    try:
        arr = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"field {key!r} is not a numeric array: {exc}") from exc
    if arr.size == 0:
        arr = np.zeros(shape)
    if arr.shape != shape:
        raise FileFormatError(f"field {key!r} has shape {arr.shape}, expected {shape}")
    return arr


def _check_header(obj: dict) -> int:
    if obj.get("ordering") != "qqpp":
        raise FileFormatError('file must carry "ordering": "qqpp"')
    n = obj.get("n")
    if not isinstance(n, int) or n < 1:
        raise FileFormatError(f'field "n" must be a positive integer, got {n!r}')
    return n


def _channel_from_text(text: str, tol: Tolerance) -> GaussianChannel:
    obj = _load_json(text)
    if "payload" in obj and isinstance(obj["payload"], dict) and "channel" in obj["payload"]:
        obj = obj["payload"]["channel"]
        if not isinstance(obj, dict):
            raise FileFormatError("wrapped channel payload is not an object")
    n = _check_header(obj)
    X = _matrix_field(obj, "X", (2 * n, 2 * n))
    Y = _matrix_field(obj, "Y", (2 * n, 2 * n))
    v = None
    if "v" in obj and obj["v"] is not None:
        v = np.asarray(obj["v"], dtype=float)
        if v.shape != (2 * n,):
            raise FileFormatError(f'field "v" has shape {v.shape}, expected ({2 * n},)')
    try:
        return GaussianChannel(X=X, Y=Y, v=v, tol=tol)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc


def parse_channel_file(source, tol: Tolerance = Tolerance()) -> GaussianChannel:
    """Parse a channel from a JSON file path or JSON text.

    Accepts either a bare channel object {n, ordering, X, Y, v?} or a report
    produced by the ``random`` subcommand (whose payload carries a channel),
    so generated channels can be piped straight back in.  Y is symmetrized
    when its asymmetry is below tolerance and rejected otherwise; complete
    positivity is *not* checked here.
    """
    return _channel_from_text(_read_source(source), tol)


def _covariance_from_text(text: str, tol: Tolerance) -> tuple[int, np.ndarray]:
    obj = _load_json(text)
    n = _check_header(obj)
    cov = _matrix_field(obj, "cov", (2 * n, 2 * n))
    asym = np.max(np.abs(cov - cov.T)) if cov.size else 0.0
    if asym > tol.residual * (1.0 + np.max(np.abs(cov))):
        raise FileFormatError("covariance matrix is not symmetric within tolerance")
    return n, (cov + cov.T) / 2.0


def parse_covariance_file(source, tol: Tolerance = Tolerance()) -> tuple[int, np.ndarray]:
    """Parse {n, ordering, cov} from a JSON file path or text."""
    return _covariance_from_text(_read_source(source), tol)


def _dilation_from_text(text: str) -> Dilation:
    obj = _load_json(text)
    if "payload" in obj and isinstance(obj["payload"], dict):
        obj = obj["payload"]
    for key in ("kind", "n", "env_modes"):
        if key not in obj:
            raise FileFormatError(f"dilation file is missing field {key!r}")
    kind = obj["kind"]
    if kind not in ("pure", "mixed"):
        raise FileFormatError(f"dilation kind must be 'pure' or 'mixed', got {kind!r}")
    n, q = obj["n"], obj["env_modes"]
    if not isinstance(n, int) or not isinstance(q, int) or n < 1 or q < 0:
        raise FileFormatError("dilation mode counts must be integers (n >= 1, env_modes >= 0)")
    total = 2 * n + 2 * q
    mu = np.asarray(obj.get("mu", []), dtype=float).reshape(-1)
    mu_o = np.asarray(obj.get("mu_o", []), dtype=float).reshape(-1)
    return Dilation(
        kind=kind, n=n, env_modes=q,
        sigma_E=_matrix_field(obj, "sigma_E", (2 * q, 2 * q)),
        s2=_matrix_field(obj, "s2", (2 * n, 2 * q)),
        S=_matrix_field(obj, "S", (total, total)),
        gamma_E=_matrix_field(obj, "gamma_E", (2 * q, 2 * q)),
        mu=mu, mu_o=mu_o,
    )


def parse_dilation_file(source) -> Dilation:
    """Rebuild a Dilation from the JSON report written by the ``dilate`` command."""
    return _dilation_from_text(_read_source(source))


def _digest(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for chunk in chunks:
        h.update(chunk)
        h.update(b"\x00")
    return h.hexdigest()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _channel_dict(ch: GaussianChannel) -> dict:
    return {
        "n": ch.n,
        "ordering": "qqpp",
        "X": ch.X,
        "Y": ch.Y,
        "v": ch.v,
    }


def _dilation_dict(ch: GaussianChannel, d: Dilation, tol: Tolerance) -> dict:
    check = verify_dilation(ch, d, n_states=20, seed=0, tol=tol)
    return {
        "kind": d.kind,
        "n": d.n,
        "env_modes": d.env_modes,
        "mu": d.mu,
        "mu_o": d.mu_o,
        "sigma_E": d.sigma_E,
        "s2": d.s2,
        "S": d.S,
        "gamma_E": d.gamma_E,
        "check": {
            "residual_sigma": check.residual_sigma,
            "residual_noise": check.residual_noise,
            "residual_symplectic": check.residual_symplectic,
            "uncertainty_ok": check.uncertainty_ok,
            "purity_ok": check.purity_ok,
            "action_max_err": check.action_max_err,
            "ok": check.ok,
        },
    }


def _cmd_analyze(args, tol: Tolerance) -> tuple[Report, int]:
    text = _read_source(args.file)
    ch = _channel_from_text(text, tol)
    digest = _digest(text.encode("utf-8"))
    cp = validate_cp(ch, tol)
    if not cp.valid:
        payload = {"valid": False, "min_eig": cp.min_eig}
        return Report("analyze", digest, tol, payload, "invalid_channel"), 2
    counts = mode_counts(ch, tol)
    kernels = kernel_checks(ch, tol)
    payload = {
        "valid": True,
        "min_eig": cp.min_eig,
        "n": ch.n,
        "k": counts.k,
        "r": counts.r,
        "r_prime": counts.r_prime,
        "ell_pure": counts.ell_pure,
        "ell_mix": counts.ell_mix,
        "kernel": {"inclusions_ok": kernels.inclusions_ok, **kernels.details},
    }
    return Report("analyze", digest, tol, payload, "ok"), 0


def _cmd_dilate(args, tol: Tolerance) -> tuple[Report, int]:
    text = _read_source(args.file)
    ch = _channel_from_text(text, tol)
    digest = _digest(text.encode("utf-8"))
    cp = validate_cp(ch, tol)
    if not cp.valid:
        payload = {"valid": False, "min_eig": cp.min_eig}
        return Report("dilate", digest, tol, payload, "invalid_channel"), 2
    d = mixed_dilation(ch, tol) if args.mixed else pure_dilation(ch, tol)
    return Report("dilate", digest, tol, _dilation_dict(ch, d, tol), "ok"), 0


def _cmd_purify(args, tol: Tolerance) -> tuple[Report, int]:
    text = _read_source(args.file)
    digest = _digest(text.encode("utf-8"))
    n, cov = _covariance_from_text(text, tol)
    try:
        wd = williamson(cov, tol)
    except ValueError:
        return Report("purify", digest, tol, {"valid": False}, "invalid_channel"), 2
    pur = minimal_purification(cov, tol)
    payload = {
        "n": n,
        "q": pur.q,
        "unit_count": pur.unit_count,
        "sympl_spectrum": wd.D,
        "Gamma": pur.Gamma,
        "S_back": pur.S_back,
    }
    return Report("purify", digest, tol, payload, "ok"), 0


def _cmd_verify(args, tol: Tolerance) -> tuple[Report, int]:
    channel_text = _read_source(args.file)
    dilation_text = _read_source(args.dilation_file)
    ch = _channel_from_text(channel_text, tol)
    d = _dilation_from_text(dilation_text)
    digest = _digest(channel_text.encode("utf-8"), dilation_text.encode("utf-8"))
    cp = validate_cp(ch, tol)
    if not cp.valid:
        payload = {"valid": False, "min_eig": cp.min_eig}
        return Report("verify", digest, tol, payload, "invalid_channel"), 2
    try:
        check = verify_dilation(ch, d, n_states=args.states, seed=args.seed, tol=tol)
    except ValueError as exc:
        raise FileFormatError(str(exc)) from exc
    payload = {
        "kind": d.kind,
        "env_modes": d.env_modes,
        "residual_sigma": check.residual_sigma,
        "residual_noise": check.residual_noise,
        "residual_symplectic": check.residual_symplectic,
        "uncertainty_ok": check.uncertainty_ok,
        "purity_ok": check.purity_ok,
        "action_max_err": check.action_max_err,
        "ok": check.ok,
    }
    if check.ok:
        return Report("verify", digest, tol, payload, "ok"), 0
    return Report("verify", digest, tol, payload, "tolerance_warning"), 4


def _cmd_choi(args, tol: Tolerance) -> tuple[Report, int]:
    text = _read_source(args.file)
    ch = _channel_from_text(text, tol)
    digest = _digest(text.encode("utf-8"))
    cp = validate_cp(ch, tol)
    if not cp.valid:
        payload = {"valid": False, "min_eig": cp.min_eig}
        return Report("choi", digest, tol, payload, "invalid_channel"), 2
    if not args.theta > 1.0:
        raise _UsageError(f"--theta must be strictly greater than one, got {args.theta}")
    choi = choi_covariance(ch, args.theta, tol)
    q_choi = qmin_via_choi(ch, args.theta, tol)
    ell = mode_counts(ch, tol).ell_pure
    payload = {
        "theta": choi.theta,
        "q_min_choi": q_choi,
        "ell_pure": ell,
        "agree": q_choi == ell,
        "gamma_prime": choi.gamma_prime,
        "sigma_AB": choi.sigma_AB,
    }
    status = "ok" if q_choi == ell else "tolerance_warning"
    return Report("choi", digest, tol, payload, status), 0


def _cmd_random(args, tol: Tolerance) -> tuple[Report, int]:
    if args.n < 1:
        raise _UsageError("--n must be at least 1")
    if args.env < 0:
        raise _UsageError("--env must be non-negative")
    env_pure = not args.mixed_env
    ch = random_channel(args.n, args.env, env_pure=env_pure, seed=args.seed)
    params = f"random:n={args.n},env={args.env},pure={env_pure},seed={args.seed}"
    payload = {
        "channel": _channel_dict(ch),
        "env_modes": args.env,
        "env_pure": env_pure,
        "seed": args.seed,
    }
    return Report("random", _digest(params.encode("utf-8")), tol, payload, "ok"), 0


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=1e-9, metavar="R",
                        help="relative singular-value cutoff for ranks")
    common.add_argument("--tol-psd", type=float, default=1e-9, metavar="P",
                        help="absolute eigenvalue floor for PSD tests")
    common.add_argument("--tol-res", type=float, default=1e-8, metavar="Q",
                        help="ceiling on verification residuals")
    common.add_argument("--format", choices=("json", "text"), default="json",
                        help="report format (default: json)")

    parser = _Parser(prog="gaussdilation",
                     description="Analyze, dilate and purify bosonic Gaussian channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="validate a channel and report mode counts")
    p.add_argument("file", help="channel JSON file, or - for stdin")

    p = sub.add_parser("dilate", parents=[common], help="construct a minimal unitary dilation")
    p.add_argument("file", help="channel JSON file, or - for stdin")
    p.add_argument("--mixed", action="store_true", help="allow a mixed environment state")

    p = sub.add_parser("purify", parents=[common], help="minimal purification of a covariance matrix")
    p.add_argument("file", help="covariance JSON file, or - for stdin")

    p = sub.add_parser("verify", parents=[common], help="check a stored dilation against a channel")
    p.add_argument("file", help="channel JSON file, or - for stdin")
    p.add_argument("dilation_file", help="dilation report JSON file")
    p.add_argument("--states", type=int, default=20, help="random probe states (default: 20)")
    p.add_argument("--seed", type=int, default=0, help="probe state seed (default: 0)")

    p = sub.add_parser("choi", parents=[common], help="Choi-state covariance and mode-count cross-check")
    p.add_argument("file", help="channel JSON file, or - for stdin")
    p.add_argument("--theta", type=float, default=8.0, help="reference squeezing parameter (default: 8)")

    p = sub.add_parser("random", parents=[common], help="generate a random valid channel")
    p.add_argument("--n", type=int, required=True, help="system modes")
    p.add_argument("--env", type=int, required=True, help="environment modes of the generator")
    p.add_argument("--mixed-env", action="store_true", help="use a mixed environment state")
    p.add_argument("--seed", type=int, required=True, help="PCG64 seed")

    return parser


_COMMANDS = {
    "analyze": _cmd_analyze,
    "dilate": _cmd_dilate,
    "purify": _cmd_purify,
    "verify": _cmd_verify,
    "choi": _cmd_choi,
    "random": _cmd_random,
}


def run(argv) -> int:
    """Parse arguments, dispatch, and write one report to standard output.

    Returns the process exit code (0 ok, 2 invalid channel, 3 parse/usage
    error, 4 verification failure).
    """
    try:
        args = _build_parser().parse_args(argv)
        tol = Tolerance(rank_rel=args.tol_rank, psd_abs=args.tol_psd, residual=args.tol_res)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    try:
        report, code = _COMMANDS[args.command](args, tol)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvalidChannelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerificationError, ToleranceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # keep the exit-code taxonomy total
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    sys.stdout.write(emit_report(report, args.format))
    return code


def main(argv=None) -> int:
    """Console entry point."""
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
