"""Command-line front door.

Subcommands:

* ``qsieve run --config cfg.json [--out DIR] [--seed N] [--threads N]``
* ``qsieve models``    -- list built-in model types with parameter schemas
* ``qsieve validate --config cfg.json``  -- parse and validate without running

The config is a single JSON object selecting a model and a command
(evolve | lambda | sieve | decompose | classify) plus command parameters.
Unknown keys are rejected with field-path-annotated errors.  Every output
file begins with a header object (config echo with defaults filled, artifact
version, seed, tolerance set) so a run is reproducible from its artifact
alone; for a fixed seed the output bytes are identical across runs, which is
why wall-clock goes to stderr rather than into the file.

Exit codes: 0 success, 1 config/validation error, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .decomposition import (
    DefectivePeripheralSpectrumError,
    classical_states,
    spectral_split,
    verify_split_properties,
)
from .liouville import (
    LindbladGenerator,
    build_superoperator,
    channel_applier,
    eis_check,
    propagator,
    unvec,
    vec,
)
from .models import (
    davies_model,
    disc_quadrature,
    grw_model,
    pointer_model,
    qbm_model,
    toy_model,
)
from .operators import (
    DegenerateInputError,
    ValidationError,
    linear_entropy,
    normalize_state,
    random_pure_state,
    trace_norm,
    validate_density_matrix,
)
from .sieve import lambda_pure, minimize_lambda

__all__ = ["main", "parse_config", "build_model", "run_config", "ConfigError"]


class ConfigError(ValidationError):
    """Config validation failure, annotated with the offending field path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


# ---------------------------------------------------------------------------
# schema helpers

def _check_keys(obj: dict, path: str, required: dict, optional: dict) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected a JSON object")
    allowed = set(required) | set(optional)
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}",
                              f"unknown key (allowed: {sorted(allowed)})")
    for key in required:
        if key not in obj:
            raise ConfigError(f"{path}.{key}", "missing required key")


def _number(value, path: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a number")
    if positive and value <= 0:
        raise ConfigError(path, "must be > 0")
    return float(value)


def _integer(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, "expected an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}")
    return value


def _real_list(value, path: str):
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty array of numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _complex_entry(value, path: str) -> list:
    if (not isinstance(value, list) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in value)):
        raise ConfigError(path, "expected a [re, im] pair")
    return [float(value[0]), float(value[1])]


def _complex_matrix(value, path: str) -> list:
    """Validated nested arrays of [re, im] pairs (kept JSON-serializable)."""
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty array of rows")
    rows = []
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise ConfigError(f"{path}[{i}]", "expected a non-empty row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ConfigError(f"{path}[{i}]", "ragged matrix rows")
        rows.append([_complex_entry(c, f"{path}[{i}][{j}]")
                     for j, c in enumerate(row)])
    return rows


def _complex_vector(value, path: str) -> list:
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected a non-empty array of [re, im] pairs")
    return [_complex_entry(c, f"{path}[{i}]") for i, c in enumerate(value)]


def _to_complex(pairs) -> np.ndarray:
    """[re, im]-pair nesting (vector or matrix) -> complex ndarray."""
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


# ---------------------------------------------------------------------------
# model schemas

def _validate_model(model, path: str = "model") -> dict:
    if not isinstance(model, dict):
        raise ConfigError(path, "expected a JSON object")
    mtype = model.get("type")
    if mtype not in MODEL_SCHEMAS:
        raise ConfigError(f"{path}.type",
                          f"unknown model type {mtype!r} "
                          f"(options: {sorted(MODEL_SCHEMAS)})")
    out = {"type": mtype}
    if mtype == "toy":
        _check_keys(model, path, {"type": None}, {"hamiltonian": None})
        if "hamiltonian" in model:
            H = _complex_matrix(model["hamiltonian"], f"{path}.hamiltonian")
            if len(H) != 2 or len(H[0]) != 2:
                raise ConfigError(f"{path}.hamiltonian", "must be 2x2")
            out["hamiltonian"] = H
    elif mtype == "pointer":
        _check_keys(model, path, {"type": None, "energies": None}, {})
        energies = _real_list(model["energies"], f"{path}.energies")
        if len(energies) < 2:
            raise ConfigError(f"{path}.energies", "need at least two levels")
        out["energies"] = energies
    elif mtype == "qbm":
        _check_keys(model, path, {"type": None, "n_levels": None, "D": None},
                    {"omega": None})
        out["n_levels"] = _integer(model["n_levels"], f"{path}.n_levels", 2)
        out["D"] = _number(model["D"], f"{path}.D", positive=True)
        out["omega"] = _number(model.get("omega", 1.0), f"{path}.omega",
                               positive=True)
    elif mtype == "grw":
        _check_keys(model, path,
                    {"type": None, "grid": None, "kappa": None, "alpha": None},
                    {})
        grid = _real_list(model["grid"], f"{path}.grid")
        if len(grid) < 2 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"{path}.grid",
                              "must be strictly increasing with >= 2 points")
        out["grid"] = grid
        out["kappa"] = _number(model["kappa"], f"{path}.kappa", positive=True)
        out["alpha"] = _number(model["alpha"], f"{path}.alpha", positive=True)
    elif mtype == "davies":
        _check_keys(model, path, {"type": None, "kappa": None},
                    {"n_levels": None, "energies": None, "quadrature": None})
        out["kappa"] = _number(model["kappa"], f"{path}.kappa", positive=True)
        out["n_levels"] = _integer(model.get("n_levels", 40),
                                   f"{path}.n_levels", 2)
        if "energies" in model:
            energies = _real_list(model["energies"], f"{path}.energies")
            if len(energies) != out["n_levels"]:
                raise ConfigError(f"{path}.energies",
                                  "length must equal n_levels")
            out["energies"] = energies
        quad = model.get("quadrature", {})
        _check_keys(quad, f"{path}.quadrature", {},
                    {"r_max": None, "n_r": None, "n_theta": None})
        q = {"r_max": _number(quad.get("r_max", 1.0 - 1e-9),
                              f"{path}.quadrature.r_max", positive=True),
             "n_r": _integer(quad.get("n_r", 64),
                             f"{path}.quadrature.n_r", 2),
             "n_theta": _integer(quad.get("n_theta", 180),
                                 f"{path}.quadrature.n_theta", 4)}
        if q["r_max"] >= 1.0:
            raise ConfigError(f"{path}.quadrature.r_max", "must be < 1")
        out["quadrature"] = q
    elif mtype == "custom":
        _check_keys(model, path, {"type": None, "hamiltonian": None},
                    {"jump_ops": None})
        H = _complex_matrix(model["hamiltonian"], f"{path}.hamiltonian")
        if len(H) != len(H[0]):
            raise ConfigError(f"{path}.hamiltonian", "must be square")
        out["hamiltonian"] = H
        jumps = []
        for i, Jm in enumerate(model.get("jump_ops", [])):
            J = _complex_matrix(Jm, f"{path}.jump_ops[{i}]")
            if len(J) != len(H) or len(J[0]) != len(H):
                raise ConfigError(f"{path}.jump_ops[{i}]",
                                  "shape must match the Hamiltonian")
            jumps.append(J)
        out["jump_ops"] = jumps
    return out


MODEL_SCHEMAS = {
    "toy": {"hamiltonian?": "2x2 matrix of [re, im] (default 0)"},
    "pointer": {"energies": "array of >= 2 level energies"},
    "qbm": {"n_levels": "Fock cutoff >= 2", "D": "decoherence rate > 0",
            "omega?": "oscillator frequency > 0 (default 1.0)"},
    "grw": {"grid": "strictly increasing positions, >= 2 points",
            "kappa": "localization rate > 0",
            "alpha": "inverse localization length^2 > 0"},
    "davies": {"kappa": "process rate > 0",
               "n_levels?": "Fock cutoff >= 2 (default 40)",
               "energies?": "diagonal Hamiltonian (default 0..N-1)",
               "quadrature?": "disc rule {r_max, n_r, n_theta}"},
    "custom": {"hamiltonian": "square matrix of [re, im]",
               "jump_ops?": "array of same-shape matrices of [re, im]"},
}

COMMANDS = ("evolve", "lambda", "sieve", "decompose", "classify")


def _validate_states(value, path: str):
    """'random:<k>' or an array of amplitude vectors."""
    if isinstance(value, str):
        head, sep, count = value.partition(":")
        if head != "random" or not sep or not count.isdigit() \
                or int(count) < 1:
            raise ConfigError(path, "expected 'random:<count>' or an array "
                                    "of amplitude vectors")
        return value
    if not isinstance(value, list) or not value:
        raise ConfigError(path, "expected 'random:<count>' or an array "
                                "of amplitude vectors")
    return [_complex_vector(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _validate_command_params(config: dict, command: str) -> dict:
    params = {}
    if command == "evolve":
        times = config.get("times", [0.25 * k for k in range(41)])
        times = _real_list(times, "times")
        if any(t < 0 for t in times):
            raise ConfigError("times", "times must be >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("times", "times must be sorted ascending")
        params["times"] = times
        state = config.get("state", "random")
        if state != "random":
            state = _complex_vector(state, "state")
        params["state"] = state
    elif command == "lambda":
        params["states"] = _validate_states(config.get("states", "random:100"),
                                            "states")
    elif command == "sieve":
        params["n_starts"] = _integer(config.get("n_starts", 16),
                                      "n_starts", 1)
        params["tol"] = _number(config.get("tol", 1e-8), "tol", positive=True)
        params["max_iter"] = _integer(config.get("max_iter", 2000),
                                      "max_iter", 1)
        if "epsilon" in config:
            params["epsilon"] = _number(config["epsilon"], "epsilon",
                                        positive=True)
    elif command == "decompose":
        if "tol" in config:
            params["tol"] = _number(config["tol"], "tol", positive=True)
        else:
            params["tol"] = None
    elif command == "classify":
        params["residual_tol"] = _number(config.get("residual_tol", 1e-8),
                                         "residual_tol", positive=True)
    return params


_COMMON_KEYS = ("model", "command", "output_format", "seed")
_COMMAND_KEYS = {
    "evolve": ("times", "state"),
    "lambda": ("states",),
    "sieve": ("n_starts", "tol", "max_iter", "epsilon"),
    "decompose": ("tol",),
    "classify": ("residual_tol",),
}


def parse_config(text: str) -> dict:
    """Parse and fully validate a JSON run config; fill defaults.

    Returns the normalized config dict that is echoed into output headers.
    """
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"<json:line {exc.lineno}:col {exc.colno}>",
                          exc.msg) from exc
    if not isinstance(config, dict):
        raise ConfigError("<root>", "config must be a JSON object")

    command = config.get("command")
    if command not in COMMANDS:
        raise ConfigError("command",
                          f"unknown command {command!r} "
                          f"(options: {sorted(COMMANDS)})")
    allowed = set(_COMMON_KEYS) | set(_COMMAND_KEYS[command])
    for key in config:
        if key not in allowed:
            raise ConfigError(key, "unknown key for command "
                                   f"{command!r} (allowed: {sorted(allowed)})")
    if "model" not in config:
        raise ConfigError("model", "missing required key")

    fmt = config.get("output_format", "csv" if command in ("evolve", "lambda")
                     else "json")
    if fmt not in ("csv", "json"):
        raise ConfigError("output_format", "must be 'csv' or 'json'")
    if fmt == "csv" and command in ("sieve", "decompose", "classify"):
        raise ConfigError("output_format",
                          f"command {command!r} emits structured output; "
                          "use 'json'")

    normalized = {
        "model": _validate_model(config["model"]),
        "command": command,
        "output_format": fmt,
        "seed": _integer(config.get("seed", 0), "seed", 0),
    }
    normalized.update(_validate_command_params(config, command))
    return normalized


def build_model(config: dict) -> LindbladGenerator:
    model = config["model"]
    mtype = model["type"]
    if mtype == "toy":
        H = _to_complex(model["hamiltonian"]) if "hamiltonian" in model \
            else None
        return toy_model(H)
    if mtype == "pointer":
        return pointer_model(model["energies"])
    if mtype == "qbm":
        return qbm_model(model["n_levels"], model["D"], model["omega"])
    if mtype == "grw":
        return grw_model(model["grid"], model["kappa"], model["alpha"])
    if mtype == "davies":
        q = model["quadrature"]
        quad = disc_quadrature(q["r_max"], q["n_r"], q["n_theta"])
        return davies_model(model["n_levels"], model["kappa"],
                            energies=model.get("energies"), quadrature=quad)
    H = _to_complex(model["hamiltonian"])
    jumps = tuple(_to_complex(J) for J in model["jump_ops"])
    return LindbladGenerator(H.shape[0], H, jump_ops=jumps, label="custom")


# ---------------------------------------------------------------------------
# command implementations

TOLERANCES = {
    "choi_psd": 1e-8,
    "trace_preservation": 1e-10,
    "norm_contraction": 1e-9,
    "fixed_point_residual": 1e-8,
    "hermiticity": 1e-12,
}


def _header(config: dict) -> dict:
    return {
        "artifact": "qsieve",
        "version": __version__,
        "config": config,
        "seed": config["seed"],
        "tolerances": TOLERANCES,
    }


def _states_from_config(spec, dim: int, seed: int):
    if isinstance(spec, str):
        count = int(spec.partition(":")[2])
        rng = np.random.default_rng(seed)
        return [random_pure_state(dim, rng) for _ in range(count)]
    states = []
    for i, amps in enumerate(spec):
        if len(amps) != dim:
            raise ConfigError(f"states[{i}]",
                              f"length {len(amps)} does not match model "
                              f"dimension {dim}")
        states.append(normalize_state(_to_complex(amps)))
    return states


def _steady_state(gen: LindbladGenerator, rho: np.ndarray,
                  t_ref: float) -> np.ndarray:
    """Long-time limit of T_t rho by power iteration of a fixed-time channel.

    A Hamiltonian-free Hadamard-kernel semigroup converges entrywise to the
    mask of kernel zeros, so the limit is available in closed form there.
    """
    if gen.kernel is not None and np.abs(gen.hamiltonian).max() == 0.0:
        return rho * (gen.kernel == 0.0)
    P = propagator(gen, t_ref)
    v = vec(rho)
    for _ in range(10_000):
        nxt = P @ v
        if np.linalg.norm(nxt - v) <= 1e-13:
            return unvec(nxt)
        v = nxt
    raise RuntimeError("steady-state power iteration did not converge; "
                       "the semigroup may have an oscillating peripheral part")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _cmd_evolve(gen: LindbladGenerator, config: dict):
    if config["state"] == "random":
        psi = random_pure_state(gen.dim, np.random.default_rng(config["seed"]))
        rho = np.outer(psi, psi.conj())
    else:
        amps = config["state"]
        if len(amps) != gen.dim:
            raise ConfigError("state", f"length {len(amps)} does not match "
                                       f"model dimension {gen.dim}")
        psi = normalize_state(_to_complex(amps))
        rho = np.outer(psi, psi.conj())
    times = config["times"]
    steady = _steady_state(gen, rho, t_ref=max(times[-1], 1.0))

    rows = []
    current = rho
    prev_t = 0.0
    applier = None
    prev_dt = None
    for t in times:
        dt = t - prev_t
        if dt > 0:
            if applier is None or dt != prev_dt:
                applier = channel_applier(gen, dt)
                prev_dt = dt
            current = validate_density_matrix(applier(current))
        prev_t = t
        rows.append((t, linear_entropy(current),
                     0.5 * trace_norm(current - steady)))
    return {"columns": ["t", "S_lin", "dist"], "rows": rows}


def _cmd_lambda(gen: LindbladGenerator, config: dict):
    states = _states_from_config(config["states"], gen.dim, config["seed"])
    rows = [(i, lambda_pure(gen, psi)) for i, psi in enumerate(states)]
    return {"columns": ["state_index", "lambda"], "rows": rows}


def _cmd_sieve(gen: LindbladGenerator, config: dict):
    report = minimize_lambda(gen, n_starts=config["n_starts"],
                             seed=config["seed"], tol=config["tol"],
                             max_iter=config["max_iter"],
                             epsilon=config.get("epsilon"))
    out = report.as_dict()
    out["quasi_classical"] = [i for i, flag
                              in enumerate(out["quasi_classical_flags"])
                              if flag]
    return out


def _cmd_decompose(gen: LindbladGenerator, config: dict):
    M = build_superoperator(gen)
    split = spectral_split(M, tol=config["tol"])
    verification = verify_split_properties(M, split)
    return {
        "iso_dim": split.iso_dim,
        "sweep_dim": split.sweep_dim,
        "spectral_gap": float(split.spectral_gap),
        "tol": float(split.tol),
        "peripheral_eigenvalues": [[float(z.real), float(z.imag)]
                                   for z in split.peripheral_eigenvalues],
        "residuals": {k: (None if v is None else float(v))
                      for k, v in verification.residuals.items()},
    }


def _cmd_classify(gen: LindbladGenerator, config: dict):
    M = build_superoperator(gen)
    split = spectral_split(M)
    result = classical_states(gen, split, seed=config["seed"],
                              residual_tol=config["residual_tol"])
    projs = [p for p in result.projectors]
    overlaps = []
    for i in range(len(projs)):
        for j in range(i + 1, len(projs)):
            overlaps.append(float(np.abs(np.trace(projs[i] @ projs[j])).real))
    return {
        "n_classical": len(projs),
        "projectors": [[[[c.real, c.imag] for c in row] for row in p]
                       for p in projs],
        "max_pairwise_overlap": max(overlaps) if overlaps else 0.0,
        "fixed_point_residuals": [float(r)
                                  for r in result.fixed_point_residuals],
    }


# ---------------------------------------------------------------------------
# output plumbing

def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qsieve-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render_csv(header: dict, table: dict) -> str:
    lines = ["# " + json.dumps(header, sort_keys=True)]
    lines.append(",".join(table["columns"]))
    for row in table["rows"]:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x)
                              for x in row))
    return "\n".join(lines) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _render_json(header: dict, body: dict) -> str:
    return json.dumps({"header": header, "result": body}, sort_keys=True,
                      indent=2, default=_json_default) + "\n"


def _set_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get("QSIEVE_THREADS")
        n = int(env) if env and env.isdigit() else None
    if n is None:
        return
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(n)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def run_config(config: dict, out_dir: str) -> str:
    """Execute a validated config; returns the output file path."""
    gen = build_model(config)
    header = _header(config)
    if config["model"]["type"] == "custom":
        header["eis_check"] = eis_check(gen).as_dict()

    command = config["command"]
    impl = {"evolve": _cmd_evolve, "lambda": _cmd_lambda, "sieve": _cmd_sieve,
            "decompose": _cmd_decompose, "classify": _cmd_classify}[command]
    body = impl(gen, config)

    os.makedirs(out_dir, exist_ok=True)
    ext = config["output_format"]
    path = os.path.join(out_dir, f"{command}.{ext}")
    if ext == "csv":
        _atomic_write(path, _render_csv(header, body))
    else:
        if "columns" in body:  # tables requested as json
            body = {"columns": body["columns"],
                    "rows": [list(r) for r in body["rows"]]}
        _atomic_write(path, _render_json(header, body))
    return path


# ---------------------------------------------------------------------------
# entry point

def _error_json(exc: Exception) -> str:
    payload = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        payload["path"] = exc.path
    return json.dumps({"error": payload}, sort_keys=True)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qsieve",
        description="Classify pure open-system states by predictability.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_run = sub.add_parser("run", help="execute a JSON run config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=".")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--threads", type=int, default=None)

    sub.add_parser("models", help="list built-in model types")

    p_val = sub.add_parser("validate", help="validate a config without running")
    p_val.add_argument("--config", required=True)

    args = parser.parse_args(argv)

    if args.subcommand == "models":
        print(json.dumps(MODEL_SCHEMAS, sort_keys=True, indent=2))
        return 0

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 1

    try:
        config = parse_config(text)
    except ValidationError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 1

    if args.subcommand == "validate":
        print(json.dumps({"valid": True, "config": config},
                         sort_keys=True, indent=2))
        return 0

    if args.seed is not None:
        config["seed"] = args.seed
    _set_threads(args.threads)

    started = time.monotonic()
    try:
        path = run_config(config, args.out)
    except (DegenerateInputError, DefectivePeripheralSpectrumError,
            RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        # numerical failures; DegenerateInputError is checked before its
        # ValidationError parent
        print(_error_json(exc), file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(_error_json(exc), file=sys.stderr)
        return 1
    elapsed = time.monotonic() - started
    print(json.dumps({"written": path, "wall_clock_s": round(elapsed, 3)}),
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
