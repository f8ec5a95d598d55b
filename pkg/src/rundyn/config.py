"""Experiment configuration files.

A config is a JSON object::

    {
      "name": "fig1",
      "network": {"n_qubits": 6, "topology": "cyclic", "probabilities": null},
      "initial_states": [
        {"label": "000001", "basis": "000001"},
        {"label": "psi", "amplitudes": {"10": [0.24, 0.18], "11": [0.9, 0.43]}},
        {"label": "mixed", "maximally_mixed": true}
      ],
      "iterations": 200,
      "seed": 1234,
      "mode": "exact-map",
      "samples": 10000,
      "candidates": [1, -1],
      "output": "fig1.csv"
    }

``network`` may instead list CNOT gates explicitly
(``{"n_qubits": 3, "gates": [{"control": 1, "target": 2, "prob": 0.5}, ...]}``)
or give general unitaries, inline as ``"unitaries"`` or in a separate JSON
file referenced by ``"unitaries_file"`` (resolved relative to the config).
Each unitary entry is ``{"prob": p, "matrix": [[[re, im], ...], ...]}``.

Complex numbers are ``[re, im]`` pairs everywhere; a bare real number is
also accepted. Bit strings are written ``j_N ... j_1`` (qubit 1 rightmost).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .channel import RandomUnitaryChannel, UnitaryOperator
from .errors import ConfigError, RundynError
from .operator_core import maximally_mixed, pure_state
from .qubit_network import NetworkSpec, bitstring_to_index, build_cyclic_channel, cnot

MODES = ("exact-map", "trajectory")


@dataclass
class InitialState:
    label: str
    rho: np.ndarray


@dataclass
class ExperimentConfig:
    channel: RandomUnitaryChannel
    initial_states: list[InitialState]
    iterations: int = 200
    seed: int | None = None
    mode: str = "exact-map"
    samples: int = 1000
    candidates: list[complex] | None = None
    output: str | None = None
    name: str = "experiment"
    network: NetworkSpec | None = None
    n_qubits: int | None = None
    raw: dict[str, Any] = field(default_factory=dict, repr=False)


def parse_complex(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, str):
        return parse_lambda(v)
    raise ConfigError(f"cannot read complex number from {v!r}; use [re, im]")


def parse_lambda(s: str) -> complex:
    """``"1"``, ``"-1"``, ``"0.5+0.866i"`` or ``"1j"``."""
    t = s.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"cannot parse eigenvalue {s!r}") from None


def parse_candidates(s: str) -> list[complex]:
    return [parse_lambda(part) for part in s.split(",") if part.strip()]


def _matrix(rows) -> np.ndarray:
    try:
        return np.array([[parse_complex(x) for x in row] for row in rows], dtype=complex)
    except TypeError:
        raise ConfigError("matrix must be a list of rows of [re, im] pairs") from None


def _unitary_terms(entries, where: str) -> RandomUnitaryChannel:
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"{where}: expected a non-empty list of unitary terms")
    probs, ops = [], []
    for k, e in enumerate(entries):
        if "prob" not in e or "matrix" not in e:
            raise ConfigError(f"{where}[{k}]: need 'prob' and 'matrix'")
        probs.append(float(e["prob"]))
        ops.append(UnitaryOperator.from_matrix(_matrix(e["matrix"])))
    return RandomUnitaryChannel(list(zip(probs, ops)))


def _build_network(net: dict, base: Path) -> tuple[RandomUnitaryChannel, NetworkSpec | None, int | None]:
    if "unitaries_file" in net:
        path = base / net["unitaries_file"]
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read unitaries file {path}: {exc}") from None
        entries = data.get("terms") if isinstance(data, dict) else data
        ch = _unitary_terms(entries, str(path))
        return ch, None, net.get("n_qubits")
    if "unitaries" in net:
        return _unitary_terms(net["unitaries"], "network.unitaries"), None, net.get("n_qubits")
    if "n_qubits" not in net:
        raise ConfigError("network needs 'n_qubits', 'unitaries' or 'unitaries_file'")
    n = int(net["n_qubits"])
    if "gates" in net:
        gates = net["gates"]
        if not gates:
            raise ConfigError("network.gates is empty")
        default = 1.0 / len(gates)
        terms = [(float(g.get("prob", default)), cnot(n, int(g["control"]), int(g["target"]))) for g in gates]
        return RandomUnitaryChannel(terms), None, n
    probs = net.get("probabilities")
    spec = NetworkSpec(
        n,
        probabilities=None if probs is None else tuple(probs),
        topology=net.get("topology", "cyclic"),
        gate_family=net.get("gate_family", "cnot"),
    )
    return build_cyclic_channel(spec), spec, n


def _build_state(entry: dict, d: int, idx: int) -> InitialState:
    label = str(entry.get("label", f"state{idx}"))
    if entry.get("maximally_mixed"):
        return InitialState(label, maximally_mixed(d))
    if "basis" in entry:
        b = entry["basis"]
        z = bitstring_to_index(b) if isinstance(b, str) else int(b)
        if not 0 <= z < d:
            raise ConfigError(f"basis state {b!r} outside dimension {d}")
        psi = np.zeros(d, dtype=complex)
        psi[z] = 1.0
        return InitialState(label, pure_state(psi))
    if "amplitudes" in entry:
        amps = entry["amplitudes"]
        psi = np.zeros(d, dtype=complex)
        if isinstance(amps, dict):
            for key, val in amps.items():
                z = bitstring_to_index(key)
                if not 0 <= z < d:
                    raise ConfigError(f"amplitude key {key!r} outside dimension {d}")
                psi[z] = parse_complex(val)
        else:
            if len(amps) != d:
                raise ConfigError(f"amplitude list has length {len(amps)}, expected {d}")
            psi[:] = [parse_complex(a) for a in amps]
        if np.linalg.norm(psi) == 0:
            raise ConfigError(f"state {label!r} has zero norm")
        return InitialState(label, pure_state(psi))
    if "matrix" in entry:
        rho = _matrix(entry["matrix"])
        if rho.shape != (d, d):
            raise ConfigError(f"state {label!r} has shape {rho.shape}, expected {(d, d)}")
        return InitialState(label, rho)
    raise ConfigError(f"state {label!r}: need 'basis', 'amplitudes', 'matrix' or 'maximally_mixed'")


def config_from_dict(data: dict, base_dir: str | Path = ".") -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    base = Path(base_dir)
    try:
        ch, spec, n = _build_network(data.get("network") or {}, base)
    except ConfigError:
        raise
    except (RundynError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid network: {exc}") from None

    raw_states = data.get("initial_states")
    if raw_states is None:
        raw_states = [data["initial_state"]] if "initial_state" in data else [{"label": "mixed", "maximally_mixed": True}]
    try:
        states = [_build_state(e, ch.dim, k) for k, e in enumerate(raw_states)]
    except ConfigError:
        raise
    except (RundynError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid initial state: {exc}") from None

    iterations = int(data.get("iterations", 200))
    if iterations < 1:
        raise ConfigError("iterations must be >= 1")
    mode = data.get("mode", "exact-map")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    samples = int(data.get("samples", 1000))
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    seed = data.get("seed")
    cands = data.get("candidates")
    return ExperimentConfig(
        channel=ch,
        initial_states=states,
        iterations=iterations,
        seed=None if seed is None else int(seed),
        mode=mode,
        samples=samples,
        candidates=None if cands is None else [parse_complex(c) for c in cands],
        output=data.get("output"),
        name=str(data.get("name", "experiment")),
        network=spec,
        n_qubits=n,
        raw=data,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return config_from_dict(data, base_dir=path.parent)


def shipped_config(name: str) -> Path:
    """Path of a config bundled with the package (``fig1``, ``fig2``, ``n3``)."""
    path = Path(__file__).parent / "configs" / f"{name}.json"
    if not path.exists():
        raise ConfigError(f"no shipped config named {name!r}")
    return path
