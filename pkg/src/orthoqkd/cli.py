"""Command-line driver: seeded Monte-Carlo runs, criterion audits, attack traces.

Subcommands:

* ``simulate``    -- run many protocol rounds under a chosen attack and emit
                     an aggregate report (json/csv/text).
* ``mor-check``   -- evaluate the no-cloning criterion for a non-maximally
                     entangled pair, alongside whether the parity attack
                     distinguishes that same pair perfectly.
* ``attack-demo`` -- step-by-step state trace of the parity attack on one
                     four-state symbol.

Reproducibility: round r draws from numpy's
``SeedSequence(entropy=seed, spawn_key=(r,))``, so a report is bit-identical
for a fixed configuration regardless of execution order (``elapsed_ms``
excepted).
"""

from __future__ import annotations

import argparse
import sys
import time
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .quantum import (
    InternalInvariantError,
    QubitId,
    apply_cnot,
    basis_state,
    measure_qubit,
    tensor_product,
)
from .protocol import (
    ENSEMBLE_CABELLO,
    ENSEMBLE_NONMAX,
    StateEnsemble,
    cabello_ensemble,
    encode,
    efficiency,
    nonmax_ensemble,
    run_round,
)
from .eavesdrop import (
    ATTACK_NAMES,
    EveKnowledge,
    attack_by_name,
    double_cnot_attack,
    eve_mutual_information,
    mutual_information_bits,
    perfectly_distinguishes,
)
from .mor import make_nonmax_pair, mor_check

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTERNAL = 4

OUTPUT_FORMATS = ("json", "csv", "text")

RNG_SPLIT = "numpy SeedSequence(entropy=seed, spawn_key=(round_index,))"


class UsageError(ValueError):
    """Invalid configuration or arguments; maps to exit code 2."""


@dataclass(frozen=True)
class SimulationConfig:
    """Validated parameters of one simulation run."""

    rounds: int
    seed: int
    attack_name: str
    ensemble_kind: str
    alpha: float | None = None
    beta: float | None = None
    output_format: str = "text"
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise UsageError(f"rounds must be at least 1, got {self.rounds}")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if self.attack_name not in ATTACK_NAMES:
            raise UsageError(
                f"unknown attack {self.attack_name!r}; expected one of {', '.join(ATTACK_NAMES)}"
            )
        if self.ensemble_kind not in (ENSEMBLE_CABELLO, ENSEMBLE_NONMAX):
            raise UsageError(f"unknown ensemble {self.ensemble_kind!r}")
        if self.ensemble_kind == ENSEMBLE_NONMAX:
            if self.alpha is None or self.beta is None:
                raise UsageError("the nonmax ensemble requires --alpha and --beta")
        if self.attack_name == "intercept-resend" and self.ensemble_kind != ENSEMBLE_CABELLO:
            raise UsageError("intercept-resend requires the cabello ensemble")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"unknown format {self.output_format!r}")

    def build_ensemble(self) -> StateEnsemble:
        if self.ensemble_kind == ENSEMBLE_CABELLO:
            return cabello_ensemble()
        try:
            return nonmax_ensemble(self.alpha, self.beta)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def echo(self) -> dict:
        return {
            "rounds": self.rounds,
            "seed": self.seed,
            "attack": self.attack_name,
            "ensemble": self.ensemble_kind,
            "alpha": self.alpha,
            "beta": self.beta,
            "output_format": self.output_format,
            "output_path": self.output_path,
            "rng_split": RNG_SPLIT,
        }


@dataclass(frozen=True)
class SimulationReport:
    """Aggregates of one simulation run, in report field order."""

    config: dict
    per_symbol_counts: tuple[int, ...]
    bob_error_rate: float
    mean_bob_fidelity: float
    eve_exact_fraction: float
    eve_partition_fraction: float
    empirical_mutual_information_bits: float
    analytic_mutual_information_bits: float
    efficiency: float
    elapsed_ms: float

    def to_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "per_symbol_counts": list(self.per_symbol_counts),
            "bob_error_rate": self.bob_error_rate,
            "mean_bob_fidelity": self.mean_bob_fidelity,
            "eve_exact_fraction": self.eve_exact_fraction,
            "eve_partition_fraction": self.eve_partition_fraction,
            "empirical_mutual_information_bits": self.empirical_mutual_information_bits,
            "analytic_mutual_information_bits": self.analytic_mutual_information_bits,
            "efficiency": self.efficiency,
            "elapsed_ms": self.elapsed_ms,
        }


def round_rng(seed: int, round_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one round; see RNG_SPLIT."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(round_index,)))


def simulate(config: SimulationConfig) -> SimulationReport:
    """Run ``config.rounds`` protocol rounds and aggregate the transcripts."""
    ensemble = config.build_ensemble()
    attack = attack_by_name(config.attack_name)
    n = ensemble.num_symbols

    started = time.perf_counter()
    counts = [0] * n
    errors = 0
    fidelity_sum = 0.0
    exact_rounds = 0
    partition_rounds = 0
    joint: dict[tuple[int, EveKnowledge], float] = defaultdict(float)

    for r in range(config.rounds):
        rng = round_rng(config.seed, r)
        symbol = int(rng.integers(n))
        transcript = run_round(ensemble, attack, symbol, rng)
        counts[symbol] += 1
        if transcript.bob_symbol != symbol:
            errors += 1
        fidelity_sum += transcript.bob_fidelity
        knowledge = transcript.eve_knowledge
        if knowledge.kind == "exact":
            exact_rounds += 1
        elif knowledge.kind == "partition":
            partition_rounds += 1
        joint[(symbol, knowledge)] += 1.0
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    return SimulationReport(
        config=config.echo(),
        per_symbol_counts=tuple(counts),
        bob_error_rate=errors / config.rounds,
        mean_bob_fidelity=fidelity_sum / config.rounds,
        eve_exact_fraction=exact_rounds / config.rounds,
        eve_partition_fraction=partition_rounds / config.rounds,
        empirical_mutual_information_bits=mutual_information_bits(joint),
        analytic_mutual_information_bits=eve_mutual_information(ensemble, attack),
        efficiency=efficiency(ensemble.bits_per_symbol * config.rounds,
                              2 * config.rounds, 0),
        elapsed_ms=elapsed_ms,
    )


def mor_check_report(alpha: float, beta: float) -> dict:
    """No-cloning verdicts for the pair plus the attack's distinguishability."""
    try:
        a, b = make_nonmax_pair(alpha, beta)
        ensemble = nonmax_ensemble(alpha, beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = mor_check(a, b)
    return {
        "alpha": alpha,
        "beta": beta,
        "rho1_orthogonal": report.rho1_orthogonal,
        "rho1_identical": report.rho1_identical,
        "rho2_orthogonal": report.rho2_orthogonal,
        "criterion_satisfied": report.criterion_satisfied,
        "tr_rho1_product": report.tr_rho1_product,
        "rho1_distance": report.rho1_distance,
        "tr_rho2_product": report.tr_rho2_product,
        "attack_distinguishes": perfectly_distinguishes(ensemble, double_cnot_attack()),
    }


def attack_demo_trace(symbol: int) -> list[dict]:
    """Step-by-step global state of the parity attack on one symbol.

    Every measurement in this trace is deterministic (its Born probability
    is 0 or 1), so the trace itself is reproducible without a seed.
    """
    ensemble = cabello_ensemble()
    state = encode(ensemble, symbol)  # rejects out-of-range symbols
    rng = np.random.default_rng(0)
    steps: list[dict] = []

    def record(label: str, current, outcome: int | None = None) -> None:
        entry = {
            "step": label,
            "qubits": [q.name for q in current.qubits],
            "amplitudes": [[amp.real, amp.imag] for amp in current.amplitudes],
            "dirac": current.dirac(),
        }
        if outcome is not None:
            entry["outcome"] = outcome
        steps.append(entry)

    record("encode", state)
    state = tensor_product(state, basis_state((QubitId.EVE_ANCILLA,), 0))
    record("attach-ancilla", state)
    state = apply_cnot(state, QubitId.QUBIT1, QubitId.EVE_ANCILLA)
    record("cnot-qubit1-ancilla", state)
    state = apply_cnot(state, QubitId.QUBIT2, QubitId.EVE_ANCILLA)
    record("cnot-qubit2-ancilla", state)

    outcome = measure_qubit(state, QubitId.EVE_ANCILLA, rng)
    state = outcome.post_state
    record("measure-ancilla", state, outcome.result)
    if outcome.result == 1:
        knowledge = EveKnowledge.partition({1, 2})
    else:
        second = measure_qubit(state, QubitId.QUBIT2, rng)
        state = second.post_state
        record("measure-qubit2", state, second.result)
        knowledge = EveKnowledge.exact(0 if second.result == 0 else 3)
    steps.append({"step": "knowledge", "knowledge": knowledge.label()})
    return steps


# --- rendering ---------------------------------------------------------

def _format_float(value: float) -> str:
    return format(float(value), ".17g")


def _json_fragment(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, dict):
        inner = ", ".join(f'{_json_fragment(str(k))}: {_json_fragment(v)}'
                          for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_fragment(v) for v in value) + "]"
    raise TypeError(f"cannot render {type(value).__name__} as JSON")


def render_json(document) -> str:
    """Deterministic JSON with reals at 17 significant digits."""
    return _json_fragment(document)


def _flatten(document: dict) -> dict:
    flat: dict = {}
    for key, value in document.items():
        if isinstance(value, dict):
            for inner_key, inner_value in value.items():
                flat[f"{key}_{inner_key}"] = inner_value
        elif isinstance(value, (list, tuple)) and all(
                not isinstance(v, (dict, list, tuple)) for v in value):
            for i, item in enumerate(value):
                flat[f"{key}_{i}"] = item
        else:
            flat[key] = value
    return flat


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value)
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def render_csv(document: dict) -> str:
    """Two-line CSV (header + values) with nested fields flattened."""
    flat = _flatten(document)
    header = ",".join(flat.keys())
    row = ",".join(_csv_cell(v) for v in flat.values())
    return header + "\n" + row


def _text_cell(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _format_float(value)
    return str(value)


def render_text(document: dict) -> str:
    flat = _flatten(document)
    width = max(len(k) for k in flat)
    lines = [f"{key.ljust(width)}  {_text_cell(value)}" for key, value in flat.items()]
    return "\n".join(lines)


def _render_trace(steps: list[dict], output_format: str) -> str:
    if output_format == "json":
        return render_json(steps)
    if output_format == "csv":
        lines = ["step,outcome,dirac,amplitudes"]
        for entry in steps:
            amps = ";".join(f"{re:.17g}{im:+.17g}j" for re, im in entry.get("amplitudes", []))
            lines.append(",".join([
                entry["step"],
                str(entry.get("outcome", "")),
                _csv_cell(entry.get("dirac", entry.get("knowledge", ""))),
                _csv_cell(amps),
            ]))
        return "\n".join(lines)
    lines = []
    for entry in steps:
        if entry["step"] == "knowledge":
            lines.append(f"eve knowledge: {entry['knowledge']}")
            continue
        suffix = f"  [outcome {entry['outcome']}]" if "outcome" in entry else ""
        lines.append(f"{entry['step']:<22} {entry['dirac']}{suffix}")
    return "\n".join(lines)


def _render_document(document: dict, output_format: str) -> str:
    if output_format == "json":
        return render_json(document)
    if output_format == "csv":
        return render_csv(document)
    return render_text(document)


# --- argument parsing and dispatch -------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthoqkd",
        description="Exact simulator for orthogonal-state quantum key distribution "
                    "and CNOT-based eavesdropping.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded protocol rounds under an attack")
    sim.add_argument("--rounds", type=int, default=1000, help="number of rounds (>= 1)")
    sim.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    sim.add_argument("--attack", default="none", choices=ATTACK_NAMES)
    sim.add_argument("--ensemble", default=ENSEMBLE_CABELLO,
                     choices=(ENSEMBLE_CABELLO, ENSEMBLE_NONMAX))
    sim.add_argument("--alpha", type=float, help="nonmax ensemble angle (radians)")
    sim.add_argument("--beta", type=float, help="nonmax ensemble angle (radians)")
    sim.add_argument("--format", default="text", choices=OUTPUT_FORMATS)
    sim.add_argument("--out", help="write the report to this path instead of stdout")

    mor = sub.add_parser("mor-check", help="audit the no-cloning criterion for a pair")
    mor.add_argument("--alpha", type=float, required=True)
    mor.add_argument("--beta", type=float, required=True)
    mor.add_argument("--format", default="text", choices=OUTPUT_FORMATS)
    mor.add_argument("--out")

    demo = sub.add_parser("attack-demo", help="trace the parity attack on one symbol")
    demo.add_argument("--symbol", type=int, required=True, help="symbol 0..3")
    demo.add_argument("--format", default="text", choices=OUTPUT_FORMATS)
    demo.add_argument("--out")

    return parser


def _dispatch(args: argparse.Namespace) -> str:
    if args.command == "simulate":
        config = SimulationConfig(
            rounds=args.rounds,
            seed=args.seed,
            attack_name=args.attack,
            ensemble_kind=args.ensemble,
            alpha=args.alpha,
            beta=args.beta,
            output_format=args.format,
            output_path=args.out,
        )
        return _render_document(simulate(config).to_dict(), args.format)
    if args.command == "mor-check":
        return _render_document(mor_check_report(args.alpha, args.beta), args.format)
    if args.command == "attack-demo":
        try:
            steps = attack_demo_trace(args.symbol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return _render_trace(steps, args.format)
    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = _dispatch(args)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text + "\n")
        else:
            print(text)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
