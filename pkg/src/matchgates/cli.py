"""Command-line front-end: analyze, compile, simulate, verify.

Exit codes are a stable contract:

    0  success
    1  internal error (decomposition/synthesis bug)
    2  parse or usage error
    3  target gate is a matchgate
    4  target gate is not parity-preserving
    5  problem too large for the requested mode
    6  backend refusal (e.g. non-matchgate op on the ff backend)
    7  repetition synthesis failed within --r-max
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .analysis import (
    classify,
    entangling_power_closed,
    entangling_power_mc,
    kak,
    makhlin_invariants,
    nonlocal_from_pp,
    pp_params,
)
from .compiler import (
    CompiledCircuit,
    Encoding,
    compile_circuit,
    verify as verify_compiled,
)
from .errors import (
    BackendRefusal,
    MatchgatesError,
    ParseError,
    SynthesisError,
    TargetIsMatchgate,
    TargetNotPP,
    TooLarge,
)
from .fermion import run_covariance, sample_covariance
from .gates import DEFAULT_TOL, ToleranceConfig
from .io import (
    dumps_document,
    emit_circuit_document,
    histogram_out,
    load_circuit,
    matrix_out,
    parse_gate_spec,
)
from .statevector import run as sv_run, sample as sv_sample

EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_TARGET_IS_MATCHGATE = 3
EXIT_TARGET_NOT_PP = 4
EXIT_TOO_LARGE = 5
EXIT_BACKEND_REFUSAL = 6
EXIT_SYNTHESIS = 7

_EXIT_BY_ERROR = [
    (ParseError, EXIT_PARSE),
    (TargetIsMatchgate, EXIT_TARGET_IS_MATCHGATE),
    (TargetNotPP, EXIT_TARGET_NOT_PP),
    (TooLarge, EXIT_TOO_LARGE),
    (BackendRefusal, EXIT_BACKEND_REFUSAL),
    (SynthesisError, EXIT_SYNTHESIS),
]


def _fail(exc: Exception) -> "click.exceptions.Exit":
    for klass, code in _EXIT_BY_ERROR:
        if isinstance(exc, klass):
            click.echo(f"error: {exc}", err=True)
            return click.exceptions.Exit(code)
    if isinstance(exc, MatchgatesError):
        click.echo(f"error: {exc}", err=True)
        return click.exceptions.Exit(EXIT_ERROR)
    raise exc


def _tols(tol_unitary: float, tol_classify: float) -> ToleranceConfig:
    return ToleranceConfig(
        tol_unitary=tol_unitary,
        tol_classify=tol_classify,
        tol_phase=DEFAULT_TOL.tol_phase,
    )


def _emit(payload: dict, as_json: bool, render) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        render(payload)


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__)
def main():
    """Analyze two-qubit gates, simulate matchgate circuits, and compile
    logical circuits onto the even-parity pair encoding."""


@main.command()
@click.option("--gate", required=True, help="Gate spec: name, NAME(args), or JSON file.")
@click.option("--mc-samples", default=0, show_default=True, help="Monte-Carlo samples for the entangling-power estimator (0 = skip).")
@click.option("--seed", default=0, show_default=True)
@click.option("--tol-unitary", default=DEFAULT_TOL.tol_unitary, show_default=True)
@click.option("--tol-classify", default=DEFAULT_TOL.tol_classify, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def analyze(gate, mc_samples, seed, tol_unitary, tol_classify, as_json):
    """Classify a two-qubit gate and report its nonlocal parameters."""
    try:
        tol = _tols(tol_unitary, tol_classify)
        u = parse_gate_spec(gate)
        if u.shape != (4, 4):
            raise ParseError("analyze expects a two-qubit gate")
        cls = classify(u, tol)
        dec = kak(u, tol)
        core = dec.core
        g1, g2 = makhlin_invariants(u, tol)
        report = {
            "gate": gate,
            "is_unitary": cls.is_unitary,
            "is_pp": cls.is_pp,
            "is_matchgate": cls.is_matchgate,
            "nonlocal_triple": {"a": core.a, "b": core.b, "c": core.c},
            "entangling_power": entangling_power_closed(core),
            "makhlin_invariants": {"g1": [g1.real, g1.imag], "g2": g2},
        }
        if cls.is_pp:
            report["det_ratio"] = [cls.det_ratio.real, cls.det_ratio.imag]
            p = pp_params(u, tol)
            report["pp_params"] = {
                "theta": p.theta,
                "alpha": p.alpha,
                "gamma": p.gamma,
                "phi": p.phi,
                "mu": p.mu,
                "nu": p.nu,
                "beta": p.beta,
            }
            t = nonlocal_from_pp(p)
            report["pp_nonlocal_triple"] = {"a": t.a, "b": t.b, "c": t.c}
        if mc_samples:
            report["entangling_power_mc"] = entangling_power_mc(
                u, mc_samples, seed, tol=tol
            )
            report["mc_samples"] = mc_samples
            report["seed"] = seed
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes
        raise _fail(exc)

    def render(r):
        click.echo(f"gate: {r['gate']}")
        click.echo(
            f"unitary: {r['is_unitary']}   parity-preserving: {r['is_pp']}   "
            f"matchgate: {r['is_matchgate']}"
        )
        t = r["nonlocal_triple"]
        click.echo(f"nonlocal triple (canonical): a={t['a']:.9f} b={t['b']:.9f} c={t['c']:.9f}")
        if "pp_params" in r:
            p = r["pp_params"]
            click.echo(
                "pp params: "
                + " ".join(f"{k}={p[k]:.9f}" for k in ("theta", "alpha", "gamma", "phi", "mu", "nu", "beta"))
            )
        click.echo(f"entangling power: {r['entangling_power']:.9f}")
        if "entangling_power_mc" in r:
            click.echo(
                f"entangling power (MC, {r['mc_samples']} samples, seed {r['seed']}): "
                f"{r['entangling_power_mc']:.6f}"
            )
        g1 = r["makhlin_invariants"]["g1"]
        click.echo(
            f"makhlin invariants: G1 = {g1[0]:.9f}{g1[1]:+.9f}i, "
            f"G2 = {r['makhlin_invariants']['g2']:.9f}"
        )

    _emit(report, as_json, render)


@main.command("compile")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True), help="Logical circuit JSON.")
@click.option("--target", required=True, help="Target gate spec.")
@click.option("--epsilon", default=1e-6, show_default=True, help="Encoded-subspace infidelity budget.")
@click.option("--r-max", default=100_000, show_default=True, help="Repetition search cap.")
@click.option("--out", type=click.Path(), help="Write the compiled circuit JSON here.")
@click.option("--skip-verify", is_flag=True, help="Skip the verification summary.")
@click.option("--tol-unitary", default=DEFAULT_TOL.tol_unitary, show_default=True)
@click.option("--tol-classify", default=DEFAULT_TOL.tol_classify, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def compile_cmd(input_path, target, epsilon, r_max, out, skip_verify, tol_unitary, tol_classify, as_json):
    """Compile a logical circuit into matchgates + the target gate."""
    try:
        tol = _tols(tol_unitary, tol_classify)
        logical = load_circuit(input_path)
        target_gate = parse_gate_spec(target)
        if target_gate.shape != (4, 4):
            raise ParseError("target must be a two-qubit gate")
        compiled = compile_circuit(logical, target_gate, epsilon, r_max=r_max, tol=tol)
        meta = {
            "target": {"matrix": matrix_out(target_gate), "spec": target},
            "provenance": compiled.provenance,
        }
        if compiled.plan:
            meta["plan"] = {
                "c_eff": compiled.plan.c_eff,
                "repetitions": compiled.plan.repetitions,
                "residual_error": compiled.plan.residual_error,
                "local_corrections": list(compiled.plan.local_corrections),
                "global_phase": compiled.plan.global_phase,
            }
        doc = emit_circuit_document(compiled.physical, meta)
        text = dumps_document(doc)
        if out:
            _write_out(text, out)
        summary = {
            "logical_qubits": logical.n,
            "physical_qubits": compiled.physical.n,
            "flat_op_count": compiled.physical.flat_count(),
            "target_uses": compiled.target_uses,
            "repetitions": compiled.plan.repetitions if compiled.plan else 0,
            "out": out,
        }
        if not skip_verify:
            report = verify_compiled(compiled, logical, epsilon)
            summary["verification"] = {
                "mode": report.mode,
                "fidelity": report.fidelity,
                "leakage": report.leakage,
                "passed": report.passed,
            }
        if not out:
            summary["circuit"] = doc
    except Exception as exc:  # noqa: BLE001
        raise _fail(exc)

    def render(s):
        click.echo(
            f"compiled {s['logical_qubits']} logical -> {s['physical_qubits']} physical qubits; "
            f"{s['flat_op_count']} gates, {s['target_uses']} target uses"
        )
        if "verification" in s:
            v = s["verification"]
            click.echo(
                f"verification ({v['mode']}): fidelity={v['fidelity']:.12f} "
                f"leakage={v['leakage']:.3e} passed={v['passed']}"
            )
        if s.get("out"):
            click.echo(f"wrote {s['out']}")

    _emit(summary, as_json, render)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--backend", type=click.Choice(["sv", "ff"]), default="sv", show_default=True)
@click.option("--shots", default=0, show_default=True, help="0 dumps the state (sv) or Z expectations (ff).")
@click.option("--seed", type=int, default=None, help="RNG seed for sampling.")
@click.option("--initial", default=None, help="Initial basis state, e.g. 0101.")
@click.option("--strict", is_flag=True, help="Require an explicit --seed for sampling.")
@click.option("--out", type=click.Path())
@click.option("--json", "as_json", is_flag=True)
def simulate(input_path, backend, shots, seed, initial, strict, out, as_json):
    """Run a circuit on the statevector (sv) or free-fermion (ff) backend."""
    try:
        circuit = load_circuit(input_path)
        initial_label = initial if initial is not None else 0
        if shots and seed is None:
            if strict:
                raise ParseError("--strict requires --seed when sampling")
            seed = 0
        payload: dict = {
            "backend": backend,
            "qubits": circuit.n,
            "shots": shots,
        }
        if shots:
            payload["seed"] = seed
        if backend == "sv":
            state = sv_run(circuit, initial_label)
            if shots:
                payload["counts"] = histogram_out(sv_sample(state, shots, seed), circuit.n)
            else:
                payload["state"] = matrix_out(state.amps[None, :])[0]
        else:
            cov = run_covariance(circuit, initial_label)
            payload["z_expectations"] = [cov.expectation_z(k) for k in range(circuit.n)]
            if shots:
                payload["counts"] = histogram_out(
                    sample_covariance(cov, shots, seed), circuit.n
                )
    except Exception as exc:  # noqa: BLE001
        raise _fail(exc)

    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        _write_out(text, out)
        click.echo(f"wrote {out}")
    elif as_json:
        click.echo(text, nl=False)
    else:
        if "counts" in payload:
            for bits, count in payload["counts"].items():
                click.echo(f"{bits} {count}")
        elif backend == "ff":
            for k, z in enumerate(payload["z_expectations"]):
                click.echo(f"<Z_{k}> = {z:+.9f}")
        else:
            for i, (re, im) in enumerate(payload["state"]):
                if abs(re) > 1e-12 or abs(im) > 1e-12:
                    click.echo(f"|{format(i, f'0{circuit.n}b')}>  {re:+.9f}{im:+.9f}i")


@main.command()
@click.option("--logical", "logical_path", required=True, type=click.Path(exists=True))
@click.option("--physical", "physical_path", required=True, type=click.Path(exists=True))
@click.option("--epsilon", default=1e-6, show_default=True)
@click.option("--sampled", is_flag=True, help="Use statevector sampling instead of exact unitaries.")
@click.option("--samples", default=8, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def verify(logical_path, physical_path, epsilon, sampled, samples, seed, as_json):
    """Check a physical circuit against a logical one under the pair encoding."""
    try:
        logical = load_circuit(logical_path)
        physical = load_circuit(physical_path)
        if physical.n != 2 * logical.n:
            raise ParseError(
                f"physical circuit has {physical.n} qubits; expected {2 * logical.n} "
                f"for {logical.n} logical qubits"
            )
        compiled = CompiledCircuit(
            physical=physical,
            encoding=Encoding(logical.n),
            plan=None,
            target=None,
            epsilon=epsilon,
        )
        report = verify_compiled(
            compiled, logical, epsilon, samples=samples, seed=seed, sampled=sampled
        )
        payload = {
            "mode": report.mode,
            "fidelity": report.fidelity,
            "leakage": report.leakage,
            "epsilon": epsilon,
            "passed": report.passed,
            "target_uses": report.target_uses,
            "flat_op_count": report.flat_op_count,
        }
    except Exception as exc:  # noqa: BLE001
        raise _fail(exc)

    def render(r):
        click.echo(
            f"{r['mode']} verification: fidelity={r['fidelity']:.12f} "
            f"leakage={r['leakage']:.3e} epsilon={r['epsilon']:g} passed={r['passed']}"
        )

    _emit(payload, as_json, render)

    if report.passed is False:
        raise click.exceptions.Exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
