"""Circuit document round trips, gate-spec parsing, and CLI behavior."""

import json

import numpy as np
import pytest
from click.testing import CliRunner
from numpy.testing import assert_allclose

from matchgates.circuits import Circuit, RepeatedSegment
from matchgates.cli import main
from matchgates.compiler import compile_circuit
from matchgates.errors import ParseError
from matchgates.gates import H, I2, X, build_pp, gate_library
from matchgates.io import (
    dumps_document,
    emit_circuit_document,
    gate_from_document,
    parse_angle,
    parse_circuit_document,
    parse_gate_spec,
)
from matchgates.statevector import circuit_unitary
from util import random_matchgate, random_matchgate_circuit

PI = np.pi


class TestParseAngle:
    @pytest.mark.parametrize(
        "text,value",
        [
            ("pi", PI),
            ("-pi", -PI),
            ("pi/4", PI / 4),
            ("3pi/8", 3 * PI / 8),
            ("3*pi/8", 3 * PI / 8),
            ("-pi/2", -PI / 2),
            ("0.25", 0.25),
            (1.5, 1.5),
            (2, 2.0),
        ],
    )
    def test_values(self, text, value):
        assert parse_angle(text) == pytest.approx(value, abs=0)

    def test_rejects_garbage(self):
        with pytest.raises(ParseError):
            parse_angle("two pies")


class TestCircuitDocuments:
    def bell_doc(self):
        return {
            "format_version": 1,
            "qubits": 2,
            "gates": [
                {"name": "h", "targets": [0]},
                {"name": "cnot", "targets": [0, 1]},
            ],
            "metadata": {"label": "bell"},
        }

    def test_parse_and_run(self):
        circ = parse_circuit_document(self.bell_doc())
        assert circ.n == 2 and circ.metadata["label"] == "bell"
        u = circuit_unitary(circ)
        assert u.shape == (4, 4)

    def test_round_trip_byte_identical(self):
        rng = np.random.default_rng(80)
        circ = random_matchgate_circuit(rng, 4, 6)
        circ.append_segment(tuple(random_matchgate_circuit(rng, 4, 2).flat()), 5)
        doc = emit_circuit_document(circ)
        text = dumps_document(doc)
        reparsed = parse_circuit_document(json.loads(text))
        assert dumps_document(emit_circuit_document(reparsed)) == text
        assert_allclose(
            circuit_unitary(reparsed, cap=12), circuit_unitary(circ, cap=12), atol=1e-12
        )

    def test_pi_params_accepted(self):
        doc = {
            "format_version": 1,
            "qubits": 2,
            "gates": [{"name": "nl", "targets": [0, 1], "params": ["pi/4", 0, "-pi/8"]}],
        }
        circ = parse_circuit_document(doc)
        op = circ.ops[0]
        assert op.params[0] == pytest.approx(PI / 4)

    def test_unknown_gate_names_location(self):
        doc = self.bell_doc()
        doc["gates"].append({"name": "frobnicate", "targets": [0]})
        with pytest.raises(ParseError, match=r"gates\[2\]"):
            parse_circuit_document(doc)

    def test_bad_version(self):
        doc = self.bell_doc()
        doc["format_version"] = 99
        with pytest.raises(ParseError, match="format_version"):
            parse_circuit_document(doc)

    def test_bad_complex_entry(self):
        doc = {
            "format_version": 1,
            "qubits": 2,
            "gates": [
                {"name": "matrix", "targets": [0], "matrix": [[1, 0], [0, 1]]}
            ],
        }
        with pytest.raises(ParseError, match=r"\[re, im\]"):
            parse_circuit_document(doc)

    def test_nested_repeat_rejected(self):
        doc = {
            "format_version": 1,
            "qubits": 2,
            "gates": [
                {"repeat": 2, "gates": [{"repeat": 2, "gates": []}]}
            ],
        }
        with pytest.raises(ParseError, match="nested"):
            parse_circuit_document(doc)

    def test_blocks_gate(self):
        g = random_matchgate(np.random.default_rng(81))
        circ = Circuit(2)
        circ.append(g, (0, 1), name="g")
        doc = emit_circuit_document(circ)
        assert doc["gates"][0]["name"] == "g"
        reparsed = parse_circuit_document(doc)
        assert_allclose(reparsed.ops[0].gate, g, atol=0)


class TestGateSpecs:
    def test_names_and_calls(self):
        assert_allclose(parse_gate_spec("SWAP"), gate_library("SWAP"))
        assert_allclose(parse_gate_spec("NL(pi/4, 0, 0)"), gate_library("NL", (PI / 4, 0, 0)))
        assert_allclose(parse_gate_spec("rz(0.3)"), gate_library("RZ", (0.3,)))

    def test_document_forms(self):
        g = build_pp(H, H)
        doc = {"blocks": {"a": [[[x.real, x.imag] for x in row] for row in H],
                          "b": [[[x.real, x.imag] for x in row] for row in H]}}
        assert_allclose(gate_from_document(doc), g, atol=1e-15)
        doc = {"matrix": [[[float(x.real), float(x.imag)] for x in row] for row in g]}
        assert_allclose(gate_from_document(doc), g, atol=1e-15)
        doc = {"pp_params": {"theta": 0, "alpha": 0, "gamma": 0, "phi": "pi/2",
                             "mu": 0, "nu": 0, "beta": "pi/4"}}
        got = gate_from_document(doc)
        assert got.shape == (4, 4)

    def test_file_spec(self, tmp_path):
        path = tmp_path / "gate.json"
        path.write_text(json.dumps({"name": "iswap"}))
        assert_allclose(parse_gate_spec(str(path)), gate_library("ISWAP"))

    def test_bad_spec(self):
        with pytest.raises(ParseError):
            parse_gate_spec("NOT_A_GATE")


@pytest.fixture()
def runner():
    return CliRunner()


def write_bell(tmp_path):
    doc = {
        "format_version": 1,
        "qubits": 2,
        "gates": [
            {"name": "h", "targets": [0]},
            {"name": "cnot", "targets": [0, 1]},
        ],
        "metadata": {},
    }
    path = tmp_path / "bell.json"
    path.write_text(json.dumps(doc))
    return str(path)


def write_logical_cz(tmp_path):
    doc = {
        "format_version": 1,
        "qubits": 2,
        "gates": [{"name": "cz", "targets": [0, 1]}],
        "metadata": {},
    }
    path = tmp_path / "cz.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestAnalyzeCommand:
    def test_swap(self, runner):
        result = runner.invoke(main, ["analyze", "--gate", "SWAP", "--json"])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report["is_matchgate"] is False
        triple = report["nonlocal_triple"]
        assert_allclose([triple["a"], triple["b"], triple["c"]], [PI / 4] * 3, atol=1e-9)
        assert report["entangling_power"] == pytest.approx(0.0, abs=1e-12)

    def test_iswap(self, runner):
        result = runner.invoke(main, ["analyze", "--gate", "ISWAP", "--json"])
        report = json.loads(result.output)
        assert report["is_matchgate"] is True

    def test_nl_gate(self, runner):
        result = runner.invoke(main, ["analyze", "--gate", "NL(0.3,0.1,0)", "--json"])
        report = json.loads(result.output)
        assert report["is_matchgate"] is True
        expected = 1 - np.cos(0.6) ** 2 * np.cos(0.2) ** 2
        assert report["entangling_power"] == pytest.approx(expected, abs=1e-9)

    def test_mc_option(self, runner):
        result = runner.invoke(
            main,
            ["analyze", "--gate", "CNOT", "--mc-samples", "20000", "--seed", "3", "--json"],
        )
        report = json.loads(result.output)
        assert report["entangling_power_mc"] == pytest.approx(1.0, abs=0.05)

    def test_parse_error_exit_code(self, runner):
        result = runner.invoke(main, ["analyze", "--gate", "NOPE"])
        assert result.exit_code == 2


class TestCompileCommand:
    def test_bell_with_swap(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        out = str(tmp_path / "compiled.json")
        result = runner.invoke(
            main,
            ["compile", "--input", bell, "--target", "SWAP", "--out", out, "--json"],
        )
        assert result.exit_code == 0, result.output
        summary = json.loads(result.output)
        assert summary["verification"]["passed"] is True
        assert summary["verification"]["fidelity"] >= 1 - 1e-6
        doc = json.loads(open(out).read())
        circ = parse_circuit_document(doc)
        assert circ.n == 4

    def test_matchgate_target_exit_code(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        result = runner.invoke(main, ["compile", "--input", bell, "--target", "ISWAP"])
        assert result.exit_code == 3
        assert "det" in result.output

    def test_non_pp_target_exit_code(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        result = runner.invoke(main, ["compile", "--input", bell, "--target", "CNOT"])
        assert result.exit_code == 4

    def test_compiled_output_reverifies(self, runner, tmp_path):
        logical = write_logical_cz(tmp_path)
        out = str(tmp_path / "compiled.json")
        result = runner.invoke(
            main,
            ["compile", "--input", logical, "--target", "NL(0.2,0.1,0.35)", "--out", out, "--json"],
        )
        assert result.exit_code == 0, result.output
        verify_result = runner.invoke(
            main,
            ["verify", "--logical", logical, "--physical", out, "--epsilon", "1e-6", "--json"],
        )
        assert verify_result.exit_code == 0, verify_result.output
        report = json.loads(verify_result.output)
        assert report["passed"] is True

    def test_byte_identical_outputs(self, runner, tmp_path):
        logical = write_logical_cz(tmp_path)
        outputs = []
        for name in ("a.json", "b.json"):
            out = str(tmp_path / name)
            result = runner.invoke(
                main,
                ["compile", "--input", logical, "--target", "NL(0.2,0.1,0.35)", "--out", out],
            )
            assert result.exit_code == 0
            outputs.append(open(out, "rb").read())
        assert outputs[0] == outputs[1]


class TestSimulateCommand:
    def test_sv_bell_histogram(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        result = runner.invoke(
            main,
            ["simulate", "--input", bell, "--backend", "sv", "--shots", "10000", "--seed", "4", "--json"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.output)
        counts = payload["counts"]
        assert set(counts) == {"00", "11"}
        assert abs(counts["00"] - 5000) < 3 * np.sqrt(2500)

    def test_strict_requires_seed(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        result = runner.invoke(
            main, ["simulate", "--input", bell, "--shots", "10", "--strict"]
        )
        assert result.exit_code == 2

    def test_ff_refusal_names_op(self, runner, tmp_path):
        doc = {
            "format_version": 1,
            "qubits": 3,
            "gates": [
                {"name": "fswap", "targets": [0, 1]},
                {"name": "swap", "targets": [1, 2]},
            ],
            "metadata": {},
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        result = runner.invoke(main, ["simulate", "--input", str(path), "--backend", "ff"])
        assert result.exit_code == 6
        assert "op 1" in result.output

    def test_ff_matches_sv_marginals(self, runner, tmp_path):
        rng = np.random.default_rng(82)
        circ = random_matchgate_circuit(rng, 5, 20)
        path = tmp_path / "mg.json"
        path.write_text(dumps_document(emit_circuit_document(circ)))
        ff = runner.invoke(main, ["simulate", "--input", str(path), "--backend", "ff", "--json"])
        sv = runner.invoke(main, ["simulate", "--input", str(path), "--backend", "sv", "--json"])
        assert ff.exit_code == 0 and sv.exit_code == 0
        z = json.loads(ff.output)["z_expectations"]
        amps = np.array([complex(re, im) for re, im in json.loads(sv.output)["state"]])
        probs = np.abs(amps) ** 2
        for k in range(5):
            p1 = probs.reshape([2] * 5).take(1, axis=k).sum()
            assert z[k] == pytest.approx(1 - 2 * p1, abs=1e-9)

    def test_deterministic_output(self, runner, tmp_path):
        bell = write_bell(tmp_path)
        args = ["simulate", "--input", bell, "--shots", "100", "--seed", "5", "--json"]
        r1 = runner.invoke(main, args)
        r2 = runner.invoke(main, args)
        assert r1.output == r2.output


class TestVerifyCommand:
    def test_fig_1b_circuit(self, runner, tmp_path):
        # Hand-written physical document for the exact CZ construction.
        physical = {
            "format_version": 1,
            "qubits": 4,
            "gates": [
                {"name": "g", "targets": [1, 2],
                 "blocks": {"a": [[[x.real, 0], [y.real, 0]] for x, y in zip(H[0], H[1])] and
                            [[[H[i, j].real, 0] for j in range(2)] for i in range(2)],
                            "b": [[[H[i, j].real, 0] for j in range(2)] for i in range(2)]}},
                {"name": "swap", "targets": [1, 2]},
                {"name": "g", "targets": [1, 2],
                 "blocks": {"a": [[[X[i, j].real, 0] for j in range(2)] for i in range(2)],
                            "b": [[[X[i, j].real, 0] for j in range(2)] for i in range(2)]}},
                {"name": "g", "targets": [1, 2],
                 "blocks": {"a": [[[H[i, j].real, 0] for j in range(2)] for i in range(2)],
                            "b": [[[H[i, j].real, 0] for j in range(2)] for i in range(2)]}},
            ],
            "metadata": {},
        }
        phys_path = tmp_path / "fig1b.json"
        phys_path.write_text(json.dumps(physical))
        logical = write_logical_cz(tmp_path)
        result = runner.invoke(
            main,
            ["verify", "--logical", logical, "--physical", str(phys_path), "--epsilon", "1e-9", "--json"],
        )
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["fidelity"] == pytest.approx(1.0, abs=1e-12)
        assert report["passed"] is True

    def test_corrupted_circuit_detected(self, runner, tmp_path):
        logical_path = write_logical_cz(tmp_path)
        logical = parse_circuit_document(json.loads(open(logical_path).read()))
        comp = compile_circuit(logical, gate_library("NL", (0.2, 0.1, 0.3)), 1e-6)
        doc = emit_circuit_document(comp.physical)
        good = tmp_path / "good.json"
        good.write_text(dumps_document(doc))
        # Corrupt: perturb one rz-correction block by 0.1.
        bad_doc = json.loads(dumps_document(doc))
        bad_circ = parse_circuit_document(bad_doc)
        bad_circ.append(build_pp(np.diag([np.exp(0.1j), np.exp(-0.1j)]),
                                 np.diag([np.exp(0.1j), np.exp(-0.1j)])), (1, 2))
        bad = tmp_path / "bad.json"
        bad.write_text(dumps_document(emit_circuit_document(bad_circ)))
        ok = runner.invoke(main, ["verify", "--logical", logical_path, "--physical", str(good), "--epsilon", "1e-6", "--json"])
        corrupted = runner.invoke(main, ["verify", "--logical", logical_path, "--physical", str(bad), "--epsilon", "1e-6", "--json"])
        assert ok.exit_code == 0
        f_good = json.loads(ok.output)["fidelity"]
        f_bad = json.loads(corrupted.output)["fidelity"]
        assert f_good - f_bad > 1e-3
        assert corrupted.exit_code == 1  # failed verification

    def test_size_mismatch(self, runner, tmp_path):
        logical = write_logical_cz(tmp_path)
        result = runner.invoke(
            main, ["verify", "--logical", logical, "--physical", logical]
        )
        assert result.exit_code == 2
