"""End-to-end tests of the command line front end."""

import json
from fractions import Fraction

import pytest

from heunfg.cli import DEFAULT_SUM_LIMIT, RunConfig, main, run
from heunfg.coeff import E1, E2, g2, scalar_str
from heunfg.epoly import EPoly
from heunfg.quasi import ParamTuple

E3 = -E1 - E2


def invoke(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def invoke_json(capsys, *argv):
    status, out = invoke(capsys, *argv)
    return status, json.loads(out)


def poly_strings(poly):
    return [scalar_str(poly[k]) for k in range(poly.degree + 1)]


class TestSpectralCommand:
    def test_trivial_tuple(self, capsys):
        status, data = invoke_json(capsys, "spectral", "--l", "0,0,0,0")
        assert status == 0
        assert data["schema"] == 1
        assert data["g"] == 0
        assert data["P"] == ["0", "1"]
        assert data["Q"] == ["0", "1"]
        assert data["Xi"]["c0"] == ["1"]
        assert data["A"] == "(1)*D"
        assert all(v is not False for v in data["checks"].values())

    def test_two_gap_curve(self, capsys):
        status, data = invoke_json(capsys, "spectral", "--l", "2,0,0,0")
        expected = EPoly.from_roots([3 * E1, 3 * E2, 3 * E3]) * EPoly(
            [-3 * g2(), 0, 1]
        )
        assert status == 0
        assert data["g"] == 2
        assert data["Q"] == poly_strings(expected)
        assert data["P"] == data["Q"]
        # Xi = 9 pe^2 + 3 E pe + (E^2 - 9 g2 / 4) in the pole basis
        assert data["Xi"]["c0"] == poly_strings(EPoly([-Fraction(9, 4) * g2(), 0, 1]))
        assert data["Xi"]["b"]["0"] == [["9"], ["0", "3"]]
        assert data["Xi"]["b"]["1"] == []
        checks = data["checks"]
        assert checks["kernel_dimension"] == 5
        assert all(v is True for k, v in checks.items() if k != "kernel_dimension")

    def test_fast_skips_gated_checks(self, capsys):
        status, data = invoke_json(
            capsys, "spectral", "--l", "2,0,0,0", "--checks", "fast"
        )
        assert status == 0
        assert data["checks"]["commute"] is None
        assert data["checks"]["square"] is None
        assert data["checks"]["matches_direct"] is True

    def test_max_genus_widens_square_gate(self, capsys):
        status, data = invoke_json(
            capsys, "spectral", "--l", "3,0,0,0", "--max-g", "3"
        )
        assert status == 0
        assert data["checks"]["square"] is True

    def test_half_integer_rejected(self, capsys):
        status, data = invoke_json(capsys, "spectral", "--n", "2,1,1,0")
        assert status == 2
        assert data["error"]["code"] == "invalid-tuple"


class TestSpacesCommand:
    def test_integer_rows(self, capsys):
        status, data = invoke_json(capsys, "spaces", "--l", "2,0,0,0")
        assert status == 0
        assert data["genus"] == 2
        rows = data["spaces"]
        assert [row["dim"] for row in rows] == [2, 1, 1, 1]
        assert rows[0]["alpha"] == ["-2", "0", "0", "0"]
        assert rows[0]["charpoly"] == poly_strings(EPoly([-3 * g2(), 0, 1]))
        assert [row["parity"] for row in rows] == [
            [1, 1], [1, -1], [-1, -1], [-1, 1],
        ]

    def test_half_integer_rows_have_no_parity_pair(self, capsys):
        status, data = invoke_json(capsys, "spaces", "--n", "1,1,0,0")
        assert status == 0
        assert data["parity_class"] == "half-integer"
        assert len(data["spaces"]) == 8
        assert all(row["parity"] is None for row in data["spaces"])
        assert data["spaces"][0]["dim"] == 1

    def test_odd_shifted_sum_reports_empty(self, capsys):
        status, data = invoke_json(capsys, "spaces", "--n", "1,0,0,0")
        assert status == 0
        assert data["spaces"] == []
        assert "odd sum" in data["note"]


class TestPartnersCommand:
    def test_two_gap_family(self, capsys):
        status, data = invoke_json(capsys, "partners", "--l", "2,0,0,0")
        assert status == 0
        assert data["self_dual"] is False
        member = next(
            m for m in data["members"] if m["l"] == ["1", "1", "1", "0"]
        )
        assert member["witness"] == {
            "kind": "darboux",
            "alpha": ["-2", "1", "1", "0"],
        }
        assert all(m["verified"] for m in data["members"])

    def test_half_integer_family_with_note(self, capsys):
        status, data = invoke_json(capsys, "partners", "--n", "1,1,1,0")
        assert status == 0
        assert "odd sum" in data["note"]
        assert {m["witness"]["kind"] for m in data["members"]} == {
            "identity", "shift",
        }


class TestDarbouxCommand:
    def test_admissible_pair(self, capsys):
        status, data = invoke_json(
            capsys, "darboux", "--l", "2,0,0,0", "--alpha", "-2,1,1,0"
        )
        assert status == 0
        assert data["order"] == 1
        assert data["target"] == ["1", "1", "1", "0"]
        assert data["admissible"] is True
        assert data["residual_zero"] is True
        assert "D" in data["operator"]

    def test_inadmissible_pair_fails(self, capsys):
        status, data = invoke_json(
            capsys, "darboux", "--l", "1,0,0,0", "--alpha", "-2,1,1,0"
        )
        assert status == 1
        assert data["admissible"] is False
        assert data["residual_zero"] is False


class TestGenericCommand:
    def test_fixed_nome_distinct(self, capsys):
        status, data = invoke_json(
            capsys, "generic", "--l", "2,0,0,0", "--p", "0.05"
        )
        assert status == 0
        point = data["points"][0]
        assert point["distinct"] is True
        assert len(point["roots"]) == 5
        assert point["collisions"] == []

    def test_rectangular_limit_flagged(self, capsys):
        status, data = invoke_json(
            capsys, "generic", "--l", "2,0,0,0", "--p", "0"
        )
        # two coincidences survive at p = 0: 3e2 = 3e3 and sqrt(3g2) = 3e1
        assert status == 1
        assert data["distinct"] is False
        assert len(data["points"][0]["collisions"]) == 2

    def test_seeded_run_is_byte_identical(self, capsys):
        first = invoke(capsys, "generic", "--l", "2,1,1,0", "--seed", "11")
        second = invoke(capsys, "generic", "--l", "2,1,1,0", "--seed", "11")
        assert first == second
        assert first[0] == 0

    def test_three_samples_by_default(self, capsys):
        status, data = invoke_json(
            capsys, "generic", "--l", "1,0,0,0", "--seed", "3"
        )
        assert status == 0
        assert len(data["points"]) == 3
        assert all(0.02 <= pt["p"] <= 0.2 for pt in data["points"])

    def test_nome_outside_range_rejected(self, capsys):
        status, data = invoke_json(
            capsys, "generic", "--l", "1,0,0,0", "--p", "1.5"
        )
        assert status == 2
        assert data["error"]["code"] == "invalid-tuple"


class TestErrorReporting:
    def test_work_limit_exceeded(self, capsys):
        status, data = invoke_json(capsys, "spectral", "--l", "8,8,0,0")
        assert status == 2
        assert data["error"]["code"] == "work-limit"

    def test_env_var_lowers_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("HEUN_WORK_LIMIT", "3")
        status, data = invoke_json(capsys, "spectral", "--l", "2,2,0,0")
        assert status == 2
        assert data["error"]["code"] == "work-limit"

    def test_env_var_raises_cap(self, capsys, monkeypatch):
        monkeypatch.setenv("HEUN_WORK_LIMIT", "30")
        status, data = invoke_json(capsys, "spaces", "--l", "8,8,0,0")
        assert status == 0
        assert data["genus"] == 8

    def test_mixed_parity_code(self, capsys):
        status, data = invoke_json(capsys, "spaces", "--l", "1,0,0,1/2")
        assert status == 2
        assert data["error"]["code"] == "mixed-parity"

    def test_malformed_tuple_code(self, capsys):
        status, data = invoke_json(capsys, "spectral", "--l", "1,0,x,0")
        assert status == 2
        assert data["error"]["code"] == "invalid-tuple"

    def test_errors_stay_json_in_text_mode(self, capsys):
        status, out = invoke(
            capsys, "spectral", "--l", "1,0,x,0", "--format", "text"
        )
        assert status == 2
        assert json.loads(out)["error"]["code"] == "invalid-tuple"


class TestTextFormat:
    def test_darboux_text(self, capsys):
        status, out = invoke(
            capsys,
            "darboux", "--l", "2,0,0,0", "--alpha", "-2,1,1,0",
            "--format", "text",
        )
        assert status == 0
        assert "residual: zero" in out
        assert "target l = (1, 1, 1, 0)" in out

    def test_spectral_text(self, capsys):
        status, out = invoke(
            capsys, "spectral", "--l", "1,0,0,0", "--format", "text"
        )
        assert status == 0
        assert "genus 1" in out
        assert "commute ok" in out

    def test_spaces_text(self, capsys):
        status, out = invoke(
            capsys, "spaces", "--l", "2,0,0,0", "--format", "text"
        )
        assert status == 0
        assert "dim 2" in out
        assert "parity (+1, +1)" in out


class TestRunConfig:
    def test_negative_gate_rejected(self):
        config = RunConfig(
            command="spectral",
            couplings=ParamTuple((1, 0, 0, 0)),
            max_genus=-1,
        )
        with pytest.raises(ValueError):
            run(config)

    def test_zero_work_limit_rejected(self):
        config = RunConfig(
            command="spaces",
            couplings=ParamTuple((1, 0, 0, 0)),
            sum_limit=Fraction(0),
        )
        with pytest.raises(ValueError):
            run(config)

    def test_default_limit_allows_the_acceptance_sweeps(self):
        assert DEFAULT_SUM_LIMIT >= 8
