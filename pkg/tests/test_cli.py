"""End-to-end tests for the command line interface.

Every test drives ``hatlens.cli.run`` in-process and checks the exit code,
the stdout payload, and the stderr diagnostics.  Data outputs are matched
against the bundled golden files where one exists.
"""

from __future__ import annotations

import csv
import io
import json
import re

import pytest

from hatlens import builtin_catalog, parse_lens_catalog
from hatlens.cli import EXIT_FINDINGS, EXIT_OK, EXIT_USAGE, main, run

from conftest import FIXTURE_ROOT

ATC = FIXTURE_ROOT / "atc"
MODEL = str(ATC / "atc.hat")
LENS = str(ATC / "atc.lens")
SFM = str(ATC / "atc.sfm")
MIT = str(ATC / "atc.mit")
MINIMAL = str(FIXTURE_ROOT / "minimal" / "minimal.hat")

SUBCOMMANDS = [
    "validate", "interactions", "map", "specialise", "trace",
    "mitigations", "report", "lenses",
]


def invoke(capsys, *argv: str) -> tuple[int, str, str]:
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def golden(name: str) -> str:
    return (ATC / name).read_text(encoding="utf-8")


class TestReportAndMap:
    def test_report_csv_matches_bundled_table(self, capsys):
        code, out, err = invoke(
            capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
            "--mit", MIT, "--format", "csv")
        assert code == EXIT_OK
        assert err == ""
        assert out == golden("table.csv")

    def test_specialise_matches_bundled_table(self, capsys):
        code, out, err = invoke(
            capsys, "specialise", MODEL, "--lens", LENS, "--sfm", SFM)
        assert code == EXIT_OK
        assert err == ""
        assert out == golden("table.csv")

    def test_map_equals_report_csv_without_sfm(self, capsys):
        code_map, out_map, _ = invoke(capsys, "map", MODEL, "--lens", LENS)
        code_rep, out_rep, _ = invoke(
            capsys, "report", MODEL, "--lens", LENS, "--format", "csv")
        assert code_map == code_rep == EXIT_OK
        assert out_map == out_rep
        # Three machine-to-human interactions with eleven applicable modes
        # each, one human-to-machine interaction with three.
        assert len(out_map.splitlines()) == 1 + 3 * 11 + 3

    def test_map_minimal_matches_bundled_table(self, capsys):
        code, out, err = invoke(capsys, "map", MINIMAL)
        assert code == EXIT_OK
        assert err == ""
        expected = (FIXTURE_ROOT / "minimal" / "table.csv").read_text(
            encoding="utf-8")
        assert out == expected

    def test_specialise_requires_sfm_flag(self, capsys):
        code, out, err = invoke(capsys, "specialise", MODEL)
        assert code == EXIT_USAGE
        assert out == ""
        assert "usage" in err

    def test_specialise_without_lens_rejects_fixture_modes(self, capsys):
        code, out, err = invoke(capsys, "specialise", MODEL, "--sfm", SFM)
        assert code == EXIT_FINDINGS
        assert out == ""
        assert err == "error: sfm 3: unknown generic mode 'unstable'\n"

    def test_report_json_repeat_runs_are_identical(self, capsys):
        first = invoke(capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
                       "--mit", MIT, "--format", "json")
        second = invoke(capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
                        "--mit", MIT, "--format", "json")
        assert first == second
        assert first[0] == EXIT_OK
        payload = json.loads(first[1])
        assert [effect["sfm_id"] for effect in payload["second_order_effects"]] \
            == [3, 3, 4, 4, 5, 5]

    def test_report_markdown_has_all_sections(self, capsys):
        code, out, err = invoke(
            capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
            "--mit", MIT, "--format", "md", "--interaction", "3",
            "--category", "timely", "--direction", "down")
        assert code == EXIT_OK
        for heading in ("## Failure Modes", "## Pathways",
                        "## Second-order Effects", "## Mitigation Suggestions"):
            assert heading in out
        assert "(none)" not in out

    def test_report_dot_needs_trace_flags(self, capsys):
        code, out, err = invoke(capsys, "report", MODEL, "--format", "dot")
        assert code == EXIT_USAGE
        assert out == ""
        assert err == "error: --format dot needs --interaction and --category\n"


class TestTrace:
    def test_dot_matches_bundled_pathways(self, capsys):
        code, out, err = invoke(
            capsys, "trace", MODEL, "--mit", MIT, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--format", "dot")
        assert code == EXIT_OK
        assert err == ""
        assert out == golden("pathway_sfm4.dot")

    def test_dot_is_unchanged_by_unattached_mitigations(self, capsys):
        with_mit = invoke(
            capsys, "trace", MODEL, "--mit", MIT, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--format", "dot")
        without = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--format", "dot")
        assert with_mit == without

    def test_text_lists_each_pathway(self, capsys):
        code, out, err = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "timely", "--direction", "down")
        assert code == EXIT_OK
        assert err == ""
        assert out == (
            "interaction 3 [timely, down]: h_obs_reco -> h_orient -> h_decide"
            " -> h_act_own -> h_obs_traffic (gain 1.0, Neutral)\n"
            "interaction 3 [timely, down]: h_obs_reco -> h_orient -> h_decide"
            " -> h_act_reco -> h_obs_traffic (gain 1.0, Neutral)\n"
            "interaction 3 [timely, down]: h_obs_reco -> h_orient -> h_decide"
            " -> m_ingest_choice -> m_project -> m_select -> m_publish"
            " -> hmi_receive -> hmi_format -> hmi_recommend"
            " (gain 1.0, Neutral)\n"
        )

    def test_both_directions_prints_upstream_first(self, capsys):
        code, out, err = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "stability", "--direction", "both")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert len(lines) == 9
        assert all("[stability, up]" in line for line in lines[:6])
        assert all("[stability, down]" in line for line in lines[6:])

    def test_json_and_dot_agree_on_highlighted_nodes(self, capsys):
        _, json_out, _ = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--format", "json")
        _, dot_out, _ = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--format", "dot")
        payload = json.loads(json_out)
        traced: set[str] = set()
        for pathway in payload["pathways"]:
            traced.update(pathway["nodes"])
        highlighted = set(re.findall(
            r'^\s*"(\w+)" \[label="[^"]*", penwidth=3\];$', dot_out, re.M))
        assert highlighted == traced

    def test_unknown_interaction_id(self, capsys):
        code, out, err = invoke(
            capsys, "trace", MODEL, "--interaction", "9",
            "--category", "timely", "--direction", "down")
        assert code == EXIT_FINDINGS
        assert out == ""
        assert err == "error: no interaction 9\n"

    def test_non_positive_max_depth_is_a_usage_error(self, capsys):
        code, out, err = invoke(
            capsys, "trace", MODEL, "--interaction", "3",
            "--category", "timely", "--direction", "down", "--max-depth", "0")
        assert code == EXIT_USAGE
        assert out == ""
        assert err == "error: max_depth must be >= 1, got 0\n"


class TestInteractionsAndMitigations:
    def test_interactions_csv_is_exact(self, capsys):
        code, out, err = invoke(capsys, "interactions", MODEL)
        assert code == EXIT_OK
        assert err == ""
        assert out == (
            "I ID,Interaction Name,Machine Stage,Human Stage,Direction\n"
            "1,Observe traffic picture,Observe,Observe,Machine->Human\n"
            "2,Observe current schedule,Observe,Observe,Machine->Human\n"
            "3,Observe Landing Sequence,Decide,Observe,Machine->Human\n"
            "4,Ingest controller's selected sequence,Observe,Decide,"
            "Human->Machine\n"
        )

    def test_mitigations_csv_includes_fixture_catalog(self, capsys):
        code, out, err = invoke(
            capsys, "mitigations", MODEL, "--lens", LENS, "--sfm", SFM,
            "--mit", MIT)
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "I ID,SFM ID,Category,Mitigation ID,Mitigation Name"
        assert "3,4,timely,hmi_summary,Recommendation summary view" in lines
        rows = list(csv.reader(io.StringIO(out)))[1:]
        assert all(len(row) == 5 for row in rows)

    def test_mitigations_csv_without_mit_flag_lacks_fixture_entries(self, capsys):
        code, out, err = invoke(
            capsys, "mitigations", MODEL, "--lens", LENS, "--sfm", SFM)
        assert code == EXIT_OK
        assert "hmi_summary" not in out


class TestLenses:
    def test_listing_names_builtin_lenses(self, capsys):
        code, out, err = invoke(capsys, "lenses")
        assert code == EXIT_OK
        assert out == ("machine: Machine Behaviour (6 modes)\n"
                       "human_intent: Human Intent (4 modes)\n")

    def test_listing_appends_loaded_catalogs(self, capsys):
        code, out, err = invoke(capsys, "lenses", "--lens", LENS)
        assert code == EXIT_OK
        assert out.endswith("atc: Landing Sequence Decision Support (2 modes)\n")

    def test_no_builtin_listing_is_empty(self, capsys):
        code, out, err = invoke(capsys, "lenses", "--no-builtin")
        assert code == EXIT_OK
        assert out == ""

    def test_export_round_trips_to_builtin_catalog(self, capsys):
        code, out, err = invoke(capsys, "lenses", "--export")
        assert code == EXIT_OK
        assert parse_lens_catalog(out) == builtin_catalog()

    def test_duplicate_lens_file_is_rejected(self, capsys):
        code, out, err = invoke(capsys, "lenses", "--lens", LENS, "--lens", LENS)
        assert code == EXIT_FINDINGS
        assert out == ""
        assert err.startswith("error: duplicate lens id 'atc'")

    def test_duplicate_mitigation_file_is_rejected(self, capsys):
        code, out, err = invoke(
            capsys, "mitigations", MODEL, "--mit", MIT, "--mit", MIT)
        assert code == EXIT_FINDINGS
        assert out == ""
        assert err == f"error: duplicate mitigation id 'hmi_summary' from {MIT}\n"


class TestValidate:
    def test_clean_model_is_silent(self, capsys):
        for extra in ([], ["--strict"]):
            code, out, err = invoke(capsys, "validate", MODEL, *extra)
            assert code == EXIT_OK
            assert out == ""
            assert err == ""

    def test_warning_only_model_exits_zero(self, capsys, tmp_path):
        path = tmp_path / "quiet.hat"
        path.write_text(
            'model "Quiet"\n'
            'lane h side=human kind=operator "Operator"\n'
            'node a lane=h stage=observe "Watch"\n',
            encoding="utf-8")
        code, out, err = invoke(capsys, "validate", str(path))
        assert code == EXIT_OK
        assert out == ""
        assert err == f"{path}:1: warning: NO_INTERACTIONS: no interactions possible\n"

    def test_strictness_promotes_observe_target(self, capsys, tmp_path):
        path = tmp_path / "crossy.hat"
        path.write_text(
            'model "Crossy"\n'
            'lane h side=human kind=operator "Operator"\n'
            'lane m side=machine kind=autonomy "Bot"\n'
            'node a lane=m stage=act "Publish"\n'
            'node c lane=h stage=decide "Choose"\n'
            'edge a -> c "Push"\n',
            encoding="utf-8")
        diagnostic = (
            "OBSERVE_TARGET: cross-side edge 'e1' targets Decide-stage node "
            "'c' instead of an Observe-stage node\n")
        code, out, err = invoke(capsys, "validate", str(path))
        assert code == EXIT_OK
        assert err == f"{path}:6: warning: {diagnostic}"
        code, out, err = invoke(capsys, "validate", str(path), "--strict")
        assert code == EXIT_FINDINGS
        assert err == f"{path}:6: error: {diagnostic}"

    def test_warnings_do_not_block_downstream_commands(self, capsys, tmp_path):
        path = tmp_path / "crossy.hat"
        path.write_text(
            'model "Crossy"\n'
            'lane h side=human kind=operator "Operator"\n'
            'lane m side=machine kind=autonomy "Bot"\n'
            'node a lane=m stage=act "Publish"\n'
            'node c lane=h stage=decide "Choose"\n'
            'edge a -> c name="Push"\n',
            encoding="utf-8")
        code, out, err = invoke(capsys, "interactions", str(path))
        assert code == EXIT_OK
        assert "warning: OBSERVE_TARGET" in err
        assert out.splitlines()[1] == "1,Push,Act,Decide,Machine->Human"

    def test_validation_errors_stop_other_commands(self, capsys, tmp_path):
        path = tmp_path / "broken.hat"
        path.write_text(
            'model "Broken"\n'
            'lane h side=human kind=operator "Operator"\n'
            'lane m side=machine kind=autonomy "Bot"\n'
            'node a lane=m stage=act "Publish" mitigation=unheard_of\n'
            'node b lane=h stage=observe "Watch"\n'
            'edge a -> b\n',
            encoding="utf-8")
        code, out, err = invoke(capsys, "interactions", str(path))
        assert code == EXIT_FINDINGS
        assert out == ""
        assert "error: UNKNOWN_MITIGATION" in err

    def test_no_builtin_rejects_builtin_categories(self, capsys):
        code, out, err = invoke(capsys, "map", MODEL, "--no-builtin",
                                "--lens", LENS)
        assert code == EXIT_OK
        code, out, err = invoke(capsys, "map", MODEL, "--no-builtin")
        assert code == EXIT_FINDINGS
        assert out == ""
        assert "error: UNKNOWN_CATEGORY" in err


class TestFilesAndUsage:
    def test_parse_errors_carry_position(self, capsys, tmp_path):
        path = tmp_path / "empty.hat"
        path.write_text("# nothing here\n", encoding="utf-8")
        code, out, err = invoke(capsys, "validate", str(path))
        assert code == EXIT_USAGE
        assert out == ""
        assert err == f"{path}:1:1: error: missing model statement\n"

    def test_missing_file(self, capsys, tmp_path):
        path = tmp_path / "nope.hat"
        code, out, err = invoke(capsys, "validate", str(path))
        assert code == EXIT_USAGE
        assert out == ""
        assert err.startswith(f"error: cannot read {path}:")

    def test_output_flag_writes_the_stdout_payload(self, capsys, tmp_path):
        _, expected, _ = invoke(
            capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
            "--format", "csv")
        target = tmp_path / "out.csv"
        code, out, err = invoke(
            capsys, "report", MODEL, "--lens", LENS, "--sfm", SFM,
            "--format", "csv", "-o", str(target))
        assert code == EXIT_OK
        assert out == ""
        assert err == ""
        assert target.read_bytes() == expected.encode("utf-8")

    def test_unwritable_output_is_a_usage_error(self, capsys, tmp_path):
        code, out, err = invoke(
            capsys, "interactions", MODEL, "-o", str(tmp_path))
        assert code == EXIT_USAGE
        assert out == ""
        assert err.startswith(f"error: cannot write {tmp_path}:")

    def test_unknown_subcommand_and_missing_subcommand(self, capsys):
        code, out, err = invoke(capsys, "frobnicate")
        assert code == EXIT_USAGE
        assert "usage" in err
        code, out, err = invoke(capsys)
        assert code == EXIT_USAGE
        assert "usage" in err

    def test_help_exits_zero_everywhere(self, capsys):
        code, out, err = invoke(capsys, "--help")
        assert code == EXIT_OK
        assert out.startswith("usage: hatlens")
        for command in SUBCOMMANDS:
            code, out, err = invoke(capsys, command, "--help")
            assert code == EXIT_OK
            assert f"hatlens {command}" in out

    def test_main_is_an_alias_for_run(self, capsys):
        assert main(["lenses"]) == EXIT_OK
        capsys.readouterr()
