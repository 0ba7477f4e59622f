from __future__ import annotations

import json
import shutil
import subprocess
from fractions import Fraction
from pathlib import Path

import pytest

from ffrtf.cli import EXIT_FAIL, EXIT_OK, EXIT_REFUSED, main
from ffrtf.config import ConfigError, PreconditionError, check_preconditions, parse_config
from ffrtf.moduli import enumerate_base
from ffrtf.report import Check, Report, exact_text

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SMALL_A = """\
q=3
f=t^2 + 1
sigma_plus=t
D=t + 2
"""


def _write(tmp_path: Path, text: str, name: str = "cfg.txt") -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# config parsing


@pytest.mark.parametrize("text,needle", [
    ("q=3\nf=t^2 + 1\nbogus=1\n", "line 3: unknown field 'bogus'"),
    ("q=4\nf=t^2 + 1\n", "line 1: field q: 4 is not prime"),
    ("q=3\nf=t^2 + 2*t + 1\n", "line 2: field f: f must be squarefree"),
    ("q=3\nf=t^3 + 1\n", "line 2: field f"),
    ("q=3\nf=t^2 + 1\nsigma_plus=t\nsigma_minus=t\n", "line 4: field sigma_minus"),
    ("q=3\nf=t^2 + 1\nD=t^2 + 2\n", "line 3: field D"),
    ("q=3\nf=t^2 + 1\nD=t\nmax_degree=1\n", "exclusive"),
    ("q=3\nf=t^2 + 1\nalphas=2,1\n", "line 3: field alphas"),
    ("q=3\nf=t^2 + 1\nseed=x\n", "line 3: field seed"),
    ("q=3\nf=t^2 + 1\nsuites=eta,nope\n", "line 3: field suites"),
    ("q=3\n", "field f is required"),
    ("q=3\nf=t^2 + 1\nq=5\n", "line 3: field q given twice"),
    ("q=3\nf t^2\n", "line 2: expected key=value"),
])
def test_config_errors_name_line_and_field(text, needle):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert needle in str(exc.value)


def test_config_grammar_round_trip():
    cfg = parse_config("# comment\nq=5\nf=t^2 - t\nsigma_plus=t + 2\nsigma_minus=\nD=t + 1^2, inf\nalphas=2, 1/3\n"
                       "bases_per_divisor=7\nseed=4\nsuites=eta\n")
    assert cfg.q == 5 and cfg.f == (0, 4, 1)
    assert [x.text() for x in cfg.sigma.plus] == ["t + 2"] and cfg.sigma.minus == ()
    assert cfg.D.degree == 3
    assert cfg.alphas == (Fraction(2), Fraction(1, 3))
    assert (cfg.bases_per_divisor, cfg.seed, cfg.suites) == (7, 4, ("eta",))


def test_shipped_configs_parse():
    for path in sorted(CONFIGS.glob("*.txt")):
        cfg = parse_config(path.read_text(encoding="utf-8"))
        check_preconditions(cfg)


@pytest.mark.parametrize("text,needle", [
    ("q=3\nf=t^2 + 1\nsigma_plus=t^2 + 1\n", "Sigma ∩ R = ∅ violated"),
    ("q=3\nf=t^2 + 1\nsigma_plus=t\nD=t\n", "supp D ⊂ U = X - Sigma - R violated"),
    ("q=5\nf=t^2 - t\nD=t + 4\n", "supp D ⊂ U = X - Sigma - R violated"),
])
def test_preconditions_name_the_violated_condition(text, needle):
    with pytest.raises(PreconditionError, match=needle):
        check_preconditions(parse_config(text))


def test_infinity_in_sigma_is_refused():
    with pytest.raises(PreconditionError, match="∞ ∉ Sigma"):
        parse_config("q=3\nf=t^2 + 1\nsigma_minus=inf\n")


def test_main_reports_invalid_config(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nwhat=1\n")
    assert main(["run", "--config", path]) == EXIT_REFUSED
    assert "invalid config" in capsys.readouterr().err


def test_main_refuses_below_degree_threshold(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nsigma_plus=t\nsigma_minus=t + 1\nD=\n")
    assert main(["run", "--config", path, "--suite", "orbital-vs-N"]) == EXIT_REFUSED
    assert "refused: d >= max(2g' - 1 + N, 2g) violated: d = 0 < 1" in capsys.readouterr().err


def test_main_refuses_missing_file(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.txt")]) == EXIT_REFUSED
    assert "ffrtf:" in capsys.readouterr().err


def test_unknown_suite_on_the_command_line(tmp_path, capsys):
    path = _write(tmp_path, SMALL_A)
    assert main(["run", "--config", path, "--suite", "nope"]) == EXIT_REFUSED
    assert "unknown suite" in capsys.readouterr().err


# run and reports


def test_empty_suite_list_is_an_empty_passing_report(tmp_path, capsys):
    path = _write(tmp_path, SMALL_A)
    out = tmp_path / "r.json"
    assert main(["run", "--config", path, "--suite", "--json", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == "total: 0/0 passed; OK\n"
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["checks"] == [] and doc["summary"] == {"failed": 0, "ok": True, "passed": 0, "total": 0}


def test_json_report_schema_and_exact_strings(tmp_path):
    path = _write(tmp_path, SMALL_A)
    out = tmp_path / "r.json"
    assert main(["run", "--config", path, "--suite", "M-vs-N", "regularized", "--json", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["schema"] == "ffrtf-report/1"
    assert doc["config"] == {"D": "t + 2", "f": "t^2 + 1", "q": "3", "sigma_plus": "t"}
    assert doc["suites"] == ["M-vs-N", "regularized"]
    for check in doc["checks"]:
        assert set(check) == {"suite", "id", "inputs", "left", "right", "verdict"}
        assert check["verdict"] == ("pass" if check["left"] == check["right"] else "fail")
    m_values = [c["left"] for c in doc["checks"] if c["suite"] == "M-vs-N"]
    assert m_values and all("/" in v for v in m_values)
    assert doc["summary"]["ok"] is True


def test_exact_text_writes_rationals_as_p_over_q():
    assert exact_text(Fraction(3)) == "3/1"
    assert exact_text(Fraction(-1, 2)) == "-1/2"
    assert exact_text(True) == "True"


def test_report_verdicts_and_exit_status(tmp_path):
    report = Report({}, ["s"], [Check("s", "a", "", "1/1", "1/1"), Check("s", "b", "", "1/1", "2/1")])
    assert not report.ok and report.passed == 1
    text = report.to_text()
    assert "FAIL s b" in text and "suite s: 1/2 passed" in text and text.endswith("FAILED\n")


def test_reports_are_byte_identical_across_runs_and_jobs(tmp_path):
    path = _write(tmp_path, SMALL_A)
    outs = []
    for i, jobs in enumerate(("1", "1", "2")):
        out = tmp_path / f"r{i}.json"
        assert main(["run", "--config", path, "--suite", "orbital-vs-N", "eta", "--jobs", jobs,
                     "--json", str(out)]) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_config_suites_field_sets_the_default(tmp_path, capsys):
    path = _write(tmp_path, SMALL_A + "suites=picard-sanity\n")
    assert main(["run", "--config", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "suite picard-sanity: 5/5 passed" in out and "suite eta" not in out


def test_corrupted_eta_makes_orbital_vs_N_fail(tmp_path, capsys):
    path = _write(tmp_path, "q=5\nf=t^2 - t\nD=t + 2\nbases_per_divisor=40\n")
    assert main(["run", "--config", path, "--suite", "orbital-vs-N", "--mutate-eta", "t"]) == EXIT_FAIL
    out = capsys.readouterr().out
    assert "FAIL orbital-vs-N" in out and "/local=N" in out and out.endswith("FAILED\n")


def test_uncorrupted_control_passes(tmp_path, capsys):
    path = _write(tmp_path, "q=5\nf=t^2 - t\nD=t + 2\nbases_per_divisor=40\n")
    assert main(["run", "--config", path, "--suite", "orbital-vs-N"]) == EXIT_OK


def test_mutation_hook_needs_a_ramified_place(tmp_path, capsys):
    path = _write(tmp_path, SMALL_A)
    assert main(["run", "--config", path, "--suite", "eta", "--mutate-eta", "t"]) == EXIT_REFUSED
    assert "--mutate-eta" in capsys.readouterr().err


# the other verbs


def test_bases_verb_lists_every_base_point(tmp_path, capsys):
    path = _write(tmp_path, SMALL_A)
    out = tmp_path / "b.json"
    assert main(["bases", "--config", path, "--json", str(out)]) == EXIT_OK
    cfg = parse_config(SMALL_A)
    n = len(enumerate_base(cfg.cover, cfg.sigma, cfg.D))
    assert len(capsys.readouterr().out.splitlines()) == n
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["schema"] == "ffrtf-rows/1" and doc["kind"] == "bases" and len(doc["rows"]) == n


def test_count_verbs_agree_on_totals(tmp_path):
    path = _write(tmp_path, SMALL_A)
    n_out, m_out = tmp_path / "n.json", tmp_path / "m.json"
    assert main(["count-n", "--config", path, "--json", str(n_out)]) == EXIT_OK
    assert main(["count-m", "--config", path, "--json", str(m_out)]) == EXIT_OK
    n_rows = json.loads(n_out.read_text(encoding="utf-8"))["rows"]
    m_rows = json.loads(m_out.read_text(encoding="utf-8"))["rows"]
    totals: dict[str, Fraction] = {}
    for row in n_rows:
        assert set(row) == {"base", "d", "count"}
        totals[row["base"]] = totals.get(row["base"], Fraction(0)) + Fraction(row["count"])
    for row in m_rows:
        assert Fraction(row["count"]) == totals.get(row["base"], Fraction(0))


def test_orbital_verb_prints_both_routes(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nD=t + 2\n")
    assert main(["orbital", "--config", path, "--u", "t/(t + 1)"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("X-route: ") and lines[1].startswith("local-product: ")
    assert lines[0].removeprefix("X-route: ") == lines[1].removeprefix("local-product: ")


def test_orbital_verb_regularized_and_refusal(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nD=t + 2\n")
    assert main(["orbital", "--config", path, "--u", "inf"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("regularized: ")
    low = _write(tmp_path, "q=3\nf=t^2 + 1\nsigma_plus=t\nsigma_minus=t + 1\nD=\n", "low.txt")
    assert main(["orbital", "--config", low, "--u", "0"]) == EXIT_REFUSED
    assert "rho + N - 3" in capsys.readouterr().err


def test_orbital_verb_rejects_bad_u(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nD=t + 2\n")
    assert main(["orbital", "--config", path, "--u", "t/0"]) == EXIT_REFUSED
    assert "--u" in capsys.readouterr().err


def test_orbital_all_rows_match_the_N_side(tmp_path):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nD=t + 2\n")
    out = tmp_path / "o.json"
    assert main(["orbital-all", "--config", path, "--json", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text(encoding="utf-8"))["rows"]
    assert rows and all(row["orbital"] == row["N-side"] for row in rows)


def test_verbs_needing_D_refuse_a_sweep(tmp_path, capsys):
    path = _write(tmp_path, "q=3\nf=t^2 + 1\nmax_degree=1\n")
    assert main(["bases", "--config", path]) == EXIT_REFUSED
    assert "field D is required" in capsys.readouterr().err


@pytest.mark.skipif(shutil.which("ffrtf") is None, reason="console script not installed")
def test_console_script(tmp_path):
    path = _write(tmp_path, SMALL_A)
    proc = subprocess.run(["ffrtf", "run", "--config", path, "--suite", "picard-sanity"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.endswith("total: 5/5 passed; OK\n")
