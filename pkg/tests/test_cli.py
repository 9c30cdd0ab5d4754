import json

from progtariff.cli import run_cli

from conftest import FIXTURES

SCHEDULE = str(FIXTURES / "kepco_residential.json")
SLOT_TRACE = str(FIXTURES / "three_consumer_slot_exact.csv")
MONTH_TRACE = str(FIXTURES / "two_consumer_month.csv")


def run(capsys, *argv):
    status = run_cli(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_bill_350(capsys):
    status, out, err = run(
        capsys, "bill", "--schedule", SCHEDULE, "--usage", "350"
    )
    assert status == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "51480.00"
    assert len(lines) == 5  # price plus four tier rows
    assert lines[1] == "tier 1: 100.0000 kWh @ 60.7 = 6070.00 KRW"


def test_bill_zero_usage(capsys):
    status, out, _ = run(capsys, "bill", "--schedule", SCHEDULE, "--usage", "0")
    assert status == 0
    assert out == "0.00\n"


def test_allocate_independent(capsys):
    status, out, _ = run(
        capsys,
        "allocate",
        "--group",
        "466.50",
        "--individual",
        "312.08,155.50,50.58",
        "--policy",
        "independent",
    )
    assert status == 0
    assert out == "280.97,140.00,45.54\n"


def test_allocate_exact_sum_default(capsys):
    status, out, _ = run(
        capsys, "allocate", "--group", "466.50", "--individual", "312.08,155.50,50.58"
    )
    assert status == 0
    assert out == "280.96,140.00,45.54\n"


def test_allocate_json(capsys):
    status, out, _ = run(
        capsys,
        "allocate",
        "--group",
        "466.50",
        "--individual",
        "312.08,155.50,50.58",
        "--json",
    )
    payload = json.loads(out)
    assert payload["total"] == "466.50"
    assert payload["policy"] == "exact-sum"


def test_validate_summary(capsys):
    status, out, err = run(capsys, "validate", "--schedule", SCHEDULE)
    assert status == 0 and err == ""
    assert "tier 6: above 500.0000 kWh at 709.5/kWh" in out


def test_compare_slot_trace(capsys):
    status, out, _ = run(
        capsys, "compare", "--schedule", SCHEDULE, "--trace", SLOT_TRACE
    )
    assert status == 0
    assert "518.16" in out
    assert "466.50" in out
    assert "51.66" in out


def test_compare_json_deterministic(capsys):
    args = ("compare", "--schedule", SCHEDULE, "--trace", SLOT_TRACE, "--json")
    status1, out1, _ = run(capsys, *args)
    status2, out2, _ = run(capsys, *args)
    assert status1 == status2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["aggregate"]["group_saving"] == "51.66"
    assert payload["aggregate"]["slotted_individual"] == "518.16"


def test_simulate_monthly_single_consumer(capsys, tmp_path):
    trace = tmp_path / "one.csv"
    trace.write_text(
        "consumer_id,interval_start,energy_kwh\nhome,2025-01-01T00:00:00Z,350\n"
    )
    status, out, _ = run(
        capsys,
        "simulate",
        "--schedule",
        SCHEDULE,
        "--trace",
        str(trace),
        "--scheme",
        "monthly-individual",
    )
    assert status == 0
    assert "51480.00" in out


def test_shift_reports_negative_delta(capsys):
    status, out, _ = run(
        capsys,
        "shift",
        "--schedule",
        SCHEDULE,
        "--trace",
        MONTH_TRACE,
        "--consumer",
        "c2",
        "--from-slot",
        "1",
        "--to-slot",
        "2",
        "--amount",
        "1.2",
    )
    assert status == 0
    assert "delta -12.85" in out


def test_missing_file_is_input_error(capsys):
    status, out, err = run(capsys, "bill", "--schedule", "nope.json", "--usage", "1")
    assert status == 1
    assert out == ""
    assert err.strip() != ""
    assert "Traceback" not in err


def test_unknown_flag_is_input_error(capsys):
    status, _, err = run(capsys, "bill", "--schedule", SCHEDULE, "--frobnicate")
    assert status == 1
    assert err.strip() != ""


def test_unknown_command_is_input_error(capsys):
    status, _, err = run(capsys, "explode")
    assert status == 1
    assert err.strip() != ""


def test_negative_usage_is_input_error(capsys):
    status, _, err = run(capsys, "bill", "--schedule", SCHEDULE, "--usage", "-5")
    assert status == 1
    assert ">= 0" in err


def test_bad_trace_row_is_reported_with_line(capsys, tmp_path):
    trace = tmp_path / "bad.csv"
    trace.write_text(
        "consumer_id,interval_start,energy_kwh\n"
        "a,2025-01-01T00:00:00Z,1\n"
        "a,2025-01-01T06:00:00Z,oops\n"
    )
    status, _, err = run(
        capsys, "simulate", "--schedule", SCHEDULE, "--trace", str(trace)
    )
    assert status == 1
    assert "bad.csv:3" in err


def test_empty_trace_needs_period_start(capsys, tmp_path):
    trace = tmp_path / "empty.csv"
    trace.write_text("consumer_id,interval_start,energy_kwh\n")
    status, _, err = run(
        capsys, "compare", "--schedule", SCHEDULE, "--trace", str(trace)
    )
    assert status == 1
    assert "--period-start" in err


def test_internal_check_failure_exits_two(capsys, monkeypatch):
    import progtariff.cli as cli
    from progtariff import InternalCheckError

    def explode(*args, **kwargs):
        raise InternalCheckError("collective price escaped its bound")

    monkeypatch.setattr(cli, "run_scheme", explode)
    status, _, err = run(
        capsys,
        "simulate",
        "--schedule",
        SCHEDULE,
        "--trace",
        SLOT_TRACE,
    )
    assert status == 2
    assert "internal check failed" in err


def test_help_exits_zero(capsys):
    status, out, _ = run(capsys, "--help")
    assert status == 0
    assert "validate" in out and "allocate" in out


def test_cli_output_byte_identical_across_runs(capsys):
    args = ("bill", "--schedule", SCHEDULE, "--usage", "350")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2
