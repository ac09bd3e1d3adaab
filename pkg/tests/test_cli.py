"""CLI tests: in-process main() calls, one subprocess smoke test, and the
thin-client mode against a live service instance."""

import json
import socket
import subprocess
import sys
import threading
import time

import pytest

from twistlocal.cli import (
    EXIT_BOUND,
    EXIT_DOMAIN,
    EXIT_NO,
    EXIT_UNAVAILABLE,
    EXIT_UNKNOWN,
    EXIT_USAGE,
    EXIT_YES,
    main,
)
from twistlocal.localpoints import TwistSpec, PrimeVerdict, verdict_at_prime

SIEVE_OBSTRUCTED = {
    "primes": [5],
    "5": {"factors": [3], "curve_image": [[0]], "mw_images": [], "basepoint": [2]},
}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerdict:
    def test_no_example(self, capsys):
        code, out, _ = run(capsys, "verdict", "--m", "26", "--d", "2")
        assert code == EXIT_NO
        assert json.loads(out)["status"] == "No"

    def test_table_row_never_no(self, capsys):
        code, out, _ = run(capsys, "verdict", "--m", "26", "--d", "-29")
        assert code in (EXIT_YES, EXIT_UNKNOWN)
        assert code != EXIT_NO

    def test_invalid_d(self, capsys):
        code, _, err = run(capsys, "verdict", "--m", "26", "--d", "0")
        assert code == EXIT_USAGE
        assert "quadratic field" in err

    def test_single_prime_round_trip(self, capsys):
        code, out, _ = run(capsys, "verdict", "--m", "26", "--d", "2", "--prime", "13")
        assert code == EXIT_NO
        parsed = PrimeVerdict.from_json(json.loads(out))
        assert parsed == verdict_at_prime(TwistSpec((26,), (2,)), 13)

    def test_trace_includes_verdicts(self, capsys):
        _, plain, _ = run(capsys, "verdict", "--m", "26", "--d", "-23")
        _, traced, _ = run(capsys, "verdict", "--m", "26", "--d", "-23", "--trace")
        assert "verdicts" not in json.loads(plain)
        assert len(json.loads(traced)["verdicts"]) == 7

    def test_yes_exit(self, capsys):
        code, out, _ = run(capsys, "verdict", "--m", "26", "--d", "-23")
        assert code == EXIT_YES
        assert json.loads(out)["status"] == "Yes"


class TestSearch:
    def test_fixture(self, capsys):
        code, out, err = run(capsys, "search", "--m", "13,2", "--bound", "500", "--limit", "5")
        assert code == 0
        lines = [json.loads(line) for line in out.strip().splitlines()]
        # only two verified tuples exist below this bound; --limit is a cap
        assert [tuple(l["d"]) for l in lines] == [(-263, 313), (313, -263)]
        assert all(l["verdict"] == "Yes" for l in lines)
        assert "suppressed 0" in err

    def test_sorted_flag(self, capsys):
        _, out, _ = run(capsys, "search", "--m", "13,2", "--bound", "500", "--sorted")
        ds = [tuple(json.loads(line)["d"]) for line in out.strip().splitlines()]
        assert ds == sorted(ds)

    def test_bad_bound(self, capsys):
        code, _, _ = run(capsys, "search", "--m", "26", "--bound", "1")
        assert code == EXIT_DOMAIN


class TestDensity:
    def test_csv_default(self, capsys):
        code, out, err = run(capsys, "density", "--m", "5,13", "--d", "23616331489", "--X", "100000")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "X,count,c_hat"
        assert lines[3].startswith("100000,1605,")
        assert "alpha_hat" in err

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys, "density", "--m", "5,13", "--d", "23616331489", "--X", "100000",
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["counts"][-1] == [100000, 1605]

    def test_wrong_m_arity(self, capsys):
        code, _, err = run(capsys, "density", "--m", "5", "--d", "23616331489", "--X", "100000")
        assert code == EXIT_USAGE
        assert "two level factors" in err

    def test_preflight_failure(self, capsys):
        code, _, err = run(capsys, "density", "--m", "7,13", "--d", "23616331489", "--X", "100000")
        assert code == EXIT_DOMAIN
        assert "preflight failed" in err
        assert "[FAIL]" in err and "[ok]" in err


class TestClasspoly:
    def test_pretty(self, capsys):
        code, out, _ = run(capsys, "classpoly", "--disc", "-4")
        assert code == 0 and out.strip() == "X - 1728"

    def test_json(self, capsys):
        _, out, _ = run(capsys, "classpoly", "--disc", "-23", "--format", "json")
        obj = json.loads(out)
        assert obj["degree"] == 3 and obj["coeffs"][0] == 1

    def test_domain(self, capsys):
        assert run(capsys, "classpoly", "--disc", "-5")[0] == EXIT_DOMAIN

    def test_bound(self, capsys):
        assert run(capsys, "classpoly", "--disc", "-2000003")[0] == EXIT_BOUND


class TestPicard:
    def test_cusp_order_prime(self, capsys):
        code, out, _ = run(capsys, "picard", "--cusp-order", "17")
        assert code == 0 and out.strip() == "4"

    def test_cusp_order_composite(self, capsys):
        code, out, _ = run(capsys, "picard", "--cusp-order", "13,2")
        assert code == 0 and out.strip() == "3"

    def test_cusp_order_domain(self, capsys):
        assert run(capsys, "picard", "--cusp-order", "15")[0] == EXIT_DOMAIN

    def test_pic1(self, capsys):
        _, out, _ = run(capsys, "picard", "--pic1", "73", "--inert")
        assert out.startswith("Empty:")
        _, out, _ = run(capsys, "picard", "--pic1", "13,11,5", "--inert", "--format", "json")
        assert json.loads(out)["status"] == "Empty"

    def test_relations(self, capsys):
        code, out, _ = run(capsys, "picard", "--n", "21", "--relations", "8:15,13:7")
        assert code == 0
        assert json.loads(out) == {"n": 21, "solutions": []}

    def test_relations_need_n(self, capsys):
        assert run(capsys, "picard", "--relations", "8:15")[0] == EXIT_USAGE

    def test_exactly_one_operation(self, capsys):
        assert run(capsys, "picard", "--cusp-order", "17", "--pic1", "73")[0] == EXIT_USAGE
        assert run(capsys, "picard")[0] == EXIT_USAGE


class TestSieve:
    def test_obstructed(self, capsys, tmp_path):
        path = tmp_path / "data.json"
        path.write_text(json.dumps(SIEVE_OBSTRUCTED))
        code, out, _ = run(capsys, "sieve", "--sieve-file", str(path))
        assert code == 0 and out.strip() == "Obstructed"

    def test_json_format(self, capsys, tmp_path):
        path = tmp_path / "data.json"
        path.write_text(json.dumps(SIEVE_OBSTRUCTED))
        _, out, _ = run(capsys, "sieve", "--sieve-file", str(path), "--format", "json")
        assert json.loads(out) == {"outcome": "Obstructed"}

    def test_missing_file(self, capsys):
        assert run(capsys, "sieve", "--sieve-file", "/nonexistent.json")[0] == EXIT_USAGE

    def test_invalid_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "sieve", "--sieve-file", str(path))
        assert code == EXIT_USAGE and "not valid JSON" in err

    def test_malformed_data(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"primes": [5]}))
        assert run(capsys, "sieve", "--sieve-file", str(path))[0] == EXIT_DOMAIN


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "frobnicate")[0] == EXIT_USAGE

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "verdict", "--m", "26")[0] == EXIT_USAGE

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_non_integer_list(self, capsys):
        assert run(capsys, "verdict", "--m", "26", "--d", "2;3")[0] == EXIT_USAGE

    def test_scientific_notation_rejected(self, capsys):
        assert run(capsys, "search", "--m", "26", "--bound=1e5")[0] == EXIT_USAGE


def test_console_script_smoke():
    proc = subprocess.run(
        [sys.executable, "-m", "twistlocal.cli", "verdict", "--m", "26", "--d", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_NO
    assert json.loads(proc.stdout)["status"] == "No"


@pytest.fixture(scope="module")
def live_server():
    uvicorn = pytest.importorskip("uvicorn")
    from twistlocal.service import app

    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    config = uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestServerMode:
    def test_verdict_matches_local(self, capsys, live_server):
        local_code, local_out, _ = run(capsys, "verdict", "--m", "26", "--d", "2")
        remote_code, remote_out, _ = run(
            capsys, "--server", live_server, "verdict", "--m", "26", "--d", "2"
        )
        assert remote_code == local_code == EXIT_NO
        assert json.loads(remote_out)["status"] == json.loads(local_out)["status"]

    def test_verdict_exit_codes(self, capsys, live_server):
        assert run(capsys, "--server", live_server, "verdict", "--m", "26", "--d", "-23")[0] == EXIT_YES
        assert run(capsys, "--server", live_server, "verdict", "--m", "26", "--d", "-1")[0] == EXIT_UNKNOWN

    def test_spec_error_maps_to_usage(self, capsys, live_server):
        code, _, err = run(capsys, "--server", live_server, "verdict", "--m", "26", "--d", "0")
        assert code == EXIT_USAGE
        assert "quadratic field" in err

    def test_search(self, capsys, live_server):
        code, out, err = run(
            capsys, "--server", live_server, "search", "--m", "13,2", "--bound", "500"
        )
        assert code == 0
        ds = [tuple(json.loads(line)["d"]) for line in out.strip().splitlines()]
        assert ds == [(-263, 313), (313, -263)]
        assert "suppressed 0" in err

    def test_classpoly(self, capsys, live_server):
        code, out, _ = run(capsys, "--server", live_server, "classpoly", "--disc", "-4")
        assert code == 0 and out.strip() == "X - 1728"

    def test_picard(self, capsys, live_server):
        code, out, _ = run(capsys, "--server", live_server, "picard", "--cusp-order", "17")
        assert code == 0 and out.strip() == "4"

    def test_sieve(self, capsys, live_server, tmp_path):
        path = tmp_path / "data.json"
        path.write_text(json.dumps(SIEVE_OBSTRUCTED))
        code, out, _ = run(capsys, "--server", live_server, "sieve", "--sieve-file", str(path))
        assert code == 0 and out.strip() == "Obstructed"

    def test_bound_error_maps(self, capsys, live_server):
        code, _, _ = run(capsys, "--server", live_server, "classpoly", "--disc", "-2000003")
        assert code == EXIT_BOUND

    def test_unreachable(self, capsys):
        code, _, err = run(capsys, "--server", "http://127.0.0.1:9", "verdict", "--m", "26", "--d", "2")
        assert code == EXIT_UNAVAILABLE
        assert "cannot reach server" in err
