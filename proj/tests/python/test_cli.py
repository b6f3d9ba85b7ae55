"""Smoke tests for the command-line tool (path supplied via WGLFIX_BIN)."""

import json
import os
import subprocess

import pytest

BIN = os.environ.get("WGLFIX_BIN")

pytestmark = pytest.mark.skipif(not BIN, reason="WGLFIX_BIN not set")


def run(*args, stdin=None):
    return subprocess.run(
        [BIN, *args], capture_output=True, text=True, input=stdin, timeout=60
    )


def test_fixpoint_simplified_golden():
    r = run("fixpoint", "--n", "3", "--var", "p", "--formula", "box box ~p",
            "--simplify")
    assert r.returncode == 0
    assert r.stdout == "box box ~box box ~box box false\n"


def test_fixpoint_rejects_unmodalized_input():
    r = run("fixpoint", "--n", "2", "--var", "p", "--formula", "p")
    assert r.returncode == 1
    assert "not modalized" in r.stderr


def test_usage_error_exit_code():
    r = run("fixpoint", "--n", "2", "--var", "p")  # missing --formula
    assert r.returncode == 2


def test_fixpoint_json_round_trip():
    r = run("fixpoint", "--n", "2", "--var", "p", "--formula",
            "box (p & box p)", "--json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["command"] == "fixpoint"
    assert doc["method"] == "loop"
    assert [s["label"] for s in doc["trace"]] == ["B0", "B0'", "B1", "F"]
    assert doc["trace"][-1]["formula"] == doc["fixed_point"]


def test_certificate_file_round_trip(tmp_path):
    cert = tmp_path / "cert.json"
    r = run("fixpoint", "--n", "2", "--var", "p", "--formula",
            "box (p & box p)", "--certificate-out", str(cert))
    assert r.returncode == 0
    r2 = run("check-cert", "--file", str(cert))
    assert r2.returncode == 0
    assert r2.stdout.startswith("ok:")
    r3 = run("check-cert", "--file", "-", stdin=cert.read_text())
    assert r3.returncode == 0


def test_verify_both_methods():
    fp = run("fixpoint", "--n", "2", "--var", "p", "--formula",
             "box (p & box p)").stdout.strip()
    r = run("verify", "--n", "2", "--var", "p", "--formula", "box (p & box p)",
            "--candidate", fp, "--json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["cert"] == "certificate ok"
    assert doc["kripke"] == "no countermodel <= 3 worlds"
    assert doc["verified"] is True


def test_verify_rejects_candidate_with_unknown():
    r = run("verify", "--n", "2", "--var", "p", "--formula", "box (p & box p)",
            "--candidate", "box p")
    assert r.returncode == 1


def test_depths_json():
    r = run("depths", "--var", "p", "--formula", "p & box(p -> box box p)",
            "--mod", "3", "--json")
    doc = json.loads(r.stdout)
    assert doc["depths"] == [0, 1, 3]
    assert doc["residues"] == [0, 1]
    assert doc["modalized"] is False


def test_countermodel_json():
    r = run("countermodel", "--n", "2", "--formula", "box p -> box box p",
            "--json")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["found"] is True
    assert doc["model"]["worlds"] == 3

    r2 = run("countermodel", "--n", "1", "--formula", "box p -> box box p",
             "--json")
    assert json.loads(r2.stdout)["found"] is False
