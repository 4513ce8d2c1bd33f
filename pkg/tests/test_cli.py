"""CLI surface: subcommands, exit codes, and byte-identical output."""

import json

import pytest

from strata_kit.cli import main

TOWER = {"base_q": 3, "levels": [{"f": 1, "e": 2, "twist": [1]}]}
ELT = {"field": 1, "digits": [[-4, [1]], [-1, [1]]], "prec": None}
STRATUM = {"tower": TOWER, "beta": ELT,
           "order": {"m": 2, "d": 1, "e_A": 2, "b_maximal": True}, "r": 0}


def run(capsys, monkeypatch, argv, stdin_obj=None):
    import io, sys
    if stdin_obj is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(stdin_obj)))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_schema_flag(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["--schema"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "strata-kit/v1"


def test_expand(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["expand"],
                       {"tower": TOWER, "element": ELT})
    assert code == 0
    doc = json.loads(out)
    assert doc["val"] == -4 and doc["ord"] == "-2/1"


def test_sr_and_determinism(capsys, monkeypatch):
    doc_in = {"tower": TOWER,
              "element": {"field": 1, "digits": [[-3, [1]], [-1, [1]]],
                          "prec": None}}
    code, out1, _ = run(capsys, monkeypatch, ["sr"], doc_in)
    assert code == 0
    code, out2, _ = run(capsys, monkeypatch, ["sr"], doc_in)
    assert out1 == out2                       # byte-identical
    doc = json.loads(out1)
    assert doc["sr"]["digits"] == [[-3, [1]]]
    assert doc["ord_gap"] == "-1/2"


def test_minimal_and_factorize(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["minimal"],
                       {"tower": TOWER,
                        "element": {"field": 1, "digits": [[-1, [1]]],
                                    "prec": None}})
    assert code == 0 and json.loads(out)["minimal"] is True
    code, out, _ = run(capsys, monkeypatch, ["factorize"],
                       {"tower": TOWER, "element": ELT})
    doc = json.loads(out)
    assert code == 0 and doc["certified"] and doc["jumps"] == ["-1/2", "-2/1"]


def test_embeddings(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["embeddings"], {"tower": TOWER})
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 2


def test_generic(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["generic", "--small", "0"],
                       {"tower": TOWER,
                        "element": {"field": 1, "digits": [[-1, [1]]],
                                    "prec": None}})
    doc = json.loads(out)
    assert code == 0 and doc["generic"] and doc["equivalence_holds"]


def test_stratum_pipeline(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch, ["stratum2yu"], STRATUM)
    assert code == 0
    yu = json.loads(out)
    assert yu["depths"] == ["1/2", "2/1"]
    code, out, _ = run(capsys, monkeypatch, ["yu2stratum"], yu)
    assert code == 0
    st = json.loads(out)
    assert st["n"] == 4 and st["kind"] == "simple"
    code, out, _ = run(capsys, monkeypatch, ["groups"], STRATUM)
    doc = json.loads(out)
    assert code == 0
    assert all(pair["equal"] for pair in doc["pairs"].values())
    code, out, _ = run(capsys, monkeypatch, ["indices"], STRATUM)
    doc = json.loads(out)
    assert code == 0 and doc["factchar"][1]["t_i"] == 2


def test_fuzz_deterministic(capsys, monkeypatch):
    code, out1, _ = run(capsys, monkeypatch, ["fuzz", "--seed", "3",
                                              "--count", "4"])
    assert code == 0
    code, out2, _ = run(capsys, monkeypatch, ["fuzz", "--seed", "3",
                                              "--count", "4"])
    assert out1 == out2


def test_verify_suite(capsys, monkeypatch):
    code, out, _ = run(capsys, monkeypatch,
                       ["verify", "--suite", "factorize", "--seed", "1",
                        "--count", "10"])
    doc = json.loads(out)
    assert code == 0 and doc["failure_count"] == 0


def test_exit_code_schema_error(capsys, monkeypatch):
    code, _, err = run(capsys, monkeypatch, ["minimal"], {"bogus": True})
    assert code == 1 and "schema error" in err


def test_exit_code_domain_error(capsys, monkeypatch):
    bad = dict(STRATUM)
    bad["beta"] = {"field": 1, "digits": [[2, [1]]], "prec": None}
    code, _, err = run(capsys, monkeypatch, ["stratum2yu"], bad)
    assert code == 2 and "domain error" in err


def test_prec_env(capsys, monkeypatch):
    monkeypatch.setenv("STRATA_KIT_PREC", "32")
    doc_in = {"tower": TOWER,
              "element": {"field": 1, "digits": [[-1, [1]]]}}   # no prec
    code, out, _ = run(capsys, monkeypatch, ["expand"], doc_in)
    assert code == 0
    assert json.loads(out)["element"]["prec"] == 32
