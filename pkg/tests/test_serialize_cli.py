import json
import pathlib

import hypothesis.strategies as st
import jsonschema
import pytest
from hypothesis import given, settings

from maycompat import cli
from maycompat.complexes import unit_complex
from maycompat.generators import random_complex, random_endo_square, random_ses_with_structure
from maycompat.linalg import INTEGERS, prime_field
from maycompat.serialize import (BadDifferential, BadShape, MalformedJSON, bundle_from_json, canonical,
                                 complex_from_json, complex_to_json, load, ses_to_json)

from conftest import RINGS, rng_for

ROOT = pathlib.Path(__file__).resolve().parents[1]
FIX = ROOT / "tests" / "fixtures"
SCHEMA = json.loads((ROOT / "schema" / "report.schema.json").read_text())
seeds = st.integers(0, 2**32 - 1)


def run(argv):
    code, report = cli.run(argv)
    jsonschema.validate(report, SCHEMA)
    return code, report


@given(seeds, st.sampled_from(RINGS))
def test_complex_round_trip(seed, ring):
    E = random_complex(ring, rng_for(seed), (-2, 2), 3).complex
    text = canonical(complex_to_json(E))
    E2 = complex_from_json(json.loads(text))
    assert E2 == E
    assert canonical(complex_to_json(E2)) == text


@settings(max_examples=15)
@given(seeds, st.sampled_from([INTEGERS, prime_field(7)]))
def test_ses_bundle_round_trip(seed, ring):
    rng = rng_for(seed)
    ses, gE, gG = random_ses_with_structure(ring, rng)
    sq = random_endo_square(ses, gE, gG, rng)
    b = bundle_from_json(json.loads(canonical(ses_to_json(ses, sq))))
    assert b.ses.F == ses.F and b.ses.w == ses.w
    phi, psi, s = b.square
    assert phi == sq[0] and psi == sq[1] and s.s == sq[2].s


def test_unit_fixture_loads_to_unit():
    assert load(FIX / "unit.json").complex() == unit_complex(INTEGERS)


@pytest.mark.parametrize("name, exc, code", [
    ("bad_dsquare.json", BadDifferential, "E_DSQUARE"),
    ("bad_shape.json", BadShape, "E_SHAPE"),
    ("malformed.json", MalformedJSON, "E_JSON"),
])
def test_bad_inputs_have_distinct_codes(name, exc, code):
    with pytest.raises(exc):
        load(FIX / name)
    rc, report = run(["homology", "--in", str(FIX / name)])
    assert rc == 2 and report["error"]["code"] == code


def test_homology_from_file():
    rc, report = run(["homology", "--in", str(FIX / "projective_plane_f2.json")])
    assert rc == 0
    assert {k: v["free_rank"] for k, v in report["result"]["homology"].items()} == {"0": 1, "1": 1, "2": 1}


def test_tc1_command():
    rc, report = run(["tc-check", "1", "--ring", "Z"])
    assert rc == 0 and report["pass"]


@pytest.mark.parametrize("argv", [
    ["homology", "--seed", "3"], ["cone", "--seed", "3"], ["cyl", "--seed", "3"], ["tensor", "--seed", "3"],
    ["dual", "--seed", "3"], ["trace", "--seed", "3", "--ring", "Q"], ["lef", "--seed", "3"],
    ["lef", "--orientation", "trivial"], ["tc-check", "2", "--ring", "Fp:7"], ["tc-check", "3"],
    ["tc-check", "4"], ["tc-check", "5a"], ["tc-check", "5b"], ["tc-check", "5dual"],
    ["additivity", "--cases", "2", "--witnesses"], ["fuzz", "--cases", "3", "--ring", "Fp:7"],
])
def test_commands_pass(argv):
    rc, report = run(argv)
    assert rc == 0 and report["pass"], report


def test_additivity_from_file(tmp_path):
    rng = rng_for(11)
    ses, gE, gG = random_ses_with_structure(INTEGERS, rng)
    path = tmp_path / "square.json"
    path.write_text(canonical(ses_to_json(ses, random_endo_square(ses, gE, gG, rng))))
    rc, report = run(["additivity", "--in", str(path)])
    assert rc == 0 and report["result"]["cases"][0]["equal"]
    rc, report = run(["tc-check", "5a", "--in", str(path)])
    assert rc == 0


def test_input_errors_exit_two():
    assert run(["homology", "--min-deg", "2", "--max-deg", "1"])[0] == 2
    assert run(["trace", "--in", str(FIX / "unit.json")])[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.run(["no-such-command"])
    assert exc.value.code == 2


def test_main_writes_report(tmp_path):
    out = tmp_path / "tc-report.json"
    assert cli.main(["tc-check", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["pass"] is True


def test_fuzz_is_deterministic():
    def content(seed):
        rc, report = run(["fuzz", "--cases", "4", "--seed", str(seed)])
        report.pop("timing")
        return canonical(report)
    assert content(7) == content(7)
    assert content(7) != content(8)
