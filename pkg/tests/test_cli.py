import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from endcalc import cli

SCHEMA = json.loads(resources.files("endcalc").joinpath("data/schema.json").read_text())


def validate(payload, kind):
    schema = dict(SCHEMA, **{"$ref": f"#/$defs/{kind}"})
    jsonschema.Draft202012Validator(schema).validate(payload)


def run_json(capsys, *argv):
    code = cli.run(["--json", *argv])
    out = capsys.readouterr()
    text = out.out if out.out.strip() else out.err
    return code, json.loads(text)


CASES = [
    (["parse", "{w^n+1} -> (1 v C)"], "parse", 0),
    (["normalize", "(w^2+1) -> 1"], "normalize", 0),
    (["--trace", "normalize", "(1 -> C) -> 1"], "normalize", 0),
    (["stable", "{(w^n+1) -> o(1)} -> o(1)"], "stable", 1),
    (["self-similar", "1 v C"], "self-similar", 1),
    (["decompose", "(w+1) v C v o(1)"], "decompose", 0),
    (["endspace", "o(1 v C)"], "endspace", 0),
    (["genus", "R3 v 1 v 1 v 1"], "genus", 0),
    (["max-ends", "(w^2+1) v (w^2+1)"], "max-ends", 0),
    (["types", "1 -> C"], "types", 0),
    (["successor", "1", "--kind", "one"], "successor", 0),
    (["gcd", "(w^3+1) -> (1 v C)"], "gcd", 0),
    (["classify-maps", "C"], "classify-maps", 0),
    (["classify-maps", "1 -> C"], "classify-maps", 1),
    (["classify-maps", "1 v o(1)"], "classify-maps", 2),
    (["--trace", "classify-homeo", "o(1 v C)"], "classify-homeo", 0),
    (["compare", "w+1", "w^2+1"], "compare", 0),
    (["embeds", "C", "w^w+1"], "embeds", 1),
    (["iso", "(w+1) -> 1", "w^2+1"], "iso", 0),
    (["mub", "(w^2+1) -> o(1)", "(w^3+1) -> o(1)"], "mub", 0),
    (["flux", "--model", "unit-density", "--action", "shift:1"], "flux", 0),
    (["flux", "--model", "decorated-spine", "--cork", "2", "-2"], "flux", 0),
    (["oracle", "endspace", "w^2+1 v w^2+1"], "oracle", 0),
    (["oracle", "cb", "(w^2+1) v (w^2+1) v (w+1)"], "oracle", 0),
    (["oracle", "rank", "w^w+1", "w^3+1"], "oracle", 0),
    (["oracle", "embed", "C", "w^w+1", "--depth", "4"], "oracle", 1),
    (["atlas", "--check"], "atlas", 0),
]


@pytest.mark.parametrize("argv, kind, code", CASES, ids=[" ".join(c[0]) for c in CASES])
def test_outputs_match_schema(capsys, argv, kind, code):
    got, payload = run_json(capsys, *argv)
    assert got == code
    validate(payload, kind)


def test_classify_examples(capsys):
    _, out = run_json(capsys, "classify-maps", "C")
    assert (out["answer"], out["theorem"]) == ("Yes", "CantorTree")
    _, out = run_json(capsys, "classify-maps", "1 v o(1)")
    assert (out["answer"], out["category"]) == ("Unknown", 1)
    assert "trace" not in out


def test_flux_values(capsys):
    _, out = run_json(capsys, "flux", "--model", "unit-density", "--action", "shift:-2")
    assert out["flux"] == -2
    _, out = run_json(capsys, "flux", "--model", "decorated-spine", "--cork", "2", "-2")
    assert out["cork"] == 5


def test_flux_model_file(capsys, tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps({"kind": "LoopKind", "decorations": [], "tail": {"period": 1, "counts": [2]}}))
    _, out = run_json(capsys, "flux", "--model", str(path), "--action", "shift:1")
    assert out["flux"] == 2


@pytest.mark.parametrize("argv, code", [
    (["classify-maps", "o("], 65),
    (["endspace", "C"], 0),
    (["oracle", "endspace", "C"], 65),
    (["max-ends", "{(w^n+1) -> o(1)} -> o(1)"], 65),
    (["flux", "--model", "decorated-spine", "--action", "shift:1"], 65),
])
def test_error_exit_codes(capsys, argv, code):
    got, payload = run_json(capsys, *argv)
    assert got == code
    if code == 65:
        validate(payload, "error")


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as info:
        cli.run(["classify-maps"])
    assert info.value.code == 64


def test_genus_under_convergence_is_flagged(capsys):
    _, out = run_json(capsys, "genus", "(w+1) -> R2")
    assert out["vertexModel"] == "canonical"
    _, out = run_json(capsys, "genus", "R3 v 1 v 1 v 1")
    assert "vertexModel" not in out
    validate(out, "genus")


def test_parse_error_reports_offset(capsys):
    _, payload = run_json(capsys, "parse", "1 v")
    assert payload["offset"] == 3


def test_atlas_covers_every_module(capsys):
    code, out = run_json(capsys, "atlas", "--check")
    assert code == 0 and out["passed"]
    assert set(out["modules"]) == {"ordinal", "signature", "semantics", "canonical", "poset",
                                   "classify", "flux", "oracle", "cli"}
    names = {e["name"] for e in cli.atlas_entries()}
    assert len(names) >= 15
    assert {"loch-ness", "keystone", "rays-into-cantor", "stress", "decorated-spine"} <= names


def test_atlas_entries_carry_provenance():
    for e in cli.atlas_entries():
        assert e.get("expr") or e.get("model")
        for exp in e["expected"].values():
            assert exp["provenance"] in ("published", "derived")


def test_batch_input_keeps_order():
    lines = "C\n1 -> C\n1 v o(1)\nw^w+1\n"
    proc = subprocess.run([sys.executable, "-m", "endcalc", "--json", "--jobs", "2", "classify-maps", "-"],
                          input=lines, capture_output=True, text=True, check=False)
    rows = [json.loads(x) for x in proc.stdout.splitlines()]
    assert [r["input"] for r in rows] == ["C", "1 -> C", "1 v o(1)", "w^w+1"]
    assert [r["answer"] for r in rows] == ["Yes", "No", "Unknown", "Yes"]
    assert proc.returncode == 2
    for r in rows:
        validate(r, "classify-maps")


def test_text_output_is_stable(capsys):
    cli.run(["classify-maps", "C"])
    first = capsys.readouterr().out
    cli.run(["classify-maps", "C"])
    assert capsys.readouterr().out == first
