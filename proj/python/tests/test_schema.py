import json
import pathlib

import jsonschema
import pytest
from referencing import Registry, Resource

import phdyn

ROOT = pathlib.Path(__file__).resolve().parents[2]
MAP = json.loads((ROOT / "schema" / "map.schema.json").read_text())
RUN = json.loads((ROOT / "schema" / "run_config.schema.json").read_text())
REGISTRY = Registry().with_resource("phdyn/map.schema.json", Resource.from_contents(MAP))
CONFIGS = sorted((ROOT / "configs").glob("*.json"))


def validate(config):
    jsonschema.Draft202012Validator(RUN, registry=REGISTRY).validate(config)


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.name)
def test_shipped_configs_match_schema(path):
    validate(json.loads(path.read_text()))


def test_schema_rejects_unknown_fields():
    with pytest.raises(jsonschema.ValidationError):
        validate({"analysis": "classify", "map": {"kind": "linear", "matrix": [[2, 1], [1, 1]]}, "colour": 1})
    with pytest.raises(jsonschema.ValidationError):
        validate({"analysis": "basin", "map": {"kind": "linear", "matrix": [[2, 1], [1, 1]]}})


def test_schema_and_runner_agree_on_unknown_params():
    cfg = {"analysis": "semiconjugacy", "seed": 1, "map": {"kind": "linear", "matrix": [[2, 1], [1, 1]]},
           "params": {"samples": 4, "bogus": 1}}
    with pytest.raises(jsonschema.ValidationError):
        validate(cfg)
    with pytest.raises(phdyn.InputError):
        phdyn.run(cfg)
