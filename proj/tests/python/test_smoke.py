import csv
import json

import pytest

import foppa

TED_HEADER = (
    "ID_NOTICE_CAN,ID_LOT_AWARDED,DT_DISPATCH,DT_AWARD,TYPE_OF_CONTRACT,CPV,NUMBER_OFFERS,"
    "AWARD_VALUE_EURO,CANCELLED,ID_NOTICE_CN,CAE_NAME,CAE_ADDRESS,CAE_POSTAL_CODE,CAE_TOWN,"
    "ISO_COUNTRY_CODE,CAE_NATIONALID,WIN_NAME,WIN_ADDRESS,WIN_POSTAL_CODE,WIN_TOWN,"
    "WIN_COUNTRY_CODE,WIN_NATIONALID,CRIT_CRITERIA,CRIT_WEIGHTS,CRIT_PRICE_WEIGHT"
)


@pytest.fixture
def fixture_dir(tmp_path):
    (tmp_path / "entities.csv").write_text(
        "siren,denomination,former_names,creation_date,closure_date,activity\n"
        "300000000,OFFICE PUBLIC CADILO,,1985-01-01,,84.11Z\n"
        "300197975,SEBUBE CONSTRUCTION GUVES,,1985-01-01,,41.20A\n"
    )
    (tmp_path / "facilities.csv").write_text(
        "siret,names,street,zipcode,city,activity,open_date,close_date\n"
        "30000000000010,OFFICE PUBLIC CADILO,26 RUE GIRIL,75020,GOCASUN,84.11Z,2001-11-01,\n"
        "30019797500010,SEBUBE CONSTRUCTION GUVES,116 RUE PIBI,33040,CACIRI,41.20A,2005-08-01,\n"
        "30019797500023,,145 RUE SEGAL,69020,DIVAGUL,41.20A,1994-09-01,\n"
    )
    (tmp_path / "ted.csv").write_text(
        TED_HEADER + "\n"
        "2019-000001,1,2019-03-14,,W,45000000,2,1000,,,OFFICE PUBLIC CADILO,26 RUE GIRIL,75020,GOCASUN,FR,"
        "30000000000010,Sébubé Construction Guves,116 rue Pibi,33040,Caciri,FR,,Prix|Valeur technique,60|40,\n"
        "2019-000002,1,2019-04-02,,W,45000000,1,2000,,,Office public Cadilo,26 rue Giril,75020,Gocasun,FR,"
        ",SEBUBE CONSTRUCTION,145 RUE SEGAL,69020,DIVAGUL,FR,,Prix,1,\n"
    )
    (tmp_path / "config.json").write_text(
        json.dumps(
            {
                "inputs": {"ted": ["ted.csv"], "entities": "entities.csv", "facilities": "facilities.csv"},
                "output": "out",
            }
        )
    )
    return tmp_path


def test_text_helpers():
    assert foppa.normalize_name(foppa.normalize_name("Sté  Générale (Lyon)")) == foppa.normalize_name(
        "Sté  Générale (Lyon)"
    )
    assert foppa.department_of("69003") == "69"
    assert foppa.department_of("6900") is None
    assert foppa.normalize_address("", "F-75008", "PARIS CEDEX 08") == ("", "75008", "PARIS")
    assert foppa.name_similarity("ACME", "ACME") == 1.0


def test_normalize_weights():
    assert foppa.normalize_weights(["1", "1", "1"]) == [33.34, 33.33, 33.33]
    assert foppa.normalize_weights(["60", "40"]) == [60.0, 40.0]
    assert foppa.normalize_weights(["0", "0"]) is None
    with pytest.raises(ValueError):
        foppa.normalize_weights(["lots"])


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"match": {"nameThreshold": 1.5}}')
    with pytest.raises(foppa.ConfigError, match="nameThreshold"):
        foppa.validate_config(bad)


def test_pipeline_run(fixture_dir):
    foppa.validate_config(fixture_dir / "config.json")
    foppa.run(fixture_dir / "config.json", jobs=2)
    tables = fixture_dir / "out" / "tables"
    with open(tables / "Agents.csv", newline="") as f:
        agents = {row["agentId"] for row in csv.DictReader(f)}
    assert {"30000000000010", "30019797500010", "30019797500023"} <= agents
    with open(tables / "Lots.csv", newline="") as f:
        assert len(list(csv.DictReader(f))) == 2
    assert (fixture_dir / "out" / "foppa.sql").exists()


def test_missing_checkpoint(fixture_dir):
    with pytest.raises(foppa.ConfigError):
        foppa.run(fixture_dir / "config.json", stage_from="merge", stage_to="merge")
