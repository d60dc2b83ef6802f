"""CSV loading, schema validation, and the missing-value report."""

import json
import math

import numpy as np
import pytest

import chdml
from chdml.errors import (
    DataError,
    DuplicateColumn,
    MissingColumn,
    NonBinaryTarget,
    UnexpectedColumn,
    UnparseableCell,
)
from chdml.ingest import FRAMINGHAM, CohortTable, FeatureKind, Schema, schema_from_json


def write(tmp_path, text, name="t.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


MINI_HEADER = (
    "sex,age,education,currentSmoker,cigsPerDay,BPMeds,prevalentStroke,"
    "prevalentHyp,diabetes,totChol,sysBP,diaBP,BMI,heartRate,glucose,TenYearCHD\n"
)


def mini_csv(rows):
    return MINI_HEADER + "".join(rows)


ROW_A = "1,44,2,1,20,0,0,0,0,210,130.5,82,26.4,75,80,0\n"
ROW_B = "0,51,3,0,0,0,0,1,0,240,145,90,29.1,68,NA,1\n"
ROW_C = "0,39,1,0,0,0,0,0,0,185,118,76,22.8,80,90,0\n"


class TestSchema:
    def test_framingham_shape(self):
        assert len(FRAMINGHAM.columns) == 16
        assert FRAMINGHAM.target_name == "TenYearCHD"
        assert FRAMINGHAM.predictor_names[0] == "sex"
        assert FRAMINGHAM.column("education").kind is FeatureKind.ORDINAL

    def test_exactly_one_target_required(self):
        cols = (
            chdml.ingest.Column("a", FeatureKind.CONTINUOUS),
            chdml.ingest.Column("b", FeatureKind.CONTINUOUS),
        )
        with pytest.raises(DataError):
            Schema(cols)

    def test_from_json(self, tmp_path):
        path = write(
            tmp_path,
            '[{"name": "x", "kind": "continuous"},'
            ' {"name": "y", "kind": "binary", "target": true}]',
            "schema.json",
        )
        schema = schema_from_json(path)
        assert schema.names == ("x", "y")
        assert schema.target_name == "y"

    def test_kind_aliases(self):
        assert FeatureKind.from_string("BinaryNominal") is FeatureKind.BINARY
        assert FeatureKind.from_string("real") is FeatureKind.CONTINUOUS


class TestLoadCsv:
    def test_basic_load(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B])))
        assert table.row_count == 2
        assert table.column("age")[0] == 44.0
        assert math.isnan(table.column("glucose")[1])

    def test_male_header_alias(self, tmp_path):
        text = mini_csv([ROW_A]).replace("sex,", "male,", 1)
        table = chdml.load_csv(write(tmp_path, text))
        assert "sex" in table.columns
        assert "male" not in table.columns

    def test_header_case_insensitive(self, tmp_path):
        text = mini_csv([ROW_A]).replace("age", "AGE", 1)
        table = chdml.load_csv(write(tmp_path, text))
        assert table.column("age")[0] == 44.0

    def test_missing_column_rejected(self, tmp_path):
        text = mini_csv([ROW_A]).replace("glucose,", "", 1).replace(",80,0\n", ",0\n")
        with pytest.raises(MissingColumn):
            chdml.load_csv(write(tmp_path, text))

    def test_unexpected_column_rejected(self, tmp_path):
        text = MINI_HEADER.rstrip("\n") + ",extra\n" + ROW_A.rstrip("\n") + ",1\n"
        with pytest.raises(UnexpectedColumn):
            chdml.load_csv(write(tmp_path, text))

    def test_duplicate_column_rejected(self, tmp_path):
        text = mini_csv([ROW_A]).replace("sex,age", "sex,sex", 1)
        with pytest.raises(DuplicateColumn):
            chdml.load_csv(write(tmp_path, text))

    def test_non_numeric_cell(self, tmp_path):
        bad = ROW_A.replace("44", "forty-four")
        with pytest.raises(UnparseableCell) as exc:
            chdml.load_csv(write(tmp_path, mini_csv([bad])))
        assert exc.value.row == 1
        assert exc.value.column == "age"

    def test_binary_out_of_domain(self, tmp_path):
        bad = ROW_A.replace("1,44", "2,44", 1)
        with pytest.raises(UnparseableCell):
            chdml.load_csv(write(tmp_path, mini_csv([bad])))

    def test_ordinal_range_enforced(self, tmp_path):
        bad = ROW_A.replace(",2,1,20,", ",7,1,20,", 1)
        with pytest.raises(UnparseableCell):
            chdml.load_csv(write(tmp_path, mini_csv([bad])))

    def test_missing_target_rejected(self, tmp_path):
        bad = ROW_A.replace(",80,0\n", ",80,NA\n")
        with pytest.raises(DataError):
            chdml.load_csv(write(tmp_path, mini_csv([bad])))

    def test_blank_lines_skipped(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, "\n", ROW_B])))
        assert table.row_count == 2

    def test_round_trip(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B, ROW_C])))
        out = tmp_path / "echo.csv"
        chdml.write_csv(table, str(out))
        again = chdml.load_csv(str(out))
        assert again == table


class TestCohortTable:
    def test_columns_are_protected(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A])))
        with pytest.raises(ValueError):
            table.column("age")[0] = 99.0

    def test_take_rows(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B, ROW_C])))
        sub = table.take_rows(np.array([0, 2]))
        assert sub.row_count == 2
        assert sub.column("age").tolist() == [44.0, 39.0]

    def test_nan_aware_equality(self, tmp_path):
        table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B])))
        same = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B]), "u.csv"))
        assert table == same


def test_missing_report_counts(tmp_path):
    table = chdml.load_csv(write(tmp_path, mini_csv([ROW_A, ROW_B, ROW_C])))
    report = chdml.missing_report(table)
    assert report.counts["glucose"] == 1
    assert report.counts["age"] == 0
    assert report.total == 1
    doc = json.loads(report.to_json())
    assert doc["method"] == "missing"
    assert doc["total"] == 1


def test_missing_report_on_fixture(fixture_table):
    report = chdml.missing_report(fixture_table)
    assert report.counts == {
        "sex": 0, "age": 0, "education": 2, "currentSmoker": 0,
        "cigsPerDay": 1, "BPMeds": 1, "prevalentStroke": 0, "prevalentHyp": 0,
        "diabetes": 0, "totChol": 1, "sysBP": 0, "diaBP": 0, "BMI": 1,
        "heartRate": 1, "glucose": 2, "TenYearCHD": 0,
    }
    assert report.total == 9


def test_class_balance(fixture_table):
    assert chdml.class_balance(fixture_table) == (40, 20)


def test_class_balance_rejects_non_binary(tmp_path):
    path = write(
        tmp_path,
        '[{"name": "x", "kind": "continuous"},'
        ' {"name": "TenYearCHD", "kind": "binary", "target": true}]',
        "schema.json",
    )
    arr = np.array([0.0, 1.0, 2.0])
    table = CohortTable(schema_from_json(path), {"x": arr, "TenYearCHD": arr})
    with pytest.raises(NonBinaryTarget):
        chdml.class_balance(table)
