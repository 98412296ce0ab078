import pytest

from feng.fedsl import ErrorKind, ExecError, parse, validate, WHITELIST
from feng.tabular import Dtype

SCHEMA = {
    "calc": Dtype.NUMBER,
    "urea": Dtype.NUMBER,
    "Cabin": Dtype.TEXT,
    "flag": Dtype.BOOLEAN,
    "square": Dtype.CATEGORY,
    "Class": Dtype.CATEGORY,
}


def _feature(expr: str) -> str:
    return f'feature "f" {{ usefulness: "u" expr: {expr} }}'


def _validate(source: str):
    return validate(parse(source), SCHEMA, target="Class")


def _expect_error(source: str, kind: ErrorKind, fragment: str = ""):
    with pytest.raises(ExecError) as exc:
        _validate(source)
    assert exc.value.kind is kind
    if fragment:
        assert fragment in exc.value.message
    return exc.value


class TestTyping:
    def test_ratio_is_number(self):
        s = _validate(_feature('col("calc") / col("urea")'))
        assert s.statements[0].expr.dtype is Dtype.NUMBER

    def test_text_arithmetic_names_operator_and_types(self):
        err = _expect_error(_feature('col("Cabin") / 2'), ErrorKind.TYPE)
        assert "'/'" in err.message
        assert "Text" in err.message and "Number" in err.message

    def test_boolean_addition_is_type_error(self):
        _expect_error(_feature('col("flag") + 1'), ErrorKind.TYPE, "'+'")

    def test_category_text_equality(self):
        s = _validate(_feature('col("square") == "x"'))
        assert s.statements[0].expr.dtype is Dtype.BOOLEAN

    def test_category_number_equality_rejected(self):
        _expect_error(_feature('col("square") == 1'), ErrorKind.TYPE, "cannot compare")

    def test_ordering_needs_numbers(self):
        _expect_error(_feature('col("Cabin") < "Z"'), ErrorKind.TYPE)

    def test_and_needs_booleans(self):
        _expect_error(_feature('col("calc") and col("flag")'), ErrorKind.TYPE)

    def test_not_needs_boolean(self):
        _expect_error(_feature('not col("calc")'), ErrorKind.TYPE, "'not'")

    def test_negation_needs_number(self):
        _expect_error(_feature('-col("Cabin")'), ErrorKind.TYPE, "'-'")

    def test_unknown_column(self):
        err = _expect_error(_feature('col("nope")'), ErrorKind.UNKNOWN_COLUMN)
        assert '"nope"' in err.message

    def test_if_else_branch_types_must_match(self):
        _expect_error(
            _feature('if_else(col("flag"), 1, "x")'), ErrorKind.TYPE, "share a type"
        )

    def test_if_else_condition_boolean(self):
        _expect_error(_feature('if_else(col("calc"), 1, 2)'), ErrorKind.TYPE, "condition")

    def test_as_number_rejects_number(self):
        _expect_error(_feature('as_number(col("calc"))'), ErrorKind.TYPE, "got Number")


class TestWhitelist:
    def test_unknown_function(self):
        err = _expect_error(_feature('system("rm")'), ErrorKind.TYPE)
        assert 'unknown function "system"' in err.message

    def test_whitelist_is_closed_and_enumerable(self):
        assert set(WHITELIST) == {
            "if_else",
            "bin",
            "str_split",
            "str_char",
            "str_extract_int",
            "str_endswith",
            "str_contains",
            "fill_missing",
            "is_missing",
            "as_number",
            "as_int",
            "as_category",
            "abs",
            "log",
            "min2",
            "max2",
        }

    def test_arity_error(self):
        err = _expect_error(_feature('abs(1, 2)'), ErrorKind.ARITY)
        assert "abs expects 1 arguments, got 2" in err.message

    @pytest.mark.parametrize(
        "expr,result",
        [
            ('if_else(col("flag"), col("calc"), 0)', Dtype.NUMBER),
            ('bin(col("calc"), [0, 10], ["lo"])', Dtype.CATEGORY),
            ('str_split(col("Cabin"), "/", -1)', Dtype.TEXT),
            ('str_char(col("Cabin"), 0)', Dtype.TEXT),
            ('str_extract_int(col("Cabin"))', Dtype.NUMBER),
            ('str_endswith(col("Cabin"), "S")', Dtype.BOOLEAN),
            ('str_contains(col("Cabin"), "/")', Dtype.BOOLEAN),
            ('fill_missing(col("calc"), 0)', Dtype.NUMBER),
            ('is_missing(col("square"))', Dtype.BOOLEAN),
            ('as_number(col("flag"))', Dtype.NUMBER),
            ('as_int(col("calc"))', Dtype.NUMBER),
            ('as_category(col("calc"))', Dtype.CATEGORY),
            ('abs(col("calc"))', Dtype.NUMBER),
            ('log(col("calc"))', Dtype.NUMBER),
            ('min2(col("calc"), col("urea"))', Dtype.NUMBER),
            ('max2(col("calc"), 0)', Dtype.NUMBER),
        ],
    )
    def test_signatures(self, expr, result):
        s = _validate(_feature(expr))
        assert s.statements[0].expr.dtype is result


class TestBin:
    def test_edges_must_be_lists(self):
        _expect_error(_feature('bin(col("calc"), 1, ["a"])'), ErrorKind.TYPE, "bracketed")

    def test_edges_must_increase(self):
        _expect_error(
            _feature('bin(col("calc"), [5, 1], ["a"])'), ErrorKind.TYPE, "increasing"
        )

    def test_label_count(self):
        _expect_error(
            _feature('bin(col("calc"), [0, 1, 2], ["a"])'), ErrorKind.ARITY, "label"
        )

    def test_negative_edges_allowed(self):
        s = _validate(_feature('bin(col("calc"), [-10, 0, 10], ["neg", "pos"])'))
        assert s.statements[0].expr.dtype is Dtype.CATEGORY

    def test_list_outside_bin_rejected(self):
        _expect_error(_feature('[1, 2]'), ErrorKind.TYPE, "bin()")


class TestFillMissing:
    def test_fill_value_must_be_literal(self):
        _expect_error(
            _feature('fill_missing(col("calc"), col("urea"))'), ErrorKind.TYPE, "literal"
        )

    def test_fill_type_must_match(self):
        _expect_error(
            _feature('fill_missing(col("calc"), "x")'), ErrorKind.TYPE, "match"
        )

    def test_category_filled_with_text_literal(self):
        s = _validate(_feature('fill_missing(col("square"), "unknown")'))
        assert s.statements[0].expr.dtype is Dtype.CATEGORY

    def test_negative_literal_ok(self):
        s = _validate(_feature('fill_missing(col("calc"), -1)'))
        assert s.statements[0].expr.dtype is Dtype.NUMBER


class TestStatements:
    def test_duplicate_feature(self):
        src = _feature("1") + "\n" + _feature("2")
        _expect_error(src, ErrorKind.DUPLICATE_FEATURE, '"f"')

    def test_feature_shadowing_column_rejected(self):
        _expect_error(
            'feature "calc" { usefulness: "u" expr: 1 }',
            ErrorKind.DUPLICATE_FEATURE,
        )

    def test_earlier_features_visible_later(self):
        src = (
            'feature "left_moment" { usefulness: "u" expr: col("calc") * 2 }\n'
            'feature "double" { usefulness: "u" expr: col("left_moment") * 2 }'
        )
        s = _validate(src)
        assert s.statements[1].expr.dtype is Dtype.NUMBER

    def test_dropped_column_is_gone(self):
        src = (
            'feature "left_moment" { usefulness: "u" expr: col("calc") * 2 }\n'
            'drop "calc"\n'
            + _feature('col("calc")')
        )
        _expect_error(src, ErrorKind.UNKNOWN_COLUMN, '"calc"')

    def test_drop_unknown_column(self):
        _expect_error('drop "nope"', ErrorKind.UNKNOWN_COLUMN)

    def test_drop_target_rejected(self):
        err = _expect_error('drop "Class"', ErrorKind.TYPE)
        assert "target" in err.message

    def test_dropped_then_redefined_is_allowed(self):
        s = _validate('drop "calc"\nfeature "calc" { usefulness: "u" expr: 1 }')
        assert len(s) == 2
