import random

import pytest

from feng.fedsl import (
    Binary,
    ColumnRef,
    DropColumn,
    ErrorKind,
    ExecError,
    FeatureDef,
    parse,
    pretty_print,
)

from gen_utils import random_script, random_table


class TestParse:
    def test_ratio_feature(self):
        s = parse(
            'feature "ratio" { usefulness: "u" expr: col("calc") / col("urea") }'
        )
        assert len(s) == 1
        stmt = s.statements[0]
        assert isinstance(stmt, FeatureDef)
        assert stmt.name == "ratio" and stmt.usefulness == "u"
        assert isinstance(stmt.expr, Binary) and stmt.expr.op == "/"
        assert stmt.expr.left == ColumnRef("calc")

    def test_empty_program(self):
        assert len(parse("")) == 0
        assert len(parse("   \n# only a comment\n")) == 0

    def test_missing_expression(self):
        with pytest.raises(ExecError) as exc:
            parse('feature "x" { usefulness: "u" expr: }')
        assert exc.value.kind is ErrorKind.PARSE
        assert exc.value.line is not None and exc.value.column is not None

    def test_missing_usefulness(self):
        with pytest.raises(ExecError) as exc:
            parse('feature "x" { expr: col("a") }')
        assert exc.value.kind is ErrorKind.PARSE

    def test_empty_usefulness_rejected(self):
        with pytest.raises(ExecError, match="usefulness must not be empty"):
            parse('feature "x" { usefulness: "" expr: 1 }')

    def test_drop_with_reason(self):
        s = parse('drop "left-weight" reason "covered by left_moment"')
        stmt = s.statements[0]
        assert stmt == DropColumn("left-weight", "covered by left_moment")

    def test_drop_without_reason(self):
        assert parse('drop "a"').statements[0] == DropColumn("a", None)

    def test_optional_comma_after_usefulness(self):
        a = parse('feature "f" { usefulness: "u", expr: 1 }')
        b = parse('feature "f" { usefulness: "u" expr: 1 }')
        assert a.statements == b.statements

    def test_comments_ignored(self):
        s = parse('# header\nfeature "f" { # inline\n usefulness: "u" expr: 1 # tail\n}')
        assert len(s) == 1

    def test_precedence(self):
        s = parse('feature "f" { usefulness: "u" expr: 1 + 2 * 3 == 7 and true }')
        e = s.statements[0].expr
        assert e.op == "and"
        assert e.left.op == "=="
        assert e.left.left.op == "+"
        assert e.left.left.right.op == "*"

    def test_unary_minus_and_not(self):
        e = parse('feature "f" { usefulness: "u" expr: not -1 < 2 }').statements[0].expr
        assert e.op == "not"
        assert e.operand.op == "<"
        assert e.operand.left.op == "-"

    def test_string_escapes(self):
        e = parse(r'feature "f" { usefulness: "u" expr: "a\"b\\c\nd\te" }').statements[0].expr
        assert e.value == 'a"b\\c\nd\te'

    def test_error_location(self):
        with pytest.raises(ExecError) as exc:
            parse('feature "f" {\n  usefulness: "u"\n  expr: col(7)\n}')
        assert exc.value.kind is ErrorKind.PARSE
        assert exc.value.line == 3

    @pytest.mark.parametrize(
        "source",
        [
            "feature",
            'feature "f"',
            'feature "f" {',
            'feature "f" { usefulness: "u" expr: 1',
            'drop 7',
            'feature "f" { usefulness: "u" expr: col("a" }',
            'feature "f" { usefulness: "u" expr: 1 + }',
            'feature "f" { usefulness: "u" expr: @ }',
            'feature "f" { usefulness: "u" expr: "unterminated }',
            'nonsense "f"',
        ],
    )
    def test_malformed_inputs(self, source):
        with pytest.raises(ExecError) as exc:
            parse(source)
        assert exc.value.kind is ErrorKind.PARSE

    def test_stable_error_message(self):
        def msg():
            try:
                parse('feature "f" { usefulness: "u" expr: 1 + }')
            except ExecError as e:
                return e.render()

        assert msg() == msg()


class TestPrettyPrint:
    def test_empty(self):
        assert pretty_print(parse("")) == ""

    def test_ratio_round_trip(self):
        src = 'feature "ratio" { usefulness: "u" expr: col("calc") / col("urea") }'
        s = parse(src)
        assert parse(pretty_print(s)).statements == s.statements

    def test_comments_dropped(self):
        s = parse('# gone\nfeature "f" { usefulness: "u" expr: 1 }')
        assert "#" not in pretty_print(s)

    def test_parentheses_minimal_but_sufficient(self):
        src = 'feature "f" { usefulness: "u" expr: (1 + 2) * 3 - -4 / (5 - 6) }'
        s = parse(src)
        text = pretty_print(s)
        assert parse(text).statements == s.statements

    def test_idempotent(self):
        src = (
            'feature "f" { usefulness: "u" expr: '
            'if_else(col("a") > 0 and not col("b"), log(col("a")), fill_missing(col("a"), 0)) }\n'
            'drop "a" reason "r"\n'
        )
        once = pretty_print(parse(src))
        assert pretty_print(parse(once)) == once

    @pytest.mark.parametrize("seed", range(120))
    def test_round_trip_random_scripts(self, seed):
        rng = random.Random(seed)
        table = random_table(rng)
        script = random_script(rng, table)
        text = pretty_print(script)
        assert parse(text).statements == script.statements
