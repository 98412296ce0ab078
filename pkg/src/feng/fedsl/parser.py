"""Recursive-descent parser.

Grammar:
    script     := statement* ;
    statement  := featureDef | dropStmt ;
    featureDef := "feature" STRING "{" "usefulness" ":" STRING ","? "expr" ":" expr "}" ;
    dropStmt   := "drop" STRING ("reason" STRING)? ;
    expr       := orExpr ;                     # or > and > not > cmp > add > mul > neg
    orExpr     := andExpr ("or" andExpr)* ;
    andExpr    := notExpr ("and" notExpr)* ;
    notExpr    := "not" notExpr | cmpExpr ;
    cmpExpr    := addExpr (("=="|"!="|"<"|"<="|">"|">=") addExpr)? ;
    addExpr    := mulExpr (("+"|"-") mulExpr)* ;
    mulExpr    := negExpr (("*"|"/") negExpr)* ;
    negExpr    := "-" negExpr | primary ;
    primary    := NUMBER | STRING | "true" | "false" | "col" "(" STRING ")"
                | IDENT "(" arglist ")" | "(" expr ")" | "[" arglist "]" ;
    arglist    := (expr ("," expr)*)? ;
"""

from __future__ import annotations

from .ast import (
    Binary,
    BoolLit,
    Call,
    ColumnRef,
    DropColumn,
    Expr,
    FeatureDef,
    FeatureScript,
    ListLit,
    NumberLit,
    Statement,
    StringLit,
    Unary,
)
from .errors import ErrorKind, ExecError
from .lexer import Token, tokenize

_COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Token | None = None) -> ExecError:
        tok = token or self.current
        return ExecError(ErrorKind.PARSE, message, tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.current
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            raise self.error(f"expected {what}, found {self._describe(self.current)}")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if self.current.kind != "IDENT" or self.current.text != word:
            raise self.error(f"expected '{word}', found {self._describe(self.current)}")
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        return self.current.kind == "IDENT" and self.current.text == word

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "EOF" else f"'{tok.text}'"

    # statements ------------------------------------------------------------

    def parse_script(self, source: str) -> FeatureScript:
        statements: list[Statement] = []
        while self.current.kind != "EOF":
            statements.append(self.parse_statement())
        return FeatureScript(tuple(statements), source)

    def parse_statement(self) -> Statement:
        if self.at_keyword("feature"):
            return self.parse_feature()
        if self.at_keyword("drop"):
            return self.parse_drop()
        raise self.error(
            f"expected 'feature' or 'drop', found {self._describe(self.current)}"
        )

    def parse_feature(self) -> FeatureDef:
        start = self.expect_keyword("feature")
        name = self.expect("STRING", "a quoted feature name")
        self.expect("LBRACE", "'{'")
        self.expect_keyword("usefulness")
        self.expect("COLON", "':'")
        usefulness = self.expect("STRING", "a quoted usefulness description")
        if not usefulness.value:
            raise self.error("usefulness must not be empty", usefulness)
        if self.current.kind == "COMMA":
            self.advance()
        self.expect_keyword("expr")
        self.expect("COLON", "':'")
        expr = self.parse_expr()
        self.expect("RBRACE", "'}'")
        return FeatureDef(
            name.value, usefulness.value, expr, span=(start.line, start.column)
        )

    def parse_drop(self) -> DropColumn:
        start = self.expect_keyword("drop")
        name = self.expect("STRING", "a quoted column name")
        reason = None
        if self.at_keyword("reason"):
            self.advance()
            reason = self.expect("STRING", "a quoted reason").value
        return DropColumn(name.value, reason, span=(start.line, start.column))

    # expressions -----------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def _binary_chain(self, sub, ops) -> Expr:
        left = sub()
        while self.current.kind == "OP" and self.current.text in ops:
            op = self.advance()
            right = sub()
            left = Binary(op.text, left, right, span=(op.line, op.column))
        return left

    def parse_or(self) -> Expr:
        left = self.parse_and()
        while self.at_keyword("or"):
            op = self.advance()
            left = Binary("or", left, self.parse_and(), span=(op.line, op.column))
        return left

    def parse_and(self) -> Expr:
        left = self.parse_not()
        while self.at_keyword("and"):
            op = self.advance()
            left = Binary("and", left, self.parse_not(), span=(op.line, op.column))
        return left

    def parse_not(self) -> Expr:
        if self.at_keyword("not"):
            op = self.advance()
            return Unary("not", self.parse_not(), span=(op.line, op.column))
        return self.parse_comparison()

    def parse_comparison(self) -> Expr:
        left = self.parse_additive()
        if self.current.kind == "OP" and self.current.text in _COMPARISON_OPS:
            op = self.advance()
            return Binary(
                op.text, left, self.parse_additive(), span=(op.line, op.column)
            )
        return left

    def parse_additive(self) -> Expr:
        return self._binary_chain(self.parse_multiplicative, ("+", "-"))

    def parse_multiplicative(self) -> Expr:
        return self._binary_chain(self.parse_negation, ("*", "/"))

    def parse_negation(self) -> Expr:
        if self.current.kind == "OP" and self.current.text == "-":
            op = self.advance()
            return Unary("-", self.parse_negation(), span=(op.line, op.column))
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.current
        if tok.kind == "NUMBER":
            self.advance()
            return NumberLit(tok.value, span=(tok.line, tok.column))
        if tok.kind == "STRING":
            self.advance()
            return StringLit(tok.value, span=(tok.line, tok.column))
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.parse_expr()
            self.expect("RPAREN", "')'")
            return inner
        if tok.kind == "LBRACKET":
            self.advance()
            items = self.parse_arglist("RBRACKET")
            self.expect("RBRACKET", "']'")
            return ListLit(tuple(items), span=(tok.line, tok.column))
        if tok.kind == "IDENT":
            if tok.text in ("true", "false"):
                self.advance()
                return BoolLit(tok.text == "true", span=(tok.line, tok.column))
            if tok.text == "col":
                self.advance()
                self.expect("LPAREN", "'('")
                name = self.expect("STRING", "a quoted column name")
                self.expect("RPAREN", "')'")
                return ColumnRef(name.value, span=(tok.line, tok.column))
            if tok.text in ("feature", "drop", "usefulness", "expr", "reason", "and", "or", "not"):
                raise self.error(f"expected an expression, found '{tok.text}'")
            self.advance()
            self.expect("LPAREN", "'(' after function name")
            args = self.parse_arglist("RPAREN")
            self.expect("RPAREN", "')'")
            return Call(tok.text, tuple(args), span=(tok.line, tok.column))
        raise self.error(f"expected an expression, found {self._describe(tok)}")

    def parse_arglist(self, closer: str) -> list[Expr]:
        args: list[Expr] = []
        if self.current.kind == closer:
            return args
        args.append(self.parse_expr())
        while self.current.kind == "COMMA":
            self.advance()
            args.append(self.parse_expr())
        return args


def parse(source: str) -> FeatureScript:
    """Parse a program; raises ExecError(ParseError) with line/column on failure."""
    return _Parser(source).parse_script(source)
